//! Word-length experiments for cyclic subgroups: geodesic lengths over `Q̂`,
//! power profiles, orbit-language samples and a bounded search for free
//! two-generated submonoids.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use serde::Serialize;

use crate::automaton::MealyAutomaton;
use crate::constructions::dual_automaton;
use crate::error::{Error, Result};
use crate::group::{element_order, BallSearch, Budget, CanonicalKey, Generators, OrderResult, Step};
use crate::word::{Signed, SignedWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Length {
    Exact(usize),
    /// Not found within the searched radius.
    Unknown { searched: usize },
}

impl Length {
    pub fn exact(self) -> Option<usize> {
        match self {
            Length::Exact(n) => Some(n),
            Length::Unknown { .. } => None,
        }
    }
}

/// Finds each target in a BFS over `G_M`, stopping at `max_r`, when every
/// target is found, or when the budget runs out.
fn search_lengths(search: &mut BallSearch, targets: &[CanonicalKey], max_r: usize) -> Vec<Length> {
    let mut found: Vec<Option<usize>> = targets.iter().map(|t| search.lookup(t).map(|w| w.len())).collect();
    while found.iter().any(Option::is_none) && search.radius() < max_r {
        match search.step() {
            Step::Grew(_) => {
                for (slot, t) in found.iter_mut().zip(targets) {
                    if slot.is_none() {
                        *slot = search.lookup(t).map(|w| w.len());
                    }
                }
            }
            Step::Closed | Step::Exhausted => break,
        }
    }
    // a closed search has seen the whole group
    let searched = if search.is_closed() { usize::MAX } else { search.radius() };
    found
        .into_iter()
        .map(|f| f.map_or(Length::Unknown { searched }, Length::Exact))
        .collect()
}

/// `|u|_S` over the symmetric generators `Q̂`, searching up to radius `max_r`.
pub fn geodesic_length(m: &MealyAutomaton, u: &SignedWord, max_r: usize, budget: Budget) -> Result<Length> {
    m.check_state_word(u)?;
    let mut search = BallSearch::new(m, budget)?;
    let (target, _) = search.generators().key_of(u);
    Ok(search_lengths(&mut search, &[target], max_r)[0])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerEntry {
    pub n: usize,
    pub exponent: usize,
    pub length: Length,
}

impl PowerEntry {
    /// `kn / |g^{kn}|_S`, when the length is known.
    pub fn ratio(&self) -> Option<f64> {
        self.length.exact().map(|l| self.exponent as f64 / l as f64)
    }
}

/// Geodesic lengths of `g^{kn}` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerProfile {
    pub base: String,
    pub step: usize,
    pub horizon: usize,
    pub entries: Vec<PowerEntry>,
    /// Largest known ratio `kn / |g^{kn}|_S`.
    pub c_est: Option<f64>,
    /// Heuristic red flag: at least three known entries, and the last ratio
    /// is at least twice the smallest one.
    pub sublinear: bool,
}

/// Computes `|g^{kn}|_S` for `n = 1..=n_max` in one BFS of radius `max_r`.
///
/// Fails with [`Error::Torsion`] when `g` has order at most `k·n_max`.
pub fn power_profile(
    m: &MealyAutomaton,
    g: &SignedWord,
    k: usize,
    n_max: usize,
    max_r: usize,
    budget: Budget,
) -> Result<PowerProfile> {
    if k == 0 || n_max == 0 {
        return Err(Error::Invalid("step and n_max must be positive".into()));
    }
    if let OrderResult::Order(order) = element_order(m, g, k * n_max, None, budget)? {
        return Err(Error::Torsion { order });
    }
    let mut search = BallSearch::new(m, budget)?;
    let gens = search.generators().clone();
    let (gk, _) = gens.key_of(&g.pow(k as i64));
    let mut targets = vec![gk.clone()];
    for _ in 1..n_max {
        let next = crate::group::compose(targets.last().expect("non-empty"), &gk).0;
        targets.push(next);
    }
    let lengths = search_lengths(&mut search, &targets, max_r);
    let entries: Vec<PowerEntry> = lengths
        .into_iter()
        .enumerate()
        .map(|(i, length)| PowerEntry {
            n: i + 1,
            exponent: k * (i + 1),
            length,
        })
        .collect();
    let ratios: Vec<f64> = entries.iter().filter_map(PowerEntry::ratio).collect();
    let c_est = ratios.iter().copied().reduce(f64::max);
    let min = ratios.iter().copied().reduce(f64::min);
    let sublinear = match (ratios.last(), min) {
        (Some(&last), Some(min)) if ratios.len() >= 3 => last >= 2.0 * min,
        _ => false,
    };
    Ok(PowerProfile {
        base: m.render_states(g.as_slice()),
        step: k,
        horizon: max_r,
        entries,
        c_est,
        sublinear,
    })
}

/// A finite part of `L = {γ·vⁿ : n ≥ 1, γ ∈ Q*}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitLanguageSample {
    pub seed: SignedWord,
    pub n_max: usize,
    pub gamma_len_max: usize,
    /// Sorted by length, then lexicographically by letter index.
    pub words: Vec<SignedWord>,
}

fn act_positive(m: &MealyAutomaton, q: usize, w: &[usize]) -> Vec<usize> {
    let mut state = q;
    w.iter()
        .map(|&a| {
            let (b, p) = m.delta(state, a);
            state = p;
            b
        })
        .collect()
}

/// Collects `γ·vⁿ` for `1 ≤ n ≤ n_max` and positive `γ` with
/// `|γ| ≤ gamma_len_max` (the empty `γ` included).
pub fn orbit_language(m: &MealyAutomaton, v: &SignedWord, n_max: usize, gamma_len_max: usize) -> Result<OrbitLanguageSample> {
    if v.is_empty() {
        return Err(Error::EmptySeed);
    }
    if !v.is_positive() {
        return Err(Error::Invalid("seed must be a positive letter word".into()));
    }
    m.check_letter_word(v)?;
    m.crossing()?;
    let base: Vec<usize> = v.iter().map(|s| s.index).collect();
    let mut all: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for n in 1..=n_max {
        let mut level: HashSet<Vec<usize>> = HashSet::from([base.repeat(n)]);
        let mut seen = level.clone();
        for _ in 0..gamma_len_max {
            let mut next = HashSet::new();
            for w in &level {
                for q in 0..m.num_states() {
                    let image = act_positive(m, q, w);
                    if seen.insert(image.clone()) {
                        next.insert(image);
                    }
                }
            }
            level = next;
        }
        all.extend(seen.into_iter().map(|w| (w.len(), w)));
    }
    Ok(OrbitLanguageSample {
        seed: v.clone(),
        n_max,
        gamma_len_max,
        words: all.into_iter().map(|(_, w)| SignedWord::positive(w)).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub n_max: usize,
    pub gamma_len_max: usize,
    /// Powers of the seed tried when looking for torsion in the dual group.
    pub order_bound: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            n_max: 2,
            gamma_len_max: 3,
            order_bound: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubmonoidSearch {
    /// Every product of at most `certified_up_to` factors is a distinct
    /// word with a distinct image in the dual group. A bounded check only.
    Candidate {
        x1: SignedWord,
        x2: SignedWord,
        certified_up_to: usize,
    },
    NotFound { pairs_tried: usize },
}

/// Searches the orbit-language sample for equal-length `x1 ≠ x2` whose
/// products of up to `certify_depth` factors map injectively to the dual
/// group.
pub fn free_submonoid_search(
    m: &MealyAutomaton,
    v: &SignedWord,
    bounds: SearchBounds,
    certify_depth: usize,
) -> Result<SubmonoidSearch> {
    if certify_depth == 0 {
        return Err(Error::Invalid("certification depth must be positive".into()));
    }
    let dual = dual_automaton(m)?;
    if let OrderResult::Order(order) = element_order(&dual, v, bounds.order_bound, None, Budget::default())? {
        return Err(Error::Torsion { order });
    }
    let sample = orbit_language(m, v, bounds.n_max, bounds.gamma_len_max)?;
    let gens = Generators::new(&dual)?;
    let mut pairs_tried = 0;
    for (_, group) in &sample.words.iter().chunk_by(|w| w.len()) {
        let same_length: Vec<&SignedWord> = group.collect();
        for (x1, x2) in same_length.iter().tuple_combinations() {
            pairs_tried += 1;
            if certify_pair(&gens, x1, x2, certify_depth) {
                return Ok(SubmonoidSearch::Candidate {
                    x1: (*x1).clone(),
                    x2: (*x2).clone(),
                    certified_up_to: certify_depth,
                });
            }
        }
    }
    Ok(SubmonoidSearch::NotFound { pairs_tried })
}

/// All products `x_{i_1} ⋯ x_{i_j}` with `1 ≤ j ≤ depth`, shortest first.
pub fn monoid_products(x1: &SignedWord, x2: &SignedWord, depth: usize) -> Vec<Vec<Signed>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<Signed>> = vec![Vec::new()];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|p| {
                [x1, x2].into_iter().map(move |x| {
                    let mut q = p.clone();
                    q.extend(x.iter().copied());
                    q
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

fn certify_pair(dual_gens: &Generators, x1: &SignedWord, x2: &SignedWord, depth: usize) -> bool {
    let products = monoid_products(x1, x2, depth);
    let distinct_words: HashSet<&Vec<Signed>> = products.iter().collect();
    if distinct_words.len() != products.len() {
        return false;
    }
    let mut keys = HashSet::new();
    products.iter().all(|p| {
        let word: SignedWord = p.iter().copied().collect();
        keys.insert(dual_gens.key_of(&word).0)
    })
}
