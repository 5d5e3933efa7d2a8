//! Exact equality, ball growth and finiteness for the group `G_M` of a
//! bireversible automaton.
//!
//! An element is represented by the minimized machine of its action on
//! words over the symmetrized alphabet `Â`. Minimal machines are compared as
//! serialized data, so equal keys mean equal actions and nothing else.

mod machine;

use std::time::{Duration, Instant};

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

pub use machine::{compose, CanonicalKey};

use crate::automaton::MealyAutomaton;
use crate::constructions::dual_automaton;
use crate::crossing::CrossingTable;
use crate::error::Result;
use crate::word::{Signed, SignedWord};

use machine::generator_key;

/// An element of `G_M`: a representative state word and the canonical
/// machine of its action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub word: SignedWord,
    pub key: CanonicalKey,
}

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        self.key.is_identity()
    }
}

/// Resource limits for breadth-first searches.
///
/// `max_nodes` bounds the total number of composite states explored while
/// multiplying machines; `max_elements` bounds the number of distinct
/// elements kept. A time limit makes results depend on the machine, so it is
/// off by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_nodes: usize,
    pub max_elements: usize,
    #[serde(rename = "time_limit_ms", serialize_with = "serialize_millis")]
    pub time_limit: Option<Duration>,
}

fn serialize_millis<S: serde::Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.serialize_some(&(d.as_millis() as u64)),
        None => s.serialize_none(),
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 1_000_000,
            max_elements: 200_000,
            time_limit: None,
        }
    }
}

impl Budget {
    pub fn with_nodes(max_nodes: usize) -> Self {
        Budget {
            max_nodes,
            ..Budget::default()
        }
    }
}

/// Precomputed generator machines of `G_M`, in code order
/// `q0, q0⁻¹, q1, q1⁻¹, …`.
#[derive(Debug, Clone)]
pub struct Generators {
    letters: usize,
    keys: Vec<CanonicalKey>,
}

impl Generators {
    pub fn new(m: &MealyAutomaton) -> Result<Self> {
        let table = m.crossing()?;
        Ok(Self::from_table(table))
    }

    fn from_table(table: &CrossingTable) -> Self {
        let keys = (0..2 * table.num_states()).map(|c| generator_key(table, c)).collect();
        Generators {
            letters: 2 * table.num_letters(),
            keys,
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, s: Signed) -> &CanonicalKey {
        &self.keys[s.code()]
    }

    pub fn identity(&self) -> CanonicalKey {
        CanonicalKey::identity(self.letters)
    }

    /// Folds the word left to right, minimizing after every factor.
    pub fn key_of(&self, word: &SignedWord) -> (CanonicalKey, usize) {
        let mut nodes = 0;
        let key = word.iter().fold(self.identity(), |acc, &s| {
            let (k, n) = compose(&acc, self.key(s));
            nodes += n;
            k
        });
        (key, nodes)
    }
}

pub fn canonicalize(m: &MealyAutomaton, u: &SignedWord) -> Result<GroupElement> {
    m.check_state_word(u)?;
    let gens = Generators::new(m)?;
    Ok(GroupElement {
        word: u.clone(),
        key: gens.key_of(u).0,
    })
}

/// Equality in `G_M`, decided by comparing canonical keys.
pub fn equal(m: &MealyAutomaton, u: &SignedWord, v: &SignedWord) -> Result<bool> {
    m.check_state_word(u)?;
    m.check_state_word(v)?;
    let gens = Generators::new(m)?;
    Ok(gens.key_of(u).0 == gens.key_of(v).0)
}

const EXPANSION_CHUNK: usize = 256;

/// Outcome of one BFS level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// The level added this many new elements.
    Grew(usize),
    /// The level added nothing: the ball is the whole group.
    Closed,
    /// The budget ran out; the level was discarded.
    Exhausted,
}

/// Breadth-first enumeration of `G_M` by word length over `Q̂`.
///
/// Elements are stored in discovery order together with a geodesic
/// representative. Expansion of a level runs in parallel; merging is
/// sequential in frontier order, so results do not depend on scheduling.
pub struct BallSearch {
    gens: Generators,
    budget: Budget,
    elements: IndexMap<CanonicalKey, SignedWord>,
    level_start: usize,
    radius: usize,
    sizes: Vec<usize>,
    nodes: usize,
    closed: bool,
    exhausted: bool,
    started: Instant,
}

impl BallSearch {
    pub fn new(m: &MealyAutomaton, budget: Budget) -> Result<Self> {
        Ok(Self::with_generators(Generators::new(m)?, budget))
    }

    pub fn with_generators(gens: Generators, budget: Budget) -> Self {
        let mut elements = IndexMap::new();
        elements.insert(gens.identity(), SignedWord::new());
        BallSearch {
            gens,
            budget,
            elements,
            level_start: 0,
            radius: 0,
            sizes: vec![1],
            nodes: 0,
            closed: false,
            exhausted: false,
            started: Instant::now(),
        }
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    /// Largest radius whose ball is completely known.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Cumulative ball sizes for radii `0..=radius()`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Geodesic representative of an element found so far.
    pub fn lookup(&self, key: &CanonicalKey) -> Option<&SignedWord> {
        self.elements.get(key)
    }

    pub fn elements(&self) -> impl Iterator<Item = (&CanonicalKey, &SignedWord)> {
        self.elements.iter()
    }

    pub fn into_elements(self) -> Vec<GroupElement> {
        self.elements
            .into_iter()
            .map(|(key, word)| GroupElement { word, key })
            .collect()
    }

    fn over_time(&self) -> bool {
        self.budget.time_limit.is_some_and(|t| self.started.elapsed() > t)
    }

    /// Steps until the group closes (`true`) or the budget runs out.
    pub fn run_to_closure(&mut self) -> bool {
        loop {
            match self.step() {
                Step::Grew(_) => {}
                Step::Closed => return true,
                Step::Exhausted => return false,
            }
        }
    }

    pub fn step(&mut self) -> Step {
        if self.closed {
            return Step::Closed;
        }
        if self.exhausted {
            return Step::Exhausted;
        }
        let frontier: Vec<(&CanonicalKey, &SignedWord)> =
            self.elements[self.level_start..].iter().collect();
        let ngens = self.gens.len();
        let gens = &self.gens;
        let mut candidates = Vec::new();
        let mut nodes = 0;
        // chunks are checked in frontier order, so the cut-off point is
        // independent of scheduling
        for chunk in frontier.chunks(EXPANSION_CHUNK) {
            let expanded: Vec<(SignedWord, CanonicalKey, usize)> = chunk
                .par_iter()
                .flat_map_iter(|&(key, word)| {
                    (0..ngens).filter_map(move |c| {
                        let s = Signed::from_code(c);
                        // a cancelling letter leads back into the previous sphere
                        if word.as_slice().last() == Some(&s.inv()) {
                            return None;
                        }
                        let (next, nodes) = compose(key, gens.key(s));
                        let mut w = word.clone();
                        w.push(s);
                        Some((w, next, nodes))
                    })
                })
                .collect();
            nodes += expanded.iter().map(|c| c.2).sum::<usize>();
            candidates.extend(expanded);
            if self.nodes + nodes > self.budget.max_nodes || self.over_time() {
                self.exhausted = true;
                return Step::Exhausted;
            }
        }
        let before = self.elements.len();
        let mut fresh = IndexMap::new();
        for (word, key, _) in candidates {
            if !self.elements.contains_key(&key) {
                fresh.entry(key).or_insert(word);
            }
        }
        if before + fresh.len() > self.budget.max_elements {
            self.exhausted = true;
            return Step::Exhausted;
        }
        self.nodes += nodes;
        let added = fresh.len();
        self.elements.extend(fresh);
        self.level_start = before;
        self.radius += 1;
        self.sizes.push(self.elements.len());
        if added == 0 {
            self.closed = true;
            Step::Closed
        } else {
            Step::Grew(added)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthStatus {
    /// Every requested radius was computed.
    Complete,
    /// The group closed: the last size is its order.
    Finite,
    /// Sizes beyond the last listed radius are unknown.
    Unknown,
}

/// Ball sizes `|B(0)|, …, |B(r)|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthSequence {
    pub requested_radius: usize,
    pub sizes: Vec<usize>,
    pub status: GrowthStatus,
    pub budget: Budget,
}

impl GrowthSequence {
    /// Largest radius with a known size.
    pub fn known_radius(&self) -> usize {
        self.sizes.len() - 1
    }
}

/// Ball sizes over the generators `Q̂`. When the group closes early the
/// remaining radii repeat the final size.
pub fn ball(m: &MealyAutomaton, radius: usize, budget: Budget) -> Result<GrowthSequence> {
    let mut search = BallSearch::new(m, budget)?;
    Ok(grow(&mut search, radius))
}

pub(crate) fn grow(search: &mut BallSearch, radius: usize) -> GrowthSequence {
    let mut status = GrowthStatus::Complete;
    while search.radius() < radius {
        match search.step() {
            Step::Grew(_) => {}
            Step::Closed => {
                status = GrowthStatus::Finite;
                break;
            }
            Step::Exhausted => {
                status = GrowthStatus::Unknown;
                break;
            }
        }
    }
    let mut sizes = search.sizes().to_vec();
    sizes.truncate(radius + 1);
    if status == GrowthStatus::Finite {
        let last = *sizes.last().expect("ball of radius 0");
        sizes.resize(radius + 1, last);
    }
    GrowthSequence {
        requested_radius: radius,
        sizes,
        status,
        budget: search.budget(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    /// The whole group, in BFS order with geodesic representatives.
    Finite(Vec<GroupElement>),
    /// The search did not close within the budget.
    Unknown {
        budget: Budget,
        radius: usize,
        found: usize,
    },
}

impl Enumeration {
    pub fn order(&self) -> Option<usize> {
        match self {
            Enumeration::Finite(list) => Some(list.len()),
            Enumeration::Unknown { .. } => None,
        }
    }
}

/// Enumerates `G_M` until closure under right multiplication by `Q̂`.
/// A `Finite` result is a proof of finiteness.
pub fn try_enumerate(m: &MealyAutomaton, budget: Budget) -> Result<Enumeration> {
    let mut search = BallSearch::new(m, budget)?;
    Ok(enumerate_search(search.run_to_closure(), search))
}


fn enumerate_search(closed: bool, search: BallSearch) -> Enumeration {
    if closed {
        Enumeration::Finite(search.into_elements())
    } else {
        Enumeration::Unknown {
            budget: search.budget(),
            radius: search.radius(),
            found: search.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "order")]
pub enum Finiteness {
    Finite(usize),
    Unknown,
}

impl From<&Enumeration> for Finiteness {
    fn from(e: &Enumeration) -> Self {
        e.order().map_or(Finiteness::Unknown, Finiteness::Finite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    BothFinite,
    BothUnknown,
    /// One side closed and the other did not within the budget.
    BudgetLimited,
    /// One side finite and the other proven infinite. This tool never
    /// proves infiniteness, so the variant is never produced.
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinitenessReport {
    pub group: Finiteness,
    pub dual: Finiteness,
    pub verdict: Verdict,
    pub budget: Budget,
}

/// Runs [`try_enumerate`] on `M` and on its dual with the same budget. The
/// two groups are finite together, so any disagreement is a budget effect.
pub fn cross_check_finiteness(m: &MealyAutomaton, budget: Budget) -> Result<FinitenessReport> {
    let group = Finiteness::from(&try_enumerate(m, budget)?);
    let dual = Finiteness::from(&try_enumerate(&dual_automaton(m)?, budget)?);
    let verdict = match (group, dual) {
        (Finiteness::Finite(_), Finiteness::Finite(_)) => Verdict::BothFinite,
        (Finiteness::Unknown, Finiteness::Unknown) => Verdict::BothUnknown,
        _ => Verdict::BudgetLimited,
    };
    Ok(FinitenessReport {
        group,
        dual,
        verdict,
        budget,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderResult {
    /// The least `n ≥ 1` with `uⁿ = 1`.
    Order(usize),
    /// The action on positive words of length `depth` has a cycle of length
    /// `cycle > bound`, so the order exceeds the bound. It may still be finite.
    ExceedsBound { depth: usize, cycle: usize },
    /// No power `uⁿ` with `n ≤ checked` is trivial. `checked` falls short of
    /// the requested bound when the node budget ran out.
    Unknown { checked: usize },
}

/// Order of `u` in `G_M`, tried up to `bound`. With `certify_depth` set, a
/// negative answer is strengthened when the cycle structure of `u` on
/// positive words of that length proves order greater than `bound`.
pub fn element_order(
    m: &MealyAutomaton,
    u: &SignedWord,
    bound: usize,
    certify_depth: Option<usize>,
    budget: Budget,
) -> Result<OrderResult> {
    m.check_state_word(u)?;
    let gens = Generators::new(m)?;
    let (key, mut nodes) = gens.key_of(u);
    let mut power = key.clone();
    let mut checked = 0;
    for n in 1..=bound {
        if power.is_identity() {
            return Ok(OrderResult::Order(n));
        }
        checked = n;
        if n == bound {
            break;
        }
        let (next, explored) = compose(&power, &key);
        nodes += explored;
        if nodes > budget.max_nodes {
            break;
        }
        power = next;
    }
    if let Some(depth) = certify_depth {
        let cycle = longest_cycle(&key, m.num_letters(), depth);
        if cycle > bound {
            return Ok(OrderResult::ExceedsBound { depth, cycle });
        }
    }
    Ok(OrderResult::Unknown { checked })
}

/// Longest cycle of the permutation induced on positive words of length
/// `depth`, words encoded in base `|A|`.
fn longest_cycle(key: &CanonicalKey, letters: usize, depth: usize) -> usize {
    let count = letters.pow(depth as u32);
    let decode = |mut i: usize| -> Vec<usize> {
        (0..depth)
            .map(|_| {
                let a = i % letters;
                i /= letters;
                2 * a
            })
            .collect()
    };
    let encode = |w: &[usize]| w.iter().rev().fold(0, |acc, &c| acc * letters + c / 2);
    let image: Vec<usize> = (0..count).map(|i| encode(&key.run(&decode(i)))).collect();
    let mut seen = vec![false; count];
    let mut longest = 0;
    for start in 0..count {
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = image[i];
            len += 1;
        }
        longest = longest.max(len);
    }
    longest
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(m: &MealyAutomaton, s: &str) -> SignedWord {
        m.parse_state_word(s).unwrap()
    }

    #[test]
    fn swap_squares_to_identity() {
        let m = fixtures::swap();
        let ss = canonicalize(&m, &w(&m, "ss")).unwrap();
        let e = canonicalize(&m, &SignedWord::new()).unwrap();
        assert_eq!(ss.key, e.key);
        assert!(e.is_identity());
        assert_ne!(canonicalize(&m, &w(&m, "s")).unwrap().key, e.key);
        assert!(equal(&m, &w(&m, "s"), &w(&m, "s^-1")).unwrap());
    }

    #[test]
    fn transposer_states_act_trivially() {
        let m = fixtures::transposer();
        assert!(canonicalize(&m, &w(&m, "a")).unwrap().is_identity());
        assert!(equal(&m, &w(&m, "a"), &w(&m, "b")).unwrap());
    }

    #[test]
    fn non_bireversible_is_rejected() {
        let m = fixtures::adding();
        assert!(canonicalize(&m, &w(&m, "q")).is_err());
    }

    #[test]
    fn balls_of_small_groups() {
        let sw = ball(&fixtures::swap(), 3, Budget::default()).unwrap();
        assert_eq!(sw.sizes, vec![1, 2, 2, 2]);
        assert_eq!(sw.status, GrowthStatus::Finite);
        let id = ball(&fixtures::identity(), 5, Budget::default()).unwrap();
        assert_eq!(id.sizes, vec![1; 6]);
    }

    #[test]
    fn aleshin_grows_like_free_group() {
        let g = ball(&fixtures::aleshin(), 4, Budget::default()).unwrap();
        assert_eq!(g.sizes, vec![1, 7, 37, 187, 937]);
        assert_eq!(g.status, GrowthStatus::Complete);
    }

    #[test]
    fn enumeration_and_cross_check() {
        let sw = try_enumerate(&fixtures::swap(), Budget::default()).unwrap();
        assert_eq!(sw.order(), Some(2));
        assert_eq!(try_enumerate(&fixtures::identity(), Budget::default()).unwrap().order(), Some(1));
        let al = try_enumerate(&fixtures::aleshin(), Budget::with_nodes(20_000)).unwrap();
        assert!(matches!(al, Enumeration::Unknown { .. }));

        let r = cross_check_finiteness(&fixtures::swap(), Budget::default()).unwrap();
        assert_eq!((r.group, r.dual, r.verdict), (Finiteness::Finite(2), Finiteness::Finite(1), Verdict::BothFinite));
        let r = cross_check_finiteness(&fixtures::transposer(), Budget::default()).unwrap();
        assert_eq!((r.group, r.dual), (Finiteness::Finite(1), Finiteness::Finite(2)));
    }

    #[test]
    fn orders() {
        let sw = fixtures::swap();
        assert_eq!(element_order(&sw, &w(&sw, "s"), 10, None, Budget::default()).unwrap(), OrderResult::Order(2));
        let id = fixtures::identity();
        assert_eq!(element_order(&id, &w(&id, "e"), 10, None, Budget::default()).unwrap(), OrderResult::Order(1));
        let al = fixtures::aleshin();
        assert_eq!(element_order(&al, &w(&al, "a"), 10, None, Budget::default()).unwrap(), OrderResult::Unknown { checked: 10 });
        match element_order(&al, &w(&al, "a"), 10, Some(8), Budget::default()).unwrap() {
            OrderResult::ExceedsBound { cycle, .. } => assert!(cycle > 10),
            other => panic!("{other:?}"),
        }
    }
}
