use std::collections::{HashSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mealy_core::constructions::{disjoint_union, dual_automaton};
use mealy_core::distortion::{free_submonoid_search, monoid_products, power_profile, SearchBounds, SubmonoidSearch};
use mealy_core::fixtures;
use mealy_core::group::{cross_check_finiteness, element_order, equal, Budget, Finiteness, OrderResult, Verdict};
use mealy_core::quotient::{
    aut1_search, is_compatible, parse_marked_group, verify_mns_instance, FiniteMarkedGroup, QuotientGraph,
    DEFAULT_VERTEX_CAP,
};
use mealy_core::rewriting::{normal_form, Orientation};
use mealy_core::word::{MixedSymbol, MixedWord, Signed, SignedWord};
use mealy_core::{Error, MealyAutomaton};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: Result<T, Error>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Every automaton with two states `p, q` over `{0, 1}`.
fn corpus() -> Vec<MealyAutomaton> {
    (0..256usize)
        .map(|code| {
            MealyAutomaton::from_fn(format!("m{code}"), &["0", "1"], &["p", "q"], |q, a| {
                let cell = (code >> (2 * (2 * q + a))) & 3;
                (cell & 1, cell >> 1)
            })
            .unwrap()
        })
        .collect()
}

fn bijective(images: impl Iterator<Item = usize>, n: usize) -> bool {
    let set: HashSet<usize> = images.collect();
    set.len() == n && set.iter().all(|&i| i < n)
}

/// (invertible, reversible, delta injective) read straight off the tables.
fn brute_properties(m: &MealyAutomaton) -> (bool, bool, bool) {
    let (na, nq) = (m.num_letters(), m.num_states());
    let inv = (0..nq).all(|q| bijective((0..na).map(|a| m.output(q, a)), na));
    let rev = (0..na).all(|a| bijective((0..nq).map(|q| m.transition(q, a)), nq));
    let cells: HashSet<(usize, usize)> = (0..nq)
        .flat_map(|q| (0..na).map(move |a| (q, a)))
        .map(|(q, a)| (m.output(q, a), m.transition(q, a)))
        .collect();
    (inv, rev, cells.len() == na * nq)
}

fn criterion_1() -> Outcome {
    let mut ours = [0usize; 3];
    let mut brute = [0usize; 3];
    for m in corpus() {
        let r = m.validate();
        let (inv, rev, delta) = brute_properties(&m);
        let bi = inv && rev && delta;
        ensure(
            (r.invertible, r.reversible, r.delta_bijective, r.bireversible) == (inv, rev, delta, bi),
            || format!("{}: flags disagree with brute force", m.name()),
        )?;
        for (count, flag) in ours.iter_mut().zip([r.invertible, r.reversible, r.bireversible]) {
            *count += flag as usize;
        }
        for (count, flag) in brute.iter_mut().zip([inv, rev, bi]) {
            *count += flag as usize;
        }
    }
    ensure(ours == brute, || format!("counts {ours:?} vs {brute:?}"))?;
    Ok(format!(
        "256 automata, invertible/reversible/bireversible = {}/{}/{}",
        ours[0], ours[1], ours[2]
    ))
}

/// State permutations on positive words of length `depth`, closed under
/// composition. `None` once the closure exceeds `cap`.
fn level_group_order(m: &MealyAutomaton, depth: usize, cap: usize) -> Option<usize> {
    let na = m.num_letters();
    let count = na.pow(depth as u32);
    let act = |q: usize, mut i: usize| {
        let (mut q, mut out, mut place) = (q, 0, 1);
        for _ in 0..depth {
            let a = i % na;
            i /= na;
            out += m.output(q, a) * place;
            q = m.transition(q, a);
            place *= na;
        }
        out
    };
    let gens: Vec<Vec<usize>> = (0..m.num_states())
        .map(|q| (0..count).map(|i| act(q, i)).collect())
        .collect();
    let identity: Vec<usize> = (0..count).collect();
    let mut seen = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(p) = queue.pop_front() {
        for g in &gens {
            let next: Vec<usize> = p.iter().map(|&i| g[i]).collect();
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(next);
            }
        }
    }
    Some(seen.len())
}

fn criterion_2() -> Outcome {
    let pool: Vec<MealyAutomaton> = corpus()
        .into_iter()
        .filter(MealyAutomaton::is_bireversible)
        .chain(fixtures::bireversible_fixtures())
        .collect();
    let (mut finite, mut unknown) = (0, 0);
    for m in &pool {
        let back = core(dual_automaton(&core(dual_automaton(m))?))?;
        ensure(&back == m, || format!("{}: dual of dual differs", m.name()))?;
        let r = core(cross_check_finiteness(m, Budget::default()))?;
        ensure(r.verdict != Verdict::Violation, || format!("{}: violation", m.name()))?;
        ensure(r.verdict != Verdict::BudgetLimited, || {
            format!("{}: sides disagree, {:?} vs {:?}", m.name(), r.group, r.dual)
        })?;
        if let (Finiteness::Finite(g), Finiteness::Finite(d)) = (r.group, r.dual) {
            finite += 1;
            let dual = core(dual_automaton(m))?;
            for (side, n, a) in [("group", g, m), ("dual", d, &dual)] {
                let level = level_group_order(a, 6, 10_000);
                ensure(level == Some(n), || {
                    format!("{}: {side} order {n}, level-6 action has {level:?}", m.name())
                })?;
            }
        } else {
            unknown += 1;
        }
    }
    for (m, expected) in [(fixtures::swap(), (2, 1)), (fixtures::transposer(), (1, 2))] {
        let r = core(cross_check_finiteness(&m, Budget::default()))?;
        ensure((r.group, r.dual) == (Finiteness::Finite(expected.0), Finiteness::Finite(expected.1)), || {
            format!("{}: got {:?}/{:?}", m.name(), r.group, r.dual)
        })?;
    }
    Ok(format!(
        "{} automata, {finite} finite on both sides, {unknown} unknown on both sides; swap (2,1), transposer (1,2)",
        pool.len()
    ))
}

fn random_signed(rng: &mut ChaCha8Rng, n: usize) -> Signed {
    Signed {
        index: rng.gen_range(0..n),
        inverse: rng.gen(),
    }
}

/// `q a ρ(q,a)⁻¹ λ(q,a)⁻¹`, or its inverse.
fn random_relator(m: &MealyAutomaton, rng: &mut ChaCha8Rng) -> Vec<MixedSymbol> {
    let q = rng.gen_range(0..m.num_states());
    let a = rng.gen_range(0..m.num_letters());
    let (b, p) = m.delta(q, a);
    let rel = MixedWord(vec![
        MixedSymbol::State(Signed::pos(q)),
        MixedSymbol::Letter(Signed::pos(a)),
        MixedSymbol::State(Signed::neg(p)),
        MixedSymbol::Letter(Signed::neg(b)),
    ]);
    if rng.gen() {
        rel.inverse().0
    } else {
        rel.0
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fixtures = fixtures::bireversible_fixtures();
    for m in &fixtures {
        for _ in 0..1000 {
            let len = rng.gen_range(0..=16);
            let word: Vec<MixedSymbol> = (0..len)
                .map(|_| {
                    if rng.gen() {
                        MixedSymbol::State(random_signed(&mut rng, m.num_states()))
                    } else {
                        MixedSymbol::Letter(random_signed(&mut rng, m.num_letters()))
                    }
                })
                .collect();
            let p = MixedWord(word);
            let lf = core(normal_form(m, &p, Orientation::LettersFirst))?;
            let sf = core(normal_form(m, &p, Orientation::StatesFirst))?;

            let mut q = p.0.clone();
            for _ in 0..rng.gen_range(1..=5) {
                let at = rng.gen_range(0..=q.len());
                let rel = random_relator(m, &mut rng);
                q.splice(at..at, rel);
            }
            let q = MixedWord(q);
            ensure(core(normal_form(m, &q, Orientation::LettersFirst))? == lf, || {
                format!("{}: relator insertion changed the letters-first form", m.name())
            })?;
            ensure(core(normal_form(m, &q, Orientation::StatesFirst))? == sf, || {
                format!("{}: relator insertion changed the states-first form", m.name())
            })?;
            ensure(core(normal_form(m, &lf.to_mixed(), Orientation::StatesFirst))? == sf, || {
                format!("{}: letters-first form does not convert", m.name())
            })?;
            ensure(core(normal_form(m, &sf.to_mixed(), Orientation::LettersFirst))? == lf, || {
                format!("{}: states-first form does not convert", m.name())
            })?;
        }
    }
    Ok(format!("{} fixtures x 1000 words", fixtures.len()))
}

/// All reduced signed words of length at most `max` over `n` symbols.
fn reduced_words(n: usize, max: usize) -> Vec<SignedWord> {
    let mut out = vec![SignedWord::new()];
    let mut level = vec![Vec::<Signed>::new()];
    for _ in 0..max {
        level = level
            .iter()
            .flat_map(|w| {
                (0..2 * n).map(Signed::from_code).filter_map(move |s| {
                    if w.last() == Some(&s.inv()) {
                        return None;
                    }
                    let mut next = w.clone();
                    next.push(s);
                    Some(next)
                })
            })
            .collect();
        out.extend(level.iter().map(|w| w.iter().copied().collect()));
    }
    out
}

/// `s x = x' s'` for a signed state and a signed letter, solved directly
/// from the tables of a bireversible automaton.
fn cross(m: &MealyAutomaton, s: Signed, x: Signed) -> (Signed, Signed) {
    let (na, nq) = (m.num_letters(), m.num_states());
    let (q, a) = (s.index, x.index);
    match (s.inverse, x.inverse) {
        (false, false) => (Signed::pos(m.output(q, a)), Signed::pos(m.transition(q, a))),
        // p a = c q gives q a⁻¹ = c⁻¹ p
        (false, true) => {
            let p = (0..nq).find(|&p| m.transition(p, a) == q).unwrap();
            (Signed::neg(m.output(p, a)), Signed::pos(p))
        }
        // q c = a p gives q⁻¹ a = c p⁻¹
        (true, false) => {
            let c = (0..na).find(|&c| m.output(q, c) == a).unwrap();
            (Signed::pos(c), Signed::neg(m.transition(q, c)))
        }
        // p c = a q gives q⁻¹ a⁻¹ = c⁻¹ p⁻¹
        (true, true) => {
            let (p, c) = (0..nq)
                .cartesian_product(0..na)
                .find(|&(p, c)| (m.output(p, c), m.transition(p, c)) == (a, q))
                .unwrap();
            (Signed::neg(c), Signed::neg(p))
        }
    }
}

/// Images of the given letter words under the state word `g`, the
/// rightmost state acting first.
fn action_table(m: &MealyAutomaton, g: &SignedWord, letters: &[Vec<Signed>]) -> Vec<Vec<Signed>> {
    let run = |s: Signed, word: Vec<Signed>| -> Vec<Signed> {
        let mut s = s;
        word.into_iter()
            .map(|x| {
                let (y, next) = cross(m, s, x);
                s = next;
                y
            })
            .collect()
    };
    letters
        .iter()
        .map(|word| g.iter().rev().fold(word.clone(), |w, &s| run(s, w)))
        .collect()
}

fn criterion_4() -> Outcome {
    let mut compared = 0;
    let mut disagreements = Vec::new();
    let mut positive_only = 0;
    for m in [fixtures::swap(), fixtures::transposer(), fixtures::aleshin()] {
        let words = reduced_words(m.num_states(), 3);
        let letters: Vec<Vec<Signed>> = reduced_words(m.num_letters(), 6)
            .into_iter()
            .map(|w| w.into_vec())
            .collect();
        let positive: Vec<Vec<Signed>> = letters.iter().filter(|w| w.iter().all(|x| x.is_positive())).cloned().collect();
        let tables: Vec<_> = words.iter().map(|w| action_table(&m, w, &letters)).collect();
        let positive_tables: Vec<_> = words.iter().map(|w| action_table(&m, w, &positive)).collect();
        for i in 0..words.len() {
            for j in i..words.len() {
                compared += 1;
                let ours = core(equal(&m, &words[i], &words[j]))?;
                if ours != (tables[i] == tables[j]) {
                    disagreements.push(format!(
                        "{}: {} vs {}",
                        m.name(),
                        m.render_states(words[i].as_slice()),
                        m.render_states(words[j].as_slice())
                    ));
                }
                if ours != (positive_tables[i] == positive_tables[j]) {
                    positive_only += 1;
                }
            }
        }
    }
    ensure(disagreements.is_empty(), || {
        format!("{} disagreements, first: {}", disagreements.len(), disagreements[0])
    })?;
    Ok(format!(
        "{compared} pairs against reduced signed letter words, zero disagreements \
         (positive words alone leave {positive_only} distinct pairs unseparated)"
    ))
}

fn c2_same() -> FiniteMarkedGroup {
    parse_marked_group("group c2_same\norder 2\ngen 0 (0 1)\ngen 1 (0 1)\n").unwrap()
}

/// Vertex-0-fixing automorphisms counted over every vertex and edge permutation.
fn brute_aut1(x: &QuotientGraph) -> usize {
    let (n, e) = (x.num_vertices(), x.num_edges());
    (0..n)
        .permutations(n)
        .filter(|v| v[0] == 0)
        .map(|v| {
            (0..e)
                .permutations(e)
                .filter(|f| (0..e).all(|i| x.source(f[i]) == v[x.source(i)] && x.target(f[i]) == v[x.target(i)]))
                .count()
        })
        .sum()
}

fn criterion_5() -> Outcome {
    let w = c2_same();
    let r = core(verify_mns_instance(&fixtures::swap(), &w, 4, DEFAULT_VERTEX_CAP))?;
    let x = QuotientGraph::build(&w);
    let brute = brute_aut1(&x);
    ensure(brute == 4, || format!("brute-force Aut_1 has {brute} elements"))?;
    ensure(core(aut1_search(&x, DEFAULT_VERTEX_CAP))?.len() == brute, || "search disagrees with brute force".into())?;
    ensure(r.contained && r.aut1 == 4 && r.descended_group == 2, || format!("{r:?}"))?;
    Ok(format!(
        "|A_1| = {}, descended subgroup order {}, contained = {}",
        r.aut1, r.descended_group, r.contained
    ))
}

fn criterion_6() -> Outcome {
    let w = c2_same();
    let mut pool = Vec::new();
    for m in corpus().into_iter().chain(fixtures::bireversible_fixtures()) {
        if m.is_bireversible() && core(is_compatible(&m, &w))?.is_none() {
            pool.push(m);
        }
    }
    ensure(pool.len() >= 2, || format!("only {} compatible automata", pool.len()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = 0;
    for _ in 0..100 {
        let (i, j) = (rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len()));
        let u = core(disjoint_union(&[&pool[i], &pool[j]]))?;
        if let Some(witness) = core(is_compatible(&u, &w))? {
            return Err(format!("{}: {witness}", u.name()));
        }
        ok += 1;
    }
    Ok(format!("{ok}/100 unions compatible, pool of {} automata", pool.len()))
}

fn criterion_7() -> Outcome {
    let m = fixtures::aleshin();
    let a = core(m.parse_state_word("a"))?;
    let p = core(power_profile(&m, &a, 1, 5, 8, Budget::default()))?;
    let lengths: Vec<Option<usize>> = p.entries.iter().map(|e| e.length.exact()).collect();
    // a^n is a reduced word in a free basis
    let expected: Vec<Option<usize>> = (1..=5).map(Some).collect();
    ensure(lengths == expected, || format!("lengths {lengths:?}"))?;
    ensure(p.c_est == Some(1.0), || format!("C_est {:?}", p.c_est))?;
    let mut profiles = 0;
    for m in fixtures::bireversible_fixtures() {
        for q in 0..m.num_states() {
            let g = SignedWord::positive([q]);
            match power_profile(&m, &g, 1, 5, 8, Budget::default()) {
                Ok(p) => {
                    profiles += 1;
                    ensure(!p.sublinear, || format!("{} {}: SUBLINEAR", m.name(), m.states()[q]))?;
                }
                Err(Error::Torsion { .. }) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(format!("lengths 1..5, C_est = 1, {profiles} non-torsion profiles without SUBLINEAR"))
}

fn criterion_8() -> Outcome {
    let m = fixtures::aleshin();
    let dual = core(dual_automaton(&m))?;
    let bounds = SearchBounds::default();
    let mut seed = None;
    for v in reduced_words(m.num_letters(), 2).into_iter().filter(|v| !v.is_empty() && v.is_positive()) {
        if let OrderResult::ExceedsBound { .. } =
            core(element_order(&dual, &v, bounds.order_bound, Some(4), Budget::default()))?
        {
            seed = Some(v);
            break;
        }
    }
    let v = seed.ok_or("no seed certified beyond the order bound")?;
    let (x1, x2) = match core(free_submonoid_search(&m, &v, bounds, 3))? {
        SubmonoidSearch::Candidate { x1, x2, .. } => (x1, x2),
        SubmonoidSearch::NotFound { pairs_tried } => return Err(format!("not found after {pairs_tried} pairs")),
    };
    let products: Vec<SignedWord> = monoid_products(&x1, &x2, 3)
        .into_iter()
        .map(|p| p.into_iter().collect())
        .collect();
    for (p, q) in products.iter().tuple_combinations() {
        ensure(!core(equal(&dual, p, q))?, || {
            format!("{} = {}", m.render_letters(p.as_slice()), m.render_letters(q.as_slice()))
        })?;
    }
    Ok(format!(
        "seed {}, x1 = {}, x2 = {}, {} products pairwise distinct",
        m.render_letters(v.as_slice()),
        m.render_letters(x1.as_slice()),
        m.render_letters(x2.as_slice()),
        products.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 8] = [
        ("1 property hierarchy", criterion_1, 1),
        ("2 dual involution and finiteness", criterion_2, 10),
        ("3 normal-form soundness", criterion_3, 30),
        ("4 equality oracle", criterion_4, 60),
        ("5 finite MNS instance", criterion_5, 1),
        ("6 compatibility of unions", criterion_6, 10),
        ("7 distortion profile", criterion_7, 120),
        ("8 free submonoid certification", criterion_8, 120),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > Duration::from_secs(limit) {
                Err(format!("{detail}; took {elapsed:.2?}, limit {limit} s"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} ({elapsed:.2?})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
