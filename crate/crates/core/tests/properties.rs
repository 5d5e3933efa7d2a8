use proptest::prelude::*;

use mealy_core::constructions::{disjoint_union, dual_automaton, inverse_automaton};
use mealy_core::distortion::{geodesic_length, Length};
use mealy_core::fixtures;
use mealy_core::group::{canonicalize, equal, Budget};
use mealy_core::quotient::{descend_automorphism, is_compatible, parse_marked_group, FiniteMarkedGroup};
use mealy_core::rewriting::{act_state_on_word, normal_form, Orientation};
use mealy_core::word::{MixedSymbol, MixedWord, Signed, SignedWord};
use mealy_core::MealyAutomaton;

fn signed(n: usize) -> impl Strategy<Value = Signed> {
    (0..n, any::<bool>()).prop_map(|(index, inverse)| Signed { index, inverse })
}

fn word(n: usize, max: usize) -> impl Strategy<Value = SignedWord> {
    prop::collection::vec(signed(n), 0..=max).prop_map(|v| v.into_iter().collect())
}

fn positive_word(n: usize, max: usize) -> impl Strategy<Value = SignedWord> {
    prop::collection::vec(0..n, 0..=max).prop_map(SignedWord::positive)
}

fn mixed(m: &MealyAutomaton, max: usize) -> impl Strategy<Value = MixedWord> {
    let (nq, na) = (m.num_states(), m.num_letters());
    let symbol = prop_oneof![signed(nq).prop_map(MixedSymbol::State), signed(na).prop_map(MixedSymbol::Letter)];
    prop::collection::vec(symbol, 0..=max).prop_map(MixedWord)
}

/// Bireversible automata with up to three states over `{0, 1}`.
fn bireversible() -> impl Strategy<Value = MealyAutomaton> {
    (1..=3usize)
        .prop_flat_map(|nq| (Just(nq), prop::collection::vec((0..2usize, 0..nq), 2 * nq)))
        .prop_filter_map("not bireversible", |(nq, cells)| {
            let states: Vec<String> = (0..nq).map(|q| format!("q{q}")).collect();
            let names: Vec<&str> = states.iter().map(String::as_str).collect();
            let m = MealyAutomaton::from_fn("random", &["0", "1"], &names, |q, a| cells[q * 2 + a]).ok()?;
            m.is_bireversible().then_some(m)
        })
}

fn c2_same() -> FiniteMarkedGroup {
    parse_marked_group("group c2_same\norder 2\ngen 0 (0 1)\ngen 1 (0 1)\n").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relators_do_not_change_the_normal_form(
        p in mixed(&fixtures::aleshin(), 10),
        q in 0..3usize,
        a in 0..2usize,
        at in any::<prop::sample::Index>(),
    ) {
        let m = fixtures::aleshin();
        let (b, r) = m.delta(q, a);
        let rel = [
            MixedSymbol::State(Signed::pos(q)),
            MixedSymbol::Letter(Signed::pos(a)),
            MixedSymbol::State(Signed::neg(r)),
            MixedSymbol::Letter(Signed::neg(b)),
        ];
        let mut longer = p.0.clone();
        let i = at.index(longer.len() + 1);
        longer.splice(i..i, rel);
        for o in [Orientation::LettersFirst, Orientation::StatesFirst] {
            prop_assert_eq!(
                normal_form(&m, &p, o).unwrap(),
                normal_form(&m, &MixedWord(longer.clone()), o).unwrap()
            );
        }
    }

    #[test]
    fn action_is_a_homomorphism(u in word(3, 4), v in word(3, 4), w in word(2, 8)) {
        let m = fixtures::aleshin();
        let uv = u.concat(&v);
        let inner = act_state_on_word(&m, &v, &w).unwrap();
        prop_assert_eq!(
            act_state_on_word(&m, &uv, &w).unwrap(),
            act_state_on_word(&m, &u, &inner).unwrap()
        );
    }

    #[test]
    fn word_times_inverse_is_identity(u in word(3, 6)) {
        let m = fixtures::aleshin();
        let uu = u.concat(&u.inverse());
        prop_assert!(canonicalize(&m, &uu).unwrap().is_identity());
    }

    #[test]
    fn equality_matches_actions(u in word(2, 4), v in word(2, 4), w in positive_word(2, 6)) {
        let m = fixtures::transposer();
        if equal(&m, &u, &v).unwrap() {
            prop_assert_eq!(act_state_on_word(&m, &u, &w).unwrap(), act_state_on_word(&m, &v, &w).unwrap());
        }
        let key = |x: &SignedWord| canonicalize(&m, x).unwrap().key;
        prop_assert_eq!(equal(&m, &u, &v).unwrap(), key(&u) == key(&v));
    }

    #[test]
    fn lengths_are_symmetric_and_subadditive(u in word(3, 2), v in word(3, 2)) {
        let m = fixtures::aleshin();
        let len = |x: &SignedWord| match geodesic_length(&m, x, 4, Budget::default()).unwrap() {
            Length::Exact(n) => n,
            Length::Unknown { .. } => unreachable!("within radius"),
        };
        prop_assert_eq!(len(&u), len(&u.inverse()));
        prop_assert!(len(&u.concat(&v)) <= len(&u) + len(&v));
        prop_assert!(len(&u) <= u.len());
    }

    #[test]
    fn dual_and_inverse_are_involutions(m in bireversible()) {
        prop_assert_eq!(&dual_automaton(&dual_automaton(&m).unwrap()).unwrap(), &m);
        let back = inverse_automaton(&inverse_automaton(&m).unwrap()).unwrap();
        prop_assert_eq!(back.num_states(), m.num_states());
        for q in 0..m.num_states() {
            for a in 0..m.num_letters() {
                prop_assert_eq!(back.delta(q, a), m.delta(q, a));
            }
        }
    }

    #[test]
    fn unions_of_compatible_automata_stay_compatible(x in bireversible(), y in bireversible()) {
        let w = c2_same();
        let compatible = |m: &MealyAutomaton| is_compatible(m, &w).unwrap().is_none();
        prop_assume!(compatible(&x) && compatible(&y));
        prop_assert!(compatible(&disjoint_union(&[&x, &y]).unwrap()));
    }

    #[test]
    fn descent_is_a_homomorphism(u in word(1, 4), v in word(1, 4)) {
        let (m, w) = (fixtures::swap(), c2_same());
        let d = |x: &SignedWord| descend_automorphism(&m, &w, x).unwrap();
        prop_assert_eq!(d(&u.concat(&v)), d(&u).compose(&d(&v)));
    }
}
