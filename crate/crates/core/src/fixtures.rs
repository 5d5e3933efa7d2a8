//! Small named automata used throughout the tests and examples.
//!
//! All of them live over the binary alphabet `{0, 1}`.

use crate::automaton::MealyAutomaton;

const BINARY: [&str; 2] = ["0", "1"];

/// One state `e` acting as the identity.
pub fn identity() -> MealyAutomaton {
    MealyAutomaton::from_fn("identity", &BINARY, &["e"], |_, a| (a, 0)).expect("valid fixture")
}

/// One state `s` toggling every letter.
pub fn swap() -> MealyAutomaton {
    MealyAutomaton::from_fn("swap", &BINARY, &["s"], |_, a| (1 - a, 0)).expect("valid fixture")
}

/// The binary adding machine on states `e` (identity) and `q` (add one,
/// least significant digit first). Invertible but not reversible.
pub fn adding() -> MealyAutomaton {
    MealyAutomaton::from_fn("adding", &BINARY, &["e", "q"], |q, a| match (q, a) {
        (0, a) => (a, 0),
        (_, 0) => (1, 0),
        (_, _) => (0, 1),
    })
    .expect("valid fixture")
}

/// States `p` (swap) and `q` (identity) with `ρ_1` exchanging them.
/// Invertible and reversible, but `δ` is not a bijection.
pub fn non_bireversible() -> MealyAutomaton {
    MealyAutomaton::from_fn("nb", &BINARY, &["p", "q"], |q, a| {
        let out = if q == 0 { 1 - a } else { a };
        let next = if a == 0 { q } else { 1 - q };
        (out, next)
    })
    .expect("valid fixture")
}

/// States `a`, `b` acting trivially; letter `1` exchanges the states.
pub fn transposer() -> MealyAutomaton {
    MealyAutomaton::from_fn("transposer", &BINARY, &["a", "b"], |q, a| {
        (a, if a == 0 { q } else { 1 - q })
    })
    .expect("valid fixture")
}

/// The Aleshin automaton `a = (b, c)σ`, `b = (c, b)σ`, `c = (a, a)`,
/// whose states freely generate a free group of rank three.
pub fn aleshin() -> MealyAutomaton {
    MealyAutomaton::from_fn("aleshin", &BINARY, &["a", "b", "c"], |q, x| {
        const NEXT: [[usize; 2]; 3] = [[1, 2], [2, 1], [0, 0]];
        let out = if q == 2 { x } else { 1 - x };
        (out, NEXT[q][x])
    })
    .expect("valid fixture")
}

/// The bireversible fixtures.
pub fn bireversible_fixtures() -> Vec<MealyAutomaton> {
    vec![identity(), swap(), transposer(), aleshin()]
}
