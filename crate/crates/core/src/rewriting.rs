//! Word actions and the exact normal form of the fundamental group.
//!
//! For a bireversible automaton every element of
//! `π₁(M) = ⟨Q, A | q a = λ(q,a) ρ(q,a)⟩` factors uniquely as `g v`
//! (states first) and as `w h` (letters first) with `g, h ∈ F_Q` and
//! `v, w ∈ F_A` freely reduced. Scanning a word left to right and crossing
//! each incoming symbol through the opposite part yields that factorization,
//! which decides the word problem in `π₁(M)`.

use std::fmt;

use crate::automaton::MealyAutomaton;
use crate::crossing::CrossingTable;
use crate::error::{Error, Result};
use crate::word::{MixedSymbol, MixedWord, Signed, SignedWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `p = g v`
    StatesFirst,
    /// `p = w h`
    LettersFirst,
}

impl std::str::FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "states-first" => Ok(Orientation::StatesFirst),
            "letters-first" => Ok(Orientation::LettersFirst),
            other => Err(Error::Invalid(format!("unknown orientation `{other}`"))),
        }
    }
}

/// The unique factorization of an element of `π₁(M)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalFormPair {
    pub state_part: SignedWord,
    pub letter_part: SignedWord,
    pub orientation: Orientation,
}

impl NormalFormPair {
    pub fn is_identity(&self) -> bool {
        self.state_part.is_empty() && self.letter_part.is_empty()
    }

    /// The factorization written back as a mixed word, in its own order.
    pub fn to_mixed(&self) -> MixedWord {
        let states = MixedWord::states(&self.state_part);
        let letters = MixedWord::letters(&self.letter_part);
        match self.orientation {
            Orientation::StatesFirst => states.concat(&letters),
            Orientation::LettersFirst => letters.concat(&states),
        }
    }

    pub fn display<'a>(&'a self, m: &'a MealyAutomaton) -> impl fmt::Display + 'a {
        DisplayPair { pair: self, m }
    }
}

struct DisplayPair<'a> {
    pair: &'a NormalFormPair,
    m: &'a MealyAutomaton,
}

impl fmt::Display for DisplayPair<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.m.render_states(self.pair.state_part.as_slice());
        let v = self.m.render_letters(self.pair.letter_part.as_slice());
        match self.pair.orientation {
            Orientation::StatesFirst => write!(f, "[{g} | {v}]"),
            Orientation::LettersFirst => write!(f, "[{v} | {g}]"),
        }
    }
}

/// Moves the letter `x` leftwards through the state word `h`
/// (`h x = x' h'`), rewriting `h` in place; returns `x'`.
#[inline]
pub(crate) fn pass_letter(table: &CrossingTable, h: &mut [Signed], x: Signed) -> Signed {
    let mut cur = x.code();
    for q in h.iter_mut().rev() {
        let (b, p) = table.cross_code(q.code(), cur);
        *q = Signed::from_code(p);
        cur = b;
    }
    Signed::from_code(cur)
}

/// Moves the state `x` leftwards through the letter word `v`
/// (`v x = x' v'`), rewriting `v` in place; returns `x'`.
#[inline]
fn pass_state(table: &CrossingTable, v: &mut [Signed], x: Signed) -> Signed {
    let mut cur = x.code();
    for a in v.iter_mut().rev() {
        let (p, b) = table.uncross_code(a.code(), cur);
        *a = Signed::from_code(b);
        cur = p;
    }
    Signed::from_code(cur)
}

fn check_mixed(m: &MealyAutomaton, p: &MixedWord) -> Result<()> {
    for sym in &p.0 {
        match *sym {
            MixedSymbol::State(s) if s.index >= m.num_states() => {
                return Err(Error::UnknownSymbol(format!("state #{}", s.index)))
            }
            MixedSymbol::Letter(s) if s.index >= m.num_letters() => {
                return Err(Error::UnknownSymbol(format!("letter #{}", s.index)))
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn normal_form(m: &MealyAutomaton, p: &MixedWord, orientation: Orientation) -> Result<NormalFormPair> {
    let table = m.crossing()?;
    check_mixed(m, p)?;
    let mut states = SignedWord::new();
    let mut letters = SignedWord::new();
    for &sym in &p.0 {
        match (orientation, sym) {
            (Orientation::LettersFirst, MixedSymbol::State(s)) => states.push(s),
            (Orientation::LettersFirst, MixedSymbol::Letter(x)) => {
                let mut h = std::mem::take(&mut states).into_vec();
                let out = pass_letter(table, &mut h, x);
                states = SignedWord::from_reduced(h);
                letters.push(out);
            }
            (Orientation::StatesFirst, MixedSymbol::Letter(x)) => letters.push(x),
            (Orientation::StatesFirst, MixedSymbol::State(s)) => {
                let mut v = std::mem::take(&mut letters).into_vec();
                let out = pass_state(table, &mut v, s);
                letters = SignedWord::from_reduced(v);
                states.push(out);
            }
        }
    }
    Ok(NormalFormPair {
        state_part: states,
        letter_part: letters,
        orientation,
    })
}

/// Decides whether `p` is trivial in `π₁(M)`.
pub fn pi1_is_identity(m: &MealyAutomaton, p: &MixedWord) -> Result<bool> {
    Ok(normal_form(m, p, Orientation::LettersFirst)?.is_identity())
}

/// Signed states acting on positive letters, available for any invertible
/// automaton: `q⁻¹` reads `b` as `λ_q⁻¹(b)` and moves to `ρ(q, λ_q⁻¹(b))⁻¹`.
struct InvertibleStep<'a> {
    m: &'a MealyAutomaton,
    inv_output: Vec<usize>,
}

impl<'a> InvertibleStep<'a> {
    fn new(m: &'a MealyAutomaton) -> Result<Self> {
        let report = m.validate();
        if let Some(w) = report.output_witness {
            return Err(Error::Property {
                property: "invertible",
                witness: w.describe(m),
            });
        }
        let na = m.num_letters();
        let mut inv_output = vec![0; m.num_states() * na];
        for q in 0..m.num_states() {
            for a in 0..na {
                inv_output[q * na + m.output(q, a)] = a;
            }
        }
        Ok(InvertibleStep { m, inv_output })
    }

    #[inline]
    fn step(&self, q: Signed, x: usize) -> (usize, Signed) {
        if q.inverse {
            let b = self.inv_output[q.index * self.m.num_letters() + x];
            (b, Signed::neg(self.m.transition(q.index, b)))
        } else {
            let (b, p) = self.m.delta(q.index, x);
            (b, Signed::pos(p))
        }
    }

    /// Runs `g` over the positive word `v`; returns `(g·v, residual)`.
    fn run(&self, g: &SignedWord, v: &SignedWord) -> (SignedWord, SignedWord) {
        let mut h: Vec<Signed> = g.as_slice().to_vec();
        let mut out = SignedWord::new();
        for x in v {
            let mut cur = x.index;
            for q in h.iter_mut().rev() {
                let (b, p) = self.step(*q, cur);
                *q = p;
                cur = b;
            }
            out.push(Signed::pos(cur));
        }
        (out, h.into_iter().collect())
    }
}

/// Runs the state word `g` over the letter word `v`: `g v = w h`.
fn run_states(m: &MealyAutomaton, g: &SignedWord, v: &SignedWord) -> Result<(SignedWord, SignedWord)> {
    m.check_state_word(g)?;
    m.check_letter_word(v)?;
    if v.is_positive() && !m.is_bireversible() {
        return Ok(InvertibleStep::new(m)?.run(g, v));
    }
    let table = m.crossing()?;
    let mut h = g.as_slice().to_vec();
    let mut w = SignedWord::new();
    for &x in v {
        w.push(pass_letter(table, &mut h, x));
    }
    Ok((w, SignedWord::from_reduced(h)))
}

/// The left action `g · v` of a state word on a letter word.
///
/// Signed letters need a bireversible automaton; positive letter words
/// only need invertibility.
pub fn act_state_on_word(m: &MealyAutomaton, g: &SignedWord, v: &SignedWord) -> Result<SignedWord> {
    run_states(m, g, v).map(|(w, _)| w)
}

/// The state word `h` left after `g` processes `v` (`g v = w h`).
pub fn residual(m: &MealyAutomaton, g: &SignedWord, v: &SignedWord) -> Result<SignedWord> {
    run_states(m, g, v).map(|(_, h)| h)
}

/// The dual action `ρ_a(u)` of a letter on a state word, processing `u`
/// right to left: `ρ_a(v q) = ρ_{λ(q,a)}(v) ρ_a(q)`.
///
/// Positive input needs only reversibility; signed input is resolved by
/// crossing in a bireversible automaton.
pub fn act_letter_on_stateword(m: &MealyAutomaton, a: Signed, u: &SignedWord) -> Result<SignedWord> {
    if a.index >= m.num_letters() {
        return Err(Error::UnknownSymbol(format!("letter #{}", a.index)));
    }
    m.check_state_word(u)?;
    if a.is_positive() && u.is_positive() {
        let report = m.validate();
        if let Some(w) = report.transition_witness {
            return Err(Error::Property {
                property: "reversible",
                witness: w.describe(m),
            });
        }
        let mut out: Vec<Signed> = u.as_slice().to_vec();
        let mut cur = a.index;
        for q in out.iter_mut().rev() {
            let (b, p) = m.delta(q.index, cur);
            *q = Signed::pos(p);
            cur = b;
        }
        return Ok(SignedWord::from_reduced(out));
    }
    let table = m.crossing()?;
    let mut h = u.as_slice().to_vec();
    pass_letter(table, &mut h, a);
    Ok(SignedWord::from_reduced(h))
}
