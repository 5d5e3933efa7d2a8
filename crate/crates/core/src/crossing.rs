//! Moving signed states past signed letters.
//!
//! In the fundamental group every product `q̂ â` of a signed state and a
//! signed letter can be rewritten uniquely as `b̂ p̂`. The table stores this
//! rewrite for all `4 |Q| |A|` sign combinations together with its inverse.

use crate::automaton::MealyAutomaton;
use crate::word::Signed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingTable {
    num_states: usize,
    num_letters: usize,
    /// `(state code, letter code) -> (letter code, state code)`
    forward: Vec<(usize, usize)>,
    /// `(letter code, state code) -> (state code, letter code)`
    backward: Vec<(usize, usize)>,
}

impl CrossingTable {
    /// Returns `None` unless the automaton is bireversible.
    pub(crate) fn build(m: &MealyAutomaton) -> Option<Self> {
        if !m.validate().bireversible {
            return None;
        }
        let (na, nq) = (m.num_letters(), m.num_states());
        let mut inv_output = vec![0; nq * na];
        let mut inv_transition = vec![0; na * nq];
        let mut inv_delta = vec![(0, 0); na * nq];
        for q in 0..nq {
            for a in 0..na {
                let (b, p) = m.delta(q, a);
                inv_output[q * na + b] = a;
                inv_transition[a * nq + p] = q;
                inv_delta[b * nq + p] = (q, a);
            }
        }

        let (ca, cq) = (2 * na, 2 * nq);
        let mut forward = vec![(0, 0); cq * ca];
        for sq in 0..cq {
            for sa in 0..ca {
                let (q, a) = (Signed::from_code(sq), Signed::from_code(sa));
                let (b, p) = match (q.inverse, a.inverse) {
                    // q a = λ(q,a) ρ(q,a)
                    (false, false) => {
                        let (b, p) = m.delta(q.index, a.index);
                        (Signed::pos(b), Signed::pos(p))
                    }
                    // q a⁻¹ = b⁻¹ p  with  p = ρ_a⁻¹(q), b = λ(p, a)
                    (false, true) => {
                        let p = inv_transition[a.index * nq + q.index];
                        (Signed::neg(m.output(p, a.index)), Signed::pos(p))
                    }
                    // q⁻¹ a = b p⁻¹  with  b = λ_q⁻¹(a), p = ρ(q, b)
                    (true, false) => {
                        let b = inv_output[q.index * na + a.index];
                        (Signed::pos(b), Signed::neg(m.transition(q.index, b)))
                    }
                    // q⁻¹ a⁻¹ = b⁻¹ p⁻¹  with  δ(p, b) = (a, q)
                    (true, true) => {
                        let (p, b) = inv_delta[a.index * nq + q.index];
                        (Signed::neg(b), Signed::neg(p))
                    }
                };
                forward[sq * ca + sa] = (b.code(), p.code());
            }
        }

        let mut backward = vec![(usize::MAX, usize::MAX); ca * cq];
        for sq in 0..cq {
            for sa in 0..ca {
                let (b, p) = forward[sq * ca + sa];
                debug_assert_eq!(backward[b * cq + p].0, usize::MAX);
                backward[b * cq + p] = (sq, sa);
            }
        }
        debug_assert!(backward.iter().all(|&(s, _)| s != usize::MAX));

        Some(CrossingTable {
            num_states: nq,
            num_letters: na,
            forward,
            backward,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_letters(&self) -> usize {
        self.num_letters
    }

    /// `q̂ â = b̂ p̂`: returns `(b̂, p̂)`.
    #[inline]
    pub fn cross(&self, q: Signed, a: Signed) -> (Signed, Signed) {
        let (b, p) = self.cross_code(q.code(), a.code());
        (Signed::from_code(b), Signed::from_code(p))
    }

    /// `â q̂ = p̂ b̂`: returns `(p̂, b̂)`, the inverse of [`cross`](Self::cross).
    #[inline]
    pub fn uncross(&self, a: Signed, q: Signed) -> (Signed, Signed) {
        let (p, b) = self.uncross_code(a.code(), q.code());
        (Signed::from_code(p), Signed::from_code(b))
    }

    #[inline]
    pub fn cross_code(&self, q: usize, a: usize) -> (usize, usize) {
        self.forward[q * 2 * self.num_letters + a]
    }

    #[inline]
    pub fn uncross_code(&self, a: usize, q: usize) -> (usize, usize) {
        self.backward[a * 2 * self.num_states + q]
    }
}
