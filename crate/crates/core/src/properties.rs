//! The invertible / reversible / bireversible hierarchy.

use serde::Serialize;

use crate::automaton::MealyAutomaton;

/// A concrete counterexample to one of the defining bijections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// `λ(state, letters.0) = λ(state, letters.1) = image`
    OutputCollision {
        state: usize,
        letters: (usize, usize),
        image: usize,
    },
    /// `ρ(states.0, letter) = ρ(states.1, letter) = image`
    TransitionCollision {
        letter: usize,
        states: (usize, usize),
        image: usize,
    },
    /// `δ(first) = δ(second) = image`, cells given as `(state, letter)`.
    DeltaCollision {
        first: (usize, usize),
        second: (usize, usize),
        image: (usize, usize),
    },
}

impl Witness {
    /// One-line headline such as `rho_0 not injective`.
    pub fn headline(&self, m: &MealyAutomaton) -> String {
        match *self {
            Witness::OutputCollision { state, .. } => {
                format!("lambda_{} not injective", m.states()[state])
            }
            Witness::TransitionCollision { letter, .. } => {
                format!("rho_{} not injective", m.alphabet()[letter])
            }
            Witness::DeltaCollision { .. } => "delta not injective".to_string(),
        }
    }

    /// The colliding cells spelled out.
    pub fn detail(&self, m: &MealyAutomaton) -> String {
        let (a, q) = (m.alphabet(), m.states());
        match *self {
            Witness::OutputCollision {
                state,
                letters: (x, y),
                image,
            } => format!(
                "lambda({s},{}) = lambda({s},{}) = {}",
                a[x],
                a[y],
                a[image],
                s = q[state]
            ),
            Witness::TransitionCollision {
                letter,
                states: (p, r),
                image,
            } => format!(
                "rho({},{l}) = rho({},{l}) = {}",
                q[p],
                q[r],
                q[image],
                l = a[letter]
            ),
            Witness::DeltaCollision {
                first,
                second,
                image,
            } => format!(
                "delta({},{}) = delta({},{}) = ({},{})",
                q[first.0], a[first.1], q[second.0], a[second.1], a[image.0], q[image.1]
            ),
        }
    }

    pub fn describe(&self, m: &MealyAutomaton) -> String {
        format!("{}: {}", self.headline(m), self.detail(m))
    }
}

/// Which of the defining maps are bijections, with a witness for each
/// failing one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub invertible: bool,
    pub reversible: bool,
    pub delta_bijective: bool,
    pub bireversible: bool,
    pub output_witness: Option<Witness>,
    pub transition_witness: Option<Witness>,
    pub delta_witness: Option<Witness>,
}

impl PropertyReport {
    pub fn first_witness(&self) -> Option<Witness> {
        self.output_witness
            .or(self.transition_witness)
            .or(self.delta_witness)
    }
}

/// Finds the first pair of indices (in iteration order) with equal images.
fn first_collision(images: impl Iterator<Item = usize>, range: usize) -> Option<(usize, usize, usize)> {
    let mut seen = vec![None; range];
    for (i, img) in images.enumerate() {
        if let Some(j) = seen[img] {
            return Some((j, i, img));
        }
        seen[img] = Some(i);
    }
    None
}

/// Decides each level of the hierarchy. Injectivity suffices everywhere
/// since every map is between finite sets of equal size.
pub fn validate(m: &MealyAutomaton) -> PropertyReport {
    let (na, nq) = (m.num_letters(), m.num_states());

    let output_witness = (0..nq).find_map(|q| {
        first_collision((0..na).map(|a| m.output(q, a)), na).map(|(x, y, image)| {
            Witness::OutputCollision {
                state: q,
                letters: (x, y),
                image,
            }
        })
    });

    let transition_witness = (0..na).find_map(|a| {
        first_collision((0..nq).map(|q| m.transition(q, a)), nq).map(|(p, r, image)| {
            Witness::TransitionCollision {
                letter: a,
                states: (p, r),
                image,
            }
        })
    });

    let cells = (0..nq).flat_map(|q| (0..na).map(move |a| (q, a)));
    let delta_witness = first_collision(
        cells.clone().map(|(q, a)| {
            let (b, p) = m.delta(q, a);
            p * na + b
        }),
        na * nq,
    )
    .map(|(i, j, img)| Witness::DeltaCollision {
        first: (i / na, i % na),
        second: (j / na, j % na),
        image: (img % na, img / na),
    });

    let invertible = output_witness.is_none();
    let reversible = transition_witness.is_none();
    let delta_bijective = delta_witness.is_none();
    PropertyReport {
        invertible,
        reversible,
        delta_bijective,
        bireversible: invertible && reversible && delta_bijective,
        output_witness,
        transition_witness,
        delta_witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn genuine(m: &MealyAutomaton, w: Witness) -> bool {
        match w {
            Witness::OutputCollision {
                state,
                letters: (x, y),
                image,
            } => x != y && m.output(state, x) == image && m.output(state, y) == image,
            Witness::TransitionCollision {
                letter,
                states: (p, r),
                image,
            } => p != r && m.transition(p, letter) == image && m.transition(r, letter) == image,
            Witness::DeltaCollision {
                first,
                second,
                image,
            } => first != second && m.delta(first.0, first.1) == image && m.delta(second.0, second.1) == image,
        }
    }

    #[test]
    fn swap_is_bireversible() {
        let r = validate(&fixtures::swap());
        assert!(r.invertible && r.reversible && r.delta_bijective && r.bireversible);
        assert_eq!(r.first_witness(), None);
    }

    #[test]
    fn adding_machine_is_not_reversible() {
        let m = fixtures::adding();
        let r = validate(&m);
        assert!(r.invertible);
        assert!(!r.reversible && !r.bireversible);
        let w = r.transition_witness.unwrap();
        assert!(genuine(&m, w));
        assert_eq!(w.headline(&m), "rho_0 not injective");
        assert_eq!(w.detail(&m), "rho(e,0) = rho(q,0) = e");
    }

    #[test]
    fn nb_fails_only_delta() {
        let m = fixtures::non_bireversible();
        let r = validate(&m);
        assert!(r.invertible && r.reversible);
        assert!(!r.delta_bijective && !r.bireversible);
        let w = r.delta_witness.unwrap();
        assert!(genuine(&m, w));
        // δ(p,0) = δ(q,1) = (1,p) and δ(p,1) = δ(q,0) = (0,q) are the two collisions.
        let Witness::DeltaCollision { first, second, .. } = w else {
            panic!("wrong witness kind")
        };
        assert!([((0, 0), (1, 1)), ((0, 1), (1, 0))].contains(&(first, second)));
    }

    #[test]
    fn non_invertible_witness() {
        let m = MealyAutomaton::from_fn("c", &["0", "1"], &["s"], |_, _| (0, 0)).unwrap();
        let r = validate(&m);
        assert!(!r.invertible);
        assert!(genuine(&m, r.output_witness.unwrap()));
    }

    #[test]
    fn deterministic() {
        let m = fixtures::non_bireversible();
        assert_eq!(validate(&m), validate(&m));
    }
}
