//! Minimal deterministic transducers over the signed alphabet and their
//! canonical serialization.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::crossing::CrossingTable;

/// A minimized, initially connected Mealy machine over the signed alphabet,
/// serialized with states numbered in BFS discovery order from the initial
/// state (letters visited in code order).
///
/// Two keys are equal exactly when the machines induce the same map on
/// words, so the key itself is the machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Arc<[u32]>);

const HEADER: usize = 2;

impl CanonicalKey {
    /// The one-state machine fixing every letter.
    pub fn identity(letters: usize) -> Self {
        let mut data = vec![1, letters as u32];
        for x in 0..letters as u32 {
            data.extend([x, 0]);
        }
        CanonicalKey(data.into())
    }

    pub fn num_states(&self) -> usize {
        self.0[0] as usize
    }

    pub fn num_letters(&self) -> usize {
        self.0[1] as usize
    }

    #[inline]
    pub fn output(&self, state: usize, letter: usize) -> usize {
        self.0[HEADER + 2 * (state * self.num_letters() + letter)] as usize
    }

    #[inline]
    pub fn next(&self, state: usize, letter: usize) -> usize {
        self.0[HEADER + 2 * (state * self.num_letters() + letter) + 1] as usize
    }

    pub fn is_identity(&self) -> bool {
        *self == CanonicalKey::identity(self.num_letters())
    }

    /// Runs the machine from its initial state over letter codes.
    pub fn run(&self, word: &[usize]) -> Vec<usize> {
        let mut state = 0;
        word.iter()
            .map(|&x| {
                let out = self.output(state, x);
                state = self.next(state, x);
                out
            })
            .collect()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

/// A complete deterministic machine with initial state 0, before
/// minimization. Rows are indexed `state * letters + letter`.
pub(crate) struct RawMachine {
    pub letters: usize,
    pub output: Vec<u32>,
    pub next: Vec<u32>,
}

impl RawMachine {
    fn num_states(&self) -> usize {
        self.output.len() / self.letters
    }

    /// Moore-style partition refinement followed by canonical numbering.
    pub fn minimize(&self) -> CanonicalKey {
        let n = self.num_states();
        let k = self.letters;

        let mut block = vec![0u32; n];
        let mut count = {
            let mut ids: HashMap<&[u32], u32> = HashMap::new();
            for s in 0..n {
                let row = &self.output[s * k..(s + 1) * k];
                let next_id = ids.len() as u32;
                block[s] = *ids.entry(row).or_insert(next_id);
            }
            ids.len()
        };

        let mut signature = Vec::with_capacity(k + 1);
        loop {
            let mut ids: HashMap<Vec<u32>, u32> = HashMap::with_capacity(count * 2);
            let mut refined = vec![0u32; n];
            for s in 0..n {
                signature.clear();
                signature.push(block[s]);
                signature.extend(self.next[s * k..(s + 1) * k].iter().map(|&t| block[t as usize]));
                let next_id = ids.len() as u32;
                refined[s] = *ids.entry(signature.clone()).or_insert(next_id);
            }
            let refined_count = ids.len();
            block = refined;
            if refined_count == count {
                break;
            }
            count = refined_count;
        }

        // one representative per block, then renumber by BFS from block of 0
        let mut rep = vec![u32::MAX; count];
        for s in (0..n).rev() {
            rep[block[s] as usize] = s as u32;
        }
        let mut order = vec![u32::MAX; count];
        let mut queue = VecDeque::from([block[0]]);
        order[block[0] as usize] = 0;
        let mut numbered = 1u32;
        let mut data = Vec::with_capacity(HEADER + 2 * count * k);
        data.extend([count as u32, k as u32]);
        while let Some(b) = queue.pop_front() {
            let s = rep[b as usize] as usize;
            for x in 0..k {
                let t = block[self.next[s * k + x] as usize];
                if order[t as usize] == u32::MAX {
                    order[t as usize] = numbered;
                    numbered += 1;
                    queue.push_back(t);
                }
                data.extend([self.output[s * k + x], order[t as usize]]);
            }
        }
        debug_assert_eq!(numbered as usize, count);
        CanonicalKey(data.into())
    }
}

/// Explores pairs `(state of outer, state of inner)` reachable from `(0, 0)`;
/// `step` maps a pair and a letter to `(output, next pair)`.
fn explore<S, F>(letters: usize, start: S, mut step: F) -> RawMachine
where
    S: Clone + Eq + std::hash::Hash,
    F: FnMut(&S, usize) -> (u32, S),
{
    let mut index: HashMap<S, u32> = HashMap::new();
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut output = Vec::new();
    let mut next = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let current = states[i].clone();
        for x in 0..letters {
            let (out, target) = step(&current, x);
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    let id = states.len() as u32;
                    index.insert(target.clone(), id);
                    states.push(target);
                    id
                }
            };
            output.push(out);
            next.push(id);
        }
        i += 1;
    }
    RawMachine {
        letters,
        output,
        next,
    }
}

/// The machine of `outer ∘ inner`: a letter passes through `inner` first.
/// Returns the minimized key and the number of product states explored.
pub fn compose(outer: &CanonicalKey, inner: &CanonicalKey) -> (CanonicalKey, usize) {
    debug_assert_eq!(outer.num_letters(), inner.num_letters());
    if inner.is_identity() {
        return (outer.clone(), 1);
    }
    if outer.is_identity() {
        return (inner.clone(), 1);
    }
    let raw = explore(inner.num_letters(), (0usize, 0usize), |&(o, i), x| {
        let y = inner.output(i, x);
        let z = outer.output(o, y);
        (z as u32, (outer.next(o, y), inner.next(i, x)))
    });
    let explored = raw.num_states();
    (raw.minimize(), explored)
}

/// The machine of a single signed state of a bireversible automaton.
pub fn generator_key(table: &CrossingTable, state_code: usize) -> CanonicalKey {
    let letters = 2 * table.num_letters();
    explore(letters, state_code, |&q, x| {
        let (b, p) = table.cross_code(q, x);
        (b as u32, p)
    })
    .minimize()
}

#[cfg(test)]
/// The machine of a signed state word built directly on tuples of signed
/// states, with a single minimization at the end.
pub fn direct_key(table: &CrossingTable, codes: &[usize]) -> (CanonicalKey, usize) {
    let letters = 2 * table.num_letters();
    let raw = explore(letters, codes.to_vec(), |tuple, x| {
        let mut t = tuple.clone();
        let mut cur = x;
        for q in t.iter_mut().rev() {
            let (b, p) = table.cross_code(*q, cur);
            *q = p;
            cur = b;
        }
        (cur as u32, t)
    });
    let explored = raw.num_states();
    (raw.minimize(), explored)
}
