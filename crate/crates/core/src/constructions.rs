//! Automaton-to-automaton constructions: inverse, dual, disjoint union,
//! symmetrization and the subgroup-closure automaton.

use std::collections::VecDeque;

use indexmap::IndexSet;

use crate::automaton::MealyAutomaton;
use crate::error::{Error, Result};
use crate::rewriting::pass_letter;
use crate::word::{symbol_name, Signed, SignedWord, INVERSE_SUFFIX};

fn inverse_name(name: &str) -> String {
    format!("{name}{INVERSE_SUFFIX}")
}

/// The automaton whose state `q_inv` acts as `q⁻¹`:
/// `λ'(q_inv, a) = λ_q⁻¹(a)` and `ρ'(q_inv, a) = ρ(q, λ_q⁻¹(a))_inv`.
pub fn inverse_automaton(m: &MealyAutomaton) -> Result<MealyAutomaton> {
    if let Some(w) = m.validate().output_witness {
        return Err(Error::Property {
            property: "invertible",
            witness: w.describe(m),
        });
    }
    let (na, nq) = (m.num_letters(), m.num_states());
    let mut output = vec![0; nq * na];
    let mut transition = vec![0; nq * na];
    for q in 0..nq {
        for b in 0..na {
            // b = λ(q, a)  ⇒  λ_q⁻¹(a) = b
            let a = m.output(q, b);
            output[q * na + a] = b;
            transition[q * na + a] = m.transition(q, b);
        }
    }
    MealyAutomaton::new(
        inverse_name(m.name()),
        m.alphabet().iter().cloned().collect(),
        m.states().iter().map(|s| inverse_name(s)).collect(),
        output,
        transition,
    )
}

/// The dual automaton `M̄` over alphabet `Q` with states `A`.
///
/// State `a` reading letter `q` outputs `q'` and moves to `a'`, where
/// `δ(q', a') = (a, q)`. Applying the construction twice returns `M` with
/// identical names and tables.
pub fn dual_automaton(m: &MealyAutomaton) -> Result<MealyAutomaton> {
    m.crossing()?;
    let (na, nq) = (m.num_letters(), m.num_states());
    // dual tables are indexed a * |Q| + q
    let mut output = vec![0; na * nq];
    let mut transition = vec![0; na * nq];
    for q0 in 0..nq {
        for a0 in 0..na {
            let (a, q) = m.delta(q0, a0);
            output[a * nq + q] = q0;
            transition[a * nq + q] = a0;
        }
    }
    let name = match m.name().strip_suffix("_dual") {
        Some(base) => base.to_string(),
        None => format!("{}_dual", m.name()),
    };
    MealyAutomaton::new(
        name,
        m.states().iter().cloned().collect(),
        m.alphabet().iter().cloned().collect(),
        output,
        transition,
    )
}

/// The disjoint union of automata over one alphabet.
///
/// State names are kept when they are already pairwise distinct; otherwise
/// every state of operand `i` (1-based) is tagged `name#i`.
pub fn disjoint_union(parts: &[&MealyAutomaton]) -> Result<MealyAutomaton> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Invalid("union of zero automata".into()))?;
    for m in parts {
        m.crossing()?;
        if !m.alphabet().iter().eq(first.alphabet().iter()) {
            let join = |s: &IndexSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
            return Err(Error::AlphabetMismatch {
                left: join(first.alphabet()),
                right: join(m.alphabet()),
            });
        }
    }
    let total: usize = parts.iter().map(|m| m.num_states()).sum();
    let distinct: IndexSet<&String> = parts.iter().flat_map(|m| m.states().iter()).collect();
    let tag = distinct.len() != total;

    let na = first.num_letters();
    let mut states = Vec::with_capacity(total);
    let mut output = Vec::with_capacity(total * na);
    let mut transition = Vec::with_capacity(total * na);
    let mut offset = 0;
    for (i, m) in parts.iter().enumerate() {
        for (q, name) in m.states().iter().enumerate() {
            states.push(if tag { format!("{name}#{}", i + 1) } else { name.clone() });
            for a in 0..na {
                let (b, p) = m.delta(q, a);
                output.push(b);
                transition.push(offset + p);
            }
        }
        offset += m.num_states();
    }
    let name = parts.iter().map(|m| m.name()).collect::<Vec<_>>().join("+");
    MealyAutomaton::new(
        name,
        first.alphabet().iter().cloned().collect(),
        states,
        output,
        transition,
    )
}

fn signed_names(set: &IndexSet<String>) -> Vec<String> {
    set.iter()
        .flat_map(|s| [s.clone(), inverse_name(s)])
        .collect()
}

/// The symmetrized automaton `M̂` over `Â = A ⊔ Ā` with states `Q̂ = Q ⊔ Q̄`.
///
/// Symbols are interleaved (`x, x_inv, y, y_inv, …`) so that the index of a
/// symbol in `M̂` equals its signed code in `M`; the tables are exactly the
/// crossing table of `M`.
pub fn symmetrize(m: &MealyAutomaton) -> Result<MealyAutomaton> {
    let table = m.crossing()?;
    let (ca, cq) = (2 * m.num_letters(), 2 * m.num_states());
    let mut output = Vec::with_capacity(ca * cq);
    let mut transition = Vec::with_capacity(ca * cq);
    for sq in 0..cq {
        for sa in 0..ca {
            let (b, p) = table.cross_code(sq, sa);
            output.push(b);
            transition.push(p);
        }
    }
    MealyAutomaton::new(
        format!("{}_sym", m.name()),
        signed_names(m.alphabet()),
        signed_names(m.states()),
        output,
        transition,
    )
}

/// The automaton on the closure `S` of `T ⊆ F_Q` under residuation by
/// signed letters, with tables `s a = λ'(s,a) ρ'(s,a)`.
///
/// Residuation preserves word length, so `S` is finite. States are named by
/// their reduced words and listed in BFS discovery order.
pub fn subgroup_closure_automaton(m: &MealyAutomaton, generators: &[SignedWord]) -> Result<MealyAutomaton> {
    let table = m.crossing()?;
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    for t in generators {
        m.check_state_word(t)?;
    }
    let (na, ca) = (m.num_letters(), 2 * m.num_letters());

    let mut closure: IndexSet<SignedWord> = IndexSet::new();
    let mut queue = VecDeque::new();
    for t in generators {
        if closure.insert(t.clone()) {
            queue.push_back(t.clone());
        }
    }
    while let Some(s) = queue.pop_front() {
        for x in 0..ca {
            let mut h = s.as_slice().to_vec();
            pass_letter(table, &mut h, Signed::from_code(x));
            let t = SignedWord::from_reduced(h);
            if !closure.contains(&t) {
                closure.insert(t.clone());
                queue.push_back(t);
            }
        }
    }

    let mut output = Vec::with_capacity(closure.len() * na);
    let mut transition = Vec::with_capacity(closure.len() * na);
    for s in &closure {
        for a in 0..na {
            let mut h = s.as_slice().to_vec();
            let b = pass_letter(table, &mut h, Signed::pos(a));
            debug_assert!(b.is_positive());
            output.push(b.index);
            let t = SignedWord::from_reduced(h);
            transition.push(closure.get_index_of(&t).expect("closure is closed"));
        }
    }
    let states = closure
        .iter()
        .map(|s| symbol_name(m.states(), s.as_slice()))
        .collect();
    MealyAutomaton::new(
        format!("{}_sub", m.name()),
        m.alphabet().iter().cloned().collect(),
        states,
        output,
        transition,
    )
}
