//! The Mealy automaton type.

use std::fmt;
use std::sync::OnceLock;

use indexmap::IndexSet;

use crate::crossing::CrossingTable;
use crate::error::{Error, Result};
use crate::properties::{validate, PropertyReport};
use crate::word::{parse_word, tokenize, MixedSymbol, MixedWord, Signed, SignedWord, EMPTY_WORD, INVERSE_MARK};

/// A Mealy automaton `(A, Q, λ, ρ)`.
///
/// Both symbol sets are ordered by insertion; every listing, table and
/// emitted file follows that order. Tables are stored row-major by state:
/// cell `(q, a)` lives at `q * |A| + a`.
pub struct MealyAutomaton {
    name: String,
    alphabet: IndexSet<String>,
    states: IndexSet<String>,
    output: Vec<usize>,
    transition: Vec<usize>,
    crossing: OnceLock<Option<CrossingTable>>,
}

impl Clone for MealyAutomaton {
    fn clone(&self) -> Self {
        MealyAutomaton {
            name: self.name.clone(),
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            output: self.output.clone(),
            transition: self.transition.clone(),
            crossing: OnceLock::new(),
        }
    }
}

/// Tables and symbol sets are compared; the name is not.
impl PartialEq for MealyAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet.iter().eq(other.alphabet.iter())
            && self.states.iter().eq(other.states.iter())
            && self.output == other.output
            && self.transition == other.transition
    }
}

impl Eq for MealyAutomaton {}

impl fmt::Debug for MealyAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MealyAutomaton")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .field("states", &self.states)
            .field("output", &self.output)
            .field("transition", &self.transition)
            .finish()
    }
}

fn check_symbol(kind: &str, name: &str) -> Result<()> {
    let bad = name.is_empty()
        || name.chars().any(char::is_whitespace)
        || name.starts_with('#')
        || name.ends_with(INVERSE_MARK)
        || name == EMPTY_WORD
        || name == "->";
    if bad {
        return Err(Error::Symbols(format!("illegal {kind} symbol `{name}`")));
    }
    Ok(())
}

fn symbol_set(kind: &str, names: Vec<String>) -> Result<IndexSet<String>> {
    if names.is_empty() {
        return Err(Error::Symbols(format!("{kind} set is empty")));
    }
    let mut set = IndexSet::with_capacity(names.len());
    for name in names {
        check_symbol(kind, &name)?;
        if !set.insert(name.clone()) {
            return Err(Error::Symbols(format!("duplicate {kind} symbol `{name}`")));
        }
    }
    Ok(set)
}

impl MealyAutomaton {
    /// Builds an automaton from dense tables indexed `q * |A| + a`.
    pub fn new(
        name: impl Into<String>,
        alphabet: Vec<String>,
        states: Vec<String>,
        output: Vec<usize>,
        transition: Vec<usize>,
    ) -> Result<Self> {
        let alphabet = symbol_set("letter", alphabet)?;
        let states = symbol_set("state", states)?;
        if let Some(shared) = states.iter().find(|s| alphabet.contains(*s)) {
            return Err(Error::Symbols(format!(
                "`{shared}` is both a letter and a state"
            )));
        }
        let cells = alphabet.len() * states.len();
        if output.len() != cells || transition.len() != cells {
            return Err(Error::Symbols(format!(
                "tables must have {cells} cells, got {} and {}",
                output.len(),
                transition.len()
            )));
        }
        if let Some(&b) = output.iter().find(|&&b| b >= alphabet.len()) {
            return Err(Error::Symbols(format!("output letter index {b} out of range")));
        }
        if let Some(&p) = transition.iter().find(|&&p| p >= states.len()) {
            return Err(Error::Symbols(format!("target state index {p} out of range")));
        }
        Ok(MealyAutomaton {
            name: name.into(),
            alphabet,
            states,
            output,
            transition,
            crossing: OnceLock::new(),
        })
    }

    /// Builds an automaton from a function giving `(λ(q,a), ρ(q,a))` by index.
    pub fn from_fn(
        name: impl Into<String>,
        alphabet: &[&str],
        states: &[&str],
        cell: impl Fn(usize, usize) -> (usize, usize),
    ) -> Result<Self> {
        let na = alphabet.len();
        let nq = states.len();
        let mut output = Vec::with_capacity(na * nq);
        let mut transition = Vec::with_capacity(na * nq);
        for q in 0..nq {
            for a in 0..na {
                let (b, p) = cell(q, a);
                output.push(b);
                transition.push(p);
            }
        }
        MealyAutomaton::new(
            name,
            alphabet.iter().map(|s| s.to_string()).collect(),
            states.iter().map(|s| s.to_string()).collect(),
            output,
            transition,
        )
    }

    /// Builds an automaton from named cells `(state, letter, output, target)`.
    ///
    /// Every cell must be given exactly once.
    pub fn from_cells<'a, I>(name: impl Into<String>, alphabet: &[&str], states: &[&str], cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str, &'a str)>,
    {
        let a_set: IndexSet<&str> = alphabet.iter().copied().collect();
        let q_set: IndexSet<&str> = states.iter().copied().collect();
        let lookup = |set: &IndexSet<&str>, s: &str| {
            set.get_index_of(s)
                .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
        };
        let na = alphabet.len();
        let mut table: Vec<Option<(usize, usize)>> = vec![None; na * states.len()];
        for (q, a, b, p) in cells {
            let (qi, ai) = (lookup(&q_set, q)?, lookup(&a_set, a)?);
            let cell = (lookup(&a_set, b)?, lookup(&q_set, p)?);
            if table[qi * na + ai].replace(cell).is_some() {
                return Err(Error::DuplicateCell {
                    state: q.to_string(),
                    letter: a.to_string(),
                });
            }
        }
        let mut output = Vec::with_capacity(table.len());
        let mut transition = Vec::with_capacity(table.len());
        for (i, cell) in table.into_iter().enumerate() {
            let (b, p) = cell.ok_or_else(|| Error::MissingCell {
                state: states[i / na].to_string(),
                letter: alphabet[i % na].to_string(),
            })?;
            output.push(b);
            transition.push(p);
        }
        MealyAutomaton::new(
            name,
            alphabet.iter().map(|s| s.to_string()).collect(),
            states.iter().map(|s| s.to_string()).collect(),
            output,
            transition,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn alphabet(&self) -> &IndexSet<String> {
        &self.alphabet
    }

    pub fn states(&self) -> &IndexSet<String> {
        &self.states
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// `λ(q, a)`
    #[inline]
    pub fn output(&self, q: usize, a: usize) -> usize {
        self.output[q * self.alphabet.len() + a]
    }

    /// `ρ(q, a)`
    #[inline]
    pub fn transition(&self, q: usize, a: usize) -> usize {
        self.transition[q * self.alphabet.len() + a]
    }

    /// `δ(q, a) = (λ(q, a), ρ(q, a))`
    #[inline]
    pub fn delta(&self, q: usize, a: usize) -> (usize, usize) {
        (self.output(q, a), self.transition(q, a))
    }

    pub fn validate(&self) -> PropertyReport {
        validate(self)
    }

    /// The crossing table, computed once. Fails unless the automaton is
    /// bireversible.
    pub fn crossing(&self) -> Result<&CrossingTable> {
        self.crossing
            .get_or_init(|| CrossingTable::build(self))
            .as_ref()
            .ok_or_else(|| {
                let report = self.validate();
                Error::Property {
                    property: "bireversible",
                    witness: report
                        .first_witness()
                        .map(|w| w.describe(self))
                        .unwrap_or_default(),
                }
            })
    }

    pub fn is_bireversible(&self) -> bool {
        self.crossing().is_ok()
    }

    pub fn letter_index(&self, name: &str) -> Result<usize> {
        self.alphabet
            .get_index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .get_index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    /// Parses a word over the states in CLI syntax (`a b^-1`).
    pub fn parse_state_word(&self, text: &str) -> Result<SignedWord> {
        parse_word(&self.states, text)
    }

    /// Parses a word over the letters in CLI syntax (`0 1^-1`).
    pub fn parse_letter_word(&self, text: &str) -> Result<SignedWord> {
        parse_word(&self.alphabet, text)
    }

    /// Parses a mixed word; the input is kept as written (not reduced).
    pub fn parse_mixed_word(&self, text: &str) -> Result<MixedWord> {
        tokenize(text)
            .into_iter()
            .map(|(name, inverse)| {
                if let Some(index) = self.states.get_index_of(name) {
                    Ok(MixedSymbol::State(Signed { index, inverse }))
                } else if let Some(index) = self.alphabet.get_index_of(name) {
                    Ok(MixedSymbol::Letter(Signed { index, inverse }))
                } else {
                    Err(Error::UnknownSymbol(name.to_string()))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(MixedWord)
    }

    pub fn render_states(&self, word: &[Signed]) -> String {
        crate::word::render(&self.states, word)
    }

    pub fn render_letters(&self, word: &[Signed]) -> String {
        crate::word::render(&self.alphabet, word)
    }

    pub(crate) fn check_state_word(&self, word: &SignedWord) -> Result<()> {
        match word.iter().find(|s| s.index >= self.num_states()) {
            Some(s) => Err(Error::UnknownSymbol(format!("state #{}", s.index))),
            None => Ok(()),
        }
    }

    pub(crate) fn check_letter_word(&self, word: &SignedWord) -> Result<()> {
        match word.iter().find(|s| s.index >= self.num_letters()) {
            Some(s) => Err(Error::UnknownSymbol(format!("letter #{}", s.index))),
            None => Ok(()),
        }
    }
}
