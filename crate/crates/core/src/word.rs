//! Signed symbols and freely reduced words.
//!
//! A [`Signed`] symbol is an index into an ordered symbol set (the alphabet
//! or the state set of an automaton) together with a formal-inverse flag.
//! Symbols are packed into a dense *code* `2 * index + inverse`, which is how
//! the crossing table and the symmetrized automaton address them.

use std::fmt;

use indexmap::IndexSet;
use serde::Serialize;

use crate::error::{Error, Result};

/// Textual suffix marking a formal inverse in word syntax (`s^-1`).
pub const INVERSE_MARK: &str = "^-1";

/// Suffix used to name formal-inverse symbols in derived automata.
pub const INVERSE_SUFFIX: &str = "_inv";

/// Rendering of the empty word.
pub const EMPTY_WORD: &str = "eps";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Signed {
    pub index: usize,
    pub inverse: bool,
}

impl Signed {
    pub const fn pos(index: usize) -> Self {
        Signed {
            index,
            inverse: false,
        }
    }

    pub const fn neg(index: usize) -> Self {
        Signed {
            index,
            inverse: true,
        }
    }

    pub const fn inv(self) -> Self {
        Signed {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    #[inline]
    pub const fn code(self) -> usize {
        2 * self.index + self.inverse as usize
    }

    #[inline]
    pub const fn from_code(code: usize) -> Self {
        Signed {
            index: code / 2,
            inverse: code % 2 == 1,
        }
    }

    pub fn is_positive(self) -> bool {
        !self.inverse
    }
}

/// A freely reduced word of signed symbols drawn from a single symbol set.
///
/// Every constructor and mutator keeps the word reduced: no adjacent pair
/// `x x^-1` or `x^-1 x` ever survives.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SignedWord(Vec<Signed>);

impl SignedWord {
    pub fn new() -> Self {
        SignedWord(Vec::new())
    }

    /// Builds a positive word from plain indices.
    pub fn positive<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().map(Signed::pos).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Signed] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Signed> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Signed> {
        self.0.iter()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|s| s.is_positive())
    }

    /// Appends `s`, cancelling it against the last symbol when they are
    /// mutually inverse.
    pub fn push(&mut self, s: Signed) {
        match self.0.last() {
            Some(&last) if last == s.inv() => {
                self.0.pop();
            }
            _ => self.0.push(s),
        }
    }

    pub fn inverse(&self) -> Self {
        SignedWord(self.0.iter().rev().map(|s| s.inv()).collect())
    }

    pub fn concat(&self, other: &SignedWord) -> Self {
        let mut out = self.clone();
        out.extend(other.iter().copied());
        out
    }

    /// `self^n` for a signed exponent.
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = SignedWord::new();
        for _ in 0..n.unsigned_abs() {
            out.extend(base.iter().copied());
        }
        out
    }

    /// Wraps a sequence that the caller knows to be reduced.
    pub(crate) fn from_reduced(symbols: Vec<Signed>) -> Self {
        debug_assert!(symbols.windows(2).all(|w| w[0] != w[1].inv()));
        SignedWord(symbols)
    }
}

impl Extend<Signed> for SignedWord {
    fn extend<I: IntoIterator<Item = Signed>>(&mut self, iter: I) {
        for s in iter {
            self.push(s);
        }
    }
}

impl FromIterator<Signed> for SignedWord {
    fn from_iter<I: IntoIterator<Item = Signed>>(iter: I) -> Self {
        let mut w = SignedWord::new();
        w.extend(iter);
        w
    }
}

impl<'a> IntoIterator for &'a SignedWord {
    type Item = &'a Signed;
    type IntoIter = std::slice::Iter<'a, Signed>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A symbol of a mixed word over states and letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MixedSymbol {
    State(Signed),
    Letter(Signed),
}

impl MixedSymbol {
    pub fn inv(self) -> Self {
        match self {
            MixedSymbol::State(s) => MixedSymbol::State(s.inv()),
            MixedSymbol::Letter(s) => MixedSymbol::Letter(s.inv()),
        }
    }
}

/// An element of the fundamental group written as an arbitrary (not
/// necessarily reduced) word over states and letters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MixedWord(pub Vec<MixedSymbol>);

impl MixedWord {
    pub fn states(word: &SignedWord) -> Self {
        MixedWord(word.iter().map(|&s| MixedSymbol::State(s)).collect())
    }

    pub fn letters(word: &SignedWord) -> Self {
        MixedWord(word.iter().map(|&s| MixedSymbol::Letter(s)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &MixedWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        MixedWord(v)
    }

    pub fn inverse(&self) -> Self {
        MixedWord(self.0.iter().rev().map(|s| s.inv()).collect())
    }
}

/// Splits CLI word syntax into `(name, inverse)` tokens.
///
/// The literal `eps` denotes the empty word and contributes no token.
pub fn tokenize(text: &str) -> Vec<(&str, bool)> {
    text.split_whitespace()
        .filter(|t| *t != EMPTY_WORD)
        .map(|t| match t.strip_suffix(INVERSE_MARK) {
            Some(base) => (base, true),
            None => (t, false),
        })
        .collect()
}

/// Parses a word over a single symbol set.
///
/// A token that is not a symbol but spells single-character symbols is read
/// in compact form (`0101`); a trailing `^-1` then inverts its last symbol.
pub fn parse_word(symbols: &IndexSet<String>, text: &str) -> Result<SignedWord> {
    let mut word = SignedWord::new();
    for (name, inverse) in tokenize(text) {
        if let Some(index) = symbols.get_index_of(name) {
            word.push(Signed { index, inverse });
            continue;
        }
        let mut buf = [0u8; 4];
        let compact: Option<Vec<usize>> = name
            .chars()
            .map(|c| symbols.get_index_of(&*c.encode_utf8(&mut buf)))
            .collect();
        let indices = compact
            .filter(|v| !v.is_empty())
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        let last = indices.len() - 1;
        for (i, index) in indices.into_iter().enumerate() {
            word.push(Signed {
                index,
                inverse: inverse && i == last,
            });
        }
    }
    Ok(word)
}

/// Renders a word for display.
///
/// Words over single-character positive symbols are concatenated (`0101`);
/// anything else is space separated with `^-1` marks (`s 0^-1`).
pub fn render(symbols: &IndexSet<String>, word: &[Signed]) -> String {
    if word.is_empty() {
        return EMPTY_WORD.to_string();
    }
    let compact = word
        .iter()
        .all(|s| s.is_positive() && symbols[s.index].chars().count() == 1);
    let parts = word.iter().map(|s| {
        let name = &symbols[s.index];
        if s.inverse {
            format!("{name}{INVERSE_MARK}")
        } else {
            name.clone()
        }
    });
    if compact {
        parts.collect()
    } else {
        parts.collect::<Vec<_>>().join(" ")
    }
}

/// Renders a word as a single whitespace-free symbol name, used for the
/// states of derived automata whose states are words.
pub fn symbol_name(symbols: &IndexSet<String>, word: &[Signed]) -> String {
    if word.is_empty() {
        return EMPTY_WORD.to_string();
    }
    let compact = word
        .iter()
        .all(|s| s.is_positive() && symbols[s.index].chars().count() == 1);
    let parts = word.iter().map(|s| {
        let name = &symbols[s.index];
        if s.inverse {
            format!("{name}{INVERSE_SUFFIX}")
        } else {
            name.clone()
        }
    });
    if compact {
        parts.collect()
    } else {
        parts.collect::<Vec<_>>().join(".")
    }
}

/// Helper for `Display` of words when only the symbol names are at hand.
pub struct Rendered<'a> {
    pub symbols: &'a IndexSet<String>,
    pub word: &'a [Signed],
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self.symbols, self.word))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(names: &[&str]) -> IndexSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn push_cancels_inverse_pairs() {
        let mut w = SignedWord::new();
        w.push(Signed::pos(0));
        w.push(Signed::neg(1));
        w.push(Signed::pos(1));
        assert_eq!(w.as_slice(), &[Signed::pos(0)]);
        w.push(Signed::neg(0));
        assert!(w.is_empty());
    }

    #[test]
    fn parse_and_render() {
        let s = set(&["0", "1"]);
        let w = parse_word(&s, "0 1 1^-1 0").unwrap();
        assert_eq!(render(&s, w.as_slice()), "00");
        let w = parse_word(&s, "0 1^-1").unwrap();
        assert_eq!(render(&s, w.as_slice()), "0 1^-1");
        assert_eq!(render(&s, &[]), "eps");
        assert_eq!(parse_word(&s, "eps").unwrap(), SignedWord::new());
        assert!(matches!(parse_word(&s, "2"), Err(Error::UnknownSymbol(_))));
        assert_eq!(render(&s, parse_word(&s, "0110").unwrap().as_slice()), "0110");
        assert_eq!(parse_word(&s, "01^-1").unwrap(), parse_word(&s, "0 1^-1").unwrap());
        assert!(parse_word(&s, "012").is_err());
        assert!(parse_word(&s, "^-1").is_err());
    }

    #[test]
    fn symbol_names_are_whitespace_free() {
        let s = set(&["a", "bb"]);
        assert_eq!(symbol_name(&s, &[Signed::pos(0), Signed::pos(0)]), "aa");
        assert_eq!(
            symbol_name(&s, &[Signed::pos(0), Signed::neg(1)]),
            "a.bb_inv"
        );
    }

    fn arb_word() -> impl Strategy<Value = Vec<Signed>> {
        prop::collection::vec((0usize..3, any::<bool>()), 0..24).prop_map(|v| {
            v.into_iter()
                .map(|(index, inverse)| Signed { index, inverse })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn reduction_is_reduced_and_idempotent(raw in arb_word()) {
            let w: SignedWord = raw.iter().copied().collect();
            prop_assert!(w.as_slice().windows(2).all(|p| p[0] != p[1].inv()));
            let again: SignedWord = w.iter().copied().collect();
            prop_assert_eq!(&again, &w);
        }

        #[test]
        fn inverse_cancels(raw in arb_word()) {
            let w: SignedWord = raw.iter().copied().collect();
            prop_assert!(w.concat(&w.inverse()).is_empty());
            prop_assert!(w.inverse().concat(&w).is_empty());
        }

        #[test]
        fn code_round_trip(index in 0usize..1000, inverse in any::<bool>()) {
            let s = Signed { index, inverse };
            prop_assert_eq!(Signed::from_code(s.code()), s);
        }
    }
}
