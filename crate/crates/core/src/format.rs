//! Line-oriented text format for automata.
//!
//! ```text
//! automaton swap
//! alphabet 0 1
//! states s
//! trans s 0 -> 1 s
//! trans s 1 -> 0 s
//! ```
//!
//! A token starting with `#` begins a comment that runs to the end of the
//! line. Parsing is strict: every `(state, letter)` cell appears exactly once.

use std::fmt::Write as _;

use indexmap::IndexSet;

use crate::automaton::MealyAutomaton;
use crate::error::{Error, Result};

/// Non-comment tokens of each line, paired with 1-based line numbers.
pub(crate) fn significant_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let tokens: Vec<&str> = line
            .split_whitespace()
            .take_while(|t| !t.starts_with('#'))
            .collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    keyword: &str,
    last_line: usize,
) -> Result<(usize, Vec<&'a str>)> {
    let (line, tokens) = lines
        .next()
        .ok_or_else(|| parse_err(last_line, format!("expected `{keyword}` line")))?;
    if tokens[0] != keyword {
        return Err(parse_err(line, format!("expected `{keyword}`, found `{}`", tokens[0])));
    }
    Ok((line, tokens[1..].to_vec()))
}

pub fn parse_automaton(text: &str) -> Result<MealyAutomaton> {
    let last_line = text.lines().count().max(1);
    let mut lines = significant_lines(text);

    let (line, name) = header(&mut lines, "automaton", last_line)?;
    if name.len() != 1 {
        return Err(parse_err(line, "`automaton` takes exactly one name"));
    }
    let (line_a, alphabet) = header(&mut lines, "alphabet", last_line)?;
    let (line_q, states) = header(&mut lines, "states", last_line)?;

    let a_set: IndexSet<&str> = alphabet.iter().copied().collect();
    let q_set: IndexSet<&str> = states.iter().copied().collect();
    if a_set.is_empty() || a_set.len() != alphabet.len() {
        return Err(parse_err(line_a, "alphabet must be non-empty without duplicates"));
    }
    if q_set.is_empty() || q_set.len() != states.len() {
        return Err(parse_err(line_q, "states must be non-empty without duplicates"));
    }

    let na = a_set.len();
    let mut table: Vec<Option<(usize, usize)>> = vec![None; na * q_set.len()];
    for (line, tokens) in lines {
        let [kw, q, a, arrow, b, p] = tokens[..] else {
            return Err(parse_err(line, "expected `trans <state> <letter> -> <letter> <state>`"));
        };
        if kw != "trans" || arrow != "->" {
            return Err(parse_err(line, "expected `trans <state> <letter> -> <letter> <state>`"));
        }
        let find = |set: &IndexSet<&str>, sym: &str, kind: &str| {
            set.get_index_of(sym)
                .ok_or_else(|| parse_err(line, format!("unknown {kind} `{sym}`")))
        };
        let (qi, ai) = (find(&q_set, q, "state")?, find(&a_set, a, "letter")?);
        let cell = (find(&a_set, b, "letter")?, find(&q_set, p, "state")?);
        if table[qi * na + ai].replace(cell).is_some() {
            return Err(parse_err(line, format!("duplicate cell ({q}, {a})")));
        }
    }

    let mut output = Vec::with_capacity(table.len());
    let mut transition = Vec::with_capacity(table.len());
    for (i, cell) in table.into_iter().enumerate() {
        let (b, p) = cell.ok_or_else(|| {
            parse_err(
                last_line,
                format!("missing cell ({}, {})", states[i / na], alphabet[i % na]),
            )
        })?;
        output.push(b);
        transition.push(p);
    }

    MealyAutomaton::new(
        name[0],
        alphabet.iter().map(|s| s.to_string()).collect(),
        states.iter().map(|s| s.to_string()).collect(),
        output,
        transition,
    )
    .map_err(|e| parse_err(line_q, e.to_string()))
}

pub fn write_automaton(m: &MealyAutomaton) -> String {
    let mut out = String::new();
    let join = |set: &IndexSet<String>| set.iter().cloned().collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "automaton {}", m.name());
    let _ = writeln!(out, "alphabet {}", join(m.alphabet()));
    let _ = writeln!(out, "states {}", join(m.states()));
    for (q, qn) in m.states().iter().enumerate() {
        for (a, an) in m.alphabet().iter().enumerate() {
            let (b, p) = m.delta(q, a);
            let _ = writeln!(out, "trans {qn} {an} -> {} {}", m.alphabet()[b], m.states()[p]);
        }
    }
    out
}
