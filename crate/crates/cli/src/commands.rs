use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use mealy_core::constructions::{disjoint_union, dual_automaton, inverse_automaton, subgroup_closure_automaton, symmetrize};
use mealy_core::distortion::{
    free_submonoid_search, geodesic_length, orbit_language, power_profile, Length, SearchBounds, SubmonoidSearch,
};
use mealy_core::format::{parse_automaton, write_automaton};
use mealy_core::group::{
    cross_check_finiteness, element_order, equal, BallSearch, Budget, Finiteness, GrowthStatus, OrderResult, Verdict,
};
use mealy_core::quotient::{is_compatible, parse_marked_group, verify_mns_instance, FiniteMarkedGroup, QuotientGraph};
use mealy_core::rewriting::{act_state_on_word, normal_form, residual};
use mealy_core::MealyAutomaton;

use crate::{Cli, Command, Target};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mealy_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        source: mealy_core::Error,
    },
}

/// `Unknown` marks a result limited by a budget or bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Unknown,
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path) -> Result<MealyAutomaton> {
    parse_automaton(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn load_target(path: &Path, target: &Target) -> Result<MealyAutomaton> {
    let m = load(path)?;
    Ok(if target.dual { dual_automaton(&m)? } else { m })
}

fn load_group(path: &Path) -> Result<FiniteMarkedGroup> {
    parse_marked_group(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn write_report<T: Serialize>(target: &Target, report: &T) -> Result<()> {
    if let Some(path) = &target.report {
        let mut json = serde_json::to_string_pretty(report).expect("reports serialize");
        json.push('\n');
        write_file(path, &json)?;
    }
    Ok(())
}

fn flag(value: bool, witness: Option<String>) -> String {
    match (value, witness) {
        (false, Some(w)) => format!("false (witness: {w})"),
        (value, _) => value.to_string(),
    }
}

/// JSON report for ball growth and enumeration.
#[derive(Serialize)]
struct GrowthReport<'a> {
    automaton: &'a str,
    radii: Vec<usize>,
    sizes: &'a [usize],
    status: GrowthStatus,
    budget: Budget,
}

#[derive(Serialize)]
struct ResultReport<'a, T: Serialize> {
    automaton: &'a str,
    word: &'a str,
    result: T,
}

pub fn run(cli: &Cli, out: &mut String) -> Result<Outcome> {
    let budget = cli.budget.budget();
    match &cli.command {
        Command::Check { automaton } => {
            let m = load(automaton)?;
            let r = m.validate();
            let headline = |w: &Option<mealy_core::properties::Witness>| w.as_ref().map(|w| w.headline(&m));
            let _ = writeln!(out, "invertible: {}", flag(r.invertible, headline(&r.output_witness)));
            let _ = writeln!(out, "reversible: {}", flag(r.reversible, headline(&r.transition_witness)));
            let _ = writeln!(out, "delta-bijective: {}", flag(r.delta_bijective, headline(&r.delta_witness)));
            let _ = writeln!(out, "bireversible: {}", flag(r.bireversible, headline(&r.first_witness())));
            if let Some(w) = r.first_witness() {
                let _ = writeln!(out, "witness: {}", w.detail(&m));
            }
        }
        Command::Invert { automaton } => out.push_str(&write_automaton(&inverse_automaton(&load(automaton)?)?)),
        Command::Dual { automaton } => out.push_str(&write_automaton(&dual_automaton(&load(automaton)?)?)),
        Command::Union { automata } => {
            let parts = automata.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
            let refs: Vec<&MealyAutomaton> = parts.iter().collect();
            out.push_str(&write_automaton(&disjoint_union(&refs)?));
        }
        Command::Symmetrize { automaton } => out.push_str(&write_automaton(&symmetrize(&load(automaton)?)?)),
        Command::Subgroup { automaton, generators } => {
            let m = load(automaton)?;
            let words = generators
                .iter()
                .map(|g| m.parse_state_word(g))
                .collect::<mealy_core::Result<Vec<_>>>()?;
            out.push_str(&write_automaton(&subgroup_closure_automaton(&m, &words)?));
        }
        Command::Nf { automaton, word, orient } => {
            let m = load(automaton)?;
            let nf = normal_form(&m, &m.parse_mixed_word(word)?, *orient)?;
            let _ = writeln!(out, "{}", nf.display(&m));
        }
        Command::Act {
            automaton,
            states,
            letters,
            residual: want_residual,
        } => {
            let m = load(automaton)?;
            let g = m.parse_state_word(states)?;
            let v = m.parse_letter_word(letters)?;
            if *want_residual {
                let _ = writeln!(out, "{}", m.render_states(residual(&m, &g, &v)?.as_slice()));
            } else {
                let _ = writeln!(out, "{}", m.render_letters(act_state_on_word(&m, &g, &v)?.as_slice()));
            }
        }
        Command::Equal { automaton, left, right } => {
            let m = load(automaton)?;
            let same = equal(&m, &m.parse_state_word(left)?, &m.parse_state_word(right)?)?;
            let _ = writeln!(out, "{same}");
        }
        Command::Ball { automaton, radius, target } => {
            let m = load_target(automaton, target)?;
            let g = mealy_core::group::ball(&m, *radius, budget)?;
            for (r, size) in g.sizes.iter().enumerate() {
                let _ = writeln!(out, "radius {r}: {size}");
            }
            let status = match g.status {
                GrowthStatus::Complete => "complete".to_string(),
                GrowthStatus::Finite => format!("finite, order {}", g.sizes.last().expect("radius 0")),
                GrowthStatus::Unknown => format!("unknown beyond radius {} (budget exhausted)", g.known_radius()),
            };
            let _ = writeln!(out, "status: {status}");
            write_report(
                target,
                &GrowthReport {
                    automaton: m.name(),
                    radii: (0..g.sizes.len()).collect(),
                    sizes: &g.sizes,
                    status: g.status,
                    budget,
                },
            )?;
            if g.status == GrowthStatus::Unknown {
                return Ok(Outcome::Unknown);
            }
        }
        Command::Enumerate { automaton, target, list } => {
            let m = load_target(automaton, target)?;
            let mut search = BallSearch::new(&m, budget)?;
            let closed = search.run_to_closure();
            let sizes = search.sizes().to_vec();
            let status = if closed { GrowthStatus::Finite } else { GrowthStatus::Unknown };
            if closed {
                let _ = writeln!(out, "finite: {} elements", search.len());
                if *list {
                    for (_, word) in search.elements() {
                        let _ = writeln!(out, "  {}", m.render_states(word.as_slice()));
                    }
                }
            } else {
                let _ = writeln!(
                    out,
                    "unknown: {} elements within radius {} (budget exhausted)",
                    search.len(),
                    search.radius()
                );
            }
            write_report(
                target,
                &GrowthReport {
                    automaton: m.name(),
                    radii: (0..sizes.len()).collect(),
                    sizes: &sizes,
                    status,
                    budget,
                },
            )?;
            if !closed {
                return Ok(Outcome::Unknown);
            }
        }
        Command::Finiteness { automaton } => {
            let m = load(automaton)?;
            let r = cross_check_finiteness(&m, budget)?;
            let side = |f: Finiteness| match f {
                Finiteness::Finite(n) => format!("finite (order {n})"),
                Finiteness::Unknown => "unknown (budget exhausted)".to_string(),
            };
            let _ = writeln!(out, "group: {}", side(r.group));
            let _ = writeln!(out, "dual: {}", side(r.dual));
            let verdict = match r.verdict {
                Verdict::BothFinite => "consistent, both finite",
                Verdict::BothUnknown => "unknown on both sides",
                Verdict::BudgetLimited => "budget-limited, consistent",
                Verdict::Violation => "VIOLATION",
            };
            let _ = writeln!(out, "verdict: {verdict}");
            if r.verdict != Verdict::BothFinite {
                return Ok(Outcome::Unknown);
            }
        }
        Command::Compat { automaton, group } => {
            let m = load(automaton)?;
            let w = load_group(group)?;
            match is_compatible(&m, &w)? {
                None => out.push_str("compatible: true\n"),
                Some(witness) => {
                    let _ = writeln!(out, "compatible: false (witness: {witness})");
                }
            }
        }
        Command::QuotientDot { group } => out.push_str(&QuotientGraph::build(&load_group(group)?).to_dot()),
        Command::MnsVerify {
            automaton,
            group,
            radius,
            cap,
        } => {
            let r = verify_mns_instance(&load(automaton)?, &load_group(group)?, *radius, *cap)?;
            let _ = writeln!(out, "vertices: {}", r.vertices);
            let _ = writeln!(out, "descended elements (radius {}): {}", r.radius, r.descended);
            let _ = writeln!(out, "descended subgroup order: {}", r.descended_group);
            let _ = writeln!(out, "aut1 order: {}", r.aut1);
            let _ = writeln!(out, "contained: {}", r.contained);
        }
        Command::Order {
            automaton,
            word,
            bound,
            certify_depth,
            target,
        } => {
            let m = load_target(automaton, target)?;
            let u = m.parse_state_word(word)?;
            let r = element_order(&m, &u, *bound, *certify_depth, budget)?;
            match r {
                OrderResult::Order(n) => {
                    let _ = writeln!(out, "order: {n}");
                }
                OrderResult::ExceedsBound { depth, cycle } => {
                    let _ = writeln!(out, "order: > {bound} (cycle of length {cycle} on words of length {depth})");
                }
                OrderResult::Unknown { checked } => {
                    let _ = writeln!(out, "order: unknown (no power up to {checked} is trivial)");
                }
            }
            write_report(target, &ResultReport { automaton: m.name(), word, result: r })?;
            if !matches!(r, OrderResult::Order(_)) {
                return Ok(Outcome::Unknown);
            }
        }
        Command::Geodesic {
            automaton,
            word,
            radius,
            target,
        } => {
            let m = load_target(automaton, target)?;
            let l = geodesic_length(&m, &m.parse_state_word(word)?, *radius, budget)?;
            match l {
                Length::Exact(n) => {
                    let _ = writeln!(out, "length: {n}");
                }
                Length::Unknown { searched } => {
                    let _ = writeln!(out, "length: unknown (greater than {searched})");
                }
            }
            write_report(target, &ResultReport { automaton: m.name(), word, result: l })?;
            if l.exact().is_none() {
                return Ok(Outcome::Unknown);
            }
        }
        Command::Distortion {
            automaton,
            word,
            step,
            n_max,
            radius,
            data,
            target,
        } => {
            let m = load_target(automaton, target)?;
            let g = m.parse_state_word(word)?;
            let p = power_profile(&m, &g, step.get(), n_max.get(), *radius, budget)?;
            out.push_str("n kn length ratio\n");
            let mut plot = String::from("# kn length\n");
            for e in &p.entries {
                match (e.length.exact(), e.ratio()) {
                    (Some(l), Some(ratio)) => {
                        let _ = writeln!(out, "{} {} {l} {ratio:.6}", e.n, e.exponent);
                        let _ = writeln!(plot, "{} {l}", e.exponent);
                    }
                    _ => {
                        let _ = writeln!(out, "{} {} - -", e.n, e.exponent);
                    }
                }
            }
            match p.c_est {
                Some(c) => {
                    let _ = writeln!(out, "C_est: {c:.6}");
                }
                None => out.push_str("C_est: unknown\n"),
            }
            let _ = writeln!(out, "sublinear: {}", p.sublinear);
            if let Some(path) = data {
                write_file(path, &plot)?;
            }
            write_report(target, &p)?;
            if p.entries.iter().any(|e| e.length.exact().is_none()) {
                return Ok(Outcome::Unknown);
            }
        }
        Command::Orbit {
            automaton,
            seed,
            n_max,
            gamma_len,
        } => {
            let m = load(automaton)?;
            let sample = orbit_language(&m, &m.parse_letter_word(seed)?, *n_max, *gamma_len)?;
            for w in &sample.words {
                let _ = writeln!(out, "{}", m.render_letters(w.as_slice()));
            }
        }
        Command::FreeMonoid {
            automaton,
            seed,
            n_max,
            gamma_len,
            order_bound,
            depth,
        } => {
            let m = load(automaton)?;
            let bounds = SearchBounds {
                n_max: *n_max,
                gamma_len_max: *gamma_len,
                order_bound: *order_bound,
            };
            match free_submonoid_search(&m, &m.parse_letter_word(seed)?, bounds, depth.get())? {
                SubmonoidSearch::Candidate { x1, x2, certified_up_to } => {
                    let _ = writeln!(
                        out,
                        "candidate: x1 = {}, x2 = {} (certified up to {certified_up_to} factors)",
                        m.render_letters(x1.as_slice()),
                        m.render_letters(x2.as_slice())
                    );
                }
                SubmonoidSearch::NotFound { pairs_tried } => {
                    let _ = writeln!(out, "not found ({pairs_tried} pairs tried)");
                    return Ok(Outcome::Unknown);
                }
            }
        }
    }
    Ok(Outcome::Done)
}
