//! Finite marked groups, compatibility, quotient graphs `ker(φ)\T_A` and the
//! descent of automaton actions to them.
//!
//! Marked-group text format:
//!
//! ```text
//! group c2
//! order 2
//! gen 0 (0 1)
//! gen 1 1 0
//! ```
//!
//! Each `gen` line gives the permutation `φ(a)` of `{0..order-1}`, either in
//! cycle notation or as an image list. Vertex `0` is the identity and vertex
//! `x` maps to `x·a = φ(a)(x)`.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use indexmap::IndexSet;
use itertools::Itertools;
use serde::Serialize;

use crate::automaton::MealyAutomaton;
use crate::error::{Error, Result};
use crate::format::significant_lines;
use crate::group::{BallSearch, Budget, Generators, Step};
use crate::rewriting::{act_state_on_word, residual};
use crate::word::{render, Signed, SignedWord};

pub const DEFAULT_VERTEX_CAP: usize = 64;
pub const RESULT_CAP: usize = 1 << 20;

/// A finite group `G` with an epimorphism `φ: F_A → G`, stored as the
/// right-regular permutation images of the letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMarkedGroup {
    name: String,
    alphabet: IndexSet<String>,
    perms: Vec<Vec<usize>>,
    inverse_perms: Vec<Vec<usize>>,
    /// BFS-tree words `t_x` with `0·t_x = x`.
    transversal: Vec<SignedWord>,
}

impl FiniteMarkedGroup {
    pub fn new(name: impl Into<String>, alphabet: Vec<String>, perms: Vec<Vec<usize>>) -> Result<Self> {
        let name = name.into();
        let invalid = |m: String| Err(Error::InvalidMarking(m));
        let letters: IndexSet<String> = alphabet.iter().cloned().collect();
        if letters.len() != alphabet.len() || letters.is_empty() {
            return invalid("alphabet must be non-empty without duplicates".into());
        }
        if perms.len() != letters.len() {
            return invalid(format!("{} permutations for {} letters", perms.len(), letters.len()));
        }
        let n = perms[0].len();
        if n == 0 {
            return invalid("order must be positive".into());
        }
        let mut inverse_perms = Vec::with_capacity(perms.len());
        for (a, p) in perms.iter().enumerate() {
            let mut inv = vec![usize::MAX; n];
            if p.len() != n {
                return invalid(format!("image of `{}` has {} points, expected {n}", letters[a], p.len()));
            }
            for (x, &y) in p.iter().enumerate() {
                if y >= n || inv[y] != usize::MAX {
                    return invalid(format!("image of `{}` is not a permutation of 0..{n}", letters[a]));
                }
                inv[y] = x;
            }
            inverse_perms.push(inv);
        }

        let mut transversal: Vec<Option<SignedWord>> = vec![None; n];
        transversal[0] = Some(SignedWord::new());
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for (a, p) in perms.iter().enumerate() {
                let y = p[x];
                if transversal[y].is_none() {
                    let mut t = transversal[x].clone().expect("visited");
                    t.push(Signed::pos(a));
                    transversal[y] = Some(t);
                    queue.push_back(y);
                }
            }
        }
        let Some(transversal) = transversal.into_iter().collect::<Option<Vec<_>>>() else {
            return invalid("the generators do not act transitively".into());
        };

        let group = FiniteMarkedGroup {
            name,
            alphabet: letters,
            perms,
            inverse_perms,
            transversal,
        };
        // {g_x} contains the identity and is closed under right
        // multiplication by generators, so it is the whole group
        for x in 0..n {
            for a in 0..group.alphabet.len() {
                let y = group.perms[a][x];
                for z in 0..n {
                    let via_x = group.perms[a][group.apply(z, &group.transversal[x])];
                    if via_x != group.apply(z, &group.transversal[y]) {
                        return invalid(format!("the action is not regular (order exceeds {n})"));
                    }
                }
            }
        }
        Ok(group)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.perms[0].len()
    }

    pub fn alphabet(&self) -> &IndexSet<String> {
        &self.alphabet
    }

    pub fn permutation(&self, letter: usize) -> &[usize] {
        &self.perms[letter]
    }

    pub fn transversal(&self) -> &[SignedWord] {
        &self.transversal
    }

    /// The point `x·w`.
    pub fn apply(&self, x: usize, w: &SignedWord) -> usize {
        w.iter().fold(x, |x, s| {
            if s.inverse {
                self.inverse_perms[s.index][x]
            } else {
                self.perms[s.index][x]
            }
        })
    }

    /// `φ(w)` as the vertex `0·w`.
    pub fn evaluate(&self, w: &SignedWord) -> usize {
        self.apply(0, w)
    }

    pub fn in_kernel(&self, w: &SignedWord) -> bool {
        self.evaluate(w) == 0
    }

    /// Reorders the marking to follow the automaton's alphabet.
    pub fn aligned_to(&self, m: &MealyAutomaton) -> Result<Self> {
        let mismatch = || Error::AlphabetMismatch {
            left: m.alphabet().iter().join(" "),
            right: self.alphabet.iter().join(" "),
        };
        if m.alphabet().len() != self.alphabet.len() {
            return Err(mismatch());
        }
        let perms = m
            .alphabet()
            .iter()
            .map(|a| self.alphabet.get_index_of(a).map(|i| self.perms[i].clone()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(mismatch)?;
        FiniteMarkedGroup::new(self.name.clone(), m.alphabet().iter().cloned().collect(), perms)
    }

    /// Schreier generators `t_x a t_{x·a}⁻¹` of `ker(φ)`, trivial ones
    /// dropped, ordered by `(x, a)`.
    pub fn kernel_generators(&self) -> Vec<SignedWord> {
        let mut out = Vec::new();
        for (x, t) in self.transversal.iter().enumerate() {
            for a in 0..self.alphabet.len() {
                let mut k = t.clone();
                k.push(Signed::pos(a));
                let k = k.concat(&self.transversal[self.perms[a][x]].inverse());
                if !k.is_empty() {
                    out.push(k);
                }
            }
        }
        out
    }

    pub fn render_word(&self, w: &SignedWord) -> String {
        render(&self.alphabet, w.as_slice())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_permutation(line: usize, tokens: &[&str], n: usize) -> Result<Vec<usize>> {
    let number = |t: &str| {
        t.parse::<usize>()
            .ok()
            .filter(|&v| v < n)
            .ok_or_else(|| parse_err(line, format!("`{t}` is not a point of 0..{n}")))
    };
    let text = tokens.join(" ");
    if !text.starts_with('(') {
        let image = tokens.iter().map(|t| number(t)).collect::<Result<Vec<_>>>()?;
        if image.len() != n {
            return Err(parse_err(line, format!("image list needs {n} entries")));
        }
        return Ok(image);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut moved = vec![false; n];
    for cycle in text.split(')') {
        let cycle = cycle.trim();
        if cycle.is_empty() {
            continue;
        }
        let body = cycle
            .strip_prefix('(')
            .ok_or_else(|| parse_err(line, "malformed cycle notation"))?;
        let points = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(number)
            .collect::<Result<Vec<_>>>()?;
        for (i, &p) in points.iter().enumerate() {
            if std::mem::replace(&mut moved[p], true) {
                return Err(parse_err(line, format!("point {p} appears twice")));
            }
            perm[p] = points[(i + 1) % points.len()];
        }
    }
    Ok(perm)
}

pub fn parse_marked_group(text: &str) -> Result<FiniteMarkedGroup> {
    let last = text.lines().count().max(1);
    let mut lines = significant_lines(text);
    let mut expect = |kw: &str| -> Result<(usize, Vec<String>)> {
        let (line, tokens) = lines
            .next()
            .ok_or_else(|| parse_err(last, format!("expected `{kw}` line")))?;
        if tokens[0] != kw {
            return Err(parse_err(line, format!("expected `{kw}`, found `{}`", tokens[0])));
        }
        Ok((line, tokens[1..].iter().map(|s| s.to_string()).collect()))
    };
    let (line, name) = expect("group")?;
    let [name] = &name[..] else {
        return Err(parse_err(line, "`group` takes exactly one name"));
    };
    let (line, order) = expect("order")?;
    let n = match &order[..] {
        [n] => n.parse::<usize>().ok().filter(|&n| n > 0),
        _ => None,
    }
    .ok_or_else(|| parse_err(line, "`order` takes one positive integer"))?;
    let name = name.clone();

    let mut letters = Vec::new();
    let mut perms = Vec::new();
    for (line, tokens) in lines {
        if tokens[0] != "gen" || tokens.len() < 3 {
            return Err(parse_err(line, "expected `gen <letter> <permutation>`"));
        }
        if letters.iter().any(|l| l == tokens[1]) {
            return Err(parse_err(line, format!("duplicate generator `{}`", tokens[1])));
        }
        letters.push(tokens[1].to_string());
        perms.push(parse_permutation(line, &tokens[2..], n)?);
    }
    if letters.is_empty() {
        return Err(parse_err(last, "no `gen` lines"));
    }
    FiniteMarkedGroup::new(name, letters, perms)
}

pub fn write_marked_group(g: &FiniteMarkedGroup) -> String {
    let mut out = format!("group {}\norder {}\n", g.name, g.order());
    for (a, p) in g.perms.iter().enumerate() {
        let _ = writeln!(out, "gen {} {}", g.alphabet[a], p.iter().join(" "));
    }
    out
}

/// Why an automaton fails to normalize `ker(φ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum IncompatibilityWitness {
    /// `q̂·k` leaves the kernel.
    ImageOutsideKernel { state: String, kernel_word: String, image: String },
    /// `q̂ k = (q̂·k) h` with `h ≠ q̂` in `G_M`, so `q̂ k q̂⁻¹` is not a letter word.
    ResidualMoved { state: String, kernel_word: String, residual: String },
}

impl std::fmt::Display for IncompatibilityWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::ImageOutsideKernel { state, kernel_word, image } => {
                write!(f, "{state} maps kernel word {kernel_word} to {image}, outside the kernel")
            }
            Self::ResidualMoved { state, kernel_word, residual } => write!(
                f,
                "{state} reading kernel word {kernel_word} leaves residual {residual}, which differs from {state} in the group"
            ),
        }
    }
}

/// Checks that `ker(φ)` is normal in `π₁(M)/N_Q`.
///
/// For each signed state `q̂` and each Schreier generator `k` and its
/// inverse: `q̂·k ∈ ker(φ)`, and the residual of `q̂` after `k` equals `q̂`
/// in `G_M`. Residuation keeps single signed states single, so these
/// conditions propagate to all of `ker(φ)`.
pub fn is_compatible(m: &MealyAutomaton, w: &FiniteMarkedGroup) -> Result<Option<IncompatibilityWitness>> {
    let w = w.aligned_to(m)?;
    let gens = Generators::new(m)?;
    let kernel = w.kernel_generators();
    for code in 0..2 * m.num_states() {
        let q = Signed::from_code(code);
        let qw: SignedWord = [q].into_iter().collect();
        for k in kernel.iter().flat_map(|k| [k.clone(), k.inverse()]) {
            let image = act_state_on_word(m, &qw, &k)?;
            if !w.in_kernel(&image) {
                return Ok(Some(IncompatibilityWitness::ImageOutsideKernel {
                    state: m.render_states(qw.as_slice()),
                    kernel_word: m.render_letters(k.as_slice()),
                    image: m.render_letters(image.as_slice()),
                }));
            }
            let h = residual(m, &qw, &k)?;
            if gens.key_of(&h).0 != *gens.key(q) {
                return Ok(Some(IncompatibilityWitness::ResidualMoved {
                    state: m.render_states(qw.as_slice()),
                    kernel_word: m.render_letters(k.as_slice()),
                    residual: m.render_states(h.as_slice()),
                }));
            }
        }
    }
    Ok(None)
}

fn require_compatible(m: &MealyAutomaton, w: &FiniteMarkedGroup) -> Result<FiniteMarkedGroup> {
    if let Some(witness) = is_compatible(m, w)? {
        return Err(Error::Incompatible(witness.to_string()));
    }
    w.aligned_to(m)
}

/// The oriented multigraph `ker(φ)\T_A`: one edge `x → x·a` per vertex and
/// letter, with edge index `x·|A| + a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    name: String,
    letters: Vec<String>,
    targets: Vec<usize>,
}

impl QuotientGraph {
    pub fn build(w: &FiniteMarkedGroup) -> Self {
        let k = w.alphabet.len();
        let targets = (0..w.order() * k).map(|e| w.perms[e % k][e / k]).collect();
        QuotientGraph {
            name: w.name.clone(),
            letters: w.alphabet.iter().cloned().collect(),
            targets,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.targets.len() / self.letters.len()
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn source(&self, edge: usize) -> usize {
        edge / self.letters.len()
    }

    pub fn target(&self, edge: usize) -> usize {
        self.targets[edge]
    }

    pub fn label(&self, edge: usize) -> &str {
        &self.letters[edge % self.letters.len()]
    }

    /// Edges from `x` to `y` in increasing index order.
    pub fn edges_between(&self, x: usize, y: usize) -> Vec<usize> {
        let k = self.letters.len();
        (x * k..(x + 1) * k).filter(|&e| self.targets[e] == y).collect()
    }

    fn multiplicities(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut mult = vec![vec![0; n]; n];
        for e in 0..self.num_edges() {
            mult[self.source(e)][self.target(e)] += 1;
        }
        mult
    }

    /// Graphviz rendering with vertices ascending and edges by index.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph \"{}\" {{\n", self.name.replace('"', "\\\""));
        for x in 0..self.num_vertices() {
            let _ = writeln!(out, "  {x};");
        }
        for e in 0..self.num_edges() {
            let label = self.label(e).replace('"', "\\\"");
            let _ = writeln!(out, "  {} -> {} [label=\"{label}\"];", self.source(e), self.target(e));
        }
        out.push_str("}\n");
        out
    }
}

/// An orientation-preserving automorphism of a quotient graph, as maps on
/// vertices and on edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GraphAutomorphism {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

impl GraphAutomorphism {
    pub fn identity(x: &QuotientGraph) -> Self {
        GraphAutomorphism {
            vertex_map: (0..x.num_vertices()).collect(),
            edge_map: (0..x.num_edges()).collect(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &GraphAutomorphism) -> Self {
        GraphAutomorphism {
            vertex_map: other.vertex_map.iter().map(|&v| self.vertex_map[v]).collect(),
            edge_map: other.edge_map.iter().map(|&e| self.edge_map[e]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, &v)| i == v)
            && self.edge_map.iter().enumerate().all(|(i, &e)| i == e)
    }

    /// Bijective on vertices and edges, and incidence-preserving.
    pub fn is_automorphism_of(&self, x: &QuotientGraph) -> bool {
        let bijective = |map: &[usize], n: usize| {
            map.len() == n && map.iter().collect::<HashSet<_>>().len() == n && map.iter().all(|&i| i < n)
        };
        bijective(&self.vertex_map, x.num_vertices())
            && bijective(&self.edge_map, x.num_edges())
            && (0..x.num_edges()).all(|e| {
                let f = self.edge_map[e];
                x.source(f) == self.vertex_map[x.source(e)] && x.target(f) == self.vertex_map[x.target(e)]
            })
    }
}

/// The automorphism `ζ_φ(ψ(u))` of `ker(φ)\T_A`.
///
/// Vertex `x` goes to `φ(u·t_x)`. The edge `(x, a)` goes to the edge
/// leaving that vertex labelled by the last letter of `u·(t_x a)`.
pub fn descend_automorphism(m: &MealyAutomaton, w: &FiniteMarkedGroup, u: &SignedWord) -> Result<GraphAutomorphism> {
    let w = require_compatible(m, w)?;
    descend_unchecked(m, &w, u)
}

fn descend_unchecked(m: &MealyAutomaton, w: &FiniteMarkedGroup, u: &SignedWord) -> Result<GraphAutomorphism> {
    m.check_state_word(u)?;
    let k = w.alphabet.len();
    let n = w.order();
    let mut vertex_map = vec![0; n];
    let mut edge_map = vec![0; n * k];
    for (x, t) in w.transversal.iter().enumerate() {
        let image = act_state_on_word(m, u, t)?;
        let fx = w.evaluate(&image);
        vertex_map[x] = fx;
        for a in 0..k {
            let mut path = t.clone();
            path.push(Signed::pos(a));
            let path_image = act_state_on_word(m, u, &path)?;
            let last = *path_image.as_slice().last().expect("non-empty path");
            debug_assert!(last.is_positive());
            edge_map[x * k + a] = fx * k + last.index;
        }
    }
    Ok(GraphAutomorphism { vertex_map, edge_map })
}

/// All orientation-preserving automorphisms fixing vertex `0`, in
/// increasing order.
pub fn aut1_search(x: &QuotientGraph, vertex_cap: usize) -> Result<Vec<GraphAutomorphism>> {
    let n = x.num_vertices();
    if n > vertex_cap {
        return Err(Error::CapExceeded { vertices: n, cap: vertex_cap });
    }
    let mult = x.multiplicities();

    // assign vertices in BFS order of the underlying graph
    let mut order = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for y in 0..n {
            if !seen[y] && (mult[v][y] > 0 || mult[y][v] > 0) {
                seen[y] = true;
                order.push(y);
            }
        }
        i += 1;
    }
    debug_assert_eq!(order.len(), n, "quotient graphs are connected");

    let mut vertex_maps = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[0] = 0;
    used[0] = true;
    extend_vertex_map(&mult, &order, 1, &mut map, &mut used, &mut vertex_maps);

    let mut result = Vec::new();
    for vmap in vertex_maps {
        let pairs: Vec<(Vec<usize>, Vec<usize>)> = (0..n)
            .cartesian_product(0..n)
            .filter(|&(a, b)| mult[a][b] > 0)
            .map(|(a, b)| (x.edges_between(a, b), x.edges_between(vmap[a], vmap[b])))
            .collect();
        let choices = pairs
            .iter()
            .map(|(_, targets)| targets.iter().copied().permutations(targets.len()))
            .multi_cartesian_product();
        for choice in choices {
            let mut edge_map = vec![0; x.num_edges()];
            for ((sources, _), images) in pairs.iter().zip(&choice) {
                for (&e, &f) in sources.iter().zip(images) {
                    edge_map[e] = f;
                }
            }
            if result.len() == RESULT_CAP {
                return Err(Error::TooManyResults { cap: RESULT_CAP });
            }
            result.push(GraphAutomorphism {
                vertex_map: vmap.clone(),
                edge_map,
            });
        }
    }
    result.sort();
    Ok(result)
}

fn extend_vertex_map(
    mult: &[Vec<usize>],
    order: &[usize],
    depth: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    if depth == order.len() {
        out.push(map.clone());
        return;
    }
    let v = order[depth];
    for image in 0..mult.len() {
        if used[image] {
            continue;
        }
        let consistent = mult[v][v] == mult[image][image]
            && order[..depth].iter().all(|&w| {
                mult[v][w] == mult[image][map[w]] && mult[w][v] == mult[map[w]][image]
            });
        if consistent {
            map[v] = image;
            used[image] = true;
            extend_vertex_map(mult, order, depth + 1, map, used, out);
            used[image] = false;
            map[v] = usize::MAX;
        }
    }
}

/// Outcome of checking that automaton automorphisms of `X` lie in `Aut₁(X)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MnsReport {
    pub automaton: String,
    pub group: String,
    pub vertices: usize,
    /// Radius of the ball of `G_M` whose elements were descended.
    pub radius: usize,
    /// Distinct automorphisms descended from that ball.
    pub descended: usize,
    /// Order of the subgroup generated by the descended generators.
    pub descended_group: usize,
    pub aut1: usize,
    pub contained: bool,
}

/// Descends the elements of the radius-`radius` ball of `G_M` to `X`,
/// closes the generator images under composition, and checks the result
/// sits inside `Aut₁(X)`.
pub fn verify_mns_instance(
    m: &MealyAutomaton,
    w: &FiniteMarkedGroup,
    radius: usize,
    vertex_cap: usize,
) -> Result<MnsReport> {
    let w = require_compatible(m, w)?;
    let x = QuotientGraph::build(&w);
    let aut1: HashSet<GraphAutomorphism> = aut1_search(&x, vertex_cap)?.into_iter().collect();

    let mut search = BallSearch::new(m, Budget::default())?;
    while search.radius() < radius {
        match search.step() {
            Step::Grew(_) => {}
            Step::Closed => break,
            Step::Exhausted => return Err(Error::Invalid("ball budget exhausted".into())),
        }
    }
    let descended = search
        .elements()
        .map(|(_, word)| descend_unchecked(m, &w, word))
        .collect::<Result<HashSet<_>>>()?;

    let gens = (0..2 * m.num_states())
        .map(|c| descend_unchecked(m, &w, &[Signed::from_code(c)].into_iter().collect()))
        .collect::<Result<Vec<_>>>()?;
    let closure = close_under_composition(&x, &gens);

    Ok(MnsReport {
        automaton: m.name().to_string(),
        group: w.name.clone(),
        vertices: x.num_vertices(),
        radius: search.radius(),
        descended: descended.len(),
        descended_group: closure.len(),
        aut1: aut1.len(),
        contained: descended.iter().chain(&closure).all(|f| aut1.contains(f)),
    })
}

fn close_under_composition(x: &QuotientGraph, gens: &[GraphAutomorphism]) -> Vec<GraphAutomorphism> {
    let id = GraphAutomorphism::identity(x);
    let mut seen = HashSet::from([id.clone()]);
    let mut list = vec![id];
    let mut i = 0;
    while i < list.len() {
        for g in gens {
            let next = list[i].compose(g);
            if seen.insert(next.clone()) {
                list.push(next);
            }
        }
        i += 1;
    }
    list
}
