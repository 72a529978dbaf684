//! The 27-vertex digraph on triples (x, y, z): two adjacent SG values and the
//! value their division moves share, stepped one block forward.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::{mex, SgTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triple {
    pub x: u8,
    pub y: u8,
    pub z: u8,
}

impl Triple {
    pub fn new(x: u8, y: u8, z: u8) -> Result<Self> {
        if x > 2 || y > 2 || z > 2 {
            return Err(Error::Config(format!("triple ({x},{y},{z}) has a component above 2")));
        }
        Ok(Triple { x, y, z })
    }

    fn index(self) -> usize {
        9 * self.x as usize + 3 * self.y as usize + self.z as usize
    }

    fn label(self) -> String {
        format!("{}{}{}", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone)]
pub struct TripleDigraph {
    vertices: Vec<Triple>,
    edges: Vec<(Triple, Triple)>,
    adj: Vec<Vec<Triple>>,
}

impl TripleDigraph {
    pub fn vertices(&self) -> &[Triple] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(Triple, Triple)] {
        &self.edges
    }

    pub fn out_neighbors(&self, v: Triple) -> Vec<Triple> {
        self.adj[v.index()].clone()
    }

    /// Adds an edge outside the rule (for negative controls).
    pub fn add_edge(&mut self, from: Triple, to: Triple) {
        self.edges.push((from, to));
        self.adj[from.index()].push(to);
    }
}

/// (x, y, z) -> (mex{x, z}, mex{y, z}, z') for every z'.
pub fn build() -> TripleDigraph {
    let mut vertices = Vec::with_capacity(27);
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                vertices.push(Triple { x, y, z });
            }
        }
    }
    let mut adj = vec![Vec::new(); 27];
    let mut edges = Vec::with_capacity(81);
    for &v in &vertices {
        for z in 0..3 {
            let w = Triple { x: mex([v.x, v.z]), y: mex([v.y, v.z]), z };
            edges.push((v, w));
            adj[v.index()].push(w);
        }
    }
    TripleDigraph { vertices, edges, adj }
}

/// Vertices with x != y all of whose successors have x = y.
pub fn sinks(dg: &TripleDigraph) -> BTreeSet<Triple> {
    dg.vertices.iter().copied().filter(|v| v.x != v.y && dg.adj[v.index()].iter().all(|w| w.x == w.y)).collect()
}

fn interior(dg: &TripleDigraph) -> BTreeSet<Triple> {
    let s = sinks(dg);
    dg.vertices.iter().copied().filter(|v| v.x != v.y && !s.contains(v)).collect()
}

/// Edges between non-sink x != y vertices going from the z = 0 layer to a
/// z != 0 vertex.
pub fn layer_violations(dg: &TripleDigraph) -> Vec<(Triple, Triple)> {
    let inner = interior(dg);
    dg.edges.iter().copied().filter(|(u, w)| inner.contains(u) && inner.contains(w) && u.z == 0 && w.z != 0).collect()
}

pub fn layer_check(dg: &TripleDigraph) -> bool {
    layer_violations(dg).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EscapeReport {
    pub zero_cap: Option<u64>,
    pub nonzero_cap: Option<u64>,
    pub escapes: bool,
    /// Most x != y vertices a capped walk can visit; `None` when unbounded.
    pub longest_bad_walk: Option<u64>,
    pub step_bound: Option<u64>,
}

/// A vertex paired with its current run counter.
type State = (Triple, u64);

/// Whether every walk over x != y vertices, with runs of z = 0 at most
/// `zero_cap` long and runs of z != 0 at most `nonzero_cap` long, reaches an
/// x = y vertex within (zero_cap + nonzero_cap + 2) * 27 steps. `None` means
/// no cap.
pub fn bounded_escape(dg: &TripleDigraph, zero_cap: Option<u64>, nonzero_cap: Option<u64>) -> EscapeReport {
    let cap = |z: u8| if z == 0 { zero_cap } else { nonzero_cap };
    let step_bound = zero_cap.zip(nonzero_cap).map(|(a, b)| (a + b + 2) * 27);
    // State: vertex and the length of the current z run (1 when uncapped).
    let succ = |(v, r): (Triple, u64)| -> Vec<(Triple, u64)> {
        dg.adj[v.index()]
            .iter()
            .filter(|w| w.x != w.y)
            .filter_map(|&w| {
                let run = if (w.z == 0) == (v.z == 0) { r + 1 } else { 1 };
                match cap(w.z) {
                    None => Some((w, 1)),
                    Some(c) if run <= c => Some((w, run)),
                    Some(_) => None,
                }
            })
            .collect()
    };
    let starts: Vec<(Triple, u64)> = dg.vertices.iter().copied().filter(|v| v.x != v.y).map(|v| (v, 1)).collect();

    // Longest path by DFS with memo; a grey state on the stack means a cycle.
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Grey,
        Done(u64),
    }
    let mut marks: HashMap<(Triple, u64), Mark> = HashMap::new();
    let mut longest = 0u64;
    let mut cyclic = false;
    for &s in &starts {
        if marks.contains_key(&s) {
            if let Some(Mark::Done(l)) = marks.get(&s) {
                longest = longest.max(*l);
            }
            continue;
        }
        // Iterative post-order DFS.
        // (product state, its successors, next successor to visit)
        let mut stack: Vec<(State, Vec<State>, usize)> = vec![(s, succ(s), 0)];
        marks.insert(s, Mark::Grey);
        while let Some((state, next, i)) = stack.last_mut() {
            if *i < next.len() {
                let w = next[*i];
                *i += 1;
                match marks.get(&w) {
                    Some(Mark::Grey) => cyclic = true,
                    Some(Mark::Done(_)) => {}
                    None => {
                        marks.insert(w, Mark::Grey);
                        let nw = succ(w);
                        stack.push((w, nw, 0));
                    }
                }
            } else {
                let best = next
                    .iter()
                    .filter_map(|w| match marks.get(w) {
                        Some(Mark::Done(l)) => Some(*l),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(0);
                let st = *state;
                marks.insert(st, Mark::Done(best + 1));
                stack.pop();
            }
        }
        if let Some(Mark::Done(l)) = marks.get(&s) {
            longest = longest.max(*l);
        }
    }
    if cyclic {
        return EscapeReport { zero_cap, nonzero_cap, escapes: false, longest_bad_walk: None, step_bound };
    }
    let escapes = step_bound.is_some_and(|b| longest <= b);
    EscapeReport { zero_cap, nonzero_cap, escapes, longest_bad_walk: Some(longest), step_bound }
}

/// Graphviz text with vertices labelled "xyz".
pub fn to_dot(dg: &TripleDigraph) -> String {
    let s = sinks(dg);
    let mut out = String::from("digraph triples {\n");
    for v in &dg.vertices {
        let style = if v.x == v.y {
            ", style=filled, fillcolor=lightgrey"
        } else if s.contains(v) {
            ", shape=doublecircle"
        } else {
            ""
        };
        let _ = writeln!(out, "  \"{}\" [label=\"{}\"{}];", v.label(), v.label(), style);
    }
    for (u, w) in &dg.edges {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", u.label(), w.label());
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkReport {
    pub g: u64,
    pub transitions: u64,
    pub non_edges: u64,
    /// Block end g k of the first observed step that is not an edge.
    pub first_non_edge: Option<u64>,
    /// Longest run of zero (resp. nonzero) z values seen before a walk first
    /// reaches x = y.
    pub max_zero_run: u64,
    pub max_nonzero_run: u64,
    /// Most x != y triples visited by one walk before x = y.
    pub max_steps_to_equal: u64,
}

/// Reads triples (SG(gk-1), SG(gk), SG(ceil((gk+a)/b))) from the table and
/// checks that stepping k by a/g always follows an edge of the digraph.
pub fn walk_check(table: &SgTable, g: u64) -> Result<WalkReport> {
    let (a, b) = (table.spec().a, table.spec().b);
    if g < 2 || a % g != 0 || b % g != 0 {
        return Err(Error::Precondition(format!("g = {g} must be at least 2 and divide a = {a} and b = {b}")));
    }
    let dg = build();
    let n_max = table.n_max();
    let triple = |k: u64| Triple { x: table.at(g * k - 1), y: table.at(g * k), z: table.at((g * k + a).div_ceil(b)) };
    let step = a / g;
    let mut r = WalkReport {
        g,
        transitions: 0,
        non_edges: 0,
        first_non_edge: None,
        max_zero_run: 0,
        max_nonzero_run: 0,
        max_steps_to_equal: 0,
    };
    for k0 in 1..=step {
        let mut k = k0;
        let mut prefix = true;
        let mut steps = 0u64;
        let mut run = (0u64, false);
        while g * (k + step) + a <= n_max {
            let u = triple(k);
            if prefix {
                if u.x == u.y {
                    prefix = false;
                } else {
                    steps += 1;
                    let zero = u.z == 0;
                    run = if steps > 1 && run.1 == zero { (run.0 + 1, zero) } else { (1, zero) };
                    if zero {
                        r.max_zero_run = r.max_zero_run.max(run.0);
                    } else {
                        r.max_nonzero_run = r.max_nonzero_run.max(run.0);
                    }
                }
            }
            let v = triple(k + step);
            r.transitions += 1;
            if !dg.adj[u.index()].contains(&v) {
                r.non_edges += 1;
                r.first_non_edge.get_or_insert(g * k);
            }
            k += step;
        }
        r.max_steps_to_equal = r.max_steps_to_equal.max(steps);
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockgraphReport {
    pub vertices: usize,
    pub edges: usize,
    pub uniform_out_degree: bool,
    pub sinks: Vec<Triple>,
    pub sinks_as_expected: bool,
    pub layer_check: bool,
    pub escape: Vec<EscapeReport>,
    pub unbounded_escapes: bool,
    pub passed: bool,
}

/// The six sinks the inevitability argument lists.
pub const EXPECTED_SINKS: [(u8, u8, u8); 6] = [(1, 2, 1), (1, 2, 2), (2, 1, 1), (2, 1, 2), (0, 2, 0), (2, 0, 0)];

/// All structural checks, with escape caps (2d, 4d^2) for d = 1..=max_d.
pub fn verify(max_d: u64) -> BlockgraphReport {
    let dg = build();
    let s = sinks(&dg);
    let expected: BTreeSet<Triple> = EXPECTED_SINKS.iter().map(|&(x, y, z)| Triple { x, y, z }).collect();
    let escape: Vec<EscapeReport> = (1..=max_d).map(|d| bounded_escape(&dg, Some(2 * d), Some(4 * d * d))).collect();
    let unbounded = bounded_escape(&dg, None, None).escapes;
    let uniform = dg.vertices.iter().all(|v| dg.adj[v.index()].len() == 3);
    let layer = layer_check(&dg);
    let passed = dg.vertices.len() == 27
        && dg.edges.len() == 81
        && uniform
        && s == expected
        && layer
        && escape.iter().all(|e| e.escapes)
        && !unbounded;
    BlockgraphReport {
        vertices: dg.vertices.len(),
        edges: dg.edges.len(),
        uniform_out_degree: uniform,
        sinks_as_expected: s == expected,
        sinks: s.into_iter().collect(),
        layer_check: layer,
        escape,
        unbounded_escapes: unbounded,
        passed,
    }
}
