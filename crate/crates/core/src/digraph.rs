//! Directed multigraphs with optional vertex decorations and labeled external
//! legs: the shared substrate for operad graphs, graph-complex graphs and
//! properad graphs.
//!
//! Canonical forms are computed by iterative color refinement plus
//! individualization backtracking; the sign of a canonical form is the parity
//! of the vertex relabeling (vertices carry odd internal degree in every
//! complex built on top of this module, edges are even).

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::rational::perm_sign;

/// Per-vertex decoration. Corolla-style users fill all three fields
/// (`m` outputs, `n` inputs, `a` weight); weight-only users leave `m = n = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexDec {
    pub m: u32,
    pub n: u32,
    pub a: u32,
}

impl VertexDec {
    pub fn weight(a: u32) -> Self {
        VertexDec { m: 0, n: 0, a }
    }
    pub fn corolla(m: u32, n: u32, a: u32) -> Self {
        VertexDec { m, n, a }
    }
}

impl fmt::Display for VertexDec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 0 && self.n == 0 {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}.{}.{}", self.m, self.n, self.a)
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop {0}->{0} not allowed in an acyclic graph")]
    SelfLoop(usize),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("duplicate leg label {0}")]
    DuplicateLegLabel(u32),
    #[error("parse error in graph text: {0}")]
    Parse(String),
}

/// A directed multigraph with optional decorations and labeled legs.
///
/// Edges form a multiset of ordered pairs kept sorted; legs are
/// `(vertex, label)` attachments with distinct labels within each list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DirectedMultigraph {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub decorations: Option<Vec<VertexDec>>,
    pub in_legs: Vec<(usize, u32)>,
    pub out_legs: Vec<(usize, u32)>,
}

/// Canonical form together with the relabeling that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedCanonicalForm {
    pub canonical_graph: DirectedMultigraph,
    /// `relabeling[old] = new`
    pub relabeling: Vec<usize>,
    pub sign: i32,
}

impl DirectedMultigraph {
    pub fn new(n_vertices: usize) -> Self {
        DirectedMultigraph {
            n_vertices,
            ..Default::default()
        }
    }

    pub fn with_edges(n_vertices: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n_vertices);
        for &(u, v) in edges {
            g.add_edge(u, v).expect("valid edge");
        }
        g
    }

    pub fn add_edge(&mut self, src: usize, dst: usize) -> Result<(), GraphError> {
        if src >= self.n_vertices {
            return Err(GraphError::VertexOutOfRange(src));
        }
        if dst >= self.n_vertices {
            return Err(GraphError::VertexOutOfRange(dst));
        }
        if src == dst {
            return Err(GraphError::SelfLoop(src));
        }
        let pos = self.edges.partition_point(|e| *e <= (src, dst));
        self.edges.insert(pos, (src, dst));
        Ok(())
    }

    pub fn set_decorations(&mut self, decs: Vec<VertexDec>) {
        assert_eq!(decs.len(), self.n_vertices);
        self.decorations = Some(decs);
    }

    pub fn attach_out_leg(&mut self, vertex: usize, label: u32) -> Result<(), GraphError> {
        if vertex >= self.n_vertices {
            return Err(GraphError::VertexOutOfRange(vertex));
        }
        if self.out_legs.iter().any(|(_, l)| *l == label) {
            return Err(GraphError::DuplicateLegLabel(label));
        }
        self.out_legs.push((vertex, label));
        self.out_legs.sort_by_key(|(_, l)| *l);
        Ok(())
    }

    pub fn attach_in_leg(&mut self, vertex: usize, label: u32) -> Result<(), GraphError> {
        if vertex >= self.n_vertices {
            return Err(GraphError::VertexOutOfRange(vertex));
        }
        if self.in_legs.iter().any(|(_, l)| *l == label) {
            return Err(GraphError::DuplicateLegLabel(label));
        }
        self.in_legs.push((vertex, label));
        self.in_legs.sort_by_key(|(_, l)| *l);
        Ok(())
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(s, _)| *s == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(_, t)| *t == v).count()
    }

    /// True iff the graph contains no directed cycle (multiplicities are
    /// irrelevant; a self-loop would be a cycle of length one but is already
    /// rejected at construction).
    pub fn is_acyclic(&self) -> bool {
        let mut indeg = vec![0usize; self.n_vertices];
        for &(_, t) in &self.edges {
            indeg[t] += 1;
        }
        let mut stack: Vec<usize> = (0..self.n_vertices).filter(|v| indeg[*v] == 0).collect();
        let mut seen = 0usize;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &(s, t) in &self.edges {
                if s == v {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        stack.push(t);
                    }
                }
            }
        }
        seen == self.n_vertices
    }

    /// True iff the underlying undirected graph is connected. Legs hang off
    /// their vertex and do not affect connectivity.
    pub fn connected(&self) -> bool {
        if self.n_vertices == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n_vertices];
        for &(s, t) in &self.edges {
            adj[s].push(t);
            adj[t].push(s);
        }
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1usize;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n_vertices
    }

    fn initial_colors(&self) -> Vec<u64> {
        let mut keys: Vec<(VertexDec, Vec<u32>, Vec<u32>)> = Vec::with_capacity(self.n_vertices);
        for v in 0..self.n_vertices {
            let dec = self
                .decorations
                .as_ref()
                .map(|d| d[v])
                .unwrap_or(VertexDec::weight(0));
            let mut outs: Vec<u32> = self
                .out_legs
                .iter()
                .filter(|(w, _)| *w == v)
                .map(|(_, l)| *l)
                .collect();
            outs.sort_unstable();
            let mut ins: Vec<u32> = self
                .in_legs
                .iter()
                .filter(|(w, _)| *w == v)
                .map(|(_, l)| *l)
                .collect();
            ins.sort_unstable();
            keys.push((dec, outs, ins));
        }
        assign_color_ids(&keys)
    }

    fn refine_colors(&self, mut colors: Vec<u64>) -> Vec<u64> {
        loop {
            let mut keys: Vec<(u64, Vec<(u64, usize)>, Vec<(u64, usize)>)> =
                Vec::with_capacity(self.n_vertices);
            for v in 0..self.n_vertices {
                let mut outs: BTreeMap<u64, usize> = BTreeMap::new();
                let mut ins: BTreeMap<u64, usize> = BTreeMap::new();
                for &(s, t) in &self.edges {
                    if s == v {
                        *outs.entry(colors[t]).or_insert(0) += 1;
                    }
                    if t == v {
                        *ins.entry(colors[s]).or_insert(0) += 1;
                    }
                }
                keys.push((
                    colors[v],
                    outs.into_iter().collect(),
                    ins.into_iter().collect(),
                ));
            }
            let new_colors = assign_color_ids(&keys);
            if new_colors == colors {
                return colors;
            }
            colors = new_colors;
        }
    }

    fn certificate(&self, ordering: &[usize]) -> DirectedMultigraph {
        // ordering[new] = old
        let mut perm = vec![0usize; self.n_vertices];
        for (new, &old) in ordering.iter().enumerate() {
            perm[old] = new;
        }
        self.relabeled(&perm)
    }

    /// Relabel vertices: `perm[old] = new`.
    pub fn relabeled(&self, perm: &[usize]) -> DirectedMultigraph {
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(s, t)| (perm[s], perm[t]))
            .collect();
        edges.sort_unstable();
        let decorations = self.decorations.as_ref().map(|decs| {
            let mut out = vec![VertexDec::weight(0); self.n_vertices];
            for (old, d) in decs.iter().enumerate() {
                out[perm[old]] = *d;
            }
            out
        });
        let mut in_legs: Vec<(usize, u32)> = self
            .in_legs
            .iter()
            .map(|&(v, l)| (perm[v], l))
            .collect();
        in_legs.sort_by_key(|(_, l)| *l);
        let mut out_legs: Vec<(usize, u32)> = self
            .out_legs
            .iter()
            .map(|&(v, l)| (perm[v], l))
            .collect();
        out_legs.sort_by_key(|(_, l)| *l);
        DirectedMultigraph {
            n_vertices: self.n_vertices,
            edges,
            decorations,
            in_legs,
            out_legs,
        }
    }

    /// All vertex orderings whose relabeled graph attains the canonical
    /// (lexicographically minimal) certificate. Two such orderings differ by
    /// an automorphism, so the full list encodes the automorphism group.
    fn canonical_orderings(&self) -> (DirectedMultigraph, Vec<Vec<usize>>) {
        let colors = self.refine_colors(self.initial_colors());
        let mut best: Option<DirectedMultigraph> = None;
        let mut orderings: Vec<Vec<usize>> = Vec::new();
        self.search_orderings(colors, &mut best, &mut orderings);
        (best.expect("at least one ordering"), orderings)
    }

    fn search_orderings(
        &self,
        colors: Vec<u64>,
        best: &mut Option<DirectedMultigraph>,
        orderings: &mut Vec<Vec<usize>>,
    ) {
        // Find the first color class with more than one vertex.
        let mut by_color: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (v, c) in colors.iter().enumerate() {
            by_color.entry(*c).or_default().push(v);
        }
        if let Some((_, class)) = by_color.iter().find(|(_, vs)| vs.len() > 1) {
            let class = class.clone();
            for v in class {
                let mut next = colors.clone();
                // Individualize v: strictly below its class, above everything
                // smaller. Doubling with offset leaves room for the new color.
                for c in next.iter_mut() {
                    *c = *c * 2 + 2;
                }
                next[v] -= 1;
                let next = self.refine_colors(next);
                self.search_orderings(next, best, orderings);
            }
            return;
        }
        // Discrete coloring: the ordering is determined.
        let mut ordering: Vec<usize> = (0..self.n_vertices).collect();
        ordering.sort_by_key(|v| colors[*v]);
        let cert = self.certificate(&ordering);
        match best {
            None => {
                *best = Some(cert);
                orderings.push(ordering);
            }
            Some(b) => {
                if cert < *b {
                    *best = Some(cert);
                    orderings.clear();
                    orderings.push(ordering);
                } else if cert == *b {
                    orderings.push(ordering);
                }
            }
        }
    }

    /// Canonical labeling with the sign of the vertex relabeling.
    pub fn canonical_form(&self) -> SignedCanonicalForm {
        let (canonical_graph, orderings) = self.canonical_orderings();
        let ordering = &orderings[0];
        let mut relabeling = vec![0usize; self.n_vertices];
        for (new, &old) in ordering.iter().enumerate() {
            relabeling[old] = new;
        }
        let sign = perm_sign(&relabeling);
        SignedCanonicalForm {
            canonical_graph,
            relabeling,
            sign,
        }
    }

    /// All automorphisms (as permutations `perm[v] = image of v`) fixing
    /// decorations and legs pointwise.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let (_, orderings) = self.canonical_orderings();
        let base = &orderings[0];
        let mut base_inv = vec![0usize; self.n_vertices];
        for (new, &old) in base.iter().enumerate() {
            base_inv[old] = new;
        }
        orderings
            .iter()
            .map(|o| {
                // automorphism = o ∘ base^{-1}
                let mut perm = vec![0usize; self.n_vertices];
                for v in 0..self.n_vertices {
                    perm[v] = o[base_inv[v]];
                }
                perm
            })
            .collect()
    }

    /// True iff some automorphism induces an odd vertex permutation, which
    /// identifies the skew-symmetrized graph with zero.
    pub fn odd_automorphism_vanishes(&self) -> bool {
        self.automorphisms()
            .iter()
            .any(|p| perm_sign(p) == -1)
    }

    /// One-line text format:
    /// `V=<n>; D=<d0,...>; E=<s>-><t>,...; IN=<v:label,...>; OUT=<v:label,...>`
    /// Sections other than `V` are omitted when empty.
    pub fn to_text(&self) -> String {
        let mut parts = vec![format!("V={}", self.n_vertices)];
        if let Some(decs) = &self.decorations {
            let body: Vec<String> = decs.iter().map(|d| d.to_string()).collect();
            parts.push(format!("D={}", body.join(",")));
        }
        if !self.edges.is_empty() {
            let body: Vec<String> = self
                .edges
                .iter()
                .map(|(s, t)| format!("{}->{}", s, t))
                .collect();
            parts.push(format!("E={}", body.join(",")));
        }
        if !self.in_legs.is_empty() {
            let body: Vec<String> = self
                .in_legs
                .iter()
                .map(|(v, l)| format!("{}:{}", v, l))
                .collect();
            parts.push(format!("IN={}", body.join(",")));
        }
        if !self.out_legs.is_empty() {
            let body: Vec<String> = self
                .out_legs
                .iter()
                .map(|(v, l)| format!("{}:{}", v, l))
                .collect();
            parts.push(format!("OUT={}", body.join(",")));
        }
        parts.join("; ")
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut g: Option<DirectedMultigraph> = None;
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, body) = part
                .split_once('=')
                .ok_or_else(|| GraphError::Parse(format!("missing '=': {part:?}")))?;
            match key.trim() {
                "V" => {
                    let n = body
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| GraphError::Parse(format!("bad vertex count {body:?}")))?;
                    g = Some(DirectedMultigraph::new(n));
                }
                "D" => {
                    let g = g
                        .as_mut()
                        .ok_or_else(|| GraphError::Parse("D before V".into()))?;
                    let mut decs = Vec::new();
                    for tok in body.split(',') {
                        let tok = tok.trim();
                        let fields: Vec<&str> = tok.split('.').collect();
                        let dec = match fields.as_slice() {
                            [a] => VertexDec::weight(
                                a.parse()
                                    .map_err(|_| GraphError::Parse(format!("bad dec {tok:?}")))?,
                            ),
                            [m, n, a] => VertexDec::corolla(
                                m.parse()
                                    .map_err(|_| GraphError::Parse(format!("bad dec {tok:?}")))?,
                                n.parse()
                                    .map_err(|_| GraphError::Parse(format!("bad dec {tok:?}")))?,
                                a.parse()
                                    .map_err(|_| GraphError::Parse(format!("bad dec {tok:?}")))?,
                            ),
                            _ => return Err(GraphError::Parse(format!("bad dec {tok:?}"))),
                        };
                        decs.push(dec);
                    }
                    if decs.len() != g.n_vertices {
                        return Err(GraphError::Parse("decoration count mismatch".into()));
                    }
                    g.set_decorations(decs);
                }
                "E" => {
                    let g = g
                        .as_mut()
                        .ok_or_else(|| GraphError::Parse("E before V".into()))?;
                    for tok in body.split(',') {
                        let tok = tok.trim();
                        let (s, t) = tok
                            .split_once("->")
                            .ok_or_else(|| GraphError::Parse(format!("bad edge {tok:?}")))?;
                        let s = s
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| GraphError::Parse(format!("bad edge {tok:?}")))?;
                        let t = t
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| GraphError::Parse(format!("bad edge {tok:?}")))?;
                        g.add_edge(s, t)?;
                    }
                }
                "IN" | "OUT" => {
                    let is_in = key.trim() == "IN";
                    let g = g
                        .as_mut()
                        .ok_or_else(|| GraphError::Parse("legs before V".into()))?;
                    for tok in body.split(',') {
                        let tok = tok.trim();
                        let (v, l) = tok
                            .split_once(':')
                            .ok_or_else(|| GraphError::Parse(format!("bad leg {tok:?}")))?;
                        let v = v
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| GraphError::Parse(format!("bad leg {tok:?}")))?;
                        let l = l
                            .trim()
                            .parse::<u32>()
                            .map_err(|_| GraphError::Parse(format!("bad leg {tok:?}")))?;
                        if is_in {
                            g.attach_in_leg(v, l)?;
                        } else {
                            g.attach_out_leg(v, l)?;
                        }
                    }
                }
                other => return Err(GraphError::Parse(format!("unknown section {other:?}"))),
            }
        }
        g.ok_or_else(|| GraphError::Parse("missing V section".into()))
    }
}

fn assign_color_ids<K: Ord>(keys: &[K]) -> Vec<u64> {
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    sorted.dedup_by(|a, b| a == b);
    keys.iter()
        .map(|k| sorted.binary_search_by(|probe| probe.cmp(&k)).unwrap() as u64)
        .collect()
}

/// Constraints for isomorphism-free enumeration.
#[derive(Debug, Clone, Default)]
pub struct GraphConstraints {
    pub acyclic: bool,
    pub connected: bool,
    /// Minimum total valence (in + out) per vertex.
    pub min_valence: Option<usize>,
    /// Forbid vertices with exactly one incoming and one outgoing edge.
    pub no_passing_bivalent: bool,
    /// Drop graphs killed by an odd automorphism.
    pub exclude_vanishing: bool,
}

impl GraphConstraints {
    fn admits(&self, g: &DirectedMultigraph) -> bool {
        if self.connected && !g.connected() {
            return false;
        }
        if let Some(min) = self.min_valence {
            for v in 0..g.n_vertices {
                if g.out_degree(v) + g.in_degree(v) < min {
                    return false;
                }
            }
        }
        if self.no_passing_bivalent {
            for v in 0..g.n_vertices {
                if g.out_degree(v) == 1 && g.in_degree(v) == 1 {
                    return false;
                }
            }
        }
        if self.exclude_vanishing && g.odd_automorphism_vanishes() {
            return false;
        }
        true
    }
}

/// Exactly one representative per isomorphism class of undecorated leg-free
/// multigraphs with the given vertex and edge counts, in canonical order.
///
/// Orderly generation: extend by one edge at a time, deduplicating by
/// canonical form at each level; non-monotone constraints are filtered at the
/// end.
pub fn enumerate_graphs(
    n_vertices: usize,
    n_edges: usize,
    constraints: &GraphConstraints,
) -> Vec<DirectedMultigraph> {
    let mut level: Vec<DirectedMultigraph> = vec![DirectedMultigraph::new(n_vertices)];
    for _ in 0..n_edges {
        let mut next: HashSet<DirectedMultigraph> = HashSet::new();
        for g in &level {
            for s in 0..n_vertices {
                for t in 0..n_vertices {
                    if s == t {
                        continue;
                    }
                    let mut h = g.clone();
                    h.add_edge(s, t).expect("valid edge");
                    if constraints.acyclic && !h.is_acyclic() {
                        continue;
                    }
                    next.insert(h.canonical_form().canonical_graph);
                }
            }
        }
        level = next.into_iter().collect();
        level.sort();
    }
    level.retain(|g| constraints.admits(g));
    level
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acyclicity_basics() {
        let g = DirectedMultigraph::with_edges(2, &[(0, 1)]);
        assert!(g.is_acyclic());
        let g = DirectedMultigraph::with_edges(2, &[(0, 1), (1, 0)]);
        assert!(!g.is_acyclic());
        let mut g = DirectedMultigraph::new(2);
        assert_eq!(g.add_edge(0, 0), Err(GraphError::SelfLoop(0)));
        assert_eq!(g.add_edge(0, 5), Err(GraphError::VertexOutOfRange(5)));
    }

    /// The two seven-vertex example graphs: the first contains a directed
    /// cycle, the second is oriented. Vertices: 0=u, 1=o, 2=a, 3=L, 4=R,
    /// 5=b1, 6=b2.
    #[test]
    fn seven_vertex_examples() {
        let cyclic = DirectedMultigraph::with_edges(
            7,
            &[
                (1, 2),
                (2, 5),
                (6, 2),
                (5, 3),
                (3, 1),
                (6, 4),
                (4, 0),
                (1, 0),
            ],
        );
        assert!(!cyclic.is_acyclic());

        let oriented = DirectedMultigraph::with_edges(
            7,
            &[
                (2, 1),
                (5, 2),
                (6, 2),
                (5, 3),
                (3, 1),
                (6, 4),
                (4, 0),
                (1, 0),
            ],
        );
        assert!(oriented.is_acyclic());
    }

    #[test]
    fn connectivity_basics() {
        assert!(DirectedMultigraph::new(1).connected());
        assert!(!DirectedMultigraph::new(2).connected());
        let g = DirectedMultigraph::with_edges(2, &[(0, 1), (0, 1)]);
        assert!(g.connected());
    }

    #[test]
    fn canonical_form_signs() {
        // Edge 0->1 vs the same graph with the two vertices swapped.
        let g1 = DirectedMultigraph::with_edges(2, &[(0, 1)]);
        let g2 = DirectedMultigraph::with_edges(2, &[(1, 0)]);
        let c1 = g1.canonical_form();
        let c2 = g2.canonical_form();
        assert_eq!(c1.canonical_graph, c2.canonical_graph);
        assert_eq!(c1.sign * c2.sign, -1);

        // Any graph against itself: sign +1 once canonical.
        let c = c1.canonical_graph.canonical_form();
        assert_eq!(c.sign, 1);
        assert_eq!(c.canonical_graph, c1.canonical_graph);
    }

    #[test]
    fn canonical_form_three_cycle_parity() {
        // Path 0->1->2 relabeled by the 3-cycle (0 1 2): even permutation.
        let g = DirectedMultigraph::with_edges(3, &[(0, 1), (1, 2)]);
        let relabeled = g.relabeled(&[1, 2, 0]);
        let cg = g.canonical_form();
        let cr = relabeled.canonical_form();
        assert_eq!(cg.canonical_graph, cr.canonical_graph);
        assert_eq!(cg.sign * cr.sign, 1);

        // Brute-force oracle over all 6 labelings: canonical graphs agree
        // and signs compose as permutation parities.
        let perms: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ];
        for p in perms {
            let h = g.relabeled(&p);
            let ch = h.canonical_form();
            assert_eq!(ch.canonical_graph, cg.canonical_graph);
            assert_eq!(ch.sign, cg.sign * perm_sign(&p));
        }
    }

    #[test]
    fn odd_automorphisms() {
        // Double edge: both vertices fixed by every automorphism.
        let g = DirectedMultigraph::with_edges(2, &[(0, 1), (0, 1)]);
        assert!(!g.odd_automorphism_vanishes());
        assert_eq!(g.automorphisms().len(), 1);

        // Two disjoint identical edges: nontrivial automorphism (0 2)(1 3),
        // an even permutation, so the graph does not vanish.
        let g = DirectedMultigraph::with_edges(4, &[(0, 1), (2, 3)]);
        let auts = g.automorphisms();
        assert_eq!(auts.len(), 2);
        assert!(auts.iter().all(|p| perm_sign(p) == 1));
        assert!(!g.odd_automorphism_vanishes());

        // Single vertex.
        assert!(!DirectedMultigraph::new(1).odd_automorphism_vanishes());

        // Out-star on three vertices: swapping the two sinks is odd.
        let g = DirectedMultigraph::with_edges(3, &[(0, 1), (0, 2)]);
        assert!(g.odd_automorphism_vanishes());
    }

    #[test]
    fn enumeration_examples() {
        let c = GraphConstraints {
            acyclic: true,
            connected: true,
            ..Default::default()
        };
        assert_eq!(enumerate_graphs(2, 1, &c).len(), 1);
        // Two vertices, two edges: only the parallel double edge is acyclic.
        let graphs = enumerate_graphs(2, 2, &c);
        assert_eq!(graphs.len(), 1);
        let double = DirectedMultigraph::with_edges(2, &[(0, 1), (0, 1)]);
        assert_eq!(graphs[0], double.canonical_form().canonical_graph);
    }

    #[test]
    fn enumeration_matches_exhaustive_labeled_count() {
        // For each class, the orbit of labelings has size n!/|Aut|; summing
        // over classes must reproduce the number of labeled graphs.
        let factorial = |n: usize| -> usize { (1..=n).product::<usize>().max(1) };
        for n in 1..=4usize {
            for e in 0..=4usize {
                let c = GraphConstraints {
                    acyclic: true,
                    ..Default::default()
                };
                let classes = enumerate_graphs(n, e, &c);
                let from_classes: usize = classes
                    .iter()
                    .map(|g| factorial(n) / g.automorphisms().len())
                    .sum();
                let labeled = count_labeled_acyclic(n, e);
                assert_eq!(from_classes, labeled, "n={n} e={e}");
            }
        }
    }

    fn count_labeled_acyclic(n: usize, e: usize) -> usize {
        // All multisets of e directed edges over ordered pairs, acyclic.
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|s| (0..n).filter(move |t| *t != s).map(move |t| (s, t)))
            .collect();
        let mut count = 0usize;
        let mut stack: Vec<(usize, Vec<(usize, usize)>)> = vec![(0, Vec::new())];
        while let Some((start, chosen)) = stack.pop() {
            if chosen.len() == e {
                let g = DirectedMultigraph::with_edges(n, &chosen);
                if g.is_acyclic() {
                    count += 1;
                }
                continue;
            }
            for idx in start..pairs.len() {
                let mut next = chosen.clone();
                next.push(pairs[idx]);
                // Multisets: allow repeats of the current pair, never go back.
                stack.push((idx, next));
            }
        }
        count
    }

    #[test]
    fn text_format_round_trip() {
        let mut g = DirectedMultigraph::with_edges(3, &[(0, 1), (1, 2), (0, 1)]);
        g.set_decorations(vec![
            VertexDec::corolla(2, 1, 0),
            VertexDec::corolla(1, 2, 1),
            VertexDec::weight(3),
        ]);
        g.attach_in_leg(0, 1).unwrap();
        g.attach_out_leg(2, 1).unwrap();
        g.attach_out_leg(2, 2).unwrap();
        let text = g.to_text();
        let back = DirectedMultigraph::from_text(&text).unwrap();
        assert_eq!(g, back);
        assert!(DirectedMultigraph::from_text("E=0->1").is_err());
    }
}
