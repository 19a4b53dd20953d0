//! The operad of oriented labeled graphs.
//!
//! Arity-`n` basis elements are acyclic directed multigraphs on vertices
//! labeled `1..n` (labels significant, no quotient by isomorphism); each edge
//! contributes degree −2. Operadic composition inserts a graph into a vertex
//! and redistributes the incident edges over the inserted vertices in all
//! possible ways, each distribution with coefficient +1.

use std::collections::BTreeMap;

use num::traits::Zero;
use thiserror::Error;

use crate::digraph::DirectedMultigraph;
use crate::rational::{rat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraError {
    #[error("slot {slot} out of range 1..={arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("arity mismatch in element operation")]
    ArityMismatch,
}

/// A labeled oriented graph: vertex `i` of the underlying multigraph carries
/// the operadic label `i+1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraGraph {
    pub underlying: DirectedMultigraph,
}

impl GraGraph {
    pub fn new(arity: usize, edges: &[(usize, usize)]) -> Self {
        let g = DirectedMultigraph::with_edges(arity, edges);
        assert!(g.is_acyclic(), "oriented graphs contain no directed cycles");
        GraGraph { underlying: g }
    }

    pub fn arity(&self) -> usize {
        self.underlying.n_vertices
    }

    pub fn degree(&self) -> i64 {
        -2 * self.underlying.n_edges() as i64
    }

    /// Relabel vertices: `perm[old] = new` (0-based).
    pub fn relabeled(&self, perm: &[usize]) -> GraGraph {
        GraGraph {
            underlying: self.underlying.relabeled(perm),
        }
    }
}

/// The single-vertex edgeless graph: the operad unit.
pub fn unit() -> GraGraph {
    GraGraph::new(1, &[])
}

/// A rational combination of labeled graphs of a common arity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraElement {
    pub arity: usize,
    pub terms: BTreeMap<GraGraph, Rat>,
}

impl GraElement {
    pub fn zero(arity: usize) -> Self {
        GraElement {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_graph(g: GraGraph) -> Self {
        let mut e = GraElement::zero(g.arity());
        e.add_term(g, rat(1));
        e
    }

    pub fn add_term(&mut self, g: GraGraph, c: Rat) {
        assert_eq!(g.arity(), self.arity, "arity mismatch");
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(g) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &GraElement) -> Result<GraElement, GraError> {
        if self.arity != other.arity {
            return Err(GraError::ArityMismatch);
        }
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> GraElement {
        if c.is_zero() {
            return GraElement::zero(self.arity);
        }
        GraElement {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(g, x)| (g.clone(), x * c))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn relabeled(&self, perm: &[usize]) -> GraElement {
        let mut out = GraElement::zero(self.arity);
        for (g, c) in &self.terms {
            out.add_term(g.relabeled(perm), c.clone());
        }
        out
    }

    /// True when every term has the same degree, returning it.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut deg = None;
        for g in self.terms.keys() {
            match deg {
                None => deg = Some(g.degree()),
                Some(d) if d != g.degree() => return None,
                _ => {}
            }
        }
        deg
    }
}

/// Operadic composition `g1 o_slot g2` (slot is 1-based).
///
/// Vertex `slot` of `g1` is replaced by all of `g2`; every edge of `g1`
/// incident to that vertex reconnects to each vertex of `g2` independently,
/// one summand per distribution, coefficient +1. Both inputs acyclic makes
/// every summand acyclic.
pub fn compose(g1: &GraGraph, slot: usize, g2: &GraGraph) -> Result<GraElement, GraError> {
    let n = g1.arity();
    let m = g2.arity();
    if slot == 0 || slot > n {
        return Err(GraError::SlotOutOfRange { slot, arity: n });
    }
    let v = slot - 1;
    // Relabeling of g1's vertices: w < v keep, v removed, w > v shifts by m-1.
    let map1 = |w: usize| if w < v { w } else { w + m - 1 };
    // g2's vertex u lands at v + u.
    let map2 = |u: usize| v + u;

    let incident: Vec<(usize, usize)> = g1
        .underlying
        .edges
        .iter()
        .filter(|(s, t)| *s == v || *t == v)
        .cloned()
        .collect();
    let fixed: Vec<(usize, usize)> = g1
        .underlying
        .edges
        .iter()
        .filter(|(s, t)| *s != v && *t != v)
        .map(|&(s, t)| (map1(s), map1(t)))
        .collect();
    let g2_edges: Vec<(usize, usize)> = g2
        .underlying
        .edges
        .iter()
        .map(|&(s, t)| (map2(s), map2(t)))
        .collect();

    let mut out = GraElement::zero(n + m - 1);
    let k = incident.len();
    let mut assignment = vec![0usize; k];
    'outer: loop {
        let mut edges = fixed.clone();
        edges.extend_from_slice(&g2_edges);
        for (idx, &(s, t)) in incident.iter().enumerate() {
            let target = map2(assignment[idx]);
            let e = if s == v {
                (target, map1(t))
            } else {
                (map1(s), target)
            };
            edges.push(e);
        }
        out.add_term(GraGraph::new(n + m - 1, &edges), rat(1));
        if k == 0 {
            break;
        }
        // Next assignment in lexicographic order.
        let mut idx = 0;
        loop {
            assignment[idx] += 1;
            if assignment[idx] < m {
                break;
            }
            assignment[idx] = 0;
            idx += 1;
            if idx == k {
                break 'outer;
            }
        }
    }
    Ok(out)
}

/// Bilinear extension of [`compose`] to elements.
pub fn compose_elements(
    e1: &GraElement,
    slot: usize,
    e2: &GraElement,
) -> Result<GraElement, GraError> {
    let mut out = GraElement::zero(e1.arity + e2.arity - 1);
    for (g1, c1) in &e1.terms {
        for (g2, c2) in &e2.terms {
            let part = compose(g1, slot, g2)?;
            for (g, c) in &part.terms {
                out.add_term(g.clone(), c * c1 * c2);
            }
        }
    }
    Ok(out)
}

/// The image of the degree-shifted Lie generator: `edge(1->2) - edge(2->1)`.
pub fn phi_generator() -> GraElement {
    let mut e = GraElement::zero(2);
    e.add_term(GraGraph::new(2, &[(0, 1)]), rat(1));
    e.add_term(GraGraph::new(2, &[(1, 0)]), rat(-1));
    e
}

/// The Jacobiator of a binary element: the cyclic sum of `b o_1 b` over the
/// three cyclic relabelings of `{1,2,3}`. It vanishes exactly when `b`
/// satisfies the Jacobi relation.
pub fn jacobiator(b: &GraElement) -> Result<GraElement, GraError> {
    if b.arity != 2 {
        return Err(GraError::ArityMismatch);
    }
    let bb = compose_elements(b, 1, b)?;
    let cycles: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
    let mut out = GraElement::zero(3);
    for perm in &cycles {
        let term = bb.relabeled(perm);
        out = out.add(&term)?;
    }
    Ok(out)
}
