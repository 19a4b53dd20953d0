//! Graded polynomials in the variables `psi_i`, `eta^i` and the formal
//! variable `hbar`.
//!
//! For a graded basis with degrees `d_i`, the variable `psi_i` has degree
//! `d_i + 1`, `eta^i` has degree `1 - d_i` and `hbar` has degree 2. Odd
//! variables square to zero; Koszul signs are realized by straightening
//! monomials into the fixed normal order (psi's by index, then eta's by
//! index) and counting transpositions of odd generators.
//!
//! Besides the plain graded-commutative product the module implements the
//! star product obtained by composing normal-ordered operators (`eta^i`
//! acting as `hbar * d/d(psi_i)`), divided by one power of `hbar`. Built this
//! way the product is associative by construction; the `hbar` exponent may be
//! negative on intermediate results.

use std::collections::BTreeMap;

use num::traits::Zero;
use thiserror::Error;

use crate::rational::{rat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("graded basis differential does not square to zero")]
    DifferentialNotSquareZero,
    #[error("graded basis differential must be homogeneous of degree 1")]
    DifferentialDegree,
    #[error("boundary condition violated: {0}")]
    BoundaryCondition(String),
    #[error("element is not homogeneous of degree {expected}, found degree {found}")]
    NotHomogeneous { expected: i64, found: i64 },
}

/// A finite graded basis of the underlying space `g`, with an optional
/// differential `d(e_j) = sum_i c_{ij} e_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasis {
    pub dimension: usize,
    pub degrees: Vec<i64>,
    /// Entries `(i, j, c)` meaning `d(e_j)` contains `c * e_i`.
    pub differential: Option<Vec<(usize, usize, Rat)>>,
}

impl GradedBasis {
    /// Basis concentrated in degree zero, no differential.
    pub fn trivial(dimension: usize) -> Self {
        GradedBasis {
            dimension,
            degrees: vec![0; dimension],
            differential: None,
        }
    }

    pub fn with_degrees(degrees: Vec<i64>) -> Self {
        GradedBasis {
            dimension: degrees.len(),
            degrees,
            differential: None,
        }
    }

    /// Attach a differential, checking degree-1 homogeneity and `d^2 = 0`.
    pub fn with_differential(
        mut self,
        entries: Vec<(usize, usize, Rat)>,
    ) -> Result<Self, PolyError> {
        for (i, j, c) in &entries {
            if !c.is_zero() && self.degrees[*i] != self.degrees[*j] + 1 {
                return Err(PolyError::DifferentialDegree);
            }
        }
        // d^2 = 0 as a matrix identity.
        let mut sq: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        for (i, j, c) in &entries {
            for (k, l, e) in &entries {
                if l == i {
                    let entry = sq.entry((*k, *j)).or_insert_with(Rat::zero);
                    *entry += e * c;
                }
            }
        }
        if sq.values().any(|v| !v.is_zero()) {
            return Err(PolyError::DifferentialNotSquareZero);
        }
        self.differential = Some(entries);
        Ok(self)
    }

    pub fn psi_degree(&self, i: usize) -> i64 {
        self.degrees[i] + 1
    }

    pub fn eta_degree(&self, i: usize) -> i64 {
        1 - self.degrees[i]
    }

    pub fn psi_odd(&self, i: usize) -> bool {
        self.psi_degree(i).rem_euclid(2) == 1
    }

    pub fn eta_odd(&self, i: usize) -> bool {
        self.eta_degree(i).rem_euclid(2) == 1
    }
}

/// A generator in the normal order: all psi's (by index) precede all eta's
/// (by index); `hbar` is central and even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Psi(usize),
    Eta(usize),
}

impl Var {
    fn rank(&self) -> (u8, usize) {
        match self {
            Var::Psi(i) => (0, *i),
            Var::Eta(i) => (1, *i),
        }
    }

    fn degree(&self, gb: &GradedBasis) -> i64 {
        match self {
            Var::Psi(i) => gb.psi_degree(*i),
            Var::Eta(i) => gb.eta_degree(*i),
        }
    }

    fn odd(&self, gb: &GradedBasis) -> bool {
        self.degree(gb).rem_euclid(2) == 1
    }
}

/// A normal-form monomial `psi^A eta^B hbar^t`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono {
    /// (index, exponent), sorted by index, exponents > 0
    pub psi: Vec<(usize, u32)>,
    /// (index, exponent), sorted by index, exponents > 0
    pub eta: Vec<(usize, u32)>,
    pub hbar: i64,
}

impl Mono {
    pub fn one() -> Self {
        Mono::default()
    }

    pub fn psi(i: usize) -> Self {
        Mono {
            psi: vec![(i, 1)],
            ..Default::default()
        }
    }

    pub fn eta(i: usize) -> Self {
        Mono {
            eta: vec![(i, 1)],
            ..Default::default()
        }
    }

    pub fn hbar(power: i64) -> Self {
        Mono {
            hbar: power,
            ..Default::default()
        }
    }

    pub fn degree(&self, gb: &GradedBasis) -> i64 {
        let mut d = 2 * self.hbar;
        for (i, e) in &self.psi {
            d += gb.psi_degree(*i) * *e as i64;
        }
        for (i, e) in &self.eta {
            d += gb.eta_degree(*i) * *e as i64;
        }
        d
    }

    pub fn psi_len(&self) -> u32 {
        self.psi.iter().map(|(_, e)| *e).sum()
    }

    pub fn eta_len(&self) -> u32 {
        self.eta.iter().map(|(_, e)| *e).sum()
    }

    /// The letters in normal order, with multiplicity.
    fn letters(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.psi
            .iter()
            .map(|(i, e)| (Var::Psi(*i), *e))
            .chain(self.eta.iter().map(|(i, e)| (Var::Eta(*i), *e)))
    }

    /// Multiply two normal monomials; `None` when an odd generator squares.
    /// Returns the merged monomial and the Koszul sign.
    pub fn mul(&self, other: &Mono, gb: &GradedBasis) -> Option<(Mono, i32)> {
        // Odd letters of self, in normal order (each has exponent 1).
        let odd_left: Vec<(u8, usize)> = self
            .letters()
            .filter(|(v, _)| v.odd(gb))
            .map(|(v, _)| v.rank())
            .collect();
        let mut sign = 1i32;
        for (v, _) in other.letters().filter(|(v, _)| v.odd(gb)) {
            let r = v.rank();
            // Crossing every odd letter of self that sits strictly after r.
            let crossings = odd_left.iter().filter(|x| **x > r).count();
            if crossings % 2 == 1 {
                sign = -sign;
            }
        }
        let psi = merge_exponents(&self.psi, &other.psi, |i| gb.psi_odd(i))?;
        let eta = merge_exponents(&self.eta, &other.eta, |i| gb.eta_odd(i))?;
        Some((
            Mono {
                psi,
                eta,
                hbar: self.hbar + other.hbar,
            },
            sign,
        ))
    }

    /// Left derivative by a generator: move the generator to the front,
    /// collecting the Koszul sign, then remove it. `None` when absent.
    pub fn derivative(&self, var: Var, gb: &GradedBasis) -> Option<(Mono, Rat)> {
        let list = match var {
            Var::Psi(_) => &self.psi,
            Var::Eta(_) => &self.eta,
        };
        let idx = match var {
            Var::Psi(i) | Var::Eta(i) => i,
        };
        let pos = list.iter().position(|(i, _)| *i == idx)?;
        let exp = list[pos].1;
        let mut out = self.clone();
        {
            let list = match var {
                Var::Psi(_) => &mut out.psi,
                Var::Eta(_) => &mut out.eta,
            };
            if exp == 1 {
                list.remove(pos);
            } else {
                list[pos].1 -= 1;
            }
        }
        let mut coeff = rat(exp as i64);
        if var.odd(gb) {
            // exp == 1 for odd generators; sign counts odd letters before it.
            let r = var.rank();
            let before = self
                .letters()
                .filter(|(v, _)| v.odd(gb) && v.rank() < r)
                .count();
            if before % 2 == 1 {
                coeff = -coeff;
            }
        }
        Some((out, coeff))
    }

    pub fn hbar_derivative(&self) -> Option<(Mono, Rat)> {
        if self.hbar == 0 {
            return None;
        }
        let mut out = self.clone();
        out.hbar -= 1;
        Some((out, rat(self.hbar)))
    }
}

fn merge_exponents(
    a: &[(usize, u32)],
    b: &[(usize, u32)],
    odd: impl Fn(usize) -> bool,
) -> Option<Vec<(usize, u32)>> {
    let mut out: Vec<(usize, u32)> = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some((i, e)), Some((j, f))) => {
                if i < j {
                    out.push((*i, *e));
                    ia.next();
                } else if j < i {
                    out.push((*j, *f));
                    ib.next();
                } else {
                    if odd(*i) {
                        return None; // odd generator squared
                    }
                    out.push((*i, e + f));
                    ia.next();
                    ib.next();
                }
            }
            (Some(_), None) => {
                out.extend(ia.cloned());
                break;
            }
            (None, Some(_)) => {
                out.extend(ib.cloned());
                break;
            }
            (None, None) => break,
        }
    }
    Some(out)
}

/// A polynomial: finite rational combination of normal monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::from_term(Mono::one(), rat(1))
    }

    pub fn from_term(m: Mono, c: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn psi(i: usize) -> Self {
        Poly::from_term(Mono::psi(i), rat(1))
    }

    pub fn eta(i: usize) -> Self {
        Poly::from_term(Mono::eta(i), rat(1))
    }

    pub fn hbar() -> Self {
        Poly::from_term(Mono::hbar(1), rat(1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
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

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x * c))
                .collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&rat(-1))
    }

    /// Graded-commutative product.
    pub fn mul(&self, other: &Poly, gb: &GradedBasis) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, sign)) = m1.mul(m2, gb) {
                    out.add_term(m, c1 * c2 * rat(sign as i64));
                }
            }
        }
        out
    }

    pub fn derivative(&self, var: Var, gb: &GradedBasis) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some((m2, k)) = m.derivative(var, gb) {
                out.add_term(m2, c * k);
            }
        }
        out
    }

    pub fn hbar_derivative(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some((m2, k)) = m.hbar_derivative() {
                out.add_term(m2, c * k);
            }
        }
        out
    }

    /// Multiply by `hbar^k` (k may be negative).
    pub fn shift_hbar(&self, k: i64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.hbar += k;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    /// Drop terms with `hbar` power above `max` (inclusive bound).
    pub fn truncate_hbar(&self, max: i64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.hbar <= max)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The coefficient polynomial of `hbar^k` (with the `hbar` factor removed).
    pub fn hbar_coefficient(&self, k: i64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.hbar == k)
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.hbar = 0;
                    (m, c.clone())
                })
                .collect(),
        }
    }

    pub fn min_hbar(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.hbar).min()
    }

    pub fn max_hbar(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.hbar).max()
    }

    /// Substitute `eta = 0` (drop all monomials containing an eta).
    pub fn restrict_eta_zero(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.eta.is_empty())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Total degree when homogeneous.
    pub fn homogeneous_degree(&self, gb: &GradedBasis) -> Option<i64> {
        let mut deg = None;
        for m in self.terms.keys() {
            let d = m.degree(gb);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Composition of the normal-ordered operators represented by the two
    /// symbols (`eta^i` acts as `hbar * d/d(psi_i)`), re-expanded as a normal
    /// symbol. One contraction term carries one power of `hbar`.
    pub fn weyl_mul(&self, other: &Poly, gb: &GradedBasis) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                // m1 = psi_A eta_B hbar^s, m2 = psi_C eta_D hbar^t.
                // Move eta_B across psi_C, then glue the outer parts back.
                let eta_b = Mono {
                    eta: m1.eta.clone(),
                    ..Default::default()
                };
                let psi_c = Mono {
                    psi: m2.psi.clone(),
                    ..Default::default()
                };
                let mid = eta_past_psi(&eta_b, &psi_c, gb);
                let psi_a = Poly::from_term(
                    Mono {
                        psi: m1.psi.clone(),
                        hbar: m1.hbar,
                        ..Default::default()
                    },
                    rat(1),
                );
                let eta_d = Poly::from_term(
                    Mono {
                        eta: m2.eta.clone(),
                        hbar: m2.hbar,
                        ..Default::default()
                    },
                    rat(1),
                );
                let full = psi_a.mul(&mid, gb).mul(&eta_d, gb);
                for (m, x) in &full.terms {
                    out.add_term(m.clone(), x * &c);
                }
            }
        }
        out
    }
}

/// Normal form of the operator word `eta_B psi_C` where `eta^i = hbar d/d(psi_i)`:
/// commute each eta past the psi block using
/// `eta^i psi_C = (-1)^{|eta^i||psi_C|} psi_C eta^i + hbar * d(psi_C)/d(psi_i)`.
fn eta_past_psi(eta_b: &Mono, psi_c: &Mono, gb: &GradedBasis) -> Poly {
    if eta_b.eta.is_empty() || psi_c.psi.is_empty() {
        // Already normal.
        let (m, sign) = psi_c.mul(eta_b, gb).expect("disjoint variable kinds");
        debug_assert_eq!(sign, 1);
        return Poly::from_term(m, rat(1));
    }
    // Split off the last eta: eta_B = eta_{B'} . eta_j
    let mut head = eta_b.clone();
    let last = {
        let list = &mut head.eta;
        let (i, e) = *list.last().expect("nonempty");
        if e == 1 {
            list.pop();
        } else {
            list.last_mut().expect("nonempty").1 -= 1;
        }
        Var::Eta(i)
    };
    let j = match last {
        Var::Eta(i) => i,
        _ => unreachable!(),
    };
    // eta_j . psi_C
    let mut result = Poly::zero();
    // Swap term.
    let psi_c_degree: i64 = psi_c
        .psi
        .iter()
        .map(|(i, e)| gb.psi_degree(*i) * *e as i64)
        .sum();
    let swap_sign = if gb.eta_degree(j).rem_euclid(2) == 1 && psi_c_degree.rem_euclid(2) == 1 {
        -1i64
    } else {
        1i64
    };
    let swapped = Poly::from_term(
        {
            let mut m = psi_c.clone();
            m.eta = vec![(j, 1)];
            m
        },
        rat(swap_sign),
    );
    result = result.add(&swapped);
    // Contraction term: hbar * d(psi_C)/d(psi_j)
    let psi_c_poly = Poly::from_term(psi_c.clone(), rat(1));
    let contracted = psi_c_poly.derivative(Var::Psi(j), gb).shift_hbar(1);
    result = result.add(&contracted);
    // Now recurse: eta_{B'} . result, where result is a sum psi-words * eta_j-ish.
    let mut out = Poly::zero();
    for (m, c) in &result.terms {
        let psi_part = Mono {
            psi: m.psi.clone(),
            ..Default::default()
        };
        let rest = Mono {
            eta: m.eta.clone(),
            hbar: m.hbar,
            ..Default::default()
        };
        let inner = eta_past_psi(&head, &psi_part, gb);
        let rest_poly = Poly::from_term(rest, rat(1));
        let prod = inner.mul(&rest_poly, gb);
        for (m2, c2) in &prod.terms {
            out.add_term(m2.clone(), c2 * c);
        }
    }
    out
}

/// The star product: one power of `hbar` below the Weyl composition. The
/// `k`-contraction component carries `hbar^{k-1}`; when `trunc` is given,
/// terms above that `hbar` power are dropped.
pub fn star(f: &Poly, g: &Poly, gb: &GradedBasis, trunc: Option<i64>) -> Poly {
    let w = f.weyl_mul(g, gb).shift_hbar(-1);
    match trunc {
        Some(t) => w.truncate_hbar(t),
        None => w,
    }
}

/// `[f, g] = f * g - (-1)^{|f||g|} g * f`; the `hbar^{-1}` parts cancel by
/// commutativity of the symbol product, so the result is a power series.
pub fn star_bracket(f: &Poly, g: &Poly, gb: &GradedBasis, trunc: Option<i64>) -> Poly {
    let df = f.homogeneous_degree(gb).expect("homogeneous f");
    let dg = g.homogeneous_degree(gb).expect("homogeneous g");
    let sign = if (df * dg).rem_euclid(2) == 1 { -1 } else { 1 };
    let out = star(f, g, gb, trunc).sub(&star(g, f, gb, trunc).scale(&rat(sign)));
    debug_assert!(out.min_hbar().map_or(true, |m| m >= 0));
    out
}

/// The coordinate Poisson bracket, the two-term contraction sum
/// `{f,g} = sum_i +-(df/dpsi_i)(dg/deta^i) +- (df/deta^i)(dg/dpsi_i)`.
///
/// The sign exponents are fixed so that the bracket agrees with the
/// `hbar^0` part of [`star_bracket`] (single contractions of the associative
/// star product); with all derivatives taken from the left this reads
/// `{f,g} = sum_i (-1)^{|psi_i||f|} ( -(df/dpsi_i)(dg/deta^i)
///                + (-1)^{|psi_i|} (df/deta^i)(dg/dpsi_i) )`.
pub fn poisson_bracket(f: &Poly, g: &Poly, gb: &GradedBasis) -> Poly {
    let mut out = Poly::zero();
    for (mf, cf) in &f.terms {
        let fdeg = mf.degree(gb);
        let f_single = Poly::from_term(mf.clone(), cf.clone());
        for i in 0..gb.dimension {
            let psi_deg = gb.psi_degree(i);
            let base = if (psi_deg * fdeg).rem_euclid(2) == 1 {
                rat(-1)
            } else {
                rat(1)
            };
            let t1 = f_single
                .derivative(Var::Psi(i), gb)
                .mul(&g.derivative(Var::Eta(i), gb), gb)
                .scale(&base);
            out = out.sub(&t1);
            let s2 = if psi_deg.rem_euclid(2) == 1 {
                -&base
            } else {
                base.clone()
            };
            let t2 = f_single
                .derivative(Var::Eta(i), gb)
                .mul(&g.derivative(Var::Psi(i), gb), gb)
                .scale(&s2);
            out = out.add(&t2);
        }
    }
    out
}
