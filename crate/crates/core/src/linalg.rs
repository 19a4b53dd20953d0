//! Exact sparse linear algebra over the rationals.
//!
//! Rank, kernel, preimage and cohomology-dimension computations for the
//! differential matrices produced by the graph-complex and properad modules.
//! Everything is exact: elimination is fraction-free (integer rows normalized
//! by content, so coefficient growth stays at Bareiss scale), pivots are
//! chosen to minimize fill-in, and an optional prime-field shadow provides a
//! fast cross-check of ranks.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num::bigint::BigInt;
use num::traits::Zero;
use num::Integer;
use thiserror::Error;

use crate::rational::{format_rat, parse_rat, rat_mod_p, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composition of differentials is nonzero at entry ({row},{col})")]
    NonzeroComposition { row: usize, col: usize },
    #[error("parse error in matrix text: {0}")]
    Parse(String),
}

/// Sparse vector over the rationals; no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseVectorQ {
    pub dim: usize,
    pub entries: BTreeMap<usize, Rat>,
}

impl SparseVectorQ {
    pub fn zero(dim: usize) -> Self {
        SparseVectorQ {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, Rat)>>(dim: usize, it: I) -> Self {
        let mut v = Self::zero(dim);
        for (i, x) in it {
            v.add_to(i, x);
        }
        v
    }

    pub fn add_to(&mut self, index: usize, value: Rat) {
        assert!(index < self.dim, "index out of range");
        if value.is_zero() {
            return;
        }
        let entry = self.entries.entry(index).or_insert_with(|| Rat::zero());
        *entry += value;
        if entry.is_zero() {
            self.entries.remove(&index);
        }
    }

    pub fn get(&self, index: usize) -> Rat {
        self.entries.get(&index).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        SparseVectorQ {
            dim: self.dim,
            entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }
}

/// Sparse matrix over the rationals, column-major; no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrixQ {
    pub n_rows: usize,
    pub n_cols: usize,
    /// cols[j] maps row index -> nonzero entry.
    pub cols: Vec<BTreeMap<usize, Rat>>,
}

impl SparseMatrixQ {
    pub fn zero(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrixQ {
            n_rows,
            n_cols,
            cols: vec![BTreeMap::new(); n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.cols[i].insert(i, Rat::from_integer(BigInt::from(1)));
        }
        m
    }

    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rat)>,
    {
        let mut m = Self::zero(n_rows, n_cols);
        for (i, j, x) in triplets {
            m.add_to(i, j, x);
        }
        m
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: Rat) {
        assert!(row < self.n_rows && col < self.n_cols, "index out of range");
        if value.is_zero() {
            return;
        }
        let entry = self.cols[col].entry(row).or_insert_with(Rat::zero);
        *entry += value;
        if entry.is_zero() {
            self.cols[col].remove(&row);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Rat {
        self.cols[col].get(&row).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn column(&self, j: usize) -> SparseVectorQ {
        SparseVectorQ {
            dim: self.n_rows,
            entries: self.cols[j].clone(),
        }
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &SparseVectorQ) -> SparseVectorQ {
        assert_eq!(self.n_cols, v.dim, "dimension mismatch");
        let mut out = SparseVectorQ::zero(self.n_rows);
        for (j, x) in &v.entries {
            for (i, a) in &self.cols[*j] {
                out.add_to(*i, a * x);
            }
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn mul_mat(&self, rhs: &SparseMatrixQ) -> SparseMatrixQ {
        assert_eq!(self.n_cols, rhs.n_rows, "dimension mismatch");
        let mut out = SparseMatrixQ::zero(self.n_rows, rhs.n_cols);
        for j in 0..rhs.n_cols {
            for (k, b) in &rhs.cols[j] {
                for (i, a) in &self.cols[*k] {
                    out.add_to(i.to_owned(), j, a * b);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    /// Plain-text triplet serialization: header `rows cols nnz`, then one
    /// line `i j num/den` per nonzero entry, row-major order for readability.
    pub fn to_triplet_text(&self) -> String {
        let mut triplets: Vec<(usize, usize, &Rat)> = Vec::with_capacity(self.nnz());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, x) in col {
                triplets.push((*i, j, x));
            }
        }
        triplets.sort_by_key(|(i, j, _)| (*i, *j));
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.n_rows, self.n_cols, triplets.len());
        for (i, j, x) in triplets {
            let _ = writeln!(out, "{} {} {}", i, j, format_rat(x));
        }
        out
    }

    pub fn from_triplet_text(text: &str) -> Result<Self, LinalgError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| LinalgError::Parse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let mut next_num = |what: &str| -> Result<usize, LinalgError> {
            parts
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| LinalgError::Parse(format!("bad header field: {what}")))
        };
        let n_rows = next_num("rows")?;
        let n_cols = next_num("cols")?;
        let nnz = next_num("nnz")?;
        let mut m = Self::zero(n_rows, n_cols);
        let mut count = 0usize;
        for line in lines {
            let mut parts = line.split_whitespace();
            let i = parts
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| LinalgError::Parse(format!("bad row in line {line:?}")))?;
            let j = parts
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| LinalgError::Parse(format!("bad col in line {line:?}")))?;
            let x = parts
                .next()
                .and_then(parse_rat)
                .ok_or_else(|| LinalgError::Parse(format!("bad value in line {line:?}")))?;
            if i >= n_rows || j >= n_cols {
                return Err(LinalgError::Parse(format!("index out of range: {line:?}")));
            }
            m.add_to(i, j, x);
            count += 1;
        }
        if count != nnz {
            return Err(LinalgError::Parse(format!(
                "nnz mismatch: header {nnz}, got {count}"
            )));
        }
        Ok(m)
    }
}

/// An integer sparse row, kept content-normalized (gcd 1) during elimination.
type IntRow = Vec<(usize, BigInt)>;

fn normalize_content(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, x) in row.iter() {
        g = g.gcd(x);
    }
    if g > BigInt::from(1) {
        for (_, x) in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Convert to integer rows by clearing denominators (row scaling does not
/// change rank, kernel or solvability).
fn integer_rows(m: &SparseMatrixQ) -> Vec<IntRow> {
    let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); m.n_rows];
    for (j, col) in m.cols.iter().enumerate() {
        for (i, x) in col {
            rows[*i].insert(j, x.clone());
        }
    }
    rows.into_iter()
        .map(|row| {
            let mut lcm = BigInt::from(1);
            for x in row.values() {
                lcm = lcm.lcm(x.denom());
            }
            let mut out: IntRow = row
                .into_iter()
                .map(|(j, x)| (j, x.numer() * (&lcm / x.denom())))
                .collect();
            normalize_content(&mut out);
            out
        })
        .collect()
}

/// Row echelon form by fraction-free elimination.
///
/// Returns `(echelon_rows, pivot_cols)`; `echelon_rows[k]` has its leading
/// nonzero in `pivot_cols[k]`, and pivot columns are pairwise distinct. Pivot
/// choice: smallest active column support, ties broken by column index, then
/// by smallest row support, then row order (deterministic).
fn echelon(mut rows: Vec<IntRow>, n_cols: usize) -> (Vec<IntRow>, Vec<usize>) {
    // col -> set of active row ids having a nonzero there
    let mut col_rows: Vec<BTreeMap<usize, ()>> = vec![BTreeMap::new(); n_cols];
    for (r, row) in rows.iter().enumerate() {
        for (j, _) in row {
            col_rows[*j].insert(r, ());
        }
    }
    let mut active: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
    let mut done: Vec<(IntRow, usize)> = Vec::new();

    loop {
        // Pick the pivot column with minimal active support.
        let mut best: Option<(usize, usize)> = None; // (support, col)
        for (j, support) in col_rows.iter().enumerate() {
            let s = support.len();
            if s == 0 {
                continue;
            }
            if best.map_or(true, |(bs, _)| s < bs) {
                best = Some((s, j));
                if s == 1 {
                    break;
                }
            }
        }
        let Some((_, pc)) = best else { break };
        // Pick the row with smallest support, ties by row index.
        let pr = col_rows[pc]
            .keys()
            .copied()
            .min_by_key(|r| (rows[*r].len(), *r))
            .expect("nonempty support");

        let piv_row = std::mem::take(&mut rows[pr]);
        active[pr] = false;
        for (j, _) in &piv_row {
            col_rows[*j].remove(&pr);
        }
        let piv_val = piv_row
            .iter()
            .find(|(j, _)| *j == pc)
            .map(|(_, x)| x.clone())
            .expect("pivot entry");

        let targets: Vec<usize> = col_rows[pc].keys().copied().collect();
        for r in targets {
            let coeff = rows[r]
                .iter()
                .find(|(j, _)| *j == pc)
                .map(|(_, x)| x.clone())
                .expect("target entry");
            // row <- row * piv − coeff * piv_row  (exact, integer)
            let old = std::mem::take(&mut rows[r]);
            for (j, _) in &old {
                col_rows[*j].remove(&r);
            }
            let mut new_row: IntRow = Vec::with_capacity(old.len() + piv_row.len());
            let mut a = old.iter().peekable();
            let mut b = piv_row.iter().peekable();
            loop {
                match (a.peek(), b.peek()) {
                    (Some((ja, xa)), Some((jb, xb))) => {
                        if ja < jb {
                            new_row.push((*ja, xa * &piv_val));
                            a.next();
                        } else if jb < ja {
                            new_row.push((*jb, -(xb * &coeff)));
                            b.next();
                        } else {
                            let v = xa * &piv_val - xb * &coeff;
                            if !v.is_zero() {
                                new_row.push((*ja, v));
                            }
                            a.next();
                            b.next();
                        }
                    }
                    (Some((ja, xa)), None) => {
                        new_row.push((*ja, xa * &piv_val));
                        a.next();
                    }
                    (None, Some((jb, xb))) => {
                        new_row.push((*jb, -(xb * &coeff)));
                        b.next();
                    }
                    (None, None) => break,
                }
            }
            normalize_content(&mut new_row);
            for (j, _) in &new_row {
                col_rows[*j].insert(r, ());
            }
            if new_row.is_empty() {
                active[r] = false;
            }
            rows[r] = new_row;
        }
        done.push((piv_row, pc));
    }
    let pivots = done.iter().map(|(_, c)| *c).collect();
    (done.into_iter().map(|(r, _)| r).collect(), pivots)
}

/// Rank over the rationals.
pub fn rank(m: &SparseMatrixQ) -> usize {
    let (_, pivots) = echelon(integer_rows(m), m.n_cols);
    pivots.len()
}

/// Rank over the prime field F_p (entries reduced mod p).
///
/// Returns `None` when some denominator vanishes mod p.
pub fn rank_mod_p(m: &SparseMatrixQ, p: u64) -> Option<usize> {
    let mut rows: Vec<HashMap<usize, u64>> = vec![HashMap::new(); m.n_rows];
    for (j, col) in m.cols.iter().enumerate() {
        for (i, x) in col {
            let v = rat_mod_p(x, p)?;
            if v != 0 {
                rows[*i].insert(j, v);
            }
        }
    }
    let mut rank = 0usize;
    let mut rows: Vec<HashMap<usize, u64>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    while let Some(pos) = rows.iter().position(|r| !r.is_empty()) {
        let row = rows.swap_remove(pos);
        let (&pc, &pv) = row.iter().min_by_key(|(j, _)| **j).expect("nonempty");
        let inv = crate::rational::inv_mod(pv, p);
        rank += 1;
        for other in rows.iter_mut() {
            if let Some(&c) = other.get(&pc) {
                let factor = crate::rational::mul_mod(c, inv, p);
                for (&j, &x) in row.iter() {
                    let sub = crate::rational::mul_mod(factor, x, p);
                    let entry = other.entry(j).or_insert(0);
                    *entry = (*entry + p - sub) % p;
                    if *entry == 0 {
                        other.remove(&j);
                    }
                }
            }
        }
        rows.retain(|r| !r.is_empty());
    }
    Some(rank)
}

/// Rank with a modular cross-check: the rational rank must match the rank mod
/// at least one of three fixed 30-bit primes (it can only drop mod p, never
/// grow). Panics on inconsistency, which would indicate an arithmetic bug.
pub fn checked_rank(m: &SparseMatrixQ) -> usize {
    let r = rank(m);
    let primes = [1_073_741_789u64, 1_073_741_783u64, 999_999_937u64];
    let mut agree = false;
    for p in primes {
        match rank_mod_p(m, p) {
            Some(rp) => {
                assert!(rp <= r, "modular rank exceeds rational rank");
                if rp == r {
                    agree = true;
                    break;
                }
            }
            None => continue,
        }
    }
    assert!(agree, "no prime confirmed the rational rank {r}");
    r
}

/// Basis of the right null space; `m * v = 0` exactly for each vector.
pub fn kernel_basis(m: &SparseMatrixQ) -> Vec<SparseVectorQ> {
    let (rows, pivot_cols) = echelon(integer_rows(m), m.n_cols);
    let mut is_pivot = vec![false; m.n_cols];
    for c in &pivot_cols {
        is_pivot[*c] = true;
    }

    let mut basis = Vec::new();
    for free in (0..m.n_cols).filter(|c| !is_pivot[*c]) {
        let mut x = SparseVectorQ::zero(m.n_cols);
        x.add_to(free, Rat::from_integer(BigInt::from(1)));
        // A row eliminated at step k is clean of pivot columns from earlier
        // steps only, so substitute in reverse elimination order.
        for k in (0..rows.len()).rev() {
            let pc = pivot_cols[k];
            let mut acc = Rat::zero();
            let mut piv = Rat::zero();
            for (j, v) in &rows[k] {
                let v = Rat::from_integer(v.clone());
                if *j == pc {
                    piv = v;
                } else {
                    let xj = x.get(*j);
                    if !xj.is_zero() {
                        acc += v * xj;
                    }
                }
            }
            if !acc.is_zero() {
                x.add_to(pc, -(acc / piv));
            }
        }
        basis.push(x);
    }
    basis
}

/// Some `x` with `m * x = b` when `b` is in the column image, else `None`.
pub fn solve_in_image(
    m: &SparseMatrixQ,
    b: &SparseVectorQ,
) -> Result<Option<SparseVectorQ>, LinalgError> {
    if b.dim != m.n_rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "rhs has dimension {}, matrix has {} rows",
            b.dim, m.n_rows
        )));
    }
    // Augment with b as an extra column and run the same elimination.
    let mut aug = SparseMatrixQ::zero(m.n_rows, m.n_cols + 1);
    for (j, col) in m.cols.iter().enumerate() {
        for (i, x) in col {
            aug.add_to(*i, j, x.clone());
        }
    }
    for (i, x) in &b.entries {
        aug.add_to(*i, m.n_cols, x.clone());
    }
    let (rows, pivot_cols) = echelon(integer_rows(&aug), aug.n_cols);
    if pivot_cols.iter().any(|c| *c == m.n_cols) {
        return Ok(None); // b independent of the columns: obstruction
    }
    // Particular solution: free variables zero, pivot variables solved in
    // reverse elimination order (rows may still involve the b column).
    let mut x = SparseVectorQ::zero(m.n_cols);
    for k in (0..rows.len()).rev() {
        let pc = pivot_cols[k];
        let mut acc = Rat::zero();
        let mut piv = Rat::zero();
        for (j, v) in &rows[k] {
            let v = Rat::from_integer(v.clone());
            if *j == pc {
                piv = v;
            } else if *j == m.n_cols {
                acc -= v; // move b to the right-hand side
            } else {
                let xj = x.get(*j);
                if !xj.is_zero() {
                    acc += v * xj;
                }
            }
        }
        if !acc.is_zero() {
            x.add_to(pc, -(acc / piv));
        }
    }
    debug_assert!({
        let mut check = m.mul_vec(&x);
        for (i, v) in &b.entries {
            check.add_to(*i, -v.clone());
        }
        check.is_zero()
    });
    Ok(Some(x))
}

/// Dimension of `ker(d_out) / im(d_in)`.
///
/// `d_in : A -> B`, `d_out : B -> C`; the middle space `B` is the column space
/// of `d_out` and the row space of `d_in`. The composition `d_out * d_in = 0`
/// is verified exactly; a violation signals a sign bug upstream.
pub fn cohomology_dim(
    d_in: &SparseMatrixQ,
    d_out: &SparseMatrixQ,
) -> Result<usize, LinalgError> {
    if d_out.n_cols != d_in.n_rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "middle dimension disagrees: d_in has {} rows, d_out has {} cols",
            d_in.n_rows, d_out.n_cols
        )));
    }
    let comp = d_out.mul_mat(d_in);
    for (j, col) in comp.cols.iter().enumerate() {
        if let Some((i, _)) = col.iter().next() {
            return Err(LinalgError::NonzeroComposition { row: *i, col: j });
        }
    }
    let ker = d_out.n_cols - rank(d_out);
    let im = rank(d_in);
    Ok(ker - im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn mat(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> SparseMatrixQ {
        SparseMatrixQ::from_triplets(
            rows,
            cols,
            entries.iter().map(|(i, j, v)| (*i, *j, rat(*v))),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrixQ::zero(3, 4)), 0);
        assert_eq!(rank(&SparseMatrixQ::identity(2)), 2);
        // [[1,2],[2,4]]: second row is twice the first.
        let m = mat(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)]);
        assert_eq!(rank(&m), 1);
        assert_eq!(checked_rank(&m), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&SparseMatrixQ::identity(2)).is_empty());

        let m = mat(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)]);
        let ker = kernel_basis(&m);
        assert_eq!(ker.len(), 1);
        // Kernel vector is proportional to (2, -1).
        let v = &ker[0];
        assert!(m.mul_vec(v).is_zero());
        let ratio = v.get(0) / v.get(1);
        assert_eq!(ratio, rat(-2));

        let ker = kernel_basis(&SparseMatrixQ::zero(2, 3));
        assert_eq!(ker.len(), 3);
    }

    #[test]
    fn solve_examples() {
        let id = SparseMatrixQ::identity(3);
        let b = SparseVectorQ::from_entries(3, [(0, rat(5)), (2, rat(-1))]);
        let x = solve_in_image(&id, &b).unwrap().unwrap();
        assert_eq!(x, b);

        let m = mat(2, 1, &[(0, 0, 1), (1, 0, 2)]);
        let b = SparseVectorQ::from_entries(2, [(0, rat(1)), (1, rat(2))]);
        let x = solve_in_image(&m, &b).unwrap().unwrap();
        assert_eq!(x.get(0), rat(1));

        let b = SparseVectorQ::from_entries(2, [(0, rat(1))]);
        assert!(solve_in_image(&m, &b).unwrap().is_none());

        let bad = SparseVectorQ::zero(5);
        assert!(solve_in_image(&m, &bad).is_err());
    }

    #[test]
    fn cohomology_examples() {
        // 0 -> Q^3 -> 0
        let d_in = SparseMatrixQ::zero(3, 0);
        let d_out = SparseMatrixQ::zero(0, 3);
        assert_eq!(cohomology_dim(&d_in, &d_out).unwrap(), 3);

        // 0 -> Q^2 -> Q^2 identity
        let d_in = SparseMatrixQ::zero(2, 0);
        let d_out = SparseMatrixQ::identity(2);
        assert_eq!(cohomology_dim(&d_in, &d_out).unwrap(), 0);

        // middle dim 2, image = span(1,1), d_out = [1,-1]
        let d_in = mat(2, 1, &[(0, 0, 1), (1, 0, 1)]);
        let d_out = mat(1, 2, &[(0, 0, 1), (0, 1, -1)]);
        assert_eq!(cohomology_dim(&d_in, &d_out).unwrap(), 0);

        // d_out ∘ d_in != 0 must be flagged.
        let d_in = mat(2, 1, &[(0, 0, 1)]);
        let d_out = mat(1, 2, &[(0, 0, 1)]);
        assert!(matches!(
            cohomology_dim(&d_in, &d_out),
            Err(LinalgError::NonzeroComposition { .. })
        ));
    }

    #[test]
    fn rank_plus_nullity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let rows = rng.gen_range(1..8);
            let cols = rng.gen_range(1..8);
            let mut m = SparseMatrixQ::zero(rows, cols);
            for _ in 0..rng.gen_range(0..rows * cols) {
                m.add_to(
                    rng.gen_range(0..rows),
                    rng.gen_range(0..cols),
                    rat(rng.gen_range(-3..=3)),
                );
            }
            let r = rank(&m);
            let k = kernel_basis(&m);
            assert_eq!(r + k.len(), cols);
            for v in &k {
                assert!(m.mul_vec(v).is_zero());
            }
            // Modular shadow can only lose rank.
            for p in [1_073_741_789u64, 999_999_937u64] {
                if let Some(rp) = rank_mod_p(&m, p) {
                    assert!(rp <= r);
                }
            }
            assert_eq!(checked_rank(&m), r);
        }
    }

    #[test]
    fn triplet_text_round_trip() {
        let m = mat(3, 4, &[(0, 1, 2), (2, 3, -5), (1, 0, 7)]);
        let text = m.to_triplet_text();
        assert!(text.starts_with("3 4 3\n"));
        let back = SparseMatrixQ::from_triplet_text(&text).unwrap();
        assert_eq!(m, back);
        assert!(SparseMatrixQ::from_triplet_text("1 1").is_err());
    }
}
