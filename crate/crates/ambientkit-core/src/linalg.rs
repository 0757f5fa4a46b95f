//! Exact matrices over the rationals: reduced echelon form, rank, kernel
//! bases, products, and exactness certification for chain complexes.
//!
//! Elimination runs fraction-free: each row is cleared to integers up front,
//! row combinations are cross-multiplied in big integers, and the content gcd
//! is stripped after every combination to control coefficient growth. A final
//! normalization pass divides each pivot row by its pivot, producing the
//! canonical reduced row echelon form over the rationals. Matrices smaller
//! than 64x64 take a plain dense route instead; both routes produce the same
//! canonical answer and are cross-checked in the tests.
//!
//! Pivoting is deterministic (leftmost nonzero column, then smallest row
//! index), and kernel bases come out of free-variable back-substitution in
//! column order with each vector rescaled so its first nonzero entry is one.
//! The same inputs therefore always produce bit-identical bases.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;

const DENSE_LIMIT: usize = 64;

/// A rows x cols matrix of exact rationals with sparse storage; zero entries
/// are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rat>,
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExactMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = ExactMatrix::zero(nrows, ncols);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Rat {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rat) {
        assert!(row < self.rows && col < self.cols, "entry out of bounds");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(self.shape_err("matrix addition", other));
        }
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            let sum = out.get(r, c) + v;
            out.set(r, c, sum);
        }
        Ok(out)
    }

    pub fn neg(&self) -> ExactMatrix {
        let entries = self
            .entries
            .iter()
            .map(|(&k, v)| (k, -v.clone()))
            .collect();
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Apply the matrix to a column vector.
    pub fn apply(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch {
                context: "matrix-vector product",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: v.len(),
                right_cols: 1,
            });
        }
        let mut out = vec![Rat::zero(); self.rows];
        for (&(r, c), val) in &self.entries {
            out[r] += val * &v[c];
        }
        Ok(out)
    }

    /// Copy `block` into this matrix with its top-left corner at
    /// `(row_off, col_off)`.
    pub fn paste(&mut self, row_off: usize, col_off: usize, block: &ExactMatrix) {
        assert!(row_off + block.rows <= self.rows && col_off + block.cols <= self.cols);
        for (&(r, c), v) in &block.entries {
            self.set(row_off + r, col_off + c, v.clone());
        }
    }

    fn shape_err(&self, context: &'static str, other: &ExactMatrix) -> Error {
        Error::ShapeMismatch {
            context,
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }

    /// Sparse rows as `(column, value)` lists, sorted by column.
    fn row_lists(&self) -> Vec<Vec<(usize, Rat)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].push((c, v.clone()));
        }
        rows
    }

    /// Triplet serialization `[row, col, "p/q"]`, in row-major order.
    pub fn to_triplets(&self) -> Vec<(usize, usize, String)> {
        self.iter()
            .map(|(r, c, v)| (r, c, crate::rat::fmt_rat(v)))
            .collect()
    }
}

/// Exact product `outer * inner`.
pub fn compose(outer: &ExactMatrix, inner: &ExactMatrix) -> Result<ExactMatrix> {
    if outer.cols != inner.rows {
        return Err(outer.shape_err("matrix product", inner));
    }
    let inner_rows = inner.row_lists();
    let mut out = ExactMatrix::zero(outer.rows, inner.cols);
    let mut acc: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    for (&(r, k), v) in &outer.entries {
        for (c, w) in &inner_rows[k] {
            let e = acc.entry((r, *c)).or_insert_with(Rat::zero);
            *e += v * w;
        }
    }
    for ((r, c), v) in acc {
        out.set(r, c, v);
    }
    Ok(out)
}

/// Result of reduction to canonical reduced row echelon form.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub matrix: ExactMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// A basis of the right kernel. Vectors are linearly independent, each is
/// annihilated exactly by the defining matrix, and each is scaled so that its
/// first nonzero entry is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBasis {
    pub ambient_dim: usize,
    pub vectors: Vec<Vec<Rat>>,
}

impl KernelBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Canonical reduced row echelon form, rank, and pivot columns.
pub fn reduced_row_echelon(m: &ExactMatrix) -> Echelon {
    if m.rows < DENSE_LIMIT && m.cols < DENSE_LIMIT {
        rref_dense(m)
    } else {
        rref_sparse(m)
    }
}

/// Rank only; skips the back-substitution passes.
pub fn rank(m: &ExactMatrix) -> usize {
    if m.rows < DENSE_LIMIT && m.cols < DENSE_LIMIT {
        return rref_dense(m).rank;
    }
    let rows = int_rows(m);
    forward_eliminate(rows, m.cols).len()
}

/// Deterministic basis of `ker m` via free-variable back-substitution in
/// column order.
pub fn kernel_basis(m: &ExactMatrix) -> KernelBasis {
    let ech = reduced_row_echelon(m);
    let mut is_pivot = vec![false; m.cols];
    for &c in &ech.pivot_cols {
        is_pivot[c] = true;
    }
    let mut vectors = Vec::with_capacity(m.cols - ech.rank);
    for free in 0..m.cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Rat::zero(); m.cols];
        v[free] = Rat::one();
        for (i, &pc) in ech.pivot_cols.iter().enumerate() {
            let coeff = ech.matrix.get(i, free);
            if !coeff.is_zero() {
                v[pc] = -coeff;
            }
        }
        // scale so the first nonzero entry is one
        if let Some(first) = v.iter().position(|x| !x.is_zero()) {
            let scale = v[first].clone();
            if !scale.is_one() {
                for x in v.iter_mut() {
                    if !x.is_zero() {
                        *x /= &scale;
                    }
                }
            }
        }
        vectors.push(v);
    }
    KernelBasis {
        ambient_dim: m.cols,
        vectors,
    }
}

/// Certificate for one junction of a chain complex: `incoming` maps into the
/// middle space and `outgoing` maps out of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    pub is_complex: bool,
    pub rank_in: usize,
    pub nullity_out: usize,
    pub exact: bool,
}

/// Check `outgoing o incoming == 0` and whether the image of `incoming` fills
/// the kernel of `outgoing`.
pub fn certify_exactness(incoming: &ExactMatrix, outgoing: &ExactMatrix) -> Result<ExactnessReport> {
    if outgoing.cols != incoming.rows {
        return Err(Error::ShapeMismatch {
            context: "exactness junction",
            left_rows: incoming.rows,
            left_cols: incoming.cols,
            right_rows: outgoing.rows,
            right_cols: outgoing.cols,
        });
    }
    let is_complex = compose(outgoing, incoming)?.is_zero();
    let rank_in = rank(incoming);
    let nullity_out = outgoing.cols - rank(outgoing);
    Ok(ExactnessReport {
        is_complex,
        rank_in,
        nullity_out,
        exact: is_complex && rank_in == nullity_out,
    })
}

// ---- dense route ----

fn rref_dense(m: &ExactMatrix) -> Echelon {
    let mut rows: Vec<Vec<Rat>> = vec![vec![Rat::zero(); m.cols]; m.rows];
    for (&(r, c), v) in &m.entries {
        rows[r][c] = v.clone();
    }
    let mut pivot_cols = Vec::new();
    let mut next = 0usize;
    for col in 0..m.cols {
        let Some(p) = (next..m.rows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let inv = rows[next][col].clone();
        for x in rows[next].iter_mut() {
            if !x.is_zero() {
                *x /= &inv;
            }
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    if !pv.is_zero() {
                        *x -= &factor * pv;
                    }
                }
            }
        }
        pivot_cols.push(col);
        next += 1;
        if next == m.rows {
            break;
        }
    }
    let rank = pivot_cols.len();
    Echelon {
        matrix: ExactMatrix::from_rows(rows),
        rank,
        pivot_cols,
    }
}

// ---- sparse fraction-free route ----

#[derive(Debug, Clone)]
struct IntRow {
    /// (column, value) pairs sorted by column; values nonzero.
    terms: Vec<(usize, BigInt)>,
    orig: usize,
}

impl IntRow {
    fn lead_col(&self) -> usize {
        self.terms[0].0
    }

    fn lead_val(&self) -> &BigInt {
        &self.terms[0].1
    }

    fn coeff_at(&self, col: usize) -> Option<&BigInt> {
        self.terms
            .binary_search_by_key(&col, |t| t.0)
            .ok()
            .map(|i| &self.terms[i].1)
    }
}

/// Clear denominators row by row and strip the content gcd.
fn int_rows(m: &ExactMatrix) -> Vec<IntRow> {
    m.row_lists()
        .into_iter()
        .enumerate()
        .filter(|(_, terms)| !terms.is_empty())
        .map(|(orig, terms)| {
            let mut lcm = BigInt::one();
            for (_, v) in &terms {
                lcm = lcm.lcm(v.denom());
            }
            let terms = terms
                .into_iter()
                .map(|(c, v)| (c, v.numer() * (&lcm / v.denom())))
                .collect();
            strip_content(IntRow { terms, orig })
        })
        .collect()
}

fn strip_content(mut row: IntRow) -> IntRow {
    let mut g = BigInt::zero();
    for (_, v) in &row.terms {
        g = g.gcd(v);
        if g.is_one() {
            return row;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.terms.iter_mut() {
            *v = &*v / &g;
        }
    }
    row
}

/// `ca * a - cb * b`, merging sorted term lists; drops cancelled entries.
fn row_combine(a: &IntRow, ca: &BigInt, b: &IntRow, cb: &BigInt, orig: usize) -> Option<IntRow> {
    let mut terms = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() && j < b.terms.len() {
        match a.terms[i].0.cmp(&b.terms[j].0) {
            std::cmp::Ordering::Less => {
                terms.push((a.terms[i].0, ca * &a.terms[i].1));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                terms.push((b.terms[j].0, -(cb * &b.terms[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = ca * &a.terms[i].1 - cb * &b.terms[j].1;
                if !v.is_zero() {
                    terms.push((a.terms[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    for t in &a.terms[i..] {
        terms.push((t.0, ca * &t.1));
    }
    for t in &b.terms[j..] {
        terms.push((t.0, -(cb * &t.1)));
    }
    if terms.is_empty() {
        None
    } else {
        Some(strip_content(IntRow { terms, orig }))
    }
}

/// Forward elimination. Returns pivot rows ordered by pivot column; each
/// pivot is the row with the smallest original index among those whose
/// leading column is the leftmost still unprocessed.
fn forward_eliminate(rows: Vec<IntRow>, ncols: usize) -> Vec<IntRow> {
    let mut buckets: Vec<Vec<IntRow>> = vec![Vec::new(); ncols];
    for row in rows {
        buckets[row.lead_col()].push(row);
    }
    let mut pivots: Vec<IntRow> = Vec::new();
    for col in 0..ncols {
        let mut bucket = std::mem::take(&mut buckets[col]);
        if bucket.is_empty() {
            continue;
        }
        let pivot_idx = bucket
            .iter()
            .enumerate()
            .min_by_key(|(_, r)| r.orig)
            .map(|(i, _)| i)
            .unwrap();
        let pivot = bucket.swap_remove(pivot_idx);
        for row in bucket {
            let lead = row.lead_val().clone();
            if let Some(reduced) = row_combine(&row, pivot.lead_val(), &pivot, &lead, row.orig) {
                buckets[reduced.lead_col()].push(reduced);
            }
        }
        pivots.push(pivot);
    }
    pivots
}

fn rref_sparse(m: &ExactMatrix) -> Echelon {
    let mut pivots = forward_eliminate(int_rows(m), m.cols);
    // eliminate above each pivot, last pivot first
    for i in (0..pivots.len()).rev() {
        let pivot = pivots[i].clone();
        let pc = pivot.lead_col();
        for item in pivots.iter_mut().take(i) {
            if let Some(coeff) = item.coeff_at(pc).cloned() {
                *item = row_combine(item, pivot.lead_val(), &pivot, &coeff, item.orig)
                    .expect("pivot row cannot cancel to zero");
            }
        }
    }
    // normalize pivots to one
    let mut out = ExactMatrix::zero(m.rows, m.cols);
    let mut pivot_cols = Vec::with_capacity(pivots.len());
    for (i, row) in pivots.iter().enumerate() {
        let lead = Rat::from(row.lead_val().clone());
        pivot_cols.push(row.lead_col());
        for (c, v) in &row.terms {
            out.set(i, *c, Rat::from(v.clone()) / &lead);
        }
    }
    let rank = pivot_cols.len();
    Echelon {
        matrix: out,
        rank,
        pivot_cols,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_reduces_to_itself() {
        let id = ExactMatrix::identity(3);
        let ech = reduced_row_echelon(&id);
        assert_eq!(ech.rank, 3);
        assert_eq!(ech.pivot_cols, vec![0, 1, 2]);
        assert_eq!(ech.matrix, id);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let z = ExactMatrix::zero(4, 3);
        assert_eq!(rank(&z), 0);
        assert_eq!(kernel_basis(&z).dimension(), 3);
    }

    #[test]
    fn dependent_rows_collapse() {
        // hand elimination: second row is twice the first
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(rank(&a), 1);
        let ech = reduced_row_echelon(&a);
        assert_eq!(ech.matrix, m(&[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn rref_is_idempotent() {
        let a = m(&[&[2, 4, 1], &[3, 1, 0], &[5, 5, 1]]);
        let once = reduced_row_echelon(&a).matrix;
        let twice = reduced_row_echelon(&once).matrix;
        assert_eq!(once, twice);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert_eq!(kernel_basis(&ExactMatrix::identity(4)).dimension(), 0);
    }

    #[test]
    fn kernel_of_wide_row() {
        // [a, b] with a nonzero has a one-dimensional kernel
        let a = ExactMatrix::from_rows(vec![vec![rat(3, 2), rat_int(5)]]);
        let k = kernel_basis(&a);
        assert_eq!(k.dimension(), 1);
        assert!(a
            .apply(&k.vectors[0])
            .unwrap()
            .iter()
            .all(|x| x.is_zero()));
        // first nonzero entry normalized to one
        assert_eq!(k.vectors[0][0], rat_int(1));
    }

    #[test]
    fn compose_with_identity() {
        let a = m(&[&[1, 2], &[3, 4], &[5, 6]]);
        assert_eq!(compose(&a, &ExactMatrix::identity(2)).unwrap(), a);
        assert_eq!(compose(&ExactMatrix::identity(3), &a).unwrap(), a);
    }

    #[test]
    fn nilpotent_squares_to_zero() {
        let n = m(&[&[0, 1], &[0, 0]]);
        assert!(compose(&n, &n).unwrap().is_zero());
    }

    #[test]
    fn compose_shape_mismatch() {
        let a = m(&[&[1, 2]]);
        assert!(matches!(
            compose(&a, &a),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn exactness_trivial_cases() {
        // incoming identity, outgoing zero: full image equals full kernel
        let id = ExactMatrix::identity(3);
        let z = ExactMatrix::zero(2, 3);
        let rep = certify_exactness(&id, &z).unwrap();
        assert!(rep.is_complex && rep.exact);
        assert_eq!((rep.rank_in, rep.nullity_out), (3, 3));

        // incoming zero, outgoing with nontrivial kernel: not exact
        let incoming = ExactMatrix::zero(2, 2);
        let outgoing = m(&[&[1, 1]]);
        let rep = certify_exactness(&incoming, &outgoing).unwrap();
        assert!(rep.is_complex && !rep.exact);
    }

    #[test]
    fn empty_shapes_are_handled() {
        let a = ExactMatrix::zero(0, 4);
        assert_eq!(rank(&a), 0);
        assert_eq!(kernel_basis(&a).dimension(), 4);
        let b = ExactMatrix::zero(4, 0);
        assert_eq!(kernel_basis(&b).dimension(), 0);
        assert!(compose(&a, &b).unwrap().is_zero());
    }

    fn arb_matrix() -> impl Strategy<Value = ExactMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                proptest::collection::vec((-4i64..5, 1i64..4).prop_map(|(p, q)| rat(p, q)), c),
                r,
            )
            .prop_map(ExactMatrix::from_rows)
        })
    }

    proptest! {
        #[test]
        fn rank_nullity_and_annihilation(a in arb_matrix()) {
            let k = kernel_basis(&a);
            prop_assert_eq!(rank(&a) + k.dimension(), a.cols());
            for v in &k.vectors {
                prop_assert!(a.apply(v).unwrap().iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn dense_and_sparse_routes_agree(a in arb_matrix()) {
            let d = rref_dense(&a);
            let s = rref_sparse(&a);
            prop_assert_eq!(d.matrix, s.matrix);
            prop_assert_eq!(d.pivot_cols, s.pivot_cols);
        }

        #[test]
        fn rref_idempotent_prop(a in arb_matrix()) {
            let once = reduced_row_echelon(&a);
            let twice = reduced_row_echelon(&once.matrix);
            prop_assert_eq!(once.matrix, twice.matrix);
        }
    }
}
