//! Sparse linear algebra over small prime fields.
//!
//! Matrices are stored by columns. The workhorse is [`Reduction`], a left-to-right
//! column echelon reduction: each column is reduced against registered pivots at
//! its lowest (largest-index) nonzero row until it either zeroes out or registers a
//! new pivot there. Rank, kernel bases, membership in a column span, and
//! coordinates with respect to a pivot basis all fall out of one pass.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("{0} is not a prime in the supported range (2..=251)")]
    NotPrime(u32),
    #[error("row index {index} out of range for {n_rows} rows")]
    RowOutOfRange { index: u32, n_rows: usize },
}

/// A prime field order, validated on construction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Prime, LinalgError> {
        let is_prime = p >= 2 && p <= 251 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
        if is_prime {
            Ok(Prime(p))
        } else {
            Err(LinalgError::NotPrime(p))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b) % self.0
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.0
    }

    /// Reduces a signed integer into `0..p`.
    pub fn from_i64(self, a: i64) -> u32 {
        a.rem_euclid(self.0 as i64) as u32
    }

    /// Inverse by Fermat: a^(p-2). Panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.0 != 0, "inverse of zero");
        let mut base = a % self.0;
        let mut exp = self.0 - 2;
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl fmt::Debug for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sparse vector: strictly increasing indices, nonzero coefficients in `0..p`.
pub type SparseVec = Vec<(u32, u32)>;

/// `dst -= coeff * src`, merging sorted entry lists.
fn axpy_sub(fp: Prime, dst: &SparseVec, coeff: u32, src: &SparseVec) -> SparseVec {
    let mut out = SparseVec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let next = match (dst.get(i), src.get(j)) {
            (Some(&(di, dc)), Some(&(si, sc))) => match di.cmp(&si) {
                std::cmp::Ordering::Less => {
                    i += 1;
                    (di, dc)
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    (si, fp.neg(fp.mul(coeff, sc)))
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (di, fp.sub(dc, fp.mul(coeff, sc)))
                }
            },
            (Some(&(di, dc)), None) => {
                i += 1;
                (di, dc)
            }
            (None, Some(&(si, sc))) => {
                j += 1;
                (si, fp.neg(fp.mul(coeff, sc)))
            }
            (None, None) => unreachable!(),
        };
        if next.1 != 0 {
            out.push(next);
        }
    }
    out
}

fn scale(fp: Prime, v: &mut SparseVec, c: u32) {
    for (_, x) in v.iter_mut() {
        *x = fp.mul(*x, c);
    }
}

/// Column-major sparse matrix over a prime field.
#[derive(Clone, Debug)]
pub struct SparseMat {
    pub n_rows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMat {
    /// Builds from signed integer entries per column; reduces mod p, drops zeros.
    /// Entries in a column may repeat an index; they are summed.
    pub fn from_columns(
        n_rows: usize,
        fp: Prime,
        columns: Vec<Vec<(u32, i64)>>,
    ) -> Result<SparseMat, LinalgError> {
        let mut cols = Vec::with_capacity(columns.len());
        for raw in columns {
            let mut entries: Vec<(u32, u32)> = Vec::with_capacity(raw.len());
            for (i, c) in raw {
                if i as usize >= n_rows {
                    return Err(LinalgError::RowOutOfRange { index: i, n_rows });
                }
                entries.push((i, fp.from_i64(c)));
            }
            entries.sort_by_key(|&(i, _)| i);
            let mut col: SparseVec = Vec::with_capacity(entries.len());
            for (i, c) in entries {
                match col.last_mut() {
                    Some((j, acc)) if *j == i => *acc = fp.add(*acc, c),
                    _ => col.push((i, c)),
                }
            }
            col.retain(|&(_, c)| c != 0);
            cols.push(col);
        }
        Ok(SparseMat { n_rows, cols })
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    /// `A * x`: linear combination of columns.
    pub fn mul_vec(&self, fp: Prime, x: &SparseVec) -> SparseVec {
        let mut acc: SparseVec = Vec::new();
        for &(c, coeff) in x {
            acc = axpy_sub(fp, &acc, fp.neg(coeff), &self.cols[c as usize]);
        }
        acc
    }
}

/// What a reduction should remember beyond pivot columns.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Track {
    /// Rank only; cheapest.
    RankOnly,
    /// Keep every column's expression in the original columns: zeroed columns
    /// yield a kernel basis, pivot expressions enable coordinate solves.
    Ops,
}

/// Column processing order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Order {
    /// Left to right. Required when the prefix must dominate (e.g. reducing a
    /// cycle basis against a boundary basis placed first).
    AsGiven,
    /// Increasing initial support, ties by index. Good default for rank.
    BySupport,
}

struct PivotCol {
    col: SparseVec,
    /// Expression of `col` in original columns (tracked under `Track::Ops`).
    ops: Option<SparseVec>,
    origin: u32,
}

/// Column echelon reduction of a sparse matrix.
pub struct Reduction {
    fp: Prime,
    pivots: Vec<PivotCol>,
    pivot_of_row: Vec<Option<u32>>,
    kernel: Vec<SparseVec>,
}

impl Reduction {
    pub fn of(mat: &SparseMat, fp: Prime, track: Track, order: Order) -> Reduction {
        let mut red = Reduction {
            fp,
            pivots: Vec::new(),
            pivot_of_row: vec![None; mat.n_rows],
            kernel: Vec::new(),
        };
        let mut idx: Vec<u32> = (0..mat.cols.len() as u32).collect();
        if order == Order::BySupport {
            idx.sort_by_key(|&c| (mat.cols[c as usize].len(), c));
        }
        for c in idx {
            let col = mat.cols[c as usize].clone();
            let ops = match track {
                Track::RankOnly => None,
                Track::Ops => Some(vec![(c, 1u32)]),
            };
            red.push_column(col, ops, c);
        }
        red
    }

    fn push_column(&mut self, mut col: SparseVec, mut ops: Option<SparseVec>, origin: u32) {
        while let Some(&(row, coeff)) = col.last() {
            let Some(k) = self.pivot_of_row[row as usize] else {
                // new pivot at this row; normalize leading coefficient to 1
                let inv = self.fp.inv(coeff);
                scale(self.fp, &mut col, inv);
                if let Some(o) = ops.as_mut() {
                    scale(self.fp, o, inv);
                }
                self.pivot_of_row[row as usize] = Some(self.pivots.len() as u32);
                self.pivots.push(PivotCol { col, ops, origin });
                return;
            };
            let piv = &self.pivots[k as usize];
            col = axpy_sub(self.fp, &col, coeff, &piv.col);
            if let Some(o) = ops {
                let piv_ops = piv.ops.as_ref().expect("ops tracked for pivots");
                ops = Some(axpy_sub(self.fp, &o, coeff, piv_ops));
            }
        }
        // column vanished: its ops vector is a kernel element
        if let Some(o) = ops {
            self.kernel.push(o);
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Kernel basis in original column coordinates (requires `Track::Ops`).
    pub fn kernel_basis(&self) -> &[SparseVec] {
        &self.kernel
    }

    /// Original column indices that became pivots, in pivot creation order.
    pub fn pivot_origins(&self) -> Vec<u32> {
        self.pivots.iter().map(|p| p.origin).collect()
    }

    /// The k-th reduced pivot column (in pivot creation order). These columns
    /// span the same space as the input columns.
    pub fn pivot_column(&self, k: usize) -> &SparseVec {
        &self.pivots[k].col
    }

    /// Reduces `v` against the pivots. Returns the residual and the coefficients
    /// used per pivot (so `v = residual + sum coeff_k * pivot_k`). Pivot columns
    /// peak at their pivot row, so the working top index strictly decreases.
    pub fn reduce_vector(&self, v: SparseVec) -> (SparseVec, Vec<(u32, u32)>) {
        let mut used: Vec<(u32, u32)> = Vec::new();
        let mut residual: SparseVec = Vec::new();
        let mut stack = v;
        while let Some(&(row, coeff)) = stack.last() {
            match self.pivot_of_row[row as usize] {
                Some(k) => {
                    stack = axpy_sub(self.fp, &stack, coeff, &self.pivots[k as usize].col);
                    used.push((k, coeff));
                }
                None => {
                    residual.push((row, coeff));
                    stack.pop();
                }
            }
        }
        residual.reverse();
        (residual, used)
    }

    /// If `v` lies in the column span, returns `x` with `A x = v` in original
    /// column coordinates. Requires `Track::Ops`.
    pub fn solve(&self, v: SparseVec) -> Option<SparseVec> {
        let (residual, used) = self.reduce_vector(v);
        if !residual.is_empty() {
            return None;
        }
        let mut x: SparseVec = Vec::new();
        for (k, coeff) in used {
            let ops = self.pivots[k as usize]
                .ops
                .as_ref()
                .expect("solve requires Track::Ops");
            x = axpy_sub(self.fp, &x, self.fp.neg(coeff), ops);
        }
        Some(x)
    }
}

/// Dense row elimination, used as an independent oracle in tests and for tiny
/// systems like induced homology matrices.
pub fn dense_rank(fp: Prime, rows: &[Vec<u32>]) -> usize {
    let mut m: Vec<Vec<u32>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x % fp.get()).collect())
        .collect();
    let n_cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(pr) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = fp.inv(m[rank][col]);
        for x in m[rank].iter_mut() {
            *x = fp.mul(*x, inv);
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let c = m[r][col];
                let pivot_row = m[rank].clone();
                for (x, pv) in m[r].iter_mut().zip(pivot_row) {
                    *x = fp.sub(*x, fp.mul(c, pv));
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(3).is_ok());
        assert!(Prime::new(251).is_ok());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(4).is_err());
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(257).is_err());
    }

    #[test]
    fn field_inverses() {
        for p in [2u32, 3, 5, 7, 11] {
            let f = fp(p);
            for a in 1..p {
                assert_eq!(f.mul(a, f.inv(a)), 1, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn rank_of_small_known_matrices() {
        let f = fp(5);
        // identity-ish, a dependent column, and a zero column
        let m = SparseMat::from_columns(
            3,
            f,
            vec![
                vec![(0, 1), (1, 2)],
                vec![(1, 1)],
                vec![(0, 2), (1, 4)], // 2 * first - ... dependent on first two
                vec![],
            ],
        )
        .unwrap();
        let r = Reduction::of(&m, f, Track::Ops, Order::AsGiven);
        assert_eq!(r.rank(), 2);
        assert_eq!(r.kernel_basis().len(), 2);
        for k in r.kernel_basis() {
            assert!(m.mul_vec(f, k).is_empty(), "kernel vector not in kernel");
        }
    }

    #[test]
    fn boundary_of_triangle_has_rank_two_over_any_prime() {
        // edges {01,02,12} -> vertices, the usual simplicial boundary
        for p in [2u32, 3, 7] {
            let f = fp(p);
            let m = SparseMat::from_columns(
                3,
                f,
                vec![
                    vec![(0, -1), (1, 1)],
                    vec![(0, -1), (2, 1)],
                    vec![(1, -1), (2, 1)],
                ],
            )
            .unwrap();
            let r = Reduction::of(&m, f, Track::Ops, Order::BySupport);
            assert_eq!(r.rank(), 2);
            assert_eq!(r.kernel_basis().len(), 1);
        }
    }

    #[test]
    fn solve_reproduces_target() {
        let f = fp(3);
        let m = SparseMat::from_columns(
            4,
            f,
            vec![
                vec![(0, 1), (1, 1)],
                vec![(1, 1), (2, 1)],
                vec![(2, 1), (3, 1)],
            ],
        )
        .unwrap();
        let r = Reduction::of(&m, f, Track::Ops, Order::AsGiven);
        // v = col0 + 2*col2
        let v: SparseVec = vec![(0, 1), (1, 1), (2, 2), (3, 2)];
        let x = r.solve(v.clone()).expect("in span");
        let reproduced = m.mul_vec(f, &x);
        assert_eq!(reproduced, v);
        // something outside the span
        let w: SparseVec = vec![(0, 1)];
        assert!(r.solve(w).is_none());
    }

    fn sparse_from_dense(f: Prime, rows: &[Vec<u32>]) -> SparseMat {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let cols = (0..n_cols)
            .map(|c| {
                (0..n_rows)
                    .filter(|&r| rows[r][c] % f.get() != 0)
                    .map(|r| (r as u32, rows[r][c] as i64))
                    .collect()
            })
            .collect();
        SparseMat::from_columns(n_rows, f, cols).unwrap()
    }

    proptest! {
        #[test]
        fn sparse_rank_matches_dense_oracle(
            p in prop::sample::select(vec![2u32, 3, 5]),
            rows in prop::collection::vec(prop::collection::vec(0u32..5, 6), 1..8),
        ) {
            let f = fp(p);
            let m = sparse_from_dense(f, &rows);
            for order in [Order::AsGiven, Order::BySupport] {
                let r = Reduction::of(&m, f, Track::Ops, order);
                prop_assert_eq!(r.rank(), dense_rank(f, &rows));
                // rank-nullity, and kernel vectors are kernel vectors
                prop_assert_eq!(r.kernel_basis().len(), m.n_cols() - r.rank());
                for k in r.kernel_basis() {
                    prop_assert!(m.mul_vec(f, k).is_empty());
                }
            }
        }
    }
}
