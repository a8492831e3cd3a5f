//! Dense linear algebra over a prime field `F_p`.
//!
//! Everything downstream (Hom spaces, kernels, cohomology dimensions) is reduced to
//! [`Matrix`] operations here. Elimination always pivots on the first nonzero entry,
//! scanning columns left to right and rows top to bottom, so every basis produced by
//! this module is reproducible bit for bit.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted for a session.
pub const MAX_PRIME: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not a prime")]
    NotPrime(u32),
    #[error("modulus {0} exceeds the supported bound {MAX_PRIME}")]
    TooLarge(u32),
}

/// The prime field `F_p`. Elements are plain `u32` values in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Fp {
    p: u32,
}

impl TryFrom<u32> for Fp {
    type Error = FieldError;

    fn try_from(p: u32) -> Result<Self, Self::Error> {
        Fp::new(p)
    }
}

impl From<Fp> for u32 {
    fn from(f: Fp) -> u32 {
        f.p
    }
}

impl Fp {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p > MAX_PRIME {
            return Err(FieldError::TooLarge(p));
        }
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    /// Reduce an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        // a^(p-2) by square and multiply
        let mut base = a as u64;
        let mut exp = self.p - 2;
        let mut acc = 1u64;
        let p = self.p as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u32
    }
}

/// A dense row-major matrix over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Output of [`Matrix::rref`]: `reduced = transform * m`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivot_cols: Vec<usize>,
    pub transform: Matrix,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[F_{}; {}x{}]", self.field.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "\n  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from signed integer rows, reducing mod p. All rows must have `cols` entries.
    pub fn from_rows(field: Fp, cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged row in matrix literal");
            data.extend(row.iter().map(|&x| field.reduce(x)));
        }
        Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(field: Fp, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % field.p);
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// A single column vector.
    pub fn column_vector(field: Fp, entries: &[u32]) -> Self {
        Matrix::from_fn(field, entries.len(), 1, |r, _| entries[r])
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(field: Fp, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, &x) in col.iter().enumerate() {
                m.data[r * m.cols + c] = x % field.p;
            }
        }
        m
    }

    #[inline]
    pub fn field(&self) -> Fp {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == u32::from(r == c)))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.field, other.field, "mixed characteristic");
        assert_eq!(
            self.cols, other.rows,
            "shape mismatch in product: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let p = self.field.p as u64;
        let n = other.cols;
        let mut acc = vec![0u64; n];
        let mut data = Vec::with_capacity(self.rows * n);
        for r in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let a = a as u64;
                // p <= 2^16, so each term is below 2^32 and the sum cannot overflow
                for (x, &b) in acc.iter_mut().zip(other.row(k)) {
                    *x += a * b as u64;
                }
            }
            data.extend(acc.iter().map(|&x| (x % p) as u32));
        }
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: n,
            data,
        }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(u32, u32) -> u32) -> Matrix {
        assert_eq!(self.field, other.field, "mixed characteristic");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        let k = self.field;
        self.zip_with(other, |a, b| k.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let k = self.field;
        self.zip_with(other, |a, b| k.sub(a, b))
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let k = self.field;
        Matrix {
            field: k,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| k.mul(a, s)).collect(),
        }
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Matrix::from_fn(self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                other.get(r, c - self.cols)
            }
        })
    }

    /// `[self ; other]`
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Assemble a block matrix; `blocks[i][j]` must agree in row counts along `i` and
    /// column counts along `j`.
    pub fn block(field: Fp, row_dims: &[usize], col_dims: &[usize], blocks: &[Vec<Option<Matrix>>]) -> Matrix {
        let rows: usize = row_dims.iter().sum();
        let cols: usize = col_dims.iter().sum();
        let mut m = Matrix::zeros(field, rows, cols);
        let mut r0 = 0;
        for (i, &rd) in row_dims.iter().enumerate() {
            let mut c0 = 0;
            for (j, &cd) in col_dims.iter().enumerate() {
                if let Some(b) = blocks.get(i).and_then(|row| row.get(j)).and_then(|b| b.as_ref()) {
                    assert_eq!((b.rows, b.cols), (rd, cd), "block ({i},{j}) has wrong shape");
                    m.paste(r0, c0, b);
                }
                c0 += cd;
            }
            r0 += rd;
        }
        m
    }

    /// Copy `b` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for r in 0..b.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(r));
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), cols.len(), |r, c| {
            self.get(rows.start + r, cols.start + c)
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), self.cols, |r, c| self.get(rows[r], c))
    }

    /// Reshape into a single column (row-major order of entries).
    pub fn flatten(&self) -> Vec<u32> {
        self.data.clone()
    }

    /// Reduced row-echelon form together with the invertible transform that produces it.
    pub fn rref(&self) -> Rref {
        let mut reduced = self.clone();
        let mut transform = Matrix::identity(self.field, self.rows);
        let pivot_cols = eliminate(&mut reduced, Some(&mut transform));
        Rref {
            reduced,
            pivot_cols,
            transform,
        }
    }

    /// Reduced row-echelon form and pivot columns, without tracking the transform.
    pub fn rref_only(&self) -> (Matrix, Vec<usize>) {
        let mut reduced = self.clone();
        let pivots = eliminate(&mut reduced, None);
        (reduced, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref_only().1.len()
    }

    /// Columns form a basis of `{x : self * x = 0}`.
    pub fn kernel_basis(&self) -> Matrix {
        let (reduced, pivots) = self.rref_only();
        let k = self.field;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = Matrix::zeros(k, self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            basis.set(f, j, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                basis.set(pc, j, k.neg(reduced.get(r, f)));
            }
        }
        basis
    }

    /// Columns of `self` at its pivot positions: a basis of the column space.
    pub fn column_space_basis(&self) -> Matrix {
        let (_, pivots) = self.rref_only();
        self.select_columns(&pivots)
    }

    /// Solve `self * x = b`. Free variables are set to zero.
    pub fn solve(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, b.rows, "solve: row count mismatch");
        let aug = self.hstack(b);
        let (reduced, pivots) = aug.rref_only();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, reduced.get(r, self.cols + j));
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let r = self.rref();
        (r.rank() == self.rows).then_some(r.transform)
    }
}

/// In-place Gauss-Jordan elimination; returns the pivot columns.
fn eliminate(m: &mut Matrix, mut transform: Option<&mut Matrix>) -> Vec<usize> {
    let k = m.field;
    let cols = m.cols;
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.rows {
            break;
        }
        let Some(pr) = (row..m.rows).find(|&r| m.data[r * cols + col] != 0) else {
            continue;
        };
        if pr != row {
            swap_rows(m, pr, row);
            if let Some(t) = transform.as_deref_mut() {
                swap_rows(t, pr, row);
            }
        }
        let inv = k.inv(m.data[row * cols + col]);
        scale_row(m, row, inv);
        if let Some(t) = transform.as_deref_mut() {
            scale_row(t, row, inv);
        }
        for r in 0..m.rows {
            if r == row {
                continue;
            }
            let factor = m.data[r * cols + col];
            if factor != 0 {
                axpy_row(m, r, row, k.neg(factor));
                if let Some(t) = transform.as_deref_mut() {
                    axpy_row(t, r, row, k.neg(factor));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

fn swap_rows(m: &mut Matrix, a: usize, b: usize) {
    let cols = m.cols;
    for c in 0..cols {
        m.data.swap(a * cols + c, b * cols + c);
    }
}

fn scale_row(m: &mut Matrix, r: usize, s: u32) {
    let k = m.field;
    let cols = m.cols;
    for x in &mut m.data[r * cols..(r + 1) * cols] {
        *x = k.mul(*x, s);
    }
}

/// row[dst] += s * row[src]
fn axpy_row(m: &mut Matrix, dst: usize, src: usize, s: u32) {
    let k = m.field;
    let cols = m.cols;
    let (a, b) = if dst < src {
        let (lo, hi) = m.data.split_at_mut(src * cols);
        (&mut lo[dst * cols..(dst + 1) * cols], &hi[..cols])
    } else {
        let (lo, hi) = m.data.split_at_mut(dst * cols);
        (&mut hi[..cols], &lo[src * cols..(src + 1) * cols])
    };
    for (x, &y) in a.iter_mut().zip(b) {
        if y != 0 {
            *x = k.add(*x, k.mul(s, y));
        }
    }
}

/// Rank of a family of vectors of equal length `len`.
pub fn rank_of_vectors(field: Fp, len: usize, vectors: &[Vec<u32>]) -> usize {
    if vectors.is_empty() || len == 0 {
        return 0;
    }
    let rows: Vec<&[u32]> = vectors.iter().map(|v| v.as_slice()).collect();
    let mut m = Matrix::zeros(field, rows.len(), len);
    for (r, v) in rows.iter().enumerate() {
        assert_eq!(v.len(), len);
        m.data[r * len..(r + 1) * len].copy_from_slice(v);
    }
    m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn field_rejects_composites_and_large() {
        assert_eq!(Fp::new(4), Err(FieldError::NotPrime(4)));
        assert_eq!(Fp::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(Fp::new(65537), Err(FieldError::TooLarge(65537)));
        assert!(Fp::new(65521).is_ok());
        let k = f(7);
        for a in 1..7 {
            assert_eq!(k.mul(a, k.inv(a)), 1);
        }
    }

    #[test]
    fn rref_empty() {
        let m = Matrix::zeros(f(2), 0, 0);
        let r = m.rref();
        assert_eq!(r.reduced, m);
        assert!(r.pivot_cols.is_empty());
    }

    #[test]
    fn rref_identity() {
        let id = Matrix::identity(f(2), 3);
        let r = id.rref();
        assert_eq!(r.reduced, id);
        assert_eq!(r.pivot_cols, vec![0, 1, 2]);
    }

    #[test]
    fn rref_ones_f2() {
        let m = Matrix::from_rows(f(2), 2, &[vec![1, 1], vec![1, 1]]);
        let r = m.rref();
        assert_eq!(r.reduced, Matrix::from_rows(f(2), 2, &[vec![1, 1], vec![0, 0]]));
        assert_eq!(r.pivot_cols, vec![0]);
        assert_eq!(r.transform.mul(&m), r.reduced);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(f(5), 4).kernel_basis().cols(), 0);
        let z = Matrix::zeros(f(3), 2, 3);
        let kb = z.kernel_basis();
        assert_eq!(kb.cols(), 3);
        assert_eq!(kb.rank(), 3);
        let m = Matrix::from_rows(f(2), 2, &[vec![1, 1]]);
        assert_eq!(m.kernel_basis(), Matrix::from_rows(f(2), 1, &[vec![1], vec![1]]));
    }

    #[test]
    fn kernel_matches_enumeration_f2() {
        // brute force: enumerate F_2^2 and keep the solutions of [[1,1]] x = 0
        let m = Matrix::from_rows(f(2), 2, &[vec![1, 1]]);
        let sols: Vec<[u32; 2]> = (0..4u32)
            .map(|b| [b & 1, (b >> 1) & 1])
            .filter(|x| (x[0] + x[1]) % 2 == 0)
            .collect();
        // 2^(kernel dim) solutions
        assert_eq!(sols.len(), 1 << m.kernel_basis().cols());
        assert!(sols.contains(&[1, 1]));
    }

    #[test]
    fn solve_examples() {
        let k = f(3);
        let b = Matrix::from_rows(k, 2, &[vec![1, 2], vec![0, 1], vec![2, 2]]);
        assert_eq!(Matrix::identity(k, 3).solve(&b), Some(b.clone()));
        let a = Matrix::from_rows(f(2), 2, &[vec![1, 1]]);
        let x = a.solve(&Matrix::from_rows(f(2), 1, &[vec![1]])).unwrap();
        assert_eq!(x, Matrix::from_rows(f(2), 1, &[vec![1], vec![0]]));
        let z = Matrix::zeros(f(2), 1, 1);
        assert_eq!(z.solve(&Matrix::from_rows(f(2), 1, &[vec![1]])), None);
    }

    #[test]
    #[should_panic]
    fn solve_dimension_mismatch_panics() {
        let a = Matrix::identity(f(2), 2);
        let _ = a.solve(&Matrix::zeros(f(2), 3, 1));
    }

    #[test]
    fn inverse_roundtrip() {
        let k = f(5);
        let m = Matrix::from_rows(k, 2, &[vec![1, 2], vec![3, 4]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(Matrix::from_rows(k, 2, &[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix> {
        (prop::sample::select(vec![2u32, 3, 5]), 0usize..=12, 0usize..=12).prop_flat_map(|(p, r, c)| {
            prop::collection::vec(0..p, r * c)
                .prop_map(move |v| Matrix::from_fn(Fp::new(p).unwrap(), r, c, |i, j| v[i * c + j]))
        })
    }

    proptest! {
        #[test]
        fn rref_transform_and_kernel(m in arb_matrix()) {
            let r = m.rref();
            prop_assert_eq!(r.transform.mul(&m), r.reduced.clone());
            prop_assert!(r.transform.inverse().is_some());
            let kb = m.kernel_basis();
            prop_assert!(m.mul(&kb).is_zero());
            prop_assert_eq!(r.rank() + kb.cols(), m.cols());
            // pivots are leading ones and pivot columns are unit vectors
            for (row, &pc) in r.pivot_cols.iter().enumerate() {
                prop_assert_eq!(r.reduced.get(row, pc), 1);
                for other in 0..m.rows() {
                    if other != row {
                        prop_assert_eq!(r.reduced.get(other, pc), 0);
                    }
                }
            }
        }

        #[test]
        fn solve_is_exact_or_inconsistent(m in arb_matrix(), seed in any::<u64>()) {
            let k = m.field();
            let p = k.modulus() as u64;
            let b = Matrix::from_fn(k, m.rows(), 1, |i, _| ((seed >> (i % 60)) % p) as u32);
            match m.solve(&b) {
                Some(x) => prop_assert_eq!(m.mul(&x), b),
                None => prop_assert!(m.hstack(&b).rank() > m.rank()),
            }
        }
    }
}
