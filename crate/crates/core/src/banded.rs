//! Banded LU factorization with partial pivoting.
//!
//! Row-oriented band storage: row `i` keeps columns `i - kl ..= i + kl + ku`,
//! the extra `kl` super-diagonals holding the fill produced by row
//! interchanges. The factorization is kept as the sequence of interchanges and
//! unit-lower eliminations, in the same spirit as LAPACK `gbtrf`.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalars the banded solver works with.
pub trait BandScalar:
    Copy
    + Default
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn modulus(&self) -> f64;
    fn is_zero(&self) -> bool {
        *self == Self::default()
    }
}

impl BandScalar for f64 {
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl BandScalar for Complex64 {
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

/// A square banded matrix under assembly.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: BandScalar> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![T::default(); n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, row: usize, col: usize) -> usize {
        debug_assert!(col + self.kl >= row && col <= row + self.kl + self.ku);
        row * self.width + (col + self.kl - row)
    }

    /// Adds `value` at `(row, col)`; the entry must lie inside the band.
    pub fn add(&mut self, row: usize, col: usize, value: T) {
        assert!(
            col + self.kl >= row && col <= row + self.ku,
            "entry ({row}, {col}) outside band (kl = {}, ku = {})",
            self.kl,
            self.ku
        );
        let s = self.slot(row, col);
        self.data[s] = self.data[s] + value;
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        if col + self.kl < row || col > row + self.ku {
            return T::default();
        }
        self.data[self.slot(row, col)]
    }

    /// Matrix-vector product with the assembled (unfactored) matrix.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).fold(T::default(), |acc, j| acc + self.get(i, j) * x[j])
            })
            .collect()
    }

    /// Factorizes in place. On a zero pivot returns the offending row.
    pub fn factorize(mut self) -> Result<BandLu<T>, usize> {
        let n = self.n;
        let kl = self.kl;
        let reach = kl + self.ku;
        let mut pivots = vec![0usize; n];
        for i in 0..n {
            let last_row = (i + kl).min(n - 1);
            let mut p = i;
            let mut best = self.data[self.slot(i, i)].modulus();
            for r in i + 1..=last_row {
                let m = self.data[self.slot(r, i)].modulus();
                if m > best {
                    best = m;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(i);
            }
            pivots[i] = p;
            let last_col = (i + reach).min(n - 1);
            if p != i {
                for c in i..=last_col {
                    let a = self.slot(i, c);
                    let b = self.slot(p, c);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(i, i)];
            for r in i + 1..=last_row {
                let s = self.slot(r, i);
                if self.data[s].is_zero() {
                    continue;
                }
                let l = self.data[s] / pivot;
                self.data[s] = l;
                for c in i + 1..=last_col {
                    let u = self.data[self.slot(i, c)];
                    if u.is_zero() {
                        continue;
                    }
                    let t = self.slot(r, c);
                    self.data[t] = self.data[t] - l * u;
                }
            }
        }
        Ok(BandLu { mat: self, pivots })
    }
}

/// Factorized banded matrix, reusable for many right-hand sides.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    mat: BandMatrix<T>,
    pivots: Vec<usize>,
}

impl<T: BandScalar> BandLu<T> {
    pub fn dim(&self) -> usize {
        self.mat.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let a = &self.mat;
        let n = a.n;
        assert_eq!(b.len(), n);
        for i in 0..n {
            let p = self.pivots[i];
            if p != i {
                b.swap(i, p);
            }
            let bi = b[i];
            if bi.is_zero() {
                continue;
            }
            for r in i + 1..=(i + a.kl).min(n - 1) {
                let l = a.data[a.slot(r, i)];
                b[r] = b[r] - l * bi;
            }
        }
        let reach = a.kl + a.ku;
        for i in (0..n).rev() {
            let mut acc = b[i];
            for c in i + 1..=(i + reach).min(n - 1) {
                acc = acc - a.data[a.slot(i, c)] * b[c];
            }
            b[i] = acc / a.data[a.slot(i, i)];
        }
    }
}
