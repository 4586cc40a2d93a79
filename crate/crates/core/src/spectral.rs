//! Roots of unity as the spectrum of the cyclic shift.
//!
//! The shift `S` on `C^n` is unitary, the unitary DFT `F` diagonalizes it
//! (`F S F† = diag(e^{2πik/n})`), and the principal-branch logarithm applied
//! to that diagonal gives a linear operator `L = F† diag(i·2πk/n) F` with
//! `exp(L) = S`. Dense and O(n³); meant for n in the hundreds.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operators need dimension >= 1");
        DenseOperator {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn diagonal_entries(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &DenseOperator) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &self.entries[i * n..(i + 1) * n];
            let dst = &mut out.entries[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = &rhs.entries[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }

    fn scale(&self, s: Complex64) -> Self {
        DenseOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    fn add_assign(&mut self, rhs: &DenseOperator) {
        for (a, &b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a += b;
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Deviation of `U†U` from the identity, entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring with a Taylor series.
    pub fn exp(&self) -> Self {
        let norm = self.one_norm();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = self.scale(Complex64::new((-(squarings as f64)).exp2(), 0.0));

        let mut sum = Self::identity(self.dim);
        let mut term = Self::identity(self.dim);
        for j in 1..=30 {
            term = term
                .matmul(&scaled)
                .scale(Complex64::new(1.0 / j as f64, 0.0));
            sum.add_assign(&term);
            if term.entries.iter().all(|z| z.norm() < 1e-18) {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        sum
    }

    /// One row per line, entries `re+imi` with 17 significant digits,
    /// space-separated.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if j > 0 {
                    out.push(' ');
                }
                let z = self[(i, j)];
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                write!(out, "{:.16e}{}{:.16e}i", z.re, sign, z.im.abs()).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for DenseOperator {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseOperator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Ones at `(i, i+1 mod n)`.
pub fn shift_operator(n: usize) -> DenseOperator {
    let mut m = DenseOperator::zeros(n);
    for i in 0..n {
        m[(i, (i + 1) % n)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// `F[j][k] = e^{-2πi·jk/n} / √n`.
pub fn dft_matrix(n: usize) -> DenseOperator {
    let scale = 1.0 / (n as f64).sqrt();
    DenseOperator::from_fn(n, |j, k| {
        // Reduce jk mod n first so the angle stays small and accurate.
        let phase = -TAU * (((j * k) % n) as f64) / n as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// Diagonal of `F S F†`, in Fourier index order.
pub fn eigenvalues_of_shift(n: usize) -> Vec<Complex64> {
    let f = dft_matrix(n);
    f.matmul(&shift_operator(n))
        .matmul(&f.adjoint())
        .diagonal_entries()
}

/// `i·2πk/n` for `k ∈ [0, n)`: principal logs of the shift's spectrum.
pub fn log_spectrum(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::new(0.0, TAU * k as f64 / n as f64))
        .collect()
}

/// `F† diag(i·2πk/n) F`.
pub fn log_operator(n: usize) -> DenseOperator {
    let f = dft_matrix(n);
    f.adjoint()
        .matmul(&DenseOperator::diagonal(&log_spectrum(n)))
        .matmul(&f)
}
