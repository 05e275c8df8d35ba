//! Dense complex matrices and the Hermitian primitives shared by every module.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

/// Numerical tolerances used across validation and detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Max `|A_ij - conj(A_ji)|` accepted as Hermitian.
    pub hermiticity: f64,
    /// Eigenvalues down to `-psd_floor` are accepted as nonnegative.
    pub psd_floor: f64,
    /// Max `|Tr(rho) - 1|`.
    pub trace_dev: f64,
    /// Detection requires a margin strictly above this.
    pub detect_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            psd_floor: 1e-9,
            trace_dev: 1e-9,
            detect_eps: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn is_valid(&self) -> bool {
        [
            self.hermiticity,
            self.psd_floor,
            self.trace_dev,
            self.detect_eps,
        ]
        .iter()
        .all(|t| t.is_finite() && *t >= 0.0)
    }
}

/// Square complex matrix stored row-major, `dim >= 2`, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Zero matrix. Panics if `dim < 2`; use [`ComplexMatrix::try_zeros`] for
    /// unchecked input.
    pub fn zeros(dim: usize) -> Self {
        Self::try_zeros(dim).expect("matrix dimension must be at least 2")
    }

    pub fn try_zeros(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::from_row_major(dim, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::try_zeros(diag.len())?;
        for (i, &x) in diag.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { row: i, col: i });
            }
            m[(i, i)] = C64::new(x, 0.0);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(<[C64]>::to_vec).collect()
    }

    /// Real parts of the diagonal.
    pub fn diagonal_re(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// `(A + A^†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b * s)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self, other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

/// Largest `|A_ij - conj(A_ji)|`.
pub fn hermiticity_deviation(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(a: &ComplexMatrix, tol: f64) -> bool {
    hermiticity_deviation(a) <= tol
}

/// `Tr(AB) = sum_ij A_ij B_ji`, without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    check_dims(a, b)?;
    let d = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

/// Ascending eigenvalues of the Hermitian part of `a`.
pub fn hermitian_eigenvalues(a: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<f64>> {
    ensure_hermitian(a, tol)?;
    let mut evs: Vec<f64> = a
        .hermitian_part()
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    evs.sort_by(f64::total_cmp);
    Ok(evs)
}

/// Smallest eigenvalue of the Hermitian part `(A + A^†)/2`.
///
/// 2x2 inputs use the closed form; larger ones go through a symmetric
/// tridiagonal QR eigensolver.
pub fn min_eigenvalue(a: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    ensure_hermitian(a, tol)?;
    if a.dim() == 2 {
        let p = a[(0, 0)].re;
        let q = a[(1, 1)].re;
        let off = (a[(0, 1)] + a[(1, 0)].conj()) * 0.5;
        let half_gap = 0.5 * (p - q);
        return Ok(0.5 * (p + q) - half_gap.hypot(off.norm()));
    }
    Ok(hermitian_eigenvalues(a, tol)?[0])
}

fn ensure_hermitian(a: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    let deviation = hermiticity_deviation(a);
    if deviation > tol.hermiticity {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma1() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn sigma2() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    // Cyclic Jacobi on the real symmetric embedding [[Re, -Im], [Im, Re]].
    // Every eigenvalue of the Hermitian input appears twice.
    fn jacobi_min_eigenvalue(a: &ComplexMatrix) -> f64 {
        let d = a.dim();
        let n = 2 * d;
        let mut m = vec![vec![0.0f64; n]; n];
        for i in 0..d {
            for j in 0..d {
                let z = a[(i, j)];
                m[i][j] = z.re;
                m[i + d][j + d] = z.re;
                m[i][j + d] = -z.im;
                m[i + d][j] = z.im;
            }
        }
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[i][j] * m[i][j])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if m[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let cs = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * cs;
                    for k in 0..n {
                        let mkp = m[k][p];
                        let mkq = m[k][q];
                        m[k][p] = cs * mkp - sn * mkq;
                        m[k][q] = sn * mkp + cs * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[p][k];
                        let mqk = m[q][k];
                        m[p][k] = cs * mpk - sn * mqk;
                        m[q][k] = sn * mpk + cs * mqk;
                    }
                }
            }
        }
        (0..n).map(|i| m[i][i]).fold(f64::INFINITY, f64::min)
    }

    fn arb_hermitian(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        (2..=max_dim).prop_flat_map(|d| {
            proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), d * d).prop_map(move |v| {
                let raw = ComplexMatrix::from_row_major(
                    d,
                    v.into_iter().map(|(re, im)| C64::new(re, im)).collect(),
                )
                .unwrap();
                raw.hermitian_part()
            })
        })
    }

    #[test]
    fn hermiticity_examples() {
        assert!(is_hermitian(&sigma1(), 1e-10));
        let bad = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(!is_hermitian(&bad, 1e-10));
        let near = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 1e-12)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(is_hermitian(&near, 1e-10));
    }

    #[test]
    fn trace_product_examples() {
        assert_eq!(trace_product(&sigma1(), &sigma1()).unwrap(), c(2.0, 0.0));
        assert_eq!(trace_product(&sigma1(), &sigma2()).unwrap(), c(0.0, 0.0));
        let rho = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.1, 0.2), c(0.0, 0.0)],
            vec![c(0.1, -0.2), c(0.3, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.2, 0.0)],
        ])
        .unwrap();
        let t = trace_product(&ComplexMatrix::identity(3), &rho).unwrap();
        assert_abs_diff_eq!(t.re, 1.0, epsilon = 1e-15);
        assert_eq!(t.im, 0.0);
    }

    #[test]
    fn trace_product_dimension_mismatch() {
        let err = trace_product(&sigma1(), &ComplexMatrix::identity(3)).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn min_eigenvalue_examples() {
        let tol = Tolerance::default();
        let sigma3 = ComplexMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert_eq!(min_eigenvalue(&sigma3, &tol).unwrap(), -1.0);
        let proj = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_abs_diff_eq!(min_eigenvalue(&proj, &tol).unwrap(), 0.0, epsilon = 1e-15);

        // lambda^2 - lambda - 2.25 = 0 for [[1, 1.5], [1.5, 0]].
        let w = ComplexMatrix::from_real_rows(&[vec![1.0, 1.5], vec![1.5, 0.0]]).unwrap();
        let root = (1.0 - (1.0f64 + 4.0 * 2.25).sqrt()) / 2.0;
        assert_abs_diff_eq!(root, (1.0 - 10f64.sqrt()) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(min_eigenvalue(&w, &tol).unwrap(), root, epsilon = 1e-12);
        assert_abs_diff_eq!(root, -1.0811388300841898, epsilon = 1e-15);
    }

    #[test]
    fn min_eigenvalue_rejects_non_hermitian() {
        let bad = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            min_eigenvalue(&bad, &Tolerance::default()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(
            ComplexMatrix::from_row_major(1, vec![c(1.0, 0.0)]).unwrap_err(),
            Error::InvalidDimension(1)
        );
        assert_eq!(
            ComplexMatrix::from_row_major(2, vec![c(1.0, 0.0); 3]).unwrap_err(),
            Error::LengthMismatch {
                expected: 4,
                found: 3
            }
        );
        let mut data = vec![c(0.0, 0.0); 4];
        data[3] = c(0.0, f64::NAN);
        assert_eq!(
            ComplexMatrix::from_row_major(2, data).unwrap_err(),
            Error::NonFinite { row: 1, col: 1 }
        );
    }

    proptest! {
        #[test]
        fn trace_product_commutes(a in arb_hermitian(6), seed in 0u64..1000) {
            let d = a.dim();
            let b = crate::states::sample_hermitian(d, crate::states::Seed(seed));
            let ab = trace_product(&a, &b).unwrap();
            let ba = trace_product(&b, &a).unwrap();
            prop_assert!((ab - ba).norm() <= 1e-12 * (1.0 + ab.norm()));
        }

        #[test]
        fn hermitian_times_state_is_real(a in arb_hermitian(6), seed in 0u64..1000) {
            let rho = crate::states::sample_ginibre(a.dim(), crate::states::Seed(seed));
            let t = trace_product(&a, rho.matrix()).unwrap();
            prop_assert!(t.im.abs() <= 1e-10);
            prop_assert!(t.im.abs() <= 1e-10 * (1.0 + t.re.abs()));
        }

        #[test]
        fn min_eigenvalue_shift(a in arb_hermitian(6), shift in -5.0f64..5.0) {
            let tol = Tolerance::default();
            let shifted = a.add_scaled(&ComplexMatrix::identity(a.dim()), shift).unwrap();
            let base = min_eigenvalue(&a, &tol).unwrap();
            let moved = min_eigenvalue(&shifted, &tol).unwrap();
            prop_assert!((moved - base - shift).abs() <= 1e-9);
        }

        #[test]
        fn min_eigenvalue_matches_jacobi(a in arb_hermitian(6)) {
            let got = min_eigenvalue(&a, &Tolerance::default()).unwrap();
            let want = jacobi_min_eigenvalue(&a);
            let radius = hermitian_eigenvalues(&a, &Tolerance::default())
                .unwrap()
                .iter()
                .fold(0.0f64, |acc, x| acc.max(x.abs()));
            prop_assert!((got - want).abs() <= 1e-10 * radius.max(1.0));
        }
    }
}
