//! Validated density matrices, incoherent states, seeded ensembles and the
//! l1-norm coherence oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_deviation, min_eigenvalue, ComplexMatrix, Tolerance, C64};
use crate::witness::Witness;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, &Tolerance::default())
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let deviation = hermiticity_deviation(&matrix);
        if deviation > tol.hermiticity {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol.trace_dev {
            return Err(Error::NotUnitTrace { trace });
        }
        let min = min_eigenvalue(&matrix, tol)?;
        if min < -tol.psd_floor {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { matrix })
    }

    /// Skips validation; only for matrices that are states by construction.
    fn trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Whether every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)] == C64::new(0.0, 0.0)))
    }
}

/// `sum_i p_i |i><i|` for a probability vector `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncoherentState {
    probs: Vec<f64>,
}

impl IncoherentState {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDimension(probs.len()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidProbabilities(format!(
                "entry {p} is not a probability"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbabilities(format!(
                "entries sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self {
            probs: vec![1.0 / d as f64; d],
        })
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::trusted(
            ComplexMatrix::from_diagonal(&self.probs).expect("validated probability vector"),
        )
    }

    /// `Tr(A delta) = sum_i Re(A_ii) p_i`.
    pub fn expectation(&self, a: &ComplexMatrix) -> Result<f64> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: self.dim(),
            });
        }
        Ok(a.diagonal_re()
            .iter()
            .zip(&self.probs)
            .map(|(w, p)| w * p)
            .sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

/// SplitMix64 (Steele, Lea and Flood 2014).
///
/// Recurrence: `state += 0x9E3779B97F4A7C15`, then the output mix
/// `z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
/// z ^ z>>31`. Uniform doubles take the top 53 bits: `(x >> 11) * 2^-53`.
/// The stream is fully determined by the seed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: Seed) -> Self {
        Self { state: seed.0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`, safe to take a logarithm of.
    pub fn next_f64_open0(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    /// Two independent standard normals via Box-Muller, returned as
    /// `re + i im`: `u1` from [`Self::next_f64_open0`], then `u2` from
    /// [`Self::next_f64`]; `re = R cos(2 pi u2)`, `im = R sin(2 pi u2)`,
    /// `R = sqrt(-2 ln u1)`.
    pub fn next_complex_normal(&mut self) -> C64 {
        let u1 = self.next_f64_open0();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        C64::new(radius * angle.cos(), radius * angle.sin())
    }

    /// Next value as a fresh seed, for deriving per-item streams.
    pub fn next_seed(&mut self) -> Seed {
        Seed(self.next_u64())
    }
}

/// Sum of off-diagonal moduli.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let d = m.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += m[(i, j)].norm();
            }
        }
    }
    acc
}

/// `G G^† / Tr(G G^†)` with `G` filled row-major from
/// [`SplitMix64::next_complex_normal`]. Panics if `d < 2`.
pub fn sample_ginibre(d: usize, seed: Seed) -> DensityMatrix {
    assert!(d >= 2, "dimension must be at least 2");
    let mut rng = SplitMix64::new(seed);
    let g: Vec<C64> = (0..d * d).map(|_| rng.next_complex_normal()).collect();
    let mut gg = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in i..d {
            let z: C64 = (0..d).map(|k| g[i * d + k] * g[j * d + k].conj()).sum();
            gg[(i, j)] = z;
            gg[(j, i)] = z.conj();
        }
        gg[(i, i)].im = 0.0;
    }
    let trace = gg.trace().re;
    DensityMatrix::trusted(gg.scaled(1.0 / trace))
}

/// Uniform point on the probability simplex: normalized `-ln(u_i)` draws.
/// Panics if `d < 2`.
pub fn sample_incoherent(d: usize, seed: Seed) -> IncoherentState {
    assert!(d >= 2, "dimension must be at least 2");
    let mut rng = SplitMix64::new(seed);
    let raw: Vec<f64> = (0..d).map(|_| -rng.next_f64_open0().ln()).collect();
    let total: f64 = raw.iter().sum();
    let probs = if total > 0.0 {
        raw.iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / d as f64; d]
    };
    IncoherentState { probs }
}

/// Random Hermitian matrix: entries uniform in `[-1, 1] + i[-1, 1]`,
/// symmetrized as `(A + A^†)/2`. Panics if `d < 2`.
pub fn sample_hermitian(d: usize, seed: Seed) -> ComplexMatrix {
    assert!(d >= 2, "dimension must be at least 2");
    let mut rng = SplitMix64::new(seed);
    let data = (0..d * d)
        .map(|_| {
            let re = 2.0 * rng.next_f64() - 1.0;
            let im = 2.0 * rng.next_f64() - 1.0;
            C64::new(re, im)
        })
        .collect();
    ComplexMatrix::from_row_major(d, data)
        .expect("finite entries")
        .hermitian_part()
}

/// `(1/d)(|0><1| + |1><0|) + I/d`.
pub fn canonical_coherent(d: usize) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::try_zeros(d)?;
    let w = 1.0 / d as f64;
    for i in 0..d {
        m[(i, i)] = C64::new(w, 0.0);
    }
    m[(0, 1)] = C64::new(w, 0.0);
    m[(1, 0)] = C64::new(w, 0.0);
    Ok(DensityMatrix::trusted(m))
}

/// Qubit state `(I + x sigma_1 + y sigma_2 + z sigma_3) / 2`; requires
/// `x^2 + y^2 + z^2 <= 1` up to the PSD tolerance.
pub fn qubit_state(x: f64, y: f64, z: f64) -> Result<DensityMatrix> {
    let m = ComplexMatrix::from_rows(&[
        vec![C64::new(0.5 * (1.0 + z), 0.0), C64::new(0.5 * x, -0.5 * y)],
        vec![C64::new(0.5 * x, 0.5 * y), C64::new(0.5 * (1.0 - z), 0.0)],
    ])?;
    DensityMatrix::new(m)
}

/// Incoherent state with `Tr(W delta_h) = h` for `h` in the witness interval.
///
/// For `m = M` this is the uniform distribution. Otherwise weight
/// `(M - h)/(M - m)` sits on the lowest index attaining `m` and
/// `(h - m)/(M - m)` on the lowest index attaining `M`.
pub fn delta_h(w: &Witness, h: f64) -> Result<IncoherentState> {
    let (lo, hi) = w.interval();
    let slack = 1e-12 * (1.0 + h.abs());
    if !h.is_finite() || h < lo - slack || h > hi + slack {
        return Err(Error::OutOfInterval { h, lo, hi });
    }
    let d = w.dim();
    if lo == hi {
        return IncoherentState::uniform(d);
    }
    let diag = w.matrix().diagonal_re();
    let min_idx = diag
        .iter()
        .position(|&x| x == lo)
        .expect("lo is a diagonal entry");
    let max_idx = diag
        .iter()
        .position(|&x| x == hi)
        .expect("hi is a diagonal entry");
    let width = hi - lo;
    let p_max = ((h - lo) / width).clamp(0.0, 1.0);
    let mut probs = vec![0.0; d];
    probs[min_idx] = 1.0 - p_max;
    probs[max_idx] = p_max;
    Ok(IncoherentState { probs })
}
