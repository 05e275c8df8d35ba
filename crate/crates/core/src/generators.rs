//! The ordered SU(d) generator basis and the Bloch-vector expansion
//! `rho = (I + sum_i r_i lambda_i) / d`.
//!
//! Basis kets are 0-indexed (`|0>..|d-1>`). Generator indices are 1-indexed,
//! `lambda_1..lambda_{d^2-1}`, laid out as:
//!
//! | indices                       | family                                 |
//! |-------------------------------|----------------------------------------|
//! | `1 ..= d-1`                   | diagonal `omega_l`, `l = i - 1`        |
//! | `d ..= (d-1)(d+2)/2`          | symmetric `u_jk = |j><k| + |k><j|`     |
//! | `d(d+1)/2 ..= d^2-1`          | antisymmetric `v_jk = -i(|j><k| - |k><j|)` |
//!
//! Inside the `u` and `v` blocks the pairs `j < k` run lexicographically:
//! `(0,1), (0,2), .., (0,d-1), (1,2), ..`. [`GeneratorKind::of`] and
//! [`GeneratorKind::index`] are the only places this mapping lives.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{trace_product, ComplexMatrix, C64};
use crate::states::DensityMatrix;

/// Bloch components with `|r_i|` at or below this are treated as zero.
pub const SUPPORT_TOL: f64 = 1e-9;

/// Which family a generator belongs to, with its 0-indexed labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneratorKind {
    Diagonal { l: usize },
    Symmetric { j: usize, k: usize },
    Antisymmetric { j: usize, k: usize },
}

fn pair_count(d: usize) -> usize {
    d * (d - 1) / 2
}

fn pair_position(d: usize, j: usize, k: usize) -> usize {
    j * d - j * (j + 1) / 2 + (k - j - 1)
}

fn pair_at(d: usize, mut pos: usize) -> (usize, usize) {
    for j in 0..d - 1 {
        let row = d - 1 - j;
        if pos < row {
            return (j, j + 1 + pos);
        }
        pos -= row;
    }
    unreachable!("pair position out of range")
}

impl GeneratorKind {
    /// Family and labels of generator `lambda_i` in dimension `d`.
    pub fn of(d: usize, i: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let max = d * d - 1;
        if i == 0 || i > max {
            return Err(Error::IndexOutOfRange { index: i, max });
        }
        let pairs = pair_count(d);
        Ok(if i < d {
            GeneratorKind::Diagonal { l: i - 1 }
        } else if i < d + pairs {
            let (j, k) = pair_at(d, i - d);
            GeneratorKind::Symmetric { j, k }
        } else {
            let (j, k) = pair_at(d, i - d - pairs);
            GeneratorKind::Antisymmetric { j, k }
        })
    }

    /// Inverse of [`GeneratorKind::of`].
    pub fn index(&self, d: usize) -> usize {
        match *self {
            GeneratorKind::Diagonal { l } => l + 1,
            GeneratorKind::Symmetric { j, k } => d + pair_position(d, j, k),
            GeneratorKind::Antisymmetric { j, k } => d + pair_count(d) + pair_position(d, j, k),
        }
    }

    fn matrix(&self, d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d);
        match *self {
            GeneratorKind::Diagonal { l } => {
                let scale = (2.0 / ((l + 1) * (l + 2)) as f64).sqrt();
                for i in 0..=l {
                    m[(i, i)] = C64::new(scale, 0.0);
                }
                m[(l + 1, l + 1)] = C64::new(-scale * (l + 1) as f64, 0.0);
            }
            GeneratorKind::Symmetric { j, k } => {
                m[(j, k)] = C64::new(1.0, 0.0);
                m[(k, j)] = C64::new(1.0, 0.0);
            }
            GeneratorKind::Antisymmetric { j, k } => {
                m[(j, k)] = C64::new(0.0, -1.0);
                m[(k, j)] = C64::new(0.0, 1.0);
            }
        }
        m
    }
}

/// Generator `lambda_i`, `1 <= i <= d^2 - 1`.
pub fn generator(d: usize, i: usize) -> Result<ComplexMatrix> {
    Ok(GeneratorKind::of(d, i)?.matrix(d))
}

/// All `d^2 - 1` generators in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBasis {
    dim: usize,
    matrices: Vec<ComplexMatrix>,
}

impl GeneratorBasis {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let matrices = (1..d * d)
            .map(|i| generator(d, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: d, matrices })
    }

    /// Shared, lazily built basis for dimension `d`.
    pub fn cached(d: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<GeneratorBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.read().expect("basis cache poisoned").get(&d) {
            return Ok(Arc::clone(b));
        }
        let built = Arc::new(Self::new(d)?);
        let mut guard = cache.write().expect("basis cache poisoned");
        Ok(Arc::clone(guard.entry(d).or_insert(built)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// `lambda_i`, 1-indexed.
    pub fn get(&self, i: usize) -> Option<&ComplexMatrix> {
        i.checked_sub(1).and_then(|k| self.matrices.get(k))
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.matrices.iter()
    }

    /// Generator indices of the off-diagonal (`u` and `v`) blocks.
    pub fn offdiag_indices(&self) -> std::ops::RangeInclusive<usize> {
        self.dim..=self.dim * self.dim - 1
    }
}

/// Real coefficient vector `r` of length `d^2 - 1`; `components[i-1] = r_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    dim: usize,
    components: Vec<f64>,
}

impl BlochVector {
    pub fn new(dim: usize, components: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if components.len() != dim * dim - 1 {
            return Err(Error::LengthMismatch {
                expected: dim * dim - 1,
                found: components.len(),
            });
        }
        Ok(Self { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// `r_i`, 1-indexed.
    pub fn get(&self, i: usize) -> Option<f64> {
        i.checked_sub(1)
            .and_then(|k| self.components.get(k).copied())
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &[f64]) -> Result<f64> {
        if other.len() != self.components.len() {
            return Err(Error::LengthMismatch {
                expected: self.components.len(),
                found: other.len(),
            });
        }
        Ok(self.components.iter().zip(other).map(|(a, b)| a * b).sum())
    }

    /// `sqrt(d(d-1)/2)`, the largest norm a valid state can reach.
    pub fn max_norm(dim: usize) -> f64 {
        ((dim * (dim - 1)) as f64 / 2.0).sqrt()
    }
}

/// `r_i = (d/2) Re Tr(rho lambda_i)`.
pub fn bloch_vector(rho: &DensityMatrix) -> BlochVector {
    let d = rho.dim();
    let basis = GeneratorBasis::cached(d).expect("density matrices have dim >= 2");
    let half_d = d as f64 / 2.0;
    let components = basis
        .iter()
        .map(|g| half_d * trace_product(rho.matrix(), g).expect("same dimension").re)
        .collect();
    BlochVector { dim: d, components }
}

/// `(I + sum_i r_i lambda_i) / d`. Hermitian with unit trace, but not
/// necessarily positive for `d >= 3`.
pub fn state_from_bloch(d: usize, r: &[f64]) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if r.len() != d * d - 1 {
        return Err(Error::LengthMismatch {
            expected: d * d - 1,
            found: r.len(),
        });
    }
    let basis = GeneratorBasis::cached(d)?;
    let mut acc = ComplexMatrix::identity(d);
    for (g, &ri) in basis.iter().zip(r) {
        if ri != 0.0 {
            acc = acc.add_scaled(g, ri)?;
        }
    }
    Ok(acc.scaled(1.0 / d as f64))
}

/// Off-diagonal generator indices `i >= d` with `|r_i| > SUPPORT_TOL`,
/// ascending. Empty exactly when every off-diagonal entry of `rho` is zero
/// within tolerance, since diagonal generators carry no off-diagonal weight.
pub fn offdiag_support(rho: &DensityMatrix) -> Vec<usize> {
    let r = bloch_vector(rho);
    let d = rho.dim();
    (d..d * d)
        .filter(|&i| r.components[i - 1].abs() > SUPPORT_TOL)
        .collect()
}
