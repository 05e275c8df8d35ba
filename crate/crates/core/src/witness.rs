//! Interval coherence witnesses.
//!
//! A [`Witness`] is a Hermitian matrix together with the interval `[m, M]`
//! spanned by the real parts of its diagonal. Every incoherent state has
//! expectation inside `[m, M]`, so a state whose expectation falls outside is
//! coherent. Detection is strict with tolerance: a state is [`Verdict::Detected`]
//! only when its margin exceeds `detect_eps`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{bloch_vector, offdiag_support, GeneratorBasis};
use crate::linalg::{hermiticity_deviation, trace_product, ComplexMatrix, Tolerance, C64};
use crate::states::DensityMatrix;

/// Off-diagonal entries at or below this modulus are treated as zero when
/// tailoring a witness.
pub const COHERENCE_TOL: f64 = 1e-9;

/// Below this, `sqrt(a^2 + b^2)` is flagged as numerically marginal.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Which component of `rho_kl` a tailored witness reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Re,
    Im,
}

/// How a witness was built. Entry labels (`row`, `col`) are 1-indexed;
/// `index` fields are 1-indexed generator indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Origin {
    Lemma2 {
        d: usize,
        m: f64,
        #[serde(rename = "M")]
        big_m: f64,
    },
    Tailored {
        m: f64,
        #[serde(rename = "M")]
        big_m: f64,
        row: usize,
        col: usize,
        component: Component,
        epsilon: f64,
    },
    Qubit {
        #[serde(rename = "K")]
        k: f64,
        a: f64,
        b: f64,
        c: f64,
    },
    Eta {
        #[serde(rename = "K")]
        k: f64,
        eta: Vec<f64>,
    },
    FamilyMember {
        family: String,
        index: usize,
        #[serde(rename = "K")]
        k: f64,
        s: f64,
    },
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    matrix: ComplexMatrix,
    lo: f64,
    hi: f64,
    detect_eps: f64,
    origin: Origin,
}

impl Witness {
    /// Wraps a Hermitian matrix; the interval is read off its diagonal.
    pub fn from_matrix(matrix: ComplexMatrix, detect_eps: f64) -> Result<Self> {
        Self::build(matrix, detect_eps, Origin::Custom)
    }

    pub(crate) fn build(matrix: ComplexMatrix, detect_eps: f64, origin: Origin) -> Result<Self> {
        let deviation = hermiticity_deviation(&matrix);
        if deviation > Tolerance::default().hermiticity {
            return Err(Error::NotHermitian { deviation });
        }
        if !(detect_eps.is_finite() && detect_eps >= 0.0) {
            return Err(Error::Document(format!(
                "detect_eps must be finite and nonnegative, got {detect_eps}"
            )));
        }
        let diag = matrix.diagonal_re();
        let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            matrix,
            lo,
            hi,
            detect_eps,
            origin,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `(m, M)`.
    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn detect_eps(&self) -> f64 {
        self.detect_eps
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn with_detect_eps(mut self, detect_eps: f64) -> Result<Self> {
        if !(detect_eps.is_finite() && detect_eps >= 0.0) {
            return Err(Error::Document(format!(
                "detect_eps must be finite and nonnegative, got {detect_eps}"
            )));
        }
        self.detect_eps = detect_eps;
        Ok(self)
    }

    pub(crate) fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    /// Report for a raw expectation value.
    pub fn judge(&self, value: f64) -> DetectionReport {
        let margin = (self.lo - value).max(value - self.hi);
        let verdict = if margin > self.detect_eps {
            Verdict::Detected
        } else {
            Verdict::NotDetected
        };
        DetectionReport {
            value,
            interval: [self.lo, self.hi],
            margin,
            detect_eps: self.detect_eps,
            verdict,
        }
    }

    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<DetectionReport> {
        evaluate(self, rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Detected,
    NotDetected,
}

impl Verdict {
    pub fn is_detected(self) -> bool {
        self == Verdict::Detected
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Detected => "Detected",
            Verdict::NotDetected => "NotDetected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    /// `Re Tr(W rho)`.
    pub value: f64,
    pub interval: [f64; 2],
    /// `max(m - value, value - M)`; positive means outside the interval.
    pub margin: f64,
    pub detect_eps: f64,
    pub verdict: Verdict,
}

pub fn evaluate(w: &Witness, rho: &DensityMatrix) -> Result<DetectionReport> {
    let value = trace_product(w.matrix(), rho.matrix())?.re;
    Ok(w.judge(value))
}

/// An ordered, nonempty set of witnesses of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessFamily {
    label: String,
    members: Vec<Witness>,
}

impl WitnessFamily {
    pub fn new(label: impl Into<String>, members: Vec<Witness>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyFamily)?;
        if let Some(bad) = members.iter().find(|w| w.dim() != first.dim()) {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: bad.dim(),
            });
        }
        Ok(Self {
            label: label.into(),
            members,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn members(&self) -> &[Witness] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn push(&mut self, w: Witness) -> Result<()> {
        if w.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: w.dim(),
            });
        }
        self.members.push(w);
        Ok(())
    }

    pub fn reports(&self, rho: &DensityMatrix) -> Result<Vec<DetectionReport>> {
        self.members.iter().map(|w| evaluate(w, rho)).collect()
    }

    pub fn verdicts(&self, rho: &DensityMatrix) -> Result<Vec<Verdict>> {
        Ok(self.reports(rho)?.into_iter().map(|r| r.verdict).collect())
    }

    /// Whether at least one member detects `rho`.
    pub fn detects(&self, rho: &DensityMatrix) -> Result<bool> {
        Ok(self.verdicts(rho)?.iter().any(|v| v.is_detected()))
    }
}

fn check_interval(m: f64, big_m: f64) -> Result<()> {
    if !(m.is_finite() && big_m.is_finite()) || m > big_m {
        return Err(Error::InvalidInterval { lo: m, hi: big_m });
    }
    Ok(())
}

/// Diagonal `(M, m, M, .., M)` with `(d - m + M)/2` at entries `(0,1)` and
/// `(1,0)`. Its expectation on [`crate::states::canonical_coherent`] is
/// exactly `M + 1`.
pub fn lemma2_witness(d: usize, m: f64, big_m: f64) -> Result<Witness> {
    check_interval(m, big_m)?;
    let mut w = ComplexMatrix::try_zeros(d)?;
    for i in 0..d {
        w[(i, i)] = C64::new(big_m, 0.0);
    }
    w[(1, 1)] = C64::new(m, 0.0);
    let off = C64::new((d as f64 - m + big_m) / 2.0, 0.0);
    w[(0, 1)] = off;
    w[(1, 0)] = off;
    Witness::build(
        w,
        Tolerance::default().detect_eps,
        Origin::Lemma2 { d, m, big_m },
    )
}

/// `(|k><l| + |l><k|)/2` or `i(|k><l| - |l><k|)/2`; zero diagonal, and
/// `Tr(. rho)` is `Re rho_kl` or `Im rho_kl` respectively.
fn offdiag_probe(d: usize, k: usize, l: usize, component: Component) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(d);
    match component {
        Component::Re => {
            p[(k, l)] = C64::new(0.5, 0.0);
            p[(l, k)] = C64::new(0.5, 0.0);
        }
        Component::Im => {
            p[(k, l)] = C64::new(0.0, 0.5);
            p[(l, k)] = C64::new(0.0, -0.5);
        }
    }
    p
}

/// A witness with interval exactly `[m, M]` that detects `rho`.
///
/// Picks the upper-triangle entry `rho_kl` of largest modulus (ties go to the
/// lexicographically lowest `(k, l)`) and reads whichever of its real or
/// imaginary parts is larger in magnitude. For `m = M` the witness is
/// `probe + m I`, with value `m + component`. For `m < M` it is
/// `lemma2_witness(d, m, M) + eps * probe` with `eps` chosen so the value is
/// `M + 1`.
pub fn tailored_witness(rho: &DensityMatrix, m: f64, big_m: f64) -> Result<Witness> {
    check_interval(m, big_m)?;
    let d = rho.dim();
    let mat = rho.matrix();
    let mut best: Option<(usize, usize, f64)> = None;
    for k in 0..d {
        for l in k + 1..d {
            let modulus = mat[(k, l)].norm();
            if best.is_none_or(|(_, _, b)| modulus > b) {
                best = Some((k, l, modulus));
            }
        }
    }
    let (k, l, modulus) = best.expect("d >= 2 has an off-diagonal entry");
    if modulus <= COHERENCE_TOL {
        return Err(Error::NotCoherent);
    }
    let entry = mat[(k, l)];
    let (component, value) = if entry.re.abs() >= entry.im.abs() {
        (Component::Re, entry.re)
    } else {
        (Component::Im, entry.im)
    };
    let probe = offdiag_probe(d, k, l, component);

    let (matrix, epsilon) = if m == big_m {
        (probe.add_scaled(&ComplexMatrix::identity(d), m)?, 1.0)
    } else {
        let base = lemma2_witness(d, m, big_m)?;
        let t0 = trace_product(base.matrix(), mat)?.re;
        let epsilon = (big_m + 1.0 - t0) / value;
        if epsilon == 0.0 {
            (base.matrix().clone(), 0.0)
        } else {
            (base.matrix().add_scaled(&probe, epsilon)?, epsilon)
        }
    };
    let origin = Origin::Tailored {
        m,
        big_m,
        row: k + 1,
        col: l + 1,
        component,
        epsilon,
    };
    let w = Witness::build(matrix, Tolerance::default().detect_eps, origin)?;
    debug_assert_eq!(w.interval(), (m, big_m));
    Ok(w)
}

/// `(K I + a sigma_1 + b sigma_2 + c sigma_3) / 2`, interval
/// `[(K - |c|)/2, (K + |c|)/2]`.
pub fn qubit_witness(k: f64, a: f64, b: f64, c: f64) -> Result<Witness> {
    if a == 0.0 && b == 0.0 && c == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let m = ComplexMatrix::from_rows(&[
        vec![C64::new(0.5 * (k + c), 0.0), C64::new(0.5 * a, -0.5 * b)],
        vec![C64::new(0.5 * a, 0.5 * b), C64::new(0.5 * (k - c), 0.0)],
    ])?;
    Witness::build(
        m,
        Tolerance::default().detect_eps,
        Origin::Qubit { k, a, b, c },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Effectiveness {
    /// `a^2 + b^2 > 0` with room to spare.
    Effective,
    /// Algebraically effective, but `sqrt(a^2 + b^2) < MARGINAL_TOL`.
    NumericallyMarginal,
    /// `a = b = 0`: the witness is diagonal and detects nothing.
    Ineffective,
}

impl Effectiveness {
    pub fn is_effective(self) -> bool {
        self != Effectiveness::Ineffective
    }
}

/// Whether `W^{[K,a,b,c]}` detects any qubit state: exactly when the planes
/// `ax + by + cz = +-|c|` cut the Bloch sphere, i.e. `a^2 + b^2 != 0`.
pub fn is_effective_qubit(a: f64, b: f64, c: f64) -> Result<Effectiveness> {
    if a == 0.0 && b == 0.0 && c == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let transverse = a.hypot(b);
    Ok(if transverse == 0.0 {
        Effectiveness::Ineffective
    } else if transverse < MARGINAL_TOL {
        Effectiveness::NumericallyMarginal
    } else {
        Effectiveness::Effective
    })
}

/// Distance from the origin to the planes `ax + by + cz = +-|c|`.
pub fn plane_distance(a: f64, b: f64, c: f64) -> Result<f64> {
    if a == 0.0 && b == 0.0 && c == 0.0 {
        return Err(Error::ZeroOperator);
    }
    Ok(c.abs() / (a * a + b * b + c * c).sqrt())
}

/// `{W^{[K,a1,b1,0]}, W^{[K,a2,b2,0]}}`, which jointly detect every coherent
/// qubit state when `(a1, b1)` and `(a2, b2)` are not parallel.
pub fn qubit_pair_family(k: f64, a1: f64, b1: f64, a2: f64, b2: f64) -> Result<WitnessFamily> {
    let n1 = a1.hypot(b1);
    let n2 = a2.hypot(b2);
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::DegenerateFamily(
            "each (a_i, b_i) must be nonzero".into(),
        ));
    }
    let cross = a1 * b2 - a2 * b1;
    if cross.abs() <= 1e-12 * n1 * n2 {
        return Err(Error::DegenerateFamily(format!(
            "a1:b1 = a2:b2 (a1 b2 - a2 b1 = {cross})"
        )));
    }
    WitnessFamily::new(
        format!("C({a1},{a2},{b1},{b2})"),
        vec![
            qubit_witness(k, a1, b1, 0.0)?,
            qubit_witness(k, a2, b2, 0.0)?,
        ],
    )
}

/// `(K I + sum_i s_i lambda_i) / d`.
pub fn w_eta(d: usize, k: f64, eta: &[f64]) -> Result<Witness> {
    let basis = GeneratorBasis::cached(d)?;
    if eta.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            found: eta.len(),
        });
    }
    if let Some(pos) = eta.iter().position(|x| !x.is_finite()) {
        return Err(Error::Document(format!("eta[{pos}] is not finite")));
    }
    let mut acc = ComplexMatrix::identity(d).scaled(k);
    for (g, &s) in basis.iter().zip(eta) {
        if s != 0.0 {
            acc = acc.add_scaled(g, s)?;
        }
    }
    Witness::build(
        acc.scaled(1.0 / d as f64),
        Tolerance::default().detect_eps,
        Origin::Eta {
            k,
            eta: eta.to_vec(),
        },
    )
}

fn unit_eta(d: usize, index: usize, s: f64) -> Vec<f64> {
    let mut eta = vec![0.0; d * d - 1];
    eta[index - 1] = s;
    eta
}

/// The single-generator witness `w_eta(d, K, e_{m0})` where `m0` is the
/// off-diagonal Bloch index of largest `|r_{m0}|` (lowest index on ties).
pub fn theorem2_witness(rho: &DensityMatrix, k: f64) -> Result<Witness> {
    let d = rho.dim();
    let support = offdiag_support(rho);
    let r = bloch_vector(rho);
    let mut best: Option<(usize, f64)> = None;
    for i in support {
        let mag = r.get(i).expect("support index in range").abs();
        if best.is_none_or(|(_, b)| mag > b) {
            best = Some((i, mag));
        }
    }
    let (m0, _) = best.ok_or(Error::NotCoherent)?;
    w_eta(d, k, &unit_eta(d, m0, 1.0))
}

/// The `d(d-1)` witnesses `w_eta(d, K, s_i e_i)` for `i = d ..= d^2-1`.
/// `s[j]` is the coefficient for generator index `d + j`; `None` means all 1.
pub fn finite_family(d: usize, k: f64, s: Option<&[f64]>) -> Result<WitnessFamily> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let count = d * (d - 1);
    let ones = vec![1.0; count];
    let s = s.unwrap_or(&ones);
    if s.len() != count {
        return Err(Error::LengthMismatch {
            expected: count,
            found: s.len(),
        });
    }
    let label = format!("C~^{d}");
    let members = s
        .iter()
        .enumerate()
        .map(|(j, &coef)| {
            let index = d + j;
            if coef == 0.0 || !coef.is_finite() {
                return Err(Error::ZeroCoefficient { index });
            }
            Ok(
                w_eta(d, k, &unit_eta(d, index, coef))?.with_origin(Origin::FamilyMember {
                    family: label.clone(),
                    index,
                    k,
                    s: coef,
                }),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    WitnessFamily::new(label, members)
}
