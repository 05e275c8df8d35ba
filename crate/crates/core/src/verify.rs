//! Ensemble sweeps that check the witness guarantees and report statistics.
//!
//! Every sweep is a pure function of its inputs and seed. Per-item seeds are
//! drawn in order from a master [`SplitMix64`] stream, so reports are
//! reproducible from the fields they carry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Tolerance;
use crate::states::{
    l1_coherence, qubit_state, sample_ginibre, sample_hermitian, sample_incoherent, DensityMatrix,
    IncoherentState, Seed, SplitMix64,
};
use crate::witness::{
    evaluate, is_effective_qubit, qubit_witness, Effectiveness, Witness, WitnessFamily,
};

/// States with `l1_coherence` above this must be detected.
pub const COHERENCE_THRESHOLD: f64 = 1e-7;

/// Slack allowed on `Tr(W delta)` against `[m, M]`.
pub const LEMMA1_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub dim: usize,
    pub seed: u64,
    pub n_witnesses: usize,
    pub n_states: usize,
    pub n_violations: usize,
    /// Largest distance outside `[m, M]` seen, 0 if none.
    pub worst_violation: f64,
    pub slack: f64,
    pub passed: bool,
}

/// Random Hermitian witnesses against random incoherent states; every value
/// must land in `[m - slack, M + slack]`.
pub fn verify_lemma1(
    d: usize,
    n_witnesses: usize,
    n_states: usize,
    seed: Seed,
) -> Result<Lemma1Report> {
    verify_lemma1_narrowed(d, n_witnesses, n_states, seed, 0.0)
}

/// As [`verify_lemma1`], but checks against `[m + narrow, M - narrow]`.
/// A positive `narrow` is a fault injection for exercising the harness.
pub fn verify_lemma1_narrowed(
    d: usize,
    n_witnesses: usize,
    n_states: usize,
    seed: Seed,
    narrow: f64,
) -> Result<Lemma1Report> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut master = SplitMix64::new(seed);
    let witnesses = (0..n_witnesses)
        .map(|_| Witness::from_matrix(sample_hermitian(d, master.next_seed()), 0.0))
        .collect::<Result<Vec<_>>>()?;
    let states: Vec<IncoherentState> = (0..n_states)
        .map(|_| sample_incoherent(d, master.next_seed()))
        .collect();
    let mut report = lemma1_on(&witnesses, &states, narrow)?;
    report.seed = seed.0;
    Ok(report)
}

/// Incoherent-bound check over explicit witnesses and states.
pub fn lemma1_on(
    witnesses: &[Witness],
    states: &[IncoherentState],
    narrow: f64,
) -> Result<Lemma1Report> {
    let dim = witnesses.first().map_or(0, Witness::dim);
    let mut n_violations = 0;
    let mut worst = 0.0f64;
    for w in witnesses {
        let (lo, hi) = w.interval();
        let (lo, hi) = (lo + narrow, hi - narrow);
        for delta in states {
            let v = delta.expectation(w.matrix())?;
            let outside = (lo - v).max(v - hi);
            if outside > LEMMA1_SLACK {
                n_violations += 1;
            }
            worst = worst.max(outside);
        }
    }
    Ok(Lemma1Report {
        dim,
        seed: 0,
        n_witnesses: witnesses.len(),
        n_states: states.len(),
        n_violations,
        worst_violation: worst,
        slack: LEMMA1_SLACK,
        passed: n_violations == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub dim: usize,
    pub family: String,
    pub n_members: usize,
    pub seed: Option<u64>,
    pub threshold: f64,
    pub tolerance: Tolerance,
    pub n_states: usize,
    /// States with `l1_coherence > threshold`.
    pub n_coherent: usize,
    /// States detected by at least one member.
    pub n_detected: usize,
    /// Oracle-coherent states no member detects.
    pub n_missed: usize,
    /// Detected states the oracle calls incoherent.
    pub n_false_alarm: usize,
    /// Smallest best-member margin over detected coherent states.
    pub min_margin_detected: Option<f64>,
    /// Detections per member, in family order.
    pub per_witness_hits: Vec<usize>,
    pub passed: bool,
}

/// Coverage of `family` on `n_states` sampled states: the first
/// `n_states - n_states/2` are Ginibre, the rest diagonal incoherent.
pub fn verify_coverage(
    family: &WitnessFamily,
    d: usize,
    n_states: usize,
    seed: Seed,
    threshold: f64,
) -> Result<CoverageReport> {
    if family.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: family.dim(),
        });
    }
    let states = coverage_ensemble(d, n_states, seed)?;
    let mut report = verify_coverage_on(family, &states, threshold)?;
    report.seed = Some(seed.0);
    Ok(report)
}

/// The mixed ensemble used by [`verify_coverage`].
pub fn coverage_ensemble(d: usize, n_states: usize, seed: Seed) -> Result<Vec<DensityMatrix>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let n_incoherent = n_states / 2;
    let n_ginibre = n_states - n_incoherent;
    let mut master = SplitMix64::new(seed);
    let mut states: Vec<DensityMatrix> = (0..n_ginibre)
        .map(|_| sample_ginibre(d, master.next_seed()))
        .collect();
    states.extend((0..n_incoherent).map(|_| sample_incoherent(d, master.next_seed()).to_density()));
    Ok(states)
}

/// Coverage over an explicit state list.
pub fn verify_coverage_on(
    family: &WitnessFamily,
    states: &[DensityMatrix],
    threshold: f64,
) -> Result<CoverageReport> {
    let d = family.dim();
    let mut per_witness_hits = vec![0usize; family.len()];
    let (mut n_coherent, mut n_detected, mut n_missed, mut n_false_alarm) = (0, 0, 0, 0);
    let mut min_margin: Option<f64> = None;
    for rho in states {
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        let coherent = l1_coherence(rho) > threshold;
        let reports = family.reports(rho)?;
        let mut best = f64::NEG_INFINITY;
        let mut detected = false;
        for (hits, rep) in per_witness_hits.iter_mut().zip(&reports) {
            if rep.verdict.is_detected() {
                *hits += 1;
                detected = true;
                best = best.max(rep.margin);
            }
        }
        n_coherent += usize::from(coherent);
        n_detected += usize::from(detected);
        match (coherent, detected) {
            (true, false) => n_missed += 1,
            (false, true) => n_false_alarm += 1,
            (true, true) => min_margin = Some(min_margin.map_or(best, |m: f64| m.min(best))),
            (false, false) => {}
        }
    }
    let tolerance = Tolerance {
        detect_eps: family.members()[0].detect_eps(),
        ..Tolerance::default()
    };
    Ok(CoverageReport {
        dim: d,
        family: family.label().to_string(),
        n_members: family.len(),
        seed: None,
        threshold,
        tolerance,
        n_states: states.len(),
        n_coherent,
        n_detected,
        n_missed,
        n_false_alarm,
        min_margin_detected: min_margin,
        per_witness_hits,
        passed: n_missed == 0 && n_false_alarm == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    /// `(K, a, b, c)`.
    pub witness_params: [f64; 4],
    pub grid_n: usize,
    pub detect_eps: f64,
    /// Lattice points inside the Bloch ball.
    pub n_points: usize,
    pub n_detected: usize,
    /// Points where the verdict disagrees with `|ax+by+cz| > |c| + 2 eps`.
    pub n_mismatch: usize,
    pub effectiveness: Effectiveness,
    /// Whether "some point detected" agrees with [`is_effective_qubit`].
    pub effectiveness_consistent: bool,
    pub passed: bool,
}

/// `grid_n^3` lattice over `[-1, 1]^3` restricted to `x^2 + y^2 + z^2 <= 1`,
/// in x-major order.
pub fn bloch_ball_grid(grid_n: usize) -> Vec<[f64; 3]> {
    if grid_n < 2 {
        return Vec::new();
    }
    let step = 2.0 / (grid_n - 1) as f64;
    let coords: Vec<f64> = (0..grid_n).map(|i| -1.0 + step * i as f64).collect();
    let mut out = Vec::new();
    for &x in &coords {
        for &y in &coords {
            for &z in &coords {
                if x * x + y * y + z * z <= 1.0 + 1e-12 {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

/// Compares `evaluate`'s verdict for `W^{[K,a,b,c]}` with the plane
/// predicate at every point of [`bloch_ball_grid`].
pub fn qubit_geometry_check(
    k: f64,
    a: f64,
    b: f64,
    c: f64,
    grid_n: usize,
) -> Result<GeometryReport> {
    if grid_n < 2 {
        return Err(Error::Document(format!(
            "grid_n must be at least 2, got {grid_n}"
        )));
    }
    let w = qubit_witness(k, a, b, c)?;
    let effectiveness = is_effective_qubit(a, b, c)?;
    let eps = w.detect_eps();
    let (mut n_points, mut n_detected, mut n_mismatch) = (0, 0, 0);
    for [x, y, z] in bloch_ball_grid(grid_n) {
        let rho = qubit_state(x, y, z)?;
        let detected = evaluate(&w, &rho)?.verdict.is_detected();
        let predicted = (a * x + b * y + c * z).abs() > c.abs() + 2.0 * eps;
        n_points += 1;
        n_detected += usize::from(detected);
        n_mismatch += usize::from(detected != predicted);
    }
    let effectiveness_consistent = (n_detected > 0) == effectiveness.is_effective();
    Ok(GeometryReport {
        witness_params: [k, a, b, c],
        grid_n,
        detect_eps: eps,
        n_points,
        n_detected,
        n_mismatch,
        effectiveness,
        effectiveness_consistent,
        passed: n_mismatch == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, C64};
    use crate::witness::{finite_family, w_eta};

    #[test]
    fn incoherent_bound_passes() {
        let rep = verify_lemma1(3, 100, 1000, Seed(1)).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.n_violations, 0);
        assert!(rep.worst_violation <= LEMMA1_SLACK);
    }

    #[test]
    fn incoherent_bound_single_pauli() {
        let w = Witness::from_matrix(
            ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            1e-9,
        )
        .unwrap();
        let rep = lemma1_on(&[w], &[sample_incoherent(2, Seed(3))], 0.0).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.worst_violation, 0.0);
    }

    #[test]
    fn incoherent_bound_fault_injection_fails() {
        let rep = verify_lemma1_narrowed(3, 100, 1000, Seed(1), 0.1).unwrap();
        assert!(!rep.passed);
        assert!(rep.n_violations > 0);
        assert!(rep.worst_violation > 0.0);
    }

    #[test]
    fn coverage_finite_family_d3() {
        let fam = finite_family(3, 1.0, None).unwrap();
        let rep = verify_coverage(&fam, 3, 1000, Seed(2), COHERENCE_THRESHOLD).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.n_false_alarm, 0);
        assert_eq!(rep.n_coherent, 500);
        assert_eq!(rep.n_detected, 500);
        assert_eq!(rep.per_witness_hits.len(), 6);
    }

    #[test]
    fn coverage_single_sigma1_misses_imaginary_coherence() {
        let fam =
            WitnessFamily::new("sigma1", vec![w_eta(2, 0.0, &[0.0, 1.0, 0.0]).unwrap()]).unwrap();
        let imag = DensityMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![C64::new(0.5, 0.0), C64::new(0.0, 0.3)],
                vec![C64::new(0.0, -0.3), C64::new(0.5, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let mut states = coverage_ensemble(2, 20, Seed(4)).unwrap();
        states.push(imag);
        let rep = verify_coverage_on(&fam, &states, COHERENCE_THRESHOLD).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.n_missed, 1);
        assert_eq!(rep.n_false_alarm, 0);
    }

    #[test]
    fn coverage_without_coherent_states_is_vacuous() {
        let fam = finite_family(3, 0.0, None).unwrap();
        let states: Vec<_> = (0..10)
            .map(|s| sample_incoherent(3, Seed(s)).to_density())
            .collect();
        let rep = verify_coverage_on(&fam, &states, COHERENCE_THRESHOLD).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.n_coherent, 0);
        assert_eq!(rep.min_margin_detected, None);
        let rep = verify_coverage(&fam, 3, 0, Seed(0), COHERENCE_THRESHOLD).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.n_states, 0);
    }

    #[test]
    fn coverage_dimension_mismatch() {
        let fam = finite_family(3, 0.0, None).unwrap();
        assert!(matches!(
            verify_coverage(&fam, 4, 10, Seed(0), COHERENCE_THRESHOLD),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn coverage_is_monotone_in_members() {
        let full = finite_family(3, 0.0, None).unwrap();
        let states = coverage_ensemble(3, 200, Seed(8)).unwrap();
        let mut partial = WitnessFamily::new("partial", vec![full.members()[0].clone()]).unwrap();
        let mut last = verify_coverage_on(&partial, &states, COHERENCE_THRESHOLD)
            .unwrap()
            .n_detected;
        for w in &full.members()[1..] {
            partial.push(w.clone()).unwrap();
            let now = verify_coverage_on(&partial, &states, COHERENCE_THRESHOLD)
                .unwrap()
                .n_detected;
            assert!(now >= last);
            last = now;
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let fam = finite_family(4, 1.0, None).unwrap();
        let a = serde_json::to_string(
            &verify_coverage(&fam, 4, 100, Seed(7), COHERENCE_THRESHOLD).unwrap(),
        )
        .unwrap();
        let b = serde_json::to_string(
            &verify_coverage(&fam, 4, 100, Seed(7), COHERENCE_THRESHOLD).unwrap(),
        )
        .unwrap();
        assert_eq!(a, b);
        let l1 = serde_json::to_string(&verify_lemma1(3, 5, 20, Seed(7)).unwrap()).unwrap();
        let l2 = serde_json::to_string(&verify_lemma1(3, 5, 20, Seed(7)).unwrap()).unwrap();
        assert_eq!(l1, l2);
    }

    #[test]
    fn geometry_examples() {
        let rep = qubit_geometry_check(0.0, 1.0, 1.0, 1.0, 50).unwrap();
        assert_eq!(rep.n_mismatch, 0);
        assert!(rep.n_detected > 0);
        assert!(rep.effectiveness_consistent);

        let rep = qubit_geometry_check(0.0, 0.0, 0.0, 1.0, 50).unwrap();
        assert_eq!(rep.n_mismatch, 0);
        assert_eq!(rep.n_detected, 0);
        assert_eq!(rep.effectiveness, Effectiveness::Ineffective);
        assert!(rep.effectiveness_consistent);

        let rep = qubit_geometry_check(5.0, 1.0, -1.0, 0.0, 50).unwrap();
        assert_eq!(rep.n_mismatch, 0);
        assert!(rep.n_detected > 0);

        assert_eq!(
            qubit_geometry_check(0.0, 0.0, 0.0, 0.0, 10).unwrap_err(),
            Error::ZeroOperator
        );
    }

    #[test]
    fn grid_stays_inside_ball() {
        let pts = bloch_ball_grid(11);
        assert!(pts.contains(&[1.0, 0.0, 0.0]));
        assert!(pts
            .iter()
            .all(|[x, y, z]| x * x + y * y + z * z <= 1.0 + 1e-12));
        assert!(bloch_ball_grid(1).is_empty());
    }
}
