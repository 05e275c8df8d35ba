//! Interval coherence witnesses for finite-dimensional quantum states.
//!
//! A Hermitian operator `W` whose diagonal spans `[m, M]` has expectation in
//! `[m, M]` on every incoherent (diagonal) state. Any state pushing the
//! expectation outside that interval is therefore certified coherent. This
//! crate builds such witnesses, evaluates them, and checks at ensemble scale
//! that the `d(d-1)` single-generator witnesses built on the SU(d) basis
//! detect every coherent state.
//!
//! Module map:
//!
//! - [`linalg`]: dense complex matrices, Hermiticity and eigenvalue checks.
//! - [`generators`]: the ordered SU(d) basis and Bloch-vector maps.
//! - [`states`]: validated density matrices, seeded ensembles, the l1 oracle.
//! - [`witness`]: the `Witness` type and all of its constructors.
//! - [`verify`]: ensemble sweeps producing pass/fail reports.
//! - [`cli`]: the `cohwit` command-line surface and JSON/CSV documents.

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod states;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use generators::{
    bloch_vector, generator, offdiag_support, state_from_bloch, BlochVector, GeneratorBasis,
    GeneratorKind,
};
pub use linalg::{is_hermitian, min_eigenvalue, trace_product, ComplexMatrix, Tolerance, C64};
pub use states::{
    canonical_coherent, delta_h, l1_coherence, qubit_state, sample_ginibre, sample_hermitian,
    sample_incoherent, DensityMatrix, IncoherentState, Seed, SplitMix64,
};
pub use verify::{
    qubit_geometry_check, verify_coverage, verify_coverage_on, verify_lemma1, CoverageReport,
    GeometryReport, Lemma1Report,
};
pub use witness::{
    evaluate, finite_family, is_effective_qubit, lemma2_witness, qubit_pair_family, qubit_witness,
    tailored_witness, theorem2_witness, w_eta, DetectionReport, Effectiveness, Origin, Verdict,
    Witness, WitnessFamily,
};
