//! Signed measures on finite pseudometric spaces and the Kantorovich family
//! of seminorms: Kantorovich–Rubinstein, Kantorovich, weighted `K_{d,q}` and
//! the transport metrics `d_{K,d,q}`, together with convergence harnesses
//! and two constructive counterexamples.

// NaN-rejecting `!(x >= y)` guards and index loops over paired arrays are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod convergence;
pub mod counterexample;
pub mod coupling;
pub mod error;
pub mod io;
pub mod measure;
pub mod oracle;
pub mod quotient;
pub mod report;
pub mod schedule;
pub mod seminorm;
pub mod simplex;
pub mod space;
pub mod vector;

pub use convergence::{
    barycenter_convergence, check_ac_limit, check_tau_k_convergence, extract_convergent_subsequence, tail_profile,
    weak_gap, MeasureSequence, TailProfile, TestDictionary, TestFunction, Verdict,
};
pub use counterexample::{l1_counterexample, verify_counterexample, L1CounterexampleInstance};
pub use coupling::{wasserstein_q, Coupling};
pub use error::{Error, Result};
pub use measure::{barycenter, jordan_decompose, total_variation, SignedMeasure};
pub use oracle::brute_force_dual;
pub use quotient::{pushforward, quotient, QuotientMap};
pub use report::{all_passed, CheckRecord, Relation};
pub use schedule::{rescaling_schedule, verify_schedule, FamilyMeasure, RescalingSchedule};
pub use seminorm::{k_norm, kq_norm, kr_norm, LipschitzWitness, WitnessMode};
pub use space::{MetricMatrix, PseudometricSpace, METRIC_TOL};
pub use vector::VectorSeminorm;
