//! Constructive slow area-preserving torus maps with certified growth bounds.

pub mod arithmetic;
pub mod construction;
pub mod dynamics;
pub mod error;
pub mod phi;
pub mod sums;
pub mod verifier;

pub use arithmetic::{ComplexInterval, IntervalReal, PrecisionPolicy, Rat, Status};
pub use construction::{
    build, choose_r, extend, interval_a, k_index, AlphaCertificate, ConstantsProfile,
    ConstructionState, DecayMode, Threshold,
};
pub use dynamics::{
    apply_f, apply_f_inv, choose_c, f_eval, fprime_eval, gamma, orbit_cocycle,
    orbit_cocycle_inverse, sigma, GrowthEvaluator, GrowthRecord, TorusImage, TorusPoint,
    UnipotentJacobian,
};
pub use error::{Error, Result};
pub use phi::{Family, GrowthFunction};
pub use sums::{
    delta_closed, delta_direct, s_sum, t_sum, w_max, w_sum, ExpSumValue, SumContext, ThetaFraction,
};
pub use verifier::{verify_all, Certificate, CheckResult, Mutation, Schedule, VerifyConfig};
