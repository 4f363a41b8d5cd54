//! Inner and outer bounds on the capacity region of a two-user parallel
//! Gaussian channel whose additive states are known noncausally to a
//! power-limited helper.
//!
//! - [`outer`]: union over helper/state correlations of per-user upper bounds.
//! - [`closed_form`] and [`inner`]: achievable rates of the Gaussian
//!   dirty-paper/cancellation scheme and their optimization.
//! - [`gaussian`]: joint covariance of the scheme and log-determinant mutual
//!   informations, used as an independent oracle.
//! - [`classify`]: parameter regimes where the two bounds meet.
//! - [`montecarlo`]: seeded sampling of the joint system.
//!
//! All rates are in bits per channel use unless converted with [`RateUnit`].

#![allow(clippy::needless_range_loop)]

pub mod classify;
pub mod closed_form;
pub mod error;
pub mod gaussian;
pub mod inner;
pub mod model;
pub mod montecarlo;
pub mod optim;
pub mod outer;
pub mod region;
pub mod units;
pub mod verify;

pub use classify::{capacity_segments, classify, SegmentClass, SegmentReport, UserSegment};
pub use closed_form::{
    alpha_star_cancel, alpha_star_dpc, pp_helper_rate, rate_f, rate_g, reduced_f,
    second_order_stats, SecondOrderStats,
};
pub use error::{Error, Result};
pub use gaussian::{
    build_joint_covariance, gaussian_cmi, gaussian_mi, joint_bounds, sequential_rates,
    CovarianceMatrix, Var, VariableSet,
};
pub use inner::{
    achievable_point, inner_region_boundary, optimize_direction, time_sharing_boundary,
    OperatingPoint, OptimizerBudget,
};
pub use model::{
    beta_from_rho, rho_from_beta, role_swap, validate_config, ChannelConfig, CorrelationPoint,
    HelperStrategy, RatePair, User, UserAlpha,
};
pub use montecarlo::{covariance_check, sample_empirical_covariance, McReport};
pub use outer::{outer_rate_bounds, outer_region_boundary, OuterPoint};
pub use region::{region_contains, Provenance, RegionBoundary, Vertex};
pub use units::RateUnit;
