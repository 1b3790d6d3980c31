//! Analysis of mass-action chemical reaction networks.
//!
//! Strong endotacticity is decided two independent ways: by sweeping the
//! faces of the arrangement spanned by complex differences
//! ([`endotactic`]) and by the tier-descending criterion ([`tiers`]).
//! Structural properties are exact; dynamical diagnostics (ODE, SSA,
//! Lyapunov drifts) are numerical.

pub mod dynamics;
pub mod endotactic;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod network;
pub mod parser;
pub mod scalar;
pub mod stochastic;
pub mod structure;
pub mod tiers;

pub use error::{Error, Result};
pub use network::{
    make_network, same_compatibility_class, stoich_basis, Complex, RateAssignment, Reaction,
    ReactionNetwork, SpeciesId,
};
pub use parser::{format_network, parse_network, NetworkDocument};

/// Exact rational scalar used for every geometric decision.
pub type Rational = num_rational::BigRational;
pub type RationalVector = linalg::Vector<Rational>;
pub type RationalBasis = linalg::Basis<Rational>;
pub type RationalCone = linalg::ConeSpec<Rational>;

/// Double precision trajectory, the default for simulation output.
pub type Trajectory = dynamics::Trajectory<f64>;
pub type Trajectory32 = dynamics::Trajectory<f32>;
