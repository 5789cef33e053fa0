pub mod bspline;
pub mod constants;
pub mod dipole;
pub mod error;
pub mod linalg;
pub mod nonrel_structure;
pub mod observables;
pub mod propagator;
pub mod pulse;
pub mod real;
pub mod rel_structure;
pub mod scaling;

pub use error::{Error, Result};
pub use real::Real;

/// Double-precision instantiations of the generic types.
pub mod f64_types {
    pub type RadialBasis = crate::bspline::RadialBasis<f64>;
    pub type BandedMatrix = crate::bspline::BandedMatrix<f64>;
    pub type DiracState = crate::rel_structure::DiracState<f64>;
    pub type ChannelSpectrum = crate::rel_structure::ChannelSpectrum<f64>;
    pub type RelativisticSpectra = crate::rel_structure::RelativisticSpectra<f64>;
    pub type SchrodingerState = crate::nonrel_structure::SchrodingerState<f64>;
    pub type NonrelSpectra = crate::nonrel_structure::NonrelSpectra<f64>;
    pub type CouplingSet = crate::dipole::CouplingSet<f64>;
    pub type StateVector = crate::propagator::StateVector<f64>;
    pub type RunResult = crate::propagator::RunResult<f64>;
}
pub use f64_types::*;
