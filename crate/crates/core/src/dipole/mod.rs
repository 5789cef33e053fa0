//! Dipole coupling: angular factors, radial integrals and the static blocks
//! driven by the pulse.

pub mod angular;
pub mod cache;
pub mod coupling;
pub mod radial;
pub mod wigner;

pub use coupling::{build_coupling, ChannelInfo, CouplingBlock, CouplingSet, Gauge, Spectra, StateRef, Theory};
pub use angular::{angular_nonrel, angular_rel, AngularFactor, NonrelLabel, RelLabel};
pub use radial::{
    delta_fi, radial_length_nr, radial_length_rel, radial_velocity_nr, radial_velocity_nr_with, radial_velocity_rel, velocity_branch,
    DipoleOperators,
};
pub use wigner::{wigner3j, wigner3j_exact, HalfInt, Surd, ThreeJ, ThreeJFlag};
