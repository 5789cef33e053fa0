//! Scaling relations surfaced as one JSON document.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tdde::constants::PhysicalConstants;
use tdde::pulse::PulseParams;
use tdde::scaling::{delta_ip, keldysh, rate_scale, scale_config, scaled_charge, RateTable, ScaledConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Default)]
pub struct ScaleArgs {
    pub z: f64,
    pub omega: Option<f64>,
    pub f0: Option<f64>,
    pub intensity_wcm2: Option<f64>,
    pub cycles: u32,
    /// The pulse describes hydrogen and is mapped to `z`.
    pub from_hydrogen: bool,
    pub rate_table: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleReport {
    pub z: f64,
    pub delta_ip: f64,
    pub z_prime: f64,
    pub critical_field: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keldysh: Option<f64>,
    /// Hydrogen pulse and its image at `z`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaled: Option<ScaledConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_table: Option<RateTable>,
}

pub fn scale(args: &ScaleArgs) -> Result<ScaleReport, CliError> {
    let constants = PhysicalConstants::default();
    let c = constants.c;
    if !(args.z > 0.0 && args.z < c) {
        return Err(CliError::Config(format!("`z`: must lie in (0, c), got {}", args.z)));
    }
    let pulse = match (args.omega, args.f0, args.intensity_wcm2) {
        (Some(_), Some(_), Some(_)) => return Err(CliError::Config("`field`: conflicts with `intensity`; give exactly one".into())),
        (Some(w), Some(f), None) => Some(PulseParams::from_field(args.cycles, w, f)?),
        (Some(w), None, Some(i)) => Some(PulseParams::from_intensity(args.cycles, w, i)?),
        (None, None, None) => None,
        _ => return Err(CliError::Config("`photon-energy`: a pulse needs a photon energy and one of field or intensity".into())),
    };
    let (scaled, at_z) = match pulse {
        Some(p) if args.from_hydrogen => {
            let s = scale_config(args.z, &p)?;
            (Some(s), Some(s.scaled))
        }
        Some(p) => {
            let s = scale_config(args.z, &PulseParams::from_field(p.cycles, p.omega / (args.z * args.z), p.f0 / args.z.powi(3))?)?;
            (Some(ScaledConfig { scaled: p, ..s }), Some(p))
        }
        None => (None, None),
    };
    let rate_table = match &args.rate_table {
        Some(path) => Some(rate_scale(&read_table(path)?, args.z, c)),
        None => None,
    };
    Ok(ScaleReport {
        z: args.z,
        delta_ip: delta_ip(args.z, c),
        z_prime: scaled_charge(args.z, c),
        critical_field: constants.critical_field(),
        keldysh: at_z.map(|p| keldysh(args.z, p.omega, p.f0)),
        scaled,
        rate_table,
    })
}

fn read_table(path: &Path) -> Result<RateTable, CliError> {
    let f = std::fs::File::open(path)?;
    Ok(RateTable::from_csv(f)?)
}
