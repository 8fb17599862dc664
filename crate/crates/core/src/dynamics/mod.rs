//! Numerical dynamics analysis of the 3D-ILS map: Jacobians, Lyapunov
//! spectra, and bifurcation/sensitivity/phase scans.

mod jacobian;
mod lyapunov;
mod scan;

use serde::Serialize;
use thiserror::Error;

pub use jacobian::{guard_active, jacobian_analytic, jacobian_fd, Jacobian3};
pub use lyapunov::{finite_time_exponents, lyapunov_qr, JacobianSource, LyapunovSpectrum};
pub use scan::{
    bifurcation_scan, phase_samples, sensitivity_pair, write_orbit_csv, BifurcationScan,
    SensitivityTrace, SweptParameter, DEFAULT_SENSITIVITY_DELTA,
};

use crate::chaos::{ChaosError, SystemParams, SystemState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("finite-difference step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("degenerate tangent frame at step {step}: a triangular diagonal underflowed to zero")]
    DegenerateFrame { step: usize },
    #[error("too few steps: need at least {min}, got {got}")]
    TooFewSteps { min: usize, got: usize },
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("parameter grid must be strictly increasing")]
    GridNotIncreasing,
    #[error("retention window invalid: n_keep must satisfy 1 <= n_keep <= n_iter (n_iter {n_iter}, n_keep {n_keep})")]
    InvalidRetention { n_iter: usize, n_keep: usize },
    #[error("perturbation delta must be finite and non-negative, got {0}")]
    InvalidDelta(f64),
    #[error(transparent)]
    Chaos(#[from] ChaosError),
}

/// JSON-serializable Lyapunov run summary with keys
/// `alpha,r,mu,c,seed,lambdas,n_steps,guard_hits,logdet_mean`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub alpha: f64,
    pub r: f64,
    pub mu: f64,
    pub c: f64,
    pub seed: [f64; 3],
    pub lambdas: [f64; 3],
    pub n_steps: usize,
    pub guard_hits: usize,
    pub logdet_mean: f64,
}

impl SpectrumReport {
    pub fn new(params: &SystemParams, seed: &SystemState, spectrum: &LyapunovSpectrum) -> Self {
        Self {
            alpha: params.alpha(),
            r: params.r(),
            mu: params.mu(),
            c: params.c(),
            seed: seed.to_array(),
            lambdas: spectrum.lambdas,
            n_steps: spectrum.n_steps,
            guard_hits: spectrum.guard_hits,
            logdet_mean: spectrum.logdet_mean,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_has_contract_keys() {
        let params = SystemParams::new(10.0, 4.0, 5.0).unwrap();
        let seed = SystemState::new(0.31, 0.37, 0.41);
        let spec = lyapunov_qr(&seed, &params, 100, 500, JacobianSource::Analytic).unwrap();
        let report = SpectrumReport::new(&params, &seed, &spec);
        let json: serde_json::Value =
            serde_json::from_str(&report.to_json().unwrap()).unwrap();
        for key in [
            "alpha",
            "r",
            "mu",
            "c",
            "seed",
            "lambdas",
            "n_steps",
            "guard_hits",
            "logdet_mean",
        ] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(json["lambdas"].as_array().unwrap().len(), 3);
        assert_eq!(json["seed"].as_array().unwrap().len(), 3);
    }
}
