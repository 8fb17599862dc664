//! Bifurcation, sensitivity, and phase-portrait scan drivers.

use std::io::{self, Write};

use serde::Serialize;

use crate::chaos::{generate_orbit, Orbit, SystemParams, SystemState};
use crate::dynamics::DynamicsError;

/// Perturbation magnitude used by the default sensitivity experiment.
pub const DEFAULT_SENSITIVITY_DELTA: f64 = 1e-16;

/// Which control parameter a bifurcation scan sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweptParameter {
    Alpha,
    R,
    Mu,
}

impl SweptParameter {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Alpha => "alpha",
            Self::R => "r",
            Self::Mu => "mu",
        }
    }

    /// Base parameters with this parameter replaced by `value`
    /// (revalidated).
    pub fn apply(&self, base: &SystemParams, value: f64) -> Result<SystemParams, DynamicsError> {
        let (alpha, r, mu) = match self {
            Self::Alpha => (value, base.r(), base.mu()),
            Self::R => (base.alpha(), value, base.mu()),
            Self::Mu => (base.alpha(), base.r(), value),
        };
        Ok(SystemParams::new(alpha, r, mu)?
            .with_coupling(base.c())
            .with_guards(*base.guards()))
    }
}

/// Retained iterates of one bifurcation scan: per grid value, the final
/// `n_keep` states of an `n_iter`-step run.
#[derive(Debug, Clone)]
pub struct BifurcationScan {
    pub swept: SweptParameter,
    pub grid: Vec<f64>,
    pub samples: Vec<Vec<SystemState>>,
    pub n_iter: usize,
    pub n_keep: usize,
}

impl BifurcationScan {
    /// Writes the scan column-oriented as CSV with header
    /// `param,coord,iter,value`; `iter` is the 1-based iteration index
    /// within the `n_iter`-step run.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "param,coord,iter,value")?;
        let first_iter = self.n_iter - self.n_keep + 1;
        for (param, states) in self.grid.iter().zip(&self.samples) {
            for (ci, coord) in ["x", "y", "z"].iter().enumerate() {
                for (k, s) in states.iter().enumerate() {
                    let value = match ci {
                        0 => s.x,
                        1 => s.y,
                        _ => s.z,
                    };
                    writeln!(out, "{param},{coord},{},{value}", first_iter + k)?;
                }
            }
        }
        Ok(())
    }
}

/// Runs the orbit at every grid value of the swept parameter and keeps
/// the trailing `n_keep` states per point.
pub fn bifurcation_scan(
    swept: SweptParameter,
    grid: &[f64],
    base: &SystemParams,
    seed: &SystemState,
    n_iter: usize,
    n_keep: usize,
) -> Result<BifurcationScan, DynamicsError> {
    if grid.is_empty() {
        return Err(DynamicsError::EmptyGrid);
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(DynamicsError::GridNotIncreasing);
    }
    if n_keep > n_iter || n_keep == 0 {
        return Err(DynamicsError::InvalidRetention { n_iter, n_keep });
    }
    let mut samples = Vec::with_capacity(grid.len());
    for &value in grid {
        let params = swept.apply(base, value)?;
        let orbit = generate_orbit(seed, &params, n_iter - n_keep, n_keep)?;
        samples.push(orbit.states().to_vec());
    }
    Ok(BifurcationScan {
        swept,
        grid: grid.to_vec(),
        samples,
        n_iter,
        n_keep,
    })
}

/// Two orbits launched from `seed` and `seed + (delta, delta, delta)`
/// with no transient discard, plus their per-step coordinate distances.
#[derive(Debug, Clone)]
pub struct SensitivityTrace {
    pub delta: f64,
    pub base_orbit: Orbit,
    pub perturbed_orbit: Orbit,
    pub diffs: Vec<[f64; 3]>,
}

impl SensitivityTrace {
    /// Largest single-coordinate separation over the whole trace.
    pub fn max_diff(&self) -> f64 {
        self.diffs
            .iter()
            .flat_map(|d| d.iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "iter,coord,base,perturbed,abs_diff")?;
        for (k, ((b, p), d)) in self
            .base_orbit
            .states()
            .iter()
            .zip(self.perturbed_orbit.states())
            .zip(&self.diffs)
            .enumerate()
        {
            let iter = k + 1;
            writeln!(out, "{iter},x,{},{},{}", b.x, p.x, d[0])?;
            writeln!(out, "{iter},y,{},{},{}", b.y, p.y, d[1])?;
            writeln!(out, "{iter},z,{},{},{}", b.z, p.z, d[2])?;
        }
        Ok(())
    }
}

/// Runs the neighboring-initial-state experiment for `n_steps` steps.
pub fn sensitivity_pair(
    seed: &SystemState,
    delta: f64,
    params: &SystemParams,
    n_steps: usize,
) -> Result<SensitivityTrace, DynamicsError> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(DynamicsError::InvalidDelta(delta));
    }
    let base_orbit = generate_orbit(seed, params, 0, n_steps)?;
    let shifted = SystemState::new(seed.x + delta, seed.y + delta, seed.z + delta);
    let perturbed_orbit = generate_orbit(&shifted, params, 0, n_steps)?;
    let diffs = base_orbit
        .states()
        .iter()
        .zip(perturbed_orbit.states())
        .map(|(b, p)| [(b.x - p.x).abs(), (b.y - p.y).abs(), (b.z - p.z).abs()])
        .collect();
    Ok(SensitivityTrace {
        delta,
        base_orbit,
        perturbed_orbit,
        diffs,
    })
}

/// Orbit samples for 3-D scatter export, after the default transient.
pub fn phase_samples(
    seed: &SystemState,
    params: &SystemParams,
    n: usize,
) -> Result<Orbit, DynamicsError> {
    Ok(generate_orbit(
        seed,
        params,
        crate::chaos::DEFAULT_TRANSIENT,
        n,
    )?)
}

/// Writes orbit states as CSV rows `iter,x,y,z` (1-based iteration).
pub fn write_orbit_csv<W: Write>(orbit: &Orbit, mut out: W) -> io::Result<()> {
    writeln!(out, "iter,x,y,z")?;
    for (k, s) in orbit.states().iter().enumerate() {
        writeln!(out, "{},{},{},{}", k + 1, s.x, s.y, s.z)?;
    }
    Ok(())
}
