//! Safeguarded primitive 1-D maps, the generic 3D-CCC coupling combinator,
//! and the concrete 3D-ILS step and orbit generator.

use thiserror::Error;

/// Default number of leading iterations discarded before sampling an orbit.
pub const DEFAULT_TRANSIENT: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error("invalid parameter {name}: {value} (expected {expected})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("non-finite seed coordinate {coord} = {value}")]
    NonFiniteSeed { coord: char, value: f64 },
}

/// Numerical safeguards: the saturation margin `eps` keeps states inside
/// `[eps, 1-eps]`, and the denominator floor `eps_d` keeps `|2u-1|` away
/// from zero inside the ICMIC map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guards {
    eps: f64,
    eps_d: f64,
}

impl Guards {
    pub const DEFAULT_EPS: f64 = 1e-12;
    pub const DEFAULT_EPS_D: f64 = 1e-12;

    pub fn new(eps: f64, eps_d: f64) -> Result<Self, ChaosError> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(ChaosError::InvalidParameter {
                name: "eps",
                value: eps,
                expected: "0 < eps < 0.5",
            });
        }
        if !(eps_d > 0.0 && eps_d < 1.0) {
            return Err(ChaosError::InvalidParameter {
                name: "eps_d",
                value: eps_d,
                expected: "0 < eps_d < 1",
            });
        }
        Ok(Self { eps, eps_d })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eps_d(&self) -> f64 {
        self.eps_d
    }
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            eps: Self::DEFAULT_EPS,
            eps_d: Self::DEFAULT_EPS_D,
        }
    }
}

/// Control parameters of the 3D-ILS map: ICMIC frequency `alpha`, Logistic
/// rate `r`, Sine frequency `mu`, coupling coefficient `c`, and the
/// numerical guards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    alpha: f64,
    r: f64,
    mu: f64,
    c: f64,
    guards: Guards,
}

impl SystemParams {
    /// Fixed coupling coefficient used everywhere unless explicitly
    /// overridden for research scans.
    pub const DEFAULT_COUPLING: f64 = 0.077;

    pub fn new(alpha: f64, r: f64, mu: f64) -> Result<Self, ChaosError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ChaosError::InvalidParameter {
                name: "alpha",
                value: alpha,
                expected: "alpha > 0",
            });
        }
        if !(r > 0.0 && r <= 4.0) {
            return Err(ChaosError::InvalidParameter {
                name: "r",
                value: r,
                expected: "0 < r <= 4",
            });
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(ChaosError::InvalidParameter {
                name: "mu",
                value: mu,
                expected: "mu > 0",
            });
        }
        Ok(Self {
            alpha,
            r,
            mu,
            c: Self::DEFAULT_COUPLING,
            guards: Guards::default(),
        })
    }

    pub fn with_coupling(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_guards(mut self, guards: Guards) -> Self {
        self.guards = guards;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn guards(&self) -> &Guards {
        &self.guards
    }
}

/// One point of the three-dimensional state sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SystemState {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for SystemState {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// Saturation operator: clamps `u` into `[eps, 1-eps]`.
pub fn sat(u: f64, guards: &Guards) -> f64 {
    (1.0 - guards.eps).min(guards.eps.max(u))
}

/// Safeguarded denominator: `2u-1` floored away from zero at `eps_d`.
/// The sign convention at exactly `2u-1 == 0` is `+1`.
pub fn den(u: f64, guards: &Guards) -> f64 {
    let t = 2.0 * u - 1.0;
    if t.abs() >= guards.eps_d {
        t
    } else if t >= 0.0 {
        guards.eps_d
    } else {
        -guards.eps_d
    }
}

/// Logistic map `G(u) = r u (1-u)`.
pub fn map_g(u: f64, r: f64) -> f64 {
    r * u * (1.0 - u)
}

/// Normalized Sine map `H(u) = (sin(mu pi (2u-1)) + 1) / 2`.
pub fn map_h(u: f64, mu: f64) -> f64 {
    0.5 * ((mu * std::f64::consts::PI * (2.0 * u - 1.0)).sin() + 1.0)
}

/// Safeguarded ICMIC map `F(u) = (sin(alpha / den(u)) + 1) / 2`.
pub fn map_f(u: f64, alpha: f64, guards: &Guards) -> f64 {
    0.5 * ((alpha / den(u, guards)).sin() + 1.0)
}

/// Generic 3D-CCC combinator step. Combines three 1-D maps into one
/// three-dimensional update; `u2` consumes the freshly computed `x` and
/// `u3` consumes both new `x` and new `y`. Each intermediate passes
/// through `sat` before the outer map `f`.
pub fn ccc_step<F, G, H>(
    state: &SystemState,
    f: F,
    g: G,
    h: H,
    c: f64,
    guards: &Guards,
) -> SystemState
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    let u1 = state.x * g(state.y)
        + (1.0 - state.x) * h(state.z)
        + c * (state.y - state.z) * (state.x - 0.5);
    let x1 = f(sat(u1, guards));
    let u2 = state.y * g(state.z) + (1.0 - state.y) * h(x1) + c * (state.z - x1) * (state.y - 0.5);
    let y1 = f(sat(u2, guards));
    let u3 = state.z * g(x1) + (1.0 - state.z) * h(y1) + c * (x1 - y1) * (state.z - 0.5);
    let z1 = f(sat(u3, guards));
    SystemState::new(x1, y1, z1)
}

/// Intermediate values of one 3D-ILS step: the raw (pre-sat) coupling
/// combinations and the resulting state. The raw values decide which
/// guard branches were taken, which the Jacobian needs.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepDetail {
    pub u_raw: [f64; 3],
    pub next: SystemState,
}

pub(crate) fn step_detail(state: &SystemState, params: &SystemParams) -> StepDetail {
    let g = &params.guards;
    let (alpha, r, mu, c) = (params.alpha, params.r, params.mu, params.c);
    let u1 = state.x * map_g(state.y, r)
        + (1.0 - state.x) * map_h(state.z, mu)
        + c * (state.y - state.z) * (state.x - 0.5);
    let x1 = map_f(sat(u1, g), alpha, g);
    let u2 = state.y * map_g(state.z, r)
        + (1.0 - state.y) * map_h(x1, mu)
        + c * (state.z - x1) * (state.y - 0.5);
    let y1 = map_f(sat(u2, g), alpha, g);
    let u3 = state.z * map_g(x1, r)
        + (1.0 - state.z) * map_h(y1, mu)
        + c * (x1 - y1) * (state.z - 0.5);
    let z1 = map_f(sat(u3, g), alpha, g);
    StepDetail {
        u_raw: [u1, u2, u3],
        next: SystemState::new(x1, y1, z1),
    }
}

/// One iteration of the 3D-ILS hyperchaotic map.
pub fn ils_step(state: &SystemState, params: &SystemParams) -> SystemState {
    step_detail(state, params).next
}

/// A sampled trajectory of the 3D-ILS map.
#[derive(Debug, Clone)]
pub struct Orbit {
    states: Vec<SystemState>,
    transient_discarded: usize,
    params: SystemParams,
}

impl Orbit {
    pub fn states(&self) -> &[SystemState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn transient_discarded(&self) -> usize {
        self.transient_discarded
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.x)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.y)
    }

    pub fn zs(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.z)
    }
}

/// Iterates the map `n_transient` times from the sat-clamped seed, then
/// records `n_samples` further states in order.
pub fn generate_orbit(
    seed: &SystemState,
    params: &SystemParams,
    n_transient: usize,
    n_samples: usize,
) -> Result<Orbit, ChaosError> {
    for (coord, value) in [('x', seed.x), ('y', seed.y), ('z', seed.z)] {
        if !value.is_finite() {
            return Err(ChaosError::NonFiniteSeed { coord, value });
        }
    }
    let g = &params.guards;
    // Seed coordinates are clamped so hash-derived values like 0.0 do not
    // start on the excluded boundary of (0, 1).
    let mut s = SystemState::new(sat(seed.x, g), sat(seed.y, g), sat(seed.z, g));
    for _ in 0..n_transient {
        s = ils_step(&s, params);
    }
    let mut states = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        s = ils_step(&s, params);
        states.push(s);
    }
    Ok(Orbit {
        states,
        transient_discarded: n_transient,
        params: *params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn default_params() -> SystemParams {
        SystemParams::new(10.0, 4.0, 5.0).unwrap()
    }

    #[test]
    fn sat_clamps_to_margin() {
        let g = Guards::default();
        assert_eq!(sat(0.5, &g), 0.5);
        assert_eq!(sat(-0.2, &g), g.eps());
        assert_eq!(sat(1.7, &g), 1.0 - g.eps());
    }

    #[test]
    fn den_floors_near_half() {
        let g = Guards::default();
        assert_eq!(den(0.75, &g), 0.5);
        // sgn(0) = +1 convention
        assert_eq!(den(0.5, &g), g.eps_d());
        assert_eq!(den(0.5 - g.eps_d() / 4.0, &g), -g.eps_d());
        // magnitude is never below the floor
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let u: f64 = rng.gen_range(-0.5..1.5);
            assert!(den(u, &g).abs() >= g.eps_d());
        }
    }

    #[test]
    fn primitive_map_values() {
        let g = Guards::default();
        assert!((map_g(0.5, 3.7) - 0.925).abs() < 1e-15);
        assert!((map_h(0.75, 5.0) - 1.0).abs() < 1e-12);
        // den(0.75) = 0.5, sin(pi/2) = 1
        assert!((map_f(0.75, std::f64::consts::FRAC_PI_4, &g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn param_validation() {
        assert!(SystemParams::new(10.0, 4.0, 5.0).is_ok());
        assert!(SystemParams::new(0.0, 4.0, 5.0).is_err());
        assert!(SystemParams::new(10.0, 4.1, 5.0).is_err());
        assert!(SystemParams::new(10.0, 0.0, 5.0).is_err());
        assert!(SystemParams::new(10.0, 4.0, -1.0).is_err());
        assert!(Guards::new(0.6, 1e-12).is_err());
        assert!(Guards::new(1e-12, 0.0).is_err());
    }

    #[test]
    fn ils_step_hand_example() {
        // state (0.5, 0.5, 0.5) at alpha=10, r=4, mu=5: the coupling term
        // vanishes (y = z), u1 = 0.5*1 + 0.5*0.5 = 0.75, and
        // x1 = (sin 20 + 1)/2.
        let params = default_params();
        let detail = step_detail(&SystemState::new(0.5, 0.5, 0.5), &params);
        assert!((detail.u_raw[0] - 0.75).abs() < 1e-15);
        let expected = 0.5 * (20.0_f64.sin() + 1.0);
        assert_eq!(detail.next.x, expected);
        assert!((detail.next.x - 0.956473).abs() < 1e-6);
    }

    #[test]
    fn ccc_step_matches_ils_step_bitwise() {
        // The generic combinator instantiated with the ICMIC/Logistic/Sine
        // maps must agree with the dedicated step bit for bit.
        let params = default_params();
        let g = *params.guards();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let s = SystemState::new(rng.gen(), rng.gen(), rng.gen());
            let via_ils = ils_step(&s, &params);
            let via_ccc = ccc_step(
                &s,
                |u| map_f(u, params.alpha(), &g),
                |u| map_g(u, params.r()),
                |u| map_h(u, params.mu()),
                params.c(),
                &g,
            );
            assert_eq!(via_ils, via_ccc);
        }
    }

    #[test]
    fn ccc_endpoint_algebra() {
        // With c = 0 the first coupling combination is a convex mixture:
        // at x = 1 it reduces to G(y), at x = 0 to H(z) (pre-sat value).
        let params = default_params().with_coupling(0.0);
        let (y, z) = (0.37, 0.81);
        let d1 = step_detail(&SystemState::new(1.0, y, z), &params);
        assert!((d1.u_raw[0] - map_g(y, params.r())).abs() < 1e-15);
        let d0 = step_detail(&SystemState::new(0.0, y, z), &params);
        assert!((d0.u_raw[0] - map_h(z, params.mu())).abs() < 1e-15);
    }

    #[test]
    fn orbit_outputs_stay_in_unit_cube() {
        let params = default_params();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let seed = SystemState::new(
                rng.gen_range(-1.0..2.0),
                rng.gen_range(-1.0..2.0),
                rng.gen_range(-1.0..2.0),
            );
            let orbit = generate_orbit(&seed, &params, 10, 200).unwrap();
            for s in orbit.states() {
                assert!((0.0..=1.0).contains(&s.x));
                assert!((0.0..=1.0).contains(&s.y));
                assert!((0.0..=1.0).contains(&s.z));
            }
        }
    }

    #[test]
    fn orbit_definition_and_determinism() {
        let params = default_params();
        let seed = SystemState::new(0.3, 0.4, 0.6);
        let orbit = generate_orbit(&seed, &params, 0, 1).unwrap();
        assert_eq!(orbit.len(), 1);
        let g = params.guards();
        let clamped = SystemState::new(sat(seed.x, g), sat(seed.y, g), sat(seed.z, g));
        assert_eq!(orbit.states()[0], ils_step(&clamped, &params));

        let a = generate_orbit(&seed, &params, 50, 100).unwrap();
        let b = generate_orbit(&seed, &params, 50, 100).unwrap();
        assert_eq!(a.states(), b.states());
    }

    #[test]
    fn orbit_rejects_non_finite_seed() {
        let params = default_params();
        let err = generate_orbit(&SystemState::new(f64::NAN, 0.3, 0.3), &params, 0, 1);
        assert!(matches!(err, Err(ChaosError::NonFiniteSeed { coord: 'x', .. })));
    }

    #[test]
    fn nearby_seeds_diverge() {
        // delta = 1e-16 separates to > 0.1 within 50 samples at (10, 4, 5)
        let params = default_params();
        let a = generate_orbit(&SystemState::new(0.3, 0.3, 0.3), &params, 0, 50).unwrap();
        let b = generate_orbit(
            &SystemState::new(0.3 + 1e-16, 0.3 + 1e-16, 0.3 + 1e-16),
            &params,
            0,
            50,
        )
        .unwrap();
        let max_diff = a
            .states()
            .iter()
            .zip(b.states())
            .map(|(p, q)| {
                (p.x - q.x)
                    .abs()
                    .max((p.y - q.y).abs())
                    .max((p.z - q.z).abs())
            })
            .fold(0.0_f64, f64::max);
        assert!(max_diff > 0.1, "max diff {max_diff} did not exceed 0.1");
    }
}
