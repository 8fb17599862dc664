//! Analytic and finite-difference Jacobians of the 3D-ILS step.

use crate::chaos::{den, map_g, map_h, sat, step_detail, ils_step, Guards, SystemParams, SystemState};
use crate::dynamics::DynamicsError;

/// 3x3 Jacobian of one map step; row `i` holds the partial derivatives of
/// the i-th output coordinate with respect to (x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian3(pub [[f64; 3]; 3]);

impl Jacobian3 {
    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    pub fn row(&self, i: usize) -> [f64; 3] {
        self.0[i]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

fn logistic_deriv(u: f64, r: f64) -> f64 {
    r * (1.0 - 2.0 * u)
}

fn sine_deriv(u: f64, mu: f64) -> f64 {
    mu * std::f64::consts::PI * (mu * std::f64::consts::PI * (2.0 * u - 1.0)).cos()
}

/// Piecewise derivative of the safeguarded denominator: 2 on the live
/// branch, 0 inside the floor region.
fn den_deriv(v: f64, guards: &Guards) -> f64 {
    if (2.0 * v - 1.0).abs() >= guards.eps_d() {
        2.0
    } else {
        0.0
    }
}

/// Piecewise derivative of the saturation operator: 1 strictly inside
/// `(eps, 1-eps)`, 0 on the clamped branches.
fn sat_deriv(u: f64, guards: &Guards) -> f64 {
    if u > guards.eps() && u < 1.0 - guards.eps() {
        1.0
    } else {
        0.0
    }
}

/// Derivative of the safeguarded ICMIC map
/// `Phi(v) = (sin(alpha/den(v)) + 1)/2`:
/// `Phi'(v) = -alpha cos(alpha/den(v)) den'(v) / (2 den(v)^2)`.
fn icmic_deriv(v: f64, alpha: f64, guards: &Guards) -> f64 {
    let d = den(v, guards);
    -alpha * (alpha / d).cos() * den_deriv(v, guards) / (2.0 * d * d)
}

/// Full analytic Jacobian of the 3D-ILS step at `state`, assembled by the
/// chain rule through the sequential update: the second and third rows
/// carry the dependence of `u2` on the new `x` and of `u3` on the new
/// `x` and `y`. Rows become exactly zero whenever the corresponding
/// saturation or denominator guard is active.
pub fn jacobian_analytic(state: &SystemState, params: &SystemParams) -> Jacobian3 {
    let g = params.guards();
    let (alpha, r, mu, c) = (params.alpha(), params.r(), params.mu(), params.c());
    let detail = step_detail(state, params);
    let [u1, u2, u3] = detail.u_raw;
    let SystemState { x, y, z } = *state;
    let (x1, y1) = (detail.next.x, detail.next.y);

    let m1 = icmic_deriv(sat(u1, g), alpha, g) * sat_deriv(u1, g);
    let m2 = icmic_deriv(sat(u2, g), alpha, g) * sat_deriv(u2, g);
    let m3 = icmic_deriv(sat(u3, g), alpha, g) * sat_deriv(u3, g);

    let du1 = [
        map_g(y, r) - map_h(z, mu) + c * (y - z),
        x * logistic_deriv(y, r) + c * (x - 0.5),
        (1.0 - x) * sine_deriv(z, mu) - c * (x - 0.5),
    ];
    let row1 = [m1 * du1[0], m1 * du1[1], m1 * du1[2]];

    let a2 = (1.0 - y) * sine_deriv(x1, mu) - c * (y - 0.5);
    let du2 = [
        a2 * row1[0],
        map_g(z, r) - map_h(x1, mu) + c * (z - x1) + a2 * row1[1],
        y * logistic_deriv(z, r) + c * (y - 0.5) + a2 * row1[2],
    ];
    let row2 = [m2 * du2[0], m2 * du2[1], m2 * du2[2]];

    let bx = z * logistic_deriv(x1, r) + c * (z - 0.5);
    let by = (1.0 - z) * sine_deriv(y1, mu) - c * (z - 0.5);
    let du3 = [
        bx * row1[0] + by * row2[0],
        bx * row1[1] + by * row2[1],
        map_g(x1, r) - map_h(y1, mu) + c * (x1 - y1) + bx * row1[2] + by * row2[2],
    ];
    let row3 = [m3 * du3[0], m3 * du3[1], m3 * du3[2]];

    Jacobian3([row1, row2, row3])
}

/// Central finite-difference Jacobian of an arbitrary 3-D map; column `j`
/// perturbs coordinate `j` by `h`.
fn jacobian_fd_of<F>(f: F, state: &SystemState, h: f64) -> Jacobian3
where
    F: Fn(&SystemState) -> SystemState,
{
    let mut m = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut plus = state.to_array();
        let mut minus = state.to_array();
        plus[j] += h;
        minus[j] -= h;
        let fp = f(&SystemState::from(plus)).to_array();
        let fm = f(&SystemState::from(minus)).to_array();
        for i in 0..3 {
            m[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Jacobian3(m)
}

/// Central finite-difference Jacobian of the 3D-ILS step.
pub fn jacobian_fd(
    state: &SystemState,
    params: &SystemParams,
    h: f64,
) -> Result<Jacobian3, DynamicsError> {
    if h.is_nan() || h <= 0.0 {
        return Err(DynamicsError::NonPositiveStep(h));
    }
    Ok(jacobian_fd_of(|s| ils_step(s, params), state, h))
}

/// Whether any sat or den guard is active for the step taken from `state`
/// (an active guard zeroes the corresponding Jacobian row).
pub fn guard_active(state: &SystemState, params: &SystemParams) -> bool {
    let g = params.guards();
    step_detail(state, params)
        .u_raw
        .iter()
        .any(|&u| sat_deriv(u, g) == 0.0 || den_deriv(sat(u, g), g) == 0.0)
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
    fn fd_is_exact_on_linear_map() {
        let linear = |s: &SystemState| SystemState::new(2.0 * s.x, 3.0 * s.y, 4.0 * s.z);
        let j = jacobian_fd_of(linear, &SystemState::new(0.3, 0.4, 0.5), 1e-6);
        for i in 0..3 {
            for k in 0..3 {
                let expected = if i == k { (i + 2) as f64 } else { 0.0 };
                assert!(
                    (j.0[i][k] - expected).abs() < 1e-9,
                    "entry ({i},{k}) = {}",
                    j.0[i][k]
                );
            }
        }
    }

    #[test]
    fn fd_rejects_non_positive_step() {
        let params = default_params();
        let s = SystemState::new(0.3, 0.4, 0.5);
        assert!(jacobian_fd(&s, &params, 0.0).is_err());
        assert!(jacobian_fd(&s, &params, -1e-7).is_err());
    }

    #[test]
    fn fd_halving_is_second_order() {
        // Richardson check at a well-conditioned state and mild
        // frequencies (entries stay small, so truncation dominates):
        // halving the step shrinks the deviation from the analytic
        // Jacobian by about 4. The state is the first orbit point whose
        // Jacobian entries are all tame.
        let params = SystemParams::new(0.8, 3.9, 0.9).unwrap();
        let mut s = SystemState::new(0.23, 0.62, 0.44);
        loop {
            let j = jacobian_analytic(&s, &params);
            let maxabs = j
                .0
                .iter()
                .flatten()
                .fold(0.0_f64, |acc, &e| acc.max(e.abs()));
            if (0.1..20.0).contains(&maxabs) {
                break;
            }
            s = ils_step(&s, &params);
        }
        let exact = jacobian_analytic(&s, &params);
        let dev = |h: f64| -> f64 {
            let fd = jacobian_fd(&s, &params, h).unwrap();
            let mut worst = 0.0_f64;
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((fd.0[i][j] - exact.0[i][j]).abs());
                }
            }
            worst
        };
        let d1 = dev(1e-4);
        let d2 = dev(5e-5);
        assert!(d2 < d1, "halving did not reduce the error: {d1} -> {d2}");
        let ratio = d1 / d2;
        eprintln!("fd halving: d1={d1:.3e} d2={d2:.3e} ratio={ratio:.3}");
        assert!(
            (2.0..8.0).contains(&ratio),
            "error ratio {ratio} not consistent with O(h^2)"
        );
    }

    #[test]
    fn analytic_matches_fd_on_interior_states() {
        let params = default_params();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 100 {
            let s = SystemState::new(
                rng.gen_range(0.05..0.95),
                rng.gen_range(0.05..0.95),
                rng.gen_range(0.05..0.95),
            );
            let detail_ok = crate::chaos::step_detail(&s, &params)
                .u_raw
                .iter()
                .all(|&u| u > 0.01 && u < 0.99 && (2.0 * u - 1.0).abs() > 0.05);
            if !detail_ok {
                continue;
            }
            checked += 1;
            let ja = jacobian_analytic(&s, &params);
            let jf = jacobian_fd(&s, &params, 1e-7).unwrap();
            let jf2 = jacobian_fd(&s, &params, 5e-8).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let a = ja.0[i][j];
                    if a.abs() <= 1e-3 {
                        continue;
                    }
                    // only where the FD oracle itself has converged
                    if (jf.0[i][j] - jf2.0[i][j]).abs() > 2e-6 * jf.0[i][j].abs() {
                        continue;
                    }
                    let rel = (a - jf.0[i][j]).abs() / a.abs();
                    assert!(rel <= 1e-5, "entry ({i},{j}): analytic {a} vs fd {}", jf.0[i][j]);
                }
            }
        }
    }

    #[test]
    fn clamped_sat_zeroes_first_row() {
        // A state driving u1 out of [0, 1] makes sat' = 0 and the whole
        // first row exactly zero. With c < 0 large in magnitude and
        // x G(y) + (1-x) H(z) small, u1 goes negative.
        let params = SystemParams::new(10.0, 4.0, 5.0).unwrap().with_coupling(-10.0);
        let s = SystemState::new(0.9, 1.0, 0.5);
        // u1 = 0.9 G(1) + 0.1 H(0.5) - 10 (1 - 0.5)(0.9 - 0.5)
        //    = 0 + 0.05 - 2.0 < 0
        let detail = crate::chaos::step_detail(&s, &params);
        assert!(detail.u_raw[0] < 0.0);
        let j = jacobian_analytic(&s, &params);
        assert_eq!(j.row(0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn den_floor_zeroes_row() {
        // u1 pinned exactly at 1/2 puts den on the floored branch where
        // den' = 0, so the first row is exactly zero.
        let params = default_params().with_coupling(0.0);
        // with c = 0: u1 = x G(y) + (1-x) H(z); choose y = 0.5 -> G = 1,
        // z = 0.5 -> H = 0.5, x so that u1 = 0.5: x*1 + (1-x)*0.5 = 0.5
        // forces x = 0.
        let s = SystemState::new(0.0, 0.5, 0.5);
        let detail = crate::chaos::step_detail(&s, &params);
        assert_eq!(detail.u_raw[0], 0.5);
        let j = jacobian_analytic(&s, &params);
        assert_eq!(j.row(0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let j = Jacobian3([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 10.0]]);
        assert!((j.det() - -3.0).abs() < 1e-12);
    }
}
