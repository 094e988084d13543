//! Per-joint drive response and electrical energy of a move.
//!
//! Each joint is a geared DC drive under a feedback-linearized position
//! controller whose closed loop realizes the double integrator
//! `G_p = 1/s²` shaped to the target transfer function
//! `(3 τ_in s + 1)/(τ_in s + 1)³`, optionally cascaded with a first-order
//! input delay `1/(τ_delay s + 1)`. Both responses have exact closed
//! forms:
//!
//! * step input (`τ_delay = 0`): with `u = t/τ_in`,
//!   `q/Δq = 1 − e^{−u}(1 + u − u²)`;
//! * delayed input: exact partial fractions of
//!   `b(3τs + 1)/(τ³ s (s+b)(s+a)³)` with `a = 1/τ_in`, `b = 1/τ_delay`.
//!
//! Below `τ_delay ≤ SWITCH_RATIO·τ_in` the delayed coefficients are
//! ill-conditioned and the step forms (their analytic limit) are used.
//!
//! The electrical side solves `L dI/dt + R I = V − (K_b/r) q̇` with the
//! armature voltage `V = (rR/K_m)(M_eff v + B_eff q̇)` of the decoupled
//! model (`M_eff = J_m/r`, `B_eff = B/r`), and integrates `∫ V·I dt` by
//! the trapezoid rule on a grid resolving the electrical time constant.

use crate::error::{Error, Result};
use crate::kinematics::{inverse_kinematics, Orientation, Pose, RobotGeometry};
use crate::vec3::Point3;

/// Below `tau_delay <= SWITCH_RATIO * tau_in` the delayed closed forms
/// collapse to the step forms (their analytic limit); the partial-fraction
/// coefficients are ill-conditioned there.
pub const SWITCH_RATIO: f64 = 1.5e-4;

/// Settling band as a fraction of the move magnitude.
pub const SETTLING_BAND: f64 = 0.02;

/// Convert a back-EMF constant from mV/rpm to V·s/rad.
pub fn kb_from_mv_per_rpm(kb_mv_per_rpm: f64) -> f64 {
    kb_mv_per_rpm * 1e-3 * 60.0 / (2.0 * std::f64::consts::PI)
}

/// Motor, gearbox, and friction constants of one joint drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorGearParams {
    /// Armature resistance (ohm).
    pub r_ohm: f64,
    /// Armature inductance (henry).
    pub l_h: f64,
    /// Back-EMF constant (V·s/rad); see [`kb_from_mv_per_rpm`].
    pub kb_v_s_per_rad: f64,
    /// Torque constant (N·m/A).
    pub km_nm_per_a: f64,
    /// Arm-side inertia (kg·m²).
    pub ja_kgm2: f64,
    /// Gear inertia (kg·m²).
    pub jg_kgm2: f64,
    /// Gear ratio (dimensionless).
    pub gear_ratio: f64,
    /// Mechanical viscous friction (N·m·s/rad).
    pub bm_nms_per_rad: f64,
}

impl MotorGearParams {
    /// Validating constructor: every constant must be finite and > 0.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r_ohm: f64,
        l_h: f64,
        kb_v_s_per_rad: f64,
        km_nm_per_a: f64,
        ja_kgm2: f64,
        jg_kgm2: f64,
        gear_ratio: f64,
        bm_nms_per_rad: f64,
    ) -> Result<Self> {
        let p = MotorGearParams {
            r_ohm,
            l_h,
            kb_v_s_per_rad,
            km_nm_per_a,
            ja_kgm2,
            jg_kgm2,
            gear_ratio,
            bm_nms_per_rad,
        };
        for (name, v) in [
            ("r_ohm", p.r_ohm),
            ("l_h", p.l_h),
            ("kb_v_s_per_rad", p.kb_v_s_per_rad),
            ("km_nm_per_a", p.km_nm_per_a),
            ("ja_kgm2", p.ja_kgm2),
            ("jg_kgm2", p.jg_kgm2),
            ("gear_ratio", p.gear_ratio),
            ("bm_nms_per_rad", p.bm_nms_per_rad),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::ValidationError(format!(
                    "MotorGearParams.{name} must be > 0, got {v}"
                )));
            }
        }
        Ok(p)
    }

    /// Catalog drive constants of the reference arm's joints.
    pub fn reference() -> Self {
        MotorGearParams {
            r_ohm: 0.03,
            l_h: 0.1e-3,
            kb_v_s_per_rad: kb_from_mv_per_rpm(7.0),
            km_nm_per_a: 0.0674,
            ja_kgm2: 0.09847,
            jg_kgm2: 0.05,
            gear_ratio: 200.0,
            bm_nms_per_rad: 0.06,
        }
    }

    /// Total rotor-side inertia `J_m = J_a + J_g` (always recomputed).
    pub fn jm(&self) -> f64 {
        self.ja_kgm2 + self.jg_kgm2
    }

    /// Effective damping `B = B_m + K_b·K_m/R` (always recomputed).
    pub fn b(&self) -> f64 {
        self.bm_nms_per_rad + self.kb_v_s_per_rad * self.km_nm_per_a / self.r_ohm
    }

    /// Largest integration step that resolves the electrical time
    /// constant: `L/(10 R)`.
    pub fn step_limit(&self) -> f64 {
        self.l_h / (10.0 * self.r_ohm)
    }
}

/// Controller shaping constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    /// Closed-loop time constant τ_in (s), > 0.
    pub tau_in_s: f64,
    /// Input delay time constant τ_delay (s), ≥ 0.
    pub tau_delay_s: f64,
}

impl ControlParams {
    /// Validating constructor; rejects the near-degenerate pair
    /// `|τ_in − τ_delay| < 1e-6·τ_in`.
    pub fn new(tau_in_s: f64, tau_delay_s: f64) -> Result<Self> {
        if !(tau_in_s.is_finite() && tau_in_s > 0.0) {
            return Err(Error::ValidationError(format!(
                "ControlParams.tau_in_s must be > 0, got {tau_in_s}"
            )));
        }
        if !(tau_delay_s.is_finite() && tau_delay_s >= 0.0) {
            return Err(Error::ValidationError(format!(
                "ControlParams.tau_delay_s must be >= 0, got {tau_delay_s}"
            )));
        }
        let p = ControlParams { tau_in_s, tau_delay_s };
        p.check_degenerate()?;
        Ok(p)
    }

    fn check_degenerate(&self) -> Result<()> {
        if (self.tau_in_s - self.tau_delay_s).abs() < 1e-6 * self.tau_in_s {
            return Err(Error::NearDegenerateTimeConstants {
                tau_in: self.tau_in_s,
                tau_delay: self.tau_delay_s,
            });
        }
        Ok(())
    }
}

/// One joint's move under a given drive and controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointMove {
    /// Start angle (rad).
    pub q_initial: f64,
    /// Target angle (rad).
    pub q_final: f64,
    /// Drive constants.
    pub params: MotorGearParams,
    /// Controller constants.
    pub control: ControlParams,
}

impl JointMove {
    /// Validating constructor: endpoints must be finite.
    pub fn new(
        q_initial: f64,
        q_final: f64,
        params: MotorGearParams,
        control: ControlParams,
    ) -> Result<Self> {
        if !q_initial.is_finite() || !q_final.is_finite() {
            return Err(Error::ValidationError(format!(
                "JointMove endpoints must be finite, got ({q_initial}, {q_final})"
            )));
        }
        Ok(JointMove { q_initial, q_final, params, control })
    }

    fn dq(&self) -> f64 {
        self.q_final - self.q_initial
    }
}

/// Energy and settling time of a whole-arm move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyQuote {
    /// Electrical energy (watt-seconds).
    pub energy_ws: f64,
    /// Slowest joint's 2%-band settling time (s).
    pub settling_s: f64,
}

/// Normalized step response family, Eq.-(37)–(39) forms: returns
/// `(y, ẏ, v̈)` scaled so that the position tends to 1.
fn resp_step_unit(tau: f64, t: f64) -> (f64, f64, f64) {
    let u = t / tau;
    let e = (-u).exp();
    let y = 1.0 - e * (1.0 + u - u * u);
    let yd = e * (3.0 * u - u * u) / tau;
    let v = e * (u * u - 5.0 * u + 3.0) / (tau * tau);
    (y, yd, v)
}

/// Exact partial fractions of `b(3τs + 1)/(τ³ s (s+b)(s+a)³)`:
/// returns `(a, b, k_d, [c0, c1, c2])` such that
/// `y(t) = 1 + k_d e^{−bt} + e^{−at}(c0 + c1 t + c2 t²)`.
fn delayed_coeffs(tau: f64, taud: f64) -> (f64, f64, f64, [f64; 3]) {
    let a = 1.0 / tau;
    let b = 1.0 / taud;
    let kd = (3.0 * tau * b - 1.0) / (tau.powi(3) * (a - b).powi(3));
    let c2 = b / (tau * tau * (b - a));
    let c1 = -b * (a + b) / (tau * (a - b) * (a - b));
    let c0 = -1.0 - kd;
    (a, b, kd, [c0, c1, c2])
}

/// Coefficients of `d/dt [e^{−at} P(t)] = e^{−at} (P'(t) − a P(t))`.
fn poly_deriv(p: [f64; 3], a: f64) -> [f64; 3] {
    [p[1] - a * p[0], 2.0 * p[2] - a * p[1], -a * p[2]]
}

fn resp_delayed_unit(tau: f64, taud: f64, t: f64) -> (f64, f64, f64) {
    let (a, b, kd, p) = delayed_coeffs(tau, taud);
    let pd = poly_deriv(p, a);
    let pdd = poly_deriv(pd, a);
    let ea = (-a * t).exp();
    let eb = (-b * t).exp();
    let eval = |c: [f64; 3]| c[0] + c[1] * t + c[2] * t * t;
    let y = 1.0 + kd * eb + ea * eval(p);
    let yd = -b * kd * eb + ea * eval(pd);
    let v = b * b * kd * eb + ea * eval(pdd);
    (y, yd, v)
}

fn response_unit(control: &ControlParams, t: f64) -> Result<(f64, f64, f64)> {
    control.check_degenerate()?;
    if control.tau_delay_s <= SWITCH_RATIO * control.tau_in_s {
        Ok(resp_step_unit(control.tau_in_s, t))
    } else {
        Ok(resp_delayed_unit(control.tau_in_s, control.tau_delay_s, t))
    }
}

/// Closed-form joint response: position `q(t)`, velocity `q̇(t)`, and
/// virtual input `v(t) = q̈(t)` of the shaped double integrator.
pub fn joint_response(mv: &JointMove, t: f64) -> Result<(f64, f64, f64)> {
    let (y, yd, v) = response_unit(&mv.control, t)?;
    let dq = mv.dq();
    Ok((mv.q_initial + dq * y, dq * yd, dq * v))
}

/// Armature voltage `V(t) = (rR/K_m)(M_eff v + B_eff q̇)` of the
/// decoupled model; with `M_eff = J_m/r`, `B_eff = B/r` this is
/// `(R/K_m)(J_m v + B q̇)`.
pub fn joint_voltage(mv: &JointMove, t: f64) -> Result<f64> {
    let (_, qd, v) = joint_response(mv, t)?;
    let p = &mv.params;
    Ok((p.r_ohm / p.km_nm_per_a) * (p.jm() * v + p.b() * qd))
}

/// Core RL integrator: solves `L dI/dt + R I = V(t) − (K_b/r)·q̇(t)` by
/// classical RK4 on the given grid with `I(0) = 0`.
fn rl_current(
    params: &MotorGearParams,
    grid: &[f64],
    mut drive: impl FnMut(f64) -> Result<(f64, f64)>,
) -> Result<Vec<f64>> {
    let limit = params.step_limit();
    let mut current = Vec::with_capacity(grid.len());
    current.push(0.0);
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    for w in grid.windows(2) {
        let dt = w[1] - w[0];
        if !(dt > 0.0) {
            return Err(Error::ValidationError(format!(
                "time grid must be strictly increasing (step {dt})"
            )));
        }
        if dt > limit * (1.0 + 1e-9) {
            return Err(Error::StepTooCoarse { step: dt, limit });
        }
        let t = w[0];
        let y = *current.last().expect("seeded with I(0)");
        let mut f = |tt: f64, yy: f64| -> Result<f64> {
            let (v_t, qd_t) = drive(tt)?;
            Ok((v_t - params.r_ohm * yy - (params.kb_v_s_per_rad / params.gear_ratio) * qd_t)
                / params.l_h)
        };
        let k1 = f(t, y)?;
        let k2 = f(t + dt / 2.0, y + dt / 2.0 * k1)?;
        let k3 = f(t + dt / 2.0, y + dt / 2.0 * k2)?;
        let k4 = f(t + dt, y + dt * k3)?;
        current.push(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    Ok(current)
}

/// Armature current samples on `time_grid` for the move's closed-form
/// drive waveforms. The grid must be increasing with steps at most
/// `L/(10R)`.
pub fn joint_current(mv: &JointMove, time_grid: &[f64]) -> Result<Vec<f64>> {
    let p = mv.params;
    rl_current(&p, time_grid, |t| {
        let (_, qd, v) = joint_response(mv, t)?;
        Ok(((p.r_ohm / p.km_nm_per_a) * (p.jm() * v + p.b() * qd), qd))
    })
}

fn settling_scan(mv: &JointMove, tmax: f64, dt: f64) -> Result<f64> {
    let dq = mv.dq();
    let band = SETTLING_BAND * dq.abs();
    let n = (tmax / dt).ceil() as i64;
    for i in (0..=n).rev() {
        let t = i as f64 * dt;
        let (q, _, _) = joint_response(mv, t)?;
        if (q - mv.q_final).abs() > band {
            return Ok((i + 1) as f64 * dt);
        }
    }
    Ok(0.0)
}

/// 2%-band settling time, located on the default integration grid
/// (step `L/(10R)`) by a backward scan from `40·max(τ_in, τ_delay, 0.01)`.
pub fn settling_time(mv: &JointMove) -> Result<f64> {
    let tmax = 40.0 * mv.control.tau_in_s.max(mv.control.tau_delay_s).max(0.01);
    settling_scan(mv, tmax, mv.params.step_limit())
}

/// [`joint_energy`] with the integration step divided by `refine`
/// (for grid-convergence checks).
pub fn joint_energy_refined(mv: &JointMove, horizon: Option<f64>, refine: u32) -> Result<f64> {
    let dt_max = mv.params.step_limit() / f64::from(refine.max(1));
    let horizon = match horizon {
        Some(h) => h,
        None => {
            let tmax = 40.0 * mv.control.tau_in_s.max(mv.control.tau_delay_s).max(0.01);
            let ts = settling_scan(mv, tmax, dt_max * 4.0)?;
            ts + 5.0 * mv.control.tau_in_s.max(mv.control.tau_delay_s)
        }
    };
    if !(horizon > 0.0) {
        return Ok(0.0);
    }
    let n = (horizon / dt_max).ceil() as usize;
    let dt = horizon / n as f64;
    let p = mv.params;
    let volt_at = |t: f64| -> Result<(f64, f64)> {
        let (_, qd, v) = joint_response(mv, t)?;
        Ok(((p.r_ohm / p.km_nm_per_a) * (p.jm() * v + p.b() * qd), qd))
    };
    let mut volts = Vec::with_capacity(n + 1);
    for i in 0..=n {
        volts.push(volt_at(i as f64 * dt)?.0);
    }
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let current = rl_current(&p, &grid, volt_at)?;
    let mut energy = 0.0;
    for i in 0..n {
        energy += 0.5 * (volts[i] * current[i] + volts[i + 1] * current[i + 1]) * dt;
    }
    Ok(energy)
}

/// Electrical energy `∫ V·I dt` of one joint's move.
///
/// `horizon = None` integrates to settling time plus
/// `5·max(τ_in, τ_delay)`; an explicit horizon must cover settling (the
/// exponential tail beyond it is negligible, covered by the 0.5%
/// grid-convergence acceptance band).
pub fn joint_energy(mv: &JointMove, horizon: Option<f64>) -> Result<f64> {
    joint_energy_refined(mv, horizon, 1)
}

/// Energy and settling time of the arm move between two camera positions
/// at a fixed orientation: inverse kinematics at both endpoints, then the
/// six per-joint energies summed and the slowest settling taken.
pub fn move_energy(
    p_a: Point3,
    p_b: Point3,
    geom: &RobotGeometry,
    params: &MotorGearParams,
    control: &ControlParams,
    orientation: Orientation,
) -> Result<EnergyQuote> {
    let qa = inverse_kinematics(&Pose::at(p_a, orientation), geom)?;
    let qb = inverse_kinematics(&Pose::at(p_b, orientation), geom)?;
    let mut energy = 0.0;
    let mut settling: f64 = 0.0;
    for j in 0..6 {
        if (qb[j] - qa[j]).abs() < 1e-15 {
            continue;
        }
        let mv = JointMove { q_initial: qa[j], q_final: qb[j], params: *params, control: *control };
        energy += joint_energy(&mv, None)?;
        settling = settling.max(settling_time(&mv)?);
    }
    Ok(EnergyQuote { energy_ws: energy, settling_s: settling })
}

/// One `(τ_delay, energy, settling)` row per requested delay for the move
/// between `p_a` and `p_b`.
pub fn energy_table(
    p_a: Point3,
    p_b: Point3,
    geom: &RobotGeometry,
    params: &MotorGearParams,
    tau_in_s: f64,
    delays: &[f64],
    orientation: Orientation,
) -> Result<Vec<(f64, f64, f64)>> {
    if delays.is_empty() {
        return Err(Error::ValidationError("energy table: the delay list is empty".into()));
    }
    let mut rows = Vec::with_capacity(delays.len());
    for &taud in delays {
        let control = ControlParams::new(tau_in_s, taud)?;
        let quote = move_energy(p_a, p_b, geom, params, &control, orientation)?;
        rows.push((taud, quote.energy_ws, quote.settling_s));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mv(dq: f64, taud: f64) -> JointMove {
        JointMove {
            q_initial: 0.0,
            q_final: dq,
            params: MotorGearParams::reference(),
            control: ControlParams { tau_in_s: 0.009, tau_delay_s: taud },
        }
    }

    #[test]
    fn response_endpoints() {
        for taud in [0.0, 0.3] {
            let m = mv(0.7, taud);
            let (q0, qd0, _) = joint_response(&m, 0.0).unwrap();
            assert_abs_diff_eq!(q0, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(qd0, 0.0, epsilon = 1e-12);
            let (qf, qdf, vf) = joint_response(&m, 60.0 * (0.009f64).max(taud)).unwrap();
            assert_abs_diff_eq!(qf, 0.7, epsilon = 1e-9);
            assert_abs_diff_eq!(qdf, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(vf, 0.0, epsilon = 1e-9);
        }
        let (_, _, v0) = joint_response(&mv(0.7, 0.0), 0.0).unwrap();
        assert_abs_diff_eq!(v0, 3.0 * 0.7 / (0.009f64 * 0.009), epsilon = 1e-9);
    }

    #[test]
    fn delayed_forms_reduce_to_step_forms() {
        // below the switch ratio the families agree identically; just above
        // it, to first order in tau_delay/tau_in
        let tau = 0.009;
        for &taud in &[1e-6, 9e-7] {
            let m = mv(1.0, taud);
            for u in [0.2, 0.5, 1.0, 1.5, 2.2, 2.8, 4.0, 6.0, 8.0] {
                let t = u * tau;
                let (q, qd, v) = joint_response(&m, t).unwrap();
                let (ys, yds, vs) = super::resp_step_unit(tau, t);
                for (got, want) in [(q, ys), (qd, yds), (v, vs)] {
                    let rel = (got - want).abs() / want.abs().max(got.abs()).max(1e-30);
                    assert!(rel <= 1e-6, "taud {taud} u {u}: rel dev {rel}");
                }
            }
        }
    }

    #[test]
    fn near_degenerate_time_constants_rejected() {
        assert!(matches!(
            ControlParams::new(0.009, 0.009),
            Err(Error::NearDegenerateTimeConstants { .. })
        ));
        let m = JointMove {
            q_initial: 0.0,
            q_final: 1.0,
            params: MotorGearParams::reference(),
            control: ControlParams { tau_in_s: 0.009, tau_delay_s: 0.009 * (1.0 + 1e-9) },
        };
        assert!(matches!(
            joint_response(&m, 0.01),
            Err(Error::NearDegenerateTimeConstants { .. })
        ));
        assert!(ControlParams::new(0.009, 0.009 * 1.01).is_ok());
    }

    #[test]
    fn voltage_linearity_and_decay() {
        let zero = mv(0.0, 0.2);
        for t in [0.0, 0.05, 0.3, 1.0] {
            assert_eq!(joint_voltage(&zero, t).unwrap(), 0.0);
        }
        let single = mv(0.4, 0.2);
        let double = mv(0.8, 0.2);
        for t in [0.0, 0.01, 0.1, 0.5] {
            assert_abs_diff_eq!(
                joint_voltage(&double, t).unwrap(),
                2.0 * joint_voltage(&single, t).unwrap(),
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(joint_voltage(&single, 20.0).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn rl_integrator_matches_analytic_oracle() {
        let p = MotorGearParams::reference();
        let dt = p.l_h / (20.0 * p.r_ohm);
        let n = 4000;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();

        // constant drive, no motion: I -> V/R
        let v0 = 2.5;
        let i_const = super::rl_current(&p, &grid, |_| Ok((v0, 0.0))).unwrap();
        assert_abs_diff_eq!(*i_const.last().unwrap(), v0 / p.r_ohm, epsilon = 1e-6);

        // sinusoidal drive: amplitude and phase of the steady RL response
        let omega = 2.0 * std::f64::consts::PI * 200.0;
        let i_sin = super::rl_current(&p, &grid, |t| Ok(((omega * t).sin(), 0.0))).unwrap();
        let denom = p.r_ohm * p.r_ohm + (p.l_h * omega) * (p.l_h * omega);
        let amp = 1.0 / denom.sqrt();
        let tail_start = grid.len() / 2;
        let mut worst = 0.0f64;
        for (i, &t) in grid.iter().enumerate().skip(tail_start) {
            let analytic = (p.r_ohm * (omega * t).sin() - p.l_h * omega * (omega * t).cos()
                + p.l_h * omega * (-p.r_ohm * t / p.l_h).exp())
                / denom;
            worst = worst.max((i_sin[i] - analytic).abs() / amp);
        }
        assert!(worst < 0.01, "RL response deviates {worst} of amplitude");

        // too-coarse grid is rejected
        let coarse: Vec<f64> = (0..=10).map(|i| i as f64 * p.step_limit() * 2.0).collect();
        assert!(matches!(
            joint_current(&mv(1.0, 0.0), &coarse),
            Err(Error::StepTooCoarse { .. })
        ));
    }

    #[test]
    fn zero_move_costs_nothing() {
        assert_eq!(joint_energy(&mv(0.0, 0.2), None).unwrap(), 0.0);
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 1e-4).collect();
        assert!(joint_current(&mv(0.0, 0.2), &grid).unwrap().iter().all(|&i| i == 0.0));
    }

    #[test]
    fn energy_sign_flip_invariance_and_quadratic_scaling() {
        let e_pos = joint_energy(&mv(0.3, 0.1), None).unwrap();
        let e_neg = joint_energy(&mv(-0.3, 0.1), None).unwrap();
        assert_eq!(e_pos, e_neg);
        let e_double = joint_energy(&mv(0.6, 0.1), None).unwrap();
        assert_abs_diff_eq!(e_double / e_pos, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn energy_grid_convergence() {
        let m = mv(1.0, 0.1);
        let coarse = joint_energy_refined(&m, None, 1).unwrap();
        let fine = joint_energy_refined(&m, None, 2).unwrap();
        assert!(
            (coarse - fine).abs() / fine.abs() < 0.005,
            "step halving moved the energy by {}",
            (coarse - fine).abs() / fine.abs()
        );
    }

    #[test]
    fn settling_time_behaviour() {
        let ts0 = settling_time(&mv(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(ts0, 0.07, epsilon = 0.01);
        // magnitude independence is exact (normalized response, same grid)
        assert_eq!(ts0, settling_time(&mv(0.013, 0.0)).unwrap());
        assert_eq!(ts0, settling_time(&mv(-1.7, 0.0)).unwrap());
        // strictly increasing along the delay sweep
        let sweep: Vec<f64> = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
            .iter()
            .map(|&d| settling_time(&mv(1.0, d)).unwrap())
            .collect();
        for w in sweep.windows(2) {
            assert!(w[0] < w[1], "settling not increasing: {sweep:?}");
        }
    }

    #[test]
    fn velocity_matches_finite_difference() {
        let h = 1e-5;
        for &taud in &[0.0, 0.05, 0.3] {
            let m = mv(1.0, taud);
            for u in [0.2, 0.5, 1.0, 2.2, 4.0, 6.0] {
                let t = u * if taud > 0.0 { taud.max(0.009) } else { 0.009 };
                let qp = joint_response(&m, t + h).unwrap().0;
                let qm = joint_response(&m, t - h).unwrap().0;
                let qd = joint_response(&m, t).unwrap().1;
                let fd = (qp - qm) / (2.0 * h);
                let rel = (fd - qd).abs() / qd.abs().max(1e-12);
                assert!(rel <= 1e-4, "taud {taud} u {u}: qdot rel dev {rel}");
            }
        }
    }

    #[test]
    fn virtual_input_is_acceleration() {
        let h = 1e-5;
        for &taud in &[0.0, 0.05, 0.3] {
            let m = mv(1.0, taud);
            for u in [0.2, 0.5, 1.0, 2.2] {
                let t = u * if taud > 0.0 { taud.max(0.009) } else { 0.009 };
                let qdp = joint_response(&m, t + h).unwrap().1;
                let qdm = joint_response(&m, t - h).unwrap().1;
                let v = joint_response(&m, t).unwrap().2;
                let fd = (qdp - qdm) / (2.0 * h);
                let scale = v.abs().max(qdp.abs() / h * 1e-8).max(1e-9);
                assert!(
                    (fd - v).abs() / scale <= 1e-3,
                    "taud {taud} u {u}: v vs dq̇/dt rel dev {}",
                    (fd - v).abs() / scale
                );
            }
        }
    }

    #[test]
    fn move_energy_endpoints_and_symmetry() {
        let geom = RobotGeometry::irb4600();
        let params = MotorGearParams::reference();
        let control = ControlParams::new(0.009, 0.0).unwrap();
        let o = Orientation::lens_down();
        let p_a = [-0.30, 0.05, 1.20];
        let p_b = [-0.45, 0.45, 1.20];
        let same = move_energy(p_a, p_a, &geom, &params, &control, o).unwrap();
        assert_eq!(same.energy_ws, 0.0);
        assert_eq!(same.settling_s, 0.0);
        let fwd = move_energy(p_a, p_b, &geom, &params, &control, o).unwrap();
        let rev = move_energy(p_b, p_a, &geom, &params, &control, o).unwrap();
        assert!(fwd.energy_ws > 0.0);
        assert!((fwd.energy_ws - rev.energy_ws).abs() / fwd.energy_ws < 0.01);
    }

    #[test]
    fn energy_table_rows() {
        let geom = RobotGeometry::irb4600();
        let params = MotorGearParams::reference();
        let o = Orientation::lens_down();
        let p_a = [-0.30, 0.05, 1.20];
        let p_b = [-0.45, 0.45, 1.20];
        let single = energy_table(p_a, p_b, &geom, &params, 0.009, &[0.4], o).unwrap();
        assert_eq!(single.len(), 1);
        let repeated = energy_table(p_a, p_b, &geom, &params, 0.009, &[0.4, 0.4], o).unwrap();
        assert_eq!(repeated[0], repeated[1]);
        assert!(energy_table(p_a, p_b, &geom, &params, 0.009, &[], o).is_err());
        // trend spot-check (full sweep in the acceptance suite)
        let rows = energy_table(p_a, p_b, &geom, &params, 0.009, &[0.0, 0.4, 1.0], o).unwrap();
        assert!(rows[0].1 > rows[1].1 && rows[1].1 > rows[2].1, "energies {rows:?}");
        assert!(rows[0].2 < rows[1].2 && rows[1].2 < rows[2].2, "settlings {rows:?}");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn energy_nonnegative(dq in -2.0f64..2.0, taud in 0.02f64..0.8) {
                let e = joint_energy(&mv(dq, taud), None).unwrap();
                prop_assert!(e >= 0.0);
            }

            #[test]
            fn settling_nonnegative_and_bounded(dq in 0.05f64..2.0, taud in 0.02f64..0.8) {
                let ts = settling_time(&mv(dq, taud)).unwrap();
                prop_assert!(ts >= 0.0);
                prop_assert!(ts <= 40.0 * taud.max(0.009).max(0.01));
            }
        }
    }
}
