//! Forward and inverse kinematics of a 6-DoF elbow manipulator with a
//! spherical wrist, plus joint-limit checking.
//!
//! The arm model is a vertical base column of height `l1` with a shoulder
//! offset `a1`, an upper arm `l2`, a forearm `l3` (with an optional elbow
//! offset `l4` that only affects workspace radii, not the closed-form
//! chain), and a wrist-to-mount length `lt`. The orientation chain is
//!
//! ```text
//! R = Rz(q1) * Ry(q2 + q3) * Rx(-q4) * Ry(-q5) * Rx(q6)
//! ```
//!
//! with the end-effector direction triple read off as `a = R[:,0]` (roll,
//! the approach axis carrying the mount), `s = R[:,1]` (pitch), and
//! `n = -R[:,2]` (yaw). Positions are
//!
//! ```text
//! d = [c1 * radial, s1 * radial, l3 c23 + l2 c2 + l1] + lt * a,
//! radial = l3 s23 + l2 s2 + a1.
//! ```
//!
//! Inverse kinematics decouples at the wrist center `p = d - lt * a`,
//! solves the planar two-link problem for the arm (elbow-up branch), and
//! recovers the wrist angles from `R03^T * R06`. All returned angles are
//! normalized to `(-pi, pi]`.

use crate::error::{Error, Result};
use crate::vec3::{self, Point3};

/// Six joint angles in radians.
pub type JointVector = [f64; 6];

/// 3x3 row-major rotation matrix.
type Mat3 = [[f64; 3]; 3];

/// Link lengths of the manipulator in meters.
///
/// `l4` is the elbow offset of an L-shaped forearm; the closed-form chain
/// treats `l3` as the effective forearm length, while workspace radii use
/// `hypot(l3, l4)`. `end_effector_extension` is the protrusion of the
/// mounted object (tool or camera) beyond the mount; it contributes to
/// reachable-workspace radii only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotGeometry {
    /// Base column height (m), > 0.
    pub l1: f64,
    /// Upper-arm length (m), > 0.
    pub l2: f64,
    /// Effective forearm length (m), > 0.
    pub l3: f64,
    /// Elbow offset of an L-shaped forearm (m), >= 0.
    pub l4: f64,
    /// Shoulder offset from the base axis (m), >= 0.
    pub a1: f64,
    /// Wrist-center to mount length (m), >= 0.
    pub lt: f64,
    /// Mounted-object protrusion beyond the mount (m), >= 0.
    pub end_effector_extension: f64,
}

impl RobotGeometry {
    /// Validating constructor: the main links must be strictly positive;
    /// offsets, mount length, and extension must be non-negative and finite.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        l1: f64,
        l2: f64,
        l3: f64,
        l4: f64,
        a1: f64,
        lt: f64,
        end_effector_extension: f64,
    ) -> Result<Self> {
        let g = RobotGeometry { l1, l2, l3, l4, a1, lt, end_effector_extension };
        for (name, v) in [
            ("l1", g.l1),
            ("l2", g.l2),
            ("l3", g.l3),
            ("l4", g.l4),
            ("a1", g.a1),
            ("lt", g.lt),
            ("end_effector_extension", g.end_effector_extension),
        ] {
            if !v.is_finite() {
                return Err(Error::ValidationError(format!(
                    "RobotGeometry.{name} must be finite, got {v}"
                )));
            }
        }
        for (name, v) in [("l1", g.l1), ("l2", g.l2), ("l3", g.l3)] {
            if v <= 0.0 {
                return Err(Error::ValidationError(format!(
                    "RobotGeometry.{name} must be > 0, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("l4", g.l4),
            ("a1", g.a1),
            ("lt", g.lt),
            ("end_effector_extension", g.end_effector_extension),
        ] {
            if v < 0.0 {
                return Err(Error::ValidationError(format!(
                    "RobotGeometry.{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(g)
    }

    /// Catalog link data of the ABB IRB 4600-40/2.55 class arm with the
    /// L-shaped forearm written out as the (elbow drop, forearm run) pair.
    pub fn irb4600() -> Self {
        RobotGeometry {
            l1: 0.495,
            l2: 0.9,
            l3: 0.175,
            l4: 0.96,
            a1: 0.175,
            lt: 0.135,
            end_effector_extension: 0.0,
        }
    }

    /// Straight-forearm equivalent of [`RobotGeometry::irb4600`]: the
    /// elbow pair (0.175, 0.96) collapsed to a single forearm of length
    /// `hypot(0.175, 0.96)` so the planar two-link inverse kinematics
    /// reaches the full physical annulus of the arm.
    pub fn irb4600_equivalent() -> Self {
        RobotGeometry { l3: (0.175f64.hypot(0.96)), l4: 0.0, ..Self::irb4600() }
    }

    /// Effective radial forearm length `hypot(l3, l4)` used by workspace
    /// radii.
    pub fn forearm_radial(&self) -> f64 {
        self.l3.hypot(self.l4)
    }
}

/// Per-axis closed joint ranges in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLimits {
    /// Six (min, max) pairs in degrees, min < max.
    pub ranges_deg: [(f64, f64); 6],
}

impl JointLimits {
    /// Validating constructor: each axis needs `min < max`, both finite.
    pub fn new(ranges_deg: [(f64, f64); 6]) -> Result<Self> {
        for (i, (lo, hi)) in ranges_deg.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::ValidationError(format!(
                    "JointLimits axis {}: need finite min < max, got ({lo}, {hi})",
                    i + 1
                )));
            }
        }
        Ok(JointLimits { ranges_deg })
    }

    /// Working ranges of the ABB IRB 4600-40/2.55 class arm.
    pub fn irb4600() -> Self {
        JointLimits {
            ranges_deg: [
                (-180.0, 180.0),
                (-90.0, 150.0),
                (-180.0, 75.0),
                (-400.0, 400.0),
                (-125.0, 120.0),
                (-400.0, 400.0),
            ],
        }
    }
}

/// A fixed end-effector orientation: the direction triple without a
/// position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    /// Yaw axis.
    pub n: Point3,
    /// Pitch axis.
    pub s: Point3,
    /// Roll (approach) axis; the mount points along `a`.
    pub a: Point3,
}

impl Orientation {
    /// Camera orientation used during meshing: lens facing straight down
    /// (`a = -z`), stereo baseline parallel to the x axis.
    pub fn lens_down() -> Self {
        Orientation { n: [1.0, 0.0, 0.0], s: [0.0, -1.0, 0.0], a: [0.0, 0.0, -1.0] }
    }
}

/// End-effector pose: position plus the three orientation direction
/// vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    /// Position of the mount point (m).
    pub d: Point3,
    /// Yaw axis (unit).
    pub n: Point3,
    /// Pitch axis (unit).
    pub s: Point3,
    /// Roll / approach axis (unit).
    pub a: Point3,
}

impl Pose {
    /// Validating constructor: requires `(n, s, a)` orthonormal within
    /// `1e-9`.
    pub fn new(d: Point3, n: Point3, s: Point3, a: Point3) -> Result<Self> {
        let p = Pose { d, n, s, a };
        let err = p.orthonormality_error();
        if err > 1e-9 {
            return Err(Error::ValidationError(format!(
                "Pose orientation triple not orthonormal: deviation {err:.3e} > 1e-9"
            )));
        }
        Ok(p)
    }

    /// Pose at position `p` with a fixed orientation.
    pub fn at(p: Point3, orientation: Orientation) -> Self {
        Pose { d: p, n: orientation.n, s: orientation.s, a: orientation.a }
    }

    /// Largest deviation from unit norms and mutual orthogonality of
    /// `(n, s, a)`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for v in [self.n, self.s, self.a] {
            worst = worst.max((vec3::norm(v) - 1.0).abs());
        }
        worst = worst.max(vec3::dot(self.n, self.s).abs());
        worst = worst.max(vec3::dot(self.n, self.a).abs());
        worst = worst.max(vec3::dot(self.s, self.a).abs());
        worst
    }
}

fn rx(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
}

fn ry(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn rz(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

fn col(m: &Mat3, j: usize) -> Point3 {
    [m[0][j], m[1][j], m[2][j]]
}

/// Normalize an angle to `(-pi, pi]`.
pub fn wrap_angle(t: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = t % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// `acos` with boundary clamping: arguments within `tol` of `[-1, 1]` are
/// clamped; anything farther out is an unreachable configuration.
fn clamp_acos(x: f64, tol: f64) -> Result<f64> {
    if x > 1.0 + tol || x < -1.0 - tol {
        return Err(Error::Unreachable { arg: x });
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// Closed-form forward kinematics. Total over finite joint vectors; the
/// returned pose satisfies the orthonormality invariant by construction.
pub fn forward_kinematics(q: &JointVector, geom: &RobotGeometry) -> Pose {
    let [q1, q2, q3, q4, q5, q6] = *q;
    let r03 = mat_mul(&rz(q1), &ry(q2 + q3));
    let r36 = mat_mul(&mat_mul(&rx(-q4), &ry(-q5)), &rx(q6));
    let r = mat_mul(&r03, &r36);
    let n = vec3::scale(col(&r, 2), -1.0);
    let s = col(&r, 1);
    let a = col(&r, 0);
    let (s1, c1) = q1.sin_cos();
    let (s2, c2) = q2.sin_cos();
    let (s23, c23) = (q2 + q3).sin_cos();
    let radial = geom.l3 * s23 + geom.l2 * s2 + geom.a1;
    let d = vec3::add(
        [c1 * radial, s1 * radial, geom.l3 * c23 + geom.l2 * c2 + geom.l1],
        vec3::scale(a, geom.lt),
    );
    Pose { d, n, s, a }
}

/// Closed-form inverse kinematics, elbow-up branch.
///
/// Both base-angle branches (`atan2(py, px)` and its half-turn) are tried
/// in order and the first branch whose planar sub-problem is solvable is
/// returned. Errors:
///
/// * [`Error::SingularWristAxis`] when the wrist center lies on the base
///   axis with no shoulder offset (`q1` indeterminate);
/// * [`Error::Unreachable`] when the wrist center leaves the reachable
///   annulus of the arm links (an arccos argument beyond `[-1, 1]` by more
///   than `1e-12`).
pub fn inverse_kinematics(pose: &Pose, geom: &RobotGeometry) -> Result<JointVector> {
    let p = vec3::sub(pose.d, vec3::scale(pose.a, geom.lt));
    let [px, py, pz] = p;
    if px.hypot(py) < 1e-12 && geom.a1.abs() < 1e-12 {
        return Err(Error::SingularWristAxis);
    }
    let phi = py.atan2(px);
    let mut last_err = None;
    for q1 in [phi, wrap_angle(phi + std::f64::consts::PI)] {
        let (s1, c1) = q1.sin_cos();
        let rho = c1 * px + s1 * py - geom.a1;
        let zeta = pz - geom.l1;
        let r2 = rho * rho + zeta * zeta;
        let r = r2.sqrt();
        let (l2, l3) = (geom.l2, geom.l3);
        let gamma = match clamp_acos((l2 * l2 + r2 - l3 * l3) / (2.0 * l2 * r), 1e-12) {
            Ok(v) => v,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let q3 = match clamp_acos((l2 * l2 + l3 * l3 - r2) / (2.0 * l2 * l3), 1e-12) {
            Ok(v) => std::f64::consts::PI - v,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let q2 = rho.atan2(zeta) - gamma;
        let r03 = mat_mul(&rz(q1), &ry(q2 + q3));
        // R06 columns are (a, s, -n); M = R03^T * R06 is the wrist rotation.
        let r06: Mat3 = [
            [pose.a[0], pose.s[0], -pose.n[0]],
            [pose.a[1], pose.s[1], -pose.n[1]],
            [pose.a[2], pose.s[2], -pose.n[2]],
        ];
        let r03t: Mat3 = [
            [r03[0][0], r03[1][0], r03[2][0]],
            [r03[0][1], r03[1][1], r03[2][1]],
            [r03[0][2], r03[1][2], r03[2][2]],
        ];
        let m = mat_mul(&r03t, &r06);
        let c5 = m[0][0].clamp(-1.0, 1.0);
        let q5 = c5.acos();
        let s5 = q5.sin();
        let (q4, q6) = if s5 > 1e-9 {
            (m[1][0].atan2(m[2][0]), (-m[0][1]).atan2(-m[0][2]))
        } else {
            // Wrist singularity: axes 4 and 6 align; put the whole turn on
            // q6 (the residual wrist rotation reduces to a single roll).
            (0.0, m[2][1].atan2(m[1][1]))
        };
        return Ok([
            wrap_angle(q1),
            wrap_angle(q2),
            wrap_angle(q3),
            wrap_angle(q4),
            wrap_angle(q5),
            wrap_angle(q6),
        ]);
    }
    Err(last_err.unwrap_or(Error::Unreachable { arg: f64::NAN }))
}

/// True iff every joint angle lies inside its closed `[min, max]` interval
/// (converted from degrees).
pub fn within_joint_limits(q: &JointVector, limits: &JointLimits) -> bool {
    q.iter().zip(limits.ranges_deg.iter()).all(|(&qi, &(lo, hi))| {
        let lo = lo.to_radians();
        let hi = hi.to_radians();
        qi >= lo && qi <= hi
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn sample_within_limits(rng: &mut impl Rng, limits: &JointLimits) -> JointVector {
        let mut q = [0.0; 6];
        for (qi, &(lo, hi)) in q.iter_mut().zip(limits.ranges_deg.iter()) {
            *qi = rng.gen_range(lo..hi).to_radians();
        }
        q
    }

    /// Independent oracle: the same link parameters assembled as a chain of
    /// 4x4 homogeneous transforms.
    fn fk_oracle(q: &JointVector, g: &RobotGeometry) -> Pose {
        type M4 = [[f64; 4]; 4];
        fn mul(a: &M4, b: &M4) -> M4 {
            let mut o = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    o[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
                }
            }
            o
        }
        fn rot(m: Mat3) -> M4 {
            [
                [m[0][0], m[0][1], m[0][2], 0.0],
                [m[1][0], m[1][1], m[1][2], 0.0],
                [m[2][0], m[2][1], m[2][2], 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        }
        fn trans(x: f64, y: f64, z: f64) -> M4 {
            [[1.0, 0.0, 0.0, x], [0.0, 1.0, 0.0, y], [0.0, 0.0, 1.0, z], [0.0, 0.0, 0.0, 1.0]]
        }
        let [q1, q2, q3, q4, q5, q6] = *q;
        let mut t = rot(rz(q1));
        t = mul(&t, &trans(g.a1, 0.0, g.l1));
        t = mul(&t, &rot(ry(q2)));
        t = mul(&t, &trans(0.0, 0.0, g.l2));
        t = mul(&t, &rot(ry(q3)));
        t = mul(&t, &trans(0.0, 0.0, g.l3));
        t = mul(&t, &rot(rx(-q4)));
        t = mul(&t, &rot(ry(-q5)));
        t = mul(&t, &rot(rx(q6)));
        t = mul(&t, &trans(g.lt, 0.0, 0.0));
        Pose {
            d: [t[0][3], t[1][3], t[2][3]],
            n: [-t[0][2], -t[1][2], -t[2][2]],
            s: [t[0][1], t[1][1], t[2][1]],
            a: [t[0][0], t[1][0], t[2][0]],
        }
    }

    fn pose_distance(a: &Pose, b: &Pose) -> f64 {
        let mut worst: f64 = 0.0;
        for (u, v) in [(a.d, b.d), (a.n, b.n), (a.s, b.s), (a.a, b.a)] {
            for k in 0..3 {
                worst = worst.max((u[k] - v[k]).abs());
            }
        }
        worst
    }

    #[test]
    fn zero_pose_matches_link_sums() {
        let g = RobotGeometry::irb4600();
        let pose = forward_kinematics(&[0.0; 6], &g);
        assert_abs_diff_eq!(pose.d[0], g.lt + g.a1, epsilon = 1e-15);
        assert_abs_diff_eq!(pose.d[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pose.d[2], g.l3 + g.l2 + g.l1, epsilon = 1e-15);
        assert_abs_diff_eq!(pose.d[0], 0.310, epsilon = 1e-12);
        assert_abs_diff_eq!(pose.d[2], 1.570, epsilon = 1e-12);
        for (got, want) in pose.a.iter().zip([1.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn quarter_turn_about_base_rotates_zero_pose() {
        let g = RobotGeometry::irb4600();
        let pose = forward_kinematics(&[std::f64::consts::FRAC_PI_2, 0.0, 0.0, 0.0, 0.0, 0.0], &g);
        assert_abs_diff_eq!(pose.d[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pose.d[1], 0.310, epsilon = 1e-12);
        assert_abs_diff_eq!(pose.d[2], 1.570, epsilon = 1e-12);
    }

    #[test]
    fn fk_matches_homogeneous_chain_oracle() {
        let limits = JointLimits::irb4600();
        let mut rng = crate::rng::stream(7, crate::rng::TAG_BENCH, 0, 0);
        for g in [RobotGeometry::irb4600(), RobotGeometry::irb4600_equivalent()] {
            for _ in 0..500 {
                let q = sample_within_limits(&mut rng, &limits);
                let got = forward_kinematics(&q, &g);
                let want = fk_oracle(&q, &g);
                assert!(
                    pose_distance(&got, &want) <= 1e-9,
                    "fk deviates from transform-chain oracle by {}",
                    pose_distance(&got, &want)
                );
            }
        }
    }

    #[test]
    fn ik_of_zero_pose_is_zero() {
        let g = RobotGeometry::irb4600();
        let pose = forward_kinematics(&[0.0; 6], &g);
        let q = inverse_kinematics(&pose, &g).unwrap();
        for qi in q {
            assert!(qi.abs() <= 1e-9, "expected zero joint vector, got {q:?}");
        }
    }

    #[test]
    fn target_on_xz_plane_gives_zero_base_angle() {
        let g = RobotGeometry::irb4600_equivalent();
        let pose = forward_kinematics(&[0.0, 0.3, 0.4, 0.0, 0.5, 0.0], &g);
        assert!(pose.d[1].abs() < 1e-12 && pose.d[0] > 0.0);
        let q = inverse_kinematics(&pose, &g).unwrap();
        assert_abs_diff_eq!(q[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn round_trip_restores_pose() {
        let limits = JointLimits::irb4600();
        let mut rng = crate::rng::stream(11, crate::rng::TAG_BENCH, 1, 0);
        for g in [RobotGeometry::irb4600(), RobotGeometry::irb4600_equivalent()] {
            let mut worst: f64 = 0.0;
            for _ in 0..300 {
                let q = sample_within_limits(&mut rng, &limits);
                let pose = forward_kinematics(&q, &g);
                let q2 = inverse_kinematics(&pose, &g).unwrap();
                let pose2 = forward_kinematics(&q2, &g);
                worst = worst.max(pose_distance(&pose, &pose2));
            }
            assert!(worst <= 1e-9, "round-trip pose error {worst}");
        }
    }

    #[test]
    fn unreachable_target_errors() {
        let g = RobotGeometry::irb4600_equivalent();
        let pose = Pose::at([5.0, 0.0, 1.0], Orientation::lens_down());
        match inverse_kinematics(&pose, &g) {
            Err(Error::Unreachable { .. }) => {}
            other => panic!("expected Unreachable, got {other:?}"),
        }
    }

    #[test]
    fn wrist_center_on_base_axis_without_offset_is_singular() {
        let mut g = RobotGeometry::irb4600_equivalent();
        g.a1 = 0.0;
        // lens-down approach: wrist center = d - lt*a = (0, 0, 1 + lt)
        let pose = Pose::at([0.0, 0.0, 1.0], Orientation::lens_down());
        match inverse_kinematics(&pose, &g) {
            Err(Error::SingularWristAxis) => {}
            other => panic!("expected SingularWristAxis, got {other:?}"),
        }
    }

    #[test]
    fn joint_limit_checks_are_closed_intervals() {
        let limits = JointLimits::irb4600();
        assert!(within_joint_limits(&[0.0; 6], &limits));
        let mut q = [0.0; 6];
        q[1] = 151f64.to_radians();
        assert!(!within_joint_limits(&q, &limits));
        q[1] = 150f64.to_radians();
        assert!(within_joint_limits(&q, &limits));
        q[1] = -90f64.to_radians();
        assert!(within_joint_limits(&q, &limits));
    }

    #[test]
    fn geometry_and_limit_validation() {
        assert!(RobotGeometry::new(0.5, 0.9, 0.97, 0.0, 0.17, 0.13, 0.0).is_ok());
        assert!(RobotGeometry::new(-0.5, 0.9, 0.97, 0.0, 0.17, 0.13, 0.0).is_err());
        assert!(RobotGeometry::new(0.5, 0.9, 0.97, -0.1, 0.17, 0.13, 0.0).is_err());
        assert!(RobotGeometry::new(0.5, 0.9, 0.97, 0.0, 0.17, 0.13, f64::NAN).is_err());
        assert!(JointLimits::new([(0.0, 1.0); 6]).is_ok());
        assert!(JointLimits::new([(1.0, 1.0); 6]).is_err());
    }

    #[test]
    fn pose_constructor_validates_orthonormality() {
        let o = Orientation::lens_down();
        assert!(Pose::new([0.0; 3], o.n, o.s, o.a).is_ok());
        assert!(Pose::new([0.0; 3], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_q() -> impl Strategy<Value = JointVector> {
            let limits = JointLimits::irb4600().ranges_deg;
            (
                limits[0].0..limits[0].1,
                limits[1].0..limits[1].1,
                limits[2].0..limits[2].1,
                limits[3].0..limits[3].1,
                limits[4].0..limits[4].1,
                limits[5].0..limits[5].1,
            )
                .prop_map(|(a, b, c, d, e, f)| {
                    [
                        a.to_radians(),
                        b.to_radians(),
                        c.to_radians(),
                        d.to_radians(),
                        e.to_radians(),
                        f.to_radians(),
                    ]
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn poses_are_orthonormal(q in arb_q()) {
                let pose = forward_kinematics(&q, &RobotGeometry::irb4600());
                prop_assert!(pose.orthonormality_error() <= 1e-9);
            }

            #[test]
            fn base_rotation_equivariance(q in arb_q(), delta in -3.0f64..3.0) {
                let g = RobotGeometry::irb4600();
                let pose = forward_kinematics(&q, &g);
                let mut q2 = q;
                q2[0] += delta;
                let rotated = forward_kinematics(&q2, &g);
                let (s, c) = delta.sin_cos();
                let want = [
                    c * pose.d[0] - s * pose.d[1],
                    s * pose.d[0] + c * pose.d[1],
                    pose.d[2],
                ];
                for k in 0..3 {
                    prop_assert!((rotated.d[k] - want[k]).abs() <= 1e-12);
                }
                let h0 = pose.d[0].hypot(pose.d[1]);
                let h1 = rotated.d[0].hypot(rotated.d[1]);
                prop_assert!((h0 - h1).abs() <= 1e-12);
            }

            #[test]
            fn round_trip_within_tolerance(q in arb_q()) {
                let g = RobotGeometry::irb4600_equivalent();
                let pose = forward_kinematics(&q, &g);
                if let Ok(q2) = inverse_kinematics(&pose, &g) {
                    let pose2 = forward_kinematics(&q2, &g);
                    prop_assert!(pose_distance(&pose, &pose2) <= 1e-9);
                }
            }
        }
    }
}
