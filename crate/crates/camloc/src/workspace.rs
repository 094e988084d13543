//! Construction of the camera operational space.
//!
//! The feasible camera-center region is the intersection of
//!
//! * the reach sphere of the visual-system arm: `(x − a1)² + y² + (z − L1)²
//!   ≤ r_V²`, and
//! * the stereo-detectability cone opening upward from the marker at
//!   `(L_M, 0, 0)` shifted by the stereo-baseline offset `d`:
//!   `(x − L_M)²/tan²(α/2) + y²/tan²(β/2) ≤ (z − d)²` with `z ≥ d`,
//!
//! meshed on a cubic lattice of spacing `h` anchored at
//! `(x_min_global, 0, z_min)`. A second pass removes nodes whose
//! lens-down inverse kinematics fails or violates joint limits.
//!
//! All geometric anchor quantities (workspace radii, ground angles, cone
//! offset, maximum detection depth, marker placement bounds, the height
//! quadratic) are exposed as standalone operations.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::kinematics::{
    inverse_kinematics, within_joint_limits, JointLimits, Orientation, Pose, RobotGeometry,
};
use crate::vec3::Point3;

/// Grid points within this distance of a constraint boundary count as
/// inside, so the mesh and any brute-force oracle agree on ties.
pub const BOUNDARY_SNAP: f64 = 1e-9;

/// Stereo-camera specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraSpec {
    /// Focal length (mm).
    pub focal_length_mm: f64,
    /// Stereo baseline (mm).
    pub baseline_mm: f64,
    /// Horizontal view angle α (degrees).
    pub view_angle_width_deg: f64,
    /// Vertical view angle β (degrees).
    pub view_angle_height_deg: f64,
    /// Sensor width (mm).
    pub sensor_width_mm: f64,
    /// Sensor height (mm).
    pub sensor_height_mm: f64,
    /// Horizontal pixel count.
    pub resolution_w: u32,
    /// Vertical pixel count.
    pub resolution_h: u32,
    /// Marker diameter D_H (mm).
    pub marker_diameter_mm: f64,
    /// Minimum projected marker diameter N_H (pixels).
    pub min_pixel_diameter: f64,
}

impl CameraSpec {
    /// Validating constructor.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        focal_length_mm: f64,
        baseline_mm: f64,
        view_angle_width_deg: f64,
        view_angle_height_deg: f64,
        sensor_width_mm: f64,
        sensor_height_mm: f64,
        resolution_w: u32,
        resolution_h: u32,
        marker_diameter_mm: f64,
        min_pixel_diameter: f64,
    ) -> Result<Self> {
        let spec = CameraSpec {
            focal_length_mm,
            baseline_mm,
            view_angle_width_deg,
            view_angle_height_deg,
            sensor_width_mm,
            sensor_height_mm,
            resolution_w,
            resolution_h,
            marker_diameter_mm,
            min_pixel_diameter,
        };
        for (name, v) in [
            ("focal_length_mm", spec.focal_length_mm),
            ("baseline_mm", spec.baseline_mm),
            ("sensor_width_mm", spec.sensor_width_mm),
            ("sensor_height_mm", spec.sensor_height_mm),
            ("marker_diameter_mm", spec.marker_diameter_mm),
            ("min_pixel_diameter", spec.min_pixel_diameter),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::ValidationError(format!(
                    "CameraSpec.{name} must be > 0, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("view_angle_width_deg", spec.view_angle_width_deg),
            ("view_angle_height_deg", spec.view_angle_height_deg),
        ] {
            if !(v.is_finite() && v > 0.0 && v < 180.0) {
                return Err(Error::ValidationError(format!(
                    "CameraSpec.{name} must lie in (0, 180) degrees, got {v}"
                )));
            }
        }
        if spec.resolution_w == 0 || spec.resolution_h == 0 {
            return Err(Error::ValidationError(
                "CameraSpec resolution must be at least 1x1 pixels".into(),
            ));
        }
        Ok(spec)
    }

    /// ZED 2 stereo camera in the 1920-wide mode.
    pub fn zed2() -> Self {
        CameraSpec {
            focal_length_mm: 2.8,
            baseline_mm: 120.0,
            view_angle_width_deg: 86.09,
            view_angle_height_deg: 55.35,
            sensor_width_mm: 5.23,
            sensor_height_mm: 2.94,
            resolution_w: 1920,
            resolution_h: 1082,
            marker_diameter_mm: 12.0,
            min_pixel_diameter: 5.0,
        }
    }
}

/// Dexterous and reachable workspace radii of the two arms.
///
/// Returns `(r_V, r_T, r_Vr, r_Tr)`: the dexterous radii of the visual and
/// tool arms followed by their reachable radii. Each arm contributes
/// `L2 + hypot(L3, L4)` of link reach; the wrist-to-mount length and the
/// mounted object's extension subtract from the dexterous radius and add
/// to the reachable radius.
pub fn workspace_radii(
    geom_visual: &RobotGeometry,
    geom_tool: &RobotGeometry,
) -> Result<(f64, f64, f64, f64)> {
    let radius_pair = |g: &RobotGeometry| -> Result<(f64, f64)> {
        let l34 = g.forearm_radial();
        let arm_reach = g.l2 + l34 - g.lt;
        let dexterous = arm_reach - g.end_effector_extension;
        if dexterous <= 0.0 {
            return Err(Error::NonPositiveRadius {
                extension: g.end_effector_extension,
                reach: arm_reach,
            });
        }
        Ok((dexterous, g.l2 + l34 + g.lt + g.end_effector_extension))
    };
    let (r_v, r_vr) = radius_pair(geom_visual)?;
    let (r_t, r_tr) = radius_pair(geom_tool)?;
    Ok((r_v, r_t, r_vr, r_tr))
}

/// Ground-intersection angles `θ1 = asin(L1/r_V)`, `θ2 = asin(L1/r_T)` in
/// degrees: the polar angles at which the two workspace spheres meet the
/// floor plane.
pub fn ground_angles(r_v: f64, r_t: f64, l1: f64) -> Result<(f64, f64)> {
    if l1 >= r_v || l1 >= r_t {
        return Err(Error::DomainError {
            op: "ground_angles",
            detail: format!("base height L1 = {l1} m must be below both radii ({r_v}, {r_t})"),
        });
    }
    Ok(((l1 / r_v).asin().to_degrees(), (l1 / r_t).asin().to_degrees()))
}

/// Apex offset of the stereo-detectability cone below the marker plane:
/// `d = (b/2)/tan(α/2)`, with the baseline `b` in meters.
pub fn cone_offset(baseline_m: f64, alpha_deg: f64) -> Result<f64> {
    if !(alpha_deg > 0.0 && alpha_deg < 180.0) {
        return Err(Error::DomainError {
            op: "cone_offset",
            detail: format!("view angle must lie in (0, 180) degrees, got {alpha_deg}"),
        });
    }
    Ok((baseline_m / 2.0) / (alpha_deg / 2.0).to_radians().tan())
}

/// Maximum depth (meters) at which the marker still projects to at least
/// `min_pixel_diameter` pixels: `Z_max = f·D_H/d_H` with
/// `d_H = N_H/(resolutionW/sensorWidth)`.
pub fn max_detect_depth(spec: &CameraSpec) -> f64 {
    let pixels_per_mm = f64::from(spec.resolution_w) / spec.sensor_width_mm;
    let d_h_mm = spec.min_pixel_diameter / pixels_per_mm;
    spec.focal_length_mm * spec.marker_diameter_mm / d_h_mm / 1000.0
}

/// Placement bounds for the marker distance `L_M` along the x axis.
///
/// The lower bound keeps the marker clear of the tool arm's reach sphere;
/// the upper bound keeps the detectability cone intersecting the visual
/// arm's reach sphere (tangency construction). `d` is the cone offset in
/// meters.
#[allow(clippy::too_many_arguments)]
pub fn marker_bounds(
    a1: f64,
    l1: f64,
    l_vt: f64,
    r_v: f64,
    r_t: f64,
    alpha_deg: f64,
    d: f64,
) -> Result<(f64, f64)> {
    let (_, theta2_deg) = ground_angles(r_v, r_t, l1)?;
    let lo = a1 + l_vt - r_t * theta2_deg.to_radians().cos();
    let half = (alpha_deg / 2.0).to_radians();
    let hi = r_v / half.cos() + (l1 - d) * half.tan() + a1;
    if lo >= hi {
        return Err(Error::EmptyInterval {
            op: "marker_bounds",
            detail: format!("lower bound {lo} m is not below upper bound {hi} m"),
        });
    }
    Ok((lo, hi))
}

/// Fully resolved placement geometry of the visual system, tool system,
/// and marker.
///
/// Fields are public so that exploratory code can probe off-nominal
/// layouts directly; [`SystemLayout::new`] is the validating path that
/// also fills every derived quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemLayout {
    /// Marker distance from the visual-system ground origin (m).
    pub l_m: f64,
    /// Distance between the visual-system and tool-system origins (m).
    pub l_vt: f64,
    /// Dexterous radius anchor of the visual arm (m).
    pub r_v: f64,
    /// Dexterous radius anchor of the tool arm (m).
    pub r_t: f64,
    /// Camera protrusion beyond the visual arm's mount (m).
    pub camera_extension: f64,
    /// Tool protrusion beyond the tool arm's mount (m).
    pub tool_extension: f64,
    /// Base column height of the visual arm (m).
    pub l1: f64,
    /// Shoulder offset of the visual arm (m).
    pub a1: f64,
    /// `tan(α/2)` of the horizontal view angle.
    pub ta: f64,
    /// `tan(β/2)` of the vertical view angle.
    pub tb: f64,
    /// Cone apex offset `d` (m).
    pub d: f64,
    /// Reachable radius of the visual arm including the camera (m).
    pub r_vr: f64,
    /// Reachable radius of the tool arm including the tool (m).
    pub r_tr: f64,
    /// Ground angle of the visual sphere (degrees).
    pub theta1_deg: f64,
    /// Ground angle of the tool sphere (degrees).
    pub theta2_deg: f64,
    /// Maximum marker-detection depth (m).
    pub z_max_detect: f64,
}

impl SystemLayout {
    /// Build and validate the layout: computes reachable radii, ground
    /// angles, cone offset, and detection depth, then checks the sphere
    /// separation (`L_VT ≥ r_Vr + r_Tr`) and the marker placement bounds
    /// (`lower ≤ L_M < upper`).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        geom: &RobotGeometry,
        camera: &CameraSpec,
        l_m: f64,
        l_vt: f64,
        r_v: f64,
        r_t: f64,
        camera_extension: f64,
        tool_extension: f64,
    ) -> Result<Self> {
        for (name, v) in [("l_m", l_m), ("l_vt", l_vt)] {
            if !v.is_finite() {
                return Err(Error::ValidationError(format!(
                    "SystemLayout.{name} must be finite, got {v}"
                )));
            }
        }
        for (name, v) in [("r_v", r_v), ("r_t", r_t)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::ValidationError(format!(
                    "SystemLayout.{name} must be > 0, got {v}"
                )));
            }
        }
        for (name, v) in [("camera_extension", camera_extension), ("tool_extension", tool_extension)]
        {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::ValidationError(format!(
                    "SystemLayout.{name} must be >= 0, got {v}"
                )));
            }
        }
        let geom_cam = RobotGeometry { end_effector_extension: camera_extension, ..*geom };
        let geom_tool = RobotGeometry { end_effector_extension: tool_extension, ..*geom };
        let (_, _, r_vr, r_tr) = workspace_radii(&geom_cam, &geom_tool)?;
        let (theta1_deg, theta2_deg) = ground_angles(r_v, r_t, geom.l1)?;
        let d = cone_offset(camera.baseline_mm / 1000.0, camera.view_angle_width_deg)?;
        let z_max_detect = max_detect_depth(camera);
        if l_vt + BOUNDARY_SNAP < r_vr + r_tr {
            return Err(Error::ValidationError(format!(
                "SystemLayout: L_VT = {l_vt} m violates the sphere-separation invariant \
                 L_VT >= r_Vr + r_Tr = {} m",
                r_vr + r_tr
            )));
        }
        let (lo, hi) = marker_bounds(
            geom.a1,
            geom.l1,
            l_vt,
            r_v,
            r_t,
            camera.view_angle_width_deg,
            d,
        )?;
        if l_m + BOUNDARY_SNAP < lo || l_m >= hi {
            return Err(Error::ValidationError(format!(
                "SystemLayout: L_M = {l_m} m outside the marker placement bounds [{lo}, {hi})"
            )));
        }
        Ok(SystemLayout {
            l_m,
            l_vt,
            r_v,
            r_t,
            camera_extension,
            tool_extension,
            l1: geom.l1,
            a1: geom.a1,
            ta: (camera.view_angle_width_deg / 2.0).to_radians().tan(),
            tb: (camera.view_angle_height_deg / 2.0).to_radians().tan(),
            d,
            r_vr,
            r_tr,
            theta1_deg,
            theta2_deg,
            z_max_detect,
        })
    }

    /// Coefficients `(A, B, C)` of the height quadratic
    /// `A·Z² + B·Z + C = 0` whose roots bound the feasible heights on the
    /// y = 0 midplane.
    pub fn z_quadratic(&self) -> (f64, f64, f64) {
        let m = self.l_m - self.a1;
        let u = m + self.ta * self.d;
        let a = 1.0 + self.ta * self.ta;
        let b = -2.0 * (self.ta * u + self.l1);
        let c = u * u + self.l1 * self.l1 - self.r_v * self.r_v;
        (a, b, c)
    }

    /// Feasible height interval `(Z_min, Z_max_ws)`: the ordered real
    /// roots of [`SystemLayout::z_quadratic`].
    pub fn z_range(&self) -> Result<(f64, f64)> {
        let (a, b, c) = self.z_quadratic();
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::NoIntersection { disc });
        }
        let sq = disc.sqrt();
        Ok(((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)))
    }

    /// Membership test with an explicit boundary snap tolerance.
    pub fn contains_with_snap(&self, p: Point3, snap: f64) -> bool {
        let [x, y, z] = p;
        let dx = x - self.a1;
        let dz = z - self.l1;
        let sphere = dx * dx + y * y + dz * dz <= self.r_v * self.r_v + snap;
        let zd = z - self.d;
        let xm = x - self.l_m;
        let cone =
            xm * xm / (self.ta * self.ta) + y * y / (self.tb * self.tb) <= zd * zd + snap
                && zd >= 0.0;
        sphere && cone
    }

    /// True iff `p` satisfies both the reach-sphere and detectability-cone
    /// inequalities (with the standard [`BOUNDARY_SNAP`]).
    pub fn contains(&self, p: Point3) -> bool {
        self.contains_with_snap(p, BOUNDARY_SNAP)
    }

    /// Width of the feasible y interval at height `z`: returns the
    /// symmetric pair `(−Y_max, Y_max)`.
    ///
    /// The extreme |y| occurs where the sphere's and cone's horizontal
    /// cross-sections (a circle and an ellipse) intersect; eliminating x
    /// between the two quadrics leaves a quadratic in `w = y²`.
    pub fn y_range(&self, z: f64) -> Result<(f64, f64)> {
        let (zlo, zhi) = self.z_range()?;
        if z < zlo - BOUNDARY_SNAP || z > zhi + BOUNDARY_SNAP {
            return Err(Error::EmptyInterval {
                op: "y_range",
                detail: format!("Z = {z} m outside the feasible height range [{zlo}, {zhi}]"),
            });
        }
        let z = z.clamp(zlo, zhi);
        let rs2 = self.r_v * self.r_v - (z - self.l1) * (z - self.l1);
        let e = self.ta * (z - self.d);
        let k2 = (self.ta / self.tb) * (self.ta / self.tb);
        // circle: (x − a1)² + w = rs2 ; ellipse: (x − l_m)² + k2·w = e²
        // (w = y²); subtracting gives the line x = p − q·w.
        let dm = self.l_m - self.a1;
        let p = (rs2 - e * e + self.l_m * self.l_m - self.a1 * self.a1) / (2.0 * dm);
        let q = (1.0 - k2) / (2.0 * dm);
        // substitute back into the circle: quadratic in w.
        let a = q * q;
        let b = -2.0 * q * (p - self.a1) + 1.0;
        let c = (p - self.a1) * (p - self.a1) - rs2;
        let roots: Vec<f64> = if a.abs() < 1e-15 {
            if b.abs() > 1e-300 {
                vec![-c / b]
            } else {
                vec![]
            }
        } else {
            let mut disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                if disc > -1e-9 {
                    disc = 0.0;
                } else {
                    return Err(Error::EmptyInterval {
                        op: "y_range",
                        detail: format!(
                            "sphere and cone cross-sections do not intersect at Z = {z} m"
                        ),
                    });
                }
            }
            let sq = disc.sqrt();
            vec![(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]
        };
        let mut best: f64 = 0.0;
        for w in roots {
            if w < 0.0 {
                continue;
            }
            let x = p - q * w;
            // the crossing must lie on the inner portions of both curves
            if x - self.a1 <= rs2.sqrt() + BOUNDARY_SNAP && self.l_m - x <= e + BOUNDARY_SNAP {
                best = best.max(w.sqrt());
            }
        }
        Ok((-best, best))
    }

    /// Feasible x interval `(X_min, X_max)` at the slice `(z, y)`: the
    /// right boundary comes from the reach sphere, the left boundary from
    /// the detectability cone.
    pub fn x_range(&self, z: f64, y: f64) -> Result<(f64, f64)> {
        let mut rs2 = self.r_v * self.r_v - (z - self.l1) * (z - self.l1) - y * y;
        if rs2 < 0.0 {
            if rs2 > -1e-9 {
                rs2 = 0.0;
            } else {
                return Err(Error::EmptyInterval {
                    op: "x_range",
                    detail: format!("reach sphere empty at Z = {z} m, Y = {y} m"),
                });
            }
        }
        let k = self.ta / self.tb;
        let mut e2 = (z - self.d) * (z - self.d) * self.ta * self.ta - y * y * k * k;
        if e2 < 0.0 {
            if e2 > -1e-9 {
                e2 = 0.0;
            } else {
                return Err(Error::EmptyInterval {
                    op: "x_range",
                    detail: format!("detectability cone empty at Z = {z} m, Y = {y} m"),
                });
            }
        }
        let x_max = self.a1 + rs2.sqrt();
        let x_min = self.l_m - e2.sqrt();
        if x_min > x_max + BOUNDARY_SNAP {
            return Err(Error::EmptyInterval {
                op: "x_range",
                detail: format!("X_min = {x_min} m exceeds X_max = {x_max} m"),
            });
        }
        Ok((x_min, x_max))
    }

    /// Global minimum x over the whole region: attained by the cone
    /// boundary at the top of the height range. The mesh lattice anchors
    /// its x axis here.
    pub fn x_min_global(&self) -> Result<f64> {
        let (_, zhi) = self.z_range()?;
        Ok(self.l_m - self.ta * (zhi - self.d))
    }
}

/// One candidate camera position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// 1-based index, contiguous within an [`OperationalSpace`].
    pub index: usize,
    /// Position in the visual-system inertial frame (m).
    pub position: Point3,
}

/// The meshed camera operational space.
#[derive(Debug, Clone)]
pub struct OperationalSpace {
    /// Nodes in sweep order, indices contiguous from 1.
    pub nodes: Vec<Node>,
    /// Lattice spacing (m).
    pub grid_h: f64,
    /// The layout the mesh was generated from.
    pub layout: SystemLayout,
    /// Integer lattice coordinates `[kx, ky, kz]` parallel to `nodes`
    /// (exact grid bookkeeping for adjacency queries).
    pub lattice: Vec<[i64; 3]>,
}

impl OperationalSpace {
    /// Per-node flag: true where at least one of the six axis-adjacent
    /// lattice neighbors is absent, i.e. the node sits on the mesh
    /// boundary.
    pub fn boundary_flags(&self) -> Vec<bool> {
        let occupied: HashSet<[i64; 3]> = self.lattice.iter().copied().collect();
        self.lattice
            .iter()
            .map(|&[kx, ky, kz]| {
                [
                    [kx - 1, ky, kz],
                    [kx + 1, ky, kz],
                    [kx, ky - 1, kz],
                    [kx, ky + 1, kz],
                    [kx, ky, kz - 1],
                    [kx, ky, kz + 1],
                ]
                .iter()
                .any(|nb| !occupied.contains(nb))
            })
            .collect()
    }
}

/// Mesh the feasible region on a cubic lattice of spacing `h`.
///
/// The sweep runs heights from `Z_min` upward, y rows symmetric about 0
/// within [`SystemLayout::y_range`], and x from the global minimum
/// rightward within [`SystemLayout::x_range`]; every emitted node passes
/// [`SystemLayout::contains`]. Node indices are assigned in sweep order
/// starting at 1.
pub fn mesh_ideal_space(layout: &SystemLayout, h: f64) -> Result<OperationalSpace> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::ValidationError(format!("grid spacing h must be > 0, got {h}")));
    }
    let (zlo, zhi) = layout.z_range()?;
    let x0 = layout.x_min_global()?;
    let mut nodes = Vec::new();
    let mut lattice = Vec::new();
    let mut kz: i64 = 0;
    loop {
        let z = zlo + kz as f64 * h;
        if z > zhi + BOUNDARY_SNAP {
            break;
        }
        let zc = z.min(zhi);
        let (_, ymax) = layout.y_range(zc)?;
        let ky_max = ((ymax + BOUNDARY_SNAP) / h).floor() as i64;
        for ky in -ky_max..=ky_max {
            let y = ky as f64 * h;
            let Ok((xmin, xmax)) = layout.x_range(zc, y.abs().min(ymax)) else {
                continue;
            };
            let k0 = ((xmin - x0 - BOUNDARY_SNAP) / h).ceil() as i64;
            let mut kx = k0;
            loop {
                let x = x0 + kx as f64 * h;
                if x > xmax + BOUNDARY_SNAP {
                    break;
                }
                if layout.contains([x, y, z]) {
                    nodes.push(Node { index: nodes.len() + 1, position: [x, y, z] });
                    lattice.push([kx, ky, kz]);
                }
                kx += 1;
            }
        }
        kz += 1;
    }
    if nodes.is_empty() {
        return Err(Error::EmptySpace("no grid point satisfies the sphere and cone constraints"));
    }
    Ok(OperationalSpace { nodes, grid_h: h, layout: *layout, lattice })
}

/// Remove nodes whose lens-down inverse kinematics fails or leaves the
/// joint limits; survivors are re-indexed contiguously from 1.
pub fn reduce_by_joint_limits(
    space: &OperationalSpace,
    geom: &RobotGeometry,
    limits: &JointLimits,
    camera_orientation: Orientation,
) -> Result<OperationalSpace> {
    let mut nodes = Vec::new();
    let mut lattice = Vec::new();
    for (node, lat) in space.nodes.iter().zip(space.lattice.iter()) {
        let pose = Pose::at(node.position, camera_orientation);
        match inverse_kinematics(&pose, geom) {
            Ok(q) if within_joint_limits(&q, limits) => {
                nodes.push(Node { index: nodes.len() + 1, position: node.position });
                lattice.push(*lat);
            }
            _ => {}
        }
    }
    if nodes.is_empty() {
        return Err(Error::EmptySpace("joint-limit reduction removed every node"));
    }
    Ok(OperationalSpace { nodes, grid_h: space.grid_h, layout: space.layout, lattice })
}

/// Convenience: the reference camera geometry paired with its default
/// layout anchors (marker at 2.83 m, inter-system distance 4.182 m,
/// radii anchors 1.716/1.606 m, camera extension 0.033 m, tool extension
/// 0.127 m).
pub fn reference_layout() -> SystemLayout {
    SystemLayout::new(
        &RobotGeometry::irb4600_equivalent(),
        &CameraSpec::zed2(),
        2.83,
        4.182,
        1.716,
        1.606,
        0.033,
        0.127,
    )
    .expect("reference layout constants are self-consistent")
}
