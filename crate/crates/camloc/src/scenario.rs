//! Scenario files: one structured-text document configuring every
//! component of a simulation run.
//!
//! Scenarios are TOML with nested sections mirroring the domain types
//! (`[robot]`, `[camera]`, `[motor]`, …). All physical quantities carry
//! explicit unit suffixes in their key names (`l1_m`, `kb_mv_per_rpm`) to
//! prevent unit bugs. Unknown keys are rejected; missing keys fall back
//! to the built-in defaults, which describe the reference system. Two
//! scenarios ship with the crate: [`Scenario::builtin_reference`] (the
//! two-well search setup) and [`Scenario::builtin_sensitivity`] (the
//! parameter-sweep setup).

use std::path::Path;

use serde::Deserialize;

use crate::actuation::{kb_from_mv_per_rpm, ControlParams, MotorGearParams};
use crate::error::{Error, Result};
use crate::imaging::{NoiseField, NoiseTarget, NoiseWell};
use crate::kinematics::{JointLimits, Orientation, RobotGeometry};
use crate::search::{EnergyModel, ImagingEnvironment, SearchConfig};
use crate::workspace::{
    mesh_ideal_space, reduce_by_joint_limits, CameraSpec, OperationalSpace, SystemLayout,
};

/// Robot link dimensions (m).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobotSection {
    pub l1_m: f64,
    pub l2_m: f64,
    pub l3_m: f64,
    pub l4_m: f64,
    pub a1_m: f64,
    pub lt_m: f64,
}

impl Default for RobotSection {
    fn default() -> Self {
        RobotSection {
            l1_m: 0.495,
            l2_m: 0.9,
            // effective straight forearm combining the elbow offset pair
            // (0.175, 0.96)
            l3_m: 0.975820167858812,
            l4_m: 0.0,
            a1_m: 0.175,
            lt_m: 0.135,
        }
    }
}

/// Joint ranges, degrees, one `[min, max]` pair per axis.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsSection {
    pub axis_1_deg: [f64; 2],
    pub axis_2_deg: [f64; 2],
    pub axis_3_deg: [f64; 2],
    pub axis_4_deg: [f64; 2],
    pub axis_5_deg: [f64; 2],
    pub axis_6_deg: [f64; 2],
}

impl Default for LimitsSection {
    fn default() -> Self {
        LimitsSection {
            axis_1_deg: [-180.0, 180.0],
            axis_2_deg: [-90.0, 150.0],
            axis_3_deg: [-180.0, 75.0],
            axis_4_deg: [-400.0, 400.0],
            axis_5_deg: [-125.0, 120.0],
            axis_6_deg: [-400.0, 400.0],
        }
    }
}

/// Stereo depth camera parameters.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraSection {
    pub focal_length_mm: f64,
    pub baseline_mm: f64,
    pub view_angle_width_deg: f64,
    pub view_angle_height_deg: f64,
    pub sensor_width_mm: f64,
    pub sensor_height_mm: f64,
    pub resolution_w: u32,
    pub resolution_h: u32,
    pub marker_diameter_mm: f64,
    pub min_pixel_diameter: f64,
}

impl Default for CameraSection {
    fn default() -> Self {
        CameraSection {
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

/// Joint drive constants.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotorSection {
    pub r_ohm: f64,
    pub l_h: f64,
    pub kb_mv_per_rpm: f64,
    pub km_nm_per_a: f64,
    pub ja_kgm2: f64,
    pub jg_kgm2: f64,
    pub gear_ratio: f64,
    pub bm_nms_per_rad: f64,
}

impl Default for MotorSection {
    fn default() -> Self {
        MotorSection {
            r_ohm: 0.03,
            l_h: 0.1e-3,
            kb_mv_per_rpm: 7.0,
            km_nm_per_a: 0.0674,
            ja_kgm2: 0.09847,
            jg_kgm2: 0.05,
            gear_ratio: 200.0,
            bm_nms_per_rad: 0.06,
        }
    }
}

/// Controller shaping constants (s).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlSection {
    pub tau_in_s: f64,
    pub tau_delay_s: f64,
}

impl Default for ControlSection {
    fn default() -> Self {
        ControlSection { tau_in_s: 0.009, tau_delay_s: 0.0 }
    }
}

/// System layout distances (m).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayoutSection {
    pub l_m_m: f64,
    pub l_vt_m: f64,
    pub r_v_m: f64,
    pub r_t_m: f64,
    pub camera_extension_m: f64,
    pub tool_extension_m: f64,
}

impl Default for LayoutSection {
    fn default() -> Self {
        LayoutSection {
            l_m_m: 2.83,
            l_vt_m: 4.182,
            r_v_m: 1.716,
            r_t_m: 1.606,
            camera_extension_m: 0.033,
            tool_extension_m: 0.127,
        }
    }
}

/// Mesh resolution (m).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub grid_h_m: f64,
}

impl Default for MeshSection {
    fn default() -> Self {
        MeshSection { grid_h_m: 0.05 }
    }
}

/// One noise well entry.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellEntry {
    pub center_m: [f64; 3],
    pub depth: f64,
    pub width_m: f64,
}

/// Spatial noise field definition.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseFieldSection {
    pub sigma_base: f64,
    pub sigma_floor: f64,
    pub wells: Vec<WellEntry>,
}

impl Default for NoiseFieldSection {
    fn default() -> Self {
        NoiseFieldSection {
            sigma_base: 0.056,
            sigma_floor: 0.001,
            wells: vec![
                WellEntry {
                    center_m: [1.647703257897, 0.0, 1.364921187054],
                    depth: 0.030,
                    width_m: 0.06,
                },
                WellEntry {
                    center_m: [1.247703257897, 0.0, 1.764921187054],
                    depth: 0.024,
                    width_m: 0.20,
                },
            ],
        }
    }
}

/// Averaging target.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseTargetSection {
    pub sigma_reduced: f64,
}

impl Default for NoiseTargetSection {
    fn default() -> Self {
        NoiseTargetSection { sigma_reduced: 0.01 }
    }
}

/// Search tuning.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSection {
    pub k_est: f64,
    pub k_sd: f64,
    pub e_bound0_ws: f64,
    pub e_threshold_ws: f64,
    pub seed: u64,
    pub max_iterations: u64,
}

impl Default for SearchSection {
    fn default() -> Self {
        SearchSection {
            k_est: 5.0,
            k_sd: 50.0,
            e_bound0_ws: 12.0,
            e_threshold_ws: 2.0,
            seed: 1,
            max_iterations: 10_000,
        }
    }
}

/// A fully described simulation setup.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub robot: RobotSection,
    pub limits: LimitsSection,
    pub camera: CameraSection,
    pub motor: MotorSection,
    pub control: ControlSection,
    pub layout: LayoutSection,
    pub mesh: MeshSection,
    pub noise_field: NoiseFieldSection,
    pub noise_target: NoiseTargetSection,
    pub search: SearchSection,
}

impl Scenario {
    /// The bundled two-well reference scenario (13-node mesh).
    pub fn builtin_reference() -> Self {
        toml::from_str(include_str!("../scenarios/reference.scenario"))
            .expect("bundled reference scenario parses")
    }

    /// The bundled parameter-sweep scenario (22-node mesh, iteration cap).
    pub fn builtin_sensitivity() -> Self {
        toml::from_str(include_str!("../scenarios/sensitivity.scenario"))
            .expect("bundled sensitivity scenario parses")
    }

    /// Robot geometry (no end-effector extension; extensions are layout
    /// properties).
    pub fn robot_geometry(&self) -> Result<RobotGeometry> {
        let r = &self.robot;
        RobotGeometry::new(r.l1_m, r.l2_m, r.l3_m, r.l4_m, r.a1_m, r.lt_m, 0.0)
    }

    /// Joint limits.
    pub fn joint_limits(&self) -> Result<JointLimits> {
        let l = &self.limits;
        let pair = |a: [f64; 2]| (a[0], a[1]);
        JointLimits::new([
            pair(l.axis_1_deg),
            pair(l.axis_2_deg),
            pair(l.axis_3_deg),
            pair(l.axis_4_deg),
            pair(l.axis_5_deg),
            pair(l.axis_6_deg),
        ])
    }

    /// Camera specification.
    pub fn camera_spec(&self) -> Result<CameraSpec> {
        let c = &self.camera;
        CameraSpec::new(
            c.focal_length_mm,
            c.baseline_mm,
            c.view_angle_width_deg,
            c.view_angle_height_deg,
            c.sensor_width_mm,
            c.sensor_height_mm,
            c.resolution_w,
            c.resolution_h,
            c.marker_diameter_mm,
            c.min_pixel_diameter,
        )
    }

    /// Drive constants (back-EMF converted from mV/rpm to V·s/rad here,
    /// once, at load time).
    pub fn motor_params(&self) -> Result<MotorGearParams> {
        let m = &self.motor;
        MotorGearParams::new(
            m.r_ohm,
            m.l_h,
            kb_from_mv_per_rpm(m.kb_mv_per_rpm),
            m.km_nm_per_a,
            m.ja_kgm2,
            m.jg_kgm2,
            m.gear_ratio,
            m.bm_nms_per_rad,
        )
    }

    /// Controller constants.
    pub fn control_params(&self) -> Result<ControlParams> {
        ControlParams::new(self.control.tau_in_s, self.control.tau_delay_s)
    }

    /// Validated system layout.
    pub fn system_layout(&self) -> Result<SystemLayout> {
        let geom = self.robot_geometry()?;
        let camera = self.camera_spec()?;
        let l = &self.layout;
        SystemLayout::new(
            &geom,
            &camera,
            l.l_m_m,
            l.l_vt_m,
            l.r_v_m,
            l.r_t_m,
            l.camera_extension_m,
            l.tool_extension_m,
        )
    }

    /// Noise field.
    pub fn noise_field(&self) -> Result<NoiseField> {
        let f = &self.noise_field;
        let wells = f
            .wells
            .iter()
            .map(|w| NoiseWell { center_m: w.center_m, depth: w.depth, width_m: w.width_m })
            .collect();
        NoiseField::new(f.sigma_base, f.sigma_floor, wells)
    }

    /// Averaging target.
    pub fn noise_target(&self) -> Result<NoiseTarget> {
        NoiseTarget::new(self.noise_target.sigma_reduced)
    }

    /// Search configuration.
    pub fn search_config(&self) -> Result<SearchConfig> {
        let s = &self.search;
        SearchConfig::new(
            s.k_est,
            s.k_sd,
            s.e_bound0_ws,
            s.e_threshold_ws,
            s.seed,
            s.max_iterations,
        )
    }

    /// Mesh the ideal operational space and reduce it by joint limits at
    /// the lens-down orientation.
    pub fn build_space(&self) -> Result<OperationalSpace> {
        let layout = self.system_layout()?;
        let space = mesh_ideal_space(&layout, self.mesh.grid_h_m)?;
        reduce_by_joint_limits(
            &space,
            &self.robot_geometry()?,
            &self.joint_limits()?,
            Orientation::lens_down(),
        )
    }

    /// Pairwise move-cost model over a meshed space.
    pub fn build_energy_model(&self, space: &OperationalSpace) -> Result<EnergyModel> {
        EnergyModel::new(
            space,
            &self.robot_geometry()?,
            &self.motor_params()?,
            &self.control_params()?,
            Orientation::lens_down(),
        )
    }

    /// Simulated measurement environment at the camera's resolution.
    pub fn build_environment(&self) -> Result<ImagingEnvironment> {
        ImagingEnvironment::new(
            self.noise_field()?,
            self.noise_target()?,
            self.camera.resolution_w as usize,
            self.camera.resolution_h as usize,
            self.search.seed,
        )
    }

    /// Build every domain object once, surfacing the first invariant
    /// violation.
    pub fn validate(&self) -> Result<()> {
        self.robot_geometry()?;
        self.joint_limits()?;
        self.camera_spec()?;
        self.motor_params()?;
        self.control_params()?;
        self.system_layout()?;
        self.noise_field()?;
        self.noise_target()?;
        self.search_config()?;
        if !(self.mesh.grid_h_m.is_finite() && self.mesh.grid_h_m > 0.0) {
            return Err(Error::ValidationError(format!(
                "mesh.grid_h_m must be > 0, got {}",
                self.mesh.grid_h_m
            )));
        }
        Ok(())
    }
}

/// Load and fully validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    let scenario: Scenario = toml::from_str(&text)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
    scenario.validate()?;
    Ok(scenario)
}
