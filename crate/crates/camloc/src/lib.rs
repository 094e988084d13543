//! Energy-aware camera location search for precision observation in
//! automated manufacturing cells.
//!
//! A stereo camera rides on a 6-DoF industrial manipulator and must find,
//! within a bounded energy budget, the observation node whose measurements
//! are least corrupted by ambient noise. The crate covers the full
//! pipeline:
//!
//! * [`kinematics`] — closed-form forward/inverse kinematics of the arm
//!   and joint-limit checks;
//! * [`workspace`] — the camera-feasible region (reachable sphere cut by a
//!   visual-target cone), its cubic mesh, and detection-geometry anchors;
//! * [`actuation`] — per-joint DC-drive response, settling time, and
//!   electrical energy of a move, with and without input shaping by a
//!   delay element;
//! * [`imaging`] — synthetic scenes, sensor noise, noise-level estimation,
//!   frame averaging, Gaussian filtering, and radial power spectra;
//! * [`search`] — the energy-bounded greedy search over mesh nodes with
//!   inverse-distance-weighted count prediction and safety reserve;
//! * [`scenario`] — TOML scenario files tying all parameters together;
//! * [`cli`] — the `camloc` command-line interface built on the above.
//!
//! # Example
//!
//! Mesh the feasible region and run a search against a synthetic noise
//! field:
//!
//! ```
//! use camloc::scenario::Scenario;
//!
//! let scenario = Scenario::builtin_reference();
//! let space = scenario.build_space().unwrap();
//! assert_eq!(space.nodes.len(), 13);
//!
//! let model = scenario.build_energy_model(&space).unwrap();
//! let mut env = scenario.build_environment().unwrap();
//! let config = scenario.search_config().unwrap();
//! let outcome = camloc::search::run(&space, &mut env, &model, &config).unwrap();
//! assert!(outcome.terminated);
//! ```

pub mod actuation;
pub mod cli;
pub mod error;
pub mod imaging;
pub mod kinematics;
pub mod rng;
pub mod scenario;
pub mod search;
pub mod vec3;
pub mod workspace;

pub use error::{Error, Result};
