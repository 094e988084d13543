//! Energy-aware search for the lowest-noise camera location.
//!
//! The camera starts with an energy budget `E_bound` and must find the
//! mesh node where the fewest pictures `N` are needed to reach the target
//! precision, while always keeping enough energy to return to the best
//! node found so far. The loop is:
//!
//! 1. Four initial nodes are measured: the farthest-apart boundary pair,
//!    plus the farthest-apart pair whose connecting line is nearly
//!    perpendicular to the first.
//! 2. At each iteration the camera measures its node (one photo → blind
//!    σ estimate → picture count), then scores every *explorable* node:
//!    explored nodes by their measured count; unexplored nodes by a
//!    stochastic modified estimate `E[min(Z, N_min)]` with
//!    `Z ~ Normal(μ, K_sd·d_min)`, where μ is inverse-distance-weighted
//!    interpolation (exponent `K_est`) over the explored map, and `d_min`
//!    the distance to the nearest explored node. The uncertainty bonus
//!    pushes exploration toward unvisited regions.
//! 3. While energy is rich (`E > E_T`) any reachable node qualifies; once
//!    it runs low, a candidate must also leave enough energy to reach the
//!    best explored node afterwards.
//! 4. The camera moves to the minimal-score node; when that is the node
//!    it already stands on, the search terminates there.

use std::collections::BTreeMap;

use statrs::function::erf::erfc;

use crate::actuation::{joint_energy, ControlParams, JointMove, MotorGearParams};
use crate::error::{Error, Result};
use crate::imaging::{
    estimate_sigma, picture_count, scene, synth_image, ImageFrame, NoiseField, NoiseTarget,
};
use crate::kinematics::{inverse_kinematics, JointVector, Orientation, Pose, RobotGeometry};
use crate::rng::{derive_seed, TAG_MEASURE, TAG_SCENE};
use crate::vec3::{self, Point3};
use crate::workspace::{Node, OperationalSpace};

/// Tunable parameters of one search run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Interpolation exponent `K_est` (dimensionless, ≥ 0).
    pub k_est: f64,
    /// Uncertainty gain `K_sd` (1/m, ≥ 0).
    pub k_sd: f64,
    /// Initial energy budget `E_bound` (watt-seconds, > 0).
    pub e_bound0_ws: f64,
    /// Conservative-regime threshold `E_T` (watt-seconds, ≥ 0).
    pub e_threshold_ws: f64,
    /// Seed governing scene synthesis and measurement noise.
    pub seed: u64,
    /// Iteration cap including the four initial measurements (≥ 1).
    pub max_iterations: u64,
}

impl SearchConfig {
    /// Validating constructor.
    pub fn new(
        k_est: f64,
        k_sd: f64,
        e_bound0_ws: f64,
        e_threshold_ws: f64,
        seed: u64,
        max_iterations: u64,
    ) -> Result<Self> {
        if !(k_est.is_finite() && k_est >= 0.0) {
            return Err(Error::ValidationError(format!("k_est must be >= 0, got {k_est}")));
        }
        if !(k_sd.is_finite() && k_sd >= 0.0) {
            return Err(Error::ValidationError(format!("k_sd must be >= 0, got {k_sd}")));
        }
        if !(e_bound0_ws.is_finite() && e_bound0_ws > 0.0) {
            return Err(Error::ValidationError(format!(
                "e_bound0_ws must be > 0, got {e_bound0_ws}"
            )));
        }
        if !(e_threshold_ws.is_finite() && e_threshold_ws >= 0.0) {
            return Err(Error::ValidationError(format!(
                "e_threshold_ws must be >= 0, got {e_threshold_ws}"
            )));
        }
        if max_iterations < 1 {
            return Err(Error::ValidationError("max_iterations must be >= 1".into()));
        }
        Ok(SearchConfig { k_est, k_sd, e_bound0_ws, e_threshold_ws, seed, max_iterations })
    }
}

/// The explored map: node index → (position, measured picture count).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExploredMap {
    entries: BTreeMap<usize, (Point3, u64)>,
}

impl ExploredMap {
    /// Empty map.
    pub fn new() -> Self {
        Self::default()
    }

    /// Record a measurement; counts below 1 are invalid.
    pub fn insert(&mut self, index: usize, position: Point3, measured_count: u64) -> Result<()> {
        if measured_count < 1 {
            return Err(Error::ValidationError(format!(
                "measured count at node {index} must be >= 1, got {measured_count}"
            )));
        }
        self.entries.insert(index, (position, measured_count));
        Ok(())
    }

    /// Whether `index` has been measured.
    pub fn contains(&self, index: usize) -> bool {
        self.entries.contains_key(&index)
    }

    /// Measured count at `index`, if explored.
    pub fn count(&self, index: usize) -> Option<u64> {
        self.entries.get(&index).map(|&(_, n)| n)
    }

    /// `(index, position, count)` in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Point3, u64)> + '_ {
        self.entries.iter().map(|(&i, &(p, n))| (i, p, n))
    }

    /// Number of explored nodes.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when nothing has been explored.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index with the minimal measured count (ties: lowest index).
    pub fn min_count_index(&self) -> Option<usize> {
        self.iter().min_by_key(|&(i, _, n)| (n, i)).map(|(i, _, _)| i)
    }

    /// Distance from `p` to the nearest explored node.
    pub fn nearest_distance(&self, p: Point3) -> Option<f64> {
        self.iter().map(|(_, pos, _)| vec3::dist(pos, p)).min_by(f64::total_cmp)
    }
}

/// One line of the search trace. Records are appended once per
/// iteration of the main loop and describe the node the iteration
/// started on (where a measurement happens if that node was new) and
/// the energy remaining after the iteration's move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration ordinal within the main loop.
    pub iteration: u64,
    /// Node the iteration started on.
    pub node_index: usize,
    /// Its position (m).
    pub position: Point3,
    /// Its measured picture count.
    pub measured_count: u64,
    /// Energy budget after the iteration (watt-seconds).
    pub e_remaining_ws: f64,
    /// True when this iteration measured the node for the first time.
    pub newly_explored: bool,
    /// For newly explored nodes: distance to the nearest previously
    /// explored node (m), the exploration-spread metric.
    pub new_distance_m: Option<f64>,
    /// True when the search terminated in this iteration.
    pub terminated: bool,
}

/// Live state of a search.
#[derive(Debug, Clone)]
pub struct SearchState<'a> {
    /// The meshed space being searched.
    pub space: &'a OperationalSpace,
    /// Nodes measured so far.
    pub explored: ExploredMap,
    /// Node the camera currently occupies.
    pub current_index: usize,
    /// Remaining energy budget (watt-seconds).
    pub e_remaining_ws: f64,
    /// Explored node with the minimal count (ties: lowest index).
    pub best_explored_index: usize,
    /// Per-iteration records.
    pub trace: Vec<IterationRecord>,
    /// Set when the search has ended at `current_index`.
    pub terminated: bool,
}

impl<'a> SearchState<'a> {
    /// State with an already-populated explored map (at least one entry,
    /// so the best-explored node is defined).
    pub fn new(
        space: &'a OperationalSpace,
        explored: ExploredMap,
        current_index: usize,
        e_remaining_ws: f64,
    ) -> Result<Self> {
        node_position(space, current_index)?;
        let best_explored_index = explored.min_count_index().ok_or(Error::EmptyExploredSet)?;
        Ok(SearchState {
            space,
            explored,
            current_index,
            e_remaining_ws,
            best_explored_index,
            trace: Vec::new(),
            terminated: false,
        })
    }
}

/// Result of a completed [`run`].
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Node the search ended on.
    pub final_node_index: usize,
    /// Its measured picture count.
    pub final_measured_count: u64,
    /// Total iterations, counting the four initial measurements.
    pub iterations: u64,
    /// Energy left (watt-seconds).
    pub e_remaining_ws: f64,
    /// Whether the loop terminated on its own (vs. hitting the cap).
    pub terminated: bool,
    /// The initial four nodes in visiting order.
    pub initial_order: Vec<usize>,
    /// Everything measured.
    pub explored: ExploredMap,
    /// Main-loop records.
    pub trace: Vec<IterationRecord>,
}

impl SearchOutcome {
    /// Flat `name: value` summary block.
    pub fn summary_text(&self) -> String {
        let avg = match avg_new_distance(&self.trace) {
            Ok(d) => format!("{d:.9}"),
            Err(_) => "nan".to_string(),
        };
        format!(
            "final_node_index: {}\nfinal_measured_count: {}\niterations: {}\ne_remaining_ws: {:.9}\navg_new_distance_m: {}\nexplored_nodes: {}\nterminated: {}\n",
            self.final_node_index,
            self.final_measured_count,
            self.iterations,
            self.e_remaining_ws,
            avg,
            self.explored.len(),
            self.terminated,
        )
    }
}

/// Anything that can be measured at a node and reports the picture
/// count needed there.
pub trait Environment {
    /// Measure at `node`, returning the picture count `N`. Repeated
    /// calls for the same node must return the first result.
    fn measure(&mut self, node: &Node) -> u64;
}

/// The simulated measurement pipeline: a deterministic ground-truth
/// scene at sensor resolution, per-node Gaussian noise from a
/// [`NoiseField`], blind σ estimation, and the picture-count rule.
/// Every node is measured from a single synthesized photo whose seed is
/// derived from `(seed, node index)`; the first measurement is cached
/// and authoritative.
#[derive(Debug, Clone)]
pub struct ImagingEnvironment {
    field: NoiseField,
    target: NoiseTarget,
    truth: ImageFrame,
    seed: u64,
    cache: BTreeMap<usize, u64>,
}

impl ImagingEnvironment {
    /// Environment with a synthesized ground-truth scene of
    /// `resolution_w × resolution_h` pixels.
    pub fn new(
        field: NoiseField,
        target: NoiseTarget,
        resolution_w: usize,
        resolution_h: usize,
        seed: u64,
    ) -> Result<Self> {
        let truth = scene(derive_seed(seed, TAG_SCENE, 0, 0), resolution_h, resolution_w)?;
        Ok(ImagingEnvironment { field, target, truth, seed, cache: BTreeMap::new() })
    }

    /// Environment over a caller-provided ground-truth frame.
    pub fn with_truth(field: NoiseField, target: NoiseTarget, truth: ImageFrame, seed: u64) -> Self {
        ImagingEnvironment { field, target, truth, seed, cache: BTreeMap::new() }
    }

    /// The ground-truth scene.
    pub fn truth(&self) -> &ImageFrame {
        &self.truth
    }

    /// Measurements taken so far.
    pub fn cached_counts(&self) -> &BTreeMap<usize, u64> {
        &self.cache
    }
}

impl Environment for ImagingEnvironment {
    fn measure(&mut self, node: &Node) -> u64 {
        if let Some(&n) = self.cache.get(&node.index) {
            return n;
        }
        let shot_seed = derive_seed(self.seed, TAG_MEASURE, node.index as u64, 0);
        let frame = synth_image(&self.field, node.position, &self.truth, shot_seed);
        let sigma = estimate_sigma(&frame).expect("sensor frames are at least 3x3");
        let n = picture_count(sigma, &self.target);
        self.cache.insert(node.index, n);
        n
    }
}

/// Noise-limited picture count at a position: the count an ideal
/// (estimator-noise-free) measurement would report. Used to locate the
/// true global minimum of a scenario's field.
pub fn noise_limited_count(field: &NoiseField, target: &NoiseTarget, position: Point3) -> u64 {
    picture_count(field.sigma_at(position), target)
}

/// Quadratic move-cost model over a meshed space.
///
/// Joint displacements enter the drive closed forms linearly and the
/// settling grid is displacement-independent, so a joint's move energy is
/// exactly `κ·Δq²` with `κ` the unit-displacement energy. A whole-arm
/// move between nodes `a, b` with joint solutions `q_a, q_b` therefore
/// costs `κ·Σ_j (q_b[j] − q_a[j])²`; the full pairwise table is
/// precomputed.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    kappa: f64,
    joints: Vec<JointVector>,
    costs: Vec<f64>,
    n: usize,
}

impl EnergyModel {
    /// Solve inverse kinematics at every node (fixed orientation) and
    /// build the pairwise cost table.
    pub fn new(
        space: &OperationalSpace,
        geom: &RobotGeometry,
        params: &MotorGearParams,
        control: &ControlParams,
        orientation: Orientation,
    ) -> Result<Self> {
        let mut joints = Vec::with_capacity(space.nodes.len());
        for node in &space.nodes {
            joints.push(inverse_kinematics(&Pose::at(node.position, orientation), geom)?);
        }
        let unit = JointMove { q_initial: 0.0, q_final: 1.0, params: *params, control: *control };
        let kappa = joint_energy(&unit, None)?;
        let n = joints.len();
        let mut costs = vec![0.0f64; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                let mut sum = 0.0;
                for j in 0..6 {
                    let dq = joints[b][j] - joints[a][j];
                    sum += dq * dq;
                }
                let c = kappa * sum;
                costs[a * n + b] = c;
                costs[b * n + a] = c;
            }
        }
        Ok(EnergyModel { kappa, joints, costs, n })
    }

    /// Unit-displacement joint energy κ (watt-seconds per rad²).
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Joint solution at a node (1-based index).
    pub fn joints_at(&self, index: usize) -> &JointVector {
        &self.joints[index - 1]
    }

    /// Move cost between two nodes (1-based indices), watt-seconds.
    pub fn cost(&self, a: usize, b: usize) -> f64 {
        self.costs[(a - 1) * self.n + (b - 1)]
    }
}

fn node_position(space: &OperationalSpace, index: usize) -> Result<Point3> {
    if index == 0 || index > space.nodes.len() {
        return Err(Error::ValidationError(format!(
            "node index {index} outside 1..={}",
            space.nodes.len()
        )));
    }
    Ok(space.nodes[index - 1].position)
}

/// Lexicographic preference for node pairs: larger distance first, then
/// smaller index sum, then smaller first index.
fn pair_better(cand: (f64, usize, usize), best: (f64, usize, usize)) -> bool {
    match cand.0.total_cmp(&best.0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => (cand.1 + cand.2, cand.1) < (best.1 + best.2, best.1),
    }
}

/// The four initial nodes: the maximally distant boundary pair, then the
/// maximally distant pair (over all nodes, excluding the first pair's
/// endpoints) whose connecting line is perpendicular to the first pair's
/// line within ±5°, widened to ±45° if no pair qualifies.
pub fn initial_nodes(space: &OperationalSpace) -> Result<[usize; 4]> {
    if space.nodes.len() < 4 {
        return Err(Error::SpaceTooSmall("fewer than 4 mesh nodes"));
    }
    let flags = space.boundary_flags();
    let boundary: Vec<usize> =
        space.nodes.iter().filter(|nd| flags[nd.index - 1]).map(|nd| nd.index).collect();
    let pos = |i: usize| space.nodes[i - 1].position;

    let mut first: Option<(f64, usize, usize)> = None;
    for (a, &i) in boundary.iter().enumerate() {
        for &j in &boundary[a + 1..] {
            let cand = (vec3::dist(pos(i), pos(j)), i, j);
            if first.is_none_or(|b| pair_better(cand, b)) {
                first = Some(cand);
            }
        }
    }
    let (_, i1, j1) = first.ok_or(Error::SpaceTooSmall("no distinct boundary pair"))?;
    let v1 = vec3::sub(pos(j1), pos(i1));
    let v1_norm = vec3::norm(v1);

    let mut second: Option<(f64, usize, usize)> = None;
    for tol_deg in [5.0f64, 45.0] {
        let cos_limit = tol_deg.to_radians().sin() + 1e-12;
        for i in 1..=space.nodes.len() {
            if i == i1 || i == j1 {
                continue;
            }
            for j in (i + 1)..=space.nodes.len() {
                if j == i1 || j == j1 {
                    continue;
                }
                let v = vec3::sub(pos(j), pos(i));
                let len = vec3::norm(v);
                if len < 1e-12 {
                    continue;
                }
                if vec3::dot(v, v1).abs() / (len * v1_norm) > cos_limit {
                    continue;
                }
                let cand = (len, i, j);
                if second.is_none_or(|b| pair_better(cand, b)) {
                    second = Some(cand);
                }
            }
        }
        if second.is_some() {
            break;
        }
    }
    let (_, i2, j2) = second.ok_or(Error::SpaceTooSmall("no near-perpendicular second pair"))?;
    Ok([i1, j1, i2, j2])
}

/// Visiting order for the four initial nodes: start at the first pair's
/// lower index, then repeatedly hop to the nearest remaining node
/// (distance ties: lower index).
pub fn tour_order(space: &OperationalSpace, four: &[usize; 4]) -> Vec<usize> {
    let pos = |i: usize| space.nodes[i - 1].position;
    let start = four[0].min(four[1]);
    let mut rest: Vec<usize> = four.iter().copied().filter(|&i| i != start).collect();
    let mut order = vec![start];
    let mut cur = start;
    while !rest.is_empty() {
        let (k, _) = rest
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| {
                vec3::dist(pos(a), pos(cur))
                    .total_cmp(&vec3::dist(pos(b), pos(cur)))
                    .then(a.cmp(&b))
            })
            .expect("rest non-empty");
        cur = rest.remove(k);
        order.push(cur);
    }
    order
}

/// Estimated picture count Ñ at a node from the explored map: explored
/// nodes report their measured count; unexplored nodes interpolate with
/// normalized inverse-distance weights `w_i ∝ d_i^(−k_est)`. A target
/// coinciding with an explored position returns that node's count.
pub fn estimate_counts(
    space: &OperationalSpace,
    target_index: usize,
    explored: &ExploredMap,
    k_est: f64,
) -> Result<f64> {
    if explored.is_empty() {
        return Err(Error::EmptyExploredSet);
    }
    if let Some(n) = explored.count(target_index) {
        return Ok(n as f64);
    }
    let p = node_position(space, target_index)?;
    let mut dmin = f64::INFINITY;
    let mut nearest_count = 0u64;
    for (_, pos, n) in explored.iter() {
        let d = vec3::dist(pos, p);
        if d < dmin {
            dmin = d;
            nearest_count = n;
        }
    }
    if dmin < 1e-300 {
        return Ok(nearest_count as f64);
    }
    // weights normalized by dmin for stability: (dmin/d)^k ∈ (0, 1]
    let mut num = 0.0;
    let mut den = 0.0;
    for (_, pos, n) in explored.iter() {
        let w = (dmin / vec3::dist(pos, p)).powf(k_est);
        num += w * n as f64;
        den += w;
    }
    Ok(num / den)
}

/// Closed-form `E[min(Z, c)]` for `Z ~ Normal(mu, sigma)`:
/// `μΦ(z) − σφ(z) + c(1 − Φ(z))` with `z = (c − μ)/σ`; degenerates to
/// `min(μ, c)` at `σ = 0`.
pub(crate) fn truncated_min_mean(mu: f64, sigma: f64, c: f64) -> f64 {
    if sigma <= 0.0 {
        return mu.min(c);
    }
    let z = (c - mu) / sigma;
    let cdf = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    mu * cdf - sigma * pdf + c * (1.0 - cdf)
}

/// Stochastic modified estimate N̂: explored targets return their
/// measured count; unexplored targets return `E[min(Z, n_exp_min)]`
/// with `Z ~ Normal(μ, k_sd·d_min)`, μ from [`estimate_counts`], and
/// `d_min` the distance to the nearest explored node. The truncation at
/// the incumbent minimum rewards uncertainty, sustaining exploration.
pub fn modified_estimate(
    space: &OperationalSpace,
    target_index: usize,
    explored: &ExploredMap,
    k_est: f64,
    k_sd: f64,
    n_exp_min: u64,
) -> Result<f64> {
    if let Some(n) = explored.count(target_index) {
        return Ok(n as f64);
    }
    let mu = estimate_counts(space, target_index, explored, k_est)?;
    let p = node_position(space, target_index)?;
    let dmin = explored.nearest_distance(p).ok_or(Error::EmptyExploredSet)?;
    Ok(truncated_min_mean(mu, k_sd * dmin, n_exp_min as f64))
}

/// Nodes reachable within the remaining budget:
/// `{ i : E(current, i) ≤ e_remaining }`. The current node always
/// belongs (zero cost).
pub fn feasible_set(state: &SearchState, model: &EnergyModel) -> Vec<usize> {
    let cur = state.current_index;
    let mut set: Vec<usize> = state
        .space
        .nodes
        .iter()
        .map(|n| n.index)
        .filter(|&i| model.cost(cur, i) <= state.e_remaining_ws + 1e-12)
        .collect();
    if !set.contains(&cur) {
        set.push(cur);
        set.sort_unstable();
    }
    set
}

/// Candidate nodes for the next move. Above the threshold the whole
/// feasible set qualifies; at or below it, a candidate must leave enough
/// energy to continue to the best explored node afterwards. The current
/// node always belongs.
pub fn explorable_set(
    state: &SearchState,
    model: &EnergyModel,
    config: &SearchConfig,
) -> Vec<usize> {
    let feas = feasible_set(state, model);
    let cur = state.current_index;
    let mut set = if state.e_remaining_ws > config.e_threshold_ws {
        feas
    } else {
        let best = state.best_explored_index;
        feas.into_iter()
            .filter(|&i| model.cost(cur, i) + model.cost(i, best) <= state.e_remaining_ws + 1e-12)
            .collect()
    };
    if !set.contains(&cur) {
        set.push(cur);
        set.sort_unstable();
    }
    set
}

/// The explorable node with the minimal (modified) estimate; explored
/// candidates count as their measured value. Ties break by distance
/// from the current node, then by index — so the current node wins an
/// exact tie and the search terminates there.
pub fn select_next(
    state: &SearchState,
    model: &EnergyModel,
    config: &SearchConfig,
) -> Result<usize> {
    let n_exp_min = state
        .explored
        .count(state.best_explored_index)
        .ok_or(Error::EmptyExploredSet)?;
    let cur_pos = node_position(state.space, state.current_index)?;
    let mut best: Option<(f64, f64, usize)> = None;
    for i in explorable_set(state, model, config) {
        let value =
            modified_estimate(state.space, i, &state.explored, config.k_est, config.k_sd, n_exp_min)?;
        let d = vec3::dist(node_position(state.space, i)?, cur_pos);
        let better = match &best {
            None => true,
            Some(b) => value
                .total_cmp(&b.0)
                .then(d.total_cmp(&b.1))
                .then(i.cmp(&b.2))
                .is_lt(),
        };
        if better {
            best = Some((value, d, i));
        }
    }
    Ok(best.expect("explorable set contains the current node").2)
}

/// One iteration: measure the current node if unexplored, refresh the
/// best-explored node, verify the return-energy invariant, pick the next
/// node, and either move (deducting energy) or terminate in place.
pub fn step(
    state: &mut SearchState,
    environment: &mut dyn Environment,
    model: &EnergyModel,
    config: &SearchConfig,
) -> Result<()> {
    if state.terminated {
        return Ok(());
    }
    let cur = state.current_index;
    let cur_pos = node_position(state.space, cur)?;
    let mut newly_explored = false;
    let mut new_distance_m = None;
    if !state.explored.contains(cur) {
        new_distance_m = state.explored.nearest_distance(cur_pos);
        let count = environment.measure(&state.space.nodes[cur - 1]);
        state.explored.insert(cur, cur_pos, count)?;
        newly_explored = true;
    }
    state.best_explored_index =
        state.explored.min_count_index().expect("explored non-empty after measuring");

    let return_cost = model.cost(cur, state.best_explored_index);
    if return_cost > state.e_remaining_ws + 1e-9 {
        return Err(Error::SafetyViolation {
            cost: return_cost,
            remaining: state.e_remaining_ws,
        });
    }

    let next = select_next(state, model, config)?;
    let iteration = state.trace.len() as u64 + 1;
    let measured_count = state.explored.count(cur).expect("current node explored");
    if next == cur {
        state.terminated = true;
    } else {
        state.e_remaining_ws -= model.cost(cur, next);
        state.current_index = next;
    }
    state.trace.push(IterationRecord {
        iteration,
        node_index: cur,
        position: cur_pos,
        measured_count,
        e_remaining_ws: state.e_remaining_ws,
        newly_explored,
        new_distance_m,
        terminated: state.terminated,
    });
    Ok(())
}

/// Full search: select and measure the four initial nodes (moves between
/// them are charged to the budget in visiting order), then iterate
/// [`step`] until termination or the iteration cap.
pub fn run(
    space: &OperationalSpace,
    environment: &mut dyn Environment,
    model: &EnergyModel,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    let four = initial_nodes(space)?;
    let order = tour_order(space, &four);
    let mut explored = ExploredMap::new();
    let mut e_remaining = config.e_bound0_ws;
    let mut prev: Option<usize> = None;
    for &idx in &order {
        if let Some(p) = prev {
            let cost = model.cost(p, idx);
            if cost > e_remaining + 1e-12 {
                return Err(Error::InsufficientInitialEnergy { cost, budget: e_remaining });
            }
            e_remaining -= cost;
        }
        let node = &space.nodes[idx - 1];
        let count = environment.measure(node);
        explored.insert(idx, node.position, count)?;
        prev = Some(idx);
    }

    let mut state =
        SearchState::new(space, explored, *order.last().expect("four nodes"), e_remaining)?;
    let mut iterations: u64 = order.len() as u64;
    while iterations < config.max_iterations {
        iterations += 1;
        step(&mut state, environment, model, config)?;
        if state.terminated {
            break;
        }
    }

    // The camera parks on the final node. If the iteration cap interrupted
    // the walk right after a move, that node is still unmeasured — measure
    // it in place (no motion cost) so the final count is always defined.
    if state.explored.count(state.current_index).is_none() {
        let node = &space.nodes[state.current_index - 1];
        let count = environment.measure(node);
        state.explored.insert(state.current_index, node.position, count)?;
    }

    Ok(SearchOutcome {
        final_node_index: state.current_index,
        final_measured_count: state
            .explored
            .count(state.current_index)
            .expect("current node measured"),
        iterations,
        e_remaining_ws: state.e_remaining_ws,
        terminated: state.terminated,
        initial_order: order,
        explored: state.explored,
        trace: state.trace,
    })
}

/// Exploration-spread metric: mean, over newly explored iterations, of
/// the distance from the new node to the nearest previously explored
/// node.
pub fn avg_new_distance(trace: &[IterationRecord]) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0u64;
    for r in trace {
        if r.newly_explored {
            if let Some(d) = r.new_distance_m {
                sum += d;
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(Error::NoNewNodes);
    }
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::{mesh_ideal_space, reference_layout};
    use approx::assert_abs_diff_eq;
    use once_cell::sync::Lazy;

    /// Hand-built space over arbitrary positions (lattice from rounded
    /// coordinates so boundary detection works on unit grids).
    fn synthetic_space(positions: &[Point3]) -> OperationalSpace {
        let nodes: Vec<Node> = positions
            .iter()
            .enumerate()
            .map(|(i, &position)| Node { index: i + 1, position })
            .collect();
        let lattice = positions
            .iter()
            .map(|p| [p[0].round() as i64, p[1].round() as i64, p[2].round() as i64])
            .collect();
        OperationalSpace { nodes, grid_h: 1.0, layout: reference_layout(), lattice }
    }

    static REF_SPACE: Lazy<OperationalSpace> =
        Lazy::new(|| mesh_ideal_space(&reference_layout(), 0.1).unwrap());

    static REF_MODEL: Lazy<EnergyModel> = Lazy::new(|| {
        EnergyModel::new(
            &REF_SPACE,
            &RobotGeometry::irb4600_equivalent(),
            &MotorGearParams::reference(),
            &ControlParams::new(0.009, 0.0).unwrap(),
            Orientation::lens_down(),
        )
        .unwrap()
    });

    struct ConstEnv(u64);
    impl Environment for ConstEnv {
        fn measure(&mut self, _node: &Node) -> u64 {
            self.0
        }
    }

    /// Counts looked up from a fixed table by node index.
    struct TableEnv(Vec<u64>);
    impl Environment for TableEnv {
        fn measure(&mut self, node: &Node) -> u64 {
            self.0[node.index - 1]
        }
    }

    fn config(e_bound0: f64, e_threshold: f64) -> SearchConfig {
        SearchConfig::new(5.0, 50.0, e_bound0, e_threshold, 1, 10_000).unwrap()
    }

    #[test]
    fn initial_pairs_on_a_3x3x1_grid() {
        let positions: Vec<Point3> = (0..3)
            .flat_map(|i| (0..3).map(move |j| [i as f64, j as f64, 0.0]))
            .collect();
        let space = synthetic_space(&positions);
        // long diagonal (1,9); perpendicular diagonal (3,7)
        assert_eq!(initial_nodes(&space).unwrap(), [1, 9, 3, 7]);
    }

    #[test]
    fn collinear_nodes_have_no_second_pair() {
        let positions: Vec<Point3> = (0..5).map(|i| [i as f64, 0.0, 0.0]).collect();
        let space = synthetic_space(&positions);
        assert!(matches!(initial_nodes(&space), Err(Error::SpaceTooSmall(_))));
        let tiny = synthetic_space(&positions[..3]);
        assert!(matches!(initial_nodes(&tiny), Err(Error::SpaceTooSmall(_))));
    }

    #[test]
    fn reference_initial_nodes_and_tour() {
        // frozen against an independent brute-force pair scan
        let four = initial_nodes(&REF_SPACE).unwrap();
        assert_eq!(four, [1, 13, 3, 7]);
        assert_eq!(tour_order(&REF_SPACE, &four), vec![1, 3, 7, 13]);

        // cross-check the first pair with an inline all-pairs oracle
        let flags = REF_SPACE.boundary_flags();
        let mut best = (0.0f64, 0usize, 0usize);
        for a in &REF_SPACE.nodes {
            for b in &REF_SPACE.nodes {
                if a.index >= b.index || !flags[a.index - 1] || !flags[b.index - 1] {
                    continue;
                }
                let d = vec3::dist(a.position, b.position);
                if pair_better((d, a.index, b.index), best) {
                    best = (d, a.index, b.index);
                }
            }
        }
        assert_eq!((best.1, best.2), (four[0], four[1]));
    }

    #[test]
    fn estimate_examples() {
        let space = synthetic_space(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.3, 0.2, 0.0],
            [0.5, 0.5, 0.0],
        ]);
        let mut one = ExploredMap::new();
        one.insert(1, [0.0, 0.0, 0.0], 40).unwrap();
        for target in 2..=6 {
            assert_abs_diff_eq!(
                estimate_counts(&space, target, &one, 5.0).unwrap(),
                40.0,
                epsilon = 1e-12
            );
        }
        // explored bypass
        assert_eq!(estimate_counts(&space, 1, &one, 5.0).unwrap(), 40.0);

        // equidistant pair averages
        let mut two = ExploredMap::new();
        two.insert(1, [0.0, 0.0, 0.0], 10).unwrap();
        two.insert(4, [1.0, 1.0, 0.0], 30).unwrap();
        assert_abs_diff_eq!(estimate_counts(&space, 6, &two, 7.0).unwrap(), 20.0, epsilon = 1e-12);

        // unit-square corners, asymmetric interior target, inline oracle
        let mut four = ExploredMap::new();
        let corners = [([0.0, 0.0, 0.0], 10u64), ([1.0, 0.0, 0.0], 20), ([0.0, 1.0, 0.0], 30), ([1.0, 1.0, 0.0], 40)];
        for (i, (p, n)) in corners.iter().enumerate() {
            four.insert(i + 1, *p, *n).unwrap();
        }
        let k = 5.0;
        let target = [0.3, 0.2, 0.0];
        let mut num = 0.0;
        let mut den = 0.0;
        for (p, n) in &corners {
            let w = vec3::dist(*p, target).powf(-k);
            num += w * *n as f64;
            den += w;
        }
        let got = estimate_counts(&space, 5, &four, k).unwrap();
        assert_abs_diff_eq!(got, num / den, epsilon = 1e-9);
        // convex-combination bounds
        assert!(got >= 10.0 && got <= 40.0);

        // approaching an explored node converges to its count
        let mut approach = ExploredMap::new();
        approach.insert(1, [0.0, 0.0, 0.0], 10).unwrap();
        approach.insert(2, [1.0, 0.0, 0.0], 1000).unwrap();
        let near_space = synthetic_space(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1e-6, 0.0, 0.0],
        ]);
        let near = estimate_counts(&near_space, 3, &approach, 5.0).unwrap();
        assert!((near - 10.0).abs() < 1e-3, "near-node estimate {near}");

        assert!(matches!(
            estimate_counts(&space, 6, &ExploredMap::new(), 5.0),
            Err(Error::EmptyExploredSet)
        ));
    }

    #[test]
    fn modified_estimate_examples() {
        let space =
            synthetic_space(&[[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]]);
        let mut explored = ExploredMap::new();
        explored.insert(1, [0.0, 0.0, 0.0], 50).unwrap();

        // k_sd = 0 → min(μ, c)
        assert_eq!(modified_estimate(&space, 2, &explored, 5.0, 0.0, 30).unwrap(), 30.0);
        assert_eq!(modified_estimate(&space, 2, &explored, 5.0, 0.0, 80).unwrap(), 50.0);

        // μ = c = 50, σ = 20·0.5 = 10 → 50 − 10/√(2π)
        let got = modified_estimate(&space, 2, &explored, 5.0, 20.0, 50).unwrap();
        assert_abs_diff_eq!(
            got,
            50.0 - 10.0 / (2.0 * std::f64::consts::PI).sqrt(),
            epsilon = 1e-12
        );

        // explored target returns its count unmodified
        assert_eq!(modified_estimate(&space, 1, &explored, 5.0, 20.0, 10).unwrap(), 50.0);

        // upper bound and exploration pressure; the discount below c only
        // registers in floats while the tail mass is representable
        for c in [10u64, 50, 200] {
            for k_sd in [0.5, 5.0, 50.0] {
                let v = modified_estimate(&space, 2, &explored, 5.0, k_sd, c).unwrap();
                assert!(v <= 50.0f64.min(c as f64) + 1e-12);
                let z = (c as f64 - 50.0) / (k_sd * 0.5);
                if z > -6.0 {
                    assert!(v < c as f64, "exploration pressure violated: {v} vs c {c}");
                }
            }
        }

        // non-increasing in σ
        let mut prev = f64::INFINITY;
        for k_sd in [0.0, 1.0, 5.0, 20.0, 60.0, 200.0] {
            let v = modified_estimate(&space, 2, &explored, 5.0, k_sd, 45).unwrap();
            assert!(v <= prev + 1e-12, "not monotone at k_sd {k_sd}");
            prev = v;
        }
    }

    #[test]
    fn energy_model_matches_direct_move_energy() {
        let geom = RobotGeometry::irb4600_equivalent();
        let params = MotorGearParams::reference();
        let control = ControlParams::new(0.009, 0.0).unwrap();
        let model = &*REF_MODEL;
        assert_eq!(model.cost(5, 5), 0.0);
        for (a, b) in [(1usize, 2usize), (1, 13), (4, 9), (7, 10)] {
            assert_eq!(model.cost(a, b), model.cost(b, a));
            let direct = crate::actuation::move_energy(
                REF_SPACE.nodes[a - 1].position,
                REF_SPACE.nodes[b - 1].position,
                &geom,
                &params,
                &control,
                Orientation::lens_down(),
            )
            .unwrap();
            let rel = (model.cost(a, b) - direct.energy_ws).abs() / direct.energy_ws;
            assert!(rel < 1e-9, "pair ({a},{b}): table {} vs direct {}", model.cost(a, b), direct.energy_ws);
        }
    }

    #[test]
    fn set_containment_and_selection() {
        let model = &*REF_MODEL;
        let mut explored = ExploredMap::new();
        for &i in &[1usize, 3, 7, 13] {
            explored
                .insert(i, REF_SPACE.nodes[i - 1].position, 40 + i as u64)
                .unwrap();
        }
        // zero budget: exactly the current node
        let broke = SearchState::new(&REF_SPACE, explored.clone(), 7, 0.0).unwrap();
        assert_eq!(feasible_set(&broke, model), vec![7]);
        assert_eq!(explorable_set(&broke, model, &config(12.0, 2.0)), vec![7]);

        // huge budget: everything
        let rich = SearchState::new(&REF_SPACE, explored.clone(), 7, 1e9).unwrap();
        let feas = feasible_set(&rich, model);
        assert_eq!(feas.len(), REF_SPACE.nodes.len());
        assert_eq!(explorable_set(&rich, model, &config(12.0, 2.0)), feas);

        // low-energy regime: explorable ⊆ feasible, current included,
        // and it matches a brute-force evaluation of the return rule
        let mid = SearchState::new(&REF_SPACE, explored.clone(), 13, 0.8).unwrap();
        let cfg_tight = config(12.0, 5.0); // e ≤ threshold → conservative
        let feas = feasible_set(&mid, model);
        let expl = explorable_set(&mid, model, &cfg_tight);
        assert!(expl.iter().all(|i| feas.contains(i)));
        assert!(expl.contains(&13));
        let best = mid.best_explored_index;
        assert_eq!(best, 1); // min count 41 at node 1
        for &i in &feas {
            let ok = model.cost(13, i) + model.cost(i, best) <= 0.8 + 1e-12;
            assert_eq!(expl.contains(&i), ok || i == 13, "node {i}");
        }

        // selection returns the current node when it is the strict minimum
        let mut min_at_cur = ExploredMap::new();
        for &i in &[1usize, 3, 7, 13] {
            min_at_cur
                .insert(i, REF_SPACE.nodes[i - 1].position, if i == 7 { 5 } else { 50 })
                .unwrap();
        }
        let state = SearchState::new(&REF_SPACE, min_at_cur, 7, 1e9).unwrap();
        // k_sd = 0 keeps unexplored estimates at min(μ, 5) = 5 ≥ 5; the
        // distance tie-break then keeps the camera in place
        let cfg = SearchConfig::new(5.0, 0.0, 12.0, 2.0, 1, 100).unwrap();
        assert_eq!(select_next(&state, model, &cfg).unwrap(), 7);
    }

    #[test]
    fn flat_environment_explores_everything_then_stops() {
        let model = &*REF_MODEL;
        let mut env = ConstEnv(17);
        let cfg = config(1e6, 0.0);
        let outcome = run(&REF_SPACE, &mut env, model, &cfg).unwrap();
        assert!(outcome.terminated);
        assert_eq!(outcome.final_measured_count, 17);
        assert_eq!(outcome.explored.len(), 13);
        assert_eq!(outcome.iterations, 14); // 4 init + 9 new nodes + terminal step
        let min_count = outcome.explored.iter().map(|(_, _, n)| n).min().unwrap();
        assert_eq!(outcome.final_measured_count, min_count);
        let last = outcome.trace.last().unwrap();
        assert!(last.terminated);
        assert!(!outcome.trace[0].newly_explored);
        assert!(avg_new_distance(&outcome.trace).unwrap() > 0.0);
    }

    #[test]
    fn driven_environment_descends_to_the_minimum() {
        // a count table with a unique minimum at node 11
        let counts: Vec<u64> =
            (1..=13).map(|i| if i == 11 { 12 } else { 40 + i as u64 }).collect();
        let model = &*REF_MODEL;
        let mut env = TableEnv(counts.clone());
        let outcome = run(&REF_SPACE, &mut env, model, &config(1e6, 0.0)).unwrap();
        assert!(outcome.terminated);
        assert_eq!(outcome.final_node_index, 11);
        assert_eq!(outcome.final_measured_count, 12);
        // fallback guarantee: final count is the explored minimum
        let min_count = outcome.explored.iter().map(|(_, _, n)| n).min().unwrap();
        assert_eq!(outcome.final_measured_count, min_count);
        // energy ledger: non-increasing across records
        let mut prev_e = f64::INFINITY;
        for r in &outcome.trace {
            assert!(r.e_remaining_ws <= prev_e + 1e-12);
            prev_e = r.e_remaining_ws;
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let field = NoiseField::new(
            0.056,
            0.001,
            vec![crate::imaging::NoiseWell {
                center_m: [1.647703257897, 0.0, 1.364921187054],
                depth: 0.030,
                width_m: 0.06,
            }],
        )
        .unwrap();
        let target = NoiseTarget::new(0.0065).unwrap();
        let truth = scene(derive_seed(1, TAG_SCENE, 0, 0), 96, 128).unwrap();
        let cfg = config(1e6, 2.0);
        let model = &*REF_MODEL;
        let mut env1 =
            ImagingEnvironment::with_truth(field.clone(), target, truth.clone(), cfg.seed);
        let mut env2 = ImagingEnvironment::with_truth(field, target, truth, cfg.seed);
        let a = run(&REF_SPACE, &mut env1, model, &cfg).unwrap();
        let b = run(&REF_SPACE, &mut env2, model, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.summary_text(), b.summary_text());
        assert_eq!(a.final_node_index, b.final_node_index);
        // every measurement is cached and one-shot
        assert_eq!(env1.cached_counts(), env2.cached_counts());
    }

    #[test]
    fn insufficient_initial_energy_is_reported() {
        let model = &*REF_MODEL;
        let mut env = ConstEnv(10);
        let cfg = SearchConfig::new(5.0, 50.0, 1e-6, 0.0, 1, 100).unwrap();
        assert!(matches!(
            run(&REF_SPACE, &mut env, model, &cfg),
            Err(Error::InsufficientInitialEnergy { .. })
        ));
    }

    #[test]
    fn iteration_cap_stops_the_loop() {
        let model = &*REF_MODEL;
        let mut env = ConstEnv(10);
        let cfg = SearchConfig::new(5.0, 50.0, 1e6, 0.0, 1, 6).unwrap();
        let outcome = run(&REF_SPACE, &mut env, model, &cfg).unwrap();
        assert!(!outcome.terminated);
        assert_eq!(outcome.iterations, 6);
        assert_eq!(outcome.trace.len(), 2);
    }

    #[test]
    fn avg_new_distance_metric() {
        assert!(matches!(avg_new_distance(&[]), Err(Error::NoNewNodes)));
        let rec = |newly: bool, d: Option<f64>| IterationRecord {
            iteration: 1,
            node_index: 1,
            position: [0.0; 3],
            measured_count: 5,
            e_remaining_ws: 1.0,
            newly_explored: newly,
            new_distance_m: d,
            terminated: false,
        };
        assert_abs_diff_eq!(
            avg_new_distance(&[rec(true, Some(0.1)), rec(false, None)]).unwrap(),
            0.1,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            avg_new_distance(&[rec(true, Some(0.1)), rec(true, Some(0.3))]).unwrap(),
            0.2,
            epsilon = 1e-15
        );
        assert!(matches!(avg_new_distance(&[rec(false, None)]), Err(Error::NoNewNodes)));
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(-1.0, 50.0, 12.0, 2.0, 1, 100).is_err());
        assert!(SearchConfig::new(5.0, -0.1, 12.0, 2.0, 1, 100).is_err());
        assert!(SearchConfig::new(5.0, 50.0, 0.0, 2.0, 1, 100).is_err());
        assert!(SearchConfig::new(5.0, 50.0, 12.0, -1.0, 1, 100).is_err());
        assert!(SearchConfig::new(5.0, 50.0, 12.0, 2.0, 1, 0).is_err());
        assert!(SearchConfig::new(0.0, 0.0, 12.0, 0.0, 1, 1).is_ok());
        let mut m = ExploredMap::new();
        assert!(m.insert(1, [0.0; 3], 0).is_err());
        assert!(m.insert(1, [0.0; 3], 1).is_ok());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn truncated_mean_bounds(
                mu in -50.0f64..300.0,
                sigma in 0.0f64..80.0,
                c in -20.0f64..250.0,
            ) {
                let v = truncated_min_mean(mu, sigma, c);
                prop_assert!(v <= mu.min(c) + 1e-12);
                if sigma > 0.0 {
                    // strictly below the cap, and monotone under widening
                    prop_assert!(v < c);
                    let wider = truncated_min_mean(mu, sigma * 2.0, c);
                    prop_assert!(wider <= v + 1e-12);
                } else {
                    prop_assert_eq!(v, mu.min(c));
                }
            }

            #[test]
            fn sets_nest_and_contain_current(
                cur in 1usize..=13,
                e in 0.0f64..40.0,
                thr in 0.0f64..20.0,
            ) {
                let model = &*REF_MODEL;
                let mut explored = ExploredMap::new();
                for &i in &[1usize, 13] {
                    explored.insert(i, REF_SPACE.nodes[i - 1].position, 30 + i as u64).unwrap();
                }
                let state = SearchState::new(&REF_SPACE, explored, cur, e).unwrap();
                let cfg = SearchConfig::new(5.0, 50.0, 12.0, thr, 1, 100).unwrap();
                let feas = feasible_set(&state, model);
                let expl = explorable_set(&state, model, &cfg);
                prop_assert!(feas.contains(&cur));
                prop_assert!(expl.contains(&cur));
                prop_assert!(expl.iter().all(|i| feas.contains(i)));
                prop_assert!(feas.iter().all(|&i| i >= 1 && i <= 13));
                let next = select_next(&state, model, &cfg).unwrap();
                prop_assert!(expl.contains(&next));
            }
        }
    }
}
