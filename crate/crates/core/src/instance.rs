//! Problem instances for the social-worker scheduling problem (SWP) and the
//! qRobot picking/batching problem, plus the time-window weight matrix.
//!
//! Node 0 is always the depot. Patients (SWP) and items (qRobot) are nodes
//! `1..=n`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Decimal places kept on every generated distance.
pub const DISTANCE_DECIMALS: i32 = 2;

pub(crate) fn round_distance(d: f64) -> f64 {
    let scale = 10f64.powi(DISTANCE_DECIMALS);
    (d * scale).round() / scale
}

/// Symmetric, zero-diagonal, non-negative distance matrix over `n + 1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n_nodes: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Euclidean distances between points, rounded to [`DISTANCE_DECIMALS`].
    pub fn from_points(points: &[[f64; 2]]) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::validation(
                    format!("coordinates[{i}]"),
                    "coordinate is not finite",
                ));
            }
        }
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = points[i][0] - points[j][0];
                let dy = points[i][1] - points[j][1];
                let v = round_distance(dx.hypot(dy));
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Ok(Self { n_nodes: n, d })
    }

    /// Builds a matrix from explicit rows, checking every invariant.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::validation(
                    format!("distances[{i}]"),
                    format!("row has {} entries, expected {n}", row.len()),
                ));
            }
            for (j, &v) in row.iter().enumerate() {
                let field = format!("distances[{i}][{j}]");
                if !v.is_finite() {
                    return Err(Error::validation(field, "distance is not finite"));
                }
                if v < 0.0 {
                    return Err(Error::validation(field, format!("negative distance {v}")));
                }
                if i == j && v != 0.0 {
                    return Err(Error::validation(field, "diagonal entry must be zero"));
                }
            }
            d.extend_from_slice(row);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (d[i * n + j] - d[j * n + i]).abs() > 1e-9 {
                    return Err(Error::validation(
                        format!("distances[{i}][{j}]"),
                        "matrix is not symmetric",
                    ));
                }
            }
        }
        Ok(Self { n_nodes: n, d })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n_nodes + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n_nodes.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Largest off-diagonal entry; `None` with fewer than two nodes.
    pub fn max_off_diagonal(&self) -> Option<f64> {
        self.off_diagonal().reduce(f64::max)
    }

    /// Smallest off-diagonal entry; `None` with fewer than two nodes.
    pub fn min_off_diagonal(&self) -> Option<f64> {
        self.off_diagonal().reduce(f64::min)
    }

    fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n_nodes;
        (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| self.get(i, j)))
    }
}

/// A social-worker scheduling instance.
///
/// `slot_start` and `slot_duration` are indexed by patient, so patient `p`
/// (node `p`) lives at index `p - 1`. Times are in minutes.
#[derive(Debug, Clone, PartialEq)]
pub struct SwpInstance {
    n_patients: usize,
    k_workers: usize,
    coordinates: Vec<[f64; 2]>,
    slot_start: Vec<f64>,
    slot_duration: Vec<f64>,
    max_workload: Option<f64>,
}

impl SwpInstance {
    pub fn new(
        k_workers: usize,
        coordinates: Vec<[f64; 2]>,
        slot_start: Vec<f64>,
        slot_duration: Vec<f64>,
        max_workload: Option<f64>,
    ) -> Result<Self> {
        if coordinates.len() < 2 {
            return Err(Error::validation(
                "coordinates",
                "need the depot and at least one patient",
            ));
        }
        let n = coordinates.len() - 1;
        if k_workers < 1 || k_workers > n {
            return Err(Error::validation(
                "k",
                format!("worker count {k_workers} must lie in 1..={n}"),
            ));
        }
        if slot_start.len() != n {
            return Err(Error::validation(
                "slot_start",
                format!("expected {n} entries, found {}", slot_start.len()),
            ));
        }
        if slot_duration.len() != n {
            return Err(Error::validation(
                "slot_duration",
                format!("expected {n} entries, found {}", slot_duration.len()),
            ));
        }
        for (i, p) in coordinates.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::validation(
                    format!("coordinates[{i}]"),
                    "coordinate is not finite",
                ));
            }
        }
        for (i, &t) in slot_start.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::validation(format!("slot_start[{i}]"), "not finite"));
            }
        }
        for (i, &t) in slot_duration.iter().enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::validation(
                    format!("slot_duration[{i}]"),
                    "duration must be positive",
                ));
            }
        }
        if let Some(q) = max_workload {
            if !(q.is_finite() && q > 0.0) {
                return Err(Error::validation("max_workload", "cap must be positive"));
            }
        }
        Ok(Self {
            n_patients: n,
            k_workers,
            coordinates,
            slot_start,
            slot_duration,
            max_workload,
        })
    }

    pub fn n_patients(&self) -> usize {
        self.n_patients
    }

    /// Patients plus the depot.
    pub fn n_nodes(&self) -> usize {
        self.n_patients + 1
    }

    pub fn k_workers(&self) -> usize {
        self.k_workers
    }

    pub fn coordinates(&self) -> &[[f64; 2]] {
        &self.coordinates
    }

    pub fn slot_start(&self) -> &[f64] {
        &self.slot_start
    }

    pub fn slot_duration(&self) -> &[f64] {
        &self.slot_duration
    }

    pub fn max_workload(&self) -> Option<f64> {
        self.max_workload
    }

    /// Start time of the node's slot. The depot takes the other endpoint's
    /// time, which makes the time-window term vanish on depot arcs.
    fn node_time(&self, node: usize, other: usize) -> f64 {
        match (node, other) {
            (0, 0) => 0.0,
            (0, o) => self.slot_start[o - 1],
            (p, _) => self.slot_start[p - 1],
        }
    }

    pub fn distances(&self) -> Result<DistanceMatrix> {
        DistanceMatrix::from_points(&self.coordinates)
    }
}

/// Time-window-weighted arc costs
/// `W_ij = d_ij + gamma * (tau_i - tau_j)^2 / (d_max - d_min)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n_nodes: usize,
    gamma: f64,
    w: Vec<f64>,
}

impl WeightMatrix {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n_nodes + j]
    }

    /// Maximum off-diagonal weight.
    pub fn max_weight(&self) -> f64 {
        let n = self.n_nodes;
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.w.chunks(self.n_nodes.max(1)).map(<[f64]>::to_vec).collect()
    }
}

pub fn build_weight_matrix(
    instance: &SwpInstance,
    distances: &DistanceMatrix,
    gamma: f64,
) -> Result<WeightMatrix> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::param(format!("gamma must be >= 0, got {gamma}")));
    }
    let n = instance.n_nodes();
    if distances.n_nodes() != n {
        return Err(Error::param(format!(
            "distance matrix covers {} nodes, instance has {n}",
            distances.n_nodes()
        )));
    }
    let (d_max, d_min) = match (distances.max_off_diagonal(), distances.min_off_diagonal()) {
        (Some(hi), Some(lo)) => (hi, lo),
        _ => return Err(Error::Degenerate("no off-diagonal distances".into())),
    };
    let spread = d_max - d_min;
    // With gamma = 0 the time term is absent and W = d needs no scale.
    if spread <= 0.0 && gamma > 0.0 {
        return Err(Error::Degenerate(format!(
            "all off-diagonal distances equal {d_max}; time-window scale is undefined"
        )));
    }
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let gap = instance.node_time(i, j) - instance.node_time(j, i);
            w[i * n + j] = distances.get(i, j);
            if gamma > 0.0 {
                w[i * n + j] += gamma * gap * gap / spread;
            }
        }
    }
    Ok(WeightMatrix {
        n_nodes: n,
        gamma,
        w,
    })
}

/// A qRobot picking instance: `n_items` items with integer weights, `k_robots`
/// robots of capacity `capacity` kg, all starting and ending at the depot.
#[derive(Debug, Clone, PartialEq)]
pub struct QRobotInstance {
    n_items: usize,
    k_robots: usize,
    capacity: u32,
    weights: Vec<u32>,
    coordinates: Option<Vec<[f64; 2]>>,
    distances: DistanceMatrix,
}

impl QRobotInstance {
    pub fn new(
        k_robots: usize,
        capacity: u32,
        weights: Vec<u32>,
        coordinates: Option<Vec<[f64; 2]>>,
        distances: DistanceMatrix,
    ) -> Result<Self> {
        let n = weights.len();
        if n < 1 {
            return Err(Error::validation("weights", "need at least one item"));
        }
        if k_robots < 1 {
            return Err(Error::validation("k", "need at least one robot"));
        }
        if capacity < 1 {
            return Err(Error::validation("capacity", "capacity must be positive"));
        }
        if distances.n_nodes() != n + 1 {
            return Err(Error::validation(
                "distances",
                format!("expected {} nodes, found {}", n + 1, distances.n_nodes()),
            ));
        }
        if let Some(c) = &coordinates {
            if c.len() != n + 1 {
                return Err(Error::validation(
                    "coordinates",
                    format!("expected {} points, found {}", n + 1, c.len()),
                ));
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if w == 0 {
                return Err(Error::validation(format!("weights[{i}]"), "weight must be positive"));
            }
        }
        Ok(Self {
            n_items: n,
            k_robots,
            capacity,
            weights,
            coordinates,
            distances,
        })
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn k_robots(&self) -> usize {
        self.k_robots
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    /// Item weights; item `i` (node `i`) is at index `i - 1`.
    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn coordinates(&self) -> Option<&[[f64; 2]]> {
        self.coordinates.as_deref()
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.distances
    }
}

/// Axis-aligned box that generated coordinates are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Area {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Default for Area {
    fn default() -> Self {
        Self {
            min: [0.0, 0.0],
            max: [100.0, 100.0],
        }
    }
}

impl Area {
    fn validate(&self) -> Result<()> {
        let ok = (0..2).all(|a| {
            self.min[a].is_finite() && self.max[a].is_finite() && self.max[a] > self.min[a]
        });
        if ok {
            Ok(())
        } else {
            Err(Error::param("area must have positive extent on both axes"))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        [
            rng.gen_range(self.min[0]..self.max[0]),
            rng.gen_range(self.min[1]..self.max[1]),
        ]
    }
}

/// Parameters for [`generate_swp_instance`].
///
/// All randomness comes from a ChaCha8 stream seeded with `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwpGenerator {
    pub n_patients: usize,
    pub k_workers: usize,
    pub seed: u64,
    pub area: Area,
    /// Slot granularity in minutes. Slot starts and durations are multiples.
    pub slot_grid: f64,
    /// Start of the working day, minutes after midnight.
    pub day_start: f64,
    /// Length of the working day in minutes.
    pub day_length: f64,
}

impl SwpGenerator {
    pub fn new(n_patients: usize, k_workers: usize, seed: u64) -> Self {
        Self {
            n_patients,
            k_workers,
            seed,
            area: Area::default(),
            slot_grid: 30.0,
            day_start: 480.0,
            day_length: 480.0,
        }
    }
}

pub fn generate_swp_instance(cfg: &SwpGenerator) -> Result<(SwpInstance, DistanceMatrix)> {
    if cfg.n_patients < 1 {
        return Err(Error::param("need at least one patient"));
    }
    if cfg.k_workers < 1 || cfg.k_workers > cfg.n_patients {
        return Err(Error::param(format!(
            "worker count {} must lie in 1..={}",
            cfg.k_workers, cfg.n_patients
        )));
    }
    cfg.area.validate()?;
    if !(cfg.slot_grid.is_finite() && cfg.slot_grid > 0.0) {
        return Err(Error::param("slot grid must be positive"));
    }
    let slots = (cfg.day_length / cfg.slot_grid).floor() as u64;
    if slots < 1 {
        return Err(Error::param("day is shorter than one slot"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coordinates: Vec<[f64; 2]> = (0..=cfg.n_patients).map(|_| cfg.area.sample(&mut rng)).collect();
    let mut slot_start = Vec::with_capacity(cfg.n_patients);
    let mut slot_duration = Vec::with_capacity(cfg.n_patients);
    for _ in 0..cfg.n_patients {
        slot_start.push(cfg.day_start + cfg.slot_grid * rng.gen_range(0..slots) as f64);
        slot_duration.push(cfg.slot_grid * rng.gen_range(1..=2u32) as f64);
    }
    let distances = DistanceMatrix::from_points(&coordinates)?;
    let instance = SwpInstance::new(cfg.k_workers, coordinates, slot_start, slot_duration, None)?;
    Ok((instance, distances))
}

/// Parameters for [`generate_qrobot_instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct QRobotGenerator {
    pub n_items: usize,
    pub k_robots: usize,
    pub capacity: u32,
    pub seed: u64,
    pub area: Area,
}

impl QRobotGenerator {
    pub fn new(n_items: usize, k_robots: usize, capacity: u32, seed: u64) -> Self {
        Self {
            n_items,
            k_robots,
            capacity,
            seed,
            area: Area::default(),
        }
    }
}

/// Item weights are drawn so that the items always fit into the fleet:
/// each weight is at most `capacity / ceil(n / K)`.
pub fn generate_qrobot_instance(cfg: &QRobotGenerator) -> Result<QRobotInstance> {
    if cfg.n_items < 1 || cfg.k_robots < 1 || cfg.capacity < 1 {
        return Err(Error::param("items, robots and capacity must all be positive"));
    }
    cfg.area.validate()?;
    let per_robot = cfg.n_items.div_ceil(cfg.k_robots) as u32;
    let max_weight = (cfg.capacity / per_robot).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coordinates: Vec<[f64; 2]> = (0..=cfg.n_items).map(|_| cfg.area.sample(&mut rng)).collect();
    let weights: Vec<u32> = (0..cfg.n_items).map(|_| rng.gen_range(1..=max_weight)).collect();
    let distances = DistanceMatrix::from_points(&coordinates)?;
    QRobotInstance::new(cfg.k_robots, cfg.capacity, weights, Some(coordinates), distances)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed_instance(slots: Vec<f64>) -> (SwpInstance, DistanceMatrix) {
        let coords = vec![[0.0, 0.0], [3.0, 4.0], [6.0, 8.0], [0.0, 1.0]];
        let n = coords.len() - 1;
        let inst = SwpInstance::new(1, coords, slots, vec![30.0; n], None).unwrap();
        let d = inst.distances().unwrap();
        (inst, d)
    }

    #[test]
    fn single_patient_instance_has_two_by_two_distances() {
        let (inst, d) = generate_swp_instance(&SwpGenerator::new(1, 1, 0)).unwrap();
        assert_eq!(inst.n_patients(), 1);
        assert_eq!(inst.k_workers(), 1);
        assert_eq!(d.n_nodes(), 2);
        assert_eq!(d.get(0, 0), 0.0);
        assert_eq!(d.get(1, 1), 0.0);
        assert_eq!(d.get(0, 1), d.get(1, 0));
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = SwpGenerator::new(5, 2, 42);
        assert_eq!(generate_swp_instance(&cfg).unwrap(), generate_swp_instance(&cfg).unwrap());
        let other = SwpGenerator::new(5, 2, 43);
        assert_ne!(generate_swp_instance(&cfg).unwrap(), generate_swp_instance(&other).unwrap());
    }

    #[test]
    fn generated_distances_are_symmetric_with_zero_diagonal() {
        let (_, d) = generate_swp_instance(&SwpGenerator::new(4, 2, 7)).unwrap();
        for i in 0..5 {
            assert_eq!(d.get(i, i), 0.0);
            for j in 0..5 {
                assert_eq!(d.get(i, j), d.get(j, i));
                let scaled = d.get(i, j) * 100.0;
                assert!((scaled - scaled.round()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn generator_rejects_bad_counts() {
        assert!(matches!(
            generate_swp_instance(&SwpGenerator::new(0, 1, 0)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            generate_swp_instance(&SwpGenerator::new(2, 3, 0)),
            Err(Error::Parameter(_))
        ));
        let mut cfg = SwpGenerator::new(2, 1, 0);
        cfg.area = Area {
            min: [0.0, 0.0],
            max: [0.0, 1.0],
        };
        assert!(generate_swp_instance(&cfg).is_err());
    }

    #[test]
    fn zero_gamma_gives_plain_distances() {
        let (inst, d) = fixed_instance(vec![480.0, 600.0, 900.0]);
        let w = build_weight_matrix(&inst, &d, 0.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(w.get(i, j), d.get(i, j));
            }
        }
    }

    #[test]
    fn equal_slots_give_plain_distances() {
        let (inst, d) = fixed_instance(vec![540.0; 3]);
        let w = build_weight_matrix(&inst, &d, 3.5).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(w.get(i, j), d.get(i, j));
            }
        }
    }

    #[test]
    fn time_window_term_matches_hand_value() {
        // d_12 = 10, tau gap 3, spread d_max - d_min = 6, gamma 2: 10 + 2*9/6 = 13.
        let rows = vec![
            vec![0.0, 4.0, 7.0],
            vec![4.0, 0.0, 10.0],
            vec![7.0, 10.0, 0.0],
        ];
        let d = DistanceMatrix::from_rows(&rows).unwrap();
        let inst = SwpInstance::new(
            1,
            vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
            vec![5.0, 2.0],
            vec![1.0, 1.0],
            None,
        )
        .unwrap();
        let w = build_weight_matrix(&inst, &d, 2.0).unwrap();
        let expected = 10.0 + 2.0 * (5.0f64 - 2.0).powi(2) / (10.0 - 4.0);
        assert_eq!(expected, 13.0);
        assert!((w.get(1, 2) - 13.0).abs() < 1e-12);
        assert!((w.get(2, 1) - 13.0).abs() < 1e-12);
        // depot arcs carry no time-window term
        assert_eq!(w.get(0, 1), 4.0);
        assert_eq!(w.get(2, 0), 7.0);
    }

    #[test]
    fn uniform_distances_are_degenerate() {
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let d = DistanceMatrix::from_rows(&rows).unwrap();
        let inst = SwpInstance::new(1, vec![[0.0, 0.0], [1.0, 0.0]], vec![0.0], vec![1.0], None).unwrap();
        assert!(matches!(build_weight_matrix(&inst, &d, 1.0), Err(Error::Degenerate(_))));
        assert_eq!(build_weight_matrix(&inst, &d, 0.0).unwrap().get(0, 1), 1.0);
    }

    #[test]
    fn negative_distance_names_field() {
        let rows = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        match DistanceMatrix::from_rows(&rows) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "distances[0][1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn qrobot_generator_weights_fit() {
        for seed in 0..20 {
            let inst = generate_qrobot_instance(&QRobotGenerator::new(6, 2, 45, seed)).unwrap();
            assert!(inst.weights().iter().all(|&w| w <= 45));
            assert!(inst.weights().iter().sum::<u32>() <= 90);
        }
    }
}
