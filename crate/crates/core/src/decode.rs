//! Bit vectors back to routes and picking plans, with constraint checks that
//! do not rely on the penalty terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{QRobotInstance, SwpInstance, WeightMatrix};
use crate::qubo::{arc_index, check_bits, energy_unchecked, qrobot_var_index, QuboModel};

/// Depot tours, each listed without the depot endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Routes {
    pub tours: Vec<Vec<usize>>,
    pub total_cost: f64,
    pub workers_used: usize,
}

impl Routes {
    /// `[[0, a, b, 0], [0, c, 0]]`.
    pub fn with_depot(&self) -> Vec<Vec<usize>> {
        self.tours
            .iter()
            .map(|t| std::iter::once(0).chain(t.iter().copied()).chain(std::iter::once(0)).collect())
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (w, tour) in self.with_depot().iter().enumerate() {
            let path: Vec<String> = tour.iter().map(usize::to_string).collect();
            out.push_str(&format!("worker {}: {}\n", w + 1, path.join(" -> ")));
        }
        out.push_str(&format!("total cost: {}\n", self.total_cost));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotRoute {
    pub robot: usize,
    /// `(t, node)` for every step with exactly one active node.
    pub visits: Vec<(usize, usize)>,
    pub load: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotPlan {
    pub robots: Vec<RobotRoute>,
    pub total_distance: f64,
}

impl RobotPlan {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.robots {
            let path: Vec<String> = r.visits.iter().map(|(t, i)| format!("{i}@t{t}")).collect();
            out.push_str(&format!("robot {}: {} (load {} kg)\n", r.robot, path.join(" -> "), r.load));
        }
        out.push_str(&format!("total distance: {}\n", self.total_distance));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    pub recomputed_cost: f64,
}

impl FeasibilityReport {
    fn new(violations: Vec<Violation>, recomputed_cost: f64) -> Self {
        Self {
            feasible: violations.is_empty(),
            violations,
            recomputed_cost,
        }
    }
}

fn violation(constraint: &str, detail: String) -> Violation {
    Violation {
        constraint: constraint.to_string(),
        detail,
    }
}

pub fn decode_swp(
    bits: &[u8],
    model: &QuboModel,
    instance: &SwpInstance,
    weights: &WeightMatrix,
) -> Result<(Routes, FeasibilityReport)> {
    check_bits(bits, model.n_vars())?;
    let m = instance.n_nodes();
    let k = instance.k_workers();
    let names = model.var_names();
    if weights.n_nodes() != m || names.len() < m * (m - 1) {
        return Err(Error::Model("model does not cover the instance's arcs".into()));
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut indeg = vec![0usize; m];
    let mut cost = 0.0;
    #[allow(clippy::needless_range_loop)]
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            let v = arc_index(m, i, j);
            if names[v] != format!("x_{i}_{j}") {
                return Err(Error::Model(format!(
                    "variable {v} is `{}`, expected `x_{i}_{j}`",
                    names[v]
                )));
            }
            if bits[v] == 1 {
                succ[i].push(j);
                indeg[j] += 1;
                cost += weights.get(i, j);
            }
        }
    }

    let mut violations = Vec::new();
    for p in 1..m {
        if succ[p].len() != 1 {
            violations.push(violation("out-degree", format!("patient {p} has {} outgoing arcs", succ[p].len())));
        }
        if indeg[p] != 1 {
            violations.push(violation("in-degree", format!("patient {p} has {} incoming arcs", indeg[p])));
        }
    }
    if succ[0].len() != k {
        violations.push(violation("depot-out", format!("depot has {} outgoing arcs, expected {k}", succ[0].len())));
    }
    if indeg[0] != k {
        violations.push(violation("depot-in", format!("depot has {} incoming arcs, expected {k}", indeg[0])));
    }

    // Follow each depot arc until it returns; whatever is left over lies on
    // cycles that miss the depot.
    let mut on_tour = vec![false; m];
    let mut tours = Vec::new();
    for &start in &succ[0] {
        let mut tour = Vec::new();
        let mut cur = start;
        while cur != 0 && !on_tour[cur] {
            on_tour[cur] = true;
            tour.push(cur);
            match succ[cur].first() {
                Some(&next) => cur = next,
                None => break,
            }
        }
        tours.push(tour);
    }
    let stranded: Vec<usize> = (1..m).filter(|&p| !on_tour[p]).collect();
    if !stranded.is_empty() {
        let on_cycle = stranded.iter().any(|&p| !succ[p].is_empty() && indeg[p] > 0);
        let tag = if on_cycle { "subtour" } else { "unvisited" };
        violations.push(violation(tag, format!("patients {stranded:?} are not on a depot tour")));
    }

    if let Some(q) = instance.max_workload() {
        let d = instance.distances()?;
        for (w, tour) in tours.iter().enumerate() {
            let mut prev = 0;
            let mut len = 0.0;
            for &p in tour.iter().chain(std::iter::once(&0)) {
                len += d.get(prev, p);
                prev = p;
            }
            if len > q + 1e-9 {
                violations.push(violation("workload", format!("tour {} covers {len}, limit {q}", w + 1)));
            }
        }
    }

    tours.sort_by_key(|t| t.first().copied().unwrap_or(0));
    let routes = Routes {
        workers_used: tours.iter().filter(|t| !t.is_empty()).count(),
        tours,
        total_cost: cost,
    };
    Ok((routes, FeasibilityReport::new(violations, cost)))
}

/// Bit vector of a route plan. Capacity slack bits, if the model has them,
/// take the register value with the lowest energy, so the result is the
/// model's best assignment for these arcs.
pub fn encode_swp_routes(routes: &Routes, model: &QuboModel, n_nodes: usize) -> Result<Vec<u8>> {
    let m = n_nodes;
    let mut bits = vec![0u8; model.n_vars()];
    for tour in routes.with_depot() {
        for w in tour.windows(2) {
            let (i, j) = (w[0], w[1]);
            if i >= m || j >= m || i == j {
                return Err(Error::Model(format!("route uses arc ({i}, {j}) outside {m} nodes")));
            }
            let v = arc_index(m, i, j);
            if model.var_names().get(v).map(String::as_str) != Some(format!("x_{i}_{j}").as_str()) {
                return Err(Error::Model(format!("model has no variable x_{i}_{j}")));
            }
            bits[v] = 1;
        }
    }
    let slack: Vec<usize> = (0..)
        .map_while(|b| model.var_index(&format!("slack_cap_b{b}")))
        .collect();
    if !slack.is_empty() {
        // Slack weights are powers of two and enter one squared term, so the
        // energy is a quadratic in the register value.
        let mut at = |v: u64| -> f64 {
            for (b, &idx) in slack.iter().enumerate() {
                bits[idx] = ((v >> b) & 1) as u8;
            }
            energy_unchecked(model, &bits)
        };
        let (e0, e1, e2) = (at(0), at(1), at(2));
        let alpha = (e2 - 2.0 * e1 + e0) / 2.0;
        let beta = e1 - e0 - alpha;
        let max = (1u64 << slack.len()) - 1;
        let v = if alpha > 0.0 {
            (-beta / (2.0 * alpha)).round().clamp(0.0, max as f64) as u64
        } else {
            0
        };
        at(v);
    }
    Ok(bits)
}

pub fn decode_qrobot(bits: &[u8], model: &QuboModel, instance: &QRobotInstance) -> Result<(RobotPlan, FeasibilityReport)> {
    check_bits(bits, model.n_vars())?;
    let n = instance.n_items();
    let big_k = instance.k_robots();
    let nodes = n + 1;
    let steps = n + 2;
    let names = model.var_names();
    if names.len() < big_k * steps * nodes {
        return Err(Error::Model("model is smaller than the picking layout".into()));
    }
    let x = |t: usize, i: usize, p: usize| qrobot_var_index(n, t, i, p);
    for p in 1..=big_k {
        for t in 0..steps {
            for i in 0..nodes {
                let v = x(t, i, p);
                if names[v] != format!("x_t{t}_i{i}_p{p}") {
                    return Err(Error::Model(format!(
                        "variable {v} is `{}`, expected `x_t{t}_i{i}_p{p}`",
                        names[v]
                    )));
                }
            }
        }
    }

    let d = instance.distances();
    let mut violations = Vec::new();
    let mut robots = Vec::with_capacity(big_k);
    let mut total = 0.0;
    let mut visits_of = vec![0usize; nodes];
    for p in 1..=big_k {
        let mut visits = Vec::new();
        let mut load = 0u64;
        for t in 0..steps {
            let here: Vec<usize> = (0..nodes).filter(|&i| bits[x(t, i, p)] == 1).collect();
            if here.len() != 1 {
                violations.push(violation(
                    "one-node-per-time",
                    format!("robot {p} at t = {t} occupies {} nodes", here.len()),
                ));
            }
            for &i in &here {
                visits_of[i] += 1;
                if i > 0 {
                    load += instance.weights()[i - 1] as u64;
                }
            }
            if let [i] = here[..] {
                visits.push((t, i));
            }
        }
        if bits[x(0, 0, p)] != 1 {
            violations.push(violation("start-depot", format!("robot {p} does not start at the depot")));
        }
        if bits[x(steps - 1, 0, p)] != 1 {
            violations.push(violation("end-depot", format!("robot {p} does not end at the depot")));
        }
        if load > instance.capacity() as u64 {
            violations.push(violation(
                "capacity",
                format!("robot {p} carries {load} kg, capacity {} kg", instance.capacity()),
            ));
        }
        for t in 1..steps {
            for i in 0..nodes {
                for j in 0..nodes {
                    if bits[x(t - 1, i, p)] == 1 && bits[x(t, j, p)] == 1 {
                        total += d.get(i, j);
                    }
                }
            }
        }
        robots.push(RobotRoute { robot: p, visits, load });
    }
    for (i, &c) in visits_of.iter().enumerate().skip(1) {
        if c != 1 {
            violations.push(violation("item-coverage", format!("item {i} is visited {c} times")));
        }
    }
    let plan = RobotPlan {
        robots,
        total_distance: total,
    };
    Ok((plan, FeasibilityReport::new(violations, total)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_weight_matrix, DistanceMatrix};
    use crate::qubo::{build_qrobot_qubo, build_swp_qubo, QRobotQuboOptions, SwpQuboOptions};

    fn three_node() -> (SwpInstance, WeightMatrix, QuboModel) {
        let inst = SwpInstance::new(1, vec![[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]], vec![480.0, 510.0], vec![30.0; 2], None)
            .unwrap();
        let d = inst.distances().unwrap();
        let w = build_weight_matrix(&inst, &d, 1.0).unwrap();
        let m = build_swp_qubo(&inst, &w, &SwpQuboOptions::default()).unwrap();
        (inst, w, m)
    }

    #[test]
    fn encode_round_trips_through_decode() {
        let (inst, w, m) = three_node();
        let routes = Routes { tours: vec![vec![2, 1]], total_cost: 0.0, workers_used: 1 };
        let bits = encode_swp_routes(&routes, &m, 3).unwrap();
        let (back, report) = decode_swp(&bits, &m, &inst, &w).unwrap();
        assert!(report.feasible);
        assert_eq!(back.tours, routes.tours);
    }

    #[test]
    fn encode_picks_zero_penalty_slack() {
        let inst = SwpInstance::new(1, vec![[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]], vec![480.0, 510.0], vec![30.0; 2], Some(20.0))
            .unwrap();
        let d = inst.distances().unwrap();
        let w = build_weight_matrix(&inst, &d, 1.0).unwrap();
        let opts = SwpQuboOptions { include_capacity: true, ..SwpQuboOptions::default() };
        let m = build_swp_qubo(&inst, &w, &opts).unwrap();
        let routes = Routes { tours: vec![vec![1, 2]], total_cost: 0.0, workers_used: 1 };
        let bits = encode_swp_routes(&routes, &m, 3).unwrap();
        let objective = w.get(0, 1) + w.get(1, 2) + w.get(2, 0);
        let e = crate::qubo::evaluate_qubo(&m, &bits).unwrap();
        assert!((e - objective).abs() < 1e-9, "{e} vs {objective}");
    }

    #[test]
    fn hand_built_tour_is_feasible() {
        let (inst, w, m) = three_node();
        let mut bits = vec![0u8; 6];
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            bits[arc_index(3, i, j)] = 1;
        }
        let (routes, rep) = decode_swp(&bits, &m, &inst, &w).unwrap();
        assert!(rep.feasible, "{:?}", rep.violations);
        assert_eq!(routes.with_depot(), vec![vec![0, 1, 2, 0]]);
        assert_eq!(rep.recomputed_cost, w.get(0, 1) + w.get(1, 2) + w.get(2, 0));
    }

    #[test]
    fn double_out_arc_is_flagged() {
        let (inst, w, m) = three_node();
        let mut bits = vec![0u8; 6];
        for (i, j) in [(0, 1), (1, 2), (1, 0), (2, 0)] {
            bits[arc_index(3, i, j)] = 1;
        }
        let (_, rep) = decode_swp(&bits, &m, &inst, &w).unwrap();
        assert!(!rep.feasible);
        assert!(rep.violations.iter().any(|v| v.constraint == "out-degree"));
    }

    #[test]
    fn depot_free_cycle_is_a_subtour() {
        let coords = vec![[0.0, 0.0], [1.0, 0.0], [5.0, 5.0], [6.0, 5.0]];
        let inst = SwpInstance::new(1, coords, vec![480.0; 3], vec![30.0; 3], None).unwrap();
        let d = inst.distances().unwrap();
        let w = build_weight_matrix(&inst, &d, 0.0).unwrap();
        let m = build_swp_qubo(&inst, &w, &SwpQuboOptions::default()).unwrap();
        let mut bits = vec![0u8; 12];
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            bits[arc_index(4, i, j)] = 1;
        }
        let (_, rep) = decode_swp(&bits, &m, &inst, &w).unwrap();
        let tags: Vec<&str> = rep.violations.iter().map(|v| v.constraint.as_str()).collect();
        assert_eq!(tags, vec!["subtour"]);
    }

    #[test]
    fn wrong_layout_is_a_model_error() {
        let (inst, w, _) = three_node();
        let m = QuboModel::builder(6).build().unwrap();
        assert!(matches!(decode_swp(&[0; 6], &m, &inst, &w), Err(Error::Model(_))));
    }

    fn robot_instance(weights: Vec<u32>, capacity: u32) -> (QRobotInstance, QuboModel) {
        let pts = vec![[0.0, 0.0], [3.0, 4.0], [6.0, 0.0]];
        let d = DistanceMatrix::from_points(&pts).unwrap();
        let inst = QRobotInstance::new(1, capacity, weights, Some(pts), d).unwrap();
        let m = build_qrobot_qubo(&inst, &QRobotQuboOptions::default()).unwrap();
        (inst, m)
    }

    fn plan_bits(m: &QuboModel, path: &[(usize, usize)]) -> Vec<u8> {
        let mut bits = vec![0u8; m.n_vars()];
        for &(t, i) in path {
            bits[qrobot_var_index(2, t, i, 1)] = 1;
        }
        bits
    }

    #[test]
    fn robot_plan_within_capacity() {
        let (inst, m) = robot_instance(vec![8, 8], 45);
        let bits = plan_bits(&m, &[(0, 0), (1, 1), (2, 2), (3, 0)]);
        let (plan, rep) = decode_qrobot(&bits, &m, &inst).unwrap();
        assert!(rep.feasible, "{:?}", rep.violations);
        assert_eq!(plan.robots[0].load, 16);
        assert_eq!(plan.robots[0].visits, vec![(0, 0), (1, 1), (2, 2), (3, 0)]);
        assert_eq!(rep.recomputed_cost, 16.0);
    }

    #[test]
    fn overload_and_double_occupancy() {
        let (inst, m) = robot_instance(vec![30, 30], 45);
        let bits = plan_bits(&m, &[(0, 0), (1, 1), (2, 2), (3, 0)]);
        let (_, rep) = decode_qrobot(&bits, &m, &inst).unwrap();
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].constraint, "capacity");

        let bits = plan_bits(&m, &[(0, 0), (1, 1), (1, 2), (2, 2), (3, 0)]);
        let (_, rep) = decode_qrobot(&bits, &m, &inst).unwrap();
        assert!(rep.violations.iter().any(|v| v.constraint == "one-node-per-time"));
    }
}
