//! Depth-first branch and bound over route plans for small SWP instances.

use crate::decode::Routes;
use crate::error::{Error, Result};
use crate::instance::{DistanceMatrix, SwpInstance, WeightMatrix};

pub const DEFAULT_BACKTRACK_LIMIT: usize = 10;

const TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BacktrackOptions {
    /// Largest patient count accepted.
    pub limit: usize,
    /// Enforce the instance's `max_workload` on every tour's distance.
    pub respect_workload: bool,
}

impl Default for BacktrackOptions {
    fn default() -> Self {
        Self {
            limit: DEFAULT_BACKTRACK_LIMIT,
            respect_workload: true,
        }
    }
}

/// Cheapest plan of exactly `k` non-empty depot tours covering every patient
/// once. Among plans within `1e-9` of the optimum the one whose flattened
/// encoding `[0, a, b, 0, c, 0, ..]` is lexicographically smallest wins;
/// tours are listed by increasing first patient.
pub fn solve_backtracking(
    instance: &SwpInstance,
    weights: &WeightMatrix,
    opts: &BacktrackOptions,
) -> Result<Routes> {
    let n = instance.n_patients();
    if n > opts.limit {
        return Err(Error::Size {
            required: n,
            limit: opts.limit,
        });
    }
    let m = n + 1;
    if weights.n_nodes() != m {
        return Err(Error::param("weight matrix does not match the instance"));
    }
    let workload = match (opts.respect_workload, instance.max_workload()) {
        (true, Some(q)) => Some((q, instance.distances()?)),
        _ => None,
    };
    let min_in: Vec<f64> = (0..m)
        .map(|j| {
            (0..m)
                .filter(|&i| i != j)
                .map(|i| weights.get(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut search = Search {
        n,
        k: instance.k_workers(),
        w: weights,
        workload: workload.as_ref().map(|(q, d)| (*q, d)),
        min_in,
        visited: vec![false; m],
        tours: Vec::new(),
        best: None,
        best_cost: f64::INFINITY,
    };
    for first in 1..=n {
        search.open(first, 0.0);
    }
    let (tours, total_cost) = search.best.ok_or_else(|| {
        Error::Infeasible("no plan satisfies the per-tour workload limit".into())
    })?;
    Ok(Routes {
        workers_used: tours.len(),
        tours,
        total_cost,
    })
}

struct Search<'a> {
    n: usize,
    k: usize,
    w: &'a WeightMatrix,
    workload: Option<(f64, &'a DistanceMatrix)>,
    min_in: Vec<f64>,
    visited: Vec<bool>,
    /// Open tours without the depot endpoints.
    tours: Vec<Vec<usize>>,
    best: Option<(Vec<Vec<usize>>, f64)>,
    best_cost: f64,
}

impl Search<'_> {
    fn unvisited(&self) -> usize {
        self.visited[1..].iter().filter(|v| !**v).count()
    }

    fn tour_distance(&self, tour: &[usize]) -> f64 {
        let (_, d) = self.workload.expect("only called with a workload");
        let mut prev = 0;
        let mut total = 0.0;
        for &p in tour.iter().chain(std::iter::once(&0)) {
            total += d.get(prev, p);
            prev = p;
        }
        total
    }

    fn fits(&self, tour: &[usize], closed: bool) -> bool {
        match self.workload {
            None => true,
            Some((q, d)) => {
                let mut t = self.tour_distance(tour);
                if !closed {
                    // Open tours are charged without their return arc.
                    t -= d.get(*tour.last().unwrap(), 0);
                }
                t <= q + 1e-9
            }
        }
    }

    fn bound(&self, cost: f64) -> f64 {
        let pending: f64 = (1..=self.n)
            .filter(|&j| !self.visited[j])
            .map(|j| self.min_in[j])
            .sum();
        let closings = (self.k - self.tours.len() + 1) as f64;
        cost + pending + closings * self.min_in[0]
    }

    /// Starts a new tour at patient `first`; `cost` covers closed tours.
    fn open(&mut self, first: usize, cost: f64) {
        if self.tours.len() == self.k {
            return;
        }
        self.tours.push(vec![first]);
        self.visited[first] = true;
        let cost = cost + self.w.get(0, first);
        if self.fits(self.tours.last().unwrap(), false) {
            self.extend(first, cost);
        }
        self.visited[first] = false;
        self.tours.pop();
    }

    fn extend(&mut self, last: usize, cost: f64) {
        if self.bound(cost) > self.best_cost - TIE {
            return;
        }
        let left = self.unvisited();
        let tours_after_this = self.k - self.tours.len();
        // Closing comes first: the depot marker sorts before any patient.
        if self.fits(self.tours.last().unwrap(), true) {
            let closed = cost + self.w.get(last, 0);
            if left == 0 && tours_after_this == 0 {
                if closed < self.best_cost - TIE {
                    self.best_cost = closed;
                    self.best = Some((self.tours.clone(), closed));
                }
                return;
            }
            if tours_after_this > 0 && left >= tours_after_this {
                let first = self.tours.last().unwrap()[0];
                for next in first + 1..=self.n {
                    if !self.visited[next] {
                        self.open(next, closed);
                    }
                }
            }
        }
        if left > tours_after_this {
            for p in 1..=self.n {
                if self.visited[p] {
                    continue;
                }
                self.visited[p] = true;
                self.tours.last_mut().unwrap().push(p);
                if self.fits(self.tours.last().unwrap(), false) {
                    self.extend(p, cost + self.w.get(last, p));
                }
                self.tours.last_mut().unwrap().pop();
                self.visited[p] = false;
            }
        }
    }
}
