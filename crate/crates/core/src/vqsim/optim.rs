//! Derivative-free optimisers: SPSA and Nelder-Mead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    /// Gain `a` in `a_k = a / (k + 1 + A)^alpha`; replaced when calibrating.
    pub a: f64,
    /// Perturbation `c` in `c_k = c / (k + 1)^gamma`.
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant `A`.
    pub stability: f64,
    pub iters: usize,
    /// Pick `a` so the first step has magnitude `2 pi / 10`, estimated from
    /// `calibration_steps` gradient samples at the starting point.
    pub calibrate: bool,
    pub calibration_steps: usize,
    /// Also evaluate the starting point, recorded as iteration 0.
    pub evaluate_initial: bool,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            a: 0.2,
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
            stability: 0.0,
            iters: 100,
            calibrate: false,
            calibration_steps: 25,
            evaluate_initial: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadConfig {
    pub iters: usize,
    /// Offset of the initial simplex vertices along each axis.
    pub initial_step: f64,
    /// Stop once the simplex's value spread falls below this.
    pub tolerance: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            iters: 200,
            initial_step: 0.5,
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// Final iterate (SPSA) or best simplex vertex (Nelder-Mead).
    pub params: Vec<f64>,
    /// `(iteration, value)`; per iteration the best point evaluated in it.
    pub history: Vec<(usize, f64)>,
    /// Objective calls outside calibration: the iteration loop, the
    /// optional initial point and the final iterate.
    pub evaluations: usize,
    /// Extra calls spent on gain calibration.
    pub calibration_evaluations: usize,
}

struct Counted<F> {
    f: F,
    calls: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.calls += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                value: v,
                evaluation: self.calls,
            })
        }
    }
}

fn rademacher(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

fn offset(x: &[f64], dir: &[f64], s: f64) -> Vec<f64> {
    x.iter().zip(dir).map(|(a, d)| a + s * d).collect()
}

/// Simultaneous-perturbation stochastic approximation. Each iteration calls
/// the objective exactly twice, at `theta +- c_k Delta`; the final iterate is
/// evaluated once more and competes for the best point.
pub fn spsa_minimize<F: FnMut(&[f64]) -> f64>(objective: F, init: &[f64], cfg: &SpsaConfig, seed: u64) -> Result<OptimResult> {
    if cfg.iters == 0 {
        return Err(Error::param("SPSA needs at least one iteration"));
    }
    if !(cfg.c > 0.0 && cfg.c.is_finite()) {
        return Err(Error::param("SPSA perturbation c must be positive"));
    }
    let mut f = Counted { f: objective, calls: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = init.len();
    let mut theta = init.to_vec();
    let mut history = Vec::with_capacity(cfg.iters + 1);
    let mut best = (init.to_vec(), f64::INFINITY);

    let mut a = cfg.a;
    let mut calibration_evaluations = 0;
    if cfg.calibrate && n > 0 {
        let steps = cfg.calibration_steps.max(1);
        let mut total = 0.0;
        for _ in 0..steps {
            let delta = rademacher(&mut rng, n);
            let plus = f.eval(&offset(&theta, &delta, cfg.c))?;
            let minus = f.eval(&offset(&theta, &delta, -cfg.c))?;
            total += ((plus - minus) / (2.0 * cfg.c)).abs();
        }
        calibration_evaluations = f.calls;
        f.calls = 0;
        let magnitude = total / steps as f64;
        let target = 2.0 * std::f64::consts::PI / 10.0;
        a = if magnitude > 1e-10 { target / magnitude } else { target };
        a *= (cfg.stability + 1.0).powf(cfg.alpha);
    }

    if cfg.evaluate_initial {
        let v = f.eval(&theta)?;
        history.push((0, v));
        best = (theta.clone(), v);
    }
    for k in 0..cfg.iters {
        let ak = a / (k as f64 + 1.0 + cfg.stability).powf(cfg.alpha);
        let ck = cfg.c / (k as f64 + 1.0).powf(cfg.gamma);
        let delta = rademacher(&mut rng, n);
        let xp = offset(&theta, &delta, ck);
        let xm = offset(&theta, &delta, -ck);
        let yp = f.eval(&xp)?;
        let ym = f.eval(&xm)?;
        let (y, x) = if ym < yp { (ym, xm) } else { (yp, xp) };
        history.push((k + 1, y));
        if y < best.1 {
            best = (x, y);
        }
        let scale = (yp - ym) / (2.0 * ck);
        for (t, d) in theta.iter_mut().zip(&delta) {
            // Delta entries are +-1, so dividing by them is multiplying.
            *t -= ak * scale * d;
        }
    }
    // The iterate itself is never probed inside the loop, and late
    // perturbations still sit c_k away from it.
    let last = f.eval(&theta)?;
    if last < best.1 {
        best = (theta.clone(), last);
    }
    Ok(OptimResult {
        best_params: best.0,
        best_value: best.1,
        params: theta,
        history,
        evaluations: f.calls,
        calibration_evaluations,
    })
}

/// Nelder-Mead with reflection 1, expansion 2, contraction 1/2 and shrink
/// 1/2. The starting point is evaluated as iteration 0.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(objective: F, init: &[f64], cfg: &NelderMeadConfig) -> Result<OptimResult> {
    if cfg.iters == 0 {
        return Err(Error::param("Nelder-Mead needs at least one iteration"));
    }
    let mut f = Counted { f: objective, calls: 0 };
    let n = init.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = f.eval(init)?;
    simplex.push((init.to_vec(), v0));
    let mut history = vec![(0, v0)];
    for i in 0..n {
        let mut x = init.to_vec();
        x[i] += cfg.initial_step;
        let v = f.eval(&x)?;
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);

    for it in 1..=cfg.iters {
        if n == 0 || simplex[n].1 - simplex[0].1 <= cfg.tolerance {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = toward(1.0);
        let fr = f.eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = toward(2.0);
            let fe = f.eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let x = toward(0.5);
                let v = f.eval(&x)?;
                (x, v)
            } else {
                let x = toward(-0.5);
                let v = f.eval(&x)?;
                (x, v)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
                    let v = f.eval(&x)?;
                    *vertex = (x, v);
                }
            }
        }
        order(&mut simplex);
        history.push((it, simplex[0].1));
    }
    let (bx, bv) = simplex[0].clone();
    Ok(OptimResult {
        best_params: bx.clone(),
        best_value: bv,
        params: bx,
        history,
        evaluations: f.calls,
        calibration_evaluations: 0,
    })
}
