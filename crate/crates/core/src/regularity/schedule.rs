use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Regularity parameter and shrink factor used at one level of the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleLevel {
    pub eps: f64,
    pub lambda: f64,
}

/// Levels `1..=Δ+1`, stored with index 0 holding level 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsSchedule {
    pub levels: Vec<ScheduleLevel>,
    /// Product of all per-level shrink factors.
    pub lambda: f64,
}

impl EpsSchedule {
    /// Every level uses the same `lambda_i`.
    pub fn constant(eps: f64, max_degree: usize, alpha: f64, lambda_i: f64) -> Result<Self> {
        eps_schedule(eps, max_degree, alpha, &|_, _| lambda_i)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Level `i`, 1-based.
    pub fn level(&self, i: usize) -> ScheduleLevel {
        self.levels[i - 1]
    }

    /// The regularity reached after the last level.
    pub fn target_eps(&self) -> f64 {
        self.levels.last().map(|l| l.eps).unwrap_or(0.0)
    }
}

/// Builds `eps_{Δ+1} = eps` and `eps_i = eps_{i+1} * lambda_{i+1}` with
/// `lambda_i = rule(eps_i, alpha)`.
pub fn eps_schedule(
    eps: f64,
    max_degree: usize,
    alpha: f64,
    rule: &dyn Fn(f64, f64) -> f64,
) -> Result<EpsSchedule> {
    if max_degree < 2 {
        return domain(format!("max degree {max_degree} below 2"));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return domain(format!("eps {eps} outside (0, 1/2)"));
    }
    let depth = max_degree + 1;
    let mut levels = Vec::with_capacity(depth);
    let mut e = eps;
    for _ in 0..depth {
        let lambda = rule(e, alpha);
        if !(lambda > 0.0 && lambda <= 1.0) {
            return domain(format!("lambda rule returned {lambda} outside (0, 1]"));
        }
        levels.push(ScheduleLevel { eps: e, lambda });
        e *= lambda;
    }
    levels.reverse();
    let lambda = levels.iter().map(|l| l.lambda).product();
    Ok(EpsSchedule { levels, lambda })
}

/// Regularity guaranteed on sub-pairs of relative size at least `delta`.
pub fn slicing_parameters(eps: f64, delta: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < delta) {
        return domain(format!("slicing needs 0 < eps < delta, got eps {eps}, delta {delta}"));
    }
    Ok(eps / delta)
}
