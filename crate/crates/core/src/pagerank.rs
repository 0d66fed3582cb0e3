//! Quantum PageRank on top of the double walk `W = S R S R`, plus the
//! classical power-iteration baseline.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::dense::SquareMatrix;
use crate::error::{Error, Result};
use crate::graph::{classical_step, ProbabilityVector, TransitionMatrix, ValidationPolicy};
use crate::operators::{build_psi_matrix, Operator, ReflectionOperator, UnitaryPipeline};
use crate::simulator::{evolve_observed, Readout};
use crate::state::{initial_superposition, Register};

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_POWER_TOLERANCE: f64 = 1e-12;
pub const MAX_POWER_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub steps: usize,
    /// `(theta1, theta2)` in `W = S R(theta1) S R(theta2)`; `None` means
    /// both equal to pi.
    pub apr_angles: Option<(f64, f64)>,
    /// Only used when building a Google matrix from raw links.
    pub damping: f64,
    /// Average over `0..=T` instead of `1..=T`.
    pub include_t0: bool,
    pub keep_trace: bool,
}

impl PageRankConfig {
    pub fn new(steps: usize) -> Self {
        PageRankConfig {
            steps,
            apr_angles: None,
            damping: DEFAULT_DAMPING,
            include_t0: false,
            keep_trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if let Some((a, b)) = self.apr_angles {
            for x in [a, b] {
                if !(x > -2.0 * PI && x <= 2.0 * PI) {
                    return Err(Error::InvalidConfig(format!(
                        "angle {x} outside (-2pi, 2pi]"
                    )));
                }
            }
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "damping {} outside (0, 1]",
                self.damping
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankResult {
    pub ranking: ProbabilityVector,
    /// Register-2 distributions for `t = 0..=T`, when requested.
    pub per_step: Option<Vec<ProbabilityVector>>,
}

/// Column-normalizes `adjacency` (entry `(j, i)` is a link i -> j), patches
/// dangling columns to uniform, then damps towards the uniform matrix.
pub fn build_google_matrix(adjacency: &SquareMatrix<f64>, damping: f64) -> Result<TransitionMatrix> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "damping {damping} outside (0, 1]"
        )));
    }
    let n = adjacency.n();
    for col in 0..n {
        for row in 0..n {
            let value = adjacency[(row, col)];
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeEntry { row, col, value });
            }
        }
    }
    let uniform = 1.0 / n as f64;
    let teleport = (1.0 - damping) / n as f64;
    let mut out = adjacency.clone();
    for col in out.columns_mut() {
        let sum: f64 = col.iter().sum();
        if sum == 0.0 {
            col.fill(uniform);
        } else {
            col.iter_mut()
                .for_each(|x| *x = damping * (*x / sum) + teleport);
        }
    }
    TransitionMatrix::new(out, ValidationPolicy::Strict)
}

/// `S R(theta1) S R(theta2)` over a shared Psi.
pub fn pagerank_unitary(g: &TransitionMatrix, angles: Option<(f64, f64)>) -> Result<UnitaryPipeline> {
    let (t1, t2) = angles.unwrap_or((PI, PI));
    let psi = Arc::new(build_psi_matrix(g, None)?);
    UnitaryPipeline::new(vec![
        Operator::Swap,
        ReflectionOperator::with_angle(psi.clone(), t1).into(),
        Operator::Swap,
        ReflectionOperator::with_angle(psi, t2).into(),
    ])
}

/// Time-averaged register-2 distribution of `W^t` applied to the equal
/// superposition of the `|psi_i>`.
pub fn quantum_pagerank(g: &TransitionMatrix, cfg: &PageRankConfig) -> Result<PageRankResult> {
    cfg.validate()?;
    let w = pagerank_unitary(g, cfg.apr_angles)?;
    let psi = build_psi_matrix(g, None)?;
    let n = g.n();
    let mut total = vec![0.0; n];
    let mut trace = cfg.keep_trace.then(|| Vec::with_capacity(cfg.steps + 1));
    evolve_observed(
        initial_superposition(&psi),
        &w,
        cfg.steps,
        Readout::Second,
        |t, snap| {
            let p = snap.second.expect("register 2 measured");
            if t > 0 || cfg.include_t0 {
                for (acc, x) in total.iter_mut().zip(p.values()) {
                    *acc += x;
                }
            }
            if let Some(trace) = trace.as_mut() {
                trace.push(p);
            }
        },
    )?;
    let count = (cfg.steps + usize::from(cfg.include_t0)) as f64;
    total.iter_mut().for_each(|x| *x /= count);
    Ok(PageRankResult {
        ranking: ProbabilityVector::from_trusted(total),
        per_step: trace,
    })
}

/// Power iteration from the uniform vector; also returns the number of
/// products taken.
pub fn power_iteration(
    g: &TransitionMatrix,
    tol: f64,
    max_iterations: usize,
) -> Result<(ProbabilityVector, usize)> {
    let mut p = ProbabilityVector::uniform(g.n());
    for k in 1..=max_iterations {
        let next = classical_step(g, &p)?;
        let change: f64 = next
            .values()
            .iter()
            .zip(p.values())
            .map(|(a, b)| (a - b).abs())
            .sum();
        p = next;
        if change < tol {
            return Ok((p, k));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
    })
}

pub fn classical_pagerank(g: &TransitionMatrix, tol: f64) -> Result<ProbabilityVector> {
    power_iteration(g, tol, MAX_POWER_ITERATIONS).map(|(p, _)| p)
}

/// `(node, score)` pairs by descending score, ties by node index.
pub fn ranked_nodes(ranking: &ProbabilityVector) -> Vec<(usize, f64)> {
    let mut nodes: Vec<(usize, f64)> = ranking.values().iter().copied().enumerate().collect();
    nodes.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    nodes
}

/// Register-2 trace of an arbitrary pipeline, for comparison with
/// [`quantum_pagerank`].
pub fn register_two_trace(
    g: &TransitionMatrix,
    u: &UnitaryPipeline,
    steps: usize,
) -> Result<Vec<ProbabilityVector>> {
    let psi = build_psi_matrix(g, None)?;
    let mut out = Vec::with_capacity(steps + 1);
    evolve_observed(initial_superposition(&psi), u, steps, Register::Second.into(), |_, s| {
        out.extend(s.second)
    })?;
    Ok(out)
}
