//! Semiclassical walks: `t_q` quantum steps, a measurement, then a reset to
//! `|psi_i>` at the measured node, repeated `t_c` times.
//!
//! The measurement-and-reset cycle is itself a Markov chain, so it is
//! captured by one column-stochastic matrix.

use crate::dense::SquareMatrix;
use crate::error::{Error, Result};
use crate::graph::{classical_walk, ProbabilityVector, TransitionMatrix, PROBABILITY_TOLERANCE};
use crate::operators::{build_psi_matrix, PhaseMatrix, PsiMatrix, UnitaryPipeline};
use crate::simulator::{chunked_map, register_weights};
use crate::state::{psi_state, Register};

/// Default memory budget for batched evaluation, in matrix states.
pub const DEFAULT_BUDGET_STATES: usize = 64;

/// Members to evaluate at once given a budget in complex entries.
pub fn batch_size_for_budget(n: usize, budget_entries: usize) -> usize {
    (budget_entries / (n * n).max(1)).clamp(1, n.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemiclassicalConfig {
    pub quantum_time: usize,
    pub classical_time: usize,
    /// `First` for class I walks, `Second` for class II.
    pub walk_class: Register,
    pub batch_size: usize,
}

impl SemiclassicalConfig {
    pub fn new(quantum_time: usize, walk_class: Register) -> Self {
        SemiclassicalConfig {
            quantum_time,
            classical_time: 0,
            walk_class,
            batch_size: DEFAULT_BUDGET_STATES,
        }
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size;
        self
    }

    pub fn with_classical_time(mut self, classical_time: usize) -> Self {
        self.classical_time = classical_time;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiclassicalMatrix {
    entries: SquareMatrix<f64>,
    quantum_time: usize,
    walk_class: Register,
}

impl SemiclassicalMatrix {
    pub fn n(&self) -> usize {
        self.entries.n()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries.get(row, col)
    }

    pub fn matrix(&self) -> &SquareMatrix<f64> {
        &self.entries
    }

    pub fn quantum_time(&self) -> usize {
        self.quantum_time
    }

    pub fn walk_class(&self) -> Register {
        self.walk_class
    }

    pub fn to_transition_matrix(&self) -> TransitionMatrix {
        TransitionMatrix::from_trusted(self.entries.clone())
    }
}

/// `kG^(t_q)` with reset states built from `g` without phases.
///
/// `u` is not checked against `g`; with a mismatched pair the columns are
/// still measured distributions, just of a different process.
pub fn build_semiclassical_matrix(
    g: &TransitionMatrix,
    u: &UnitaryPipeline,
    cfg: &SemiclassicalConfig,
) -> Result<SemiclassicalMatrix> {
    semiclassical_from_psi(&build_psi_matrix(g, None)?, u, cfg)
}

/// As [`build_semiclassical_matrix`] with phases on the reset states.
pub fn build_semiclassical_matrix_with_phases(
    g: &TransitionMatrix,
    theta: &PhaseMatrix,
    u: &UnitaryPipeline,
    cfg: &SemiclassicalConfig,
) -> Result<SemiclassicalMatrix> {
    semiclassical_from_psi(&build_psi_matrix(g, Some(theta))?, u, cfg)
}

pub fn semiclassical_from_psi(
    psi: &PsiMatrix,
    u: &UnitaryPipeline,
    cfg: &SemiclassicalConfig,
) -> Result<SemiclassicalMatrix> {
    let n = psi.n();
    if let Some(m) = u.n() {
        if m != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: m,
            });
        }
    }
    let columns = chunked_map(n, cfg.batch_size, |i| {
        let mut phi = psi_state(psi, i)?;
        for _ in 0..cfg.quantum_time {
            u.apply_in_place(&mut phi)?;
        }
        let column = register_weights(&phi, cfg.walk_class);
        let sum: f64 = column.iter().sum();
        if !((sum - 1.0).abs() <= PROBABILITY_TOLERANCE) {
            return Err(Error::BrokenUnitary { col: i, sum });
        }
        Ok(column)
    })?;
    let entries = SquareMatrix::from_column_major(n, columns.concat())?;
    Ok(SemiclassicalMatrix {
        entries,
        quantum_time: cfg.quantum_time,
        walk_class: cfg.walk_class,
    })
}

/// `[p0, sc p0, ..., sc^t_c p0]`.
pub fn semiclassical_walk(
    sc: &SemiclassicalMatrix,
    p0: &ProbabilityVector,
    classical_time: usize,
) -> Result<Vec<ProbabilityVector>> {
    classical_walk(&sc.to_transition_matrix(), p0, classical_time)
}
