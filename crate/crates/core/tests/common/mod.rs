#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use qwalk::oracle::{dense_product, DenseOperator, ReferenceOracle};
use qwalk::{
    build_psi_matrix, matrix_to_vector, MatrixState, MeasurementResult, Operator, OracleOperator,
    PhaseMatrix, ReflectionOperator, Register, SquareMatrix, TransitionMatrix, UnitaryPipeline,
    ValidationPolicy,
};
use rand::Rng;

/// One operator of a random pipeline, before binding.
#[derive(Debug, Clone)]
pub enum OpSpec {
    Swap,
    Reflection(Option<f64>),
    Oracle(Register, Vec<usize>, Option<f64>),
}

pub fn random_angle<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-2.0 * PI..2.0 * PI)
}

/// Random column-stochastic matrix with roughly a third of its entries zero.
pub fn random_sparse_graph<R: Rng>(n: usize, rng: &mut R) -> TransitionMatrix {
    let mut m = SquareMatrix::from_fn(n, |_, _| {
        if rng.random_bool(0.35) {
            0.0
        } else {
            rng.random_range(0.01..1.0)
        }
    });
    for col in 0..n {
        if m.column(col).iter().all(|&x| x == 0.0) {
            m[(rng.random_range(0..n), col)] = 1.0;
        }
        let sum: f64 = m.column(col).iter().sum();
        m.column_mut(col).iter_mut().for_each(|x| *x /= sum);
    }
    TransitionMatrix::new(m, ValidationPolicy::Strict).unwrap()
}

pub fn random_phases<R: Rng>(n: usize, rng: &mut R) -> PhaseMatrix {
    PhaseMatrix::new(SquareMatrix::from_fn(n, |_, _| random_angle(rng))).unwrap()
}

pub fn random_ops<R: Rng>(n: usize, max_len: usize, rng: &mut R) -> Vec<OpSpec> {
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| match rng.random_range(0..7) {
            0 => OpSpec::Swap,
            1 => OpSpec::Reflection(None),
            2 => OpSpec::Reflection(Some(random_angle(rng))),
            k => {
                let register = if k % 2 == 1 {
                    Register::First
                } else {
                    Register::Second
                };
                let marked: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
                let angle = (k >= 5).then(|| random_angle(rng));
                OpSpec::Oracle(register, marked, angle)
            }
        })
        .collect()
}

/// The same pipeline as matrix-state operators and as one dense operator.
pub fn bind(
    g: &TransitionMatrix,
    theta: Option<&PhaseMatrix>,
    ops: &[OpSpec],
) -> (UnitaryPipeline, DenseOperator) {
    let n = g.n();
    let psi = Arc::new(build_psi_matrix(g, theta).unwrap());
    let oracle = ReferenceOracle::default();
    let mut fast = Vec::new();
    let mut dense = Vec::new();
    for op in ops {
        match op {
            OpSpec::Swap => {
                fast.push(Operator::Swap);
                dense.push(oracle.swap(n).unwrap());
            }
            OpSpec::Reflection(angle) => {
                let a = angle.unwrap_or(PI);
                fast.push(ReflectionOperator::with_angle(psi.clone(), a).into());
                dense.push(oracle.reflection(g, theta, a).unwrap());
            }
            OpSpec::Oracle(register, marked, angle) => {
                let a = angle.unwrap_or(PI);
                fast.push(OracleOperator::with_angle(marked.iter().copied(), *register, a).into());
                dense.push(oracle.oracle(n, marked, *register, a).unwrap());
            }
        }
    }
    (
        UnitaryPipeline::new(fast).unwrap(),
        dense_product(&dense).unwrap(),
    )
}

/// Largest entrywise gap between `result` and dense evolution of `phi0`.
pub fn trace_error(
    result: &MeasurementResult,
    dense: &DenseOperator,
    phi0: &MatrixState,
    steps: usize,
) -> f64 {
    let n = phi0.n();
    let v = matrix_to_vector(phi0);
    let mut worst: f64 = 0.0;
    for register in [Register::First, Register::Second] {
        let Some(trace) = result.trace(register) else {
            continue;
        };
        let expected = qwalk::oracle::dense_trace(dense, &v, n, steps, register).unwrap();
        for (got, want) in trace.iter().zip(&expected) {
            for (a, b) in got.values().iter().zip(want) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}
