//! Time-stepped evolution with a measurement after every step.
//!
//! Only the probabilities are kept; the state is updated in place, so a run
//! holds one matrix state no matter how many steps it takes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{ProbabilityVector, PROBABILITY_TOLERANCE};
use crate::operators::{PsiMatrix, UnitaryPipeline};
use crate::state::{MatrixState, Register, StateBatch};

/// A state whose norm differs from 1 by more than this cannot be measured.
pub const MEASURE_NORM_TOLERANCE: f64 = 1e-8;

/// Probability sums further than this from 1 are renormalized.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;

/// Ensemble members must be orthonormal within this.
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-8;

/// Which register(s) to read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Readout {
    First,
    Second,
    Both,
}

impl Readout {
    pub fn includes(self, register: Register) -> bool {
        matches!(
            (self, register),
            (Readout::Both, _)
                | (Readout::First, Register::First)
                | (Readout::Second, Register::Second)
        )
    }

    pub fn registers(self) -> &'static [Register] {
        match self {
            Readout::First => &[Register::First],
            Readout::Second => &[Register::Second],
            Readout::Both => &[Register::First, Register::Second],
        }
    }
}

impl From<Register> for Readout {
    fn from(r: Register) -> Self {
        match r {
            Register::First => Readout::First,
            Register::Second => Readout::Second,
        }
    }
}

impl std::str::FromStr for Readout {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "1" => Ok(Readout::First),
            "2" => Ok(Readout::Second),
            "both" => Ok(Readout::Both),
            other => Err(format!("expected 1, 2 or both, got `{other}`")),
        }
    }
}

/// Distributions measured at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub first: Option<ProbabilityVector>,
    pub second: Option<ProbabilityVector>,
}

impl Snapshot {
    pub fn get(&self, register: Register) -> Option<&ProbabilityVector> {
        match register {
            Register::First => self.first.as_ref(),
            Register::Second => self.second.as_ref(),
        }
    }
}

/// Per-step distributions, `per_step[0]` being the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementResult {
    readout: Readout,
    first: Vec<ProbabilityVector>,
    second: Vec<ProbabilityVector>,
}

impl MeasurementResult {
    fn empty(readout: Readout, steps: usize) -> Self {
        let cap = |r| if readout.includes(r) { steps + 1 } else { 0 };
        MeasurementResult {
            readout,
            first: Vec::with_capacity(cap(Register::First)),
            second: Vec::with_capacity(cap(Register::Second)),
        }
    }

    fn push(&mut self, snapshot: Snapshot) {
        self.first.extend(snapshot.first);
        self.second.extend(snapshot.second);
    }

    pub fn readout(&self) -> Readout {
        self.readout
    }

    /// Trace of one register, `None` if it was not measured.
    pub fn trace(&self, register: Register) -> Option<&[ProbabilityVector]> {
        if !self.readout.includes(register) {
            return None;
        }
        Some(match register {
            Register::First => &self.first,
            Register::Second => &self.second,
        })
    }

    /// Number of recorded instants (steps + 1).
    pub fn len(&self) -> usize {
        self.first.len().max(self.second.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn last(&self, register: Register) -> Option<&ProbabilityVector> {
        self.trace(register).and_then(<[_]>::last)
    }
}

/// `(register-1 sums, register-2 sums)` of `|Phi|^2`: column sums and row
/// sums, from one pass over the matrix.
fn raw_probabilities(phi: &MatrixState, readout: Readout) -> (Vec<f64>, Vec<f64>) {
    let n = phi.n();
    let want_first = readout.includes(Register::First);
    let want_second = readout.includes(Register::Second);
    let mut first = vec![0.0; if want_first { n } else { 0 }];
    let mut second = vec![0.0; if want_second { n } else { 0 }];
    for (col, column) in phi.matrix().columns().enumerate() {
        if want_second {
            let mut total = 0.0;
            for (acc, z) in second.iter_mut().zip(column) {
                let p = z.norm_sqr();
                *acc += p;
                total += p;
            }
            if want_first {
                first[col] = total;
            }
        } else {
            first[col] = column.iter().map(|z| z.norm_sqr()).sum();
        }
    }
    (first, second)
}

/// Unnormalized register distributions straight from `|Phi|^2`.
pub(crate) fn register_weights(phi: &MatrixState, register: Register) -> Vec<f64> {
    let (first, second) = raw_probabilities(phi, register.into());
    match register {
        Register::First => first,
        Register::Second => second,
    }
}

fn finish(mut p: Vec<f64>) -> Result<ProbabilityVector> {
    p.iter_mut().for_each(|x| *x = x.max(0.0));
    let sum: f64 = p.iter().sum();
    if !((sum.sqrt() - 1.0).abs() <= MEASURE_NORM_TOLERANCE) {
        return Err(Error::NotNormalized { norm: sum.sqrt() });
    }
    if (sum - 1.0).abs() > RENORMALIZE_THRESHOLD {
        p.iter_mut().for_each(|x| *x /= sum);
    }
    Ok(ProbabilityVector::from_trusted(p))
}

/// Distribution over the nodes when measuring `register`.
pub fn measure(phi: &MatrixState, register: Register) -> Result<ProbabilityVector> {
    finish(register_weights(phi, register))
}

/// Both registers from a single pass.
pub fn measure_both(phi: &MatrixState) -> Result<(ProbabilityVector, ProbabilityVector)> {
    let (first, second) = raw_probabilities(phi, Readout::Both);
    Ok((finish(first)?, finish(second)?))
}

pub fn snapshot(phi: &MatrixState, readout: Readout) -> Result<Snapshot> {
    let (first, second) = raw_probabilities(phi, readout);
    Ok(Snapshot {
        first: readout
            .includes(Register::First)
            .then(|| finish(first))
            .transpose()?,
        second: readout
            .includes(Register::Second)
            .then(|| finish(second))
            .transpose()?,
    })
}

/// Runs `steps` applications of `u`, handing each measurement to `sink`
/// (`sink(0, ..)` sees the initial state) and returning the final state.
pub fn evolve_observed(
    mut phi: MatrixState,
    u: &UnitaryPipeline,
    steps: usize,
    readout: Readout,
    mut sink: impl FnMut(usize, Snapshot),
) -> Result<MatrixState> {
    sink(0, snapshot(&phi, readout)?);
    for k in 1..=steps {
        u.apply_in_place(&mut phi)?;
        sink(k, snapshot(&phi, readout)?);
    }
    Ok(phi)
}

pub fn evolve(
    phi0: MatrixState,
    u: &UnitaryPipeline,
    steps: usize,
    readout: Readout,
) -> Result<MeasurementResult> {
    evolve_keep_state(phi0, u, steps, readout).map(|(result, _)| result)
}

/// As [`evolve`], also returning the final state.
pub fn evolve_keep_state(
    phi0: MatrixState,
    u: &UnitaryPipeline,
    steps: usize,
    readout: Readout,
) -> Result<(MeasurementResult, MatrixState)> {
    let mut result = MeasurementResult::empty(readout, steps);
    let last = evolve_observed(phi0, u, steps, readout, |_, s| result.push(s))?;
    Ok((result, last))
}

/// Maps `f` over `0..count`, `chunk_size` members at a time. Members of a
/// chunk run in parallel; output order is member order.
pub(crate) fn chunked_map<T, F>(count: usize, chunk_size: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if chunk_size == 0 {
        return Err(Error::BatchSizeZero);
    }
    let mut out = Vec::with_capacity(count);
    for start in (0..count).step_by(chunk_size) {
        let end = (start + chunk_size).min(count);
        if end - start == 1 {
            out.push(f(start)?);
        } else {
            let chunk: Result<Vec<T>> = (start..end).into_par_iter().map(&f).collect();
            out.extend(chunk?);
        }
    }
    Ok(out)
}

/// Evolves every member of `batch` independently, one at a time.
pub fn evolve_batch(
    batch: &StateBatch,
    u: &UnitaryPipeline,
    steps: usize,
    readout: Readout,
) -> Result<Vec<MeasurementResult>> {
    evolve_batch_chunked(batch, u, steps, readout, 1)
}

/// As [`evolve_batch`] with up to `chunk_size` members in flight, which costs
/// `chunk_size` matrix states of memory.
pub fn evolve_batch_chunked(
    batch: &StateBatch,
    u: &UnitaryPipeline,
    steps: usize,
    readout: Readout,
    chunk_size: usize,
) -> Result<Vec<MeasurementResult>> {
    if let Some(n) = u.n() {
        if batch.n() != n {
            return Err(Error::HeterogeneousBatch {
                expected: n,
                found: batch.n(),
            });
        }
    }
    let states = batch.states();
    chunked_map(states.len(), chunk_size, |k| {
        evolve(states[k].clone(), u, steps, readout)
    })
}

/// A diagonal mixed state `sum c_i |b_i><b_i|` over orthonormal `|b_i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStateEnsemble {
    members: StateBatch,
    weights: Vec<f64>,
}

impl MixedStateEnsemble {
    pub fn new(members: StateBatch, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != members.len() {
            return Err(Error::DimensionMismatch {
                expected: members.len(),
                found: weights.len(),
            });
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
            return Err(Error::WeightsNotNormalized(format!("weight {i} is {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if !((sum - 1.0).abs() <= PROBABILITY_TOLERANCE) {
            return Err(Error::WeightsNotNormalized(format!("weights sum to {sum}")));
        }
        let states = members.states();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate().skip(i) {
                let overlap = a.inner(b);
                let defect = if i == j {
                    (overlap.re - 1.0).hypot(overlap.im)
                } else {
                    overlap.norm()
                };
                if defect > ORTHONORMALITY_TOLERANCE {
                    return Err(Error::NotOrthonormal {
                        first: i,
                        second: j,
                        overlap: defect,
                    });
                }
            }
        }
        Ok(MixedStateEnsemble { members, weights })
    }

    /// The ensemble `sum c_i |psi_i><psi_i|`.
    pub fn over_psi_states(psi: &PsiMatrix, weights: Vec<f64>) -> Result<Self> {
        Self::new(StateBatch::psi_states(psi), weights)
    }

    pub fn members(&self) -> &StateBatch {
        &self.members
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Distributions of the mixed state: the weighted mean of the members'
/// pure-state results, accumulated one member at a time.
pub fn mixed_state_probabilities(
    ens: &MixedStateEnsemble,
    u: &UnitaryPipeline,
    steps: usize,
    readout: Readout,
) -> Result<MeasurementResult> {
    let n = ens.members.n();
    let registers = readout.registers();
    let mut acc: Vec<Vec<Vec<f64>>> = registers
        .iter()
        .map(|_| vec![vec![0.0; n]; steps + 1])
        .collect();
    for (member, &weight) in ens.members.iter().zip(&ens.weights) {
        if weight == 0.0 {
            continue;
        }
        evolve_observed(member.clone(), u, steps, readout, |k, snap| {
            for (slot, &register) in acc.iter_mut().zip(registers) {
                let p = snap.get(register).expect("measured register");
                for (a, &x) in slot[k].iter_mut().zip(p.values()) {
                    *a += weight * x;
                }
            }
        })?;
    }
    let mut result = MeasurementResult::empty(readout, steps);
    for (slot, &register) in acc.into_iter().zip(registers) {
        let trace = slot.into_iter().map(ProbabilityVector::from_trusted).collect();
        match register {
            Register::First => result.first = trace,
            Register::Second => result.second = trace,
        }
    }
    Ok(result)
}
