//! Bipartite pure states stored as N x N matrices.
//!
//! A state `sum a_ij |i>_1 |j>_2` is held as the matrix `Phi` with
//! `Phi[(j, i)] = a_ij`: the column index is the first register and the
//! row index the second. In column-major storage this makes the matrix
//! buffer identical to the flattened vector indexed by `N*i + j`.

use log::warn;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dense::SquareMatrix;
use crate::error::{Error, Result};
use crate::operators::PsiMatrix;

/// Inputs whose norm differs from 1 by more than this are rescaled.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Norms below this cannot be normalized.
pub const ZERO_NORM: f64 = 1e-14;

/// One of the two quantum registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Register {
    First,
    Second,
}

impl Register {
    pub fn index(self) -> u8 {
        match self {
            Register::First => 1,
            Register::Second => 2,
        }
    }
}

impl std::str::FromStr for Register {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "1" => Ok(Register::First),
            "2" => Ok(Register::Second),
            other => Err(format!("register must be 1 or 2, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixState {
    entries: SquareMatrix<Complex64>,
}

impl MatrixState {
    /// Wraps a matrix as-is, without any norm check.
    pub fn from_matrix(entries: SquareMatrix<Complex64>) -> Self {
        MatrixState { entries }
    }

    /// The product state `|first>_1 |second>_2`.
    pub fn basis(n: usize, first: usize, second: usize) -> Self {
        let mut entries = SquareMatrix::zeros(n);
        entries[(second, first)] = Complex64::new(1.0, 0.0);
        MatrixState { entries }
    }

    /// Haar-like random unit state (normalized complex Gaussian entries).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let entries = SquareMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let mut state = MatrixState { entries };
        let norm = state.norm();
        state.scale(1.0 / norm);
        state
    }

    pub fn n(&self) -> usize {
        self.entries.n()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(row, col)
    }

    /// Amplitude `a_ij` of `|i>_1 |j>_2`.
    pub fn amplitude(&self, first: usize, second: usize) -> Complex64 {
        self.entries.get(second, first)
    }

    pub fn matrix(&self) -> &SquareMatrix<Complex64> {
        &self.entries
    }

    pub fn matrix_mut(&mut self) -> &mut SquareMatrix<Complex64> {
        &mut self.entries
    }

    pub fn into_matrix(self) -> SquareMatrix<Complex64> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Frobenius norm, equal to the 2-norm of the flattened state.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Frobenius inner product `<self|other>`.
    pub fn inner(&self, other: &MatrixState) -> Complex64 {
        self.entries
            .as_slice()
            .iter()
            .zip(other.entries.as_slice())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&mut self, factor: f64) {
        self.entries.as_mut_slice().iter_mut().for_each(|z| *z *= factor);
    }

    pub fn max_abs_diff(&self, other: &MatrixState) -> f64 {
        self.entries
            .as_slice()
            .iter()
            .zip(other.entries.as_slice())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Reshapes a flattened state (component `N*i + j` is `a_ij`) into its matrix
/// form, normalizing it if needed.
pub fn vector_to_matrix(v: &[Complex64]) -> Result<MatrixState> {
    vector_to_matrix_with(v, true)
}

/// As [`vector_to_matrix`]; with `normalize == false` the amplitudes are kept
/// verbatim, which is useful for checking unnormalized algebra.
pub fn vector_to_matrix_with(v: &[Complex64], normalize: bool) -> Result<MatrixState> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() {
        return Err(Error::NotPerfectSquare { len: v.len() });
    }
    let mut state = MatrixState {
        entries: SquareMatrix::from_column_major(n, v.to_vec())?,
    };
    if normalize {
        let norm = state.norm();
        if norm < ZERO_NORM {
            return Err(Error::ZeroNorm { norm });
        }
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            warn!("input state has norm {norm}; normalizing");
            state.scale(1.0 / norm);
        }
    }
    Ok(state)
}

/// Inverse of [`vector_to_matrix`].
pub fn matrix_to_vector(phi: &MatrixState) -> Vec<Complex64> {
    phi.entries.as_slice().to_vec()
}

/// The state `|psi_i>`: column `i` of Psi, zeros elsewhere.
pub fn psi_state(psi: &PsiMatrix, i: usize) -> Result<MatrixState> {
    let n = psi.n();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let mut entries = SquareMatrix::zeros(n);
    for (row, z) in entries.column_mut(i).iter_mut().enumerate() {
        *z = psi.get(row, i);
    }
    Ok(MatrixState { entries })
}

/// Equal superposition of all `|psi_i>`, i.e. `Psi / sqrt(N)`.
pub fn initial_superposition(psi: &PsiMatrix) -> MatrixState {
    let n = psi.n();
    let root = (n as f64).sqrt();
    let entries = SquareMatrix::from_fn(n, |row, col| psi.get(row, col) / root);
    MatrixState { entries }
}

/// A stack of equally sized states evolved under the same unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBatch {
    states: Vec<MatrixState>,
}

impl StateBatch {
    pub fn new(states: Vec<MatrixState>) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptyBatch)?.n();
        if let Some(bad) = states.iter().find(|s| s.n() != first) {
            return Err(Error::HeterogeneousBatch {
                expected: first,
                found: bad.n(),
            });
        }
        Ok(StateBatch { states })
    }

    /// All `|psi_i>` states of `psi`.
    pub fn psi_states(psi: &PsiMatrix) -> Self {
        let states = (0..psi.n())
            .map(|i| psi_state(psi, i).expect("index in range"))
            .collect();
        StateBatch { states }
    }

    pub fn n(&self) -> usize {
        self.states[0].n()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[MatrixState] {
        &self.states
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MatrixState> {
        self.states.iter()
    }

    pub fn into_states(self) -> Vec<MatrixState> {
        self.states
    }
}
