//! Building-block operators acting directly on matrix states.
//!
//! Nothing here ever forms an N^2 x N^2 matrix. The reflection needs one
//! length-N coefficient vector of scratch, the swap is an in-place
//! transpose, and the oracle scales whole columns or rows.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dense::SquareMatrix;
use crate::error::{Error, Result};
use crate::graph::TransitionMatrix;
use crate::state::{MatrixState, Register};

/// Per-edge phase angles (radians) for the extended walk.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    angles: SquareMatrix<f64>,
}

impl PhaseMatrix {
    pub fn new(angles: SquareMatrix<f64>) -> Result<Self> {
        let n = angles.n();
        for col in 0..n {
            for row in 0..n {
                if !angles[(row, col)].is_finite() {
                    return Err(Error::NonFiniteAngle { row, col });
                }
            }
        }
        Ok(PhaseMatrix { angles })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    pub fn zeros(n: usize) -> Self {
        PhaseMatrix {
            angles: SquareMatrix::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.angles.n()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.angles.get(row, col)
    }

    pub fn matrix(&self) -> &SquareMatrix<f64> {
        &self.angles
    }
}

#[derive(Debug, Clone, PartialEq)]
enum PsiEntries {
    Real(SquareMatrix<f64>),
    Complex(SquareMatrix<Complex64>),
}

/// The matrix Psi whose column i holds the nonzero block of `|psi_i>`.
///
/// Stored in real arithmetic whenever every entry is real, which is always
/// the case without a phase matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiMatrix {
    entries: PsiEntries,
}

impl PsiMatrix {
    pub fn n(&self) -> usize {
        match &self.entries {
            PsiEntries::Real(m) => m.n(),
            PsiEntries::Complex(m) => m.n(),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        match &self.entries {
            PsiEntries::Real(m) => Complex64::new(m.get(row, col), 0.0),
            PsiEntries::Complex(m) => m.get(row, col),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.entries, PsiEntries::Real(_))
    }

    pub fn to_complex_matrix(&self) -> SquareMatrix<Complex64> {
        match &self.entries {
            PsiEntries::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            PsiEntries::Complex(m) => m.clone(),
        }
    }
}

/// `Psi[(i, j)] = exp(i * theta[(j, i)]) * sqrt(G[(i, j)])`.
///
/// Note the transpose on the phase matrix: `theta[(i, k)]` is the phase of
/// the edge from node i to node k.
pub fn build_psi_matrix(g: &TransitionMatrix, theta: Option<&PhaseMatrix>) -> Result<PsiMatrix> {
    let n = g.n();
    let roots = g.matrix().map(f64::sqrt);
    let Some(theta) = theta else {
        return Ok(PsiMatrix {
            entries: PsiEntries::Real(roots),
        });
    };
    if theta.n() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: theta.n(),
        });
    }
    let entries = SquareMatrix::from_fn(n, |row, col| {
        Complex64::from_polar(1.0, theta.get(col, row)) * roots[(row, col)]
    });
    if entries.as_slice().iter().all(|z| z.im == 0.0) {
        return Ok(PsiMatrix {
            entries: PsiEntries::Real(roots),
        });
    }
    Ok(PsiMatrix {
        entries: PsiEntries::Complex(entries),
    })
}

/// Overlaps `C_i = <psi_i|phi>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(pub Vec<Complex64>);

impl CoefficientVector {
    pub fn values(&self) -> &[Complex64] {
        &self.0
    }
}

fn check_shape(phi: &MatrixState, n: usize) -> Result<()> {
    if phi.n() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: phi.n(),
        });
    }
    Ok(())
}

/// `C_i = sum_k conj(Psi[(k, i)]) * Phi[(k, i)]`, one column dot product per
/// node.
pub fn projection_coefficients(phi: &MatrixState, psi: &PsiMatrix) -> Result<CoefficientVector> {
    check_shape(phi, psi.n())?;
    let coefficients = match &psi.entries {
        PsiEntries::Real(m) => m
            .columns()
            .zip(phi.matrix().columns())
            .map(|(p, f)| {
                p.iter().zip(f).fold(Complex64::new(0.0, 0.0), |acc, (&p, &f)| {
                    Complex64::new(acc.re + p * f.re, acc.im + p * f.im)
                })
            })
            .collect(),
        PsiEntries::Complex(m) => m
            .columns()
            .zip(phi.matrix().columns())
            .map(|(p, f)| p.iter().zip(f).map(|(p, f)| p.conj() * f).sum())
            .collect(),
    };
    Ok(CoefficientVector(coefficients))
}

/// The projection `Pi |phi>`: Psi with column i scaled by `C_i`.
pub fn parallel_component(phi: &MatrixState, psi: &PsiMatrix) -> Result<MatrixState> {
    let c = projection_coefficients(phi, psi)?;
    let n = psi.n();
    let entries = SquareMatrix::from_fn(n, |row, col| mul(psi.get(row, col), c.0[col]));
    Ok(MatrixState::from_matrix(entries))
}

/// Complex product that keeps exact zeros for real-by-complex factors.
#[inline]
fn mul(a: Complex64, b: Complex64) -> Complex64 {
    if a.im == 0.0 {
        Complex64::new(a.re * b.re, a.re * b.im)
    } else {
        a * b
    }
}

/// `R(theta) = (1 - e^{i theta}) Pi - 1`; `theta = pi` is the plain reflection
/// `2 Pi - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionOperator {
    psi: Arc<PsiMatrix>,
    angle: f64,
}

impl ReflectionOperator {
    pub fn new(psi: Arc<PsiMatrix>) -> Self {
        ReflectionOperator { psi, angle: PI }
    }

    pub fn with_angle(psi: Arc<PsiMatrix>, angle: f64) -> Self {
        ReflectionOperator { psi, angle }
    }

    pub fn from_graph(g: &TransitionMatrix, theta: Option<&PhaseMatrix>) -> Result<Self> {
        Ok(Self::new(Arc::new(build_psi_matrix(g, theta)?)))
    }

    pub fn psi(&self) -> &PsiMatrix {
        &self.psi
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn n(&self) -> usize {
        self.psi.n()
    }

    /// `1 - e^{i theta}`, exactly 2 for `theta == pi`.
    fn projector_weight(&self) -> Complex64 {
        if self.angle == PI {
            Complex64::new(2.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, self.angle)
        }
    }

    /// Reflects `phi` in place, one column at a time: column i only needs
    /// `C_i`, so each column is read once while it is still in cache.
    pub fn apply_in_place(&self, phi: &mut MatrixState) -> Result<()> {
        check_shape(phi, self.psi.n())?;
        let weight = self.projector_weight();
        let columns = phi.matrix_mut().columns_mut();
        match &self.psi.entries {
            PsiEntries::Real(m) => {
                for (f, p) in columns.zip(m.columns()) {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (z, &p) in f.iter().zip(p) {
                        re += p * z.re;
                        im += p * z.im;
                    }
                    let d = mul(weight, Complex64::new(re, im));
                    for (z, &p) in f.iter_mut().zip(p) {
                        *z = Complex64::new(p * d.re - z.re, p * d.im - z.im);
                    }
                }
            }
            PsiEntries::Complex(m) => {
                for (f, p) in columns.zip(m.columns()) {
                    let c: Complex64 = p.iter().zip(f.iter()).map(|(p, z)| p.conj() * z).sum();
                    let d = mul(weight, c);
                    for (z, &p) in f.iter_mut().zip(p) {
                        *z = p * d - *z;
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn apply_reflection(mut phi: MatrixState, r: &ReflectionOperator) -> Result<MatrixState> {
    r.apply_in_place(&mut phi)?;
    Ok(phi)
}

/// Register swap: a plain transpose of the matrix state.
pub fn apply_swap(mut phi: MatrixState) -> MatrixState {
    phi.matrix_mut().transpose_in_place();
    phi
}

/// Phase oracle `Q(theta)` on one register; `theta = pi` flips signs.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOperator {
    marked: BTreeSet<usize>,
    register: Register,
    angle: f64,
}

impl OracleOperator {
    pub fn new(marked: impl IntoIterator<Item = usize>, register: Register) -> Self {
        Self::with_angle(marked, register, PI)
    }

    pub fn with_angle(
        marked: impl IntoIterator<Item = usize>,
        register: Register,
        angle: f64,
    ) -> Self {
        OracleOperator {
            marked: marked.into_iter().collect(),
            register,
            angle,
        }
    }

    pub fn marked(&self) -> &BTreeSet<usize> {
        &self.marked
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    fn check_indices(&self, n: usize) -> Result<()> {
        match self.marked.iter().next_back() {
            Some(&index) if index >= n => Err(Error::IndexOutOfRange { index, n }),
            _ => Ok(()),
        }
    }

    pub fn apply_in_place(&self, phi: &mut MatrixState) -> Result<()> {
        let n = phi.n();
        self.check_indices(n)?;
        let flip = self.angle == PI;
        let phase = Complex64::from_polar(1.0, self.angle);
        let scale = |z: &mut Complex64| {
            if flip {
                *z = -*z;
            } else {
                *z *= phase;
            }
        };
        let m = phi.matrix_mut();
        match self.register {
            Register::First => {
                for &col in &self.marked {
                    m.column_mut(col).iter_mut().for_each(scale);
                }
            }
            Register::Second => {
                for column in m.columns_mut() {
                    for &row in &self.marked {
                        scale(&mut column[row]);
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn apply_oracle(mut phi: MatrixState, q: &OracleOperator) -> Result<MatrixState> {
    q.apply_in_place(&mut phi)?;
    Ok(phi)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Reflection(ReflectionOperator),
    Swap,
    Oracle(OracleOperator),
}

impl Operator {
    pub fn apply_in_place(&self, phi: &mut MatrixState) -> Result<()> {
        match self {
            Operator::Reflection(r) => r.apply_in_place(phi),
            Operator::Swap => {
                phi.matrix_mut().transpose_in_place();
                Ok(())
            }
            Operator::Oracle(q) => q.apply_in_place(phi),
        }
    }
}

impl From<ReflectionOperator> for Operator {
    fn from(r: ReflectionOperator) -> Self {
        Operator::Reflection(r)
    }
}

impl From<OracleOperator> for Operator {
    fn from(q: OracleOperator) -> Self {
        Operator::Oracle(q)
    }
}

/// A product of operators written in operator notation: `[S, R]` is `U = S R`,
/// so R acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPipeline {
    ops: Vec<Operator>,
    n: Option<usize>,
}

impl UnitaryPipeline {
    pub fn new(ops: Vec<Operator>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::EmptyPipeline);
        }
        let mut n = None;
        for op in &ops {
            if let Operator::Reflection(r) = op {
                match n {
                    None => n = Some(r.n()),
                    Some(expected) if expected != r.n() => {
                        return Err(Error::DimensionMismatch {
                            expected,
                            found: r.n(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        if let Some(n) = n {
            for op in &ops {
                if let Operator::Oracle(q) = op {
                    q.check_indices(n)?;
                }
            }
        }
        Ok(UnitaryPipeline { ops, n })
    }

    /// The coined step `U = S R` for `g`.
    pub fn szegedy(g: &TransitionMatrix) -> Result<Self> {
        let r = ReflectionOperator::from_graph(g, None)?;
        Self::new(vec![Operator::Swap, r.into()])
    }

    /// The two-reflection step `W = S R S R`.
    pub fn double_szegedy(g: &TransitionMatrix) -> Result<Self> {
        let r = ReflectionOperator::from_graph(g, None)?;
        Self::new(vec![Operator::Swap, r.clone().into(), Operator::Swap, r.into()])
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    /// Node count fixed by the pipeline's reflections, if it has any.
    pub fn n(&self) -> Option<usize> {
        self.n
    }

    /// The product `self * other` (other acts first).
    pub fn then_after(&self, other: &UnitaryPipeline) -> Result<Self> {
        let mut ops = self.ops.clone();
        ops.extend(other.ops.iter().cloned());
        Self::new(ops)
    }

    pub fn apply_in_place(&self, phi: &mut MatrixState) -> Result<()> {
        if let Some(n) = self.n {
            if phi.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: phi.n(),
                });
            }
        }
        for op in self.ops.iter().rev() {
            op.apply_in_place(phi)?;
        }
        Ok(())
    }
}

pub fn apply_pipeline(mut phi: MatrixState, u: &UnitaryPipeline) -> Result<MatrixState> {
    u.apply_in_place(&mut phi)?;
    Ok(phi)
}
