//! Column-stochastic transition matrices and the classical walk they drive.

use rand::distr::Open01;
use rand::Rng;

use crate::dense::SquareMatrix;
use crate::error::{Error, Result};

/// Allowed deviation of a column sum from 1 for an input matrix.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-8;

/// Allowed deviation of a probability vector's sum from 1.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValidationPolicy {
    /// Accept only matrices whose columns already sum to 1.
    #[default]
    Strict,
    /// Divide each column by its sum before validating.
    Renormalize,
}

impl std::str::FromStr for ValidationPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "strict" => Ok(ValidationPolicy::Strict),
            "renormalize" => Ok(ValidationPolicy::Renormalize),
            other => Err(format!("unknown policy `{other}` (strict|renormalize)")),
        }
    }
}

/// An N x N column-stochastic matrix G; `G[(j, i)]` is the probability of
/// jumping from node i to node j.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    entries: SquareMatrix<f64>,
}

impl TransitionMatrix {
    pub fn new(raw: SquareMatrix<f64>, policy: ValidationPolicy) -> Result<Self> {
        validate_transition_matrix(raw, policy)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], policy: ValidationPolicy) -> Result<Self> {
        validate_transition_matrix(SquareMatrix::from_rows(rows)?, policy)
    }

    /// Dense random matrix: entries uniform on (0, 1), then each column
    /// divided by its sum.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut entries = SquareMatrix::from_fn(n, |_, _| rng.sample::<f64, _>(Open01));
        for col in entries.columns_mut() {
            let sum: f64 = col.iter().sum();
            col.iter_mut().for_each(|x| *x /= sum);
        }
        TransitionMatrix { entries }
    }

    /// Skips validation; the caller guarantees stochasticity.
    pub(crate) fn from_trusted(entries: SquareMatrix<f64>) -> Self {
        TransitionMatrix { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.n()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries.get(row, col)
    }

    pub fn matrix(&self) -> &SquareMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> SquareMatrix<f64> {
        self.entries
    }

    /// Relabels nodes: node `i` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        let mut entries = SquareMatrix::zeros(n);
        for col in 0..n {
            for row in 0..n {
                entries[(perm[row], perm[col])] = self.entries[(row, col)];
            }
        }
        TransitionMatrix { entries }
    }
}

/// Checks (and under [`ValidationPolicy::Renormalize`] repairs) a raw matrix.
///
/// Zero columns are rejected under both policies.
pub fn validate_transition_matrix(
    mut raw: SquareMatrix<f64>,
    policy: ValidationPolicy,
) -> Result<TransitionMatrix> {
    let n = raw.n();
    for col in 0..n {
        for row in 0..n {
            let value = raw[(row, col)];
            if value < 0.0 {
                return Err(Error::NegativeEntry { row, col, value });
            }
        }
    }
    for (col, column) in raw.columns_mut().enumerate() {
        let sum: f64 = column.iter().sum();
        if sum == 0.0 {
            return Err(Error::ZeroColumn { col });
        }
        if policy == ValidationPolicy::Renormalize && sum.is_finite() {
            column.iter_mut().for_each(|x| *x /= sum);
        }
    }
    for (col, column) in raw.columns().enumerate() {
        let sum: f64 = column.iter().sum();
        // `!(a <= b)` so that NaN sums are rejected too.
        if !((sum - 1.0).abs() <= STOCHASTIC_TOLERANCE) {
            return Err(Error::NotStochastic {
                col,
                sum,
                tolerance: STOCHASTIC_TOLERANCE,
            });
        }
    }
    Ok(TransitionMatrix { entries: raw })
}

/// A probability distribution over the N nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    values: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::InvalidProbabilityVector(format!(
                "entry {i} is {v}"
            )));
        }
        let sum: f64 = values.iter().sum();
        if !((sum - 1.0).abs() <= PROBABILITY_TOLERANCE) {
            return Err(Error::InvalidProbabilityVector(format!(
                "entries sum to {sum}"
            )));
        }
        Ok(ProbabilityVector { values })
    }

    pub fn uniform(n: usize) -> Self {
        ProbabilityVector {
            values: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on `node`.
    pub fn basis(n: usize, node: usize) -> Self {
        let mut values = vec![0.0; n];
        values[node] = 1.0;
        ProbabilityVector { values }
    }

    /// For vectors that are valid by construction.
    pub(crate) fn from_trusted(values: Vec<f64>) -> Self {
        ProbabilityVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// One step of the classical walk, `G * p`.
pub fn classical_step(g: &TransitionMatrix, p: &ProbabilityVector) -> Result<ProbabilityVector> {
    if g.n() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: p.len(),
        });
    }
    let mut out = vec![0.0; g.n()];
    for (column, &weight) in g.entries.columns().zip(p.values()) {
        if weight == 0.0 {
            continue;
        }
        for (o, &gji) in out.iter_mut().zip(column) {
            *o += gji * weight;
        }
    }
    Ok(ProbabilityVector::from_trusted(out))
}

/// `[p0, G p0, ..., G^t p0]`.
pub fn classical_walk(
    g: &TransitionMatrix,
    p0: &ProbabilityVector,
    steps: usize,
) -> Result<Vec<ProbabilityVector>> {
    if g.n() != p0.len() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: p0.len(),
        });
    }
    let mut out = Vec::with_capacity(steps + 1);
    out.push(p0.clone());
    for k in 0..steps {
        let next = classical_step(g, &out[k])?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn swap2() -> TransitionMatrix {
        TransitionMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]], ValidationPolicy::Strict).unwrap()
    }

    fn cycle3() -> TransitionMatrix {
        TransitionMatrix::from_rows(
            &[[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]],
            ValidationPolicy::Strict,
        )
        .unwrap()
    }

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn strict_accepts_stochastic_matrices_unchanged() {
        let g = swap2();
        assert_eq!(g.matrix().rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let g = TransitionMatrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]], ValidationPolicy::Strict)
            .unwrap();
        assert_eq!(g.get(1, 0), 0.5);
    }

    #[test]
    fn renormalize_divides_columns() {
        let g = TransitionMatrix::from_rows(&[[1.0, 2.0], [1.0, 2.0]], ValidationPolicy::Renormalize)
            .unwrap();
        assert_eq!(g.matrix().rows(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    }

    #[test]
    fn renormalize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let raw = SquareMatrix::from_fn(12, |_, _| rng.random_range(0.0..5.0));
        let once = validate_transition_matrix(raw, ValidationPolicy::Renormalize).unwrap();
        let twice =
            validate_transition_matrix(once.matrix().clone(), ValidationPolicy::Renormalize)
                .unwrap();
        for (a, b) in once.matrix().as_slice().iter().zip(twice.matrix().as_slice()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn validation_errors() {
        let err = TransitionMatrix::from_rows(&[[0.9, 0.5], [0.0, 0.5]], ValidationPolicy::Strict)
            .unwrap_err();
        assert!(matches!(err, Error::NotStochastic { col: 0, .. }));

        let err = TransitionMatrix::from_rows(&[[1.5, 0.5], [-0.5, 0.5]], ValidationPolicy::Strict)
            .unwrap_err();
        assert!(matches!(err, Error::NegativeEntry { row: 1, col: 0, .. }));

        for policy in [ValidationPolicy::Strict, ValidationPolicy::Renormalize] {
            let err = TransitionMatrix::from_rows(&[[0.0, 0.5], [0.0, 0.5]], policy).unwrap_err();
            assert_eq!(err, Error::ZeroColumn { col: 0 });
        }

        let rows: Vec<Vec<f64>> = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        assert!(matches!(
            TransitionMatrix::from_rows(&rows, ValidationPolicy::Strict),
            Err(Error::NonSquare { .. })
        ));

        let err = TransitionMatrix::from_rows(&[[f64::NAN, 0.5], [1.0, 0.5]], ValidationPolicy::Strict)
            .unwrap_err();
        assert!(matches!(err, Error::NotStochastic { col: 0, .. }));
    }

    #[test]
    fn strict_tolerance_boundary() {
        let ok = [[0.5 + 5e-9, 0.5], [0.5, 0.5]];
        assert!(TransitionMatrix::from_rows(&ok, ValidationPolicy::Strict).is_ok());
        let bad = [[0.5 + 5e-8, 0.5], [0.5, 0.5]];
        assert!(TransitionMatrix::from_rows(&bad, ValidationPolicy::Strict).is_err());
    }

    #[test]
    fn classical_step_examples() {
        assert_eq!(classical_step(&swap2(), &pv(&[1.0, 0.0])).unwrap().values(), &[0.0, 1.0]);
        let id = TransitionMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]], ValidationPolicy::Strict)
            .unwrap();
        assert_eq!(classical_step(&id, &pv(&[0.3, 0.7])).unwrap().values(), &[0.3, 0.7]);
        assert_eq!(
            classical_step(&cycle3(), &pv(&[1.0, 0.0, 0.0])).unwrap().values(),
            &[0.0, 0.5, 0.5]
        );
        assert!(matches!(
            classical_step(&cycle3(), &pv(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn classical_walk_examples() {
        let trace = classical_walk(&swap2(), &pv(&[1.0, 0.0]), 3).unwrap();
        let got: Vec<&[f64]> = trace.iter().map(|p| p.values()).collect();
        assert_eq!(got, vec![&[1.0, 0.0][..], &[0.0, 1.0], &[1.0, 0.0], &[0.0, 1.0]]);

        let p0 = pv(&[0.2, 0.8]);
        assert_eq!(classical_walk(&swap2(), &p0, 0).unwrap(), vec![p0]);

        let trace = classical_walk(&cycle3(), &pv(&[1.0, 0.0, 0.0]), 20).unwrap();
        for &x in trace[20].values() {
            assert!((x - 1.0 / 3.0).abs() < 1e-4);
        }
    }

    #[test]
    fn random_matrices_are_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = TransitionMatrix::random(50, &mut rng);
        assert!(validate_transition_matrix(g.matrix().clone(), ValidationPolicy::Strict).is_ok());
        assert!(g.matrix().as_slice().iter().all(|&x| x > 0.0));
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
        assert!(ProbabilityVector::new(vec![f64::NAN, 1.0]).is_err());
    }
}
