//! Brute-force N^2 x N^2 operators and flattened-vector evolution.
//!
//! This is the ground truth for small graphs. It builds every operator from
//! its definition on explicit flattened vectors (index `N*i + j` for
//! `|i>_1 |j>_2`) and shares no kernel with the matrix-state path.

use num_complex::Complex64;

use crate::dense::SquareMatrix;
use crate::error::{Error, Result};
use crate::graph::TransitionMatrix;
use crate::operators::PhaseMatrix;
use crate::state::Register;

/// Largest N for which dense operators are built unless overridden.
pub const DEFAULT_NODE_CAP: usize = 32;

/// An explicit operator on the N^2-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    entries: SquareMatrix<Complex64>,
}

impl DenseOperator {
    pub fn identity(dim: usize) -> Self {
        DenseOperator {
            entries: SquareMatrix::from_fn(dim, |r, c| {
                Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.n()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(row, col)
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        let dim = self.dim();
        if rhs.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rhs.dim(),
            });
        }
        let mut out = SquareMatrix::zeros(dim);
        for col in 0..dim {
            for k in 0..dim {
                let b = rhs.entries[(k, col)];
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for row in 0..dim {
                    out[(row, col)] += self.entries[(row, k)] * b;
                }
            }
        }
        Ok(DenseOperator { entries: out })
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            entries: SquareMatrix::from_fn(self.dim(), |r, c| self.entries[(c, r)].conj()),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.dim();
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (col, &x) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.entries.column(col)) {
                *o += a * x;
            }
        }
        Ok(out)
    }

    /// Largest entry of `|M^dagger M - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.adjoint().mul(self).expect("same dimension");
        max_abs_diff(&product, &DenseOperator::identity(self.dim()))
    }
}

pub fn max_abs_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
    a.entries
        .as_slice()
        .iter()
        .zip(b.entries.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Product of operators in operator notation: the last element acts first.
pub fn dense_product(ops: &[DenseOperator]) -> Result<DenseOperator> {
    let (first, rest) = ops.split_first().ok_or(Error::EmptyPipeline)?;
    rest.iter().try_fold(first.clone(), |acc, op| acc.mul(op))
}

/// Dense-operator builder with a cap on the node count.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceOracle {
    cap: usize,
}

impl Default for ReferenceOracle {
    fn default() -> Self {
        ReferenceOracle {
            cap: DEFAULT_NODE_CAP,
        }
    }
}

impl ReferenceOracle {
    /// Lifts the node cap; dense operators cost 16 N^4 bytes.
    pub fn uncapped() -> Self {
        ReferenceOracle { cap: usize::MAX }
    }

    pub fn with_cap(cap: usize) -> Self {
        ReferenceOracle { cap }
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.cap {
            return Err(Error::CapExceeded { n, cap: self.cap });
        }
        Ok(())
    }

    /// `(1 - e^{i angle}) sum_i |psi_i><psi_i| - 1` from explicit `|psi_i>`.
    pub fn reflection(
        &self,
        g: &TransitionMatrix,
        theta: Option<&PhaseMatrix>,
        angle: f64,
    ) -> Result<DenseOperator> {
        let n = g.n();
        self.check(n)?;
        if let Some(t) = theta {
            if t.n() != n {
                return Err(Error::ShapeMismatch {
                    expected: n,
                    found: t.n(),
                });
            }
        }
        let vectors: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                let mut v = vec![Complex64::new(0.0, 0.0); n * n];
                for k in 0..n {
                    let phase = theta.map_or(0.0, |t| t.get(i, k));
                    v[n * i + k] = Complex64::from_polar(g.get(k, i).sqrt(), phase);
                }
                v
            })
            .collect();
        Ok(reflection_from_vectors(&vectors, angle))
    }

    /// `|i>_1 |j>_2 -> |j>_1 |i>_2`.
    pub fn swap(&self, n: usize) -> Result<DenseOperator> {
        self.check(n)?;
        let dim = n * n;
        let mut entries = SquareMatrix::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                entries[(n * j + i, n * i + j)] = Complex64::new(1.0, 0.0);
            }
        }
        Ok(DenseOperator { entries })
    }

    /// Diagonal phase oracle on one register.
    pub fn oracle(
        &self,
        n: usize,
        marked: &[usize],
        register: Register,
        angle: f64,
    ) -> Result<DenseOperator> {
        self.check(n)?;
        if let Some(&index) = marked.iter().find(|&&m| m >= n) {
            return Err(Error::IndexOutOfRange { index, n });
        }
        let mut op = DenseOperator::identity(n * n);
        let phase = Complex64::from_polar(1.0, angle);
        for i in 0..n {
            for j in 0..n {
                let node = match register {
                    Register::First => i,
                    Register::Second => j,
                };
                if marked.contains(&node) {
                    op.entries[(n * i + j, n * i + j)] = phase;
                }
            }
        }
        Ok(op)
    }
}

/// `(1 - e^{i angle}) sum |v><v| - 1` for the given vectors.
pub fn reflection_from_vectors(vectors: &[Vec<Complex64>], angle: f64) -> DenseOperator {
    let dim = vectors.first().map_or(0, Vec::len);
    let weight = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, angle);
    let mut op = DenseOperator::identity(dim);
    for entry in op.entries.as_mut_slice() {
        *entry = -*entry;
    }
    for v in vectors {
        for col in 0..dim {
            if v[col] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let right = weight * v[col].conj();
            for row in 0..dim {
                op.entries[(row, col)] += v[row] * right;
            }
        }
    }
    op
}

pub fn dense_reflection(
    g: &TransitionMatrix,
    theta: Option<&PhaseMatrix>,
    angle: f64,
) -> Result<DenseOperator> {
    ReferenceOracle::default().reflection(g, theta, angle)
}

pub fn dense_swap(n: usize) -> Result<DenseOperator> {
    ReferenceOracle::default().swap(n)
}

pub fn dense_oracle_operator(
    n: usize,
    marked: &[usize],
    register: Register,
    angle: f64,
) -> Result<DenseOperator> {
    ReferenceOracle::default().oracle(n, marked, register, angle)
}

/// `U^t v` by t successive products.
pub fn dense_evolve(u: &DenseOperator, v: &[Complex64], steps: usize) -> Result<Vec<Complex64>> {
    let mut out = v.to_vec();
    if out.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.len(),
        });
    }
    for _ in 0..steps {
        out = u.apply(&out)?;
    }
    Ok(out)
}

/// Register-k distribution of a flattened state.
pub fn dense_measure(v: &[Complex64], n: usize, register: Register) -> Vec<f64> {
    let mut p = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let node = match register {
                Register::First => i,
                Register::Second => j,
            };
            p[node] += v[n * i + j].norm_sqr();
        }
    }
    p
}

/// Per-step distributions `measure(U^k v)` for `k = 0..=steps`.
pub fn dense_trace(
    u: &DenseOperator,
    v: &[Complex64],
    n: usize,
    steps: usize,
    register: Register,
) -> Result<Vec<Vec<f64>>> {
    let mut state = v.to_vec();
    let mut trace = vec![dense_measure(&state, n, register)];
    for _ in 0..steps {
        state = u.apply(&state)?;
        trace.push(dense_measure(&state, n, register));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ValidationPolicy;
    use rand::SeedableRng;
    use std::f64::consts::PI;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cycle3() -> TransitionMatrix {
        TransitionMatrix::from_rows(
            &[[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]],
            ValidationPolicy::Strict,
        )
        .unwrap()
    }

    fn diagonal(op: &DenseOperator) -> Vec<Complex64> {
        (0..op.dim()).map(|i| op.get(i, i)).collect()
    }

    #[test]
    fn identity_graph_reflection_is_diagonal() {
        let g = TransitionMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]], ValidationPolicy::Strict)
            .unwrap();
        let r = dense_reflection(&g, None, PI).unwrap();
        let expected = [1.0, -1.0, -1.0, 1.0];
        for row in 0..4 {
            for col in 0..4 {
                let e = if row == col { expected[row] } else { 0.0 };
                assert!((r.get(row, col) - c(e)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_phases_match_absent_phases() {
        let g = cycle3();
        let a = dense_reflection(&g, None, PI).unwrap();
        let b = dense_reflection(&g, Some(&PhaseMatrix::zeros(3)), PI).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reflection_squares_to_identity() {
        let r = dense_reflection(&cycle3(), None, PI).unwrap();
        let sq = r.mul(&r).unwrap();
        assert!(max_abs_diff(&sq, &DenseOperator::identity(9)) < 1e-12);
        assert!(r.unitarity_defect() < 1e-12);
        assert!(max_abs_diff(&r, &r.adjoint()) < 1e-12);
    }

    #[test]
    fn swap_permutes_indices() {
        let s = dense_swap(2).unwrap();
        assert_eq!(diagonal(&s), vec![c(1.0), c(0.0), c(0.0), c(1.0)]);
        assert_eq!(s.get(1, 2), c(1.0));
        assert_eq!(s.get(2, 1), c(1.0));
        assert_eq!(s.mul(&s).unwrap(), DenseOperator::identity(4));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(
            dense_oracle_operator(3, &[], Register::First, PI).unwrap(),
            DenseOperator::identity(9)
        );
        let q = dense_oracle_operator(2, &[1], Register::First, PI).unwrap();
        let d: Vec<f64> = diagonal(&q).iter().map(|z| z.re).collect();
        assert_eq!(d, vec![1.0, 1.0, -1.0, -1.0]);

        let all = [0, 1, 2];
        let q1 = dense_oracle_operator(3, &all, Register::First, PI).unwrap();
        let q2 = dense_oracle_operator(3, &all, Register::Second, PI).unwrap();
        let prod = q1.mul(&q2).unwrap();
        assert!(max_abs_diff(&prod, &DenseOperator::identity(9)) < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            dense_swap(33).unwrap_err(),
            Error::CapExceeded { n: 33, cap: 32 }
        );
        assert!(ReferenceOracle::with_cap(2).swap(3).is_err());
        assert!(ReferenceOracle::uncapped().swap(3).is_ok());
    }

    #[test]
    fn swapped_reflection_equals_reflection_over_swapped_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 4;
        let g = TransitionMatrix::random(n, &mut rng);
        let r = dense_reflection(&g, None, PI).unwrap();
        let s = dense_swap(n).unwrap();
        let srs = dense_product(&[s.clone(), r, s]).unwrap();
        // S|psi_i> = sum_k sqrt(G_ki) |k>_1 |i>_2
        let swapped: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                let mut v = vec![c(0.0); n * n];
                for k in 0..n {
                    v[n * k + i] = c(g.get(k, i).sqrt());
                }
                v
            })
            .collect();
        let rb = reflection_from_vectors(&swapped, PI);
        assert!(max_abs_diff(&srs, &rb) < 1e-12);
    }

    #[test]
    fn operators_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = TransitionMatrix::random(5, &mut rng);
        let theta = PhaseMatrix::new(SquareMatrix::from_fn(5, |r, c| 0.3 * r as f64 - 0.2 * c as f64))
            .unwrap();
        let ops = [
            dense_reflection(&g, Some(&theta), 0.9).unwrap(),
            dense_reflection(&g, None, PI).unwrap(),
            dense_swap(5).unwrap(),
            dense_oracle_operator(5, &[1, 3], Register::Second, 2.2).unwrap(),
        ];
        for op in &ops {
            assert!(op.unitarity_defect() < 1e-10);
        }
        assert!(dense_product(&ops).unwrap().unitarity_defect() < 1e-10);
    }

    #[test]
    fn evolve_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let g = TransitionMatrix::random(4, &mut rng);
        let u = dense_product(&[dense_swap(4).unwrap(), dense_reflection(&g, None, PI).unwrap()])
            .unwrap();
        let mut v = vec![c(0.0); 16];
        v[5] = c(1.0);
        assert_eq!(dense_evolve(&u, &v, 0).unwrap(), v);
        let mut state = v;
        for _ in 0..20 {
            state = dense_evolve(&u, &state, 1).unwrap();
            let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert!(dense_evolve(&u, &[c(1.0)], 1).is_err());
    }
}
