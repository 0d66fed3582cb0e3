//! Szegedy quantum walks on weighted directed graphs, simulated with
//! N x N matrix states instead of N^2-dimensional vectors.
//!
//! A walk is driven by a column-stochastic [`TransitionMatrix`]. Its quantum
//! version lives on two copies of the graph and is stored as an N x N
//! [`MatrixState`]; the reflection, swap and oracle operators all act on
//! that matrix directly, so memory and time per step are O(N^2).
//!
//! ```
//! use qwalk::{build_psi_matrix, evolve, initial_superposition, Readout, Register,
//!             TransitionMatrix, UnitaryPipeline, ValidationPolicy};
//!
//! # fn main() -> qwalk::Result<()> {
//! let g = TransitionMatrix::from_rows(
//!     &[[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]],
//!     ValidationPolicy::Strict,
//! )?;
//! let u = UnitaryPipeline::szegedy(&g)?;
//! let phi = initial_superposition(&build_psi_matrix(&g, None)?);
//! let result = evolve(phi, &u, 10, Readout::Both)?;
//! let p2 = result.trace(Register::Second).unwrap();
//! assert_eq!(p2.len(), 11);
//! # Ok(())
//! # }
//! ```

pub mod bench;
pub mod dense;
pub mod dsl;
pub mod error;
pub mod graph;
pub mod io;
pub mod operators;
pub mod oracle;
pub mod pagerank;
pub mod semiclassical;
pub mod simulator;
pub mod state;

pub use dense::SquareMatrix;
pub use dsl::{bind_pipeline, parse_pipeline, PipelineExpr};
pub use error::{Error, Result};
pub use graph::{
    classical_step, classical_walk, validate_transition_matrix, ProbabilityVector,
    TransitionMatrix, ValidationPolicy,
};
pub use operators::{
    apply_oracle, apply_pipeline, apply_reflection, apply_swap, build_psi_matrix,
    projection_coefficients, CoefficientVector, Operator, OracleOperator, PhaseMatrix, PsiMatrix,
    ReflectionOperator, UnitaryPipeline,
};
pub use pagerank::{
    build_google_matrix, classical_pagerank, quantum_pagerank, PageRankConfig, PageRankResult,
};
pub use semiclassical::{
    build_semiclassical_matrix, semiclassical_walk, SemiclassicalConfig, SemiclassicalMatrix,
};
pub use simulator::{
    evolve, evolve_batch, evolve_batch_chunked, evolve_keep_state, evolve_observed, measure,
    measure_both, mixed_state_probabilities, MeasurementResult, MixedStateEnsemble, Readout,
    Snapshot,
};
pub use state::{
    initial_superposition, matrix_to_vector, psi_state, vector_to_matrix, MatrixState, Register,
    StateBatch,
};

pub use num_complex::Complex64;
