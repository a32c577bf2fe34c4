//! Formal normal forms of doubly-resonant saddle-node vector fields in
//! `(x, y1, y2)`, transversally Hamiltonian structure, and the period-map
//! computation of the formal invariant.

pub mod error;
pub mod forms;
pub mod normalform;
pub mod periods;
pub mod series;

pub use error::{Error, Result};
pub use series::{Complex, Exponent, TruncatedSeries, Var};
pub mod vfields;

pub use vfields::{Diffeo, FiberedDiffeo, KrullOrder, MonomialExpansion, MonomialTerm, VectorField};
pub use forms::{DiffForm, IdealDxWitness};
pub use normalform::{NormalFormParams, NormalizationResult, SaddleNodeInput};
pub use periods::{PeriodSeries, PlanarHamiltonian};
