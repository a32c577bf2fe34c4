use thiserror::Error;

use crate::series::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("constant term is numerically zero, series is not a unit")]
    NotAUnit,
    #[error("substituted series has a nonzero constant term")]
    DivergentSubstitution,
    #[error("not invertible: {0}")]
    NotInvertible(&'static str),
    #[error("series is not univariate in the first variable")]
    NotUnivariate,
    #[error("vector field has order {0}, at least 2 is required")]
    OrderTooLow(u32),
    #[error("vector field does not vanish at the origin")]
    NotSingular,
    #[error("form degree {0} exceeds 3")]
    DegreeOverflow(u8),
    #[error("x-component of the field is not divisible by x")]
    NotXDivisible,
    #[error("malformed saddle-node input: {0}")]
    MalformedInput(String),
    #[error("linear part of the y-components is not diagonal")]
    NonDiagonalLinearPart,
    #[error(
        "degenerate residue: divisor {divisor} vanishes for the term x^{k0}(y1y2)^{k} (residue in Q<=0)"
    )]
    Degenerate { k0: u32, k: u32, divisor: f64 },
    #[error("truncation order {order} is too small for v-order {v_order} (need order >= 2*v_order + 2)")]
    InsufficientOrder { order: u32, v_order: u32 },
    #[error("parameter jets have different v-orders ({0} and {1})")]
    JetOrderMismatch(u32, u32),
    #[error("parameters are not in transversally Hamiltonian normal form: {0}")]
    NotHamiltonianForm(&'static str),
    #[error("quadratic part of the Hamiltonian is degenerate")]
    DegenerateQuadraticPart,
    #[error("field restricted to x = 0 is not a Hamiltonian field of the form b*y2^2 + a*y1^2 + f(y1)")]
    NotInHamiltonianFamily,
    #[error("leading period coefficient is zero")]
    ZeroLeadingPeriod,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
