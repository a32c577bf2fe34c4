//! Formal vector fields `bx ∂x + b1 ∂y1 + b2 ∂y2` and their Lie calculus.

mod diffeo;
mod monomial;
mod text;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::series::{Complex, TruncatedSeries, Var};

pub use diffeo::{
    compose_diffeos, exp_field, invert_diffeo, push_forward, push_forward_by_exp, push_forward_general, Diffeo,
    FiberedDiffeo,
};
pub use monomial::{monomial_expand, MonomialExpansion, MonomialTerm};
pub use text::parse_field_text;

pub(crate) use diffeo::exp_nilpotent;

/// Krull order of a field. The zero field has infinite order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum KrullOrder {
    Finite(u32),
    Infinite,
}

impl KrullOrder {
    pub fn finite(self) -> Option<u32> {
        match self {
            KrullOrder::Finite(n) => Some(n),
            KrullOrder::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub bx: TruncatedSeries,
    pub b1: TruncatedSeries,
    pub b2: TruncatedSeries,
}

impl VectorField {
    pub fn new(bx: TruncatedSeries, b1: TruncatedSeries, b2: TruncatedSeries) -> Self {
        VectorField { bx, b1, b2 }
    }

    pub fn from_components([bx, b1, b2]: [TruncatedSeries; 3]) -> Self {
        VectorField { bx, b1, b2 }
    }

    pub fn zero(order: u32) -> Self {
        let z = TruncatedSeries::zero(order);
        VectorField::new(z.clone(), z.clone(), z)
    }

    /// `∂/∂var` scaled by `f`.
    pub fn along(var: Var, f: TruncatedSeries) -> Self {
        let z = TruncatedSeries::zero(f.order());
        let mut c = [z.clone(), z.clone(), z];
        c[var.index()] = f;
        VectorField::from_components(c)
    }

    /// `x^k S(mu)` where `S(mu) = mu0 x∂x + mu1 y1∂y1 + mu2 y2∂y2`.
    pub fn monomial(k: [i32; 3], mu: [Complex; 3], order: u32) -> Self {
        MonomialTerm { k, mu }.to_field(order)
    }

    pub fn order(&self) -> u32 {
        self.bx.order().min(self.b1.order()).min(self.b2.order())
    }

    pub fn component(&self, var: Var) -> &TruncatedSeries {
        match var {
            Var::X => &self.bx,
            Var::Y1 => &self.b1,
            Var::Y2 => &self.b2,
        }
    }

    pub fn components(&self) -> [&TruncatedSeries; 3] {
        [&self.bx, &self.b1, &self.b2]
    }

    pub fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> Self {
        VectorField::new(f(&self.bx), f(&self.b1), f(&self.b2))
    }

    pub fn truncate(&self, order: u32) -> Self {
        self.map(|s| s.truncate(order))
    }

    pub fn scale(&self, c: Complex) -> Self {
        self.map(|s| s.scale(c))
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|s| s.is_zero())
    }

    /// Whether all components vanish at the origin.
    pub fn is_singular(&self) -> bool {
        self.components().iter().all(|s| s.constant_term().norm() == 0.0)
    }

    pub fn krull_order(&self) -> KrullOrder {
        self.components()
            .iter()
            .filter_map(|s| s.valuation())
            .min()
            .map_or(KrullOrder::Infinite, KrullOrder::Finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().map(|s| s.max_abs()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.bx.max_diff(&other.bx).max(self.b1.max_diff(&other.b1)).max(self.b2.max_diff(&other.b2))
    }

    /// Coefficientwise comparison relative to `max(1, largest coefficient)`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = self.max_abs().max(other.max_abs()).max(1.0);
        self.max_diff(other) <= tol * scale
    }

    /// Restriction to the fiber `x = 0`.
    pub fn at_x_zero(&self) -> Self {
        self.map(TruncatedSeries::at_x_zero)
    }
}

/// `L_X(f) = bx ∂f/∂x + b1 ∂f/∂y1 + b2 ∂f/∂y2`.
///
/// For a singular `X` the result is exact to `min(order(f), order(X))`,
/// otherwise to one degree less than `f`.
pub fn lie_derivative(x: &VectorField, f: &TruncatedSeries) -> TruncatedSeries {
    let order = if x.is_singular() { f.order().min(x.order()) } else { (f.order().saturating_sub(1)).min(x.order()) };
    let mut acc = TruncatedSeries::zero(order);
    for var in Var::ALL {
        let b = x.component(var);
        if b.is_zero() {
            continue;
        }
        let d = f.partial_derivative(var);
        if d.is_zero() {
            continue;
        }
        acc = &acc + &b.mul_to(&d, order);
    }
    acc
}

/// Lie bracket `[X, Y]`, the field with `L_[X,Y] = L_X L_Y - L_Y L_X`.
pub fn bracket(x: &VectorField, y: &VectorField) -> VectorField {
    VectorField::new(
        &lie_derivative(x, &y.bx) - &lie_derivative(y, &x.bx),
        &lie_derivative(x, &y.b1) - &lie_derivative(y, &x.b1),
        &lie_derivative(x, &y.b2) - &lie_derivative(y, &x.b2),
    )
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, o: &VectorField) -> VectorField {
        VectorField::new(&self.bx + &o.bx, &self.b1 + &o.b1, &self.b2 + &o.b2)
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, o: &VectorField) -> VectorField {
        VectorField::new(&self.bx - &o.bx, &self.b1 - &o.b1, &self.b2 - &o.b2)
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        self.map(|s| -s)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dx: {}", self.bx)?;
        writeln!(f, "dy1: {}", self.b1)?;
        writeln!(f, "dy2: {}", self.b2)
    }
}
