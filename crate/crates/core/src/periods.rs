//! Period series of planar Hamiltonians `H = β y2^2 + α y1^2 + f(y1)` and
//! the invariant `c(v)` they determine, with the Painlevé-I data.
//!
//! The Hamiltonian field is `-∂H/∂y2 ∂y1 + ∂H/∂y1 ∂y2` and the time-form
//! on a level curve is `τ = -dy1 / (2 β y2)`.

use crate::error::{Error, Result};
use crate::normalform::SaddleNodeInput;
use crate::series::{binomial, parse_series, Complex, Exponent, TruncatedSeries};
use crate::vfields::VectorField;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// `ζ = i/√6`.
pub fn zeta() -> Complex {
    Complex::new(0.0, 1.0 / 6f64.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarHamiltonian {
    pub beta: Complex,
    pub alpha: Complex,
    /// `f[k]` is the coefficient of `y1^k`; entries below 3 are zero.
    f: Vec<Complex>,
    /// Degree up to which `f` is known; `None` for a polynomial.
    f_order: Option<u32>,
}

impl PlanarHamiltonian {
    /// `f` is a polynomial given by its coefficients `f[k]` of `y1^k`.
    pub fn new(beta: Complex, alpha: Complex, f: &[Complex]) -> Result<Self> {
        Self::build(beta, alpha, f, None)
    }

    /// `f` is a jet known up to degree `order`.
    pub fn from_jet(beta: Complex, alpha: Complex, f: &[Complex], order: u32) -> Result<Self> {
        Self::build(beta, alpha, f, Some(order))
    }

    fn build(beta: Complex, alpha: Complex, f: &[Complex], f_order: Option<u32>) -> Result<Self> {
        let scale = f.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if beta.norm() <= 1e-12 * scale || alpha.norm() <= 1e-12 * scale {
            return Err(Error::DegenerateQuadraticPart);
        }
        if f.iter().take(3).any(|z| *z != ZERO) {
            return Err(Error::NotInHamiltonianFamily);
        }
        let mut f = f.to_vec();
        while f.last() == Some(&ZERO) {
            f.pop();
        }
        Ok(PlanarHamiltonian { beta, alpha, f, f_order })
    }

    /// Reads `H` from the restriction of `field` to `x = 0`, which must be
    /// `-2β y2 ∂y1 + (2α y1 + f'(y1)) ∂y2`.
    pub fn from_field_restriction(field: &VectorField) -> Result<Self> {
        let r = field.at_x_zero();
        let y2 = Exponent::new(0, 0, 1);
        if r.b1.terms().any(|(e, _)| e != y2) || r.b2.terms().any(|(e, _)| e.k2 != 0) {
            return Err(Error::NotInHamiltonianFamily);
        }
        let beta = -r.b1.coeff(y2) / 2.0;
        let n = field.order();
        let mut f = vec![ZERO; n as usize + 2];
        for (e, c) in r.b2.terms() {
            f[e.k1 as usize + 1] = c / (e.k1 + 1) as f64;
        }
        let alpha = f[2];
        f[2] = ZERO;
        Self::from_jet(beta, alpha, &f, n + 1)
    }

    pub fn f(&self) -> &[Complex] {
        &self.f
    }

    /// `H` as a series in `(y1, y2)`.
    pub fn to_series(&self, order: u32) -> TruncatedSeries {
        let mut terms = vec![(Exponent::new(0, 0, 2), self.beta), (Exponent::new(0, 2, 0), self.alpha)];
        terms.extend(self.f.iter().enumerate().map(|(k, c)| (Exponent::new(0, k as u32, 0), *c)));
        TruncatedSeries::from_terms(order, terms)
    }

    /// `H(y1, y2)` at a point.
    pub fn eval(&self, y1: Complex, y2: Complex) -> Complex {
        self.beta * y2 * y2 + self.q(y1)
    }

    /// `Q(y1) = α y1^2 + f(y1)`.
    pub fn q(&self, y1: Complex) -> Complex {
        let f = self.f.iter().rev().fold(ZERO, |acc, c| acc * y1 + c);
        self.alpha * y1 * y1 + f
    }

    /// The principal `λ = 2 sqrt(-αβ)`; `±λ` are the eigenvalues of the
    /// linearized Hamiltonian field.
    pub fn principal_lambda(&self) -> Complex {
        (-self.alpha * self.beta).sqrt() * 2.0
    }
}

/// `T_H(a) = sum_k T_k a^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSeries {
    pub coeffs: Vec<Complex>,
}

impl PeriodSeries {
    pub fn order(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn eval(&self, a: Complex) -> Complex {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * a + c)
    }
}

/// `T_0 .. T_M` with the orientation fixed by `T_0 = -1/λ` for the
/// principal `λ`.
pub fn period_series(h: &PlanarHamiltonian, m: u32) -> Result<PeriodSeries> {
    period_series_for(h, m, h.principal_lambda())
}

/// `T_0 .. T_M` with the orientation fixed by `T_0 = -1/λ`, where `λ` must
/// be one of `±2 sqrt(-αβ)`.
///
/// `T_k = -(1/λ) binom(-1/2, k) (-α)^-k [y1^2k] (1 + f/(α y1^2))^-(k+1/2)`.
pub fn period_series_for(h: &PlanarHamiltonian, m: u32, lambda: Complex) -> Result<PeriodSeries> {
    let needed = 2 * m + 2;
    if let Some(order) = h.f_order {
        if order < needed {
            return Err(Error::InsufficientOrder { order, v_order: m });
        }
    }
    let square = lambda * lambda + h.alpha * h.beta * 4.0;
    if square.norm() > 1e-9 * (lambda * lambda).norm() {
        return Err(Error::MalformedInput(format!("λ = {lambda} is not an eigenvalue of the Hamiltonian field")));
    }
    let g_order = 2 * m;
    let g: Vec<Complex> = (0..=g_order as usize).map(|j| h.f.get(j + 2).copied().unwrap_or(ZERO) / h.alpha).collect();
    let unit = &TruncatedSeries::one(g_order) + &TruncatedSeries::univariate(&g, g_order);
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    for k in 0..=m {
        let s = Complex::new(-(k as f64 + 0.5), 0.0);
        let power = unit.binomial_power_with(s, ONE)?;
        let residue = power.coeff(Exponent::new(2 * k, 0, 0));
        let t = -binomial(Complex::new(-0.5, 0.0), k) * (-h.alpha).powi(-(k as i32)) * residue / lambda;
        coeffs.push(t);
    }
    Ok(PeriodSeries { coeffs })
}

/// The invariant of the period map: `λ = -1/T_0`, `S_H = ∫ T_H`,
/// `h = (-S_H)^-1` and `c = h' - λ`. Returns `λ` and `c_1 .. c_M`.
pub fn invariant_from_periods(t: &PeriodSeries) -> Result<(Complex, Vec<Complex>)> {
    let scale = t.coeffs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if t.coeffs[0].norm() <= 1e-12 * scale {
        return Err(Error::ZeroLeadingPeriod);
    }
    let m = t.order();
    let lambda = -ONE / t.coeffs[0];
    let s = TruncatedSeries::univariate(&t.coeffs, m).antiderivative()?;
    let h = s.scale(-ONE).univariate_inverse()?;
    let dense = h.univariate_coeffs()?;
    let c = (1..=m as usize).map(|k| dense[k + 1] * (k + 1) as f64).collect();
    Ok((lambda, c))
}

/// `h(v)` with `h' = λ + c`, `h(0) = 0`, as a univariate series.
pub fn hamiltonian_of_normal_form(lambda: Complex, c: &[Complex]) -> TruncatedSeries {
    let mut dense = vec![lambda];
    dense.extend_from_slice(c);
    TruncatedSeries::univariate(&dense, c.len() as u32).antiderivative().expect("univariate")
}

/// `Y = x^2 ∂x + (-(4/5) y2 + (2/5) x y1 + (2ζ/5) x) ∂y1
///    + (-(24/5) y1^2 - (48ζ/5) y1 + (3/5) x y2) ∂y2`,
/// the Painlevé-I field in the Boutroux chart `z1 = y1 x^-2/5`,
/// `z2 = y2 x^-3/5`, `t = x^-4/5` at `t = ∞`, after `y1 ← y1 + ζ`.
pub fn painleve1_field(order: u32) -> SaddleNodeInput {
    SaddleNodeInput::new(painleve1_vector_field(order)).expect("the Painlevé-I field is a saddle-node")
}

pub fn painleve1_vector_field(order: u32) -> VectorField {
    let z = zeta();
    let s = |t: &str| parse_series(t, order).expect("valid literal");
    let b1 = &s("-0.8*y2 + 0.4*x*y1") + &s("x").scale(z * 0.4);
    let b2 = &s("-4.8*y1^2 + 0.6*x*y2") + &s("y1").scale(z * -9.6);
    VectorField::new(s("x^2"), b1, b2)
}

/// `(1/5)(-2 y2^2 + 24 ζ y1^2 + 8 y1^3)`.
pub fn painleve1_hamiltonian() -> PlanarHamiltonian {
    let f = [ZERO, ZERO, ZERO, Complex::new(1.6, 0.0)];
    PlanarHamiltonian::new(Complex::new(-0.4, 0.0), zeta() * 4.8, &f).expect("nondegenerate")
}

/// `8 sqrt(3ζ) / 5`.
pub fn painleve1_lambda() -> Complex {
    (zeta() * 3.0).sqrt() * 1.6
}

/// `-5^(k+1) binom(-1/2, k) binom(-(k+1/2), 2k) 8^-(k+1) (3ζ)^-(3k+1/2)`
/// on the principal branch.
#[allow(non_snake_case)]
pub fn painleve1_Thk_closed_form(k: u32) -> Complex {
    assert!(k <= 64, "k = {k} is beyond the supported range");
    let kf = k as f64;
    let b1 = binomial(Complex::new(-0.5, 0.0), k);
    let b2 = binomial(Complex::new(-(kf + 0.5), 0.0), 2 * k);
    let power = (zeta() * 3.0).powc(Complex::new(-(3.0 * kf + 0.5), 0.0));
    -b1 * b2 * power * 5f64.powi(k as i32 + 1) / 8f64.powi(k as i32 + 1)
}
