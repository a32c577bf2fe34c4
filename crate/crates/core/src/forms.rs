//! Differential forms in `(x, y1, y2)` with series coefficients, and the
//! transversally Hamiltonian / symplectic tests for `ω = dy1∧dy2 / x`.
//!
//! A basis element is a bitmask over `dx = 1`, `dy1 = 2`, `dy2 = 4`, always
//! wedged in increasing index order. `ω` itself is never stored: the
//! membership tests work with `x·L_Y(ω)` and `x·Φ*(ω)` written out as
//! polynomial forms.

use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::series::{Complex, TruncatedSeries, Var};
use crate::vfields::{lie_derivative, monomial_expand, Diffeo, FiberedDiffeo, VectorField};

pub const DX: u8 = 0b001;
pub const DY1: u8 = 0b010;
pub const DY2: u8 = 0b100;

/// Default relative tolerance for "numerically zero" form components.
pub const FORM_TOL: f64 = 1e-9;

fn bit(var: Var) -> u8 {
    1 << var.index()
}

/// Sign of `e_a ∧ e_b` relative to the sorted basis element `a | b`, or
/// zero when they share a factor.
fn wedge_sign(a: u8, b: u8) -> i32 {
    if a & b != 0 {
        return 0;
    }
    // count pairs (i in a, j in b) with i > j
    let mut inversions = 0;
    for i in 0..3 {
        if a & (1 << i) != 0 {
            inversions += (b & ((1 << i) - 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A homogeneous differential form of degree 0 to 3.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffForm {
    degree: u8,
    order: u32,
    comps: BTreeMap<u8, TruncatedSeries>,
}

impl DiffForm {
    pub fn zero(degree: u8, order: u32) -> Self {
        assert!(degree <= 3, "form degree {degree} > 3");
        DiffForm { degree, order, comps: BTreeMap::new() }
    }

    /// Builds a form from `(basis mask, coefficient)` pairs of equal degree.
    pub fn from_components(degree: u8, components: impl IntoIterator<Item = (u8, TruncatedSeries)>) -> Self {
        let comps: Vec<(u8, TruncatedSeries)> = components.into_iter().collect();
        let order = comps.iter().map(|(_, s)| s.order()).min().unwrap_or(0);
        let mut f = DiffForm::zero(degree, order);
        for (mask, s) in comps {
            assert!(mask < 8 && mask.count_ones() == degree as u32, "basis {mask:#05b} is not of degree {degree}");
            f.add_component(mask, s);
        }
        f
    }

    pub fn function(f: TruncatedSeries) -> Self {
        Self::from_components(0, [(0, f)])
    }

    /// The basis form `dx_I` for the mask `I`.
    pub fn basis(mask: u8, order: u32) -> Self {
        Self::from_components(mask.count_ones() as u8, [(mask, TruncatedSeries::one(order))])
    }

    /// `dx`, `dy1` or `dy2`.
    pub fn differential(var: Var, order: u32) -> Self {
        Self::basis(bit(var), order)
    }

    fn add_component(&mut self, mask: u8, s: TruncatedSeries) {
        let s = s.truncate(self.order);
        let entry = self.comps.remove(&mask).unwrap_or_else(|| TruncatedSeries::zero(self.order));
        let sum = &entry + &s;
        if !sum.is_zero() {
            self.comps.insert(mask, sum);
        }
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn component(&self, mask: u8) -> TruncatedSeries {
        self.comps.get(&mask).cloned().unwrap_or_else(|| TruncatedSeries::zero(self.order))
    }

    pub fn components(&self) -> impl Iterator<Item = (u8, &TruncatedSeries)> {
        self.comps.iter().map(|(m, s)| (*m, s))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.values().map(TruncatedSeries::max_abs).fold(0.0, f64::max)
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let mut f = DiffForm::zero(self.degree, order);
        for (m, s) in &self.comps {
            f.add_component(*m, s.clone());
        }
        f
    }

    pub fn scale(&self, c: Complex) -> Self {
        self.map(|s| s.scale(c))
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_function(&self, f: &TruncatedSeries) -> Self {
        self.map(|s| s * f)
    }

    fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> Self {
        let comps: Vec<(u8, TruncatedSeries)> = self.comps.iter().map(|(m, s)| (*m, f(s))).collect();
        let order = comps.iter().map(|(_, s)| s.order()).min().unwrap_or(self.order).min(self.order);
        let mut out = DiffForm::zero(self.degree, order);
        for (m, s) in comps {
            out.add_component(m, s);
        }
        out
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        (0..8u8).map(|m| self.component(m).max_diff(&other.component(m))).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.degree == other.degree && self.max_diff(other) <= tol * self.max_abs().max(other.max_abs()).max(1.0)
    }
}

impl Add for &DiffForm {
    type Output = DiffForm;
    fn add(self, o: &DiffForm) -> DiffForm {
        assert_eq!(self.degree, o.degree, "adding forms of different degrees");
        let mut f = DiffForm::zero(self.degree, self.order.min(o.order));
        for (m, s) in self.comps.iter().chain(&o.comps) {
            f.add_component(*m, s.clone());
        }
        f
    }
}

impl Sub for &DiffForm {
    type Output = DiffForm;
    fn sub(self, o: &DiffForm) -> DiffForm {
        self + &o.scale(Complex::new(-1.0, 0.0))
    }
}

pub fn wedge(a: &DiffForm, b: &DiffForm) -> Result<DiffForm> {
    let degree = a.degree + b.degree;
    if degree > 3 {
        return Err(Error::DegreeOverflow(degree));
    }
    let mut out = DiffForm::zero(degree, a.order.min(b.order));
    for (ma, sa) in &a.comps {
        for (mb, sb) in &b.comps {
            let sign = wedge_sign(*ma, *mb);
            if sign != 0 {
                out.add_component(ma | mb, (sa * sb).scale(Complex::new(sign as f64, 0.0)));
            }
        }
    }
    Ok(out)
}

pub fn exterior_d(a: &DiffForm) -> Result<DiffForm> {
    if a.degree >= 3 {
        return Err(Error::DegreeOverflow(a.degree + 1));
    }
    let mut out = DiffForm::zero(a.degree + 1, a.order.saturating_sub(1));
    for (m, s) in &a.comps {
        for var in Var::ALL {
            let sign = wedge_sign(bit(var), *m);
            if sign != 0 {
                let d = s.partial_derivative(var);
                out.add_component(bit(var) | m, d.scale(Complex::new(sign as f64, 0.0)));
            }
        }
    }
    Ok(out)
}

/// Interior product `ι_X a`; zero on functions.
pub fn interior(x: &VectorField, a: &DiffForm) -> DiffForm {
    if a.degree == 0 {
        return DiffForm::zero(0, a.order);
    }
    // a coefficient times a field vanishing at the origin gains one degree
    let order = if x.is_singular() { (a.order + 1).min(x.order()) } else { a.order.min(x.order()) };
    let mut out = DiffForm::zero(a.degree - 1, order);
    for (m, s) in &a.comps {
        for var in Var::ALL {
            let b = bit(var);
            if m & b == 0 {
                continue;
            }
            let rest = m & !b;
            let sign = wedge_sign(b, rest);
            let coeff = x.component(var).mul_to(s, order);
            out.add_component(rest, coeff.scale(Complex::new(sign as f64, 0.0)));
        }
    }
    out
}

/// `L_X a = d ι_X a + ι_X d a`.
pub fn lie_derivative_form(x: &VectorField, a: &DiffForm) -> DiffForm {
    if a.degree == 0 {
        return DiffForm::function(lie_derivative(x, &a.component(0)));
    }
    let d_iota = exterior_d(&interior(x, a)).expect("degree at most 2");
    if a.degree == 3 {
        return d_iota;
    }
    let iota_d = interior(x, &exterior_d(a).expect("degree at most 2"));
    &d_iota + &iota_d
}

/// `Φ* a` for a general diffeomorphism fixing the origin.
pub fn pullback_form_general(phi: &Diffeo, a: &DiffForm) -> DiffForm {
    let dphi: Vec<DiffForm> = phi
        .images()
        .iter()
        .map(|s| exterior_d(&DiffForm::function(s.clone())).expect("functions"))
        .collect();
    let mut out = DiffForm::zero(a.degree, a.order.min(phi.order()));
    for (m, s) in &a.comps {
        let mut term = DiffForm::function(phi.pullback(s));
        for var in Var::ALL {
            if m & bit(var) != 0 {
                term = wedge(&term, &dphi[var.index()]).expect("degree at most 3");
            }
        }
        out = &out + &term;
    }
    out
}

pub fn pullback_form(phi: &FiberedDiffeo, a: &DiffForm) -> DiffForm {
    pullback_form_general(&phi.to_diffeo(), a)
}

/// `a = dx ∧ eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealDxWitness {
    pub form: DiffForm,
    pub eta: DiffForm,
}

/// Whether every dx-free component of `a` is zero within
/// `tol * max(1, |a|)`.
pub fn in_ideal_dx_within(a: &DiffForm, tol: f64) -> bool {
    let bound = tol * a.max_abs().max(1.0);
    a.components().all(|(m, s)| m & DX != 0 || s.max_abs() <= bound)
}

pub fn in_ideal_dx(a: &DiffForm) -> bool {
    in_ideal_dx_within(a, FORM_TOL)
}

/// Factors `a = dx ∧ eta` when `a` lies in the ideal generated by `dx`.
pub fn ideal_dx_witness(a: &DiffForm) -> Option<IdealDxWitness> {
    if a.degree == 0 || !in_ideal_dx(a) {
        return None;
    }
    let d_dx = VectorField::along(Var::X, TruncatedSeries::one(a.order + 1));
    let eta = interior(&d_dx, a);
    Some(IdealDxWitness { form: a.clone(), eta })
}

/// `x·L_Y(ω) = -(L_Y(x)/x) dy1∧dy2 + L_Y(dy1∧dy2)`.
pub fn cleared_lie_derivative_of_omega(y: &VectorField) -> Result<DiffForm> {
    if !y.bx.is_x_divisible() {
        return Err(Error::NotXDivisible);
    }
    let order = y.order();
    let area = DiffForm::basis(DY1 | DY2, order + 1);
    let lie = lie_derivative_form(y, &area);
    let pole = area.mul_function(&y.bx.div_x()).scale(Complex::new(-1.0, 0.0));
    Ok(&pole + &lie)
}

/// `L_Y(dx) ∈ <dx>` and `x·L_Y(ω) ∈ <dx>`.
pub fn is_transversally_hamiltonian(y: &VectorField) -> Result<bool> {
    let cleared = cleared_lie_derivative_of_omega(y)?;
    let order = y.order();
    let l_dx = lie_derivative_form(y, &DiffForm::differential(Var::X, order + 1));
    Ok(in_ideal_dx(&l_dx) && in_ideal_dx(&cleared))
}

/// Termwise test on the monomial expansion: `mu1 (k1+1) + mu2 (k2+1) = mu0`
/// and either `mu0 = 0` or `k1 = k2 = 0`, for every term.
pub fn is_transversally_hamiltonian_monomialwise(y: &VectorField) -> Result<bool> {
    let expansion = monomial_expand(y)?;
    let tol = FORM_TOL * y.max_abs().max(1.0);
    Ok(expansion.terms.iter().all(|t| {
        let [_, k1, k2] = t.k;
        let [m0, m1, m2] = t.mu;
        let balance = m1 * (k1 + 1) as f64 + m2 * (k2 + 1) as f64 - m0;
        balance.norm() <= tol && (m0.norm() <= tol || (k1 == 0 && k2 == 0))
    }))
}

/// `Φ*(x) = x` holds by construction, and `Φ*(dy1∧dy2) - dy1∧dy2 ∈ <dx>`.
///
/// Because `Φ` fixes `x`, this is the polynomial form of
/// `x·Φ*(ω) ∈ x·ω + <dx>`.
pub fn is_transversally_symplectic(phi: &FiberedDiffeo) -> bool {
    let order = phi.order();
    let area = DiffForm::basis(DY1 | DY2, order);
    let pulled = pullback_form(phi, &area);
    in_ideal_dx(&(&pulled - &area.truncate(pulled.order())))
}
