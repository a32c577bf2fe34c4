//! Residue, the two-step normalization of doubly-resonant saddle-nodes,
//! and the parameter-orbit equivalence and isotropy tests.
//!
//! The normal form is
//!
//! ```text
//! x^2 ∂x + (-λ + a1 x + c1(v)) y1 ∂y1 + (λ + a2 x + c2(v)) y2 ∂y2,   v = y1 y2.
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::series::{Complex, Exponent, TruncatedSeries, Var};
use crate::vfields::{
    compose_diffeos, exp_field, exp_nilpotent, monomial_expand, push_forward, push_forward_by_exp, Diffeo,
    FiberedDiffeo, MonomialTerm, VectorField,
};

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Relative tolerance for the linear-part checks on inputs.
pub const LINEAR_TOL: f64 = 1e-12;

/// Default tolerance of [`params_equivalent`].
pub const EQUIVALENCE_TOL: f64 = 1e-7;

fn exp3(k0: u32, k1: u32, k2: u32) -> Exponent {
    Exponent::new(k0, k1, k2)
}

/// A validated doubly-resonant saddle-node `x^2 ∂x + (B y + ...) ∂y` with
/// `tr B = 0` and `det B ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleNodeInput {
    field: VectorField,
    lambda: Complex,
}

impl SaddleNodeInput {
    pub fn new(field: VectorField) -> Result<Self> {
        let n = field.order();
        if n < 2 {
            return Err(Error::MalformedInput(format!("truncation order {n} is below 2")));
        }
        if !field.is_singular() {
            return Err(Error::MalformedInput("the field does not vanish at the origin".into()));
        }
        let x2 = TruncatedSeries::monomial(exp3(2, 0, 0), ONE, n);
        if field.bx != x2 {
            return Err(Error::MalformedInput(format!("the ∂x component must be exactly x^2, found {}", field.bx)));
        }
        let b = linear_block(&field);
        let scale = b.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
        let trace = b[0][0] + b[1][1];
        if trace.norm() > LINEAR_TOL * scale {
            return Err(Error::MalformedInput(format!("the linear y-part has nonzero trace {trace}")));
        }
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        if det.norm() <= LINEAR_TOL * scale * scale {
            return Err(Error::MalformedInput("the linear y-part is singular (λ = 0)".into()));
        }
        let lambda = if is_diagonal_block(&b) { b[1][1] } else { (-det).sqrt() };
        Ok(SaddleNodeInput { field, lambda })
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn into_field(self) -> VectorField {
        self.field
    }

    /// The eigenvalue carried by the `y2` direction.
    pub fn lambda(&self) -> Complex {
        self.lambda
    }

    pub fn order(&self) -> u32 {
        self.field.order()
    }

    /// `B[i][j]`: coefficient of `y_j` in the `∂y_i` component.
    pub fn linear_y_part(&self) -> [[Complex; 2]; 2] {
        linear_block(&self.field)
    }

    pub fn is_diagonal(&self) -> bool {
        is_diagonal_block(&self.linear_y_part())
    }
}

fn linear_block(field: &VectorField) -> [[Complex; 2]; 2] {
    let e = [exp3(0, 1, 0), exp3(0, 0, 1)];
    [
        [field.b1.coeff(e[0]), field.b1.coeff(e[1])],
        [field.b2.coeff(e[0]), field.b2.coeff(e[1])],
    ]
}

fn is_diagonal_block(b: &[[Complex; 2]; 2]) -> bool {
    let scale = b.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    b[0][1].norm() <= LINEAR_TOL * scale && b[1][0].norm() <= LINEAR_TOL * scale
}

/// Brings the linear y-part to `diag(-λ, λ)` by a constant linear change
/// `u = P^-1 y` with `det P = 1`, the columns of `P` being eigenvectors for
/// `-λ` and `λ`. Returns the new input and the change `y ↦ P^-1 y`.
pub fn diagonalize(input: &SaddleNodeInput) -> Result<(SaddleNodeInput, FiberedDiffeo)> {
    let n = input.order();
    if input.is_diagonal() {
        return Ok((input.clone(), FiberedDiffeo::identity(n)));
    }
    let b = input.linear_y_part();
    let lambda = input.lambda;
    let eigenvector = |mu: Complex| {
        let from_first = [b[0][1], mu - b[0][0]];
        let from_second = [mu - b[1][1], b[1][0]];
        let norm = |v: &[Complex; 2]| v[0].norm() + v[1].norm();
        if norm(&from_first) >= norm(&from_second) {
            from_first
        } else {
            from_second
        }
    };
    let (vm, vp) = (eigenvector(-lambda), eigenvector(lambda));
    let det = vm[0] * vp[1] - vp[0] * vm[1];
    let s = det.sqrt();
    let p = [[vm[0] / s, vp[0] / s], [vm[1] / s, vp[1] / s]];
    let p_inv = [[p[1][1], -p[0][1]], [-p[1][0], p[0][0]]];
    let change = FiberedDiffeo::linear(p_inv, n)?;
    let mut field = push_forward(&change, &input.field)?;
    // remove rounding noise in the linear block
    let set = |s: &TruncatedSeries, e: Exponent, c: Complex| {
        let terms = s.terms().filter(|(k, _)| *k != e).chain(std::iter::once((e, c)));
        TruncatedSeries::from_terms(s.order(), terms)
    };
    field.bx = TruncatedSeries::monomial(exp3(2, 0, 0), ONE, n);
    field.b1 = set(&set(&field.b1, exp3(0, 1, 0), -lambda), exp3(0, 0, 1), ZERO);
    field.b2 = set(&set(&field.b2, exp3(0, 0, 1), lambda), exp3(0, 1, 0), ZERO);
    Ok((SaddleNodeInput { field, lambda }, change))
}

/// `Tr(A(x))/x` at `x = 0`, where `A(x)` is the linear y-part along the
/// formal invariant curve `y = γ(x)`.
///
/// Without translation terms this is the sum of the `x y1` coefficient of
/// the `∂y1` component and the `x y2` coefficient of the `∂y2` component.
pub fn residue(input: &SaddleNodeInput) -> Result<Complex> {
    let f = input.field();
    let comps = [&f.b1, &f.b2];
    let ys = [Var::Y1, Var::Y2];
    let unit = |v: Var| Exponent::new(0, 0, 0).with(v, 1);
    let mut res = ZERO;
    for i in 0..2 {
        res += comps[i].coeff(unit(ys[i]) + exp3(1, 0, 0));
    }
    let t = [f.b1.coeff(exp3(1, 0, 0)), f.b2.coeff(exp3(1, 0, 0))];
    if t.iter().all(|z| *z == ZERO) {
        return Ok(res);
    }
    // first-order invariant curve: B γ1 + t = 0
    let b = input.linear_y_part();
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let gamma = [(-b[1][1] * t[0] + b[0][1] * t[1]) / det, (b[1][0] * t[0] - b[0][0] * t[1]) / det];
    for i in 0..2 {
        for j in 0..2 {
            let e = unit(ys[i]) + unit(ys[j]);
            let factor = if i == j { 2.0 } else { 1.0 };
            res += comps[i].coeff(e) * factor * gamma[j];
        }
    }
    Ok(res)
}

/// `(λ, a1, a2, c1, c2)`; `c1[k-1]`, `c2[k-1]` are the coefficients of `v^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormParams {
    pub lambda: Complex,
    pub a1: Complex,
    pub a2: Complex,
    pub c1: Vec<Complex>,
    pub c2: Vec<Complex>,
}

impl NormalFormParams {
    pub fn new(lambda: Complex, a1: Complex, a2: Complex, c1: Vec<Complex>, c2: Vec<Complex>) -> Result<Self> {
        if c1.len() != c2.len() {
            return Err(Error::JetOrderMismatch(c1.len() as u32, c2.len() as u32));
        }
        if lambda == ZERO {
            return Err(Error::MalformedInput("λ must be nonzero".into()));
        }
        Ok(NormalFormParams { lambda, a1, a2, c1, c2 })
    }

    /// The v-order `M` of the jets.
    pub fn v_order(&self) -> u32 {
        self.c1.len() as u32
    }

    pub fn residue(&self) -> Complex {
        self.a1 + self.a2
    }

    /// `c = (c2 - c1)/2`.
    pub fn c(&self) -> Vec<Complex> {
        self.c1.iter().zip(&self.c2).map(|(a, b)| (b - a) / 2.0).collect()
    }

    /// `r = (c1 + c2)/2`.
    pub fn r(&self) -> Vec<Complex> {
        self.c1.iter().zip(&self.c2).map(|(a, b)| (a + b) / 2.0).collect()
    }

    /// `c1` as a univariate series in `v`, carried by the first variable.
    pub fn c1_jet(&self) -> TruncatedSeries {
        jet(&self.c1)
    }

    pub fn c2_jet(&self) -> TruncatedSeries {
        jet(&self.c2)
    }

    /// The parameters after the swap `y1 ↔ y2`.
    pub fn swapped(&self) -> Self {
        NormalFormParams {
            lambda: -self.lambda,
            a1: self.a2,
            a2: self.a1,
            c1: self.c2.clone(),
            c2: self.c1.clone(),
        }
    }

    /// The action `c_i ↦ c_i ∘ (v ↦ θ v)`.
    pub fn rescaled(&self, theta: Complex) -> Self {
        let act = |c: &[Complex]| c.iter().enumerate().map(|(i, z)| z * theta.powu(i as u32 + 1)).collect();
        NormalFormParams { c1: act(&self.c1), c2: act(&self.c2), ..self.clone() }
    }

    /// The normal-form field truncated at `order`.
    pub fn to_field(&self, order: u32) -> VectorField {
        let mut b1 = vec![(exp3(0, 1, 0), -self.lambda), (exp3(1, 1, 0), self.a1)];
        let mut b2 = vec![(exp3(0, 0, 1), self.lambda), (exp3(1, 0, 1), self.a2)];
        for (i, (p, q)) in self.c1.iter().zip(&self.c2).enumerate() {
            let k = i as u32 + 1;
            b1.push((exp3(0, k + 1, k), *p));
            b2.push((exp3(0, k, k + 1), *q));
        }
        VectorField::new(
            TruncatedSeries::monomial(exp3(2, 0, 0), ONE, order),
            TruncatedSeries::from_terms(order, b1),
            TruncatedSeries::from_terms(order, b2),
        )
    }

    pub fn max_abs(&self) -> f64 {
        [self.lambda, self.a1, self.a2]
            .iter()
            .chain(&self.c1)
            .chain(&self.c2)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn jet(c: &[Complex]) -> TruncatedSeries {
    let mut dense = vec![ZERO];
    dense.extend_from_slice(c);
    TruncatedSeries::univariate(&dense, c.len() as u32)
}

fn write_complex(f: &mut fmt::Formatter<'_>, z: Complex) -> fmt::Result {
    write!(f, "({:.16e},{:.16e})", z.re, z.im)
}

impl fmt::Display for NormalFormParams {
    /// One `name: value` line per parameter; jets list the coefficients of
    /// `v^1 .. v^M`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, z) in [("lambda", self.lambda), ("a1", self.a1), ("a2", self.a2)] {
            write!(f, "{name}: ")?;
            write_complex(f, z)?;
            writeln!(f)?;
        }
        for (name, jet) in [("c1", &self.c1), ("c2", &self.c2)] {
            write!(f, "{name}:")?;
            for z in jet.iter() {
                write!(f, " ")?;
                write_complex(f, *z)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// How step 1 groups its correctors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// One corrector per total degree, the sum of all terms of that degree.
    #[default]
    Batched,
    /// One corrector per monomial, in graded order.
    TermByTerm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationResult {
    pub params: NormalFormParams,
    /// `Φ` with `Φ_*(input) = residual`.
    pub conjugacy: FiberedDiffeo,
    /// The transformed field, before any cleaning.
    pub residual: VectorField,
    /// Largest `M` for which the c-jets are guaranteed, `⌊(N-2)/2⌋`.
    pub guaranteed_v_order: u32,
}

/// Rejects `(N, M)` with `N < 2M + 2`.
pub fn check_jet_order(order: u32, v_order: u32) -> Result<()> {
    if order < 2 * v_order + 2 {
        return Err(Error::InsufficientOrder { order, v_order });
    }
    Ok(())
}

pub fn guaranteed_v_order(order: u32) -> u32 {
    order.saturating_sub(2) / 2
}

pub fn normalize(input: &SaddleNodeInput, order: u32) -> Result<NormalizationResult> {
    normalize_with(input, order, Schedule::Batched)
}

pub fn normalize_with(input: &SaddleNodeInput, order: u32, schedule: Schedule) -> Result<NormalizationResult> {
    if !input.is_diagonal() {
        return Err(Error::NonDiagonalLinearPart);
    }
    let n = order.min(input.order());
    let lambda = input.lambda;
    let mut field = input.field.truncate(n);
    let mut factors = Vec::new();

    // step 1: non-resonant terms, degree by degree
    for d in 0..n {
        let expansion = monomial_expand(&field)?;
        let correctors: Vec<MonomialTerm> = expansion
            .terms
            .iter()
            .filter(|t| t.degree() == d as i32 && t.k[1] != t.k[2] && (d > 0 || t.k[0] > 0))
            .map(|t| {
                let div = lambda * (t.k[1] - t.k[2]) as f64;
                MonomialTerm { k: t.k, mu: [ZERO, t.mu[1] / div, t.mu[2] / div] }
            })
            .collect();
        let groups: Vec<Vec<MonomialTerm>> = match schedule {
            Schedule::Batched => vec![correctors],
            Schedule::TermByTerm => correctors.into_iter().map(|t| vec![t]).collect(),
        };
        for group in groups {
            if group.is_empty() {
                continue;
            }
            let g = group.iter().fold(VectorField::zero(n), |acc, t| &acc + &t.to_field(n));
            field = push_forward_by_exp(&g, &field)?;
            let flow = if d == 0 { exp_nilpotent(&g)? } else { exp_field(&g)? };
            factors.push(fibered(&flow));
        }
    }

    // step 2: x^k0 v^k S(0, ·) with k0 >= 1, (k0, k) ≠ (1, 0)
    let a1 = field.b1.coeff(exp3(1, 1, 0));
    let a2 = field.b2.coeff(exp3(1, 0, 1));
    let res = a1 + a2;
    for big_i in 1..n {
        for k in 0..=big_i {
            let k0 = big_i - k;
            if k0 == 0 || (k0, k) == (1, 0) || k0 + 2 * k > n - 1 {
                continue;
            }
            let divisor = Complex::new((k0 - 1) as f64, 0.0) + res * k as f64;
            if divisor.norm() < 1e-9 * (1.0 + res.norm()) {
                return Err(Error::Degenerate { k0, k, divisor: divisor.norm() });
            }
            let mu1 = field.b1.coeff(exp3(k0, k + 1, k));
            let mu2 = field.b2.coeff(exp3(k0, k, k + 1));
            if mu1 == ZERO && mu2 == ZERO {
                continue;
            }
            let term = MonomialTerm { k: [k0 as i32 - 1, k as i32, k as i32], mu: [ZERO, -mu1 / divisor, -mu2 / divisor] };
            let g = term.to_field(n);
            field = push_forward_by_exp(&g, &field)?;
            factors.push(fibered(&exp_field(&g)?));
        }
    }

    let m = (n - 1) / 2;
    let c1 = (1..=m).map(|k| field.b1.coeff(exp3(0, k + 1, k))).collect();
    let c2 = (1..=m).map(|k| field.b2.coeff(exp3(0, k, k + 1))).collect();
    let params = NormalFormParams { lambda, a1, a2, c1, c2 };
    Ok(NormalizationResult {
        params,
        conjugacy: compose_diffeos(&factors, n),
        residual: field,
        guaranteed_v_order: guaranteed_v_order(n),
    })
}

fn fibered(flow: &Diffeo) -> FiberedDiffeo {
    FiberedDiffeo::from_diffeo(flow, 0.0).expect("flows of fields without ∂x part fix x")
}

/// Largest forbidden coefficient left in a normalized field: any monomial
/// with `k1 ≠ k2`, or `x^k0 v^k S(0, ·)` with `k0 >= 1`, `(k0, k) ≠ (1, 0)`,
/// and any ∂x part other than `x^2`.
pub fn forbidden_residual(field: &VectorField) -> Result<f64> {
    let expansion = monomial_expand(field)?;
    let mut worst: f64 = 0.0;
    for t in &expansion.terms {
        let [k0, k1, k2] = t.k;
        let allowed_x = t.k == [1, 0, 0];
        let mu_x = if allowed_x { t.mu[0] - ONE } else { t.mu[0] };
        worst = worst.max(mu_x.norm());
        let y_part = t.mu[1].norm().max(t.mu[2].norm());
        let resonant = k1 == k2;
        let allowed = resonant && (k0 == 0 || (k0, k1) == (1, 0));
        if !allowed {
            worst = worst.max(y_part);
        }
    }
    Ok(worst)
}

/// A witness `(θ, ε)` with `θ · swap^ε(p) = q`, where `θ` acts by
/// `c_i ↦ c_i(θ v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub theta: Complex,
    pub swap: bool,
}

pub fn params_equivalent(p: &NormalFormParams, q: &NormalFormParams) -> Result<Option<Equivalence>> {
    params_equivalent_within(p, q, EQUIVALENCE_TOL)
}

pub fn params_equivalent_within(p: &NormalFormParams, q: &NormalFormParams, tol: f64) -> Result<Option<Equivalence>> {
    if p.v_order() != q.v_order() {
        return Err(Error::JetOrderMismatch(p.v_order(), q.v_order()));
    }
    let close = |a: Complex, b: Complex| (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0);
    for swap in [false, true] {
        let p = if swap { p.swapped() } else { p.clone() };
        if !(close(p.lambda, q.lambda) && close(p.a1, q.a1) && close(p.a2, q.a2)) {
            continue;
        }
        let scale = p.max_abs().max(q.max_abs()).max(1.0);
        let negligible = |z: Complex| z.norm() <= tol * scale;
        let lowest = (0..p.c1.len()).find(|&i| {
            !(negligible(p.c1[i]) && negligible(p.c2[i]) && negligible(q.c1[i]) && negligible(q.c2[i]))
        });
        let Some(i) = lowest else {
            return Ok(Some(Equivalence { theta: ONE, swap }));
        };
        let k = i as u32 + 1;
        let (num, den) = if p.c1[i].norm() >= p.c2[i].norm() { (q.c1[i], p.c1[i]) } else { (q.c2[i], p.c2[i]) };
        if negligible(den) || negligible(num) {
            continue;
        }
        let root = (num / den).powf(1.0 / k as f64);
        for j in 0..k {
            let theta = root * Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64);
            let acted = p.rescaled(theta);
            let matches = acted.c1.iter().zip(&q.c1).chain(acted.c2.iter().zip(&q.c2)).all(|(a, b)| close(*a, *b));
            if matches {
                return Ok(Some(Equivalence { theta, swap }));
            }
        }
    }
    Ok(None)
}

/// The isotropies `diag(1, θ1, θ2)` of a normal form are those with
/// `(θ1 θ2)^q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Isotropy {
    /// Both c-jets vanish: any `θ1 θ2`.
    Unconstrained,
    Roots(u32),
}

pub fn isotropy_group(p: &NormalFormParams) -> Isotropy {
    let scale = p.c1.iter().chain(&p.c2).map(|z| z.norm()).fold(1.0, f64::max);
    let mut q = 0u32;
    for i in 0..p.c1.len() {
        if p.c1[i].norm().max(p.c2[i].norm()) > 1e-9 * scale {
            q = gcd(q, i as u32 + 1);
        }
    }
    if q == 0 {
        Isotropy::Unconstrained
    } else {
        Isotropy::Roots(q)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Whether `diag(1, t1, t2)` maps the normal form of `p` to itself.
pub fn diagonal_fixes(p: &NormalFormParams, t1: Complex, t2: Complex, order: u32, tol: f64) -> Result<bool> {
    let z = p.to_field(order);
    let pushed = push_forward(&FiberedDiffeo::diag(t1, t2, order)?, &z)?;
    Ok(pushed.approx_eq(&z, tol))
}

/// Checks that `diag(1, α, 1/α)` fixes a transversally Hamiltonian normal
/// form (`a1 + a2 = 1`, `c1 = -c2`).
pub fn symplectic_isotropy_check(p: &NormalFormParams, alpha: Complex, order: u32) -> Result<bool> {
    let tol = 1e-8 * p.max_abs().max(1.0);
    if (p.residue() - ONE).norm() > tol {
        return Err(Error::NotHamiltonianForm("a1 + a2 differs from 1"));
    }
    if p.c1.iter().zip(&p.c2).any(|(a, b)| (a + b).norm() > tol) {
        return Err(Error::NotHamiltonianForm("c1 + c2 is not zero"));
    }
    if alpha == ZERO {
        return Err(Error::NotInvertible("α must be nonzero"));
    }
    diagonal_fixes(p, alpha, ONE / alpha, order, 1e-10)
}
