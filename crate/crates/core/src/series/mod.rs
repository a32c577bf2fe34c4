//! Truncated formal power series in `(x, y1, y2)` with complex coefficients.
//!
//! Truncation is by total degree. Terms are stored sparsely and iterate in
//! graded-lexicographic order. After every operation coefficients with
//! `|c| <= 1e-12 * max(1, max |coeff|)` are dropped.

pub(crate) mod text;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use num_complex::Complex64 as Complex;

use crate::error::{Error, Result};

pub use text::{parse_series, ParseError};

/// Relative threshold under which a coefficient counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y1,
    Y2,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y1, Var::Y2];

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y1 => 1,
            Var::Y2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y1 => "y1",
            Var::Y2 => "y2",
        }
    }
}

/// Exponent triple of a monomial `x^k0 y1^k1 y2^k2`.
///
/// Ordered by total degree first, then with higher powers of `x`, then of
/// `y1`, coming first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Exponent {
    pub k0: u32,
    pub k1: u32,
    pub k2: u32,
}

impl Exponent {
    pub const fn new(k0: u32, k1: u32, k2: u32) -> Self {
        Exponent { k0, k1, k2 }
    }

    pub fn degree(&self) -> u32 {
        self.k0 + self.k1 + self.k2
    }

    pub fn get(&self, var: Var) -> u32 {
        match var {
            Var::X => self.k0,
            Var::Y1 => self.k1,
            Var::Y2 => self.k2,
        }
    }

    pub fn with(mut self, var: Var, value: u32) -> Self {
        match var {
            Var::X => self.k0 = value,
            Var::Y1 => self.k1 = value,
            Var::Y2 => self.k2 = value,
        }
        self
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.k0, self.k1, self.k2]
    }

    /// All exponents of total degree exactly `d`, in graded-lex order.
    pub fn of_degree(d: u32) -> impl Iterator<Item = Exponent> {
        (0..=d)
            .rev()
            .flat_map(move |k0| (0..=d - k0).rev().map(move |k1| Exponent::new(k0, k1, d - k0 - k1)))
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, o: Exponent) -> Exponent {
        Exponent::new(self.k0 + o.k0, self.k1 + o.k1, self.k2 + o.k2)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(other.k0.cmp(&self.k0))
            .then(other.k1.cmp(&self.k1))
            .then(other.k2.cmp(&self.k2))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A complex power series in `(x, y1, y2)` known up to total degree `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    order: u32,
    terms: BTreeMap<Exponent, Complex>,
}

impl TruncatedSeries {
    pub fn zero(order: u32) -> Self {
        TruncatedSeries { order, terms: BTreeMap::new() }
    }

    pub fn constant(c: Complex, order: u32) -> Self {
        Self::monomial(Exponent::default(), c, order)
    }

    pub fn one(order: u32) -> Self {
        Self::constant(ONE, order)
    }

    pub fn var(var: Var, order: u32) -> Self {
        Self::monomial(Exponent::default().with(var, 1), ONE, order)
    }

    pub fn monomial(exp: Exponent, c: Complex, order: u32) -> Self {
        Self::from_terms(order, [(exp, c)])
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Repeated
    /// exponents are summed and terms above `order` are dropped.
    pub fn from_terms<I>(order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, Complex)>,
    {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if e.degree() <= order {
                *map.entry(e).or_insert(ZERO) += c;
            }
        }
        let mut s = TruncatedSeries { order, terms: map };
        s.prune();
        s
    }

    /// Univariate series `sum c_k x^k` from a dense coefficient list.
    pub fn univariate(coeffs: &[Complex], order: u32) -> Self {
        Self::from_terms(
            order,
            coeffs.iter().enumerate().map(|(k, &c)| (Exponent::new(k as u32, 0, 0), c)),
        )
    }

    fn prune(&mut self) {
        let order = self.order;
        let scale = self.terms.values().fold(1.0_f64, |m, c| m.max(c.norm()));
        let tol = ZERO_TOL * scale;
        self.terms.retain(|e, c| e.degree() <= order && c.norm() > tol);
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, Complex)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: Exponent) -> Complex {
        self.terms.get(&exp).copied().unwrap_or(ZERO)
    }

    pub fn constant_term(&self) -> Complex {
        self.coeff(Exponent::default())
    }

    /// Largest coefficient modulus, 0 for the zero series.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Krull order: lowest total degree of a stored term, `None` when zero.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(Exponent::degree)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Exponent::degree)
    }

    pub fn max_exponent(&self, var: Var) -> u32 {
        self.terms.keys().map(|e| e.get(var)).max().unwrap_or(0)
    }

    /// Drops the terms above `order` (never raises the order).
    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let mut s = TruncatedSeries {
            order,
            terms: self.terms.iter().filter(|(e, _)| e.degree() <= order).map(|(e, c)| (*e, *c)).collect(),
        };
        s.prune();
        s
    }

    /// Declares the stored terms exact up to `order`. Use for polynomials.
    pub fn with_order(&self, order: u32) -> Self {
        Self::from_terms(order, self.terms())
    }

    /// Homogeneous part of degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        Self::from_terms(self.order, self.terms().filter(|(e, _)| e.degree() == d))
    }

    pub fn map_coeffs(&self, f: impl Fn(Exponent, Complex) -> Complex) -> Self {
        Self::from_terms(self.order, self.terms().map(|(e, c)| (e, f(e, c))))
    }

    pub fn scale(&self, c: Complex) -> Self {
        self.map_coeffs(|_, a| a * c)
    }

    /// Whether the terms without `x` are all numerically zero.
    pub fn is_x_divisible(&self) -> bool {
        self.terms.keys().all(|e| e.k0 > 0)
    }

    /// Divides by `x`. The caller checks divisibility first.
    pub fn div_x(&self) -> Self {
        Self::from_terms(
            self.order.saturating_sub(1),
            self.terms().filter(|(e, _)| e.k0 > 0).map(|(e, c)| (Exponent::new(e.k0 - 1, e.k1, e.k2), c)),
        )
    }

    /// Multiplies by the monomial `x^k0 y1^k1 y2^k2`.
    pub fn shift(&self, by: Exponent) -> Self {
        Self::from_terms(self.order + by.degree(), self.terms().map(|(e, c)| (e + by, c)))
    }

    /// Restriction to `x = 0`.
    pub fn at_x_zero(&self) -> Self {
        Self::from_terms(self.order, self.terms().filter(|(e, _)| e.k0 == 0))
    }

    pub fn eval(&self, point: [Complex; 3]) -> Complex {
        self.terms
            .iter()
            .map(|(e, c)| c * point[0].powu(e.k0) * point[1].powu(e.k1) * point[2].powu(e.k2))
            .sum()
    }

    /// Whether every coefficient of `self - other` is within
    /// `tol * max(1, scale)` where scale is the larger operand magnitude.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = self.max_abs().max(other.max_abs()).max(1.0);
        self.max_diff(other) <= tol * scale
    }

    /// Largest coefficient deviation over the common truncation order.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let order = self.order.min(other.order);
        let mut worst: f64 = 0.0;
        for (e, c) in self.terms().chain(other.terms()) {
            if e.degree() <= order {
                worst = worst.max((c - other.coeff(e)).norm()).max((self.coeff(e) - c).norm());
            }
        }
        worst
    }

    /// Cauchy product keeping every term of degree `<= order`.
    ///
    /// The operand orders are not consulted, so the caller is responsible
    /// for the result being meaningful up to `order`.
    pub fn mul_to(&self, other: &Self, order: u32) -> Self {
        let mut map: BTreeMap<Exponent, Complex> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let da = ea.degree();
            if da > order {
                break;
            }
            for (eb, cb) in &other.terms {
                if da + eb.degree() > order {
                    break;
                }
                *map.entry(*ea + *eb).or_insert(ZERO) += ca * cb;
            }
        }
        let mut s = TruncatedSeries { order, terms: map };
        s.prune();
        s
    }

    pub fn powu(&self, n: u32) -> Self {
        let mut acc = Self::one(self.order);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn invert_unit(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.norm() <= ZERO_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotAUnit);
        }
        let inv0 = ONE / c0;
        // u = c0 (1 + w), u^-1 = c0^-1 sum (-w)^k
        let w = (self - &Self::constant(c0, self.order)).scale(-inv0);
        let mut term = Self::one(self.order);
        let mut acc = Self::one(self.order);
        for _ in 0..self.order {
            term = &term * &w;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.scale(inv0))
    }

    /// Composition `f(gx, g1, g2)`.
    ///
    /// Every substituted series that `f` actually depends on must vanish at
    /// the origin.
    pub fn substitute(&self, gx: &Self, g1: &Self, g2: &Self) -> Result<Self> {
        let gs = [gx, g1, g2];
        let mut order = self.order;
        for var in Var::ALL {
            let g = gs[var.index()];
            if self.max_exponent(var) == 0 {
                continue;
            }
            if g.constant_term() != ZERO {
                return Err(Error::DivergentSubstitution);
            }
            order = order.min(g.order);
        }

        let powers: Vec<Vec<Self>> = Var::ALL
            .iter()
            .map(|&var| {
                let g = gs[var.index()];
                let mut p = vec![Self::one(order)];
                for _ in 0..self.max_exponent(var) {
                    let next = p.last().unwrap().mul_to(g, order);
                    p.push(next);
                }
                p
            })
            .collect();

        let mut map: BTreeMap<Exponent, Complex> = BTreeMap::new();
        let mut xy1_cache: BTreeMap<(u32, u32), Self> = BTreeMap::new();
        for (e, c) in self.terms() {
            let px = &powers[0][e.k0 as usize];
            let p1 = &powers[1][e.k1 as usize];
            let p2 = &powers[2][e.k2 as usize];
            let val = |p: &Self| p.valuation().unwrap_or(u32::MAX);
            if val(px).saturating_add(val(p1)).saturating_add(val(p2)) > order {
                continue;
            }
            let head = xy1_cache.entry((e.k0, e.k1)).or_insert_with(|| px.mul_to(p1, order));
            let prod = head.mul_to(p2, order);
            for (pe, pc) in prod.terms() {
                *map.entry(pe).or_insert(ZERO) += c * pc;
            }
        }
        let mut s = TruncatedSeries { order, terms: map };
        s.prune();
        Ok(s)
    }

    pub fn partial_derivative(&self, var: Var) -> Self {
        Self::from_terms(
            self.order.saturating_sub(1),
            self.terms().filter(|(e, _)| e.get(var) > 0).map(|(e, c)| {
                let k = e.get(var);
                (e.with(var, k - 1), c * k as f64)
            }),
        )
    }

    fn is_univariate(&self) -> bool {
        self.terms.keys().all(|e| e.k1 == 0 && e.k2 == 0)
    }

    /// Dense coefficients `[c_0, ..., c_order]` of a univariate series.
    pub fn univariate_coeffs(&self) -> Result<Vec<Complex>> {
        if !self.is_univariate() {
            return Err(Error::NotUnivariate);
        }
        Ok((0..=self.order).map(|k| self.coeff(Exponent::new(k, 0, 0))).collect())
    }

    /// Compositional inverse of a univariate series with `h(0) = 0`,
    /// `h'(0) != 0`, solved degree by degree.
    pub fn univariate_inverse(&self) -> Result<Self> {
        let h = self.univariate_coeffs()?;
        let n = self.order as usize;
        let scale = self.max_abs().max(1.0);
        if h[0].norm() > ZERO_TOL * scale {
            return Err(Error::NotInvertible("h(0) is not zero"));
        }
        if n == 0 || h[1].norm() <= ZERO_TOL * scale {
            return Err(Error::NotInvertible("h'(0) is numerically zero"));
        }
        let inv1 = ONE / h[1];
        let mut g = vec![ZERO; n + 1];
        g[1] = inv1;
        for d in 2..=n {
            // with g_d = 0, [h(g)]_d must be cancelled by h_1 g_d
            let hg = dense::compose(&h, &g, n);
            g[d] = -hg[d] * inv1;
        }
        Ok(Self::univariate(&g, self.order))
    }

    /// Termwise `a^k -> a^(k+1)/(k+1)` for a univariate series.
    pub fn antiderivative(&self) -> Result<Self> {
        let c = self.univariate_coeffs()?;
        Ok(Self::from_terms(
            self.order + 1,
            c.iter().enumerate().map(|(k, &ck)| (Exponent::new(k as u32 + 1, 0, 0), ck / (k as f64 + 1.0))),
        ))
    }

    /// `u^s` on the principal branch of `u(0)^s`.
    pub fn binomial_power(&self, s: Complex) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.norm() <= ZERO_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotAUnit);
        }
        self.binomial_power_with(s, c0.powc(s))
    }

    /// `u^s` with the branch of `u(0)^s` supplied by the caller.
    pub fn binomial_power_with(&self, s: Complex, lead: Complex) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.norm() <= ZERO_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotAUnit);
        }
        let w = (self - &Self::constant(c0, self.order)).scale(ONE / c0);
        let mut acc = Self::one(self.order);
        let mut wj = Self::one(self.order);
        let mut binom = ONE;
        for j in 1..=self.order {
            wj = &wj * &w;
            if wj.is_zero() {
                break;
            }
            binom = binom * (s - (j - 1) as f64) / j as f64;
            acc = &acc + &wj.scale(binom);
        }
        Ok(acc.scale(lead))
    }
}

/// Generalized binomial coefficient `s (s-1) ... (s-j+1) / j!`.
pub fn binomial(s: Complex, j: u32) -> Complex {
    (0..j).fold(ONE, |acc, i| acc * (s - i as f64) / (i + 1) as f64)
}

/// Dense univariate helpers.
pub(crate) mod dense {
    use super::{Complex, ZERO};

    pub fn mul(a: &[Complex], b: &[Complex], n: usize) -> Vec<Complex> {
        let mut out = vec![ZERO; n + 1];
        for (i, ai) in a.iter().enumerate().take(n + 1) {
            for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
                out[i + j] += ai * bj;
            }
        }
        out
    }

    /// `f(g(v))` truncated at degree `n`, assuming `g(0) = 0`.
    pub fn compose(f: &[Complex], g: &[Complex], n: usize) -> Vec<Complex> {
        // Horner
        let mut acc = vec![ZERO; n + 1];
        for &fk in f.iter().take(n + 1).rev() {
            acc = mul(&acc, g, n);
            acc[0] += fk;
        }
        acc
    }
}

impl Default for TruncatedSeries {
    fn default() -> Self {
        Self::zero(0)
    }
}

fn combine(a: &TruncatedSeries, b: &TruncatedSeries, sign: f64) -> TruncatedSeries {
    let order = a.order.min(b.order);
    let mut map: BTreeMap<Exponent, Complex> =
        a.terms.iter().filter(|(e, _)| e.degree() <= order).map(|(e, c)| (*e, *c)).collect();
    for (e, c) in b.terms.iter().filter(|(e, _)| e.degree() <= order) {
        *map.entry(*e).or_insert(ZERO) += c * sign;
    }
    let mut s = TruncatedSeries { order, terms: map };
    s.prune();
    s
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        combine(self, rhs, -1.0)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.mul_to(rhs, self.order.min(rhs.order))
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(-ONE)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::write_series(self, f)
    }
}
