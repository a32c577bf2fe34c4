//! Formal diffeomorphisms fixing the origin, represented by the images of the
//! coordinate functions `(x, y1, y2)`.

use super::{bracket, lie_derivative, KrullOrder, VectorField};
use crate::error::{Error, Result};
use crate::series::{Complex, Exponent, TruncatedSeries, Var, ZERO, ZERO_TOL};

type Mat3 = [[Complex; 3]; 3];

/// A formal map `p -> (phi_x(p), phi_1(p), phi_2(p))` with `Phi(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diffeo {
    map: [TruncatedSeries; 3],
}

impl Diffeo {
    pub fn new(images: [TruncatedSeries; 3]) -> Result<Self> {
        if images.iter().any(|s| s.constant_term() != ZERO) {
            return Err(Error::NotInvertible("map does not fix the origin"));
        }
        Ok(Diffeo { map: images })
    }

    pub fn identity(order: u32) -> Self {
        Diffeo { map: Var::ALL.map(|v| TruncatedSeries::var(v, order)) }
    }

    pub fn images(&self) -> &[TruncatedSeries; 3] {
        &self.map
    }

    pub fn image(&self, var: Var) -> &TruncatedSeries {
        &self.map[var.index()]
    }

    pub fn order(&self) -> u32 {
        self.map.iter().map(TruncatedSeries::order).min().unwrap_or(0)
    }

    /// `f ∘ Phi`.
    pub fn pullback(&self, f: &TruncatedSeries) -> TruncatedSeries {
        f.substitute(&self.map[0], &self.map[1], &self.map[2]).expect("diffeos fix the origin")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Diffeo) -> Diffeo {
        Diffeo { map: self.map.clone().map(|s| inner.pullback(&s)) }
    }

    /// Jacobian matrix at the origin, row `i` holding the linear part of
    /// the `i`-th image.
    pub fn linear_part(&self) -> Mat3 {
        let unit = |v: Var| Exponent::default().with(v, 1);
        self.map.clone().map(|s| Var::ALL.map(|v| s.coeff(unit(v))))
    }

    pub fn is_fibered(&self, tol: f64) -> bool {
        self.map[0].approx_eq(&TruncatedSeries::var(Var::X, self.map[0].order()), tol)
    }

    pub fn approx_eq(&self, other: &Diffeo, tol: f64) -> bool {
        self.map.iter().zip(&other.map).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn max_diff(&self, other: &Diffeo) -> f64 {
        self.map.iter().zip(&other.map).map(|(a, b)| a.max_diff(b)).fold(0.0, f64::max)
    }

    /// Compositional inverse, solved degree by degree from the linear part.
    pub fn inverse(&self) -> Result<Diffeo> {
        let order = self.order();
        let m = self.linear_part();
        let minv = inverse3(&m).ok_or(Error::NotInvertible("linear part is singular"))?;
        let coords = Diffeo::identity(order);
        let linear = |row: &[Complex; 3]| {
            TruncatedSeries::from_terms(
                order,
                Var::ALL.iter().map(|&v| (Exponent::default().with(v, 1), row[v.index()])),
            )
        };
        // Phi = M + R with R of order >= 2, so Psi = M^-1 (id - R(Psi))
        let rest: Vec<TruncatedSeries> = self.map.iter().zip(m.iter()).map(|(s, row)| s - &linear(row)).collect();
        let apply = |vecs: &[TruncatedSeries]| -> [TruncatedSeries; 3] {
            std::array::from_fn(|i| {
                let mut acc = TruncatedSeries::zero(order);
                for (j, v) in vecs.iter().enumerate() {
                    acc = &acc + &v.scale(minv[i][j]);
                }
                acc
            })
        };
        let mut psi = Diffeo { map: apply(&coords.map) };
        for _ in 1..order {
            let residual: Vec<TruncatedSeries> =
                coords.map.iter().zip(&rest).map(|(c, r)| c - &psi.pullback(r)).collect();
            psi = Diffeo { map: apply(&residual) };
        }
        Ok(psi)
    }
}

fn det3(m: &Mat3) -> Complex {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inverse3(m: &Mat3) -> Option<Mat3> {
    let det = det3(m);
    let scale = m.iter().flatten().fold(1.0_f64, |a, c| a.max(c.norm()));
    if det.norm() <= 1e-12 * scale.powi(3) {
        return None;
    }
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    Some(adj.map(|row| row.map(|c| c / det)))
}

/// A diffeomorphism `(x, y) -> (x, phi1(x, y), phi2(x, y))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberedDiffeo {
    phi1: TruncatedSeries,
    phi2: TruncatedSeries,
}

impl FiberedDiffeo {
    /// Checks that both images vanish at the origin and that the linear
    /// y-part is invertible.
    pub fn new(phi1: TruncatedSeries, phi2: TruncatedSeries) -> Result<Self> {
        if phi1.constant_term() != ZERO || phi2.constant_term() != ZERO {
            return Err(Error::NotInvertible("map does not fix the origin"));
        }
        let d = FiberedDiffeo { phi1, phi2 };
        let a = d.linear_y_part();
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let scale = a.iter().flatten().fold(1.0_f64, |m, c| m.max(c.norm()));
        if det.norm() <= ZERO_TOL * scale * scale {
            return Err(Error::NotInvertible("linear y-part is singular"));
        }
        Ok(d)
    }

    pub fn identity(order: u32) -> Self {
        FiberedDiffeo { phi1: TruncatedSeries::var(Var::Y1, order), phi2: TruncatedSeries::var(Var::Y2, order) }
    }

    /// `(x, y1, y2) -> (x, a11 y1 + a12 y2, a21 y1 + a22 y2)`.
    pub fn linear(a: [[Complex; 2]; 2], order: u32) -> Result<Self> {
        let y1 = TruncatedSeries::var(Var::Y1, order);
        let y2 = TruncatedSeries::var(Var::Y2, order);
        let row = |r: [Complex; 2]| &y1.scale(r[0]) + &y2.scale(r[1]);
        Self::new(row(a[0]), row(a[1]))
    }

    /// `diag(1, t1, t2)`.
    pub fn diag(t1: Complex, t2: Complex, order: u32) -> Result<Self> {
        Self::linear([[t1, ZERO], [ZERO, t2]], order)
    }

    pub fn phi1(&self) -> &TruncatedSeries {
        &self.phi1
    }

    pub fn phi2(&self) -> &TruncatedSeries {
        &self.phi2
    }

    pub fn order(&self) -> u32 {
        self.phi1.order().min(self.phi2.order())
    }

    pub fn linear_y_part(&self) -> [[Complex; 2]; 2] {
        let e1 = Exponent::new(0, 1, 0);
        let e2 = Exponent::new(0, 0, 1);
        [[self.phi1.coeff(e1), self.phi1.coeff(e2)], [self.phi2.coeff(e1), self.phi2.coeff(e2)]]
    }

    pub fn to_diffeo(&self) -> Diffeo {
        Diffeo { map: [TruncatedSeries::var(Var::X, self.order()), self.phi1.clone(), self.phi2.clone()] }
    }

    /// Views `d` as fibered when its x-image is `x` within `tol`.
    pub fn from_diffeo(d: &Diffeo, tol: f64) -> Option<Self> {
        if !d.is_fibered(tol) {
            return None;
        }
        Self::new(d.map[1].clone(), d.map[2].clone()).ok()
    }

    pub fn pullback(&self, f: &TruncatedSeries) -> TruncatedSeries {
        self.to_diffeo().pullback(f)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &FiberedDiffeo) -> FiberedDiffeo {
        let inner = inner.to_diffeo();
        FiberedDiffeo { phi1: inner.pullback(&self.phi1), phi2: inner.pullback(&self.phi2) }
    }

    pub fn inverse(&self) -> Result<FiberedDiffeo> {
        invert_diffeo(self)
    }

    pub fn approx_eq(&self, other: &FiberedDiffeo, tol: f64) -> bool {
        self.phi1.approx_eq(&other.phi1, tol) && self.phi2.approx_eq(&other.phi2, tol)
    }

    pub fn max_diff(&self, other: &FiberedDiffeo) -> f64 {
        self.phi1.max_diff(&other.phi1).max(self.phi2.max_diff(&other.phi2))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&FiberedDiffeo::identity(self.order()), tol)
    }
}

pub fn invert_diffeo(phi: &FiberedDiffeo) -> Result<FiberedDiffeo> {
    let inv = phi.to_diffeo().inverse()?;
    let [_, phi1, phi2] = inv.map;
    Ok(FiberedDiffeo { phi1, phi2 })
}

/// `seq[n-1] ∘ ... ∘ seq[0]`.
pub fn compose_diffeos(seq: &[FiberedDiffeo], order: u32) -> FiberedDiffeo {
    seq.iter().fold(FiberedDiffeo::identity(order), |acc, phi| phi.compose(&acc))
}

/// Sums `sum_k L_X^k(coordinate) / k!`, failing if the series has not
/// terminated after `order + 1` steps.
fn exp_flow(x: &VectorField) -> Result<Diffeo> {
    let order = x.order();
    let map = Var::ALL.map(|v| {
        let mut term = TruncatedSeries::var(v, order);
        let mut acc = term.clone();
        for k in 1..=order + 1 {
            term = lie_derivative(x, &term).scale(Complex::new(1.0 / k as f64, 0.0));
            if term.is_zero() {
                return Ok(acc);
            }
            acc = &acc + &term;
        }
        Err(Error::OrderTooLow(x.krull_order().finite().unwrap_or(0)))
    });
    let [a, b, c] = map;
    Diffeo::new([a?, b?, c?])
}

/// Time-one flow of a field of order at least 2.
pub fn exp_field(x: &VectorField) -> Result<Diffeo> {
    match x.krull_order() {
        KrullOrder::Finite(k) if k < 2 => Err(Error::OrderTooLow(k)),
        _ => exp_flow(x),
    }
}

/// Time-one flow of a singular field whose Lie derivative is nilpotent at
/// the working order, such as the translations `x^k ∂y_i` with `k >= 1`.
pub(crate) fn exp_nilpotent(x: &VectorField) -> Result<Diffeo> {
    if !x.is_singular() {
        return Err(Error::NotSingular);
    }
    exp_flow(x)
}

/// `(DPhi · Y) ∘ Phi^-1` for a general diffeomorphism.
pub fn push_forward_general(phi: &Diffeo, y: &VectorField) -> Result<VectorField> {
    let inv = phi.inverse()?;
    let comps = phi.map.clone().map(|p| inv.pullback(&lie_derivative(y, &p)));
    Ok(VectorField::from_components(comps))
}

pub fn push_forward(phi: &FiberedDiffeo, y: &VectorField) -> Result<VectorField> {
    push_forward_general(&phi.to_diffeo(), y)
}

/// `exp(G)_* Y` through the adjoint series `sum_k (-1)^k ad_G^k(Y) / k!`.
///
/// `G` must be singular with nilpotent adjoint action at the working order,
/// which holds for order at least 2 and for translations `x^k ∂y_i`.
pub fn push_forward_by_exp(g: &VectorField, y: &VectorField) -> Result<VectorField> {
    if !g.is_singular() {
        return Err(Error::NotSingular);
    }
    // a translation keeps the total degree but lowers the y-degree
    let cap = 2 * y.order().min(g.order()) + 2;
    let mut term = y.clone();
    let mut acc = y.clone();
    for k in 1..=cap {
        term = bracket(g, &term).scale(Complex::new(-1.0 / k as f64, 0.0));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = &acc + &term;
    }
    Err(Error::OrderTooLow(g.krull_order().finite().unwrap_or(0)))
}
