#![allow(dead_code)]

use drsn_core::series::{Complex, Exponent, TruncatedSeries, Var};
use drsn_core::vfields::{MonomialTerm, VectorField};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn rand_complex(rng: &mut impl Rng) -> Complex {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random polynomial with terms of degree in `lo..=hi`, each present with
/// probability `density`.
pub fn rand_poly(rng: &mut impl Rng, lo: u32, hi: u32, density: f64, order: u32) -> TruncatedSeries {
    let mut terms = Vec::new();
    for d in lo..=hi {
        for e in Exponent::of_degree(d) {
            if rng.gen_bool(density) {
                terms.push((e, rand_complex(rng)));
            }
        }
    }
    TruncatedSeries::from_terms(order, terms)
}

pub fn rand_field(rng: &mut impl Rng, lo: u32, hi: u32, density: f64, order: u32) -> VectorField {
    VectorField::new(
        rand_poly(rng, lo, hi, density, order),
        rand_poly(rng, lo, hi, density, order),
        rand_poly(rng, lo, hi, density, order),
    )
}

/// Random fibered field (`L_X(x) = 0`) with components of degree in `lo..=hi`.
pub fn rand_fibered_field(rng: &mut impl Rng, lo: u32, hi: u32, density: f64, order: u32) -> VectorField {
    VectorField::new(
        TruncatedSeries::zero(order),
        rand_poly(rng, lo, hi, density, order),
        rand_poly(rng, lo, hi, density, order),
    )
}

pub fn var(v: Var, order: u32) -> TruncatedSeries {
    TruncatedSeries::var(v, order)
}

/// Random monomial `x^k S(0, mu1, mu2)` with `min_degree <= |k| <= max_degree`
/// satisfying the transversally Hamiltonian condition
/// `mu1 (k1 + 1) + mu2 (k2 + 1) = 0`.
pub fn rand_hamiltonian_monomial(rng: &mut impl Rng, min_degree: i32, max_degree: i32) -> MonomialTerm {
    let zero = c(0.0, 0.0);
    loop {
        let k = [rng.gen_range(0..=max_degree + 1), rng.gen_range(-1..=max_degree + 1), rng.gen_range(-1..=max_degree + 1)];
        let deg: i32 = k.iter().sum();
        if (k[1] == -1 && k[2] == -1) || deg < min_degree || deg > max_degree {
            continue;
        }
        let mu = if k[1] == -1 {
            [zero, rand_complex(rng), zero]
        } else if k[2] == -1 {
            [zero, zero, rand_complex(rng)]
        } else {
            let m1 = rand_complex(rng);
            [zero, m1, -m1 * (k[1] + 1) as f64 / (k[2] + 1) as f64]
        };
        return MonomialTerm { k, mu };
    }
}

/// Random monomial `x^k S(0, mu1, mu2)` with `k1, k2 >= 0` and
/// `min_degree <= |k| <= max_degree`, generically not Hamiltonian.
pub fn rand_generic_monomial(rng: &mut impl Rng, min_degree: i32, max_degree: i32) -> MonomialTerm {
    loop {
        let k0 = rng.gen_range(0..=max_degree);
        let k1 = rng.gen_range(0..=max_degree - k0);
        let k2 = rng.gen_range(0..=max_degree - k0 - k1);
        if k0 + k1 + k2 < min_degree {
            continue;
        }
        let zero = c(0.0, 0.0);
        let mu = [zero, rand_complex(rng), rand_complex(rng)];
        return MonomialTerm { k: [k0, k1, k2], mu };
    }
}

pub fn sum_fields(fields: impl IntoIterator<Item = VectorField>, order: u32) -> VectorField {
    fields.into_iter().fold(VectorField::zero(order), |acc, f| &acc + &f)
}

/// A diagonal saddle-node `x S(1, a1, a2) + S(0, -λ, λ)` plus random terms of
/// degree 2 to 4 in the y-components, with `Re(a1 + a2) > 0.25`.
pub fn rand_saddle_node(rng: &mut impl Rng, order: u32) -> VectorField {
    let lambda = rand_complex(rng) * 0.5 + c(1.0, 0.3);
    let a1 = rand_complex(rng);
    let a2 = c(0.5, 0.0) - a1 + rand_complex(rng) * 0.25;
    let frame = VectorField::new(
        TruncatedSeries::monomial(Exponent::new(2, 0, 0), c(1.0, 0.0), order),
        TruncatedSeries::from_terms(order, [(Exponent::new(0, 1, 0), -lambda), (Exponent::new(1, 1, 0), a1)]),
        TruncatedSeries::from_terms(order, [(Exponent::new(0, 0, 1), lambda), (Exponent::new(1, 0, 1), a2)]),
    );
    &frame + &rand_fibered_field(rng, 2, 4, 0.3, order)
}

/// A fibered polynomial diffeomorphism `(x, y1 + p1, y2 + p2)` with `p_i` of
/// degree 2 to 3, plus small `x`-terms.
pub fn rand_tangent_diffeo(rng: &mut impl Rng, order: u32) -> drsn_core::vfields::FiberedDiffeo {
    let p1 = &(&var(Var::Y1, order) + &rand_poly(rng, 2, 3, 0.3, order)) + &var(Var::X, order).scale(rand_complex(rng) * 0.5);
    let p2 = &(&var(Var::Y2, order) + &rand_poly(rng, 2, 3, 0.3, order)) + &var(Var::X, order).scale(rand_complex(rng) * 0.5);
    drsn_core::vfields::FiberedDiffeo::new(p1, p2).expect("tangent to identity in y")
}
