//! Fixtures shared by the criterion benchmarks.

use drsn_core::{Complex, Exponent, TruncatedSeries};

/// Dense polynomial with every monomial of degree `<= degree` present and
/// deterministic nonzero coefficients.
pub fn dense_polynomial(degree: u32, order: u32) -> TruncatedSeries {
    let terms = (0..=degree).flat_map(Exponent::of_degree).enumerate().map(|(i, e)| {
        let t = i as f64 + 1.0;
        (e, Complex::new((0.37 * t).sin(), (0.91 * t).cos()))
    });
    TruncatedSeries::from_terms(order, terms)
}
