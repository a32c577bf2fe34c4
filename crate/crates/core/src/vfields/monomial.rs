use std::collections::BTreeMap;

use super::VectorField;
use crate::error::{Error, Result};
use crate::series::{Complex, Exponent, TruncatedSeries, ZERO};

/// `x^k S(mu)` with `k_j >= -1` and at most one entry equal to `-1`.
///
/// When `k_j = -1` only `mu_j` may be nonzero: the term is then a
/// translation-type field such as `x^k0 ∂y1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialTerm {
    pub k: [i32; 3],
    pub mu: [Complex; 3],
}

impl MonomialTerm {
    /// `|k|`, which equals the Krull order of the assembled field minus one.
    pub fn degree(&self) -> i32 {
        self.k.iter().sum()
    }

    pub fn is_valid(&self) -> bool {
        let negatives: Vec<usize> = (0..3).filter(|&j| self.k[j] < 0).collect();
        if self.k.iter().any(|&kj| kj < -1) || negatives.len() > 1 {
            return false;
        }
        negatives.iter().all(|&j| (0..3).all(|i| i == j || self.mu[i] == ZERO))
    }

    /// The field `x^k S(mu)` truncated at `order`.
    pub fn to_field(&self, order: u32) -> VectorField {
        debug_assert!(self.is_valid(), "invalid monomial {self:?}");
        let comp = |j: usize| {
            if self.mu[j] == ZERO {
                return TruncatedSeries::zero(order);
            }
            let mut e = self.k;
            e[j] += 1;
            let exp = Exponent::new(e[0] as u32, e[1] as u32, e[2] as u32);
            TruncatedSeries::monomial(exp, self.mu[j], order)
        };
        VectorField::new(comp(0), comp(1), comp(2))
    }
}

/// The unique decomposition of a singular field into monomial fields, in
/// graded order of `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialExpansion {
    pub order: u32,
    pub terms: Vec<MonomialTerm>,
}

impl MonomialExpansion {
    pub fn assemble(&self) -> VectorField {
        let mut comps: [Vec<(Exponent, Complex)>; 3] = Default::default();
        for t in &self.terms {
            for (j, comp) in comps.iter_mut().enumerate() {
                if t.mu[j] != ZERO {
                    let mut e = t.k;
                    e[j] += 1;
                    comp.push((Exponent::new(e[0] as u32, e[1] as u32, e[2] as u32), t.mu[j]));
                }
            }
        }
        let [bx, b1, b2] = comps.map(|terms| TruncatedSeries::from_terms(self.order, terms));
        VectorField::new(bx, b1, b2)
    }

    pub fn get(&self, k: [i32; 3]) -> Option<&MonomialTerm> {
        self.terms.iter().find(|t| t.k == k)
    }
}

fn graded_key(k: [i32; 3]) -> (i32, i32, i32, i32) {
    (k[0] + k[1] + k[2], -k[0], -k[1], -k[2])
}

pub fn monomial_expand(field: &VectorField) -> Result<MonomialExpansion> {
    if !field.is_singular() {
        return Err(Error::NotSingular);
    }
    let mut map: BTreeMap<(i32, i32, i32, i32), MonomialTerm> = BTreeMap::new();
    for (j, comp) in field.components().into_iter().enumerate() {
        for (e, c) in comp.terms() {
            let mut k = [e.k0 as i32, e.k1 as i32, e.k2 as i32];
            k[j] -= 1;
            let entry = map.entry(graded_key(k)).or_insert(MonomialTerm { k, mu: [ZERO; 3] });
            entry.mu[j] = c;
        }
    }
    Ok(MonomialExpansion { order: field.order(), terms: map.into_values().collect() })
}
