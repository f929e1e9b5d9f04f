//! Brute-force references over the coset decomposition
//! `Λ = ⋃ (offset + 2Z^n)`, where the offsets are the `2^(Σk)` codeword
//! layers with `z = 0`. Exact and obviously correct, but only usable while
//! `Σ k_l` is small.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lattice::{ConstructionDLattice, DyadicVector};

/// Largest `Σ k_l` the oracles will enumerate.
pub const ORACLE_BUDGET_BITS: usize = 20;

/// The coset leaders of `Λ / 2Z^n`.
#[derive(Clone, Debug)]
pub struct CosetDecomposition {
    n: usize,
    denom_exp: u32,
    /// One generating layer per message bit, in units of `2^-(a-1)`: level-1
    /// bits first, then level 2, and so on.
    layers: Vec<Vec<i64>>,
}

/// Builds the coset decomposition of a lattice.
pub fn coset_offsets(lat: &ConstructionDLattice) -> Result<CosetDecomposition> {
    let bits = lat.total_code_dimension();
    if bits > ORACLE_BUDGET_BITS {
        return Err(Error::BudgetExceeded {
            what: "coset enumeration",
            bits,
            limit: ORACLE_BUDGET_BITS,
        });
    }
    let a = lat.levels();
    let n = lat.dimension();
    let g = lat.family().code(1).generator();
    let mut layers = Vec::with_capacity(bits);
    for (l, k) in lat.code_dimensions().into_iter().enumerate() {
        let w = 1i64 << (a - (l + 1));
        for row in &g[..k] {
            layers.push((0..n).map(|i| if row.get(i) { w } else { 0 }).collect());
        }
    }
    Ok(CosetDecomposition {
        n,
        denom_exp: lat.denominator_exp(),
        layers,
    })
}

impl CosetDecomposition {
    pub fn len(&self) -> usize {
        1 << self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn modulus(&self) -> i64 {
        2i64 << self.denom_exp
    }

    /// Offset of coset `index`, reduced into `[0, 2)` per coordinate and
    /// expressed as numerators over `2^denom_exp`.
    pub fn offset_numerators(&self, index: usize) -> Vec<i64> {
        let m = self.modulus();
        let mut v = vec![0i64; self.n];
        for (t, layer) in self.layers.iter().enumerate() {
            if (index >> t) & 1 == 1 {
                for (acc, &x) in v.iter_mut().zip(layer) {
                    *acc += x;
                }
            }
        }
        v.iter_mut().for_each(|x| *x = x.rem_euclid(m));
        v
    }

    pub fn offset(&self, index: usize) -> DyadicVector {
        DyadicVector::new(self.offset_numerators(index), self.denom_exp)
    }

    pub fn offsets(&self) -> impl Iterator<Item = DyadicVector> + '_ {
        (0..self.len()).map(|i| self.offset(i))
    }

    /// Visits every offset once, in Gray-code order.
    fn for_each_gray(&self, mut f: impl FnMut(usize, &[i64])) {
        let m = self.modulus();
        let mut v = vec![0i64; self.n];
        let mut gray = 0usize;
        f(gray, &v);
        for step in 1..self.len() {
            let t = step.trailing_zeros() as usize;
            let sign = if (gray >> t) & 1 == 1 { -1 } else { 1 };
            gray ^= 1 << t;
            for (acc, &x) in v.iter_mut().zip(&self.layers[t]) {
                *acc = (*acc + sign * x).rem_euclid(m);
            }
            f(gray, &v);
        }
    }

    /// Nearest lattice point to `y` and its squared distance. Ties go to the
    /// lowest coset index; within a coset each coordinate rounds half away
    /// from zero.
    pub fn nearest(&self, y: &[f64]) -> (DyadicVector, f64) {
        assert_eq!(y.len(), self.n, "received vector length");
        let s = (1i64 << self.denom_exp) as f64;
        let m = self.modulus();
        let mut best: Option<(f64, Vec<i64>)> = None;
        for index in 0..self.len() {
            let o = self.offset_numerators(index);
            let mut dist = 0.0;
            let mut point = Vec::with_capacity(self.n);
            for (&oi, &yi) in o.iter().zip(y) {
                let off = oi as f64 / s;
                let k = ((yi - off) / 2.0).round();
                let p = off + 2.0 * k;
                dist += (yi - p) * (yi - p);
                point.push(oi + m * k as i64);
            }
            if best.as_ref().is_none_or(|(d, _)| dist < *d) {
                best = Some((dist, point));
            }
        }
        let (dist, point) = best.expect("at least one coset");
        (DyadicVector::new(point, self.denom_exp), dist)
    }

    /// Exact squared minimum distance of the lattice.
    pub fn min_dist_sq(&self) -> BigRational {
        let s = 1i64 << self.denom_exp;
        let m = self.modulus();
        // The coarse lattice contributes 2·e_i, of squared norm 4.
        let mut best = 4 * s * s;
        self.for_each_gray(|index, v| {
            if index == 0 {
                return;
            }
            let norm: i64 = v.iter().map(|&o| o.min(m - o).pow(2)).sum();
            best = best.min(norm);
        });
        BigRational::new(BigInt::from(best), BigInt::from(s * s))
    }
}

/// Maximum-likelihood (nearest point) decoding by coset enumeration.
pub fn ml_decode(lat: &ConstructionDLattice, y: &[f64]) -> Result<DyadicVector> {
    Ok(coset_offsets(lat)?.nearest(y).0)
}

/// Exact `d²_min` by coset enumeration.
pub fn lattice_min_dist_sq(lat: &ConstructionDLattice) -> Result<BigRational> {
    Ok(coset_offsets(lat)?.min_dist_sq())
}
