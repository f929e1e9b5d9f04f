//! Construction-D lattices built from nested binary code families.
//!
//! Lattice points are row vectors `x · B`. The basis is kept as an integer
//! matrix `B_num` with a global denominator `2^(a-1)`, so every structural
//! identity (determinant, membership, duals) is checked in exact arithmetic.
//!
//! Row `j` of the basis is `c_j / 2^(l-1)` where `l` is the finest level whose
//! code still contains `c_j`; the remaining `n - k_1` rows are `2·e_i` on the
//! coordinates that are not pivots of `C_1`'s reduced generator.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{self, RationalMatrix};
use crate::gf2::{check_nested, BinaryCode, BitVector, NestedCodeFamily, NestingCheck};

/// A vector with entries `num[i] / 2^exp`, stored in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DyadicVector {
    num: Vec<i64>,
    exp: u32,
}

impl DyadicVector {
    pub fn new(mut num: Vec<i64>, mut exp: u32) -> Self {
        while exp > 0 && num.iter().all(|x| x % 2 == 0) {
            num.iter_mut().for_each(|x| *x /= 2);
            exp -= 1;
        }
        DyadicVector { num, exp }
    }

    pub fn from_integers(v: Vec<i64>) -> Self {
        DyadicVector { num: v, exp: 0 }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_integers(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    pub fn numerators(&self) -> &[i64] {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&x| x == 0)
    }

    /// Numerators over the denominator `2^exp`, if the vector is
    /// representable there.
    pub fn numerators_at(&self, exp: u32) -> Option<Vec<i64>> {
        if exp < self.exp {
            return None;
        }
        let f = 1i64 << (exp - self.exp);
        Some(self.num.iter().map(|&x| x * f).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let d = (1u64 << self.exp) as f64;
        self.num.iter().map(|&x| x as f64 / d).collect()
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        let d = BigInt::from(1u64 << self.exp);
        self.num
            .iter()
            .map(|&x| BigRational::new(BigInt::from(x), d.clone()))
            .collect()
    }

    pub fn norm_sq(&self) -> BigRational {
        let s: BigInt = self.num.iter().map(|&x| BigInt::from(x) * x).sum();
        BigRational::new(s, BigInt::from(1u64) << (2 * self.exp))
    }
}

impl fmt::Display for DyadicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .to_rational()
            .iter()
            .map(|x| x.to_string())
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// What a basis row represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    /// `c_j / 2^(level-1)`.
    Code { level: usize },
    /// `2·e_coordinate`.
    Coarse { coordinate: usize },
}

/// Per-coordinate cross section, projection and label group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossSectionInfo {
    pub coordinate: usize,
    /// Smallest basis row (0-based) with a nonzero entry in this column.
    pub first_row: usize,
    /// Level of `first_row`; `None` when only a `2·e_j` row touches the
    /// column.
    pub level: Option<usize>,
    /// Generator of the cross section along `e_j` (always 2).
    pub cross_section: BigRational,
    /// Generator of the projection onto `e_j`.
    pub projection: BigRational,
    pub label_group_order: u64,
}

/// One element `(Z + a_t)·v_j` of a label group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelElement {
    pub label: u64,
    pub offset: BigRational,
    /// `a_t · |v_j|`, the coset representative in coordinate units.
    pub representative: BigRational,
}

/// Lower bounds derived from the component codes.
#[derive(Clone, Debug, PartialEq)]
pub struct CodingGainBounds {
    /// `(1/α)·min{d_1, d_2/4, …, d_a/4^(a-1), 4}`, a lower bound on `d²_min`.
    pub min_dist_sq_bound: BigRational,
    /// The distance bound divided by `det^(2/n)`.
    pub coding_gain_bound: f64,
    /// `α^{-1}·4^(Σk/n)`.
    pub nominal_gain: f64,
    /// `d_l ≥ 4^l / α` for every level.
    pub distance_conditions_hold: bool,
    /// `d_l ≥ 4^l` for every level.
    pub equality_conditions_hold: bool,
}

impl CodingGainBounds {
    /// The nominal gain when the Construction-D distance conditions hold.
    pub fn theorem_bound(&self) -> Option<f64> {
        self.distance_conditions_hold.then_some(self.nominal_gain)
    }
}

/// A Construction-D lattice.
#[derive(Clone, Debug)]
pub struct ConstructionDLattice {
    family: NestedCodeFamily,
    basis: Vec<Vec<i64>>,
    denom_exp: u32,
    row_kinds: Vec<RowKind>,
    hnf: OnceLock<Vec<Vec<BigInt>>>,
}

impl PartialEq for ConstructionDLattice {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.basis == other.basis
    }
}

/// Builds the lattice of a nested family.
pub fn construction_d(family: &NestedCodeFamily) -> Result<ConstructionDLattice> {
    if let NestingCheck::Violated { level, reason } = check_nested(family) {
        return Err(Error::InvalidFamily { level, reason });
    }
    let n = family.len();
    let a = family.levels();
    if a > 30 {
        return Err(invalid("at most 30 levels are supported"));
    }
    let denom_exp = (a - 1) as u32;
    let dims = family.dimensions();
    let (family, pivots) = nested_echelon(family)?;
    let c1 = family.code(1);

    let mut basis = Vec::with_capacity(n);
    let mut row_kinds = Vec::with_capacity(n);
    for (j, c) in c1.generator().iter().enumerate() {
        let level = dims.iter().rposition(|&k| j < k).expect("row belongs to C_1") + 1;
        let scale = 1i64 << (a - level);
        basis.push((0..n).map(|i| if c.get(i) { scale } else { 0 }).collect());
        row_kinds.push(RowKind::Code { level });
    }
    let mut pivot = vec![false; n];
    for &p in &pivots {
        pivot[p] = true;
    }
    let coarse = 2i64 << denom_exp;
    for i in (0..n).filter(|&i| !pivot[i]) {
        let mut row = vec![0; n];
        row[i] = coarse;
        basis.push(row);
        row_kinds.push(RowKind::Coarse { coordinate: i });
    }
    if basis.len() != n {
        return Err(Error::Invariant(format!(
            "basis completion produced {} rows for n = {n}",
            basis.len()
        )));
    }
    Ok(ConstructionDLattice {
        family,
        basis,
        denom_exp,
        row_kinds,
        hnf: OnceLock::new(),
    })
}

/// Rewrites C_1's generator so that its rows have distinct pivots, no row has
/// a bit on the pivot of an earlier row and rows of one level block are fully
/// reduced against each other. Only earlier rows or rows of the same block are
/// added to a row, so every `C_l` keeps its span. Returns the rewritten family
/// and the pivot column of each row.
pub fn nested_echelon(family: &NestedCodeFamily) -> Result<(NestedCodeFamily, Vec<usize>)> {
    let n = family.len();
    let dims = family.dimensions();
    let mut rows = family.code(1).generator().to_vec();
    let mut bounds: Vec<usize> = dims.iter().rev().copied().collect();
    bounds.dedup();
    let mut pivots: Vec<usize> = Vec::with_capacity(rows.len());
    let mut start = 0;
    for end in bounds {
        for r in start..end {
            for q in 0..r {
                if rows[r].get(pivots[q]) {
                    let prev = rows[q].clone();
                    rows[r].xor_assign(&prev);
                }
            }
            let p = rows[r]
                .iter_ones()
                .next()
                .ok_or_else(|| Error::Invariant("dependent generator rows".into()))?;
            for q in start..r {
                if rows[q].get(p) {
                    let cur = rows[r].clone();
                    rows[q].xor_assign(&cur);
                }
            }
            pivots.push(p);
        }
        start = end;
    }
    let base = BinaryCode::new(n, rows)?;
    let codes = family
        .codes()
        .iter()
        .map(|c| {
            let code = base.prefix(c.dimension())?;
            Ok(match c.cached_min_distance() {
                Some(d) => code.with_min_distance(d),
                None => code,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((NestedCodeFamily::new(family.alpha(), codes)?, pivots))
}

impl ConstructionDLattice {
    pub fn dimension(&self) -> usize {
        self.family.len()
    }

    pub fn levels(&self) -> usize {
        self.family.levels()
    }

    pub fn alpha(&self) -> u8 {
        self.family.alpha()
    }

    pub fn family(&self) -> &NestedCodeFamily {
        &self.family
    }

    pub fn code_dimensions(&self) -> Vec<usize> {
        self.family.dimensions()
    }

    /// Scaled basis `B_num = 2^(a-1)·B`.
    pub fn basis_numerators(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn denominator_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn row_kinds(&self) -> &[RowKind] {
        &self.row_kinds
    }

    fn scale(&self) -> i64 {
        1i64 << self.denom_exp
    }

    pub fn basis_rational(&self) -> RationalMatrix {
        let d = BigInt::from(self.scale());
        self.basis
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| BigRational::new(BigInt::from(x), d.clone()))
                    .collect()
            })
            .collect()
    }

    /// `Σ_l k_l`.
    pub fn total_code_dimension(&self) -> usize {
        self.code_dimensions().iter().sum()
    }

    /// `2^(n - Σ k_l)`.
    pub fn determinant_formula(&self) -> BigRational {
        let e = self.dimension() as i64 - self.total_code_dimension() as i64;
        let two = BigRational::from_integer(BigInt::from(2));
        if e >= 0 {
            num_traits::pow(two, e as usize)
        } else {
            num_traits::pow(two, (-e) as usize).recip()
        }
    }

    /// `|det B|` from the basis by exact elimination.
    pub fn determinant_from_basis(&self) -> BigRational {
        let d = exact::integer_determinant(&self.basis).abs();
        let denom = BigInt::one() << (self.denom_exp as usize * self.dimension());
        BigRational::new(d, denom)
    }

    /// The determinant, cross-checked between the closed form and the basis.
    pub fn determinant(&self) -> Result<BigRational> {
        let formula = self.determinant_formula();
        let direct = self.determinant_from_basis();
        if formula != direct {
            return Err(Error::Invariant(format!(
                "determinant formula {formula} differs from |det B| = {direct}"
            )));
        }
        Ok(formula)
    }

    /// `det(Λ)^(2/n)`, i.e. `4^(1 - Σk/n)`.
    pub fn normalized_volume(&self) -> f64 {
        let n = self.dimension() as f64;
        4f64.powf(1.0 - self.total_code_dimension() as f64 / n)
    }

    /// `z + Σ_l Σ_j bits_l[j]·c_j / 2^(l-1)` with `z ∈ (2Z)^n`.
    pub fn encode_eq3(&self, z: &[i64], bits: &[BitVector]) -> Result<DyadicVector> {
        let n = self.dimension();
        if z.len() != n {
            return Err(invalid(format!("z has length {}, expected {n}", z.len())));
        }
        if let Some(i) = z.iter().position(|x| x % 2 != 0) {
            return Err(invalid(format!("z[{i}] = {} is odd", z[i])));
        }
        if bits.len() != self.levels() {
            return Err(invalid(format!(
                "{} bit vectors for {} levels",
                bits.len(),
                self.levels()
            )));
        }
        let s = self.scale();
        let mut num: Vec<i64> = z.iter().map(|&x| x * s).collect();
        let g = self.family.code(1).generator();
        for (l, b) in bits.iter().enumerate() {
            let level = l + 1;
            let k = self.family.code(level).dimension();
            if b.len() != k {
                return Err(invalid(format!(
                    "level {level} expects {k} bits, got {}",
                    b.len()
                )));
            }
            let w = 1i64 << (self.levels() - level);
            for j in b.iter_ones() {
                for i in g[j].iter_ones() {
                    num[i] += w;
                }
            }
        }
        Ok(DyadicVector::new(num, self.denom_exp))
    }

    /// `x · B`.
    pub fn encode_b(&self, x: &[i64]) -> Result<DyadicVector> {
        let n = self.dimension();
        if x.len() != n {
            return Err(invalid(format!("x has length {}, expected {n}", x.len())));
        }
        let mut num = vec![0i64; n];
        for (row, &coef) in self.basis.iter().zip(x) {
            if coef != 0 {
                for (acc, &b) in num.iter_mut().zip(row) {
                    *acc += coef * b;
                }
            }
        }
        Ok(DyadicVector::new(num, self.denom_exp))
    }

    fn hnf(&self) -> &[Vec<BigInt>] {
        self.hnf.get_or_init(|| {
            let rows: Vec<Vec<BigInt>> = self
                .basis
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            // 2·e_i lies in the lattice, i.e. 2^a·e_i in scaled units.
            exact::hermite_normal_form_mod(&rows, &BigInt::from(2 * self.scale()))
        })
    }

    /// Hermite normal form of the scaled basis.
    pub fn hermite_form(&self) -> &[Vec<BigInt>] {
        self.hnf()
    }

    /// Whether `v · B^{-1}` is integral.
    pub fn is_lattice_point(&self, v: &DyadicVector) -> bool {
        if v.len() != self.dimension() {
            return false;
        }
        let Some(num) = v.numerators_at(self.denom_exp) else {
            return false;
        };
        let num: Vec<BigInt> = num.into_iter().map(BigInt::from).collect();
        exact::in_row_lattice(self.hnf(), &num)
    }

    /// Splits a point into `z ∈ (2Z)^n` and per-level bits, peeling levels
    /// from the finest: at each level the point's residue mod 2 (in units of
    /// that level) must be a codeword. Returns `None` for non-members.
    pub fn decompose_eq3(&self, v: &DyadicVector) -> Option<(Vec<i64>, Vec<BitVector>)> {
        let a = self.levels();
        let mut num = v.numerators_at(self.denom_exp)?;
        if num.len() != self.dimension() {
            return None;
        }
        let g = self.family.code(1).generator();
        let mut bits = vec![BitVector::zeros(0); a];
        for level in (1..=a).rev() {
            let unit = 1i64 << (a - level);
            let code = self.family.code(level);
            if num.iter().any(|x| x % unit != 0) {
                return None;
            }
            let residue = BitVector::from_bools(
                &num.iter().map(|&x| (x / unit).rem_euclid(2) == 1).collect::<Vec<_>>(),
            );
            if !code.contains(&residue) {
                return None;
            }
            let msg = code.message_of(&residue);
            for j in msg.iter_ones() {
                for i in g[j].iter_ones() {
                    num[i] -= unit;
                }
            }
            bits[level - 1] = msg;
        }
        let coarse = 2 * self.scale();
        if num.iter().any(|x| x % coarse != 0) {
            return None;
        }
        let z = num.iter().map(|x| x / self.scale()).collect();
        Some((z, bits))
    }

    /// `B^{-1}`, verified against `B · B^{-1} = I`.
    pub fn inverse_basis(&self) -> Result<RationalMatrix> {
        let b = self.basis_rational();
        let inv = exact::rational_inverse(&b)
            .ok_or_else(|| Error::Invariant("basis is singular".into()))?;
        if exact::mat_mul(&b, &inv) != exact::identity(self.dimension()) {
            return Err(Error::Invariant("B · B^-1 is not the identity".into()));
        }
        Ok(inv)
    }

    /// Generator of the dual lattice under the row convention, `(B^{-1})^T`.
    pub fn dual_generator(&self) -> Result<RationalMatrix> {
        Ok(exact::transpose(&self.inverse_basis()?))
    }

    /// Cross section, projection and label group of coordinate `j`, read off
    /// the first basis row touching column `j`.
    pub fn cross_section(&self, j: usize) -> Result<CrossSectionInfo> {
        if j >= self.dimension() {
            return Err(invalid(format!("coordinate {j} out of range")));
        }
        let first_row = (0..self.dimension())
            .find(|&r| self.basis[r][j] != 0)
            .ok_or_else(|| Error::Invariant(format!("column {j} is zero")))?;
        let (level, projection, order) = match self.row_kinds[first_row] {
            RowKind::Code { level } => (
                Some(level),
                BigRational::new(BigInt::one(), BigInt::one() << (level - 1)),
                1u64 << level,
            ),
            RowKind::Coarse { .. } => (None, BigRational::from_integer(BigInt::from(2)), 1),
        };
        Ok(CrossSectionInfo {
            coordinate: j,
            first_row,
            level,
            cross_section: BigRational::from_integer(BigInt::from(2)),
            projection,
            label_group_order: order,
        })
    }

    /// Cross section and projection generators of coordinate `j` computed
    /// directly: the smallest `t > 0` with `t·e_j ∈ Λ`, and the gcd of
    /// column `j` of `B`.
    pub fn exact_cross_section(&self, j: usize, inverse: &RationalMatrix) -> (BigRational, BigRational) {
        let t = inverse[j]
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let g = self
            .basis
            .iter()
            .fold(BigInt::zero(), |acc, r| acc.gcd(&BigInt::from(r[j])));
        (
            BigRational::from_integer(t),
            BigRational::new(g, BigInt::from(self.scale())),
        )
    }

    /// Elements of the label group of coordinate `j`, with
    /// `a_t = t·det(P_W)/det(Λ_W)`.
    pub fn label_group_elements(&self, j: usize) -> Result<Vec<LabelElement>> {
        let info = self.cross_section(j)?;
        let step = &info.projection / &info.cross_section;
        Ok((0..info.label_group_order)
            .map(|t| {
                let offset = &step * BigRational::from_integer(BigInt::from(t));
                let representative = &offset * &info.cross_section;
                LabelElement {
                    label: t,
                    offset,
                    representative,
                }
            })
            .collect())
    }

    fn level_min_distances(&self) -> Result<Vec<usize>> {
        self.family
            .codes()
            .iter()
            .map(BinaryCode::min_distance)
            .collect()
    }

    /// `(1/α)·min{d_1, 4^{-1}d_2, …, 4^{1-a}d_a, 4}`.
    pub fn min_dist_sq_lower_bound(&self) -> Result<BigRational> {
        let d = self.level_min_distances()?;
        Ok(min_dist_sq_bound(&d, self.alpha()))
    }

    pub fn coding_gain_bounds(&self) -> Result<CodingGainBounds> {
        let d = self.level_min_distances()?;
        let alpha = self.alpha() as u128;
        let bound = min_dist_sq_bound(&d, self.alpha());
        let vol = self.normalized_volume();
        let n = self.dimension() as f64;
        let ksum = self.total_code_dimension() as f64;
        let pow4 = |l: usize| 4u128.checked_pow(l as u32).unwrap_or(u128::MAX);
        Ok(CodingGainBounds {
            coding_gain_bound: bound.to_f64().unwrap_or(f64::NAN) / vol,
            min_dist_sq_bound: bound,
            nominal_gain: 4f64.powf(ksum / n) / self.alpha() as f64,
            distance_conditions_hold: d
                .iter()
                .enumerate()
                .all(|(l, &dl)| alpha * dl as u128 >= pow4(l + 1)),
            equality_conditions_hold: d
                .iter()
                .enumerate()
                .all(|(l, &dl)| dl as u128 >= pow4(l + 1)),
        })
    }

    /// `d²_min / det(Λ)^(2/n)` for a known squared minimum distance.
    pub fn coding_gain_exact(&self, d_min_sq: &BigRational) -> Result<f64> {
        if !d_min_sq.is_positive() {
            return Err(invalid("squared minimum distance must be positive"));
        }
        let d = d_min_sq
            .to_f64()
            .ok_or_else(|| invalid("squared minimum distance not representable"))?;
        Ok(d / self.normalized_volume())
    }
}

/// The distance bound over given per-level minimum distances.
pub fn min_dist_sq_bound(d_min: &[usize], alpha: u8) -> BigRational {
    let mut best = BigRational::from_integer(BigInt::from(4));
    for (l, &d) in d_min.iter().enumerate() {
        if d == usize::MAX {
            continue;
        }
        let term = BigRational::new(BigInt::from(d), BigInt::one() << (2 * l));
        if term < best {
            best = term;
        }
    }
    best / BigRational::from_integer(BigInt::from(alpha))
}

/// On-disk form of a lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub format: String,
    pub n: usize,
    pub levels: usize,
    pub alpha: u8,
    pub k: Vec<usize>,
    pub denominator_exp: u32,
    pub basis: Vec<Vec<i64>>,
    /// Generator rows of `C_1`; level `l` uses the first `k[l-1]` rows.
    pub generator: Vec<String>,
    #[serde(default)]
    pub min_distances: Vec<Option<usize>>,
    #[serde(default)]
    pub sources: Vec<String>,
}

pub const LATTICE_FORMAT: &str = "construction-d-lattice/1";

impl LatticeFile {
    pub fn from_lattice(lat: &ConstructionDLattice, sources: Vec<String>) -> Self {
        LatticeFile {
            format: LATTICE_FORMAT.into(),
            n: lat.dimension(),
            levels: lat.levels(),
            alpha: lat.alpha(),
            k: lat.code_dimensions(),
            denominator_exp: lat.denom_exp,
            basis: lat.basis.clone(),
            generator: lat
                .family
                .code(1)
                .generator()
                .iter()
                .map(|r| r.to_string())
                .collect(),
            min_distances: lat
                .family
                .codes()
                .iter()
                .map(BinaryCode::cached_min_distance)
                .collect(),
            sources,
        }
    }

    /// Rebuilds the lattice and checks that the stored basis matches.
    pub fn to_lattice(&self) -> Result<ConstructionDLattice> {
        if self.format != LATTICE_FORMAT {
            return Err(invalid(format!("unknown lattice format {:?}", self.format)));
        }
        let rows = self
            .generator
            .iter()
            .map(|s| BitVector::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let base = BinaryCode::new(self.n, rows)?;
        let codes = self
            .k
            .iter()
            .enumerate()
            .map(|(l, &k)| {
                let code = base.prefix(k)?;
                Ok(match self.min_distances.get(l).copied().flatten() {
                    Some(d) => code.with_min_distance(d),
                    None => code,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let lat = construction_d(&NestedCodeFamily::new(self.alpha, codes)?)?;
        if lat.basis != self.basis || lat.levels() != self.levels {
            return Err(invalid("stored basis does not match the generator"));
        }
        Ok(lat)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::hamming_7_4;

    fn example_lattice() -> ConstructionDLattice {
        construction_d(&NestedCodeFamily::new(2, vec![hamming_7_4()]).unwrap()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn example_basis_layout() {
        let lat = example_lattice();
        let expected: Vec<Vec<i64>> = vec![
            vec![1, 0, 0, 0, 1, 1, 0],
            vec![0, 1, 0, 0, 0, 1, 1],
            vec![0, 0, 1, 0, 1, 1, 1],
            vec![0, 0, 0, 1, 1, 0, 1],
            vec![0, 0, 0, 0, 2, 0, 0],
            vec![0, 0, 0, 0, 0, 2, 0],
            vec![0, 0, 0, 0, 0, 0, 2],
        ];
        assert_eq!(lat.basis_numerators(), expected);
        assert_eq!(lat.denominator_exp(), 0);
    }

    #[test]
    fn full_space_gives_integer_lattice() {
        let lat =
            construction_d(&NestedCodeFamily::new(1, vec![BinaryCode::full_space(5)]).unwrap()).unwrap();
        for (i, row) in lat.basis_numerators().iter().enumerate() {
            assert_eq!(row.iter().filter(|&&x| x != 0).count(), 1);
            assert_eq!(row[i], 1);
        }
        assert_eq!(lat.determinant().unwrap(), rat(1, 1));
        assert_eq!(lat.dual_generator().unwrap(), exact::identity(5));
    }

    #[test]
    fn repetition_two_basis() {
        let lat =
            construction_d(&NestedCodeFamily::new(1, vec![BinaryCode::repetition(2)]).unwrap()).unwrap();
        assert_eq!(lat.basis_numerators(), [vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn non_echelon_generator_is_normalized() {
        let code = BinaryCode::from_strs(&[
            "01010000", "01000101", "10010100", "10011010", "10001001", "00110010", "00101000",
            "11100001",
        ])
        .unwrap();
        let fam = NestedCodeFamily::new(1, vec![code]).unwrap();
        let lat = construction_d(&fam).unwrap();
        assert_eq!(lat.determinant_from_basis(), lat.determinant_formula());
        assert_eq!(lat.determinant_formula(), rat(1, 1));

        let base = BinaryCode::from_strs(&["1101", "0111", "1011"]).unwrap();
        let fam = NestedCodeFamily::from_prefixes(1, &base, &[3, 1]).unwrap();
        let (norm, pivots) = nested_echelon(&fam).unwrap();
        assert_eq!(norm.code(2).generator(), fam.code(2).generator());
        for g in fam.code(1).generator() {
            assert!(norm.code(1).contains(g));
        }
        assert_eq!(pivots.len(), 3);
        let lat = construction_d(&fam).unwrap();
        assert_eq!(lat.determinant_from_basis(), lat.determinant_formula());
    }

    #[test]
    fn determinants() {
        assert_eq!(example_lattice().determinant().unwrap(), rat(8, 1));
        let base = BinaryCode::from_strs(&["10001110", "01000111", "00101011", "00011101"]).unwrap();
        let fam = NestedCodeFamily::from_prefixes(1, &base, &[4, 1]).unwrap();
        let lat = construction_d(&fam).unwrap();
        assert_eq!(lat.determinant().unwrap(), rat(8, 1));
        assert_eq!(lat.denominator_exp(), 1);
    }

    #[test]
    fn eq3_encoding() {
        let lat = example_lattice();
        let zero = lat.encode_eq3(&[0; 7], &[BitVector::zeros(4)]).unwrap();
        assert!(zero.is_zero());
        let c1 = lat
            .encode_eq3(&[0; 7], &[BitVector::unit(4, 0)])
            .unwrap();
        assert_eq!(c1, DyadicVector::from_integers(vec![1, 0, 0, 0, 1, 1, 0]));
        let z = lat
            .encode_eq3(&[0, 0, 0, 0, 2, 0, 0], &[BitVector::zeros(4)])
            .unwrap();
        assert_eq!(z, DyadicVector::from_integers(vec![0, 0, 0, 0, 2, 0, 0]));
        assert!(lat.encode_eq3(&[1, 0, 0, 0, 0, 0, 0], &[BitVector::zeros(4)]).is_err());
    }

    #[test]
    fn basis_encoding() {
        let lat = example_lattice();
        let e5 = lat.encode_b(&[0, 0, 0, 0, 1, 0, 0]).unwrap();
        assert_eq!(e5.numerators(), [0, 0, 0, 0, 2, 0, 0]);
        let e15 = lat.encode_b(&[1, 0, 0, 0, 1, 0, 0]).unwrap();
        assert_eq!(e15.numerators(), [1, 0, 0, 0, 3, 1, 0]);
        assert!(lat.encode_b(&[0; 7]).unwrap().is_zero());
    }

    #[test]
    fn membership() {
        let lat = example_lattice();
        for r in lat.basis_numerators() {
            assert!(lat.is_lattice_point(&DyadicVector::from_integers(r.clone())));
        }
        let e1 = DyadicVector::from_integers(vec![1, 0, 0, 0, 0, 0, 0]);
        assert!(!lat.is_lattice_point(&e1));
        let inv = lat.inverse_basis().unwrap();
        // x_5 = -1/2 in the solution of x·B = e_1.
        assert_eq!(inv[0][4], rat(-1, 2));
        let c12 = DyadicVector::from_integers(vec![1, 1, 0, 0, 1, 0, 1]);
        assert!(lat.is_lattice_point(&c12));
        assert!(!lat.is_lattice_point(&DyadicVector::new(vec![1, 0, 0, 0, 0, 0, 0], 1)));
    }

    #[test]
    fn dual_of_coarse_lattice() {
        let lat = construction_d(
            &NestedCodeFamily::new(1, vec![BinaryCode::new(3, vec![]).unwrap()]).unwrap(),
        )
        .unwrap();
        let dual = lat.dual_generator().unwrap();
        for (i, row) in dual.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == j { rat(1, 2) } else { rat(0, 1) });
            }
        }
    }

    #[test]
    fn example_dual_denominators() {
        let dual = example_lattice().dual_generator().unwrap();
        let denoms: std::collections::BTreeSet<BigInt> =
            dual.iter().flatten().map(|x| x.denom().clone()).collect();
        assert_eq!(denoms, [BigInt::from(1), BigInt::from(2)].into_iter().collect());
    }

    #[test]
    fn cross_sections_of_example() {
        let lat = example_lattice();
        let s: Vec<usize> = (0..7)
            .map(|j| lat.cross_section(j).unwrap().first_row + 1)
            .collect();
        assert_eq!(s, [1, 2, 3, 4, 1, 1, 2]);
        for j in 0..7 {
            let info = lat.cross_section(j).unwrap();
            assert_eq!(info.label_group_order, 2);
            assert_eq!(info.projection, rat(1, 1));
        }
    }

    #[test]
    fn coarse_only_coordinate() {
        let code = BinaryCode::from_strs(&["110"]).unwrap();
        let lat = construction_d(&NestedCodeFamily::new(1, vec![code]).unwrap()).unwrap();
        let info = lat.cross_section(2).unwrap();
        assert_eq!(info.level, None);
        assert_eq!(info.projection, rat(2, 1));
        assert_eq!(info.label_group_order, 1);
        let labels = lat.label_group_elements(2).unwrap();
        assert_eq!(labels.len(), 1);
        assert_eq!(labels[0].representative, rat(0, 1));
    }

    #[test]
    fn label_groups() {
        let lat = example_lattice();
        let reps: Vec<BigRational> = lat
            .label_group_elements(0)
            .unwrap()
            .into_iter()
            .map(|e| e.representative)
            .collect();
        assert_eq!(reps, [rat(0, 1), rat(1, 1)]);

        let base = BinaryCode::from_strs(&["10001110", "01000111", "00101011", "00011101"]).unwrap();
        let lat2 = construction_d(&NestedCodeFamily::from_prefixes(1, &base, &[4, 1]).unwrap()).unwrap();
        let elems = lat2.label_group_elements(0).unwrap();
        let reps: Vec<BigRational> = elems.iter().map(|e| e.representative.clone()).collect();
        assert_eq!(reps, [rat(0, 1), rat(1, 2), rat(1, 1), rat(3, 2)]);
        assert_eq!(elems[1].offset, rat(1, 4));
    }

    #[test]
    fn distance_bounds() {
        assert_eq!(example_lattice().min_dist_sq_lower_bound().unwrap(), rat(3, 2));
        let rep = construction_d(&NestedCodeFamily::new(1, vec![BinaryCode::repetition(8)]).unwrap())
            .unwrap();
        assert_eq!(rep.min_dist_sq_lower_bound().unwrap(), rat(4, 1));
        assert_eq!(min_dist_sq_bound(&[4, 16], 1), rat(4, 1));
    }

    #[test]
    fn coding_gain_values() {
        let lat = example_lattice();
        let b = lat.coding_gain_bounds().unwrap();
        let eq5 = 0.5 * 4f64.powf(4.0 / 7.0);
        assert!((b.theorem_bound().unwrap() - eq5).abs() < 1e-12 * eq5);
        assert!((eq5 - 1.1041).abs() < 1e-4);
        let g = lat.coding_gain_exact(&rat(3, 1)).unwrap();
        assert!((g - 3.0 / 8f64.powf(2.0 / 7.0)).abs() < 1e-12 * g);

        let rep = construction_d(&NestedCodeFamily::new(1, vec![BinaryCode::repetition(8)]).unwrap())
            .unwrap();
        let b = rep.coding_gain_bounds().unwrap();
        assert!(b.equality_conditions_hold);
        assert!((b.nominal_gain - 4f64.powf(0.125)).abs() < 1e-12);
        assert!((b.coding_gain_bound - b.nominal_gain).abs() < 1e-12);

        let zn = construction_d(&NestedCodeFamily::new(1, vec![BinaryCode::full_space(4)]).unwrap())
            .unwrap();
        let b = zn.coding_gain_bounds().unwrap();
        assert!((b.coding_gain_bound - 1.0).abs() < 1e-15);
        assert!((zn.coding_gain_exact(&rat(1, 1)).unwrap() - 1.0).abs() < 1e-15);
        assert!(zn.coding_gain_exact(&rat(0, 1)).is_err());
    }

    #[test]
    fn nesting_violation_is_reported() {
        let h = hamming_7_4();
        let bad = BinaryCode::from_strs(&["0100011"]).unwrap();
        let err = construction_d(&NestedCodeFamily::new(1, vec![h, bad]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InvalidFamily { level: 2, .. }));
    }

    #[test]
    fn json_round_trip() {
        let lat = example_lattice();
        let file = LatticeFile::from_lattice(&lat, vec!["hamming_7_4".into()]);
        let text = file.to_json().unwrap();
        let back = LatticeFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_lattice().unwrap(), lat);
    }
}
