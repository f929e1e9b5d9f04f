//! Linear algebra over GF(2) and the binary codes that feed Construction D.
//!
//! Bit vectors are packed into `u64` words so that row operations are
//! word-parallel XORs. Codes keep an ordered generator list; the order matters
//! because nested families share generator prefixes.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

const WORD_BITS: usize = 64;

/// Largest code dimension for which the minimum distance is found by
/// enumerating every message.
pub const MIN_DISTANCE_BUDGET_BITS: usize = 28;

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from 0/1 values; any nonzero entry counts as 1.
    pub fn from_bits<T: Copy + Into<u64>>(bits: &[T]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b.into() != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(invalid(format!("bad bit character {other:?}"))),
            }
        }
        Ok(v)
    }

    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

fn check_rows(rows: &[BitVector]) -> Result<usize> {
    let first = rows.first().ok_or_else(|| invalid("empty row list"))?;
    let n = first.len();
    if n == 0 {
        return Err(invalid("rows must have length >= 1"));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(invalid(format!(
            "ragged rows: row {bad} has length {}, expected {n}",
            rows[bad].len()
        )));
    }
    Ok(n)
}

/// Reduced row echelon form of a list of rows, together with the transform
/// that produced it.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero rows of the reduced form, one per pivot.
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
    /// `transform[i]` expresses `rows[i]` as a combination of the input rows.
    transform: Vec<BitVector>,
}

impl Echelon {
    pub fn new(input: &[BitVector], n: usize) -> Self {
        let m = input.len();
        let mut rows: Vec<BitVector> = input.to_vec();
        let mut tr: Vec<BitVector> = (0..m).map(|i| BitVector::unit(m, i)).collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..n {
            if rank == m {
                break;
            }
            let Some(p) = (rank..m).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            tr.swap(rank, p);
            let (pivot_row, pivot_tr) = (rows[rank].clone(), tr[rank].clone());
            for r in 0..m {
                if r != rank && rows[r].get(col) {
                    rows[r].xor_assign(&pivot_row);
                    tr[r].xor_assign(&pivot_tr);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        tr.truncate(rank);
        Echelon {
            rows,
            pivots,
            transform: tr,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    /// Reduces `v` against the echelon rows; the result is zero iff `v` lies
    /// in the row span.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut v = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn in_span(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// For a full-rank input, recovers the coefficients `m` with
    /// `codeword = m · input`. Only the pivot positions of `codeword` are read.
    pub fn coefficients(&self, codeword: &BitVector) -> BitVector {
        let m = self.transform.first().map_or(0, BitVector::len);
        let mut out = BitVector::zeros(m);
        for (t, &p) in self.transform.iter().zip(&self.pivots) {
            if codeword.get(p) {
                out.xor_assign(t);
            }
        }
        out
    }
}

/// Rank over GF(2).
pub fn gf2_rank(rows: &[BitVector]) -> Result<usize> {
    let n = check_rows(rows)?;
    Ok(Echelon::new(rows, n).rank())
}

/// Parity-check rows for the code spanned by `rows`, which must be linearly
/// independent. A systematic generator `[I_k | P]` yields `[P^T | I_{n-k}]`.
pub fn parity_check_rows(n: usize, rows: &[BitVector]) -> Result<Vec<BitVector>> {
    if rows.iter().any(|r| r.len() != n) {
        return Err(invalid("generator rows do not match code length"));
    }
    let ech = Echelon::new(rows, n);
    if ech.rank() != rows.len() {
        return Err(invalid(format!(
            "generator is rank deficient: rank {} < {} rows",
            ech.rank(),
            rows.len()
        )));
    }
    let mut is_pivot = vec![false; n];
    for &p in ech.pivots() {
        is_pivot[p] = true;
    }
    let checks = (0..n)
        .filter(|&q| !is_pivot[q])
        .map(|q| {
            let mut h = BitVector::unit(n, q);
            for (row, &p) in ech.rows().iter().zip(ech.pivots()) {
                if row.get(q) {
                    h.set(p, true);
                }
            }
            h
        })
        .collect();
    Ok(checks)
}

/// A binary linear code given by an ordered list of independent generator
/// rows.
#[derive(Clone, Debug)]
pub struct BinaryCode {
    n: usize,
    generator: Vec<BitVector>,
    d_min: Option<usize>,
    echelon: OnceLock<Echelon>,
    checks: OnceLock<Vec<BitVector>>,
}

impl PartialEq for BinaryCode {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.generator == other.generator
    }
}

impl BinaryCode {
    /// Builds a code from generator rows, rejecting dependent rows.
    /// An empty row list gives the zero code.
    pub fn new(n: usize, generator: Vec<BitVector>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("code length must be >= 1"));
        }
        if let Some(bad) = generator.iter().position(|r| r.len() != n) {
            return Err(invalid(format!(
                "generator row {bad} has length {}, expected {n}",
                generator[bad].len()
            )));
        }
        let ech = Echelon::new(&generator, n);
        if ech.rank() != generator.len() {
            return Err(invalid(format!(
                "generator rows are dependent: rank {} < {}",
                ech.rank(),
                generator.len()
            )));
        }
        let echelon = OnceLock::new();
        let _ = echelon.set(ech);
        Ok(BinaryCode {
            n,
            generator,
            d_min: None,
            echelon,
            checks: OnceLock::new(),
        })
    }

    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|s| BitVector::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let n = check_rows(&rows)?;
        Self::new(n, rows)
    }

    /// The whole space F_2^n with the identity generator.
    pub fn full_space(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| BitVector::unit(n, i)).collect())
            .expect("identity rows are independent")
    }

    /// Length-`n` repetition code.
    pub fn repetition(n: usize) -> Self {
        Self::new(n, vec![BitVector::from_support(n, &(0..n).collect::<Vec<_>>())])
            .expect("single nonzero row")
    }

    /// Attaches a known minimum distance (used when enumeration is out of
    /// budget). The value is trusted.
    pub fn with_min_distance(mut self, d_min: usize) -> Self {
        self.d_min = Some(d_min);
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.generator.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &[BitVector] {
        &self.generator
    }

    pub fn cached_min_distance(&self) -> Option<usize> {
        self.d_min
    }

    pub fn echelon(&self) -> &Echelon {
        self.echelon
            .get_or_init(|| Echelon::new(&self.generator, self.n))
    }

    /// Codeword for a message of `k` bits.
    pub fn encode(&self, message: &BitVector) -> BitVector {
        assert_eq!(message.len(), self.dimension(), "message length");
        let mut c = BitVector::zeros(self.n);
        for i in message.iter_ones() {
            c.xor_assign(&self.generator[i]);
        }
        c
    }

    /// Message bits of a codeword. For a non-codeword the result encodes to
    /// the codeword agreeing with the input on the information set.
    pub fn message_of(&self, codeword: &BitVector) -> BitVector {
        self.echelon().coefficients(codeword)
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        v.len() == self.n && self.echelon().in_span(v)
    }

    /// The subcode generated by the first `k` rows.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k > self.dimension() {
            return Err(invalid(format!(
                "prefix of {k} rows from a code of dimension {}",
                self.dimension()
            )));
        }
        Self::new(self.n, self.generator[..k].to_vec())
    }

    pub fn parity_checks(&self) -> &[BitVector] {
        self.checks.get_or_init(|| {
            parity_check_rows(self.n, &self.generator).expect("generator has full rank")
        })
    }

    /// Exact minimum distance; the cached value when present, otherwise by
    /// enumerating all nonzero messages.
    pub fn min_distance(&self) -> Result<usize> {
        match self.d_min {
            Some(d) => Ok(d),
            None => code_min_distance(self),
        }
    }
}

/// Minimum Hamming weight over all nonzero codewords, by Gray-code
/// enumeration of the 2^k − 1 nonzero messages. The zero code has no nonzero
/// codewords and reports `usize::MAX`.
pub fn code_min_distance(code: &BinaryCode) -> Result<usize> {
    let k = code.dimension();
    if k > MIN_DISTANCE_BUDGET_BITS {
        return Err(Error::BudgetExceeded {
            what: "minimum distance enumeration",
            bits: k,
            limit: MIN_DISTANCE_BUDGET_BITS,
        });
    }
    if k == 0 {
        return Ok(usize::MAX);
    }
    let g = code.generator();
    // High message bits select a chunk; each chunk walks its low bits in
    // Gray-code order.
    let high = k.min(8);
    let low = k - high;
    let best = (0u64..(1u64 << high))
        .into_par_iter()
        .map(|chunk| {
            let mut c = BitVector::zeros(code.len());
            for b in 0..high {
                if (chunk >> b) & 1 == 1 {
                    c.xor_assign(&g[low + b]);
                }
            }
            let mut best = if chunk == 0 { usize::MAX } else { c.weight() };
            for step in 1u64..(1u64 << low) {
                c.xor_assign(&g[step.trailing_zeros() as usize]);
                best = best.min(c.weight());
            }
            best
        })
        .min()
        .unwrap_or(usize::MAX);
    Ok(best)
}

/// The Hamming code used as the worked Construction-D fixture:
/// generator rows `1000110, 0100011, 0010111, 0001101`.
pub fn hamming_7_4() -> BinaryCode {
    BinaryCode::from_strs(&["1000110", "0100011", "0010111", "0001101"])
        .expect("fixture rows are independent")
}

/// A chain `C_1 ⊇ C_2 ⊇ … ⊇ C_a` over a common length, plus the
/// Construction-D scaling parameter `alpha ∈ {1, 2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NestedCodeFamily {
    n: usize,
    alpha: u8,
    codes: Vec<BinaryCode>,
}

/// Outcome of [`check_nested`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NestingCheck {
    Nested,
    /// `level` is 1-based and names the first code that is not a prefix
    /// subcode of its predecessor.
    Violated { level: usize, reason: String },
}

impl NestingCheck {
    pub fn is_nested(&self) -> bool {
        matches!(self, NestingCheck::Nested)
    }
}

impl NestedCodeFamily {
    /// Only shapes are validated here; nesting is checked by
    /// [`check_nested`].
    pub fn new(alpha: u8, codes: Vec<BinaryCode>) -> Result<Self> {
        if alpha != 1 && alpha != 2 {
            return Err(invalid(format!("alpha must be 1 or 2, got {alpha}")));
        }
        let first = codes.first().ok_or_else(|| invalid("family needs >= 1 code"))?;
        let n = first.len();
        if codes.iter().any(|c| c.len() != n) {
            return Err(invalid("codes in a family must share one length"));
        }
        Ok(NestedCodeFamily { n, alpha, codes })
    }

    /// A family whose level-`l` code is the first `dims[l-1]` rows of `base`.
    pub fn from_prefixes(alpha: u8, base: &BinaryCode, dims: &[usize]) -> Result<Self> {
        let codes = dims
            .iter()
            .map(|&k| base.prefix(k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alpha, codes)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn alpha(&self) -> u8 {
        self.alpha
    }

    pub fn levels(&self) -> usize {
        self.codes.len()
    }

    pub fn codes(&self) -> &[BinaryCode] {
        &self.codes
    }

    /// `C_l` for 1-based `l`.
    pub fn code(&self, level: usize) -> &BinaryCode {
        &self.codes[level - 1]
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.codes.iter().map(BinaryCode::dimension).collect()
    }
}

/// Checks the shared-prefix structure of a family and, independently, that
/// every generator row of `C_{l+1}` lies in the span of `C_l`.
pub fn check_nested(family: &NestedCodeFamily) -> NestingCheck {
    for (idx, pair) in family.codes.windows(2).enumerate() {
        let (outer, inner) = (&pair[0], &pair[1]);
        let level = idx + 2;
        if inner.dimension() > outer.dimension() {
            return NestingCheck::Violated {
                level,
                reason: format!(
                    "dimension {} exceeds dimension {} of level {}",
                    inner.dimension(),
                    outer.dimension(),
                    level - 1
                ),
            };
        }
        if let Some(row) = (0..inner.dimension())
            .find(|&j| inner.generator()[j] != outer.generator()[j])
        {
            return NestingCheck::Violated {
                level,
                reason: format!("generator row {} differs from level {}", row + 1, level - 1),
            };
        }
        if let Some(row) = inner
            .generator()
            .iter()
            .position(|g| !outer.echelon().in_span(g))
        {
            return NestingCheck::Violated {
                level,
                reason: format!("generator row {} is outside level {}", row + 1, level - 1),
            };
        }
    }
    NestingCheck::Nested
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        BitVector::parse(s).unwrap()
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(gf2_rank(&[bv("10"), bv("01")]).unwrap(), 2);
        assert_eq!(gf2_rank(&[bv("11"), bv("11")]).unwrap(), 1);
        assert_eq!(gf2_rank(hamming_7_4().generator()).unwrap(), 4);
    }

    #[test]
    fn rank_rejects_bad_input() {
        assert!(matches!(gf2_rank(&[]), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            gf2_rank(&[bv("101"), bv("10")]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn min_distance_fixtures() {
        assert_eq!(code_min_distance(&hamming_7_4()).unwrap(), 3);
        assert_eq!(code_min_distance(&BinaryCode::repetition(8)).unwrap(), 8);
        assert_eq!(code_min_distance(&BinaryCode::full_space(3)).unwrap(), 1);
    }

    #[test]
    fn min_distance_budget() {
        let code = BinaryCode::full_space(29);
        assert!(matches!(
            code_min_distance(&code),
            Err(Error::BudgetExceeded { bits: 29, .. })
        ));
        assert_eq!(code.with_min_distance(1).min_distance().unwrap(), 1);
    }

    #[test]
    fn hamming_fixture_rows() {
        let h = hamming_7_4();
        assert_eq!((h.len(), h.dimension()), (7, 4));
        assert_eq!(h.generator()[0].to_bools(), [true, false, false, false, true, true, false]);
    }

    #[test]
    fn parity_checks_of_systematic_generator() {
        let h = hamming_7_4();
        let checks = h.parity_checks();
        // [P^T | I_3]
        let expected = [bv("1011100"), bv("1110010"), bv("0111001")];
        assert_eq!(checks, expected);
        for c in checks {
            for g in h.generator() {
                assert!(!c.dot(g));
            }
        }
    }

    #[test]
    fn parity_checks_edge_cases() {
        assert!(BinaryCode::full_space(5).parity_checks().is_empty());
        let rep = BinaryCode::repetition(8);
        let checks = rep.parity_checks();
        assert_eq!(checks.len(), 7);
        assert!(checks.iter().all(|c| c.weight() == 2));
        assert!(checks.iter().all(|c| !c.dot(&rep.generator()[0])));
        assert!(parity_check_rows(2, &[bv("11"), bv("11")]).is_err());
    }

    #[test]
    fn dependent_generator_rejected() {
        assert!(BinaryCode::from_strs(&["110", "011", "101"]).is_err());
    }

    #[test]
    fn nesting_checks() {
        let h = hamming_7_4();
        let one = NestedCodeFamily::new(2, vec![h.clone()]).unwrap();
        assert!(check_nested(&one).is_nested());

        let two = NestedCodeFamily::from_prefixes(1, &h, &[4, 1]).unwrap();
        assert!(check_nested(&two).is_nested());

        let bad = BinaryCode::from_strs(&["1000110", "1000000"]).unwrap();
        let fam = NestedCodeFamily::new(1, vec![h, bad]).unwrap();
        match check_nested(&fam) {
            NestingCheck::Violated { level, .. } => assert_eq!(level, 2),
            NestingCheck::Nested => panic!("violation not detected"),
        }
    }

    #[test]
    fn message_recovery_round_trip() {
        let h = hamming_7_4();
        for m in 0u8..16 {
            let msg = BitVector::from_bits(&[m & 1, (m >> 1) & 1, (m >> 2) & 1, (m >> 3) & 1]);
            let c = h.encode(&msg);
            assert!(h.contains(&c));
            assert_eq!(h.message_of(&c), msg);
        }
    }

    #[test]
    fn iter_ones_crosses_words() {
        let v = BitVector::from_support(130, &[0, 63, 64, 129]);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), [0, 63, 64, 129]);
        assert_eq!(v.weight(), 4);
    }
}
