//! Exact integer and rational matrix routines used by the lattice code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type RationalMatrix = Vec<Vec<BigRational>>;

/// Determinant of a square integer matrix by fraction-free (Bareiss)
/// elimination.
pub fn integer_determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Inverse of a square rational matrix by Gauss-Jordan elimination, or `None`
/// if singular.
pub fn rational_inverse(m: &RationalMatrix) -> Option<RationalMatrix> {
    let n = m.len();
    let mut a: RationalMatrix = m.to_vec();
    let mut inv: RationalMatrix = identity(n);
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &pivot;
            inv[col][j] = &inv[col][j] / &pivot;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
                let t = &f * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

pub fn identity(n: usize) -> RationalMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(BigRational::zero(), |acc, t| acc + &row[t] * &b[t][j])
                })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Clears denominators: returns `(d, d·m)` with `d` the least common
/// denominator and `d·m` integral.
pub fn clear_denominators(m: &RationalMatrix) -> (BigInt, Vec<Vec<BigInt>>) {
    let d = m
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled = m
        .iter()
        .map(|r| r.iter().map(|x| (x * &d).to_integer()).collect())
        .collect();
    (d, scaled)
}

/// Row-style Hermite normal form of a full-rank integer lattice that is
/// known to contain `modulus · Z^n`.
///
/// The result is upper triangular with positive diagonal and entries above
/// each pivot reduced into `[0, pivot)`, so two bases generate the same
/// lattice iff their forms are equal. Working modulo a multiple of the
/// determinant keeps every entry below `modulus`.
pub fn hermite_normal_form_mod(rows: &[Vec<BigInt>], modulus: &BigInt) -> Vec<Vec<BigInt>> {
    assert!(modulus.is_positive(), "modulus must be positive");
    let n = rows.first().map_or(0, Vec::len);
    let reduce = |x: &BigInt| x.mod_floor(modulus);
    let mut work: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(reduce).collect())
        .filter(|r: &Vec<BigInt>| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut h: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for col in 0..n {
        // modulus · e_col belongs to the lattice.
        let mut unit = vec![BigInt::zero(); n];
        unit[col] = modulus.clone();
        work.push(unit);
        // Euclid on column `col` across the working rows.
        let mut pivot: Option<Vec<BigInt>> = None;
        let mut rest = Vec::with_capacity(work.len());
        for row in work.drain(..) {
            if row[col].is_zero() {
                rest.push(row);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(row),
                Some(p) => {
                    let (p, r) = combine(p, row, col);
                    pivot = Some(p);
                    if r.iter().any(|x| !x.is_zero()) {
                        rest.push(r);
                    }
                }
            }
        }
        let mut p = pivot.expect("modulus row guarantees a pivot");
        if p[col].is_negative() {
            p.iter_mut().for_each(|x| *x = -&*x);
        }
        for x in p.iter_mut().skip(col + 1) {
            *x = reduce(x);
        }
        work = rest
            .into_iter()
            .map(|r| r.iter().map(reduce).collect::<Vec<_>>())
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        h.push(p);
    }
    // Reduce entries above the diagonal.
    for j in 0..n {
        let (upper, lower) = h.split_at_mut(j);
        let pivot_row = &lower[0];
        let d = pivot_row[j].clone();
        for row in upper.iter_mut() {
            let q = row[j].div_floor(&d);
            if !q.is_zero() {
                for (x, y) in row.iter_mut().zip(pivot_row).skip(j) {
                    *x -= &q * y;
                }
            }
        }
    }
    h
}

/// Unimodular combination of two rows that leaves `gcd` in column `col` of
/// the first result and zero in the second.
fn combine(a: Vec<BigInt>, b: Vec<BigInt>, col: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let eg = a[col].extended_gcd(&b[col]);
    let (g, x, y) = (eg.gcd, eg.x, eg.y);
    let (ua, ub) = (&a[col] / &g, &b[col] / &g);
    let first = a.iter().zip(&b).map(|(p, q)| &x * p + &y * q).collect();
    let second = a.iter().zip(&b).map(|(p, q)| &ub * p - &ua * q).collect();
    (first, second)
}

/// Whether `v` is an integer combination of the rows of an upper-triangular
/// Hermite form.
pub fn in_row_lattice(hnf: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut v = v.to_vec();
    for (j, row) in hnf.iter().enumerate() {
        let (q, r) = v[j].div_rem(&row[j]);
        if !r.is_zero() {
            return false;
        }
        if !q.is_zero() {
            for (x, y) in v.iter_mut().zip(row).skip(j) {
                *x -= &q * y;
            }
        }
    }
    v.iter().all(Zero::is_zero)
}
