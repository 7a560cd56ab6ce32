//! Coordinate arithmetic backends.
//!
//! Every geometric routine in this crate is generic over [`Scalar`]. Two
//! backends exist: `f64` (approximate, tolerance-driven decisions) and
//! [`BigRational`] (exact, every predicate decided by comparison with zero).
//! The few kernels whose algorithms differ between the two (rank, null
//! directions, least squares, coefficient normalization) are associated
//! functions of the trait so that generic code never mixes backends.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Absolute and relative tolerance used by approximate predicates.
///
/// A quantity `x` measured against a natural scale `s` is treated as zero when
/// `|x| <= abs + rel * s`. The exact backend ignores both fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// Same value for the absolute and relative parts.
    pub const fn uniform(t: f64) -> Self {
        Self { abs: t, rel: t }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.abs.is_finite()
            && self.rel.is_finite()
            && self.abs >= 0.0
            && self.rel >= 0.0
            && (self.abs > 0.0 || self.rel > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTolerance {
                abs: self.abs,
                rel: self.rel,
            })
        }
    }

    /// Threshold for a quantity whose natural magnitude is `scale`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }

    /// Bound applied to quantities that are already dimensionless
    /// (relative residuals, ratio products minus one).
    pub fn unitless(&self) -> f64 {
        self.abs.max(self.rel)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::uniform(1e-9)
    }
}

/// Field element used for coordinates.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` for backends whose arithmetic is exact.
    const EXACT: bool;
    /// Short backend name used in reports.
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Converts a float. The exact backend reads the shortest decimal
    /// representation of `v`, so `0.1` becomes `1/10`.
    fn from_f64(v: f64) -> Result<Self>;
    /// Parses a decimal literal (`-1.25e3`) or a fraction (`7/3`).
    fn parse_literal(s: &str) -> Result<Self>;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;
    /// Square root when it is representable in the backend.
    fn sqrt_exact(&self) -> Option<Self>;
    /// `|self| <= threshold` for approximate backends, `self == 0` for exact ones.
    fn within(&self, threshold: f64) -> bool;
    fn to_json(&self) -> serde_json::Value;

    /// Rank of a rectangular matrix given by rows.
    fn rank(rows: &[Vec<Self>], tol: Tolerance) -> usize;

    /// A vector `v != 0` minimizing `|rows * v|`. Exact backends return only
    /// true null vectors and `None` when the matrix has full column rank.
    fn least_direction(rows: &[Vec<Self>], cols: usize) -> Option<Vec<Self>>;

    /// Least-squares solution of `a x = y`, or `None` when `a` lacks full
    /// column rank.
    fn least_squares(a: &[Vec<Self>], y: &[Self], tol: Tolerance) -> Option<Vec<Self>>;

    /// Rescales a coefficient vector by a non-zero factor into canonical form
    /// with `coeffs[lead]` positive: unit lead entry (approximate) or a
    /// primitive integer vector (exact).
    fn canonicalize(coeffs: &mut [Self], lead: usize);

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite)
        }
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        let v = match s.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().map_err(|_| bad_literal(s))?;
                let q: f64 = q.trim().parse().map_err(|_| bad_literal(s))?;
                if q == 0.0 {
                    return Err(bad_literal(s));
                }
                p / q
            }
            None => s.parse().map_err(|_| bad_literal(s))?,
        };
        Self::from_f64(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn within(&self, threshold: f64) -> bool {
        f64::abs(*self) <= threshold
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn rank(rows: &[Vec<Self>], tol: Tolerance) -> usize {
        let Some(m) = to_dmatrix(rows) else {
            return 0;
        };
        let sv = m.singular_values();
        let largest = sv.iter().cloned().fold(0.0, f64::max);
        let cut = tol.abs.max(tol.rel * largest);
        sv.iter().filter(|&&s| s > cut).count()
    }

    fn least_direction(rows: &[Vec<Self>], cols: usize) -> Option<Vec<Self>> {
        if cols == 0 {
            return None;
        }
        // Pad with zero rows so the SVD yields a full set of right singular vectors.
        let nrows = rows.len().max(cols);
        let mut m = DMatrix::<f64>::zeros(nrows, cols);
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        let svd = m.svd(false, true);
        let v_t = svd.v_t?;
        let (idx, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        Some(v_t.row(idx).iter().cloned().collect())
    }

    fn least_squares(a: &[Vec<Self>], y: &[Self], tol: Tolerance) -> Option<Vec<Self>> {
        let m = to_dmatrix(a)?;
        if m.nrows() < m.ncols() || Self::rank(a, tol) < m.ncols() {
            return None;
        }
        let rhs = DVector::from_column_slice(y);
        let svd = m.svd(true, true);
        let x = svd.solve(&rhs, 0.0).ok()?;
        Some(x.iter().cloned().collect())
    }

    fn canonicalize(coeffs: &mut [Self], lead: usize) {
        let d = coeffs[lead];
        if d != 0.0 {
            for c in coeffs.iter_mut() {
                *c /= d;
            }
        }
    }
}

fn to_dmatrix(rows: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let cols = rows.first()?.len();
    if cols == 0 {
        return None;
    }
    Some(DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]))
}

fn bad_literal(s: &str) -> Error {
    Error::InvalidLiteral(s.to_string())
}

/// Parses `[-+]digits[.digits][e[-+]digits]` exactly.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i64;
    if scale.unsigned_abs() > 4096 {
        return None;
    }
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        BigRational::from_integer(numer * pow)
    } else {
        BigRational::new(numer, pow)
    })
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        // `Display` for f64 prints the shortest representation that round-trips.
        parse_decimal(&format!("{v}")).ok_or_else(|| bad_literal(&v.to_string()))
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p = parse_decimal(p.trim()).ok_or_else(|| bad_literal(s))?;
                let q = parse_decimal(q.trim()).ok_or_else(|| bad_literal(s))?;
                if Zero::is_zero(&q) {
                    return Err(bad_literal(s));
                }
                Ok(p / q)
            }
            None => parse_decimal(s).ok_or_else(|| bad_literal(s)),
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&n * &n == *self.numer() && &d * &d == *self.denom()).then(|| BigRational::new(n, d))
    }

    fn within(&self, _threshold: f64) -> bool {
        Zero::is_zero(self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn rank(rows: &[Vec<Self>], _tol: Tolerance) -> usize {
        bareiss_rank(integer_rows(rows))
    }

    fn least_direction(rows: &[Vec<Self>], cols: usize) -> Option<Vec<Self>> {
        rational_nullspace(rows, cols).into_iter().next()
    }

    fn least_squares(a: &[Vec<Self>], y: &[Self], _tol: Tolerance) -> Option<Vec<Self>> {
        let cols = a.first()?.len();
        // Normal equations are exact here; full column rank makes A^T A invertible.
        let mut ata = vec![vec![<Self as Zero>::zero(); cols]; cols];
        let mut aty = vec![<Self as Zero>::zero(); cols];
        for (row, yv) in a.iter().zip(y) {
            for r in 0..cols {
                if Zero::is_zero(&row[r]) {
                    continue;
                }
                aty[r] = &aty[r] + &row[r] * yv;
                for c in 0..cols {
                    ata[r][c] = &ata[r][c] + &row[r] * &row[c];
                }
            }
        }
        crate::kernel::solve_linear(ata, aty).ok()
    }

    fn canonicalize(coeffs: &mut [Self], lead: usize) {
        if Zero::is_zero(&coeffs[lead]) {
            return;
        }
        let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let sign = if ints[lead].sign() == Sign::Minus {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        for (c, v) in coeffs.iter_mut().zip(ints) {
            *c = BigRational::from_integer(v / &gcd * &sign);
        }
    }
}

/// Scales each row by the lcm of its denominators.
fn integer_rows(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            row.iter().map(|c| c.numer() * (&lcm / c.denom())).collect()
        })
        .collect()
}

/// Fraction-free Gaussian elimination; every intermediate stays integral.
fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let Some(cols) = m.first().map(Vec::len) else {
        return 0;
    };
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Basis of the right nullspace via reduced row echelon form.
pub(crate) fn rational_nullspace(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !Zero::is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != r && !Zero::is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let sub = &f * &m[r][k];
                    m[i][k] = &m[i][k] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![<BigRational as Zero>::zero(); cols];
            v[free] = <BigRational as One>::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][free].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        BigRational::parse_literal(s).unwrap()
    }

    #[test]
    fn decimal_and_fraction_literals_are_exact() {
        assert_eq!(q("0.2"), BigRational::new(1.into(), 5.into()));
        assert_eq!(q("-1.5e2"), BigRational::from_integer((-150).into()));
        assert_eq!(q("3/-6"), BigRational::new((-1).into(), 2.into()));
        assert_eq!(q("1e-3"), BigRational::new(1.into(), 1000.into()));
        assert!(BigRational::parse_literal("1/0").is_err());
        assert!(BigRational::parse_literal("abc").is_err());
        assert!(BigRational::parse_literal(".").is_err());
    }

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let v = q("6/8");
        assert_eq!(v.numer(), &BigInt::from(3));
        assert_eq!(v.denom(), &BigInt::from(4));
        let w = q("-2/-4");
        assert!(w.denom().is_positive());
    }

    #[test]
    fn from_f64_uses_shortest_decimal() {
        assert_eq!(BigRational::from_f64(0.1).unwrap(), q("1/10"));
        assert_eq!(BigRational::from_f64(-12.5).unwrap(), q("-25/2"));
        assert!(BigRational::from_f64(f64::NAN).is_err());
    }

    #[test]
    fn float_literals_accept_fractions() {
        assert_eq!(f64::parse_literal("1/4").unwrap(), 0.25);
        assert_eq!(f64::parse_literal(" 2.5 ").unwrap(), 2.5);
        assert!(f64::parse_literal("inf").is_err());
    }

    #[test]
    fn exact_sqrt_only_for_perfect_squares() {
        assert_eq!(q("9/4").sqrt_exact(), Some(q("3/2")));
        assert_eq!(q("2").sqrt_exact(), None);
        assert_eq!(q("-1").sqrt_exact(), None);
    }

    #[test]
    fn canonical_integer_form() {
        let mut c = vec![q("-1/6"), q("-1/3"), q("-3")];
        BigRational::canonicalize(&mut c, 1);
        assert_eq!(c, vec![q("1"), q("2"), q("18")]);
        let mut f = vec![-2.0, 4.0, 1.0];
        f64::canonicalize(&mut f, 1);
        assert_eq!(f, vec![-0.5, 1.0, 0.25]);
        let mut g = vec![2.0, -4.0];
        f64::canonicalize(&mut g, 1);
        assert_eq!(g, vec![-0.5, 1.0]);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::default().validate().is_ok());
        assert!(Tolerance::new(0.0, 0.0).validate().is_err());
        assert!(Tolerance::new(-1.0, 1.0).validate().is_err());
        assert_eq!(Tolerance::new(1.0, 0.5).threshold(4.0), 3.0);
    }

    #[test]
    fn bareiss_matches_float_rank() {
        let rows = vec![
            vec![q("18"), q("0"), q("1")],
            vec![q("0"), q("9"), q("1")],
            vec![q("-6"), q("12"), q("1")],
        ];
        assert_eq!(BigRational::rank(&rows, Tolerance::default()), 2);
        let frows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect();
        assert_eq!(f64::rank(&frows, Tolerance::default()), 2);
    }

    #[test]
    fn nullspace_of_rank_deficient_matrix() {
        let rows = vec![vec![q("1"), q("2")], vec![q("2"), q("4")]];
        let ns = rational_nullspace(&rows, 2);
        assert_eq!(ns, vec![vec![q("-2"), q("1")]]);
        let full = vec![vec![q("1"), q("0")], vec![q("0"), q("1")]];
        assert!(rational_nullspace(&full, 2).is_empty());
    }
}
