//! Exact scalars of the form `(Σ c_j ζ_m^j) / √p^k`.
//!
//! The conductor `m` is an odd prime `p` or `4` (for `p = 2`), which is the
//! smallest cyclotomic ring holding every constant the constructions need:
//! p-th roots of unity for the characters, and `i` for the qubit case.
//! Powers of `1/√p` are tracked with the integer `k` instead of adjoining
//! `√p` to the ring, so every `1/√d` with `d = p^n` is `k = n`.
//!
//! Canonical form:
//! - prime `m`: `coeffs[m-1] = 0` (using `1 + ζ + … + ζ^{m-1} = 0`);
//!   `m = 4`: `coeffs[2] = coeffs[3] = 0` (using `ζ² = -1`).
//! - `k ∈ {0, 1}`; two factors of `1/√p` are folded into the coefficients.
//! - when `√p` already lies in the ring (`p ≡ 1 mod 4`, via the quadratic
//!   Gauss sum) `k = 0` always.
//! - zero has `k = 0`.
//!
//! With these rules two scalars are equal exactly when their canonical
//! forms are equal, so `PartialEq` is structural.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u32, u32),
    #[error("unsupported conductor {0} (expected an odd prime or 4)")]
    UnsupportedConductor(u32),
    #[error("cannot add x/√{p}^{a} to y/√{p}^{b}: √{p} is not in the ring")]
    ScaleParity { p: u32, a: u8, b: u8 },
    #[error("division by zero")]
    DivisionByZero,
}

/// Conductor of the ring used for characteristic `p`.
pub fn conductor_for_prime(p: u32) -> u32 {
    if p == 2 {
        4
    } else {
        p
    }
}

/// The prime whose square root is tracked by `k`, for conductor `m`.
pub fn radical_prime(m: u32) -> u32 {
    if m == 4 {
        2
    } else {
        m
    }
}

fn check_conductor(m: u32) -> Result<(), CycloError> {
    if m == 4 || (m >= 3 && is_small_prime(m)) {
        Ok(())
    } else {
        Err(CycloError::UnsupportedConductor(m))
    }
}

pub(crate) fn is_small_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// An exact element of `ℚ(ζ_m)` scaled by `1/√p^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    m: u32,
    coeffs: Vec<BigRational>,
    k: u8,
}

impl CycloScalar {
    /// Builds a scalar from raw coefficients of `ζ^0 … ζ^{len-1}` (exponents
    /// are taken mod `m`) and a scale exponent, then canonicalizes.
    pub fn from_parts(m: u32, coeffs: Vec<BigRational>, k: u32) -> Result<Self, CycloError> {
        check_conductor(m)?;
        let mut full = vec![BigRational::zero(); m as usize];
        for (j, c) in coeffs.into_iter().enumerate() {
            full[j % m as usize] += c;
        }
        Ok(Self::canonical(m, full, k))
    }

    pub fn zero(m: u32) -> Self {
        Self {
            m,
            coeffs: vec![BigRational::zero(); m as usize],
            k: 0,
        }
    }

    pub fn one(m: u32) -> Self {
        Self::from_rational(m, BigRational::one())
    }

    pub fn from_integer(m: u32, v: i64) -> Self {
        Self::from_rational(m, BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(m: u32, q: BigRational) -> Self {
        let mut s = Self::zero(m);
        s.coeffs[0] = q;
        s
    }

    /// `ζ_m^j`.
    pub fn zeta_pow(m: u32, j: i64) -> Self {
        let mut coeffs = vec![BigRational::zero(); m as usize];
        coeffs[j.rem_euclid(m as i64) as usize] = BigRational::one();
        Self::canonical(m, coeffs, 0)
    }

    /// `exp(2πi·j/p)` in the ring for characteristic `p`.
    pub fn omega(p: u32, j: i64) -> Self {
        let m = conductor_for_prime(p);
        if p == 2 {
            Self::zeta_pow(m, 2 * j)
        } else {
            Self::zeta_pow(m, j)
        }
    }

    /// `1/√p^k` in the ring of conductor `m`.
    pub fn inv_sqrt_p_pow(m: u32, k: u32) -> Self {
        let mut coeffs = vec![BigRational::zero(); m as usize];
        coeffs[0] = BigRational::one();
        Self::canonical(m, coeffs, k)
    }

    /// Order of the group of roots of unity contained in the ring.
    pub fn unit_group_order(m: u32) -> u32 {
        if m == 4 {
            4
        } else {
            2 * m
        }
    }

    /// `exp(2πi·t/N)` where `N` is [`Self::unit_group_order`].
    pub fn root_of_unity(m: u32, t: i64) -> Self {
        let order = Self::unit_group_order(m) as i64;
        let t = t.rem_euclid(order);
        if m == 4 {
            Self::zeta_pow(4, t)
        } else if t % 2 == 0 {
            Self::zeta_pow(m, t / 2)
        } else {
            // e^{iπt/p} = -ζ^{(t+p)/2}
            -Self::zeta_pow(m, (t + m as i64) / 2)
        }
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    /// Number of `1/√p` factors in the canonical form (0 or 1).
    pub fn scale_k(&self) -> u32 {
        self.k as u32
    }

    /// Canonical coefficients, trailing structural zeros dropped
    /// (`m - 1` entries for prime `m`, 2 for `m = 4`).
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs[..Self::significant_len(self.m)]
    }

    fn significant_len(m: u32) -> usize {
        if m == 4 {
            2
        } else {
            m as usize - 1
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.k == 0 && self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it is one.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.k == 0 && self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn canonical(m: u32, mut c: Vec<BigRational>, mut k: u32) -> Self {
        debug_assert_eq!(c.len(), m as usize);
        if m == 4 {
            let c2 = std::mem::take(&mut c[2]);
            let c3 = std::mem::take(&mut c[3]);
            c[0] -= c2;
            c[1] -= c3;
        } else {
            let last = std::mem::take(&mut c[m as usize - 1]);
            if !last.is_zero() {
                for x in c.iter_mut().take(m as usize - 1) {
                    *x -= &last;
                }
            }
        }
        if c.iter().all(Zero::is_zero) {
            return Self { m, coeffs: c, k: 0 };
        }
        let p = BigRational::from_integer(BigInt::from(radical_prime(m)));
        while k >= 2 {
            for x in c.iter_mut() {
                *x /= &p;
            }
            k -= 2;
        }
        if k == 1 {
            if let Some(g) = gauss_sqrt(m) {
                // x/√p = x·√p/p
                let prod = poly_mul(m, &c, &g);
                let c: Vec<BigRational> = prod.into_iter().map(|x| x / &p).collect();
                return Self::canonical(m, c, 0);
            }
        }
        Self {
            m,
            coeffs: c,
            k: k as u8,
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), CycloError> {
        if self.m != other.m {
            Err(CycloError::ConductorMismatch(self.m, other.m))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CycloError> {
        self.check_same(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.k != other.k {
            return Err(CycloError::ScaleParity {
                p: radical_prime(self.m),
                a: self.k,
                b: other.k,
            });
        }
        let c = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::canonical(self.m, c, self.k as u32))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, CycloError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, CycloError> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.m));
        }
        let c = poly_mul(self.m, &self.coeffs, &other.coeffs);
        Ok(Self::canonical(self.m, c, self.k as u32 + other.k as u32))
    }

    /// Multiplies by a rational number.
    pub fn scale_by(&self, q: &BigRational) -> Self {
        let c = self.coeffs.iter().map(|x| x * q).collect();
        Self::canonical(self.m, c, self.k as u32)
    }

    /// Complex conjugate: `ζ^j ↦ ζ^{m-j}`; `√p` is real.
    pub fn conj(&self) -> Self {
        let m = self.m as usize;
        let mut c = vec![BigRational::zero(); m];
        for (j, x) in self.coeffs.iter().enumerate() {
            c[(m - j) % m] = x.clone();
        }
        Self::canonical(self.m, c, self.k as u32)
    }

    /// Applies the Galois automorphism `ζ ↦ ζ^t` to the coefficient part.
    fn galois(&self, t: u32) -> Vec<BigRational> {
        let m = self.m as usize;
        let mut c = vec![BigRational::zero(); m];
        for (j, x) in self.coeffs.iter().enumerate() {
            c[(j * t as usize) % m] += x;
        }
        Self::canonical(self.m, c, 0).coeffs
    }

    /// Multiplicative inverse, via the product of Galois conjugates over
    /// the (rational) field norm.
    pub fn inverse(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        let m = self.m;
        let mut others = vec![BigRational::zero(); m as usize];
        others[0] = BigRational::one();
        for t in 2..m {
            if num_integer::gcd(t, m) != 1 {
                continue;
            }
            others = poly_mul(m, &others, &self.galois(t));
        }
        let norm = Self::canonical(m, poly_mul(m, &self.coeffs, &others), 0)
            .to_rational()
            .expect("field norm is rational");
        // (x/√p^k)^{-1} = p^k·x^{-1}/√p^k
        let pk = BigRational::from_integer(BigInt::from(radical_prime(m)).pow(self.k as u32));
        let factor = pk / norm;
        let c = others.into_iter().map(|x| x * &factor).collect();
        Ok(Self::canonical(m, c, self.k as u32))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, CycloError> {
        self.try_mul(&other.inverse()?)
    }

    /// `|x|² = x·x̄`, which is real.
    pub fn abs_sq(&self) -> Self {
        self * &self.conj()
    }

    /// `√q` for a nonnegative rational `q`, when it has the form `r/√p^k`
    /// with `r` rational (so it lives in this ring), taking the positive root.
    pub fn sqrt_of_rational(m: u32, q: &BigRational) -> Option<Self> {
        if q.is_zero() {
            return Some(Self::zero(m));
        }
        let (r, k) = sqrt_parts(m, q)?;
        let mut c = vec![BigRational::zero(); m as usize];
        c[0] = r;
        Some(Self::canonical(m, c, k))
    }

    /// If this is a root of unity, its index `t` with value `exp(2πi·t/N)`.
    pub fn unit_index(&self) -> Option<u32> {
        if self.k != 0 {
            return None;
        }
        let order = Self::unit_group_order(self.m);
        (0..order).find(|&t| Self::root_of_unity(self.m, t as i64) == *self)
    }

    /// Splits a nonzero scalar into `(modulus, unit)` with `modulus` a
    /// positive `r/√p^k` and `unit` a root of unity, when such a split exists.
    pub fn polar_exact(&self) -> Option<(Self, u32)> {
        let n = self.abs_sq().to_rational()?;
        let modulus = Self::sqrt_of_rational(self.m, &n)?;
        if modulus.is_zero() {
            return None;
        }
        let unit = self.try_div(&modulus).ok()?;
        unit.unit_index().map(|t| (modulus, t))
    }

    /// Floating-point value, for diagnostics only.
    pub fn to_complex(&self) -> (f64, f64) {
        let m = self.m as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * j as f64 / m;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        let s = (radical_prime(self.m) as f64).sqrt().powi(self.k as i32);
        (re / s, im / s)
    }
}

/// Writes `√q` as `r/√p^k` with `r` rational and `k ∈ {0, 1}`.
fn sqrt_parts(m: u32, q: &BigRational) -> Option<(BigRational, u32)> {
    if q.is_negative() || q.is_zero() {
        return None;
    }
    let p = BigInt::from(radical_prime(m));
    (0..2u32).find_map(|k| {
        let t = q * BigRational::from_integer(p.pow(k));
        rational_sqrt(&t).map(|r| (r, k))
    })
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    let n = q.numer();
    let d = q.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

/// Product in `ℚ[x]/(x^m - 1)`; the caller canonicalizes.
fn poly_mul(m: u32, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let m = m as usize;
    let mut out = vec![BigRational::zero(); m];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[(i + j) % m] += x * y;
        }
    }
    out
}

/// `√p` as an element of `ℚ(ζ_p)` when `p ≡ 1 (mod 4)`: the quadratic
/// Gauss sum `Σ (j/p) ζ^j`, which is the positive root.
fn gauss_sqrt(m: u32) -> Option<Vec<BigRational>> {
    if m == 4 || m % 4 != 1 {
        return None;
    }
    let p = m as u64;
    let mut c = vec![BigRational::zero(); m as usize];
    for j in 1..p {
        let legendre = mod_pow(j, (p - 1) / 2, p);
        c[j as usize] = if legendre == 1 {
            BigRational::one()
        } else {
            -BigRational::one()
        };
    }
    Some(CycloScalar::canonical(m, c, 0).coeffs)
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl Neg for &CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        CycloScalar {
            m: self.m,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
            k: self.k,
        }
    }
}

impl Neg for CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        -&self
    }
}

// The operator impls panic on conductor or scale-parity mismatch, the same
// way shape mismatches panic in dense linear algebra crates. Use the
// `try_*` methods where the operands are not known to be compatible.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&CycloScalar> for &CycloScalar {
            type Output = CycloScalar;
            fn $method(self, rhs: &CycloScalar) -> CycloScalar {
                self.$try(rhs).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl $tr<CycloScalar> for CycloScalar {
            type Output = CycloScalar;
            fn $method(self, rhs: CycloScalar) -> CycloScalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycloScalar> for CycloScalar {
            type Output = CycloScalar;
            fn $method(self, rhs: &CycloScalar) -> CycloScalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

fn unit_symbol(m: u32, t: u32) -> String {
    if m == 4 {
        return ["1", "i", "-1", "-i"][t as usize].to_string();
    }
    let (sign, j) = if t.is_multiple_of(2) {
        ("", t / 2)
    } else {
        ("-", ((t + m) / 2) % m)
    };
    let base = match (m, j) {
        (_, 0) => "1".to_string(),
        (_, 1) => "ω".to_string(),
        (3, 2) => "ω̄".to_string(),
        (_, j) => format!("ω^{j}"),
    };
    format!("{sign}{base}")
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for CycloScalar {
    /// Roots of unity print as `1, -1, i, ω, ω̄, …`; other values as
    /// `unit·modulus` when that split is exact, else as a ζ-polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if let Some(t) = self.unit_index() {
            return write!(f, "{}", unit_symbol(self.m, t));
        }
        if let Some((_, t)) = self.polar_exact() {
            let n = self
                .abs_sq()
                .to_rational()
                .expect("polar split has rational modulus");
            let (r, k) = sqrt_parts(self.m, &n).expect("polar split has exact modulus");
            let unit = unit_symbol(self.m, t);
            let (sign, unit) = match unit.strip_prefix('-') {
                Some(u) => ("-", u.to_string()),
                None => ("", unit),
            };
            let numer = BigRational::from_integer(r.numer().clone());
            let head = match (numer.is_one(), unit.as_str()) {
                (true, u) => u.to_string(),
                (false, "1") => fmt_rational(&numer),
                (false, u) => format!("{}{}", fmt_rational(&numer), u),
            };
            let p = radical_prime(self.m);
            let denom = r.denom();
            let tail = match (k, denom.is_one()) {
                (0, true) => String::new(),
                (0, false) => format!("/{denom}"),
                (_, true) => format!("/√{p}"),
                (_, false) => format!("/({denom}√{p})"),
            };
            return write!(f, "{sign}{head}{tail}");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => fmt_rational(c),
                _ => format!("{}·ζ{}^{}", fmt_rational(c), self.m, j),
            })
            .collect();
        let body = terms.join(" + ");
        if self.k == 0 {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/√{}", radical_prime(self.m))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    m: u32,
    k: u32,
    coeffs: Vec<(String, String)>,
}

impl Serialize for CycloScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            m: self.m,
            k: self.k as u32,
            coeffs: self
                .coeffs()
                .iter()
                .map(|q| (q.numer().to_string(), q.denom().to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ScalarRepr::deserialize(d)?;
        let mut coeffs = Vec::with_capacity(repr.coeffs.len());
        for (n, dn) in &repr.coeffs {
            let n: BigInt = n.parse().map_err(D::Error::custom)?;
            let dn: BigInt = dn.parse().map_err(D::Error::custom)?;
            if dn.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            coeffs.push(BigRational::new(n, dn));
        }
        if coeffs.len() > repr.m as usize {
            return Err(D::Error::custom("too many coefficients for conductor"));
        }
        CycloScalar::from_parts(repr.m, coeffs, repr.k).map_err(D::Error::custom)
    }
}
