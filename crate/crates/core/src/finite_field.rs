//! `GF(p^n)` built from a primitive polynomial.
//!
//! Elements carry both the power of the primitive element `α` and the
//! coefficient vector over the polynomial basis `1, α, …, α^{n-1}`, so
//! addition (coefficients) and multiplication (powers) are both O(n).
//! The Jacobi logarithm `L` with `1 + α^m = α^{L(m)}` is kept as an
//! independent addition route for cross-checking.
//!
//! Hilbert-space positions follow the power order `|0⟩, |α⟩, |α²⟩, …,
//! |α^{d-1}⟩`, so position `d - 1` holds `α^{d-1} = 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{is_small_prime, CycloScalar};

/// Default upper bound on `d = p^n` for field construction.
pub const DEFAULT_MAX_D: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("p must be prime (got {0})")]
    NotPrime(u32),
    #[error("n must be positive")]
    ZeroDegree,
    #[error("p^n = {d} exceeds the dimension bound {bound}")]
    TooLarge { d: u64, bound: u64 },
    #[error("modulus must be monic of degree n with entries in Z_p")]
    BadModulus,
    #[error("modulus is reducible over Z_p")]
    Reducible,
    #[error("modulus is not primitive: α has order {order}, expected {expected}")]
    NotPrimitive { order: u32, expected: u32 },
    #[error("no primitive polynomial of degree {n} over Z_{p} found")]
    NoPrimitive { p: u32, n: u32 },
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("basis generators are linearly dependent")]
    SingularBasis,
    #[error("value out of range: {0}")]
    OutOfRange(String),
}

/// A finite field `GF(p^n)` with its defining primitive polynomial and
/// lookup tables. Immutable once built.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    p: u32,
    n: u32,
    d: u32,
    modulus: Vec<u32>,
    id: u64,
    /// Packed coefficients of `α^k`, `k = 0..d-1`.
    exp: Vec<u32>,
    /// Power index by packed coefficients; `None` for zero.
    log: Vec<Option<u32>>,
    /// `L(m)`: `1 + α^m = α^{L(m)}`, `None` when the sum vanishes.
    jacobi: Vec<Option<u32>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

/// An element of a [`FieldSpec`]: `α^power` (or zero) together with its
/// coefficient vector, packed base `p` with `c_0` least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    power: Option<u32>,
    packed: u32,
    p: u32,
    n: u32,
    field: u64,
}

impl FieldElement {
    pub fn power(&self) -> Option<u32> {
        self.power
    }

    pub fn is_zero(&self) -> bool {
        self.power.is_none()
    }

    /// Coefficients `c_0 … c_{n-1}` over `1, α, …, α^{n-1}`.
    pub fn coeffs(&self) -> Vec<u32> {
        unpack(self.packed, self.p, self.n)
    }
}

fn unpack(mut v: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let c = v % p;
            v /= p;
            c
        })
        .collect()
}

fn pack(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// The canonical polynomials fixed by the worked examples; everything else
/// uses the lexicographically smallest primitive polynomial.
fn pinned_modulus(p: u32, n: u32) -> Option<Vec<u32>> {
    match (p, n) {
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (3, 2) => Some(vec![2, 1, 1]),
        _ => None,
    }
}

impl FieldSpec {
    /// `GF(p^n)` with the canonical modulus and the default bound.
    pub fn new(p: u32, n: u32) -> Result<Self, FieldError> {
        Self::with_bound(p, n, DEFAULT_MAX_D)
    }

    pub fn with_bound(p: u32, n: u32, bound: u64) -> Result<Self, FieldError> {
        check_params(p, n, bound)?;
        if let Some(m) = pinned_modulus(p, n) {
            return Self::with_modulus(p, m);
        }
        let count = (p as u64).pow(n);
        for idx in 0..count {
            // constant coefficient is the most significant key
            let mut coeffs = vec![0u32; n as usize];
            let mut v = idx;
            for l in (0..n as usize).rev() {
                coeffs[l] = (v % p as u64) as u32;
                v /= p as u64;
            }
            coeffs.push(1);
            if let Ok(spec) = Self::with_modulus(p, coeffs) {
                return Ok(spec);
            }
        }
        Err(FieldError::NoPrimitive { p, n })
    }

    /// `GF(p^n)` from an explicit monic modulus (constant-first).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self, FieldError> {
        if modulus.len() < 2 {
            return Err(FieldError::BadModulus);
        }
        let n = modulus.len() as u32 - 1;
        check_params(p, n, u64::MAX)?;
        if *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus);
        }
        if !is_irreducible(p, &modulus) {
            return Err(FieldError::Reducible);
        }
        let d = p.pow(n);
        let mut exp = Vec::with_capacity(d as usize - 1);
        let mut log = vec![None; d as usize];
        let mut cur = vec![0u32; n as usize];
        cur[0] = 1;
        for k in 0..d - 1 {
            let packed = pack(&cur, p);
            if packed == 0 {
                return Err(FieldError::NotPrimitive {
                    order: 0,
                    expected: d - 1,
                });
            }
            if k > 0 && packed == 1 {
                return Err(FieldError::NotPrimitive {
                    order: k,
                    expected: d - 1,
                });
            }
            exp.push(packed);
            log[packed as usize] = Some(k);
            cur = times_alpha(&cur, &modulus, p);
        }
        if pack(&cur, p) != 1 {
            // only reachable for n = 1, where x + c can have root 0
            return Err(FieldError::NotPrimitive {
                order: 0,
                expected: d - 1,
            });
        }
        let jacobi = (0..d - 1)
            .map(|m| {
                let mut s = unpack(exp[m as usize], p, n);
                s[0] = (s[0] + 1) % p;
                log[pack(&s, p) as usize]
            })
            .collect();
        let id = modulus
            .iter()
            .fold(0xcbf2_9ce4_8422_2325u64 ^ p as u64, |h, &c| {
                (h ^ c as u64).wrapping_mul(0x0100_0000_01b3)
            });
        Ok(Self {
            p,
            n,
            d,
            modulus,
            id,
            exp,
            log,
            jacobi,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Defining polynomial, constant coefficient first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The Jacobi logarithm table `L(0..d-2)`.
    pub fn jacobi_table(&self) -> &[Option<u32>] {
        &self.jacobi
    }

    fn make(&self, power: Option<u32>, packed: u32) -> FieldElement {
        FieldElement {
            power,
            packed,
            p: self.p,
            n: self.n,
            field: self.id,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.make(None, 0)
    }

    pub fn one(&self) -> FieldElement {
        self.alpha_pow(0)
    }

    /// `α^k`, with `k` reduced mod `d - 1`.
    pub fn alpha_pow(&self, k: i64) -> FieldElement {
        let k = k.rem_euclid(self.d as i64 - 1) as u32;
        self.make(Some(k), self.exp[k as usize])
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.n as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::OutOfRange(format!("coefficients {coeffs:?}")));
        }
        let packed = pack(coeffs, self.p);
        Ok(self.make(self.log[packed as usize], packed))
    }

    /// The prime-field element `c · 1`.
    pub fn from_prime_field(&self, c: u32) -> FieldElement {
        let mut v = vec![0; self.n as usize];
        v[0] = c % self.p;
        self.from_coeffs(&v).expect("in range")
    }

    /// Elements in Hilbert-space position order: `0, α, α², …, α^{d-1} = 1`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.d as usize).map(move |i| self.element_at(i))
    }

    pub fn element_at(&self, position: usize) -> FieldElement {
        if position == 0 {
            self.zero()
        } else {
            self.alpha_pow(position as i64)
        }
    }

    pub fn position_of(&self, a: &FieldElement) -> usize {
        match a.power {
            None => 0,
            Some(0) => self.d as usize - 1,
            Some(k) => k as usize,
        }
    }

    fn check(&self, a: &FieldElement) -> Result<(), FieldError> {
        if a.field == self.id {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        let p = self.p;
        let (mut x, mut y, mut packed, mut place) = (a.packed, b.packed, 0, 1);
        for _ in 0..self.n {
            packed += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        let sum = self.make(self.log[packed as usize], packed);
        debug_assert_eq!(Ok(sum), self.add_via_jacobi(a, b));
        Ok(sum)
    }

    /// Field addition through the Jacobi table only:
    /// `α^k + α^q = α^{k + L(q - k)}`.
    pub fn add_via_jacobi(
        &self,
        a: &FieldElement,
        b: &FieldElement,
    ) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        match (a.power, b.power) {
            (None, _) => Ok(*b),
            (_, None) => Ok(*a),
            (Some(k), Some(q)) => {
                let order = self.d as i64 - 1;
                let diff = (q as i64 - k as i64).rem_euclid(order) as usize;
                Ok(match self.jacobi[diff] {
                    None => self.zero(),
                    Some(l) => self.alpha_pow(k as i64 + l as i64),
                })
            }
        }
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        let c: Vec<u32> = a.coeffs().iter().map(|&x| (self.p - x) % self.p).collect();
        self.from_coeffs(&c)
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.add(a, &self.neg(b)?)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a.power, b.power) {
            (Some(k), Some(q)) => self.alpha_pow(k as i64 + q as i64),
            _ => self.zero(),
        })
    }

    /// Multiplication by a prime-field scalar.
    pub fn scale(&self, c: u32, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.mul(&self.from_prime_field(c), a)
    }

    /// `tr(a) = a + a^p + … + a^{p^{n-1}}`, an element of `ℤ_p`.
    pub fn trace(&self, a: &FieldElement) -> u32 {
        let Some(k) = a.power else { return 0 };
        let order = self.d as u64 - 1;
        let mut acc = vec![0u32; self.n as usize];
        let mut e = k as u64;
        for _ in 0..self.n {
            for (s, c) in acc
                .iter_mut()
                .zip(unpack(self.exp[e as usize], self.p, self.n))
            {
                *s = (*s + c) % self.p;
            }
            e = e * self.p as u64 % order;
        }
        assert!(
            acc[1..].iter().all(|&c| c == 0),
            "trace must lie in the prime field"
        );
        acc[0]
    }

    /// Additive character `χ(a) = exp(2πi·tr(a)/p)`.
    pub fn character(&self, a: &FieldElement) -> CycloScalar {
        CycloScalar::omega(self.p, self.trace(a) as i64)
    }

    /// Inverse of 2 in `ℤ_p` (odd `p` only): `(p + 1)/2`.
    pub fn half(&self) -> Option<u32> {
        (self.p != 2).then(|| self.p.div_ceil(2))
    }

    pub fn polynomial_basis(&self) -> FieldBasis {
        let gens = (0..self.n).map(|l| self.alpha_pow(l as i64)).collect();
        FieldBasis::new(self, BasisKind::Polynomial, gens).expect("polynomial basis is independent")
    }

    /// The normal basis `{β, β^p, …}` with `β = α^k` for the smallest such
    /// `k` giving independent generators.
    pub fn normal_basis(&self) -> FieldBasis {
        let order = self.d as i64 - 1;
        for k in 0..order {
            let mut gens = Vec::with_capacity(self.n as usize);
            let mut e = k;
            for _ in 0..self.n {
                gens.push(self.alpha_pow(e));
                e = e * self.p as i64 % order;
            }
            if let Ok(b) = FieldBasis::new(self, BasisKind::Normal, gens) {
                return b;
            }
        }
        unreachable!("every finite field has a normal basis")
    }

    pub fn basis(&self, kind: BasisKind) -> FieldBasis {
        match kind {
            BasisKind::Polynomial => self.polynomial_basis(),
            BasisKind::Normal => self.normal_basis(),
        }
    }

    pub fn element_from_repr(&self, repr: &ElementRepr) -> Result<FieldElement, FieldError> {
        match *repr {
            ElementRepr::Zero { zero: true } => Ok(self.zero()),
            ElementRepr::Zero { zero: false } => Err(FieldError::OutOfRange("zero: false".into())),
            ElementRepr::Power { power } => Ok(self.alpha_pow(power as i64)),
        }
    }
}

fn check_params(p: u32, n: u32, bound: u64) -> Result<(), FieldError> {
    if !is_small_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let d = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
    if d > bound || d > u32::MAX as u64 {
        return Err(FieldError::TooLarge { d, bound });
    }
    Ok(())
}

fn times_alpha(c: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let n = c.len();
    let top = c[n - 1];
    let mut out = vec![0u32; n];
    for l in (1..n).rev() {
        out[l] = c[l - 1];
    }
    for (l, o) in out.iter_mut().enumerate() {
        *o = (*o + (p - top) * modulus[l]) % p;
    }
    out
}

/// Remainder of `a` modulo monic `b` over `ℤ_p` (constant-first vectors).
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - lead) * bi % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=n/2`.
pub fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let n = modulus.len() - 1;
    for deg in 1..=n / 2 {
        let count = (p as u64).pow(deg as u32);
        for idx in 0..count {
            let mut div = unpack(idx as u32, p, deg as u32);
            div.push(1);
            if poly_rem(modulus, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Polynomial,
    Normal,
}

/// A `ℤ_p`-basis of the field used to turn elements into digit strings.
#[derive(Debug, Clone)]
pub struct FieldBasis {
    kind: BasisKind,
    generators: Vec<FieldElement>,
    p: u32,
    /// Inverse of the matrix whose columns are the generators' coefficients.
    inverse: Vec<Vec<u32>>,
}

impl FieldBasis {
    pub fn new(
        spec: &FieldSpec,
        kind: BasisKind,
        generators: Vec<FieldElement>,
    ) -> Result<Self, FieldError> {
        if generators.len() != spec.n as usize {
            return Err(FieldError::SingularBasis);
        }
        for g in &generators {
            spec.check(g)?;
        }
        let n = spec.n as usize;
        let cols: Vec<Vec<u32>> = generators.iter().map(|g| g.coeffs()).collect();
        let mat: Vec<Vec<u32>> = (0..n)
            .map(|r| (0..n).map(|c| cols[c][r]).collect())
            .collect();
        let inverse = invert_mod_p(&mat, spec.p).ok_or(FieldError::SingularBasis)?;
        Ok(Self {
            kind,
            generators,
            p: spec.p,
            inverse,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    /// Digits `c` with `a = Σ c_l · generator_l`.
    pub fn expand(&self, a: &FieldElement) -> Vec<u32> {
        let v = a.coeffs();
        self.inverse
            .iter()
            .map(|row| {
                row.iter().zip(&v).fold(0u64, |s, (&x, &y)| {
                    (s + x as u64 * y as u64) % self.p as u64
                }) as u32
            })
            .collect()
    }

    /// `Σ c_l · generator_l`.
    pub fn combine(&self, spec: &FieldSpec, digits: &[u32]) -> Result<FieldElement, FieldError> {
        let mut acc = spec.zero();
        for (c, g) in digits.iter().zip(&self.generators) {
            acc = spec.add(&acc, &spec.scale(*c, g)?)?;
        }
        Ok(acc)
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    crate::cyclotomic::mod_pow(a as u64, p as u64 - 2, p as u64) as u32
}

/// Gauss–Jordan inverse over `ℤ_p`; `None` when singular.
fn invert_mod_p(m: &[Vec<u32>], p: u32) -> Option<Vec<Vec<u32>>> {
    let n = m.len();
    let mut a: Vec<Vec<u32>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let inv = inv_mod(a[col][col], p);
        for x in a[col].iter_mut() {
            *x = (*x as u64 * inv as u64 % p as u64) as u32;
        }
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    let sub = (f as u64 * y as u64 % p as u64) as u32;
                    *x = (*x + p - sub) % p;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    p: u32,
    n: u32,
    modulus: Vec<u32>,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldRepr {
            p: self.p,
            n: self.n,
            modulus: self.modulus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = FieldRepr::deserialize(d)?;
        if r.modulus.len() != r.n as usize + 1 {
            return Err(D::Error::custom("modulus length must be n + 1"));
        }
        FieldSpec::with_modulus(r.p, r.modulus).map_err(D::Error::custom)
    }
}

/// JSON form of an element: `{"power":k}` or `{"zero":true}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRepr {
    Power { power: u32 },
    Zero { zero: bool },
}

impl From<&FieldElement> for ElementRepr {
    fn from(a: &FieldElement) -> Self {
        match a.power {
            Some(power) => ElementRepr::Power { power },
            None => ElementRepr::Zero { zero: true },
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ElementRepr::from(self).serialize(s)
    }
}
