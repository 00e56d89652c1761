#![allow(dead_code)]

pub mod criteria;

use mubforge::cyclotomic::conductor_for_prime;
use mubforge::tensor::PauliWord;
use mubforge::{CMatrix, CVector, CycloScalar, FieldElement, FieldSpec};
use num_rational::BigRational;

pub fn gf(p: u32, n: u32) -> FieldSpec {
    FieldSpec::new(p, n).expect("valid field")
}

/// `0`, `±1`, `±i`, `w` (ω = e^{2πi/3}) and `wb` (ω̄) in the ring for `p`.
pub fn scalar(p: u32, s: &str) -> CycloScalar {
    let m = conductor_for_prime(p);
    match s {
        "0" => CycloScalar::zero(m),
        "1" => CycloScalar::one(m),
        "-1" => CycloScalar::from_integer(m, -1),
        "i" => CycloScalar::zeta_pow(4, 1),
        "-i" => CycloScalar::zeta_pow(4, 3),
        "w" => CycloScalar::omega(3, 1),
        "wb" => CycloScalar::omega(3, 2),
        _ => panic!("unknown scalar {s:?}"),
    }
}

pub fn scalars(p: u32, row: &str) -> Vec<CycloScalar> {
    row.split_whitespace().map(|s| scalar(p, s)).collect()
}

pub fn matrix(p: u32, rows: &[&str]) -> CMatrix {
    CMatrix::from_rows(rows.iter().map(|r| scalars(p, r)).collect()).expect("square")
}

pub fn diag(p: u32, entries: &str) -> CMatrix {
    CMatrix::diagonal(scalars(p, entries)).expect("homogeneous")
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Word like `"Z2 Y I"`: `Y = XZ`, `W = XZ²`, trailing digit a power.
pub fn pauli(p: u32, text: &str) -> PauliWord {
    let factors = text
        .split_whitespace()
        .map(|tok| {
            let mut chars = tok.chars();
            let base = match chars.next() {
                Some('I') => (0, 0),
                Some('X') => (1, 0),
                Some('Z') => (0, 1),
                Some('Y') => (1, 1),
                Some('W') => (1, 2),
                _ => panic!("unknown factor {tok:?}"),
            };
            let k: u32 = match chars.as_str() {
                "" => 1,
                digits => digits.parse().expect("power"),
            };
            ((base.0 * k) % p, (base.1 * k) % p)
        })
        .collect::<Vec<_>>();
    mubforge::tensor::word(p, &factors)
}

/// Component-wise sum of exponent pairs mod `p`.
pub fn add_words(p: u32, a: &PauliWord, b: &PauliWord) -> Vec<(u32, u32)> {
    a.factors
        .iter()
        .zip(&b.factors)
        .map(|(&(a1, b1), &(a2, b2))| ((a1 + a2) % p, (b1 + b2) % p))
        .collect()
}

/// Product of two elements by schoolbook multiplication modulo the monic
/// modulus, independent of the field's power tables.
pub fn oracle_mul(spec: &FieldSpec, a: &[u32], b: &[u32]) -> Vec<u32> {
    let p = spec.p() as u64;
    let n = spec.n() as usize;
    let modulus = spec.modulus();
    let mut prod = vec![0u64; 2 * n];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    for top in (n..2 * n).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for (k, &mk) in modulus.iter().enumerate().take(n) {
            let idx = top - n + k;
            prod[idx] = (prod[idx] + (p - c) * mk as u64) % p;
        }
        prod[top] = 0;
    }
    prod[..n].iter().map(|&c| c as u32).collect()
}

/// `tr(θ) = θ + θ^p + … + θ^{p^{n-1}}` by repeated oracle powering.
pub fn oracle_trace(spec: &FieldSpec, theta: &[u32]) -> u32 {
    let p = spec.p();
    let mut acc = vec![0u32; spec.n() as usize];
    let mut frob = theta.to_vec();
    for _ in 0..spec.n() {
        for (a, f) in acc.iter_mut().zip(&frob) {
            *a = (*a + f) % p;
        }
        let mut next = vec![0u32; spec.n() as usize];
        next[0] = 1;
        for _ in 0..p {
            next = oracle_mul(spec, &next, &frob);
        }
        frob = next;
    }
    assert!(
        acc[1..].iter().all(|&c| c == 0),
        "trace outside the prime field"
    );
    acc[0]
}

/// `χ(θ) = ω^{tr θ}` from the oracle trace.
pub fn oracle_character(spec: &FieldSpec, theta: &FieldElement) -> CycloScalar {
    CycloScalar::omega(spec.p(), oracle_trace(spec, &theta.coeffs()) as i64)
}

/// `α^k` as coefficients, by repeated oracle multiplication by `α`.
pub fn oracle_alpha_pow(spec: &FieldSpec, k: u64) -> Vec<u32> {
    let n = spec.n() as usize;
    let mut alpha = vec![0u32; n];
    if n == 1 {
        // the primitive root is the root of θ + c_0
        alpha[0] = (spec.p() - spec.modulus()[0]) % spec.p();
    } else {
        alpha[1] = 1;
    }
    let mut acc = vec![0u32; n];
    acc[0] = 1;
    for _ in 0..k {
        acc = oracle_mul(spec, &acc, &alpha);
    }
    acc
}

pub fn inner(u: &CVector, v: &CVector) -> CycloScalar {
    u.inner(v).expect("same dimension")
}
