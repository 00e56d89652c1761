//! Generalized Pauli operators, Fourier transforms, the diagonal maps `V`,
//! and the `d + 1` commuting classes.
//!
//! Prime dimensions use the cyclic shift `X|n⟩ = |n+1⟩` and clock
//! `Z = diag(ω^n)`. Prime powers use the field-labelled operators
//! `Z_q`, `X_q` on the power-ordered basis `|0⟩, |α⟩, …, |α^{d-1}⟩`.
//! Composite subscripts live mod `d - 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cyclotomic::{conductor_for_prime, is_small_prime, CycloScalar};
use crate::finite_field::{FieldElement, FieldError, FieldSpec};
use crate::matrix::CMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("d must be prime (got {0})")]
    NotPrime(u32),
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: i64, max: i64 },
    #[error("the diagonal map V_q^(r) needs odd characteristic")]
    EvenCharacteristic,
    #[error("class verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorLabel {
    /// `Z^k`, prime dimension.
    PrimeZ {
        k: u32,
    },
    /// `(XZ^m)^k`, prime dimension.
    PrimeXZ {
        m: u32,
        k: u32,
    },
    /// `Y = iXZ`, dimension 2.
    PrimeY,
    Zq {
        q: u32,
    },
    Xq {
        q: u32,
    },
    XqZr {
        q: u32,
        r: u32,
    },
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OperatorLabel::PrimeZ { k: 1 } => write!(f, "Z"),
            OperatorLabel::PrimeZ { k } => write!(f, "Z^{k}"),
            OperatorLabel::PrimeXZ { m, k } => {
                let base = match m {
                    0 => "X".to_string(),
                    1 => "XZ".to_string(),
                    m => format!("XZ^{m}"),
                };
                match (m, k) {
                    (_, 1) => write!(f, "{base}"),
                    (0, k) => write!(f, "X^{k}"),
                    (_, k) => write!(f, "({base})^{k}"),
                }
            }
            OperatorLabel::PrimeY => write!(f, "Y"),
            OperatorLabel::Zq { q } => write!(f, "Z_{q}"),
            OperatorLabel::Xq { q } => write!(f, "X_{q}"),
            OperatorLabel::XqZr { q, r } => write!(f, "X_{q}Z_{r}"),
        }
    }
}

impl Serialize for OperatorLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Which commuting class. Prime dimensions use `Diagonal` and `Mixed(m)`;
/// prime powers use all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassId {
    Diagonal,
    Shift,
    Mixed(u32),
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassId::Diagonal => write!(f, "diagonal"),
            ClassId::Shift => write!(f, "shift"),
            ClassId::Mixed(r) => write!(f, "mixed:{r}"),
        }
    }
}

impl FromStr for ClassId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "diagonal" => Ok(ClassId::Diagonal),
            "shift" => Ok(ClassId::Shift),
            _ => s
                .strip_prefix("mixed:")
                .and_then(|r| r.parse().ok())
                .map(ClassId::Mixed)
                .ok_or_else(|| format!("unknown class id {s:?} (diagonal, shift, mixed:<r>)")),
        }
    }
}

impl Serialize for ClassId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassMember {
    pub label: OperatorLabel,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutingClass {
    pub class_id: ClassId,
    pub members: Vec<ClassMember>,
}

fn check_prime(d: u32) -> Result<u32, WeylError> {
    if is_small_prime(d) {
        Ok(conductor_for_prime(d))
    } else {
        Err(WeylError::NotPrime(d))
    }
}

/// Shift `X`, clock `Z` and `ω = e^{2πi/d}` for prime `d`.
pub fn prime_generators(d: u32) -> Result<(CMatrix, CMatrix, CycloScalar), WeylError> {
    let m = check_prime(d)?;
    let dim = d as usize;
    let image: Vec<usize> = (0..dim).map(|n| (n + 1) % dim).collect();
    let x = CMatrix::permutation(m, &image);
    let z = CMatrix::diagonal((0..d).map(|n| CycloScalar::omega(d, n as i64)).collect())
        .expect("homogeneous");
    Ok((x, z, CycloScalar::omega(d, 1)))
}

/// `F = (1/√d) Σ ω^{nn'} |n⟩⟨n'|`.
pub fn prime_fourier(d: u32) -> Result<CMatrix, WeylError> {
    let m = check_prime(d)?;
    let s = CycloScalar::inv_sqrt_p_pow(m, 1);
    let rows = (0..d as i64)
        .map(|a| {
            (0..d as i64)
                .map(|b| &CycloScalar::omega(d, a * b) * &s)
                .collect()
        })
        .collect();
    Ok(CMatrix::from_rows(rows).expect("square"))
}

/// `V = diag(ω^{-(n²-n)(d+1)/2})` for odd `d`, `diag(1, -i)` for `d = 2`.
pub fn prime_v(d: u32) -> Result<CMatrix, WeylError> {
    let m = check_prime(d)?;
    if d == 2 {
        return Ok(
            CMatrix::diagonal(vec![CycloScalar::one(m), CycloScalar::zeta_pow(4, 3)])
                .expect("homogeneous"),
        );
    }
    let dd = d as i64;
    let diag = (0..dd)
        .map(|n| CycloScalar::omega(d, -((n * n - n) * (dd + 1) / 2)))
        .collect();
    Ok(CMatrix::diagonal(diag).expect("homogeneous"))
}

/// `{Z^k}` and `{(XZ^m)^k}` for `k = 1..d-1`, `m = 0..d-1`; for `d = 2`
/// the `m = 1` class holds `Y = iXZ`.
pub fn prime_classes(d: u32) -> Result<Vec<CommutingClass>, WeylError> {
    let (x, z, _) = prime_generators(d)?;
    let mut classes = Vec::with_capacity(d as usize + 1);
    classes.push(CommutingClass {
        class_id: ClassId::Diagonal,
        members: (1..d)
            .map(|k| ClassMember {
                label: OperatorLabel::PrimeZ { k },
                matrix: z.pow(k),
            })
            .collect(),
    });
    for m in 0..d {
        let xz = &x * &z.pow(m);
        let members = if d == 2 && m == 1 {
            vec![ClassMember {
                label: OperatorLabel::PrimeY,
                matrix: xz.scale(&CycloScalar::zeta_pow(4, 1)).expect("same ring"),
            }]
        } else {
            (1..d)
                .map(|k| ClassMember {
                    label: OperatorLabel::PrimeXZ { m, k },
                    matrix: xz.pow(k),
                })
                .collect()
        };
        classes.push(CommutingClass {
            class_id: ClassId::Mixed(m),
            members,
        });
    }
    check_classes(&classes)?;
    Ok(classes)
}

fn check_index(spec: &FieldSpec, q: u32) -> Result<(), WeylError> {
    let max = spec.d() as i64 - 2;
    if (q as i64) > max {
        Err(WeylError::IndexOutOfRange {
            index: q as i64,
            max,
        })
    } else {
        Ok(())
    }
}

fn conductor(spec: &FieldSpec) -> u32 {
    conductor_for_prime(spec.p())
}

/// `Σ_θ χ(b·θ)|θ⟩⟨θ|`; `Z_q` is the case `b = α^q`.
pub fn clock_op(spec: &FieldSpec, b: &FieldElement) -> Result<CMatrix, WeylError> {
    let diag = spec
        .elements()
        .map(|theta| Ok(spec.character(&spec.mul(b, &theta)?)))
        .collect::<Result<Vec<_>, FieldError>>()?;
    Ok(CMatrix::diagonal(diag).expect("homogeneous"))
}

/// `|θ⟩ ↦ |θ + a⟩`, with the sum taken through the Jacobi table;
/// `X_q` is the case `a = α^q`.
pub fn shift_op(spec: &FieldSpec, a: &FieldElement) -> Result<CMatrix, WeylError> {
    let image = spec
        .elements()
        .map(|theta| Ok(spec.position_of(&spec.add_via_jacobi(&theta, a)?)))
        .collect::<Result<Vec<_>, FieldError>>()?;
    Ok(CMatrix::permutation(conductor(spec), &image))
}

/// `Z_q` from its definition, for any integer subscript.
pub fn zq_from_definition(spec: &FieldSpec, q: i64) -> CMatrix {
    clock_op(spec, &spec.alpha_pow(q)).expect("same field")
}

/// `X_q` from its definition, for any integer subscript.
pub fn xq_from_definition(spec: &FieldSpec, q: i64) -> CMatrix {
    shift_op(spec, &spec.alpha_pow(q)).expect("same field")
}

/// `Z_q = |0⟩⟨0| + Σ_k χ(α^{q+k})|α^k⟩⟨α^k|`.
pub fn build_zq(spec: &FieldSpec, q: u32) -> Result<CMatrix, WeylError> {
    check_index(spec, q)?;
    Ok(zq_from_definition(spec, q as i64))
}

/// `X_q|α^k⟩ = |α^k + α^q⟩`, `X_q|0⟩ = |α^q⟩`.
pub fn build_xq(spec: &FieldSpec, q: u32) -> Result<CMatrix, WeylError> {
    check_index(spec, q)?;
    Ok(xq_from_definition(spec, q as i64))
}

/// The bare product `X_q Z_r`.
pub fn build_xqzr(spec: &FieldSpec, q: u32, r: u32) -> Result<CMatrix, WeylError> {
    Ok(&build_xq(spec, q)? * &build_zq(spec, r)?)
}

/// `F = (1/√d) Σ_{θ,θ'} χ(θθ')|θ'⟩⟨θ|`.
pub fn build_f(spec: &FieldSpec) -> CMatrix {
    let m = conductor(spec);
    let s = CycloScalar::inv_sqrt_p_pow(m, spec.n());
    let elems: Vec<FieldElement> = spec.elements().collect();
    let rows = elems
        .iter()
        .map(|row| {
            elems
                .iter()
                .map(|col| &spec.character(&spec.mul(row, col).expect("same field")) * &s)
                .collect()
        })
        .collect();
    CMatrix::from_rows(rows).expect("square")
}

/// `V_q^{(r)} = |0⟩⟨0| + Σ_k χ̄(2^{-1}α^{q+2k-r})|α^k⟩⟨α^k|` (odd `p`).
///
/// With this exponent `V_{q+r}^{(q)}† X_q V_{q+r}^{(q)} =
/// χ(2^{-1}α^{2q+r}) X_q Z_{q+r}` and `V_r^{(0)}† F†` diagonalizes the class
/// `{X_q Z_{q+r}}`.
pub fn build_vqr(spec: &FieldSpec, q: u32, r: u32) -> Result<CMatrix, WeylError> {
    check_index(spec, q)?;
    check_index(spec, r)?;
    let half = spec.half().ok_or(WeylError::EvenCharacteristic)?;
    Ok(vqr_with_exponent(spec, half, |k| {
        q as i64 + 2 * k - r as i64
    }))
}

/// Diagonal `|0⟩⟨0| + Σ_k χ̄(2^{-1}α^{e(k)})|α^k⟩⟨α^k|` for an arbitrary
/// exponent rule `e`.
pub fn vqr_with_exponent(spec: &FieldSpec, half: u32, e: impl Fn(i64) -> i64) -> CMatrix {
    let m = conductor(spec);
    let mut diag = vec![CycloScalar::one(m)];
    for k in 1..spec.d() as i64 {
        let arg = spec.scale(half, &spec.alpha_pow(e(k))).expect("same field");
        diag.push(spec.character(&arg).conj());
    }
    CMatrix::diagonal(diag).expect("homogeneous")
}

/// The phase `χ(2^{-1}α^{2q+r})` picked up under conjugation by
/// `V_{q+r}^{(q)}`.
pub fn vqr_conjugation_phase(spec: &FieldSpec, q: u32, r: u32) -> Result<CycloScalar, WeylError> {
    let half = spec.half().ok_or(WeylError::EvenCharacteristic)?;
    let arg = spec.scale(half, &spec.alpha_pow(2 * q as i64 + r as i64))?;
    Ok(spec.character(&arg))
}

/// `{Z_q}`, `{X_q}` and `{X_q Z_{q+r}}` for `r = 0..d-2`, verified before
/// returning.
pub fn build_classes(spec: &FieldSpec) -> Result<Vec<CommutingClass>, WeylError> {
    let order = spec.d() - 1;
    let zs: Vec<CMatrix> = (0..order)
        .map(|q| zq_from_definition(spec, q as i64))
        .collect();
    let xs: Vec<CMatrix> = (0..order)
        .map(|q| xq_from_definition(spec, q as i64))
        .collect();
    let mut classes = Vec::with_capacity(spec.d() as usize + 1);
    classes.push(CommutingClass {
        class_id: ClassId::Diagonal,
        members: (0..order)
            .map(|q| ClassMember {
                label: OperatorLabel::Zq { q },
                matrix: zs[q as usize].clone(),
            })
            .collect(),
    });
    classes.push(CommutingClass {
        class_id: ClassId::Shift,
        members: (0..order)
            .map(|q| ClassMember {
                label: OperatorLabel::Xq { q },
                matrix: xs[q as usize].clone(),
            })
            .collect(),
    });
    for r in 0..order {
        classes.push(CommutingClass {
            class_id: ClassId::Mixed(r),
            members: (0..order)
                .map(|q| {
                    let s = (q + r) % order;
                    ClassMember {
                        label: OperatorLabel::XqZr { q, r: s },
                        matrix: &xs[q as usize] * &zs[s as usize],
                    }
                })
                .collect(),
        });
    }
    check_classes(&classes)?;
    Ok(classes)
}

/// Every structural violation of a class list: wrong counts, non-unitary
/// or identity members, non-commuting pairs, and trace-inner products
/// other than `d·δ`.
pub fn class_violations(classes: &[CommutingClass]) -> Vec<String> {
    let mut out = Vec::new();
    let Some(first) = classes.first().and_then(|c| c.members.first()) else {
        out.push("no classes".into());
        return out;
    };
    let dim = first.matrix.dim();
    let m = first.matrix.conductor();
    let d_scalar = CycloScalar::from_integer(m, dim as i64);
    if classes.len() != dim + 1 {
        out.push(format!("{} classes, expected {}", classes.len(), dim + 1));
    }
    for class in classes {
        if class.members.len() != dim - 1 {
            out.push(format!(
                "class {} has {} members, expected {}",
                class.class_id,
                class.members.len(),
                dim - 1
            ));
        }
        for (i, a) in class.members.iter().enumerate() {
            if !a.matrix.is_unitary() {
                out.push(format!("{} is not unitary", a.label));
            }
            if a.matrix.is_identity() {
                out.push(format!("{} is the identity", a.label));
            }
            for b in &class.members[i + 1..] {
                if !a.matrix.commutes_with(&b.matrix) {
                    out.push(format!("{} and {} do not commute", a.label, b.label));
                }
            }
        }
    }
    let all: Vec<&ClassMember> = classes.iter().flat_map(|c| &c.members).collect();
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate().skip(i) {
            let expected = if i == j {
                &d_scalar
            } else {
                &CycloScalar::zero(m)
            };
            match a.matrix.trace_inner(&b.matrix) {
                Ok(t) if t == *expected => {}
                Ok(t) => out.push(format!(
                    "Tr({}·{}†) = {t}, expected {expected}",
                    a.label, b.label
                )),
                Err(e) => out.push(format!("Tr({}·{}†): {e}", a.label, b.label)),
            }
        }
    }
    out
}

fn check_classes(classes: &[CommutingClass]) -> Result<(), WeylError> {
    let v = class_violations(classes);
    if v.is_empty() {
        Ok(())
    } else {
        Err(WeylError::Verification(v.join("; ")))
    }
}
