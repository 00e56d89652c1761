//! Relabeling `GF(p^n) ≅ ℤ_p^n` and factoring operators into tensor
//! products of single-qudit Pauli words.
//!
//! A field element `a = Σ c_l b_l` over a basis `{b_l}` becomes the ket
//! `|c_0 c_1 … c_{n-1}⟩` with `c_0` leftmost, i.e. the most significant
//! digit of the Kronecker index.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cyclotomic::{conductor_for_prime, CycloScalar};
use crate::finite_field::{BasisKind, FieldBasis, FieldSpec};
use crate::matrix::{CMatrix, MatrixError};
use crate::weyl::{self, OperatorLabel, WeylError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("operator is not a Pauli word over this digit map")]
    NoMatch,
    #[error("operator has dimension {got}, digit map has {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("word has {got} factors, expected {expected}")]
    WordLength { got: usize, expected: usize },
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Single-qudit shift `𝒳|j⟩ = |j+1⟩` and clock `𝒵 = diag(ω^j)`.
pub fn single_qudit_paulis(p: u32) -> Result<(CMatrix, CMatrix), TensorError> {
    let (x, z, _) = weyl::prime_generators(p)?;
    Ok((x, z))
}

/// Power-ordered positions relabeled by digit strings over a field basis.
#[derive(Debug, Clone)]
pub struct DigitMap {
    p: u32,
    n: u32,
    kind: BasisKind,
    /// `perm[position]` is the Kronecker index of that element's digits.
    perm: Vec<usize>,
    digits: Vec<Vec<u32>>,
}

impl DigitMap {
    pub fn new(spec: &FieldSpec, basis: &FieldBasis) -> Self {
        let p = spec.p();
        let digits: Vec<Vec<u32>> = spec.elements().map(|e| basis.expand(&e)).collect();
        let perm = digits
            .iter()
            .map(|c| {
                c.iter()
                    .fold(0usize, |acc, &x| acc * p as usize + x as usize)
            })
            .collect();
        Self {
            p,
            n: spec.n(),
            kind: basis.kind(),
            perm,
            digits,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Digits `c_0 … c_{n-1}` of the element at a power-ordered position.
    pub fn digits(&self, position: usize) -> &[u32] {
        &self.digits[position]
    }

    /// The ket label, e.g. `|12⟩`.
    pub fn ket(&self, position: usize) -> String {
        let s: String = self.digits[position]
            .iter()
            .map(|d| char::from_digit(*d, 36).unwrap_or('?'))
            .collect();
        format!("|{s}⟩")
    }

    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (pos, &k) in self.perm.iter().enumerate() {
            inv[k] = pos;
        }
        inv
    }

    /// Moves a power-ordered operator into digit order.
    pub fn to_digit_order(&self, op: &CMatrix) -> CMatrix {
        op.permuted(&self.perm)
    }

    /// Moves a digit-ordered operator back into power order.
    pub fn to_power_order(&self, op: &CMatrix) -> CMatrix {
        op.permuted(&self.inverse())
    }
}

pub fn build_digit_map(spec: &FieldSpec, basis: &FieldBasis) -> DigitMap {
    DigitMap::new(spec, basis)
}

/// `phase · ⊗_l 𝒳^{a_l} 𝒵^{b_l}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    pub p: u32,
    pub factors: Vec<(u32, u32)>,
    pub phase: CycloScalar,
}

#[derive(Serialize)]
struct FactorRepr {
    x: u32,
    z: u32,
}

#[derive(Serialize)]
struct WordRepr<'a> {
    p: u32,
    factors: Vec<FactorRepr>,
    phase: &'a CycloScalar,
}

impl Serialize for PauliWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WordRepr {
            p: self.p,
            factors: self
                .factors
                .iter()
                .map(|&(x, z)| FactorRepr { x, z })
                .collect(),
            phase: &self.phase,
        }
        .serialize(s)
    }
}

fn superscript(k: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    if k == 1 {
        return String::new();
    }
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

/// `I`, `𝒳`, `𝒵`, `𝒴 = 𝒳𝒵`, `𝒲 = 𝒳𝒵²` and their powers; anything else as
/// `𝒳^a𝒵^b`.
pub fn factor_symbol(p: u32, (a, b): (u32, u32)) -> String {
    if (a, b) == (0, 0) {
        return "I".into();
    }
    let mut named = vec![('𝒳', (1, 0)), ('𝒵', (0, 1)), ('𝒴', (1, 1))];
    if p == 3 {
        named.push(('𝒲', (1, 2)));
    }
    for (sym, (x, z)) in named {
        for k in 1..p {
            if (k * x % p, k * z % p) == (a, b) {
                return format!("{sym}{}", superscript(k));
            }
        }
    }
    format!("𝒳{}𝒵{}", superscript(a), superscript(b))
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self
            .factors
            .iter()
            .map(|&ab| factor_symbol(self.p, ab))
            .collect();
        if self.phase.is_one() {
            write!(f, "{}", body.join(" ⊗ "))
        } else {
            write!(f, "{} · {}", self.phase, body.join(" ⊗ "))
        }
    }
}

/// Single-qudit `𝒳^a 𝒵^b` for every `(a, b)`, indexed `a·p + b`.
struct FactorCache {
    p: u32,
    mats: Vec<CMatrix>,
}

impl FactorCache {
    fn new(p: u32) -> Result<Self, TensorError> {
        let (x, z) = single_qudit_paulis(p)?;
        let mut mats = Vec::with_capacity((p * p) as usize);
        for a in 0..p {
            for b in 0..p {
                mats.push(&x.pow(a) * &z.pow(b));
            }
        }
        Ok(Self { p, mats })
    }

    fn get(&self, (a, b): (u32, u32)) -> &CMatrix {
        &self.mats[(a * self.p + b) as usize]
    }

    fn kron(&self, factors: &[(u32, u32)]) -> Result<CMatrix, TensorError> {
        let mut acc = self.get(factors[0]).clone();
        for &ab in &factors[1..] {
            acc = acc.tensor(self.get(ab))?;
        }
        Ok(acc)
    }
}

/// The operator of a word on the power-ordered space.
pub fn compose(word: &PauliWord, map: &DigitMap) -> Result<CMatrix, TensorError> {
    if word.factors.len() != map.n as usize {
        return Err(TensorError::WordLength {
            got: word.factors.len(),
            expected: map.n as usize,
        });
    }
    let cache = FactorCache::new(map.p)?;
    let digit_order = cache.kron(&word.factors)?.scale(&word.phase)?;
    Ok(map.to_power_order(&digit_order))
}

/// Finds the unique word equal to `op` up to a root-of-unity phase by
/// searching all `p^{2n}` exponent tuples.
pub fn decompose(op: &CMatrix, map: &DigitMap) -> Result<PauliWord, TensorError> {
    let d = map.perm.len();
    if op.dim() != d {
        return Err(TensorError::Dimension {
            got: op.dim(),
            expected: d,
        });
    }
    let target = map.to_digit_order(op);
    let cache = FactorCache::new(map.p)?;
    let p = map.p;
    let n = map.n as usize;
    let mut factors = vec![(0u32, 0u32); n];
    for code in 0..(p as u64).pow(2 * n as u32) {
        let mut c = code;
        for f in factors.iter_mut().rev() {
            let b = (c % p as u64) as u32;
            c /= p as u64;
            let a = (c % p as u64) as u32;
            c /= p as u64;
            *f = (a, b);
        }
        let candidate = cache.kron(&factors)?;
        if let Some(phase) = target.equal_up_to_phase(&candidate) {
            return Ok(PauliWord { p, factors, phase });
        }
    }
    Err(TensorError::NoMatch)
}

/// `Some([F_p; n])` when the relabeled `F` is exactly `F_p^{⊗n}`.
pub fn factorization_of_f(spec: &FieldSpec, map: &DigitMap) -> Option<Vec<CMatrix>> {
    let f = map.to_digit_order(&weyl::build_f(spec));
    let fp = weyl::prime_fourier(spec.p()).ok()?;
    let mut power = fp.clone();
    for _ in 1..spec.n() {
        power = power.tensor(&fp).ok()?;
    }
    (power == f).then(|| vec![fp; spec.n() as usize])
}

#[derive(Debug, Clone, Serialize)]
pub struct TableEntry {
    pub label: OperatorLabel,
    pub word: PauliWord,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub set: String,
    pub entries: Vec<TableEntry>,
}

/// Pauli-word tables for `{Z_q}`, `{X_q}` and every `{X_q Z_{q+r}}`,
/// plus whether `F` factorizes in this basis.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionTable {
    pub p: u32,
    pub n: u32,
    pub basis: BasisKind,
    pub kets: Vec<String>,
    pub rows: Vec<TableRow>,
    pub fourier_factorizes: bool,
}

pub fn decomposition_table(
    spec: &FieldSpec,
    kind: BasisKind,
) -> Result<DecompositionTable, TensorError> {
    let map = DigitMap::new(spec, &spec.basis(kind));
    let order = spec.d() - 1;
    let word = |label: OperatorLabel, m: &CMatrix| -> Result<TableEntry, TensorError> {
        Ok(TableEntry {
            label,
            word: decompose(m, &map)?,
        })
    };
    let zs: Vec<CMatrix> = (0..order)
        .map(|q| weyl::zq_from_definition(spec, q as i64))
        .collect();
    let xs: Vec<CMatrix> = (0..order)
        .map(|q| weyl::xq_from_definition(spec, q as i64))
        .collect();
    let mut rows = vec![
        TableRow {
            set: "{Z_q}".into(),
            entries: (0..order)
                .map(|q| word(OperatorLabel::Zq { q }, &zs[q as usize]))
                .collect::<Result<_, _>>()?,
        },
        TableRow {
            set: "{X_q}".into(),
            entries: (0..order)
                .map(|q| word(OperatorLabel::Xq { q }, &xs[q as usize]))
                .collect::<Result<_, _>>()?,
        },
    ];
    for r in 0..order {
        rows.push(TableRow {
            set: format!("{{X_qZ_(q+{r})}}"),
            entries: (0..order)
                .map(|q| {
                    let s = (q + r) % order;
                    word(
                        OperatorLabel::XqZr { q, r: s },
                        &(&xs[q as usize] * &zs[s as usize]),
                    )
                })
                .collect::<Result<_, _>>()?,
        });
    }
    Ok(DecompositionTable {
        p: spec.p(),
        n: spec.n(),
        basis: kind,
        kets: (0..spec.d() as usize).map(|i| map.ket(i)).collect(),
        rows,
        fourier_factorizes: factorization_of_f(spec, &map).is_some(),
    })
}

/// Phase-one word with the given factors.
pub fn word(p: u32, factors: &[(u32, u32)]) -> PauliWord {
    PauliWord {
        p,
        factors: factors.to_vec(),
        phase: CycloScalar::one(conductor_for_prime(p)),
    }
}
