//! Dense square matrices and vectors over [`CycloScalar`].
//!
//! Entry `(i, j)` is `⟨i|M|j⟩`. Kronecker products put the left factor on
//! the most significant digit of the row/column index.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{CycloError, CycloScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix rows must all have length {0}")]
    Ragged(usize),
    #[error("matrix must be non-empty")]
    Empty,
    #[error("entries mix scale exponents {0} and {1}")]
    MixedScale(u32, u32),
    #[error(transparent)]
    Scalar(#[from] CycloError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CMatrix {
    dim: usize,
    m: u32,
    entries: Vec<CycloScalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CVector {
    m: u32,
    entries: Vec<CycloScalar>,
}

fn check_homogeneous<'a>(
    m: u32,
    it: impl Iterator<Item = &'a CycloScalar>,
) -> Result<(), MatrixError> {
    let mut seen = None;
    for x in it {
        if x.conductor() != m {
            return Err(CycloError::ConductorMismatch(m, x.conductor()).into());
        }
        if x.is_zero() {
            continue;
        }
        match seen {
            None => seen = Some(x.scale_k()),
            Some(k) if k != x.scale_k() => return Err(MatrixError::MixedScale(k, x.scale_k())),
            _ => {}
        }
    }
    Ok(())
}

impl CMatrix {
    pub fn from_rows(rows: Vec<Vec<CycloScalar>>) -> Result<Self, MatrixError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(MatrixError::Ragged(dim));
        }
        let m = rows[0][0].conductor();
        let entries: Vec<CycloScalar> = rows.into_iter().flatten().collect();
        check_homogeneous(m, entries.iter())?;
        Ok(Self { dim, m, entries })
    }

    pub fn zeros(dim: usize, m: u32) -> Self {
        Self {
            dim,
            m,
            entries: vec![CycloScalar::zero(m); dim * dim],
        }
    }

    pub fn identity(dim: usize, m: u32) -> Self {
        let mut a = Self::zeros(dim, m);
        for i in 0..dim {
            a.entries[i * dim + i] = CycloScalar::one(m);
        }
        a
    }

    pub fn diagonal(diag: Vec<CycloScalar>) -> Result<Self, MatrixError> {
        let dim = diag.len();
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        let m = diag[0].conductor();
        check_homogeneous(m, diag.iter())?;
        let mut a = Self::zeros(dim, m);
        for (i, x) in diag.into_iter().enumerate() {
            a.entries[i * dim + i] = x;
        }
        Ok(a)
    }

    /// The permutation matrix with `|j⟩ ↦ |image[j]⟩`.
    pub fn permutation(m: u32, image: &[usize]) -> Self {
        let dim = image.len();
        let mut a = Self::zeros(dim, m);
        for (j, &i) in image.iter().enumerate() {
            a.entries[i * dim + j] = CycloScalar::one(m);
        }
        a
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[CVector]) -> Result<Self, MatrixError> {
        let dim = cols.len();
        let rows = (0..dim)
            .map(|i| {
                cols.iter()
                    .map(|c| {
                        if c.dim() != dim {
                            Err(MatrixError::Ragged(dim))
                        } else {
                            Ok(c.entries[i].clone())
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloScalar {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[CycloScalar]> {
        self.entries.chunks(self.dim)
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector {
            m: self.m,
            entries: (0..self.dim).map(|i| self.get(i, j).clone()).collect(),
        }
    }

    pub fn columns(&self) -> Vec<CVector> {
        (0..self.dim).map(|j| self.column(j)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diag(&self) -> Vec<CycloScalar> {
        (0..self.dim).map(|i| self.get(i, i).clone()).collect()
    }

    fn check_same(&self, other: &Self) -> Result<(), MatrixError> {
        if self.dim != other.dim {
            return Err(MatrixError::DimensionMismatch(self.dim, other.dim));
        }
        if self.m != other.m {
            return Err(CycloError::ConductorMismatch(self.m, other.m).into());
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n, self.m);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * n + j;
                    out.entries[idx] = out.entries[idx].try_add(&a.try_mul(b)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        Ok(Self { entries, ..*self })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.try_add(&other.scale(&-CycloScalar::one(other.m))?)
    }

    pub fn scale(&self, c: &CycloScalar) -> Result<Self, MatrixError> {
        let entries = self
            .entries
            .iter()
            .map(|a| a.try_mul(c))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            entries,
            dim: self.dim,
            m: self.m,
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(j, i).conj());
            }
        }
        Self { entries, ..*self }
    }

    pub fn trace(&self) -> CycloScalar {
        (0..self.dim).fold(CycloScalar::zero(self.m), |acc, i| acc + self.get(i, i))
    }

    /// `Tr(A·B†) = Σ A_ij·conj(B_ij)`, without forming the product.
    pub fn trace_inner(&self, other: &Self) -> Result<CycloScalar, MatrixError> {
        self.check_same(other)?;
        let mut acc = CycloScalar::zero(self.m);
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if !a.is_zero() && !b.is_zero() {
                acc = acc.try_add(&a.try_mul(&b.conj())?)?;
            }
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::identity(self.dim, self.m);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector, MatrixError> {
        if v.dim() != self.dim {
            return Err(MatrixError::DimensionMismatch(self.dim, v.dim()));
        }
        let mut out = Vec::with_capacity(self.dim);
        for row in self.rows() {
            let mut acc = CycloScalar::zero(self.m);
            for (a, x) in row.iter().zip(&v.entries) {
                if !a.is_zero() && !x.is_zero() {
                    acc = acc.try_add(&a.try_mul(x)?)?;
                }
            }
            out.push(acc);
        }
        Ok(CVector {
            m: self.m,
            entries: out,
        })
    }

    /// Kronecker product `A ⊗ B`.
    pub fn tensor(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.m != other.m {
            return Err(CycloError::ConductorMismatch(self.m, other.m).into());
        }
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Self::zeros(n, self.m);
        for i1 in 0..a {
            for j1 in 0..a {
                let x = self.get(i1, j1);
                if x.is_zero() {
                    continue;
                }
                for i2 in 0..b {
                    for j2 in 0..b {
                        out.entries[(i1 * b + i2) * n + j1 * b + j2] =
                            x.try_mul(other.get(i2, j2))?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Relabels indices: `B[perm[i]][perm[j]] = A[i][j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim;
        assert_eq!(perm.len(), n, "permutation length");
        let mut out = Self::zeros(n, self.m);
        for i in 0..n {
            for j in 0..n {
                out.entries[perm[i] * n + perm[j]] = self.get(i, j).clone();
            }
        }
        out
    }

    /// The root of unity `λ` with `self = λ·other`, if there is one.
    pub fn equal_up_to_phase(&self, other: &Self) -> Option<CycloScalar> {
        self.check_same(other).ok()?;
        let idx = other.entries.iter().position(|x| !x.is_zero())?;
        let lambda = self.entries[idx].try_div(&other.entries[idx]).ok()?;
        lambda.unit_index()?;
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(a, b)| lambda.try_mul(b).is_ok_and(|lb| lb == *a))
            .then_some(lambda)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim, self.m)
    }

    pub fn is_unitary(&self) -> bool {
        self.try_mul(&self.adjoint()).is_ok_and(|p| p.is_identity())
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        match (self.try_mul(other), other.try_mul(self)) {
            (Ok(ab), Ok(ba)) => ab == ba,
            _ => false,
        }
    }
}

/// Common modulus of all nonzero entries when each entry is that modulus
/// times a root of unity.
fn common_modulus<'a>(entries: impl Iterator<Item = &'a CycloScalar>) -> Option<CycloScalar> {
    let mut common: Option<CycloScalar> = None;
    for x in entries.filter(|x| !x.is_zero()) {
        let (r, _) = x.polar_exact()?;
        match &common {
            None => common = Some(r),
            Some(c) if *c != r => return None,
            _ => {}
        }
    }
    common
}

/// Renders entries with a shared modulus divided out; returns the prefix
/// (`"1/2 · "` or empty) and the cells.
fn factored_cells<'a>(
    entries: impl Iterator<Item = &'a CycloScalar> + Clone,
) -> (String, Vec<String>) {
    let factor = common_modulus(entries.clone()).filter(|c| !c.is_one());
    let cells = entries
        .map(|x| match &factor {
            Some(c) if !x.is_zero() => x.try_div(c).map(|u| u.to_string()).unwrap_or_default(),
            _ => x.to_string(),
        })
        .collect();
    let prefix = factor.map(|c| format!("{c} · ")).unwrap_or_default();
    (prefix, cells)
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;

    /// Panics on dimension or conductor mismatch; see [`CMatrix::try_mul`].
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Display for CMatrix {
    /// Symbolic rendering: `diag(…)` for diagonal matrices, otherwise
    /// rows of symbols with a shared modulus pulled out in front.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_diagonal() {
            let diag = self.diag();
            let (prefix, cells) = factored_cells(diag.iter());
            return write!(f, "{prefix}diag({})", cells.join(", "));
        }
        let (prefix, cells) = factored_cells(self.entries.iter());
        let width = cells.iter().map(|c| c.chars().count()).max().unwrap_or(1);
        if !prefix.is_empty() {
            writeln!(f, "{}", prefix.trim_end())?;
        }
        for (i, row) in cells.chunks(self.dim).enumerate() {
            let padded: Vec<String> = row
                .iter()
                .map(|c| format!("{}{c}", " ".repeat(width - c.chars().count())))
                .collect();
            write!(f, "[ {} ]", padded.join(" "))?;
            if i + 1 < self.dim {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (prefix, cells) = factored_cells(self.entries.iter());
        write!(f, "{prefix}({})", cells.join(", "))
    }
}

impl CVector {
    pub fn new(entries: Vec<CycloScalar>) -> Result<Self, MatrixError> {
        let m = entries.first().ok_or(MatrixError::Empty)?.conductor();
        check_homogeneous(m, entries.iter())?;
        Ok(Self { m, entries })
    }

    /// The standard unit vector `|i⟩`.
    pub fn unit(dim: usize, m: u32, i: usize) -> Self {
        let mut entries = vec![CycloScalar::zero(m); dim];
        entries[i] = CycloScalar::one(m);
        Self { m, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    pub fn entries(&self) -> &[CycloScalar] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CycloScalar::is_zero)
    }

    /// `⟨self|other⟩ = Σ conj(self_i)·other_i`.
    pub fn inner(&self, other: &Self) -> Result<CycloScalar, MatrixError> {
        if self.dim() != other.dim() {
            return Err(MatrixError::DimensionMismatch(self.dim(), other.dim()));
        }
        let mut acc = CycloScalar::zero(self.m);
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if !a.is_zero() && !b.is_zero() {
                acc = acc.try_add(&a.conj().try_mul(b)?)?;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &CycloScalar) -> Result<Self, MatrixError> {
        let entries = self
            .entries
            .iter()
            .map(|a| a.try_mul(c))
            .collect::<Result<_, _>>()?;
        Ok(Self { m: self.m, entries })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.dim() != other.dim() {
            return Err(MatrixError::DimensionMismatch(self.dim(), other.dim()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_, _>>()?;
        Ok(Self { m: self.m, entries })
    }

    pub fn first_nonzero(&self) -> Option<(usize, &CycloScalar)> {
        self.entries.iter().enumerate().find(|(_, x)| !x.is_zero())
    }

    /// Rotates the global phase so the first nonzero entry is a positive
    /// `r/√p^k`. `None` when that entry is not a root of unity times such
    /// a modulus.
    pub fn canonicalize_phase(&self) -> Option<Self> {
        let (_, lead) = self.first_nonzero()?;
        let (_, t) = lead.polar_exact()?;
        let unit = CycloScalar::root_of_unity(self.m, -(t as i64));
        self.scale(&unit).ok()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<Vec<CycloScalar>>,
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            dim: self.dim,
            entries: self.rows().map(<[CycloScalar]>::to_vec).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MatrixRepr::deserialize(d)?;
        if r.entries.len() != r.dim {
            return Err(D::Error::custom("dim does not match the number of rows"));
        }
        CMatrix::from_rows(r.entries).map_err(D::Error::custom)
    }
}

impl Serialize for CVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        CVector::new(Vec::deserialize(d)?).map_err(D::Error::custom)
    }
}
