//! The `d + 1` mutually unbiased bases as joint eigenbases of the
//! commuting classes.
//!
//! Three routes:
//! - prime `d`: columns of `V†^m F†` diagonalize `{(XZ^m)^k}`;
//! - odd prime powers: columns of `F†` for `{X_q}` and of `V_r^{(0)}† F†`
//!   for `{X_q Z_{q+r}}`;
//! - `p = 2`: exact joint diagonalization by projector refinement, since
//!   no diagonal `V` exists in characteristic 2.
//!
//! Every route verifies its output exactly before returning it.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cyclotomic::{conductor_for_prime, CycloScalar};
use crate::finite_field::FieldSpec;
use crate::matrix::{CMatrix, CVector, MatrixError};
use crate::weyl::{self, ClassId, CommutingClass, WeylError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MubError {
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("this route needs {0}")]
    WrongRoute(&'static str),
    #[error("joint diagonalization of {class} left a subspace of dimension {dim}")]
    Refinement { class: ClassId, dim: usize },
    #[error("{0}")]
    Algebra(String),
    #[error("family failed verification: {0}")]
    Verification(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    PrimeFv,
    OddCompositeVf,
    EvenJointDiag,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::PrimeFv => "prime_fv",
            Route::OddCompositeVf => "odd_composite_vf",
            Route::EvenJointDiag => "even_joint_diag",
        }
    }
}

impl Serialize for Route {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Basis {
    pub class: ClassId,
    pub ordering: String,
    pub vectors: Vec<CVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MubFamily {
    pub d: u32,
    pub route: Route,
    pub bases: Vec<Basis>,
}

/// A pair of vectors whose overlap is not what an orthonormal, mutually
/// unbiased family requires.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapViolation {
    pub basis_a: usize,
    pub vec_i: usize,
    pub basis_b: usize,
    pub vec_j: usize,
    pub overlap_sq: CycloScalar,
}

fn basis_from_columns(class: ClassId, ordering: &str, m: &CMatrix) -> Result<Basis, MubError> {
    let vectors = m
        .columns()
        .into_iter()
        .map(|v| {
            v.canonicalize_phase()
                .ok_or_else(|| MubError::Algebra("leading entry has no exact polar form".into()))
        })
        .collect::<Result<_, _>>()?;
    Ok(Basis {
        class,
        ordering: ordering.to_string(),
        vectors,
    })
}

fn computational(dim: usize, m: u32, ordering: &str) -> Basis {
    Basis {
        class: ClassId::Diagonal,
        ordering: ordering.to_string(),
        vectors: (0..dim).map(|i| CVector::unit(dim, m, i)).collect(),
    }
}

/// Prime `d`: the computational basis, then columns of `V†^m F†` for each
/// `m = 0..d-1`.
pub fn mubs_prime(d: u32) -> Result<MubFamily, MubError> {
    let classes = weyl::prime_classes(d)?;
    let f_dag = weyl::prime_fourier(d)?.adjoint();
    let v_dag = weyl::prime_v(d)?.adjoint();
    let m = f_dag.conductor();
    let mut bases = vec![computational(d as usize, m, "|n>, n = 0..d-1")];
    let mut cols = f_dag;
    for mm in 0..d {
        bases.push(basis_from_columns(
            ClassId::Mixed(mm),
            &format!("columns of V†^{mm} F†"),
            &cols,
        )?);
        cols = &v_dag * &cols;
    }
    let family = MubFamily {
        d,
        route: Route::PrimeFv,
        bases,
    };
    ensure_valid(&family, &classes)?;
    Ok(family)
}

/// Odd `p`: computational basis, columns of `F†`, and columns of
/// `V_r^{(0)}† F†` for `r = 0..d-2`.
pub fn mubs_odd_composite(spec: &FieldSpec) -> Result<MubFamily, MubError> {
    if spec.p() == 2 {
        return Err(MubError::WrongRoute("odd characteristic"));
    }
    let classes = weyl::build_classes(spec)?;
    let f_dag = weyl::build_f(spec).adjoint();
    let m = f_dag.conductor();
    let d = spec.d();
    let mut bases = vec![
        computational(d as usize, m, "power order |0>, |α>, ..., |α^(d-1)>"),
        basis_from_columns(ClassId::Shift, "columns of F†", &f_dag)?,
    ];
    for r in 0..d - 1 {
        let v = weyl::build_vqr(spec, r, 0)?;
        bases.push(basis_from_columns(
            ClassId::Mixed(r),
            &format!("columns of V_{r}^(0)† F†"),
            &(&v.adjoint() * &f_dag),
        )?);
    }
    let family = MubFamily {
        d,
        route: Route::OddCompositeVf,
        bases,
    };
    ensure_valid(&family, &classes)?;
    Ok(family)
}

/// `p = 2`: the computational basis for `{Z_q}`, and for every other class
/// the joint eigenbasis found by splitting with `(I + λ̄M)/2`.
pub fn mubs_even_composite(spec: &FieldSpec) -> Result<MubFamily, MubError> {
    if spec.p() != 2 {
        return Err(MubError::WrongRoute("characteristic 2"));
    }
    let classes = weyl::build_classes(spec)?;
    let d = spec.d() as usize;
    let m = conductor_for_prime(2);
    let mut bases = vec![computational(d, m, "power order |0>, |α>, ..., |α^(d-1)>")];
    for class in classes.iter().filter(|c| c.class_id != ClassId::Diagonal) {
        bases.push(joint_eigenbasis(class, d, m)?);
    }
    let family = MubFamily {
        d: spec.d(),
        route: Route::EvenJointDiag,
        bases,
    };
    ensure_valid(&family, &classes)?;
    Ok(family)
}

/// Picks the route: prime `d` (`n = 1`), odd prime power, or `p = 2`.
pub fn build_mubs(spec: &FieldSpec) -> Result<MubFamily, MubError> {
    if spec.n() == 1 {
        mubs_prime(spec.p())
    } else if spec.p() == 2 {
        mubs_even_composite(spec)
    } else {
        mubs_odd_composite(spec)
    }
}

/// The classes a family's bases diagonalize.
pub fn classes_for(spec: &FieldSpec, route: Route) -> Result<Vec<CommutingClass>, MubError> {
    Ok(match route {
        Route::PrimeFv => weyl::prime_classes(spec.p())?,
        _ => weyl::build_classes(spec)?,
    })
}

fn joint_eigenbasis(class: &CommutingClass, d: usize, m: u32) -> Result<Basis, MubError> {
    let one = CycloScalar::one(m);
    let half = CycloScalar::from_rational(m, num_rational::BigRational::new(1.into(), 2.into()));
    let identity = CMatrix::identity(d, m);
    let mut spaces: Vec<Vec<CVector>> = vec![(0..d).map(|i| CVector::unit(d, m, i)).collect()];
    for member in &class.members {
        let mat = &member.matrix;
        let sq = mat * mat;
        let c = if sq == identity {
            one.clone()
        } else if sq == identity.scale(&-one.clone())? {
            -one.clone()
        } else {
            return Err(MubError::Algebra(format!("{}² is not ±I", member.label)));
        };
        // eigenvalues λ with λ² = c, in increasing unit index
        let mut lambdas: Vec<(u32, CycloScalar)> = (0..CycloScalar::unit_group_order(m))
            .map(|t| (t, CycloScalar::root_of_unity(m, t as i64)))
            .filter(|(_, l)| l * l == c)
            .collect();
        lambdas.sort_by_key(|(t, _)| *t);
        let projectors = lambdas
            .iter()
            .map(|(_, l)| identity.try_add(&mat.scale(&l.conj())?)?.scale(&half))
            .collect::<Result<Vec<_>, MatrixError>>()?;
        let mut next = Vec::new();
        for space in &spaces {
            for p in &projectors {
                let images = space
                    .iter()
                    .map(|v| p.apply(v))
                    .collect::<Result<Vec<_>, _>>()?;
                let span = independent_span(images)?;
                if !span.is_empty() {
                    next.push(span);
                }
            }
        }
        spaces = next;
    }
    let mut vectors = Vec::with_capacity(d);
    for space in spaces {
        if space.len() != 1 {
            return Err(MubError::Refinement {
                class: class.class_id,
                dim: space.len(),
            });
        }
        vectors.push(normalize(&space[0])?);
    }
    if vectors.len() != d {
        return Err(MubError::Refinement {
            class: class.class_id,
            dim: vectors.len(),
        });
    }
    Ok(Basis {
        class: class.class_id,
        ordering: "eigenvalue tuples over members in class order, λ by increasing phase".into(),
        vectors,
    })
}

/// Row-reduces `vectors` and returns an echelon basis of their span.
fn independent_span(vectors: Vec<CVector>) -> Result<Vec<CVector>, MatrixError> {
    let mut pivots: Vec<(usize, CVector)> = Vec::new();
    for mut v in vectors {
        for (col, row) in &pivots {
            let c = &v.entries()[*col];
            if !c.is_zero() {
                v = v.try_sub(&row.scale(c)?)?;
            }
        }
        if let Some((col, lead)) = v.first_nonzero() {
            let inv = lead.inverse()?;
            let row = v.scale(&inv)?;
            pivots.push((col, row));
        }
    }
    Ok(pivots.into_iter().map(|(_, r)| r).collect())
}

/// Scales so the first nonzero entry is 1, then divides by the norm.
fn normalize(v: &CVector) -> Result<CVector, MubError> {
    let (_, lead) = v
        .first_nonzero()
        .ok_or_else(|| MubError::Algebra("zero eigenvector".into()))?;
    let v = v.scale(&lead.inverse().map_err(MatrixError::from)?)?;
    let norm_sq = v
        .inner(&v)?
        .to_rational()
        .ok_or_else(|| MubError::Algebra("norm is not rational".into()))?;
    let m = v.conductor();
    let inv_norm = CycloScalar::sqrt_of_rational(m, &norm_sq.recip())
        .ok_or_else(|| MubError::Algebra(format!("1/√{norm_sq} is not in the ring")))?;
    Ok(v.scale(&inv_norm)?)
}

/// Every pair violating orthonormality within a basis or `|⟨u|w⟩|² = 1/d`
/// across bases. Empty for a valid family.
pub fn verify_unbiased(family: &MubFamily) -> Vec<OverlapViolation> {
    let mut out = Vec::new();
    let Some(m) = family
        .bases
        .first()
        .and_then(|b| b.vectors.first())
        .map(CVector::conductor)
    else {
        return out;
    };
    let dim = family.d as i64;
    let one = CycloScalar::one(m);
    let zero = CycloScalar::zero(m);
    let target =
        CycloScalar::from_rational(m, num_rational::BigRational::new(1.into(), dim.into()));
    for (a, ba) in family.bases.iter().enumerate() {
        for (b, bb) in family.bases.iter().enumerate().skip(a) {
            for (i, u) in ba.vectors.iter().enumerate() {
                let start = if a == b { i } else { 0 };
                for (j, w) in bb.vectors.iter().enumerate().skip(start) {
                    let Ok(ip) = u.inner(w) else {
                        out.push(OverlapViolation {
                            basis_a: a,
                            vec_i: i,
                            basis_b: b,
                            vec_j: j,
                            overlap_sq: zero.clone(),
                        });
                        continue;
                    };
                    let ok = if a != b {
                        ip.abs_sq() == target
                    } else if i == j {
                        ip == one
                    } else {
                        ip.is_zero()
                    };
                    if !ok {
                        out.push(OverlapViolation {
                            basis_a: a,
                            vec_i: i,
                            basis_b: b,
                            vec_j: j,
                            overlap_sq: ip.abs_sq(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Checks the family has `d + 1` bases of `d` vectors and that each vector
/// of each basis is an eigenvector, with unimodular eigenvalue, of every
/// member of its class.
pub fn eigenbasis_violations(family: &MubFamily, classes: &[CommutingClass]) -> Vec<String> {
    let mut out = Vec::new();
    let d = family.d as usize;
    if family.bases.len() != d + 1 {
        out.push(format!("{} bases, expected {}", family.bases.len(), d + 1));
    }
    for basis in &family.bases {
        if basis.vectors.len() != d {
            out.push(format!(
                "basis {} has {} vectors",
                basis.class,
                basis.vectors.len()
            ));
        }
        let Some(class) = classes.iter().find(|c| c.class_id == basis.class) else {
            out.push(format!("no class {}", basis.class));
            continue;
        };
        for member in &class.members {
            for (i, v) in basis.vectors.iter().enumerate() {
                let ok = member.matrix.apply(v).ok().and_then(|mv| {
                    let lambda = v.inner(&mv).ok()?;
                    let lv = v.scale(&lambda).ok()?;
                    Some(mv == lv && lambda.abs_sq().is_one())
                });
                if ok != Some(true) {
                    out.push(format!(
                        "vector {i} of basis {} is not an eigenvector of {}",
                        basis.class, member.label
                    ));
                }
            }
        }
    }
    out
}

fn ensure_valid(family: &MubFamily, classes: &[CommutingClass]) -> Result<(), MubError> {
    let mut problems = eigenbasis_violations(family, classes);
    problems.extend(verify_unbiased(family).iter().map(|v| {
        format!(
            "|<b{}v{}|b{}v{}>|² = {}",
            v.basis_a, v.vec_i, v.basis_b, v.vec_j, v.overlap_sq
        )
    }));
    if problems.is_empty() {
        Ok(())
    } else {
        Err(MubError::Verification(problems.join("; ")))
    }
}

/// Compares two families basis by basis: every basis of `a` must have a
/// counterpart in `b` whose vectors match one-to-one up to phase
/// (`|⟨u|w⟩|² = 1`), i.e. the same rank-one projectors.
pub fn route_equivalence(a: &MubFamily, b: &MubFamily) -> Vec<String> {
    let mut out = Vec::new();
    for (ia, ba) in a.bases.iter().enumerate() {
        let matched = b.bases.iter().any(|bb| same_projectors(ba, bb));
        if !matched {
            out.push(format!("basis {ia} ({}) has no counterpart", ba.class));
        }
    }
    out
}

/// Rewrites a family over `GF(p)` from power order into the integer order
/// `|0⟩, |1⟩, …, |p-1⟩` used by the prime route.
pub fn to_integer_order(family: &MubFamily, spec: &FieldSpec) -> MubFamily {
    assert_eq!(spec.n(), 1, "integer order needs a prime field");
    let targets: Vec<usize> = spec.elements().map(|e| e.coeffs()[0] as usize).collect();
    let bases = family
        .bases
        .iter()
        .map(|b| Basis {
            vectors: b
                .vectors
                .iter()
                .map(|v| {
                    let mut entries = v.entries().to_vec();
                    for (pos, &t) in targets.iter().enumerate() {
                        entries[t] = v.entries()[pos].clone();
                    }
                    CVector::new(entries).expect("same ring")
                })
                .collect(),
            ..b.clone()
        })
        .collect();
    MubFamily {
        bases,
        ..family.clone()
    }
}

fn same_projectors(a: &Basis, b: &Basis) -> bool {
    a.vectors.len() == b.vectors.len()
        && a.vectors.iter().all(|u| {
            b.vectors
                .iter()
                .filter(|w| u.inner(w).is_ok_and(|ip| ip.abs_sq().is_one()))
                .count()
                == 1
        })
}
