//! One function per acceptance criterion. `Ok` carries a short summary,
//! `Err` the list of failures.

use std::collections::BTreeSet;

use mubforge::cyclotomic::conductor_for_prime;
use mubforge::finite_field::BasisKind;
use mubforge::mub;
use mubforge::tensor::{self, DigitMap};
use mubforge::weyl::{self, CommutingClass};
use mubforge::{CMatrix, CVector, CycloScalar, FieldSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::reference::{self as refdata, WordTable};
use super::*;

pub type Verdict = Result<String, String>;

pub const DIMENSIONS: [(u32, u32); 7] = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)];

struct Failures(Vec<String>);

impl Failures {
    fn new() -> Self {
        Self(Vec::new())
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.0.push(what());
        }
    }

    fn verdict(self, summary: impl FnOnce() -> String) -> Verdict {
        if self.0.is_empty() {
            Ok(summary())
        } else {
            let shown: Vec<_> = self.0.iter().take(12).cloned().collect();
            let more = self.0.len().saturating_sub(shown.len());
            let mut s = shown.join("; ");
            if more > 0 {
                s.push_str(&format!("; … {more} more"));
            }
            Err(s)
        }
    }
}

fn scaled(m: &CMatrix, c: &CycloScalar) -> CMatrix {
    m.scale(c).expect("same ring")
}

pub fn golden_d4() -> Verdict {
    let spec = gf(2, 2);
    let mut f = Failures::new();
    for (q, row) in refdata::GF4_Z.iter().enumerate() {
        f.check(
            weyl::build_zq(&spec, q as u32).unwrap() == diag(2, row),
            || format!("Z_{q}"),
        );
    }
    for (q, rows) in refdata::GF4_X.iter().enumerate() {
        f.check(
            weyl::build_xq(&spec, q as u32).unwrap() == matrix(2, rows),
            || format!("X_{q}"),
        );
    }
    let half = CycloScalar::from_rational(4, rational(1, 2));
    f.check(
        weyl::build_f(&spec) == scaled(&matrix(2, &refdata::GF4_F_TIMES_2), &half),
        || "F".into(),
    );
    for (q, r, rows) in &refdata::GF4_XZ {
        f.check(
            weyl::build_xqzr(&spec, *q, *r).unwrap() == matrix(2, rows),
            || format!("X_{q}Z_{r}"),
        );
    }
    f.verdict(|| "Z_0..Z_2, X_0..X_2, F and 9 products X_qZ_r equal entrywise".into())
}

pub fn golden_d8() -> Verdict {
    let spec = gf(2, 3);
    let mut f = Failures::new();
    let s = CycloScalar::inv_sqrt_p_pow(4, 3);
    f.check(
        weyl::build_f(&spec) == scaled(&matrix(2, &refdata::GF8_F_TIMES_SQRT8), &s),
        || "F".into(),
    );
    for (q, row) in refdata::GF8_Z.iter().enumerate() {
        f.check(
            weyl::build_zq(&spec, q as u32).unwrap() == diag(2, row),
            || format!("Z_{q}"),
        );
    }
    f.check(
        weyl::build_xq(&spec, 0).unwrap() == matrix(2, &refdata::GF8_X0),
        || "X_0".into(),
    );
    f.verdict(|| "F, Z_0..Z_6 and X_0 equal entrywise".into())
}

pub fn golden_d9() -> Verdict {
    let spec = gf(3, 2);
    let mut f = Failures::new();
    let third = CycloScalar::from_rational(3, rational(1, 3));
    f.check(
        weyl::build_f(&spec) == scaled(&matrix(3, &refdata::GF9_F_TIMES_3), &third),
        || "F".into(),
    );
    let zs: Vec<CMatrix> = (0..8).map(|q| weyl::build_zq(&spec, q).unwrap()).collect();
    for (q, row) in refdata::GF9_Z.iter().enumerate() {
        f.check(zs[q] == diag(3, row), || format!("Z_{q}"));
    }
    for (q, row) in refdata::GF9_V.iter().enumerate() {
        f.check(
            weyl::build_vqr(&spec, q as u32, 0).unwrap() == diag(3, row),
            || format!("V_{q}"),
        );
    }
    f.check(
        weyl::build_xq(&spec, 0).unwrap() == matrix(3, &refdata::GF9_X0),
        || "X_0".into(),
    );
    // Z_q keeps the leading 1 and cyclically shifts the rest of Z_0's diagonal
    let z0 = zs[0].diag();
    for (q, z) in zs.iter().enumerate() {
        let d = z.diag();
        f.check(d[0].is_one(), || format!("Z_{q} does not start with 1"));
        let mut tail = z0[1..].to_vec();
        tail.rotate_left(q);
        f.check(d[1..] == tail[..], || {
            format!("Z_{q} is not a cyclic shift of Z_0")
        });
    }
    f.verdict(|| {
        "F, Z_0..Z_7, V_0..V_7 and X_0 equal entrywise; Z_q is Z_0 cyclically shifted".into()
    })
}

pub fn character_tables() -> Verdict {
    let mut f = Failures::new();
    let tables: [(u32, u32, &[&str]); 3] = [
        (2, 2, &refdata::GF4_CHI),
        (2, 3, &refdata::GF8_CHI),
        (3, 2, &refdata::GF9_CHI),
    ];
    for (p, n, expected) in tables {
        let spec = gf(p, n);
        let values: Vec<_> = spec.elements().map(|e| spec.character(&e)).collect();
        let wanted: Vec<_> = expected.iter().map(|s| scalar(p, s)).collect();
        // the list runs χ(0), χ(α), …, χ(α^{d-1}) and α^{d-1} = 1
        f.check(values == wanted, || format!("GF({p}^{n}) characters"));
        for e in spec.elements() {
            f.check(spec.character(&e) == oracle_character(&spec, &e), || {
                format!(
                    "GF({p}^{n}) χ(α^{:?}) disagrees with the trace oracle",
                    e.power()
                )
            });
        }
    }
    f.verdict(|| "GF(4), GF(8), GF(9) character lists match".into())
}

pub fn mub_completeness() -> Verdict {
    let mut f = Failures::new();
    for (p, n) in DIMENSIONS {
        let spec = gf(p, n);
        let d = spec.d() as usize;
        let m = conductor_for_prime(p);
        let family = match mub::build_mubs(&spec) {
            Ok(family) => family,
            Err(e) => {
                f.check(false, || format!("d={d}: {e}"));
                continue;
            }
        };
        f.check(family.bases.len() == d + 1, || {
            format!("d={d}: {} bases", family.bases.len())
        });
        let one = CycloScalar::one(m);
        let zero = CycloScalar::zero(m);
        let unbiased = CycloScalar::from_rational(m, rational(1, d as i64));
        for (a, basis) in family.bases.iter().enumerate() {
            f.check(basis.vectors.len() == d, || {
                format!("d={d}: basis {a} size")
            });
            for (i, u) in basis.vectors.iter().enumerate() {
                for (j, v) in basis.vectors.iter().enumerate() {
                    let expected = if i == j { &one } else { &zero };
                    f.check(inner(u, v) == *expected, || {
                        format!("d={d}: basis {a} not orthonormal at ({i}, {j})")
                    });
                }
            }
            for (b, other) in family.bases.iter().enumerate().skip(a + 1) {
                for (i, u) in basis.vectors.iter().enumerate() {
                    for (j, v) in other.vectors.iter().enumerate() {
                        f.check(inner(u, v).abs_sq() == unbiased, || {
                            format!("d={d}: |<{a}.{i}|{b}.{j}>|² ≠ 1/{d}")
                        });
                    }
                }
            }
        }
    }
    f.verdict(|| "d ∈ {2,3,4,5,7,8,9}: d+1 orthonormal bases, all overlaps 1/d exactly".into())
}

fn ops(spec: &FieldSpec) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let order = spec.d() - 1;
    (
        (0..order)
            .map(|q| weyl::build_zq(spec, q).unwrap())
            .collect(),
        (0..order)
            .map(|q| weyl::build_xq(spec, q).unwrap())
            .collect(),
    )
}

fn trace_orthogonal(f: &mut Failures, label: &str, d: u32, ops: &[CMatrix]) {
    let m = ops[0].conductor();
    let dd = CycloScalar::from_integer(m, d as i64);
    let zero = CycloScalar::zero(m);
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate() {
            let t = a.trace_inner(b).unwrap();
            let expected = if i == j { &dd } else { &zero };
            f.check(t == *expected, || {
                format!("d={d} {label}: Tr at ({i}, {j}) = {t}")
            });
        }
    }
}

fn prime_identities(f: &mut Failures, d: u32) {
    let (x, z, omega) = weyl::prime_generators(d).unwrap();
    let fourier = weyl::prime_fourier(d).unwrap();
    f.check(&z * &x == scaled(&(&x * &z), &omega), || {
        format!("d={d}: ZX ≠ ωXZ")
    });
    f.check(&(&fourier.adjoint() * &z) * &fourier == x, || {
        format!("d={d}: F†ZF ≠ X")
    });
    let zk: Vec<CMatrix> = (1..d).map(|k| z.pow(k)).collect();
    let xk: Vec<CMatrix> = (1..d).map(|k| x.pow(k)).collect();
    trace_orthogonal(f, "Z^k", d, &zk);
    trace_orthogonal(f, "X^k", d, &xk);
    let xzk: Vec<CMatrix> = (0..d)
        .flat_map(|m| {
            let base = &x * &z.pow(m);
            (1..d).map(move |k| base.pow(k))
        })
        .collect();
    trace_orthogonal(f, "(XZ^m)^k", d, &xzk);
    let v = weyl::prime_v(d).unwrap();
    if d == 2 {
        f.check(v == diag(2, "1 -i"), || "V ≠ diag(1, -i)".into());
        let y = scaled(&(&x * &z), &scalar(2, "i"));
        f.check(&(&v.adjoint() * &x) * &v == y, || "V†XV ≠ iXZ".into());
    } else {
        for m in 0..d {
            let vm = v.pow(m);
            f.check(&(&vm.adjoint() * &x) * &vm == &x * &z.pow(m), || {
                format!("d={d}: V†^{m} X V^{m} ≠ XZ^{m}")
            });
        }
    }
}

/// Exhaustive identity checks over every supported `d ≤ 9`.
pub fn identity_suite() -> Verdict {
    let mut f = Failures::new();
    let mut conjugations = 0;
    for (p, n) in DIMENSIONS {
        let spec = gf(p, n);
        let d = spec.d();
        let order = d - 1;
        if n == 1 {
            prime_identities(&mut f, d);
        }
        let (zs, xs) = ops(&spec);
        trace_orthogonal(&mut f, "Z_q", d, &zs);
        trace_orthogonal(&mut f, "X_q", d, &xs);
        let products: Vec<CMatrix> = xs
            .iter()
            .flat_map(|x| zs.iter().map(move |z| x * z))
            .collect();
        trace_orthogonal(&mut f, "X_qZ_r", d, &products);
        let fourier = weyl::build_f(&spec);
        let f_dag = fourier.adjoint();
        for q in 0..order as usize {
            f.check(&(&f_dag * &zs[q]) * &fourier == xs[q], || {
                format!("d={d}: F†Z_{q}F ≠ X_{q}")
            });
            for (qp, x) in xs.iter().enumerate() {
                let chi = oracle_character(&spec, &spec.alpha_pow((q + qp) as i64));
                f.check(&zs[q] * x == scaled(&(x * &zs[q]), &chi), || {
                    format!("d={d}: Z_{q}X_{qp} ≠ χ(α^{})X_{qp}Z_{q}", q + qp)
                });
            }
        }
        if p != 2 {
            let half = spec.half().unwrap();
            for q in 0..order {
                for r in 0..order {
                    let s = (q + r) % order;
                    let v = weyl::build_vqr(&spec, s, q).unwrap();
                    let arg = spec
                        .scale(half, &spec.alpha_pow((2 * q + r) as i64))
                        .unwrap();
                    let phase = oracle_character(&spec, &arg);
                    let lhs = &(&v.adjoint() * &xs[q as usize]) * &v;
                    let rhs = scaled(&(&xs[q as usize] * &zs[s as usize]), &phase);
                    conjugations += 1;
                    f.check(lhs == rhs, || {
                        format!(
                            "d={d}: V_{s}^({q})† X_{q} V ≠ χ(2⁻¹α^{})X_{q}Z_{s}",
                            2 * q + r
                        )
                    });
                }
            }
        }
    }
    f.verdict(|| {
        format!(
            "trace orthogonality, Weyl relations, F†Z_qF = X_q, V shears, d=2 Y relation, \
             {conjugations} V conjugations with phase"
        )
    })
}

fn classes_of(spec: &FieldSpec) -> Vec<CommutingClass> {
    if spec.n() == 1 {
        weyl::prime_classes(spec.p()).unwrap()
    } else {
        weyl::build_classes(spec).unwrap()
    }
}

pub const COMMUTATOR_SEED: u64 = 0x5eed_c0de;

pub fn class_structure() -> Verdict {
    let mut f = Failures::new();
    for (p, n) in DIMENSIONS {
        let spec = gf(p, n);
        let d = spec.d() as usize;
        let m = conductor_for_prime(p);
        let zero = CycloScalar::zero(m);
        let classes = classes_of(&spec);
        f.check(classes.len() == d + 1, || {
            format!("d={d}: {} classes", classes.len())
        });
        let ids: BTreeSet<_> = classes.iter().map(|c| c.class_id).collect();
        f.check(ids.len() == classes.len(), || {
            format!("d={d}: repeated class id")
        });
        for class in &classes {
            let id = class.class_id;
            f.check(class.members.len() == d - 1, || {
                format!("d={d} {id}: {} members", class.members.len())
            });
            for a in &class.members {
                f.check(a.matrix.is_unitary(), || {
                    format!("d={d} {}: not unitary", a.label)
                });
                f.check(!a.matrix.is_identity(), || {
                    format!("d={d} {}: identity", a.label)
                });
                for b in &class.members {
                    f.check(a.matrix.commutes_with(&b.matrix), || {
                        format!("d={d}: {} and {} do not commute", a.label, b.label)
                    });
                }
            }
        }
        for (i, c1) in classes.iter().enumerate() {
            for c2 in &classes[i + 1..] {
                for a in &c1.members {
                    for b in &c2.members {
                        f.check(a.matrix.trace_inner(&b.matrix).unwrap() == zero, || {
                            format!("d={d}: {} and {} not trace-orthogonal", a.label, b.label)
                        });
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(COMMUTATOR_SEED ^ d as u64);
        let order = d as i64 - 1;
        for _ in 0..100 {
            let [q, r, qp, rp]: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..order));
            let a = &weyl::xq_from_definition(&spec, q) * &weyl::zq_from_definition(&spec, r);
            let b = &weyl::xq_from_definition(&spec, qp) * &weyl::zq_from_definition(&spec, rp);
            let lhs = (&a * &b).try_sub(&(&b * &a)).unwrap();
            let shift = spec.add(&spec.alpha_pow(q), &spec.alpha_pow(qp)).unwrap();
            let clock = spec.add(&spec.alpha_pow(r), &spec.alpha_pow(rp)).unwrap();
            let coeff = oracle_character(&spec, &spec.alpha_pow(qp + r))
                - oracle_character(&spec, &spec.alpha_pow(q + rp));
            let rhs = scaled(
                &(&weyl::shift_op(&spec, &shift).unwrap()
                    * &weyl::clock_op(&spec, &clock).unwrap()),
                &coeff,
            );
            f.check(lhs == rhs, || {
                format!("d={d}: commutator at ({q}, {r}, {qp}, {rp})")
            });
        }
    }
    f.verdict(|| {
        "d+1 trace-disjoint classes of d-1 commuting non-identity unitaries; \
         commutator formula on 100 random quadruples per d"
            .into()
    })
}

/// Outcome of comparing one word table.
pub struct TableReport {
    pub failures: Vec<String>,
    /// Entries that differ and contradict the table's own `X_q`/`Z_r` rows.
    pub inconsistent: Vec<(u32, u32)>,
    /// `(r, printed, expected)` for product rows shorter than `d - 1`.
    pub short_rows: Vec<(u32, usize, usize)>,
    pub entries: usize,
}

pub fn compare_word_table(t: &WordTable) -> TableReport {
    let spec = gf(t.p, t.n);
    let order = spec.d() - 1;
    let map = DigitMap::new(&spec, &spec.basis(t.basis));
    let table = tensor::decomposition_table(&spec, t.basis).expect("every operator decomposes");
    let mut report = TableReport {
        failures: Vec::new(),
        inconsistent: Vec::new(),
        short_rows: Vec::new(),
        entries: 0,
    };
    let kets: Vec<String> = t.kets.iter().map(|k| format!("|{k}⟩")).collect();
    if table.kets != kets {
        report.failures.push(format!("kets {:?}", table.kets));
    }
    if table.fourier_factorizes != t.fourier_factorizes {
        report
            .failures
            .push(format!("F factorizes = {}", table.fourier_factorizes));
    }
    if t.fourier_factorizes {
        let f2 = scaled(
            &matrix(2, &refdata::F2_TIMES_SQRT2),
            &CycloScalar::inv_sqrt_p_pow(4, 1),
        );
        match tensor::factorization_of_f(&spec, &map) {
            Some(factors) if factors.iter().all(|m| *m == f2) => {}
            _ => report.failures.push("F is not F_2 ⊗ F_2".into()),
        }
    }
    let z_words: Vec<_> = t.z.iter().map(|w| pauli(t.p, w)).collect();
    let x_words: Vec<_> = t.x.iter().map(|w| pauli(t.p, w)).collect();
    for (kind, printed, row) in [
        ("Z", &z_words, &table.rows[0]),
        ("X", &x_words, &table.rows[1]),
    ] {
        for (q, w) in printed.iter().enumerate() {
            report.entries += 1;
            let op = if kind == "Z" {
                weyl::build_zq(&spec, q as u32).unwrap()
            } else {
                weyl::build_xq(&spec, q as u32).unwrap()
            };
            // single-qudit clocks and shifts compose with no phase
            if row.entries[q].word.factors != w.factors || tensor::compose(w, &map).unwrap() != op {
                report
                    .failures
                    .push(format!("{kind}_{q} = {}", row.entries[q].word));
            }
        }
    }
    for (r, printed_row) in t.products.iter().enumerate() {
        let r = r as u32;
        if printed_row.len() < order as usize {
            report
                .short_rows
                .push((r, printed_row.len(), order as usize));
        }
        for (q, text) in printed_row.iter().enumerate() {
            report.entries += 1;
            let q = q as u32;
            let s = (q + r) % order;
            let printed = pauli(t.p, text);
            let op = weyl::build_xqzr(&spec, q, s).unwrap();
            let generated = &table.rows[2 + r as usize].entries[q as usize].word;
            let matches = generated.factors == printed.factors
                && tensor::compose(&printed, &map)
                    .unwrap()
                    .equal_up_to_phase(&op)
                    .is_some();
            if matches {
                continue;
            }
            let implied = add_words(t.p, &x_words[q as usize], &z_words[s as usize]);
            if implied != printed.factors {
                report.inconsistent.push((q, s));
            } else {
                report
                    .failures
                    .push(format!("X_{q}Z_{s} = {generated}, listed {text}"));
            }
        }
    }
    report
}

pub fn tensor_tables() -> Verdict {
    let mut f = Failures::new();
    let mut notes = Vec::new();
    let mut entries = 0;
    for t in refdata::WORD_TABLES {
        let report = compare_word_table(t);
        entries += report.entries;
        for failure in report.failures {
            f.check(false, || format!("{}: {failure}", t.name));
        }
        let found: BTreeSet<_> = report.inconsistent.iter().copied().collect();
        let pinned: BTreeSet<_> = t.known_inconsistent.iter().copied().collect();
        f.check(found == pinned, || {
            format!(
                "{}: self-inconsistent entries {found:?}, expected {pinned:?}",
                t.name
            )
        });
        if !found.is_empty() {
            notes.push(format!(
                "{}: {} self-inconsistent entries skipped",
                t.name,
                found.len()
            ));
        }
        for (r, got, want) in report.short_rows {
            notes.push(format!("{}: row r={r} lists {got} of {want}", t.name));
        }
    }
    f.verdict(|| {
        let mut s = format!(
            "{entries} listed words reproduced; F = F_2⊗F_2 in the GF(4) normal basis, \
             not factorized in the GF(4) and GF(8) polynomial bases"
        );
        for n in notes {
            s.push_str(&format!(" [{n}]"));
        }
        s
    })
}

pub fn field_oracles() -> Verdict {
    let mut f = Failures::new();
    let mut pairs = 0;
    for (p, n) in DIMENSIONS {
        let spec = gf(p, n);
        let d = spec.d();
        let m = conductor_for_prime(p);
        for k in 0..d as u64 - 1 {
            f.check(
                spec.alpha_pow(k as i64).coeffs() == oracle_alpha_pow(&spec, k),
                || format!("d={d}: α^{k} coefficients"),
            );
        }
        let elems: Vec<_> = spec.elements().collect();
        for a in &elems {
            for b in &elems {
                pairs += 1;
                let by_coeffs: Vec<u32> = a
                    .coeffs()
                    .iter()
                    .zip(b.coeffs())
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                let by_jacobi = spec.add_via_jacobi(a, b).unwrap();
                f.check(by_jacobi.coeffs() == by_coeffs, || {
                    format!("d={d}: α^{:?} + α^{:?}", a.power(), b.power())
                });
                f.check(
                    spec.mul(a, b).unwrap().coeffs() == oracle_mul(&spec, &a.coeffs(), &b.coeffs()),
                    || format!("d={d}: α^{:?} · α^{:?}", a.power(), b.power()),
                );
            }
        }
        let total = elems.iter().fold(CycloScalar::zero(m), |acc, t| {
            acc + oracle_character(&spec, t)
        });
        f.check(total.is_zero(), || format!("d={d}: Σχ(θ) = {total}"));
        for theta in &elems {
            let s = (0..d as i64 - 1).fold(CycloScalar::zero(m), |acc, k| {
                acc + oracle_character(&spec, &spec.mul(&spec.alpha_pow(k), theta).unwrap())
            });
            let expected = if theta.is_zero() { d as i64 - 1 } else { -1 };
            f.check(s == CycloScalar::from_integer(m, expected), || {
                format!("d={d}: Σ_k χ(α^k θ) = {s} at θ = α^{:?}", theta.power())
            });
        }
    }
    f.verdict(|| {
        format!(
            "{pairs} sums agree via Jacobi and coefficients; both character sum identities hold"
        )
    })
}

fn runner(cases: u32) -> proptest::test_runner::TestRunner {
    use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub const WORD_FIELDS: [(u32, u32); 3] = [(2, 2), (2, 3), (3, 2)];

/// `digits → element → position` and `to_power_order ∘ to_digit_order`
/// are identities.
pub fn digit_map_round_trip() -> Result<usize, String> {
    use proptest::prelude::*;
    let mut checked = 0;
    for (p, n) in WORD_FIELDS {
        for kind in [BasisKind::Polynomial, BasisKind::Normal] {
            let spec = gf(p, n);
            let basis = spec.basis(kind);
            let map = DigitMap::new(&spec, &basis);
            let d = spec.d() as usize;
            for pos in 0..d {
                let back = basis
                    .combine(&spec, map.digits(pos))
                    .map_err(|e| e.to_string())?;
                if spec.position_of(&back) != pos {
                    return Err(format!("GF({p}^{n}) {kind:?}: position {pos}"));
                }
            }
            let m = conductor_for_prime(p);
            let strategy = proptest::collection::vec(-3i64..=3, d * d);
            runner(50)
                .run(&strategy, |cells| {
                    let rows = cells
                        .chunks(d)
                        .map(|r| r.iter().map(|&c| CycloScalar::from_integer(m, c)).collect())
                        .collect();
                    let a = CMatrix::from_rows(rows).unwrap();
                    prop_assert_eq!(map.to_power_order(&map.to_digit_order(&a)), a);
                    Ok(())
                })
                .map_err(|e| format!("GF({p}^{n}) {kind:?}: {e}"))?;
            checked += d + 50;
        }
    }
    Ok(checked)
}

/// `decompose(compose(w)) = w` for random words with random root-of-unity
/// phases.
pub fn word_round_trip(cases: u32) -> Result<usize, String> {
    use proptest::prelude::*;
    for (p, n) in WORD_FIELDS {
        let spec = gf(p, n);
        let map = DigitMap::new(&spec, &spec.polynomial_basis());
        let m = conductor_for_prime(p);
        let units = CycloScalar::unit_group_order(m) as i64;
        let strategy = (
            proptest::collection::vec((0..p, 0..p), n as usize),
            0..units,
        );
        runner(cases)
            .run(&strategy, |(factors, t)| {
                let word = tensor::PauliWord {
                    p,
                    factors,
                    phase: CycloScalar::root_of_unity(m, t),
                };
                let op = tensor::compose(&word, &map).unwrap();
                let back = tensor::decompose(&op, &map).unwrap();
                prop_assert_eq!(back, word);
                Ok(())
            })
            .map_err(|e| format!("GF({p}^{n}): {e}"))?;
    }
    Ok(cases as usize * WORD_FIELDS.len())
}

/// Canonicalizing twice changes nothing, and the result differs from the
/// input by a root of unity.
pub fn phase_canonicalization(cases: u32) -> Result<usize, String> {
    use proptest::prelude::*;
    let mut total = 0;
    for p in [2u32, 3, 5] {
        let m = conductor_for_prime(p);
        let units = CycloScalar::unit_group_order(m) as i64;
        let strategy = (
            proptest::collection::vec((0i64..4, 0..units), 1..6),
            0u32..2,
        );
        runner(cases)
            .run(&strategy, |(cells, k)| {
                let s = CycloScalar::inv_sqrt_p_pow(m, k);
                let entries = cells
                    .iter()
                    .map(|&(c, t)| {
                        &(&CycloScalar::from_integer(m, c) * &CycloScalar::root_of_unity(m, t)) * &s
                    })
                    .collect();
                let v = CVector::new(entries).unwrap();
                if v.is_zero() {
                    prop_assert!(v.canonicalize_phase().is_none());
                    return Ok(());
                }
                let once = v.canonicalize_phase().expect("polar form exists");
                let twice = once.canonicalize_phase().expect("polar form exists");
                prop_assert_eq!(&twice, &once);
                let (_, lead) = once.first_nonzero().unwrap();
                prop_assert_eq!(lead.polar_exact().map(|(_, t)| t), Some(0));
                let related = (0..units).any(|t| {
                    v.scale(&CycloScalar::root_of_unity(m, t)).ok().as_ref() == Some(&once)
                });
                prop_assert!(related);
                Ok(())
            })
            .map_err(|e| format!("p={p}: {e}"))?;
        total += cases as usize;
    }
    Ok(total)
}

fn cli_output(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_mubforge"))
        .args(args)
        .env_remove("MUBFORGE_MAX_D")
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

pub const CLI_RUNS: [&[&str]; 4] = [
    &["mubs", "--p", "2", "--n", "2", "--format", "json"],
    &["verify", "--p", "3", "--n", "2", "--format", "json"],
    &[
        "decompose",
        "--p",
        "3",
        "--n",
        "2",
        "--basis",
        "normal",
        "--format",
        "json",
    ],
    &["classes", "--p", "2", "--n", "3"],
];

/// Each command run twice gives byte-identical output and exit 0.
pub fn cli_determinism() -> Result<usize, String> {
    for args in CLI_RUNS {
        let first = cli_output(args)?;
        let second = cli_output(args)?;
        if first.0 != 0 {
            return Err(format!("{} exited {}", args.join(" "), first.0));
        }
        if first != second {
            return Err(format!("{} differs between runs", args.join(" ")));
        }
    }
    Ok(CLI_RUNS.len())
}

pub fn properties() -> Verdict {
    let mut f = Failures::new();
    let mut summary = Vec::new();
    let parts: [(&str, Result<usize, String>); 4] = [
        ("digit-map round trips", digit_map_round_trip()),
        ("word round trips", word_round_trip(200)),
        ("phase canonicalizations", phase_canonicalization(100)),
        ("CLI commands deterministic", cli_determinism()),
    ];
    for (name, result) in parts {
        match result {
            Ok(count) => summary.push(format!("{count} {name}")),
            Err(e) => f.check(false, || format!("{name}: {e}")),
        }
    }
    f.verdict(|| summary.join(", "))
}
