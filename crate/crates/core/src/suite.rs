//! The full identity suite run by `mubforge verify`.
//!
//! Each check is exhaustive over its index range unless noted, and records
//! every failing case as a human-readable line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclotomic::{conductor_for_prime, CycloScalar};
use crate::finite_field::{BasisKind, FieldSpec};
use crate::matrix::CMatrix;
use crate::mub;
use crate::tensor::{self, DigitMap};
use crate::weyl;

/// Seed for the sampled commutator check, fixed so reports are reproducible.
pub const COMMUTATOR_SEED: u64 = 0x6d75_6266;
pub const COMMUTATOR_SAMPLES: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub violations: Vec<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            cases: 0,
            violations: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub p: u32,
    pub n: u32,
    pub d: u32,
    pub checks: Vec<CheckResult>,
    pub violation_count: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Runs every applicable check for `GF(p^n)`.
pub fn run(spec: &FieldSpec) -> SuiteReport {
    let mut checks = vec![
        jacobi_addition(spec),
        character_sums(spec),
        character_homomorphism(spec),
    ];
    if spec.n() == 1 {
        checks.push(prime_identities(spec.p()));
    }
    checks.push(weyl_relation(spec));
    checks.push(trace_orthogonality(spec));
    checks.push(fourier_conjugation(spec));
    checks.push(periodicity(spec));
    if spec.p() != 2 {
        checks.push(conjugation_by_v(spec));
    }
    checks.push(class_structure(spec));
    checks.push(commutator_formula(
        spec,
        COMMUTATOR_SEED,
        COMMUTATOR_SAMPLES,
    ));
    checks.push(mub_family(spec));
    for kind in [BasisKind::Polynomial, BasisKind::Normal] {
        checks.push(tensor_words(spec, kind));
    }
    let violation_count = checks.iter().map(|c| c.violations.len()).sum();
    SuiteReport {
        p: spec.p(),
        n: spec.n(),
        d: spec.d(),
        checks,
        violation_count,
    }
}

/// Addition through the Jacobi table equals coefficient addition, for all
/// pairs.
pub fn jacobi_addition(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("jacobi addition = coefficient addition");
    let elems: Vec<_> = spec.elements().collect();
    for a in &elems {
        for b in &elems {
            let via_coeffs: Vec<u32> = a
                .coeffs()
                .iter()
                .zip(b.coeffs())
                .map(|(x, y)| (x + y) % spec.p())
                .collect();
            let via_jacobi = spec.add_via_jacobi(a, b).map(|s| s.coeffs());
            c.expect(via_jacobi.as_ref() == Ok(&via_coeffs), || {
                format!("{:?} + {:?}", a.power(), b.power())
            });
        }
    }
    c
}

/// `Σ_θ χ(θ) = 0` and `Σ_{k=0}^{d-2} χ(α^k θ) = d·δ_{θ,0} - 1` for every `θ`.
pub fn character_sums(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("character sums");
    let m = conductor_for_prime(spec.p());
    let total = spec
        .elements()
        .fold(CycloScalar::zero(m), |acc, t| acc + spec.character(&t));
    c.expect(total.is_zero(), || format!("Σχ(θ) = {total}"));
    let d = spec.d() as i64;
    for theta in spec.elements() {
        let s = (0..d - 1).fold(CycloScalar::zero(m), |acc, k| {
            acc + spec.character(&spec.mul(&spec.alpha_pow(k), &theta).expect("same field"))
        });
        let expected = if theta.is_zero() { d - 1 } else { -1 };
        c.expect(s == CycloScalar::from_integer(m, expected), || {
            format!("Σ_k χ(α^k θ) = {s} at θ = {:?}", theta.power())
        });
    }
    c
}

/// `χ(a)χ(b) = χ(a + b)` for all pairs.
pub fn character_homomorphism(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("χ(a)χ(b) = χ(a+b)");
    let elems: Vec<_> = spec.elements().collect();
    for a in &elems {
        for b in &elems {
            let sum = spec.add(a, b).expect("same field");
            c.expect(
                spec.character(a) * spec.character(b) == spec.character(&sum),
                || format!("{:?}, {:?}", a.power(), b.power()),
            );
        }
    }
    c
}

/// Prime-dimension relations: `ZX = ωXZ`, `F†ZF = X`, the `V` shear (or
/// `Y = V†XV` for `d = 2`), pairwise trace orthogonality and the class
/// structure.
pub fn prime_identities(d: u32) -> CheckResult {
    let mut c = CheckResult::new("prime-dimension identities");
    let (x, z, omega) = weyl::prime_generators(d).expect("prime");
    let f = weyl::prime_fourier(d).expect("prime");
    let v = weyl::prime_v(d).expect("prime");
    c.expect(
        &z * &x == (&x * &z).scale(&omega).expect("same ring"),
        || "ZX ≠ ωXZ".into(),
    );
    c.expect(&(&f.adjoint() * &z) * &f == x, || "F†ZF ≠ X".into());
    c.expect(f.is_unitary(), || "F not unitary".into());
    if d == 2 {
        let y = (&x * &z)
            .scale(&CycloScalar::zeta_pow(4, 1))
            .expect("same ring");
        c.expect(&(&v.adjoint() * &x) * &v == y, || "V†XV ≠ iXZ".into());
    } else {
        for m in 0..d {
            let vm = v.pow(m);
            c.expect(&(&vm.adjoint() * &x) * &vm == &x * &z.pow(m), || {
                format!("V†^{m} X V^{m} ≠ XZ^{m}")
            });
        }
    }
    let classes = weyl::prime_classes(d).expect("prime");
    for problem in weyl::class_violations(&classes) {
        c.expect(false, || problem);
    }
    c
}

fn zs_xs(spec: &FieldSpec) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let order = spec.d() as i64 - 1;
    (
        (0..order)
            .map(|q| weyl::zq_from_definition(spec, q))
            .collect(),
        (0..order)
            .map(|q| weyl::xq_from_definition(spec, q))
            .collect(),
    )
}

/// `Z_q X_{q'} = χ(α^{q+q'}) X_{q'} Z_q` for all `q, q'`.
pub fn weyl_relation(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("Z_q X_q' = χ(α^(q+q')) X_q' Z_q");
    let (zs, xs) = zs_xs(spec);
    for (q, z) in zs.iter().enumerate() {
        for (qp, x) in xs.iter().enumerate() {
            let phase = spec.character(&spec.alpha_pow((q + qp) as i64));
            c.expect(z * x == (x * z).scale(&phase).expect("same ring"), || {
                format!("q={q}, q'={qp}")
            });
        }
    }
    c
}

/// `Tr(A B†) = d·δ` over `{Z_q}`, `{X_q}` and all products `X_q Z_r`.
pub fn trace_orthogonality(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("trace orthogonality");
    let m = conductor_for_prime(spec.p());
    let d = CycloScalar::from_integer(m, spec.d() as i64);
    let zero = CycloScalar::zero(m);
    let (zs, xs) = zs_xs(spec);
    let check_family = |c: &mut CheckResult, name: &str, ops: &[CMatrix]| {
        for (i, a) in ops.iter().enumerate() {
            for (j, b) in ops.iter().enumerate() {
                let t = a.trace_inner(b).expect("same shape");
                let expected = if i == j { &d } else { &zero };
                c.expect(t == *expected, || format!("{name}: ({i}, {j}) gives {t}"));
            }
        }
    };
    check_family(&mut c, "Z", &zs);
    check_family(&mut c, "X", &xs);
    let products: Vec<CMatrix> = xs
        .iter()
        .flat_map(|x| zs.iter().map(move |z| x * z))
        .collect();
    check_family(&mut c, "XZ", &products);
    c
}

/// `F` is unitary and `F† Z_q F = X_q` for every `q`.
pub fn fourier_conjugation(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("F†Z_qF = X_q");
    let f = weyl::build_f(spec);
    let f_dag = f.adjoint();
    c.expect(f.is_unitary(), || "F is not unitary".into());
    let (zs, xs) = zs_xs(spec);
    for (q, (z, x)) in zs.iter().zip(&xs).enumerate() {
        c.expect(&(&f_dag * z) * &f == *x, || format!("q={q}"));
    }
    c
}

/// `Z_{q+d-1} = Z_q` and `X_{q+d-1} = X_q`.
pub fn periodicity(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("subscript period d-1");
    let period = spec.d() as i64 - 1;
    for q in 0..period {
        c.expect(
            weyl::zq_from_definition(spec, q + period) == weyl::zq_from_definition(spec, q),
            || format!("Z_{}", q + period),
        );
        c.expect(
            weyl::xq_from_definition(spec, q + period) == weyl::xq_from_definition(spec, q),
            || format!("X_{}", q + period),
        );
    }
    c
}

/// `V_{q+r}^{(q)}† X_q V_{q+r}^{(q)} = χ(2^{-1}α^{2q+r}) X_q Z_{q+r}` for all
/// `q, r` (odd `p`).
pub fn conjugation_by_v(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("V conjugation of X_q");
    let order = spec.d() - 1;
    let (zs, xs) = zs_xs(spec);
    for q in 0..order {
        for r in 0..order {
            let v = weyl::build_vqr(spec, (q + r) % order, q).expect("odd p");
            let phase = weyl::vqr_conjugation_phase(spec, q, r).expect("odd p");
            let lhs = &(&v.adjoint() * &xs[q as usize]) * &v;
            let rhs = (&xs[q as usize] * &zs[((q + r) % order) as usize])
                .scale(&phase)
                .expect("same ring");
            c.expect(lhs == rhs, || format!("q={q}, r={r}"));
        }
    }
    c
}

/// The `d + 1` composite classes: sizes, unitarity, commutativity and
/// trace disjointness.
pub fn class_structure(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("commuting classes");
    match weyl::build_classes(spec) {
        Ok(classes) => {
            c.cases += classes.len();
            c.violations.extend(weyl::class_violations(&classes));
        }
        Err(e) => c.expect(false, || e.to_string()),
    }
    c
}

/// `[X_qZ_r, X_q'Z_r'] = X_{(q)+(q')} Z_{(r)+(r')} (χ(α^{q'+r}) - χ(α^{q+r'}))`
/// on random index quadruples, where `X_{(q)+(q')}` shifts by `α^q + α^q'`
/// and `Z_{(r)+(r')}` is the clock for `α^r + α^r'`.
pub fn commutator_formula(spec: &FieldSpec, seed: u64, samples: usize) -> CheckResult {
    let mut c = CheckResult::new("commutator formula (sampled)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = spec.d() as i64 - 1;
    for _ in 0..samples {
        let [q, r, qp, rp]: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..order));
        let a = &weyl::xq_from_definition(spec, q) * &weyl::zq_from_definition(spec, r);
        let b = &weyl::xq_from_definition(spec, qp) * &weyl::zq_from_definition(spec, rp);
        let lhs = (&a * &b).try_sub(&(&b * &a)).expect("same shape");
        let shift = spec
            .add(&spec.alpha_pow(q), &spec.alpha_pow(qp))
            .expect("same field");
        let clock = spec
            .add(&spec.alpha_pow(r), &spec.alpha_pow(rp))
            .expect("same field");
        let coeff =
            spec.character(&spec.alpha_pow(qp + r)) - spec.character(&spec.alpha_pow(q + rp));
        let rhs = (&weyl::shift_op(spec, &shift).expect("same field")
            * &weyl::clock_op(spec, &clock).expect("same field"))
            .scale(&coeff)
            .expect("same ring");
        c.expect(lhs == rhs, || {
            format!("(q, r, q', r') = ({q}, {r}, {qp}, {rp})")
        });
    }
    c
}

/// Builds the MUB family and checks unbiasedness and eigenvectors.
pub fn mub_family(spec: &FieldSpec) -> CheckResult {
    let mut c = CheckResult::new("mutually unbiased bases");
    let family = match mub::build_mubs(spec) {
        Ok(f) => f,
        Err(e) => {
            c.expect(false, || e.to_string());
            return c;
        }
    };
    c.cases += 1;
    for v in mub::verify_unbiased(&family) {
        c.violations.push(format!(
            "|<b{}v{}|b{}v{}>|² = {}",
            v.basis_a, v.vec_i, v.basis_b, v.vec_j, v.overlap_sq
        ));
    }
    match mub::classes_for(spec, family.route) {
        Ok(classes) => c
            .violations
            .extend(mub::eigenbasis_violations(&family, &classes)),
        Err(e) => c.violations.push(e.to_string()),
    }
    c
}

/// Every `Z_q`, `X_q`, `X_qZ_r` decomposes, and exponents add:
/// `word(X_qZ_r) = word(X_q) + word(Z_r)` mod `p`.
pub fn tensor_words(spec: &FieldSpec, kind: BasisKind) -> CheckResult {
    let name = match kind {
        BasisKind::Polynomial => "tensor words (polynomial basis)",
        BasisKind::Normal => "tensor words (normal basis)",
    };
    let mut c = CheckResult::new(name);
    let map = DigitMap::new(spec, &spec.basis(kind));
    let (zs, xs) = zs_xs(spec);
    let decompose_all = |ops: &[CMatrix]| -> Vec<Option<tensor::PauliWord>> {
        ops.iter()
            .map(|m| tensor::decompose(m, &map).ok())
            .collect()
    };
    let zw = decompose_all(&zs);
    let xw = decompose_all(&xs);
    for (q, w) in zw.iter().enumerate() {
        c.expect(w.is_some(), || format!("Z_{q} has no word"));
    }
    for (q, w) in xw.iter().enumerate() {
        c.expect(w.is_some(), || format!("X_{q} has no word"));
    }
    let p = spec.p();
    for (q, x) in xs.iter().enumerate() {
        for (r, z) in zs.iter().enumerate() {
            let prod = tensor::decompose(&(x * z), &map).ok();
            let expected = match (&xw[q], &zw[r]) {
                (Some(a), Some(b)) => Some(
                    a.factors
                        .iter()
                        .zip(&b.factors)
                        .map(|(&(a1, b1), &(a2, b2))| ((a1 + a2) % p, (b1 + b2) % p))
                        .collect::<Vec<_>>(),
                ),
                _ => None,
            };
            c.expect(
                prod.is_some() && prod.as_ref().map(|w| &w.factors) == expected.as_ref(),
                || format!("X_{q}Z_{r}"),
            );
        }
    }
    c
}
