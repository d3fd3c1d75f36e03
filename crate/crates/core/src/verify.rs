//! Named verification suites shared by the CLI `verify` command and the
//! acceptance harness. Each suite bundles the checks behind one acceptance
//! criterion and reports observed deviations against its threshold.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::hochschild::{
    cocycle_check, fundamental_cochain, multiplication_elements, residue_cochain, residue_cocycle,
};
use crate::hopf::{calibrate_pairing, functional_value, left_act};
use crate::ncalg::{
    random_element, random_word, reduce_words, AlgebraElement, AlgebraId, Gen, Monomial, Strategy,
};
use crate::scalars::{Cplx, MpReal, Real, ScalarContext};
use crate::spectral::{
    bound_probe_a0, commutator_with_d, lk_op, lower, raise, represent, represent_uq, represent_x,
    sphere_ops, BoundVerdict, Parity, ShellOperator, TruncatedSpace,
};
use crate::zeta::{contour_residue_lk, pole_data_lk, residue_ak, residue_lk, tau, zeta_direct, zeta_lk};

type R = MpReal;
type Ctx = ScalarContext<R>;
type Elem = AlgebraElement<R>;

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub q: f64,
    pub precision: u32,
    pub l_max: f64,
    pub j_max: u64,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            q: 0.5,
            precision: 50,
            l_max: 40.5,
            j_max: 200,
            tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub observed: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub duration_ms: u128,
}

pub const SUITES: &[&str] = &[
    "relations",
    "representation",
    "continuation",
    "residues",
    "traces",
    "boundedness",
    "operator-identity",
    "theorem",
    "cocycle",
    "trace-class",
];

struct Recorder {
    checks: Vec<CheckResult>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { checks: Vec::new() }
    }

    /// Record an observed deviation against a threshold.
    fn dev(&mut self, name: &str, observed: f64, threshold: f64) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            observed,
            threshold,
            pass: observed.is_finite() && observed < threshold,
        });
    }

    /// Record a boolean condition (observed 0.0 = holds).
    fn cond(&mut self, name: &str, holds: bool) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            observed: if holds { 0.0 } else { 1.0 },
            threshold: 0.5,
            pass: holds,
        });
    }

    fn finish(self, suite: &str, start: Instant) -> SuiteReport {
        let pass = self.checks.iter().all(|c| c.pass);
        SuiteReport {
            suite: suite.to_string(),
            checks: self.checks,
            pass,
            duration_ms: start.elapsed().as_millis(),
        }
    }
}

fn mk_ctx(cfg: &VerifyConfig) -> Result<Ctx, CoreError> {
    ScalarContext::new(cfg.q, cfg.precision, cfg.tol)
}

pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    match name {
        "relations" => suite_relations(cfg),
        "representation" => suite_representation(cfg),
        "continuation" => suite_continuation(cfg),
        "residues" => suite_residues(cfg),
        "traces" => suite_traces(cfg),
        "boundedness" => suite_boundedness(cfg),
        "operator-identity" => suite_operator_identity(cfg),
        "theorem" => suite_theorem(cfg),
        "cocycle" => suite_cocycle(cfg),
        "trace-class" => suite_trace_class(cfg),
        other => Err(CoreError::InvalidArgument(format!(
            "unknown suite '{other}'; known: {}",
            SUITES.join(", ")
        ))),
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteReport>, CoreError> {
    SUITES.iter().map(|s| run_suite(s, cfg)).collect()
}

/// Criterion 1: defining relations of all three algebras hold exactly
/// after normalization, and reduction is confluent under randomized rule
/// order.
fn suite_relations(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let mut rec = Recorder::new();
    let exact = 1e-40;

    let g = |x: Gen| Elem::generator(x, &c);
    let mul = |x: &Elem, y: &Elem| x.multiply(y, &c).unwrap();
    let sc = |x: &Elem, p: i64| x.scale(&Cplx::from_real(c.q_powi(p)));

    // Sphere relations.
    let (a, b, bs) = (g(Gen::A), g(Gen::B), g(Gen::Bs));
    rec.dev(
        "sphere: BA = q^2 AB",
        mul(&b, &a).max_dev(&sc(&mul(&a, &b), 2), &c),
        exact,
    );
    rec.dev(
        "sphere: AB* = q^2 B*A",
        mul(&a, &bs).max_dev(&sc(&mul(&bs, &a), 2), &c),
        exact,
    );
    let aa = mul(&a, &a);
    rec.dev(
        "sphere: B*B = A - A^2",
        mul(&bs, &b).max_dev(&a.sub(&aa, &c)?, &c),
        exact,
    );
    rec.dev(
        "sphere: BB* = q^2 A - q^4 A^2",
        mul(&b, &bs).max_dev(&sc(&a, 2).sub(&sc(&aa, 4), &c)?, &c),
        exact,
    );

    // SU_q(2) relations.
    let (qa, qb, qc, qd) = (g(Gen::Qa), g(Gen::Qb), g(Gen::Qc), g(Gen::Qd));
    let unit2 = Elem::unit(AlgebraId::Suq2, &c);
    rec.dev("suq2: ab = q ba", mul(&qa, &qb).max_dev(&sc(&mul(&qb, &qa), 1), &c), exact);
    rec.dev("suq2: ac = q ca", mul(&qa, &qc).max_dev(&sc(&mul(&qc, &qa), 1), &c), exact);
    rec.dev("suq2: bc = cb", mul(&qb, &qc).max_dev(&mul(&qc, &qb), &c), exact);
    rec.dev("suq2: bd = q db", mul(&qb, &qd).max_dev(&sc(&mul(&qd, &qb), 1), &c), exact);
    rec.dev("suq2: cd = q dc", mul(&qc, &qd).max_dev(&sc(&mul(&qd, &qc), 1), &c), exact);
    rec.dev(
        "suq2: da = 1 + q^-1 bc",
        mul(&qd, &qa).max_dev(&unit2.add(&sc(&mul(&qb, &qc), -1), &c)?, &c),
        exact,
    );
    rec.dev(
        "suq2: ad = 1 + q bc",
        mul(&qa, &qd).max_dev(&unit2.add(&sc(&mul(&qb, &qc), 1), &c)?, &c),
        exact,
    );

    // U_q relations.
    let (e, f, k, kinv) = (g(Gen::E), g(Gen::F), g(Gen::K), g(Gen::Kinv));
    let unit_u = Elem::unit(AlgebraId::Uq, &c);
    rec.dev("uq: KE = q EK", mul(&k, &e).max_dev(&sc(&mul(&e, &k), 1), &c), exact);
    rec.dev("uq: KF = q^-1 FK", mul(&k, &f).max_dev(&sc(&mul(&f, &k), -1), &c), exact);
    rec.dev("uq: K K^-1 = 1", mul(&k, &kinv).max_dev(&unit_u, &c), exact);
    rec.dev("uq: K^-1 K = 1", mul(&kinv, &k).max_dev(&unit_u, &c), exact);
    let comm = mul(&e, &f).sub(&mul(&f, &e), &c)?;
    let s = Cplx::from_real(c.one() / (c.q() - c.q_powi(-1)));
    let rhs = mul(&k, &k).sub(&mul(&kinv, &kinv), &c)?.scale(&s);
    rec.dev("uq: EF - FE = (K^2 - K^-2)/(q - q^-1)", comm.max_dev(&rhs, &c), exact);

    // Confluence: leftmost vs random rule order on random words.
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for algebra in [AlgebraId::Sphere, AlgebraId::Suq2, AlgebraId::Uq] {
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let w = random_word(algebra, 8, &mut rng, &c);
            let left = reduce_words(
                algebra,
                vec![(w.clone(), c.cone())],
                &c,
                &mut Strategy::Leftmost,
            )?;
            let mut rng2 = ChaCha8Rng::seed_from_u64(rng.gen());
            let rand = reduce_words(
                algebra,
                vec![(w, c.cone())],
                &c,
                &mut Strategy::Random(&mut rng2),
            )?;
            worst = worst.max(left.max_dev(&rand, &c));
        }
        rec.dev(&format!("confluence on 200 random {algebra} words"), worst, exact);
    }

    Ok(rec.finish("relations", start))
}

/// Criterion 2: the truncated representation satisfies the defining
/// relations, the adjointness x_{-1}* = -q^{-1} x_1, the weight
/// identities, x_{+-2} = 0, and the equivariance identities.
fn suite_representation(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let tol = 1e-10;
    let mut rec = Recorder::new();
    let s = TruncatedSpace::from_l_max(cfg.l_max)?;
    let ops = sphere_ops(&s, &c)?;
    let uq = represent_uq(&s, &c);
    let q2 = Cplx::from_real(c.q_powi(2));
    let q4 = Cplx::from_real(c.q_powi(4));

    let ba = ops.b_op.compose(&ops.a_op, &c)?;
    let ab = ops.a_op.compose(&ops.b_op, &c)?;
    rec.dev("pi: BA = q^2 AB", ba.max_entry_dev(&ab.scale(&q2), &c), tol);
    let abs_ = ops.a_op.compose(&ops.bs_op, &c)?;
    let bsa = ops.bs_op.compose(&ops.a_op, &c)?;
    rec.dev("pi: AB* = q^2 B*A", abs_.max_entry_dev(&bsa.scale(&q2), &c), tol);
    let aa = ops.a_op.compose(&ops.a_op, &c)?;
    let bsb = ops.bs_op.compose(&ops.b_op, &c)?;
    rec.dev(
        "pi: B*B = A - A^2",
        bsb.max_entry_dev(&ops.a_op.sub(&aa, &c)?, &c),
        tol,
    );
    let bbs = ops.b_op.compose(&ops.bs_op, &c)?;
    rec.dev(
        "pi: BB* = q^2 A - q^4 A^2",
        bbs.max_entry_dev(&ops.a_op.scale(&q2).sub(&aa.scale(&q4), &c)?, &c),
        tol,
    );

    // Adjointness and weights.
    let xm1 = represent_x(-1, &s, &c)?;
    let x1 = represent_x(1, &s, &c)?;
    rec.dev(
        "x_{-1}* = -q^-1 x_1",
        xm1.adjoint(&c)
            .max_entry_dev(&x1.scale(&Cplx::from_real(-c.q_powi(-1))), &c),
        tol,
    );
    rec.dev("pi(A)* = pi(A)", ops.a_op.adjoint(&c).max_entry_dev(&ops.a_op, &c), tol);
    rec.dev("pi(B)* = pi(B*)", ops.b_op.adjoint(&c).max_entry_dev(&ops.bs_op, &c), tol);
    let conj = uq
        .k_op
        .compose(&xm1, &c)?
        .compose(&uq.kinv_op, &c)?;
    rec.dev(
        "K x_{-1} K^-1 = q^-1 x_{-1}",
        conj.max_entry_dev(&xm1.scale(&Cplx::from_real(c.q_powi(-1))), &c),
        tol,
    );
    let zero = ShellOperator::zero(&s);
    let x2 = raise(&x1, &c.q_powi(-1), &uq, &c)?;
    rec.dev("x_2 = 0", x2.max_entry_dev(&zero, &c), tol);
    let xm2 = lower(&xm1, &c.q(), &uq, &c)?;
    rec.dev("x_{-2} = 0", xm2.max_entry_dev(&zero, &c), tol);

    // Equivariance f pi(a) = pi(f_(1) |> a) f_(2) for f in {K, E, F}.
    let table = calibrate_pairing(&c)?;
    let act = |fg: Gen, a: &Elem| -> Result<Elem, CoreError> {
        let f = Elem::generator(fg, &c);
        left_act(&f, &a.embed_sphere(&c)?, &table, &c)?.recognize_in_sphere(8, &c)
    };
    let cal = Cplx::from_real((c.q() + c.q_powi(-1)).sqrt());
    let e_cal = uq.e_op.scale(&cal);
    let f_cal = uq.f_op.scale(&cal);
    for a_gen in [Gen::A, Gen::B, Gen::Bs] {
        let a = Elem::generator(a_gen, &c);
        let pa = represent(&a, &ops, &s, &c)?;
        let lhs = uq.k_op.compose(&pa, &c)?;
        let rhs = represent(&act(Gen::K, &a)?, &ops, &s, &c)?.compose(&uq.k_op, &c)?;
        rec.dev(
            &format!("K equivariance on {}", a_gen.name()),
            lhs.max_entry_dev(&rhs, &c),
            tol,
        );
        for (fg, fop) in [(Gen::E, &e_cal), (Gen::F, &f_cal)] {
            let lhs = fop.compose(&pa, &c)?;
            let t1 = represent(&act(fg, &a)?, &ops, &s, &c)?.compose(&uq.k_op, &c)?;
            let t2 = represent(&act(Gen::Kinv, &a)?, &ops, &s, &c)?.compose(fop, &c)?;
            rec.dev(
                &format!("{} equivariance on {}", fg.name(), a_gen.name()),
                lhs.max_entry_dev(&t1.add(&t2, &c)?, &c),
                tol,
            );
        }
    }

    Ok(rec.finish("representation", start))
}

/// Criterion 3: direct truncated traces agree with the closed-form
/// continuation on a random grid in the overlap region, and contour
/// residues around the poles match the printed residue formulas.
fn suite_continuation(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let mut rec = Recorder::new();
    let s = TruncatedSpace::from_l_max(cfg.l_max.max(60.5))?;
    let mut rng = ChaCha8Rng::seed_from_u64(303);

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let beta = c.real(rng.gen_range(-2.0..2.0));
        let delta = c.real(rng.gen_range(-2.0..2.0));
        // stay in the common convergence region and away from the pole
        // lattice (poles sit at -beta +- delta - 2j <= 4)
        let z = Cplx::new(c.real(rng.gen_range(4.5..7.0)), c.real(rng.gen_range(-1.0..1.0)));
        let t = lk_op(&s, &beta, &delta, &c);
        let abscissa = -beta.to_f64() + delta.to_f64().abs();
        let direct = zeta_direct(&t, 1, &z, abscissa, &s, &c)?;
        let closed = zeta_lk(&beta, &delta, &z, cfg.j_max, &c)?;
        let dev = (direct.value - closed.value).modulus().to_f64();
        worst = worst.max(dev);
    }
    rec.dev("direct vs closed form on 20 random points", worst, cfg.tol);

    for (beta, delta) in [(0.0, 2.0), (0.0, -2.0), (0.0, 0.0), (2.0, 2.0), (-1.0, 0.0)] {
        let b = c.real(beta);
        let d = c.real(delta);
        let pd = residue_lk(&b, &d, &c);
        let contour = contour_residue_lk(&b, &d, &pd.location.re, 0.25, 64, cfg.j_max, &c);
        let dev = (contour - pd.residue.clone()).modulus().to_f64();
        rec.dev(
            &format!("contour residue at z0 for (beta, delta) = ({beta}, {delta})"),
            dev,
            cfg.tol,
        );
    }

    Ok(rec.finish("continuation", start))
}

/// Criterion 4: the residue table — vanishing rows, the A^n and unit
/// formulas against direct substitution, and consistency with the
/// L^beta K^delta residue at beta = 0.
fn suite_residues(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let tol = 1e-10;
    let mut rec = Recorder::new();

    // B / B* monomials contribute nothing.
    let mut worst = 0.0f64;
    for n in 0..3 {
        for m in 1..3 {
            for mu in [-1.0, 0.0, 1.0] {
                let el = Elem::from_monomial(Monomial::sphere(n, m, 0), c.cone());
                worst = worst.max(residue_ak(&el, &c.real(mu), &c)?.modulus().to_f64());
                let el = Elem::from_monomial(Monomial::sphere(n, 0, m), c.cone());
                worst = worst.max(residue_ak(&el, &c.real(mu), &c)?.modulus().to_f64());
            }
        }
    }
    rec.dev("B/B* monomials vanish", worst, tol);

    // A^n with mu < 0 vanishes.
    let mut worst = 0.0f64;
    for n in 1..4 {
        for mu in [-2.0, -1.0, -0.5] {
            let el = Elem::from_monomial(Monomial::sphere(n, 0, 0), c.cone());
            worst = worst.max(residue_ak(&el, &c.real(mu), &c)?.modulus().to_f64());
        }
    }
    rec.dev("A^n with mu < 0 vanishes", worst, tol);

    // A^n with mu >= 0 and the unit row against direct substitution.
    let lnq = c.ln_q();
    let qinvmq = c.q_powi(-1) - c.q();
    let mut worst = 0.0f64;
    for n in 1..4i64 {
        for mu in [0.0, 0.5, 1.0, 2.0] {
            let el = Elem::from_monomial(Monomial::sphere(n, 0, 0), c.cone());
            let got = residue_ak(&el, &c.real(mu), &c)?;
            let m = c.real(mu);
            let expect = -c.q_powf(&m) * qinvmq.clone().powf(&(c.real(2.0 * mu)))
                / ((c.one() - c.q_powf(&(c.real(2.0) * (c.int(n) + m)))) * lnq.clone());
            worst = worst.max((got - Cplx::from_real(expect)).modulus().to_f64());
        }
    }
    rec.dev("A^n rows (mu >= 0) match substitution", worst, tol);

    let unit = Elem::unit(AlgebraId::Sphere, &c);
    let mut worst = 0.0f64;
    for mu in [-1.0f64, -0.5, 0.5, 1.0] {
        let got = residue_ak(&unit, &c.real(mu), &c)?;
        let am = c.real(mu.abs());
        let expect = -c.q_powf(&am) * qinvmq.clone().powf(&(c.real(2.0) * am.clone()))
            / ((c.one() - c.q_powf(&(c.real(2.0) * am))) * lnq.clone());
        worst = worst.max((got - Cplx::from_real(expect)).modulus().to_f64());
    }
    let got0 = residue_ak(&unit, &c.zero(), &c)?;
    let expect0 = c.int(2) * qinvmq.clone().ln() / (lnq.clone() * lnq.clone());
    let worst = worst.max((got0 - Cplx::from_real(expect0)).modulus().to_f64());
    rec.dev("unit row matches substitution", worst, tol);

    // residue_aK(1, mu) = residue of zeta_{L^0 K^{2mu}}.
    let mut worst = 0.0f64;
    for mu in [-1.0f64, -0.5, 0.0, 0.5, 1.0] {
        let got = residue_ak(&unit, &c.real(mu), &c)?;
        let pd = residue_lk(&c.zero(), &c.real(2.0 * mu), &c);
        worst = worst.max((got - pd.residue).modulus().to_f64());
    }
    rec.dev("residue_aK(1, mu) = residue_LK(0, 2 mu)", worst, tol);

    Ok(rec.finish("residues", start))
}

/// Criterion 5: twisted traces — tau_mu = eps for mu < 0, the twisted
/// trace identity for mu > 0, and the spot value tau_1(A) = 1/(1+q^2).
fn suite_traces(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let mut rec = Recorder::new();

    // tau_mu = eps on all monomials of degree <= 4 for mu < 0.
    let mut worst = 0.0f64;
    for n in 0..5i64 {
        for m in 0..5i64 {
            if n + m > 4 {
                continue;
            }
            for star in [false, true] {
                let mono = if star {
                    Monomial::sphere(n, 0, m)
                } else {
                    Monomial::sphere(n, m, 0)
                };
                let el = Elem::from_monomial(mono, c.cone());
                let eps = el.counit(&c);
                for mu in [-0.5, -1.0, -2.0] {
                    let t = tau(&c.real(mu), &el, &c)?;
                    worst = worst.max((t - eps.clone()).modulus().to_f64());
                }
            }
        }
    }
    rec.dev("tau_mu = eps for mu < 0 on degree <= 4", worst, cfg.tol);

    // Twisted trace identity tau_mu(xy) = tau_mu(sigma_{q^{2mu}}(y) x).
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for mu in [0.5, 1.0, 2.0] {
        let lam = Cplx::from_real(c.q_powf(&c.real(2.0 * mu)));
        for _ in 0..34 {
            let x = random_element(AlgebraId::Sphere, 2, 2, &mut rng, &c);
            let y = random_element(AlgebraId::Sphere, 2, 2, &mut rng, &c);
            let lhs = tau(&c.real(mu), &x.multiply(&y, &c)?, &c)?;
            let rhs = tau(&c.real(mu), &y.sigma_twist(&lam, &c)?.multiply(&x, &c)?, &c)?;
            worst = worst.max((lhs - rhs).modulus().to_f64());
        }
    }
    rec.dev("twisted trace identity for mu > 0", worst, cfg.tol);

    let a = Elem::generator(Gen::A, &c);
    let t1a = tau(&c.one(), &a, &c)?;
    let expect = Cplx::from_real(c.one() / (c.one() + c.q_powi(2)));
    rec.dev("tau_1(A) = 1/(1+q^2)", (t1a - expect).modulus().to_f64(), cfg.tol);

    Ok(rec.finish("traces", start))
}

/// Criterion 6: the boundedness probe for A_0 = (pi(A) - L^2 K^2) L^-1
/// plateaus, while the L^-2 negative control grows.
fn suite_boundedness(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let mut rec = Recorder::new();
    let s = TruncatedSpace::from_l_max(cfg.l_max)?;
    // plateau range l in [20, 40] (doubled: [40, 80])
    let (probe, control) = bound_probe_a0(&s, 40, 80, &c)?;
    rec.cond("A_0 probe verdict is bounded", probe.verdict == BoundVerdict::Bounded);
    rec.dev(
        "A_0 plateau ratio within 1%",
        (probe.plateau_ratio - 1.0).abs(),
        0.01,
    );
    rec.cond(
        "negative control (L^-2) grows",
        control.verdict == BoundVerdict::Unbounded,
    );
    Ok(rec.finish("boundedness", start))
}

/// Criterion 7: the operator gamma a0 [D,a1][D,a2] agrees entrywise with
/// multiplication by m_+ on H_+ and m_- on H_- for all 27 generator
/// triples.
fn suite_operator_identity(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let tol = 1e-10;
    let mut rec = Recorder::new();
    // The identity is entrywise exact; a moderate truncation keeps all
    // 27 triples fast while the window logic guards the cutoff.
    let s = TruncatedSpace::from_l_max(cfg.l_max.min(12.5))?;
    let ops = sphere_ops(&s, &c)?;
    let uq = represent_uq(&s, &c);
    let table = calibrate_pairing(&c)?;
    let gens = [Gen::A, Gen::B, Gen::Bs];
    let mut worst_p = 0.0f64;
    let mut worst_m = 0.0f64;
    for g0 in gens {
        for g1 in gens {
            for g2 in gens {
                let a0 = Elem::generator(g0, &c);
                let a1 = Elem::generator(g1, &c);
                let a2 = Elem::generator(g2, &c);
                let (mp, mm) = multiplication_elements(&a0, &a1, &a2, &table, &c)?;
                let p0 = represent(&a0, &ops, &s, &c)?;
                let d1 = commutator_with_d(&a1, &ops, &uq, &s, &c)?;
                let d2 = commutator_with_d(&a2, &ops, &uq, &s, &c)?;
                let full = uq
                    .gamma_op
                    .compose(&p0, &c)?
                    .compose(&d1, &c)?
                    .compose(&d2, &c)?;
                let pp = represent(&mp, &ops, &s, &c)?;
                let pm = represent(&mm, &ops, &s, &c)?;
                worst_p = worst_p.max(parity_part(&full, 1).max_entry_dev(&parity_part(&pp, 1), &c));
                worst_m =
                    worst_m.max(parity_part(&full, -1).max_entry_dev(&parity_part(&pm, -1), &c));
            }
        }
    }
    rec.dev("27 triples on H_+", worst_p, tol);
    rec.dev("27 triples on H_-", worst_m, tol);
    Ok(rec.finish("operator-identity", start))
}

fn parity_part(op: &ShellOperator<R>, par: Parity) -> ShellOperator<R> {
    let mut out = op.clone();
    out.blocks = op
        .blocks
        .iter()
        .filter(|(k, _)| k.par_from == par && k.par_to == par)
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    out
}

/// Criterion 8: the residue cocycle equals its closed form on random
/// triples, and the pole at z = 2 of the assembled continuation is
/// simple. The closed-form constant is -(q - q^-1)/((q + q^-1) ln q)
/// against the calibrated functionals (see multiplication_elements for
/// the operator identity that fixes it).
fn suite_theorem(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let mut rec = Recorder::new();
    let table = calibrate_pairing(&c)?;
    let e = Elem::generator(Gen::E, &c);
    let f = Elem::generator(Gen::F, &c);
    let factor = -(c.q() - c.q_powi(-1)) / ((c.q() + c.q_powi(-1)) * c.ln_q());
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a0 = random_element(AlgebraId::Sphere, 2, 2, &mut rng, &c);
        let a1 = random_element(AlgebraId::Sphere, 2, 2, &mut rng, &c);
        let a2 = random_element(AlgebraId::Sphere, 2, 2, &mut rng, &c);
        let v = residue_cocycle(&a0, &a1, &a2, &table, &c)?;
        let closed = (a0.counit(&c)
            * (functional_value(&e, &a1, &table, &c)?
                * functional_value(&f, &a2, &table, &c)?
                - functional_value(&f, &a1, &table, &c)?
                    * functional_value(&e, &a2, &table, &c)?))
        .scale(&factor);
        worst = worst.max((v - closed).modulus().to_f64());
    }
    rec.dev("closed form on 50 random triples", worst, cfg.tol);

    // The pole at z = 2 comes from the unit component zeta_{K^-2},
    // i.e. zeta_{L^0 K^-2}; it must be simple.
    let pd = pole_data_lk(&c.zero(), &c.real(-2.0), &c.real(2.0), &c);
    rec.cond("pole of zeta_{K^-2} at z = 2 is simple", pd.order == 1);
    rec.dev(
        "its residue matches the printed formula",
        (pd.residue - residue_lk(&c.zero(), &c.real(-2.0), &c).residue)
            .modulus()
            .to_f64(),
        1e-10,
    );
    Ok(rec.finish("theorem", start))
}

/// Criterion 9: the twisted cocycle condition holds for the fundamental
/// cochain and the residue cochain on random quadruples.
fn suite_cocycle(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let tol = 1e-10;
    let mut rec = Recorder::new();
    let table = calibrate_pairing(&c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut samples = Vec::with_capacity(200);
    for _ in 0..200 {
        samples.push((
            random_element(AlgebraId::Sphere, 2, 2, &mut rng, &c),
            random_element(AlgebraId::Sphere, 2, 2, &mut rng, &c),
            random_element(AlgebraId::Sphere, 2, 2, &mut rng, &c),
            random_element(AlgebraId::Sphere, 2, 2, &mut rng, &c),
        ));
    }
    let lam = Cplx::from_real(c.q_powi(2));
    let phi = fundamental_cochain(&table, &c, lam.clone());
    let rep = cocycle_check(&phi, &samples, tol, &c)?;
    rec.dev("fundamental cochain on 200 quadruples", rep.max_deviation, tol);
    let phi = residue_cochain(&table, &c, lam);
    let rep = cocycle_check(&phi, &samples, tol, &c)?;
    rec.dev("residue cochain on 200 quadruples", rep.max_deviation, tol);
    Ok(rec.finish("cocycle", start))
}

/// Criterion 10: shell traces of gamma a0 [D,a1][D,a2] K^-2 |D|^{-z} at
/// z = 2.5 decay with per-shell ratio below q^{0.4}.
fn suite_trace_class(cfg: &VerifyConfig) -> Result<SuiteReport, CoreError> {
    let start = Instant::now();
    let c = mk_ctx(cfg)?;
    let mut rec = Recorder::new();
    let s = TruncatedSpace::from_l_max(cfg.l_max.min(20.5))?;
    let ops = sphere_ops(&s, &c)?;
    let uq = represent_uq(&s, &c);
    let z = c.cplx(2.5, 0.0);
    let dpow = crate::spectral::abs_d_pow(&s, &z, &c);
    let kinv2 = uq.kinv_op.compose(&uq.kinv_op, &c)?;
    let threshold = c.q_f64().powf(0.4);
    for (name, g0, g1, g2) in [
        ("(1, B, B*)", None, Gen::B, Gen::Bs),
        ("(A, B, B*)", Some(Gen::A), Gen::B, Gen::Bs),
        ("(B, B*, A)", Some(Gen::B), Gen::Bs, Gen::A),
    ] {
        let a0 = match g0 {
            Some(g) => Elem::generator(g, &c),
            None => Elem::unit(AlgebraId::Sphere, &c),
        };
        let a1 = Elem::generator(g1, &c);
        let a2 = Elem::generator(g2, &c);
        let p0 = represent(&a0, &ops, &s, &c)?;
        let d1 = commutator_with_d(&a1, &ops, &uq, &s, &c)?;
        let d2 = commutator_with_d(&a2, &ops, &uq, &s, &c)?;
        let full = uq
            .gamma_op
            .compose(&p0, &c)?
            .compose(&d1, &c)?
            .compose(&d2, &c)?
            .compose(&kinv2, &c)?
            .compose(&dpow, &c)?;
        // absolute shell traces over both parities
        let mut traces: Vec<f64> = Vec::new();
        let mut twol = 1;
        while twol <= full.valid_twol_max {
            let t = full.shell_trace(twol, 1, &c).modulus().to_f64()
                + full.shell_trace(twol, -1, &c).modulus().to_f64();
            traces.push(t);
            twol += 2;
        }
        // worst successive ratio over the tail (skip the head where the
        // trace pattern settles)
        let mut worst = 0.0f64;
        for w in traces.windows(2).skip(3) {
            if w[0] > 0.0 {
                worst = worst.max(w[1] / w[0]);
            }
        }
        rec.dev(&format!("tail ratio for {name} below q^0.4"), worst, threshold);
    }
    Ok(rec.finish("trace-class", start))
}

#[cfg(test)]
mod tests {
    use super::*;

    // The full default-config suites are the acceptance harness; here we
    // only exercise the plumbing with a light configuration.
    fn light() -> VerifyConfig {
        VerifyConfig {
            q: 0.5,
            precision: 50,
            l_max: 10.5,
            j_max: 120,
            tol: 1e-6,
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &light()).is_err());
    }

    #[test]
    fn light_relations_and_residues_pass() {
        let r = run_suite("relations", &light()).unwrap();
        assert!(r.pass, "{:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        let r = run_suite("residues", &light()).unwrap();
        assert!(r.pass, "{:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        assert!(!r.checks.is_empty());
    }
}
