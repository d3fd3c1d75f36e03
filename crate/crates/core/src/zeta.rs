//! The q-zeta family zeta^+-_T(z) = tr_{H_+-}(T |D|^{-z}): direct shell
//! summation with a geometric tail bound, the closed-form continuation of
//! the L^beta K^delta family with its pole lattice and residues, the
//! algebraic residue engine for sphere elements times K^{2mu}, and the
//! twisted traces tau_mu.

use crate::error::CoreError;
use crate::ncalg::{AlgebraElement, AlgebraId};
use crate::scalars::{Cplx, Real, ScalarContext};
use crate::spectral::{abs_d_pow, Parity, ShellOperator, TruncatedSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct,
    ClosedForm,
}

/// A zeta value together with an error estimate and the summation window.
#[derive(Clone, Debug)]
pub struct ZetaValue<R: Real> {
    pub value: Cplx<R>,
    pub abs_error: f64,
    /// Shells (doubled l) used for the direct method, or the j-range of
    /// the closed-form series.
    pub window: (i64, i64),
    pub method: Method,
}

/// Location, order and Laurent (z - z0)^{-1} coefficient of a pole.
#[derive(Clone, Debug)]
pub struct PoleData<R: Real> {
    pub location: Cplx<R>,
    pub order: u8,
    pub residue: Cplx<R>,
}

/// Direct evaluation of tr_{H_parity}(T |D|^{-z}) over the truncation.
///
/// `abscissa` is the caller-supplied abscissa of convergence (for T built
/// from sphere elements times K^{2mu} it is 2|mu|). The tail bound is
/// geometric: C q^{(Re z - a)(l_max + 1)} / (1 - q^{Re z - a}), with C
/// estimated from the last three shells.
pub fn zeta_direct<R: Real>(
    t: &ShellOperator<R>,
    parity: Parity,
    z: &Cplx<R>,
    abscissa: f64,
    space: &TruncatedSpace,
    ctx: &ScalarContext<R>,
) -> Result<ZetaValue<R>, CoreError> {
    let re_z = z.re.to_f64();
    if re_z <= abscissa {
        return Err(CoreError::DivergentRegion {
            re_z,
            abscissa,
        });
    }
    let dpow = abs_d_pow(space, z, ctx);
    let op = t.compose(&dpow, ctx)?;
    let window = op.valid_twol_max;
    let q = ctx.q().to_f64();
    let mut value = ctx.czero();
    let mut last_three: Vec<(f64, f64)> = Vec::new(); // (l, |c_l|)
    let mut twol = 1;
    while twol <= window {
        let c_l = op.shell_trace(twol, parity, ctx);
        value = value + c_l.clone();
        let l = twol as f64 / 2.0;
        last_three.push((l, c_l.modulus().to_f64()));
        if last_three.len() > 3 {
            last_three.remove(0);
        }
        twol += 2;
    }
    let rate = re_z - abscissa;
    let cbound = last_three
        .iter()
        .map(|&(l, m)| m / q.powf(rate * l))
        .fold(0.0f64, f64::max);
    let l_max = window as f64 / 2.0;
    let abs_error = cbound * q.powf(rate * (l_max + 1.0)) / (1.0 - q.powf(rate));
    ctx.ensure_finite(&value)?;
    Ok(ZetaValue {
        value,
        abs_error,
        window: (1, window),
        method: Method::Direct,
    })
}

/// The closed-form continuation series of zeta^+-_{L^beta K^delta}
/// evaluated without any pole-proximity guard. Oracle building block;
/// prefer [`zeta_lk`] which checks the pole lattice first.
pub fn zeta_lk_series<R: Real>(
    beta: &R,
    delta: &R,
    z: &Cplx<R>,
    j_max: u64,
    ctx: &ScalarContext<R>,
) -> (Cplx<R>, f64) {
    let q2 = ctx.q_powi(2);
    let one = ctx.one();
    // q^{beta/2} (q^{-delta/2} + q^{delta/2}) (1-q^2)^z
    let pref_r = ctx.q_powf(&(beta.clone() / ctx.int(2)))
        * (ctx.q_powf(&(-delta.clone() / ctx.int(2))) + ctx.q_powf(&(delta.clone() / ctx.int(2))));
    let pref = ctx.pow_real_cplx(&(one.clone() - q2.clone()), z).scale(&pref_r);
    let mut sum = ctx.czero();
    let mut last = 0.0f64;
    for j in 0..=j_max {
        let binom = ctx.gen_binomial(z, j);
        let qj = ctx.q_powi(2 * j as i64);
        let em = Cplx::from_real(beta.clone() - delta.clone() + ctx.int(2 * j as i64)) + z.clone();
        let ep = Cplx::from_real(beta.clone() + delta.clone() + ctx.int(2 * j as i64)) + z.clone();
        let dm = ctx.cone() - ctx.pow_real_cplx(&ctx.q(), &em);
        let dp = ctx.cone() - ctx.pow_real_cplx(&ctx.q(), &ep);
        let term = binom.scale(&qj) * (dm * dp).inv();
        last = term.modulus().to_f64();
        sum = sum + term;
    }
    let q2f = ctx.q().to_f64().powi(2);
    let tail = last * q2f / (1.0 - q2f);
    ((pref * sum), tail)
}

fn nearest_pole(beta: f64, delta: f64, z: (f64, f64)) -> Option<(f64, f64)> {
    // pole lattice {-beta +- delta - 2j : j >= 0}
    let mut best: Option<(f64, f64)> = None;
    for s in [-1.0, 1.0] {
        let top = -beta + s * delta;
        let j = ((top - z.0) / 2.0).round().max(0.0);
        let loc = top - 2.0 * j;
        let d = ((z.0 - loc).powi(2) + z.1.powi(2)).sqrt();
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((loc, d));
        }
    }
    best
}

/// Location, order and (z-z0)^{-1} Laurent coefficient of the pole of the
/// continued zeta_{L^beta K^delta} at (or nearest to) the given location.
/// Sums the contributions of every series term whose denominator vanishes
/// there; a second-order pole occurs exactly when delta = 0.
pub fn pole_data_lk<R: Real>(
    beta: &R,
    delta: &R,
    location: &R,
    ctx: &ScalarContext<R>,
) -> PoleData<R> {
    let z0 = Cplx::from_real(location.clone());
    let lnq = ctx.ln_q();
    let q2 = ctx.q_powi(2);
    let pref_r = ctx.q_powf(&(beta.clone() / ctx.int(2)))
        * (ctx.q_powf(&(-delta.clone() / ctx.int(2))) + ctx.q_powf(&(delta.clone() / ctx.int(2))));
    let omq2 = ctx.one() - q2;
    let pref0 = pref_r.clone() * omq2.powf(location);
    let bf = beta.to_f64();
    let df = delta.to_f64();
    let lf = location.to_f64();
    let eps = 1e-9;
    let jmax = (((-bf + df.abs() - lf) / 2.0).round() as i64).max(0) + 1;
    let mut residue = ctx.czero();
    let mut order = 1u8;
    for j in 0..=jmax {
        let am = bf - df + 2.0 * j as f64;
        let ap = bf + df + 2.0 * j as f64;
        let hit_m = (lf + am).abs() < eps;
        let hit_p = (lf + ap).abs() < eps;
        if !(hit_m || hit_p) {
            continue;
        }
        // binom(z0+j-1, j) and its z-derivative via the product rule
        let mut p = ctx.cone();
        let mut dp = ctx.czero();
        for i in 0..j {
            let f = z0.clone() + Cplx::from_real(ctx.int(i));
            dp = dp * f.clone() + p.clone();
            p = p * f;
        }
        let mut fact = ctx.one();
        for i in 1..=j {
            fact = fact * ctx.int(i);
        }
        let finv = Cplx::from_real(ctx.one() / fact);
        let binom = p * finv.clone();
        let dbinom = dp * finv;
        let qj = ctx.q_powi(2 * j);
        if hit_m && hit_p {
            // delta = 0: double zero of the denominator. With
            // f(z) = pref(z) binom(z+j-1, j) q^{2j}, the (z-z0)^{-1}
            // coefficient is (f'(z0) - f(z0) ln q)/ (ln q)^2.
            order = 2;
            let f0 = binom.clone().scale(&(pref0.clone() * qj.clone()));
            let df0 = (binom.scale(&omq2.ln()) + dbinom).scale(&(pref0.clone() * qj));
            residue = residue
                + (df0 - f0.scale(&lnq)).scale(&(ctx.one() / (lnq.clone() * lnq.clone())));
        } else {
            // simple zero in one factor; the other factor is evaluated at z0
            let other = if hit_m { ap } else { am };
            let oth = ctx.one() - ctx.q_powf(&ctx.real(other + lf));
            residue = residue
                + binom.scale(&(-(pref0.clone() * qj) / (oth * lnq.clone())));
        }
    }
    PoleData {
        location: z0,
        order,
        residue,
    }
}

/// Meromorphic continuation of zeta^+-_{L^beta K^delta} per the closed
/// j-series. Errors with pole data if z is within tolerance of the pole
/// lattice {-beta +- delta - 2j}.
pub fn zeta_lk<R: Real>(
    beta: &R,
    delta: &R,
    z: &Cplx<R>,
    j_max: u64,
    ctx: &ScalarContext<R>,
) -> Result<ZetaValue<R>, CoreError> {
    let zf = (z.re.to_f64(), z.im.to_f64());
    if let Some((loc, dist)) = nearest_pole(beta.to_f64(), delta.to_f64(), zf) {
        if dist < ctx.tol().max(1e-12) {
            let pd = pole_data_lk(beta, delta, &ctx.real(loc), ctx);
            return Err(CoreError::PoleProximity {
                location_re: loc,
                location_im: 0.0,
                order: pd.order,
                residue_re: pd.residue.re.to_f64(),
                residue_im: pd.residue.im.to_f64(),
            });
        }
    }
    let (value, tail) = zeta_lk_series(beta, delta, z, j_max, ctx);
    ctx.ensure_finite(&value)?;
    Ok(ZetaValue {
        value,
        abs_error: tail,
        window: (0, j_max as i64),
        method: Method::ClosedForm,
    })
}

/// The printed residue of zeta^+-_{L^beta K^delta} at z0 = -beta + |delta|:
/// delta != 0 gives a simple pole, delta = 0 a second-order pole whose
/// (z-z0)^{-1} coefficient is still returned.
pub fn residue_lk<R: Real>(beta: &R, delta: &R, ctx: &ScalarContext<R>) -> PoleData<R> {
    let absd = delta.clone().abs();
    let z0 = -beta.clone() + absd.clone();
    let lnq = ctx.ln_q();
    let omq2 = ctx.one() - ctx.q_powi(2);
    if delta.to_f64().abs() > 1e-12 {
        // q^{(beta-|delta|)/2} (1-q^2)^{|delta|-beta} / ((q^{|delta|}-1) ln q)
        let num = ctx.q_powf(&((beta.clone() - absd.clone()) / ctx.int(2)))
            * omq2.powf(&(absd.clone() - beta.clone()));
        let den = (ctx.q_powf(&absd) - ctx.one()) * lnq;
        PoleData {
            location: Cplx::from_real(z0),
            order: 1,
            residue: Cplx::from_real(num / den),
        }
    } else {
        // 2 q^{beta/2} ln(q^{-1}-q) / ((1-q^2)^beta (ln q)^2)
        let num = ctx.int(2)
            * ctx.q_powf(&(beta.clone() / ctx.int(2)))
            * (ctx.q_powi(-1) - ctx.q()).ln();
        let den = omq2.powf(beta) * lnq.clone() * lnq;
        PoleData {
            location: Cplx::from_real(z0),
            order: 2,
            residue: Cplx::from_real(num / den),
        }
    }
}

/// Contour-integration oracle: (1/2 pi i) times the integral of the
/// continued zeta over a circle about z0, via the trapezoidal rule (which
/// converges exponentially for analytic periodic integrands).
pub fn contour_residue_lk<R: Real>(
    beta: &R,
    delta: &R,
    z0: &R,
    radius: f64,
    points: usize,
    j_max: u64,
    ctx: &ScalarContext<R>,
) -> Cplx<R> {
    let mut acc = ctx.czero();
    for m in 0..points {
        let theta = 2.0 * std::f64::consts::PI * m as f64 / points as f64;
        let dir = Cplx::new(
            ctx.real(radius * theta.cos()),
            ctx.real(radius * theta.sin()),
        );
        let z = Cplx::from_real(z0.clone()) + dir.clone();
        let (val, _) = zeta_lk_series(beta, delta, &z, j_max, ctx);
        acc = acc + val * dir;
    }
    acc.scale(&(ctx.one() / ctx.int(points as i64)))
}

/// Residue at z = 2|mu| of zeta^+-_{a K^{2mu}} for a sphere element a,
/// per the residue table: monomials containing B or B* contribute 0;
/// A^n (n>0) contributes 0 for mu < 0 and
/// -q^mu (q^-1-q)^{2mu} / ((1-q^{2(n+mu)}) ln q) for mu >= 0; the unit
/// contributes 2 ln(q^-1-q)/(ln q)^2 at mu = 0 and
/// -q^{|mu|}(q^-1-q)^{2|mu|}/((1-q^{2|mu|}) ln q) otherwise.
pub fn residue_ak<R: Real>(
    a: &AlgebraElement<R>,
    mu: &R,
    ctx: &ScalarContext<R>,
) -> Result<Cplx<R>, CoreError> {
    if a.algebra != AlgebraId::Sphere {
        return Err(CoreError::AlgebraMismatch(
            "residue_ak takes a sphere element".into(),
        ));
    }
    let lnq = ctx.ln_q();
    let qinvmq = ctx.q_powi(-1) - ctx.q();
    let muf = mu.to_f64();
    let two = ctx.int(2);
    let mut out = ctx.czero();
    for (m, c) in &a.terms {
        let (n, b, bs) = (m.e[0], m.e[1], m.e[2]);
        if b > 0 || bs > 0 {
            continue;
        }
        let r = if n > 0 {
            if muf < 0.0 {
                continue;
            }
            let num = -ctx.q_powf(mu) * qinvmq.powf(&(two.clone() * mu.clone()));
            let den =
                (ctx.one() - ctx.q_powf(&(two.clone() * (ctx.int(n) + mu.clone())))) * lnq.clone();
            num / den
        } else if muf.abs() < 1e-12 {
            two.clone() * qinvmq.ln() / (lnq.clone() * lnq.clone())
        } else {
            let am = mu.clone().abs();
            let num = -ctx.q_powf(&am) * qinvmq.powf(&(two.clone() * am.clone()));
            let den = (ctx.one() - ctx.q_powf(&(two.clone() * am))) * lnq.clone();
            num / den
        };
        out = out + c.scale(&r);
    }
    Ok(out)
}

/// The twisted trace tau_mu(a) = residue_ak(a, mu) / residue_ak(1, mu).
pub fn tau<R: Real>(
    mu: &R,
    a: &AlgebraElement<R>,
    ctx: &ScalarContext<R>,
) -> Result<Cplx<R>, CoreError> {
    let unit = AlgebraElement::unit(AlgebraId::Sphere, ctx);
    let num = residue_ak(a, mu, ctx)?;
    let den = residue_ak(&unit, mu, ctx)?;
    Ok(num * den.inv())
}

/// Heuristic residue estimator from the shell traces of T. Fits
/// c_l ~ c q^{-z0 l} geometrically (Aitken extrapolation on the last
/// shells) and converts the level constant into the residue
/// c (q^-1-q)^{z0} q^{z0/2} / (-ln q). Cross-check oracle only.
pub fn residue_numeric_probe<R: Real>(
    t: &ShellOperator<R>,
    z0: &R,
    space: &TruncatedSpace,
    ctx: &ScalarContext<R>,
) -> Result<Cplx<R>, CoreError> {
    let _ = space;
    let window = t.valid_twol_max;
    let mut ratios: Vec<Cplx<R>> = Vec::new();
    let mut twol = 1;
    while twol <= window {
        let c_l = t.shell_trace(twol, 1, ctx);
        // the model is c_l ~ c q^{-z0 l}; divide that kernel out
        let scale = ctx.q_powf(&(z0.clone() * ctx.int(twol) / ctx.int(2)));
        ratios.push(c_l.scale(&scale));
        twol += 2;
    }
    if ratios.len() < 4 {
        return Err(CoreError::FitFailed("too few shells".into()));
    }
    let n = ratios.len();
    if ratios.iter().all(|r| r.modulus().to_f64() < 1e-14) {
        return Ok(ctx.czero());
    }
    let d1 = ratios[n - 1].clone() - ratios[n - 2].clone();
    let d2 = ratios[n - 2].clone() - ratios[n - 3].clone();
    let c = if d2.modulus().to_f64() < 1e-30 {
        ratios[n - 1].clone()
    } else {
        let rho = d1.clone() * d2.inv();
        let rf = rho.modulus().to_f64();
        if !rf.is_finite() || rf >= 0.95 {
            return Err(CoreError::FitFailed(format!(
                "shell-trace ratios do not stabilize (contraction {rf:.3})"
            )));
        }
        ratios[n - 1].clone() + d1 * rho.clone() * (ctx.cone() - rho).inv()
    };
    let conv = ctx.q_powi(-1) - ctx.q();
    let factor =
        conv.powf(z0) * ctx.q_powf(&(z0.clone() / ctx.int(2))) / (-ctx.ln_q());
    Ok(c.scale(&factor))
}
