//! Command definitions and dispatch.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use podles_core::hochschild::residue_cocycle;
use podles_core::hopf::{calibrate_pairing, functional_value, left_act, pair, right_act};
use podles_core::ncalg::{AlgebraElement, AlgebraId};
use podles_core::scalars::{Cplx, MpReal, Real, ScalarContext};
use podles_core::spectral::{lk_op, represent, sphere_ops, TruncatedSpace};
use podles_core::verify::{run_all, run_suite, SuiteReport, VerifyConfig};
use podles_core::zeta::{residue_ak, residue_lk, tau, zeta_direct, zeta_lk};
use podles_core::CoreError;

use crate::config::{resolve, OutputMode, Overrides, RunConfig};
use crate::expr::{parse, print_element};

type R = MpReal;
type Ctx = ScalarContext<R>;
type Elem = AlgebraElement<R>;

#[derive(Parser, Debug)]
#[command(name = "podles", version, about = "Podles quantum sphere calculator")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,

    /// Deformation parameter, 0 < q < 1
    #[arg(long, global = true)]
    pub q: Option<f64>,

    /// Working precision in decimal digits
    #[arg(long, global = true)]
    pub precision: Option<u32>,

    /// Spectral truncation cutoff (half-integer)
    #[arg(long = "l-max", global = true)]
    pub l_max: Option<f64>,

    /// Series cutoff for closed-form zeta evaluation
    #[arg(long = "j-max", global = true)]
    pub j_max: Option<u64>,

    /// Numerical tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Output mode: json or text
    #[arg(long, global = true)]
    pub output: Option<String>,

    /// TOML configuration file (PODLES_CONFIG is the fallback)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Normal form of an algebra expression
    Nf { expr: String },
    /// Counit of an algebra expression
    Counit { expr: String },
    /// Act with a U_q element on an algebra element
    Act {
        /// left or right
        #[arg(long)]
        side: String,
        /// U_q expression
        #[arg(long)]
        f: String,
        /// sphere or SU_q(2) expression
        #[arg(long)]
        x: String,
    },
    /// Dual pairing <f, x> or functional value on the sphere
    Pair {
        #[arg(long)]
        f: String,
        #[arg(long)]
        x: String,
    },
    /// Direct spectral zeta: tr(pi(T) K^{2 mu} |D|^{-z}) on one parity
    Zeta {
        /// sphere expression T
        #[arg(long = "T")]
        t: String,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        /// complex argument, "RE" or "RE,IM"
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// +1 or -1
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        parity: i8,
    },
    /// Closed-form weighted lattice zeta for the weight q^{(beta 2l + delta 2k)/2}
    ZetaClosed {
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Residue at the rightmost pole: either --a/--mu or --beta/--delta
    Residue {
        /// sphere expression
        #[arg(long)]
        a: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
    },
    /// Normalized twisted trace functional tau_mu
    Tau {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        /// sphere expression
        #[arg(long)]
        a: String,
    },
    /// Twisted Hochschild 2-cocycle values
    Cocycle {
        #[arg(long)]
        a0: String,
        #[arg(long)]
        a1: String,
        #[arg(long)]
        a2: String,
        /// residue, closed, or both
        #[arg(long, default_value = "residue")]
        method: String,
    },
    /// Run a named verification suite (or "all")
    Verify {
        #[arg(long)]
        suite: String,
        /// Write the JSON report to this path
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Exit codes: 0 success, 2 usage or parse error, 3 mathematical domain
/// error, 4 verification failure.
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub exit: i32,
    pub mode: OutputMode,
}

fn core_exit(e: &CoreError) -> i32 {
    match e {
        CoreError::InvalidContext(_)
        | CoreError::AlgebraMismatch(_)
        | CoreError::InvalidArgument(_) => 2,
        _ => 3,
    }
}

fn cplx_json(c: &Cplx<R>) -> Value {
    json!({ "re": c.re.to_f64(), "im": c.im.to_f64() })
}

fn cplx_text(c: &Cplx<R>) -> String {
    let (re, im) = (c.re.to_f64(), c.im.to_f64());
    if im == 0.0 {
        format!("{re:.10}")
    } else if im >= 0.0 {
        format!("{re:.10} + {im:.10}i")
    } else {
        format!("{re:.10} - {:.10}i", -im)
    }
}

fn parse_z(s: &str, ctx: &Ctx) -> Result<Cplx<R>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || format!("bad complex argument '{s}' (expected RE or RE,IM)");
    match parts.as_slice() {
        [re] => {
            let r: f64 = re.trim().parse().map_err(|_| bad())?;
            Ok(ctx.cplx(r, 0.0))
        }
        [re, im] => {
            let r: f64 = re.trim().parse().map_err(|_| bad())?;
            let i: f64 = im.trim().parse().map_err(|_| bad())?;
            Ok(ctx.cplx(r, i))
        }
        _ => Err(bad()),
    }
}

fn max_degree(e: &Elem) -> i64 {
    e.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
}

/// The element, printed in whichever algebra describes it most directly:
/// an SU_q(2) element that lies in the image of the sphere is printed
/// as a sphere element.
fn element_json(e: &Elem, ctx: &Ctx) -> Value {
    let shown = if e.algebra == AlgebraId::Suq2 {
        e.recognize_in_sphere(max_degree(e) + 2, ctx).unwrap_or_else(|_| e.clone())
    } else {
        e.clone()
    };
    json!({ "algebra": shown.algebra.to_string(), "text": print_element(&shown, ctx) })
}

struct Session {
    cfg: RunConfig,
    ctx: Ctx,
}

impl Session {
    fn new(cfg: RunConfig) -> Result<Self, CoreError> {
        let ctx = ScalarContext::new(cfg.q, cfg.precision, cfg.tol)?;
        Ok(Session { cfg, ctx })
    }

    fn parse_in(&self, src: &str, want: &[AlgebraId], what: &str) -> Result<Elem, Outcome> {
        let (alg, el) = parse(src, &self.ctx).map_err(|e| {
            self.fail(2, format!("{what}: {e}"))
        })?;
        if !want.contains(&alg) {
            let names: Vec<String> = want.iter().map(|a| a.to_string()).collect();
            return Err(self.fail(
                2,
                format!("{what}: expected an element of {}, got {alg}", names.join(" or ")),
            ));
        }
        Ok(el)
    }

    fn fail(&self, exit: i32, message: String) -> Outcome {
        Outcome {
            json: json!({ "error": message }),
            text: format!("error: {message}"),
            exit,
            mode: self.cfg.output,
        }
    }

    fn core_fail(&self, e: CoreError) -> Outcome {
        self.fail(core_exit(&e), e.to_string())
    }
}

fn verify_cfg(cfg: &RunConfig) -> VerifyConfig {
    VerifyConfig {
        q: cfg.q,
        precision: cfg.precision,
        l_max: cfg.l_max,
        j_max: cfg.j_max,
        tol: cfg.tol,
    }
}

fn report_json(reps: &[SuiteReport]) -> Value {
    Value::Array(
        reps.iter()
            .map(|r| {
                json!({
                    "suite": r.suite,
                    "pass": r.pass,
                    "duration_ms": r.duration_ms,
                    "checks": r.checks.iter().map(|c| json!({
                        "name": c.name,
                        "observed": c.observed,
                        "threshold": c.threshold,
                        "pass": c.pass,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn report_text(reps: &[SuiteReport]) -> String {
    let mut out = String::new();
    for r in reps {
        let status = if r.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{}: {status} ({} checks, {} ms)\n",
            r.suite,
            r.checks.len(),
            r.duration_ms
        ));
        for c in r.checks.iter().filter(|c| !c.pass) {
            out.push_str(&format!(
                "  failed: {} (observed {:.3e}, threshold {:.1e})\n",
                c.name, c.observed, c.threshold
            ));
        }
    }
    out.pop();
    out
}

fn scalar_outcome(c: &Cplx<R>) -> (Value, String, Option<f64>, Option<(i64, i64)>) {
    (cplx_json(c), format!("value = {}", cplx_text(c)), None, None)
}

fn run_cmd(s: &Session, cmd: &Cmd) -> Result<(Value, String, Option<f64>, Option<(i64, i64)>, i32), Outcome> {
    let ctx = &s.ctx;
    let any = [AlgebraId::Sphere, AlgebraId::Suq2, AlgebraId::Uq];
    match cmd {
        Cmd::Nf { expr } => {
            let el = s.parse_in(expr, &any, "expr")?;
            let v = element_json(&el, ctx);
            let text = format!(
                "normal form ({}) = {}",
                el.algebra,
                print_element(&el, ctx)
            );
            Ok((v, text, None, None, 0))
        }
        Cmd::Counit { expr } => {
            let el = s.parse_in(expr, &any, "expr")?;
            let c = el.counit(ctx);
            let (v, t, e, w) = scalar_outcome(&c);
            Ok((v, t, e, w, 0))
        }
        Cmd::Act { side, f, x } => {
            let fel = s.parse_in(f, &[AlgebraId::Uq], "--f")?;
            let xel = s.parse_in(x, &[AlgebraId::Sphere, AlgebraId::Suq2], "--x")?;
            let from_sphere = xel.algebra == AlgebraId::Sphere;
            let xe = if from_sphere {
                xel.embed_sphere(ctx).map_err(|e| s.core_fail(e))?
            } else {
                xel
            };
            let table = calibrate_pairing(ctx).map_err(|e| s.core_fail(e))?;
            let res = match side.as_str() {
                "left" => left_act(&fel, &xe, &table, ctx),
                "right" => right_act(&xe, &fel, &table, ctx),
                other => {
                    return Err(s.fail(2, format!("--side must be left or right, got '{other}'")))
                }
            }
            .map_err(|e| s.core_fail(e))?;
            // an action on a sphere element stays in the sphere image
            let shown = if from_sphere {
                res.recognize_in_sphere(max_degree(&res) + 2, ctx)
                    .map_err(|e| s.core_fail(e))?
            } else {
                res
            };
            let v = json!({ "algebra": shown.algebra.to_string(), "text": print_element(&shown, ctx) });
            let text = format!("{} act = {}", side, print_element(&shown, ctx));
            Ok((v, text, None, None, 0))
        }
        Cmd::Pair { f, x } => {
            let fel = s.parse_in(f, &[AlgebraId::Uq], "--f")?;
            let xel = s.parse_in(x, &[AlgebraId::Sphere, AlgebraId::Suq2], "--x")?;
            let table = calibrate_pairing(ctx).map_err(|e| s.core_fail(e))?;
            let c = if xel.algebra == AlgebraId::Sphere {
                functional_value(&fel, &xel, &table, ctx)
            } else {
                pair(&fel, &xel, &table, ctx)
            }
            .map_err(|e| s.core_fail(e))?;
            let (v, t, e, w) = scalar_outcome(&c);
            Ok((v, t, e, w, 0))
        }
        Cmd::Zeta { t, mu, z, parity } => {
            if *parity != 1 && *parity != -1 {
                return Err(s.fail(2, format!("--parity must be 1 or -1, got {parity}")));
            }
            let tel = s.parse_in(t, &[AlgebraId::Sphere], "--T")?;
            let zc = parse_z(z, ctx).map_err(|m| s.fail(2, m))?;
            let space = TruncatedSpace::new(s.cfg.twol_max()).map_err(|e| s.core_fail(e))?;
            let ops = sphere_ops(&space, ctx).map_err(|e| s.core_fail(e))?;
            let pt = represent(&tel, &ops, &space, ctx).map_err(|e| s.core_fail(e))?;
            let weight = lk_op(&space, &ctx.real(0.0), &ctx.real(2.0 * mu), ctx);
            let op = pt.compose(&weight, ctx).map_err(|e| s.core_fail(e))?;
            let abscissa = 2.0 * mu.abs();
            let zv = zeta_direct(&op, *parity, &zc, abscissa, &space, ctx)
                .map_err(|e| s.core_fail(e))?;
            let text = format!(
                "zeta = {} (± {:.2e}, shells 2l in [{}, {}])",
                cplx_text(&zv.value),
                zv.abs_error,
                zv.window.0,
                zv.window.1
            );
            Ok((cplx_json(&zv.value), text, Some(zv.abs_error), Some(zv.window), 0))
        }
        Cmd::ZetaClosed { beta, delta, z } => {
            let zc = parse_z(z, ctx).map_err(|m| s.fail(2, m))?;
            let zv = zeta_lk(&ctx.real(*beta), &ctx.real(*delta), &zc, s.cfg.j_max, ctx)
                .map_err(|e| s.core_fail(e))?;
            let text = format!(
                "zeta = {} (± {:.2e}, j in [{}, {}])",
                cplx_text(&zv.value),
                zv.abs_error,
                zv.window.0,
                zv.window.1
            );
            Ok((cplx_json(&zv.value), text, Some(zv.abs_error), Some(zv.window), 0))
        }
        Cmd::Residue { a, mu, beta, delta } => match (a, mu, beta, delta) {
            (Some(a), Some(mu), None, None) => {
                let ael = s.parse_in(a, &[AlgebraId::Sphere], "--a")?;
                let c = residue_ak(&ael, &ctx.real(*mu), ctx).map_err(|e| s.core_fail(e))?;
                let (v, t, e, w) = scalar_outcome(&c);
                Ok((v, t, e, w, 0))
            }
            (None, None, Some(beta), Some(delta)) => {
                let pd = residue_lk(&ctx.real(*beta), &ctx.real(*delta), ctx);
                let v = json!({
                    "location": cplx_json(&pd.location),
                    "order": pd.order,
                    "residue": cplx_json(&pd.residue),
                });
                let text = format!(
                    "pole at {} (order {}), residue = {}",
                    cplx_text(&pd.location),
                    pd.order,
                    cplx_text(&pd.residue)
                );
                Ok((v, text, None, None, 0))
            }
            _ => Err(s.fail(
                2,
                "residue takes either --a and --mu, or --beta and --delta".to_string(),
            )),
        },
        Cmd::Tau { mu, a } => {
            let ael = s.parse_in(a, &[AlgebraId::Sphere], "--a")?;
            let c = tau(&ctx.real(*mu), &ael, ctx).map_err(|e| s.core_fail(e))?;
            let (v, t, e, w) = scalar_outcome(&c);
            Ok((v, t, e, w, 0))
        }
        Cmd::Cocycle { a0, a1, a2, method } => {
            let e0 = s.parse_in(a0, &[AlgebraId::Sphere], "--a0")?;
            let e1 = s.parse_in(a1, &[AlgebraId::Sphere], "--a1")?;
            let e2 = s.parse_in(a2, &[AlgebraId::Sphere], "--a2")?;
            let table = calibrate_pairing(ctx).map_err(|e| s.core_fail(e))?;
            // phi_res(a0,a1,a2)
            //   = -(q - q^-1)/((q + q^-1) ln q)
            //     * eps(a0) (E(a1) F(a2) - F(a1) E(a2))
            let factor = -(ctx.q() - ctx.q_powi(-1)) / ((ctx.q() + ctx.q_powi(-1)) * ctx.ln_q());
            let closed = || -> Result<Cplx<R>, CoreError> {
                let e = AlgebraElement::generator(podles_core::Gen::E, ctx);
                let f = AlgebraElement::generator(podles_core::Gen::F, ctx);
                let v = e0.counit(ctx)
                    * (functional_value(&e, &e1, &table, ctx)?
                        * functional_value(&f, &e2, &table, ctx)?
                        - functional_value(&f, &e1, &table, ctx)?
                            * functional_value(&e, &e2, &table, ctx)?);
                Ok(v.scale(&factor))
            };
            match method.as_str() {
                "residue" => {
                    let c = residue_cocycle(&e0, &e1, &e2, &table, ctx)
                        .map_err(|e| s.core_fail(e))?;
                    let (v, t, e, w) = scalar_outcome(&c);
                    Ok((v, t, e, w, 0))
                }
                "closed" => {
                    let c = closed().map_err(|e| s.core_fail(e))?;
                    let (v, t, e, w) = scalar_outcome(&c);
                    Ok((v, t, e, w, 0))
                }
                "both" => {
                    let cr = residue_cocycle(&e0, &e1, &e2, &table, ctx)
                        .map_err(|e| s.core_fail(e))?;
                    let cc = closed().map_err(|e| s.core_fail(e))?;
                    let diff = (cr.clone() - cc.clone()).modulus().to_f64();
                    let v = json!({
                        "residue": cplx_json(&cr),
                        "closed": cplx_json(&cc),
                        "difference": diff,
                    });
                    let text = format!(
                        "residue = {}\nclosed  = {}\ndifference = {diff:.3e}",
                        cplx_text(&cr),
                        cplx_text(&cc)
                    );
                    Ok((v, text, Some(diff), None, 0))
                }
                other => Err(s.fail(
                    2,
                    format!("--method must be residue, closed, or both, got '{other}'"),
                )),
            }
        }
        Cmd::Verify { suite, report } => {
            let vc = verify_cfg(&s.cfg);
            let reps = if suite == "all" {
                run_all(&vc).map_err(|e| s.core_fail(e))?
            } else {
                vec![run_suite(suite, &vc).map_err(|e| s.core_fail(e))?]
            };
            let v = report_json(&reps);
            if let Some(path) = report {
                let doc = serde_json::to_string_pretty(&v).expect("report serializes");
                std::fs::write(path, doc)
                    .map_err(|e| s.fail(2, format!("cannot write report {}: {e}", path.display())))?;
            }
            let all_pass = reps.iter().all(|r| r.pass);
            let exit = if all_pass { 0 } else { 4 };
            Ok((v, report_text(&reps), None, None, exit))
        }
    }
}

fn cmd_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Nf { .. } => "nf",
        Cmd::Counit { .. } => "counit",
        Cmd::Act { .. } => "act",
        Cmd::Pair { .. } => "pair",
        Cmd::Zeta { .. } => "zeta",
        Cmd::ZetaClosed { .. } => "zeta-closed",
        Cmd::Residue { .. } => "residue",
        Cmd::Tau { .. } => "tau",
        Cmd::Cocycle { .. } => "cocycle",
        Cmd::Verify { .. } => "verify",
    }
}

fn wrap(name: &str, cfg: &RunConfig, body: Value, error_estimate: Option<f64>, window: Option<(i64, i64)>, started: Instant, is_verify: bool, error: Option<String>) -> Value {
    let mut doc = json!({
        "command": name,
        "config": cfg,
        "error_estimate": error_estimate,
        "window": window.map(|(a, b)| vec![a, b]),
        "duration_ms": started.elapsed().as_millis() as u64,
    });
    let obj = doc.as_object_mut().expect("object");
    match error {
        Some(msg) => {
            obj.insert("error".to_string(), Value::String(msg));
        }
        None => {
            let key = if is_verify { "report" } else { "value" };
            obj.insert(key.to_string(), body);
        }
    }
    doc
}

/// Runs a parsed invocation and returns the document to print plus the
/// process exit code.
pub fn run(cli: &Cli) -> Outcome {
    let started = Instant::now();
    let flags = Overrides {
        q: cli.q,
        precision: cli.precision,
        l_max: cli.l_max,
        j_max: cli.j_max,
        tol: cli.tol,
        output: match cli.output.as_deref() {
            None => None,
            Some("json") => Some(OutputMode::Json),
            Some("text") => Some(OutputMode::Text),
            Some(other) => {
                return Outcome {
                    json: json!({ "error": format!("--output must be json or text, got '{other}'") }),
                    text: format!("error: --output must be json or text, got '{other}'"),
                    exit: 2,
                    mode: OutputMode::Json,
                }
            }
        },
    };
    let name = cmd_name(&cli.cmd);
    let cfg = match resolve(&flags, cli.config.as_deref()) {
        Ok(c) => c,
        Err(m) => {
            return Outcome {
                json: wrap(name, &RunConfig::default(), Value::Null, None, None, started, false, Some(m.clone())),
                text: format!("error: {m}"),
                exit: 2,
                mode: flags.output.unwrap_or(OutputMode::Json),
            }
        }
    };
    let session = match Session::new(cfg.clone()) {
        Ok(s) => s,
        Err(e) => {
            return Outcome {
                json: wrap(name, &cfg, Value::Null, None, None, started, false, Some(e.to_string())),
                text: format!("error: {e}"),
                exit: core_exit(&e),
                mode: cfg.output,
            }
        }
    };
    let is_verify = matches!(cli.cmd, Cmd::Verify { .. });
    match run_cmd(&session, &cli.cmd) {
        Ok((v, text, err_est, window, exit)) => Outcome {
            json: wrap(name, &cfg, v, err_est, window, started, is_verify, None),
            text,
            exit,
            mode: cfg.output,
        },
        Err(o) => {
            let msg = o.json.get("error").and_then(|v| v.as_str()).unwrap_or("error").to_string();
            Outcome {
                json: wrap(name, &cfg, Value::Null, None, None, started, is_verify, Some(msg)),
                text: o.text,
                exit: o.exit,
                mode: cfg.output,
            }
        }
    }
}
