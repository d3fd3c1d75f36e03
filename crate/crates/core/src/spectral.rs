//! Truncated model of the equivariant spectral triple on the quantum
//! sphere: the basis v^l_{k,+-}, the operators D, |D|, gamma, K, L, E, F,
//! the representation of the sphere algebra through x_{-1}, x_0, x_1,
//! and the boundedness probes.
//!
//! Half-integers are stored doubled (twol = 2l, twok = 2k) so shell
//! indexing stays exact. Every operator carries a valid window: the
//! largest input shell whose image is uncorrupted by the cutoff. Shells
//! above the window are silently excluded from traces and comparisons.

use std::collections::BTreeMap;

use crate::error::CoreError;
use crate::ncalg::{AlgebraElement, AlgebraId, Gen};
use crate::scalars::{Cplx, Real, ScalarContext};

/// Parity label: +1 for H_+, -1 for H_-.
pub type Parity = i8;

pub const PARITIES: [Parity; 2] = [1, -1];

/// Basis vector label v^l_{k,parity}; l >= 1/2 half-integer, -l <= k <= l.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisIndex {
    pub twol: i64,
    pub twok: i64,
    pub parity: Parity,
}

impl BasisIndex {
    pub fn new(twol: i64, twok: i64, parity: Parity) -> Result<Self, CoreError> {
        if twol < 1 || twol % 2 == 0 {
            return Err(CoreError::IndexOutOfRange(format!(
                "2l = {twol} must be a positive odd integer"
            )));
        }
        if twok.abs() > twol || (twol - twok) % 2 != 0 {
            return Err(CoreError::IndexOutOfRange(format!(
                "2k = {twok} invalid for 2l = {twol}"
            )));
        }
        if parity != 1 && parity != -1 {
            return Err(CoreError::IndexOutOfRange(format!("parity {parity}")));
        }
        Ok(BasisIndex { twol, twok, parity })
    }
}

/// The truncated Hilbert space: shells l = 1/2, ..., l_max per parity.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedSpace {
    pub twol_max: i64,
}

impl TruncatedSpace {
    pub fn new(twol_max: i64) -> Result<Self, CoreError> {
        if twol_max < 5 || twol_max % 2 == 0 {
            return Err(CoreError::InvalidArgument(format!(
                "2*l_max = {twol_max} must be an odd integer >= 5"
            )));
        }
        Ok(TruncatedSpace { twol_max })
    }

    pub fn from_l_max(l_max: f64) -> Result<Self, CoreError> {
        let twol = (2.0 * l_max).round() as i64;
        if ((2.0 * l_max) - twol as f64).abs() > 1e-9 {
            return Err(CoreError::InvalidArgument(format!(
                "l_max = {l_max} is not a half-integer"
            )));
        }
        Self::new(twol)
    }

    pub fn shells(&self) -> impl Iterator<Item = i64> {
        (1..=self.twol_max).step_by(2)
    }

    /// Dimension per parity.
    pub fn dim(&self) -> i64 {
        self.shells().map(|twol| twol + 1).sum()
    }
}

/// Identifies one banded block: input shell, output shell, parities, and
/// the (doubled) k shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockKey {
    pub twol_from: i64,
    pub twol_to: i64,
    pub par_from: Parity,
    pub par_to: Parity,
    pub twok_shift: i64,
}

/// Block-banded operator on the truncated space. Block vectors are
/// indexed by the position of k within the input shell:
/// twok = -twol_from + 2*idx; the entry is the coefficient of
/// v^{l_to}_{k+shift, par_to} in T v^{l_from}_{k, par_from}.
#[derive(Clone, Debug)]
pub struct ShellOperator<R: Real> {
    pub twol_max: i64,
    /// Largest input shell on which the operator is exact.
    pub valid_twol_max: i64,
    pub blocks: BTreeMap<BlockKey, Vec<Cplx<R>>>,
}

impl<R: Real> ShellOperator<R> {
    pub fn zero(space: &TruncatedSpace) -> Self {
        ShellOperator {
            twol_max: space.twol_max,
            valid_twol_max: space.twol_max,
            blocks: BTreeMap::new(),
        }
    }

    /// Largest |twol_to - twol_from| over blocks.
    pub fn band2(&self) -> i64 {
        self.blocks
            .keys()
            .map(|k| (k.twol_to - k.twol_from).abs())
            .max()
            .unwrap_or(0)
    }

    /// Diagonal operator from a scalar function of (twol, twok, parity).
    pub fn diagonal(
        space: &TruncatedSpace,
        ctx: &ScalarContext<R>,
        f: impl Fn(i64, i64, Parity) -> Cplx<R>,
    ) -> Self {
        let mut op = Self::zero(space);
        for twol in space.shells() {
            for &p in &PARITIES {
                let v: Vec<Cplx<R>> = (0..=twol)
                    .map(|i| f(twol, -twol + 2 * i, p))
                    .collect();
                op.blocks.insert(
                    BlockKey {
                        twol_from: twol,
                        twol_to: twol,
                        par_from: p,
                        par_to: p,
                        twok_shift: 0,
                    },
                    v,
                );
            }
        }
        let _ = ctx;
        op
    }

    pub fn identity(space: &TruncatedSpace, ctx: &ScalarContext<R>) -> Self {
        Self::diagonal(space, ctx, |_, _, _| ctx.cone())
    }

    /// Shell-preserving operator that shifts k by twok_shift/2, with
    /// entries f(twol, twok_from, parity). Entries whose target leaves
    /// the shell are dropped.
    pub fn k_shift(
        space: &TruncatedSpace,
        ctx: &ScalarContext<R>,
        twok_shift: i64,
        f: impl Fn(i64, i64, Parity) -> Cplx<R>,
    ) -> Self {
        let mut op = Self::zero(space);
        for twol in space.shells() {
            for &p in &PARITIES {
                let v: Vec<Cplx<R>> = (0..=twol)
                    .map(|i| {
                        let twok = -twol + 2 * i;
                        if (twok + twok_shift).abs() > twol {
                            ctx.czero()
                        } else {
                            f(twol, twok, p)
                        }
                    })
                    .collect();
                op.blocks.insert(
                    BlockKey {
                        twol_from: twol,
                        twol_to: twol,
                        par_from: p,
                        par_to: p,
                        twok_shift,
                    },
                    v,
                );
            }
        }
        op
    }

    /// Parity-swapping diagonal operator (for D).
    pub fn parity_swap_diag(
        space: &TruncatedSpace,
        _ctx: &ScalarContext<R>,
        f: impl Fn(i64, i64, Parity) -> Cplx<R>,
    ) -> Self {
        let mut op = Self::zero(space);
        for twol in space.shells() {
            for &p in &PARITIES {
                let v: Vec<Cplx<R>> = (0..=twol)
                    .map(|i| f(twol, -twol + 2 * i, p))
                    .collect();
                op.blocks.insert(
                    BlockKey {
                        twol_from: twol,
                        twol_to: twol,
                        par_from: p,
                        par_to: -p,
                        twok_shift: 0,
                    },
                    v,
                );
            }
        }
        op
    }

    fn insert_add(&mut self, key: BlockKey, idx: usize, c: Cplx<R>, ctx: &ScalarContext<R>) {
        let len = (key.twol_from + 1) as usize;
        let v = self
            .blocks
            .entry(key)
            .or_insert_with(|| vec![ctx.czero(); len]);
        v[idx] = v[idx].clone() + c;
    }

    pub fn add(&self, other: &Self, ctx: &ScalarContext<R>) -> Result<Self, CoreError> {
        if self.twol_max != other.twol_max {
            return Err(CoreError::AlgebraMismatch(
                "operators on different truncations".into(),
            ));
        }
        let mut out = self.clone();
        out.valid_twol_max = self.valid_twol_max.min(other.valid_twol_max);
        for (k, v) in &other.blocks {
            for (i, c) in v.iter().enumerate() {
                out.insert_add(*k, i, c.clone(), ctx);
            }
        }
        out.prune(ctx);
        Ok(out)
    }

    pub fn scale(&self, s: &Cplx<R>) -> Self {
        let mut out = self.clone();
        for v in out.blocks.values_mut() {
            for c in v.iter_mut() {
                *c = c.clone() * s.clone();
            }
        }
        out
    }

    pub fn sub(&self, other: &Self, ctx: &ScalarContext<R>) -> Result<Self, CoreError> {
        self.add(&other.scale(&-ctx.cone()), ctx)
    }

    // Only blocks that are identically zero are dropped: genuine entries
    // of size q^{c*l} go far below any fixed threshold at high shells.
    fn prune(&mut self, _ctx: &ScalarContext<R>) {
        self.blocks
            .retain(|_, v| v.iter().any(|c| c.modulus().to_f64() != 0.0));
    }

    /// Composition self . other (self applied after other). The valid
    /// window shrinks by the band of `other`.
    pub fn compose(&self, other: &Self, ctx: &ScalarContext<R>) -> Result<Self, CoreError> {
        if self.twol_max != other.twol_max {
            return Err(CoreError::AlgebraMismatch(
                "operators on different truncations".into(),
            ));
        }
        let valid = other
            .valid_twol_max
            .min(self.valid_twol_max - other.band2());
        if valid < 1 {
            return Err(CoreError::WindowExhausted(format!(
                "composition window empty at 2*l_max = {}",
                self.twol_max
            )));
        }
        let mut out = Self::zero(&TruncatedSpace {
            twol_max: self.twol_max,
        });
        out.valid_twol_max = valid;
        for (ky, vy) in &other.blocks {
            for (kx, vx) in &self.blocks {
                if kx.twol_from != ky.twol_to || kx.par_from != ky.par_to {
                    continue;
                }
                let key = BlockKey {
                    twol_from: ky.twol_from,
                    twol_to: kx.twol_to,
                    par_from: ky.par_from,
                    par_to: kx.par_to,
                    twok_shift: ky.twok_shift + kx.twok_shift,
                };
                for (i, cy) in vy.iter().enumerate() {
                    let twok = -ky.twol_from + 2 * i as i64;
                    let twok_mid = twok + ky.twok_shift;
                    if twok_mid.abs() > ky.twol_to {
                        continue;
                    }
                    let j = ((twok_mid + kx.twol_from) / 2) as usize;
                    let twok_to = twok_mid + kx.twok_shift;
                    if twok_to.abs() > kx.twol_to {
                        continue;
                    }
                    let c = vx[j].clone() * cy.clone();
                    out.insert_add(key, i, c, ctx);
                }
            }
        }
        out.prune(ctx);
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self, ctx: &ScalarContext<R>) -> Self {
        let mut out = Self::zero(&TruncatedSpace {
            twol_max: self.twol_max,
        });
        out.valid_twol_max = (self.valid_twol_max - self.band2()).max(0);
        for (k, v) in &self.blocks {
            let key = BlockKey {
                twol_from: k.twol_to,
                twol_to: k.twol_from,
                par_from: k.par_to,
                par_to: k.par_from,
                twok_shift: -k.twok_shift,
            };
            for (i, c) in v.iter().enumerate() {
                let twok = -k.twol_from + 2 * i as i64;
                let twok_to = twok + k.twok_shift;
                if twok_to.abs() > k.twol_to {
                    continue;
                }
                let idx = ((twok_to + k.twol_to) / 2) as usize;
                out.insert_add(key, idx, c.conj(), ctx);
            }
        }
        out.prune(ctx);
        out
    }

    /// Maximum entry modulus of (self - other) over input shells within
    /// both valid windows.
    pub fn max_entry_dev(&self, other: &Self, ctx: &ScalarContext<R>) -> f64 {
        let window = self.valid_twol_max.min(other.valid_twol_max);
        let mut dev = 0.0f64;
        let keys: std::collections::BTreeSet<_> =
            self.blocks.keys().chain(other.blocks.keys()).collect();
        for k in keys {
            if k.twol_from > window {
                continue;
            }
            let len = (k.twol_from + 1) as usize;
            for i in 0..len {
                let twok = -k.twol_from + 2 * i as i64;
                if (twok + k.twok_shift).abs() > k.twol_to {
                    continue;
                }
                let a = self.blocks.get(k).map(|v| v[i].clone());
                let b = other.blocks.get(k).map(|v| v[i].clone());
                let d = match (a, b) {
                    (Some(x), Some(y)) => (x - y).modulus().to_f64(),
                    (Some(x), None) | (None, Some(x)) => x.modulus().to_f64(),
                    (None, None) => 0.0,
                };
                dev = dev.max(d);
            }
        }
        let _ = ctx;
        dev
    }

    /// Largest entry modulus over blocks leaving the given input shell.
    pub fn shell_sup(&self, twol: i64) -> f64 {
        let mut s = 0.0f64;
        for (k, v) in &self.blocks {
            if k.twol_from != twol {
                continue;
            }
            for (i, c) in v.iter().enumerate() {
                let twok = -twol + 2 * i as i64;
                if (twok + k.twok_shift).abs() > k.twol_to {
                    continue;
                }
                s = s.max(c.modulus().to_f64());
            }
        }
        s
    }

    /// Trace over one shell and parity (diagonal blocks only).
    pub fn shell_trace(&self, twol: i64, parity: Parity, ctx: &ScalarContext<R>) -> Cplx<R> {
        let key = BlockKey {
            twol_from: twol,
            twol_to: twol,
            par_from: parity,
            par_to: parity,
            twok_shift: 0,
        };
        match self.blocks.get(&key) {
            Some(v) => {
                let mut acc = ctx.czero();
                for c in v {
                    acc = acc + c.clone();
                }
                acc
            }
            None => ctx.czero(),
        }
    }
}

/// The parity-dependent coefficient beta_{+-}(l) of Eq. (beta+-):
/// (+-q^{-+1} + (q - q^-1)([1/2][3/2] - [l][l+1])) / (q [2l+2]).
fn beta_pm<R: Real>(twol: i64, parity: Parity, ctx: &ScalarContext<R>) -> R {
    let lead = if parity > 0 {
        ctx.q_powi(-1)
    } else {
        -ctx.q()
    };
    let half = ctx.q_int_half(1) * ctx.q_int_half(3);
    let ll1 = ctx.q_int_half(twol) * ctx.q_int_half(twol + 2);
    let num = lead + (ctx.q() - ctx.q_powi(-1)) * (half - ll1);
    let den = ctx.q() * ctx.q_int_half(2 * twol + 4);
    num / den
}

/// Which shell the x_0 coefficient targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nu {
    Minus,
    Zero,
    Plus,
}

/// The coefficients alpha^nu_0(l,k)_{+-} of Eqs. (x0-), (x00) and the
/// shift identity alpha^+_0(l,k) = alpha^-_0(l+1,k).
pub fn alpha0<R: Real>(
    nu: Nu,
    twol: i64,
    twok: i64,
    parity: Parity,
    ctx: &ScalarContext<R>,
) -> Result<R, CoreError> {
    BasisIndex::new(twol, twok, parity)?;
    match nu {
        Nu::Plus => {
            // alpha^+_0(l,k) = alpha^-_0(l+1,k); k is in range for l+1
            let kshifted = BasisIndex::new(twol + 2, twok, parity)?;
            alpha0(Nu::Minus, kshifted.twol, kshifted.twok, parity, ctx)
        }
        Nu::Minus => {
            if twol < 3 {
                return Err(CoreError::IndexOutOfRange(
                    "alpha^-_0 requires l >= 3/2".into(),
                ));
            }
            let qk = ctx.q_pow_half(twok + parity as i64);
            let two = ctx.q_int(2);
            let num_sq = ctx.q_int_half(twol - twok)
                * ctx.q_int_half(twol + twok)
                * ctx.q_int_half(twol - 1)
                * ctx.q_int_half(twol + 1);
            let den = ctx.q_int_half(2 * twol - 2).sqrt()
                * ctx.q_int_half(2 * twol)
                * ctx.q_int_half(2 * twol + 2).sqrt();
            Ok(qk * two * num_sq.sqrt() / den)
        }
        Nu::Zero => {
            let inner = ctx.q_int_half(twol - twok + 2) * ctx.q_int_half(twol + twok)
                - ctx.q_powi(2) * ctx.q_int_half(twol - twok) * ctx.q_int_half(twol + twok + 2);
            let pref = ctx.one() / ctx.q_int_half(2 * twol);
            Ok(pref * inner * beta_pm(twol, parity, ctx))
        }
    }
}

/// The operators of the U_q action and the Dirac data on the truncation.
pub struct UqOps<R: Real> {
    pub k_op: ShellOperator<R>,
    pub kinv_op: ShellOperator<R>,
    pub e_op: ShellOperator<R>,
    pub f_op: ShellOperator<R>,
    pub l_op: ShellOperator<R>,
    pub d_op: ShellOperator<R>,
    pub abs_d_op: ShellOperator<R>,
    pub gamma_op: ShellOperator<R>,
}

/// alpha^l_k = ([l-k]_q [l+k+1]_q)^{1/2} (Eq. (K)).
fn alpha_lk<R: Real>(twol: i64, twok: i64, ctx: &ScalarContext<R>) -> R {
    (ctx.q_int_half(twol - twok) * ctx.q_int_half(twol + twok + 2)).sqrt()
}

pub fn represent_uq<R: Real>(space: &TruncatedSpace, ctx: &ScalarContext<R>) -> UqOps<R> {
    let k_op = ShellOperator::diagonal(space, ctx, |_, twok, _| {
        Cplx::from_real(ctx.q_pow_half(twok))
    });
    let kinv_op = ShellOperator::diagonal(space, ctx, |_, twok, _| {
        Cplx::from_real(ctx.q_pow_half(-twok))
    });
    let e_op = ShellOperator::k_shift(space, ctx, 2, |twol, twok, _| {
        Cplx::from_real(alpha_lk(twol, twok, ctx))
    });
    let f_op = ShellOperator::k_shift(space, ctx, -2, |twol, twok, _| {
        Cplx::from_real(alpha_lk(twol, twok - 2, ctx))
    });
    let l_op = ShellOperator::diagonal(space, ctx, |twol, _, _| {
        Cplx::from_real(ctx.q_pow_half(twol))
    });
    let d_op = ShellOperator::parity_swap_diag(space, ctx, |twol, _, _| {
        Cplx::from_real(ctx.q_int_half(twol + 1))
    });
    let abs_d_op = ShellOperator::diagonal(space, ctx, |twol, _, _| {
        Cplx::from_real(ctx.q_int_half(twol + 1))
    });
    let gamma_op = ShellOperator::diagonal(space, ctx, |_, _, p| {
        if p > 0 {
            ctx.cone()
        } else {
            -ctx.cone()
        }
    });
    UqOps {
        k_op,
        kinv_op,
        e_op,
        f_op,
        l_op,
        d_op,
        abs_d_op,
        gamma_op,
    }
}

/// |D|^{-z} as a diagonal operator: [l+1/2]_q^{-z}.
pub fn abs_d_pow<R: Real>(
    space: &TruncatedSpace,
    z: &Cplx<R>,
    ctx: &ScalarContext<R>,
) -> ShellOperator<R> {
    ShellOperator::diagonal(space, ctx, |twol, _, _| {
        let lam = ctx.q_int_half(twol + 1);
        ctx.pow_real_cplx(&lam, &-z.clone())
    })
}

/// L^beta K^delta as a diagonal operator: q^{beta l + delta k}.
pub fn lk_op<R: Real>(
    space: &TruncatedSpace,
    beta: &R,
    delta: &R,
    ctx: &ScalarContext<R>,
) -> ShellOperator<R> {
    ShellOperator::diagonal(space, ctx, |twol, twok, _| {
        let e = (beta.clone() * ctx.int(twol) + delta.clone() * ctx.int(twok))
            / ctx.int(2);
        Cplx::from_real(ctx.q_powf(&e))
    })
}

/// pi(x_0), tridiagonal in l with the alpha0 entries.
pub fn represent_x0<R: Real>(space: &TruncatedSpace, ctx: &ScalarContext<R>) -> ShellOperator<R> {
    let mut op = ShellOperator::zero(space);
    op.valid_twol_max = space.twol_max - 2;
    for twol in space.shells() {
        for &p in &PARITIES {
            // diagonal part
            let v: Vec<Cplx<R>> = (0..=twol)
                .map(|i| {
                    let twok = -twol + 2 * i;
                    Cplx::from_real(alpha0(Nu::Zero, twol, twok, p, ctx).expect("valid index"))
                })
                .collect();
            op.blocks.insert(
                BlockKey {
                    twol_from: twol,
                    twol_to: twol,
                    par_from: p,
                    par_to: p,
                    twok_shift: 0,
                },
                v,
            );
            // lowering part l -> l-1
            if twol >= 3 {
                let v: Vec<Cplx<R>> = (0..=twol)
                    .map(|i| {
                        let twok = -twol + 2 * i;
                        if twok.abs() > twol - 2 {
                            ctx.czero()
                        } else {
                            Cplx::from_real(
                                alpha0(Nu::Minus, twol, twok, p, ctx).expect("valid index"),
                            )
                        }
                    })
                    .collect();
                op.blocks.insert(
                    BlockKey {
                        twol_from: twol,
                        twol_to: twol - 2,
                        par_from: p,
                        par_to: p,
                        twok_shift: 0,
                    },
                    v,
                );
            }
            // raising part l -> l+1
            if twol + 2 <= space.twol_max {
                let v: Vec<Cplx<R>> = (0..=twol)
                    .map(|i| {
                        let twok = -twol + 2 * i;
                        Cplx::from_real(
                            alpha0(Nu::Plus, twol, twok, p, ctx).expect("valid index"),
                        )
                    })
                    .collect();
                op.blocks.insert(
                    BlockKey {
                        twol_from: twol,
                        twol_to: twol + 2,
                        par_from: p,
                        par_to: p,
                        twok_shift: 0,
                    },
                    v,
                );
            }
        }
    }
    op
}

/// One equivariance step: given pi(x) with K^{-1} |> x = w x, returns
/// pi(x_{i+1}) when x = x_i. The operator E of Eq. (K) differs from the
/// E whose action satisfies E |> x_i = (q+q^-1) x_{i+1} by the factor
/// (q+q^-1)^{1/2} (the same calibration factor as in the dual pairing),
/// so the commutator is divided by (q+q^-1)/(q+q^-1)^{1/2}:
/// pi(x_{i+1}) = (E pi(x) - w pi(x) E) K^{-1} / (q+q^-1)^{1/2}.
pub fn raise<R: Real>(
    x: &ShellOperator<R>,
    w: &R,
    uq: &UqOps<R>,
    ctx: &ScalarContext<R>,
) -> Result<ShellOperator<R>, CoreError> {
    let ex = uq.e_op.compose(x, ctx)?;
    let xe = x.compose(&uq.e_op, ctx)?;
    let comm = ex.sub(&xe.scale(&Cplx::from_real(w.clone())), ctx)?;
    let res = comm.compose(&uq.kinv_op, ctx)?;
    let inv = ctx.one() / (ctx.q() + ctx.q_powi(-1)).sqrt();
    Ok(res.scale(&Cplx::from_real(inv)))
}

pub fn lower<R: Real>(
    x: &ShellOperator<R>,
    w: &R,
    uq: &UqOps<R>,
    ctx: &ScalarContext<R>,
) -> Result<ShellOperator<R>, CoreError> {
    let fx = uq.f_op.compose(x, ctx)?;
    let xf = x.compose(&uq.f_op, ctx)?;
    let comm = fx.sub(&xf.scale(&Cplx::from_real(w.clone())), ctx)?;
    let res = comm.compose(&uq.kinv_op, ctx)?;
    let inv = ctx.one() / (ctx.q() + ctx.q_powi(-1)).sqrt();
    Ok(res.scale(&Cplx::from_real(inv)))
}

/// pi(x_{+-1}) built from pi(x_0) by equivariance.
pub fn represent_x<R: Real>(
    i: i64,
    space: &TruncatedSpace,
    ctx: &ScalarContext<R>,
) -> Result<ShellOperator<R>, CoreError> {
    let uq = represent_uq(space, ctx);
    let x0 = represent_x0(space, ctx);
    match i {
        1 => raise(&x0, &ctx.one(), &uq, ctx),
        -1 => lower(&x0, &ctx.one(), &uq, ctx),
        _ => Err(CoreError::InvalidArgument(format!(
            "represent_x takes i = +-1, got {i}"
        ))),
    }
}

/// Generator operators A, B, B* recovered from the x_i via
/// A = (1 - x_0)/(1+q^2), B = (1+q^-2)^{-1/2} x_{-1},
/// B* = -(1+q^2)^{-1/2} x_1.
pub struct SphereOps<R: Real> {
    pub a_op: ShellOperator<R>,
    pub b_op: ShellOperator<R>,
    pub bs_op: ShellOperator<R>,
}

pub fn sphere_ops<R: Real>(
    space: &TruncatedSpace,
    ctx: &ScalarContext<R>,
) -> Result<SphereOps<R>, CoreError> {
    let x0 = represent_x0(space, ctx);
    let xm1 = represent_x(-1, space, ctx)?;
    let x1 = represent_x(1, space, ctx)?;
    let id = ShellOperator::identity(space, ctx);
    let inv1q2 = ctx.one() / (ctx.one() + ctx.q_powi(2));
    let a_op = id.sub(&x0, ctx)?.scale(&Cplx::from_real(inv1q2));
    let b_scale = ctx.one() / (ctx.one() + ctx.q_powi(-2)).sqrt();
    let b_op = xm1.scale(&Cplx::from_real(b_scale));
    let bs_scale = -(ctx.one() / (ctx.one() + ctx.q_powi(2)).sqrt());
    let bs_op = x1.scale(&Cplx::from_real(bs_scale));
    Ok(SphereOps { a_op, b_op, bs_op })
}

/// Multiplicative extension of the representation to sphere elements.
pub fn represent<R: Real>(
    a: &AlgebraElement<R>,
    ops: &SphereOps<R>,
    space: &TruncatedSpace,
    ctx: &ScalarContext<R>,
) -> Result<ShellOperator<R>, CoreError> {
    if a.algebra != AlgebraId::Sphere {
        return Err(CoreError::AlgebraMismatch(
            "represent expects a sphere element".into(),
        ));
    }
    let mut out = ShellOperator::zero(space);
    for (m, c) in &a.terms {
        let mut acc = ShellOperator::identity(space, ctx);
        for g in m.word() {
            let op = match g {
                Gen::A => &ops.a_op,
                Gen::B => &ops.b_op,
                Gen::Bs => &ops.bs_op,
                _ => unreachable!(),
            };
            acc = acc.compose(op, ctx)?;
        }
        out = out.add(&acc.scale(c), ctx)?;
    }
    Ok(out)
}

/// [D, a] = D pi(a) - pi(a) D.
pub fn commutator_with_d<R: Real>(
    a: &AlgebraElement<R>,
    ops: &SphereOps<R>,
    uq: &UqOps<R>,
    space: &TruncatedSpace,
    ctx: &ScalarContext<R>,
) -> Result<ShellOperator<R>, CoreError> {
    let pa = represent(a, ops, space, ctx)?;
    let da = uq.d_op.compose(&pa, ctx)?;
    let ad = pa.compose(&uq.d_op, ctx)?;
    da.sub(&ad, ctx)
}

/// Boundedness verdict from per-shell suprema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundVerdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct BoundProbe {
    /// (twol, sup of entry magnitudes on that input shell)
    pub shell_sups: Vec<(i64, f64)>,
    pub verdict: BoundVerdict,
    /// max sup over the comparison range divided by the sup at its start
    pub plateau_ratio: f64,
}

/// Probes per-shell suprema of `op` on shells in [twol_lo, twol_hi]
/// (clamped to the valid window): "bounded" when the maximum over the
/// range stays within 1% of the value at the range start, "unbounded"
/// when it at least doubles.
pub fn bound_probe<R: Real>(
    op: &ShellOperator<R>,
    twol_lo: i64,
    twol_hi: i64,
) -> BoundProbe {
    let hi = twol_hi.min(op.valid_twol_max);
    let mut shell_sups = Vec::new();
    let mut twol = 1;
    while twol <= hi {
        shell_sups.push((twol, op.shell_sup(twol)));
        twol += 2;
    }
    let in_range: Vec<f64> = shell_sups
        .iter()
        .filter(|(l, _)| *l >= twol_lo)
        .map(|(_, s)| *s)
        .collect();
    if in_range.len() < 2 {
        return BoundProbe {
            shell_sups,
            verdict: BoundVerdict::Inconclusive,
            plateau_ratio: f64::NAN,
        };
    }
    let s_lo = in_range[0];
    let s_max = in_range.iter().cloned().fold(0.0, f64::max);
    let ratio = if s_lo > 0.0 { s_max / s_lo } else { f64::INFINITY };
    let verdict = if ratio <= 1.01 {
        BoundVerdict::Bounded
    } else if ratio >= 2.0 {
        BoundVerdict::Unbounded
    } else {
        BoundVerdict::Inconclusive
    };
    BoundProbe {
        shell_sups,
        verdict,
        plateau_ratio: ratio,
    }
}

/// Lemma 3.3 probe: A_0 = (pi(A) - L^2 K^2) L^{-1} should be bounded;
/// the negative control (pi(A) - L^2 K^2) L^{-2} should grow.
pub fn bound_probe_a0<R: Real>(
    space: &TruncatedSpace,
    twol_lo: i64,
    twol_hi: i64,
    ctx: &ScalarContext<R>,
) -> Result<(BoundProbe, BoundProbe), CoreError> {
    let ops = sphere_ops(space, ctx)?;
    let uq = represent_uq(space, ctx);
    let l2k2 = uq
        .l_op
        .compose(&uq.l_op, ctx)?
        .compose(&uq.k_op, ctx)?
        .compose(&uq.k_op, ctx)?;
    let diff = ops.a_op.sub(&l2k2, ctx)?;
    let linv = ShellOperator::diagonal(space, ctx, |twol, _, _| {
        Cplx::from_real(ctx.q_pow_half(-twol))
    });
    let a0 = diff.compose(&linv, ctx)?;
    let probe = bound_probe(&a0, twol_lo, twol_hi);
    let linv2 = ShellOperator::diagonal(space, ctx, |twol, _, _| {
        Cplx::from_real(ctx.q_pow_half(-2 * twol))
    });
    let control = bound_probe(&diff.compose(&linv2, ctx)?, twol_lo, twol_hi);
    Ok((probe, control))
}

#[cfg(test)]
mod tests {
    use crate::scalars::MpReal;
    use super::*;
    use crate::ncalg::{normal_form, Monomial};

    fn ctx() -> ScalarContext<f64> {
        ScalarContext::new(0.5, 15, 1e-9).unwrap()
    }

    fn space() -> TruncatedSpace {
        TruncatedSpace::from_l_max(12.5).unwrap()
    }

    // The x_{+-1} constructions cancel entries of size ~ q^{-2l}, so the
    // checks that go through them need the high-precision lane.
    fn mctx() -> ScalarContext<MpReal> {
        ScalarContext::new(0.5, 30, 1e-9).unwrap()
    }

    #[test]
    fn basis_and_space_validation() {
        assert!(BasisIndex::new(1, 1, 1).is_ok());
        assert!(BasisIndex::new(2, 0, 1).is_err());
        assert!(BasisIndex::new(3, 5, 1).is_err());
        assert!(BasisIndex::new(3, 0, 1).is_err(), "l-k must be integral");
        assert!(TruncatedSpace::new(3).is_err());
        assert!(TruncatedSpace::from_l_max(2.7).is_err());
        let s = TruncatedSpace::from_l_max(2.5).unwrap();
        assert_eq!(s.dim(), 2 + 4 + 6);
    }

    #[test]
    fn alpha0_examples() {
        let c = ctx();
        // nu = -, k = l: factor [l-k] = 0
        let v = alpha0(Nu::Minus, 5, 5, 1, &c).unwrap();
        assert!(v.abs() < 1e-14);
        // nu = 0, l = k = 1/2, parity +: beta_+(1/2) = q^-1/(q [3]_q)
        let v = alpha0(Nu::Zero, 1, 1, 1, &c).unwrap();
        assert!((v - 0.76190476).abs() < 1e-8, "got {v}");
        // nu = + equals nu = - at l+1
        for (twol, twok) in [(1, 1), (3, -1), (5, 3)] {
            for &p in &PARITIES {
                let plus = alpha0(Nu::Plus, twol, twok, p, &c).unwrap();
                let minus = alpha0(Nu::Minus, twol + 2, twok, p, &c).unwrap();
                assert_eq!(plus, minus);
            }
        }
        assert!(alpha0(Nu::Minus, 1, 1, 1, &c).is_err());
    }

    #[test]
    fn x0_is_real_symmetric_with_zero_k_shift() {
        let c = ctx();
        let s = space();
        let x0 = represent_x0(&s, &c);
        for k in x0.blocks.keys() {
            assert_eq!(k.twok_shift, 0);
            assert_eq!(k.par_from, k.par_to);
        }
        for v in x0.blocks.values() {
            for e in v {
                assert!(e.im.abs() < 1e-14);
            }
        }
        let dev = x0.adjoint(&c).max_entry_dev(&x0, &c);
        assert!(dev < 1e-12, "x0 self-adjoint, dev {dev}");
    }

    #[test]
    fn uq_operator_examples() {
        let c = ctx();
        let s = space();
        let uq = represent_uq(&s, &c);
        // K on v^{1/2}_{1/2,+}
        let key = BlockKey {
            twol_from: 1,
            twol_to: 1,
            par_from: 1,
            par_to: 1,
            twok_shift: 0,
        };
        let kv = &uq.k_op.blocks[&key];
        assert!((kv[1].re - 0.5f64.sqrt()).abs() < 1e-14);
        // E kills the top weight
        let ev = &uq.e_op.blocks[&BlockKey {
            twok_shift: 2,
            ..key
        }];
        assert!(ev[1].modulus() < 1e-14);
        // |D| eigenvalue [2]_q on shell 3/2
        let dkey = BlockKey {
            twol_from: 3,
            twol_to: 3,
            par_from: 1,
            par_to: 1,
            twok_shift: 0,
        };
        let dv = &uq.abs_d_op.blocks[&dkey];
        assert!((dv[0].re - 2.5).abs() < 1e-14);
        // D swaps parity and commutes with K, E, F; gamma anticommutes with D
        for f in [&uq.k_op, &uq.e_op, &uq.f_op] {
            let df = uq.d_op.compose(f, &c).unwrap();
            let fd = f.compose(&uq.d_op, &c).unwrap();
            assert!(df.max_entry_dev(&fd, &c) < 1e-12);
        }
        let gd = uq.gamma_op.compose(&uq.d_op, &c).unwrap();
        let dg = uq.d_op.compose(&uq.gamma_op, &c).unwrap();
        let sum = gd.add(&dg, &c).unwrap();
        let zero = ShellOperator::zero(&s);
        assert!(sum.max_entry_dev(&zero, &c) < 1e-12);
    }

    #[test]
    fn x_pm1_adjointness_and_weights() {
        let c = mctx();
        let s = space();
        let uq = represent_uq(&s, &c);
        let xm1 = represent_x(-1, &s, &c).unwrap();
        let x1 = represent_x(1, &s, &c).unwrap();
        // x_{-1}* = -q^{-1} x_1
        let lhs = xm1.adjoint(&c);
        let rhs = x1.scale(&c.cplx(-2.0, 0.0));
        let dev = lhs.max_entry_dev(&rhs, &c);
        assert!(dev < 1e-10, "adjointness dev {dev}");
        // K x_{-1} K^{-1} = q^{-1} x_{-1}
        let conj = uq
            .k_op
            .compose(&xm1, &c)
            .unwrap()
            .compose(&uq.kinv_op, &c)
            .unwrap();
        assert!(conj.max_entry_dev(&xm1.scale(&c.cplx(2.0, 0.0)), &c) < 1e-10);
        // x_2 = 0: raising x_1 must vanish
        let x2 = raise(&x1, &c.q_powi(-1), &uq, &c).unwrap();
        let zero = ShellOperator::zero(&s);
        assert!(x2.max_entry_dev(&zero, &c) < 1e-10, "x_2 = 0");
        // x_{-2} = 0
        let xm2 = lower(&xm1, &c.q(), &uq, &c).unwrap();
        assert!(xm2.max_entry_dev(&zero, &c) < 1e-10, "x_{{-2}} = 0");
    }

    #[test]
    fn sphere_relations_as_operators() {
        let c = mctx();
        let s = space();
        let ops = sphere_ops(&s, &c).unwrap();
        let ba = ops.b_op.compose(&ops.a_op, &c).unwrap();
        let ab = ops.a_op.compose(&ops.b_op, &c).unwrap();
        assert!(ba.max_entry_dev(&ab.scale(&c.cplx(0.25, 0.0)), &c) < 1e-10, "BA = q^2 AB");
        let abs = ops.a_op.compose(&ops.bs_op, &c).unwrap();
        let bsa = ops.bs_op.compose(&ops.a_op, &c).unwrap();
        assert!(abs.max_entry_dev(&bsa.scale(&c.cplx(0.25, 0.0)), &c) < 1e-10, "AB* = q^2 B*A");
        let bsb = ops.bs_op.compose(&ops.b_op, &c).unwrap();
        let aa = ops.a_op.compose(&ops.a_op, &c).unwrap();
        let rhs = ops.a_op.sub(&aa, &c).unwrap();
        assert!(bsb.max_entry_dev(&rhs, &c) < 1e-10, "B*B = A - A^2");
        let bbs = ops.b_op.compose(&ops.bs_op, &c).unwrap();
        let rhs = ops
            .a_op
            .scale(&c.cplx(0.25, 0.0))
            .sub(&aa.scale(&c.cplx(0.0625, 0.0)), &c)
            .unwrap();
        assert!(bbs.max_entry_dev(&rhs, &c) < 1e-10, "BB* = q^2 A - q^4 A^2");
        // self-adjointness: pi(a)* = pi(a*)
        let astar = ops.a_op.adjoint(&c);
        assert!(astar.max_entry_dev(&ops.a_op, &c) < 1e-10);
        let bstar = ops.b_op.adjoint(&c);
        assert!(bstar.max_entry_dev(&ops.bs_op, &c) < 1e-10);
    }

    #[test]
    fn represent_is_multiplicative() {
        let c = mctx();
        let s = space();
        let ops = sphere_ops(&s, &c).unwrap();
        let one = AlgebraElement::unit(AlgebraId::Sphere, &c);
        let id = ShellOperator::identity(&s, &c);
        assert!(represent(&one, &ops, &s, &c).unwrap().max_entry_dev(&id, &c) < 1e-14);
        // pi(B*B) = pi(A - A^2)
        let bsb = normal_form(&[Gen::Bs, Gen::B], c.cone(), &c).unwrap();
        let lhs = represent(&bsb, &ops, &s, &c).unwrap();
        let a = AlgebraElement::generator(Gen::A, &c);
        let am2 = a.sub(&a.multiply(&a, &c).unwrap(), &c).unwrap();
        let rhs = represent(&am2, &ops, &s, &c).unwrap();
        assert!(lhs.max_entry_dev(&rhs, &c) < 1e-10);
        // homomorphism on a random-ish pair
        let x = normal_form(&[Gen::A, Gen::B], c.cplx(0.3, 0.0), &c).unwrap();
        let y = normal_form(&[Gen::Bs], c.cplx(-1.2, 0.0), &c).unwrap();
        let pxy = represent(&x.multiply(&y, &c).unwrap(), &ops, &s, &c).unwrap();
        let px = represent(&x, &ops, &s, &c).unwrap();
        let py = represent(&y, &ops, &s, &c).unwrap();
        assert!(pxy.max_entry_dev(&px.compose(&py, &c).unwrap(), &c) < 1e-10);
    }

    #[test]
    fn commutator_structure() {
        let c = ctx();
        let s = space();
        let ops = sphere_ops(&s, &c).unwrap();
        let uq = represent_uq(&s, &c);
        let one = AlgebraElement::unit(AlgebraId::Sphere, &c);
        let d1 = commutator_with_d(&one, &ops, &uq, &s, &c).unwrap();
        assert!(d1.max_entry_dev(&ShellOperator::zero(&s), &c) < 1e-12, "[D,1] = 0");
        // [D, a] is parity-off-diagonal
        let a = AlgebraElement::generator(Gen::A, &c);
        let da = commutator_with_d(&a, &ops, &uq, &s, &c).unwrap();
        for k in da.blocks.keys() {
            assert_eq!(k.par_from, -k.par_to, "[D,a] swaps parity");
        }
        // gamma a0 [D,a1][D,a2] is parity-diagonal
        let b = AlgebraElement::generator(Gen::B, &c);
        let bs = AlgebraElement::generator(Gen::Bs, &c);
        let db = commutator_with_d(&b, &ops, &uq, &s, &c).unwrap();
        let dbs = commutator_with_d(&bs, &ops, &uq, &s, &c).unwrap();
        let pa = represent(&a, &ops, &s, &c).unwrap();
        let full = uq
            .gamma_op
            .compose(&pa, &c)
            .unwrap()
            .compose(&db, &c)
            .unwrap()
            .compose(&dbs, &c)
            .unwrap();
        for k in full.blocks.keys() {
            assert_eq!(k.par_from, k.par_to);
        }
    }

    #[test]
    fn equivariance_of_representation() {
        // f pi(a) = sum pi(f_(1) |> a) f_(2) for f in {K, E, F}
        let c = mctx();
        let s = space();
        let ops = sphere_ops(&s, &c).unwrap();
        let uq = represent_uq(&s, &c);
        let table = crate::hopf::calibrate_pairing(&c).unwrap();
        let act = |fg: Gen, a: &AlgebraElement<MpReal>| -> AlgebraElement<MpReal> {
            let f = AlgebraElement::generator(fg, &c);
            crate::hopf::left_act(&f, &a.embed_sphere(&c).unwrap(), &table, &c)
                .unwrap()
                .recognize_in_sphere(8, &c)
                .unwrap()
        };
        for a_gen in [Gen::A, Gen::B, Gen::Bs] {
            let a = AlgebraElement::generator(a_gen, &c);
            let pa = represent(&a, &ops, &s, &c).unwrap();
            // K: K pi(a) = pi(K |> a) K
            let lhs = uq.k_op.compose(&pa, &c).unwrap();
            let rhs = represent(&act(Gen::K, &a), &ops, &s, &c)
                .unwrap()
                .compose(&uq.k_op, &c)
                .unwrap();
            assert!(lhs.max_entry_dev(&rhs, &c) < 1e-10, "K equivariance on {}", a_gen.name());
            // E: E pi(a) = pi(E |> a) K + pi(K^-1 |> a) E, where the
            // operator satisfying the identity with the calibrated action
            // is (q+q^-1)^{1/2} times the Eq. (K) operator.
            let cal = Cplx::from_real((c.q() + c.q_powi(-1)).sqrt());
            let e_cal = uq.e_op.scale(&cal);
            let f_cal = uq.f_op.scale(&cal);
            for (fg, fop) in [(Gen::E, &e_cal), (Gen::F, &f_cal)] {
                let lhs = fop.compose(&pa, &c).unwrap();
                let t1 = represent(&act(fg, &a), &ops, &s, &c)
                    .unwrap()
                    .compose(&uq.k_op, &c)
                    .unwrap();
                let t2 = represent(&act(Gen::Kinv, &a), &ops, &s, &c)
                    .unwrap()
                    .compose(fop, &c)
                    .unwrap();
                let rhs = t1.add(&t2, &c).unwrap();
                assert!(
                    lhs.max_entry_dev(&rhs, &c) < 1e-10,
                    "{} equivariance on {}",
                    fg.name(),
                    a_gen.name()
                );
            }
        }
    }

    #[test]
    fn bound_probe_behaviour() {
        let c = ctx();
        let s = TruncatedSpace::from_l_max(16.5).unwrap();
        let (probe, control) = bound_probe_a0(&s, 16, 32, &c).unwrap();
        assert_eq!(probe.verdict, BoundVerdict::Bounded, "ratio {}", probe.plateau_ratio);
        assert_eq!(control.verdict, BoundVerdict::Unbounded);
    }

    #[test]
    fn window_bookkeeping() {
        let c = ctx();
        let s = space();
        let x0 = represent_x0(&s, &c);
        assert_eq!(x0.valid_twol_max, s.twol_max - 2);
        let x0sq = x0.compose(&x0, &c).unwrap();
        assert_eq!(x0sq.valid_twol_max, s.twol_max - 4);
        // exhausting the window errors
        let tiny = TruncatedSpace::new(5).unwrap();
        let xt = represent_x0(&tiny, &c);
        let mut acc = xt.clone();
        let mut err = None;
        for _ in 0..4 {
            match acc.compose(&xt, &c) {
                Ok(n) => acc = n,
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        assert!(matches!(err, Some(CoreError::WindowExhausted(_))));
        let _ = Monomial::unit(AlgebraId::Sphere);
    }
}
