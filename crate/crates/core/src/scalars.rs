//! Scalar arithmetic foundation: real numbers at configurable precision,
//! complex numbers built on top of them, q-integers and generalized
//! binomial coefficients.
//!
//! The whole crate is generic over the real scalar type through the
//! [`Real`] trait. Two backends are provided: `f64` for quick estimates
//! and [`MpReal`] (MPFR) for the high-precision lane used by the
//! verification suites.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering};

use num_traits::{One, Zero};

use crate::error::CoreError;

/// Real scalar abstraction. `num_traits::{Zero, One}` cover the ring
/// structure; the rest is what the q-analysis actually needs.
pub trait Real:
    Clone
    + PartialOrd
    + PartialEq
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Zero
    + One
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    fn from_f64_prec(x: f64, prec_bits: u32) -> Self;
    fn from_i64_prec(n: i64, prec_bits: u32) -> Self;
    fn to_f64(&self) -> f64;
    fn prec_bits(&self) -> u32;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn abs(&self) -> Self;
    fn powi(&self, n: i64) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn is_finite(&self) -> bool;
    /// Install the precision used by `Zero::zero` / `One::one` for
    /// backends with runtime precision. A no-op for `f64`.
    fn set_default_prec(_bits: u32) {}
}

impl Real for f64 {
    fn from_f64_prec(x: f64, _prec_bits: u32) -> Self {
        x
    }
    fn from_i64_prec(n: i64, _prec_bits: u32) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn prec_bits(&self) -> u32 {
        53
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powi(&self, n: i64) -> Self {
        f64::powi(*self, n as i32)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

static MP_DEFAULT_PREC: AtomicU32 = AtomicU32::new(198);

fn mp_default_prec() -> u32 {
    MP_DEFAULT_PREC.load(Ordering::Relaxed)
}

/// Arbitrary-precision real backed by MPFR.
#[derive(Clone, Debug)]
pub struct MpReal(pub rug::Float);

impl MpReal {
    pub fn inner(&self) -> &rug::Float {
        &self.0
    }
}

impl fmt::Display for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq for MpReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for MpReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Neg for MpReal {
    type Output = MpReal;
    fn neg(self) -> MpReal {
        MpReal(-self.0)
    }
}

impl Add for MpReal {
    type Output = MpReal;
    fn add(self, rhs: MpReal) -> MpReal {
        MpReal(self.0 + rhs.0)
    }
}

impl Sub for MpReal {
    type Output = MpReal;
    fn sub(self, rhs: MpReal) -> MpReal {
        MpReal(self.0 - rhs.0)
    }
}

impl Mul for MpReal {
    type Output = MpReal;
    fn mul(self, rhs: MpReal) -> MpReal {
        MpReal(self.0 * rhs.0)
    }
}

impl Div for MpReal {
    type Output = MpReal;
    fn div(self, rhs: MpReal) -> MpReal {
        MpReal(self.0 / rhs.0)
    }
}

impl Zero for MpReal {
    fn zero() -> Self {
        MpReal(rug::Float::with_val(mp_default_prec(), 0))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for MpReal {
    fn one() -> Self {
        MpReal(rug::Float::with_val(mp_default_prec(), 1))
    }
}

impl Real for MpReal {
    fn from_f64_prec(x: f64, prec_bits: u32) -> Self {
        MpReal(rug::Float::with_val(prec_bits, x))
    }
    fn from_i64_prec(n: i64, prec_bits: u32) -> Self {
        MpReal(rug::Float::with_val(prec_bits, n))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn prec_bits(&self) -> u32 {
        self.0.prec()
    }
    fn sqrt(&self) -> Self {
        MpReal(self.0.clone().sqrt())
    }
    fn exp(&self) -> Self {
        MpReal(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        MpReal(self.0.clone().ln())
    }
    fn sin(&self) -> Self {
        MpReal(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        MpReal(self.0.clone().cos())
    }
    fn abs(&self) -> Self {
        MpReal(self.0.clone().abs())
    }
    fn powi(&self, n: i64) -> Self {
        MpReal(rug::ops::Pow::pow(self.0.clone(), n as i32))
    }
    fn powf(&self, e: &Self) -> Self {
        MpReal(rug::ops::Pow::pow(self.0.clone(), &e.0))
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn set_default_prec(bits: u32) {
        MP_DEFAULT_PREC.store(bits, Ordering::Relaxed);
    }
}

/// Complex number over a [`Real`] backend.
#[derive(Clone, Debug, PartialEq)]
pub struct Cplx<R: Real> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Cplx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cplx { re, im }
    }

    pub fn from_real(re: R) -> Self {
        let im = re.clone() - re.clone();
        Cplx { re, im }
    }

    pub fn zero_like(&self) -> Self {
        let z = self.re.clone() - self.re.clone();
        Cplx {
            re: z.clone(),
            im: z,
        }
    }

    pub fn conj(&self) -> Self {
        Cplx {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> R {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn modulus(&self) -> R {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: &R) -> Self {
        Cplx {
            re: self.re.clone() * s.clone(),
            im: self.im.clone() * s.clone(),
        }
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Cplx {
            re: self.re.clone() / n.clone(),
            im: -self.im.clone() / n,
        }
    }

    /// Complex exponential: `exp(re) * (cos(im) + i sin(im))`.
    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Cplx {
            re: m.clone() * self.im.cos(),
            im: m * self.im.sin(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<R: Real> Add for Cplx<R> {
    type Output = Cplx<R>;
    fn add(self, rhs: Cplx<R>) -> Cplx<R> {
        Cplx {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<R: Real> Sub for Cplx<R> {
    type Output = Cplx<R>;
    fn sub(self, rhs: Cplx<R>) -> Cplx<R> {
        Cplx {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl<R: Real> Mul for Cplx<R> {
    type Output = Cplx<R>;
    fn mul(self, rhs: Cplx<R>) -> Cplx<R> {
        Cplx {
            re: self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl<R: Real> Div for Cplx<R> {
    type Output = Cplx<R>;
    fn div(self, rhs: Cplx<R>) -> Cplx<R> {
        self * rhs.inv()
    }
}

impl<R: Real> Neg for Cplx<R> {
    type Output = Cplx<R>;
    fn neg(self) -> Cplx<R> {
        Cplx {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl<R: Real> fmt::Display for Cplx<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

/// Houses the deformation parameter `q` together with the working
/// precision and comparison tolerance. Read-only after construction.
#[derive(Clone, Debug)]
pub struct ScalarContext<R: Real> {
    q: R,
    precision_digits: u32,
    prec_bits: u32,
    tol: f64,
}

impl<R: Real> ScalarContext<R> {
    /// `q` must lie in (0,1), `precision` is in decimal digits (>= 15),
    /// `tol` is the dimensionless comparison tolerance.
    pub fn new(q: f64, precision_digits: u32, tol: f64) -> Result<Self, CoreError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(CoreError::InvalidContext(format!(
                "q must lie in (0,1), got {q}"
            )));
        }
        if precision_digits < 15 {
            return Err(CoreError::InvalidContext(format!(
                "precision must be >= 15 digits, got {precision_digits}"
            )));
        }
        if !(tol > 0.0) {
            return Err(CoreError::InvalidContext(format!(
                "tol must be positive, got {tol}"
            )));
        }
        // log2(10) per decimal digit plus guard bits for intermediate rounding.
        let prec_bits = (precision_digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32;
        R::set_default_prec(prec_bits);
        Ok(ScalarContext {
            q: R::from_f64_prec(q, prec_bits),
            precision_digits,
            prec_bits,
            tol,
        })
    }

    /// Default configuration: 50 decimal digits, tolerance 1e-8.
    pub fn with_q(q: f64) -> Result<Self, CoreError> {
        Self::new(q, 50, 1e-8)
    }

    pub fn q(&self) -> R {
        self.q.clone()
    }

    pub fn q_f64(&self) -> f64 {
        self.q.to_f64()
    }

    pub fn precision_digits(&self) -> u32 {
        self.precision_digits
    }

    pub fn prec_bits(&self) -> u32 {
        self.prec_bits
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Coefficients with magnitude below this are pruned from algebra
    /// elements.
    pub fn prune_threshold(&self) -> f64 {
        10f64.powi(-(self.precision_digits.saturating_sub(8) as i32))
    }

    pub fn real(&self, x: f64) -> R {
        R::from_f64_prec(x, self.prec_bits)
    }

    pub fn int(&self, n: i64) -> R {
        R::from_i64_prec(n, self.prec_bits)
    }

    pub fn zero(&self) -> R {
        self.int(0)
    }

    pub fn one(&self) -> R {
        self.int(1)
    }

    pub fn cplx(&self, re: f64, im: f64) -> Cplx<R> {
        Cplx::new(self.real(re), self.real(im))
    }

    pub fn czero(&self) -> Cplx<R> {
        Cplx::from_real(self.zero())
    }

    pub fn cone(&self) -> Cplx<R> {
        Cplx::from_real(self.one())
    }

    pub fn i(&self) -> Cplx<R> {
        Cplx::new(self.zero(), self.one())
    }

    pub fn ln_q(&self) -> R {
        self.q.ln()
    }

    /// `q^n` for integer n.
    pub fn q_powi(&self, n: i64) -> R {
        self.q.powi(n)
    }

    /// `q^(twon/2)` for a doubled half-integer exponent.
    pub fn q_pow_half(&self, twon: i64) -> R {
        if twon % 2 == 0 {
            self.q.powi(twon / 2)
        } else {
            self.q.sqrt().powi(twon)
        }
    }

    /// `q^e` for a real exponent.
    pub fn q_powf(&self, e: &R) -> R {
        self.q.powf(e)
    }

    /// The q-integer `[n]_q = (q^n - q^-n)/(q - q^-1)`; extends to
    /// negative n, with `[-n]_q = -[n]_q`.
    pub fn q_int(&self, n: i64) -> R {
        self.q_int_half(2 * n)
    }

    /// The q-integer evaluated at the half-integer `twox/2`.
    pub fn q_int_half(&self, twox: i64) -> R {
        if twox == 0 {
            return self.zero();
        }
        let num = self.q_pow_half(twox) - self.q_pow_half(-twox);
        let den = self.q.clone() - self.one() / self.q.clone();
        num / den
    }

    /// Generalized binomial coefficient `C(z+j-1, j) = prod_{i=0}^{j-1}(z+i)/j!`.
    pub fn gen_binomial(&self, z: &Cplx<R>, j: u64) -> Cplx<R> {
        let mut acc = self.cone();
        for i in 0..j {
            let factor = z.clone() + Cplx::from_real(self.int(i as i64));
            acc = acc * factor;
            acc = acc.scale(&(self.one() / self.int((i + 1) as i64)));
        }
        acc
    }

    /// `base^z` for positive real base, principal branch.
    pub fn pow_real_cplx(&self, base: &R, z: &Cplx<R>) -> Cplx<R> {
        let lb = base.ln();
        z.scale(&lb).exp()
    }

    /// Returns an error if the value is not finite.
    pub fn ensure_finite(&self, v: &Cplx<R>) -> Result<(), CoreError> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(CoreError::NonFinite)
        }
    }

    pub fn approx_zero(&self, v: &Cplx<R>) -> bool {
        v.modulus().to_f64().abs() < self.tol
    }

    pub fn approx_eq(&self, a: &Cplx<R>, b: &Cplx<R>) -> bool {
        (a.clone() - b.clone()).modulus().to_f64().abs() < self.tol
    }
}
