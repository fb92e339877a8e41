//! Overflow-safe reals: a signed mantissa in `[1, 2)` times a power of two.
//!
//! Products such as `𝒦_{m,n} θ^{1−m} e^{−θ}` or the terms of `₂F₂(…; θx)` leave
//! the double-precision range long before the final CDF value does, so every
//! intermediate is carried as `mantissa · 2^exponent` and collapsed once.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::dd::DoubleDouble;

/// Scalar types usable as the mantissa of a [`Scaled`] value.
///
/// Implemented for `f64` and for double-double [`DoubleDouble`]; the latter is used
/// where determinants of ill-conditioned kernels need extra working precision.
pub trait Mantissa:
    Copy
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn leading(self) -> f64;
    fn abs(self) -> Self;
    /// Multiply by `2^e` exactly (up to under/overflow).
    fn ldexp(self, e: i32) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn is_zero(self) -> bool {
        self.leading() == 0.0
    }
}

impl Mantissa for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn leading(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn ldexp(self, e: i32) -> Self {
        libm::scalbn(self, e)
    }
}

impl Mantissa for DoubleDouble {
    #[inline]
    fn from_f64(v: f64) -> Self {
        DoubleDouble::from(v)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    #[inline]
    fn leading(self) -> f64 {
        self.hi()
    }
    #[inline]
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    #[inline]
    fn ldexp(self, e: i32) -> Self {
        DoubleDouble::ldexp(self, e)
    }
}

#[allow(clippy::excessive_precision)]
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-01;
#[allow(clippy::excessive_precision)]
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

/// Decompose a finite nonzero `v` as `m · 2^e` with `|m| ∈ [1, 2)`.
#[inline]
fn split(v: f64) -> (f64, i64) {
    let (m, e) = libm::frexp(v);
    (m * 2.0, i64::from(e) - 1)
}

/// `value = mantissa · 2^exponent`, normalized so that `|mantissa| ∈ [1, 2)`
/// whenever the value is nonzero. Zero is stored as `(0, 0)`.
#[derive(Clone, Copy, Debug)]
pub struct Scaled<M: Mantissa = f64> {
    mantissa: M,
    exponent: i64,
}

/// Overflow-safe real with an `f64` mantissa.
pub type ScaledReal = Scaled<f64>;

/// Overflow-safe real with a double-double mantissa (about 32 significant digits).
pub type WideReal = Scaled<DoubleDouble>;

impl<M: Mantissa> Scaled<M> {
    pub fn zero() -> Self {
        Self {
            mantissa: M::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            mantissa: M::one(),
            exponent: 0,
        }
    }

    /// Build from an unnormalized mantissa and exponent.
    pub fn from_parts(mantissa: M, exponent: i64) -> Self {
        let lead = mantissa.leading();
        if lead == 0.0 || !lead.is_finite() {
            if lead == 0.0 {
                return Self::zero();
            }
            return Self { mantissa, exponent };
        }
        let (_, e) = split(lead);
        let mut m = mantissa.ldexp(-(e as i32));
        let mut shift = e;
        // `hi + lo` may sit just below 1 after the split; keep `|hi| ∈ [1, 2)`.
        if m.leading().abs() >= 2.0 {
            m = m.ldexp(-1);
            shift += 1;
        }
        Self {
            mantissa: m,
            exponent: exponent + shift,
        }
    }

    pub fn from_mantissa(v: M) -> Self {
        Self::from_parts(v, 0)
    }

    pub fn from_f64(v: f64) -> Self {
        Self::from_parts(M::from_f64(v), 0)
    }

    /// `sign · e^{ln_abs}`.
    pub fn from_ln(ln_abs: f64, sign: f64) -> Self {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            return Self::zero();
        }
        let k = (ln_abs / std::f64::consts::LN_2).floor();
        let r = (ln_abs - k * LN2_HI) - k * LN2_LO;
        let m = r.exp() * sign.signum();
        Self::from_parts(M::from_f64(m), k as i64)
    }

    /// `e^x`.
    pub fn exp(x: f64) -> Self {
        Self::from_ln(x, 1.0)
    }

    pub fn mantissa(&self) -> M {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.leading().is_finite()
    }

    /// `-1`, `0` or `+1`.
    pub fn signum(&self) -> f64 {
        let l = self.mantissa.leading();
        if l > 0.0 {
            1.0
        } else if l < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    pub fn abs(self) -> Self {
        Self {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// `ln |value|`, `-∞` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let m = self.mantissa.to_f64().abs();
        m.ln() + self.exponent as f64 * LN2_HI + self.exponent as f64 * LN2_LO
    }

    /// Collapse to an ordinary `f64` (saturating to `±∞` or `0`).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let e = self.exponent.clamp(-2200, 2200) as i32;
        libm::scalbn(self.mantissa.to_f64(), e)
    }

    /// Collapse the mantissa to `f64`.
    pub fn to_scaled(&self) -> ScaledReal {
        ScaledReal::from_parts(self.mantissa.to_f64(), self.exponent)
    }

    /// Mantissa in the frame `2^frame`, i.e. `value · 2^{-frame}`.
    pub fn in_frame(&self, frame: i64) -> M {
        if self.is_zero() {
            return M::zero();
        }
        let shift = (self.exponent - frame).clamp(-2200, 2200) as i32;
        self.mantissa.ldexp(shift)
    }

    pub fn mul_f64(self, v: f64) -> Self {
        Self::from_parts(self.mantissa * M::from_f64(v), self.exponent)
    }

    pub fn mul_mantissa(self, v: M) -> Self {
        Self::from_parts(self.mantissa * v, self.exponent)
    }

    pub fn ldexp(self, e: i64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self {
            mantissa: self.mantissa,
            exponent: self.exponent + e,
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: i64) -> Self {
        if n == 0 {
            return Self::one();
        }
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    pub fn recip(self) -> Self {
        Self::one() / self
    }
}

impl ScaledReal {
    /// Widen to a double-double mantissa.
    pub fn widen(&self) -> WideReal {
        WideReal::from_parts(DoubleDouble::from(self.mantissa), self.exponent)
    }
}

impl<M: Mantissa> Default for Scaled<M> {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<f64> for ScaledReal {
    fn from(v: f64) -> Self {
        ScaledReal::from_f64(v)
    }
}

impl<M: Mantissa> Mul for Scaled<M> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self::from_parts(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl<M: Mantissa> Div for Scaled<M> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() && !rhs.is_zero() {
            return Self::zero();
        }
        Self::from_parts(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl<M: Mantissa> Add for Scaled<M> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let diff = big.exponent - small.exponent;
        if diff > 1100 {
            return big;
        }
        let m = big.mantissa + small.mantissa.ldexp(-(diff as i32));
        Self::from_parts(m, big.exponent)
    }
}

impl<M: Mantissa> Neg for Scaled<M> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl<M: Mantissa> Sub for Scaled<M> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<M: Mantissa> MulAssign for Scaled<M> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<M: Mantissa> DivAssign for Scaled<M> {
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}

impl<M: Mantissa> AddAssign for Scaled<M> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<M: Mantissa> SubAssign for Scaled<M> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<M: Mantissa> PartialEq for Scaled<M> {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl<M: Mantissa> PartialOrd for Scaled<M> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.partial_cmp(&sb);
        }
        if sa == 0.0 {
            return Some(Ordering::Equal);
        }
        let mag = match self.exponent.cmp(&other.exponent) {
            Ordering::Equal => self
                .mantissa
                .abs()
                .partial_cmp(&other.mantissa.abs())?,
            o => o,
        };
        Some(if sa > 0.0 { mag } else { mag.reverse() })
    }
}

impl<M: Mantissa> fmt::Display for Scaled<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let log10 = self.ln_abs() / std::f64::consts::LN_10;
        let e10 = log10.floor();
        let m10 = 10f64.powf(log10 - e10) * self.signum();
        write!(f, "{m10:.15}e{e10}")
    }
}

/// Neumaier-compensated accumulator for [`Scaled`] terms.
///
/// Terms are summed in a power-of-two frame set by the largest exponent seen
/// so far. A naive running sum is tracked alongside for diagnostics.
#[derive(Clone, Debug)]
pub struct ScaledSum<M: Mantissa = f64> {
    frame: i64,
    sum: M,
    comp: M,
    naive: Scaled<M>,
    started: bool,
}

impl<M: Mantissa> Default for ScaledSum<M> {
    fn default() -> Self {
        Self::new()
    }
}

impl<M: Mantissa> ScaledSum<M> {
    pub fn new() -> Self {
        Self {
            frame: 0,
            sum: M::zero(),
            comp: M::zero(),
            naive: Scaled::zero(),
            started: false,
        }
    }

    pub fn add(&mut self, term: Scaled<M>) {
        if term.is_zero() {
            return;
        }
        self.naive += term;
        if !self.started {
            self.frame = term.exponent;
            self.started = true;
        } else if term.exponent > self.frame + 256 {
            let shift = (self.frame - term.exponent).max(-2200) as i32;
            self.sum = self.sum.ldexp(shift);
            self.comp = self.comp.ldexp(shift);
            self.frame = term.exponent;
        }
        let x = term.in_frame(self.frame);
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> Scaled<M> {
        Scaled::from_parts(self.sum + self.comp, self.frame)
    }

    pub fn naive(&self) -> Scaled<M> {
        self.naive
    }
}
