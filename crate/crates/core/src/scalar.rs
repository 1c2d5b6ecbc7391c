//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All linear algebra, operator algebra and statistics are written against
//! [`Real`], so the same code runs in `f64` (the production precision) and
//! `f32` (handy for quick smoke runs and memory-bound experiments).

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for the implemented types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Count-like conversion used for averages and dimensions.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn ci<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

/// Modulus without going through `Complex::norm`'s generic `hypot`.
#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}

/// `i^k` for an integer power taken modulo 4.
#[inline]
pub fn i_pow<T: Real>(k: u8) -> C<T> {
    match k % 4 {
        0 => cone(),
        1 => ci(),
        2 => -cone::<T>(),
        _ => -ci::<T>(),
    }
}

/// Unit-modulus phase of `z`, or 1 when `z` vanishes.
#[inline]
pub fn phase<T: Real>(z: C<T>) -> C<T> {
    let r = cabs(z);
    if r > T::zero() {
        z / r
    } else {
        cone()
    }
}
