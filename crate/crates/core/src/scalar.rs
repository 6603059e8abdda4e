//! Scalar abstraction shared by the numerical kernels.
//!
//! Everything in the evaluator is written against [`Real`], which is
//! implemented for `f32` and `f64`. The accuracy targets quoted throughout
//! the crate assume `f64`; `f32` instantiations are useful for smoke tests
//! and cheap previews only.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar usable by the solver (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only if the value is unrepresentable,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Cplx<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// The primitive cube root of unity `exp(2πi/3)`.
#[inline]
pub fn alpha<T: Real>() -> Cplx<T> {
    cis(T::lit(2.0) * T::PI() / T::lit(3.0))
}

/// `α^k` for `k` taken modulo 3, built from exact cosines and sines.
#[inline]
pub fn alpha_pow<T: Real>(k: usize) -> Cplx<T> {
    match k % 3 {
        0 => cr(T::one()),
        1 => alpha(),
        _ => cis(T::lit(4.0) * T::PI() / T::lit(3.0)),
    }
}

/// Principal complex cube root.
#[inline]
pub(crate) fn cbrt_principal<T: Real>(z: Cplx<T>) -> Cplx<T> {
    if z.re == T::zero() && z.im == T::zero() {
        return z;
    }
    let (r, th) = z.to_polar();
    Complex::from_polar(r.cbrt(), th / T::lit(3.0))
}

#[cfg(test)]
/// Principal argument mapped into `[0, 2π)`.
#[inline]
pub(crate) fn arg_2pi<T: Real>(z: Cplx<T>) -> T {
    let a = z.arg();
    if a < T::zero() {
        a + T::TAU()
    } else {
        a
    }
}
