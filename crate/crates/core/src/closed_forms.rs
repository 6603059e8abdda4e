//! Closed-form companions of the evaluator: the long-time stationary
//! profile, the Airy function and the similarity solution of the linearized
//! KdV equation with step data.

use crate::error::Result;
use crate::params::ModelParams;
use crate::quadrature::{integrate_real, QuadOptions};
use crate::scalar::Real;

/// Coefficients of the stationary profile
///
/// ```text
/// x > 0:  c1 + c2 e^{√c x} + c3 e^{−√c x}
/// x < 0:  b1 + b2 sin(k x) + b3 cos(k x),   k = √(6a − c)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryCoeffs<T> {
    pub b1: T,
    pub b2: T,
    pub b3: T,
    pub c1: T,
    pub c2: T,
    pub c3: T,
    /// Left wavenumber `√(6a − c)`.
    pub k: T,
}

impl<T: Real> StationaryCoeffs<T> {
    /// Requires `c − 6a < 0`.
    pub fn new(params: &ModelParams<T>) -> Result<Self> {
        params.require_oscillatory_left()?;
        let (a, c) = (params.a(), params.c());
        let six = T::lit(6.0);
        let c3 = a - c / six;
        let k2 = six * a - c;
        Ok(Self {
            b1: a,
            b2: -(c / k2).sqrt() * c3,
            b3: -c / six,
            c1: T::zero(),
            c2: T::zero(),
            c3,
            k: k2.sqrt(),
        })
    }
}

/// Stationary long-time profile `q_∞(x)` in the traveling frame.
pub fn stationary<T: Real>(x: T, params: &ModelParams<T>) -> Result<T> {
    let s = StationaryCoeffs::new(params)?;
    let rc = params.c().sqrt();
    Ok(if x >= T::zero() {
        s.c1 + s.c2 * (rc * x).exp() + s.c3 * (-rc * x).exp()
    } else {
        s.b1 + s.b2 * (s.k * x).sin() + s.b3 * (s.k * x).cos()
    })
}

// Ai(0) and −Ai'(0)
const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = 0.258_819_403_792_806_8;
const SERIES_LEFT: f64 = -7.0;
const SERIES_RIGHT: f64 = 6.0;

/// Airy function `Ai(s)`.
///
/// Maclaurin series on `[−7, 6]`, the exponentially small asymptotic
/// expansion for `s > 6` and the oscillatory one for `s < −7`. Absolute
/// error is below `1e−10` for `|s| ≤ 15` in `f64`.
pub fn airy_ai<T: Real>(s: T) -> T {
    if s > T::lit(SERIES_RIGHT) {
        airy_right_asymptotic(s)
    } else if s < T::lit(SERIES_LEFT) {
        airy_left_asymptotic(-s)
    } else {
        airy_series(s)
    }
}

fn airy_series<T: Real>(s: T) -> T {
    let s3 = s * s * s;
    let mut f = T::one();
    let mut g = s;
    let mut tf = T::one();
    let mut tg = s;
    for k in 1..200 {
        let kk = T::lit(3.0 * k as f64);
        tf = tf * s3 / ((kk - T::one()) * kk);
        tg = tg * s3 / (kk * (kk + T::one()));
        f += tf;
        g += tg;
        if tf.abs() + tg.abs() <= T::epsilon() * T::lit(1e-3) * (f.abs() + g.abs()) {
            break;
        }
    }
    T::lit(AI0) * f - T::lit(AIP0) * g
}

// u_k = Γ(3k + 1/2) / (54^k k! Γ(k + 1/2))
fn airy_u_coeffs<T: Real>(n: usize) -> Vec<T> {
    let mut u = Vec::with_capacity(n);
    u.push(T::one());
    for k in 1..n {
        let kf = k as f64;
        let num = (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0);
        let den = (2.0 * kf - 1.0) * 216.0 * kf;
        let prev = u[k - 1];
        u.push(prev * T::lit(num / den));
    }
    u
}

fn airy_right_asymptotic<T: Real>(s: T) -> T {
    let zeta = T::lit(2.0 / 3.0) * s * s.sqrt();
    let u = airy_u_coeffs::<T>(40);
    let mut sum = T::zero();
    let mut zp = T::one();
    let mut last = T::infinity();
    for (k, &uk) in u.iter().enumerate() {
        let term = uk / zp;
        if term.abs() >= last {
            break;
        }
        sum += if k % 2 == 0 { term } else { -term };
        last = term.abs();
        zp *= zeta;
    }
    (-zeta).exp() / (T::lit(2.0) * T::PI().sqrt() * s.sqrt().sqrt()) * sum
}

fn airy_left_asymptotic<T: Real>(x: T) -> T {
    let zeta = T::lit(2.0 / 3.0) * x * x.sqrt();
    let u = airy_u_coeffs::<T>(40);
    let (mut p, mut q) = (T::zero(), T::zero());
    let mut zp = T::one();
    let mut last = T::infinity();
    for (k, &uk) in u.iter().enumerate() {
        let term = uk / zp;
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        let sign = if (k / 2) % 2 == 0 { T::one() } else { -T::one() };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        zp *= zeta;
    }
    let phase = zeta + T::FRAC_PI_4();
    (phase.sin() * p - phase.cos() * q) / (T::PI().sqrt() * x.sqrt().sqrt())
}

/// `∫_s^∞ Ai(u) du`.
///
/// Adaptive quadrature of [`airy_ai`] from `s` to `14`, plus the leading
/// asymptotic term `e^{−ζ}/(2√π X^{3/4})` of the remaining tail at
/// `X = max(s, 14)`. The cost grows like `|s|^{3/2}` for very negative `s`.
pub fn airy_ai_tail_integral<T: Real>(s: T) -> T {
    let cut = T::lit(14.0);
    let x = s.max(cut);
    let zeta = T::lit(2.0 / 3.0) * x * x.sqrt();
    let tail = (-zeta).exp() / (T::lit(2.0) * T::PI().sqrt() * x.powf(T::lit(0.75)));
    if s >= cut {
        return tail;
    }
    // about one panel per π of the Airy phase on the left
    let phase = if s < T::zero() {
        T::lit(2.0 / 3.0) * (-s) * (-s).sqrt()
    } else {
        T::zero()
    };
    let panels = (phase / T::PI()).ceil().to_f64_lossy().max(0.0) as usize + 4;
    let tol = T::lit(1e-13).max(T::lit(100.0) * T::epsilon());
    let opts = QuadOptions::new(tol)
        .with_abs_tol(tol * T::lit(0.1))
        .with_max_panels(panels * 20 + 1000);
    match integrate_real(airy_ai, s, cut, panels, opts) {
        Ok((v, _)) => v + tail,
        Err(crate::Error::Convergence { value_re, .. }) => T::lit(value_re) + tail,
        Err(_) => T::nan(),
    }
}

/// Similarity solution `u(x, t) = a ∫_{x/(3t)^{1/3}}^∞ Ai(s) ds` of
/// `u_t + u_xxx = 0` with step data `a·1{x < 0}`.
pub fn lkdv_step<T: Real>(x: T, t: T, a: T) -> T {
    let s = x / (T::lit(3.0) * t).cbrt();
    a * airy_ai_tail_integral(s)
}
