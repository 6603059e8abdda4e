//! Physical parameters, reference frames and the (a, c) → γ rescaling.
//!
//! The lab-frame solution `u(x, t)` of the model has a left state `a` and an
//! interface moving at speed `c`. Three coordinate systems are in use:
//!
//! * [`Frame::Lab`]: `u(x, t)`.
//! * [`Frame::Traveling`]: `q(x, t) = u(x + c t, t)`, interface fixed at 0.
//! * [`Frame::Shifted`]: `U(x, t) = Q(x - γ t, t)` where `Q` is the
//!   unit-amplitude canonical solution (front speed 1, left coefficient
//!   `1 - 6γ`).
//!
//! Coordinates passed to [`frame_map`] for the shifted frame are canonical
//! (already rescaled) coordinates.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Left-state amplitude `a` and front speed `c`, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    a: T,
    c: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(a: T, c: T) -> Result<Self> {
        if !(a.is_finite() && c.is_finite()) || a <= T::zero() || c <= T::zero() {
            return Err(Error::ParameterDomain(format!(
                "need a > 0 and c > 0, got a = {a}, c = {c}"
            )));
        }
        Ok(Self { a, c })
    }

    /// Builds parameters without the positivity check on `a`.
    ///
    /// Used by the degenerate-case tests (`a = 0` has the zero solution) and
    /// by the oracles, which accept `a = 0`. `c` must still be positive.
    pub fn new_unchecked_amplitude(a: T, c: T) -> Result<Self> {
        if !(a.is_finite() && c.is_finite()) || a < T::zero() || c <= T::zero() {
            return Err(Error::ParameterDomain(format!(
                "need a >= 0 and c > 0, got a = {a}, c = {c}"
            )));
        }
        Ok(Self { a, c })
    }

    #[inline]
    pub fn a(&self) -> T {
        self.a
    }

    #[inline]
    pub fn c(&self) -> T {
        self.c
    }

    /// γ = a / c.
    #[inline]
    pub fn gamma(&self) -> T {
        self.a / self.c
    }

    /// Advection coefficient on the left of the interface, `c - 6a`.
    #[inline]
    pub fn left_coeff(&self) -> T {
        self.c - T::lit(6.0) * self.a
    }

    /// Advection coefficient on the right of the interface, `c`.
    #[inline]
    pub fn right_coeff(&self) -> T {
        self.c
    }

    /// Fails unless `c - 6a < 0`, the regime with an oscillatory stationary
    /// state on the left.
    pub fn require_oscillatory_left(&self) -> Result<()> {
        if self.left_coeff() < T::zero() {
            Ok(())
        } else {
            Err(Error::ParameterDomain(format!(
                "stationary profile needs c - 6a < 0 (γ > 1/6), got γ = {}",
                self.gamma()
            )))
        }
    }
}

/// Result of [`to_canonical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canonical<T> {
    /// Canonical parameters `(a, c) = (γ, 1)`.
    pub params: ModelParams<T>,
    /// `c^{1/2}`: canonical x = lab x · space_scale.
    pub space_scale: T,
    /// `c^{3/2}`: canonical t = lab t · time_scale.
    pub time_scale: T,
    /// `a`: lab amplitude of the unit-amplitude canonical solution `Q`.
    pub amp_scale: T,
}

impl<T: Real> Canonical<T> {
    /// Maps traveling-frame coordinates of the original problem to canonical ones.
    #[inline]
    pub fn to_canonical_coords(&self, x: T, t: T) -> (T, T) {
        (x * self.space_scale, t * self.time_scale)
    }

    #[inline]
    pub fn from_canonical_coords(&self, x: T, t: T) -> (T, T) {
        (x / self.space_scale, t / self.time_scale)
    }

    /// Converts a value of `q(·; γ, 1)` (amplitude γ) to `q(·; a, c)`.
    ///
    /// `q(x,t;a,c) = a Q(x√c, t c^{3/2})` and `Q = q(·;γ,1)/γ`.
    #[inline]
    pub fn lift_value(&self, canonical_value: T) -> T {
        canonical_value * self.amp_scale / self.params.a()
    }
}

/// Collapses `(a, c)` onto the one-parameter family `(γ, 1)`.
///
/// With `Q(x,t) = q(x c^{-1/2}, t c^{-3/2}) / a`, substituting into the
/// traveling-frame equation gives `Q_t + Q_xxx = (1 - 6γ) Q_x` on the left
/// and `Q_t + Q_xxx = Q_x` on the right, with unit left state.
pub fn to_canonical<T: Real>(params: &ModelParams<T>) -> Result<Canonical<T>> {
    let params = ModelParams::new(params.a(), params.c())?;
    let c = params.c();
    let sc = c.sqrt();
    Ok(Canonical {
        params: ModelParams::new(params.gamma(), T::one())?,
        space_scale: sc,
        time_scale: c * sc,
        amp_scale: params.a(),
    })
}

/// Coordinate system of a solution sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    /// `u(x, t)`.
    Lab,
    /// `q(x, t) = u(x + c t, t)`.
    Traveling,
    /// `U(x, t) = Q(x - γ t, t)`, canonical units.
    Shifted,
}

/// Maps a point `(x, t)` in `from` to the point in `to` carrying the same
/// physical value (up to the amplitude factor for [`Frame::Shifted`]).
///
/// Lab and traveling coordinates are in the units of `params`; shifted
/// coordinates are canonical. Time is rescaled when the shifted frame is
/// involved.
pub fn frame_map<T: Real>(x: T, t: T, from: Frame, to: Frame, params: &ModelParams<T>) -> (T, T) {
    if from == to {
        return (x, t);
    }
    let (xq, tq) = to_traveling(x, t, from, params);
    from_traveling(xq, tq, to, params)
}

fn to_traveling<T: Real>(x: T, t: T, from: Frame, p: &ModelParams<T>) -> (T, T) {
    match from {
        Frame::Traveling => (x, t),
        // u(x,t) = q(x - ct, t)
        Frame::Lab => (x - p.c() * t, t),
        // U(x,t) = Q(x - γt, t), Q(X,T) = q(X/√c, T/c^{3/2})/a
        Frame::Shifted => {
            let sc = p.c().sqrt();
            let xq = x - p.gamma() * t;
            (xq / sc, t / (p.c() * sc))
        }
    }
}

fn from_traveling<T: Real>(x: T, t: T, to: Frame, p: &ModelParams<T>) -> (T, T) {
    match to {
        Frame::Traveling => (x, t),
        Frame::Lab => (x + p.c() * t, t),
        Frame::Shifted => {
            let sc = p.c().sqrt();
            let tc = t * p.c() * sc;
            (x * sc + p.gamma() * tc, tc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_nonpositive() {
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0).is_err());
        assert!(ModelParams::new_unchecked_amplitude(0.0, 1.0).is_ok());
    }

    #[test]
    fn canonical_identity_case() {
        let c = to_canonical(&ModelParams::new(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(c.params, ModelParams::new(1.0, 1.0).unwrap());
        assert_eq!((c.space_scale, c.time_scale, c.amp_scale), (1.0, 1.0, 1.0));
    }

    #[test]
    fn canonical_a1_c4() {
        let c = to_canonical(&ModelParams::new(1.0, 4.0).unwrap()).unwrap();
        assert_eq!(c.params.a(), 0.25);
        assert_eq!(c.params.c(), 1.0);
        assert_eq!(c.space_scale, 2.0);
        assert_eq!(c.time_scale, 8.0);
        assert_eq!(c.amp_scale, 1.0);
    }

    #[test]
    fn canonical_depends_on_ratio_only() {
        let c1 = to_canonical(&ModelParams::new(2.0, 8.0).unwrap()).unwrap();
        let c2 = to_canonical(&ModelParams::new(1.0, 4.0).unwrap()).unwrap();
        assert_eq!(c1.params, c2.params);
        assert_ne!(c1.space_scale, c2.space_scale);
        assert_ne!(c1.amp_scale, c2.amp_scale);
    }

    #[test]
    fn lab_to_traveling() {
        let p = ModelParams::new(1.0, 4.0).unwrap();
        assert_eq!(frame_map(0.0, 1.0, Frame::Lab, Frame::Traveling, &p), (-4.0, 1.0));
        assert_eq!(frame_map(3.0, 2.0, Frame::Traveling, Frame::Traveling, &p), (3.0, 2.0));
    }

    #[test]
    fn shifted_argument() {
        // canonical problem (γ = 1/4, c = 1): U(0, 2) = Q(-0.5, 2), and the
        // inverse map sends the Q-argument back to x = 0.
        let p = ModelParams::new(0.25, 1.0).unwrap();
        let (xq, tq) = frame_map(0.0, 2.0, Frame::Shifted, Frame::Traveling, &p);
        assert_eq!((xq, tq), (-0.5, 2.0));
        let (xs, _) = frame_map(xq, tq, Frame::Traveling, Frame::Shifted, &p);
        assert_eq!(xs, 0.0);
        let (xs, _) = frame_map(0.0, 2.0, Frame::Traveling, Frame::Shifted, &p);
        assert_eq!(xs, 0.5);
    }

    #[test]
    fn oscillatory_guard() {
        assert!(ModelParams::new(1.0, 4.0).unwrap().require_oscillatory_left().is_ok());
        assert!(ModelParams::new(1.0, 6.0).unwrap().require_oscillatory_left().is_err());
    }

    fn frames() -> impl Strategy<Value = Frame> {
        prop_oneof![Just(Frame::Lab), Just(Frame::Traveling), Just(Frame::Shifted)]
    }

    proptest! {
        #[test]
        fn round_trips(a in 0.05f64..5.0, c in 0.05f64..10.0,
                       x in -50.0f64..50.0, t in 0.0f64..30.0,
                       f in frames(), g in frames()) {
            let p = ModelParams::new(a, c).unwrap();
            let (x1, t1) = frame_map(x, t, f, g, &p);
            let (x2, t2) = frame_map(x1, t1, g, f, &p);
            let scale = 1.0 + x.abs() + t.abs() * (1.0 + c * c.sqrt());
            prop_assert!((x2 - x).abs() <= 1e-13 * scale);
            prop_assert!((t2 - t).abs() <= 1e-13 * (1.0 + t));
        }
    }
}
