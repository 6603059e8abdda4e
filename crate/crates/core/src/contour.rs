//! Integration contours in the spectral plane.
//!
//! The solution integrals run over the boundary of the sector
//! `π/3 < arg λ < 2π/3`, entering from infinity along the `2π/3` ray and
//! leaving along the `π/3` ray. The time factor `h` is split as
//!
//! ```text
//! h(−iλ³; τ) = e^{−iλ³τ}/(−iλ³) − 1/(−iλ³)
//! ```
//!
//! and each half gets its own deformation:
//!
//! * The `τ` half carries `e^{−iλ³(τ−t)}`, which decays inside the sector.
//!   Its rays are tilted inward by `δ`. By Cauchy's theorem its integral is
//!   zero for every `τ ≥ t`; it is still evaluated when `τ > t`, and skipped
//!   when `τ = t`, where nothing but `e^{iνx}` makes it decay.
//! * The `t` half carries `e^{iλ³t}`, which grows inside the sector, so its
//!   rays are tilted outward by `δ`. For the left-hand terms the exit ray
//!   leaves through the saddle point `|λ| = √(|x|/(3t))` of the phase.
//!
//! The small arc joining the rays sits at a radius chosen just outside the
//! singular points that lie in the sector's angular window (see
//! [`arc_radius`]), which keeps the interior growth `e^{ρ³t}` of the `t`
//! half moderate even at large times.

use crate::error::{Error, Result};
use crate::roots::RootBranches;
use crate::scalar::{alpha_pow, c, cis, Cplx, Real};

/// One piece of a contour, parametrized by `s ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment<T> {
    /// `base + s · length · dir`, `dir` of unit modulus.
    Ray { base: Cplx<T>, dir: Cplx<T>, length: T },
    /// `center + radius · e^{i(θ0 + s(θ1 − θ0))}`.
    Arc { center: Cplx<T>, radius: T, theta0: T, theta1: T },
}

impl<T: Real> Segment<T> {
    pub fn ray(base: Cplx<T>, dir: Cplx<T>, length: T) -> Self {
        Segment::Ray {
            base,
            dir: dir / dir.norm(),
            length,
        }
    }

    pub fn line(from: Cplx<T>, to: Cplx<T>) -> Self {
        let d = to - from;
        Segment::Ray {
            base: from,
            dir: d / d.norm(),
            length: d.norm(),
        }
    }

    /// Arc of the circle `|λ| = radius`.
    pub fn arc(radius: T, theta0: T, theta1: T) -> Self {
        Segment::Arc {
            center: c(T::zero(), T::zero()),
            radius,
            theta0,
            theta1,
        }
    }

    pub fn point(&self, s: T) -> Cplx<T> {
        match *self {
            Segment::Ray { base, dir, length } => base + dir * (length * s),
            Segment::Arc { center, radius, theta0, theta1 } => {
                center + cis(theta0 + (theta1 - theta0) * s) * radius
            }
        }
    }

    /// `dλ/ds`.
    pub fn tangent(&self, s: T) -> Cplx<T> {
        match *self {
            Segment::Ray { dir, length, .. } => dir * length,
            Segment::Arc { radius, theta0, theta1, .. } => {
                let th = theta0 + (theta1 - theta0) * s;
                cis(th) * c(T::zero(), radius * (theta1 - theta0))
            }
        }
    }

    pub fn start(&self) -> Cplx<T> {
        self.point(T::zero())
    }

    pub fn end(&self) -> Cplx<T> {
        self.point(T::one())
    }

    pub fn length(&self) -> T {
        match *self {
            Segment::Ray { length, .. } => length,
            Segment::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        }
    }
}

/// Ordered chain of segments with an initial panel count for each.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath<T> {
    segments: Vec<Segment<T>>,
    panels: Vec<usize>,
}

impl<T: Real> ContourPath<T> {
    /// `panels[i]` is the initial subdivision of segment `i`; missing entries
    /// default to one panel.
    pub fn new(segments: Vec<Segment<T>>, panels: &[usize]) -> Self {
        let panels = (0..segments.len())
            .map(|i| panels.get(i).copied().unwrap_or(1).max(1))
            .collect();
        Self { segments, panels }
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn initial_panels(&self) -> &[usize] {
        &self.panels
    }

    /// Largest gap between the end of one segment and the start of the next.
    pub fn max_joint_gap(&self) -> T {
        self.segments
            .windows(2)
            .map(|w| (w[0].end() - w[1].start()).norm())
            .fold(T::zero(), T::max)
    }

    pub fn total_length(&self) -> T {
        self.segments.iter().fold(T::zero(), |s, g| s + g.length())
    }
}

/// Which solution term a contour belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    /// The `ν_0` integral used for `x ≥ 0`.
    Right,
    /// The `ν_1` integral for `x < 0`.
    Nu1,
    /// The `ν_2` integral for `x < 0`.
    Nu2,
}

impl Term {
    /// Index `j` with `ν ≈ α^j λ` at infinity.
    pub fn index(self) -> usize {
        match self {
            Term::Right => 0,
            Term::Nu1 => 1,
            Term::Nu2 => 2,
        }
    }
}

/// Which half of `h(−iλ³; τ)` a contour carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Part<T> {
    /// The `e^{−iλ³τ}/(−iλ³)` half, with `lag = τ − t > 0`.
    Tau { lag: T },
    /// The `−1/(−iλ³)` half.
    Time,
}

/// Geometry knobs shared by all contours of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec<T> {
    /// Tilt of the rays away from the sector boundary, in `(0, π/6)`.
    pub delta: T,
    /// Rays end where the exponent has fallen this far below its maximum.
    pub truncation_margin: T,
    /// Multiplier applied to every truncated ray length.
    pub truncation_scale: T,
}

impl<T: Real> Default for ContourSpec<T> {
    fn default() -> Self {
        Self {
            delta: T::PI() / T::lit(12.0),
            truncation_margin: T::lit(40.0),
            truncation_scale: T::one(),
        }
    }
}

impl<T: Real> ContourSpec<T> {
    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_truncation_scale(mut self, scale: T) -> Self {
        self.truncation_scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.delta > T::zero()
            && self.delta < T::PI() / T::lit(6.0)
            && self.truncation_margin > T::zero()
            && self.truncation_scale >= T::one();
        if ok {
            Ok(())
        } else {
            Err(Error::ParameterDomain(format!(
                "contour tilt must lie in (0, π/6) and truncation scale be ≥ 1, got δ = {}",
                self.delta
            )))
        }
    }
}

/// Radius of the small arc for `term`.
///
/// Singular points of the term's integrand whose argument lies within the
/// angular window swept by the contour (plus a margin of 0.03 rad) must sit
/// strictly inside the arc; the radius is 1.15 times the largest of their
/// moduli, and never less than half the largest branch-point modulus.
pub fn arc_radius<T: Real>(term: Term, branches: &RootBranches<T>, delta: T) -> T {
    let third = T::PI() / T::lit(3.0);
    let margin = T::lit(0.03);
    let lo = third - delta - margin;
    let hi = T::lit(2.0) * third + delta + margin;
    let mut pts = branches.kernel_singular_points();
    pts.extend_from_slice(branches.branch(term.index()).singular_points());
    let inside = pts
        .iter()
        .filter(|z| {
            let a = z.arg();
            a >= lo && a <= hi
        })
        .map(|z| z.norm())
        .fold(T::zero(), T::max);
    (T::lit(1.15) * inside).max(T::lit(0.5) * branches.branch_points().max_modulus())
}

/// Leading-order exponent of the integrand, `iα^jλx + iλ³s`.
#[inline]
pub fn exponent<T: Real>(j: usize, lambda: Cplx<T>, x: T, s: T) -> Cplx<T> {
    let i = c(T::zero(), T::one());
    i * (alpha_pow::<T>(j) * lambda * x + lambda * lambda * lambda * s)
}

/// Length of the ray `base + L·dir` beyond which `Re exponent` stays more than
/// `margin` below its maximum over the ray.
///
/// Fails with [`Error::NoDecay`] when the exponent does not tend to `−∞`.
pub fn truncation_length<T: Real>(j: usize, base: Cplx<T>, dir: Cplx<T>, x: T, s: T, margin: T) -> Result<T> {
    let i = c(T::zero(), T::one());
    let aj = alpha_pow::<T>(j);
    let three = T::lit(3.0);
    // Re of the cubic in L: e0 + e1 L + e2 L² + e3 L³
    let e = [
        (i * (aj * base * x + base * base * base * s)).re,
        (i * (aj * dir * x + base * base * dir * three * s)).re,
        (i * (base * dir * dir * three * s)).re,
        (i * (dir * dir * dir * s)).re,
    ];
    let tiny = T::lit(1e-14) * (x.abs() + s.abs() * (T::one() + base.norm()).powi(3));
    let leading = e.iter().rposition(|v| v.abs() > tiny);
    match leading {
        Some(k) if k >= 1 && e[k] < T::zero() => {}
        _ => return Err(Error::NoDecay),
    }
    let val = |l: T| e[0] + l * (e[1] + l * (e[2] + l * e[3]));
    // critical points of the cubic on (0, ∞)
    let mut crit: Vec<T> = Vec::new();
    let (qa, qb, qc) = (three * e[3], T::lit(2.0) * e[2], e[1]);
    if qa.abs() > tiny {
        let disc = qb * qb - T::lit(4.0) * qa * qc;
        if disc >= T::zero() {
            let sq = disc.sqrt();
            crit.push((-qb + sq) / (T::lit(2.0) * qa));
            crit.push((-qb - sq) / (T::lit(2.0) * qa));
        }
    } else if qb.abs() > tiny {
        crit.push(-qc / qb);
    }
    crit.retain(|&l| l > T::zero() && l.is_finite());
    let e_max = crit.iter().map(|&l| val(l)).fold(val(T::zero()), T::max);
    let target = e_max - margin;
    let lo = crit.iter().copied().fold(T::zero(), T::max);
    if val(lo) <= target {
        return Ok(lo);
    }
    let mut step = T::one().max(lo);
    let mut hi = lo + step;
    while val(hi) > target {
        step *= T::lit(2.0);
        hi = lo + step;
    }
    let mut a = lo;
    for _ in 0..200 {
        let m = (a + hi) * T::lit(0.5);
        if val(m) > target {
            a = m;
        } else {
            hi = m;
        }
        if hi - a <= T::epsilon() * hi {
            break;
        }
    }
    Ok(hi)
}

// Initial panels: about one per π of phase change plus one per 8 units of
// magnitude change of the leading exponent.
fn panels_for<T: Real>(seg: &Segment<T>, j: usize, x: T, s: T) -> usize {
    const SAMPLES: usize = 64;
    let mut phase = T::zero();
    let mut modulus = T::zero();
    let mut prev = exponent(j, seg.start(), x, s);
    for k in 1..=SAMPLES {
        let cur = exponent(j, seg.point(T::lit(k as f64 / SAMPLES as f64)), x, s);
        phase += (cur.im - prev.im).abs();
        modulus += (cur.re - prev.re).abs();
        prev = cur;
    }
    let n = (phase / T::PI() + modulus / T::lit(8.0)).ceil().to_f64_lossy();
    (n.max(1.0) as usize).min(4000)
}

/// Builds the contour for one term and one half of `h`.
///
/// `x` and `t` are the evaluation point; `rho` is the arc radius, normally
/// from [`arc_radius`].
pub fn build_contour<T: Real>(
    term: Term,
    part: Part<T>,
    x: T,
    t: T,
    rho: T,
    spec: &ContourSpec<T>,
) -> Result<ContourPath<T>> {
    spec.validate()?;
    let third = T::PI() / T::lit(3.0);
    let delta = spec.delta;
    let j = term.index();
    let scale = spec.truncation_scale;
    let margin = spec.truncation_margin;
    let s = match part {
        Part::Time => t,
        Part::Tau { lag } => -lag,
    };
    if x == T::zero() && s == T::zero() {
        return Err(Error::NoDecay);
    }
    let trunc = |base: Cplx<T>, dir: Cplx<T>| -> Result<T> {
        Ok(truncation_length(j, base, dir, x, s, margin)? * scale)
    };
    // incoming ray at angle θ from radius r: from far point down to r e^{iθ}
    let incoming = |theta: T, r: T| -> Result<Segment<T>> {
        let d = cis(theta);
        let len = trunc(d * r, d)?;
        Ok(Segment::ray(d * (r + len), -d, len))
    };
    let outgoing = |theta: T, r: T| -> Result<Segment<T>> {
        let d = cis(theta);
        let len = trunc(d * r, d)?;
        Ok(Segment::ray(d * r, d, len))
    };

    let segments = match part {
        Part::Tau { .. } => {
            let (tin, tout) = (T::lit(2.0) * third - delta, third + delta);
            vec![incoming(tin, rho)?, Segment::arc(rho, tin, tout), outgoing(tout, rho)?]
        }
        Part::Time => {
            let saddle = if t > T::zero() {
                (x.abs() / (T::lit(3.0) * t)).sqrt()
            } else {
                T::infinity()
            };
            match term {
                Term::Right => {
                    let r = if x > T::zero() { rho.max(saddle) } else { rho };
                    let (tin, tout) = (T::lit(2.0) * third + delta, third - delta);
                    vec![incoming(tin, r)?, Segment::arc(r, tin, tout), outgoing(tout, r)?]
                }
                Term::Nu1 => {
                    let tin = T::lit(2.0) * third + delta;
                    let mut v = vec![incoming(tin, rho)?, Segment::arc(rho, tin, third)];
                    let e = cis(third);
                    let p = e * rho.max(saddle);
                    if saddle > rho {
                        if !saddle.is_finite() {
                            return Err(Error::NoDecay);
                        }
                        v.push(Segment::line(e * rho, p));
                    }
                    let d = cis(T::PI() / T::lit(12.0));
                    let len = trunc(p, d)?;
                    v.push(Segment::ray(p, d, len));
                    v
                }
                Term::Nu2 => {
                    let e = cis(T::lit(2.0) * third);
                    if saddle > rho && !saddle.is_finite() {
                        return Err(Error::NoDecay);
                    }
                    let p = e * rho.max(saddle);
                    let d = cis(T::lit(11.0) * T::PI() / T::lit(12.0));
                    let len = trunc(p, d)?;
                    let mut v = vec![Segment::ray(p + d * len, -d, len)];
                    if saddle > rho {
                        v.push(Segment::line(p, e * rho));
                    }
                    let tout = third - delta;
                    v.push(Segment::arc(rho, T::lit(2.0) * third, tout));
                    v.push(outgoing(tout, rho)?);
                    v
                }
            }
        }
    };
    let panels: Vec<usize> = segments.iter().map(|g| panels_for(g, j, x, s)).collect();
    Ok(ContourPath::new(segments, &panels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;
    use crate::quadrature::{integrate, QuadOptions};
    use std::f64::consts::PI;

    #[test]
    fn tilted_ray_decay_rate() {
        // on arg λ = π/3 + π/12 the cubic part of the τ-half exponent is
        // −r³ lag/√2, so with x = 0 the ray ends where r³/√2 = margin
        let d = cis(PI / 3.0 + PI / 12.0);
        let len = truncation_length(0, d * 1e-9, d, 0.0, -1.0, 37.0).unwrap();
        assert!((len.powi(3) / 2f64.sqrt() - 37.0).abs() < 1e-6, "{len}");
    }

    #[test]
    fn x_only_decay_on_left() {
        // t = 0, x = −5: Re exponent = −5·Im(αλ)·(−1)… decays like |Im αλ||x|
        let d = cis(2.0 * PI / 3.0 - PI / 12.0);
        let len = truncation_length(1, d * 2.18, d, -5.0, 0.0, 37.0).unwrap();
        let lam = d * (2.18 + len);
        let e0 = exponent(1, d * 2.18, -5.0, 0.0).re;
        let e1 = exponent(1, lam, -5.0, 0.0).re;
        assert!((e0 - e1 - 37.0).abs() < 1e-9);
        assert!(((alpha_pow::<f64>(1) * lam).im * 5.0 - e1).abs() < 1e-12);
    }

    #[test]
    fn no_decay_is_reported() {
        let d = cis(PI / 2.0);
        assert_eq!(truncation_length(0, d, d, 0.0, 0.0, 40.0), Err(Error::NoDecay));
        // e^{iλ³t} grows along the sector bisector
        assert_eq!(truncation_length(0, d, d, 0.0, 1.0, 40.0), Err(Error::NoDecay));
        let spec = ContourSpec::default();
        assert_eq!(
            build_contour(Term::Right, Part::Time, 0.0, 0.0, 1.0, &spec),
            Err(Error::NoDecay)
        );
    }

    #[test]
    fn arc_radius_for_canonical_quarter() {
        let params = ModelParams::new(0.25, 1.0).unwrap();
        let br = RootBranches::new(&params);
        let expect = 1.15 * (4.0 * 0.125f64 / 27.0).powf(1.0 / 6.0);
        for term in [Term::Right, Term::Nu1, Term::Nu2] {
            let r = arc_radius(term, &br, PI / 12.0);
            assert!((r - expect).abs() < 1e-12, "{term:?}: {r}");
        }
    }

    #[test]
    fn paths_are_connected() {
        let spec = ContourSpec::default();
        for (term, x) in [(Term::Right, 1.5), (Term::Right, 0.0), (Term::Nu1, -3.0), (Term::Nu2, -3.0), (Term::Nu1, -0.01)] {
            for part in [Part::Time, Part::Tau { lag: 0.7 }] {
                for t in [1e-3, 0.5, 8.0, 40.0] {
                    let p: ContourPath<f64> = build_contour(term, part, x, t, 0.59, &spec).unwrap();
                    assert!(p.max_joint_gap() < 1e-12, "{term:?} {part:?} t={t}");
                    assert!(p.total_length().is_finite() && p.total_length() > 0.0_f64);
                    // starts and ends far away, where the exponent is negligible
                    let s = if let Part::Tau { lag } = part { -lag } else { t };
                    let first = p.segments()[0].start();
                    let last = p.segments().last().unwrap().end();
                    for z in [first, last] {
                        assert!(exponent(term.index(), z, x, s).re < -30.0, "{term:?} {part:?} t={t} z={z}");
                    }
                }
            }
        }
    }

    #[test]
    fn deformation_invariance_of_cubic_exponential() {
        // e^{iλ³} decays on both outward-tilted rays; rotating each ray onto
        // arg λ = π/6 or 5π/6 gives (e^{iπ/6} − e^{5iπ/6}) Γ(4/3) = √3 Γ(4/3)
        let f = |z: Cplx<f64>| Ok((c(0.0, 1.0) * z * z * z).exp());
        let exact = 3f64.sqrt() * 0.892_979_511_569_249_2;
        let mut vals = Vec::new();
        for (delta, rho) in [(PI / 12.0, 0.8), (PI / 18.0, 1.3), (PI / 9.0, 0.5)] {
            let spec = ContourSpec::default().with_delta(delta);
            let p = build_contour(Term::Right, Part::Time, 0.0, 1.0, rho, &spec).unwrap();
            vals.push(integrate(&p, f, QuadOptions::new(1e-13)).unwrap().value);
        }
        for v in &vals {
            assert!((v - vals[0]).norm() < 1e-10);
            assert!((v - c(exact, 0.0)).norm() < 1e-10, "{v}");
        }
    }

    #[test]
    fn inward_contour_of_decaying_entire_function_vanishes() {
        let f = |z: Cplx<f64>| Ok((c(0.0, -1.0) * z * z * z).exp() / (z * z + 0.25));
        let spec = ContourSpec::default();
        let p = build_contour(Term::Right, Part::Tau { lag: 1.0 }, 0.0, 0.0, 0.8, &spec).unwrap();
        let r = integrate(&p, f, QuadOptions::new(1e-13)).unwrap();
        assert!(r.value.norm() < 1e-12, "{}", r.value);
    }

    #[test]
    fn spec_rejects_bad_tilt() {
        let spec = ContourSpec::default().with_delta(PI / 5.0);
        assert!(build_contour(Term::Right, Part::Time, 1.0, 1.0, 1.0, &spec).is_err());
    }
}
