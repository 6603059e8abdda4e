//! Analytic root branches of the spectral cubics `ν³ + pν = λ³`.
//!
//! For each coefficient `p` the cubic has three roots, labelled by their
//! large-`λ` asymptotics `ν ≈ α^k λ` with `α = e^{2πi/3}`. Each label defines
//! a function that is analytic outside a compact set; we fix that set to be
//! the union of radial segments `[0, λ*]` joining the origin to the branch
//! points at which the labelled root actually collides with another one.
//!
//! Evaluation uses Cardano's formula with principal square and cube roots:
//!
//! ```text
//! z = 4p³ / (27 λ⁶),   S = (1 + √(1 + z)) / 2,   u = α^k λ S^{1/3},
//! ν = u − p / (3u)
//! ```
//!
//! `Re √(1+z) ≥ 0` keeps `S` in the right half-plane, so the only
//! discontinuities come from the square root, i.e. from `1 + z ≤ 0`, which
//! is exactly the set of radial segments `[0, λ*]`. This reproduces radial
//! analytic continuation from infinity without any path tracking.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::scalar::{alpha_pow, c, cbrt_principal, cr, Cplx, Real};

/// Branch points of `ν³ + pν = λ³`: the six `λ` with a double root.
///
/// Returns `{0}` when `p = 0`.
pub fn branch_points<T: Real>(p: T) -> Vec<Cplx<T>> {
    if p == T::zero() {
        return vec![cr(T::zero())];
    }
    // Double root at ν² = -p/3, where λ³ = ν(ν² + p) = 2pν/3.
    let three = T::lit(3.0);
    let nu_sq = cr(-p / three);
    let nu = nu_sq.sqrt();
    let mut out = Vec::with_capacity(6);
    for sign in [T::one(), -T::one()] {
        let lam3 = nu * (T::lit(2.0) * p / three) * sign;
        let base = cbrt_principal(lam3);
        for k in 0..3 {
            out.push(base * alpha_pow::<T>(k));
        }
    }
    out
}

/// Modulus shared by all branch points of `ν³ + pν = λ³`:
/// `|λ*|⁶ = 4|p|³/27`.
pub fn branch_point_modulus<T: Real>(p: T) -> T {
    (T::lit(4.0) * p.abs().powi(3) / T::lit(27.0)).powf(T::one() / T::lit(6.0))
}

/// Branch points of both cubics of a problem together with a radius outside
/// which every branch is analytic.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchPointSet<T> {
    pub points: Vec<Cplx<T>>,
    /// `max(1.5 · max |λ*|, 1)`.
    pub exclusion_radius: T,
}

impl<T: Real> BranchPointSet<T> {
    pub fn for_params(params: &ModelParams<T>) -> Self {
        let mut points = branch_points(params.right_coeff());
        points.extend(branch_points(params.left_coeff()));
        let max_mod = points.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        Self {
            points,
            exclusion_radius: (T::lit(1.5) * max_mod).max(T::one()),
        }
    }

    pub fn max_modulus(&self) -> T {
        self.points.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }
}

/// One labelled root `ν ≈ α^k λ` of `ν³ + pν = λ³`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootBranch<T> {
    k: usize,
    p: T,
    /// Branch points at which this root collides with another one; the
    /// segments `[0, λ*]` are its cuts.
    singular: Vec<Cplx<T>>,
}

impl<T: Real> RootBranch<T> {
    pub fn new(p: T, k: usize) -> Self {
        let k = k % 3;
        let mut me = Self {
            k,
            p,
            singular: Vec::new(),
        };
        if p != T::zero() {
            me.singular = branch_points(p)
                .into_iter()
                .filter(|&bp| me.jumps_across(bp))
                .collect();
        }
        me
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn coeff(&self) -> T {
        self.p
    }

    /// Branch points where this root is genuinely non-analytic.
    pub fn singular_points(&self) -> &[Cplx<T>] {
        &self.singular
    }

    // Compares the two one-sided limits across the middle of the segment [0, bp].
    fn jumps_across(&self, bp: Cplx<T>) -> bool {
        let r = bp.norm();
        let normal = c(T::zero(), T::one()) * bp / r;
        let mid = bp * T::lit(0.5);
        let eps = T::lit(1e-4) * r;
        let plus = self.raw(mid + normal * eps);
        let minus = self.raw(mid - normal * eps);
        (plus - minus).norm() > T::lit(1e-2) * r
    }

    #[inline]
    fn raw(&self, lambda: Cplx<T>) -> Cplx<T> {
        let ak = alpha_pow::<T>(self.k);
        if self.p == T::zero() {
            return ak * lambda;
        }
        let three = T::lit(3.0);
        let l3 = lambda * lambda * lambda;
        let z = cr(T::lit(4.0) * self.p.powi(3) / T::lit(27.0)) / (l3 * l3);
        let s = (cr(T::one()) + (cr(T::one()) + z).sqrt()) * T::lit(0.5);
        let u = ak * lambda * cbrt_principal(s);
        u - cr(self.p) / (u * three)
    }

    /// Distance from `lambda` to the nearest cut of this branch.
    pub fn distance_to_cut(&self, lambda: Cplx<T>) -> T {
        self.singular
            .iter()
            .map(|&bp| dist_to_segment(lambda, bp))
            .fold(T::infinity(), T::min)
    }

    /// Value of the branch at `lambda`.
    ///
    /// Fails at the origin and within a relative `1e-9` band around a cut,
    /// where the labelled root is not well defined.
    pub fn eval(&self, lambda: Cplx<T>) -> Result<Cplx<T>> {
        let r = lambda.norm();
        let guard = T::lit(1e-9) * (T::one() + r);
        if r == T::zero() || !r.is_finite() || self.distance_to_cut(lambda) < guard {
            return Err(Error::BranchDomain {
                branch: self.k,
                re: lambda.re.to_f64_lossy(),
                im: lambda.im.to_f64_lossy(),
            });
        }
        Ok(self.eval_unchecked(lambda))
    }

    /// Cardano value plus one Newton step, without the cut guard.
    ///
    /// On a cut this returns one of the two one-sided limits. Callers that
    /// only use symmetric combinations of two branches can rely on that.
    pub(crate) fn eval_unchecked(&self, lambda: Cplx<T>) -> Cplx<T> {
        let mut nu = self.raw(lambda);
        // one Newton step tidies the last few bits of Cardano's cancellation
        let f = nu * nu * nu + nu * self.p - lambda * lambda * lambda;
        let df = nu * nu * T::lit(3.0) + cr(self.p);
        if df.norm() > T::zero() {
            nu -= f / df;
        }
        nu
    }

    /// `dν/dλ = 3λ² / (3ν² + p)` at a point where `nu` is this branch's value.
    #[inline]
    pub fn derivative_at(&self, lambda: Cplx<T>, nu: Cplx<T>) -> Cplx<T> {
        lambda * lambda * T::lit(3.0) / (nu * nu * T::lit(3.0) + cr(self.p))
    }

    pub fn derivative(&self, lambda: Cplx<T>) -> Result<Cplx<T>> {
        let nu = self.eval(lambda)?;
        Ok(self.derivative_at(lambda, nu))
    }
}

fn dist_to_segment<T: Real>(z: Cplx<T>, end: Cplx<T>) -> T {
    let len2 = end.norm_sqr();
    if len2 == T::zero() {
        return z.norm();
    }
    let s = ((z.re * end.re + z.im * end.im) / len2)
        .max(T::zero())
        .min(T::one());
    (z - end * s).norm()
}

/// The three branches used by the solution formula for one parameter set.
///
/// * `ν_0`: root `≈ λ` of `ν³ + cν = λ³`.
/// * `ν_1`: root `≈ αλ` of `ν³ + (c − 6a)ν = λ³`, so that `ν_1(λ) = ν_2(α²λ)`.
/// * `ν_2`: root `≈ α²λ` of `ν³ + (c − 6a)ν = λ³`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootBranches<T> {
    branches: [RootBranch<T>; 3],
    points: BranchPointSet<T>,
    // ν_0(αλ), ν_0(α²λ), ν_2(αλ) as labelled roots at λ itself
    rotated: [RootBranch<T>; 3],
}

impl<T: Real> RootBranches<T> {
    pub fn new(params: &ModelParams<T>) -> Self {
        let pl = params.left_coeff();
        Self {
            branches: [
                RootBranch::new(params.right_coeff(), 0),
                RootBranch::new(pl, 1),
                RootBranch::new(pl, 2),
            ],
            points: BranchPointSet::for_params(params),
            rotated: [
                RootBranch::new(params.right_coeff(), 1),
                RootBranch::new(params.right_coeff(), 2),
                RootBranch::new(pl, 0),
            ],
        }
    }

    pub fn branch(&self, j: usize) -> &RootBranch<T> {
        &self.branches[j]
    }

    pub fn branch_points(&self) -> &BranchPointSet<T> {
        &self.points
    }

    /// Points where the interface system's solution fails to be analytic:
    /// the singular points of `ν_0(λ)` and of `λ ↦ ν_2(αλ)`.
    pub fn kernel_singular_points(&self) -> Vec<Cplx<T>> {
        let mut pts = self.branches[0].singular_points().to_vec();
        pts.extend_from_slice(self.rotated[2].singular_points());
        pts
    }

    /// The three entries `(ν_0(αλ), ν_0(α²λ), ν_2(αλ))` of the interface
    /// matrix.
    ///
    /// Cardano's formula depends on `λ` only through `λ⁶` apart from the
    /// factor `α^kλ`, so `ν_0(α^kλ)` is the root labelled `k` of the same
    /// cubic at `λ`, and `ν_2(αλ)` is the root labelled 0 of the left cubic.
    /// Evaluating them this way shares one square root between the first
    /// two entries, which therefore stay distinct even on the cuts of
    /// `ν_0(αλ)` and `ν_0(α²λ)`; those cuts cancel in every symmetric
    /// combination of the two entries, and the interface system is one.
    pub fn rotated_entries(&self, lambda: Cplx<T>) -> Result<[Cplx<T>; 3]> {
        if lambda.norm() == T::zero() {
            return Err(Error::BranchDomain {
                branch: 0,
                re: 0.0,
                im: 0.0,
            });
        }
        Ok([
            self.rotated[0].eval_unchecked(lambda),
            self.rotated[1].eval_unchecked(lambda),
            self.rotated[2].eval(lambda)?,
        ])
    }

    /// `ν_j(λ)`.
    pub fn nu(&self, j: usize, lambda: Cplx<T>) -> Result<Cplx<T>> {
        self.branches[j].eval(lambda)
    }

    /// `ν_j'(λ)`, computed analytically.
    pub fn nu_prime(&self, j: usize, lambda: Cplx<T>) -> Result<Cplx<T>> {
        self.branches[j].derivative(lambda)
    }
}
