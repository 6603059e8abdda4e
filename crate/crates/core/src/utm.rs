//! Evaluation of the explicit contour-integral solution.
//!
//! In the traveling frame the solution is
//!
//! ```text
//! x > 0:  2π q = ∫_{∂D} e^{iν_0x + iλ³t} ν_0' [g_2 + iν_0 g_1 − (ν_0² + c) g_0] dλ
//! x < 0:  2π q = 2πa + Σ_{k=1,2} ∫_{∂D} e^{iν_kx + iλ³t} ν_k'
//!                 [g_2 + iν_k g_1 − (ν_k² + c − 6a)(g_0 − a h)] dλ
//! ```
//!
//! with `g_j = g_j(−iλ³; τ)` solving a 3×3 system whose right-hand side is
//! proportional to `h(−iλ³; τ)`. The evaluator solves that system once with
//! `h = 1` (the *kernel*), multiplies by the two halves of `h` separately and
//! integrates each half on its own contour (see [`crate::contour`]).

use rayon::prelude::*;

use crate::contour::{arc_radius, build_contour, ContourSpec, Part, Term};
use crate::error::{Error, Result};
use crate::params::{to_canonical, ModelParams};
use crate::quadrature::{integrate, QuadOptions};
use crate::roots::RootBranches;
use crate::scalar::{c, cr, Cplx, Real};

/// `h(ρ; τ) = ∫_0^τ e^{ρs} ds = (e^{ρτ} − 1)/ρ`.
///
/// A four-term Taylor series replaces the direct formula when `|ρτ| ≤ 1e−4`.
pub fn h_fn<T: Real>(rho: Cplx<T>, tau: T) -> Cplx<T> {
    let z = rho * tau;
    if z.norm() <= T::lit(1e-4) {
        let series = cr(T::one())
            + z * (cr(T::lit(0.5)) + z * (cr(T::one() / T::lit(6.0)) + z / T::lit(24.0)));
        return series * tau;
    }
    (z.exp() - T::one()) / rho
}

/// The interface system `A(λ) · (g_2, i g_1, −g_0) = rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSystem<T> {
    pub matrix: [[Cplx<T>; 3]; 3],
    pub rhs: [Cplx<T>; 3],
}

/// Unpacked solution of the interface system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceValues<T> {
    pub g0: Cplx<T>,
    pub g1: Cplx<T>,
    pub g2: Cplx<T>,
}

impl<T: Real> InterfaceValues<T> {
    /// The only place where the packed unknowns `(g_2, i g_1, −g_0)` are
    /// turned back into `g_0, g_1, g_2`.
    pub fn unpack(packed: [Cplx<T>; 3]) -> Self {
        Self {
            g2: packed[0],
            g1: packed[1] / c(T::zero(), T::one()),
            g0: -packed[2],
        }
    }
}

impl<T: Real> SpectralSystem<T> {
    /// Assembles `A(λ)` and the right-hand side for a given `h` value.
    pub fn assemble(lambda: Cplx<T>, branches: &RootBranches<T>, params: &ModelParams<T>, h: Cplx<T>) -> Result<Self> {
        let [n1, n2, m] = branches.rotated_entries(lambda)?;
        let cc = cr(params.c());
        let pl = cr(params.left_coeff());
        Ok(Self {
            matrix: [
                [cr(T::one()), n1, n1 * n1 + cc],
                [cr(T::one()), n2, n2 * n2 + cc],
                [cr(T::one()), m, m * m + pl],
            ],
            rhs: [
                cr(T::zero()),
                cr(T::zero()),
                -(m * m + pl) * params.a() * h,
            ],
        })
    }

    /// Solves for the packed unknowns `(g_2, i g_1, −g_0)`.
    ///
    /// Rows are scaled by their largest entry, then the system is factored
    /// with partial pivoting. Fails with [`Error::NearSingular`] when the
    /// 1-norm condition number of the scaled matrix exceeds `1e12`.
    pub fn solve(&self) -> Result<[Cplx<T>; 3]> {
        let mut a = self.matrix;
        let mut b = self.rhs;
        for i in 0..3 {
            let s = a[i].iter().map(|z| z.norm()).fold(T::zero(), T::max);
            if !(s > T::zero()) || !s.is_finite() {
                return Err(Error::NearSingular { condition: f64::INFINITY });
            }
            for z in a[i].iter_mut() {
                *z /= s;
            }
            b[i] /= s;
        }
        let norm_a = (0..3)
            .map(|j| (0..3).fold(T::zero(), |acc, i| acc + a[i][j].norm()))
            .fold(T::zero(), T::max);
        let lu = Lu3::factor(a)?;
        let mut inv_norm = T::zero();
        for j in 0..3 {
            let mut e = [cr(T::zero()); 3];
            e[j] = cr(T::one());
            let col = lu.solve(e);
            inv_norm = inv_norm.max(col.iter().fold(T::zero(), |acc, z| acc + z.norm()));
        }
        let cond = norm_a * inv_norm;
        if !(cond <= T::lit(1e12)) {
            return Err(Error::NearSingular {
                condition: cond.to_f64_lossy(),
            });
        }
        Ok(lu.solve(b))
    }
}

struct Lu3<T> {
    lu: [[Cplx<T>; 3]; 3],
    perm: [usize; 3],
}

impl<T: Real> Lu3<T> {
    fn factor(mut a: [[Cplx<T>; 3]; 3]) -> Result<Self> {
        let mut perm = [0, 1, 2];
        for k in 0..3 {
            let p = (k..3)
                .max_by(|&i, &j| a[i][k].norm().partial_cmp(&a[j][k].norm()).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or(k);
            if !(a[p][k].norm() > T::zero()) {
                return Err(Error::NearSingular { condition: f64::INFINITY });
            }
            a.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..3 {
                let f = a[i][k] / a[k][k];
                a[i][k] = f;
                for j in k + 1..3 {
                    let u = a[k][j];
                    a[i][j] -= f * u;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    fn solve(&self, b: [Cplx<T>; 3]) -> [Cplx<T>; 3] {
        let a = &self.lu;
        let mut y = [b[self.perm[0]], b[self.perm[1]], b[self.perm[2]]];
        for i in 1..3 {
            for j in 0..i {
                let l = a[i][j];
                y[i] -= l * y[j];
            }
        }
        for i in (0..3).rev() {
            for j in i + 1..3 {
                let u = a[i][j];
                y[i] -= u * y[j];
            }
            y[i] /= a[i][i];
        }
        y
    }
}

/// Solves the interface system at `λ` for `h = h(−iλ³; τ)`.
pub fn solve_interface_system<T: Real>(lambda: Cplx<T>, params: &ModelParams<T>, tau: T) -> Result<InterfaceValues<T>> {
    let branches = RootBranches::new(params);
    let h = h_fn(minus_i_cubed(lambda), tau);
    let sys = SpectralSystem::assemble(lambda, &branches, params, h)?;
    Ok(InterfaceValues::unpack(sys.solve()?))
}

#[inline]
fn minus_i_cubed<T: Real>(lambda: Cplx<T>) -> Cplx<T> {
    c(T::zero(), -T::one()) * lambda * lambda * lambda
}

/// Integrand of the `x > 0` formula at `λ`, with the full `h(−iλ³; τ)`.
pub fn integrand_right<T: Real>(lambda: Cplx<T>, x: T, t: T, params: &ModelParams<T>, tau: T) -> Result<Cplx<T>> {
    let branches = RootBranches::new(params);
    let g = solve_interface_system(lambda, params, tau)?;
    let i = c(T::zero(), T::one());
    let nu = branches.nu(0, lambda)?;
    let nup = branches.branch(0).derivative_at(lambda, nu);
    let bracket = g.g2 + i * nu * g.g1 - (nu * nu + params.c()) * g.g0;
    Ok((i * nu * x + i * lambda * lambda * lambda * t).exp() * nup * bracket)
}

/// Sum of the two integrands of the `x < 0` formula at `λ`.
pub fn integrand_left<T: Real>(lambda: Cplx<T>, x: T, t: T, params: &ModelParams<T>, tau: T) -> Result<Cplx<T>> {
    let branches = RootBranches::new(params);
    let g = solve_interface_system(lambda, params, tau)?;
    let h = h_fn(minus_i_cubed(lambda), tau);
    let i = c(T::zero(), T::one());
    let mut total = cr(T::zero());
    for k in [1, 2] {
        let nu = branches.nu(k, lambda)?;
        let nup = branches.branch(k).derivative_at(lambda, nu);
        let bracket = g.g2 + i * nu * g.g1 - (nu * nu + params.left_coeff()) * (g.g0 - h * params.a());
        total += (i * nu * x + i * lambda * lambda * lambda * t).exp() * nup * bracket;
    }
    Ok(total)
}

/// Knobs of a single evaluation beyond the point and the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions<T> {
    pub contour: ContourSpec<T>,
    /// Map `(a, c)` onto `(γ, 1)` before integrating.
    pub canonicalize: bool,
    /// Panel budget per integral. One retry with ten times the budget
    /// follows a convergence failure.
    pub max_panels: usize,
    /// Order `m` of `∂_x^m q` to evaluate (0 for the solution itself).
    pub derivative: u32,
}

impl<T: Real> Default for EvalOptions<T> {
    fn default() -> Self {
        Self {
            contour: ContourSpec::default(),
            canonicalize: true,
            max_panels: 10_000,
            derivative: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRequest<T> {
    pub x: T,
    pub t: T,
    pub params: ModelParams<T>,
    /// Any `τ ≥ t`; `None` means `τ = t`.
    pub tau: Option<T>,
    pub rel_tol: T,
    pub options: EvalOptions<T>,
}

impl<T: Real> EvalRequest<T> {
    pub fn new(x: T, t: T, params: ModelParams<T>) -> Self {
        Self {
            x,
            t,
            params,
            tau: None,
            rel_tol: T::lit(1e-10),
            options: EvalOptions::default(),
        }
    }

    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_options(mut self, options: EvalOptions<T>) -> Self {
        self.options = options;
        self
    }
}

/// Outcome of [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    /// `∂_x^m q(x, t)`; the real part of the computed value.
    pub value: T,
    /// Imaginary part of the computed value, zero up to quadrature error.
    pub imag_residual: T,
    /// Sum of the quadrature error estimates, in the units of `value`.
    pub error_estimate: T,
    pub panels_used: usize,
}

/// Precomputed per-parameter state: root branches and arc radii.
#[derive(Debug, Clone)]
pub struct Evaluator<T> {
    params: ModelParams<T>,
    branches: RootBranches<T>,
    spec: ContourSpec<T>,
    radii: [T; 3],
}

impl<T: Real> Evaluator<T> {
    pub fn new(params: ModelParams<T>, spec: ContourSpec<T>) -> Result<Self> {
        spec.validate()?;
        let branches = RootBranches::new(&params);
        let radii = [Term::Right, Term::Nu1, Term::Nu2].map(|term| arc_radius(term, &branches, spec.delta));
        Ok(Self {
            params,
            branches,
            spec,
            radii,
        })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    /// Interface-system solution with `h = 1`, packed as `(g_2, i g_1, −g_0)`.
    pub fn kernel(&self, lambda: Cplx<T>) -> Result<[Cplx<T>; 3]> {
        SpectralSystem::assemble(lambda, &self.branches, &self.params, cr(T::one()))?.solve()
    }

    // e^{iνx} ν' · bracket · (iν)^m, with the kernel in place of g
    fn density(&self, term: Term, lambda: Cplx<T>, x: T, m: u32) -> Result<Cplx<T>> {
        let j = term.index();
        let v = self.kernel(lambda)?;
        let nu = self.branches.nu(j, lambda)?;
        let nup = self.branches.branch(j).derivative_at(lambda, nu);
        let i = c(T::zero(), T::one());
        let bracket = match term {
            Term::Right => v[0] + nu * v[1] + (nu * nu + self.params.c()) * v[2],
            _ => v[0] + nu * v[1] + (nu * nu + self.params.left_coeff()) * (v[2] + self.params.a()),
        };
        let mut out = (i * nu * x).exp() * nup * bracket;
        for _ in 0..m {
            out *= i * nu;
        }
        Ok(out)
    }

    fn integrate_term(&self, term: Term, part: Part<T>, x: T, t: T, m: u32, quad: QuadOptions<T>) -> Result<(Cplx<T>, T, usize)> {
        let rho_arc = self.radii[term.index()];
        let path = build_contour(term, part, x, t, rho_arc, &self.spec)?;
        let i = c(T::zero(), T::one());
        let f = |lambda: Cplx<T>| -> Result<Cplx<T>> {
            let l3 = lambda * lambda * lambda;
            let rho = -i * l3;
            let d = self.density(term, lambda, x, m)?;
            Ok(match part {
                // −e^{iλ³t}/ρ
                Part::Time => -(i * l3 * t).exp() * d / rho,
                // e^{iλ³t − iλ³τ}/ρ
                Part::Tau { lag } => (-i * l3 * lag).exp() * d / rho,
            })
        };
        let r = match integrate(&path, f, quad) {
            Err(Error::Convergence { .. }) => integrate(&path, f, quad.with_max_panels(quad.max_panels * 10))?,
            other => other?,
        };
        Ok((r.value, r.error_estimate, r.panels_used))
    }

    /// `∂_x^m q(x, t)` in the units of this evaluator's parameters.
    pub fn eval(&self, x: T, t: T, tau: T, rel_tol: T, max_panels: usize, m: u32) -> Result<Evaluation<T>> {
        if t == T::zero() {
            if x == T::zero() {
                return Err(Error::NoDecay);
            }
            let datum = if x < T::zero() && m == 0 { self.params.a() } else { T::zero() };
            return Ok(Evaluation {
                value: datum,
                imag_residual: T::zero(),
                error_estimate: T::zero(),
                panels_used: 0,
            });
        }
        let quad = QuadOptions::new(rel_tol).with_max_panels(max_panels);
        let terms: &[Term] = if x >= T::zero() { &[Term::Right] } else { &[Term::Nu1, Term::Nu2] };
        let mut parts = vec![Part::Time];
        if tau > t {
            parts.push(Part::Tau { lag: tau - t });
        }
        let mut sum = cr(T::zero());
        let mut err = T::zero();
        let mut panels = 0;
        for &term in terms {
            for &part in &parts {
                let (v, e, p) = self.integrate_term(term, part, x, t, m, quad)?;
                sum += v;
                err += e;
                panels += p;
            }
        }
        let two_pi = T::TAU();
        let mut q = sum / two_pi;
        if x < T::zero() && m == 0 {
            q += self.params.a();
        }
        let err = err / two_pi;
        // The panel tolerance is relative to ∫|f|, which can exceed |q| by
        // many orders of magnitude when the arc term grows like e^{ρ³t}.
        if !(err <= rel_tol.sqrt() * (self.params.a() + q.re.abs())) {
            return Err(Error::Convergence {
                value_re: q.re.to_f64_lossy(),
                value_im: q.im.to_f64_lossy(),
                error_estimate: err.to_f64_lossy(),
                panels,
            });
        }
        Ok(Evaluation {
            value: q.re,
            imag_residual: q.im,
            error_estimate: err,
            panels_used: panels,
        })
    }
}

fn validate<T: Real>(req: &EvalRequest<T>) -> Result<T> {
    let tau = req.tau.unwrap_or(req.t);
    let min_tol = T::lit(1e-13).max(T::lit(10.0) * T::epsilon());
    if !(req.x.is_finite() && req.t.is_finite() && tau.is_finite()) {
        return Err(Error::ParameterDomain("x, t and τ must be finite".into()));
    }
    if req.t < T::zero() || tau < req.t {
        return Err(Error::ParameterDomain(format!("need 0 ≤ t ≤ τ, got t = {}, τ = {}", req.t, tau)));
    }
    if !(req.rel_tol >= min_tol) {
        return Err(Error::ParameterDomain(format!("rel_tol must be at least {min_tol}, got {}", req.rel_tol)));
    }
    if req.options.derivative > 3 {
        return Err(Error::ParameterDomain("derivative order above 3 is not supported".into()));
    }
    Ok(tau)
}

/// `q(x, t; a, c)` (or `∂_x^m q` when `options.derivative = m`) in the
/// traveling frame.
///
/// At `t = 0` the step datum is returned exactly; `x = t = 0` is an error.
/// The result is rejected with [`Error::Convergence`] when the summed error
/// estimate exceeds `√rel_tol · (a + |q|)`, which happens for large `γ t`
/// where the arc contributions cancel to many digits.
/// With `canonicalize` on, the integrals are done for `(γ, 1)` and mapped
/// back through `q(x,t;a,c) = c · q(x√c, t c^{3/2}; γ, 1)`.
pub fn evaluate<T: Real>(req: &EvalRequest<T>) -> Result<Evaluation<T>> {
    let tau = validate(req)?;
    let m = req.options.derivative;
    if req.options.canonicalize {
        let can = to_canonical(&req.params)?;
        let (xc, tc) = can.to_canonical_coords(req.x, req.t);
        let (_, tauc) = can.to_canonical_coords(req.x, tau);
        let ev = Evaluator::new(can.params, req.options.contour)?;
        let r = ev.eval(xc, tc, tauc.max(tc), req.rel_tol, req.options.max_panels, m)?;
        let scale = can.lift_value(T::one()) * can.space_scale.powi(m as i32);
        Ok(Evaluation {
            value: r.value * scale,
            imag_residual: r.imag_residual * scale,
            error_estimate: r.error_estimate * scale,
            panels_used: r.panels_used,
        })
    } else {
        let ev = Evaluator::new(req.params, req.options.contour)?;
        ev.eval(req.x, req.t, tau, req.rel_tol, req.options.max_panels, m)
    }
}

/// Regular grid `x_min, …, x_max` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileGrid<T> {
    pub x_min: T,
    pub x_max: T,
    pub n: usize,
}

impl<T: Real> ProfileGrid<T> {
    pub fn points(&self) -> Vec<T> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.x_min],
            n => (0..n)
                .map(|i| self.x_min + (self.x_max - self.x_min) * T::lit(i as f64 / (n - 1) as f64))
                .collect(),
        }
    }
}

/// One point of a profile, successful or not.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSample<T> {
    pub x: T,
    pub t: T,
    pub outcome: Result<Evaluation<T>>,
}

/// Evaluates `q(·, t)` at every `x` in parallel. Output order matches input
/// order and a failure at one point does not affect the others.
pub fn evaluate_profile<T: Real>(
    xs: &[T],
    t: T,
    params: &ModelParams<T>,
    tau: Option<T>,
    rel_tol: T,
    options: &EvalOptions<T>,
) -> Vec<SolutionSample<T>> {
    xs.par_iter()
        .map(|&x| {
            let req = EvalRequest {
                x,
                t,
                params: *params,
                tau,
                rel_tol,
                options: *options,
            };
            SolutionSample {
                x,
                t,
                outcome: evaluate(&req),
            }
        })
        .collect()
}
