//! Quadrature and numerical Laplace inversion.
//!
//! Everything here is deterministic: fixed node sets, bisection-based adaptivity
//! and a fixed contour.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Scalar types that can be integrated.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
    fn finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Value, error estimate and evaluation count of an integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult<T = Complex64> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Evaluation budget, overridable through `PSEUDOHEAT_QUAD_BUDGET`.
pub fn evaluation_budget() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var("PSEUDOHEAT_QUAD_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(4_000_000)
    })
}

/// Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<T: QuadValue>(&self, f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> T {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let mut s = T::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s = s + f(c + h * x) * (w * h);
        }
        s
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 20-point and 10-point rules.
pub fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static R: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    R.get_or_init(|| (GaussLegendre::new(20), GaussLegendre::new(10)))
}

/// Composite Gauss–Legendre over `panels` equal panels. The error estimate is the
/// summed gap between the 20- and 10-point rules.
pub fn composite<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    panels: usize,
) -> QuadratureResult<T> {
    let (hi, lo) = rules();
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut value = T::default();
    let mut err = 0.0;
    for i in 0..panels {
        let (pa, pb) = (a + i as f64 * w, a + (i + 1) as f64 * w);
        let fine = hi.integrate(&mut f, pa, pb);
        let coarse = lo.integrate(&mut f, pa, pb);
        value = value + fine;
        err += (fine - coarse).magnitude();
    }
    QuadratureResult { value, error_estimate: err, evaluations: panels * 30 }
}

/// Composite 20-point rule without an error estimate, for hot inner loops.
pub fn composite_fast<T: QuadValue>(mut f: impl FnMut(f64) -> T, a: f64, b: f64, panels: usize) -> T {
    let (hi, _) = rules();
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut value = T::default();
    for i in 0..panels {
        value = value + hi.integrate(&mut f, a + i as f64 * w, a + (i + 1) as f64 * w);
    }
    value
}

/// Globally adaptive bisection on the 20/10-point pair.
pub fn adaptive<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult<T>> {
    let (hi, lo) = rules();
    let budget = evaluation_budget();
    let eval = |f: &mut dyn FnMut(f64) -> T, pa: f64, pb: f64| {
        let mut g = |x: f64| f(x);
        let fine = hi.integrate(&mut g, pa, pb);
        let coarse = lo.integrate(&mut g, pa, pb);
        (fine, (fine - coarse).magnitude())
    };
    let (v0, e0) = eval(&mut f, a, b);
    let mut intervals = vec![(a, b, v0, e0)];
    let mut evaluations = 30;
    loop {
        let total_err: f64 = intervals.iter().map(|s| s.3).sum();
        if total_err <= tol {
            break;
        }
        if evaluations + 60 > budget {
            return Err(Error::Quadrature { estimate: total_err });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (pa, pb, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        let (vl, el) = eval(&mut f, pa, mid);
        let (vr, er) = eval(&mut f, mid, pb);
        evaluations += 60;
        if !(vl.finite() && vr.finite()) {
            return Err(Error::Quadrature { estimate: f64::INFINITY });
        }
        intervals.push((pa, mid, vl, el));
        intervals.push((mid, pb, vr, er));
    }
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let value = intervals.iter().fold(T::default(), |s, i| s + i.2);
    let error_estimate = intervals.iter().map(|i| i.3).sum();
    Ok(QuadratureResult { value, error_estimate, evaluations })
}

/// Truncation rule for integrands bounded by `λ^poly · e^{growth·λ − rate·λ^power}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub rate: f64,
    pub power: usize,
    pub growth: f64,
    pub poly: f64,
    /// Required value of the log-decay at the cutoff.
    pub decay: f64,
}

impl Cutoff {
    pub fn new(rate: f64, power: usize) -> Self {
        Cutoff { rate, power, growth: 0.0, poly: 0.0, decay: 40.0 }
    }

    pub fn with_growth(mut self, growth: f64) -> Self {
        self.growth = growth.max(0.0);
        self
    }

    pub fn with_poly(mut self, poly: f64) -> Self {
        self.poly = poly.max(0.0);
        self
    }

    /// Smallest `U` (up to bisection) with `rate·U^power − growth·U − poly·ln U ≥ decay`.
    pub fn upper(&self) -> f64 {
        let g = |u: f64| {
            self.rate * u.powi(self.power as i32) - self.growth * u - self.poly * u.max(1.0).ln()
        };
        let mut hi = (self.decay / self.rate).powf(1.0 / self.power as f64).max(1e-300);
        while g(hi) < self.decay {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if g(mid) >= self.decay {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// `∫_0^∞ f` for an integrand that decays like `e^{−rate·λ^power}`.
///
/// `frequency` bounds the oscillation rate so that each panel spans at most half a
/// period.
pub fn decaying_quad<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    cutoff: Cutoff,
    frequency: f64,
) -> Result<QuadratureResult<T>> {
    let u = cutoff.upper();
    let width = if frequency > 0.0 { PI / frequency } else { f64::INFINITY };
    let panels = ((u / width).ceil() as usize).max(8);
    if panels * 30 > evaluation_budget() {
        return Err(Error::Quadrature { estimate: f64::INFINITY });
    }
    let mut r = composite(&mut f, 0.0, u, panels);
    let tail = f(u).magnitude() * u / cutoff.power as f64;
    r.error_estimate += tail;
    r.evaluations += 1;
    if !r.value.finite() {
        return Err(Error::Quadrature { estimate: f64::INFINITY });
    }
    Ok(r)
}

/// Panel count used by [`decaying_quad`], exposed for hot paths that skip the
/// error estimate.
pub fn decaying_panels(cutoff: Cutoff, frequency: f64) -> (f64, usize) {
    let u = cutoff.upper();
    let width = if frequency > 0.0 { PI / frequency } else { f64::INFINITY };
    (u, ((u / width).ceil() as usize).max(8))
}

/// A function of complex `λ`.
pub trait LaplaceEvaluator {
    fn eval(&self, lambda: Complex64) -> Complex64;
}

impl<F: Fn(Complex64) -> Complex64> LaplaceEvaluator for F {
    fn eval(&self, lambda: Complex64) -> Complex64 {
        self(lambda)
    }
}

/// Node count for the cotangent (Talbot) contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TalbotConfig {
    pub nodes: usize,
}

impl Default for TalbotConfig {
    fn default() -> Self {
        TalbotConfig { nodes: 32 }
    }
}

impl TalbotConfig {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 8 || nodes % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "Talbot node count must be even and at least 8, got {nodes}"
            )));
        }
        Ok(TalbotConfig { nodes })
    }

    /// Contour scale `M/t`.
    pub fn scale(&self, t: f64) -> f64 {
        self.nodes as f64 / t
    }
}

// Cotangent contour z(θ) = (M/t)(σ + μθcot(αθ) + iνθ), θ ∈ (−π, π).
const SIGMA: f64 = -0.6122;
const MU: f64 = 0.5017;
const ALPHA: f64 = 0.6407;
const NU: f64 = 0.2645;

fn talbot_sum<F: LaplaceEvaluator + ?Sized>(f: &F, t: f64, m: usize) -> Result<(Complex64, f64)> {
    let scale = m as f64 / t;
    let mut s = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for k in 0..m {
        let th = -PI + (k as f64 + 0.5) * 2.0 * PI / m as f64;
        let (cot, dcot) = if th.abs() < 1e-12 {
            (1.0 / ALPHA, 0.0)
        } else {
            let at = ALPHA * th;
            (th / at.tan(), 1.0 / at.tan() - at / at.sin().powi(2))
        };
        let z = Complex64::new(scale * (SIGMA + MU * cot), scale * NU * th);
        let dz = Complex64::new(scale * MU * dcot, scale * NU);
        let fz = f.eval(z);
        if !(fz.re.is_finite() && fz.im.is_finite()) {
            return Err(Error::NonFinite { re: z.re, im: z.im });
        }
        let term = (z * t).exp() * fz * dz;
        mag += term.norm();
        s += term;
    }
    let value = s / Complex64::new(0.0, m as f64);
    Ok((value, mag / m as f64))
}

/// Inverse Laplace transform at `t` along the cotangent contour.
pub fn talbot_invert<F: LaplaceEvaluator + ?Sized>(
    f: &F,
    t: f64,
    cfg: TalbotConfig,
) -> Result<QuadratureResult<Complex64>> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("inversion time must be positive, got {t}")));
    }
    let (v, mag) = talbot_sum(f, t, cfg.nodes)?;
    let (v2, _) = talbot_sum(f, t, cfg.nodes - 2)?;
    let error_estimate = (v - v2).norm() + mag * f64::EPSILON * cfg.nodes as f64;
    Ok(QuadratureResult {
        value: v,
        error_estimate,
        evaluations: 2 * cfg.nodes - 2,
    })
}
