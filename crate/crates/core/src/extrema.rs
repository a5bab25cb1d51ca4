//! Joint laws of `X(t)` with its running maximum `M(t)` or minimum `m(t)`.
//!
//! Everything is first written in the λ-domain as finite sums of exponentials in
//! `λ^{1/N}`; time-domain values come from Talbot inversion, with the
//! double-integral representation kept as an independent path for the maximum.

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::algebra::RootSystem;
use crate::error::{Error, Result};
use crate::hitting::i_lq_fast;
use crate::inversion::{self, talbot_invert, QuadValue, QuadratureResult, TalbotConfig};
use crate::kernel::{kernel_derivative_fast, potential_psi, root_n};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Extremum {
    Max,
    Min,
}

/// `φ_λ(ξ) = λ^{1/N} Σ_J θ_j A_j e^{θ_j λ^{1/N} ξ}`, meaningful for `ξ ≤ 0`.
pub fn phi_lambda(rs: &RootSystem, lambda: Complex64, xi: f64) -> Complex64 {
    let r = root_n(lambda, rs.order());
    let h = rs.j();
    r * h.theta.iter().zip(&h.coef).map(|(&t, &a)| t * a * (t * r * xi).exp()).sum::<Complex64>()
}

/// `ψ_λ(ξ) = −λ^{1/N} Σ_K θ_k B_k e^{θ_k λ^{1/N} ξ}`, meaningful for `ξ ≥ 0`.
pub fn psi_lambda(rs: &RootSystem, lambda: Complex64, xi: f64) -> Complex64 {
    let r = root_n(lambda, rs.order());
    let h = rs.k();
    -r * h.theta.iter().zip(&h.coef).map(|(&t, &b)| t * b * (t * r * xi).exp()).sum::<Complex64>()
}

/// Arguments of the Laplace–Fourier transform of `(X(t), M(t))` or `(X(t), m(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LftQuery {
    pub lambda: Complex64,
    pub mu: f64,
    /// Tilt of the extremum: `e^{−νM}` for the maximum, `e^{νm}` for the minimum.
    pub nu: f64,
    pub x: f64,
}

impl LftQuery {
    pub fn new(lambda: Complex64, mu: f64, nu: f64, x: f64) -> Result<Self> {
        if !(lambda.re > 0.0) {
            return Err(Error::InvalidParams(format!("Re(lambda) must be positive, got {lambda}")));
        }
        if !(nu >= 0.0) {
            return Err(Error::InvalidParams(format!("nu must be non-negative, got {nu}")));
        }
        Ok(LftQuery { lambda, mu, nu, x })
    }
}

/// `∫ e^{−λt} E_x[e^{iμX(t) − νM(t)}] dt` (or `e^{iμX(t) + νm(t)}` for the minimum).
pub fn lft_extrema(rs: &RootSystem, q: &LftQuery, which: Extremum) -> Complex64 {
    let r = root_n(q.lambda, rs.order());
    let imu = Complex64::new(0.0, q.mu);
    let (wj, wk, shift) = match which {
        Extremum::Max => (imu - q.nu, imu, imu - q.nu),
        Extremum::Min => (imu, imu + q.nu, imu + q.nu),
    };
    let pj: Complex64 = rs.j().theta.iter().map(|&t| r - wj * t).product();
    let pk: Complex64 = rs.k().theta.iter().map(|&t| r - wk * t).product();
    (shift * q.x).exp() / (pj * pk)
}

/// A point `(x, y, z)` with `z` on the admissible side of both `x` and `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremaQuery {
    pub lambda: Complex64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub which: Extremum,
}

impl ExtremaQuery {
    pub fn new(lambda: Complex64, x: f64, y: f64, z: f64, which: Extremum) -> Result<Self> {
        check_straddle(x, y, z, which)?;
        Ok(ExtremaQuery { lambda, x, y, z, which })
    }
}

fn check_straddle(x: f64, y: f64, z: f64, which: Extremum) -> Result<()> {
    let ok = match which {
        Extremum::Max => z >= x.max(y),
        Extremum::Min => z <= x.min(y),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Ordering(format!("{which:?} level z={z} with x={x}, y={y}")))
    }
}

/// `∫ e^{−λt} P_x{X(t) ∈ dy, M(t) ∈ dz}/dy dz dt = (1/λ) φ_λ(x−z) ψ_λ(z−y)`
/// (`(1/λ) ψ_λ(x−z) φ_λ(z−y)` for the minimum).
pub fn joint_density_lt(rs: &RootSystem, q: &ExtremaQuery) -> Complex64 {
    let l = q.lambda;
    match q.which {
        Extremum::Max => phi_lambda(rs, l, q.x - q.z) * psi_lambda(rs, l, q.z - q.y) / l,
        Extremum::Min => psi_lambda(rs, l, q.x - q.z) * phi_lambda(rs, l, q.z - q.y) / l,
    }
}

/// `l`-th `x`-derivative of the straddle transform
/// `∫ e^{−λt} P_x{X(t) ≤ y ≤ z ≤ M(t)} dt` (resp. `P_x{X(t) ≥ y ≥ z ≥ m(t)}`).
fn straddle_derivative(rs: &RootSystem, lambda: Complex64, x: f64, y: f64, z: f64, which: Extremum, l: u32) -> Complex64 {
    let r = root_n(lambda, rs.order());
    let (j, k) = (rs.j(), rs.k());
    let mut s = Complex64::new(0.0, 0.0);
    for (&tj, &a) in j.theta.iter().zip(&j.coef) {
        for (&tk, &b) in k.theta.iter().zip(&k.coef) {
            s += match which {
                Extremum::Max => {
                    tj * a * b / (tj - tk) * (tj * r).powu(l) * (tj * r * (x - z) + tk * r * (z - y)).exp()
                }
                Extremum::Min => {
                    a * tk * b / (tk - tj) * (tk * r).powu(l) * (tj * r * (z - y) + tk * r * (x - z)).exp()
                }
            };
        }
    }
    s / lambda
}

/// `∫ e^{−λt} P_x{X(t) ≤ y ≤ z ≤ M(t)} dt` for `z ≥ x ∨ y`, or
/// `∫ e^{−λt} P_x{X(t) ≥ y ≥ z ≥ m(t)} dt` for `z ≤ x ∧ y`.
pub fn straddle_lt(rs: &RootSystem, lambda: Complex64, x: f64, y: f64, z: f64, which: Extremum) -> Result<Complex64> {
    check_straddle(x, y, z, which)?;
    Ok(straddle_derivative(rs, lambda, x, y, z, which, 0))
}

fn check_start(x: f64, z: f64, which: Extremum) -> Result<()> {
    let ok = match which {
        Extremum::Max => z >= x,
        Extremum::Min => z <= x,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Ordering(format!("{which:?} level z={z} on the wrong side of x={x}")))
    }
}

/// `l`-th derivative in `x` of the λ-transform of `P_x{X(t) ≤ y}` (Max) or `P_x{X(t) ≥ y}` (Min).
fn marginal_derivative(rs: &RootSystem, lambda: Complex64, x: f64, y: f64, which: Extremum, l: u32) -> Complex64 {
    let n = rs.order() as f64;
    let r = root_n(lambda, rs.order());
    let sum = |h: &crate::algebra::HalfSystem| -> Complex64 {
        h.theta.iter().map(|&t| (t * r).powu(l) * (t * r * (x - y)).exp()).sum()
    };
    let one = if l == 0 { 1.0 / lambda } else { Complex64::new(0.0, 0.0) };
    let below = match which {
        Extremum::Max => x >= y,
        Extremum::Min => x <= y,
    };
    let own = match which {
        Extremum::Max => (rs.k(), rs.j()),
        Extremum::Min => (rs.j(), rs.k()),
    };
    if below {
        sum(own.0) / (n * lambda)
    } else {
        one - sum(own.1) / (n * lambda)
    }
}

/// `F_λ(x,y,z) = ∫ e^{−λt} P_x{X(t) ≤ y, M(t) ≤ z} dt` for `x ≤ z`
/// (resp. `P_x{X(t) ≥ y, m(t) ≥ z}` for `x ≥ z`). A terminal level past `z`
/// is clamped to `z`.
pub fn dist_func_lt(rs: &RootSystem, lambda: Complex64, x: f64, y: f64, z: f64, which: Extremum) -> Result<Complex64> {
    check_start(x, z, which)?;
    let y = clamp(y, z, which);
    Ok(marginal_derivative(rs, lambda, x, y, which, 0) - straddle_derivative(rs, lambda, x, y, z, which, 0))
}

fn clamp(y: f64, z: f64, which: Extremum) -> f64 {
    match which {
        Extremum::Max => y.min(z),
        Extremum::Min => y.max(z),
    }
}

/// `l`-th `x`-derivative of [`dist_func_lt`]; at `x = y` this is the right limit.
pub fn dist_func_derivative(
    rs: &RootSystem,
    lambda: Complex64,
    x: f64,
    y: f64,
    z: f64,
    which: Extremum,
    l: u32,
) -> Complex64 {
    marginal_derivative(rs, lambda, x, y, which, l) - straddle_derivative(rs, lambda, x, y, z, which, l)
}

/// `P_x{X(t) ≤ y ≤ z ≤ M(t)}` (or the minimum mirror) by Talbot inversion.
pub fn dist_func_time(
    rs: &RootSystem,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    which: Extremum,
    cfg: TalbotConfig,
) -> Result<QuadratureResult<f64>> {
    check_straddle(x, y, z, which)?;
    let f = |l: Complex64| straddle_derivative(rs, l, x, y, z, which, 0);
    real_part(talbot_invert(&f, t, cfg)?)
}

/// `P_x{X(t) ≤ y, M(t) ≤ z}` (or `P_x{X(t) ≥ y, m(t) ≥ z}`) by Talbot inversion.
pub fn joint_cdf_time(
    rs: &RootSystem,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    which: Extremum,
    cfg: TalbotConfig,
) -> Result<QuadratureResult<f64>> {
    check_start(x, z, which)?;
    let f = |l: Complex64| dist_func_lt(rs, l, x, y, z, which).expect("ordering checked");
    real_part(talbot_invert(&f, t, cfg)?)
}

fn real_part(r: QuadratureResult<Complex64>) -> Result<QuadratureResult<f64>> {
    Ok(QuadratureResult {
        value: r.value.re,
        error_estimate: r.error_estimate,
        evaluations: r.evaluations,
    })
}

/// `a_{km} = N B_k / Γ((m+1)/N) · Σ_J A_j α_{jm} / (θ_j − θ_k)`, keyed by position in `K` and `m`.
pub fn representation_coefficients(rs: &RootSystem) -> Vec<Vec<Complex64>> {
    let n = rs.order() as f64;
    let (j, k) = (rs.j(), rs.k());
    k.theta
        .iter()
        .zip(&k.coef)
        .map(|(&tk, &b)| {
            (0..j.len())
                .map(|m| {
                    let s: Complex64 = (0..j.len())
                        .map(|a| j.coef[a] * j.vander[a][m] / (j.theta[a] - tk))
                        .sum();
                    n * b / gamma((m as f64 + 1.0) / n) * s
                })
                .collect()
        })
        .collect()
}

/// Resolution of [`straddle_double_integral`]: largest Gauss–Legendre panel, in
/// units of the scaled variable `ω = |ξ|^{N/(N−1)} σ^{−1/(N−1)}`, for the outer
/// (`s`) and inner (`σ`) integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleIntegralConfig {
    pub outer_width: f64,
    pub inner_width: f64,
}

impl Default for DoubleIntegralConfig {
    fn default() -> Self {
        DoubleIntegralConfig { outer_width: 40.0, inner_width: 40.0 }
    }
}

// p(σ;ξ) and I_{k0}(σ;ξ) carry an envelope exp(−c ω) with c between 0.2 and 0.4
// and a phase of at most ω/2; past ω = REACH the envelope is below e^{−40}.
const REACH: f64 = 180.0;

/// `∫_0^h f(σ) dσ` for `f` with an essential zero at `σ = 0`, through the scaled
/// variable `ω`. Segments double in length away from `h`, so the power-law
/// Jacobian is resolved near `h` and the linear phase far from it.
fn essential_quad<T: QuadValue>(
    f: impl Fn(f64) -> T,
    h: f64,
    xi: f64,
    n: usize,
    width: f64,
    estimate: bool,
) -> QuadratureResult<T> {
    let p = (n - 1) as f64;
    let scale = xi.abs().powf(n as f64 / p);
    let w0 = scale * h.powf(-1.0 / p);
    let end = w0 + REACH;
    let g = |w: f64| f((w / scale).powf(-p)) * (p / scale * (w / scale).powf(-p - 1.0));
    let mut acc = QuadratureResult { value: T::default(), error_estimate: 0.0, evaluations: 0 };
    let mut lo = w0;
    while lo < end {
        let hi = (2.0 * lo).min(end);
        let panels = ((hi - lo) / width).ceil() as usize;
        let r = if estimate {
            inversion::composite(g, lo, hi, panels)
        } else {
            let value = inversion::composite_fast(g, lo, hi, panels);
            QuadratureResult { value, error_estimate: 0.0, evaluations: 20 * panels }
        };
        acc.value = acc.value + r.value;
        acc.error_estimate += r.error_estimate;
        acc.evaluations += r.evaluations;
        lo = hi;
    }
    acc
}

/// `P_x{X(t) ≤ y ≤ z ≤ M(t)}` from the representation
/// `Σ a_{km} ∫_0^t ∫_0^s ∂^m p(σ; x−z) I_{k0}(s−σ; z−y) (t−s)^{(m+1)/N−1} dσ ds`.
///
/// Even `N` only, `y < z`, `x < z`. Both ends of each range are treated
/// separately: the essential zeros at `σ → 0`, `s − σ → 0` and `s → 0` through
/// [`essential_quad`], the weak singularity at `s → t` by `u = (t−s)^{(m+1)/N}`.
pub fn straddle_double_integral(
    rs: &RootSystem,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    cfg: DoubleIntegralConfig,
) -> Result<QuadratureResult<f64>> {
    let n = rs.order();
    if n % 2 != 0 {
        return Err(Error::UnsupportedOrder(n));
    }
    if !(z > x && z > y) {
        return Err(Error::Ordering(format!("need x < z and y < z, got x={x}, y={y}, z={z}")));
    }
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("time must be positive, got {t}")));
    }
    let a = representation_coefficients(rs);
    let kidx = &rs.k().index;
    let nf = n as f64;
    let (d1, d2) = (x - z, z - y);
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0;
    for m in 0..rs.j().len() {
        let expo = (m as f64 + 1.0) / nf;
        let q = |u: f64| -> Complex64 {
            kidx.iter().zip(&a).map(|(&l, row)| row[m] * i_lq_fast(rs, l, 0, u, d2)).sum()
        };
        let p = |sigma: f64| kernel_derivative_fast(n, sigma, d1, m);
        // G(s) = ∫_0^s ∂^m p(σ; x−z) Q(s−σ) dσ, split at s/2
        let g = |s: f64| -> Complex64 {
            let h = 0.5 * s;
            let left = essential_quad(|sg: f64| q(s - sg) * p(sg), h, d1, n, cfg.inner_width, false);
            let right = essential_quad(|u: f64| q(u) * p(s - u), h, d2, n, cfg.inner_width, false);
            left.value + right.value
        };
        let h = 0.5 * t;
        let early = essential_quad(|s: f64| g(s) * (t - s).powf(expo - 1.0), h, d1.abs() + d2.abs(), n, cfg.outer_width, true);
        let late = inversion::composite(|u: f64| g(t - u.powf(1.0 / expo)), 0.0, h.powf(expo), 4);
        value += early.value + late.value / expo;
        err += early.error_estimate + late.error_estimate / expo;
        evals += early.evaluations + late.evaluations;
    }
    Ok(QuadratureResult { value: value.re, error_estimate: err + value.im.abs(), evaluations: evals })
}

/// Residuals of the boundary-value problem for `F(x) = F_λ(x,y,z)` (maximum case).
#[derive(Debug, Clone, Serialize)]
pub struct FResidual {
    /// `max |κ F^{(N)} − λF + 1_{x<y}|` over the grid.
    pub ode: f64,
    /// `|F^{(l)}(z^−)|`, `l = 0..#J−1`.
    pub boundary: Vec<f64>,
    /// `|F^{(l)}(y^+) − F^{(l)}(y^−)|`, `l = 0..N−1`.
    pub regularity: Vec<f64>,
    /// `|F^{(N)}(y^+) − F^{(N)}(y^−) − κ|`.
    pub jump: f64,
}

impl FResidual {
    pub fn max(&self) -> f64 {
        self.boundary
            .iter()
            .chain(&self.regularity)
            .copied()
            .fold(self.ode.max(self.jump), f64::max)
    }
}

pub fn bvp_residual_f(rs: &RootSystem, lambda: Complex64, y: f64, z: f64, xs: &[f64]) -> Result<FResidual> {
    if !(y < z) {
        return Err(Error::Ordering(format!("need y < z, got y={y}, z={z}")));
    }
    if let Some(&bad) = xs.iter().find(|&&x| !(x < z)) {
        return Err(Error::Ordering(format!("grid point {bad} not below z={z}")));
    }
    let n = rs.order() as u32;
    let w = Extremum::Max;
    let d = |x: f64, l: u32| dist_func_derivative(rs, lambda, x, y, z, w, l);
    let mut ode: f64 = 0.0;
    for &x in xs {
        let src = if x < y { 1.0 } else { 0.0 };
        ode = ode.max((rs.kappa() * d(x, n) - lambda * d(x, 0) + src).norm());
    }
    let boundary = (0..rs.j().len() as u32).map(|l| d(z, l).norm()).collect();
    // x = y takes the x ≥ y branch; the left limit uses the x < y branch at the same point
    let left = |l: u32| {
        let nf = rs.order() as f64;
        let r = root_n(lambda, rs.order());
        let one = if l == 0 { 1.0 / lambda } else { Complex64::new(0.0, 0.0) };
        let m: Complex64 = rs.j().theta.iter().map(|&t| (t * r).powu(l)).sum();
        one - m / (nf * lambda) - straddle_derivative(rs, lambda, y, y, z, w, l)
    };
    let regularity = (0..n).map(|l| (d(y, l) - left(l)).norm()).collect();
    let jump = (d(y, n) - left(n) - rs.kappa()).norm();
    Ok(FResidual { ode, boundary, regularity, jump })
}

/// `Ψ(λ; x−y)`: the λ-transform of `P_x{X(t) ≤ y}`, for the relation `F + F̃ = Ψ`.
pub fn marginal_lt(rs: &RootSystem, lambda: Complex64, x: f64, y: f64) -> Complex64 {
    potential_psi(rs, lambda, x - y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_root_system, ParamSet};
    use std::f64::consts::{PI, SQRT_2};

    fn rs(n: usize, kappa: i32) -> RootSystem {
        let p = if n % 2 == 0 { ParamSet::even(n) } else { ParamSet::new(n, kappa) };
        build_root_system(p.unwrap())
    }

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn brownian_phi_psi() {
        let r = rs(2, -1);
        for (l, xi) in [(1.0, -0.3), (2.5, -1.0)] {
            let s = f64::sqrt(l);
            assert!((phi_lambda(&r, c(l), xi) - s * (s * xi).exp()).norm() < 1e-14);
            assert!((psi_lambda(&r, c(l), -xi) - s * (s * xi).exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn quartic_phi() {
        let r = rs(4, -1);
        for (l, xi) in [(1.0, -0.4), (3.0, -2.0)] {
            let s = f64::powf(l, 0.25) / SQRT_2;
            let want = -SQRT_2 * f64::powf(l, 0.25) * (s * xi).exp() * (s * xi).sin();
            assert!((phi_lambda(&r, c(l), xi) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn maximum_law_has_unit_mass() {
        for n in [2, 4, 6] {
            let r = rs(n, -1);
            let v = inversion::adaptive(|u: f64| phi_lambda(&r, c(1.3), -u), 0.0, 80.0, 1e-12).unwrap();
            assert!((v.value - 1.0).norm() < 1e-9, "N={n}: {}", v.value);
        }
    }

    #[test]
    fn transform_reductions() {
        for (n, kappa) in [(2, -1), (3, 1), (3, -1), (4, -1), (5, 1)] {
            let r = rs(n, kappa);
            let l = c(1.4);
            for which in [Extremum::Max, Extremum::Min] {
                let q = LftQuery::new(l, 0.6, 0.0, 0.3).unwrap();
                let want = Complex64::new(0.0, 0.18).exp() / (l - r.kappa() * Complex64::new(0.0, 0.6).powu(n as u32));
                assert!((lft_extrema(&r, &q, which) - want).norm() < 1e-13);
                let q0 = LftQuery::new(l, 0.0, 0.0, 0.3).unwrap();
                assert!((lft_extrema(&r, &q0, which) - 1.0 / l).norm() < 1e-13);
            }
        }
        assert!(LftQuery::new(c(1.0), 0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn transform_from_joint_density() {
        // ∫∫ e^{iμy − νz} (1/λ) φ(x−z) ψ(z−y) dy dz
        let r = rs(4, -1);
        let (l, mu, nu, x) = (1.2, 0.7, 0.3, 0.25);
        let inner = |z: f64| -> Complex64 {
            let tail: Complex64 = -root_n(c(l), 4)
                * r.k()
                    .theta
                    .iter()
                    .zip(&r.k().coef)
                    .map(|(&t, &b)| t * b / (Complex64::new(0.0, mu) - t * root_n(c(l), 4)))
                    .sum::<Complex64>();
            phi_lambda(&r, c(l), x - z) * tail * Complex64::new(-nu * z, mu * z).exp() / l
        };
        let v = inversion::adaptive(inner, x, x + 80.0, 1e-12).unwrap().value;
        let q = LftQuery::new(c(l), mu, nu, x).unwrap();
        assert!((v - lft_extrema(&r, &q, Extremum::Max)).norm() < 1e-9);
        // minimum: ∫∫ e^{iμy + νz} (1/λ) ψ(x−z) φ(z−y) dy dz over z ≤ x, y ≥ z
        let inner_min = |z: f64| -> Complex64 {
            let rr = root_n(c(l), 4);
            let tail: Complex64 = rr * r
                .j()
                .theta
                .iter()
                .zip(&r.j().coef)
                .map(|(&t, &a)| -t * a / (Complex64::new(0.0, mu) - t * rr))
                .sum::<Complex64>();
            psi_lambda(&r, c(l), x - z) * tail * Complex64::new(nu * z, mu * z).exp() / l
        };
        let v = inversion::adaptive(inner_min, x - 80.0, x, 1e-12).unwrap().value;
        assert!((v - lft_extrema(&r, &q, Extremum::Min)).norm() < 1e-9);
    }

    #[test]
    fn brownian_joint_density() {
        let r = rs(2, -1);
        let q = ExtremaQuery::new(c(2.0), 0.1, -0.4, 0.9, Extremum::Max).unwrap();
        let want = (f64::sqrt(2.0) * (0.1 - 0.4 - 1.8)).exp();
        assert!((joint_density_lt(&r, &q) - want).norm() < 1e-14);
        assert!(matches!(
            ExtremaQuery::new(c(1.0), 0.0, 1.0, 0.5, Extremum::Max),
            Err(Error::Ordering(_))
        ));
        assert!(ExtremaQuery::new(c(1.0), 0.0, 1.0, -0.5, Extremum::Min).is_ok());
    }

    #[test]
    fn marginals_of_joint_density() {
        let r = rs(4, -1);
        let (l, x, y, z) = (c(1.1), 0.2, -0.3, 0.8);
        let over_y = inversion::adaptive(
            |u: f64| joint_density_lt(&r, &ExtremaQuery::new(l, x, z - u, z, Extremum::Max).unwrap()),
            0.0,
            80.0,
            1e-12,
        )
        .unwrap()
        .value;
        assert!((over_y - phi_lambda(&r, l, x - z) / l).norm() < 1e-10);
        let over_z = inversion::adaptive(
            |u: f64| joint_density_lt(&r, &ExtremaQuery::new(l, x, y, x + u, Extremum::Max).unwrap()),
            0.0,
            80.0,
            1e-12,
        )
        .unwrap()
        .value;
        assert!((over_z - crate::kernel::potential_phi(&r, l, x - y)).norm() < 1e-10);
    }

    #[test]
    fn brownian_distribution_function() {
        let r = rs(2, -1);
        for (l, x, y, z) in [(1.0, 0.2, -0.5, 1.0), (2.0, 0.0, 0.0, 0.3), (0.7, -1.0, 0.5, 0.6)] {
            let s = f64::sqrt(l);
            let want = if y <= x {
                ((-s * (x - y)).exp() - (s * (x + y - 2.0 * z)).exp()) / (2.0 * l)
            } else {
                1.0 / l - ((s * (x - y)).exp() + (s * (x + y - 2.0 * z)).exp()) / (2.0 * l)
            };
            let v = dist_func_lt(&r, c(l), x, y, z, Extremum::Max).unwrap();
            assert!((v - want).norm() < 1e-14, "{v} vs {want}");
        }
        assert!(dist_func_lt(&r, c(1.0), 1.0, 0.0, 0.5, Extremum::Max).is_err());
    }

    #[test]
    fn cubic_distribution_functions() {
        let s3 = 3f64.sqrt() / 2.0;
        let plus = rs(3, 1);
        let minus = rs(3, -1);
        for (l, x, y, z) in [(1.0, 0.2, -0.5, 1.0), (2.3, -0.4, 0.1, 0.7), (0.6, 0.0, 0.0, 0.2)] {
            let r = f64::powf(l, 1.0 / 3.0);
            let want = if y <= x {
                2.0 / (3.0 * l)
                    * ((-r * (x - y) / 2.0).exp() * (s3 * r * (x - y)).cos()
                        - (r * (x + y / 2.0 - 1.5 * z)).exp() * (s3 * r * (z - y)).cos())
            } else {
                1.0 / l
                    - ((r * (x - y)).exp() + 2.0 * (r * (x + y / 2.0 - 1.5 * z)).exp() * (s3 * r * (z - y)).cos())
                        / (3.0 * l)
            };
            let v = dist_func_lt(&plus, c(l), x, y, z, Extremum::Max).unwrap();
            assert!((v - want).norm() < 1e-13, "κ=+1: {v} vs {want}");
            // κ = −1; the x ≤ y branch is written with the exponent and factor 2
            // that make it continuous with the y ≤ x branch at x = y
            let e = (r * (x / 2.0 + y - 1.5 * z)).exp() * (s3 * r * (x - z) + PI / 3.0).cos();
            let want = if y <= x {
                ((-r * (x - y)).exp() - 2.0 * e) / (3.0 * l)
            } else {
                1.0 / l - (2.0 * (r * (x - y) / 2.0).exp() * (s3 * r * (x - y)).cos() + 2.0 * e) / (3.0 * l)
            };
            let v = dist_func_lt(&minus, c(l), x, y, z, Extremum::Max).unwrap();
            assert!((v - want).norm() < 1e-13, "κ=−1: {v} vs {want}");
        }
    }

    #[test]
    fn quartic_distribution_function() {
        let r = rs(4, -1);
        for (l, x, y, z) in [(1.0, 0.2, -0.5, 1.0), (2.3, -0.4, 0.1, 0.7), (0.6, 0.0, 0.0, 0.2)] {
            let s = f64::powf(l, 0.25) / SQRT_2;
            let (u, v) = (s * (x - y), s * (x + y - 2.0 * z));
            let tail = v.exp() * (u.cos() - u.sin() - v.sin());
            let want = if y <= x {
                ((-u).exp() * u.cos() - tail) / (2.0 * l)
            } else {
                1.0 / l - (u.exp() * u.cos() + tail) / (2.0 * l)
            };
            let got = dist_func_lt(&r, c(l), x, y, z, Extremum::Max).unwrap();
            assert!((got - want).norm() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn max_and_min_mirror() {
        let r = rs(4, -1);
        let l = Complex64::new(1.3, 0.4);
        for (x, y, z) in [(0.1, -0.6, 0.9), (-0.2, 0.3, 0.5)] {
            let a = dist_func_lt(&r, l, x, y, z, Extremum::Max).unwrap();
            let b = dist_func_lt(&r, l, -x, -y, -z, Extremum::Min).unwrap();
            assert!((a - b).norm() < 1e-13);
            let a = straddle_lt(&r, l, x, y, z, Extremum::Max).unwrap();
            let b = straddle_lt(&r, l, -x, -y, -z, Extremum::Min).unwrap();
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn straddle_vanishes_far_level() {
        let r = rs(4, -1);
        let f = dist_func_lt(&r, c(1.0), 0.0, -0.5, 60.0, Extremum::Max).unwrap();
        assert!((f - marginal_lt(&r, c(1.0), 0.0, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn clamps_terminal_level() {
        let r = rs(4, -1);
        let a = dist_func_lt(&r, c(1.0), 0.0, 2.0, 1.0, Extremum::Max).unwrap();
        let b = dist_func_lt(&r, c(1.0), 0.0, 1.0, 1.0, Extremum::Max).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quartic_representation_coefficients() {
        let r = rs(4, -1);
        let a = representation_coefficients(&r);
        let g4 = gamma(0.25);
        let want = [
            [c(1.0 / (SQRT_2 * g4)), Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), -PI / 4.0)],
            [c(1.0 / (SQRT_2 * g4)), Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), PI / 4.0)],
        ];
        for k in 0..2 {
            for m in 0..2 {
                assert!((a[k][m] - want[k][m]).norm() < 1e-14, "a[{k}][{m}] = {}", a[k][m]);
            }
        }
        let b = representation_coefficients(&rs(2, -1));
        assert!((b[0][0] - 1.0 / PI.sqrt()).norm() < 1e-14);
        let t = representation_coefficients(&rs(3, 1));
        for row in &t {
            assert!((row[0] - 1.0 / gamma(1.0 / 3.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn brownian_time_domain() {
        let r = rs(2, -1);
        let cfg = TalbotConfig::default();
        for (t, x, y, z) in [(1.0, 0.0, -0.5, 0.5), (0.5, 0.2, 0.1, 0.4)] {
            let v = dist_func_time(&r, t, x, y, z, Extremum::Max, cfg).unwrap();
            let want = 0.5 * statrs::function::erf::erfc((2.0 * z - x - y) / (2.0 * f64::sqrt(t)));
            assert!((v.value - want).abs() < 1e-10, "{} vs {want}", v.value);
        }
    }

    #[test]
    fn brownian_double_integral() {
        let r = rs(2, -1);
        let (t, x, y, z) = (1.0, 0.0, -0.5, 0.5);
        let v = straddle_double_integral(&r, t, x, y, z, DoubleIntegralConfig::default()).unwrap();
        let want = 0.5 * statrs::function::erf::erfc((2.0 * z - x - y) / 2.0);
        assert!((v.value - want).abs() < 1e-6, "{} vs {want}", v.value);
    }

    #[test]
    fn boundary_value_problem() {
        let r = rs(4, -1);
        let xs: Vec<f64> = (0..30).map(|i| -3.0 + 0.13 * i as f64).collect();
        let res = bvp_residual_f(&r, c(1.0), -0.5, 0.9, &xs).unwrap();
        assert!(res.max() < 1e-12, "{res:?}");
        assert!(bvp_residual_f(&r, c(1.0), 1.0, 0.9, &xs).is_err());
    }
}
