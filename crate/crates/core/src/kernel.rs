//! The fundamental solution `p(t;ξ)`, its λ-potentials `Φ` and `Ψ`, and moments.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{ParamSet, RootSystem};
use crate::error::{Error, Result};
use crate::inversion::{self, decaying_panels, Cutoff, QuadratureResult};

/// A point `(t, ξ)` at which to evaluate the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuery {
    pub params: ParamSet,
    pub t: f64,
    pub xi: f64,
}

impl KernelQuery {
    pub fn new(params: ParamSet, t: f64, xi: f64) -> Self {
        KernelQuery { params, t, xi }
    }
}

/// A point `(λ, ξ)` at which to evaluate the potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialQuery {
    pub lambda: Complex64,
    pub xi: f64,
}

/// Principal `N`-th root, argument in `(−π/N, π/N]`.
pub fn root_n(lambda: Complex64, n: usize) -> Complex64 {
    let (r, a) = lambda.to_polar();
    Complex64::from_polar(r.powf(1.0 / n as f64), a / n as f64)
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("time must be positive, got {t}")))
    }
}

/// `p(t;ξ)` by quadrature. Even `N` and `N = 3`.
pub fn heat_kernel(q: &KernelQuery) -> Result<f64> {
    Ok(heat_kernel_detailed(q)?.value)
}

/// `p(t;ξ)` with its quadrature error estimate.
pub fn heat_kernel_detailed(q: &KernelQuery) -> Result<QuadratureResult<f64>> {
    check_time(q.t)?;
    if q.params.is_even() {
        kernel_derivative_detailed(q.params, q.t, q.xi, 0)
    } else if q.params.order() == 3 {
        cubic_kernel(q.params.kappa_f64(), q.t, q.xi)
    } else {
        Err(Error::UnsupportedOrder(q.params.order()))
    }
}

/// `∂^m p/∂ξ^m (t;ξ)` for even `N`:
/// `(1/π)∫_0^∞ u^m e^{−tu^N} cos(ξu + mπ/2) du`.
pub fn kernel_derivative(params: ParamSet, t: f64, xi: f64, m: usize) -> Result<f64> {
    Ok(kernel_derivative_detailed(params, t, xi, m)?.value)
}

fn kernel_derivative_detailed(
    params: ParamSet,
    t: f64,
    xi: f64,
    m: usize,
) -> Result<QuadratureResult<f64>> {
    check_time(t)?;
    if !params.is_even() {
        return Err(Error::UnsupportedOrder(params.order()));
    }
    let n = params.order() as i32;
    let phase = m as f64 * PI / 2.0;
    let cut = Cutoff::new(t, n as usize).with_poly(m as f64);
    let r = inversion::decaying_quad(
        |u: f64| u.powi(m as i32) * (-t * u.powi(n)).exp() * (xi * u + phase).cos(),
        cut,
        xi.abs(),
    )?;
    Ok(QuadratureResult {
        value: r.value / PI,
        error_estimate: r.error_estimate / PI,
        evaluations: r.evaluations,
    })
}

/// Same as [`kernel_derivative`] without the error estimate; used in nested loops.
pub fn kernel_derivative_fast(n: usize, t: f64, xi: f64, m: usize) -> f64 {
    let phase = m as f64 * PI / 2.0;
    let cut = Cutoff::new(t, n).with_poly(m as f64);
    let (u, panels) = decaying_panels(cut, xi.abs());
    let ni = n as i32;
    inversion::composite_fast(
        |v: f64| v.powi(m as i32) * (-t * v.powi(ni)).exp() * (xi * v + phase).cos(),
        0.0,
        u,
        panels,
    ) / PI
}

/// `N = 3`: both halves of the Fourier line rotated by `κπ/6`, giving
/// `p = (1/π) Re[ω ∫_0^∞ e^{−iξωr − tr³} dr]`, `ω = e^{iκπ/6}`.
fn cubic_kernel(kappa: f64, t: f64, xi: f64) -> Result<QuadratureResult<f64>> {
    let w = Complex64::from_polar(1.0, kappa * PI / 6.0);
    let a = -Complex64::i() * xi * w;
    let cut = Cutoff::new(t, 3).with_growth(a.re);
    let r = inversion::decaying_quad(|r: f64| (a * r - t * r * r * r).exp(), cut, a.im.abs())?;
    Ok(QuadratureResult {
        value: (w * r.value).re / PI,
        error_estimate: r.error_estimate / PI,
        evaluations: r.evaluations,
    })
}

/// Half-width beyond which `|p(t;ξ)|` stays below `1e−14·p(t;0)`, found by scanning.
fn support_radius(params: ParamSet, t: f64) -> Result<f64> {
    let s = t.powf(1.0 / params.order() as f64);
    let floor = 1e-14 * heat_kernel(&KernelQuery::new(params, t, 0.0))?;
    let mut l = 4.0 * s;
    loop {
        let mut peak: f64 = 0.0;
        for i in 0..=64 {
            let xi = l + l * i as f64 / 64.0;
            peak = peak.max(heat_kernel(&KernelQuery::new(params, t, xi))?.abs());
        }
        if peak < floor {
            return Ok(l);
        }
        l *= 1.5;
        if l > 1e4 * s {
            return Err(Error::Quadrature { estimate: peak });
        }
    }
}

/// `ρ = ∫|p(1;ξ)|dξ` for even `N`.
pub fn rho(params: ParamSet) -> Result<f64> {
    if !params.is_even() {
        return Err(Error::NotAbsolutelyConvergent(params.order()));
    }
    let l = support_radius(params, 1.0)?;
    let r = inversion::adaptive(
        |xi: f64| heat_kernel(&KernelQuery::new(params, 1.0, xi)).map(f64::abs).unwrap_or(f64::NAN),
        0.0,
        l,
        1e-11,
    )?;
    Ok(2.0 * r.value)
}

/// `E[X(t)^p]` from the moment lemma: `1`, `0` for `1 ≤ p ≤ N−1`, `κ_N N! t` for `p = N`.
pub fn moment(params: ParamSet, t: f64, p: usize) -> Result<f64> {
    check_time(t)?;
    let n = params.order();
    if p > n {
        return Err(Error::OutOfRange(format!("moment order {p} exceeds N={n}")));
    }
    Ok(match p {
        0 => 1.0,
        _ if p < n => 0.0,
        _ => params.kappa_f64() * (1..=n).map(|k| k as f64).product::<f64>() * t,
    })
}

/// `∫ ξ^p p(t;ξ) dξ` by composite quadrature over the numerical support.
pub fn moment_quadrature(params: ParamSet, t: f64, p: usize) -> Result<QuadratureResult<f64>> {
    check_time(t)?;
    if !params.is_even() {
        return Err(Error::NotAbsolutelyConvergent(params.order()));
    }
    let l = support_radius(params, t)?;
    let s = t.powf(1.0 / params.order() as f64);
    let panels = ((2.0 * l / (0.25 * s)).ceil() as usize).max(16);
    let mut failure = None;
    let r = inversion::composite(
        |xi: f64| match heat_kernel(&KernelQuery::new(params, t, xi)) {
            Ok(v) => xi.powi(p as i32) * v,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        -l,
        l,
        panels,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// λ-potential `Φ(λ;ξ) = ∫_0^∞ e^{−λt} p(t;ξ) dt`.
pub fn potential_phi(rs: &RootSystem, lambda: Complex64, xi: f64) -> Complex64 {
    let nf = rs.order() as f64;
    let r = root_n(lambda, rs.order());
    let pre = r / (nf * lambda);
    if xi >= 0.0 {
        let h = rs.k();
        -pre * h.theta.iter().map(|&t| t * (t * r * xi).exp()).sum::<Complex64>()
    } else {
        let h = rs.j();
        pre * h.theta.iter().map(|&t| t * (t * r * xi).exp()).sum::<Complex64>()
    }
}

/// `Ψ(λ;ξ) = ∫_0^∞ e^{−λt} P{X(t) ≤ −ξ} dt`.
pub fn potential_psi(rs: &RootSystem, lambda: Complex64, xi: f64) -> Complex64 {
    let nf = rs.order() as f64;
    let r = root_n(lambda, rs.order());
    if xi >= 0.0 {
        rs.k().theta.iter().map(|&t| (t * r * xi).exp()).sum::<Complex64>() / (nf * lambda)
    } else {
        let s: Complex64 = rs.j().theta.iter().map(|&t| (t * r * xi).exp()).sum();
        (1.0 - s / nf) / lambda
    }
}

/// `Φ` for a [`PotentialQuery`].
pub fn potential_phi_at(rs: &RootSystem, q: PotentialQuery) -> Complex64 {
    potential_phi(rs, q.lambda, q.xi)
}

/// `Ψ` for a [`PotentialQuery`].
pub fn potential_psi_at(rs: &RootSystem, q: PotentialQuery) -> Complex64 {
    potential_psi(rs, q.lambda, q.xi)
}
