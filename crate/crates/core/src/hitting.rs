//! First hitting times `τ_a^±`, the hitting place `X(τ_a^±)` and its multipole
//! (Dirac-derivative) structure.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{Half, HalfSystem, RootSystem};
use crate::error::{Error, Result};
use crate::inversion::{self, decaying_panels, Cutoff, QuadratureResult};
use crate::kernel::root_n;

/// `Up` is `τ_a^+ = inf{t: X(t) > a}` from `x ≤ a`; `Down` is `τ_a^−` from `x ≥ a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HittingQuery {
    pub a: f64,
    pub x: f64,
    pub direction: Direction,
}

impl HittingQuery {
    pub fn new(a: f64, x: f64, direction: Direction) -> Result<Self> {
        let ok = match direction {
            Direction::Up => x <= a,
            Direction::Down => x >= a,
        };
        if !ok {
            return Err(Error::Side(format!("x={x}, a={a}, direction {direction:?}")));
        }
        Ok(HittingQuery { a, x, direction })
    }

    pub fn up(a: f64, x: f64) -> Result<Self> {
        Self::new(a, x, Direction::Up)
    }

    pub fn down(a: f64, x: f64) -> Result<Self> {
        Self::new(a, x, Direction::Down)
    }

    /// The root half driving this direction.
    pub fn half(&self) -> Half {
        match self.direction {
            Direction::Up => Half::J,
            Direction::Down => Half::K,
        }
    }

    /// `ξ = x − a`.
    pub fn offset(&self) -> f64 {
        self.x - self.a
    }
}

/// `E_x[e^{−λτ + iμX(τ)}]`.
pub fn lft_hitting(rs: &RootSystem, q: &HittingQuery, lambda: Complex64, mu: f64) -> Complex64 {
    lft_hitting_derivative(rs, q, lambda, mu, 0)
}

/// `∂^l/∂x^l` of [`lft_hitting`].
pub fn lft_hitting_derivative(
    rs: &RootSystem,
    q: &HittingQuery,
    lambda: Complex64,
    mu: f64,
    l: usize,
) -> Complex64 {
    let h = rs.half(q.half());
    let r = root_n(lambda, rs.order());
    let imu = Complex64::new(0.0, mu);
    let xi = q.offset();
    let mut s = Complex64::new(0.0, 0.0);
    for a in 0..h.len() {
        let prod: Complex64 = (0..h.len())
            .filter(|&b| b != a)
            .map(|b| 1.0 - imu * h.theta[b].conj() / r)
            .product();
        let rate = h.theta[a] * r;
        s += h.coef[a] * prod * rate.powu(l as u32) * (rate * xi).exp();
    }
    s * (imu * q.a).exp()
}

/// Coefficients of `δ_a^{(q)}` in the Laplace transform of the hitting place:
/// `λ^{−q/N} Σ conj(c_{jq}) A_j e^{θ_j λ^{1/N}(x−a)}` (K mirror for `Down`).
pub fn multipole_lt(rs: &RootSystem, q: &HittingQuery, lambda: Complex64) -> Vec<(usize, Complex64)> {
    let h = rs.half(q.half());
    let n = rs.order();
    let r = root_n(lambda, n);
    let xi = q.offset();
    (0..h.len())
        .map(|order| {
            let s: Complex64 = (0..h.len())
                .map(|a| h.sym[a][order].conj() * h.coef[a] * (h.theta[a] * r * xi).exp())
                .sum();
            (order, s / r.powu(order as u32))
        })
        .collect()
}

/// Fourier reassembly `Σ_q coef_q (−iμ)^q e^{iμa}`.
pub fn reassemble(coefficients: &[(usize, Complex64)], a: f64, mu: f64) -> Complex64 {
    let m = Complex64::new(0.0, -mu);
    coefficients.iter().map(|&(q, c)| c * m.powu(q as u32)).sum::<Complex64>()
        * Complex64::new(0.0, mu * a).exp()
}

/// Integrand pieces of `I_{lq}`: rotated exponents and their weights.
struct Rotated {
    c: [Complex64; 2],
    w: [Complex64; 2],
    power: i32,
    pre: Complex64,
}

impl Rotated {
    fn new(n: usize, theta: Complex64, q: i32, xi: f64) -> Self {
        let nf = n as f64;
        let e = Complex64::from_polar(1.0, PI / nf);
        let wq = Complex64::from_polar(1.0, -PI * q as f64 / nf);
        Rotated {
            c: [theta * e * xi, theta * e.conj() * xi],
            w: [wq, -wq.conj()],
            power: n as i32 - q - 1,
            pre: Complex64::new(0.0, nf / (2.0 * PI)),
        }
    }

    fn growth(&self) -> f64 {
        self.c[0].re.max(self.c[1].re).max(0.0)
    }

    fn frequency(&self) -> f64 {
        self.c[0].im.abs().max(self.c[1].im.abs())
    }
}

/// `I_{lq}(t;ξ)`, the inverse Laplace transform of `λ^{−q/N} e^{θ_l λ^{1/N} ξ}`,
/// from the contour rotated onto `e^{−tλ^N}` decay. Requires `Re(θ_l ξ) < 0`.
pub fn i_lq(rs: &RootSystem, l: usize, q: i32, t: f64, xi: f64) -> Result<QuadratureResult<Complex64>> {
    let n = rs.order();
    if l >= n {
        return Err(Error::OutOfRange(format!("root index {l} with N={n}")));
    }
    if !((rs.theta()[l] * xi).re < 0.0) {
        return Err(Error::WrongHalfPlane { l });
    }
    if q < -1 || q >= n as i32 {
        return Err(Error::OutOfRange(format!("order q={q} with N={n}")));
    }
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("time must be positive, got {t}")));
    }
    let rot = Rotated::new(n, rs.theta()[l], q, xi);
    let ni = n as i32;
    let cut = Cutoff::new(t, n).with_growth(rot.growth()).with_poly(rot.power as f64);
    let r = inversion::decaying_quad(
        |v: f64| {
            let base = v.powi(rot.power) * (-t * v.powi(ni)).exp();
            (rot.w[0] * (rot.c[0] * v).exp() + rot.w[1] * (rot.c[1] * v).exp()) * base
        },
        cut,
        rot.frequency(),
    )?;
    Ok(QuadratureResult {
        value: rot.pre * r.value,
        error_estimate: r.error_estimate * rot.pre.norm(),
        evaluations: r.evaluations,
    })
}

/// [`i_lq`] without checks or error estimate, for nested quadrature.
pub fn i_lq_fast(rs: &RootSystem, l: usize, q: i32, t: f64, xi: f64) -> Complex64 {
    let n = rs.order();
    let rot = Rotated::new(n, rs.theta()[l], q, xi);
    let ni = n as i32;
    let cut = Cutoff::new(t, n).with_growth(rot.growth()).with_poly(rot.power as f64);
    let (u, panels) = decaying_panels(cut, rot.frequency());
    rot.pre
        * inversion::composite_fast(
            |v: f64| {
                let base = v.powi(rot.power) * (-t * v.powi(ni)).exp();
                (rot.w[0] * (rot.c[0] * v).exp() + rot.w[1] * (rot.c[1] * v).exp()) * base
            },
            0.0,
            u,
            panels,
        )
}

/// Time profile `J_q(t;ξ)` (or `K_q`) in its real form
/// `−(N/π) Im[e^{−iπq/N} ∫ (Σ conj(c_{jq})A_j e^{θ_j e^{iπ/N}ξλ}) λ^{N−q−1} e^{−tλ^N} dλ]`.
pub fn profile_value(rs: &RootSystem, half: Half, q: usize, t: f64, xi: f64) -> Result<QuadratureResult<f64>> {
    let h = rs.half(half);
    let n = rs.order();
    if q >= h.len() {
        return Err(Error::OutOfRange(format!("multipole order {q} with {} terms", h.len())));
    }
    let wrong = match half {
        Half::J => xi >= 0.0,
        Half::K => xi <= 0.0,
    };
    if wrong {
        return Err(Error::Side(format!("profile offset xi={xi} for half {half:?}")));
    }
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("time must be positive, got {t}")));
    }
    let nf = n as f64;
    let e = Complex64::from_polar(1.0, PI / nf);
    let rates: Vec<Complex64> = h.theta.iter().map(|&th| th * e * xi).collect();
    let weights: Vec<Complex64> = (0..h.len()).map(|a| h.sym[a][q].conj() * h.coef[a]).collect();
    let growth = rates.iter().map(|c| c.re).fold(0.0, f64::max);
    let freq = rates.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let power = (n - q - 1) as i32;
    let ni = n as i32;
    let cut = Cutoff::new(t, n).with_growth(growth).with_poly(power as f64);
    let r = inversion::decaying_quad(
        |v: f64| {
            let s: Complex64 = rates.iter().zip(&weights).map(|(&c, &w)| w * (c * v).exp()).sum();
            s * (v.powi(power) * (-t * v.powi(ni)).exp())
        },
        cut,
        freq,
    )?;
    let phase = Complex64::from_polar(1.0, -PI * q as f64 / nf);
    Ok(QuadratureResult {
        value: -(nf / PI) * (phase * r.value).im,
        error_estimate: r.error_estimate * nf / PI,
        evaluations: r.evaluations,
    })
}

/// `Σ conj(c_{jq}) A_j I_{jq}(t;ξ)` summed term by term; its imaginary part
/// vanishes up to rounding.
pub fn profile_complex(rs: &RootSystem, half: Half, q: usize, t: f64, xi: f64) -> Result<Complex64> {
    let h: &HalfSystem = rs.half(half);
    let mut s = Complex64::new(0.0, 0.0);
    for a in 0..h.len() {
        let i = i_lq(rs, h.index[a], q as i32, t, xi)?;
        s += h.sym[a][q].conj() * h.coef[a] * i.value;
    }
    Ok(s)
}

/// A time profile `t ↦ J_q(t;ξ)` bound to its root system.
#[derive(Debug, Clone)]
pub struct TimeProfile {
    rs: RootSystem,
    half: Half,
    order: usize,
    xi: f64,
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(profile_value(&self.rs, self.half, self.order, t, self.xi)?.value)
    }

    pub fn offset(&self) -> f64 {
        self.xi
    }
}

#[derive(Debug, Clone)]
pub enum Profile {
    Weight(f64),
    Time(TimeProfile),
}

#[derive(Debug, Clone)]
pub struct MultipoleTerm {
    pub order: usize,
    pub profile: Profile,
}

/// `Σ_q f_q δ_a^{(q)}` with either scalar weights or time profiles.
#[derive(Debug, Clone)]
pub struct MultipoleDensity {
    pub a: f64,
    pub terms: Vec<MultipoleTerm>,
}

impl MultipoleDensity {
    /// Scalar weights, if this is a weight-mode density.
    pub fn weights(&self) -> Option<Vec<f64>> {
        self.terms
            .iter()
            .map(|t| match t.profile {
                Profile::Weight(w) => Some(w),
                Profile::Time(_) => None,
            })
            .collect()
    }

    /// Profile values at time `t` (weights are returned unchanged).
    pub fn evaluate_at(&self, t: f64) -> Result<Vec<(usize, f64)>> {
        self.terms
            .iter()
            .map(|term| {
                let v = match &term.profile {
                    Profile::Weight(w) => *w,
                    Profile::Time(p) => p.value(t)?,
                };
                Ok((term.order, v))
            })
            .collect()
    }
}

/// Joint law of `(τ, X(τ))` as time profiles `J_q` (Up) or `K_q` (Down).
pub fn hitting_profiles(rs: &RootSystem, q: &HittingQuery) -> MultipoleDensity {
    let h = rs.half(q.half());
    MultipoleDensity {
        a: q.a,
        terms: (0..h.len())
            .map(|order| MultipoleTerm {
                order,
                profile: Profile::Time(TimeProfile {
                    rs: rs.clone(),
                    half: q.half(),
                    order,
                    xi: q.offset(),
                }),
            })
            .collect(),
    }
}

/// Law of `X(τ)`: weights `(−1)^q (x−a)^q / q!`.
pub fn hitting_place_weights(rs: &RootSystem, q: &HittingQuery) -> MultipoleDensity {
    let m = rs.half(q.half()).len();
    let xi = q.offset();
    let mut w = 1.0;
    let mut terms = Vec::with_capacity(m);
    for order in 0..m {
        if order > 0 {
            w *= -xi / order as f64;
        }
        terms.push(MultipoleTerm { order, profile: Profile::Weight(w) });
    }
    MultipoleDensity { a: q.a, terms }
}

/// `E_x[e^{iμX(τ)}] = e^{iμa} Σ_q (x−a)^q (iμ)^q / q!`.
pub fn ft_hitting_place(rs: &RootSystem, q: &HittingQuery, mu: f64) -> Complex64 {
    let m = rs.half(q.half()).len();
    let z = Complex64::new(0.0, mu * q.offset());
    let mut term = Complex64::new(1.0, 0.0);
    let mut s = term;
    for order in 1..m {
        term *= z / order as f64;
        s += term;
    }
    s * Complex64::new(0.0, mu * q.a).exp()
}

/// `lim_{λ→0+}` of [`lft_hitting`] by polynomial extrapolation in `s = λ^{1/N}`
/// from `λ_i = λ0·i^N`, `i = 1..=5` (the transform is analytic in `s`).
pub fn lft_hitting_limit(rs: &RootSystem, q: &HittingQuery, mu: f64, lambda0: f64) -> Complex64 {
    let n = rs.order();
    let s0 = lambda0.powf(1.0 / n as f64);
    let pts: Vec<(f64, Complex64)> = (1..=5)
        .map(|i| {
            let s = s0 * i as f64;
            (s, lft_hitting(rs, q, Complex64::new(s.powi(n as i32), 0.0), mu))
        })
        .collect();
    neville_at_zero(&pts)
}

fn neville_at_zero(pts: &[(f64, Complex64)]) -> Complex64 {
    let mut p: Vec<Complex64> = pts.iter().map(|v| v.1).collect();
    let m = p.len();
    for k in 1..m {
        for i in 0..m - k {
            let (xi, xk) = (pts[i].0, pts[i + k].0);
            p[i] = (p[i] * xk - p[i + 1] * xi) / (xk - xi);
        }
    }
    p[0]
}

/// Residual between two evaluations of `E_x[∫_τ^∞ e^{−λt} e^{iμX(t)} dt]`, `τ = τ_a^+`:
/// the joint law of `(X(t), M(t))` (total resolvent minus the part with `M(t) ≤ a`)
/// against the strong-Markov expansion `Σ_q coef_q(λ) (−1)^q ∂_z^q[e^{iμz}/(λ − κ(iμ)^N)]_{z=a}`.
pub fn strong_markov_transform_check(rs: &RootSystem, lambda: Complex64, mu: f64, a: f64, x: f64) -> Result<f64> {
    let q = HittingQuery::up(a, x)?;
    let (lhs, rhs) = strong_markov_sides(rs, &q, lambda, mu);
    Ok((lhs - rhs).norm())
}

/// Both sides of [`strong_markov_transform_check`].
pub fn strong_markov_sides(rs: &RootSystem, q: &HittingQuery, lambda: Complex64, mu: f64) -> (Complex64, Complex64) {
    let n = rs.order();
    let r = root_n(lambda, n);
    let imu = Complex64::new(0.0, mu);
    let resolvent = 1.0 / (lambda - rs.kappa() * imu.powu(n as u32));
    let (x, a) = (q.x, q.a);
    // ∫_{-∞}^z e^{iμy} ψ(z−y) dy = e^{iμz} · tail
    let tail: Complex64 = -r * rs
        .k()
        .theta
        .iter()
        .zip(&rs.k().coef)
        .map(|(&t, &b)| t * b / (imu - t * r))
        .sum::<Complex64>();
    // ∫_x^a φ(x−z) e^{iμz} dz
    let body: Complex64 = r * rs
        .j()
        .theta
        .iter()
        .zip(&rs.j().coef)
        .map(|(&t, &c)| {
            let k = imu - t * r;
            t * c * (t * r * x).exp() * ((k * a).exp() - (k * x).exp()) / k
        })
        .sum::<Complex64>();
    let killed = body * tail / lambda;
    let lhs = (imu * x).exp() * resolvent - killed;
    let rhs = reassemble(&multipole_lt(rs, q, lambda), a, mu) * resolvent;
    (lhs, rhs)
}

/// Residuals of the boundary-value problem for `U(x) = E_x[e^{−λτ_a^+ + iμX(τ_a^+)}]`.
#[derive(Debug, Clone, Serialize)]
pub struct UResidual {
    /// `max |κ U^{(N)} − λU|` over the grid.
    pub ode: f64,
    /// `|U^{(l)}(a^−) − (iμ)^l e^{iμa}|`, `l = 0..#J−1`.
    pub boundary: Vec<f64>,
}

impl UResidual {
    pub fn max(&self) -> f64 {
        self.boundary.iter().copied().fold(self.ode, f64::max)
    }
}

pub fn bvp_residual_u(rs: &RootSystem, lambda: Complex64, mu: f64, a: f64, xs: &[f64]) -> Result<UResidual> {
    let n = rs.order();
    let mut ode: f64 = 0.0;
    for &x in xs {
        let q = HittingQuery::up(a, x)?;
        let u = lft_hitting(rs, &q, lambda, mu);
        let un = lft_hitting_derivative(rs, &q, lambda, mu, n);
        ode = ode.max((rs.kappa() * un - lambda * u).norm());
    }
    let q = HittingQuery::up(a, a)?;
    let imu = Complex64::new(0.0, mu);
    let boundary = (0..rs.j().len())
        .map(|l| {
            let v = lft_hitting_derivative(rs, &q, lambda, mu, l);
            (v - imu.powu(l as u32) * (imu * a).exp()).norm()
        })
        .collect();
    Ok(UResidual { ode, boundary })
}
