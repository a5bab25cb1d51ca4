//! Roots of `κ_N`, the J/K partition and the coefficient families built on it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported order. Coefficient conditioning degrades beyond this.
pub const MAX_ORDER: usize = 32;

/// The pair `(N, κ_N)` defining `∂u/∂t = κ_N ∂^N u/∂x^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ParamSet {
    n: usize,
    kappa: i8,
}

impl ParamSet {
    /// Validates `N ≥ 2`, `N ≤ MAX_ORDER` and, for even `N`, `κ = (−1)^{1+N/2}`.
    pub fn new(n: usize, kappa: i32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("N must be at least 2, got {n}")));
        }
        if n > MAX_ORDER {
            return Err(Error::InvalidParams(format!("N={n} exceeds the cap {MAX_ORDER}")));
        }
        if kappa != 1 && kappa != -1 {
            return Err(Error::InvalidParams(format!("kappa must be +1 or -1, got {kappa}")));
        }
        if n % 2 == 0 {
            let forced = Self::even_kappa(n);
            if kappa != forced as i32 {
                return Err(Error::InvalidParams(format!(
                    "for even N={n} kappa is forced to {forced:+}"
                )));
            }
        }
        Ok(ParamSet { n, kappa: kappa as i8 })
    }

    /// Even order with its forced sign.
    pub fn even(n: usize) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::InvalidParams(format!("N={n} is odd, kappa must be given")));
        }
        Self::new(n, Self::even_kappa(n) as i32)
    }

    fn even_kappa(n: usize) -> i8 {
        if (n / 2) % 2 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> i32 {
        self.kappa as i32
    }

    pub fn kappa_f64(&self) -> f64 {
        self.kappa as f64
    }

    pub fn is_even(&self) -> bool {
        self.n % 2 == 0
    }
}

/// `(#J, #K)` read off the case table.
pub fn cardinalities(params: ParamSet) -> (usize, usize) {
    let n = params.order();
    let p = n / 2;
    if n % 2 == 0 {
        return (p, p);
    }
    let p_even = p % 2 == 0;
    match (params.kappa() == 1, p_even) {
        (true, true) | (false, false) => (p + 1, p),
        _ => (p, p + 1),
    }
}

/// One half of the root system: `J` (positive real parts) or `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Half {
    J,
    K,
}

/// Roots with one sign of real part together with their coefficients.
///
/// For `J` the product coefficients are the `A_j`, the symmetric functions the
/// `c_{jq}` and the Vandermonde solution the `α_{jm}`; for `K` they are `B_k`,
/// `d_{kq}` and the mirrored system.
#[derive(Debug, Clone)]
pub struct HalfSystem {
    pub index: Vec<usize>,
    pub theta: Vec<Complex64>,
    pub coef: Vec<Complex64>,
    pub sym: Vec<Vec<Complex64>>,
    pub vander: Vec<Vec<Complex64>>,
}

impl HalfSystem {
    fn build(index: Vec<usize>, all: &[Complex64]) -> Self {
        let theta: Vec<Complex64> = index.iter().map(|&l| all[l]).collect();
        let m = theta.len();
        let coef: Vec<Complex64> = (0..m)
            .map(|a| {
                (0..m)
                    .filter(|&b| b != a)
                    .map(|b| theta[b] / (theta[b] - theta[a]))
                    .product()
            })
            .collect();
        let sym: Vec<Vec<Complex64>> = (0..m)
            .map(|a| {
                let others: Vec<Complex64> =
                    (0..m).filter(|&b| b != a).map(|b| theta[b]).collect();
                elementary_symmetric(&others)
            })
            .collect();
        let prod: Complex64 = theta.iter().product();
        let vander = (0..m)
            .map(|a| {
                (0..m)
                    .map(|q| {
                        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                        sign * sym[a][m - 1 - q] * theta[a] * coef[a] / prod
                    })
                    .collect()
            })
            .collect();
        HalfSystem { index, theta, coef, sym, vander }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Position of root `l` inside this half, if present.
    pub fn position(&self, l: usize) -> Option<usize> {
        self.index.iter().position(|&i| i == l)
    }
}

/// Elementary symmetric functions `σ_0..σ_m` of `roots`, by expanding `∏(1 + r x)`.
pub fn elementary_symmetric(roots: &[Complex64]) -> Vec<Complex64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        poly.push(Complex64::new(0.0, 0.0));
        for q in (1..poly.len()).rev() {
            let prev = poly[q - 1];
            poly[q] += r * prev;
        }
    }
    poly
}

/// The `N` roots of `κ_N` indexed as in the angle formulas, split into `J` and `K`.
#[derive(Debug, Clone)]
pub struct RootSystem {
    params: ParamSet,
    theta: Vec<Complex64>,
    angle: Vec<f64>,
    j: HalfSystem,
    k: HalfSystem,
}

/// Angle of `θ_l`, reduced to `(−π, π]`.
fn root_angle(params: ParamSet, l: usize) -> f64 {
    let n = params.order() as f64;
    let l = l as f64;
    let raw = if params.is_even() {
        let p = (params.order() / 2) as f64;
        (2.0 * l + p + 1.0) * PI / n
    } else if params.kappa() == 1 {
        2.0 * l * PI / n
    } else {
        (2.0 * l + 1.0) * PI / n
    };
    let mut a = raw % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

pub fn build_root_system(params: ParamSet) -> RootSystem {
    let n = params.order();
    let angle: Vec<f64> = (0..n).map(|l| root_angle(params, l)).collect();
    let theta: Vec<Complex64> = angle.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    let mut jdx = Vec::new();
    let mut kdx = Vec::new();
    for (l, t) in theta.iter().enumerate() {
        assert!(t.re.abs() > 1e-9, "root {l} on the imaginary axis");
        if t.re > 0.0 {
            jdx.push(l);
        } else {
            kdx.push(l);
        }
    }
    let j = HalfSystem::build(jdx, &theta);
    let k = HalfSystem::build(kdx, &theta);
    RootSystem { params, theta, angle, j, k }
}

impl RootSystem {
    pub fn params(&self) -> ParamSet {
        self.params
    }

    pub fn order(&self) -> usize {
        self.params.order()
    }

    pub fn kappa(&self) -> f64 {
        self.params.kappa_f64()
    }

    pub fn theta(&self) -> &[Complex64] {
        &self.theta
    }

    /// Argument of `θ_l` in `(−π, π]`.
    pub fn angle(&self, l: usize) -> f64 {
        self.angle[l]
    }

    pub fn half(&self, h: Half) -> &HalfSystem {
        match h {
            Half::J => &self.j,
            Half::K => &self.k,
        }
    }

    pub fn j(&self) -> &HalfSystem {
        &self.j
    }

    pub fn k(&self) -> &HalfSystem {
        &self.k
    }

    /// Which half root `l` belongs to.
    pub fn side_of(&self, l: usize) -> Half {
        if self.theta[l].re > 0.0 {
            Half::J
        } else {
            Half::K
        }
    }

    /// Product coefficient of root `l` (`A_l` or `B_l`).
    pub fn coefficient(&self, l: usize) -> Complex64 {
        let h = self.half(self.side_of(l));
        h.coef[h.position(l).expect("index in its own half")]
    }
}

/// `α_{jm}` keyed by `(j, m)` with `j` the root index.
pub fn vandermonde_alpha(rs: &RootSystem) -> Vec<((usize, usize), Complex64)> {
    keyed(rs.j())
}

/// K-side mirror of `α`: solves `Σ_k θ_k^l β_{km} = δ_{lm}`.
pub fn vandermonde_beta(rs: &RootSystem) -> Vec<((usize, usize), Complex64)> {
    keyed(rs.k())
}

fn keyed(h: &HalfSystem) -> Vec<((usize, usize), Complex64)> {
    let mut out = Vec::new();
    for (a, &l) in h.index.iter().enumerate() {
        for (m, &v) in h.vander[a].iter().enumerate() {
            out.push(((l, m), v));
        }
    }
    out
}

/// Maximum absolute residual of each exact identity.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub entries: Vec<(String, f64)>,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == name).map(|e| e.1)
    }
}

fn max_abs<I: IntoIterator<Item = Complex64>>(it: I) -> f64 {
    it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity_report(rs: &RootSystem) -> IdentityReport {
    let n = rs.order();
    let nf = n as f64;
    let th = rs.theta();
    let one = Complex64::new(1.0, 0.0);
    let mut entries = Vec::new();

    let kappa = Complex64::new(rs.kappa(), 0.0);
    entries.push((
        "root-power".to_string(),
        max_abs(th.iter().map(|t| t.powu(n as u32) - kappa)),
    ));

    entries.push((
        "prod-elem".to_string(),
        max_abs((0..n).map(|m| {
            let p: Complex64 =
                (0..n).filter(|&l| l != m).map(|l| th[l] / (th[l] - th[m])).product();
            p - 1.0 / nf
        })),
    ));

    for (name, own, other) in [
        ("partial-fractions-J", rs.j(), rs.k()),
        ("partial-fractions-K", rs.k(), rs.j()),
    ] {
        let r = max_abs(other.theta.iter().zip(&other.coef).map(|(&tk, &bk)| {
            let s: Complex64 = own
                .theta
                .iter()
                .zip(&own.coef)
                .map(|(&tj, &aj)| tj * aj / (tj - tk))
                .sum();
            s - one / (nf * bk)
        }));
        entries.push((name.to_string(), r));
    }

    entries.push(("sum-A".to_string(), (rs.j().coef.iter().sum::<Complex64>() - one).norm()));
    entries.push(("sum-B".to_string(), (rs.k().coef.iter().sum::<Complex64>() - one).norm()));

    for (name, h) in [("lemma-sum-J", rs.j()), ("lemma-sum-K", rs.k())] {
        let m = h.len();
        let mut worst: f64 = 0.0;
        for q in 0..m {
            for p in 0..=q {
                let s: Complex64 = (0..m)
                    .map(|a| h.sym[a][q].conj() * h.theta[a].powu(p as u32) * h.coef[a])
                    .sum();
                let target = if p < q {
                    0.0
                } else if q % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                worst = worst.max((s - target).norm());
            }
        }
        entries.push((name.to_string(), worst));
    }

    for (name, h) in [("vandermonde-alpha", rs.j()), ("vandermonde-beta", rs.k())] {
        let m = h.len();
        let mut worst: f64 = 0.0;
        for l in 0..m {
            for q in 0..m {
                let s: Complex64 =
                    (0..m).map(|a| h.theta[a].powu(l as u32) * h.vander[a][q]).sum();
                let target = if l == q { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        entries.push((name.to_string(), worst));
    }

    // Σ_J θ_j^{#J} A_j = (−1)^{#J−1} ∏_J θ_j and its K analogue.
    for (name, h) in [("top-power-J", rs.j()), ("top-power-K", rs.k())] {
        let m = h.len();
        let s: Complex64 =
            h.theta.iter().zip(&h.coef).map(|(&t, &c)| t.powu(m as u32) * c).sum();
        let sign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let prod: Complex64 = h.theta.iter().product();
        entries.push((name.to_string(), (s - sign * prod).norm()));
    }

    let all: Complex64 = th.iter().product();
    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    entries.push(("product-of-roots".to_string(), (all - sign * kappa).norm()));

    IdentityReport { entries }
}

/// Residual of `Σ_j θ_j^p A_j/(1 − conj(θ_j)x) = x^p/∏(1 − conj(θ_j)x)` at `x`, `p ≤ #J−1`.
pub fn expansion_residual(h: &HalfSystem, p: usize, x: Complex64) -> f64 {
    let lhs: Complex64 = h
        .theta
        .iter()
        .zip(&h.coef)
        .map(|(&t, &a)| t.powu(p as u32) * a / (1.0 - t.conj() * x))
        .sum();
    let den: Complex64 = h.theta.iter().map(|&t| 1.0 - t.conj() * x).product();
    (lhs - x.powu(p as u32) / den).norm()
}
