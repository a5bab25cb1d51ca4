//! Signed-lattice oracle: the process sampled on dyadic times `k/2^n`, with the
//! kernel discretized on a uniform space grid, and an exact check of Spitzer's
//! identity for signed increment laws.
//!
//! Under a signed kernel there is nothing to sample, so every quantity here is an
//! exact signed expectation computed by linear algebra or path enumeration.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::ParamSet;
use crate::error::{Error, Result};
use crate::kernel::{heat_kernel, KernelQuery};

/// Uniform grid `x_i = min + i·step`, `i = 0..points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub step: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(min: f64, step: f64, points: usize) -> Result<Self> {
        if !(step > 0.0) || points < 3 {
            return Err(Error::InvalidParams(format!("grid step {step}, points {points}")));
        }
        Ok(GridSpec { min, step, points })
    }

    /// `points` nodes from `min` to `max` inclusive.
    pub fn spanning(min: f64, max: f64, points: usize) -> Result<Self> {
        if points < 3 || !(max > min) {
            return Err(Error::InvalidParams(format!("grid [{min}, {max}] with {points} points")));
        }
        Self::new(min, (max - min) / (points - 1) as f64, points)
    }

    pub fn node(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }

    pub fn max(&self) -> f64 {
        self.node(self.points - 1)
    }

    /// Index of the node at `x`; `x` must sit on the grid.
    pub fn index_of(&self, x: f64) -> Result<usize> {
        let u = (x - self.min) / self.step;
        let i = u.round();
        if (u - i).abs() > 1e-6 || i < 0.0 || i as usize >= self.points {
            return Err(Error::OutOfRange(format!("{x} is not a grid node")));
        }
        Ok(i as usize)
    }
}

/// Discretized kernel `T_{ij} = p(dt; x_i − x_j)·h / S` on a grid, with `S` the
/// full (untruncated) stencil sum.
#[derive(Debug, Clone, Serialize)]
pub struct SignedLattice {
    pub params: ParamSet,
    pub level: u32,
    pub dt: f64,
    pub grid: GridSpec,
    /// `w_k = p(dt; k h)·h / S` for `k = 0..points`.
    pub stencil: Vec<f64>,
    /// `S = Σ_{k∈ℤ} p(dt; k h)·h`, the factor removed by renormalization.
    pub renormalization: f64,
    /// Row sum of the central row after renormalization.
    pub central_row_sum: f64,
    /// `Σ |T_{ij}|` over the central row, the lattice counterpart of `ρ`.
    pub row_abs_sum: f64,
}

impl SignedLattice {
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.stencil[i.abs_diff(j)]
    }

    pub fn len(&self) -> usize {
        self.grid.points
    }

    pub fn is_empty(&self) -> bool {
        self.grid.points == 0
    }

    /// Row sums `Σ_j T_{ij}` for every `i`.
    pub fn row_sums(&self) -> Vec<f64> {
        let p = self.len();
        (0..p).map(|i| (0..p).map(|j| self.weight(i, j)).sum()).collect()
    }
}

// Past 32 kernel widths every even-order kernel is below 1e−16 of its peak.
const STENCIL_REACH: f64 = 32.0;

pub fn build_lattice(params: ParamSet, level: u32, grid: GridSpec) -> Result<SignedLattice> {
    if !params.is_even() {
        return Err(Error::NotAbsolutelyConvergent(params.order()));
    }
    let n = params.order();
    let dt = 0.5f64.powi(level as i32);
    let h = grid.step;
    let reach = ((STENCIL_REACH * dt.powf(1.0 / n as f64)) / h).ceil() as usize;
    let kmax = reach.max(grid.points);
    let raw: Vec<f64> = (0..=kmax)
        .map(|k| heat_kernel(&KernelQuery::new(params, dt, k as f64 * h)).map(|p| p * h))
        .collect::<Result<_>>()?;
    let s = raw[0] + 2.0 * raw[1..].iter().sum::<f64>();
    let stencil: Vec<f64> = raw[..grid.points].iter().map(|w| w / s).collect();
    let c = grid.points / 2;
    let row = |f: &dyn Fn(f64) -> f64| -> f64 { (0..grid.points).map(|j| f(stencil[c.abs_diff(j)])).sum() };
    let central_row_sum = row(&|w| w);
    let row_abs_sum = row(&|w: f64| w.abs());
    let lost = (1.0 - central_row_sum).abs();
    if lost > 1e-3 {
        return Err(Error::GridTooNarrow(lost));
    }
    Ok(SignedLattice {
        params,
        level,
        dt,
        grid,
        stencil,
        renormalization: s,
        central_row_sum,
        row_abs_sum,
    })
}

/// Dense LU factorization without pivoting of `I − z T` restricted to `0..m`.
///
/// Every leading block of `I − zT` is invertible for `|z| < 1` because `T` is
/// symmetric with spectrum in `[0, 1]`, so no pivoting is needed; the factors of
/// a leading block are the leading blocks of the factors.
struct Lu {
    m: usize,
    a: Vec<Complex64>,
}

impl Lu {
    fn new(lat: &SignedLattice, z: Complex64, m: usize) -> Self {
        let mut a = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in 0..m {
                let d = if i == j { 1.0 } else { 0.0 };
                a[i * m + j] = d - z * lat.weight(i, j);
            }
        }
        for k in 0..m {
            let piv = a[k * m + k];
            for i in k + 1..m {
                let l = a[i * m + k] / piv;
                a[i * m + k] = l;
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (top, bottom) = a.split_at_mut(i * m);
                let rk = &top[k * m + k + 1..k * m + m];
                let ri = &mut bottom[k + 1..m];
                for (x, &y) in ri.iter_mut().zip(rk) {
                    *x -= l * y;
                }
            }
        }
        Lu { m, a }
    }

    fn l(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.m + j]
    }

    fn u(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.m + j]
    }

    /// `L^{−1} f` (unit lower triangle).
    fn forward(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut g = f.to_vec();
        for i in 0..self.m {
            let mut s = g[i];
            for j in 0..i {
                s -= self.l(i, j) * g[j];
            }
            g[i] = s;
        }
        g
    }

    /// Row `i0` of `U^{−1}`.
    fn inverse_row(&self, i0: usize) -> Vec<Complex64> {
        let mut r = vec![Complex64::new(0.0, 0.0); self.m];
        for j in i0..self.m {
            let mut s = if j == i0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            for i in i0..j {
                s -= r[i] * self.u(i, j);
            }
            r[j] = s / self.u(j, j);
        }
        r
    }

    /// Row `i0` of `(LU)^{−1}`.
    fn solve_row(&self, i0: usize) -> Vec<Complex64> {
        // (LU)^{−T} e = L^{−T} (U^{−T} e); the first factor is row i0 of U^{−1}
        let mut r = self.inverse_row(i0);
        for i in (0..self.m).rev() {
            let mut s = r[i];
            for j in i + 1..self.m {
                s -= self.l(j, i) * r[j];
            }
            r[i] = s;
        }
        r
    }
}

fn check_lambda(lambda: Complex64) -> Result<()> {
    if !(lambda.re > 0.0) {
        return Err(Error::InvalidParams(format!("Re(lambda) must be positive, got {lambda}")));
    }
    Ok(())
}

/// `E_x[F_n]` for `F = ∫ e^{−λt + iμX(t) − νM(t)} dt` on the lattice:
/// `((1−z)/λ) Σ_k z^k E[e^{iμX_k − νM_k}]`, `z = e^{−λ dt}`, with the series
/// summed exactly through the killed resolvents `(I − zT_{≤m})^{−1}`.
pub fn expect_max_functional(lat: &SignedLattice, x0: f64, lambda: Complex64, mu: f64, nu: f64) -> Result<Complex64> {
    check_lambda(lambda)?;
    let i0 = lat.grid.index_of(x0)?;
    let p = lat.len();
    let z = (-lambda * lat.dt).exp();
    let lu = Lu::new(lat, z, p);
    let f: Vec<Complex64> = (0..p).map(|j| Complex64::new(0.0, mu * lat.grid.node(j)).exp()).collect();
    let g = lu.forward(&f);
    let r = lu.inverse_row(i0);
    // G_m = Σ_k z^k E[e^{iμX_k}; M_k ≤ x_m]
    let mut total = Complex64::new(0.0, 0.0);
    for m in i0..p {
        total += r[m] * g[m] * (-nu * lat.grid.node(m)).exp();
    }
    Ok((1.0 - z) / lambda * total)
}

/// The same quantity by literal dynamic programming over `(position, running max)`
/// for `steps` time steps. Quadratic state space, so only for small grids.
pub fn expect_max_functional_stepped(
    lat: &SignedLattice,
    x0: f64,
    lambda: Complex64,
    mu: f64,
    nu: f64,
    steps: usize,
) -> Result<Complex64> {
    check_lambda(lambda)?;
    let covered = steps as f64 * lat.dt;
    let needed = 1e6f64.ln() / lambda.re;
    if covered < needed {
        return Err(Error::HorizonNotCovered { covered, needed });
    }
    let i0 = lat.grid.index_of(x0)?;
    let p = lat.len();
    let z = (-lambda * lat.dt).exp();
    let phase: Vec<Complex64> = (0..p).map(|j| Complex64::new(0.0, mu * lat.grid.node(j)).exp()).collect();
    let tilt: Vec<f64> = (0..p).map(|m| (-nu * lat.grid.node(m)).exp()).collect();
    // state[m * p + i]: signed mass at position i with running max m ≥ i
    let mut state = vec![0.0f64; p * p];
    state[i0 * p + i0] = 1.0;
    let mut zk = Complex64::new(1.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    let mut next = vec![0.0f64; p * p];
    for step in 0..=steps {
        let mut e = Complex64::new(0.0, 0.0);
        for m in 0..p {
            for i in 0..=m {
                let w = state[m * p + i];
                if w != 0.0 {
                    e += phase[i] * (w * tilt[m]);
                }
            }
        }
        total += zk * e;
        if step == steps {
            break;
        }
        next.iter_mut().for_each(|v| *v = 0.0);
        for m in 0..p {
            for i in 0..=m {
                let w = state[m * p + i];
                if w == 0.0 {
                    continue;
                }
                for j in 0..p {
                    next[m.max(j) * p + j] += w * lat.weight(i, j);
                }
            }
        }
        std::mem::swap(&mut state, &mut next);
        zk *= z;
    }
    Ok((1.0 - z) / lambda * total)
}

/// Discrete `E_x[e^{−λτ_n + iμX(τ_n)}]`, `τ_n` the first dyadic time with `X > a`.
pub fn first_passage_transform(lat: &SignedLattice, x0: f64, a: f64, lambda: Complex64, mu: f64) -> Result<Complex64> {
    check_lambda(lambda)?;
    if x0 > a {
        return Err(Error::Side(format!("x0={x0} above level a={a}")));
    }
    let i0 = lat.grid.index_of(x0)?;
    let g = lat.grid;
    let below = (0..g.points).filter(|&i| g.node(i) <= a).count();
    if below == g.points {
        return Err(Error::OutOfRange(format!("no grid node above a={a}")));
    }
    let z = (-lambda * lat.dt).exp();
    let lu = Lu::new(lat, z, below);
    let r = lu.solve_row(i0);
    let jump: Vec<Complex64> = (0..below)
        .map(|i| {
            (below..g.points)
                .map(|j| lat.weight(i, j) * Complex64::new(0.0, mu * g.node(j)).exp())
                .sum()
        })
        .collect();
    Ok(z * r.iter().zip(&jump).map(|(&a, &b)| a * b).sum::<Complex64>())
}

/// Finitely supported signed increment law with total mass one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedIncrementDist {
    atoms: Vec<(f64, f64)>,
}

impl SignedIncrementDist {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParams("no atoms".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-15 {
            return Err(Error::InvalidParams(format!("total mass {total} is not one")));
        }
        Ok(SignedIncrementDist { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

/// Largest number of enumerated paths accepted by [`spitzer_check`].
pub const ENUMERATION_BUDGET: u64 = 50_000_000;

/// Both sides of Spitzer's identity up to `z^order`.
#[derive(Debug, Clone, Serialize)]
pub struct SpitzerReport {
    /// `E[e^{iμX_k − νM_k}]`, `k = 0..=order`.
    pub direct: Vec<Complex64>,
    /// Coefficients of `exp(Σ_k E[e^{iμX_k − νX_k^+}] z^k / k)`.
    pub exponential: Vec<Complex64>,
    pub discrepancy: f64,
}

/// Compares the `z^k` coefficients, `k ≤ order`, of `Σ_k E[e^{iμX_k − νM_k}] z^k`
/// (path enumeration) and `exp(Σ_k E[e^{iμX_k − νX_k^+}] z^k/k)` (series exponentiation).
pub fn spitzer_check(inc: &SignedIncrementDist, order: usize, mu: f64, nu: f64) -> Result<SpitzerReport> {
    let b = inc.atoms.len() as u64;
    let paths: u64 = (0..=order as u32).try_fold(0u64, |acc, k| b.checked_pow(k).and_then(|v| acc.checked_add(v))).unwrap_or(u64::MAX);
    if paths > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget(paths));
    }
    let mut max_side = vec![Complex64::new(0.0, 0.0); order + 1];
    let mut plus_side = vec![Complex64::new(0.0, 0.0); order + 1];
    enumerate(&inc.atoms, order, 0, 0.0, 0.0, 1.0, mu, nu, &mut max_side, &mut plus_side);
    let mut exponential = vec![Complex64::new(0.0, 0.0); order + 1];
    exponential[0] = Complex64::new(1.0, 0.0);
    for k in 1..=order {
        let s: Complex64 = (1..=k).map(|j| plus_side[j] * exponential[k - j]).sum();
        exponential[k] = s / k as f64;
    }
    let discrepancy = max_side
        .iter()
        .zip(&exponential)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(SpitzerReport { direct: max_side, exponential, discrepancy })
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    atoms: &[(f64, f64)],
    order: usize,
    k: usize,
    x: f64,
    m: f64,
    w: f64,
    mu: f64,
    nu: f64,
    max_side: &mut [Complex64],
    plus_side: &mut [Complex64],
) {
    max_side[k] += w * Complex64::new(-nu * m, mu * x).exp();
    plus_side[k] += w * Complex64::new(-nu * x.max(0.0), mu * x).exp();
    if k == order {
        return;
    }
    for &(step, p) in atoms {
        let y = x + step;
        enumerate(atoms, order, k + 1, y, m.max(y), w * p, mu, nu, max_side, plus_side);
    }
}
