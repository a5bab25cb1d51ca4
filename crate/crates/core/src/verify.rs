//! Self-consistency suite behind `verify-all`: exact identities, transform
//! round-trips, boundary-value residuals and a seeded sweep of random query points.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{build_root_system, identity_report, ParamSet, RootSystem};
use crate::error::Result;
use crate::extrema::bvp_residual_f;
use crate::hitting::{
    ft_hitting_place, lft_hitting, lft_hitting_limit, multipole_lt, reassemble, strong_markov_transform_check,
    bvp_residual_u, HittingQuery,
};
use crate::inversion::{talbot_invert, TalbotConfig};
use crate::kernel::{heat_kernel, moment, moment_quadrature, potential_phi, KernelQuery};
use crate::lattice::{spitzer_check, SignedIncrementDist};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), residual, tolerance }
    }

    /// NaN residuals fail.
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    pub talbot: TalbotConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 1, samples: 8, talbot: TalbotConfig::default() }
    }
}

// errors become failing checks so the suite always reports every name
fn record(out: &mut Vec<Check>, name: String, r: Result<f64>, tol: f64) {
    out.push(Check::new(name, r.unwrap_or(f64::NAN), tol));
}

pub fn verify_all(params: ParamSet, cfg: VerifyConfig) -> Vec<Check> {
    let rs = build_root_system(params);
    let mut out = Vec::new();
    for (name, r) in identity_report(&rs).entries {
        out.push(Check::new(format!("identity/{name}"), r, 1e-10));
    }
    kernel_checks(&rs, cfg, &mut out);
    sweep(&rs, cfg, &mut out);
    spitzer_sweep(cfg, &mut out);
    out
}

fn has_kernel(p: ParamSet) -> bool {
    p.is_even() || p.order() == 3
}

fn kernel_checks(rs: &RootSystem, cfg: VerifyConfig, out: &mut Vec<Check>) {
    let params = rs.params();
    if !has_kernel(params) {
        return;
    }
    for xi in [0.0, 0.8, -1.3] {
        let r = (|| {
            let f = |l: Complex64| potential_phi(rs, l, xi);
            let inv = talbot_invert(&f, 1.0, cfg.talbot)?;
            Ok((inv.value.re - heat_kernel(&KernelQuery::new(params, 1.0, xi))?).abs())
        })();
        record(out, format!("kernel/potential-roundtrip xi={xi}"), r, 1e-6);
    }
    // beyond N = 6 roundoff in p(1;ξ) times ξ^N swamps the moment quadrature
    if params.is_even() && params.order() <= 6 {
        for p in 0..=params.order() {
            let r = (|| {
                let want = moment(params, 1.0, p)?;
                Ok((moment_quadrature(params, 1.0, p)?.value - want).abs() / (1.0 + want.abs()))
            })();
            record(out, format!("kernel/moment p={p}"), r, 1e-6);
        }
    }
}

fn sweep(rs: &RootSystem, cfg: VerifyConfig, out: &mut Vec<Check>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for s in 0..cfg.samples {
        let lambda = Complex64::new(rng.gen_range(0.5..3.0), rng.gen_range(-1.0..1.0));
        let mu = rng.gen_range(-1.5..1.5);
        let x = rng.gen_range(-1.0..1.0);
        let a = x + rng.gen_range(0.1..2.0);
        let (y, z) = (a - rng.gen_range(0.2..1.5), a);

        let xs: Vec<f64> = (1..=12).map(|i| a - 0.2 * i as f64).collect();
        let q = HittingQuery::up(a, x).expect("x < a by construction");
        let whole = lft_hitting(rs, &q, lambda, mu);
        let parts = reassemble(&multipole_lt(rs, &q, lambda), a, mu);
        out.push(Check::new(format!("hitting/multipole-reassembly #{s}"), (whole - parts).norm(), 1e-12));
        record(out, format!("hitting/strong-markov #{s}"), strong_markov_transform_check(rs, lambda, mu, a, x), 1e-10);
        // extrapolation nodes at s = λ^{1/N} ≤ 1e-2 whatever N is
        let lim = lft_hitting_limit(rs, &q, mu, 2e-3f64.powi(rs.order() as i32).min(1e-8));
        out.push(Check::new(format!("hitting/lambda-limit #{s}"), (lim - ft_hitting_place(rs, &q, mu)).norm(), 1e-5));
        record(out, format!("hitting/bvp-u #{s}"), bvp_residual_u(rs, lambda, mu, a, &xs).map(|r| r.max()), 1e-9);
        record(out, format!("extrema/bvp-f #{s}"), bvp_residual_f(rs, lambda, y, z, &xs).map(|r| r.max()), 1e-9);
    }
}

/// Random signed three-atom laws of total mass one, weights in `[−1, 1]`.
pub fn random_signed_law(rng: &mut impl Rng) -> SignedIncrementDist {
    loop {
        let w1: f64 = rng.gen_range(-1.0..1.0);
        let w2: f64 = rng.gen_range(-1.0..1.0);
        let w3 = 1.0 - w1 - w2;
        if w3.abs() > 1.0 {
            continue;
        }
        let mut steps = [0i32; 3];
        for s in steps.iter_mut() {
            *s = rng.gen_range(-2..=2);
        }
        let atoms = steps.iter().zip([w1, w2, w3]).map(|(&s, w)| (s as f64, w)).collect();
        if let Ok(d) = SignedIncrementDist::new(atoms) {
            return d;
        }
    }
}

fn spitzer_sweep(cfg: VerifyConfig, out: &mut Vec<Check>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    for s in 0..cfg.samples {
        let law = random_signed_law(&mut rng);
        let (mu, nu) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0));
        record(out, format!("lattice/spitzer #{s}"), spitzer_check(&law, 5, mu, nu).map(|r| r.discrepancy), 1e-10);
    }
}
