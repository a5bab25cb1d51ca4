//! Talbot inversion on a transform with a known original, then on the potential Ψ.
use num_complex::Complex64;
use pseudoheat::inversion::{talbot_invert, TalbotConfig};
use pseudoheat::kernel::potential_psi;
use pseudoheat::{build_root_system, ParamSet};

fn main() -> pseudoheat::Result<()> {
    for nodes in [16, 24, 32] {
        let cfg = TalbotConfig::new(nodes)?;
        let r = talbot_invert(&|l: Complex64| 1.0 / (l + 1.0).powi(2), 2.0, cfg)?;
        println!("M={nodes}: t e^-t at t=2: {:.15} (exact {:.15}, estimate {:.1e})", r.value.re, 2.0 * (-2.0f64).exp(), r.error_estimate);
    }
    let rs = build_root_system(ParamSet::even(4)?);
    for t in [0.5, 1.0, 2.0] {
        let r = talbot_invert(&|l: Complex64| potential_psi(&rs, l, 0.4), t, TalbotConfig::default())?;
        println!("P{{X({t}) <= -0.4}} = {:+.12}", r.value.re);
    }
    Ok(())
}
