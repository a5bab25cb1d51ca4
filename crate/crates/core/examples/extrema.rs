//! Joint law of (X(t), M(t)): Laplace-domain closed forms, Talbot inversion, and
//! the time-domain double integral for the Brownian case (reflection principle).
use num_complex::Complex64;
use pseudoheat::extrema::{
    dist_func_time, joint_cdf_time, lft_extrema, straddle_double_integral, DoubleIntegralConfig, Extremum, LftQuery,
};
use pseudoheat::inversion::TalbotConfig;
use pseudoheat::{build_root_system, ParamSet};
use statrs::function::erf::erfc;

fn main() -> pseudoheat::Result<()> {
    let cfg = TalbotConfig::default();
    let rs4 = build_root_system(ParamSet::even(4)?);
    let q = LftQuery::new(Complex64::new(1.0, 0.0), 0.7, 0.3, 0.0)?;
    println!("N=4 E[∫e^(-t+0.7iX-0.3M)dt] = {:.10}", lft_extrema(&rs4, &q, Extremum::Max));
    for t in [0.5, 1.0, 2.0] {
        let f = joint_cdf_time(&rs4, t, 0.0, -0.5, 0.5, Extremum::Max, cfg)?;
        println!("N=4 P{{X({t})<=-0.5, M({t})<=0.5}} = {:+.10} (signed)", f.value);
    }

    let rs2 = build_root_system(ParamSet::even(2)?);
    let (x, y, z) = (0.0, -0.5, 0.5);
    let talbot = dist_func_time(&rs2, 1.0, x, y, z, Extremum::Max, cfg)?.value;
    let double = straddle_double_integral(&rs2, 1.0, x, y, z, DoubleIntegralConfig::default())?.value;
    let reflection = 0.5 * erfc((2.0 * z - x - y) / 2.0);
    println!("N=2 P{{X<=y<=z<=M}}: Talbot {talbot:.12}, double integral {double:.12}, reflection {reflection:.12}");
    Ok(())
}
