//! Roots of κ_N θ^N = 1 split by the sign of their real part, and the exact
//! identities they satisfy.
use pseudoheat::algebra::identity_report;
use pseudoheat::{build_root_system, cardinalities, ParamSet};

fn main() -> pseudoheat::Result<()> {
    for params in [ParamSet::even(4)?, ParamSet::new(3, -1)?, ParamSet::new(5, 1)?] {
        let rs = build_root_system(params);
        let (j, k) = cardinalities(params);
        println!("N={} kappa={:+}  #J={j} #K={k}", params.order(), params.kappa());
        for l in 0..params.order() {
            let th = rs.theta()[l];
            println!("  theta_{l} = {:+.6} {:+.6}i  ({:?}, coef {:.6})", th.re, th.im, rs.side_of(l), rs.coefficient(l));
        }
        println!("  worst identity residual {:.2e}", identity_report(&rs).max_residual());
    }
    Ok(())
}
