//! The invariant suite behind `pseudoheat verify-all`, for several orders.
use pseudoheat::verify::{verify_all, VerifyConfig};
use pseudoheat::ParamSet;

fn main() -> pseudoheat::Result<()> {
    for params in [ParamSet::even(2)?, ParamSet::new(3, 1)?, ParamSet::even(4)?, ParamSet::new(5, -1)?] {
        let checks = verify_all(params, VerifyConfig::default());
        let worst = checks.iter().max_by(|a, b| (a.residual / a.tolerance).total_cmp(&(b.residual / b.tolerance)));
        let failed = checks.iter().filter(|c| !c.passed()).count();
        println!("N={} kappa={:+}: {} checks, {failed} failed, tightest {:?}", params.order(), params.kappa(), checks.len(), worst.map(|c| &c.name));
    }
    Ok(())
}
