//! First hitting of a level: the law of X(τ) is a combination of δ_a and its
//! derivatives, with time profiles J_q that integrate to the scalar weights.
use num_complex::Complex64;
use pseudoheat::hitting::{
    ft_hitting_place, hitting_place_weights, hitting_profiles, lft_hitting, lft_hitting_limit, multipole_lt, reassemble,
    HittingQuery,
};
use pseudoheat::{build_root_system, ParamSet};

fn main() -> pseudoheat::Result<()> {
    let rs = build_root_system(ParamSet::even(4)?);
    let q = HittingQuery::up(1.0, 0.0)?;
    let lambda = Complex64::new(1.0, 0.0);
    let coefs = multipole_lt(&rs, &q, lambda);
    println!("E[e^(-τ+0.7iX(τ))] = {:.12}", lft_hitting(&rs, &q, lambda, 0.7));
    println!("from multipole terms = {:.12}", reassemble(&coefs, q.a, 0.7));
    println!("weights {:?}", hitting_place_weights(&rs, &q).weights());
    println!("E[e^(0.7iX(τ))] = {:.12}, λ→0 limit {:.12}", ft_hitting_place(&rs, &q, 0.7), lft_hitting_limit(&rs, &q, 0.7, 1e-8));
    let prof = hitting_profiles(&rs, &q);
    for t in [0.25, 1.0, 4.0] {
        println!("t={t}: J_q = {:?}", prof.evaluate_at(t)?);
    }
    Ok(())
}
