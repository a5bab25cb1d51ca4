//! Signed-lattice oracle: the dyadic-time walk with the discretized kernel,
//! compared with the closed forms as the time step shrinks.
use num_complex::Complex64;
use pseudoheat::extrema::{lft_extrema, Extremum, LftQuery};
use pseudoheat::hitting::{lft_hitting, HittingQuery};
use pseudoheat::lattice::{build_lattice, expect_max_functional, first_passage_transform, GridSpec};
use pseudoheat::{build_root_system, ParamSet};

fn main() -> pseudoheat::Result<()> {
    let params = ParamSet::even(4)?;
    let rs = build_root_system(params);
    let lambda = Complex64::new(1.0, 0.0);
    let grid = GridSpec::new(-6.0, 0.03, 400)?;
    let a = 0.525;
    let want_max = lft_extrema(&rs, &LftQuery::new(lambda, 0.7, 0.3, 0.0)?, Extremum::Max);
    let want_hit = lft_hitting(&rs, &HittingQuery::up(a, 0.0)?, lambda, 0.7);
    for n in [4, 6, 8, 10] {
        let lat = build_lattice(params, n, grid)?;
        let m = expect_max_functional(&lat, 0.0, lambda, 0.7, 0.3)?;
        let h = first_passage_transform(&lat, 0.0, a, lambda, 0.7)?;
        println!(
            "n={n:2}  row |T| sum {:.4}  max rel err {:.4}  first-passage rel err {:.4}",
            lat.row_abs_sum,
            (m - want_max).norm() / want_max.norm(),
            (h - want_hit).norm() / want_hit.norm()
        );
    }
    Ok(())
}
