//! The signed kernel p(t;ξ), its total variation ρ, moments, and the λ-potential.
use num_complex::Complex64;
use pseudoheat::kernel::{heat_kernel, moment, moment_quadrature, potential_phi, rho, KernelQuery};
use pseudoheat::{build_root_system, ParamSet};

fn main() -> pseudoheat::Result<()> {
    let p4 = ParamSet::even(4)?;
    for xi in [0.0, 1.0, 2.0, 3.0, 4.0] {
        println!("p(1;{xi}) = {:+.10}", heat_kernel(&KernelQuery::new(p4, 1.0, xi))?);
    }
    println!("rho = {:.10} (greater than one: the kernel changes sign)", rho(p4)?);
    for k in 0..=4 {
        let q = moment_quadrature(p4, 0.5, k)?;
        println!("E[X(0.5)^{k}] quadrature {:+.10}  closed {:+.1}", q.value, moment(p4, 0.5, k)?);
    }
    let rs = build_root_system(p4);
    println!("Phi(1; 0.3) = {:.10}", potential_phi(&rs, Complex64::new(1.0, 0.0), 0.3));
    Ok(())
}
