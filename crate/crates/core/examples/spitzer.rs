//! Spitzer's identity holds for signed increment laws of total mass one.
use pseudoheat::lattice::{spitzer_check, SignedIncrementDist};

fn main() -> pseudoheat::Result<()> {
    let laws = [
        vec![(-1.0, 0.6), (0.0, 0.3), (1.0, 0.1)],
        vec![(-1.0, 0.8), (1.0, 0.5), (2.0, -0.3)],
    ];
    for atoms in laws {
        let law = SignedIncrementDist::new(atoms)?;
        let r = spitzer_check(&law, 6, 0.4, 0.2)?;
        println!("{:?}: discrepancy {:.2e}, z^6 coefficient {:.12}", law.atoms(), r.discrepancy, r.direct[6]);
    }
    Ok(())
}
