//! Survival, cumulative hazard and hazard of the generalized Weibull
//! baseline for increasing, decreasing and bathtub-shaped hazards.
//!
//! `cargo run --example baseline_curves`

use frailfit::baseline::{gw_cum_hazard, gw_hazard, gw_survival, GwParams};

fn main() -> frailfit::Result<()> {
    let shapes = [
        ("increasing", GwParams::new(2.0, 0.7, 1.5)?),
        ("decreasing", GwParams::new(0.5, 1.0, 0.8)?),
        ("bathtub", GwParams::new(0.2, 0.5, 2.5)?),
    ];
    for (label, p) in shapes {
        println!("{label}: zeta {} delta {} xi {}", p.zeta, p.delta, p.xi);
        println!("{:>6} {:>10} {:>10} {:>10}", "z", "S(z)", "Phi0(z)", "phi0(z)");
        for z in [0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
            println!(
                "{z:>6.2} {:>10.5} {:>10.5} {:>10.5}",
                gw_survival(z, &p)?,
                gw_cum_hazard(z, &p)?,
                gw_hazard(z, &p)?
            );
        }
        println!();
    }
    Ok(())
}
