//! Laplace transforms, variances and sampled moments of the two frailty
//! laws.
//!
//! `cargo run --release --example frailty_laws`

use frailfit::frailty::{Frailty, FrailtyLaw, GlFrailty, IgFrailty};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> frailfit::Result<()> {
    let laws: [(&str, Frailty); 2] = [
        ("inverse Gaussian, eta 0.8", IgFrailty::new(0.8)?.into()),
        ("generalized Lindley, eta 3.85 epsilon 1.17", GlFrailty::new(3.85, 1.17)?.into()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (label, f) in laws {
        let draws: Vec<f64> = (0..200_000).map(|_| f.sample(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        println!("{label}");
        println!("  variance {:.4}, sampled mean {mean:.4}, sampled variance {var:.4}", f.variance());
        for s in [0.1, 1.0, 10.0, 100.0] {
            println!(
                "  s {s:>6}: L(s) {:.4e}  -L'(s) {:.4e}",
                f.laplace(s)?,
                f.log_neg_laplace_deriv(s).exp()
            );
        }
    }
    Ok(())
}
