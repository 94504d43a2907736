//! The bound along t = floor(alpha n) against the envelope p (2 p^alpha)^n.
//!
//!     cargo run --example asymptotic_sweep

use qfid::bound::sweep_asymptotic;

fn main() {
    let lengths: Vec<usize> = (1..=20).map(|i| 10 * i).collect();
    for (alpha, p) in [(0.2, 0.01), (0.1, 0.25)] {
        let points = sweep_asymptotic(alpha, p, &lengths).unwrap();
        println!("alpha = {alpha}, p = {p}, 2 p^alpha = {:.4} ({})", 2.0 * f64::powf(p, alpha), if points[0].feasible { "feasible" } else { "infeasible" });
        for pt in points.iter().step_by(3) {
            println!("  n = {:3}  t = {:2}  eps = {:.3e}  envelope = {:.3e}", pt.n, pt.t, pt.epsilon, pt.envelope);
        }
    }
}
