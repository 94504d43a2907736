//! Infidelity bounds for a length-25 code correcting 3 errors.
//!
//!     cargo run --example worked_bound

use qfid::bound::{asymptotic_bound, bounded_distance_bound, paper_bound, product_bound, SiteMass};

fn main() {
    let (n, t) = (25, 3);
    for p in [0.01, 0.001] {
        let r = paper_bound(n, t, p).unwrap();
        println!("p = {p}");
        println!("  binomial tail   epsilon = {:.6e}  fidelity >= {:.12}", r.epsilon, r.fidelity_lb);
        let product = product_bound(&vec![SiteMass::from_p(p); n], t).unwrap();
        println!("  product form    epsilon = {product:.6e}");
        println!("  p^(t+1) 2^n             = {:.6e}", asymptotic_bound(n, t, p).unwrap());
        for tp in 0..t {
            let b = bounded_distance_bound(n, tp, p).unwrap();
            println!("  bounded t' = {tp}  epsilon = {:.6e}", b.epsilon);
        }
    }
    // p = 0.01
    //   binomial tail   epsilon = 1.319950e-4  fidelity >= 0.999868004983
}
