//! Coherent X rotations: per-syndrome amplitudes of different errors add before
//! squaring. The five-qubit code stays above the binomial tail bound, the Steane
//! code falls below it, and the [[4,2,2]] code falls below the product form.
//!
//!     cargo run --release --example coherent_noise

use qfid::channel::ChannelKind;
use qfid::simulator::{memoryless, Mode, Simulator, StateSpec};
use qfid::stabilizer::library;

fn main() {
    for (name, code) in [("[[5,1,3]]", library::five_qubit()), ("Steane", library::steane()), ("[[4,2,2]]", library::four_two_two())] {
        let n = code.n();
        let spec = StateSpec::Random(1);
        let sim = Simulator::new(code).unwrap();
        println!("{name} (t = {}), state {spec}", sim.t());
        for theta in [0.05, 0.1, 0.3] {
            let chs = memoryless(&ChannelKind::XRotation(theta).build().unwrap(), n);
            let r = sim.run(&chs, spec, Mode::Full).unwrap();
            let [product, tail] = [&r.checks[0], &r.checks[1]];
            println!(
                "  theta {theta:4}: 1 - F = {:.4e}  tail eps = {:.4e} ({})  product eps = {:.4e} ({})",
                1.0 - r.average_fidelity,
                tail.epsilon,
                if tail.holds { "holds" } else { "violated" },
                product.epsilon,
                if product.holds { "holds" } else { "violated" },
            );
        }
    }
    // the same depolarizing strength, with no coherence, respects both bounds
    let sim = Simulator::new(library::steane()).unwrap();
    let p = 0.1f64.sin().powi(2);
    let chs = memoryless(&ChannelKind::BitFlip(p).build().unwrap(), 7);
    let r = sim.run(&chs, StateSpec::Random(1), Mode::Full).unwrap();
    println!("Steane, bit flip with the same p = {p:.4e}: 1 - F = {:.4e}, bounds hold: {}", 1.0 - r.average_fidelity, r.dominance_holds());
}
