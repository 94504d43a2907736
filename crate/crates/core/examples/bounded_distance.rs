//! Bounded-distance decoding on the five-qubit code: syndromes whose leader is
//! heavier than t' are flagged, and the bound uses t' in place of t.
//!
//!     cargo run --release --example bounded_distance

use qfid::channel::ChannelKind;
use qfid::simulator::{memoryless, Mode, Simulator, StateSpec};
use qfid::stabilizer::library;

fn main() {
    let sim = Simulator::new(library::five_qubit()).unwrap();
    let chs = memoryless(&ChannelKind::Depolarizing(0.04).build().unwrap(), 5);
    for mode in [Mode::Full, Mode::Bounded(1), Mode::Bounded(0)] {
        let r = sim.run(&chs, StateSpec::Basis(0), mode).unwrap();
        let flagged = r.branches.iter().filter(|b| b.beyond_radius).count();
        let eps = r.bounded.as_ref().unwrap_or(&r.paper).epsilon;
        println!("{:10} average fidelity {:.9}  1 - eps = {:.9}  flagged syndromes {flagged}", mode.to_string(), r.average_fidelity, 1.0 - eps);
    }
}
