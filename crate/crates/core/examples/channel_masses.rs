//! Pauli masses of single-qubit channels, their dilation blocks, and a JSON round trip.
//!
//!     cargo run --example channel_masses

use qfid::channel::{random_channel, random_isometry, Channel, ChannelKind};

fn main() {
    let kinds = [
        ChannelKind::Depolarizing(0.04),
        ChannelKind::BitFlip(0.05),
        ChannelKind::PhaseDamping(0.1),
        ChannelKind::AmplitudeDamping(0.1),
        ChannelKind::XRotation(0.1),
        ChannelKind::Random { seed: 7, rank: 3 },
    ];
    println!("{:32} {:>12} {:>12} {:>12} {:>12}", "channel", "m00", "m01 (Z)", "m10 (X)", "m11 (XZ)");
    for kind in &kinds {
        let m = kind.build().unwrap().pauli_mass().unwrap();
        println!(
            "{:32} {:12.6e} {:12.6e} {:12.6e} {:12.6e}   p = {:.6e}",
            format!("{kind:?}"),
            m.mass(0, 0),
            m.mass(0, 1),
            m.mass(1, 0),
            m.mass(1, 1),
            m.p()
        );
    }

    // masses do not depend on the Kraus representation
    let ch = random_channel(2, 3, 11).unwrap();
    let mixed = ch.remix(&random_isometry(5, 3, 12)).unwrap();
    println!("\nremixed p: {:.15} vs {:.15}", ch.pauli_mass().unwrap().p(), mixed.pauli_mass().unwrap().p());

    let d = ch.dilation().unwrap();
    println!("dilation {}x{}, unitarity deviation {:.1e}, ||L00 0_E||^2 = {:.12}", d.unitary.nrows(), d.unitary.ncols(), d.unitarity_deviation(), d.block_mass(0, 0));

    let json = ChannelKind::Depolarizing(0.04).build().unwrap().to_json();
    println!("\n{json}");
    let back = Channel::from_json(&json).unwrap();
    println!("round trip p = {}", back.pauli_mass().unwrap().p());
}
