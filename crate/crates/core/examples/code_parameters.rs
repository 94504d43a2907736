//! Distances, purity and correction radius of the bundled codes and of Shor's code.
//!
//!     cargo run --example code_parameters

use qfid::stabilizer::{library, StabilizerCode};

fn main() {
    let shor = StabilizerCode::parse(
        "# Shor's nine-qubit code\n\
         ZZIIIIIII\nIZZIIIIII\nIIIZZIIII\nIIIIZZIII\nIIIIIIZZI\nIIIIIIIZZ\nXXXXXXIII\nIIIXXXXXX",
    )
    .unwrap();
    let codes = [
        ("[[5,1,3]]", library::five_qubit()),
        ("Steane", library::steane()),
        ("[[4,2,2]]", library::four_two_two()),
        ("Shor", shor),
    ];
    for (name, code) in codes {
        let params = code.params(code.n()).unwrap();
        println!(
            "{name:10} n = {}, k = {}, d = {}, d' = {}, t = {}, pure = {}",
            code.n(),
            code.k(),
            params.d,
            params.d_prime,
            params.t().unwrap(),
            params.is_pure().unwrap()
        );
    }

    // a budget below the distance only gives a lower bound
    let steane = library::steane();
    let partial = steane.params(2).unwrap();
    println!("Steane with weight budget 2: d = {}, exact = {}", partial.d, partial.is_exact());
}
