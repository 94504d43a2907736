//! Minimum-weight recovery table of the five-qubit code, and the check that every
//! error of weight at most t is its syndrome's leader up to a stabilizer.
//!
//!     cargo run --example decoding_table

use qfid::pauli::PauliOperator;
use qfid::stabilizer::library;

fn main() {
    let code = library::five_qubit();
    for g in code.generators() {
        println!("generator {}", g.to_signed_string().unwrap());
    }
    let table = code.decoding_table().unwrap();
    println!("\nsyndrome  leader  weight");
    for (s, e) in table.iter() {
        println!("{s}      {}   {}", e.leader.pattern(), e.leader.weight());
    }

    let params = code.params(code.n()).unwrap();
    println!("\nleaders cover all errors of weight <= {}: {}", params.t().unwrap(), code.verify_coset_leaders(&params, &table));

    // a weight-2 error is mistaken for the weight-1 leader sharing its syndrome
    let e: PauliOperator = "XXIII".parse().unwrap();
    let s = code.syndrome(&e).unwrap();
    println!("XXIII has syndrome {s}, decoded as {}", table.leader(&s).pattern());
}
