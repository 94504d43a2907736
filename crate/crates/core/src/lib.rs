//! Fidelity lower bounds for `t`-error-correcting stabilizer codes over
//! general memoryless channels, checked against exact density-matrix
//! simulation of encoding, noise, syndrome measurement and recovery.
//!
//! * [`pauli`]: symplectic n-qubit Pauli operators.
//! * [`stabilizer`]: codes, distances, syndromes and minimum-weight decoding tables.
//! * [`channel`]: Kraus channels and their decomposition into Pauli masses.
//! * [`bound`]: the binomial-tail infidelity bound and its relatives.
//! * [`simulator`]: the exact encode → noise → measure → recover pipeline.
//! * [`cli`]: the `qfid` command-line front end.

pub mod bound;
pub mod channel;
pub mod cli;
pub mod pauli;
pub mod simulator;
pub mod stabilizer;

pub use bound::{paper_bound, product_bound, BoundReport, SiteMass};
pub use channel::{Channel, ChannelKind, PauliMass};
pub use pauli::PauliOperator;
pub use simulator::{Mode, SimulationReport, Simulator, StateSpec};
pub use stabilizer::{CodeParams, DecodingTable, StabilizerCode, Syndrome};
