//! Exact density-matrix simulation of encode → noise → syndrome measurement → recovery.
//!
//! The environment is never materialized: each site's channel acts in Kraus
//! form, which is what remains of the unitary dilation after the environment
//! is traced out. State dimension is `2^n`, so `n` is capped at [`MAX_QUBITS`].

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

use crate::bound::{self, BoundError, BoundReport, SiteMass};
use crate::channel::{CMatrix, Channel, ChannelError};
use crate::pauli::PauliOperator;
use crate::stabilizer::{CodeError, CodeParams, DecodingTable, StabilizerCode, Syndrome};

pub const MAX_QUBITS: usize = 12;
/// Branches below this probability are reported but left out of the average.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-14;
/// Slack allowed when comparing simulated fidelity against a bound.
pub const DOMINANCE_SLACK: f64 = 1e-9;

pub type StateVector = DVector<Complex64>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("{0} qubits exceeds the dense simulation cap of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("expected {expected} channels, got {found}")]
    ChannelCount { expected: usize, found: usize },
    #[error("channel at position {index} acts on dimension {q}; only qubit channels are simulated")]
    ChannelDimension { index: usize, q: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("basis index {index} out of range for {n} qubits")]
    BasisIndex { index: usize, n: usize },
    #[error("{0} has a numerically zero projection onto the code space; pick another state")]
    ZeroProjection(StateSpec),
    #[error("decoding table does not match the code")]
    TableMismatch,
    #[error("code parameters are not exact; rerun the distance search with a larger budget")]
    InexactParams,
    #[error("bounded radius {t_prime} exceeds the correction radius {t}")]
    RadiusAboveT { t_prime: usize, t: usize },
    #[error("invalid state spec {0:?}; expected basis:<i> or random:<seed>")]
    BadStateSpec(String),
    #[error("invalid mode {0:?}; expected full or bounded:<t'>")]
    BadMode(String),
}

/// How the transmitted codeword is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StateSpec {
    /// Code-space projection of computational basis state `|i⟩`.
    Basis(usize),
    /// Code-space projection of a seeded complex Gaussian vector.
    Random(u64),
}

impl std::fmt::Display for StateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateSpec::Basis(i) => write!(f, "basis:{i}"),
            StateSpec::Random(s) => write!(f, "random:{s}"),
        }
    }
}

impl std::str::FromStr for StateSpec {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SimError::BadStateSpec(s.to_string());
        match s.split_once(':') {
            Some(("basis", i)) => i.parse().map(StateSpec::Basis).map_err(|_| bad()),
            Some(("random", seed)) => seed.parse().map(StateSpec::Random).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

/// Recovery policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// Always apply the minimum-weight leader.
    Full,
    /// Trust only leaders of weight `≤ t′`; other syndromes still apply their
    /// leader but are flagged.
    Bounded(usize),
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Full => f.write_str("full"),
            Mode::Bounded(t) => write!(f, "bounded:{t}"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "full" => Ok(Mode::Full),
            Some(("bounded", t)) => t.parse().map(Mode::Bounded).map_err(|_| SimError::BadMode(s.to_string())),
            _ => Err(SimError::BadMode(s.to_string())),
        }
    }
}

/// `2^n × 2^n` density operator; basis index bit `n−1−q` is qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: CMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCheck {
    pub hermitian_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

impl DensityCheck {
    pub fn is_valid(&self, tolerance: f64) -> bool {
        self.hermitian_deviation <= tolerance && self.trace_deviation <= tolerance && self.min_eigenvalue >= -1e-9
    }
}

impl DensityMatrix {
    pub fn from_matrix(n: usize, data: CMatrix) -> Result<Self, SimError> {
        let dim = 1usize << n;
        if data.nrows() != dim || data.ncols() != dim {
            return Err(SimError::Dimension { left: dim, right: data.nrows() });
        }
        Ok(Self { n, data })
    }

    pub fn pure(psi: &StateVector) -> Result<Self, SimError> {
        let dim = psi.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(SimError::Dimension { left: dim, right: dim.next_power_of_two() });
        }
        let n = dim.trailing_zeros() as usize;
        Ok(Self { n, data: psi * psi.adjoint() })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn check(&self) -> DensityCheck {
        let h = &self.data - self.data.adjoint();
        let hermitian_deviation = h.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let trace_deviation = (self.data.trace() - Complex64::new(1.0, 0.0)).norm();
        let herm = (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eigenvalue = SymmetricEigen::new(herm).eigenvalues.min();
        DensityCheck { hermitian_deviation, trace_deviation, min_eigenvalue }
    }
}

/// Precomputed action of a Pauli operator on basis states.
struct PauliAction {
    images: Vec<(usize, Complex64)>,
}

impl PauliAction {
    fn new(p: &PauliOperator) -> Self {
        let dim = 1usize << p.num_qubits();
        Self { images: (0..dim).map(|b| p.apply_to_basis(b)).collect() }
    }

    /// `P · m`.
    fn left(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for (b, &(img, coef)) in self.images.iter().enumerate() {
            for c in 0..m.ncols() {
                out[(img, c)] = coef * m[(b, c)];
            }
        }
        out
    }

    /// `m · P`.
    fn right(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for (c, &(img, coef)) in self.images.iter().enumerate() {
            for r in 0..m.nrows() {
                out[(r, c)] = m[(r, img)] * coef;
            }
        }
        out
    }

    fn apply_vec(&self, v: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(v.len());
        for (b, &(img, coef)) in self.images.iter().enumerate() {
            out[img] = coef * v[b];
        }
        out
    }
}

/// `Π_s = Π_j (I + (−1)^{s_j} g_j)/2`, applied by repeated half-sums.
struct SyndromeProjector {
    generators: Vec<PauliAction>,
}

impl SyndromeProjector {
    fn new(code: &StabilizerCode) -> Self {
        Self { generators: code.generators().iter().map(PauliAction::new).collect() }
    }

    fn sign(s: &Syndrome, j: usize) -> Complex64 {
        Complex64::new(if s.bit(j) { -1.0 } else { 1.0 }, 0.0)
    }

    fn left(&self, s: &Syndrome, m: &CMatrix) -> CMatrix {
        let half = Complex64::new(0.5, 0.0);
        self.generators.iter().enumerate().fold(m.clone(), |acc, (j, g)| {
            (&acc + g.left(&acc) * Self::sign(s, j)) * half
        })
    }

    fn right(&self, s: &Syndrome, m: &CMatrix) -> CMatrix {
        let half = Complex64::new(0.5, 0.0);
        self.generators.iter().enumerate().fold(m.clone(), |acc, (j, g)| {
            (&acc + g.right(&acc) * Self::sign(s, j)) * half
        })
    }

    fn sandwich(&self, s: &Syndrome, m: &CMatrix) -> CMatrix {
        self.right(s, &self.left(s, m))
    }

    fn project_vec(&self, v: &StateVector) -> StateVector {
        self.generators.iter().fold(v.clone(), |acc, g| (&acc + g.apply_vec(&acc)) * Complex64::new(0.5, 0.0))
    }
}

fn check_qubits(n: usize) -> Result<(), SimError> {
    if n > MAX_QUBITS {
        Err(SimError::TooManyQubits(n))
    } else {
        Ok(())
    }
}

/// Dense projectors onto every syndrome eigenspace, keyed by syndrome.
pub fn syndrome_projectors(code: &StabilizerCode) -> Result<Vec<(Syndrome, CMatrix)>, SimError> {
    check_qubits(code.n())?;
    let dim = 1usize << code.n();
    let proj = SyndromeProjector::new(code);
    let id = CMatrix::identity(dim, dim);
    let checks = code.num_checks();
    Ok((0..1u32 << checks)
        .map(|i| {
            let s = Syndrome::from_index(i, checks);
            (s, proj.left(&s, &id))
        })
        .collect())
}

/// A normalized vector in the code space.
pub fn codeword(code: &StabilizerCode, spec: StateSpec) -> Result<StateVector, SimError> {
    let n = code.n();
    check_qubits(n)?;
    let dim = 1usize << n;
    let seed_vec = match spec {
        StateSpec::Basis(index) => {
            if index >= dim {
                return Err(SimError::BasisIndex { index, n });
            }
            let mut v = StateVector::zeros(dim);
            v[index] = Complex64::new(1.0, 0.0);
            v
        }
        StateSpec::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            StateVector::from_fn(dim, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
        }
    };
    let projected = SyndromeProjector::new(code).project_vec(&seed_vec);
    let norm = projected.norm();
    if norm < 1e-8 * seed_vec.norm() {
        return Err(SimError::ZeroProjection(spec));
    }
    Ok(projected / Complex64::new(norm, 0.0))
}

/// The first `count` basis indices whose projection onto the code space is nonzero.
pub fn basis_codeword_specs(code: &StabilizerCode, count: usize) -> Vec<StateSpec> {
    (0..1usize << code.n())
        .map(StateSpec::Basis)
        .filter(|s| codeword(code, *s).is_ok())
        .take(count)
        .collect()
}

/// Applies `2×2` operator `k` on qubit `q` from the left.
fn local_left(k: &CMatrix, q: usize, n: usize, m: &CMatrix) -> CMatrix {
    let bit = 1usize << (n - 1 - q);
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    let (k00, k01, k10, k11) = (k[(0, 0)], k[(0, 1)], k[(1, 0)], k[(1, 1)]);
    for r0 in (0..m.nrows()).filter(|r| r & bit == 0) {
        let r1 = r0 | bit;
        for c in 0..m.ncols() {
            let (a, b) = (m[(r0, c)], m[(r1, c)]);
            out[(r0, c)] = k00 * a + k01 * b;
            out[(r1, c)] = k10 * a + k11 * b;
        }
    }
    out
}

/// `ρ ↦ (⊗_q Γ_q)(ρ)`, one site at a time.
pub fn apply_product_channel(rho: &DensityMatrix, channels: &[Channel]) -> Result<DensityMatrix, SimError> {
    let n = rho.n;
    check_qubits(n)?;
    if channels.len() != n {
        return Err(SimError::ChannelCount { expected: n, found: channels.len() });
    }
    let mut data = rho.data.clone();
    for (q, ch) in channels.iter().enumerate() {
        if ch.q() != 2 {
            return Err(SimError::ChannelDimension { index: q, q: ch.q() });
        }
        ch.ensure_valid(crate::channel::DEFAULT_TOLERANCE)?;
        let mut next = CMatrix::zeros(data.nrows(), data.ncols());
        for k in ch.kraus() {
            // K ρ K† = (K (K ρ)†)†
            let left = local_left(k, q, n, &data);
            next += local_left(k, q, n, &left.adjoint()).adjoint();
        }
        data = next;
    }
    Ok(DensityMatrix { n, data })
}

/// `⟨φ|ρ|φ⟩`.
pub fn fidelity(phi: &StateVector, rho: &DensityMatrix) -> Result<f64, SimError> {
    if phi.len() != rho.data.nrows() {
        return Err(SimError::Dimension { left: phi.len(), right: rho.data.nrows() });
    }
    Ok((phi.adjoint() * &rho.data * phi)[(0, 0)].re)
}

/// One measurement outcome after recovery.
#[derive(Debug, Clone)]
pub struct Branch {
    pub syndrome: Syndrome,
    pub probability: f64,
    pub leader: PauliOperator,
    pub ambiguous: bool,
    /// Leader weight exceeds `t′` in bounded mode.
    pub beyond_radius: bool,
    /// Recovered, renormalized state; `None` for negligible branches.
    pub state: Option<DensityMatrix>,
}

/// Measures the syndrome of `rho` and applies the table's recovery in each branch.
pub fn error_correct(
    rho: &DensityMatrix,
    code: &StabilizerCode,
    table: &DecodingTable,
    mode: Mode,
) -> Result<Vec<Branch>, SimError> {
    let n = code.n();
    check_qubits(n)?;
    if rho.n != n {
        return Err(SimError::Dimension { left: 1 << n, right: rho.data.nrows() });
    }
    if table.num_qubits() != n || table.num_checks() != code.num_checks() {
        return Err(SimError::TableMismatch);
    }
    let proj = SyndromeProjector::new(code);
    let mut branches = Vec::with_capacity(table.len());
    for (s, entry) in table.iter() {
        let projected = proj.sandwich(&s, &rho.data);
        let probability = projected.trace().re;
        let beyond_radius = matches!(mode, Mode::Bounded(tp) if entry.leader.weight() > tp);
        let state = if probability < MIN_BRANCH_PROBABILITY {
            None
        } else {
            // Pauli operators are unitary; conjugation by M or M⁻¹ is the same map
            let m = PauliAction::new(&entry.leader.inverse());
            let recovered = conjugate(&m, &projected);
            Some(DensityMatrix { n, data: recovered / Complex64::new(probability, 0.0) })
        };
        branches.push(Branch {
            syndrome: s,
            probability,
            leader: entry.leader,
            ambiguous: entry.ambiguous,
            beyond_radius,
            state,
        });
    }
    Ok(branches)
}

/// `A ρ A†` for a Pauli action `A`.
fn conjugate(a: &PauliAction, m: &CMatrix) -> CMatrix {
    // (A m) A† = (A (A m)†)†
    let left = a.left(m);
    a.left(&left.adjoint()).adjoint()
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    pub syndrome: String,
    pub probability: f64,
    pub fidelity: Option<f64>,
    pub leader: String,
    pub leader_weight: usize,
    pub ambiguous: bool,
    pub beyond_radius: bool,
}

/// A bound the simulated fidelity is checked against.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub label: String,
    pub epsilon: f64,
    pub fidelity_lb: f64,
    /// `average_fidelity − (1 − ε)`.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub mode: String,
    pub state: Option<String>,
    pub branches: Vec<BranchRecord>,
    pub probability_total: f64,
    pub average_fidelity: f64,
    /// Largest per-site non-identity mass.
    pub p_max: f64,
    /// True when every site carries the same channel.
    pub memoryless: bool,
    pub paper: BoundReport,
    pub product_epsilon: f64,
    pub bounded: Option<BoundReport>,
    pub checks: Vec<BoundCheck>,
}

impl SimulationReport {
    pub fn dominance_holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn bound_check(label: &str, epsilon: f64, average: f64) -> BoundCheck {
    let fidelity_lb = 1.0 - epsilon;
    let margin = average - fidelity_lb;
    BoundCheck { label: label.to_string(), epsilon, fidelity_lb, margin, holds: margin >= -DOMINANCE_SLACK }
}

/// A code with its decoding table and parameters, ready for repeated runs.
#[derive(Debug, Clone)]
pub struct Simulator {
    code: StabilizerCode,
    table: DecodingTable,
    params: CodeParams,
    t: usize,
}

impl Simulator {
    pub fn new(code: StabilizerCode) -> Result<Self, SimError> {
        check_qubits(code.n())?;
        let params = code.params(code.n())?;
        let table = code.decoding_table()?;
        Self::with_parts(code, table, params)
    }

    pub fn with_parts(code: StabilizerCode, table: DecodingTable, params: CodeParams) -> Result<Self, SimError> {
        check_qubits(code.n())?;
        let t = params.t().ok_or(SimError::InexactParams)?;
        if table.num_qubits() != code.n() || table.num_checks() != code.num_checks() {
            return Err(SimError::TableMismatch);
        }
        Ok(Self { code, table, params, t })
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn table(&self) -> &DecodingTable {
        &self.table
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn run(&self, channels: &[Channel], spec: StateSpec, mode: Mode) -> Result<SimulationReport, SimError> {
        let phi = codeword(&self.code, spec)?;
        let mut report = self.run_with_state(channels, &phi, mode)?;
        report.state = Some(spec.to_string());
        Ok(report)
    }

    /// Runs the pipeline for an explicit code-space vector `phi`.
    pub fn run_with_state(&self, channels: &[Channel], phi: &StateVector, mode: Mode) -> Result<SimulationReport, SimError> {
        let n = self.code.n();
        if channels.len() != n {
            return Err(SimError::ChannelCount { expected: n, found: channels.len() });
        }
        if phi.len() != 1 << n {
            return Err(SimError::Dimension { left: 1 << n, right: phi.len() });
        }
        if let Mode::Bounded(t_prime) = mode {
            if t_prime > self.t {
                return Err(SimError::RadiusAboveT { t_prime, t: self.t });
            }
        }
        let sites = channels
            .iter()
            .map(|ch| ch.pauli_mass().map(|m| SiteMass { ell0: m.ell0(), ell1: m.p() }))
            .collect::<Result<Vec<_>, _>>()?;
        let p_max = sites.iter().map(|s| s.ell1).fold(0.0, f64::max).min(1.0);

        let rho = DensityMatrix::pure(phi)?;
        let noisy = apply_product_channel(&rho, channels)?;
        let branches = error_correct(&noisy, &self.code, &self.table, mode)?;

        let mut records = Vec::with_capacity(branches.len());
        let mut average = 0.0;
        let mut probability_total = 0.0;
        for b in &branches {
            probability_total += b.probability;
            let fid = b.state.as_ref().map(|st| fidelity(phi, st)).transpose()?;
            if let Some(f) = fid {
                average += b.probability * f;
            }
            records.push(BranchRecord {
                syndrome: b.syndrome.to_string(),
                probability: b.probability,
                fidelity: fid,
                leader: b.leader.pattern(),
                leader_weight: b.leader.weight(),
                ambiguous: b.ambiguous,
                beyond_radius: b.beyond_radius,
            });
        }

        let paper = bound::paper_bound(n, self.t, p_max)?;
        let product_epsilon = bound::product_bound(&sites, self.t)?;
        let bounded = match mode {
            Mode::Full => None,
            Mode::Bounded(tp) => Some(bound::bounded_distance_bound(n, tp, p_max)?),
        };
        let mut checks = vec![
            bound_check("product form (exact per-site masses)", product_epsilon, average),
            bound_check("binomial tail sum_{i>t} C(n,i) p^i", paper.epsilon, average),
        ];
        if let Some(b) = &bounded {
            checks.push(bound_check("bounded distance sum_{i>t'} C(n,i) p^i", b.epsilon, average));
        }
        let memoryless = channels.windows(2).all(|w| w[0] == w[1]);
        Ok(SimulationReport {
            n,
            k: self.code.k(),
            t: self.t,
            mode: mode.to_string(),
            state: None,
            branches: records,
            probability_total,
            average_fidelity: average,
            p_max,
            memoryless,
            paper,
            product_epsilon,
            bounded,
            checks,
        })
    }
}

/// One-shot helper: builds the decoder for `code` and runs a single simulation.
pub fn average_fidelity(
    code: &StabilizerCode,
    channels: &[Channel],
    spec: StateSpec,
    mode: Mode,
) -> Result<SimulationReport, SimError> {
    Simulator::new(code.clone())?.run(channels, spec, mode)
}

/// `n` copies of the same channel.
pub fn memoryless(ch: &Channel, n: usize) -> Vec<Channel> {
    vec![ch.clone(); n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelKind;
    use crate::stabilizer::library;

    fn ket(bits: &[f64]) -> StateVector {
        StateVector::from_iterator(bits.len(), bits.iter().map(|&b| Complex64::new(b, 0.0)))
    }

    #[test]
    fn single_qubit_codeword() {
        let code = StabilizerCode::parse("+Z").unwrap();
        let v = codeword(&code, StateSpec::Basis(0)).unwrap();
        assert_eq!(v, ket(&[1.0, 0.0]));
        assert!(matches!(codeword(&code, StateSpec::Basis(1)), Err(SimError::ZeroProjection(_))));
        assert!(matches!(codeword(&code, StateSpec::Basis(2)), Err(SimError::BasisIndex { .. })));
    }

    #[test]
    fn codewords_are_stabilized() {
        for code in [library::five_qubit(), library::steane(), library::four_two_two()] {
            for spec in [StateSpec::Random(1), StateSpec::Random(2)].into_iter().chain(basis_codeword_specs(&code, 2)) {
                let v = codeword(&code, spec).unwrap();
                for g in code.generators() {
                    let gv = PauliAction::new(g).apply_vec(&v);
                    assert!((gv - &v).norm() < 1e-10);
                }
            }
        }
        // |0000001⟩ is orthogonal to the Steane code space
        let steane = library::steane();
        assert!(codeword(&steane, StateSpec::Basis(1)).is_err());
    }

    #[test]
    fn projector_family() {
        let z = StabilizerCode::parse("+Z").unwrap();
        let ps = syndrome_projectors(&z).unwrap();
        assert_eq!(ps[0].1, CMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0))));
        assert_eq!(ps[1].1, CMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0].map(|x| Complex64::new(x, 0.0))));

        let ps = syndrome_projectors(&library::five_qubit()).unwrap();
        assert_eq!(ps.len(), 16);
        let mut sum = CMatrix::zeros(32, 32);
        for (i, (_, a)) in ps.iter().enumerate() {
            assert!((a.trace().re - 2.0).abs() < 1e-10);
            sum += a;
            for (j, (_, b)) in ps.iter().enumerate() {
                let prod = a * b;
                let want = if i == j { a.clone() } else { CMatrix::zeros(32, 32) };
                assert!((prod - want).iter().all(|c| c.norm() < 1e-10));
            }
        }
        assert!((sum - CMatrix::identity(32, 32)).iter().all(|c| c.norm() < 1e-10));
    }

    #[test]
    fn channel_application() {
        let rho = DensityMatrix::pure(&ket(&[1.0, 0.0])).unwrap();
        let out = apply_product_channel(&rho, &[ChannelKind::BitFlip(0.2).build().unwrap()]).unwrap();
        assert!((out.matrix()[(0, 0)].re - 0.8).abs() < 1e-15);
        assert!((out.matrix()[(1, 1)].re - 0.2).abs() < 1e-15);

        let s = 0.5f64.sqrt();
        let plus_i = StateVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
        let out = apply_product_channel(&DensityMatrix::pure(&plus_i).unwrap(), &[ChannelKind::Depolarizing(1.0).build().unwrap()]).unwrap();
        let half = CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        assert!((out.matrix() - half).iter().all(|c| c.norm() < 1e-15));

        let code = library::five_qubit();
        let phi = codeword(&code, StateSpec::Random(4)).unwrap();
        let rho = DensityMatrix::pure(&phi).unwrap();
        let ids = memoryless(&ChannelKind::Identity.build().unwrap(), 5);
        assert_eq!(apply_product_channel(&rho, &ids).unwrap(), rho);
        assert!(matches!(apply_product_channel(&rho, &ids[..4]), Err(SimError::ChannelCount { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let zero = ket(&[1.0, 0.0]);
        let one = ket(&[0.0, 1.0]);
        assert!((fidelity(&zero, &DensityMatrix::pure(&zero).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::from_matrix(1, CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(fidelity(&zero, &mixed).unwrap(), 0.5);
        assert_eq!(fidelity(&zero, &DensityMatrix::pure(&one).unwrap()).unwrap(), 0.0);
        assert!(matches!(fidelity(&ket(&[1.0, 0.0, 0.0, 0.0]), &mixed), Err(SimError::Dimension { .. })));
    }

    #[test]
    fn noiseless_branch() {
        let code = library::five_qubit();
        let table = code.decoding_table().unwrap();
        let phi = codeword(&code, StateSpec::Basis(0)).unwrap();
        let rho = DensityMatrix::pure(&phi).unwrap();
        let branches = error_correct(&rho, &code, &table, Mode::Full).unwrap();
        let live: Vec<_> = branches.iter().filter(|b| b.state.is_some()).collect();
        assert_eq!(live.len(), 1);
        assert!(live[0].syndrome.is_zero());
        assert!((live[0].probability - 1.0).abs() < 1e-12);
        let diff = live[0].state.as_ref().unwrap().matrix() - rho.matrix();
        assert!(diff.iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn deterministic_single_error_is_corrected() {
        let sim = Simulator::new(library::five_qubit()).unwrap();
        let mut chs = memoryless(&ChannelKind::Identity.build().unwrap(), 5);
        chs[0] = ChannelKind::Pauli('X').build().unwrap();
        let r = sim.run(&chs, StateSpec::Random(9), Mode::Full).unwrap();
        let hit: Vec<_> = r.branches.iter().filter(|b| b.probability > 0.5).collect();
        assert_eq!(hit.len(), 1);
        assert_eq!(hit[0].syndrome, "0001");
        assert!((r.average_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_channels_give_unit_fidelity() {
        let sim = Simulator::new(library::steane()).unwrap();
        let chs = memoryless(&ChannelKind::Identity.build().unwrap(), 7);
        let r = sim.run(&chs, StateSpec::Basis(0), Mode::Full).unwrap();
        assert!((r.average_fidelity - 1.0).abs() < 1e-12);
        assert!(r.dominance_holds());
    }

    #[test]
    fn mode_and_state_parsing() {
        assert_eq!("full".parse::<Mode>().unwrap(), Mode::Full);
        assert_eq!("bounded:1".parse::<Mode>().unwrap(), Mode::Bounded(1));
        assert!("bounded".parse::<Mode>().is_err());
        assert_eq!("basis:3".parse::<StateSpec>().unwrap(), StateSpec::Basis(3));
        assert_eq!("random:42".parse::<StateSpec>().unwrap(), StateSpec::Random(42));
        assert!("x:1".parse::<StateSpec>().is_err());
    }

    #[test]
    fn bounded_radius_above_t_is_rejected() {
        let sim = Simulator::new(library::five_qubit()).unwrap();
        let chs = memoryless(&ChannelKind::Depolarizing(0.04).build().unwrap(), 5);
        assert!(matches!(
            sim.run(&chs, StateSpec::Basis(0), Mode::Bounded(2)),
            Err(SimError::RadiusAboveT { t_prime: 2, t: 1 })
        ));
        let r = sim.run(&chs, StateSpec::Basis(0), Mode::Bounded(0)).unwrap();
        assert_eq!(r.branches.iter().filter(|b| b.beyond_radius).count(), 15);
        assert!(r.dominance_holds());
    }

    #[test]
    fn noisy_state_is_a_density_matrix() {
        let code = library::five_qubit();
        let phi = codeword(&code, StateSpec::Random(3)).unwrap();
        let rho = DensityMatrix::pure(&phi).unwrap();
        let chs = memoryless(&ChannelKind::AmplitudeDamping(0.2).build().unwrap(), 5);
        let noisy = apply_product_channel(&rho, &chs).unwrap();
        assert!(noisy.check().is_valid(1e-10), "{:?}", noisy.check());
        let table = code.decoding_table().unwrap();
        let branches = error_correct(&noisy, &code, &table, Mode::Full).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for b in branches.iter().filter_map(|b| b.state.as_ref()) {
            assert!(b.check().is_valid(1e-9));
        }
    }
}
