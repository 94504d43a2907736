//! Stabilizer codes over qubits.
//!
//! The code space is the joint `+1` eigenspace of the signed generators as
//! given. Syndromes label the `2^{n-k}` joint eigenspaces; bit `j` is set when
//! an error anticommutes with generator `j`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::pauli::{enumerate_up_to_weight, PauliError, PauliOperator};

/// Largest `n − k` for which a full decoding table is built.
pub const MAX_TABLE_CHECKS: usize = 20;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("no generators given")]
    NoGenerators,
    #[error("{count} generators on {n} qubits; at most n are allowed")]
    TooManyGenerators { count: usize, n: usize },
    #[error("generator {index} has {found} qubits, expected {expected}")]
    LengthMismatch { index: usize, expected: usize, found: usize },
    #[error("generators {first} and {second} anticommute")]
    NonCommuting { first: usize, second: usize },
    #[error("generator {index} is linearly dependent on the preceding generators")]
    Dependent { index: usize },
    #[error("generator {index} is not Hermitian")]
    NonHermitian { index: usize },
    #[error("operator has {found} qubits, code has {expected}")]
    OperatorLength { expected: usize, found: usize },
    #[error("syndrome has {found} bits, code has {expected} generators")]
    SyndromeLength { expected: usize, found: usize },
    #[error("distance undefined for zero-dimensional logical space (k = 0)")]
    NoLogicalSpace,
    #[error("weight budget {budget} exceeds code length {n}")]
    BudgetTooLarge { budget: usize, n: usize },
    #[error("decoding table needs 2^{checks} entries; limit is 2^{MAX_TABLE_CHECKS}")]
    TableTooLarge { checks: usize },
    #[error("no coset leader found for syndrome {0}")]
    NoLeader(Syndrome),
    #[error("line {line}: {source}")]
    Parse { line: usize, source: PauliError },
    #[error("line {line}: expected {expected} qubits, found {found}")]
    ParseLength { line: usize, expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Syndrome bits, one per generator; bit `j` of the integer is generator `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome {
    bits: u32,
    len: usize,
}

impl Syndrome {
    pub fn from_index(index: u32, len: usize) -> Self {
        assert!(len <= 32 && (len == 32 || index >> len == 0));
        Self { bits: index, len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let index = bits.iter().enumerate().fold(0u32, |acc, (j, &b)| acc | (b as u32) << j);
        Self::from_index(index, bits.len())
    }

    pub fn index(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, j: usize) -> bool {
        self.bits >> j & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|j| self.bit(j)).collect()
    }

    pub fn xor(&self, other: &Self) -> Self {
        Self { bits: self.bits ^ other.bits, len: self.len }
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.bit(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StabilizerCode {
    n: usize,
    generators: Vec<PauliOperator>,
    /// Row-reduced generator rows as `(pivot bit, row)`.
    echelon: Vec<(u32, u128)>,
}

impl StabilizerCode {
    pub fn new(generators: Vec<PauliOperator>) -> Result<Self, CodeError> {
        let first = generators.first().ok_or(CodeError::NoGenerators)?;
        let n = first.num_qubits();
        if generators.len() > n {
            return Err(CodeError::TooManyGenerators { count: generators.len(), n });
        }
        for (index, g) in generators.iter().enumerate() {
            if g.num_qubits() != n {
                return Err(CodeError::LengthMismatch { index, expected: n, found: g.num_qubits() });
            }
            if !g.is_hermitian() {
                return Err(CodeError::NonHermitian { index });
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for (j, b) in generators.iter().enumerate().skip(i + 1) {
                if a.symplectic_product(b) != 0 {
                    return Err(CodeError::NonCommuting { first: i, second: j });
                }
            }
        }
        let mut echelon: Vec<(u32, u128)> = Vec::with_capacity(generators.len());
        for (index, g) in generators.iter().enumerate() {
            let row = reduce(&echelon, g.symplectic_row());
            if row == 0 {
                return Err(CodeError::Dependent { index });
            }
            let pivot = row.trailing_zeros();
            // keep the basis fully reduced on its pivot columns
            for (_, r) in echelon.iter_mut() {
                if *r >> pivot & 1 == 1 {
                    *r ^= row;
                }
            }
            echelon.push((pivot, row));
        }
        Ok(Self { n, generators, echelon })
    }

    /// Reads the text code format: `#` comments, one signed Pauli string per line.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let mut gens: Vec<PauliOperator> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let g: PauliOperator = line
                .parse()
                .map_err(|source| CodeError::Parse { line: line_no, source })?;
            if let Some(first) = gens.first() {
                if first.num_qubits() != g.num_qubits() {
                    return Err(CodeError::ParseLength {
                        line: line_no,
                        expected: first.num_qubits(),
                        found: g.num_qubits(),
                    });
                }
            }
            gens.push(g);
        }
        Self::new(gens)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, CodeError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.generators {
            out.push_str(&g.to_signed_string().expect("generators are Hermitian"));
            out.push('\n');
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.n - self.generators.len()
    }

    pub fn num_checks(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    fn check_len(&self, p: &PauliOperator) -> Result<(), CodeError> {
        if p.num_qubits() == self.n {
            Ok(())
        } else {
            Err(CodeError::OperatorLength { expected: self.n, found: p.num_qubits() })
        }
    }

    pub fn syndrome(&self, p: &PauliOperator) -> Result<Syndrome, CodeError> {
        self.check_len(p)?;
        Ok(self.syndrome_unchecked(p))
    }

    pub(crate) fn syndrome_unchecked(&self, p: &PauliOperator) -> Syndrome {
        let bits = self
            .generators
            .iter()
            .enumerate()
            .fold(0u32, |acc, (j, g)| acc | g.symplectic_product(p) << j);
        Syndrome { bits, len: self.generators.len() }
    }

    /// Whether the bit pattern of `p` lies in the GF(2) span of the generators,
    /// i.e. `p` is in the stabilizer group up to phase.
    pub fn in_stabilizer_mod_phase(&self, p: &PauliOperator) -> Result<bool, CodeError> {
        self.check_len(p)?;
        Ok(self.in_stabilizer_unchecked(p))
    }

    pub(crate) fn in_stabilizer_unchecked(&self, p: &PauliOperator) -> bool {
        reduce(&self.echelon, p.symplectic_row()) == 0
    }

    /// Whether `p` commutes with every generator, i.e. maps the code space to itself.
    pub fn in_normalizer(&self, p: &PauliOperator) -> Result<bool, CodeError> {
        Ok(self.syndrome(p)?.is_zero())
    }

    /// Brute-force `d`, `d′` by enumerating operators of weight `1..=weight_budget`.
    pub fn params(&self, weight_budget: usize) -> Result<CodeParams, CodeError> {
        if weight_budget > self.n {
            return Err(CodeError::BudgetTooLarge { budget: weight_budget, n: self.n });
        }
        if self.k() == 0 {
            return Err(CodeError::NoLogicalSpace);
        }
        let mut d = None;
        let mut d_prime = None;
        for p in enumerate_up_to_weight(self.n, weight_budget).skip(1) {
            if d.is_some() {
                break;
            }
            if !self.syndrome_unchecked(&p).is_zero() {
                continue;
            }
            let w = p.weight();
            d_prime.get_or_insert(w);
            if !self.in_stabilizer_unchecked(&p) {
                d = Some(w);
            }
        }
        let above = weight_budget + 1;
        let d = d.map_or(Distance::AtLeast(above), Distance::Exact);
        let d_prime = d_prime.map_or(Distance::AtLeast(above), Distance::Exact);
        Ok(CodeParams::new(d, d_prime))
    }

    /// Minimum-weight operator with syndrome `s`, first in enumeration order,
    /// and whether a different equal-weight leader exists outside `±leader·S`.
    pub fn coset_leader(&self, s: &Syndrome) -> Result<(PauliOperator, bool), CodeError> {
        if s.len() != self.num_checks() {
            return Err(CodeError::SyndromeLength { expected: self.num_checks(), found: s.len() });
        }
        let mut leader: Option<PauliOperator> = None;
        for p in enumerate_up_to_weight(self.n, self.n) {
            if let Some(m) = &leader {
                if p.weight() > m.weight() {
                    break;
                }
            }
            if self.syndrome_unchecked(&p) != *s {
                continue;
            }
            match &leader {
                None => leader = Some(p),
                Some(m) => {
                    let rel = m.mul(&p).expect("equal lengths");
                    if !self.in_stabilizer_unchecked(&rel) {
                        return Ok((*m, true));
                    }
                }
            }
        }
        leader.map(|m| (m, false)).ok_or(CodeError::NoLeader(*s))
    }

    pub fn decoding_table(&self) -> Result<DecodingTable, CodeError> {
        let checks = self.num_checks();
        if checks > MAX_TABLE_CHECKS {
            return Err(CodeError::TableTooLarge { checks });
        }
        let size = 1usize << checks;
        let mut entries: Vec<Option<TableEntry>> = vec![None; size];
        let mut filled = 0usize;
        let mut max_weight: Option<usize> = None;
        for p in enumerate_up_to_weight(self.n, self.n) {
            let w = p.weight();
            if let Some(mw) = max_weight {
                if w > mw {
                    break;
                }
            }
            let s = self.syndrome_unchecked(&p);
            match &mut entries[s.index() as usize] {
                slot @ None => {
                    *slot = Some(TableEntry { leader: p, ambiguous: false });
                    filled += 1;
                    if filled == size {
                        // finish this weight level to settle ambiguity flags
                        max_weight = Some(w);
                    }
                }
                Some(entry) => {
                    if !entry.ambiguous && entry.leader.weight() == w {
                        let rel = entry.leader.mul(&p).expect("equal lengths");
                        if !self.in_stabilizer_unchecked(&rel) {
                            entry.ambiguous = true;
                        }
                    }
                }
            }
        }
        let entries = entries
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or(CodeError::NoLeader(Syndrome::from_index(i as u32, checks))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DecodingTable { n: self.n, checks, entries })
    }

    /// Exhaustively checks that every operator of weight `≤ t` is recovered by
    /// its table leader up to a stabilizer element.
    pub fn verify_coset_leaders(&self, params: &CodeParams, table: &DecodingTable) -> bool {
        let Some(t) = params.t() else {
            return false;
        };
        if table.n != self.n || table.checks != self.num_checks() {
            return false;
        }
        enumerate_up_to_weight(self.n, t).all(|p| {
            let leader = table.leader(&self.syndrome_unchecked(&p));
            let rel = leader.inverse().mul(&p).expect("equal lengths");
            self.in_stabilizer_unchecked(&rel)
        })
    }

    /// Same code with qubit `q` moved to position `perm[q]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, CodeError> {
        let gens = self.generators.iter().map(|g| permute(g, perm)).collect();
        Self::new(gens)
    }
}

pub(crate) fn permute(p: &PauliOperator, perm: &[usize]) -> PauliOperator {
    let (mut x, mut z) = (0u64, 0u64);
    for (q, &to) in perm.iter().enumerate() {
        x |= (p.x_at(q) as u64) << to;
        z |= (p.z_at(q) as u64) << to;
    }
    PauliOperator::from_bits(p.num_qubits(), p.phase_exp(), x, z)
}

fn reduce(echelon: &[(u32, u128)], mut row: u128) -> u128 {
    for &(pivot, r) in echelon {
        if row >> pivot & 1 == 1 {
            row ^= r;
        }
    }
    row
}

/// A distance that is either known or bounded below because the search budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    Exact(usize),
    AtLeast(usize),
}

impl Distance {
    pub fn exact(&self) -> Option<usize> {
        match *self {
            Distance::Exact(d) => Some(d),
            Distance::AtLeast(_) => None,
        }
    }

    pub fn value(&self) -> usize {
        match *self {
            Distance::Exact(d) | Distance::AtLeast(d) => d,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::AtLeast(d) => write!(f, ">={d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeParams {
    pub d: Distance,
    pub d_prime: Distance,
}

impl CodeParams {
    pub fn new(d: Distance, d_prime: Distance) -> Self {
        Self { d, d_prime }
    }

    pub fn is_exact(&self) -> bool {
        matches!((self.d, self.d_prime), (Distance::Exact(_), Distance::Exact(_)))
    }

    /// Correction radius `⌊(d−1)/2⌋`, known only when `d` is exact.
    pub fn t(&self) -> Option<usize> {
        self.d.exact().map(|d| (d - 1) / 2)
    }

    /// `⌊(d′−1)/2⌋`, the radius below which leaders are unique up to `S`.
    pub fn unique_radius(&self) -> Option<usize> {
        self.d_prime.exact().map(|d| (d - 1) / 2)
    }

    pub fn is_pure(&self) -> Option<bool> {
        match (self.d, self.d_prime) {
            (Distance::Exact(d), Distance::Exact(dp)) => Some(d == dp),
            (Distance::AtLeast(_), Distance::Exact(_)) => Some(false),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableEntry {
    pub leader: PauliOperator,
    pub ambiguous: bool,
}

/// Syndrome → minimum-weight recovery operator, indexed by syndrome integer.
#[derive(Debug, Clone)]
pub struct DecodingTable {
    n: usize,
    checks: usize,
    entries: Vec<TableEntry>,
}

impl DecodingTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_checks(&self) -> usize {
        self.checks
    }

    pub fn entry(&self, s: &Syndrome) -> &TableEntry {
        &self.entries[s.index() as usize]
    }

    pub fn leader(&self, s: &Syndrome) -> &PauliOperator {
        &self.entry(s).leader
    }

    pub fn iter(&self) -> impl Iterator<Item = (Syndrome, &TableEntry)> {
        let checks = self.checks;
        self.entries
            .iter()
            .enumerate()
            .map(move |(i, e)| (Syndrome::from_index(i as u32, checks), e))
    }

    /// Leader lookup keyed by bit pattern, handy for set comparisons in tests.
    pub fn leaders_by_key(&self) -> HashMap<u128, Syndrome> {
        self.iter().map(|(s, e)| (e.leader.key(), s)).collect()
    }
}

/// Bundled example codes.
pub mod library {
    use super::StabilizerCode;

    pub const FIVE_QUBIT: &str = include_str!("../assets/five_qubit.stab");
    pub const STEANE: &str = include_str!("../assets/steane.stab");
    pub const FOUR_TWO_TWO: &str = include_str!("../assets/four_two_two.stab");

    pub fn five_qubit() -> StabilizerCode {
        StabilizerCode::parse(FIVE_QUBIT).expect("bundled code is valid")
    }

    pub fn steane() -> StabilizerCode {
        StabilizerCode::parse(STEANE).expect("bundled code is valid")
    }

    pub fn four_two_two() -> StabilizerCode {
        StabilizerCode::parse(FOUR_TWO_TWO).expect("bundled code is valid")
    }
}
