//! Symplectic representation of n-qubit Pauli operators.
//!
//! An operator is stored as `i^phase · X(x) · Z(z)` with the X factors to the
//! left of the Z factors. Bit `q` of `x` and `z` refers to qubit `q`, and
//! qubit 0 is the leftmost letter of a Pauli string and the most significant
//! tensor factor of the matrix representation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

/// Largest supported qubit count (bit vectors are packed into a `u64`).
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("empty Pauli string")]
    Empty,
    #[error("illegal character {found:?} at column {column}")]
    IllegalCharacter { column: usize, found: char },
    #[error("Pauli string has {0} qubits; at most {MAX_QUBITS} are supported")]
    TooLong(usize),
    #[error("length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },
    #[error("operator has an overall phase of ±i and cannot be written as a signed Pauli string")]
    NonHermitianPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    phase_exp: u8,
    x: u64,
    z: u64,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        assert!((1..=MAX_QUBITS).contains(&n), "qubit count {n} out of range");
        Self { n, phase_exp: 0, x: 0, z: 0 }
    }

    /// Builds `i^phase_exp X(x) Z(z)`; bits above `n` are rejected.
    pub fn from_bits(n: usize, phase_exp: u8, x: u64, z: u64) -> Self {
        assert!((1..=MAX_QUBITS).contains(&n), "qubit count {n} out of range");
        assert!(x & !mask(n) == 0 && z & !mask(n) == 0, "bits outside {n} qubits");
        Self { n, phase_exp: phase_exp % 4, x, z }
    }

    /// Single-qubit operator `letter` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: char) -> Self {
        assert!(qubit < n);
        let b = 1u64 << qubit;
        match letter {
            'I' => Self::identity(n),
            'X' => Self::from_bits(n, 0, b, 0),
            'Z' => Self::from_bits(n, 0, 0, b),
            'Y' => Self::from_bits(n, 1, b, b),
            _ => panic!("unknown Pauli letter {letter:?}"),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn x_at(&self, q: usize) -> bool {
        self.x >> q & 1 == 1
    }

    pub fn z_at(&self, q: usize) -> bool {
        self.z >> q & 1 == 1
    }

    /// Same bit pattern with phase dropped.
    pub fn unsigned(&self) -> Self {
        Self { phase_exp: 0, ..*self }
    }

    pub fn with_phase(&self, phase_exp: u8) -> Self {
        Self { phase_exp: phase_exp % 4, ..*self }
    }

    pub fn is_identity_mod_phase(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of positions carrying a non-identity factor.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// `(phase + |x ∧ z|)` even means the operator squares to `+I`, i.e. it is Hermitian.
    pub fn is_hermitian(&self) -> bool {
        (self.phase_exp as u32 + (self.x & self.z).count_ones()).is_multiple_of(2)
    }

    /// Enumeration key: `x‖z` read as an integer, with `x` in the high half.
    pub fn key(&self) -> u128 {
        ((self.x as u128) << self.n) | self.z as u128
    }

    /// Packed `x‖z` row used for GF(2) linear algebra (`z` in the high half).
    pub(crate) fn symplectic_row(&self) -> u128 {
        self.x as u128 | (self.z as u128) << 64
    }

    fn check_len(&self, other: &Self) -> Result<(), PauliError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(PauliError::LengthMismatch { left: self.n, right: other.n })
        }
    }

    /// Matrix product `self · other`.
    ///
    /// Moving `Z(z1)` past `X(x2)` costs `(-1)^{z1·x2}`, hence the extra `2·(z1·x2)` in the phase.
    pub fn mul(&self, other: &Self) -> Result<Self, PauliError> {
        self.check_len(other)?;
        let swap = (self.z & other.x).count_ones() as u8 % 2;
        Ok(Self {
            n: self.n,
            phase_exp: (self.phase_exp + other.phase_exp + 2 * swap) % 4,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        })
    }

    /// Matrix inverse, which for a Pauli operator is its adjoint.
    pub fn inverse(&self) -> Self {
        // (i^p X Z)^{-1} = i^{-p} Z X = i^{-p} (-1)^{x·z} X Z
        let overlap = (self.x & self.z).count_ones() as u8 % 2;
        Self { phase_exp: (8 - self.phase_exp + 2 * overlap) % 4, ..*self }
    }

    pub fn commutes(&self, other: &Self) -> Result<bool, PauliError> {
        self.check_len(other)?;
        Ok(self.symplectic_product(other) == 0)
    }

    /// `x·z' + z·x' mod 2`; caller guarantees equal lengths.
    pub(crate) fn symplectic_product(&self, other: &Self) -> u32 {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2
    }

    /// Action on a computational basis state: returns `(image index, coefficient)`.
    ///
    /// Basis index bit `n-1-q` is qubit `q`.
    pub fn apply_to_basis(&self, index: usize) -> (usize, Complex64) {
        let b = self.qubit_mask_to_index(self.x);
        let zi = self.qubit_mask_to_index(self.z);
        let sign = (zi & index).count_ones() % 2;
        let exp = (self.phase_exp as u32 + 2 * sign) % 4;
        (index ^ b, phase_value(exp as u8))
    }

    /// Converts a qubit-indexed bit mask into a basis-index mask.
    pub(crate) fn qubit_mask_to_index(&self, bits: u64) -> usize {
        let rev = bits.reverse_bits() >> (64 - self.n);
        rev as usize
    }

    /// Dense `2^n × 2^n` matrix, row-major. Intended for small `n`.
    pub fn to_matrix(&self) -> Vec<Vec<Complex64>> {
        let dim = 1usize << self.n;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        #[allow(clippy::needless_range_loop)]
        for col in 0..dim {
            let (row, c) = self.apply_to_basis(col);
            m[row][col] = c;
        }
        m
    }
}

/// `i^exp` as a complex number.
pub fn phase_value(exp: u8) -> Complex64 {
    match exp % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars().peekable();
        let mut phase = 0u8;
        let mut column = 0;
        match chars.peek() {
            Some('+') => {
                chars.next();
                column += 1;
            }
            Some('-') => {
                chars.next();
                column += 1;
                phase = 2;
            }
            _ => {}
        }
        let (mut x, mut z, mut n) = (0u64, 0u64, 0usize);
        for c in chars {
            if n == MAX_QUBITS {
                return Err(PauliError::TooLong(s.chars().filter(|c| c.is_alphabetic()).count()));
            }
            let b = 1u64 << n;
            match c {
                'I' => {}
                'X' => x |= b,
                'Z' => z |= b,
                'Y' => {
                    x |= b;
                    z |= b;
                    phase += 1;
                }
                other => return Err(PauliError::IllegalCharacter { column, found: other }),
            }
            n += 1;
            column += 1;
        }
        if n == 0 {
            return Err(PauliError::Empty);
        }
        Ok(Self::from_bits(n, phase % 4, x, z))
    }
}

impl PauliOperator {
    /// Signed Pauli string such as `-XYZ`. Fails for operators with a `±i` phase.
    pub fn to_signed_string(&self) -> Result<String, PauliError> {
        let ys = (self.x & self.z).count_ones() as u8;
        let residual = (self.phase_exp + 4 - ys % 4) % 4;
        let sign = match residual {
            0 => '+',
            2 => '-',
            _ => return Err(PauliError::NonHermitianPhase),
        };
        let mut out = String::with_capacity(self.n + 1);
        out.push(sign);
        out.push_str(&self.pattern());
        Ok(out)
    }
}

impl PauliOperator {
    /// Letters only, ignoring the phase (`Y` marks an x-and-z position).
    pub fn pattern(&self) -> String {
        (0..self.n)
            .map(|q| match (self.x_at(q), self.z_at(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect()
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_signed_string() {
            Ok(s) => f.write_str(&s),
            Err(_) => {
                let s = self.with_phase(self.phase_exp + 3).to_signed_string().unwrap_or_default();
                write!(f, "i{s}")
            }
        }
    }
}

/// Number of phase-0 operators of weight at most `w` on `n` qubits: `Σ C(n,i)·3^i`.
pub fn count_up_to_weight(n: usize, w: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    let mut pow3 = 1u128;
    for i in 0..=w.min(n) {
        total += binom * pow3;
        binom = binom * (n - i) as u128 / (i + 1) as u128;
        pow3 *= 3;
    }
    total
}

/// Phase-0 operators of one exact weight, sorted by [`PauliOperator::key`].
pub fn operators_of_weight(n: usize, w: usize) -> Vec<PauliOperator> {
    let mut out = Vec::new();
    if w > n {
        return out;
    }
    let mut support: Vec<usize> = (0..w).collect();
    loop {
        // each support position takes X, Z or Y
        let combos = 3usize.pow(w as u32);
        for mut code in 0..combos {
            let (mut x, mut z) = (0u64, 0u64);
            for &q in &support {
                let b = 1u64 << q;
                match code % 3 {
                    0 => x |= b,
                    1 => z |= b,
                    _ => {
                        x |= b;
                        z |= b;
                    }
                }
                code /= 3;
            }
            out.push(PauliOperator::from_bits(n, 0, x, z));
        }
        // next combination in lexicographic order
        let mut i = w;
        loop {
            if i == 0 {
                out.sort_unstable_by_key(|p| p.key());
                return out;
            }
            i -= 1;
            if support[i] < n - w + i {
                break;
            }
        }
        support[i] += 1;
        for j in i + 1..w {
            support[j] = support[j - 1] + 1;
        }
    }
}

/// Every phase-0 operator of weight `≤ max_weight`, ordered by weight and then key.
///
/// Each weight level is materialized on demand, so stopping early is cheap.
pub fn enumerate_up_to_weight(n: usize, max_weight: usize) -> impl Iterator<Item = PauliOperator> {
    (0..=max_weight.min(n)).flat_map(move |w| operators_of_weight(n, w))
}
