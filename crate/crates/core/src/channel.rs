//! Single-site channels in Kraus form and their generalized-Pauli mass.
//!
//! For local dimension `q` the operator basis is `B_{ij} = C^i D^j` with the
//! shift `C|s⟩ = |s+1 mod q⟩` and clock `D|s⟩ = λ^s|s⟩`, `λ = exp(2πi/q)`.
//! For `q = 2` this is `{I, σx, σz, σxσz}`. Writing each Kraus operator as
//! `K_m = Σ c_{m,ij} B_{ij}`, the mass on `B_{ij}` is `Σ_m |c_{m,ij}|²`, which
//! equals `‖L_{ij}|0_E⟩‖²` for the canonical dilation
//! `U = Σ B_{ij} ⊗ L_{ij}` and does not depend on the Kraus representation.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;
use thiserror::Error;

/// Default tolerance for completeness and isometry checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("channel has no Kraus operators")]
    Empty,
    #[error("local dimension {0} is below 2")]
    BadDimension(usize),
    #[error("Kraus operator {index} is {rows}x{cols}, expected {q}x{q}")]
    KrausShape { index: usize, rows: usize, cols: usize, q: usize },
    #[error("channel is not trace preserving: max |ΣK†K − I| = {deviation:.3e}")]
    NotTracePreserving { deviation: f64 },
    #[error("parameter {name} = {value} outside {range}")]
    Parameter { name: &'static str, value: f64, range: &'static str },
    #[error("remix matrix is {rows}x{cols}; needs {needed} columns and at least as many rows")]
    RemixShape { rows: usize, cols: usize, needed: usize },
    #[error("remix matrix columns are not orthonormal: deviation {deviation:.3e}")]
    NotIsometry { deviation: f64 },
    #[error("unknown channel kind {0:?}")]
    UnknownKind(String),
    #[error("channel file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("channel file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A completely positive map given by Kraus operators on a `q`-dimensional site.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    q: usize,
    kraus: Vec<CMatrix>,
}

/// Outcome of the trace-preservation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validation {
    pub deviation: f64,
    pub tolerance: f64,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

impl Channel {
    /// Builds a channel after checking shapes only; see [`Channel::validate`].
    pub fn from_kraus(q: usize, kraus: Vec<CMatrix>) -> Result<Self, ChannelError> {
        if q < 2 {
            return Err(ChannelError::BadDimension(q));
        }
        if kraus.is_empty() {
            return Err(ChannelError::Empty);
        }
        for (index, k) in kraus.iter().enumerate() {
            if k.nrows() != q || k.ncols() != q {
                return Err(ChannelError::KrausShape { index, rows: k.nrows(), cols: k.ncols(), q });
            }
        }
        Ok(Self { q, kraus })
    }

    /// Like [`Channel::from_kraus`] but also requires trace preservation.
    pub fn new(q: usize, kraus: Vec<CMatrix>) -> Result<Self, ChannelError> {
        let ch = Self::from_kraus(q, kraus)?;
        ch.ensure_valid(DEFAULT_TOLERANCE)?;
        Ok(ch)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn validate(&self, tolerance: f64) -> Validation {
        let mut sum = CMatrix::zeros(self.q, self.q);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        sum -= CMatrix::identity(self.q, self.q);
        let deviation = sum.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Validation { deviation, tolerance }
    }

    pub fn ensure_valid(&self, tolerance: f64) -> Result<(), ChannelError> {
        let v = self.validate(tolerance);
        if v.is_ok() {
            Ok(())
        } else {
            Err(ChannelError::NotTracePreserving { deviation: v.deviation })
        }
    }

    /// `ρ ↦ Σ K ρ K†` on a single site.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.q, self.q);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    pub fn pauli_mass(&self) -> Result<PauliMass, ChannelError> {
        self.ensure_valid(DEFAULT_TOLERANCE)?;
        Ok(self.pauli_mass_unchecked())
    }

    pub(crate) fn pauli_mass_unchecked(&self) -> PauliMass {
        let q = self.q;
        let mut masses = vec![vec![0.0; q]; q];
        for (i, row) in masses.iter_mut().enumerate() {
            for (j, m) in row.iter_mut().enumerate() {
                let b = pauli_basis(q, i, j);
                *m = self
                    .kraus
                    .iter()
                    .map(|k| (b.adjoint() * k).trace().norm_sqr())
                    .sum::<f64>()
                    / (q * q) as f64;
            }
        }
        PauliMass { q, masses }
    }

    /// Re-expresses the Kraus set through an isometry on the Kraus index: `K′_m = Σ_n V_{mn} K_n`.
    pub fn remix(&self, v: &CMatrix) -> Result<Self, ChannelError> {
        let r = self.kraus.len();
        if v.ncols() != r || v.nrows() < r {
            return Err(ChannelError::RemixShape { rows: v.nrows(), cols: v.ncols(), needed: r });
        }
        let gram = v.adjoint() * v - CMatrix::identity(r, r);
        let deviation = gram.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if deviation > DEFAULT_TOLERANCE {
            return Err(ChannelError::NotIsometry { deviation });
        }
        let kraus = (0..v.nrows())
            .map(|m| {
                self.kraus
                    .iter()
                    .enumerate()
                    .fold(CMatrix::zeros(self.q, self.q), |acc, (n, k)| acc + k * v[(m, n)])
            })
            .collect();
        Ok(Self { q: self.q, kraus })
    }

    /// Unitary `U` on system ⊗ environment with `U(|ψ⟩⊗|0_E⟩) = Σ_m K_m|ψ⟩⊗|m⟩`.
    pub fn dilation(&self) -> Result<Dilation, ChannelError> {
        self.ensure_valid(DEFAULT_TOLERANCE)?;
        let q = self.q;
        let env = self.kraus.len().max(2);
        let dim = q * env;
        let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        // columns (s, e=0) are fixed by the Kraus operators
        for s in 0..q {
            let mut col = vec![ZERO; dim];
            for (m, k) in self.kraus.iter().enumerate() {
                for row in 0..q {
                    col[row * env + m] = k[(row, s)];
                }
            }
            columns.push(col);
        }
        let fixed = columns.clone();
        let mut extra = Vec::new();
        for e in 0..dim {
            if extra.len() + q == dim {
                break;
            }
            let mut v = vec![ZERO; dim];
            v[e] = ONE;
            for u in fixed.iter().chain(extra.iter()) {
                let c = inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= c * ui;
                }
            }
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                v.iter_mut().for_each(|c| *c /= norm);
                extra.push(v);
            }
        }
        let mut u = CMatrix::zeros(dim, dim);
        let mut extra = extra.into_iter();
        for s in 0..q {
            for e in 0..env {
                let col = if e == 0 { columns[s].clone() } else { extra.next().expect("basis completion") };
                for (row, c) in col.into_iter().enumerate() {
                    u[(row, s * env + e)] = c;
                }
            }
        }
        Ok(Dilation { q, env, unitary: u })
    }
}

fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `C^i D^j` on a `q`-dimensional site.
pub fn pauli_basis(q: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(q, q);
    for s in 0..q {
        let phase = 2.0 * PI * ((j * s) % q) as f64 / q as f64;
        m[((s + i) % q, s)] = Complex64::from_polar(1.0, phase);
    }
    if q == 2 {
        // exact ±1 entries
        m.iter_mut().for_each(|c| *c = Complex64::new(c.re.round(), 0.0));
    }
    m
}

/// Squared norms of the channel's components along each `B_{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliMass {
    q: usize,
    masses: Vec<Vec<f64>>,
}

impl PauliMass {
    pub fn q(&self) -> usize {
        self.q
    }

    /// Mass on `C^i D^j`.
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.masses[i][j]
    }

    pub fn grid(&self) -> &[Vec<f64>] {
        &self.masses
    }

    /// Identity component `‖L_{00}|0_E⟩‖²`.
    pub fn ell0(&self) -> f64 {
        self.masses[0][0]
    }

    /// Non-identity mass, the `p` entering the fidelity bound.
    pub fn p(&self) -> f64 {
        self.masses
            .iter()
            .flatten()
            .skip(1)
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().flatten().sum()
    }
}

/// Unitary dilation with the system as the most significant tensor factor.
#[derive(Debug, Clone)]
pub struct Dilation {
    pub q: usize,
    pub env: usize,
    pub unitary: CMatrix,
}

impl Dilation {
    /// `L_{ij} = Tr_sys((B_{ij}† ⊗ I) U) / q`.
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        let b = pauli_basis(self.q, i, j);
        let env = self.env;
        let mut l = CMatrix::zeros(env, env);
        for s in 0..self.q {
            for s2 in 0..self.q {
                let coef = b[(s, s2)].conj();
                if coef == ZERO {
                    continue;
                }
                for e in 0..env {
                    for e2 in 0..env {
                        l[(e, e2)] += coef * self.unitary[(s * env + e, s2 * env + e2)];
                    }
                }
            }
        }
        l / Complex64::new(self.q as f64, 0.0)
    }

    /// `‖L_{ij}|0_E⟩‖²`.
    pub fn block_mass(&self, i: usize, j: usize) -> f64 {
        self.block(i, j).column(0).iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.unitary.nrows();
        let g = self.unitary.adjoint() * &self.unitary - CMatrix::identity(d, d);
        g.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Standard qubit channel families plus a seeded random channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    Identity,
    /// `ρ ↦ (1 − λ)ρ + λ I/2`, `λ ∈ [0, 4/3]`.
    Depolarizing(f64),
    BitFlip(f64),
    PhaseDamping(f64),
    AmplitudeDamping(f64),
    /// Single Kraus operator `cos θ I + i sin θ σx`.
    XRotation(f64),
    /// Pauli conjugation `ρ ↦ PρP` by the given letter.
    Pauli(char),
    Random { seed: u64, rank: usize },
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<(), ChannelError> {
    if value.is_finite() && (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(ChannelError::Parameter { name, value, range })
    }
}

pub fn sigma_x() -> CMatrix {
    mat2(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> CMatrix {
    mat2(ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO)
}

pub fn sigma_z() -> CMatrix {
    mat2(ONE, ZERO, ZERO, -ONE)
}

impl ChannelKind {
    pub fn build(&self) -> Result<Channel, ChannelError> {
        let id = CMatrix::identity(2, 2);
        let scale = |m: CMatrix, s: f64| m * c(s, 0.0);
        let kraus = match *self {
            ChannelKind::Identity => vec![id],
            ChannelKind::Depolarizing(l) => {
                check_range("lambda", l, 0.0, 4.0 / 3.0, "[0, 4/3]")?;
                let w = (l / 4.0).sqrt();
                vec![
                    scale(id, (1.0 - 3.0 * l / 4.0).max(0.0).sqrt()),
                    scale(sigma_x(), w),
                    scale(sigma_y(), w),
                    scale(sigma_z(), w),
                ]
            }
            ChannelKind::BitFlip(f) => {
                check_range("f", f, 0.0, 1.0, "[0, 1]")?;
                vec![scale(id, (1.0 - f).sqrt()), scale(sigma_x(), f.sqrt())]
            }
            ChannelKind::PhaseDamping(g) => {
                check_range("gamma", g, 0.0, 1.0, "[0, 1]")?;
                vec![
                    mat2(ONE, ZERO, ZERO, c((1.0 - g).sqrt(), 0.0)),
                    mat2(ZERO, ZERO, ZERO, c(g.sqrt(), 0.0)),
                ]
            }
            ChannelKind::AmplitudeDamping(g) => {
                check_range("gamma", g, 0.0, 1.0, "[0, 1]")?;
                vec![
                    mat2(ONE, ZERO, ZERO, c((1.0 - g).sqrt(), 0.0)),
                    mat2(ZERO, c(g.sqrt(), 0.0), ZERO, ZERO),
                ]
            }
            ChannelKind::XRotation(theta) => {
                check_range("theta", theta, f64::MIN, f64::MAX, "finite reals")?;
                let (s, co) = theta.sin_cos();
                vec![mat2(c(co, 0.0), c(0.0, s), c(0.0, s), c(co, 0.0))]
            }
            ChannelKind::Pauli(letter) => vec![match letter {
                'I' => id,
                'X' => sigma_x(),
                'Y' => sigma_y(),
                'Z' => sigma_z(),
                other => return Err(ChannelError::UnknownKind(other.to_string())),
            }],
            ChannelKind::Random { seed, rank } => return random_channel(2, rank, seed),
        };
        Channel::new(2, kraus)
    }

    /// Parses `identity`, `depolarizing:0.04`, `bit_flip:0.2`, `phase_damping:0.1`,
    /// `amplitude_damping:0.1`, `x_rotation:0.1`, `pauli:X`, `random:<seed>[:<rank>]`.
    pub fn parse(s: &str) -> Result<Self, ChannelError> {
        let unknown = || ChannelError::UnknownKind(s.to_string());
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or("");
        let mut num = || -> Result<f64, ChannelError> {
            parts.next().and_then(|v| v.parse().ok()).ok_or_else(unknown)
        };
        let kind = match name {
            "identity" => ChannelKind::Identity,
            "depolarizing" => ChannelKind::Depolarizing(num()?),
            "bit_flip" => ChannelKind::BitFlip(num()?),
            "phase_damping" => ChannelKind::PhaseDamping(num()?),
            "amplitude_damping" => ChannelKind::AmplitudeDamping(num()?),
            "x_rotation" => ChannelKind::XRotation(num()?),
            "pauli" => {
                let letter = s.strip_prefix("pauli:").ok_or_else(unknown)?;
                let mut chars = letter.chars();
                match (chars.next(), chars.next()) {
                    (Some(l @ ('I' | 'X' | 'Y' | 'Z')), None) => ChannelKind::Pauli(l),
                    _ => return Err(unknown()),
                }
            }
            "random" => {
                let mut rest = s.split(':').skip(1);
                let seed = rest.next().and_then(|v| v.parse().ok()).ok_or_else(unknown)?;
                let rank = match rest.next() {
                    Some(r) => r.parse().map_err(|_| unknown())?,
                    None => 2,
                };
                ChannelKind::Random { seed, rank }
            }
            _ => return Err(unknown()),
        };
        Ok(kind)
    }
}

/// Complex matrix with i.i.d. standard normal real and imaginary parts.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    })
}

/// Orthonormalizes the columns of a full-column-rank matrix (Haar when fed a Gaussian matrix).
pub fn orthonormal_columns(m: CMatrix) -> CMatrix {
    let qr = m.qr();
    let (q, r) = qr.unpack();
    // fix the phase ambiguity of QR so the result is Haar distributed
    let mut q = q;
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            q.column_mut(j).iter_mut().for_each(|x| *x *= ph);
        }
    }
    q
}

pub fn random_isometry(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    orthonormal_columns(gaussian_matrix(rows, cols, &mut rng))
}

/// Random `rank`-Kraus channel on a `q`-dimensional site from a Haar isometry `C^q → C^{q·rank}`.
pub fn random_channel(q: usize, rank: usize, seed: u64) -> Result<Channel, ChannelError> {
    if rank == 0 {
        return Err(ChannelError::Empty);
    }
    if q < 2 {
        return Err(ChannelError::BadDimension(q));
    }
    let v = random_isometry(q * rank, q, seed);
    let kraus = (0..rank).map(|m| v.rows(m * q, q).into_owned()).collect();
    Channel::new(q, kraus)
}

#[derive(Deserialize)]
struct ChannelFile {
    q: usize,
    kraus: Vec<serde_json::Value>,
}

fn parse_entry(v: &serde_json::Value) -> Option<Complex64> {
    let pair = v.as_array()?;
    match pair.as_slice() {
        [re, im] => Some(c(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

fn parse_matrix(q: usize, index: usize, v: &serde_json::Value) -> Result<CMatrix, ChannelError> {
    let bad = |why: &str| ChannelError::Format(format!("kraus[{index}]: {why}"));
    let items = v.as_array().ok_or_else(|| bad("expected an array"))?;
    // either q rows of q pairs, or a flat row-major list of q² pairs
    let flat: Vec<&serde_json::Value> = if items.len() == q && items.iter().all(|r| r.as_array().is_some_and(|r| r.len() == q && r.iter().all(|e| e.is_array()))) {
        items.iter().flat_map(|r| r.as_array().unwrap().iter()).collect()
    } else {
        items.iter().collect()
    };
    if flat.len() != q * q {
        return Err(bad(&format!("expected {} entries, found {}", q * q, flat.len())));
    }
    let entries = flat
        .into_iter()
        .map(|e| parse_entry(e).ok_or_else(|| bad("entries must be [re, im] number pairs")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CMatrix::from_row_slice(q, q, &entries))
}

impl Channel {
    /// Reads `{"q": int, "kraus": [matrix, ...]}` where a matrix is row-major `[re, im]` pairs,
    /// either nested by row or flat.
    pub fn from_json(text: &str) -> Result<Self, ChannelError> {
        let file: ChannelFile = serde_json::from_str(text)?;
        if file.q < 2 {
            return Err(ChannelError::BadDimension(file.q));
        }
        let kraus = file
            .kraus
            .iter()
            .enumerate()
            .map(|(i, m)| parse_matrix(file.q, i, m))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_kraus(file.q, kraus)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ChannelError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Writes the JSON channel format with 17 significant digits per number.
    pub fn to_json(&self) -> String {
        let num = |x: f64| format!("{x:.16e}");
        let mut out = format!("{{\n  \"q\": {},\n  \"kraus\": [\n", self.q);
        for (m, k) in self.kraus.iter().enumerate() {
            out.push_str("    [\n");
            for r in 0..self.q {
                out.push_str("      [");
                for col in 0..self.q {
                    let e = k[(r, col)];
                    let sep = if col + 1 < self.q { ", " } else { "" };
                    let _ = write!(out, "[{}, {}]{sep}", num(e.re), num(e.im));
                }
                out.push_str(if r + 1 < self.q { "],\n" } else { "]\n" });
            }
            out.push_str(if m + 1 < self.kraus.len() { "    ],\n" } else { "    ]\n" });
        }
        out.push_str("  ]\n}\n");
        out
    }
}
