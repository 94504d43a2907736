//! Infidelity bounds for `t`-error-correcting codes of length `n` over a
//! memoryless channel whose per-site non-identity mass is `p`.
//!
//! Everything is reported as an infidelity `ε`; the fidelity lower bound is
//! `1 − ε`, which goes negative (and is then vacuous) for large `p`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

/// Tolerance on `ℓ(0) + ℓ(1) = 1` for per-site masses.
pub const MASS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("code length must be at least 1")]
    ZeroLength,
    #[error("radius {t} exceeds code length {n}")]
    RadiusTooLarge { t: usize, n: usize },
    #[error("error mass {0} outside [0, 1]")]
    Mass(f64),
    #[error("alpha {0} outside (0, 1)")]
    Alpha(f64),
    #[error("no site masses given")]
    NoSites,
    #[error("site {index}: masses ({ell0}, {ell1}) must be nonnegative and sum to 1")]
    SiteMass { index: usize, ell0: f64, ell1: f64 },
}

fn check(n: usize, t: usize, p: f64) -> Result<(), BoundError> {
    if n == 0 {
        return Err(BoundError::ZeroLength);
    }
    if t > n {
        return Err(BoundError::RadiusTooLarge { t, n });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(BoundError::Mass(p));
    }
    Ok(())
}

/// Positive float with a separate binary exponent: `mant · 2^exp`, `mant ∈ [1, 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Wide {
    mant: f64,
    exp: i64,
}

impl Wide {
    const ZERO: Wide = Wide { mant: 0.0, exp: 0 };

    fn from_f64(x: f64) -> Wide {
        debug_assert!(x >= 0.0 && x.is_finite());
        if x == 0.0 {
            return Wide::ZERO;
        }
        let (mut x, mut exp) = (x, 0i64);
        if x < f64::MIN_POSITIVE {
            x *= 2f64.powi(64);
            exp -= 64;
        }
        let bits = x.to_bits();
        let e = ((bits >> 52) & 0x7ff) as i64 - 1023;
        let mant = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
        Wide { mant, exp: exp + e }
    }

    fn from_biguint(b: &BigUint) -> Wide {
        let shift = b.bits().saturating_sub(64);
        let top = (b >> shift).to_f64().expect("64-bit value fits");
        let w = Wide::from_f64(top);
        Wide { exp: w.exp + shift as i64, ..w }
    }

    fn mul(self, other: Wide) -> Wide {
        if self.mant == 0.0 || other.mant == 0.0 {
            return Wide::ZERO;
        }
        let w = Wide::from_f64(self.mant * other.mant);
        Wide { exp: w.exp + self.exp + other.exp, ..w }
    }

    fn powi(self, mut k: u64) -> Wide {
        let mut base = self;
        let mut acc = Wide { mant: 1.0, exp: 0 };
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    fn to_f64(self) -> f64 {
        if self.mant == 0.0 {
            return 0.0;
        }
        // split the scaling so intermediate powers stay finite
        let e = self.exp.clamp(-2200, 2200) as i32;
        let half = e / 2;
        self.mant * 2f64.powi(half) * 2f64.powi(e - half)
    }

    fn log10(self) -> f64 {
        if self.mant == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mant.log10() + self.exp as f64 * std::f64::consts::LOG10_2
        }
    }
}

/// Compensated sum of nonnegative wide terms.
fn wide_sum(terms: &[Wide]) -> Wide {
    let Some(top) = terms.iter().filter(|w| w.mant > 0.0).map(|w| w.exp).max() else {
        return Wide::ZERO;
    };
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for w in terms {
        if w.mant == 0.0 {
            continue;
        }
        let shift = (w.exp - top).max(-1100) as i32;
        let x = w.mant * 2f64.powi(shift);
        let s = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - s) + x } else { (x - s) + sum };
        sum = s;
    }
    let w = Wide::from_f64(sum + comp);
    Wide { exp: w.exp + top, ..w }
}

/// `Σ_{i=t+1}^{n} C(n,i) p^i` as `(value, log10 value)`.
fn binomial_power_tail(n: usize, t: usize, p: f64) -> (f64, f64) {
    if t >= n || p == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let pw = Wide::from_f64(p);
    let mut binom = BigUint::one();
    let mut terms = Vec::with_capacity(n - t);
    for i in 0..=n {
        if i > t {
            terms.push(Wide::from_biguint(&binom).mul(pw.powi(i as u64)));
        }
        binom = binom * (n - i) / (i + 1);
    }
    let s = wide_sum(&terms);
    (s.to_f64(), s.log10())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub t_used: usize,
    pub p: f64,
    /// `Σ_{i=t+1}^n C(n,i) p^i`.
    pub epsilon: f64,
    pub log10_epsilon: f64,
    /// `1 − ε`, possibly negative.
    pub fidelity_lb: f64,
    pub fidelity_lb_clamped: f64,
    /// `p^{t+1} 2^n`, which dominates `ε`.
    pub asymptotic: f64,
}

impl BoundReport {
    pub fn is_vacuous(&self) -> bool {
        self.fidelity_lb <= 0.0
    }
}

/// The headline bound: average fidelity `≥ 1 − Σ_{i=t+1}^n C(n,i) p^i`.
pub fn paper_bound(n: usize, t: usize, p: f64) -> Result<BoundReport, BoundError> {
    check(n, t, p)?;
    let (epsilon, log10_epsilon) = binomial_power_tail(n, t, p);
    let fidelity_lb = 1.0 - epsilon;
    Ok(BoundReport {
        n,
        t_used: t,
        p,
        epsilon,
        log10_epsilon,
        fidelity_lb,
        fidelity_lb_clamped: fidelity_lb.max(0.0),
        asymptotic: asymptotic_bound(n, t, p)?,
    })
}

/// Same sum as [`paper_bound`] with the decoder only trusting leaders of weight `≤ t′`.
pub fn bounded_distance_bound(n: usize, t_prime: usize, p: f64) -> Result<BoundReport, BoundError> {
    paper_bound(n, t_prime, p)
}

/// `p^{t+1} 2^n`, evaluated in the log domain.
pub fn asymptotic_bound(n: usize, t: usize, p: f64) -> Result<f64, BoundError> {
    check(n, t, p)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok(((t + 1) as f64 * p.ln() + n as f64 * std::f64::consts::LN_2).exp())
}

/// Per-site identity and non-identity masses `(ℓ(0), ℓ(1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SiteMass {
    pub ell0: f64,
    pub ell1: f64,
}

impl SiteMass {
    pub fn from_p(p: f64) -> Self {
        Self { ell0: 1.0 - p, ell1: p }
    }
}

/// `Σ_{a: h(a) > t} Π_i ℓ_i(a_i)`: the probability-weighted mass of error
/// supports larger than `t`, before relaxing `Π ℓ_i(a_i) ≤ p^{h(a)}`.
///
/// Dynamic programming over sites on the count of non-identity positions,
/// with an absorbing state for counts above `t` so no subtraction occurs.
pub fn product_bound(sites: &[SiteMass], t: usize) -> Result<f64, BoundError> {
    if sites.is_empty() {
        return Err(BoundError::NoSites);
    }
    for (index, s) in sites.iter().enumerate() {
        let ok = s.ell0 >= 0.0 && s.ell1 >= 0.0 && (s.ell0 + s.ell1 - 1.0).abs() <= MASS_TOLERANCE;
        if !ok {
            return Err(BoundError::SiteMass { index, ell0: s.ell0, ell1: s.ell1 });
        }
    }
    if t >= sites.len() {
        return Ok(0.0);
    }
    let mut counts = vec![0.0f64; t + 1];
    counts[0] = 1.0;
    let mut tail = 0.0f64;
    for s in sites {
        tail = tail * (s.ell0 + s.ell1) + counts[t] * s.ell1;
        for c in (1..=t).rev() {
            counts[c] = counts[c] * s.ell0 + counts[c - 1] * s.ell1;
        }
        counts[0] *= s.ell0;
    }
    Ok(tail)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub t: usize,
    pub epsilon: f64,
    /// `2 p^α < 1`.
    pub feasible: bool,
    /// `p (2 p^α)^n`.
    pub envelope: f64,
    /// Whether `t/n ≥ α`, the condition under which `ε ≤ envelope` is guaranteed.
    pub radius_meets_alpha: bool,
}

impl SweepPoint {
    pub fn within_envelope(&self, slack: f64) -> bool {
        self.epsilon <= self.envelope * (1.0 + slack) + slack
    }
}

/// Evaluates the bound along `t = ⌊αn⌋` for each length in `lengths`.
pub fn sweep_asymptotic(alpha: f64, p: f64, lengths: &[usize]) -> Result<Vec<SweepPoint>, BoundError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundError::Alpha(alpha));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(BoundError::Mass(p));
    }
    let ratio = 2.0 * p.powf(alpha);
    lengths
        .iter()
        .map(|&n| {
            // guard against αn landing a hair below an integer
            let t = ((alpha * n as f64) + 1e-9).floor() as usize;
            let t = t.min(n);
            let report = paper_bound(n, t, p)?;
            let envelope = if p == 0.0 { 0.0 } else { (p.ln() + n as f64 * ratio.ln()).exp() };
            Ok(SweepPoint {
                n,
                t,
                epsilon: report.epsilon,
                feasible: ratio < 1.0,
                envelope,
                radius_meets_alpha: t as f64 >= alpha * n as f64 - 1e-9,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn worked_example_values() {
        let r = paper_bound(25, 3, 0.01).unwrap();
        assert!(rel(r.epsilon, 1.32e-4) < 0.01, "{}", r.epsilon);
        assert!((r.fidelity_lb - 0.999868).abs() < 5e-7);
        let r = paper_bound(25, 3, 0.001).unwrap();
        assert!(rel(r.epsilon, 1.27e-8) < 0.01, "{}", r.epsilon);
    }

    #[test]
    fn edge_cases() {
        let r = paper_bound(7, 7, 0.3).unwrap();
        assert_eq!(r.epsilon, 0.0);
        let r = paper_bound(1, 0, 1.0).unwrap();
        assert_eq!((r.epsilon, r.fidelity_lb), (1.0, 0.0));
        let r = paper_bound(10, 0, 1.0).unwrap();
        assert_eq!(r.epsilon, 1023.0);
        assert_eq!(r.fidelity_lb, -1022.0);
        assert_eq!(r.fidelity_lb_clamped, 0.0);
        assert!(r.is_vacuous());
        assert_eq!(paper_bound(0, 0, 0.1), Err(BoundError::ZeroLength));
        assert_eq!(paper_bound(3, 4, 0.1), Err(BoundError::RadiusTooLarge { t: 4, n: 3 }));
        assert_eq!(paper_bound(3, 1, 1.5), Err(BoundError::Mass(1.5)));
        assert!(matches!(paper_bound(3, 1, f64::NAN), Err(BoundError::Mass(_))));
    }

    #[test]
    fn wide_range() {
        // C(2000, 1000) overflows f64 but the term with p = 0.5^2 is tiny
        let r = paper_bound(2000, 1000, 0.25).unwrap();
        assert!(r.epsilon.is_finite() && r.epsilon > 0.0);
        let r = paper_bound(1100, 0, 1.0).unwrap();
        assert!(r.epsilon.is_infinite());
        assert!((r.log10_epsilon - 1100.0 * 2f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn product_examples() {
        let zeros = vec![SiteMass::from_p(0.0); 5];
        assert_eq!(product_bound(&zeros, 1).unwrap(), 0.0);
        let iid = vec![SiteMass::from_p(0.1); 5];
        let expected = 1.0 - 0.9f64.powi(5) - 5.0 * 0.1 * 0.9f64.powi(4);
        assert!((product_bound(&iid, 1).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.08146).abs() < 1e-12);
        let mut single = vec![SiteMass::from_p(0.0); 5];
        single[0] = SiteMass::from_p(1.0);
        assert_eq!(product_bound(&single, 1).unwrap(), 0.0);
        assert_eq!(product_bound(&[], 1), Err(BoundError::NoSites));
        let bad = [SiteMass { ell0: 0.5, ell1: 0.6 }];
        assert!(matches!(product_bound(&bad, 0), Err(BoundError::SiteMass { index: 0, .. })));
    }

    #[test]
    fn asymptotic_examples() {
        let a = asymptotic_bound(25, 3, 0.01).unwrap();
        assert!(rel(a, 1e-8 * 2f64.powi(25)) < 1e-12);
        assert_eq!(asymptotic_bound(9, 2, 0.0).unwrap(), 0.0);
        let a = asymptotic_bound(5, 1, 0.1).unwrap();
        assert!(rel(a, 0.32) < 1e-12);
        assert!(a >= paper_bound(5, 1, 0.1).unwrap().epsilon);
    }

    #[test]
    fn bounded_examples() {
        assert_eq!(bounded_distance_bound(25, 3, 0.01).unwrap(), paper_bound(25, 3, 0.01).unwrap());
        let r = bounded_distance_bound(25, 2, 0.01).unwrap();
        assert!(rel(r.epsilon, 2300.0 * 1e-6 + 1.3198e-4) < 1e-3, "{}", r.epsilon);
        assert!(rel(r.epsilon, 2.43e-3) < 0.01);
        let r = bounded_distance_bound(1, 0, 0.37).unwrap();
        assert!(rel(r.epsilon, 0.37) < 1e-15);
    }

    #[test]
    fn sweeps() {
        let pts = sweep_asymptotic(0.2, 0.01, &[10, 20, 50, 100]).unwrap();
        assert!(pts.iter().all(|p| p.feasible && p.radius_meets_alpha && p.within_envelope(0.0)));
        assert!(pts.windows(2).all(|w| w[1].epsilon < w[0].epsilon));
        let pts = sweep_asymptotic(0.1, 0.25, &[10]).unwrap();
        assert!(!pts[0].feasible);
        let pts = sweep_asymptotic(0.3, 0.0, &[5, 10, 40]).unwrap();
        assert!(pts.iter().all(|p| p.epsilon == 0.0));
        assert_eq!(sweep_asymptotic(1.0, 0.1, &[5]), Err(BoundError::Alpha(1.0)));
    }
}
