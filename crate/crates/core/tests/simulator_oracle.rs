use nalgebra::DMatrix;
use num_complex::Complex64;
use qfid::bound::paper_bound;
use qfid::channel::{random_channel, Channel, ChannelKind};
use qfid::pauli::PauliOperator;
use qfid::simulator::{basis_codeword_specs, codeword, memoryless, Mode, Simulator, StateSpec, StateVector};
use qfid::stabilizer::{library, StabilizerCode, Syndrome};

type M = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn letter(l: char) -> M {
    let i = Complex64::i();
    match l {
        'I' => M::identity(2, 2),
        'X' => M::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        'Y' => M::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        'Z' => M::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
        _ => unreachable!(),
    }
}

/// Dense matrix of a Pauli operator built letter by letter; qubit 0 is the leftmost factor.
fn dense_pauli(p: &PauliOperator) -> M {
    let mut m = M::identity(1, 1);
    for l in p.pattern().chars() {
        m = m.kronecker(&letter(l));
    }
    // stored form is i^phase X^x Z^z and XZ = -iY
    let ys = (p.x_bits() & p.z_bits()).count_ones();
    let extra = (p.phase_exp() as u32 + 4 * ys - ys) % 4;
    m * Complex64::i().powu(extra)
}

/// Nonzero entry of each column of a matrix with one nonzero per column.
fn signed_permutation(m: &M) -> Vec<(usize, Complex64)> {
    (0..m.ncols())
        .map(|c| {
            let r = (0..m.nrows()).find(|&r| m[(r, c)].norm() > 0.5).unwrap();
            (r, m[(r, c)])
        })
        .collect()
}

fn apply_permutation(p: &[(usize, Complex64)], v: &StateVector) -> StateVector {
    let mut out = StateVector::zeros(v.len());
    for (c, &(r, a)) in p.iter().enumerate() {
        out[r] += a * v[c];
    }
    out
}

/// Average fidelity from full Kronecker products of Kraus operators and dense Pauli matrices:
/// Σ_s Σ_K |⟨φ| M_s† Π_s K |φ⟩|², with Π_s = Π_j (I ± g_j)/2.
fn dense_average_fidelity(code: &StabilizerCode, channels: &[Channel], phi: &StateVector) -> f64 {
    let mut kraus = vec![M::identity(1, 1)];
    for ch in channels {
        kraus = kraus.iter().flat_map(|a| ch.kraus().iter().map(move |k| a.kronecker(k))).collect();
    }
    let gens: Vec<_> = code.generators().iter().map(|g| signed_permutation(&dense_pauli(g))).collect();
    let table = code.decoding_table().unwrap();
    let recoveries: Vec<_> = (0..1u32 << code.num_checks())
        .map(|idx| {
            let s = Syndrome::from_index(idx, code.num_checks());
            (s, signed_permutation(&dense_pauli(table.leader(&s)).adjoint()))
        })
        .collect();
    let mut total = 0.0;
    for k in &kraus {
        let v = k * phi;
        for (s, recovery) in &recoveries {
            let mut w = v.clone();
            for (j, g) in gens.iter().enumerate() {
                let gw = apply_permutation(g, &w);
                w = if s.bit(j) { (w - gw) * c(0.5) } else { (w + gw) * c(0.5) };
            }
            let amp = phi.dotc(&apply_permutation(recovery, &w));
            total += amp.norm_sqr();
        }
    }
    total
}

fn permute_state(phi: &StateVector, perm: &[usize]) -> StateVector {
    let n = perm.len();
    let mut out = StateVector::zeros(phi.len());
    for i in 0..phi.len() {
        let mut j = 0;
        for (q, &to) in perm.iter().enumerate() {
            if i >> (n - 1 - q) & 1 == 1 {
                j |= 1 << (n - 1 - to);
            }
        }
        out[j] = phi[i];
    }
    out
}

#[test]
fn dense_pauli_helper_matches_library() {
    for s in ["XYZ", "-YIY", "+ZZX"] {
        let p: PauliOperator = s.parse().unwrap();
        let lib = p.to_matrix();
        let dense = dense_pauli(&p);
        for (r, row) in lib.iter().enumerate() {
            for (col, v) in row.iter().enumerate() {
                assert!((v - dense[(r, col)]).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn simulator_matches_dense_pipeline() {
    let code = library::five_qubit();
    let sim = Simulator::new(code.clone()).unwrap();
    let mut cases: Vec<Vec<Channel>> = vec![
        memoryless(&ChannelKind::Depolarizing(0.04).build().unwrap(), 5),
        memoryless(&ChannelKind::XRotation(0.1).build().unwrap(), 5),
        memoryless(&ChannelKind::AmplitudeDamping(0.1).build().unwrap(), 5),
    ];
    cases.push((0..5).map(|i| random_channel(2, 2, 40 + i).unwrap()).collect());
    for chs in &cases {
        for spec in [StateSpec::Basis(0), StateSpec::Random(5)] {
            let phi = codeword(&code, spec).unwrap();
            let want = dense_average_fidelity(&code, chs, &phi);
            let got = sim.run(chs, spec, Mode::Full).unwrap();
            assert!((got.average_fidelity - want).abs() < 1e-12, "{spec}: {} vs {want}", got.average_fidelity);
            assert!((got.probability_total - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn worked_examples_hold() {
    let sim = Simulator::new(library::five_qubit()).unwrap();
    let dep = memoryless(&ChannelKind::Depolarizing(0.04).build().unwrap(), 5);
    let r = sim.run(&dep, StateSpec::Basis(0), Mode::Full).unwrap();
    assert!((r.p_max - 0.03).abs() < 1e-12);
    assert!((r.paper.epsilon - 9.274e-3).abs() < 1e-6);
    assert!(r.average_fidelity >= 1.0 - 9.274e-3);

    let rot = memoryless(&ChannelKind::XRotation(0.1).build().unwrap(), 5);
    let r = sim.run(&rot, StateSpec::Random(2), Mode::Full).unwrap();
    let p = 0.1f64.sin().powi(2);
    assert!((r.p_max - p).abs() < 1e-12);
    assert!(r.average_fidelity >= 1.0 - paper_bound(5, 1, p).unwrap().epsilon);
    assert!(r.dominance_holds());
}

#[test]
fn dominance_on_small_codes() {
    let kinds = [
        ChannelKind::Depolarizing(0.01),
        ChannelKind::Depolarizing(0.1),
        ChannelKind::BitFlip(0.05),
        ChannelKind::AmplitudeDamping(0.1),
        ChannelKind::PhaseDamping(0.1),
        ChannelKind::Random { seed: 3, rank: 3 },
    ];
    for code in [library::five_qubit(), library::four_two_two()] {
        let sim = Simulator::new(code.clone()).unwrap();
        let mut specs = basis_codeword_specs(&code, 2);
        specs.extend([StateSpec::Random(1), StateSpec::Random(2)]);
        for kind in &kinds {
            let chs = memoryless(&kind.build().unwrap(), code.n());
            for &spec in &specs {
                let r = sim.run(&chs, spec, Mode::Full).unwrap();
                assert!(r.dominance_holds(), "{kind:?} {spec}: {:?}", r.checks);
                assert!(r.product_epsilon <= r.paper.epsilon + 1e-12);
                assert!((r.probability_total - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn heterogeneous_channels_respect_product_bound() {
    let code = library::five_qubit();
    let sim = Simulator::new(code).unwrap();
    let chs: Vec<Channel> = (0..5).map(|i| random_channel(2, 1 + i as usize % 3, 700 + i).unwrap()).collect();
    let r = sim.run(&chs, StateSpec::Random(11), Mode::Full).unwrap();
    assert!(!r.memoryless);
    assert!(r.dominance_holds(), "{:?}", r.checks);
}

#[test]
fn permutation_covariance() {
    let code = library::five_qubit();
    let perm = [3, 0, 4, 1, 2];
    let moved = code.permuted(&perm).unwrap();
    let chs: Vec<Channel> = (0..5).map(|i| random_channel(2, 2, 90 + i).unwrap()).collect();
    let mut moved_chs = chs.clone();
    for (q, &to) in perm.iter().enumerate() {
        moved_chs[to] = chs[q].clone();
    }
    let phi = codeword(&code, StateSpec::Random(6)).unwrap();
    let moved_phi = permute_state(&phi, &perm);
    let a = Simulator::new(code).unwrap().run_with_state(&chs, &phi, Mode::Full).unwrap();
    let b = Simulator::new(moved).unwrap().run_with_state(&moved_chs, &moved_phi, Mode::Full).unwrap();
    assert!((a.average_fidelity - b.average_fidelity).abs() < 1e-9);
}

#[test]
fn deterministic_errors_within_radius_are_corrected() {
    for code in [library::five_qubit(), library::steane()] {
        let n = code.n();
        let sim = Simulator::new(code).unwrap();
        let id = ChannelKind::Identity.build().unwrap();
        for q in 0..n {
            for l in ['X', 'Y', 'Z'] {
                let mut chs = memoryless(&id, n);
                chs[q] = ChannelKind::Pauli(l).build().unwrap();
                let r = sim.run(&chs, StateSpec::Random(q as u64), Mode::Full).unwrap();
                assert!((r.average_fidelity - 1.0).abs() < 1e-9, "{l}{q}");
            }
        }
    }
}

#[test]
fn bounded_mode_dominance() {
    let sim = Simulator::new(library::five_qubit()).unwrap();
    let chs = memoryless(&ChannelKind::Depolarizing(0.04).build().unwrap(), 5);
    for tp in [0, 1] {
        let r = sim.run(&chs, StateSpec::Basis(0), Mode::Bounded(tp)).unwrap();
        let b = r.bounded.as_ref().unwrap();
        assert!(r.average_fidelity >= 1.0 - b.epsilon);
        assert!(r.dominance_holds());
    }
}

#[test]
fn coherent_rotation_breaks_the_squared_norm_step() {
    // Under X(θ)^{⊗n} the branch components share one environment state, so amplitudes of
    // distinct errors in the same syndrome add before squaring.
    let steane = library::steane();
    let sim = Simulator::new(steane.clone()).unwrap();
    let rot = memoryless(&ChannelKind::XRotation(0.1).build().unwrap(), 7);
    let phi = codeword(&steane, StateSpec::Basis(0)).unwrap();
    let r = sim.run_with_state(&rot, &phi, Mode::Full).unwrap();
    let dense = dense_average_fidelity(&steane, &rot, &phi);
    assert!((r.average_fidelity - dense).abs() < 1e-12);
    // three weight-2 X errors land on each nonzero syndrome with equal phase: 1 - F ≈ 7·(3 s² c⁵)²
    let leading = 63.0 * 0.1f64.sin().powi(4) * 0.1f64.cos().powi(10);
    assert!(((1.0 - r.average_fidelity) / leading - 1.0).abs() < 0.05);
    assert!(r.average_fidelity < 1.0 - r.paper.epsilon);
    assert!(!r.dominance_holds());

    let bits = memoryless(&ChannelKind::BitFlip(0.1f64.sin().powi(2)).build().unwrap(), 7);
    let r = sim.run_with_state(&bits, &phi, Mode::Full).unwrap();
    assert!((r.average_fidelity - dense_average_fidelity(&steane, &bits, &phi)).abs() < 1e-12);
    assert!(r.dominance_holds());

    let c422 = library::four_two_two();
    let rot = memoryless(&ChannelKind::XRotation(0.3).build().unwrap(), 4);
    let r = Simulator::new(c422).unwrap().run(&rot, StateSpec::Random(1), Mode::Full).unwrap();
    assert!(r.checks[1].holds);
    assert!(!r.checks[0].holds);
}
