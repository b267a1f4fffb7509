use std::collections::BTreeMap;

use num_complex::Complex64;
use rydberg_qubo::builtin::{load_builtin_layout, BuiltinName};
use rydberg_qubo::geometry::PhysicalParams;
use rydberg_qubo::sim::{
    evolve, measure_distribution, ConstantDrive, EvolveOptions, HamiltonianSpec, InteractionMode,
    PulseSchedule,
};
use rydberg_qubo::solver::{enumerate_ground_configs, EnergyModel, SearchLimits};

/// Dense 2^n Hamiltonian built entry by entry, for small cross-checks.
fn dense_hamiltonian(
    n: usize,
    omega: f64,
    delta: f64,
    weights: &[f64],
    pairs: &[(usize, usize, f64)],
) -> Vec<Vec<Complex64>> {
    let dim = 1 << n;
    let mut h = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for s in 0..dim {
        let mut d = 0.0;
        for k in 0..n {
            if s >> k & 1 == 1 {
                d -= delta * weights[k];
            }
        }
        for &(a, b, u) in pairs {
            if s >> a & 1 == 1 && s >> b & 1 == 1 {
                d += u;
            }
        }
        h[s][s] += d;
        for k in 0..n {
            h[s][s ^ (1 << k)] += omega / 2.0;
        }
    }
    h
}

#[test]
fn matrix_free_action_matches_dense_matrix() {
    let pairs = [(0, 1, 50.0), (1, 2, 3.0), (0, 2, 0.25)];
    let weights = [1.0, 2.0, 0.5];
    let h = HamiltonianSpec::new(3, pairs.to_vec(), weights.to_vec()).unwrap();
    let dense = dense_hamiltonian(3, 0.9, -2.5, &weights, &pairs);
    for col in 0..8 {
        let mut e = vec![Complex64::new(0.0, 0.0); 8];
        e[col] = Complex64::new(1.0, 0.0);
        let he = h.apply(0.9, -2.5, &e);
        for row in 0..8 {
            assert!((he[row] - dense[row][col]).norm() < 1e-12);
            // Hermitian
            assert!((dense[row][col] - dense[col][row].conj()).norm() < 1e-15);
        }
    }
}

/// Two blockaded atoms at constant drive, against exact diagonalization of
/// the 3-level {00, 01+10, 11} problem via a tiny Taylor-series propagator.
#[test]
fn constant_drive_pair_matches_matrix_exponential() {
    let (omega, delta, u, t) = (0.96, 1.2, 7.0, 0.8);
    let pairs = [(0, 1, u)];
    let dense = dense_hamiltonian(2, omega, delta, &[1.0, 1.0], &pairs);
    // ψ(t) = exp(−i 2π H t) e₀ by repeated squaring of a short Taylor step
    let slices = 1 << 12;
    let dt = t / slices as f64;
    let mut psi = vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    for _ in 0..slices {
        let mut term = psi.clone();
        let mut next = psi.clone();
        for order in 1..=12 {
            let mut hv = vec![Complex64::new(0.0, 0.0); 4];
            for r in 0..4 {
                for c in 0..4 {
                    hv[r] += dense[r][c] * term[c];
                }
            }
            let factor = Complex64::new(0.0, -2.0 * std::f64::consts::PI * dt / order as f64);
            term = hv.into_iter().map(|x| x * factor).collect();
            for r in 0..4 {
                next[r] += term[r];
            }
        }
        psi = next;
    }
    let h = HamiltonianSpec::new(2, pairs.to_vec(), vec![1.0, 1.0]).unwrap();
    let drive = ConstantDrive {
        omega,
        delta,
        duration: t,
    };
    let ev = evolve(&h, &drive, &EvolveOptions::default()).unwrap();
    for s in 0..4 {
        assert!(
            (ev.state[s].norm_sqr() - psi[s].norm_sqr()).abs() < 1e-8,
            "state {s}: {} vs {}",
            ev.state[s].norm_sqr(),
            psi[s].norm_sqr()
        );
    }
}

fn ideal(name: BuiltinName) -> (rydberg_qubo::builtin::BuiltinLayout, HamiltonianSpec) {
    let b = load_builtin_layout(name).unwrap();
    let h = HamiltonianSpec::build(
        &b.graph,
        None,
        &PhysicalParams::default(),
        InteractionMode::ideal(),
    )
    .unwrap();
    (b, h)
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let (_, h) = ideal(BuiltinName::G3);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| evolve(&h, &PulseSchedule::default(), &EvolveOptions::default()).unwrap())
    };
    let one = run(1);
    let many = run(4);
    assert_eq!(one, many);
}

#[test]
fn final_diagonal_energy_matches_the_solver() {
    let u0 = 50.0;
    for name in [BuiltinName::G3, BuiltinName::G4, BuiltinName::Not] {
        let (b, h) = ideal(name);
        let ev = evolve(&h, &PulseSchedule::default(), &EvolveOptions::default()).unwrap();
        let d = measure_distribution(&ev.state, b.graph.num_atoms()).unwrap();
        let modal = d.modal().unwrap();
        let excited = modal.bits.iter().filter(|&&x| x == 1).count() as f64;
        let violated = b
            .graph
            .edges()
            .filter(|&(a, c)| modal.bits[a] == 1 && modal.bits[c] == 1)
            .count() as f64;
        let expected = -5.0 * excited + u0 * violated;
        assert_eq!(h.diagonal_energy(&modal.bits, 5.0), expected, "{name}");
        let gs = enumerate_ground_configs(
            &b.graph,
            &EnergyModel::hard_blockade(),
            &SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(
            h.diagonal_energy(&modal.bits, 5.0),
            gs.energy * 5.0,
            "{name}"
        );
    }
}

/// Slow sweeps end in a ground configuration of the exact solver.
#[test]
fn slow_sweep_ends_in_a_ground_configuration() {
    let slow = PulseSchedule::default().with_total_time(4.0 * 2.5).unwrap();
    let opts = EvolveOptions {
        steps: 16_000,
        ..EvolveOptions::default()
    };
    let mut seen = BTreeMap::new();
    for name in BuiltinName::ALL {
        let (b, h) = ideal(name);
        let ev = evolve(&h, &slow, &opts).unwrap();
        assert!(ev.norm_drift < 1e-6);
        let d = measure_distribution(&ev.state, b.graph.num_atoms()).unwrap();
        let modal = d.modal().unwrap();
        let gs = enumerate_ground_configs(
            &b.graph,
            &EnergyModel::hard_blockade(),
            &SearchLimits::default(),
        )
        .unwrap();
        assert!(
            gs.configs.contains(&modal.bits),
            "{name}: {}",
            modal.bitstring
        );
        seen.insert(name, modal.bitstring);
    }
    assert_eq!(seen.len(), 9);
}
