use lqu_core::channels::{apply_local, random_channel, selective_local_ops};
use lqu_core::linalg::{haar_unitary, hermitian_eig, random_hermitian_with, rng_from_seed, tensor};
use lqu_core::metrology::{estimation_bound, evolve_phase, qfi, qfi_finite_difference, PhaseFamily, CHAIN_TOLERANCE};
use lqu_core::states::{
    classical_quantum, dqc1_output, pure_bipartite, random_bipartite, random_density_with, random_pure_vector,
    spin_probe, werner,
};
use lqu_core::uncertainty::{
    hellinger_sq, local_skew_information, lqu_closed_form, min_variance_fixed_spectrum, skew_information, variance,
    Observable, Spectrum, UnitarySearch,
};
use lqu_core::{BipartiteState, ComplexMatrix, DensityMatrix, Subsystem, Tolerances, C64};
use rand::Rng;

const TOL: Tolerances = Tolerances::DEFAULT;

fn random_observable(d: usize, seed: u64) -> Observable {
    Observable::new(random_hermitian_with(d, &mut rng_from_seed(seed)), &TOL).unwrap()
}

fn lifted(state: &BipartiteState, k_a: &ComplexMatrix) -> Observable {
    Observable::new(state.lift_a(k_a).unwrap(), &TOL).unwrap()
}

fn mix(a: &DensityMatrix, b: &DensityMatrix, t: f64) -> DensityMatrix {
    let m = &a.matrix().scale(t) + &b.matrix().scale(1.0 - t);
    DensityMatrix::new(m, &TOL).unwrap()
}

#[test]
fn werner_is_discordant_for_positive_p() {
    for k in 1..=100 {
        let p = k as f64 / 100.0;
        assert!(lqu_closed_form(&werner(p).unwrap()).unwrap() > 0.0, "p={p}");
    }
}

#[test]
fn spin_probe_purity() {
    for r in [0.0, 0.25, 0.5, 0.9, 1.0] {
        let probe = spin_probe(2.5, r).unwrap();
        let expected = (1.0 + r * r) / 2.0;
        assert!((probe.state.purity() - expected).abs() < 1e-12);
        let ev = probe.state.eigenvalues();
        let from_eig: f64 = ev.iter().map(|x| x * x).sum();
        assert!((from_eig - expected).abs() < 1e-12);
    }
}

#[test]
fn dqc1_outputs_are_states() {
    for n in [1u32, 3, 5, 8] {
        let u = haar_unitary(1 << n, n as u64);
        for mu in [0.0, 0.5, 1.0] {
            let st = dqc1_output(n, mu, &u).unwrap();
            assert!((st.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(st.eigenvalues()[0] > -1e-10);
        }
    }
}

#[test]
fn skew_bounds() {
    for seed in 0..200u64 {
        let d = 2 + (seed % 4) as usize;
        let mut rng = rng_from_seed(seed);
        let rho = random_density_with(d, 1 + (seed as usize % d), &mut rng);
        let k = Observable::new(random_hermitian_with(d, &mut rng), &TOL).unwrap();
        let s = skew_information(&rho, &k).unwrap();
        let v = variance(&rho, &k).unwrap();
        assert!(s >= -1e-12, "seed {seed}: {s}");
        assert!(s <= v + 1e-9, "seed {seed}: {s} > {v}");
        if (rho.purity() - 1.0).abs() < 1e-12 {
            assert!((s - v).abs() < 1e-9, "seed {seed}: pure {s} vs {v}");
        }
    }
}

#[test]
fn skew_is_convex() {
    for seed in 0..200u64 {
        let d = 2 + (seed % 3) as usize;
        let mut rng = rng_from_seed(1000 + seed);
        let a = random_density_with(d, d, &mut rng);
        let b = random_density_with(d, 1, &mut rng);
        let k = Observable::new(random_hermitian_with(d, &mut rng), &TOL).unwrap();
        let t: f64 = rng.random();
        let lhs = skew_information(&mix(&a, &b, t), &k).unwrap();
        let rhs = t * skew_information(&a, &k).unwrap() + (1.0 - t) * skew_information(&b, &k).unwrap();
        assert!(lhs <= rhs + 1e-9, "seed {seed}: {lhs} > {rhs}");
    }
}

#[test]
fn lqu_local_unitary_invariance() {
    for seed in 0..100u64 {
        let d_b = 2 + (seed % 2) as usize;
        let st = random_bipartite(2, d_b, 2000 + seed);
        let moved = st
            .conjugate_local(&haar_unitary(2, seed), &haar_unitary(d_b, seed + 7))
            .unwrap();
        let a = lqu_closed_form(&st).unwrap();
        let b = lqu_closed_form(&moved).unwrap();
        assert!((a - b).abs() < 1e-9, "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn classical_quantum_states_have_no_lqu() {
    for seed in 0..50u64 {
        let mut rng = rng_from_seed(3000 + seed);
        let d_b = 2 + (seed % 3) as usize;
        let p: f64 = rng.random();
        let taus = [
            random_density_with(d_b, d_b, &mut rng),
            random_density_with(d_b, 1, &mut rng),
        ];
        let st = classical_quantum(&[p, 1.0 - p], &taus).unwrap();
        let st = st
            .conjugate_local(&haar_unitary(2, seed), &ComplexMatrix::identity(d_b))
            .unwrap();
        assert!(lqu_closed_form(&st).unwrap() <= 1e-10, "seed {seed}");
    }
}

#[test]
fn permutation_minimum_bounds_sampled_observables() {
    for seed in 0..50u64 {
        let d = 2 + (seed % 3) as usize;
        let mut rng = rng_from_seed(4000 + seed);
        let rho = random_density_with(d, d, &mut rng);
        let values: Vec<f64> = (0..d).map(|i| i as f64 * 0.7 + (i * i) as f64 * 0.1).collect();
        let spectrum = Spectrum::new(&values, &TOL).unwrap();
        let (min, _) = min_variance_fixed_spectrum(&rho, &spectrum).unwrap();
        for k in 0..20 {
            let v = haar_unitary(d, seed * 100 + k);
            let obs = Observable::from_spectrum(&v, &spectrum).unwrap();
            assert!(min <= variance(&rho, &obs).unwrap() + 1e-9, "seed {seed}");
        }
    }
}

#[test]
fn hellinger_identity() {
    for seed in 0..100u64 {
        let d_b = 2 + (seed % 3) as usize;
        let st = random_bipartite(2, d_b, 5000 + seed);
        let k = ComplexMatrix::pauli_z().conjugate_by(&haar_unitary(2, seed));
        let flipped = st.state().conjugate_by(&st.lift_a(&k).unwrap()).unwrap();
        let h = hellinger_sq(&st, &flipped).unwrap();
        let s = local_skew_information(&st, &k).unwrap();
        assert!((h - s).abs() < 1e-10, "seed {seed}: {h} vs {s}");
    }
}

#[test]
fn metrology_chain_and_phase_invariance() {
    let search = UnitarySearch::new(200, 0);
    for seed in 0..100u64 {
        let probe = random_bipartite(2, 3, 6000 + seed);
        let h = random_observable(2, seed);
        let base = estimation_bound(&probe, &h, 1, &search).unwrap();
        assert!((base.variance_bound * base.qfi - 1.0).abs() < 1e-15);
        let skew0 = skew_information(&probe, &lifted(&probe, h.matrix())).unwrap();
        for phi in [0.7, 2.1] {
            let family = PhaseFamily::new(probe.clone(), h.clone(), phi).unwrap();
            let evolved = family.evolved().unwrap();
            let b = estimation_bound(&evolved, &h, 3, &search).unwrap();
            assert!(b.lqu_bound <= b.skew_value + CHAIN_TOLERANCE);
            assert!(b.skew_value <= b.qfi + CHAIN_TOLERANCE);
            let g = family.generator();
            assert!((skew_information(&evolved, &g).unwrap() - skew0).abs() < 1e-9);
            assert!((qfi(&evolved, &g).unwrap() - base.qfi).abs() < 1e-9);
        }
    }
}

#[test]
fn qfi_matches_fidelity_difference_quotient() {
    for seed in 0..20u64 {
        let probe = random_bipartite(2, 3, 7000 + seed);
        let h = random_observable(2, seed);
        let f = qfi(&probe, &lifted(&probe, h.matrix())).unwrap();
        let fd = qfi_finite_difference(&probe, &h, 1e-4).unwrap();
        assert!(((fd - f) / f).abs() <= 1e-4, "seed {seed}: {fd} vs {f}");
    }
}

#[test]
fn hellinger_speed_matches_skew() {
    for seed in 0..50u64 {
        let st = random_bipartite(2, 2, 8000 + seed);
        let k = random_observable(2, seed);
        let delta = 1e-3;
        let moved = evolve_phase(&st, &k, delta).unwrap();
        let speed = hellinger_sq(&st, &moved).unwrap() / (delta * delta);
        let skew = local_skew_information(&st, k.matrix()).unwrap();
        assert!(((speed - skew) / skew).abs() <= 0.05, "seed {seed}: {speed} vs {skew}");
    }
}

#[test]
fn channels_are_complete() {
    for seed in 0..50u64 {
        let ch = random_channel(2 + (seed % 3) as usize, 1 + (seed % 4) as usize, seed).unwrap();
        assert!(ch.completeness_residual() <= 1e-10);
    }
}

#[test]
fn contractivity_on_b() {
    for seed in 0..200u64 {
        let d_b = 2 + (seed % 2) as usize;
        let st = random_bipartite(2, d_b, 9000 + seed);
        let ch = random_channel(d_b, 1 + (seed % 4) as usize, seed).unwrap();
        let out = apply_local(&st, &ch, Subsystem::B).unwrap();
        let before = lqu_closed_form(&st).unwrap();
        let after = lqu_closed_form(&out).unwrap();
        assert!(after <= before + 1e-8, "seed {seed}: {after} > {before}");
    }
}

fn random_pure(d_a: usize, d_b: usize, seed: u64) -> BipartiteState {
    let v = random_pure_vector(d_a * d_b, &mut rng_from_seed(seed));
    pure_bipartite(&v, d_a, d_b, &TOL).unwrap()
}

#[test]
fn monotone_under_selective_operations_on_a() {
    for seed in 0..200u64 {
        let psi = random_pure(2, 2, 10_000 + seed);
        let ch = random_channel(2, 1 + (seed % 4) as usize, seed).unwrap();
        let outcomes = selective_local_ops(&psi, &ch).unwrap();
        let avg: f64 = outcomes.iter().map(|(p, phi)| p * lqu_closed_form(phi).unwrap()).sum();
        let before = lqu_closed_form(&psi).unwrap();
        assert!(avg <= before + 1e-8, "seed {seed}: {avg} > {before}");
    }
}

#[test]
fn operations_on_a_keep_b_support() {
    for seed in 0..50u64 {
        let d_b = 3 + (seed % 2) as usize;
        let psi = random_pure(2, d_b, 11_000 + seed);
        let rho_b = psi.reduced(Subsystem::B);
        let eig = hermitian_eig(&rho_b, &TOL).unwrap();
        assert!(eig.values[d_b - 3].abs() < 1e-10, "rank of rho_B exceeds 2");
        // Projector onto the two-dimensional support of rho_B.
        let top: Vec<Vec<C64>> = (d_b - 2..d_b).map(|k| eig.vector(k)).collect();
        let proj = ComplexMatrix::from_fn(d_b, |i, j| top.iter().map(|v| v[i] * v[j].conj()).sum());
        let ch = random_channel(2, 3, seed).unwrap();
        for (_, phi) in selective_local_ops(&psi, &ch).unwrap() {
            let out_b = phi.reduced(Subsystem::B);
            let inside = &(&proj * &out_b) * &proj;
            assert!(inside.max_abs_diff(&out_b) < 1e-10, "seed {seed}");
        }
    }
}

#[test]
fn depolarizing_b_leaves_product() {
    let st = random_bipartite(2, 3, 12_000);
    let ch = lqu_core::channels::KrausChannel::completely_depolarizing(3);
    let out = apply_local(&st, &ch, Subsystem::B).unwrap();
    let expected = tensor(&st.reduced(Subsystem::A), &ComplexMatrix::identity(3).scale(1.0 / 3.0));
    assert!(out.matrix().max_abs_diff(&expected) < 1e-12);
    assert!(lqu_closed_form(&out).unwrap() < 1e-10);
}
