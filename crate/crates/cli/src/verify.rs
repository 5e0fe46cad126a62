//! Randomized property checks. Each trial returns a residual that must not
//! exceed the property's tolerance; trial `i` uses seed `base + i`, so
//! `--seed <failing seed> --trials 1` replays a failure.

use std::fmt::Write as _;
use std::time::Instant;

use lqu_core::channels::{apply_local, random_channel, selective_local_ops};
use lqu_core::linalg::{haar_unitary, haar_unitary_with, hermitian_eig, random_hermitian_with, rng_from_seed};
use lqu_core::metrology::{estimation_bound, evolve_phase, lqu_for_spectrum, qfi, qfi_finite_difference, PhaseFamily};
use lqu_core::states::{
    classical_quantum, pure_bipartite, random_bipartite, random_density_with, random_pure_vector, werner,
};
use lqu_core::uncertainty::{
    hellinger_sq, local_skew_information, lqu_bruteforce, lqu_closed_form, min_variance_fixed_spectrum,
    minimize_over_unitaries, skew_information, variance, Observable, Spectrum, UnitarySearch,
};
use lqu_core::{BipartiteState, ComplexMatrix, DensityMatrix, Subsystem, Tolerances, C64};
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Skew,
    Lqu,
    Metrology,
    Channels,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Skew => "skew",
            Suite::Lqu => "lqu",
            Suite::Metrology => "metrology",
            Suite::Channels => "channels",
        }
    }
}

type Check = fn(u64) -> lqu_core::Result<f64>;

pub struct Property {
    pub name: &'static str,
    pub suite: Suite,
    pub tolerance: f64,
    check: Check,
}

const TOL: Tolerances = Tolerances::DEFAULT;

/// Budget for the sampled LQU, matching the closed-form comparison.
pub const ORACLE_BUDGET: usize = 2000;

fn observable(m: ComplexMatrix) -> lqu_core::Result<Observable> {
    Observable::new(m, &TOL)
}

fn random_pair(seed: u64) -> lqu_core::Result<(DensityMatrix, Observable)> {
    let mut rng = rng_from_seed(seed);
    let d = 2 + (seed % 4) as usize;
    let rank = 1 + (seed / 4) as usize % d;
    let rho = random_density_with(d, rank, &mut rng);
    let k = observable(random_hermitian_with(d, &mut rng))?;
    Ok((rho, k))
}

fn random_pure(d_a: usize, d_b: usize, seed: u64) -> lqu_core::Result<BipartiteState> {
    let v = random_pure_vector(d_a * d_b, &mut rng_from_seed(seed));
    pure_bipartite(&v, d_a, d_b, &TOL)
}

fn skew_nonnegative(seed: u64) -> lqu_core::Result<f64> {
    let (rho, k) = random_pair(seed)?;
    Ok(-skew_information(&rho, &k)?)
}

fn skew_below_variance(seed: u64) -> lqu_core::Result<f64> {
    let (rho, k) = random_pair(seed)?;
    Ok(skew_information(&rho, &k)? - variance(&rho, &k)?)
}

fn skew_pure_equality(seed: u64) -> lqu_core::Result<f64> {
    let mut rng = rng_from_seed(seed);
    let d = 2 + (seed % 4) as usize;
    let rho = random_density_with(d, 1, &mut rng);
    let k = observable(random_hermitian_with(d, &mut rng))?;
    Ok((skew_information(&rho, &k)? - variance(&rho, &k)?).abs())
}

fn skew_convexity(seed: u64) -> lqu_core::Result<f64> {
    let mut rng = rng_from_seed(seed);
    let d = 2 + (seed % 3) as usize;
    let a = random_density_with(d, d, &mut rng);
    let b = random_density_with(d, 1 + (seed as usize % d), &mut rng);
    let k = observable(random_hermitian_with(d, &mut rng))?;
    let t: f64 = rng.random();
    let mixed = DensityMatrix::new(&a.matrix().scale(t) + &b.matrix().scale(1.0 - t), &TOL)?;
    let lhs = skew_information(&mixed, &k)?;
    let rhs = t * skew_information(&a, &k)? + (1.0 - t) * skew_information(&b, &k)?;
    Ok(lhs - rhs)
}

fn hellinger_identity(seed: u64) -> lqu_core::Result<f64> {
    let d_b = 2 + (seed % 3) as usize;
    let st = random_bipartite(2, d_b, seed);
    let k = ComplexMatrix::pauli_z().conjugate_by(&haar_unitary(2, seed));
    let flipped = st.state().conjugate_by(&st.lift_a(&k)?)?;
    Ok((hellinger_sq(&st, &flipped)? - local_skew_information(&st, &k)?).abs())
}

fn local_unitary_invariance(seed: u64) -> lqu_core::Result<f64> {
    let d_b = 2 + (seed % 2) as usize;
    let st = random_bipartite(2, d_b, seed);
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    let moved = st.conjugate_local(&haar_unitary_with(2, &mut rng), &haar_unitary_with(d_b, &mut rng))?;
    Ok((lqu_closed_form(&st)? - lqu_closed_form(&moved)?).abs())
}

fn classical_quantum_zero(seed: u64) -> lqu_core::Result<f64> {
    let mut rng = rng_from_seed(seed);
    let d_b = 2 + (seed % 3) as usize;
    let p: f64 = rng.random();
    let taus = [
        random_density_with(d_b, d_b, &mut rng),
        random_density_with(d_b, 1, &mut rng),
    ];
    let st = classical_quantum(&[p, 1.0 - p], &taus)?;
    let st = st.conjugate_local(&haar_unitary_with(2, &mut rng), &ComplexMatrix::identity(d_b))?;
    lqu_closed_form(&st)
}

/// `p` runs over `0.05, 0.10, ..., 1.00` as the seed advances.
fn werner_discord(seed: u64) -> lqu_core::Result<f64> {
    let p = ((seed % 20) + 1) as f64 * 0.05;
    Ok(1e-3 - lqu_closed_form(&werner(p)?)?)
}

fn oracle_equivalence(seed: u64) -> lqu_core::Result<f64> {
    let st = random_bipartite(2, 2 + (seed % 2) as usize, seed);
    let brute = lqu_bruteforce(&st, &Spectrum::pauli(), ORACLE_BUDGET, seed)?;
    Ok((brute - lqu_closed_form(&st)?).abs())
}

fn permutation_spectrum(d: usize) -> lqu_core::Result<Spectrum> {
    let values: Vec<f64> = (0..d).map(|i| i as f64 * 0.7 + (i * i) as f64 * 0.1).collect();
    Spectrum::new(&values, &TOL)
}

fn permutation_minimum_bound(seed: u64) -> lqu_core::Result<f64> {
    let mut rng = rng_from_seed(seed);
    let d = 2 + (seed % 3) as usize;
    let rho = random_density_with(d, d, &mut rng);
    let spectrum = permutation_spectrum(d)?;
    let (min, _) = min_variance_fixed_spectrum(&rho, &spectrum)?;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let v = haar_unitary_with(d, &mut rng);
        worst = worst.max(min - variance(&rho, &Observable::from_spectrum(&v, &spectrum)?)?);
    }
    Ok(worst)
}

fn permutation_search_agreement(seed: u64) -> lqu_core::Result<f64> {
    let mut rng = rng_from_seed(seed);
    let d = 2 + (seed % 3) as usize;
    let rho = random_density_with(d, d, &mut rng);
    let spectrum = permutation_spectrum(d)?;
    let (min, _) = min_variance_fixed_spectrum(&rho, &spectrum)?;
    let outcome = minimize_over_unitaries(d, &UnitarySearch::new(ORACLE_BUDGET, seed), |v| {
        Observable::from_spectrum(v, &spectrum)
            .and_then(|k| variance(&rho, &k))
            .unwrap_or(f64::INFINITY)
    });
    Ok((outcome.value - min).abs())
}

fn metrology_probe(seed: u64) -> lqu_core::Result<(BipartiteState, Observable)> {
    let probe = random_bipartite(2, 3, seed);
    let h = observable(random_hermitian_with(2, &mut rng_from_seed(seed ^ 0xface)))?;
    Ok((probe, h))
}

const PHASES: [f64; 3] = [0.0, 0.7, 2.1];

fn metrology_chain(seed: u64) -> lqu_core::Result<f64> {
    let (probe, h) = metrology_probe(seed)?;
    let spectrum = h.spectrum(&TOL)?;
    let search = UnitarySearch::new(200, seed);
    let mut worst = f64::NEG_INFINITY;
    for phi in PHASES {
        let family = PhaseFamily::new(probe.clone(), h.clone(), phi)?;
        let rho = family.evolved()?;
        let g = family.generator();
        let lqu = lqu_for_spectrum(&rho, &spectrum, &search)?;
        let skew = skew_information(&rho, &g)?;
        let f = qfi(&rho, &g)?;
        worst = worst.max(4.0 * lqu - 4.0 * skew).max(4.0 * skew - f);
    }
    Ok(worst)
}

fn phase_invariance(seed: u64) -> lqu_core::Result<f64> {
    let (probe, h) = metrology_probe(seed)?;
    let g = PhaseFamily::new(probe.clone(), h.clone(), 0.0)?.generator();
    let skew0 = skew_information(&probe, &g)?;
    let f0 = qfi(&probe, &g)?;
    let mut worst: f64 = 0.0;
    for phi in PHASES {
        let rho = evolve_phase(&probe, &h, phi)?;
        worst = worst
            .max((skew_information(&rho, &g)? - skew0).abs())
            .max((qfi(&rho, &g)? - f0).abs());
    }
    Ok(worst)
}

fn fidelity_oracle(seed: u64) -> lqu_core::Result<f64> {
    let (probe, h) = metrology_probe(seed)?;
    let g = PhaseFamily::new(probe.clone(), h.clone(), 0.0)?.generator();
    let f = qfi(&probe, &g)?;
    let fd = qfi_finite_difference(&probe, &h, 1e-4)?;
    Ok(((fd - f) / f).abs())
}

fn cramer_rao(seed: u64) -> lqu_core::Result<f64> {
    let (probe, h) = metrology_probe(seed)?;
    let nu = 1 + seed % 1000;
    let b = estimation_bound(&probe, &h, nu, &UnitarySearch::new(50, seed))?;
    Ok((b.variance_bound * nu as f64 * b.qfi - 1.0).abs())
}

fn speed_of_evolution(seed: u64) -> lqu_core::Result<f64> {
    let (probe, h) = metrology_probe(seed)?;
    let delta = 1e-3;
    let moved = evolve_phase(&probe, &h, delta)?;
    let speed = hellinger_sq(&probe, &moved)? / (delta * delta);
    let skew = local_skew_information(&probe, h.matrix())?;
    Ok(((speed - skew) / skew).abs())
}

fn channel_completeness(seed: u64) -> lqu_core::Result<f64> {
    let ch = random_channel(2 + (seed % 3) as usize, 1 + (seed / 3 % 4) as usize, seed)?;
    Ok(ch.completeness_residual())
}

fn contractivity(seed: u64) -> lqu_core::Result<f64> {
    let d_b = 2 + (seed % 2) as usize;
    let st = random_bipartite(2, d_b, seed);
    let ch = random_channel(d_b, 1 + (seed / 2 % 4) as usize, seed ^ 0xc4a7)?;
    let out = apply_local(&st, &ch, Subsystem::B)?;
    Ok(lqu_closed_form(&out)? - lqu_closed_form(&st)?)
}

fn monotonicity(seed: u64) -> lqu_core::Result<f64> {
    let psi = random_pure(2, 2, seed)?;
    let ch = random_channel(2, 1 + (seed % 4) as usize, seed ^ 0xc4a7)?;
    let mut avg = 0.0;
    for (p, phi) in selective_local_ops(&psi, &ch)? {
        avg += p * lqu_closed_form(&phi)?;
    }
    Ok(avg - lqu_closed_form(&psi)?)
}

/// Outcomes of operations on A keep rho_B inside the original rank-2
/// support: the residual is the larger of the third eigenvalue of each
/// outcome's rho_B and its weight outside that support.
fn support_on_b(seed: u64) -> lqu_core::Result<f64> {
    let d_b = 3 + (seed % 2) as usize;
    let psi = random_pure(2, d_b, seed)?;
    let eig = hermitian_eig(&psi.reduced(Subsystem::B), &TOL)?;
    let top: Vec<Vec<C64>> = (d_b - 2..d_b).map(|k| eig.vector(k)).collect();
    let proj = ComplexMatrix::from_fn(d_b, |i, j| top.iter().map(|v| v[i] * v[j].conj()).sum());
    let ch = random_channel(2, 1 + (seed / 2 % 4) as usize, seed ^ 0xc4a7)?;
    let mut worst: f64 = eig.values[d_b - 3].abs();
    for (_, phi) in selective_local_ops(&psi, &ch)? {
        let rho_b = phi.reduced(Subsystem::B);
        let inside = &(&proj * &rho_b) * &proj;
        let third = hermitian_eig(&rho_b, &TOL)?.values[d_b - 3].abs();
        worst = worst.max(third).max(inside.max_abs_diff(&rho_b));
    }
    Ok(worst)
}

pub fn properties() -> Vec<Property> {
    let p = |name, suite, tolerance, check: Check| Property {
        name,
        suite,
        tolerance,
        check,
    };
    vec![
        p("skew.nonnegative", Suite::Skew, 1e-12, skew_nonnegative),
        p("skew.below_variance", Suite::Skew, 1e-9, skew_below_variance),
        p("skew.pure_state_equality", Suite::Skew, 1e-9, skew_pure_equality),
        p("skew.convexity", Suite::Skew, 1e-9, skew_convexity),
        p("skew.hellinger_identity", Suite::Skew, 1e-10, hellinger_identity),
        p(
            "lqu.local_unitary_invariance",
            Suite::Lqu,
            1e-9,
            local_unitary_invariance,
        ),
        p("lqu.classical_quantum_zero", Suite::Lqu, 1e-10, classical_quantum_zero),
        p("lqu.werner_discord", Suite::Lqu, 0.0, werner_discord),
        p("lqu.oracle_equivalence", Suite::Lqu, 1e-6, oracle_equivalence),
        p(
            "lqu.permutation_minimum_bound",
            Suite::Lqu,
            1e-9,
            permutation_minimum_bound,
        ),
        p(
            "lqu.permutation_search_agreement",
            Suite::Lqu,
            1e-6,
            permutation_search_agreement,
        ),
        p("metrology.chain", Suite::Metrology, 1e-8, metrology_chain),
        p("metrology.phase_invariance", Suite::Metrology, 1e-9, phase_invariance),
        p("metrology.fidelity_oracle", Suite::Metrology, 1e-4, fidelity_oracle),
        p("metrology.cramer_rao", Suite::Metrology, 4.0 * f64::EPSILON, cramer_rao),
        p(
            "metrology.speed_of_evolution",
            Suite::Metrology,
            0.05,
            speed_of_evolution,
        ),
        p("channels.completeness", Suite::Channels, 1e-9, channel_completeness),
        p("channels.contractivity_on_b", Suite::Channels, 1e-8, contractivity),
        p("channels.pure_state_monotonicity", Suite::Channels, 1e-8, monotonicity),
        p("channels.support_on_b", Suite::Channels, 1e-10, support_on_b),
    ]
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub seed: u64,
    pub trials: u64,
    /// Replaces every tolerance with `-f64::MAX` so that all checks fail.
    pub corrupt_tolerances: bool,
}

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub tolerance: f64,
    pub trials: u64,
    pub failures: u64,
    pub worst_residual: f64,
    pub worst_seed: u64,
    pub failing_seed: Option<u64>,
    pub error: Option<String>,
    pub seconds: f64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub results: Vec<PropertyResult>,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(PropertyResult::passed)
    }

    pub fn failed(&self) -> usize {
        self.results.iter().filter(|r| !r.passed()).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let o = &self.options;
        let _ = writeln!(
            out,
            "lqu verify: suite={} seed={} trials={}",
            o.suite.name(),
            o.seed,
            o.trials
        );
        let _ = writeln!(
            out,
            "Theorems (entanglement monotonicity, discord-measure criteria, inequalities) are checked statistically on random instances: a pass is evidence, not proof."
        );
        if o.corrupt_tolerances {
            let _ = writeln!(
                out,
                "self-test: tolerances deliberately corrupted; every property should fail"
            );
        }
        for r in &self.results {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            let _ = write!(
                out,
                "{status}  {:<36} trials={:<5} worst={:+.3e} (seed {}) tol={:.1e} time={:.2}s",
                r.name, r.trials, r.worst_residual, r.worst_seed, r.tolerance, r.seconds
            );
            if let Some(s) = r.failing_seed {
                let _ = write!(out, " failures={} first_failing_seed={s}", r.failures);
            }
            if let Some(e) = &r.error {
                let _ = write!(out, " error={e}");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "total: {} properties, {} failed, {} trials each, wall time {:.2}s",
            self.results.len(),
            self.failed(),
            o.trials,
            self.seconds
        );
        out
    }
}

fn run_property(p: &Property, opts: &VerifyOptions) -> PropertyResult {
    let start = Instant::now();
    let tolerance = if opts.corrupt_tolerances {
        -f64::MAX
    } else {
        p.tolerance
    };
    let outcomes: Vec<(u64, lqu_core::Result<f64>)> = (0..opts.trials)
        .into_par_iter()
        .map(|i| {
            let seed = opts.seed.wrapping_add(i);
            (seed, (p.check)(seed))
        })
        .collect();
    let mut result = PropertyResult {
        name: p.name,
        tolerance,
        trials: opts.trials,
        failures: 0,
        worst_residual: f64::NEG_INFINITY,
        worst_seed: opts.seed,
        failing_seed: None,
        error: None,
        seconds: 0.0,
    };
    for (seed, outcome) in outcomes {
        let ok = match outcome {
            Ok(r) => {
                if r > result.worst_residual || r.is_nan() {
                    result.worst_residual = r;
                    result.worst_seed = seed;
                }
                r <= tolerance
            }
            Err(e) => {
                result.error.get_or_insert_with(|| e.to_string());
                false
            }
        };
        if !ok {
            result.failures += 1;
            result.failing_seed.get_or_insert(seed);
        }
    }
    result.seconds = start.elapsed().as_secs_f64();
    result
}

pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let start = Instant::now();
    let results = properties()
        .iter()
        .filter(|p| opts.suite == Suite::All || p.suite == opts.suite)
        .map(|p| run_property(p, opts))
        .collect();
    VerifyReport {
        options: opts.clone(),
        results,
        seconds: start.elapsed().as_secs_f64(),
    }
}
