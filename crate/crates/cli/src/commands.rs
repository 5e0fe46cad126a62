//! Subcommand implementations. Each returns data; printing and file output
//! happen in the binary.

use std::collections::BTreeMap;
use std::path::PathBuf;

use lqu_core::linalg::haar_unitary;
use lqu_core::metrology::{qfi, spin_probe_lqu_formula};
use lqu_core::states::{dqc1_output, linear_entropy_two_qubit, spin_probe, werner};
use lqu_core::uncertainty::{
    hellinger_sq, lqu_closed_form, lqu_qubit, lqu_search, skew_information, variance, Observable, Spectrum,
    UnitarySearch,
};
use lqu_core::{BipartiteState, ComplexMatrix, Tolerances, RNG_ALGORITHM};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::tolerance_map;
use crate::error::{CliError, CliResult};
use crate::matrix_file::{load, LoadedMatrix};
use crate::table::{Grid, Meta, Table};

/// Largest register accepted by `dqc1-sweep`.
pub const MAX_DQC1_QUBITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Lqu,
    Skew,
    Qfi,
    Hellinger,
    Variance,
}

#[derive(Debug, Clone)]
pub struct ComputeRequest {
    pub state: PathBuf,
    pub quantity: Quantity,
    pub observable: Option<PathBuf>,
    pub other: Option<PathBuf>,
    pub spectrum: Option<Vec<f64>>,
    pub budget: usize,
    pub seed: u64,
    /// Independent searches from seeds `seed, seed + 1, ...`; the smallest
    /// value wins, ties going to the lowest seed.
    pub restarts: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComputeReport {
    pub quantity: Quantity,
    pub value: f64,
    pub method: &'static str,
    pub inputs: BTreeMap<&'static str, InputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    pub budget: usize,
    pub seed: u64,
    pub restarts: u64,
    pub rng: &'static str,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub version: &'static str,
}

fn record(path: &std::path::Path, loaded: &LoadedMatrix) -> InputRecord {
    InputRecord {
        path: path.display().to_string(),
        sha256: loaded.sha256.clone(),
    }
}

/// `K` on the whole space, or `K (x) I_B` when it acts on A only.
fn full_observable(state: &LoadedMatrix, k: Observable, tol: &Tolerances) -> CliResult<Observable> {
    let dim = state.file.dim;
    if k.dim() == dim {
        return Ok(k);
    }
    let st = state.file.bipartite(tol)?;
    if k.dim() != st.d_a() {
        return Err(CliError::Validation(format!(
            "observable dimension {} matches neither the state ({dim}) nor dA ({})",
            k.dim(),
            st.d_a()
        )));
    }
    Ok(Observable::new(st.lift_a(k.matrix())?, tol)?)
}

fn missing(what: &str, quantity: Quantity) -> CliError {
    CliError::MissingInput(format!("{what} is required for {quantity:?}").to_lowercase())
}

/// Minimum over `restarts` independent searches, reduced in seed order.
pub fn lqu_multistart(
    state: &BipartiteState,
    spectrum: &Spectrum,
    budget: usize,
    seed: u64,
    restarts: u64,
) -> CliResult<f64> {
    let values: Vec<lqu_core::Result<f64>> = (0..restarts.max(1))
        .into_par_iter()
        .map(|k| Ok(lqu_search(state, spectrum, &UnitarySearch::new(budget, seed.wrapping_add(k)))?.value))
        .collect();
    let mut best = f64::INFINITY;
    for v in values {
        let v = v?;
        if v < best {
            best = v;
        }
    }
    Ok(best)
}

pub fn compute(req: &ComputeRequest, tol: &Tolerances) -> CliResult<ComputeReport> {
    let state = load(&req.state)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("state", record(&req.state, &state));
    let observable = match &req.observable {
        Some(p) => {
            let o = load(p)?;
            inputs.insert("observable", record(p, &o));
            Some(o)
        }
        None => None,
    };
    let mut spectrum_used = None;
    let (value, method) = match req.quantity {
        Quantity::Lqu => {
            let st = state.file.bipartite(tol)?;
            let values = match (&req.spectrum, &observable) {
                (Some(v), _) => Some(v.clone()),
                (None, Some(o)) => Some(o.file.observable(tol)?.eigenvalues().to_vec()),
                (None, None) => None,
            };
            match values {
                None if st.d_a() == 2 => (lqu_closed_form(&st)?, "closed_form"),
                None => {
                    return Err(CliError::MissingInput(format!(
                        "--spectrum (or --observable) is required for lqu when dA = {}",
                        st.d_a()
                    )))
                }
                Some(v) => {
                    let spectrum = Spectrum::new(&v, tol)?;
                    if spectrum.len() != st.d_a() {
                        return Err(CliError::Validation(format!(
                            "spectrum has {} values, dA = {}",
                            spectrum.len(),
                            st.d_a()
                        )));
                    }
                    spectrum_used = Some(v);
                    if st.d_a() == 2 {
                        (lqu_qubit(&st, &spectrum)?, "closed_form")
                    } else {
                        (
                            lqu_multistart(&st, &spectrum, req.budget, req.seed, req.restarts)?,
                            "search",
                        )
                    }
                }
            }
        }
        Quantity::Skew | Quantity::Qfi | Quantity::Variance => {
            let o = observable
                .as_ref()
                .ok_or_else(|| missing("--observable", req.quantity))?;
            let rho = state.file.density(tol)?;
            let k = full_observable(&state, o.file.observable(tol)?, tol)?;
            let v = match req.quantity {
                Quantity::Skew => skew_information(&rho, &k)?,
                Quantity::Qfi => qfi(&rho, &k)?,
                _ => variance(&rho, &k)?,
            };
            (v, "direct")
        }
        Quantity::Hellinger => {
            let p = req.other.as_ref().ok_or_else(|| missing("--other", req.quantity))?;
            let other = load(p)?;
            inputs.insert("other", record(p, &other));
            let rho = state.file.density(tol)?;
            let chi = other.file.density(tol)?;
            (hellinger_sq(&rho, &chi)?, "direct")
        }
    };
    Ok(ComputeReport {
        quantity: req.quantity,
        value,
        method,
        inputs,
        spectrum: spectrum_used,
        budget: req.budget,
        seed: req.seed,
        restarts: req.restarts,
        rng: RNG_ALGORITHM,
        tolerances: tolerance_map(tol),
        version: env!("CARGO_PKG_VERSION"),
    })
}

pub fn werner_sweep(grid: &Grid, tol: &Tolerances, command: &str) -> CliResult<Table> {
    grid.check_within(0.0, 1.0, "p")?;
    let mut table = Table::new(
        Meta::new(None, command),
        vec!["p", "variance_sz", "lqu", "linear_entropy"],
    );
    for p in grid.values() {
        let st = werner(p)?.with_tolerances(tol)?;
        let sz = Observable::new(st.lift_a(&ComplexMatrix::pauli_z())?, tol)?;
        table.push(vec![
            p,
            variance(&st, &sz)?,
            lqu_closed_form(&st)?,
            linear_entropy_two_qubit(&st)?,
        ]);
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub enum UnitarySource {
    Haar { seed: u64 },
    File(PathBuf),
}

pub fn dqc1_formula(mu: f64) -> f64 {
    0.5 * (1.0 - (1.0 - mu * mu).max(0.0).sqrt())
}

pub fn dqc1_sweep(n: u32, grid: &Grid, source: &UnitarySource, tol: &Tolerances, command: &str) -> CliResult<Table> {
    if !(1..=MAX_DQC1_QUBITS).contains(&n) {
        return Err(CliError::Validation(format!("n = {n} outside 1..={MAX_DQC1_QUBITS}")));
    }
    grid.check_within(0.0, 1.0, "mu")?;
    let d = 1usize << n;
    let (u, seed) = match source {
        UnitarySource::Haar { seed } => (haar_unitary(d, *seed), Some(*seed)),
        UnitarySource::File(p) => {
            let u = load(p)?.file.unitary(tol)?;
            if u.dim() != d {
                return Err(CliError::Validation(format!(
                    "unitary has dimension {}, need {d}",
                    u.dim()
                )));
            }
            (u, None)
        }
    };
    let rows: Vec<CliResult<Vec<f64>>> = grid
        .values()
        .into_par_iter()
        .map(|mu| {
            let st = dqc1_output(n, mu, &u)?.with_tolerances(tol)?;
            let numeric = lqu_closed_form(&st)?;
            let formula = dqc1_formula(mu);
            Ok(vec![n as f64, mu, numeric, formula, (numeric - formula).abs()])
        })
        .collect();
    let mut table = Table::new(
        Meta::new(seed, command),
        vec!["n", "mu", "lqu_numeric", "lqu_formula", "abs_error"],
    );
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

pub fn spin_probe_sweep(js: &[f64], grid: &Grid, nu: u64, tol: &Tolerances, command: &str) -> CliResult<Table> {
    grid.check_within(0.0, 1.0, "r")?;
    if nu == 0 {
        return Err(CliError::Validation("nu must be at least 1".into()));
    }
    let mut table = Table::new(
        Meta::new(None, command),
        vec![
            "j",
            "r",
            "lqu_formula",
            "lqu_numeric",
            "qfi",
            "four_lqu",
            "var_bound",
            "shot_noise",
            "heisenberg",
        ],
    );
    for &j in js {
        for r in grid.values() {
            let probe = spin_probe(j, r)?;
            let st = probe.state.clone().with_tolerances(tol)?;
            let numeric = lqu_qubit(&st, &probe.spectrum())?;
            let h = Observable::new(st.lift_a(&probe.hamiltonian())?, tol)?;
            let f = qfi(&st, &h)?;
            table.push(vec![
                j,
                r,
                spin_probe_lqu_formula(j, r)?,
                numeric,
                f,
                4.0 * numeric,
                1.0 / (nu as f64 * f),
                2.0 * j,
                4.0 * j * j,
            ]);
        }
    }
    Ok(table)
}

/// Parses a comma-separated list of reals.
pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Parse(format!("{t:?} in {s:?}: {e}")))
        })
        .collect()
}
