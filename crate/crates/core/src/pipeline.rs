//! End-to-end experiment: exact reference, ground state, sampled EOM
//! matrices, reconstructed Gibbs states and their errors.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eom::{
    generate_excitation_basis, matrix_element_observables, reconstruct_excited_states, solve_gep,
    ExcitationBasis, GepOptions, MatrixKind, ObservableTable,
};
use crate::error::{Error, Result};
use crate::groundstate::{hartree_fock_state, vqe_minimize, UccsdAnsatz, VqeOptions};
use crate::io::{
    read_fcidump, GroundStateMode, MolecularIntegrals, ResultRow, ResultsTable, RunConfig,
    ShotCount,
};
use crate::operators::{qubit_hamiltonian, PauliOperator};
use crate::povm::{canonical_sic, estimate_pauli_strings, sample_outcomes, OutcomeRecord, PovmSpec};
use crate::simulator::{exact_eigenstates, expectation, string_expectation, Sector, Spectrum, StateVector};
use crate::thermal::GibbsEnsemble;

/// Reference observable counts keyed by excitation-basis size.
pub const REFERENCE_OBSERVABLE_COUNTS: [(usize, usize); 2] = [(3, 100), (26, 10816)];

/// Counting convention of [`CensusReport::distinct_strings`].
pub const COUNTING_CONVENTION: &str =
    "distinct non-identity Pauli strings across all M, Q, V, W elements after simplification";

/// Hamiltonian, exact sector spectrum, excitation basis and reference
/// ground state of one integrals file.
#[derive(Clone, Debug)]
pub struct GroundStateSetup {
    pub integrals: MolecularIntegrals,
    pub hamiltonian: PauliOperator<f64>,
    pub sector: Sector,
    pub exact: Spectrum<f64>,
    pub basis: ExcitationBasis<f64>,
    pub ground_state: StateVector<f64>,
    /// `⟨0|H|0⟩` of the reference ground state.
    pub ground_energy: f64,
    pub vqe: Option<VqeRecord>,
}

/// Optimized ansatz parameters; also the on-disk cache format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeRecord {
    pub integrals_path: PathBuf,
    pub seed: u64,
    pub restarts: usize,
    pub max_evaluations: usize,
    pub energy: f64,
    pub params: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

fn active_space(ints: &MolecularIntegrals) -> Result<(usize, usize)> {
    let n_e = ints.n_electrons();
    if n_e % 2 != 0 || ints.spin_2s() != 0 {
        return Err(Error::OddElectronCount(n_e));
    }
    let occ = n_e / 2;
    Ok((occ, ints.n_spatial_orbitals() - occ))
}

fn vqe_cache_path(cfg: &RunConfig) -> PathBuf {
    cfg.vqe_cache_path
        .clone()
        .unwrap_or_else(|| cfg.output_path.with_extension("vqe.json"))
}

fn load_cached_vqe(
    path: &Path,
    cfg: &RunConfig,
    h: &PauliOperator<f64>,
    ansatz: &UccsdAnsatz<f64>,
    reference: &StateVector<f64>,
) -> Option<(VqeRecord, StateVector<f64>)> {
    let text = std::fs::read_to_string(path).ok()?;
    let rec: VqeRecord = serde_json::from_str(&text).ok()?;
    let same = rec.integrals_path == cfg.integrals_path
        && rec.seed == cfg.rng_seed
        && rec.restarts == cfg.vqe_restarts
        && rec.max_evaluations == cfg.vqe_max_evaluations
        && rec.params.len() == ansatz.n_parameters();
    if !same {
        return None;
    }
    let psi = ansatz.state(&rec.params, reference).ok()?;
    let e = expectation(h, &psi).ok()?.re;
    ((e - rec.energy).abs() < 1e-10).then_some((rec, psi))
}

impl GroundStateSetup {
    pub fn prepare(cfg: &RunConfig) -> Result<Self> {
        let integrals = read_fcidump(&cfg.integrals_path)?;
        let hamiltonian = qubit_hamiltonian::<f64>(&integrals)?;
        let sector = Sector::with_sz(integrals.n_electrons(), integrals.spin_2s() as f64 / 2.0);
        let exact = exact_eigenstates(&hamiltonian, sector)?;
        let (occ, virt) = active_space(&integrals)?;
        let basis = generate_excitation_basis::<f64>(occ, virt);
        let (ground_state, vqe) = match cfg.ground_state_mode {
            GroundStateMode::Exact => (exact.levels()[0].state.clone(), None),
            GroundStateMode::Vqe => {
                let n_q = hamiltonian.n_qubits();
                let reference = hartree_fock_state::<f64>(integrals.n_electrons(), n_q)?;
                let ansatz = UccsdAnsatz::new(&basis);
                let cache = vqe_cache_path(cfg);
                match load_cached_vqe(&cache, cfg, &hamiltonian, &ansatz, &reference) {
                    Some((rec, psi)) => {
                        log::info!("reusing VQE parameters from {}", cache.display());
                        (psi, Some(rec))
                    }
                    None => {
                        let opts = VqeOptions {
                            max_evaluations: cfg.vqe_max_evaluations,
                            restarts: cfg.vqe_restarts,
                            ..VqeOptions::default()
                        };
                        let out = vqe_minimize(&hamiltonian, &basis, &reference, cfg.rng_seed, &opts)?;
                        let rec = VqeRecord {
                            integrals_path: cfg.integrals_path.clone(),
                            seed: cfg.rng_seed,
                            restarts: cfg.vqe_restarts,
                            max_evaluations: cfg.vqe_max_evaluations,
                            energy: out.energy,
                            params: out.params,
                            evaluations: out.evaluations,
                            converged: out.converged,
                        };
                        if let Some(dir) = cache.parent().filter(|d| !d.as_os_str().is_empty()) {
                            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                        }
                        let json = serde_json::to_string_pretty(&rec)
                            .map_err(|e| Error::Serialization(e.to_string()))?;
                        std::fs::write(&cache, json).map_err(|e| Error::io(&cache, e))?;
                        (out.state, Some(rec))
                    }
                }
            }
        };
        let ground_energy = expectation(&hamiltonian, &ground_state)?.re;
        Ok(Self {
            integrals,
            hamiltonian,
            sector,
            exact,
            basis,
            ground_state,
            ground_energy,
            vqe,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }
}

/// Everything shared by the repetitions of one run.
pub struct Experiment {
    pub setup: GroundStateSetup,
    pub table: ObservableTable<f64>,
    povm: PovmSpec<f64>,
    betas: Vec<f64>,
    ideal: Vec<(GibbsEnsemble<f64>, f64)>,
    gep: GepOptions,
    symmetrize: bool,
    shared_record: bool,
}

/// Result of one repetition before it is expanded into per-β rows.
#[derive(Clone, Debug, PartialEq)]
pub struct RepetitionOutcome {
    /// `(β, trace distance, ΔE)`; empty when the repetition failed
    /// outright.
    pub per_beta: Vec<(f64, f64, f64)>,
    pub ill_conditioned: bool,
    pub failure: Option<String>,
    pub retained_excitations: usize,
    pub discarded_states: usize,
}

impl Experiment {
    pub fn prepare(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let setup = GroundStateSetup::prepare(cfg)?;
        let table = matrix_element_observables(&setup.hamiltonian, &setup.basis)?;
        let level_h = level_energies(&setup.hamiltonian, &setup.exact)?;
        let ideal = cfg
            .beta_grid
            .iter()
            .map(|&beta| {
                let ens = GibbsEnsemble::new(&setup.exact, beta)?;
                let e = dot(ens.weights(), &level_h);
                Ok((ens, e))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            povm: canonical_sic(setup.n_qubits()),
            table,
            betas: cfg.beta_grid.clone(),
            ideal,
            gep: GepOptions::with_eta(cfg.eta),
            symmetrize: cfg.symmetrize,
            shared_record: cfg.shared_record,
            setup,
        })
    }

    /// Exact ground-state expectations of the table's strings.
    pub fn exact_values(&self) -> Vec<f64> {
        self.table
            .strings()
            .par_iter()
            .map(|s| string_expectation(s, &self.setup.ground_state))
            .collect()
    }

    /// Estimates of the table's strings from `shots` measurements. With a
    /// shared record one dataset serves every string; otherwise string `k`
    /// gets its own record.
    pub fn sampled_values(&self, shots: usize, seed: u64) -> Result<Vec<f64>> {
        let strings = self.table.strings();
        if self.shared_record {
            let rec = sample_outcomes(&self.setup.ground_state, &self.povm, shots, seed)?;
            return Ok(estimate_pauli_strings(strings, &self.povm, &rec)?
                .into_iter()
                .map(|e| e.mean)
                .collect());
        }
        strings
            .par_iter()
            .enumerate()
            .map(|(k, s)| {
                let sub = seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add(k as u64);
                let rec = sample_outcomes(&self.setup.ground_state, &self.povm, shots, sub)?;
                Ok(estimate_pauli_strings(std::slice::from_ref(s), &self.povm, &rec)?[0].mean)
            })
            .collect()
    }

    /// EOM solve, reconstruction and thermal errors from string
    /// expectation values.
    pub fn evaluate(&self, values: &[f64]) -> Result<RepetitionOutcome> {
        let mut mats = self.table.assemble(values)?;
        if self.symmetrize {
            mats = mats.symmetrized();
        }
        let sol = match solve_gep(&mats, &self.gep) {
            Ok(sol) => sol,
            Err(Error::SingularMetric(v)) => {
                return Ok(RepetitionOutcome {
                    per_beta: Vec::new(),
                    ill_conditioned: false,
                    failure: Some(format!("singular metric (largest |eigenvalue| {v:.3e})")),
                    retained_excitations: 0,
                    discarded_states: 0,
                })
            }
            Err(e) => return Err(e),
        };
        let setup = &self.setup;
        let rec = reconstruct_excited_states(&sol, &setup.basis, &setup.ground_state, setup.ground_energy)?;
        let failure = instability(sol.excitations.len(), sol.dim, sol.ill_conditioned, sol.condition_number);
        let level_h = level_energies(&setup.hamiltonian, &rec.spectrum)?;
        let per_beta = self
            .betas
            .iter()
            .zip(&self.ideal)
            .map(|(&beta, (ideal, ideal_e))| {
                let ens = GibbsEnsemble::new(&rec.spectrum, beta)?;
                let d = ideal.trace_distance(&ens)?;
                let e = dot(ens.weights(), &level_h);
                Ok((beta, d.min(1.0), (ideal_e - e).abs()))
            })
            .collect::<Result<_>>()?;
        Ok(RepetitionOutcome {
            per_beta,
            ill_conditioned: sol.ill_conditioned,
            failure,
            retained_excitations: sol.excitations.len(),
            discarded_states: rec.discarded,
        })
    }

    fn rows(&self, shots: ShotCount, repetition: usize, out: RepetitionOutcome) -> Vec<ResultRow> {
        let base = ResultRow {
            beta: 0.0,
            shots,
            repetition,
            trace_distance: None,
            delta_e: None,
            ill_conditioned: out.ill_conditioned,
            failed: out.failure.is_some(),
            failure: out.failure.clone(),
            retained_excitations: out.retained_excitations,
            discarded_states: out.discarded_states,
        };
        if out.per_beta.is_empty() {
            return self
                .betas
                .iter()
                .map(|&beta| ResultRow { beta, ..base.clone() })
                .collect();
        }
        out.per_beta
            .iter()
            .map(|&(beta, d, de)| ResultRow {
                beta,
                trace_distance: Some(d),
                delta_e: Some(de),
                ..base.clone()
            })
            .collect()
    }
}

/// A repetition is unstable when the metric is ill conditioned or fewer
/// than `dim` physical roots survive the filter.
fn instability(roots: usize, dim: usize, ill_conditioned: bool, cond: f64) -> Option<String> {
    if ill_conditioned {
        Some(format!("ill-conditioned metric (condition number {cond:.3e})"))
    } else if roots < dim {
        Some(format!("{roots} of {dim} excitation energies real and positive"))
    } else {
        None
    }
}

fn level_energies(h: &PauliOperator<f64>, spec: &Spectrum<f64>) -> Result<Vec<f64>> {
    spec.levels()
        .iter()
        .map(|l| Ok(expectation(h, &l.state)?.re))
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Seed of repetition `r`.
pub fn repetition_seed(base: u64, r: usize) -> u64 {
    base.wrapping_add(r as u64)
}

/// Runs every (shot count, repetition) pair of `cfg`. The infinite-shot
/// entry is deterministic and evaluated once, as repetition 0.
pub fn run_pipeline(cfg: &RunConfig) -> Result<ResultsTable> {
    let exp = Experiment::prepare(cfg)?;
    run_experiment(&exp, cfg)
}

pub fn run_experiment(exp: &Experiment, cfg: &RunConfig) -> Result<ResultsTable> {
    let mut table = ResultsTable::new(cfg.spread_percentile);
    for &shots in &cfg.shot_counts {
        let rows: Vec<Vec<ResultRow>> = match shots {
            ShotCount::Infinite => {
                let out = exp.evaluate(&exp.exact_values())?;
                vec![exp.rows(shots, 0, out)]
            }
            ShotCount::Finite(s) => (0..cfg.repetitions)
                .into_par_iter()
                .map(|r| {
                    let values = exp.sampled_values(s as usize, repetition_seed(cfg.rng_seed, r))?;
                    Ok(exp.rows(shots, r, exp.evaluate(&values)?))
                })
                .collect::<Result<_>>()?,
        };
        let failed = rows.iter().filter(|r| r.first().is_some_and(|x| x.failed)).count();
        log::info!("shots {shots}: {failed} of {} repetitions failed", rows.len());
        table.rows.extend(rows.into_iter().flatten());
    }
    Ok(table)
}

/// Samples the ground-state outcome record for the first finite shot
/// count of `cfg` with the base seed.
pub fn sample_ground_state(cfg: &RunConfig) -> Result<OutcomeRecord> {
    cfg.validate()?;
    let shots = cfg
        .shot_counts
        .iter()
        .find_map(|s| s.finite())
        .ok_or_else(|| Error::invalid("shot_counts", "sampling needs a finite shot count"))?;
    let setup = GroundStateSetup::prepare(cfg)?;
    let spec = canonical_sic(setup.n_qubits());
    sample_outcomes(&setup.ground_state, &spec, shots as usize, cfg.rng_seed)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixCensus {
    pub matrix: MatrixKind,
    pub elements: usize,
    pub nonzero_elements: usize,
    pub distinct_strings: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusReport {
    pub n_qubits: usize,
    pub n_electrons: usize,
    pub basis_size: usize,
    pub singles: usize,
    pub doubles: usize,
    pub hamiltonian_terms: usize,
    pub matrices: Vec<MatrixCensus>,
    pub distinct_strings: usize,
    pub reference_count: Option<usize>,
    pub matches_reference: Option<bool>,
    pub convention: String,
}

/// Sizes of the measurement problem, without sampling.
pub fn observable_census(cfg: &RunConfig) -> Result<CensusReport> {
    let ints = read_fcidump(&cfg.integrals_path)?;
    let h = qubit_hamiltonian::<f64>(&ints)?;
    let (occ, virt) = active_space(&ints)?;
    let basis = generate_excitation_basis::<f64>(occ, virt);
    let table = matrix_element_observables(&h, &basis)?;
    let d = basis.len();
    let reference_count = REFERENCE_OBSERVABLE_COUNTS
        .iter()
        .find(|(size, _)| *size == d)
        .map(|&(_, count)| count);
    Ok(CensusReport {
        n_qubits: h.n_qubits(),
        n_electrons: ints.n_electrons(),
        basis_size: d,
        singles: basis.singles(),
        doubles: basis.doubles(),
        hamiltonian_terms: h.len(),
        matrices: MatrixKind::ALL
            .iter()
            .map(|&k| MatrixCensus {
                matrix: k,
                elements: d * d,
                nonzero_elements: table.nonzero_elements(k),
                distinct_strings: table.strings_for(k),
            })
            .collect(),
        distinct_strings: table.strings().len(),
        reference_count,
        matches_reference: reference_count.map(|c| c == table.strings().len()),
        convention: COUNTING_CONVENTION.to_string(),
    })
}

impl fmt::Display for CensusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits            {}", self.n_qubits)?;
        writeln!(f, "electrons         {}", self.n_electrons)?;
        writeln!(
            f,
            "excitation basis  {} ({} singles, {} doubles)",
            self.basis_size, self.singles, self.doubles
        )?;
        writeln!(f, "hamiltonian terms {}", self.hamiltonian_terms)?;
        for m in &self.matrices {
            writeln!(
                f,
                "{:?}: {} elements, {} nonzero, {} distinct strings",
                m.matrix, m.elements, m.nonzero_elements, m.distinct_strings
            )?;
        }
        writeln!(f, "distinct strings  {}", self.distinct_strings)?;
        writeln!(f, "convention        {}", self.convention)?;
        match (self.reference_count, self.matches_reference) {
            (Some(r), Some(true)) => writeln!(f, "reference count   {r} (match)"),
            (Some(r), Some(false)) => writeln!(
                f,
                "reference count   {r} (MISMATCH: the reference count follows an unstated \
                 convention; this count uses the one above)"
            ),
            _ => writeln!(f, "reference count   none for this basis size"),
        }
    }
}
