use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use bowtie_core::analysis::{
    bowtie_cost_report, clifford_baseline, loglog_slope, qgt, relative_error, spsa_csv, spsa_estimate_simulated,
    spsa_exact_study, Backend, SpsaEstimate, TnParams, SIMULATED_SPSA_CAP,
};
use bowtie_core::ansatz::{build_chain_hva_from, build_heavyhex_ansatz, build_trotter2_from, optimize_schedule, ScheduleConfig};
use bowtie_core::hamiltonians::{build_model, sum_from_text, Family, ModelSpec};
use bowtie_core::lattice::{heavyhex_with_sites, parse_class_label};
use bowtie_core::lightcone::{precompute_all, BowtieSet};
use bowtie_core::mclachlan::evolve;
use bowtie_core::skqd::{derive_seed, ground_state, normalized_energy, run_pipeline, GapMethod, KrylovRecord, SkqdConfig};
use bowtie_core::statevector::{exact_evolve, simulate_circuit, ORACLE_CAP};
use bowtie_core::{BowtieKind, Circuit, EvolveConfig, Lattice, Mode, PauliSum, Solver, Trajectory};

use crate::config::{CircuitKind, EvolveSection, ModeName, RunConfig, SolverName, ThetaInit};
use crate::output::OutputDir;
use crate::plot::{line_plot, Series};
use crate::CliError;

/// Flags shared by every command that are not part of the config.
#[derive(Clone, Debug, Default)]
pub struct Extras {
    pub svg: bool,
    pub timings: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Wraps parse errors with the offending file name.
fn in_file<T>(path: &Path, r: bowtie_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub struct Problem {
    pub h: PauliSum,
    pub lattice: Option<Lattice>,
    pub circuit: Circuit,
    pub theta0: Vec<f64>,
}

pub fn build_hamiltonian(cfg: &RunConfig) -> Result<(PauliSum, Option<Lattice>), CliError> {
    let m = &cfg.model;
    if let Some(p) = &m.terms_file {
        return Ok((in_file(p, sum_from_text(&read(p)?))?, None));
    }
    let lattice = match &m.lattice_file {
        Some(p) => in_file(p, Lattice::from_text(&read(p)?))?,
        None => match m.family {
            Family::Heavyhex => heavyhex_with_sites(m.sites)?,
            _ => Lattice::chain(m.sites)?,
        },
    };
    let spec = ModelSpec {
        lattice: lattice.clone(),
        family: m.family,
        c_field: m.c_field,
        c_random: m.c_random,
        disorder_seed: m.disorder_seed,
    };
    Ok((build_model(&spec)?, Some(lattice)))
}

fn parse_sequence(s: &str) -> Result<Vec<usize>, CliError> {
    let tokens: Vec<String> = if s.contains(|c: char| c == ',' || c.is_whitespace()) {
        s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(String::from).collect()
    } else {
        s.chars().map(String::from).collect()
    };
    if tokens.is_empty() {
        return Err(CliError::Usage("circuit.sequence is empty".into()));
    }
    tokens
        .iter()
        .map(|t| parse_class_label(t).ok_or_else(|| CliError::Usage(format!("bad colour class {t:?} in sequence"))))
        .collect()
}

pub fn build_circuit(cfg: &RunConfig, h: &PauliSum, lattice: Option<&Lattice>) -> Result<Circuit, CliError> {
    let c = &cfg.circuit;
    let n = h.n_qubits();
    let circuit = match c.kind {
        CircuitKind::Hva => build_chain_hva_from(n, c.layers, h, c.reference)?,
        CircuitKind::Trotter => {
            build_trotter2_from(h, c.trotter_time, c.layers, &bowtie_core::skqd::schedule_for(h)?, c.reference)?
        }
        CircuitKind::Heavyhex => {
            let lat = lattice.ok_or_else(|| CliError::Usage("heavyhex circuit needs a lattice, not a terms file".into()))?;
            let sc = ScheduleConfig {
                classes: 3,
                sequence: parse_sequence(&c.sequence)?,
                with_final_ry: c.final_ry,
                observables: h.paulis(),
            };
            let choice = optimize_schedule(lat, &c.schedule_seeds, &sc)?;
            log::info!("schedule seed {} with max light-cone {}", choice.coloring.seed(), choice.max_lightcone);
            build_heavyhex_ansatz(lat, &choice.coloring, &sc.sequence, sc.with_final_ry)?
        }
        CircuitKind::File => {
            let p = c.file.as_ref().ok_or_else(|| CliError::Usage("circuit.kind = file needs circuit.file".into()))?;
            in_file(p, read(p)?.parse::<Circuit>())?
        }
    };
    if circuit.n_qubits() != n {
        return Err(CliError::Usage(format!(
            "circuit has {} qubits but the model has {n}",
            circuit.n_qubits()
        )));
    }
    Ok(circuit)
}

pub fn initial_theta(cfg: &RunConfig, n_params: usize) -> Result<Vec<f64>, CliError> {
    let init = &cfg.init;
    if let Some(p) = &init.file {
        let v: Vec<f64> = serde_json::from_str(&read(p)?).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        if v.len() != n_params {
            return Err(CliError::Usage(format!("{}: {} angles for {n_params} parameters", p.display(), v.len())));
        }
        return Ok(v);
    }
    Ok(match init.theta {
        ThetaInit::Zero => vec![0.0; n_params],
        ThetaInit::Constant => vec![init.scale; n_params],
        ThetaInit::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, u64::MAX));
            (0..n_params).map(|_| init.scale * rng.random_range(-1.0..=1.0)).collect()
        }
    })
}

pub fn build_problem(cfg: &RunConfig) -> Result<Problem, CliError> {
    let (h, lattice) = build_hamiltonian(cfg)?;
    let circuit = build_circuit(cfg, &h, lattice.as_ref())?;
    let theta0 = initial_theta(cfg, circuit.n_params())?;
    Ok(Problem {
        h,
        lattice,
        circuit,
        theta0,
    })
}

pub fn solver(e: &EvolveSection) -> Solver {
    match e.solver {
        SolverName::Pinv => Solver::Pinv { rcond: e.rcond },
        SolverName::Ridge => Solver::Ridge { lambda: e.lambda },
        SolverName::Quadmin => Solver::Quadmin {
            tol: e.tol,
            max_iter: e.max_iter,
        },
    }
}

fn mode(m: ModeName) -> Mode {
    match m {
        ModeName::Real => Mode::Real,
        ModeName::Imag => Mode::Imaginary,
    }
}

// ---------------------------------------------------------------- lightcones

#[derive(Serialize)]
struct ConeSummary {
    n_qubits: usize,
    n_params: usize,
    gates: usize,
    n_beta: usize,
    n_gamma: usize,
    max_beta_cone: usize,
    max_gamma_cone: usize,
    /// Number of β bowties per parameter (one per occurrence).
    betas_per_param: Vec<usize>,
    intersecting_fraction: f64,
}

fn max_cone(set: &BowtieSet, kind: BowtieKind) -> usize {
    set.all().filter(|b| b.kind() == kind).map(|b| b.cone().len()).max().unwrap_or(0)
}

fn cone_summary(set: &BowtieSet, circuit: &Circuit) -> ConeSummary {
    ConeSummary {
        n_qubits: set.n_qubits(),
        n_params: set.n_params(),
        gates: circuit.len(),
        n_beta: set.betas().len(),
        n_gamma: set.gammas().len(),
        max_beta_cone: max_cone(set, BowtieKind::Beta),
        max_gamma_cone: max_cone(set, BowtieKind::Gamma),
        betas_per_param: set.param_betas().iter().map(Vec::len).collect(),
        intersecting_fraction: set.intersecting_fraction(),
    }
}

fn cone_csv(set: &BowtieSet) -> String {
    let mut counts: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for b in set.all() {
        let e = counts.entry(b.cone().len()).or_default();
        match b.kind() {
            BowtieKind::Beta => e.0 += 1,
            BowtieKind::Gamma => e.1 += 1,
        }
    }
    let mut s = String::from("cone_size,count_beta,count_gamma\n");
    for (k, (b, g)) in counts {
        s.push_str(&format!("{k},{b},{g}\n"));
    }
    s
}

pub fn cmd_lightcones(cfg: &RunConfig, out: &Path, extras: &Extras) -> Result<(), CliError> {
    let p = build_problem(cfg)?;
    let set = precompute_all(&p.circuit, &p.h)?;
    let summary = cone_summary(&set, &p.circuit);
    log::info!(
        "{} β and {} γ bowties, largest cones {} / {}",
        summary.n_beta,
        summary.n_gamma,
        summary.max_beta_cone,
        summary.max_gamma_cone
    );
    let mut o = OutputDir::create(out)?;
    o.write_json("inventory.json", &set.inventory())?;
    let csv = cone_csv(&set);
    o.write("cones.csv", csv.as_bytes())?;
    o.write_json("summary.json", &summary)?;
    if extras.svg {
        let series = |col: usize, label| Series {
            label,
            points: csv
                .lines()
                .skip(1)
                .map(|l| {
                    let f: Vec<f64> = l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect();
                    (f[0], f[col])
                })
                .collect(),
        };
        let svg = line_plot("bowtie cone sizes", "cone size", &[series(1, "beta"), series(2, "gamma")]);
        o.write("cones.svg", svg.as_bytes())?;
    }
    o.finish("lightcones", cfg)
}

// ---------------------------------------------------------------- evolve

/// Inserts an `infidelity` column after `error_sq`.
fn with_infidelity(csv: &str, infid: &[f64]) -> String {
    let mut s = String::new();
    for (k, line) in csv.lines().enumerate() {
        let mut fields: Vec<String> = line.split(',').map(String::from).collect();
        let extra = if k == 0 { "infidelity".to_string() } else { infid[k - 1].to_string() };
        fields.insert(3, extra);
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

/// `1 − |⟨ψ(θ_t)|e^{−iHt}ψ(θ_0)⟩|²` along the trajectory (normalized
/// `e^{−Ht}` in imaginary time), stepping the exact state point to point.
pub fn exact_infidelities(circuit: &Circuit, h: &PauliSum, tr: &Trajectory) -> Result<Vec<f64>, CliError> {
    let imag = tr.mode == Mode::Imaginary;
    let first = tr.points.first().ok_or_else(|| CliError::Usage("empty trajectory".into()))?;
    let mut exact = simulate_circuit(circuit, &first.theta)?;
    let mut t_prev = first.t;
    let mut out = Vec::with_capacity(tr.points.len());
    for p in &tr.points {
        if p.t > t_prev {
            exact = exact_evolve(h, &exact, p.t - t_prev, imag)?;
            t_prev = p.t;
        }
        let var = simulate_circuit(circuit, &p.theta)?;
        out.push((1.0 - var.fidelity(&exact)?).max(0.0));
    }
    Ok(out)
}

#[derive(Serialize)]
struct FinalTheta<'a> {
    t: f64,
    energy: f64,
    theta: &'a [f64],
}

pub fn cmd_evolve(cfg: &RunConfig, out: &Path, extras: &Extras) -> Result<(), CliError> {
    let p = build_problem(cfg)?;
    let e = &cfg.evolve;
    let n = p.circuit.n_qubits();
    if e.compare_exact && n > ORACLE_CAP {
        return Err(CliError::Usage(format!("compare_exact needs n <= {ORACLE_CAP}, got {n}")));
    }
    let mut ec = EvolveConfig::new(mode(e.mode), e.t_final);
    if let Some(dt) = e.dt {
        ec.dt = dt;
    }
    ec.solver = solver(e);
    ec.cone_cap = e.cone_cap;
    let tr = evolve(&p.circuit, &p.h, &p.theta0, &ec)?;
    let last = tr.last().expect("at least one point");
    log::info!("{} steps, final energy {}", tr.points.len() - 1, last.energy);

    let mut o = OutputDir::create(out)?;
    let infid = if e.compare_exact {
        Some(exact_infidelities(&p.circuit, &p.h, &tr)?)
    } else {
        None
    };
    let csv = match &infid {
        Some(v) => with_infidelity(&tr.to_csv(), v),
        None => tr.to_csv(),
    };
    o.write("trajectory.csv", csv.as_bytes())?;
    o.write_json(
        "theta_final.json",
        &FinalTheta {
            t: last.t,
            energy: last.energy,
            theta: &last.theta,
        },
    )?;
    if extras.svg {
        let mut series = vec![Series {
            label: "energy",
            points: tr.points.iter().map(|q| (q.t, q.energy)).collect(),
        }];
        o.write("energy.svg", line_plot("energy", "t", &series).as_bytes())?;
        series = vec![Series {
            label: "error_sq",
            points: tr.points.iter().map(|q| (q.t, q.error_sq)).collect(),
        }];
        if let Some(v) = &infid {
            series.push(Series {
                label: "infidelity",
                points: tr.points.iter().zip(v).map(|(q, f)| (q.t, *f)).collect(),
            });
        }
        o.write("error.svg", line_plot("McLachlan error and infidelity", "t", &series).as_bytes())?;
    }
    o.finish("evolve", cfg)
}

// ---------------------------------------------------------------- skqd

#[derive(Serialize)]
struct SkqdRow<'a> {
    #[serde(flatten)]
    record: &'a KrylovRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalized_energy: Option<f64>,
}

#[derive(Serialize)]
struct SkqdSummary {
    n_qubits: usize,
    n_params: usize,
    krylov_dt: f64,
    krylov_times: Vec<f64>,
    initial_energy: f64,
    warm_energy: f64,
    final_subspace_energy: f64,
    final_basis_size: usize,
    exact_ground_energy: Option<f64>,
    /// Infidelity of the warm-start state against the initial and the exact ground state.
    warm_infidelity_vs_initial: f64,
    warm_infidelity_vs_ground: Option<f64>,
}

pub fn cmd_skqd(cfg: &RunConfig, out: &Path, extras: &Extras) -> Result<(), CliError> {
    let p = build_problem(cfg)?;
    let s = &cfg.skqd;
    let n = p.circuit.n_qubits();
    if s.normalized && n > ORACLE_CAP {
        return Err(CliError::Usage(format!("normalized energies need the exact ground state, n <= {ORACLE_CAP}")));
    }
    let mut sc = SkqdConfig::new(s.tau_imag, s.krylov_states, s.shots, cfg.seed);
    sc.trotter_tail = s.trotter_tail;
    sc.gap = s.delta_e.map_or(GapMethod::Dense, GapMethod::Provided);
    sc.imag_dt = s.imag_dt;
    sc.real_dt = s.real_dt;
    sc.solver = solver(&cfg.evolve);
    if s.shots == 0 || s.krylov_states == 0 {
        return Err(CliError::Usage("skqd.shots and skqd.krylov_states must be positive".into()));
    }
    let res = run_pipeline(&p.circuit, &p.h, &p.theta0, &sc)?;

    let ground = if n <= ORACLE_CAP {
        Some(ground_state(&p.h, 1, ORACLE_CAP)?)
    } else {
        None
    };
    let e_gs = ground.as_ref().map(|(v, _)| v[0]);
    let e_is = res.imag.points[0].energy;
    let psi0 = simulate_circuit(&p.circuit, &p.theta0)?;

    let mut o = OutputDir::create(out)?;
    let mut jsonl = String::new();
    for r in &res.records {
        let row = SkqdRow {
            record: r,
            normalized_energy: if s.normalized {
                Some(normalized_energy(r.gs_energy, e_gs.expect("checked above"), e_is))
            } else {
                None
            },
        };
        jsonl.push_str(&serde_json::to_string(&row).map_err(|e| CliError::Usage(e.to_string()))?);
        jsonl.push('\n');
    }
    o.write("skqd.jsonl", jsonl.as_bytes())?;
    o.write("trajectory_imag.csv", res.imag.to_csv().as_bytes())?;
    o.write("trajectory_real.csv", res.real.to_csv().as_bytes())?;
    let last = res.records.last().expect("krylov_states >= 1");
    let summary = SkqdSummary {
        n_qubits: n,
        n_params: p.circuit.n_params(),
        krylov_dt: res.family.dt,
        krylov_times: res.family.times.clone(),
        initial_energy: e_is,
        warm_energy: res.warm_energy,
        final_subspace_energy: last.gs_energy,
        final_basis_size: last.basis_size,
        exact_ground_energy: e_gs,
        warm_infidelity_vs_initial: 1.0 - res.warm_state.fidelity(&psi0)?,
        warm_infidelity_vs_ground: match &ground {
            Some((_, g)) => Some(1.0 - res.warm_state.fidelity(g)?),
            None => None,
        },
    };
    o.write_json("summary.json", &summary)?;
    if extras.svg {
        let pts = res
            .records
            .iter()
            .map(|r| {
                let y = if s.normalized {
                    normalized_energy(r.gs_energy, e_gs.expect("checked above"), e_is)
                } else {
                    r.gs_energy
                };
                (r.k as f64, y)
            })
            .collect();
        let svg = line_plot("subspace ground energy", "Krylov state", &[Series { label: "E", points: pts }]);
        o.write("skqd.svg", svg.as_bytes())?;
    }
    o.finish("skqd", cfg)
}

// ---------------------------------------------------------------- cost

#[derive(Serialize)]
struct CostSummary {
    #[serde(flatten)]
    cones: ConeSummary,
    chi: u64,
    z: u32,
    flops: BTreeMap<&'static str, u128>,
}

pub fn cmd_cost(cfg: &RunConfig, out: &Path, extras: &Extras) -> Result<(), CliError> {
    let p = build_problem(cfg)?;
    let set = precompute_all(&p.circuit, &p.h)?;
    let tn = TnParams {
        chi: cfg.cost.chi,
        z: cfg.cost.z,
    };
    let report = bowtie_cost_report(&set, tn, extras.timings.then_some(cfg.seed))?;
    let mut o = OutputDir::create(out)?;
    o.write("cones.csv", report.histogram_csv().as_bytes())?;
    o.write("flops.csv", report.totals_csv().as_bytes())?;
    let summary = CostSummary {
        cones: cone_summary(&set, &p.circuit),
        chi: tn.chi,
        z: tn.z,
        flops: Backend::ALL.iter().map(|b| (b.name(), report.total(*b))).collect(),
    };
    o.write_json("summary.json", &summary)?;
    o.finish("cost", cfg)
}

// ---------------------------------------------------------------- spsa

#[derive(Serialize)]
struct SpsaSummary {
    n_params: usize,
    epsilon: f64,
    simulated: bool,
    /// Least-squares slope of log error against log K; absent with fewer than two points.
    slope: Option<f64>,
    final_error: Option<f64>,
    clifford_error: f64,
}

pub fn cmd_spsa(cfg: &RunConfig, out: &Path, extras: &Extras) -> Result<(), CliError> {
    let sp = &cfg.spsa;
    if sp.schedule.iter().all(|&k| k == 0) {
        return Err(CliError::Usage("spsa.schedule has no positive sample counts".into()));
    }
    let p = build_problem(cfg)?;
    let g = qgt(&p.circuit, &p.theta0)?;
    let points = if sp.simulated {
        let n = p.circuit.n_qubits();
        if n > SIMULATED_SPSA_CAP {
            return Err(CliError::Usage(format!("simulated SPSA needs n <= {SIMULATED_SPSA_CAP}, got {n}")));
        }
        let mut v = Vec::new();
        for (t, &k) in sp.schedule.iter().enumerate().filter(|(_, &k)| k > 0) {
            let est = spsa_estimate_simulated(&p.circuit, &p.theta0, k, sp.epsilon, derive_seed(cfg.seed, t as u64))?;
            v.push(SpsaEstimate {
                k,
                epsilon: sp.epsilon,
                error: relative_error(&est, &g),
            });
        }
        v
    } else {
        spsa_exact_study(&g, &sp.schedule, sp.epsilon, cfg.seed)?
    };
    let (_, clifford_error) = clifford_baseline(&p.circuit, &p.theta0, &g)?;
    let summary = SpsaSummary {
        n_params: g.rows(),
        epsilon: sp.epsilon,
        simulated: sp.simulated,
        slope: if points.len() >= 2 { Some(loglog_slope(&points)?) } else { None },
        final_error: points.last().map(|e| e.error),
        clifford_error,
    };
    let mut o = OutputDir::create(out)?;
    o.write("spsa.csv", spsa_csv(&points).as_bytes())?;
    o.write_json("summary.json", &summary)?;
    if extras.svg {
        let pts = points.iter().map(|e| ((e.k as f64).log10(), e.error.log10())).collect();
        let svg = line_plot("SPSA relative error (log10)", "log10 K", &[Series { label: "error", points: pts }]);
        o.write("spsa.svg", svg.as_bytes())?;
    }
    o.finish("spsa", cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences_parse_as_letters_or_lists() {
        assert_eq!(parse_sequence("GBO").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_sequence("G, B, 3").unwrap(), vec![0, 1, 3]);
        assert!(parse_sequence("GX").is_err());
        assert!(parse_sequence("").is_err());
    }

    #[test]
    fn infidelity_column_goes_after_error() {
        let s = with_infidelity("t,energy,error_sq,theta_0\n0,1,2,3\n", &[0.5]);
        assert_eq!(s, "t,energy,error_sq,infidelity,theta_0\n0,1,2,0.5,3\n");
    }

    #[test]
    fn random_init_is_seeded_and_bounded() {
        let mut cfg = RunConfig::default();
        cfg.init.theta = ThetaInit::Random;
        cfg.init.scale = 0.2;
        let a = initial_theta(&cfg, 10).unwrap();
        assert_eq!(a, initial_theta(&cfg, 10).unwrap());
        assert!(a.iter().all(|v| v.abs() <= 0.2));
        cfg.seed = 1;
        assert_ne!(a, initial_theta(&cfg, 10).unwrap());
    }

    #[test]
    fn toy_problem_has_one_beta_per_parameter() {
        let mut cfg = RunConfig::default();
        cfg.model.sites = 2;
        cfg.circuit.layers = 1;
        let p = build_problem(&cfg).unwrap();
        let set = precompute_all(&p.circuit, &p.h).unwrap();
        let s = cone_summary(&set, &p.circuit);
        assert!(s.betas_per_param.iter().all(|&k| k == 1));
        assert_eq!(s.n_beta, p.circuit.n_params());
    }
}
