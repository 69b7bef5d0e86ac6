//! Sample-based Krylov diagonalization on top of variational time evolution.
//!
//! A VarQITE run prepares a warm start, VarQRTE produces a family of states
//! at `t_k = k·Δt`, each state is sampled, and the Hamiltonian is projected
//! onto the cumulative set of sampled bitstrings and diagonalized.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::build_trotter2;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::lattice::{color_edges, EdgeColoring, Lattice};
use crate::linalg::lanczos;
use crate::mclachlan::{evolve, EvolveConfig, Mode, Solver, Trajectory};
use crate::pauli::WeightedPauliSum;
use crate::statevector::{sample_bitstrings, simulate_circuit, StateVector, ORACLE_CAP};

/// Largest register the pipeline samples from.
pub const SAMPLER_CAP: usize = 20;

/// Subspaces below this size are diagonalized densely.
pub const DENSE_LIMIT: usize = 2000;

/// Reproducible per-task seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(stream))
}

/// Applies `H` to a full state vector (used as the exact-spectrum mat-vec).
fn full_matvec(h: &WeightedPauliSum<f64>) -> impl Fn(&[Complex64], &mut [Complex64]) + '_ {
    move |x, y| {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (c, p) in h.terms() {
            for (s, a) in x.iter().enumerate() {
                let (ph, t) = p.apply_to_basis(s as u64);
                y[t as usize] += *a * ph.to_complex::<f64>() * *c;
            }
        }
    }
}

/// Lowest distinct eigenvalues of `H` on the full register (`n ≤ cap`).
pub fn lowest_eigenvalues(h: &WeightedPauliSum<f64>, k: usize, cap: usize) -> Result<Vec<f64>> {
    Ok(ground_state(h, k, cap)?.0)
}

/// Lowest distinct eigenvalues and the ground-state vector.
pub fn ground_state(h: &WeightedPauliSum<f64>, k: usize, cap: usize) -> Result<(Vec<f64>, StateVector<f64>)> {
    let n = h.n_qubits();
    if n > cap {
        return Err(Error::CapExceeded { got: n, cap });
    }
    let dim = 1usize << n;
    if dim <= 256 {
        let m = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| {
            let mut v = Complex64::new(0.0, 0.0);
            for (c, p) in h.terms() {
                let (ph, t) = p.apply_to_basis(j as u64);
                if t as usize == i {
                    v += ph.to_complex::<f64>() * *c;
                }
            }
            v
        });
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut vals: Vec<f64> = Vec::new();
        for &i in &order {
            let e = eig.eigenvalues[i];
            if vals.last().is_none_or(|&l| e - l > 1e-9) {
                vals.push(e);
            }
            if vals.len() == k {
                break;
            }
        }
        let g = eig.eigenvectors.column(order[0]).iter().copied().collect();
        return Ok((vals, StateVector::from_amplitudes(g)?));
    }
    let res = lanczos(dim, k, 1e-12, 600, full_matvec(h))?;
    Ok((res.values, StateVector::from_amplitudes(res.ground)?))
}

/// How the spectral gap for `Δt = π/ΔE` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMethod {
    /// Exact lowest two distinct eigenvalues.
    Dense,
    /// User-supplied `ΔE`.
    Provided(f64),
}

/// `π / (E₁ − E₀)`.
pub fn krylov_timestep(h: &WeightedPauliSum<f64>, method: GapMethod) -> Result<f64> {
    let gap = match method {
        GapMethod::Provided(de) => de,
        GapMethod::Dense => {
            let vals = lowest_eigenvalues(h, 2, ORACLE_CAP)?;
            if vals.len() < 2 {
                return Err(Error::DegenerateGap(0.0));
            }
            vals[1] - vals[0]
        }
    };
    if !gap.is_finite() || gap.abs() < 1e-12 {
        return Err(Error::DegenerateGap(gap));
    }
    Ok(std::f64::consts::PI / gap.abs())
}

/// Real symmetric matrix stored as sorted rows of `(column, value)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSym {
    pub dim: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSym {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map_or(0.0, |k| self.rows[i][k].1)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, row) in self.rows.iter().enumerate() {
            y[i] = row.iter().map(|&(j, v)| v * x[j]).sum();
        }
    }
}

/// `⟨s|H|s'⟩` over a bitstring basis (each string at most 64 qubits).
pub fn project_hamiltonian(h: &WeightedPauliSum<f64>, basis: &[u64]) -> Result<SparseSym> {
    if basis.is_empty() {
        return Err(Error::Empty("bitstring basis".into()));
    }
    if h.n_qubits() > 64 {
        return Err(Error::TooManyQubits {
            got: h.n_qubits(),
            max: 64,
        });
    }
    let index: HashMap<u64, usize> = basis.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    if index.len() != basis.len() {
        return Err(Error::InvalidCircuit("basis contains duplicate bitstrings".into()));
    }
    let rows: Vec<Vec<(usize, f64)>> = basis
        .par_iter()
        .map(|&s| {
            let mut acc: HashMap<usize, Complex64> = HashMap::new();
            for (c, p) in h.terms() {
                let (ph, t) = p.apply_to_basis(s);
                if let Some(&j) = index.get(&t) {
                    *acc.entry(j).or_insert(Complex64::new(0.0, 0.0)) += ph.to_complex::<f64>() * *c;
                }
            }
            let mut row: Vec<(usize, Complex64)> = acc.into_iter().collect();
            row.sort_unstable_by_key(|e| e.0);
            for (_, v) in &row {
                if v.im.abs() > 1e-12 {
                    return Err(Error::ImaginaryResidue(v.im));
                }
            }
            Ok(row.into_iter().filter(|(_, v)| v.re != 0.0).map(|(j, v)| (j, v.re)).collect())
        })
        .collect::<Result<_>>()?;
    // rows hold ⟨t|H|s⟩ for column s; H is Hermitian and real here, so this is the transpose of itself
    Ok(SparseSym {
        dim: basis.len(),
        rows,
    })
}

/// Projected model on one bitstring subspace.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceModel {
    pub basis: Vec<u64>,
    #[serde(skip)]
    pub h_proj: SparseSym,
    pub gs_energy: f64,
    #[serde(skip)]
    pub gs_vector: Vec<f64>,
}

/// Projects and diagonalizes.
pub fn subspace_model(h: &WeightedPauliSum<f64>, basis: Vec<u64>) -> Result<SubspaceModel> {
    let h_proj = project_hamiltonian(h, &basis)?;
    let (gs_energy, gs_vector) = lowest_eigenpair(&h_proj)?;
    Ok(SubspaceModel {
        basis,
        h_proj,
        gs_energy,
        gs_vector,
    })
}

fn lowest_eigenpair(m: &SparseSym) -> Result<(f64, Vec<f64>)> {
    let n = m.dim;
    if n < DENSE_LIMIT {
        let d = DMatrix::<f64>::from_fn(n, n, |i, j| m.get(i, j));
        let eig = SymmetricEigen::new(d);
        let k = (0..n)
            .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .expect("non-empty");
        return Ok((eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()));
    }
    let res = lanczos(n, 1, 1e-12, 800, |x, y| {
        let xr: Vec<f64> = x.iter().map(|v| v.re).collect();
        let xi: Vec<f64> = x.iter().map(|v| v.im).collect();
        let (mut yr, mut yi) = (vec![0.0; n], vec![0.0; n]);
        m.matvec(&xr, &mut yr);
        m.matvec(&xi, &mut yi);
        for k in 0..n {
            y[k] = Complex64::new(yr[k], yi[k]);
        }
    })?;
    Ok((res.values[0], res.ground.iter().map(|v| v.re).collect()))
}

/// Parameter vectors of the real-time Krylov states.
#[derive(Clone, Debug, Serialize)]
pub struct KrylovFamily {
    pub times: Vec<f64>,
    pub thetas: Vec<Vec<f64>>,
    pub dt: f64,
    pub m: usize,
}

/// Pipeline settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkqdConfig {
    pub tau_imag: f64,
    pub krylov_states: usize,
    pub shots: usize,
    pub seed: u64,
    #[serde(default)]
    pub trotter_tail: usize,
    pub gap: GapMethod,
    pub imag_dt: f64,
    pub real_dt: f64,
    #[serde(default)]
    pub solver: Solver,
}

impl SkqdConfig {
    pub fn new(tau_imag: f64, krylov_states: usize, shots: usize, seed: u64) -> Self {
        SkqdConfig {
            tau_imag,
            krylov_states,
            shots,
            seed,
            trotter_tail: 0,
            gap: GapMethod::Dense,
            imag_dt: 0.05,
            real_dt: 0.01,
            solver: Solver::default(),
        }
    }
}

/// Per-state record of the cumulative subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrylovRecord {
    pub k: usize,
    pub t_k: f64,
    /// `true` for states produced by the Trotter tail.
    pub trotter: bool,
    pub n_new_bitstrings: usize,
    pub basis_size: usize,
    pub gs_energy: f64,
}

#[derive(Clone, Debug)]
pub struct SkqdResult {
    pub imag: Trajectory<f64>,
    pub real: Trajectory<f64>,
    pub family: KrylovFamily,
    pub models: Vec<SubspaceModel>,
    pub records: Vec<KrylovRecord>,
    /// Variational energy of the warm-start state.
    pub warm_energy: f64,
    pub warm_state: StateVector<f64>,
}

/// Two-body edges of a Pauli sum as a lattice plus a greedy colouring of them.
pub fn schedule_for(h: &WeightedPauliSum<f64>) -> Result<EdgeColoring> {
    let mut edges = BTreeSet::new();
    for (_, p) in h.terms() {
        let s = p.support();
        match s.as_slice() {
            [_] => {}
            [a, b] => {
                edges.insert((*a, *b));
            }
            _ => return Err(Error::TermNotScheduled(p.to_string())),
        }
    }
    let lat = Lattice::new(h.n_qubits(), edges)?;
    color_edges(&lat, lat.coordination().max(1), 0)
}

/// Runs the warm start, the Krylov family, sampling and projection.
pub fn run_pipeline(
    circuit: &Circuit,
    h: &WeightedPauliSum<f64>,
    theta0: &[f64],
    config: &SkqdConfig,
) -> Result<SkqdResult> {
    let n = circuit.n_qubits();
    if n > SAMPLER_CAP {
        return Err(Error::CapExceeded { got: n, cap: SAMPLER_CAP });
    }
    if config.shots == 0 || config.krylov_states == 0 {
        return Err(Error::Empty("shots and krylov_states must be positive".into()));
    }
    let mut icfg = EvolveConfig::new(Mode::Imaginary, config.tau_imag);
    icfg.dt = config.imag_dt;
    icfg.solver = config.solver;
    let imag = evolve(circuit, h, theta0, &icfg)?;
    let warm = imag.last().expect("trajectory has a point").theta.clone();

    let dt_k = krylov_timestep(h, config.gap)?;
    let substeps = (dt_k / config.real_dt).ceil().max(1.0) as usize;
    let m = config.krylov_states;
    let mut rcfg = EvolveConfig::new(Mode::Real, dt_k * (m - 1) as f64);
    rcfg.dt = dt_k / substeps as f64;
    rcfg.solver = config.solver;
    let real = evolve(circuit, h, &warm, &rcfg)?;
    let mut times = Vec::with_capacity(m);
    let mut thetas = Vec::with_capacity(m);
    for k in 0..m {
        let p = &real.points[(k * substeps).min(real.points.len() - 1)];
        times.push(dt_k * k as f64);
        thetas.push(p.theta.clone());
    }

    let mut states: Vec<StateVector<f64>> = thetas
        .par_iter()
        .map(|th| simulate_circuit(circuit, th))
        .collect::<Result<_>>()?;
    let mut tail_times = Vec::new();
    if config.trotter_tail > 0 {
        let step = build_trotter2(h, dt_k, 1, &schedule_for(h)?)?;
        let mut psi = states.last().expect("m >= 1").clone();
        for j in 1..=config.trotter_tail {
            psi.apply_circuit(&step, &[])?;
            states.push(psi.clone());
            tail_times.push(dt_k * (m - 1 + j) as f64);
        }
    }

    let samples: Vec<Vec<u64>> = states
        .par_iter()
        .enumerate()
        .map(|(k, st)| sample_bitstrings(st, config.shots, derive_seed(config.seed, k as u64)))
        .collect::<Result<_>>()?;

    let mut basis = BTreeSet::new();
    let mut models = Vec::with_capacity(samples.len());
    let mut records = Vec::with_capacity(samples.len());
    for (k, sample) in samples.iter().enumerate() {
        let before = basis.len();
        basis.extend(sample.iter().copied());
        let model = subspace_model(h, basis.iter().copied().collect())?;
        let (t_k, trotter) = if k < m { (times[k], false) } else { (tail_times[k - m], true) };
        records.push(KrylovRecord {
            k,
            t_k,
            trotter,
            n_new_bitstrings: basis.len() - before,
            basis_size: basis.len(),
            gs_energy: model.gs_energy,
        });
        models.push(model);
    }
    let warm_state = simulate_circuit(circuit, &warm)?;
    let warm_energy = warm_state.expectation(h)?;
    Ok(SkqdResult {
        imag,
        real,
        family: KrylovFamily {
            times,
            thetas,
            dt: dt_k,
            m,
        },
        models,
        records,
        warm_energy,
        warm_state,
    })
}

/// Maps `E_GS → 0` and `E_IS → 1`.
pub fn normalized_energy(e: f64, e_gs: f64, e_is: f64) -> f64 {
    (e - e_gs) / (e_is - e_gs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::heisenberg_chain;
    use crate::pauli::PauliString;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_z_timestep() {
        let h = WeightedPauliSum::new(1, [(1.0, ps("Z"))]).unwrap();
        let dt = krylov_timestep(&h, GapMethod::Dense).unwrap();
        assert!((dt - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let dt = krylov_timestep(&h, GapMethod::Provided(std::f64::consts::PI / 0.015)).unwrap();
        assert!((dt - 0.015).abs() < 1e-15);
        assert!(matches!(
            krylov_timestep(&h, GapMethod::Provided(0.0)),
            Err(Error::DegenerateGap(_))
        ));
    }

    #[test]
    fn projections_of_single_qubit_terms() {
        let z = WeightedPauliSum::new(1, [(1.0, ps("Z"))]).unwrap();
        let m = project_hamiltonian(&z, &[0, 1]).unwrap();
        assert_eq!((m.get(0, 0), m.get(1, 1), m.get(0, 1)), (1.0, -1.0, 0.0));
        let x = WeightedPauliSum::new(1, [(1.0, ps("X"))]).unwrap();
        let m = project_hamiltonian(&x, &[0, 1]).unwrap();
        assert_eq!((m.get(0, 0), m.get(0, 1), m.get(1, 0)), (0.0, 1.0, 1.0));
    }

    #[test]
    fn single_y_has_imaginary_elements() {
        let y = WeightedPauliSum::new(1, [(1.0, ps("Y"))]).unwrap();
        assert!(matches!(project_hamiltonian(&y, &[0, 1]), Err(Error::ImaginaryResidue(_))));
    }

    #[test]
    fn single_bitstring_gives_diagonal_element() {
        let h = heisenberg_chain(4).unwrap();
        let model = subspace_model(&h, vec![0b0101]).unwrap();
        // ⟨0101|H|0101⟩ = Σ ZZ = −3
        assert_eq!(model.gs_energy, -3.0);
    }

    #[test]
    fn lanczos_and_dense_ground_energies_agree() {
        let h = heisenberg_chain(9).unwrap();
        let lz = lowest_eigenvalues(&h, 2, 14).unwrap();
        let basis: Vec<u64> = (0..512).collect();
        let dense = subspace_model(&h, basis).unwrap();
        assert!((lz[0] - dense.gs_energy).abs() < 1e-10);
    }

    #[test]
    fn four_site_chain_ground_energy() {
        let h = heisenberg_chain(4).unwrap();
        let e = lowest_eigenvalues(&h, 1, 14).unwrap()[0];
        assert!((e - (-3.0 - 2.0 * 3f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn seeds_are_decorrelated() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }
}
