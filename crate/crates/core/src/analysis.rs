//! Cost models for bowtie simulation and the SPSA study of the QGT.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::lightcone::{BowtieKind, BowtieSet};
use crate::linalg::Matrix;
use crate::mclachlan::{assemble, Mode};
use crate::pauli::WeightedPauliSum;
use crate::skqd::derive_seed;
use crate::statevector::{simulate_bowtie, simulate_circuit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Sv,
    Mps,
    Peps,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Sv, Backend::Mps, Backend::Peps];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Sv => "sv",
            Backend::Mps => "mps",
            Backend::Peps => "peps",
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sv" | "statevector" => Ok(Backend::Sv),
            "mps" => Ok(Backend::Mps),
            "peps" => Ok(Backend::Peps),
            _ => Err(Error::UnknownBackend(s.into())),
        }
    }
}

/// Bond dimension and lattice coordination for the tensor-network models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TnParams {
    pub chi: u64,
    pub z: u32,
}

impl Default for TnParams {
    fn default() -> Self {
        TnParams { chi: 16, z: 3 }
    }
}

/// FLOP estimate for simulating `gates` gates on `n` qubits.
///
/// SV: `16·G·2ⁿ`, MPS: `16·G·χ³`, PEPS: `G·(4·χ^{z+1} + 64·χ³)`.
pub fn flop_model(backend: Backend, n: usize, gates: u64, tn: TnParams) -> Result<u128> {
    let g = gates as u128;
    let chi = tn.chi as u128;
    let chi3 = chi.checked_pow(3).ok_or(Error::Overflow("chi^3"))?;
    let per_gate = match backend {
        Backend::Sv => {
            if n >= 124 {
                return Err(Error::Overflow("2^n"));
            }
            16u128.checked_mul(1u128 << n)
        }
        Backend::Mps => 16u128.checked_mul(chi3),
        Backend::Peps => chi
            .checked_pow(tn.z + 1)
            .and_then(|a| a.checked_mul(4))
            .and_then(|a| a.checked_add(64u128.checked_mul(chi3)?)),
    };
    per_gate
        .and_then(|p| p.checked_mul(g))
        .ok_or(Error::Overflow("flop model"))
}

/// Bowtie counts and total cost at one cone size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeRow {
    pub cone: usize,
    pub n_beta: usize,
    pub n_gamma: usize,
    /// Mean wall time of one bowtie simulation, only measured on request.
    pub seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub rows: Vec<ConeRow>,
    pub totals: BTreeMap<Backend, u128>,
    pub tn: TnParams,
}

impl CostReport {
    pub fn total(&self, backend: Backend) -> u128 {
        self.totals[&backend]
    }

    /// `cone,n_beta,n_gamma[,seconds]`.
    pub fn histogram_csv(&self) -> String {
        let timed = self.rows.iter().any(|r| r.seconds.is_some());
        let mut s = String::from("cone,n_beta,n_gamma");
        if timed {
            s.push_str(",seconds");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{},{}", r.cone, r.n_beta, r.n_gamma);
            if timed {
                let _ = write!(s, ",{}", r.seconds.map_or(String::new(), |v| format!("{v:e}")));
            }
            s.push('\n');
        }
        s
    }

    pub fn totals_csv(&self) -> String {
        let mut s = String::from("backend,flops\n");
        for (b, v) in &self.totals {
            let _ = writeln!(s, "{},{}", b.name(), v);
        }
        s
    }
}

/// Summed FLOP models over every bowtie of a set, plus the cone histogram.
/// With `timings`, every bowtie is also simulated once at a random point.
pub fn bowtie_cost_report(set: &BowtieSet, tn: TnParams, timings: Option<u64>) -> Result<CostReport> {
    let mut rows: BTreeMap<usize, ConeRow> = BTreeMap::new();
    let mut totals: BTreeMap<Backend, u128> = Backend::ALL.iter().map(|&b| (b, 0)).collect();
    for bt in set.all() {
        let row = rows.entry(bt.cone().len()).or_insert(ConeRow {
            cone: bt.cone().len(),
            n_beta: 0,
            n_gamma: 0,
            seconds: None,
        });
        match bt.kind() {
            BowtieKind::Beta => row.n_beta += 1,
            BowtieKind::Gamma => row.n_gamma += 1,
        }
        for (&b, tot) in totals.iter_mut() {
            let f = flop_model(b, bt.cone().len(), bt.gate_count() as u64, tn)?;
            *tot = tot.checked_add(f).ok_or(Error::Overflow("flop total"))?;
        }
    }
    if let Some(seed) = timings {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta: Vec<f64> = (0..set.n_params()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
        for bt in set.all() {
            let start = Instant::now();
            simulate_bowtie::<f64>(bt, &theta)?;
            let e = acc.entry(bt.cone().len()).or_insert((0.0, 0));
            e.0 += start.elapsed().as_secs_f64();
            e.1 += 1;
        }
        for (k, (s, c)) in acc {
            rows.get_mut(&k).expect("same cones").seconds = Some(s / c as f64);
        }
    }
    Ok(CostReport {
        rows: rows.into_values().collect(),
        totals,
        tn,
    })
}

/// One SPSA reconstruction of the QGT after `k` direction pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpsaEstimate {
    pub k: usize,
    pub epsilon: f64,
    /// `‖ĝ − g‖_F / ‖g‖_F`.
    pub error: f64,
}

fn frobenius(a: &Matrix<f64>) -> f64 {
    a.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Relative Frobenius distance `‖a − g‖_F / ‖g‖_F`.
pub fn relative_error(a: &Matrix<f64>, g: &Matrix<f64>) -> f64 {
    let d = Matrix::from_fn(g.rows(), g.cols(), |i, j| a[(i, j)] - g[(i, j)]);
    frobenius(&d) / frobenius(g)
}

/// SPSA QGT estimate from `k` random direction pairs.
///
/// The fidelity differences come from the quadratic form of `g` itself
/// (`F(θ + x) = 1 − xᵀgx`), so only the sampling error remains. Each pair
/// adds `−δF/(4ε²)·½(δ₁δ₂ᵀ + δ₂δ₁ᵀ)`.
pub fn spsa_estimate(g: &Matrix<f64>, k: usize, epsilon: f64, seed: u64) -> Result<Matrix<f64>> {
    let p = g.rows();
    if k == 0 || p == 0 {
        return Err(Error::Empty("SPSA needs k > 0 and a non-empty metric".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Matrix::<f64>::zeros(p, p);
    let fid = |x: &[f64]| -> Result<f64> { Ok(1.0 - g.quad_form(x)?) };
    for _ in 0..k {
        let d1: Vec<f64> = (0..p).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let d2: Vec<f64> = (0..p).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let comb = |s1: f64, s2: f64| -> Vec<f64> { (0..p).map(|i| epsilon * (s1 * d1[i] + s2 * d2[i])).collect() };
        let df = fid(&comb(1.0, 1.0))? - fid(&comb(1.0, 0.0))? - fid(&comb(-1.0, 1.0))? + fid(&comb(-1.0, 0.0))?;
        let scale = -df / (4.0 * epsilon * epsilon);
        for i in 0..p {
            for j in 0..p {
                acc[(i, j)] += scale * 0.5 * (d1[i] * d2[j] + d2[i] * d1[j]);
            }
        }
    }
    Ok(Matrix::from_fn(p, p, |i, j| acc[(i, j)] / k as f64))
}

/// Error of the SPSA estimate for every `K` in the schedule; each `K` uses
/// its own random stream. `K = 0` has no estimate and yields no record.
pub fn spsa_exact_study(g: &Matrix<f64>, schedule: &[usize], epsilon: f64, seed: u64) -> Result<Vec<SpsaEstimate>> {
    schedule
        .par_iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(t, &k)| {
            let est = spsa_estimate(g, k, epsilon, derive_seed(seed, t as u64))?;
            Ok(SpsaEstimate {
                k,
                epsilon,
                error: relative_error(&est, g),
            })
        })
        .collect()
}

/// SPSA estimate with `δF` from simulated fidelities `|⟨ψ(θ)|ψ(θ + x)⟩|²`
/// instead of the quadratic form, so it carries the finite-`ε` bias too.
pub fn spsa_estimate_simulated(circuit: &Circuit, theta: &[f64], k: usize, epsilon: f64, seed: u64) -> Result<Matrix<f64>> {
    let p = theta.len();
    if k == 0 || p == 0 {
        return Err(Error::Empty("SPSA needs k > 0 and parameters".into()));
    }
    if circuit.n_qubits() > SIMULATED_SPSA_CAP {
        return Err(Error::CapExceeded {
            got: circuit.n_qubits(),
            cap: SIMULATED_SPSA_CAP,
        });
    }
    let psi = simulate_circuit::<f64>(circuit, theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Matrix::<f64>::zeros(p, p);
    let fid = |x: &[f64]| -> Result<f64> {
        let shifted: Vec<f64> = theta.iter().zip(x).map(|(a, b)| a + b).collect();
        psi.fidelity(&simulate_circuit(circuit, &shifted)?)
    };
    for _ in 0..k {
        let d1: Vec<f64> = (0..p).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let d2: Vec<f64> = (0..p).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let comb = |s1: f64, s2: f64| -> Vec<f64> { (0..p).map(|i| epsilon * (s1 * d1[i] + s2 * d2[i])).collect() };
        let df = fid(&comb(1.0, 1.0))? - fid(&comb(1.0, 0.0))? - fid(&comb(-1.0, 1.0))? + fid(&comb(-1.0, 0.0))?;
        let scale = -df / (4.0 * epsilon * epsilon);
        for i in 0..p {
            for j in 0..p {
                acc[(i, j)] += scale * 0.5 * (d1[i] * d2[j] + d2[i] * d1[j]);
            }
        }
    }
    Ok(Matrix::from_fn(p, p, |i, j| acc[(i, j)] / k as f64))
}

/// Largest register for [`spsa_estimate_simulated`].
pub const SIMULATED_SPSA_CAP: usize = 10;

/// Least-squares slope of `log error` against `log K`.
pub fn loglog_slope(points: &[SpsaEstimate]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Empty("slope fit needs two points".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.k as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.error.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    if !slope.is_finite() {
        return Err(Error::NonFinite("log-log slope".into()));
    }
    Ok(slope)
}

/// `θ` rounded to the nearest multiple of `π/4`.
pub fn clifford_round(theta: &[f64]) -> Vec<f64> {
    let q = std::f64::consts::FRAC_PI_4;
    theta.iter().map(|t| (t / q).round() * q).collect()
}

/// QGT `g(θ)` through bowties.
pub fn qgt(circuit: &Circuit, theta: &[f64]) -> Result<Matrix<f64>> {
    let empty = WeightedPauliSum::<f64>::empty(circuit.n_qubits());
    Ok(assemble(circuit, &empty, theta, Mode::Real)?.g)
}

/// QGT at the Clifford-rounded point and its error against `g(θ)`.
pub fn clifford_baseline(circuit: &Circuit, theta: &[f64], g_ref: &Matrix<f64>) -> Result<(Matrix<f64>, f64)> {
    let g_cl = qgt(circuit, &clifford_round(theta))?;
    let err = relative_error(&g_cl, g_ref);
    Ok((g_cl, err))
}

pub fn spsa_csv(points: &[SpsaEstimate]) -> String {
    let mut s = String::from("k,epsilon,error\n");
    for p in points {
        let _ = writeln!(s, "{},{},{}", p.k, p.epsilon, p.error);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flop_formulas() {
        let tn = TnParams { chi: 2, z: 3 };
        assert_eq!(flop_model(Backend::Sv, 3, 5, tn).unwrap(), 16 * 5 * 8);
        assert_eq!(flop_model(Backend::Mps, 3, 5, tn).unwrap(), 16 * 5 * 8);
        assert_eq!(flop_model(Backend::Peps, 3, 5, tn).unwrap(), 5 * (4 * 16 + 64 * 8));
        assert!(flop_model(Backend::Sv, 200, 1, tn).is_err());
        let big = TnParams { chi: u64::MAX, z: 3 };
        assert!(matches!(flop_model(Backend::Peps, 1, 1, big), Err(Error::Overflow(_))));
    }

    #[test]
    fn backend_names_parse() {
        for b in Backend::ALL {
            assert_eq!(b.name().parse::<Backend>().unwrap(), b);
        }
        assert!("tpu".parse::<Backend>().is_err());
    }

    #[test]
    fn spsa_one_parameter_is_exact() {
        // with one parameter δ₁δ₂ = ±1, so every pair reproduces g
        let g = Matrix::<f64>::from_fn(1, 1, |_, _| 0.7);
        let est = spsa_estimate(&g, 5, 0.1, 4).unwrap();
        assert!((est[(0, 0)] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn spsa_converges_with_k() {
        let g = Matrix::<f64>::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.2 });
        let pts = spsa_exact_study(&g, &[10, 100, 1000, 10000], 0.01, 3).unwrap();
        assert!(pts[3].error < pts[0].error);
        let s = loglog_slope(&pts).unwrap();
        assert!(s < -0.3 && s > -0.7, "slope {s}");
    }

    #[test]
    fn zero_k_gives_no_record() {
        let g = Matrix::<f64>::identity(2);
        let pts = spsa_exact_study(&g, &[0, 5], 0.01, 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].k, 5);
    }

    #[test]
    fn simulated_fidelities_approach_the_quadratic_form() {
        use crate::pauli::PauliString;
        let mut c = Circuit::new(2);
        c.param_rotation("IY".parse::<PauliString>().unwrap()).unwrap();
        c.param_rotation("XX".parse::<PauliString>().unwrap()).unwrap();
        c.param_rotation("ZI".parse::<PauliString>().unwrap()).unwrap();
        let th = [0.3, -0.4, 0.9];
        let g = qgt(&c, &th).unwrap();
        let a = spsa_estimate(&g, 50, 1e-3, 9).unwrap();
        let b = spsa_estimate_simulated(&c, &th, 50, 1e-3, 9).unwrap();
        assert!(relative_error(&b, &a) < 1e-3);
    }

    #[test]
    fn single_bowtie_total_is_its_model_value() {
        use crate::lightcone::precompute_all;
        use crate::pauli::PauliString;
        let mut c = Circuit::new(3);
        c.param_rotation("IXX".parse::<PauliString>().unwrap()).unwrap();
        let set = precompute_all(&c, &WeightedPauliSum::<f64>::empty(3)).unwrap();
        let rep = bowtie_cost_report(&set, TnParams::default(), None).unwrap();
        let bt = &set.betas()[0];
        let want = flop_model(Backend::Sv, bt.cone().len(), bt.gate_count() as u64, TnParams::default()).unwrap();
        assert_eq!(rep.total(Backend::Sv), want);
        assert_eq!(rep.rows.len(), 1);
    }

    #[test]
    fn rounding_to_quarter_pi() {
        let r = clifford_round(&[0.1, 0.5, -0.5, 3.0]);
        let q = std::f64::consts::FRAC_PI_4;
        assert_eq!(r, vec![0.0, q, -q, 4.0 * q]);
    }
}
