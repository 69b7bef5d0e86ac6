//! Gradient, quantum geometric tensor and McLachlan time stepping from bowtie
//! overlaps.
//!
//! With `|α⟩ = |0⟩`, `|β_i⟩ = U†∂_iU|0⟩` and `|γ_j⟩ = U†h_jU|0⟩`, every
//! quantity is built from the connected overlap
//! `cov(a, b) = ⟨a|b⟩ − ⟨a|α⟩⟨α|b⟩`, which vanishes for disjoint cones.

use std::fmt::Write as _;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::lightcone::{precompute_all, BowtieSet};
use crate::linalg::{conjugate_gradient, dot, pinv_solve, ridge_solve, Matrix};
use crate::overlap::{overlap_counted, ContractionPlan};
use crate::pauli::WeightedPauliSum;
use crate::scalar::{Cplx, Scalar};
use crate::statevector::{simulate_bowtie_capped, BoundBowtieState, CONE_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Real,
    Imaginary,
}

/// `g`, `b`, energy and variance at one parameter point.
#[derive(Clone, Debug, Serialize)]
pub struct GeometricData<T> {
    pub mode: Mode,
    pub g: Matrix<T>,
    pub b: Vec<T>,
    pub energy: T,
    pub variance: T,
}

/// Covariance matrix of the augmented tangent set `{β_i} ∪ {−iγ_j}`.
///
/// Top-left is `g`, the mixed block is `Im cov(β_i, γ_j)` (its contraction
/// with `c` gives the real-time `b`) and the bottom-right block is
/// `Re cov(γ_i, γ_j)` (its double contraction with `c` gives `Var[H]`).
#[derive(Clone, Debug, Serialize)]
pub struct GeneralizedQGT<T> {
    pub gtilde: Matrix<T>,
    pub coefficients: Vec<T>,
    pub n_params: usize,
}

impl<T: Scalar> GeneralizedQGT<T> {
    pub fn g(&self) -> Matrix<T> {
        self.gtilde.block(0, 0, self.n_params, self.n_params)
    }

    /// `Σ_j M_ij c_j`.
    pub fn b_real(&self) -> Vec<T> {
        let nh = self.coefficients.len();
        let m = self.gtilde.block(0, self.n_params, self.n_params, nh);
        m.matvec(&self.coefficients).expect("block width matches coefficients")
    }

    /// `cᵀ B c`.
    pub fn variance(&self) -> T {
        let nh = self.coefficients.len();
        let bl = self.gtilde.block(self.n_params, self.n_params, nh, nh);
        bl.quad_form(&self.coefficients).expect("block matches coefficients")
    }

    /// Augmented velocity `(θ̇, −c)` of the real-time flow.
    pub fn augmented(&self, theta_dot: &[T]) -> Vec<T> {
        theta_dot
            .iter()
            .copied()
            .chain(self.coefficients.iter().map(|c| -*c))
            .collect()
    }
}

/// Bowtie states bound to one parameter vector.
#[derive(Clone, Debug)]
pub struct BoundStates<T> {
    pub betas: Vec<BoundBowtieState<T>>,
    pub gammas: Vec<BoundBowtieState<T>>,
}

/// Simulates every bowtie of the set in parallel.
pub fn bind_states<T: Scalar>(set: &BowtieSet, params: &[T], cone_cap: usize) -> Result<BoundStates<T>> {
    if params.len() != set.n_params() {
        return Err(Error::SizeMismatch(set.n_params(), params.len()));
    }
    if let Some(i) = params.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("parameter {i}")));
    }
    let betas = set
        .betas()
        .par_iter()
        .map(|b| simulate_bowtie_capped(b, params, cone_cap))
        .collect::<Result<Vec<_>>>()?;
    let gammas = set
        .gammas()
        .par_iter()
        .map(|b| simulate_bowtie_capped(b, params, cone_cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundStates { betas, gammas })
}

fn connected<T: Scalar>(a: &BoundBowtieState<T>, b: &BoundBowtieState<T>, plan: &ContractionPlan) -> Cplx<T> {
    let ov = overlap_counted(&a.state, &b.state, plan).0;
    ov - a.state.amplitudes()[0].conj() * b.state.amplitudes()[0]
}

/// Connected overlaps for a list of plans, evaluated in parallel, returned in plan order.
fn connected_all<T: Scalar>(
    left: &[BoundBowtieState<T>],
    right: &[BoundBowtieState<T>],
    plans: &[ContractionPlan],
) -> Vec<Cplx<T>> {
    plans
        .par_iter()
        .map(|p| connected(&left[p.a], &right[p.b], p))
        .collect()
}

/// Raw ingredients shared by [`assemble`] and [`assemble_generalized`].
struct Covariances<T> {
    /// Occurrence-level `Re cov(β, β)`, full symmetric.
    bb: Matrix<T>,
    /// Occurrence-level `cov(β_o, γ_j)`, dense `n_occ × n_h`.
    bg: Vec<Vec<Cplx<T>>>,
    /// `Re cov(γ_i, γ_j)`, full symmetric.
    gg: Matrix<T>,
}

fn covariances<T: Scalar>(set: &BowtieSet, states: &BoundStates<T>) -> Covariances<T> {
    let nb = set.betas().len();
    let ng = set.gammas().len();
    let mut bb = Matrix::zeros(nb, nb);
    for (p, v) in set
        .beta_beta_plans()
        .iter()
        .zip(connected_all(&states.betas, &states.betas, set.beta_beta_plans()))
    {
        bb[(p.a, p.b)] = v.re;
        bb[(p.b, p.a)] = v.re;
    }
    let mut bg = vec![vec![Cplx::zero(); ng]; nb];
    for (p, v) in set
        .beta_gamma_plans()
        .iter()
        .zip(connected_all(&states.betas, &states.gammas, set.beta_gamma_plans()))
    {
        bg[p.a][p.b] = v;
    }
    let mut gg = Matrix::zeros(ng, ng);
    for (p, v) in set
        .gamma_gamma_plans()
        .iter()
        .zip(connected_all(&states.gammas, &states.gammas, set.gamma_gamma_plans()))
    {
        gg[(p.a, p.b)] = v.re;
        gg[(p.b, p.a)] = v.re;
    }
    Covariances { bb, bg, gg }
}

/// Sums occurrence rows/columns into parameter rows/columns.
fn aggregate_g<T: Scalar>(set: &BowtieSet, bb: &Matrix<T>) -> Matrix<T> {
    let occ = set.param_betas();
    let np = set.n_params();
    Matrix::from_fn(np, np, |i, j| {
        let mut s = T::zero();
        for &a in &occ[i] {
            for &b in &occ[j] {
                s += bb[(a, b)];
            }
        }
        s
    })
}

fn check_inputs<T: Scalar>(set: &BowtieSet, h: &WeightedPauliSum<T>) -> Result<()> {
    if h.len() != set.gammas().len() || h.n_qubits() != set.n_qubits() {
        return Err(Error::SizeMismatch(set.gammas().len(), h.len()));
    }
    Ok(())
}

/// Assembles `g`, `b`, `E` and `Var[H]` from pre-computed bowties.
pub fn assemble_with<T: Scalar>(
    set: &BowtieSet,
    h: &WeightedPauliSum<T>,
    params: &[T],
    mode: Mode,
) -> Result<GeometricData<T>> {
    assemble_capped(set, h, params, mode, CONE_CAP)
}

pub fn assemble_capped<T: Scalar>(
    set: &BowtieSet,
    h: &WeightedPauliSum<T>,
    params: &[T],
    mode: Mode,
    cone_cap: usize,
) -> Result<GeometricData<T>> {
    check_inputs(set, h)?;
    let states = bind_states(set, params, cone_cap)?;
    Ok(assemble_bound(set, h, &states, mode))
}

/// Assembly from already-bound states.
pub fn assemble_bound<T: Scalar>(
    set: &BowtieSet,
    h: &WeightedPauliSum<T>,
    states: &BoundStates<T>,
    mode: Mode,
) -> GeometricData<T> {
    let cov = covariances(set, states);
    let c = h.coefficients();
    let energy: T = states
        .gammas
        .iter()
        .zip(&c)
        .map(|(g, cj)| *cj * g.state.amplitudes()[0].re)
        .sum();
    let variance = cov.gg.quad_form(&c).expect("square");
    let occ_b: Vec<T> = states
        .betas
        .iter()
        .enumerate()
        .map(|(o, beta)| {
            let mut s: Cplx<T> = Cplx::zero();
            for (j, v) in cov.bg[o].iter().enumerate() {
                s += v.scale(c[j]);
            }
            match mode {
                Mode::Real => s.im,
                Mode::Imaginary => {
                    // ⟨β|H|ψ⟩ = Σ_j c_j cov(β, γ_j) + ⟨β|α⟩ E
                    let raw = s + beta.state.amplitudes()[0].conj().scale(energy);
                    -raw.re
                }
            }
        })
        .collect();
    let b = set
        .param_betas()
        .iter()
        .map(|os| os.iter().map(|&o| occ_b[o]).sum())
        .collect();
    GeometricData {
        mode,
        g: aggregate_g(set, &cov.bb),
        b,
        energy,
        variance,
    }
}

/// Pre-computes the bowties and assembles in one call.
pub fn assemble<T: Scalar>(
    circuit: &Circuit,
    h: &WeightedPauliSum<T>,
    params: &[T],
    mode: Mode,
) -> Result<GeometricData<T>> {
    let set = precompute_all(circuit, h)?;
    assemble_with(&set, h, params, mode)
}

/// Generalized QGT from pre-computed bowties.
pub fn assemble_generalized_with<T: Scalar>(
    set: &BowtieSet,
    h: &WeightedPauliSum<T>,
    params: &[T],
) -> Result<GeneralizedQGT<T>> {
    check_inputs(set, h)?;
    let states = bind_states(set, params, CONE_CAP)?;
    let cov = covariances(set, &states);
    let np = set.n_params();
    let nh = h.len();
    let g = aggregate_g(set, &cov.bb);
    let occ = set.param_betas();
    let mut gt = Matrix::zeros(np + nh, np + nh);
    for i in 0..np {
        for j in 0..np {
            gt[(i, j)] = g[(i, j)];
        }
        for j in 0..nh {
            let m: T = occ[i].iter().map(|&o| cov.bg[o][j].im).sum();
            gt[(i, np + j)] = m;
            gt[(np + j, i)] = m;
        }
    }
    for i in 0..nh {
        for j in 0..nh {
            gt[(np + i, np + j)] = cov.gg[(i, j)];
        }
    }
    Ok(GeneralizedQGT {
        gtilde: gt,
        coefficients: h.coefficients(),
        n_params: np,
    })
}

pub fn assemble_generalized<T: Scalar>(
    circuit: &Circuit,
    h: &WeightedPauliSum<T>,
    params: &[T],
) -> Result<GeneralizedQGT<T>> {
    let set = precompute_all(circuit, h)?;
    assemble_generalized_with(&set, h, params)
}

/// Linear solver for `g θ̇ = b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Solver {
    /// Eigen-decomposition pseudo-inverse with relative cutoff.
    Pinv { rcond: f64 },
    /// `(g + λI)⁻¹ b`.
    Ridge { lambda: f64 },
    /// Minimizes `Var + θ̇ᵀgθ̇ − 2θ̇ᵀb` by conjugate gradients from zero.
    Quadmin { tol: f64, max_iter: usize },
}

impl Default for Solver {
    fn default() -> Self {
        Solver::Pinv { rcond: 1e-10 }
    }
}

impl Solver {
    pub fn ridge() -> Self {
        Solver::Ridge { lambda: 1e-8 }
    }

    pub fn quadmin() -> Self {
        Solver::Quadmin {
            tol: 1e-13,
            max_iter: 10_000,
        }
    }

    fn solve<T: Scalar>(&self, g: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
        if !g.is_finite() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("linear system".into()));
        }
        match *self {
            Solver::Pinv { rcond } => pinv_solve(g, b, T::of(rcond)),
            Solver::Ridge { lambda } => ridge_solve(g, b, T::of(lambda)),
            Solver::Quadmin { tol, max_iter } => conjugate_gradient(g, b, T::of(tol), max_iter),
        }
    }
}

/// `θ̇` from `g θ̇ = b`.
pub fn solve_update<T: Scalar>(gd: &GeometricData<T>, solver: &Solver) -> Result<Vec<T>> {
    solver.solve(&gd.g, &gd.b)
}

/// Minimizes `θ̃̇ᵀ g̃ θ̃̇` over the parameter block with the Hamiltonian block
/// held at `−c` (hard constraint, `penalty = None`) or pulled towards it with
/// weight `λ` (penalty form). Returns the parameter block.
pub fn solve_constrained<T: Scalar>(gq: &GeneralizedQGT<T>, penalty: Option<f64>, solver: &Solver) -> Result<Vec<T>> {
    let np = gq.n_params;
    let nh = gq.coefficients.len();
    match penalty {
        None => solver.solve(&gq.g(), &gq.b_real()),
        Some(lambda) => {
            let lambda = T::of(lambda);
            let mut a = gq.gtilde.clone();
            for j in 0..nh {
                a[(np + j, np + j)] += lambda;
            }
            let rhs: Vec<T> = (0..np + nh)
                .map(|k| if k < np { T::zero() } else { -lambda * gq.coefficients[k - np] })
                .collect();
            let x = solver.solve(&a, &rhs)?;
            Ok(x[..np].to_vec())
        }
    }
}

/// `Var[H] + θ̇ᵀgθ̇ − 2θ̇ᵀb`; negatives above `−1e−9` are reported as zero.
pub fn mclachlan_error<T: Scalar>(gd: &GeometricData<T>, theta_dot: &[T]) -> Result<T> {
    if theta_dot.len() != gd.b.len() {
        return Err(Error::SizeMismatch(gd.b.len(), theta_dot.len()));
    }
    let v = gd.variance + gd.g.quad_form(theta_dot)? - T::of(2.0) * dot(theta_dot, &gd.b);
    Ok(clamp_small_negative(v))
}

/// `θ̃̇ᵀ g̃ θ̃̇` for an augmented velocity.
pub fn generalized_error<T: Scalar>(gq: &GeneralizedQGT<T>, augmented: &[T]) -> Result<T> {
    Ok(clamp_small_negative(gq.gtilde.quad_form(augmented)?))
}

fn clamp_small_negative<T: Scalar>(v: T) -> T {
    if v < T::zero() && v > T::of(-1e-9) {
        T::zero()
    } else {
        v
    }
}

/// Settings of a time-evolution run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub mode: Mode,
    pub t_final: f64,
    pub dt: f64,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "default_cone_cap")]
    pub cone_cap: usize,
}

fn default_cone_cap() -> usize {
    CONE_CAP
}

impl EvolveConfig {
    pub fn new(mode: Mode, t_final: f64) -> Self {
        EvolveConfig {
            mode,
            t_final,
            dt: match mode {
                Mode::Real => 0.01,
                Mode::Imaginary => 0.05,
            },
            solver: Solver::default(),
            cone_cap: CONE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint<T> {
    pub t: T,
    pub theta: Vec<T>,
    pub energy: T,
    pub error_sq: T,
}

/// Time-ordered record of a variational run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub mode: Mode,
    pub points: Vec<TrajectoryPoint<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> Option<&TrajectoryPoint<T>> {
        self.points.last()
    }

    /// CSV with columns `t,energy,error_sq,theta_0,…`.
    pub fn to_csv(&self) -> String {
        let np = self.points.first().map_or(0, |p| p.theta.len());
        let mut s = String::from("t,energy,error_sq");
        for i in 0..np {
            let _ = write!(s, ",theta_{i}");
        }
        s.push('\n');
        for p in &self.points {
            let _ = write!(s, "{},{},{}", p.t, p.energy, p.error_sq);
            for v in &p.theta {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }

    /// Parses [`Trajectory::to_csv`] output.
    pub fn from_csv(mode: Mode, text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (k, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| Error::Parse {
                line: k + 1,
                msg: e.to_string(),
            })?;
            if vals.len() < 3 {
                return Err(Error::Parse {
                    line: k + 1,
                    msg: "expected t,energy,error_sq columns".into(),
                });
            }
            points.push(TrajectoryPoint {
                t: T::of(vals[0]),
                energy: T::of(vals[1]),
                error_sq: T::of(vals[2]),
                theta: vals[3..].iter().map(|v| T::of(*v)).collect(),
            });
        }
        Ok(Trajectory { mode, points })
    }
}

/// Reusable right-hand side `θ ↦ θ̇` of the McLachlan flow.
pub struct Flow<'a, T> {
    set: BowtieSet,
    h: &'a WeightedPauliSum<T>,
    config: &'a EvolveConfig,
}

impl<'a, T: Scalar> Flow<'a, T> {
    pub fn new(circuit: &Circuit, h: &'a WeightedPauliSum<T>, config: &'a EvolveConfig) -> Result<Self> {
        Ok(Flow {
            set: precompute_all(circuit, h)?,
            h,
            config,
        })
    }

    pub fn bowties(&self) -> &BowtieSet {
        &self.set
    }

    pub fn geometric(&self, theta: &[T]) -> Result<GeometricData<T>> {
        assemble_capped(&self.set, self.h, theta, self.config.mode, self.config.cone_cap)
    }

    /// `(θ̇, data)` at `θ`.
    pub fn velocity(&self, theta: &[T]) -> Result<(Vec<T>, GeometricData<T>)> {
        let gd = self.geometric(theta)?;
        let v = solve_update(&gd, &self.config.solver)?;
        Ok((v, gd))
    }
}

/// Fixed-step RK4 integration of the McLachlan flow from `theta0` at `t = 0`.
pub fn evolve<T: Scalar>(
    circuit: &Circuit,
    h: &WeightedPauliSum<T>,
    theta0: &[T],
    config: &EvolveConfig,
) -> Result<Trajectory<T>> {
    evolve_from(circuit, h, theta0, T::zero(), config)
}

/// [`evolve`] resuming at time `t0` (e.g. from the last row of a saved trajectory).
pub fn evolve_from<T: Scalar>(
    circuit: &Circuit,
    h: &WeightedPauliSum<T>,
    theta0: &[T],
    t0: T,
    config: &EvolveConfig,
) -> Result<Trajectory<T>> {
    if !(config.dt > 0.0) || !config.dt.is_finite() {
        return Err(Error::NonFinite(format!("time step {}", config.dt)));
    }
    if !(config.t_final >= 0.0) {
        return Err(Error::NonFinite(format!("final time {}", config.t_final)));
    }
    if theta0.len() != circuit.n_params() {
        return Err(Error::SizeMismatch(circuit.n_params(), theta0.len()));
    }
    let flow = Flow::new(circuit, h, config)?;
    let t_final = T::of(config.t_final);
    let dt = T::of(config.dt);
    let mut t = t0;
    let mut theta = theta0.to_vec();
    let mut points = Vec::new();
    let mut step = 0usize;
    loop {
        let (k1, gd) = flow.velocity(&theta).map_err(|e| abort(step, e))?;
        points.push(TrajectoryPoint {
            t,
            theta: theta.clone(),
            energy: gd.energy,
            error_sq: mclachlan_error(&gd, &k1)?,
        });
        let remaining = t_final - t;
        if remaining <= dt * T::of(1e-9) {
            break;
        }
        let h_step = if remaining < dt { remaining } else { dt };
        let half = h_step / T::of(2.0);
        let shifted = |k: &[T], f: T| -> Vec<T> { theta.iter().zip(k).map(|(a, b)| *a + f * *b).collect() };
        let k2 = flow.velocity(&shifted(&k1, half)).map_err(|e| abort(step, e))?.0;
        let k3 = flow.velocity(&shifted(&k2, half)).map_err(|e| abort(step, e))?.0;
        let k4 = flow.velocity(&shifted(&k3, h_step)).map_err(|e| abort(step, e))?.0;
        let sixth = h_step / T::of(6.0);
        for i in 0..theta.len() {
            theta[i] += sixth * (k1[i] + T::of(2.0) * (k2[i] + k3[i]) + k4[i]);
        }
        if let Some(i) = theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericalAbort {
                step,
                msg: format!("parameter {i} became non-finite"),
            });
        }
        step += 1;
        t = t0 + dt * T::of(step as f64);
        if t > t_final {
            t = t_final;
        }
    }
    Ok(Trajectory {
        mode: config.mode,
        points,
    })
}

fn abort(step: usize, e: Error) -> Error {
    match e {
        Error::NonFinite(msg) => Error::NumericalAbort { step, msg },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn one_qubit() -> (Circuit, WeightedPauliSum<f64>) {
        let mut c = Circuit::new(1);
        c.param_rotation(ps("Y")).unwrap();
        (c, WeightedPauliSum::new(1, [(1.0, ps("Z"))]).unwrap())
    }

    #[test]
    fn one_qubit_values() {
        let (c, h) = one_qubit();
        let th = std::f64::consts::FRAC_PI_4;
        let gd = assemble(&c, &h, &[th], Mode::Imaginary).unwrap();
        assert!((gd.g[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((gd.b[0] - 1.0).abs() < 1e-15);
        assert!(gd.energy.abs() < 1e-15);
        assert!((gd.variance - 1.0).abs() < 1e-15);
        let v = solve_update(&gd, &Solver::default()).unwrap();
        assert!(mclachlan_error(&gd, &v).unwrap().abs() < 1e-12);
        assert!((mclachlan_error(&gd, &[0.0]).unwrap() - gd.variance).abs() < 1e-15);
    }

    #[test]
    fn zero_hamiltonian_gives_zeros() {
        let (c, _) = one_qubit();
        let h = WeightedPauliSum::new(1, [(0.0, ps("Z")), (0.0, ps("X"))]).unwrap();
        for mode in [Mode::Real, Mode::Imaginary] {
            let gd = assemble(&c, &h, &[0.3], mode).unwrap();
            assert_eq!(gd.b, vec![0.0]);
            assert_eq!(gd.energy, 0.0);
            assert_eq!(gd.variance, 0.0);
        }
    }

    #[test]
    fn generalized_blocks_one_qubit() {
        let (c, h) = one_qubit();
        let gq = assemble_generalized(&c, &h, &[std::f64::consts::FRAC_PI_4]).unwrap();
        assert!((gq.gtilde[(1, 1)] - 1.0).abs() < 1e-15);
        assert!((gq.variance() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generalized_without_terms_is_g() {
        let (c, _) = one_qubit();
        let h = WeightedPauliSum::<f64>::empty(1);
        let gq = assemble_generalized(&c, &h, &[0.2]).unwrap();
        let gd = assemble(&c, &h, &[0.2], Mode::Real).unwrap();
        assert_eq!(gq.gtilde, gd.g);
    }

    #[test]
    fn zero_final_time_is_a_single_point() {
        let (c, h) = one_qubit();
        let traj = evolve(&c, &h, &[0.1], &EvolveConfig::new(Mode::Real, 0.0)).unwrap();
        assert_eq!(traj.points.len(), 1);
        assert_eq!(traj.points[0].theta, vec![0.1]);
    }

    #[test]
    fn one_qubit_imaginary_time_matches_analytic_energy() {
        let (c, h) = one_qubit();
        let mut cfg = EvolveConfig::new(Mode::Imaginary, 1.0);
        cfg.dt = 1e-3;
        let th0 = std::f64::consts::FRAC_PI_4 * 0.5;
        let traj = evolve(&c, &h, &[th0], &cfg).unwrap();
        // ψ0 = cos θ0|0⟩ + sin θ0|1⟩ under e^{-Zτ}
        let (a, b) = (th0.cos() * (-1.0f64).exp(), th0.sin() * 1.0f64.exp());
        let exact = (a * a - b * b) / (a * a + b * b);
        assert!((traj.last().unwrap().energy - exact).abs() < 1e-6);
        assert_eq!(traj.points.len(), 1001);
    }

    #[test]
    fn csv_roundtrip() {
        let (c, h) = one_qubit();
        let mut cfg = EvolveConfig::new(Mode::Real, 0.05);
        cfg.dt = 0.02;
        let traj = evolve(&c, &h, &[0.3], &cfg).unwrap();
        assert_eq!(traj.points.len(), 4);
        let back = Trajectory::<f64>::from_csv(Mode::Real, &traj.to_csv()).unwrap();
        assert_eq!(back, traj);
    }
}
