//! Dense reference implementations used as test oracles.
//!
//! Everything here works on plain `Vec<Complex64>` state vectors and applies
//! operators qubit by qubit from their 2×2 / 4×4 matrices, without the
//! bitmask tricks of the library.
#![allow(dead_code)]

use bowtie_core::circuit::{Circuit, Gate};
use bowtie_core::pauli::{CliffordKind, Pauli, PauliString, Phase, WeightedPauliSum};
use bowtie_core::{Angle, Mode};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type State = Vec<C>;
pub type M2 = [[C; 2]; 2];

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn zero_state(n: usize) -> State {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    v
}

pub fn pauli_matrix(p: Pauli) -> M2 {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::I => [[l, o], [o, l]],
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    }
}

pub fn phase_value(ph: Phase) -> C {
    match ph {
        Phase::PlusOne => c(1.0, 0.0),
        Phase::PlusI => c(0.0, 1.0),
        Phase::MinusOne => c(-1.0, 0.0),
        Phase::MinusI => c(0.0, -1.0),
    }
}

pub fn apply_1q(psi: &State, q: usize, m: &M2) -> State {
    let bit = 1 << q;
    let mut out = psi.clone();
    for s in 0..psi.len() {
        if s & bit == 0 {
            let (a0, a1) = (psi[s], psi[s | bit]);
            out[s] = m[0][0] * a0 + m[0][1] * a1;
            out[s | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
    out
}

/// 4×4 matrix with row/column index `2·b(q1) + b(q0)`.
pub fn apply_2q(psi: &State, q0: usize, q1: usize, m: &[[C; 4]; 4]) -> State {
    let (b0, b1) = (1 << q0, 1 << q1);
    let mut out = psi.clone();
    for s in 0..psi.len() {
        if s & b0 == 0 && s & b1 == 0 {
            let idx = [s, s | b0, s | b1, s | b0 | b1];
            for r in 0..4 {
                out[idx[r]] = (0..4).map(|k| m[r][k] * psi[idx[k]]).sum();
            }
        }
    }
    out
}

pub fn apply_pauli(psi: &State, p: &PauliString) -> State {
    let mut out = psi.clone();
    for q in 0..p.n_qubits() {
        let op = p.pauli_at(q);
        if op != Pauli::I {
            out = apply_1q(&out, q, &pauli_matrix(op));
        }
    }
    let ph = phase_value(p.phase());
    out.iter().map(|a| a * ph).collect()
}

pub fn apply_sum(psi: &State, h: &WeightedPauliSum<f64>) -> State {
    let mut out = vec![c(0.0, 0.0); psi.len()];
    for (w, p) in h.terms() {
        for (o, v) in out.iter_mut().zip(apply_pauli(psi, p)) {
            *o += v * *w;
        }
    }
    out
}

/// `e^{-iθP}ψ` from `P² = 1`.
pub fn apply_rotation(psi: &State, p: &PauliString, theta: f64) -> State {
    let pp = apply_pauli(psi, p);
    psi.iter()
        .zip(pp)
        .map(|(a, b)| a * theta.cos() + b * c(0.0, -theta.sin()))
        .collect()
}

pub fn clifford_1q(kind: CliffordKind) -> M2 {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match kind {
        CliffordKind::H => [[h, h], [h, -h]],
        CliffordKind::S => [[l, o], [o, i]],
        CliffordKind::Sdg => [[l, o], [o, -i]],
        CliffordKind::X => pauli_matrix(Pauli::X),
        CliffordKind::Y => pauli_matrix(Pauli::Y),
        CliffordKind::Z => pauli_matrix(Pauli::Z),
        CliffordKind::CX => unreachable!(),
    }
}

/// CX with control `q0`, in the `apply_2q` basis ordering.
pub fn cx_matrix() -> [[C; 4]; 4] {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    // basis |b1 b0⟩: 00, 01 (control set), 10, 11; control set flips b1
    [[l, o, o, o], [o, o, o, l], [o, o, l, o], [o, l, o, o]]
}

pub fn apply_gate(psi: &State, gate: &Gate, theta: &[f64]) -> State {
    match gate {
        Gate::Clifford(g) => match g.kind() {
            CliffordKind::CX => apply_2q(psi, g.qubits()[0], g.qubits()[1], &cx_matrix()),
            k => apply_1q(psi, g.qubits()[0], &clifford_1q(k)),
        },
        Gate::Rotation(r) => {
            let a = match r.angle() {
                Angle::Param(i) => theta[i],
                Angle::Fixed(v) => v,
            };
            apply_rotation(psi, r.generator(), a)
        }
    }
}

pub fn run(circuit: &Circuit, theta: &[f64], from: State) -> State {
    circuit.gates().iter().fold(from, |s, g| apply_gate(&s, g, theta))
}

pub fn dense_state(circuit: &Circuit, theta: &[f64]) -> State {
    run(circuit, theta, zero_state(circuit.n_qubits()))
}

/// `∂_i|ψ⟩`, inserting `−iP` after every occurrence of parameter `i`.
pub fn tangents(circuit: &Circuit, theta: &[f64]) -> Vec<State> {
    let n = circuit.n_qubits();
    let gates = circuit.gates();
    let mut out = vec![vec![c(0.0, 0.0); 1 << n]; circuit.n_params()];
    let mut prefix = zero_state(n);
    for (k, g) in gates.iter().enumerate() {
        prefix = apply_gate(&prefix, g, theta);
        if let Gate::Rotation(r) = g {
            if let Angle::Param(i) = r.angle() {
                let mut s: State = apply_pauli(&prefix, r.generator()).iter().map(|a| a * c(0.0, -1.0)).collect();
                for g2 in &gates[k + 1..] {
                    s = apply_gate(&s, g2, theta);
                }
                for (o, v) in out[i].iter_mut().zip(s) {
                    *o += v;
                }
            }
        }
    }
    out
}

/// Central-difference tangents.
pub fn fd_tangents(circuit: &Circuit, theta: &[f64], h: f64) -> Vec<State> {
    (0..circuit.n_params())
        .map(|i| {
            let mut tp = theta.to_vec();
            let mut tm = theta.to_vec();
            tp[i] += h;
            tm[i] -= h;
            let (a, b) = (dense_state(circuit, &tp), dense_state(circuit, &tm));
            a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
        })
        .collect()
}

pub fn inner(a: &State, b: &State) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &State) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn fidelity(a: &State, b: &State) -> f64 {
    inner(a, b).norm_sqr() / (norm_sqr(a) * norm_sqr(b))
}

/// Dense McLachlan data.
pub struct DenseGeometry {
    pub g: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub energy: f64,
    pub variance: f64,
}

/// `g`, `b`, `E`, `Var` from a state and its tangents.
pub fn geometry_from(psi: &State, tangents: &[State], h: &WeightedPauliSum<f64>, mode: Mode) -> DenseGeometry {
    let hpsi = apply_sum(psi, h);
    let energy = inner(psi, &hpsi).re;
    let variance = norm_sqr(&hpsi) - energy * energy;
    let ov: Vec<C> = tangents.iter().map(|t| inner(t, psi)).collect();
    let p = tangents.len();
    let g = (0..p)
        .map(|i| (0..p).map(|j| (inner(&tangents[i], &tangents[j]) - ov[i] * ov[j].conj()).re).collect())
        .collect();
    let b = (0..p)
        .map(|i| {
            let z = inner(&tangents[i], &hpsi) - ov[i] * energy;
            match mode {
                Mode::Real => z.im,
                Mode::Imaginary => -z.re,
            }
        })
        .collect();
    DenseGeometry {
        g,
        b,
        energy,
        variance,
    }
}

pub fn dense_geometry(circuit: &Circuit, h: &WeightedPauliSum<f64>, theta: &[f64], mode: Mode) -> DenseGeometry {
    geometry_from(&dense_state(circuit, theta), &tangents(circuit, theta), h, mode)
}

/// `‖P⊥(Σ θ̇_i|∂_iψ⟩ + iH|ψ⟩)‖²` with `P⊥ = 1 − |ψ⟩⟨ψ|`.
pub fn dense_residual(circuit: &Circuit, h: &WeightedPauliSum<f64>, theta: &[f64], theta_dot: &[f64]) -> f64 {
    let psi = dense_state(circuit, theta);
    let tg = tangents(circuit, theta);
    let hpsi = apply_sum(&psi, h);
    let mut r: State = hpsi.iter().map(|a| a * c(0.0, 1.0)).collect();
    for (t, &w) in tg.iter().zip(theta_dot) {
        for (ri, ti) in r.iter_mut().zip(t) {
            *ri += ti * w;
        }
    }
    let proj = inner(&psi, &r);
    let r: State = r.iter().zip(&psi).map(|(a, p)| a - p * proj).collect();
    norm_sqr(&r)
}

/// Dense Hamiltonian matrix, column `s` = `H|s⟩`.
pub fn dense_matrix(h: &WeightedPauliSum<f64>) -> DMatrix<C> {
    let dim = 1 << h.n_qubits();
    let mut m = DMatrix::<C>::zeros(dim, dim);
    for s in 0..dim {
        let mut e = vec![c(0.0, 0.0); dim];
        e[s] = c(1.0, 0.0);
        for (r, v) in apply_sum(&e, h).into_iter().enumerate() {
            m[(r, s)] = v;
        }
    }
    m
}

/// Ground energy and vector by full diagonalization.
pub fn dense_ground(h: &WeightedPauliSum<f64>) -> (f64, State) {
    let eig = nalgebra::SymmetricEigen::new(dense_matrix(h));
    let k = eig.eigenvalues.imin();
    (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect())
}

/// `e^{-iHt}ψ` by dense eigendecomposition.
pub fn dense_evolve(h: &WeightedPauliSum<f64>, psi: &State, t: f64) -> State {
    let eig = nalgebra::SymmetricEigen::new(dense_matrix(h));
    let v = &eig.eigenvectors;
    let coeffs = v.adjoint() * DVector::from_vec(psi.clone());
    let phased = DVector::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(eig.eigenvalues.iter()).map(|(a, e)| a * C::from_polar(1.0, -e * t)),
    );
    (v * phased).iter().copied().collect()
}

fn random_pauli_on(rng: &mut ChaCha8Rng, n: usize, qubits: &[usize]) -> PauliString {
    let ops: Vec<(usize, Pauli)> = qubits
        .iter()
        .map(|&q| (q, [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)]))
        .collect();
    PauliString::from_sparse(n, &ops).unwrap()
}

/// Random non-identity Pauli string with weight `1..=max_weight`, phase +1.
pub fn random_pauli(rng: &mut ChaCha8Rng, n: usize, max_weight: usize) -> PauliString {
    let w = rng.random_range(1..=max_weight.min(n));
    let mut qs: Vec<usize> = (0..n).collect();
    for k in 0..w {
        let j = rng.random_range(k..n);
        qs.swap(k, j);
    }
    qs.truncate(w);
    qs.sort_unstable();
    random_pauli_on(rng, n, &qs)
}

/// Random local circuit: weight-≤3 rotations on nearby qubits, some shared
/// parameters, some fixed angles and Clifford gates.
pub fn random_circuit(rng: &mut ChaCha8Rng, n: usize, n_gates: usize) -> Circuit {
    let mut c = Circuit::new(n);
    let kinds = [
        CliffordKind::H,
        CliffordKind::S,
        CliffordKind::Sdg,
        CliffordKind::X,
        CliffordKind::Y,
        CliffordKind::Z,
        CliffordKind::CX,
    ];
    for _ in 0..n_gates {
        let start = rng.random_range(0..n);
        let u: f64 = rng.random();
        if u < 0.2 {
            let kind = kinds[rng.random_range(0..kinds.len())];
            if kind == CliffordKind::CX {
                if n < 2 {
                    continue;
                }
                let t = (start + 1 + rng.random_range(0..n - 1)) % n;
                c.clifford(kind, &[start, t]).unwrap();
            } else {
                c.clifford(kind, &[start]).unwrap();
            }
            continue;
        }
        let w = rng.random_range(1..=3.min(n));
        let qs: Vec<usize> = {
            let mut v: Vec<usize> = (0..w).map(|k| (start + k) % n).collect();
            v.sort_unstable();
            v
        };
        let p = random_pauli_on(rng, n, &qs);
        if u < 0.3 {
            c.rotation(p, Angle::Fixed(rng.random_range(-1.5..1.5))).unwrap();
        } else if u < 0.4 && c.n_params() > 0 {
            let i = rng.random_range(0..c.n_params());
            c.rotation(p, Angle::Param(i)).unwrap();
        } else {
            c.param_rotation(p).unwrap();
        }
    }
    c
}

/// Random Hamiltonian of `terms` terms with weight ≤ 3 and coefficients in `[−1, 1]`.
pub fn random_hamiltonian(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> WeightedPauliSum<f64> {
    let mut h = WeightedPauliSum::empty(n);
    for _ in 0..terms {
        let p = random_pauli(rng, n, 3);
        h.push(rng.random_range(-1.0..1.0), p).unwrap();
    }
    h
}

pub fn random_theta(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    (0..p).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff_mat(a: &bowtie_core::Matrix, b: &[Vec<f64>]) -> f64 {
    let mut m = 0.0f64;
    for (i, row) in b.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m = m.max((a[(i, j)] - v).abs());
        }
    }
    m
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
