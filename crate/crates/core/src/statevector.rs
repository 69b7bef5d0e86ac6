//! Dense statevectors. Qubit `q` is bit `q` of the amplitude index.

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::lightcone::{Bowtie, BowtieKind};
use crate::pauli::{CliffordKind, PauliString, WeightedPauliSum};
use crate::scalar::{cplx, Cplx, Scalar};

/// Largest register a dense state may have.
pub const MAX_STATE_QUBITS: usize = 30;

/// Default size limit for full-space oracles such as [`exact_evolve`].
pub const ORACLE_CAP: usize = 14;

/// Default size limit for bowtie cones.
pub const CONE_CAP: usize = 25;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Cplx<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `|s⟩`.
    pub fn basis(n_qubits: usize, s: u64) -> Result<Self> {
        if n_qubits > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                got: n_qubits,
                max: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if s as usize >= dim {
            return Err(Error::InvalidCircuit(format!("basis index {s} outside {n_qubits} qubits")));
        }
        let mut amps = vec![Cplx::zero(); dim];
        amps[s as usize] = Cplx::one();
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Cplx<T>>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::SizeMismatch(dim.next_power_of_two(), dim));
        }
        Ok(StateVector {
            n_qubits: dim.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Cplx<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::NonFinite(format!("state norm {n}")));
        }
        let inv = T::one() / n;
        for a in &mut self.amps {
            *a = a.scale(inv);
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector<T>) -> Result<Cplx<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Cplx::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector<T>) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch(self.n_qubits, p.n_qubits()));
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// `ψ ← P ψ`, including the phase of `P`.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_pauli(p)?;
        let x = p.x_mask().low_word() as usize;
        let z = p.z_mask().low_word() as usize;
        let base = pauli_base_phase::<T>(p);
        if x == 0 {
            for (s, a) in self.amps.iter_mut().enumerate() {
                let v = *a * base;
                *a = if (z & s).count_ones() % 2 == 1 { -v } else { v };
            }
            return Ok(());
        }
        let pivot = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for s in 0..self.amps.len() {
            if s & pivot != 0 {
                continue;
            }
            let t = s ^ x;
            let (ps, pt) = (sign_of::<T>(z, s), sign_of::<T>(z, t));
            let (as_, at) = (self.amps[s], self.amps[t]);
            // P|s⟩ = base·sign(s)|t⟩
            self.amps[t] = as_ * base * ps;
            self.amps[s] = at * base * pt;
        }
        Ok(())
    }

    /// `ψ ← e^{-iθP} ψ = (cos θ − i sin θ P) ψ` for a phase-free `P`.
    pub fn apply_rotation(&mut self, p: &PauliString, theta: T) -> Result<()> {
        self.check_pauli(p)?;
        let (c, sn) = (theta.cos(), theta.sin());
        let x = p.x_mask().low_word() as usize;
        let z = p.z_mask().low_word() as usize;
        // -i sinθ times the phase of P
        let m = pauli_base_phase::<T>(p) * cplx(T::zero(), -sn);
        if x == 0 {
            let (plus, minus) = (cplx(c, T::zero()) + m, cplx(c, T::zero()) - m);
            for (s, a) in self.amps.iter_mut().enumerate() {
                *a *= if (z & s).count_ones() % 2 == 1 { minus } else { plus };
            }
            return Ok(());
        }
        let pivot = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for s in 0..self.amps.len() {
            if s & pivot != 0 {
                continue;
            }
            let t = s ^ x;
            let (ps, pt) = (sign_of::<T>(z, s), sign_of::<T>(z, t));
            let (as_, at) = (self.amps[s], self.amps[t]);
            self.amps[s] = as_.scale(c) + at * m * pt;
            self.amps[t] = at.scale(c) + as_ * m * ps;
        }
        Ok(())
    }

    /// Applies a Clifford gate (or its inverse).
    pub fn apply_clifford(&mut self, kind: CliffordKind, qubits: &[usize], dagger: bool) -> Result<()> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let kind = if dagger { kind.inverse() } else { kind };
        let i = cplx(T::zero(), T::one());
        let bit = 1usize << qubits[0];
        match kind {
            CliffordKind::CX => {
                let t = 1usize << qubits[1];
                for s in 0..self.amps.len() {
                    if s & bit != 0 && s & t == 0 {
                        self.amps.swap(s, s | t);
                    }
                }
            }
            _ => {
                let h = T::FRAC_1_SQRT_2();
                for s in 0..self.amps.len() {
                    if s & bit != 0 {
                        continue;
                    }
                    let (a0, a1) = (self.amps[s], self.amps[s | bit]);
                    let (b0, b1) = match kind {
                        CliffordKind::H => ((a0 + a1).scale(h), (a0 - a1).scale(h)),
                        CliffordKind::S => (a0, a1 * i),
                        CliffordKind::Sdg => (a0, -a1 * i),
                        CliffordKind::X => (a1, a0),
                        CliffordKind::Y => (-a1 * i, a0 * i),
                        CliffordKind::Z => (a0, -a1),
                        CliffordKind::CX => unreachable!(),
                    };
                    self.amps[s] = b0;
                    self.amps[s | bit] = b1;
                }
            }
        }
        Ok(())
    }

    /// Applies one circuit gate with its bound angle.
    pub fn apply_gate(&mut self, gate: &Gate, params: &[T]) -> Result<()> {
        self.apply_gate_inner(gate, params, false)
    }

    /// Applies the inverse of one circuit gate.
    pub fn apply_gate_dagger(&mut self, gate: &Gate, params: &[T]) -> Result<()> {
        self.apply_gate_inner(gate, params, true)
    }

    fn apply_gate_inner(&mut self, gate: &Gate, params: &[T], dagger: bool) -> Result<()> {
        match gate {
            Gate::Clifford(g) => self.apply_clifford(g.kind(), g.qubits(), dagger),
            Gate::Rotation(r) => {
                let theta = r.bound_angle(params)?;
                self.apply_rotation(r.generator(), if dagger { -theta } else { theta })
            }
        }
    }

    /// Applies a whole circuit.
    pub fn apply_circuit(&mut self, circuit: &Circuit, params: &[T]) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch(self.n_qubits, circuit.n_qubits()));
        }
        if params.len() < circuit.n_params() {
            return Err(Error::UnboundParameter {
                index: circuit.n_params() - 1,
                len: params.len(),
            });
        }
        for g in circuit.gates() {
            self.apply_gate(g, params)?;
        }
        Ok(())
    }

    /// `H ψ` as a new vector.
    pub fn apply_sum(&self, h: &WeightedPauliSum<T>) -> Result<StateVector<T>> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch(self.n_qubits, h.n_qubits()));
        }
        let mut out = vec![Cplx::zero(); self.amps.len()];
        for (c, p) in h.terms() {
            let x = p.x_mask().low_word() as usize;
            let z = p.z_mask().low_word() as usize;
            let base = pauli_base_phase::<T>(p).scale(*c);
            for (s, a) in self.amps.iter().enumerate() {
                out[s ^ x] += *a * base * sign_of::<T>(z, s);
            }
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    /// `⟨ψ|H|ψ⟩` (real part).
    pub fn expectation(&self, h: &WeightedPauliSum<T>) -> Result<T> {
        Ok(self.inner(&self.apply_sum(h)?)?.re)
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Phase of `P` times `i^{#Y}`: the factor in `P|s⟩ = base·(−1)^{|z∧s|}|s⊕x⟩`.
fn pauli_base_phase<T: Scalar>(p: &PauliString) -> Cplx<T> {
    let e = p.phase().exponent() + (p.x_mask() & p.z_mask()).count_ones();
    match e % 4 {
        0 => cplx(T::one(), T::zero()),
        1 => cplx(T::zero(), T::one()),
        2 => cplx(-T::one(), T::zero()),
        _ => cplx(T::zero(), -T::one()),
    }
}

#[inline]
fn sign_of<T: Scalar>(z: usize, s: usize) -> T {
    if (z & s).count_ones() % 2 == 1 {
        -T::one()
    } else {
        T::one()
    }
}

/// `U(θ)|0…0⟩`.
pub fn simulate_circuit<T: Scalar>(circuit: &Circuit, params: &[T]) -> Result<StateVector<T>> {
    let mut psi = StateVector::zero(circuit.n_qubits())?;
    psi.apply_circuit(circuit, params)?;
    Ok(psi)
}

/// Bowtie state bound to a parameter vector.
#[derive(Clone, Debug)]
pub struct BoundBowtieState<T> {
    pub kind: BowtieKind,
    pub index: usize,
    pub state: StateVector<T>,
}

/// Simulates `S† core S |0…0⟩` on the cone (times `-i` for β bowties).
pub fn simulate_bowtie<T: Scalar>(bowtie: &Bowtie, params: &[T]) -> Result<BoundBowtieState<T>> {
    simulate_bowtie_capped(bowtie, params, CONE_CAP)
}

/// [`simulate_bowtie`] with an explicit cone-size limit.
pub fn simulate_bowtie_capped<T: Scalar>(bowtie: &Bowtie, params: &[T], cap: usize) -> Result<BoundBowtieState<T>> {
    let n = bowtie.cone().len();
    if n > cap {
        return Err(Error::CapExceeded { got: n, cap });
    }
    let mut psi = StateVector::zero(n)?;
    for g in bowtie.gates() {
        psi.apply_gate(g, params)?;
    }
    psi.apply_pauli(bowtie.local_core())?;
    for g in bowtie.gates().iter().rev() {
        psi.apply_gate_dagger(g, params)?;
    }
    if bowtie.kind() == BowtieKind::Beta {
        let mi = cplx(T::zero(), -T::one());
        for a in psi.amplitudes_mut() {
            *a *= mi;
        }
    }
    Ok(BoundBowtieState {
        kind: bowtie.kind(),
        index: bowtie.index(),
        state: psi,
    })
}

/// Born-rule samples as basis indices; deterministic for a given seed.
pub fn sample_bitstrings<T: Scalar>(state: &StateVector<T>, shots: usize, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::Empty("shot count".into()));
    }
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0f64;
    for a in state.amplitudes() {
        acc += a.norm_sqr().to_f64_lossless();
        cdf.push(acc);
    }
    if !(acc > 0.0) || !acc.is_finite() {
        return Err(Error::NonFinite(format!("total probability {acc}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..shots)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            let mut k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            // rounding can push u past the last non-zero entry
            while k > 0 && cdf[k] == cdf[k - 1] {
                k -= 1;
            }
            k as u64
        })
        .collect())
}

/// `e^{-iHt}ψ₀` (real time) or `e^{-Hτ}ψ₀/‖·‖` (imaginary time).
///
/// Uses a truncated Taylor series on sub-steps with `‖H‖₁·δ ≤ 1/2`, applying
/// `H` term by term, so no dense matrix is formed.
pub fn exact_evolve<T: Scalar>(
    h: &WeightedPauliSum<T>,
    psi0: &StateVector<T>,
    t: T,
    imaginary: bool,
) -> Result<StateVector<T>> {
    exact_evolve_capped(h, psi0, t, imaginary, ORACLE_CAP)
}

pub fn exact_evolve_capped<T: Scalar>(
    h: &WeightedPauliSum<T>,
    psi0: &StateVector<T>,
    t: T,
    imaginary: bool,
    cap: usize,
) -> Result<StateVector<T>> {
    if psi0.n_qubits() > cap {
        return Err(Error::CapExceeded {
            got: psi0.n_qubits(),
            cap,
        });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite(format!("evolution time {t}")));
    }
    let norm = h.one_norm();
    let steps = (norm * t.abs() * T::of(2.0)).ceil().to_usize().unwrap_or(1).max(1);
    let dt = t / T::of(steps as f64);
    // (−iδ) for real time, (−δ) for imaginary time
    let factor = if imaginary {
        cplx(-dt, T::zero())
    } else {
        cplx(T::zero(), -dt)
    };
    let tol = T::epsilon() * T::of(1e-2);
    let mut psi = psi0.clone();
    for _ in 0..steps {
        let mut term = psi.clone();
        let mut sum = psi.clone();
        for k in 1..64 {
            let mut next = term.apply_sum(h)?;
            let f = factor / T::of(k as f64);
            for a in next.amplitudes_mut() {
                *a *= f;
            }
            for (s, a) in sum.amplitudes_mut().iter_mut().zip(next.amplitudes()) {
                *s += *a;
            }
            let small = next.norm_sqr().sqrt() <= tol;
            term = next;
            if small {
                break;
            }
        }
        psi = sum;
        if imaginary {
            psi.normalize()?;
        }
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Angle;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_flips_zero() {
        let mut psi = StateVector::<f64>::zero(1).unwrap();
        psi.apply_clifford(CliffordKind::X, &[0], false).unwrap();
        assert_eq!(psi.amplitudes()[1], Cplx::one());
    }

    #[test]
    fn y_rotation_of_zero() {
        let mut psi = StateVector::<f64>::zero(1).unwrap();
        psi.apply_rotation(&ps("Y"), 0.3).unwrap();
        let a = psi.amplitudes();
        assert!((a[0].re - 0.3f64.cos()).abs() < 1e-15 && a[0].im.abs() < 1e-15);
        assert!((a[1].re - 0.3f64.sin()).abs() < 1e-15 && a[1].im.abs() < 1e-15);
    }

    #[test]
    fn pauli_y_action() {
        let mut psi = StateVector::<f64>::zero(1).unwrap();
        psi.apply_pauli(&ps("Y")).unwrap();
        assert_eq!(psi.amplitudes()[1], cplx(0.0, 1.0));
        let mut phi = StateVector::<f64>::zero(1).unwrap();
        phi.apply_clifford(CliffordKind::Y, &[0], false).unwrap();
        assert_eq!(psi, phi);
    }

    #[test]
    fn rotation_dagger_undoes_rotation() {
        let mut c = Circuit::new(3);
        c.rotation(ps("XYZ"), Angle::Param(0)).unwrap();
        c.clifford(CliffordKind::H, &[1]).unwrap();
        c.clifford(CliffordKind::CX, &[2, 0]).unwrap();
        c.clifford(CliffordKind::S, &[0]).unwrap();
        let params = [0.7f64];
        let mut psi = simulate_circuit(&c, &params).unwrap();
        for g in c.gates().iter().rev() {
            psi.apply_gate_dagger(g, &params).unwrap();
        }
        let zero = StateVector::<f64>::zero(3).unwrap();
        assert!((psi.fidelity(&zero).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unbound_parameter_is_an_error() {
        let mut c = Circuit::new(1);
        c.param_rotation(ps("X")).unwrap();
        let mut psi = StateVector::<f64>::zero(1).unwrap();
        assert!(matches!(
            psi.apply_gate(&c.gates()[0], &[]),
            Err(Error::UnboundParameter { index: 0, len: 0 })
        ));
    }

    #[test]
    fn sampling_zero_state() {
        let psi = StateVector::<f64>::zero(4).unwrap();
        assert!(sample_bitstrings(&psi, 100, 1).unwrap().iter().all(|&s| s == 0));
    }

    #[test]
    fn sampling_plus_state() {
        let mut psi = StateVector::<f64>::zero(1).unwrap();
        psi.apply_clifford(CliffordKind::H, &[0], false).unwrap();
        let shots = 100_000;
        let s = sample_bitstrings(&psi, shots, 3).unwrap();
        let p0 = s.iter().filter(|&&b| b == 0).count() as f64 / shots as f64;
        assert!((p0 - 0.5).abs() < 0.01);
        assert_eq!(s, sample_bitstrings(&psi, shots, 3).unwrap());
    }

    #[test]
    fn exact_evolve_zero_time() {
        let h = WeightedPauliSum::new(2, [(1.0, ps("XX")), (0.5, ps("ZI"))]).unwrap();
        let mut psi = StateVector::<f64>::zero(2).unwrap();
        psi.apply_clifford(CliffordKind::H, &[0], false).unwrap();
        assert_eq!(exact_evolve(&h, &psi, 0.0, false).unwrap(), psi);
    }

    #[test]
    fn imaginary_time_reaches_lowest_z_state() {
        let h = WeightedPauliSum::new(1, [(1.0, ps("Z"))]).unwrap();
        let mut psi = StateVector::<f64>::zero(1).unwrap();
        psi.apply_clifford(CliffordKind::H, &[0], false).unwrap();
        let out = exact_evolve(&h, &psi, 20.0, true).unwrap();
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_time_single_qubit_phase() {
        let h = WeightedPauliSum::new(1, [(1.0, ps("X"))]).unwrap();
        let psi = StateVector::<f64>::zero(1).unwrap();
        let out = exact_evolve(&h, &psi, 0.9, false).unwrap();
        let a = out.amplitudes();
        assert!((a[0] - cplx(0.9f64.cos(), 0.0)).norm() < 1e-14);
        assert!((a[1] - cplx(0.0, -0.9f64.sin())).norm() < 1e-14);
    }

    #[test]
    fn oracle_cap_is_enforced() {
        let h = WeightedPauliSum::<f64>::empty(3);
        let psi = StateVector::<f64>::zero(3).unwrap();
        assert_eq!(
            exact_evolve_capped(&h, &psi, 1.0, false, 2).unwrap_err(),
            Error::CapExceeded { got: 3, cap: 2 }
        );
    }

    #[test]
    fn works_in_single_precision() {
        let mut psi = StateVector::<f32>::zero(2).unwrap();
        psi.apply_rotation(&ps("XY"), 0.4).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-6);
    }
}
