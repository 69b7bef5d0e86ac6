//! Light-cones of circuit-conjugated Pauli operators and the bowtie subcircuits
//! built from them.
//!
//! For a gate list `G_1 … G_m` (application order) and a Pauli `P`, the
//! operator `G_1† … G_m† P G_m … G_1` is swept from `G_m` down to `G_1`. A gate
//! that commutes with every tracked Pauli branch cancels and is dropped; the
//! remaining gates, restricted to the cone, form the bowtie.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::overlap::ContractionPlan;
use crate::pauli::{Bits, PauliString, WeightedPauliSum};
use crate::scalar::Scalar;

/// Above this many distinct Pauli branches the sweep only tracks their joint support.
pub const BRANCH_CAP: usize = 256;

/// Sorted set of qubits on which a conjugated operator can act.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LightCone {
    qubits: Vec<usize>,
}

impl LightCone {
    pub fn from_bits(bits: &Bits) -> Self {
        LightCone {
            qubits: bits.ones().collect(),
        }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn bits(&self) -> Bits {
        let mut b = Bits::zero();
        for &q in &self.qubits {
            b.set(q, true);
        }
        b
    }

    pub fn contains(&self, q: usize) -> bool {
        self.qubits.binary_search(&q).is_ok()
    }
}

enum Tracked {
    Branches(Vec<PauliString>),
    Support(Bits),
}

fn branch_key(p: &PauliString) -> (Bits, Bits) {
    (p.x_mask(), p.z_mask())
}

/// Backward sweep; returns which gates survive and the cone.
fn sweep(gates: &[Gate], core: &PauliString) -> (Vec<bool>, Bits) {
    let mut keep = vec![false; gates.len()];
    let mut cone = core.support_bits();
    let mut tracked = Tracked::Branches(vec![core.unsigned()]);
    for (pos, gate) in gates.iter().enumerate().rev() {
        let gate_bits = gate.support_bits();
        match &mut tracked {
            Tracked::Support(sup) => {
                if !(*sup & gate_bits).is_zero() {
                    keep[pos] = true;
                    *sup = *sup | gate_bits;
                }
            }
            Tracked::Branches(branches) => match gate {
                Gate::Clifford(g) => {
                    let images: Vec<PauliString> = branches.iter().map(|b| g.conjugate_unchecked(b)).collect();
                    if images.iter().zip(branches.iter()).any(|(im, b)| im != b) {
                        keep[pos] = true;
                        let mut seen = HashSet::new();
                        *branches = images
                            .into_iter()
                            .map(|p| p.unsigned())
                            .filter(|p| seen.insert(branch_key(p)))
                            .collect();
                    }
                }
                Gate::Rotation(r) => {
                    let q = r.generator();
                    let mut seen: HashSet<(Bits, Bits)> = branches.iter().map(branch_key).collect();
                    let mut grown = Vec::new();
                    for b in branches.iter() {
                        if !q.commutes_unchecked(b) {
                            let qb = q.mul_unchecked(b).unsigned();
                            if seen.insert(branch_key(&qb)) {
                                grown.push(qb);
                            }
                            keep[pos] = true;
                        }
                    }
                    branches.extend(grown);
                }
            },
        }
        if keep[pos] {
            cone = cone | gate_bits;
            if let Tracked::Branches(branches) = &tracked {
                if branches.len() > BRANCH_CAP {
                    let sup = branches.iter().fold(cone, |acc, b| acc | b.support_bits());
                    tracked = Tracked::Support(sup);
                }
            }
        }
    }
    (keep, cone)
}

/// Light-cone of `U† p U` for the whole circuit.
pub fn lightcone(circuit: &Circuit, p: &PauliString) -> Result<LightCone> {
    if p.n_qubits() != circuit.n_qubits() {
        return Err(Error::SizeMismatch(circuit.n_qubits(), p.n_qubits()));
    }
    Ok(LightCone::from_bits(&sweep(circuit.gates(), p).1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BowtieKind {
    Beta,
    Gamma,
}

/// Reduced subcircuit for one derivative or Hamiltonian term.
///
/// The bowtie state is `S† core S |0…0⟩` on the cone, where `S` is the kept
/// gate list `gates` (application order, local qubit indices). For a β bowtie
/// the state also carries the factor `-i` of the derivative generator.
#[derive(Clone, Debug)]
pub struct Bowtie {
    kind: BowtieKind,
    index: usize,
    position: Option<usize>,
    core: PauliString,
    local_core: PauliString,
    cone: LightCone,
    gates: Vec<Gate>,
}

impl Bowtie {
    pub fn kind(&self) -> BowtieKind {
        self.kind
    }

    /// Parameter index (β) or Hamiltonian term index (γ).
    pub fn index(&self) -> usize {
        self.index
    }

    /// Gate position of the differentiated rotation (β only).
    pub fn position(&self) -> Option<usize> {
        self.position
    }

    pub fn core(&self) -> &PauliString {
        &self.core
    }

    /// Core restricted to the cone, in local indices.
    pub fn local_core(&self) -> &PauliString {
        &self.local_core
    }

    pub fn cone(&self) -> &LightCone {
        &self.cone
    }

    /// Kept gates in application order, acting on local cone indices.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Kept gates as a circuit on the cone qubits.
    pub fn subcircuit(&self) -> Circuit {
        let mut c = Circuit::new(self.cone.len());
        for g in &self.gates {
            c.push(*g).expect("bowtie gates fit the cone");
        }
        c
    }

    /// Gate count of the conjugated operator, counting the core: `2·kept + 1`.
    pub fn gate_count(&self) -> usize {
        2 * self.gates.len() + 1
    }
}

fn make_bowtie(
    kind: BowtieKind,
    index: usize,
    position: Option<usize>,
    gates: &[Gate],
    core: &PauliString,
) -> Bowtie {
    let (keep, cone_bits) = sweep(gates, core);
    let cone = LightCone::from_bits(&cone_bits);
    let n_local = cone.len();
    let kept = gates
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(g, _)| g.remap(cone.qubits(), n_local))
        .collect();
    Bowtie {
        kind,
        index,
        position,
        core: *core,
        local_core: core.restrict(cone.qubits()),
        cone,
        gates: kept,
    }
}

/// β bowties for parameter `i`, one per rotation carrying it.
pub fn build_beta_bowties(circuit: &Circuit, i: usize) -> Result<Vec<Bowtie>> {
    if i >= circuit.n_params() {
        return Err(Error::InvalidParameter(i));
    }
    let mut out = Vec::new();
    for (pos, g) in circuit.gates().iter().enumerate() {
        if g.param_index() == Some(i) {
            let Gate::Rotation(r) = g else { unreachable!() };
            out.push(make_bowtie(BowtieKind::Beta, i, Some(pos), &circuit.gates()[..pos], r.generator()));
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter(i));
    }
    Ok(out)
}

/// β bowtie for the first rotation carrying parameter `i`.
pub fn build_beta_bowtie(circuit: &Circuit, i: usize) -> Result<Bowtie> {
    Ok(build_beta_bowties(circuit, i)?.swap_remove(0))
}

/// γ bowtie `U† h_j U` for term `j`.
pub fn build_gamma_bowtie(circuit: &Circuit, j: usize, h_j: &PauliString) -> Result<Bowtie> {
    if h_j.n_qubits() != circuit.n_qubits() {
        return Err(Error::SizeMismatch(circuit.n_qubits(), h_j.n_qubits()));
    }
    Ok(make_bowtie(BowtieKind::Gamma, j, None, circuit.gates(), h_j))
}

/// Largest β or γ cone over all parameter occurrences and the given observables.
pub fn max_lightcone(circuit: &Circuit, observables: &[PauliString]) -> Result<usize> {
    let gates = circuit.gates();
    let beta = gates
        .par_iter()
        .enumerate()
        .filter_map(|(pos, g)| match g {
            Gate::Rotation(r) if g.param_index().is_some() => Some(sweep(&gates[..pos], r.generator()).1.count_ones()),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut gamma = 0;
    for p in observables {
        if p.n_qubits() != circuit.n_qubits() {
            return Err(Error::SizeMismatch(circuit.n_qubits(), p.n_qubits()));
        }
    }
    if !observables.is_empty() {
        gamma = observables
            .par_iter()
            .map(|p| sweep(gates, p).1.count_ones())
            .max()
            .unwrap_or(0);
    }
    Ok(beta.max(gamma) as usize)
}

/// Every bowtie of a circuit/Hamiltonian pair plus the contraction plans of all
/// pairs whose cones intersect.
#[derive(Clone, Debug)]
pub struct BowtieSet {
    n_qubits: usize,
    n_params: usize,
    betas: Vec<Bowtie>,
    /// `param_betas[i]` lists the β bowties (indices into `betas`) of parameter `i`.
    param_betas: Vec<Vec<usize>>,
    gammas: Vec<Bowtie>,
    /// Plans between β occurrences `(a, b)` with `a ≤ b`.
    beta_beta: Vec<ContractionPlan>,
    /// Plans between β occurrence `a` and γ term `b`.
    beta_gamma: Vec<ContractionPlan>,
    /// Plans between γ terms `(a, b)` with `a ≤ b`.
    gamma_gamma: Vec<ContractionPlan>,
}

/// Pre-computes all bowties (in parallel) and the plans of intersecting pairs.
pub fn precompute_all<T: Scalar>(circuit: &Circuit, h: &WeightedPauliSum<T>) -> Result<BowtieSet> {
    if h.n_qubits() != circuit.n_qubits() {
        return Err(Error::SizeMismatch(circuit.n_qubits(), h.n_qubits()));
    }
    circuit.validate()?;
    let gates = circuit.gates();
    let occurrences: Vec<(usize, usize)> = gates
        .iter()
        .enumerate()
        .filter_map(|(pos, g)| g.param_index().map(|i| (i, pos)))
        .collect();
    let mut betas: Vec<Bowtie> = occurrences
        .par_iter()
        .map(|&(i, pos)| {
            let Gate::Rotation(r) = &gates[pos] else { unreachable!() };
            make_bowtie(BowtieKind::Beta, i, Some(pos), &gates[..pos], r.generator())
        })
        .collect();
    betas.sort_by_key(|b| (b.index, b.position));
    let mut param_betas = vec![Vec::new(); circuit.n_params()];
    for (k, b) in betas.iter().enumerate() {
        param_betas[b.index].push(k);
    }
    let gammas: Vec<Bowtie> = h
        .terms()
        .par_iter()
        .enumerate()
        .map(|(j, (_, p))| make_bowtie(BowtieKind::Gamma, j, None, gates, &p.unsigned()))
        .collect();

    let beta_beta = pair_plans(&betas, &betas, true);
    let beta_gamma = pair_plans(&betas, &gammas, false);
    let gamma_gamma = pair_plans(&gammas, &gammas, true);
    Ok(BowtieSet {
        n_qubits: circuit.n_qubits(),
        n_params: circuit.n_params(),
        betas,
        param_betas,
        gammas,
        beta_beta,
        beta_gamma,
        gamma_gamma,
    })
}

fn pair_plans(left: &[Bowtie], right: &[Bowtie], upper: bool) -> Vec<ContractionPlan> {
    let right_bits: Vec<Bits> = right.iter().map(|b| b.cone().bits()).collect();
    left.par_iter()
        .enumerate()
        .flat_map_iter(|(a, ba)| {
            let abits = ba.cone().bits();
            let start = if upper { a } else { 0 };
            let right_bits = &right_bits;
            (start..right.len()).filter_map(move |b| {
                if (abits & right_bits[b]).is_zero() {
                    None
                } else {
                    Some(ContractionPlan::new(a, ba.cone(), b, right[b].cone()))
                }
            })
        })
        .collect()
}

impl BowtieSet {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn betas(&self) -> &[Bowtie] {
        &self.betas
    }

    pub fn gammas(&self) -> &[Bowtie] {
        &self.gammas
    }

    pub fn param_betas(&self) -> &[Vec<usize>] {
        &self.param_betas
    }

    pub fn beta_beta_plans(&self) -> &[ContractionPlan] {
        &self.beta_beta
    }

    pub fn beta_gamma_plans(&self) -> &[ContractionPlan] {
        &self.beta_gamma
    }

    pub fn gamma_gamma_plans(&self) -> &[ContractionPlan] {
        &self.gamma_gamma
    }

    pub fn all(&self) -> impl Iterator<Item = &Bowtie> {
        self.betas.iter().chain(self.gammas.iter())
    }

    pub fn max_cone(&self) -> usize {
        self.all().map(|b| b.cone().len()).max().unwrap_or(0)
    }

    /// `counts[s]` = number of bowties whose cone has `s` qubits.
    pub fn cone_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.max_cone() + 1];
        for b in self.all() {
            h[b.cone().len()] += 1;
        }
        h
    }

    /// Fraction of pairs among the β/γ bowties (unordered, with self-pairs)
    /// whose cones intersect.
    pub fn intersecting_fraction(&self) -> f64 {
        let nb = self.betas.len();
        let ng = self.gammas.len();
        let total = nb * (nb + 1) / 2 + nb * ng + ng * (ng + 1) / 2;
        if total == 0 {
            return 0.0;
        }
        let hit = self.beta_beta.len() + self.beta_gamma.len() + self.gamma_gamma.len();
        hit as f64 / total as f64
    }

    /// Per-bowtie summary for dumping.
    pub fn inventory(&self) -> Vec<BowtieRecord> {
        self.all()
            .map(|b| BowtieRecord {
                kind: b.kind(),
                index: b.index(),
                position: b.position(),
                cone: b.cone().qubits().to_vec(),
                gates: b.gates().len(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BowtieRecord {
    pub kind: BowtieKind,
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
    pub cone: Vec<usize>,
    pub gates: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Angle, CliffordKind};

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn commuting_rotation_does_not_spread() {
        let mut c = Circuit::new(1);
        c.param_rotation(ps("Z")).unwrap();
        assert_eq!(lightcone(&c, &ps("Z")).unwrap().qubits(), &[0]);
    }

    #[test]
    fn commuting_everything_gives_support() {
        let mut c = Circuit::new(3);
        c.param_rotation(ps("ZZI")).unwrap();
        c.clifford(CliffordKind::S, &[1]).unwrap();
        c.param_rotation(ps("IIZ")).unwrap();
        let cone = lightcone(&c, &ps("IZI")).unwrap();
        assert_eq!(cone.qubits(), &[1]);
    }

    #[test]
    fn anticommuting_rotation_spreads() {
        let mut c = Circuit::new(3);
        c.param_rotation(ps("IXX")).unwrap();
        c.param_rotation(ps("XXI")).unwrap();
        // Z1 anticommutes with XX on (1,2), whose branch then meets XX on (0,1)
        let cone = lightcone(&c, &ps("IZI")).unwrap();
        assert_eq!(cone.qubits(), &[0, 1, 2]);
        let cone = lightcone(&c, &ps("ZII")).unwrap();
        assert_eq!(cone.qubits(), &[1, 2]);
    }

    #[test]
    fn cancelling_cliffords_are_tracked_exactly() {
        let mut c = Circuit::new(2);
        c.clifford(CliffordKind::CX, &[0, 1]).unwrap();
        c.rotation(ps("ZI"), Angle::Param(0)).unwrap();
        // Z on the control passes through CX untouched
        let cone = lightcone(&c, &ps("IZ")).unwrap();
        assert_eq!(cone.qubits(), &[0]);
    }

    #[test]
    fn first_rotation_beta_has_only_the_core() {
        let mut c = Circuit::new(3);
        c.param_rotation(ps("IXX")).unwrap();
        c.param_rotation(ps("ZII")).unwrap();
        c.param_rotation(ps("IZI")).unwrap();
        let b = build_beta_bowtie(&c, 0).unwrap();
        assert_eq!(b.cone().qubits(), &[0, 1]);
        assert!(b.gates().is_empty());
        let b = build_beta_bowtie(&c, 1).unwrap();
        assert_eq!(b.cone().qubits(), &[2]);
        assert!(b.gates().is_empty());
        let b = build_beta_bowtie(&c, 2).unwrap();
        assert_eq!(b.cone().qubits(), &[0, 1]);
        assert_eq!(b.gates().len(), 1);
        assert_eq!(build_beta_bowtie(&c, 3).unwrap_err(), Error::InvalidParameter(3));
    }

    #[test]
    fn gamma_of_identity_circuit_is_support() {
        let c = Circuit::new(4);
        let b = build_gamma_bowtie(&c, 0, &ps("XIZI")).unwrap();
        assert_eq!(b.cone().qubits(), &[1, 3]);
        assert_eq!(b.local_core().letters(), "XZ");
    }

    #[test]
    fn small_set_counts() {
        let mut c = Circuit::new(1);
        c.param_rotation(ps("Y")).unwrap();
        let h = WeightedPauliSum::new(1, [(1.0, ps("Z"))]).unwrap();
        let set = precompute_all(&c, &h).unwrap();
        assert_eq!(set.betas().len() + set.gammas().len(), 2);
        assert_eq!(set.beta_beta_plans().len(), 1);
        assert_eq!(set.beta_gamma_plans().len(), 1);
        assert_eq!(set.gamma_gamma_plans().len(), 1);
        assert_eq!(set.intersecting_fraction(), 1.0);
    }

    #[test]
    fn shared_parameters_give_one_beta_per_occurrence() {
        let mut c = Circuit::new(2);
        c.rotation(ps("XI"), Angle::Param(0)).unwrap();
        c.rotation(ps("IX"), Angle::Param(0)).unwrap();
        let h = WeightedPauliSum::new(2, [(1.0, ps("ZZ"))]).unwrap();
        let set = precompute_all(&c, &h).unwrap();
        assert_eq!(set.param_betas(), &[vec![0, 1]]);
    }
}
