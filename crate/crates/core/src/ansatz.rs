//! Ansatz and product-formula circuit builders.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::lattice::{color_edges, EdgeColoring, Lattice};
use crate::lightcone::max_lightcone;
use crate::pauli::{Angle, CliffordKind, Pauli, PauliString, WeightedPauliSum};
use crate::scalar::Scalar;

/// Product state prepared by a Clifford prefix before the parameterized layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    #[default]
    Zero,
    /// `|0101…⟩` with an `X` on every odd site.
    Neel,
}

fn push_reference(c: &mut Circuit, reference: Reference) -> Result<()> {
    if reference == Reference::Neel {
        for q in (1..c.n_qubits()).step_by(2) {
            c.clifford(CliffordKind::X, &[q])?;
        }
    }
    Ok(())
}

/// Terms of a nearest-neighbour chain model split into bonds and sites.
struct ChainTerms {
    /// `bonds[i]` holds the generators acting on `(i, i+1)`, in model order.
    bonds: Vec<Vec<PauliString>>,
    sites: Vec<PauliString>,
}

fn split_chain_terms<T: Scalar>(n: usize, model: &WeightedPauliSum<T>) -> Result<ChainTerms> {
    if model.n_qubits() != n {
        return Err(Error::SizeMismatch(n, model.n_qubits()));
    }
    let mut bonds = vec![Vec::new(); n - 1];
    let mut sites = Vec::new();
    for (_, p) in model.terms() {
        let sup = p.support();
        match sup.as_slice() {
            [_] => sites.push(p.unsigned()),
            [a, b] if b - a == 1 => bonds[*a].push(p.unsigned()),
            _ => return Err(Error::NotNearestNeighbour(p.to_string())),
        }
    }
    Ok(ChainTerms { bonds, sites })
}

/// Brickwork Hamiltonian variational ansatz on an open chain.
///
/// Each layer applies every bond starting on an even site, then every bond
/// starting on an odd site, then the single-site terms; each rotation gets
/// its own parameter.
pub fn build_chain_hva<T: Scalar>(n: usize, layers: usize, model: &WeightedPauliSum<T>) -> Result<Circuit> {
    build_chain_hva_from(n, layers, model, Reference::Zero)
}

/// [`build_chain_hva`] on top of a reference-state prefix.
pub fn build_chain_hva_from<T: Scalar>(
    n: usize,
    layers: usize,
    model: &WeightedPauliSum<T>,
    reference: Reference,
) -> Result<Circuit> {
    if n < 2 || layers == 0 {
        return Err(Error::InvalidCircuit("chain HVA needs n >= 2 and layers >= 1".into()));
    }
    let terms = split_chain_terms(n, model)?;
    let mut c = Circuit::new(n);
    push_reference(&mut c, reference)?;
    for _ in 0..layers {
        for start in [0, 1] {
            for bond in (start..n - 1).step_by(2) {
                for p in &terms.bonds[bond] {
                    c.param_rotation(*p)?;
                }
            }
        }
        for p in &terms.sites {
            c.param_rotation(*p)?;
        }
    }
    c.validate()?;
    Ok(c)
}

/// Second-order product formula for `e^{-iHt}` on the given schedule.
///
/// Terms are grouped by the colour class of their edge, with single-site
/// terms as an extra innermost group. One step of size `dt = t/layers` is the
/// palindrome `G₀(dt/2) … G_{k-2}(dt/2) G_{k-1}(dt) G_{k-2}(dt/2) … G₀(dt/2)`.
pub fn build_trotter2<T: Scalar>(
    h: &WeightedPauliSum<T>,
    t: f64,
    layers: usize,
    schedule: &EdgeColoring,
) -> Result<Circuit> {
    build_trotter2_from(h, t, layers, schedule, Reference::Zero)
}

/// [`build_trotter2`] on top of a reference-state prefix.
pub fn build_trotter2_from<T: Scalar>(
    h: &WeightedPauliSum<T>,
    t: f64,
    layers: usize,
    schedule: &EdgeColoring,
    reference: Reference,
) -> Result<Circuit> {
    if layers == 0 {
        return Err(Error::InvalidCircuit("trotter needs layers >= 1".into()));
    }
    let groups = trotter_groups(h, schedule)?;
    let dt = t / layers as f64;
    let mut c = Circuit::new(h.n_qubits());
    push_reference(&mut c, reference)?;
    let last = groups.len().saturating_sub(1);
    for _ in 0..layers {
        for (k, g) in groups.iter().enumerate() {
            let f = if k == last { 1.0 } else { 0.5 };
            push_group(&mut c, g, f * dt)?;
        }
        for g in groups[..last].iter().rev() {
            push_group(&mut c, g, 0.5 * dt)?;
        }
    }
    Ok(c)
}

fn push_group(c: &mut Circuit, group: &[(f64, PauliString)], tau: f64) -> Result<()> {
    for (coef, p) in group {
        c.rotation(*p, Angle::Fixed(coef * tau))?;
    }
    Ok(())
}

/// Non-empty term groups in schedule order, single-site terms last.
fn trotter_groups<T: Scalar>(h: &WeightedPauliSum<T>, schedule: &EdgeColoring) -> Result<Vec<Vec<(f64, PauliString)>>> {
    let mut groups = vec![Vec::new(); schedule.n_classes() + 1];
    let site_group = schedule.n_classes();
    for (coef, p) in h.terms() {
        // stored phases are +1 or +i; a +i phase cannot occur in a Hermitian sum
        if !p.phase().is_real() {
            return Err(Error::InvalidGenerator);
        }
        let coef = coef.to_f64_lossless();
        let sup = p.support();
        let slot = match sup.as_slice() {
            [_] => site_group,
            [a, b] => schedule
                .class_of(*a, *b)
                .ok_or_else(|| Error::TermNotScheduled(p.to_string()))?,
            _ => return Err(Error::TermNotScheduled(p.to_string())),
        };
        groups[slot].push((coef, p.unsigned()));
    }
    Ok(groups.into_iter().filter(|g| !g.is_empty()).collect())
}

/// Heavy-hex ansatz: for every class in `sequence`, a seven-parameter block
/// `Ry(a) Ry(b) Rz(a) Rz(b) Rxx Ryy Rzz` on each edge of that class, then an
/// optional final `Ry` on every qubit.
pub fn build_heavyhex_ansatz(
    lat: &Lattice,
    coloring: &EdgeColoring,
    sequence: &[usize],
    with_final_ry: bool,
) -> Result<Circuit> {
    let n = lat.n_sites();
    let mut c = Circuit::new(n);
    for &label in sequence {
        let class = coloring.classes().get(label).ok_or(Error::InvalidClassLabel(label))?;
        for &(a, b) in class {
            if !lat.has_edge(a, b) {
                return Err(Error::InvalidLattice(format!("coloured edge ({a},{b}) not in lattice")));
            }
            c.param_rotation(PauliString::single(n, a, Pauli::Y)?)?;
            c.param_rotation(PauliString::single(n, b, Pauli::Y)?)?;
            c.param_rotation(PauliString::single(n, a, Pauli::Z)?)?;
            c.param_rotation(PauliString::single(n, b, Pauli::Z)?)?;
            for op in [Pauli::X, Pauli::Y, Pauli::Z] {
                c.param_rotation(PauliString::from_sparse(n, &[(a, op), (b, op)])?)?;
            }
        }
    }
    if with_final_ry {
        for q in 0..n {
            c.param_rotation(PauliString::single(n, q, Pauli::Y)?)?;
        }
    }
    c.validate()?;
    Ok(c)
}

/// The class sequence `G B O B G B O`.
pub const DEFAULT_SEQUENCE: [usize; 7] = [0, 1, 2, 1, 0, 1, 2];

/// Settings for [`optimize_schedule`].
#[derive(Clone, Debug)]
pub struct ScheduleConfig {
    pub classes: usize,
    pub sequence: Vec<usize>,
    pub with_final_ry: bool,
    /// Observables whose cones enter the objective alongside the parameter cones.
    pub observables: Vec<PauliString>,
}

impl ScheduleConfig {
    /// Default heavy-hex settings with the Hamiltonian's terms as observables.
    pub fn heavyhex<T: Scalar>(h: &WeightedPauliSum<T>) -> Self {
        ScheduleConfig {
            classes: 3,
            sequence: DEFAULT_SEQUENCE.to_vec(),
            with_final_ry: false,
            observables: h.paulis(),
        }
    }
}

/// Result of a schedule search.
#[derive(Clone, Debug)]
pub struct ScheduleChoice {
    pub coloring: EdgeColoring,
    pub max_lightcone: usize,
    /// `(seed, objective)` for every seed tried, in input order.
    pub scores: Vec<(u64, usize)>,
}

/// Colours the lattice once per seed and keeps the colouring whose ansatz has
/// the smallest largest light-cone; ties go to the lowest seed.
pub fn optimize_schedule(lat: &Lattice, seeds: &[u64], config: &ScheduleConfig) -> Result<ScheduleChoice> {
    if seeds.is_empty() {
        return Err(Error::Empty("seed list".into()));
    }
    let mut best: Option<(usize, u64, EdgeColoring)> = None;
    let mut scores = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let coloring = color_edges(lat, config.classes, seed)?;
        let circuit = build_heavyhex_ansatz(lat, &coloring, &config.sequence, config.with_final_ry)?;
        let score = max_lightcone(&circuit, &config.observables)?;
        scores.push((seed, score));
        let better = match &best {
            None => true,
            Some((s, bs, _)) => score < *s || (score == *s && seed < *bs),
        };
        if better {
            best = Some((score, seed, coloring));
        }
    }
    let (max_lightcone, _, coloring) = best.expect("at least one seed");
    Ok(ScheduleChoice {
        coloring,
        max_lightcone,
        scores,
    })
}
