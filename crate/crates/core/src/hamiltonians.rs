//! Model Hamiltonians as weighted Pauli sums.
//!
//! Disorder coefficients are drawn from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, three draws per edge in sorted `(min, max)` order. Each
//! draw maps a `u64` to `2·u − 1` with `u = (x >> 11)·2⁻⁵³`, so the stream is
//! fixed by the seed alone.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::pauli::{Pauli, PauliString, WeightedPauliSum};

fn two_site(n: usize, a: usize, b: usize, op: Pauli) -> Result<PauliString> {
    PauliString::from_sparse(n, &[(a, op), (b, op)])
}

/// `J Σ_⟨ij⟩ (XX + YY + ZZ)` over the lattice edges.
pub fn heisenberg(lat: &Lattice, j: f64) -> Result<WeightedPauliSum<f64>> {
    let n = lat.n_sites();
    let mut h = WeightedPauliSum::empty(n);
    for &(a, b) in lat.edges() {
        for op in [Pauli::X, Pauli::Y, Pauli::Z] {
            h.push(j, two_site(n, a, b, op)?)?;
        }
    }
    Ok(h)
}

/// Open Heisenberg chain `Σ_i (X_iX_{i+1} + Y_iY_{i+1} + Z_iZ_{i+1})`.
pub fn heisenberg_chain(n: usize) -> Result<WeightedPauliSum<f64>> {
    if n < 2 {
        return Err(Error::InvalidLattice("chain needs at least 2 sites".into()));
    }
    heisenberg(&Lattice::chain(n)?, 1.0)
}

/// Transverse-field Ising model `Σ_⟨ij⟩ Z_iZ_j + Σ_i X_i`.
pub fn tfim(lat: &Lattice) -> Result<WeightedPauliSum<f64>> {
    let n = lat.n_sites();
    let mut h = WeightedPauliSum::empty(n);
    for &(a, b) in lat.edges() {
        h.push(1.0, two_site(n, a, b, Pauli::Z)?)?;
    }
    for q in 0..n {
        h.push(1.0, PauliString::single(n, q, Pauli::X)?)?;
    }
    Ok(h)
}

/// Per-edge `(α, β, γ)` disorder draws, uniform on `[−1, 1]`.
pub fn disorder(lat: &Lattice, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || ((rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)) * 2.0 - 1.0;
    // lattice edges are already sorted (min, max) pairs
    lat.edges().iter().map(|_| [draw(), draw(), draw()]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `+Σ(XX + YY + ZZ)` on the lattice edges.
    Heisenberg1d,
    /// `−Σ(XX + YY + ZZ) + c_field ΣZ + c_random Σ(αXX + βYY + γZZ)`.
    Heavyhex,
    /// `ΣZZ + ΣX`.
    Ising,
}

/// Model description; `c_field`, `c_random` and the seed only enter the heavy-hex family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub lattice: Lattice,
    pub family: Family,
    #[serde(default)]
    pub c_field: f64,
    #[serde(default)]
    pub c_random: f64,
    #[serde(default)]
    pub disorder_seed: u64,
}

/// Heisenberg model with a uniform field and bond disorder, overall sign as
/// `−Σ(XX + YY + ZZ)`.
pub fn heavyhex_model(spec: &ModelSpec) -> Result<WeightedPauliSum<f64>> {
    if !spec.c_field.is_finite() || !spec.c_random.is_finite() {
        return Err(Error::NonFinite("model coefficient".into()));
    }
    let lat = &spec.lattice;
    let n = lat.n_sites();
    let mut h = heisenberg(lat, -1.0)?;
    if spec.c_field != 0.0 {
        for q in 0..n {
            h.push(spec.c_field, PauliString::single(n, q, Pauli::Z)?)?;
        }
    }
    if spec.c_random != 0.0 {
        for (&(a, b), w) in lat.edges().iter().zip(disorder(lat, spec.disorder_seed)) {
            for (op, x) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().zip(w) {
                h.push(spec.c_random * x, two_site(n, a, b, op)?)?;
            }
        }
    }
    Ok(h)
}

/// Builds the Hamiltonian of any family.
pub fn build_model(spec: &ModelSpec) -> Result<WeightedPauliSum<f64>> {
    match spec.family {
        Family::Heavyhex => heavyhex_model(spec),
        Family::Heisenberg1d | Family::Ising => {
            if spec.c_field != 0.0 || spec.c_random != 0.0 {
                return Err(Error::InvalidLattice(format!(
                    "c_field/c_random are only defined for the heavyhex family, got {:?}",
                    spec.family
                )));
            }
            match spec.family {
                Family::Heisenberg1d => heisenberg(&spec.lattice, 1.0),
                _ => tfim(&spec.lattice),
            }
        }
    }
}

/// One entry of a flat term list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coefficient: f64,
    pub pauli: PauliString,
}

pub fn term_list(h: &WeightedPauliSum<f64>) -> Vec<TermRecord> {
    h.terms()
        .iter()
        .map(|(c, p)| TermRecord {
            coefficient: *c,
            pauli: *p,
        })
        .collect()
}

pub fn from_term_list(n_qubits: usize, terms: &[TermRecord]) -> Result<WeightedPauliSum<f64>> {
    WeightedPauliSum::new(n_qubits, terms.iter().map(|t| (t.coefficient, t.pauli)))
}

/// `QUBITS n` followed by one `coefficient LABEL` line per term.
pub fn sum_to_text(h: &WeightedPauliSum<f64>) -> String {
    let mut s = format!("QUBITS {}\n", h.n_qubits());
    for (c, p) in h.terms() {
        s.push_str(&format!("{c:e} {}\n", p.letters()));
    }
    s
}

/// Parses [`sum_to_text`] output; `#` starts a comment.
pub fn sum_from_text(text: &str) -> Result<WeightedPauliSum<f64>> {
    let mut h: Option<WeightedPauliSum<f64>> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: k + 1, msg };
        let mut it = line.split_whitespace();
        let (a, b) = (it.next().unwrap_or(""), it.next());
        if it.next().is_some() {
            return Err(err("expected two fields".into()));
        }
        match (&mut h, a, b) {
            (None, "QUBITS", Some(n)) => {
                let n: usize = n.parse().map_err(|e| err(format!("{e}")))?;
                h = Some(WeightedPauliSum::empty(n));
            }
            (None, ..) => return Err(err("missing QUBITS header".into())),
            (Some(sum), c, Some(label)) => {
                let c: f64 = c.parse().map_err(|e| err(format!("coefficient: {e}")))?;
                let p: PauliString = label.parse().map_err(|e: Error| err(e.to_string()))?;
                if p.n_qubits() != sum.n_qubits() {
                    return Err(err(format!("label {label} has {} qubits", p.n_qubits())));
                }
                if !p.phase().is_real() || p.phase() != crate::pauli::Phase::PlusOne {
                    return Err(err("labels carry no phase; put the sign in the coefficient".into()));
                }
                sum.push(c, p).map_err(|e| err(e.to_string()))?;
            }
            (Some(_), _, None) => return Err(err("expected `coefficient LABEL`".into())),
        }
    }
    h.ok_or(Error::Parse {
        line: 0,
        msg: "empty model file".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::heavyhex_with_sites;

    #[test]
    fn two_site_heisenberg() {
        let h = heisenberg_chain(2).unwrap();
        let labels: Vec<String> = h.paulis().iter().map(|p| p.to_string()).collect();
        assert_eq!(labels, vec!["XX", "YY", "ZZ"]);
        assert!(h.coefficients().iter().all(|&c| c == 1.0));
        assert_eq!(heisenberg_chain(3).unwrap().len(), 6);
    }

    #[test]
    fn tfim_terms() {
        let lat = Lattice::chain(2).unwrap();
        let h = tfim(&lat).unwrap();
        let labels: Vec<String> = h.paulis().iter().map(|p| p.to_string()).collect();
        assert_eq!(labels, vec!["ZZ", "IX", "XI"]);
        let lat = heavyhex_with_sites(12).unwrap();
        assert_eq!(tfim(&lat).unwrap().len(), lat.edges().len() + 12);
    }

    #[test]
    fn clean_heavyhex_term_count() {
        let lat = heavyhex_with_sites(12).unwrap();
        let spec = ModelSpec {
            lattice: lat.clone(),
            family: Family::Heavyhex,
            c_field: 0.0,
            c_random: 0.0,
            disorder_seed: 0,
        };
        assert_eq!(heavyhex_model(&spec).unwrap().len(), 3 * lat.edges().len());
    }

    #[test]
    fn disorder_is_reproducible_and_bounded() {
        let lat = heavyhex_with_sites(18).unwrap();
        let a = disorder(&lat, 11);
        assert_eq!(a, disorder(&lat, 11));
        assert_ne!(a, disorder(&lat, 12));
        assert!(a.iter().flatten().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn disorder_stream_is_pinned() {
        let lat = Lattice::chain(2).unwrap();
        let w = disorder(&lat, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let first = ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0;
        assert_eq!(w[0][0], first);
    }

    #[test]
    fn field_only_for_heavyhex() {
        let spec = ModelSpec {
            lattice: Lattice::chain(3).unwrap(),
            family: Family::Ising,
            c_field: 0.1,
            c_random: 0.0,
            disorder_seed: 0,
        };
        assert!(build_model(&spec).is_err());
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let spec = ModelSpec {
            lattice: heavyhex_with_sites(12).unwrap(),
            family: Family::Heavyhex,
            c_field: -0.1,
            c_random: 0.15,
            disorder_seed: 5,
        };
        let h = heavyhex_model(&spec).unwrap();
        assert_eq!(sum_from_text(&sum_to_text(&h)).unwrap(), h);
        assert!(matches!(sum_from_text("1.0 XX"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(sum_from_text("QUBITS 2\n1.0 XXX"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(sum_from_text("QUBITS 2\n# c\nabc XX"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn term_list_roundtrip() {
        let h = heisenberg_chain(4).unwrap();
        let json = serde_json::to_string(&term_list(&h)).unwrap();
        let back: Vec<TermRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(from_term_list(4, &back).unwrap(), h);
    }
}
