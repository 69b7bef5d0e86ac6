//! Parameterized circuits of Clifford gates and Pauli rotations.
//!
//! Gates are stored in application order: `gates[0]` acts first on `|0…0⟩`.
//! Rotations use `R_P(θ) = e^{-iPθ}` throughout.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::{Angle, Bits, CliffordGate, CliffordKind, Pauli, PauliRotation, PauliString};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Clifford(CliffordGate),
    Rotation(PauliRotation),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Clifford(g) => g.qubits().to_vec(),
            Gate::Rotation(r) => r.generator().support(),
        }
    }

    pub fn support_bits(&self) -> Bits {
        match self {
            Gate::Clifford(g) => {
                let mut b = Bits::zero();
                for &q in g.qubits() {
                    b.set(q, true);
                }
                b
            }
            Gate::Rotation(r) => r.generator().support_bits(),
        }
    }

    pub fn param_index(&self) -> Option<usize> {
        match self {
            Gate::Rotation(r) => match r.angle() {
                Angle::Param(i) => Some(i),
                Angle::Fixed(_) => None,
            },
            Gate::Clifford(_) => None,
        }
    }

    /// Same gate re-indexed onto a sub-register; `local[q]` is the new index of qubit `q`.
    pub(crate) fn remap(&self, map: &[usize], n_local: usize) -> Gate {
        match self {
            Gate::Clifford(g) => {
                let qs: Vec<usize> = g.qubits().iter().map(|&q| local_index(map, q)).collect();
                Gate::Clifford(CliffordGate::new(g.kind(), &qs).expect("remap keeps arity"))
            }
            Gate::Rotation(r) => {
                let mut x = Bits::zero();
                let mut z = Bits::zero();
                let g = r.generator();
                for q in g.support() {
                    let l = local_index(map, q);
                    x.set(l, g.x_mask().get(q));
                    z.set(l, g.z_mask().get(q));
                }
                let gen = PauliString::from_masks(n_local, x, z, g.phase()).expect("remap in range");
                Gate::Rotation(PauliRotation::new(gen, r.angle()).expect("remap keeps generator"))
            }
        }
    }
}

fn local_index(map: &[usize], q: usize) -> usize {
    map.binary_search(&q).expect("qubit inside cone")
}

/// Ordered gate list on `n_qubits` qubits with `n_params` free parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            n_params: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Allocates a fresh parameter index.
    pub fn new_param(&mut self) -> usize {
        self.n_params += 1;
        self.n_params - 1
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        for q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        if let Gate::Rotation(r) = &gate {
            if r.generator().n_qubits() != self.n_qubits {
                return Err(Error::SizeMismatch(self.n_qubits, r.generator().n_qubits()));
            }
        }
        if let Some(i) = gate.param_index() {
            self.n_params = self.n_params.max(i + 1);
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn clifford(&mut self, kind: CliffordKind, qubits: &[usize]) -> Result<()> {
        self.push(Gate::Clifford(CliffordGate::new(kind, qubits)?))
    }

    pub fn rotation(&mut self, generator: PauliString, angle: Angle) -> Result<()> {
        self.push(Gate::Rotation(PauliRotation::new(generator, angle)?))
    }

    /// Rotation about `generator` with a freshly allocated parameter; returns its index.
    pub fn param_rotation(&mut self, generator: PauliString) -> Result<usize> {
        let i = self.n_params;
        self.rotation(generator, Angle::Param(i))?;
        Ok(i)
    }

    /// Standard single-qubit rotation `R_σ(φ) = e^{-iφσ/2}` with a fixed angle.
    pub fn standard_rotation(&mut self, axis: Pauli, q: usize, phi: f64) -> Result<()> {
        let g = PauliString::single(self.n_qubits, q, axis)?;
        self.rotation(g, Angle::Fixed(crate::pauli::half_angle_to_circuit(phi)))
    }

    /// Standard two-qubit rotation `R_{σσ}(φ) = e^{-iφ σ⊗σ/2}` with a fixed angle.
    pub fn standard_rotation2(&mut self, axis: Pauli, a: usize, b: usize, phi: f64) -> Result<()> {
        let g = PauliString::from_sparse(self.n_qubits, &[(a, axis), (b, axis)])?;
        self.rotation(g, Angle::Fixed(crate::pauli::half_angle_to_circuit(phi)))
    }

    /// Appends all gates of `other` (same width), shifting its parameter indices by `n_params`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::SizeMismatch(self.n_qubits, other.n_qubits));
        }
        let offset = self.n_params;
        for g in &other.gates {
            let g = match g {
                Gate::Rotation(r) => match r.angle() {
                    Angle::Param(i) => Gate::Rotation(PauliRotation::new(*r.generator(), Angle::Param(i + offset))?),
                    Angle::Fixed(_) => *g,
                },
                Gate::Clifford(_) => *g,
            };
            self.push(g)?;
        }
        self.n_params = self.n_params.max(offset + other.n_params);
        Ok(())
    }

    /// Positions of the rotations carrying each parameter.
    pub fn param_occurrences(&self) -> Vec<Vec<usize>> {
        let mut occ = vec![Vec::new(); self.n_params];
        for (pos, g) in self.gates.iter().enumerate() {
            if let Some(i) = g.param_index() {
                occ[i].push(pos);
            }
        }
        occ
    }

    /// Copy with every parameter replaced by the given value.
    pub fn bind(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.n_params {
            return Err(Error::InvalidCircuit(format!(
                "expected {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Rotation(r) => match r.angle() {
                    Angle::Param(i) => Gate::Rotation(
                        PauliRotation::new(*r.generator(), Angle::Fixed(params[i])).expect("valid generator"),
                    ),
                    Angle::Fixed(_) => *g,
                },
                Gate::Clifford(_) => *g,
            })
            .collect();
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates,
            n_params: 0,
        })
    }

    /// Checks the structural invariants: qubits in range and every parameter used.
    pub fn validate(&self) -> Result<()> {
        let mut used = vec![false; self.n_params];
        for g in &self.gates {
            for q in g.qubits() {
                if q >= self.n_qubits {
                    return Err(Error::QubitOutOfRange {
                        index: q,
                        n_qubits: self.n_qubits,
                    });
                }
            }
            if let Some(i) = g.param_index() {
                if i >= self.n_params {
                    return Err(Error::InvalidParameter(i));
                }
                used[i] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidCircuit(format!("parameter {i} is not used by any gate")));
        }
        Ok(())
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Rotation(_))).count()
    }

    /// Line-oriented text form (`QUBITS`, `PARAMS`, then `CLIFF`/`ROT` lines).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "QUBITS {}", self.n_qubits);
        let _ = writeln!(s, "PARAMS {}", self.n_params);
        for g in &self.gates {
            match g {
                Gate::Clifford(c) => {
                    let qs: Vec<String> = c.qubits().iter().map(|q| q.to_string()).collect();
                    let _ = writeln!(s, "CLIFF {} {}", c.kind().name(), qs.join(" "));
                }
                Gate::Rotation(r) => {
                    let arg = match r.angle() {
                        Angle::Param(i) => i.to_string(),
                        Angle::Fixed(a) => format!("{a:?}"),
                    };
                    let _ = writeln!(s, "ROT {} {}", r.generator().letters(), arg);
                }
            }
        }
        s
    }
}

impl FromStr for Circuit {
    type Err = Error;

    /// Parses the text form. A bare unsigned integer after `ROT` is a parameter
    /// index; anything with a decimal point or exponent is a fixed angle.
    fn from_str(text: &str) -> Result<Self> {
        let mut n_qubits = None;
        let mut declared_params = None;
        let mut circuit: Option<Circuit> = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0].to_ascii_uppercase().as_str() {
                "QUBITS" => {
                    let n: usize = toks
                        .get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr("QUBITS needs a count".into()))?;
                    n_qubits = Some(n);
                    circuit = Some(Circuit::new(n));
                }
                "PARAMS" => {
                    let m: usize = toks
                        .get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr("PARAMS needs a count".into()))?;
                    declared_params = Some(m);
                }
                "CLIFF" => {
                    let c = circuit.as_mut().ok_or_else(|| perr("gate before QUBITS header".into()))?;
                    let kind = toks
                        .get(1)
                        .and_then(|t| CliffordKind::from_name(t))
                        .ok_or_else(|| perr(format!("unknown Clifford kind in {line:?}")))?;
                    let qs: std::result::Result<Vec<usize>, _> = toks[2..].iter().map(|t| t.parse()).collect();
                    let qs = qs.map_err(|e| perr(format!("bad qubit index: {e}")))?;
                    c.clifford(kind, &qs).map_err(|e| perr(e.to_string()))?;
                }
                "ROT" => {
                    let c = circuit.as_mut().ok_or_else(|| perr("gate before QUBITS header".into()))?;
                    if toks.len() != 3 {
                        return Err(perr("ROT needs a label and a parameter index or angle".into()));
                    }
                    let gen: PauliString = toks[1].parse().map_err(|e: Error| perr(e.to_string()))?;
                    if gen.n_qubits() != c.n_qubits() {
                        return Err(perr(format!(
                            "label {} has {} letters, circuit has {} qubits",
                            toks[1],
                            gen.n_qubits(),
                            c.n_qubits()
                        )));
                    }
                    let arg = toks[2];
                    let angle = if arg.bytes().all(|b| b.is_ascii_digit()) {
                        Angle::Param(arg.parse().map_err(|e| perr(format!("bad index: {e}")))?)
                    } else {
                        let a: f64 = arg.parse().map_err(|e| perr(format!("bad angle {arg:?}: {e}")))?;
                        Angle::Fixed(a)
                    };
                    c.rotation(gen, angle).map_err(|e| perr(e.to_string()))?;
                }
                other => return Err(perr(format!("unknown directive {other:?}"))),
            }
        }
        let mut c = circuit.ok_or(Error::Parse {
            line: 0,
            msg: "missing QUBITS header".into(),
        })?;
        debug_assert_eq!(Some(c.n_qubits), n_qubits);
        if let Some(m) = declared_params {
            if m < c.n_params {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("PARAMS {m} but gates reference {} parameters", c.n_params),
                });
            }
            c.n_params = m;
        }
        c.validate()?;
        Ok(c)
    }
}
