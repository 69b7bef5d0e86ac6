//! Run configuration: a TOML file, then `--set` overrides, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use bowtie_core::ansatz::Reference;
use bowtie_core::hamiltonians::Family;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub model: ModelConfig,
    pub circuit: CircuitConfig,
    pub init: InitConfig,
    pub evolve: EvolveSection,
    pub skqd: SkqdSection,
    pub cost: CostSection,
    pub spsa: SpsaSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub family: Family,
    pub sites: usize,
    /// `SITES n` plus one edge per line; replaces the default chain or heavy-hex patch.
    pub lattice_file: Option<PathBuf>,
    /// Explicit Pauli-sum text; overrides `family` entirely.
    pub terms_file: Option<PathBuf>,
    pub c_field: f64,
    pub c_random: f64,
    pub disorder_seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            family: Family::Heisenberg1d,
            sites: 8,
            lattice_file: None,
            terms_file: None,
            c_field: 0.0,
            c_random: 0.0,
            disorder_seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitKind {
    Hva,
    Heavyhex,
    Trotter,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircuitConfig {
    pub kind: CircuitKind,
    pub layers: usize,
    pub reference: Reference,
    pub file: Option<PathBuf>,
    /// Colour-class sequence for the heavy-hex ansatz, e.g. `"GBOBGBO"`.
    pub sequence: String,
    pub final_ry: bool,
    pub schedule_seeds: Vec<u64>,
    pub trotter_time: f64,
}

impl Default for CircuitConfig {
    fn default() -> Self {
        CircuitConfig {
            kind: CircuitKind::Hva,
            layers: 2,
            reference: Reference::Neel,
            file: None,
            sequence: "GBOBGBO".into(),
            final_ry: false,
            schedule_seeds: (0..8).collect(),
            trotter_time: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaInit {
    Zero,
    /// Uniform in `[-scale, scale]`.
    Random,
    /// Constant `scale` on every parameter.
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitConfig {
    pub theta: ThetaInit,
    pub scale: f64,
    /// JSON array of angles; overrides `theta`.
    pub file: Option<PathBuf>,
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig {
            theta: ThetaInit::Zero,
            scale: 0.1,
            file: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverName {
    Pinv,
    Ridge,
    Quadmin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Real,
    #[serde(alias = "imaginary")]
    Imag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveSection {
    pub mode: ModeName,
    pub t_final: f64,
    /// Defaults to 0.01 (real) or 0.05 (imaginary).
    pub dt: Option<f64>,
    pub solver: SolverName,
    pub rcond: f64,
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub compare_exact: bool,
    pub cone_cap: usize,
}

impl Default for EvolveSection {
    fn default() -> Self {
        EvolveSection {
            mode: ModeName::Real,
            t_final: 0.5,
            dt: None,
            solver: SolverName::Pinv,
            rcond: 1e-10,
            lambda: 1e-8,
            tol: 1e-12,
            max_iter: 1000,
            compare_exact: false,
            cone_cap: bowtie_core::statevector::CONE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SkqdSection {
    pub tau_imag: f64,
    pub krylov_states: usize,
    pub shots: usize,
    pub trotter_tail: usize,
    /// Spectral gap for the Krylov step; computed exactly when absent.
    pub delta_e: Option<f64>,
    pub imag_dt: f64,
    pub real_dt: f64,
    pub normalized: bool,
}

impl Default for SkqdSection {
    fn default() -> Self {
        SkqdSection {
            tau_imag: 1.0,
            krylov_states: 4,
            shots: 1000,
            trotter_tail: 0,
            delta_e: None,
            imag_dt: 0.05,
            real_dt: 0.01,
            normalized: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostSection {
    pub chi: u64,
    pub z: u32,
}

impl Default for CostSection {
    fn default() -> Self {
        let tn = bowtie_core::analysis::TnParams::default();
        CostSection { chi: tn.chi, z: tn.z }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpsaSection {
    pub schedule: Vec<usize>,
    pub epsilon: f64,
    /// Estimate from simulated fidelities instead of the exact quadratic form.
    pub simulated: bool,
}

impl Default for SpsaSection {
    fn default() -> Self {
        SpsaSection {
            schedule: vec![10, 100, 1000],
            epsilon: 1e-2,
            simulated: false,
        }
    }
}

/// Loads the config file (if any) as a raw table so overrides can be merged
/// before the typed parse.
pub fn load_table(path: Option<&Path>) -> Result<Table, CliError> {
    let Some(path) = path else {
        return Ok(Table::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Usage(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    resolve_paths(&mut table, base);
    Ok(table)
}

/// File paths in a config are relative to the config file.
fn resolve_paths(table: &mut Table, base: &Path) {
    for (section, key) in [("model", "lattice_file"), ("model", "terms_file"), ("circuit", "file"), ("init", "file")] {
        if let Some(Value::String(s)) = table.get_mut(section).and_then(|t| t.get_mut(key)) {
            let p = Path::new(s.as_str());
            if p.is_relative() {
                *s = base.join(p).to_string_lossy().into_owned();
            }
        }
    }
}

/// Applies `section.key=value`; the value is read as a TOML literal, falling
/// back to a bare string.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override {assignment:?} is not key=value")))?;
    let value = parse_value(raw.trim());
    set_path(table, key.trim(), value)
}

pub fn set_path(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("bad config key {key:?}")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("config key {p:?} is not a section")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => Value::String(raw.to_string()),
    }
}

pub fn finish(table: Table) -> Result<RunConfig, CliError> {
    RunConfig::deserialize(Value::Table(table)).map_err(|e| CliError::Usage(format!("config: {e}")))
}
