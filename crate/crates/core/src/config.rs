//! Scenario configuration files (TOML).
//!
//! Parsing is strict: unknown keys are errors, and every problem found is
//! reported together rather than stopping at the first. See `scenarios/` and
//! the README for the full schema.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dfs::MAX_CLUSTER_HALF;
use crate::experiment::BathInit;
use crate::gates::GateParams;
use crate::model::{drive_field, BathMode, BathSpec, Coupling, ModelError, NoiseModel};
use crate::qops::NoiseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Storage,
    Gate,
    EfficiencyTable,
    SubspaceDims,
    CollectivitySweep,
    AsymmetrySweep,
}

impl Scenario {
    fn needs_noise(self) -> bool {
        !matches!(self, Scenario::EfficiencyTable)
    }

    fn needs_bath(self) -> bool {
        matches!(
            self,
            Scenario::Storage | Scenario::Gate | Scenario::AsymmetrySweep
        )
    }

    pub fn evolves(self) -> bool {
        matches!(
            self,
            Scenario::Storage
                | Scenario::Gate
                | Scenario::AsymmetrySweep
                | Scenario::CollectivitySweep
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawNoise {
    pub lambda: [f64; 3],
    pub omega0: f64,
}

/// One coupling entry; entries sharing an `id` refer to one physical mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMode {
    pub id: String,
    pub frequency: f64,
    pub cutoff: usize,
    pub g: f64,
    pub pairs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RawBath {
    #[serde(default)]
    pub modes: Vec<RawMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawBathInit {
    Vacuum,
    Thermal {
        temperature: f64,
    },
    /// Real amplitude per mode id; unnamed modes start in vacuum.
    Coherent {
        amplitudes: BTreeMap<String, f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawLogical {
    /// [re, im] per logical basis state.
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Times {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Times {
    pub fn grid(&self) -> Vec<f64> {
        crate::evolve::linspace(self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawGate {
    /// Explicit (alpha, theta_gate, phi) triples.
    #[serde(default)]
    pub params: Vec<[f64; 3]>,
    /// Additional seeded random triples.
    #[serde(default)]
    pub random: usize,
    #[serde(default = "default_gate_steps")]
    pub steps: usize,
}

fn default_gate_steps() -> usize {
    11
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencySection {
    #[serde(default = "default_max_m")]
    pub max_m: usize,
    #[serde(default = "default_approx_m")]
    pub approx_m: usize,
}

fn default_max_m() -> usize {
    6
}

fn default_approx_m() -> usize {
    crate::tolerances::EFFICIENCY_APPROX_M
}

impl Default for EfficiencySection {
    fn default() -> Self {
        Self {
            max_m: default_max_m(),
            approx_m: default_approx_m(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSection {
    #[serde(default = "default_subspace_m")]
    pub m: Vec<usize>,
}

fn default_subspace_m() -> Vec<usize> {
    vec![1, 2, 3]
}

impl Default for SubspaceSection {
    fn default() -> Self {
        Self {
            m: default_subspace_m(),
        }
    }
}

/// Generated baths for the collectivity sweep: each pair couples to
/// `modes_per_pair` modes, of which round(fraction × modes_per_pair) are
/// shared by every pair and the rest are private.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectivitySection {
    pub modes_per_pair: usize,
    pub cutoff: usize,
    pub frequency: f64,
    pub g: f64,
    pub fractions: Vec<f64>,
}

/// The file as written, echoed into run summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawConfig {
    pub scenario: Scenario,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub noise: Option<RawNoise>,
    #[serde(default)]
    pub bath: RawBath,
    #[serde(default)]
    pub bath_init: Option<RawBathInit>,
    #[serde(default)]
    pub logical: Option<RawLogical>,
    #[serde(default)]
    pub times: Option<Times>,
    #[serde(default = "default_epsilon")]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub gate: Option<RawGate>,
    #[serde(default)]
    pub efficiency: Option<EfficiencySection>,
    #[serde(default)]
    pub subspace: Option<SubspaceSection>,
    #[serde(default)]
    pub collectivity: Option<CollectivitySection>,
}

fn default_pairs() -> usize {
    1
}

fn default_epsilon() -> Vec<f64> {
    vec![0.0]
}

/// Largest full Hilbert-space dimension a scenario may request.
pub const MAX_DIMENSION: usize = 4096;

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    pub scenario: Scenario,
    pub pairs: usize,
    pub seed: u64,
    pub noise: Option<NoiseModel>,
    pub bath: BathSpec,
    pub mode_ids: Vec<String>,
    pub bath_init: BathInit,
    pub logical: Option<Vec<Complex64>>,
    pub times: Option<Times>,
    pub epsilon: Vec<f64>,
    pub gate_params: Vec<[f64; 3]>,
    pub gate_random: usize,
    pub gate_steps: usize,
    pub efficiency: EfficiencySection,
    pub subspace: SubspaceSection,
    pub collectivity: Option<CollectivitySection>,
}

impl ExperimentConfig {
    pub fn noise_model(&self) -> NoiseModel {
        self.noise.expect("validated: scenario has a noise model")
    }

    /// Explicit gate parameters followed by `random` seeded draws.
    pub fn gate_parameter_list(&self) -> Vec<GateParams> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed ^ 0x9a7e);
        let tau = std::f64::consts::TAU;
        self.gate_params
            .iter()
            .map(|p| GateParams::new(p[0], p[1], p[2]))
            .chain((0..self.gate_random).map(|_| {
                GateParams::new(
                    rng.random::<f64>() * tau,
                    rng.random::<f64>() * tau,
                    rng.random::<f64>() * tau,
                )
            }))
            .collect()
    }
}

/// All problems found in a configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration problem(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Parses and validates a configuration, collecting every violation.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let value: toml::Table =
        toml::from_str(text).map_err(|e| ConfigErrors(vec![format!("syntax: {e}")]))?;
    let mut errors = Vec::new();
    let value = toml::Value::Table(value);
    let raw: Result<RawConfig, _> = serde_ignored::deserialize(value.clone(), |path| {
        let path = path.to_string().replace(".?", "");
        errors.push(format!("unknown key `{path}`"));
    });
    let raw = match raw {
        Ok(raw) => raw,
        Err(e) => {
            // a type error stops serde; still list the unknown keys seen elsewhere
            collect_unknown_keys(&value, &mut errors);
            errors.push(format!("schema: {e}"));
            errors.dedup();
            return Err(ConfigErrors(errors));
        }
    };
    let config = validate(raw, &mut errors);
    if errors.is_empty() {
        Ok(config.expect("no violations"))
    } else {
        Err(ConfigErrors(errors))
    }
}

fn collect_unknown_keys(value: &toml::Value, errors: &mut Vec<String>) {
    const TOP: &[&str] = &[
        "scenario",
        "pairs",
        "seed",
        "workers",
        "output_dir",
        "noise",
        "bath",
        "bath_init",
        "logical",
        "times",
        "epsilon",
        "gate",
        "efficiency",
        "subspace",
        "collectivity",
    ];
    if let Some(t) = value.as_table() {
        for k in t.keys().filter(|k| !TOP.contains(&k.as_str())) {
            errors.push(format!("unknown key `{k}`"));
        }
    }
}

fn validate(raw: RawConfig, errors: &mut Vec<String>) -> Option<ExperimentConfig> {
    let scenario = raw.scenario;
    let mut err = |msg: String| errors.push(msg);

    if raw.pairs == 0 {
        err("pairs: must be at least 1".into());
    }
    if raw.workers == Some(0) {
        err("workers: must be at least 1".into());
    }
    if scenario == Scenario::Gate && raw.pairs != 2 {
        err(format!(
            "pairs: gate scenario acts on exactly 2 pairs, got {}",
            raw.pairs
        ));
    }
    if scenario == Scenario::CollectivitySweep && raw.pairs < 2 {
        err("pairs: collectivity sweep needs at least 2 pairs".into());
    }

    let noise = match (&raw.noise, scenario.needs_noise()) {
        (None, true) => {
            err("noise: section required for this scenario".into());
            None
        }
        (None, false) => None,
        (Some(n), _) => match NoiseVector::new(n.lambda[0], n.lambda[1], n.lambda[2]) {
            Err(e) => {
                err(format!("noise.lambda: {e}"));
                None
            }
            Ok(nv) => match NoiseModel::new(nv, n.omega0) {
                Err(e) => {
                    err(format!("noise.omega0: {e}"));
                    None
                }
                Ok(nm) => {
                    if scenario.evolves() {
                        if let Err(ModelError::Undrivable { omega0 }) = drive_field(&nm) {
                            err(format!(
                                "noise: lambda3 = 0 with omega0 = {omega0}: the drive ratio \
                                 g1:g2:omega0 = lambda1:lambda2:lambda3 has no solution, so the free \
                                 Hamiltonian cannot be eliminated (pure amplitude damping with nonzero \
                                 splitting is an open question and is not simulated)"
                            ));
                        }
                    }
                    Some(nm)
                }
            },
        },
    };

    let (bath, mode_ids) = build_bath(&raw, errors);
    let mut err = |msg: String| errors.push(msg);
    if scenario.needs_bath() && raw.bath.modes.is_empty() {
        err("bath.modes: at least one mode required for this scenario".into());
    }
    if scenario == Scenario::CollectivitySweep {
        if !raw.bath.modes.is_empty() {
            err("bath: collectivity sweep generates its own bath; remove bath.modes".into());
        }
        match &raw.collectivity {
            None => err("collectivity: section required for collectivity_sweep".into()),
            Some(c) => {
                if c.modes_per_pair == 0 {
                    err("collectivity.modes_per_pair: must be at least 1".into());
                }
                if c.cutoff < 2 {
                    err("collectivity.cutoff: must be at least 2".into());
                }
                if !(c.frequency.is_finite() && c.frequency > 0.0) {
                    err("collectivity.frequency: must be positive".into());
                }
                if !c.g.is_finite() {
                    err("collectivity.g: must be finite".into());
                }
                if c.fractions.is_empty() || c.fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
                    err("collectivity.fractions: need one or more values in [0, 1]".into());
                }
                let worst = 4usize.pow(raw.pairs as u32)
                    * c.cutoff
                        .saturating_pow((raw.pairs * c.modes_per_pair) as u32);
                if worst > MAX_DIMENSION {
                    err(format!(
                        "collectivity: fully independent bath needs dimension {worst} > {MAX_DIMENSION}"
                    ));
                }
            }
        }
    }

    let bath_init = match &raw.bath_init {
        None | Some(RawBathInit::Vacuum) => BathInit::Vacuum,
        Some(RawBathInit::Thermal { temperature }) => {
            if !(temperature.is_finite() && *temperature >= 0.0) {
                err(format!(
                    "bath_init.temperature: must be non-negative, got {temperature}"
                ));
            }
            BathInit::Thermal {
                temperature: *temperature,
            }
        }
        Some(RawBathInit::Coherent { amplitudes }) => {
            for (id, a) in amplitudes {
                if !mode_ids.contains(id) {
                    err(format!("bath_init.amplitudes: unknown mode id `{id}`"));
                }
                if !a.is_finite() {
                    err(format!("bath_init.amplitudes.{id}: must be finite"));
                }
            }
            BathInit::Coherent {
                amplitudes: mode_ids
                    .iter()
                    .map(|id| amplitudes.get(id).copied().unwrap_or(0.0))
                    .collect(),
            }
        }
    };
    if scenario == Scenario::CollectivitySweep && matches!(bath_init, BathInit::Coherent { .. }) {
        err("bath_init: coherent initialization needs named modes; use vacuum or thermal".into());
    }

    let logical_qubits = raw.pairs;
    let logical = raw.logical.as_ref().map(|l| {
        let amps: Vec<Complex64> = l
            .amplitudes
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        if amps.len() != 1 << logical_qubits {
            err(format!(
                "logical.amplitudes: need {} entries for {} logical qubit(s), got {}",
                1usize << logical_qubits,
                logical_qubits,
                amps.len()
            ));
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            err("logical.amplitudes: must be finite with nonzero norm".into());
        }
        amps
    });

    if scenario.evolves() && scenario != Scenario::Gate {
        match raw.times {
            None => err("times: section required for this scenario".into()),
            Some(t) => {
                if t.count == 0 {
                    err("times.count: must be at least 1".into());
                }
                if !(t.start.is_finite()
                    && t.stop.is_finite()
                    && t.start >= 0.0
                    && t.stop >= t.start)
                {
                    err(format!(
                        "times: need 0 <= start <= stop, got {}..{}",
                        t.start, t.stop
                    ));
                }
            }
        }
    }

    if raw.epsilon.is_empty() {
        err("epsilon: list must not be empty".into());
    }
    if raw.epsilon.iter().any(|e| !e.is_finite()) {
        err("epsilon: values must be finite".into());
    }
    if scenario == Scenario::AsymmetrySweep && raw.epsilon.len() < 2 {
        err("epsilon: asymmetry sweep needs at least two values".into());
    }

    let gate = raw.gate.clone();
    if scenario == Scenario::Gate {
        match &gate {
            None => err("gate: section required for gate scenario".into()),
            Some(g) => {
                if g.params.is_empty() && g.random == 0 {
                    err("gate: give `params` or a positive `random` count".into());
                }
                if g.params.iter().flatten().any(|x| !x.is_finite()) {
                    err("gate.params: angles must be finite".into());
                }
                if g.steps < 2 {
                    err("gate.steps: need at least 2 time points".into());
                }
            }
        }
    }

    let efficiency = raw.efficiency.unwrap_or_default();
    if efficiency.max_m == 0 || efficiency.approx_m == 0 {
        err("efficiency: max_m and approx_m must be positive".into());
    }
    let subspace = raw.subspace.clone().unwrap_or_default();
    if subspace.m.is_empty() || subspace.m.iter().any(|&m| m == 0 || m > MAX_CLUSTER_HALF) {
        err(format!(
            "subspace.m: values must lie in 1..={MAX_CLUSTER_HALF}"
        ));
    }

    if scenario.needs_bath() {
        let pairs_here = if scenario == Scenario::Gate {
            2
        } else {
            raw.pairs
        };
        let dim = 4usize
            .saturating_pow(pairs_here as u32)
            .saturating_mul(bath.mode_dims().iter().product());
        if dim > MAX_DIMENSION {
            err(format!(
                "full Hilbert space dimension {dim} exceeds {MAX_DIMENSION}"
            ));
        }
        for c in &bath.couplings {
            if c.site >= pairs_here {
                err(format!(
                    "bath.modes: `{}` couples to pair {} but only {} pair(s) exist",
                    mode_ids[c.mode], c.site, pairs_here
                ));
            }
        }
    }

    if !errors.is_empty() {
        return None;
    }
    let (gate_params, gate_random, gate_steps) = match gate {
        Some(g) => (g.params, g.random, g.steps),
        None => (Vec::new(), 0, default_gate_steps()),
    };
    Some(ExperimentConfig {
        scenario,
        pairs: raw.pairs,
        seed: raw.seed,
        noise,
        bath,
        mode_ids,
        bath_init,
        logical,
        times: raw.times,
        epsilon: raw.epsilon.clone(),
        gate_params,
        gate_random,
        gate_steps,
        efficiency,
        subspace,
        collectivity: raw.collectivity.clone(),
        raw,
    })
}

/// Merges coupling entries into physical modes keyed by id.
fn build_bath(raw: &RawConfig, errors: &mut Vec<String>) -> (BathSpec, Vec<String>) {
    let before = errors.len();
    let mut ids: Vec<String> = Vec::new();
    let mut modes: Vec<BathMode> = Vec::new();
    let mut couplings: Vec<Coupling> = Vec::new();
    for (k, entry) in raw.bath.modes.iter().enumerate() {
        let at = format!("bath.modes[{k}] (`{}`)", entry.id);
        if !(entry.frequency.is_finite() && entry.frequency > 0.0) {
            errors.push(format!(
                "{at}: frequency must be positive, got {}",
                entry.frequency
            ));
        }
        if entry.cutoff < 2 {
            errors.push(format!(
                "{at}: cutoff must be at least 2, got {}",
                entry.cutoff
            ));
        }
        if !entry.g.is_finite() {
            errors.push(format!("{at}: g must be finite"));
        }
        if entry.pairs.is_empty() {
            errors.push(format!("{at}: pairs must list at least one pair"));
        }
        let index = match ids.iter().position(|id| *id == entry.id) {
            Some(i) => {
                let existing = modes[i];
                if existing.frequency != entry.frequency || existing.fock_dim != entry.cutoff {
                    errors.push(format!(
                        "{at}: mode id reused with conflicting frequency/cutoff ({}, {}) vs ({}, {})",
                        entry.frequency, entry.cutoff, existing.frequency, existing.fock_dim
                    ));
                }
                i
            }
            None => {
                ids.push(entry.id.clone());
                modes.push(BathMode {
                    frequency: entry.frequency,
                    fock_dim: entry.cutoff,
                });
                ids.len() - 1
            }
        };
        for &site in &entry.pairs {
            if couplings.iter().any(|c| c.site == site && c.mode == index) {
                errors.push(format!("{at}: pair {site} coupled to this mode twice"));
            } else {
                couplings.push(Coupling {
                    site,
                    mode: index,
                    g: entry.g,
                });
            }
        }
    }
    if errors.len() == before {
        if let Err(e) = BathSpec::new(modes.clone(), couplings.clone()) {
            errors.push(format!("bath: {e}"));
        }
    }
    (BathSpec { modes, couplings }, ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
scenario = "storage"

[noise]
lambda = [0.0, 0.0, 1.0]
omega0 = 1.0

[[bath.modes]]
id = "a"
frequency = 1.0
cutoff = 6
g = 0.2
pairs = [0]

[times]
start = 0.0
stop = 20.0
count = 50
"#;

    #[test]
    fn minimal_storage_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.scenario, Scenario::Storage);
        assert_eq!(cfg.bath_init, BathInit::Vacuum);
        assert_eq!(cfg.epsilon, vec![0.0]);
        assert_eq!(cfg.pairs, 1);
        assert_eq!(cfg.bath.modes.len(), 1);
        assert!(cfg.logical.is_none());
    }

    #[test]
    fn undrivable_noise_is_diagnosed() {
        let text = MINIMAL.replace("[0.0, 0.0, 1.0]", "[1.0, 0.0, 0.0]");
        let errs = parse_config(&text).unwrap_err();
        assert_eq!(errs.0.len(), 1);
        assert!(
            errs.0[0].contains("g1:g2:omega0 = lambda1:lambda2:lambda3"),
            "{errs}"
        );
    }

    #[test]
    fn conflicting_mode_reuse_is_rejected() {
        let text = format!(
            "{MINIMAL}\n[[bath.modes]]\nid = \"a\"\nfrequency = 2.0\ncutoff = 6\ng = 0.2\npairs = [0]\n"
        )
        .replace("pairs = [0]\n\n[times]", "pairs = [1]\n\n[times]")
        .replace("scenario = \"storage\"", "scenario = \"storage\"\npairs = 2");
        let errs = parse_config(&text).unwrap_err();
        assert!(
            errs.0.iter().any(|e| e.contains("conflicting frequency")),
            "{errs}"
        );
    }

    #[test]
    fn shared_mode_reuse_is_merged() {
        let text = format!(
            "{MINIMAL}\n[[bath.modes]]\nid = \"a\"\nfrequency = 1.0\ncutoff = 6\ng = 0.1\npairs = [1]\n"
        )
        .replace("scenario = \"storage\"", "scenario = \"storage\"\npairs = 2");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.bath.modes.len(), 1);
        assert_eq!(cfg.bath.couplings.len(), 2);
    }

    #[test]
    fn all_unknown_keys_reported() {
        let text = MINIMAL
            .replace("omega0 = 1.0", "omega0 = 1.0\nomgea = 2.0")
            .replace("count = 50", "count = 50\nstep = 1");
        let text = format!("bogus = 1\n{text}");
        let errs = parse_config(&text).unwrap_err();
        assert!(errs.0.iter().any(|e| e.contains("`noise.omgea`")), "{errs}");
        assert!(errs.0.iter().any(|e| e.contains("`times.step`")), "{errs}");
        assert!(errs.0.iter().any(|e| e.contains("bogus")), "{errs}");
    }

    #[test]
    fn multiple_semantic_violations_reported() {
        let text = MINIMAL
            .replace("cutoff = 6", "cutoff = 1")
            .replace("count = 50", "count = 0")
            .replace(
                "scenario = \"storage\"",
                "scenario = \"storage\"\nepsilon = []",
            );
        let errs = parse_config(&text).unwrap_err();
        assert!(errs.0.len() >= 3, "{errs}");
    }

    #[test]
    fn type_errors_and_syntax() {
        assert!(parse_config("scenario = 3").is_err());
        assert!(parse_config("scenario = \"storage").is_err());
        assert!(parse_config("scenario = \"teleport\"").is_err());
    }

    #[test]
    fn efficiency_needs_nothing_else() {
        let cfg = parse_config("scenario = \"efficiency_table\"").unwrap();
        assert_eq!(cfg.efficiency.max_m, 6);
    }

    #[test]
    fn gate_requires_two_pairs() {
        let text = MINIMAL.replace("scenario = \"storage\"", "scenario = \"gate\"")
            + "\n[gate]\nrandom = 2\n";
        let errs = parse_config(&text).unwrap_err();
        assert!(
            errs.0.iter().any(|e| e.contains("exactly 2 pairs")),
            "{errs}"
        );
    }

    #[test]
    fn coherent_amplitudes_by_mode_id() {
        let text =
            MINIMAL.to_string() + "\n[bath_init]\nkind = \"coherent\"\namplitudes = { a = 0.3 }\n";
        let cfg = parse_config(&text).unwrap();
        assert_eq!(
            cfg.bath_init,
            BathInit::Coherent {
                amplitudes: vec![0.3]
            }
        );
        let bad =
            MINIMAL.to_string() + "\n[bath_init]\nkind = \"coherent\"\namplitudes = { b = 0.3 }\n";
        assert!(parse_config(&bad).is_err());
    }
}
