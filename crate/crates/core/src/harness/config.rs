use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, DensityGrid, Measure, Support};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20240601;

/// Measure given explicitly: atoms as `[position, weight]` plus an optional
/// density grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub support: Support,
    #[serde(default)]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default)]
    pub grid: Option<DensityGrid>,
    #[serde(default)]
    pub label: Option<String>,
}

impl MeasureSpec {
    pub fn build(&self) -> Result<Measure> {
        let atoms = self.atoms.iter().map(|a| Atom { position: a[0], weight: a[1] }).collect();
        Measure::new(self.support, atoms, self.grid.clone(), self.label.clone().unwrap_or_else(|| "inline".into()))
    }
}

fn default_support() -> Support {
    Support::Circle
}

fn default_atom_weight() -> f64 {
    0.25
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSource {
    /// Normalized Lebesgue measure on `n` cells: the circle, or `[-1, 1]`.
    LebesgueGrid {
        n: usize,
        #[serde(default = "default_support")]
        support: Support,
    },
    Atoms {
        #[serde(default = "default_support")]
        support: Support,
        atoms: Vec<[f64; 2]>,
    },
    /// Smooth density on 64 cells plus one atom in an empty cell, mass 1.
    Mixed {
        #[serde(default = "default_support")]
        support: Support,
        #[serde(default = "default_atom_weight")]
        atom_weight: f64,
    },
    Inline {
        measure: MeasureSpec,
    },
    File {
        path: PathBuf,
    },
}

/// The mixed preset: density `1 + cos/2` on 64 cells, cell 20 emptied and
/// carrying an atom of the given weight, total mass 1.
pub fn mixed_measure(support: Support, atom_weight: f64) -> Result<Measure> {
    if !(atom_weight > 0.0 && atom_weight < 1.0) {
        return Err(Error::config("atom_weight", "must lie in (0, 1)"));
    }
    let n = 64;
    let (a, b) = match support {
        Support::Circle => (-PI, PI),
        Support::Line => (-1.0, 1.0),
    };
    let mut density: Vec<f64> = (0..n).map(|j| 1.0 + 0.5 * (2.0 * PI * j as f64 / n as f64).cos()).collect();
    density[20] = 0.0;
    let g = DensityGrid { a, b, n, density };
    let unnormalized = Measure::new(support, vec![], Some(g.clone()), "mixed")?.mass();
    let scale = (1.0 - atom_weight) / unnormalized;
    let g = DensityGrid { density: g.density.iter().map(|d| d * scale).collect(), ..g };
    let pos = g.midpoint(20);
    Measure::new(support, vec![Atom { position: pos, weight: atom_weight }], Some(g), "mixed")
}

impl MeasureSource {
    pub fn build(&self) -> Result<Measure> {
        match self {
            MeasureSource::LebesgueGrid { n, support } => {
                if *n == 0 {
                    return Err(Error::config("measure.n", "grid must be nonempty"));
                }
                Ok(match support {
                    Support::Circle => Measure::lebesgue_circle(*n),
                    Support::Line => Measure::lebesgue_line(-1.0, 1.0, *n),
                })
            }
            MeasureSource::Atoms { support, atoms } => {
                if atoms.is_empty() {
                    return Err(Error::config("measure.atoms", "atom list must be nonempty"));
                }
                MeasureSpec { support: *support, atoms: atoms.clone(), grid: None, label: Some("atoms".into()) }.build()
            }
            MeasureSource::Mixed { support, atom_weight } => mixed_measure(*support, *atom_weight),
            MeasureSource::Inline { measure } => measure.build(),
            MeasureSource::File { path } => {
                let text = read_file(path, "measure.path")?;
                parse_json::<MeasureSpec>(&text)?.build()
            }
        }
    }

    /// Command-line form: `lebesgue_grid(64)`, `atoms([[0,0.5],[1,0.5]])`,
    /// `mixed`, `file:PATH`, or an inline measure object `{...}`.
    pub fn parse_cli(text: &str, support: Support) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            return Ok(MeasureSource::Inline { measure: parse_json(t)? });
        }
        if let Some(p) = t.strip_prefix("file:") {
            return Ok(MeasureSource::File { path: PathBuf::from(p) });
        }
        if t == "mixed" {
            return Ok(MeasureSource::Mixed { support, atom_weight: default_atom_weight() });
        }
        let inner = |name: &str| t.strip_prefix(name).and_then(|r| r.strip_prefix('(')).and_then(|r| r.strip_suffix(')'));
        if let Some(n) = inner("lebesgue_grid") {
            let n = n.trim().parse().map_err(|_| Error::config("measure", format!("bad cell count `{n}`")))?;
            return Ok(MeasureSource::LebesgueGrid { n, support });
        }
        if let Some(list) = inner("atoms") {
            return Ok(MeasureSource::Atoms { support, atoms: parse_json(list)? });
        }
        Err(Error::config("measure", format!("unknown measure `{t}`")))
    }
}

/// Versioned experiment description accepted by every subcommand via
/// `--config`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub subcommand: String,
    #[serde(default)]
    pub measure: Option<MeasureSource>,
    /// `[re, im]` pairs.
    #[serde(default)]
    pub alpha: Vec<[f64; 2]>,
    #[serde(default)]
    pub gamma: Option<[f64; 2]>,
    #[serde(default)]
    pub eps_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub kernel: Option<String>,
    /// Definition for `kernel = "custom-json"`: inline JSON or a file path.
    #[serde(default)]
    pub kernel_json: Option<String>,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub route: Option<String>,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Random pairs for `schur-test`.
    #[serde(default)]
    pub pairs: Option<usize>,
    /// Overrides of named check tolerances.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// JSON report path; standard output when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(subcommand: &str) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            subcommand: subcommand.into(),
            measure: None,
            alpha: vec![],
            gamma: None,
            eps_grid: None,
            kernel: None,
            kernel_json: None,
            family: None,
            route: None,
            grid: None,
            seed: None,
            pairs: None,
            tolerances: BTreeMap::new(),
            output: None,
            csv: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = parse_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_file(path, "config")?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config("schema_version", format!("expected {SCHEMA_VERSION}, found {}", self.schema_version)));
        }
        if let Some(g) = &self.eps_grid {
            if g.is_empty() {
                return Err(Error::config("eps_grid", "grid must be nonempty"));
            }
            if g.iter().any(|e| !(*e > 0.0)) {
                return Err(Error::config("eps_grid", "entries must be positive"));
            }
        }
        for (k, v) in &self.tolerances {
            if !(*v > 0.0) {
                return Err(Error::config(format!("tolerances.{k}"), "tolerance must be positive"));
            }
        }
        if let Some(MeasureSource::File { path }) = &self.measure {
            if !path.exists() {
                return Err(Error::config("measure.path", format!("{} does not exist", path.display())));
            }
        }
        Ok(())
    }
}

fn read_file(path: &Path, field: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::config(field, format!("{}: {e}", path.display())))
}

/// JSON parsing with line/column diagnostics.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::config(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build() {
        let m = MeasureSource::parse_cli("lebesgue_grid(16)", Support::Circle).unwrap().build().unwrap();
        assert_eq!(m.n_cells(), 16);
        assert!((m.mass() - 1.0).abs() < 1e-14);
        let m = MeasureSource::parse_cli("atoms([[0.0,0.5],[1.0,0.5]])", Support::Line).unwrap().build().unwrap();
        assert_eq!(m.n_atoms(), 2);
        for s in [Support::Circle, Support::Line] {
            let m = MeasureSource::Mixed { support: s, atom_weight: 0.3 }.build().unwrap();
            assert!((m.mass() - 1.0).abs() < 1e-13);
        }
        assert!(MeasureSource::parse_cli("nonsense", Support::Line).is_err());
    }

    #[test]
    fn config_errors_carry_location() {
        let err = ExperimentConfig::from_json("{\n  \"schema_version\": 1,\n  \"subcommand\": 3\n}").unwrap_err();
        match err {
            Error::Config { field, .. } => assert!(field.starts_with("line 3"), "{field}"),
            e => panic!("{e}"),
        }
        let err = ExperimentConfig::from_json(r#"{"schema_version": 2, "subcommand": "x"}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "schema_version"));
        let err = ExperimentConfig::from_json(r#"{"schema_version": 1, "subcommand": "x", "eps_grid": []}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "eps_grid"));
        let err = ExperimentConfig::from_json(r#"{"schema_version": 1, "subcommand": "x", "tolerances": {"a": -1}}"#).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"schema_version": 1, "subcommand": "spectrum-scan",
            "measure": {"preset": "atoms", "support": "line", "atoms": [[0, 1], [1, 2]]},
            "alpha": [[1, 0], [2, 0]]}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.measure.unwrap().build().unwrap().n_atoms(), 2);
    }
}
