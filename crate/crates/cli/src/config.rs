// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: command-line flags, an optional TOML file and
//! defaults, merged in that order of precedence.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use shallowpocket::{DephasingParams, QuadratureConfig, SpectralDensity};

use crate::output::Format;

pub const DEFAULT_GAMMA: f64 = 1.0;
pub const DEFAULT_OMEGA0: f64 = 0.0;
pub const DEFAULT_T_START: f64 = 0.0;
pub const DEFAULT_T_END: f64 = 10.0;
pub const DEFAULT_N_POINTS: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Decay rate γ > 0.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Carrier frequency ω₀.
    #[arg(long, allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
    /// Output file (default `<command>.<format>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file with default values for any of the above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub output: OutputSection,
    pub density: Option<DensitySpec>,
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub survival: SurvivalSection,
    #[serde(default)]
    pub pw: PwSection,
    #[serde(default)]
    pub potential: PotentialSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub gamma: Option<f64>,
    pub omega0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub n_points: Option<usize>,
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub rho00: Option<f64>,
    pub re_rho01: Option<f64>,
    pub im_rho01: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivalSection {
    pub amplitude: Option<String>,
    pub weight0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PwSection {
    pub amplitude: Option<String>,
    pub t_values: Option<Vec<f64>>,
    pub fit_window: Option<[f64; 2]>,
    pub weight0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub spec: Option<String>,
    pub construction: Option<String>,
    pub numeric_derivative: Option<bool>,
    pub x_max: Option<f64>,
    pub x_points: Option<usize>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

/// Environment density as written in a config file or echoed in output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensitySpec {
    /// Cauchy–Lorentz density; parameters default to the model's.
    Lorentzian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega0: Option<f64>,
    },
    /// `rate · e^{-rate (E - onset)}` on `[onset, ∞)`.
    Exponential {
        rate: f64,
        #[serde(default)]
        onset: f64,
    },
    /// Piecewise-linear density through `(E, p(E))` knots.
    UserTable {
        knots: Vec<[f64; 2]>,
        interpolation: String,
        support: [f64; 2],
        tail_decay: String,
    },
}

impl DensitySpec {
    /// Parse `lorentzian[:gamma=G,omega0=W]` or `exponential:rate=R[,onset=E]`.
    pub fn parse_flag(s: &str) -> Result<DensitySpec, String> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), r),
            None => (s.trim(), ""),
        };
        let mut fields = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                format!("malformed density parameter {item:?} (expected key=value)")
            })?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| format!("density parameter {} is not a number: {v:?}", k.trim()))?;
            fields.push((k.trim().to_string(), v));
        }
        let take = |name: &str, fields: &mut Vec<(String, f64)>| -> Option<f64> {
            let i = fields.iter().position(|(k, _)| k == name)?;
            Some(fields.remove(i).1)
        };
        let spec = match kind {
            "lorentzian" => DensitySpec::Lorentzian {
                gamma: take("gamma", &mut fields),
                omega0: take("omega0", &mut fields),
            },
            "exponential" => DensitySpec::Exponential {
                rate: take("rate", &mut fields).ok_or("exponential density needs rate=...")?,
                onset: take("onset", &mut fields).unwrap_or(0.0),
            },
            "user-table" => {
                return Err("user-table densities must be given in a config file".into())
            }
            other => {
                return Err(format!(
                "unknown density kind {other:?} (expected lorentzian, exponential or user-table)"
            ))
            }
        };
        if let Some((k, _)) = fields.first() {
            return Err(format!("unknown parameter {k:?} for density {kind}"));
        }
        Ok(spec)
    }

    /// Fill in model defaults so the echo is self-contained.
    pub fn resolved(&self, model: DephasingParams) -> DensitySpec {
        match self {
            DensitySpec::Lorentzian { gamma, omega0 } => DensitySpec::Lorentzian {
                gamma: Some(gamma.unwrap_or(model.gamma())),
                omega0: Some(omega0.unwrap_or(model.omega0())),
            },
            other => other.clone(),
        }
    }

    pub fn build(&self, model: DephasingParams) -> Result<SpectralDensity, String> {
        match self.resolved(model) {
            DensitySpec::Lorentzian { gamma, omega0 } => {
                let p = DephasingParams::new(gamma.expect("resolved"), omega0.expect("resolved"))
                    .map_err(|e| e.to_string())?;
                Ok(shallowpocket::spectral::lorentzian_density(p))
            }
            DensitySpec::Exponential { rate, onset } => {
                SpectralDensity::exponential(rate, onset).map_err(|e| e.to_string())
            }
            DensitySpec::UserTable {
                knots,
                interpolation,
                support,
                tail_decay,
            } => {
                if interpolation != "linear" {
                    return Err(format!(
                        "unsupported interpolation {interpolation:?} (only linear)"
                    ));
                }
                if tail_decay != "compact" {
                    return Err(format!("a table density has compact tails, but tail_decay = {tail_decay:?} was declared"));
                }
                let (first, last) = match (knots.first(), knots.last()) {
                    (Some(a), Some(b)) => (a[0], b[0]),
                    _ => return Err("user-table needs knots".into()),
                };
                if support != [first, last] {
                    return Err(format!(
                        "declared support [{}, {}] differs from the knot range [{first}, {last}]",
                        support[0], support[1]
                    ));
                }
                SpectralDensity::table(knots.iter().map(|k| (k[0], k[1])).collect())
                    .map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn times(&self) -> Result<Vec<f64>, String> {
        let GridSpec {
            t_start,
            t_end,
            n_points: n,
            spacing,
        } = *self;
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err("t_start and t_end must be finite".into());
        }
        if n == 0 {
            return Err("n_points must be >= 1".into());
        }
        if n == 1 {
            if t_start != t_end {
                return Err("n_points = 1 needs t_start = t_end".into());
            }
            return Ok(vec![t_start]);
        }
        if !(t_end > t_start) {
            return Err(format!("t_end ({t_end}) must exceed t_start ({t_start})"));
        }
        let last = (n - 1) as f64;
        let mut ts: Vec<f64> = match spacing {
            Spacing::Linear => (0..n)
                .map(|k| t_start + (t_end - t_start) * (k as f64 / last))
                .collect(),
            Spacing::Log => {
                if !(t_start > 0.0) {
                    return Err("log spacing needs t_start > 0".into());
                }
                let ratio = (t_end / t_start).ln();
                (0..n)
                    .map(|k| t_start * (ratio * k as f64 / last).exp())
                    .collect()
            }
        };
        ts[0] = t_start;
        ts[n - 1] = t_end;
        if ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(
                "time grid is not strictly increasing (too many points for the range)".into(),
            );
        }
        Ok(ts)
    }
}

/// Settings shared by every command after merging.
#[derive(Debug, Clone)]
pub struct Common {
    pub model: DephasingParams,
    pub grid: GridSpec,
    pub quadrature: QuadratureConfig,
    pub out: PathBuf,
    pub format: Format,
}

impl Common {
    pub fn resolve(command: &str, args: &CommonArgs, file: &FileConfig) -> Result<Common, String> {
        let gamma = args.gamma.or(file.model.gamma).unwrap_or(DEFAULT_GAMMA);
        let omega0 = args.omega0.or(file.model.omega0).unwrap_or(DEFAULT_OMEGA0);
        let model = DephasingParams::new(gamma, omega0).map_err(|e| e.to_string())?;
        let grid = GridSpec {
            t_start: args
                .t_start
                .or(file.grid.t_start)
                .unwrap_or(DEFAULT_T_START),
            t_end: args.t_end.or(file.grid.t_end).unwrap_or(DEFAULT_T_END),
            n_points: args
                .n_points
                .or(file.grid.n_points)
                .unwrap_or(DEFAULT_N_POINTS),
            spacing: args.spacing.or(file.grid.spacing).unwrap_or_default(),
        };
        grid.times()?;
        let mut quadrature = QuadratureConfig::default();
        if let Some(v) = args.abs_tol.or(file.quadrature.abs_tol) {
            quadrature.abs_tol = v;
        }
        if let Some(v) = args.rel_tol.or(file.quadrature.rel_tol) {
            quadrature.rel_tol = v;
        }
        if let Some(v) = args.max_subdivisions.or(file.quadrature.max_subdivisions) {
            quadrature.max_subdivisions = v;
        }
        quadrature.validate().map_err(|e| e.to_string())?;
        let format = args.format.or(file.output.format).unwrap_or_default();
        let out = args
            .out
            .clone()
            .or_else(|| file.output.path.clone())
            .unwrap_or_else(|| PathBuf::from(format!("{command}.{}", format.extension())));
        Ok(Common {
            model,
            grid,
            quadrature,
            out,
            format,
        })
    }

    /// Echo of the settings that determine the numbers (the output path
    /// is left out so that runs differing only in destination compare
    /// equal).
    pub fn echo(&self, command: &str) -> toml::Table {
        #[derive(Serialize)]
        struct Model {
            gamma: f64,
            omega0: f64,
        }
        #[derive(Serialize)]
        struct Quadrature {
            abs_tol: f64,
            rel_tol: f64,
            max_subdivisions: usize,
        }
        let mut t = toml::Table::new();
        t.insert("command".into(), toml::Value::String(command.into()));
        insert(
            &mut t,
            "model",
            &Model {
                gamma: self.model.gamma(),
                omega0: self.model.omega0(),
            },
        );
        insert(&mut t, "grid", &self.grid);
        insert(
            &mut t,
            "quadrature",
            &Quadrature {
                abs_tol: self.quadrature.abs_tol,
                rel_tol: self.quadrature.rel_tol,
                max_subdivisions: self.quadrature.max_subdivisions,
            },
        );
        t
    }
}

/// Add `value` to `table` under `key`.
pub fn insert<T: Serialize>(table: &mut toml::Table, key: &str, value: &T) {
    let v = toml::Value::try_from(value).expect("echo values are serializable");
    table.insert(key.into(), v);
}

/// Environment density: flag, then config file, then the model's
/// Lorentzian.
pub fn resolve_density(
    flag: Option<&str>,
    file: &FileConfig,
    model: DephasingParams,
) -> Result<(SpectralDensity, DensitySpec), String> {
    let spec = match flag {
        Some(s) => DensitySpec::parse_flag(s)?,
        None => file.density.clone().unwrap_or(DensitySpec::Lorentzian {
            gamma: None,
            omega0: None,
        }),
    };
    let density = spec.build(model)?;
    Ok((density, spec.resolved(model)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> DephasingParams {
        DephasingParams::new(1.0, 0.0).unwrap()
    }

    #[test]
    fn linear_and_log_grids() {
        let g = GridSpec {
            t_start: 0.0,
            t_end: 10.0,
            n_points: 11,
            spacing: Spacing::Linear,
        };
        assert_eq!(
            g.times().unwrap(),
            (0..=10).map(f64::from).collect::<Vec<_>>()
        );
        let g = GridSpec {
            t_start: 1.0,
            t_end: 1000.0,
            n_points: 4,
            spacing: Spacing::Log,
        };
        let ts = g.times().unwrap();
        assert_eq!((ts[0], ts[3]), (1.0, 1000.0));
        assert!((ts[1] - 10.0).abs() < 1e-12 && (ts[2] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_grids() {
        let single = GridSpec {
            t_start: 0.0,
            t_end: 0.0,
            n_points: 1,
            spacing: Spacing::Linear,
        };
        assert_eq!(single.times().unwrap(), vec![0.0]);
        for (a, b, n, s) in [
            (0.0, 1.0, 1, Spacing::Linear),
            (0.0, 1.0, 0, Spacing::Linear),
            (1.0, 0.0, 5, Spacing::Linear),
            (0.0, 1.0, 5, Spacing::Log),
        ] {
            let g = GridSpec {
                t_start: a,
                t_end: b,
                n_points: n,
                spacing: s,
            };
            assert!(g.times().is_err(), "{g:?}");
        }
    }

    #[test]
    fn density_flags() {
        assert_eq!(
            DensitySpec::parse_flag("lorentzian").unwrap(),
            DensitySpec::Lorentzian {
                gamma: None,
                omega0: None
            }
        );
        assert_eq!(
            DensitySpec::parse_flag("lorentzian:gamma=2, omega0=-1").unwrap(),
            DensitySpec::Lorentzian {
                gamma: Some(2.0),
                omega0: Some(-1.0)
            }
        );
        assert_eq!(
            DensitySpec::parse_flag("exponential:rate=3").unwrap(),
            DensitySpec::Exponential {
                rate: 3.0,
                onset: 0.0
            }
        );
        for bad in [
            "gaussian",
            "exponential",
            "lorentzian:gamma",
            "lorentzian:gamma=x",
            "lorentzian:width=1",
            "user-table",
        ] {
            assert!(DensitySpec::parse_flag(bad).is_err(), "{bad}");
        }
        assert!(DensitySpec::parse_flag("lorentzian:gamma=-1")
            .unwrap()
            .build(model())
            .is_err());
    }

    #[test]
    fn table_density_from_file() {
        let text = r#"
            [density]
            kind = "user-table"
            knots = [[-1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]
            interpolation = "linear"
            support = [-1.0, 1.0]
            tail_decay = "compact"
        "#;
        let file: FileConfig = toml::from_str(text).unwrap();
        let (d, _) = resolve_density(None, &file, model()).unwrap();
        assert_eq!(d.evaluate(0.0), 1.0);
        let wrong_support = text.replace("support = [-1.0, 1.0]", "support = [-2.0, 1.0]");
        let file: FileConfig = toml::from_str(&wrong_support).unwrap();
        assert!(resolve_density(None, &file, model()).is_err());
        let heavy = text.replace("\"compact\"", "\"heavy\"");
        let file: FileConfig = toml::from_str(&heavy).unwrap();
        assert!(resolve_density(None, &file, model()).is_err());
        let missing = text.replace("tail_decay = \"compact\"", "");
        assert!(toml::from_str::<FileConfig>(&missing).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("[model]\ngama = 1.0").is_err());
        assert!(
            toml::from_str::<FileConfig>("[density]\nkind = \"lorentzian\"\nwidth = 2.0").is_err()
        );
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file: FileConfig =
            toml::from_str("[model]\ngamma = 2.0\nomega0 = 1.0\n[grid]\nn_points = 5").unwrap();
        let args = CommonArgs {
            gamma: Some(3.0),
            ..Default::default()
        };
        let c = Common::resolve("survival", &args, &file).unwrap();
        assert_eq!((c.model.gamma(), c.model.omega0()), (3.0, 1.0));
        assert_eq!((c.grid.n_points, c.grid.t_end), (5, DEFAULT_T_END));
        assert_eq!(c.out, PathBuf::from("survival.csv"));
    }
}
