// Copyright 2026 The shallowpocket Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use shallowpocket::diagnostics::{self, Amplitude, ClosedForm, Sampled};
use shallowpocket::gkls::{self, Convention};
use shallowpocket::oscint::{self, SeriesMeta};
use shallowpocket::pocket::{self, PocketModel};
use shallowpocket::potential::{self, MonotonePotential, PotentialFn, StateConstruction};
use shallowpocket::spectral::Side;
use shallowpocket::{
    Complex64, ComplexTimeSeries, DephasingParams, Error, InitialStateSpec, QuadratureConfig,
    QubitState,
};

use crate::config::{self, insert, CommonArgs, DensitySpec, FileConfig, Spacing};
use crate::expr::Expr;
use crate::output::{fmt_float, sibling, Document, Table, Value};

/// Files to write, plus the failure that cut the run short, if any.
#[derive(Debug)]
pub struct Run {
    pub files: Vec<(PathBuf, String)>,
    pub failure: Option<Manifest>,
}

#[derive(Debug)]
pub struct Manifest {
    pub path: PathBuf,
    pub contents: String,
    pub message: String,
}

/// Where the failure manifest for `out` goes.
pub fn manifest_path(out: &Path) -> PathBuf {
    let name = out
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{name}.failure.toml"))
}

/// Quadrature non-convergence is a numerical failure; everything else the
/// core library rejects is bad input.
fn numerical(e: Error) -> Result<Error, String> {
    match e {
        Error::Quadrature(_) | Error::QuadratureAt { .. } | Error::LogSingularity(_) => Ok(e),
        other => Err(other.to_string()),
    }
}

fn finish(
    command: &str,
    c: &config::Common,
    docs: Vec<(PathBuf, Document)>,
    failure: Option<Error>,
) -> Result<Run, String> {
    let rows = docs.first().map(|(_, d)| d.table.rows.len()).unwrap_or(0);
    let files = docs
        .into_iter()
        .map(|(p, d)| (p, d.render(c.format)))
        .collect();
    let failure = match failure {
        None => None,
        Some(e) => {
            let e = numerical(e)?;
            let mut m = toml::Table::new();
            m.insert("command".into(), toml::Value::String(command.into()));
            m.insert("message".into(), toml::Value::String(e.to_string()));
            m.insert("completed_rows".into(), toml::Value::Integer(rows as i64));
            match &e {
                Error::QuadratureAt { time, failure } => {
                    m.insert("time".into(), toml::Value::Float(*time));
                    m.insert(
                        "reason".into(),
                        toml::Value::String(format!("{:?}", failure.reason)),
                    );
                    m.insert(
                        "estimate_re".into(),
                        toml::Value::Float(failure.estimate.re),
                    );
                    m.insert(
                        "estimate_im".into(),
                        toml::Value::Float(failure.estimate.im),
                    );
                    m.insert("error_bound".into(), toml::Value::Float(failure.error));
                }
                Error::Quadrature(failure) => {
                    m.insert(
                        "reason".into(),
                        toml::Value::String(format!("{:?}", failure.reason)),
                    );
                    m.insert(
                        "estimate_re".into(),
                        toml::Value::Float(failure.estimate.re),
                    );
                    m.insert(
                        "estimate_im".into(),
                        toml::Value::Float(failure.estimate.im),
                    );
                    m.insert("error_bound".into(), toml::Value::Float(failure.error));
                }
                Error::LogSingularity(t) => {
                    m.insert("time".into(), toml::Value::Float(*t));
                    m.insert(
                        "reason".into(),
                        toml::Value::String("LogSingularity".into()),
                    );
                }
                _ => {}
            }
            Some(Manifest {
                path: manifest_path(&c.out),
                contents: toml::to_string(&m).expect("manifest is serializable"),
                message: e.to_string(),
            })
        }
    };
    Ok(Run { files, failure })
}

fn load(args: &CommonArgs) -> Result<FileConfig, String> {
    match &args.config {
        Some(p) => config::load_file(p),
        None => Ok(FileConfig::default()),
    }
}

fn parse_choice<T: ValueEnum>(what: &str, s: Option<&String>) -> Result<Option<T>, String> {
    s.map(|s| T::from_str(s, false).map_err(|_| format!("invalid {what} {s:?}")))
        .transpose()
}

fn meta(source: &str, operation: &str, cfg: &QuadratureConfig) -> SeriesMeta {
    SeriesMeta {
        source: source.into(),
        operation: operation.into(),
        config: *cfg,
    }
}

fn amplitude_table(series: &ComplexTimeSeries) -> Table {
    let mut table = Table::new(&["t", "re", "im", "abs"]);
    for (t, v) in series.iter() {
        table.push(vec![t, v.re, v.im, v.norm()]);
    }
    table
}

fn weight(w: f64) -> Result<(f64, f64), String> {
    if (0.0..=1.0).contains(&w) {
        Ok((w, 1.0 - w))
    } else {
        Err(format!("weight0 must lie in [0, 1] (got {w})"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivalAmplitude {
    /// `∫ e^{-iEt} p(E) dE`.
    Full,
    /// Survival amplitude under the ramp `q₊`.
    HalflinePositive,
    /// Survival amplitude under the ramp `q₋`.
    HalflineNegative,
    /// Spin-weighted mix of the two half-line amplitudes.
    Global,
}

#[derive(Debug, Clone, Args)]
pub struct SurvivalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// lorentzian[:gamma=G,omega0=W] or exponential:rate=R[,onset=E].
    #[arg(long)]
    pub density: Option<String>,
    #[arg(long, value_enum)]
    pub amplitude: Option<SurvivalAmplitude>,
    /// Weight of spin level 0 in the global amplitude.
    #[arg(long)]
    pub weight0: Option<f64>,
}

pub fn survival(args: &SurvivalArgs) -> Result<Run, String> {
    let file = load(&args.common)?;
    let c = config::Common::resolve("survival", &args.common, &file)?;
    let (d, spec) = config::resolve_density(args.density.as_deref(), &file, c.model)?;
    let amplitude = args
        .amplitude
        .or(parse_choice("amplitude", file.survival.amplitude.as_ref())?)
        .unwrap_or(SurvivalAmplitude::Full);
    let weights = weight(args.weight0.or(file.survival.weight0).unwrap_or(0.5))?;
    let times = c.grid.times()?;

    #[derive(Serialize)]
    struct Echo {
        amplitude: SurvivalAmplitude,
        #[serde(skip_serializing_if = "Option::is_none")]
        weight0: Option<f64>,
    }
    let mut echo = c.echo("survival");
    insert(&mut echo, "density", &spec);
    insert(
        &mut echo,
        "survival",
        &Echo {
            amplitude,
            weight0: (amplitude == SurvivalAmplitude::Global).then_some(weights.0),
        },
    );

    let cfg = c.quadrature;
    let (series, failure) =
        ComplexTimeSeries::tabulate_prefix(&times, meta(d.label(), "survival", &cfg), |t| {
            match amplitude {
                SurvivalAmplitude::Full => oscint::fourier_amplitude(&d, t, &cfg),
                SurvivalAmplitude::HalflinePositive => {
                    oscint::halfline_amplitude(&d, Side::Positive, t, &cfg)
                }
                SurvivalAmplitude::HalflineNegative => {
                    oscint::halfline_amplitude(&d, Side::Negative, t, &cfg)
                }
                SurvivalAmplitude::Global => oscint::global_survival(weights, &d, t, &cfg),
            }
        })
        .map_err(|e| e.to_string())?;
    let doc = Document {
        title: "survival".into(),
        config: echo,
        summary: Vec::new(),
        table: amplitude_table(&series),
    };
    finish("survival", &c, vec![(c.out.clone(), doc)], failure)
}

#[derive(Debug, Clone, Default, Args)]
pub struct StateArgs {
    /// Population of level 0 (default 0.5).
    #[arg(long)]
    pub rho00: Option<f64>,
    /// Real part of the coherence ρ01 (default 0.5).
    #[arg(long, allow_negative_numbers = true)]
    pub rho01_re: Option<f64>,
    /// Imaginary part of the coherence ρ01 (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub rho01_im: Option<f64>,
}

impl StateArgs {
    fn resolve(&self, file: &FileConfig) -> Result<(QubitState, toml::Table), String> {
        let rho00 = self.rho00.or(file.state.rho00).unwrap_or(0.5);
        let re = self.rho01_re.or(file.state.re_rho01).unwrap_or(0.5);
        let im = self.rho01_im.or(file.state.im_rho01).unwrap_or(0.0);
        let state = QubitState::from_population(rho00, Complex64::new(re, im))
            .map_err(|e| e.to_string())?;
        let mut echo = toml::Table::new();
        echo.insert("rho00".into(), toml::Value::Float(rho00));
        echo.insert("re_rho01".into(), toml::Value::Float(re));
        echo.insert("im_rho01".into(), toml::Value::Float(im));
        Ok((state, echo))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReducedArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub state: StateArgs,
    /// Environment density (default: Lorentzian of the model).
    #[arg(long)]
    pub density: Option<String>,
}

struct Setup {
    c: config::Common,
    model: PocketModel,
    rho0: QubitState,
    echo: toml::Table,
    times: Vec<f64>,
}

fn model_setup(
    command: &str,
    common: &CommonArgs,
    state: &StateArgs,
    density: Option<&str>,
) -> Result<Setup, String> {
    let file = load(common)?;
    let c = config::Common::resolve(command, common, &file)?;
    let (rho0, state_echo) = state.resolve(&file)?;
    let (d, spec) = config::resolve_density(density, &file, c.model)?;
    let model = PocketModel::with_environment(c.model, InitialStateSpec::real(d), &c.quadrature)
        .map_err(|e| e.to_string())?;
    let mut echo = c.echo(command);
    insert(&mut echo, "density", &spec);
    echo.insert("state".into(), toml::Value::Table(state_echo));
    let times = c.grid.times()?;
    Ok(Setup {
        c,
        model,
        rho0,
        echo,
        times,
    })
}

fn factor_series(s: &Setup) -> Result<(ComplexTimeSeries, Option<Error>), String> {
    let cfg = s.c.quadrature;
    ComplexTimeSeries::tabulate_prefix(
        &s.times,
        meta(
            s.model.environment().density.label(),
            "dephasing_factor",
            &cfg,
        ),
        |t| pocket::dephasing_factor(&s.model, t, &cfg),
    )
    .map_err(|e| e.to_string())
}

pub fn reduced(args: &ReducedArgs) -> Result<Run, String> {
    let s = model_setup(
        "reduced",
        &args.common,
        &args.state,
        args.density.as_deref(),
    )?;
    let (factors, failure) = factor_series(&s)?;
    let mut table = Table::new(&["t", "rho00", "rho11", "re_rho01", "im_rho01", "sigma_x"]);
    for (t, f) in factors.iter() {
        let r = pocket::reduced_from_factor(&s.rho0, t, f).map_err(|e| e.to_string())?;
        table.push(vec![
            t,
            r.rho00(),
            r.rho11(),
            r.rho01().re,
            r.rho01().im,
            r.sigma_x(),
        ]);
    }
    let doc = Document {
        title: "reduced".into(),
        config: s.echo,
        summary: Vec::new(),
        table,
    };
    finish("reduced", &s.c, vec![(s.c.out.clone(), doc)], failure)
}

pub fn gkls_compare(args: &ReducedArgs) -> Result<Run, String> {
    let s = model_setup(
        "gkls-compare",
        &args.common,
        &args.state,
        args.density.as_deref(),
    )?;
    if let Some(t) = s.times.iter().find(|t| **t < 0.0) {
        return Err(Error::NegativeTime(*t).to_string());
    }
    let (factors, failure) = factor_series(&s)?;
    let p = s.c.model;
    let matched = gkls::generator_from_params(p, Convention::Matched);
    let literal = gkls::generator_from_params(p, Convention::Literal);
    let rm = gkls::compare_with_factors(&matched, &s.rho0, &factors).map_err(|e| e.to_string())?;
    let rl = gkls::compare_with_factors(&literal, &s.rho0, &factors).map_err(|e| e.to_string())?;
    let mut table = Table::new(&[
        "t",
        "exact_re_rho01",
        "exact_im_rho01",
        "distance_matched",
        "distance_literal",
    ]);
    for (a, b) in rm.rows.iter().zip(&rl.rows) {
        table.push(vec![
            a.time,
            a.exact.rho01().re,
            a.exact.rho01().im,
            a.distance,
            b.distance,
        ]);
    }
    let summary: Vec<(String, Value)> = vec![
        ("matched_c_h".into(), matched.hamiltonian_coeff().into()),
        ("matched_c_d".into(), matched.dissipator_coeff().into()),
        ("literal_c_h".into(), literal.hamiltonian_coeff().into()),
        ("literal_c_d".into(), literal.dissipator_coeff().into()),
        ("max_distance_matched".into(), rm.max_distance().into()),
        ("max_distance_literal".into(), rl.max_distance().into()),
    ];
    let doc = Document {
        title: "gkls-compare".into(),
        config: s.echo,
        summary,
        table,
    };
    finish("gkls-compare", &s.c, vec![(s.c.out.clone(), doc)], failure)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PwAmplitude {
    /// Dephasing factor of the model, `e^{-γ|t|/2 - iω₀t}`.
    Subsystem,
    /// Survival amplitude of the chosen density.
    Density,
    /// Global survival amplitude of the model.
    Global,
    /// `a(t) = 1`.
    Constant,
}

#[derive(Debug, Clone, Args)]
pub struct PwArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub density: Option<String>,
    #[arg(long, value_enum)]
    pub amplitude: Option<PwAmplitude>,
    /// Truncation points T, comma separated (default 10,100,1000).
    #[arg(long, value_delimiter = ',')]
    pub t_values: Option<Vec<f64>>,
    /// Fit window `a,b` (default: the whole time grid).
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub fit_window: Option<Vec<f64>>,
    #[arg(long)]
    pub weight0: Option<f64>,
}

/// Survival amplitude of a density in closed form, where one is known.
fn closed_form(spec: &DensitySpec) -> Option<Box<dyn Fn(f64) -> Complex64 + Send + Sync>> {
    match *spec {
        DensitySpec::Lorentzian {
            gamma: Some(g),
            omega0: Some(w),
        } => {
            let p = DephasingParams::new(g, w).ok()?;
            Some(Box::new(move |t| p.exponential_amplitude(t)))
        }
        DensitySpec::Exponential { rate, onset } => {
            // rate ∫_onset^∞ e^{-rate(E - onset)} e^{-iEt} dE
            Some(Box::new(move |t| {
                Complex64::from_polar(1.0, -onset * t) * rate / Complex64::new(rate, t)
            }))
        }
        _ => None,
    }
}

pub fn pw(args: &PwArgs) -> Result<Run, String> {
    let file = load(&args.common)?;
    let c = config::Common::resolve("pw", &args.common, &file)?;
    let (d, spec) = config::resolve_density(args.density.as_deref(), &file, c.model)?;
    let kind = args
        .amplitude
        .or(parse_choice("amplitude", file.pw.amplitude.as_ref())?)
        .unwrap_or(PwAmplitude::Subsystem);
    let ts = args
        .t_values
        .clone()
        .or(file.pw.t_values.clone())
        .unwrap_or_else(|| vec![10.0, 100.0, 1000.0]);
    let weights = weight(args.weight0.or(file.pw.weight0).unwrap_or(0.5))?;
    let times = c.grid.times()?;
    let window = match args
        .fit_window
        .as_deref()
        .map(|w| [w[0], w[1]])
        .or(file.pw.fit_window)
    {
        Some(w) => (w[0], w[1]),
        None => (times[0], times[times.len() - 1]),
    };
    let cfg = c.quadrature;

    #[derive(Serialize)]
    struct Echo {
        amplitude: PwAmplitude,
        t_values: Vec<f64>,
        fit_window: [f64; 2],
        #[serde(skip_serializing_if = "Option::is_none")]
        weight0: Option<f64>,
    }
    let mut echo = c.echo("pw");
    if matches!(kind, PwAmplitude::Density | PwAmplitude::Global) {
        insert(&mut echo, "density", &spec);
    }
    insert(
        &mut echo,
        "pw",
        &Echo {
            amplitude: kind,
            t_values: ts.clone(),
            fit_window: [window.0, window.1],
            weight0: (kind == PwAmplitude::Global).then_some(weights.0),
        },
    );

    let model = c.model;
    let (amplitude, series, failure): (Box<dyn Amplitude>, ComplexTimeSeries, Option<Error>) =
        match kind {
            PwAmplitude::Subsystem => {
                let m = PocketModel::new(model);
                let (s, f) = ComplexTimeSeries::tabulate_prefix(
                    &times,
                    meta("lorentzian", "dephasing_factor", &cfg),
                    |t| pocket::dephasing_factor(&m, t, &cfg),
                )
                .map_err(|e| e.to_string())?;
                (
                    Box::new(ClosedForm(move |t: f64| model.exponential_amplitude(t))),
                    s,
                    f,
                )
            }
            PwAmplitude::Density => {
                let (s, f) = ComplexTimeSeries::tabulate_prefix(
                    &times,
                    meta(d.label(), "fourier_amplitude", &cfg),
                    |t| oscint::fourier_amplitude(&d, t, &cfg),
                )
                .map_err(|e| e.to_string())?;
                let a: Box<dyn Amplitude> = match closed_form(&spec) {
                    Some(f) => Box::new(ClosedForm(f)),
                    None if f.is_none() => Box::new(Sampled::new(&s).map_err(|e| e.to_string())?),
                    None => Box::new(ClosedForm(|_| Complex64::new(1.0, 0.0))),
                };
                (a, s, f)
            }
            PwAmplitude::Global => {
                if times[0] != 0.0 || c.grid.spacing != Spacing::Linear {
                    return Err(
                        "the global amplitude is sampled on a linear grid starting at t = 0".into(),
                    );
                }
                match diagnostics::global_survival_amplitude(
                    weights,
                    &d,
                    times[times.len() - 1],
                    times.len(),
                    &cfg,
                ) {
                    Ok((s, a)) => (Box::new(a), s, None),
                    Err(e) => {
                        let empty = ComplexTimeSeries::new(
                            Vec::new(),
                            Vec::new(),
                            meta(d.label(), "global_survival", &cfg),
                        )
                        .expect("empty series is valid");
                        (
                            Box::new(ClosedForm(|_| Complex64::new(1.0, 0.0))),
                            empty,
                            Some(e),
                        )
                    }
                }
            }
            PwAmplitude::Constant => {
                let s = ComplexTimeSeries::new(
                    times.clone(),
                    vec![Complex64::new(1.0, 0.0); times.len()],
                    meta("constant", "constant", &cfg),
                )
                .map_err(|e| e.to_string())?;
                (Box::new(ClosedForm(|_| Complex64::new(1.0, 0.0))), s, None)
            }
        };

    let mut docs = vec![(
        c.out.clone(),
        Document {
            title: "pw".into(),
            config: echo.clone(),
            summary: Vec::new(),
            table: Table::new(&["T", "pw"]),
        },
    )];
    if let Some(e) = failure {
        return finish("pw", &c, docs, Some(e));
    }
    let report = match diagnostics::decay_report(amplitude.as_ref(), &ts, &series, window, &cfg) {
        Ok(r) => r,
        Err(e) => return finish("pw", &c, docs, Some(e)),
    };
    let g = &report.growth;
    let mut table = Table::new(&["T", "pw"]);
    for &(t, v) in &g.pw_values {
        table.push(vec![t, v]);
    }
    let mut summary: Vec<(String, Value)> = vec![
        ("class".into(), g.class.name().into()),
        ("c0".into(), g.c0.into()),
        ("c1".into(), g.c1.into()),
        ("relative_residual".into(), g.relative_residual.into()),
        (
            "last_decade_increment".into(),
            g.last_decade_increment.into(),
        ),
    ];
    match &report.fit {
        Some(f) => summary.extend([
            ("fit_rate".to_string(), f.rate.into()),
            ("fit_amplitude".to_string(), f.amplitude.into()),
            ("fit_residual".to_string(), f.residual.into()),
            ("fit_samples".to_string(), f.samples.into()),
        ]),
        None => summary.push(("fit".into(), "omitted (too few usable samples)".into())),
    }
    summary.push(("longtime_abs".into(), report.longtime_value.into()));
    docs[0].1.summary = summary;
    docs[0].1.table = table;
    finish("pw", &c, docs, None)
}

#[derive(Debug, Clone, Args)]
pub struct PotentialArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// ramp, exp, or an expression in x such as "max(x,0)^2 + max(x,0)".
    #[arg(long)]
    pub potential: Option<String>,
    /// pullback or pushforward (profile only; the factor always uses the
    /// pullback state).
    #[arg(long)]
    pub construction: Option<String>,
    /// Use finite differences for V' even when a formula is known.
    #[arg(long)]
    pub numeric_derivative: bool,
    /// Half-width of the profile grid.
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub x_points: Option<usize>,
}

pub fn potential_fn(spec: &str) -> Result<PotentialFn, String> {
    Ok(match spec.trim() {
        "ramp" => PotentialFn::ramp(),
        "exp" => PotentialFn::exponential(),
        expr => {
            let e = Expr::parse(expr).map_err(|err| format!("potential {expr:?}: {err}"))?;
            PotentialFn::new(expr, move |x| e.eval(x))
        }
    })
}

fn profile(
    p: &MonotonePotential,
    state: &InitialStateSpec,
    x_max: f64,
    n: usize,
) -> Result<(Table, f64), String> {
    if !(x_max > 0.0 && x_max.is_finite()) || n < 2 {
        return Err("profile needs x_max > 0 and at least 2 points".into());
    }
    let mut table = Table::new(&["x", "density", "w", "roundtrip_residual"]);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let x = -x_max + 2.0 * x_max * k as f64 / (n - 1) as f64;
        let w = p.w(x);
        let back = p.w_inverse(w).map_err(|e| e.to_string())?;
        let r = (back - x).abs();
        worst = worst.max(r);
        table.push(vec![x, state.density.evaluate(x), w, r]);
    }
    Ok((table, worst))
}

pub fn potential(args: &PotentialArgs) -> Result<Run, String> {
    let file = load(&args.common)?;
    let c = config::Common::resolve("potential", &args.common, &file)?;
    let spec = args
        .potential
        .clone()
        .or(file.potential.spec.clone())
        .unwrap_or_else(|| "exp".into());
    let construction: StateConstruction = args
        .construction
        .as_ref()
        .or(file.potential.construction.as_ref())
        .map(|s| s.parse::<StateConstruction>().map_err(|e| e.to_string()))
        .transpose()?
        .unwrap_or_default();
    let numeric = args.numeric_derivative || file.potential.numeric_derivative.unwrap_or(false);
    let x_max = args.x_max.or(file.potential.x_max).unwrap_or(20.0);
    let x_points = args.x_points.or(file.potential.x_points).unwrap_or(101);

    let mut v = potential_fn(&spec)?;
    if numeric {
        v = v.without_derivative();
    }
    let p = potential::induced_map(v).map_err(|e| e.to_string())?;
    let state =
        potential::build_initial_state(&p, c.model, construction).map_err(|e| e.to_string())?;
    let (profile_table, worst) = profile(&p, &state, x_max, x_points)?;
    let times = c.grid.times()?;

    #[derive(Serialize)]
    struct Echo<'a> {
        spec: &'a str,
        construction: &'a str,
        derivative: &'a str,
        x_max: f64,
        x_points: usize,
    }
    let mut echo = c.echo("potential");
    insert(
        &mut echo,
        "potential",
        &Echo {
            spec: &spec,
            construction: construction.name(),
            derivative: if p.has_analytic_derivative() {
                "analytic"
            } else {
                "finite-difference"
            },
            x_max,
            x_points,
        },
    );

    let cfg = c.quadrature;
    let model = c.model;
    let label = format!("pullback[{}]", p.label());
    let (series, failure) = ComplexTimeSeries::tabulate_prefix(
        &times,
        meta(&label, "generalized_dephasing_factor", &cfg),
        |t| potential::generalized_dephasing_factor(&p, model, t, &cfg),
    )
    .map_err(|e| e.to_string())?;

    let mut summary: Vec<(String, Value)> = vec![
        ("factor_state".into(), "pullback".into()),
        ("expected_rate".into(), (model.gamma() / 2.0).into()),
        ("max_roundtrip_residual".into(), worst.into()),
    ];
    if failure.is_none() {
        match diagnostics::exponential_fit(&series, (times[0], times[times.len() - 1])) {
            Ok(f) => summary.extend([
                ("fit_rate".to_string(), f.rate.into()),
                ("fit_amplitude".to_string(), f.amplitude.into()),
                ("fit_residual".to_string(), f.residual.into()),
                ("fit_samples".to_string(), f.samples.into()),
            ]),
            Err(Error::InsufficientData(_)) => {
                summary.push(("fit".into(), "omitted (too few usable samples)".into()))
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    let main = Document {
        title: "potential".into(),
        config: echo.clone(),
        summary,
        table: amplitude_table(&series),
    };
    let side = Document {
        title: "potential profile".into(),
        config: echo,
        summary: vec![(
            "max_roundtrip_residual".into(),
            Value::Text(fmt_float(worst)),
        )],
        table: profile_table,
    };
    let docs = vec![(c.out.clone(), main), (sibling(&c.out, "profile"), side)];
    finish("potential", &c, docs, failure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potentials_from_specs() {
        let p = potential::induced_map(potential_fn("ramp").unwrap()).unwrap();
        assert!(p.has_analytic_derivative());
        let p = potential::induced_map(potential_fn("exp(x)").unwrap()).unwrap();
        assert!(!p.has_analytic_derivative());
        assert!((p.w(1.0) - 2.0 * 1f64.sinh()).abs() < 1e-15);
        assert!(potential_fn("exp(").is_err());
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("a/b.csv")),
            PathBuf::from("a/b.csv.failure.toml")
        );
    }

    #[test]
    fn exponential_closed_form() {
        let f = closed_form(&DensitySpec::Exponential {
            rate: 2.0,
            onset: 0.0,
        })
        .unwrap();
        assert!((f(2.0) - Complex64::new(2.0, 0.0) / Complex64::new(2.0, 2.0)).norm() < 1e-15);
        assert!(closed_form(&DensitySpec::Lorentzian {
            gamma: None,
            omega0: None
        })
        .is_none());
    }
}
