//! The five subcommands.

use std::f64::consts::SQRT_2;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use gentp_core::apf::PeriodicStep;
use gentp_core::gnum::{GClass, GClassKind};
use gentp_core::spectral::{GapClass, SpectrumSupportReport};
use gentp_core::tp::{
    closed_form_2x2, monte_carlo_tp_traced, schrodinger_amplitude_net, triple_exponential, ClosedForm, McReport,
    NuParams, NuResult, TpMethod, TRIPLE_EXPONENTIAL_C, TRIPLE_EXPONENTIAL_SUP_SUM,
};
use gentp_core::{
    amplitude_net, classify, dominated_support, make_net, mean_direct, mean_subst, mean_tail, nu_scalar, parse,
    sharp_valuation, spectrum_support, support, APSample, DirectParams, Expr, GNet, MeanEstimate, NetSource,
    SamplingPlan, SubstParams, TPReport, TailParams, TpError, TrigPoly,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{self, read_config, Loaded, PlanOverride, RunConfig, TpMethodArg};
use crate::output::{to_json, write_trace_file};
use crate::{CliError, Outcome, EXIT_MISMATCH, EXIT_NON_CONVERGENCE, EXIT_OK, EXIT_PRECONDITION};

#[derive(Debug, Clone, Default, Args)]
pub struct PlanArgs {
    /// Largest grid point.
    #[arg(long)]
    pub eps_max: Option<f64>,
    /// Grid ratio q in (0, 1).
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub count: Option<usize>,
}

impl PlanArgs {
    fn overrides(&self, base: PlanOverride) -> PlanOverride {
        PlanOverride {
            eps_max: self.eps_max.or(base.eps_max),
            ratio: self.ratio.or(base.ratio),
            count: self.count.or(base.count),
        }
    }
}

// ---------------------------------------------------------------- classify

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Expression in eps, or a builtin (`alpha`, `osc(a,b)`).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub expr: Option<String>,
    /// Classify every upper-triangle entry of a run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub radius: f64,
    #[command(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyEntry {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<(usize, usize)>,
    pub kind: GClassKind,
    pub limit: Option<f64>,
    #[serde(with = "gentp_core::serde_ext::opt_f64_ext")]
    pub v_hat: Option<f64>,
    pub support: Vec<f64>,
    pub unbounded: bool,
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub plan: SamplingPlan,
    pub tol: f64,
    pub entries: Vec<ClassifyEntry>,
}

fn net_from_text(text: &str, plan: &SamplingPlan) -> Result<GNet, CliError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "alpha" || compact.starts_with("osc(") {
        return make_net(NetSource::Builtin(text), plan).map_err(|e| CliError::Input(e.to_string()));
    }
    let expr = parse(text).map_err(|e| CliError::Input(format!("{text:?}: {e}")))?;
    make_net(NetSource::Expr(&expr), plan).map_err(|e| CliError::Input(e.to_string()))
}

fn classify_entry(source: &str, position: Option<(usize, usize)>, x: &GNet, tol: f64, radius: f64) -> ClassifyEntry {
    let c = classify(x, tol);
    let s = support(x, radius);
    ClassifyEntry {
        source: source.to_string(),
        position,
        kind: c.kind,
        limit: c.finite_limit(),
        v_hat: sharp_valuation(x).ok().map(|v| v.v_hat),
        support: s.points,
        unbounded: s.unbounded,
        low_confidence: c.low_confidence,
    }
}

pub fn classify_cmd(a: &ClassifyArgs) -> Result<Outcome, CliError> {
    if !(a.tol > 0.0 && a.radius > 0.0) {
        return Err(CliError::Input("tol and radius must be positive".into()));
    }
    let mut entries = Vec::new();
    let plan;
    if let Some(text) = &a.expr {
        plan = a.plan.overrides(PlanOverride::default()).apply()?;
        let x = net_from_text(text, &plan)?;
        entries.push(classify_entry(text, None, &x, a.tol, a.radius));
    } else {
        let cfg = read_config(a.config.as_ref().expect("clap enforces one input"))?;
        plan = a.plan.overrides(cfg.plan).apply()?;
        for (i, row) in cfg.matrix.iter().enumerate() {
            for (j, text) in row.iter().enumerate().skip(i) {
                let x = net_from_text(text, &plan)?;
                entries.push(classify_entry(text, Some((i, j)), &x, a.tol, a.radius));
            }
        }
    }
    let inconclusive = entries.iter().all(|e| e.low_confidence);
    Ok(Outcome {
        document: to_json(&ClassifyReport {
            plan,
            tol: a.tol,
            entries,
        }),
        code: if inconclusive { EXIT_NON_CONVERGENCE } else { EXIT_OK },
        warnings: if inconclusive {
            vec!["every classification is low-confidence".into()]
        } else {
            Vec::new()
        },
    })
}

// --------------------------------------------------------------- meanvalue

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMethodArg {
    Direct,
    Tail,
    Subst,
}

#[derive(Debug, Clone, Args)]
pub struct MeanArgs {
    /// abs_sin, sin, cos, two_frequency, step:BETA or constant:C.
    #[arg(long, conflicts_with = "trigpoly", required_unless_present = "trigpoly")]
    pub function: Option<String>,
    /// Trigonometric polynomial `c1@l1,c2@l2,...` (real coefficients).
    #[arg(long)]
    pub trigpoly: Option<String>,
    #[arg(long, value_enum, default_value_t = MeanMethodArg::Direct)]
    pub method: MeanMethodArg,
    /// Averages |f|^p instead of f.
    #[arg(long)]
    pub power: Option<f64>,
    /// Weight exponent for the tail formula.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Substitution exponent: x = 1/eps^c.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// First horizon T (direct and tail).
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub doublings: Option<u32>,
    /// Nodes per horizon (subst).
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest acceptable Cauchy gap.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValueReport {
    pub function: String,
    pub method: MeanMethodArg,
    pub params: serde_json::Value,
    pub estimate: MeanEstimate,
}

fn parse_trigpoly(text: &str) -> Result<TrigPoly, CliError> {
    let bad = |t: &str| CliError::Input(format!("trig-poly term {t:?} is not of the form c@lambda"));
    let terms = text
        .split(',')
        .map(|t| {
            let (c, l) = t.trim().split_once('@').ok_or_else(|| bad(t))?;
            let c: f64 = c.trim().parse().map_err(|_| bad(t))?;
            let l: f64 = l.trim().parse().map_err(|_| bad(t))?;
            Ok((Complex64::new(c, 0.0), l))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    TrigPoly::new(terms).map_err(|e| CliError::Input(e.to_string()))
}

fn named_function(name: &str) -> Result<APSample, CliError> {
    let number = |s: &str| -> Result<f64, CliError> {
        s.parse()
            .map_err(|_| CliError::Input(format!("bad number {s:?} in function {name:?}")))
    };
    let vib = |terms: Vec<(f64, f64)>| {
        let t = terms.into_iter().map(|(c, l)| (Complex64::new(c, 0.0), l)).collect();
        APSample::trig_poly(&TrigPoly::new(t).expect("distinct frequencies"))
    };
    Ok(match name {
        "abs_sin" => APSample::abs_sin(),
        "cos" => vib(vec![(0.5, 1.0), (0.5, -1.0)]),
        "sin" => APSample::trig_poly(
            &TrigPoly::new(vec![(Complex64::new(0.0, -0.5), 1.0), (Complex64::new(0.0, 0.5), -1.0)])
                .expect("distinct frequencies"),
        ),
        "two_frequency" => vib(vec![(0.5, 1.0), (0.5, -1.0), (0.5, SQRT_2), (0.5, -SQRT_2)]),
        _ => {
            if let Some(b) = name.strip_prefix("step:") {
                APSample::step(PeriodicStep::new(number(b)?).map_err(|e| CliError::Input(e.to_string()))?)
            } else if let Some(c) = name.strip_prefix("constant:") {
                APSample::constant(number(c)?)
            } else {
                return Err(CliError::Input(format!("unknown function {name:?}")));
            }
        }
    })
}

pub fn meanvalue_cmd(a: &MeanArgs) -> Result<Outcome, CliError> {
    let (label, mut f) = match (&a.function, &a.trigpoly) {
        (Some(name), _) => (name.clone(), named_function(name)?),
        (None, Some(text)) => (text.clone(), APSample::trig_poly(&parse_trigpoly(text)?)),
        (None, None) => return Err(CliError::Input("need --function or --trigpoly".into())),
    };
    if let Some(p) = a.power {
        if !(p > 0.0) {
            return Err(CliError::Input(format!("power must be positive, got {p}")));
        }
        f = f.abs_pow(p);
    }
    let invalid = |e: gentp_core::ApfError| CliError::Input(e.to_string());
    let (params, estimate) = match a.method {
        MeanMethodArg::Direct => {
            let d = DirectParams::default();
            let p = DirectParams {
                t0: a.t0.unwrap_or(d.t0),
                doublings: a.doublings.unwrap_or(d.doublings),
                tol: a.tol.unwrap_or(d.tol),
            };
            (serde_json::to_value(p), mean_direct(&f, &p).map_err(invalid)?)
        }
        MeanMethodArg::Tail => {
            let d = TailParams::default();
            let p = TailParams {
                gamma: a.gamma,
                t0: a.t0.unwrap_or(d.t0),
                doublings: a.doublings.unwrap_or(d.doublings),
                tol: a.tol.unwrap_or(d.tol),
                ..d
            };
            (serde_json::to_value(p), mean_tail(&f, &p).map_err(invalid)?)
        }
        MeanMethodArg::Subst => {
            let d = SubstParams::power(a.c);
            let p = SubstParams {
                nodes: a.nodes.unwrap_or(d.nodes),
                seed: a.seed.unwrap_or(d.seed),
                tol: a.tol.unwrap_or(d.tol),
                ..d
            };
            let echo = serde_json::json!({
                "c": a.c,
                "horizons": p.horizons,
                "nodes": p.nodes,
                "seed": p.seed,
                "tol": p.tol,
            });
            (Ok(echo), mean_subst(&f, &p).map_err(invalid)?)
        }
    };
    let converged = estimate.converged;
    let report = MeanValueReport {
        function: label,
        method: a.method,
        params: params.expect("parameters serialize"),
        estimate,
    };
    Ok(Outcome {
        document: to_json(&report),
        code: if converged { EXIT_OK } else { EXIT_NON_CONVERGENCE },
        warnings: if converged {
            Vec::new()
        } else {
            vec![format!("not converged: Cauchy gap {:e}", report.estimate.gap)]
        },
    })
}

// ---------------------------------------------------------------------- tp

#[derive(Debug, Clone, Args)]
pub struct TpArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the method in the configuration.
    #[arg(long, value_enum)]
    pub method: Option<TpMethodCli>,
    /// Writes the Monte-Carlo trace as `eps,amplitude,running_mean`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Writes the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TpMethodCli {
    ClosedForm,
    MonteCarlo,
    Both,
}

impl From<TpMethodCli> for TpMethodArg {
    fn from(m: TpMethodCli) -> Self {
        match m {
            TpMethodCli::ClosedForm => TpMethodArg::ClosedForm,
            TpMethodCli::MonteCarlo => TpMethodArg::MonteCarlo,
            TpMethodCli::Both => TpMethodArg::Both,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpRunReport {
    pub config: RunConfig,
    pub eigenvalues: Vec<GClass>,
    pub gaps: Vec<GapClass>,
    pub closed_form: Option<ClosedForm>,
    pub monte_carlo: Option<McReport>,
    pub nu: Option<NuResult>,
    pub results: Vec<TPReport>,
    pub warnings: Vec<String>,
    pub timing_seconds: f64,
}

/// Everything `tp` computes, before it is written anywhere.
pub struct TpRun {
    pub report: TpRunReport,
    pub trace: Vec<(f64, f64)>,
    pub code: i32,
}

pub fn run_tp(loaded: &Loaded, method: TpMethodArg, want_trace: bool) -> Result<TpRun, CliError> {
    let start = Instant::now();
    let Loaded {
        config,
        net,
        pair,
        plan: _,
        warnings,
    } = loaded;
    let mut warnings = warnings.clone();
    let mut code = EXIT_OK;

    let (eigenvalues, gaps) = match spectrum_support(net, config.tol) {
        Ok(SpectrumSupportReport { eigenvalues, gaps, .. }) => (eigenvalues, gaps),
        Err(e) => {
            warnings.push(format!("eigenvalue nets unavailable: {e}"));
            (Vec::new(), Vec::new())
        }
    };

    let mut results = Vec::new();
    let mut closed = None;
    let mut run_mc = method != TpMethodArg::ClosedForm || want_trace;
    if method != TpMethodArg::MonteCarlo {
        match closed_form_2x2(net, pair, config.tol) {
            Ok(c) => {
                let mut notes = vec![format!("gap {}, g1*g3 {}", c.gap_class, c.a1_class)];
                if let Some(k0) = c.k0 {
                    notes.push(format!("k0 = {k0}"));
                }
                results.push(TPReport {
                    method: TpMethod::ClosedForm2x2,
                    value: c.value,
                    stderr: None,
                    support: vec![c.value],
                    classical: Some(true),
                    notes,
                });
                closed = Some(c);
            }
            Err(TpError::PreconditionNotMet(why)) => {
                warnings.push(format!("closed form does not apply ({why}); falling back to Monte Carlo"));
                run_mc = true;
                if method == TpMethodArg::ClosedForm {
                    code = EXIT_PRECONDITION;
                }
            }
            Err(e) => return Err(CliError::Input(e.to_string())),
        }
    }

    let mut mc = None;
    let mut trace = Vec::new();
    if run_mc {
        let (r, t) = monte_carlo_tp_traced(net, pair, config.eta, config.samples, config.seed, want_trace)
            .map_err(|e| CliError::Input(e.to_string()))?;
        if !r.valid {
            warnings.push(format!("{} of {} draws overflowed; the estimate is invalid", r.dropped, r.draws));
            code = code.max(EXIT_NON_CONVERGENCE);
        }
        results.push(TPReport {
            method: TpMethod::MonteCarlo,
            value: r.mean,
            stderr: Some(r.stderr),
            support: Vec::new(),
            classical: None,
            notes: vec![format!("eta = {}, N = {}, seed = {}", r.eta, r.draws, config.seed)],
        });
        mc = Some(r);
        trace = t;
    }

    let mut nu = None;
    if method == TpMethodArg::Both {
        match amplitude_net(net, pair) {
            Ok(amp) => {
                let p = NuParams {
                    seed: config.seed,
                    ..NuParams::default()
                };
                let r = nu_scalar(&amp, &p).map_err(|e| CliError::Input(e.to_string()))?;
                results.push(TPReport {
                    method: TpMethod::Quadrature,
                    value: *r.values.last().expect("non-empty schedule"),
                    stderr: r.stderrs.last().copied(),
                    support: r.support.clone(),
                    classical: Some(r.classical),
                    notes: vec![format!("stratified averages for eta from {:e} to {:e}", p.schedule[0], p.schedule[p.schedule.len() - 1])],
                });
                nu = Some(r);
            }
            Err(e) => warnings.push(format!("amplitude net unavailable: {e}")),
        }
    }

    Ok(TpRun {
        report: TpRunReport {
            config: config.clone(),
            eigenvalues,
            gaps,
            closed_form: closed,
            monte_carlo: mc,
            nu,
            results,
            warnings,
            timing_seconds: start.elapsed().as_secs_f64(),
        },
        trace,
        code,
    })
}

pub fn tp_cmd(a: &TpArgs) -> Result<Outcome, CliError> {
    let mut cfg = read_config(&a.config)?;
    cfg.plan = a.plan.overrides(cfg.plan);
    let method = a.method.map(Into::into).unwrap_or(cfg.method);
    let out = a.out.clone().or_else(|| cfg.out.clone());
    let loaded = cfg.load()?;
    let run = run_tp(&loaded, method, a.csv.is_some())?;
    if let Some(path) = &a.csv {
        write_trace_file(path, &run.trace)?;
    }
    let document = to_json(&run.report);
    let warnings = run.report.warnings.clone();
    if let Some(path) = out {
        std::fs::write(&path, &document).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return Ok(Outcome {
            document: String::new(),
            code: run.code,
            warnings,
        });
    }
    Ok(Outcome {
        document,
        code: run.code,
        warnings,
    })
}

// ---------------------------------------------------------------- spectrum

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Classification tolerance; defaults to the configuration's.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub matrix: Vec<Vec<String>>,
    pub plan: SamplingPlan,
    pub overflow_points: Vec<f64>,
    pub spectrum: Option<SpectrumSupportReport>,
}

pub fn spectrum_cmd(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let mut cfg = read_config(&a.config)?;
    cfg.plan = a.plan.overrides(cfg.plan);
    let tol = a.tol.unwrap_or(cfg.tol);
    let loaded = cfg.load()?;
    let overflow_points = loaded.net.overflow_points();
    let mut warnings = loaded.warnings.clone();
    let spectrum = if overflow_points.is_empty() {
        Some(spectrum_support(&loaded.net, tol).map_err(|e| CliError::Input(e.to_string()))?)
    } else {
        warnings.push(format!("{} grid points overflow; no eigenvalue nets", overflow_points.len()));
        None
    };
    let inconclusive = spectrum
        .as_ref()
        .is_none_or(|s| s.eigenvalues.iter().all(|c| c.low_confidence));
    Ok(Outcome {
        document: to_json(&SpectrumReport {
            matrix: loaded.config.matrix.clone(),
            plan: loaded.plan,
            overflow_points,
            spectrum,
        }),
        code: if inconclusive { EXIT_NON_CONVERGENCE } else { EXIT_OK },
        warnings,
    })
}

// --------------------------------------------------------------- reproduce

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// Writes the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

/// Closed-form values must match the reference values to this.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproRow {
    pub case: String,
    pub config: Option<String>,
    pub reference: Option<f64>,
    pub closed_form: Option<f64>,
    pub k0: Option<f64>,
    pub monte_carlo: Option<f64>,
    pub stderr: Option<f64>,
    pub support: Vec<f64>,
    /// `|closed_form - reference| <= 1e-6`; absent without a reference.
    pub matched: Option<bool>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub rows: Vec<ReproRow>,
    pub all_matched: bool,
}

fn matrix_row(case: &str, name: &str, reference: Option<f64>) -> Result<ReproRow, CliError> {
    let loaded = config::shipped(name).load()?;
    let run = run_tp(&loaded, TpMethodArg::ClosedForm, false)?;
    let r = run.report;
    let closed = r.closed_form.as_ref().map(|c| c.value);
    let mc = r.monte_carlo.as_ref();
    Ok(ReproRow {
        case: case.into(),
        config: Some(name.into()),
        reference,
        closed_form: closed,
        k0: r.closed_form.as_ref().and_then(|c| c.k0),
        monte_carlo: mc.map(|m| m.mean),
        stderr: mc.map(|m| m.stderr),
        support: Vec::new(),
        matched: reference.map(|p| closed.is_some_and(|c| (c - p).abs() <= MATCH_TOL)),
        notes: r.warnings,
    })
}

/// Monte Carlo alongside the closed form, even when the latter applies.
fn with_monte_carlo(mut row: ReproRow) -> Result<ReproRow, CliError> {
    let name = row.config.clone().expect("matrix rows name a config");
    let loaded = config::shipped(&name).load()?;
    let run = run_tp(&loaded, TpMethodArg::MonteCarlo, false)?;
    let mc = run.report.monte_carlo.expect("monte carlo requested");
    row.monte_carlo = Some(mc.mean);
    row.stderr = Some(mc.stderr);
    Ok(row)
}

fn diagonal_row() -> Result<ReproRow, CliError> {
    let cfg = config::shipped("diagonal_powers");
    let mut row = with_monte_carlo(matrix_row(
        "diag(g/eps, g/eps^2), Hadamard pair",
        "diagonal_powers",
        Some(std::f64::consts::FRAC_2_PI),
    )?)?;
    // the same amplitude through the diagonal propagator, averaged over eta
    let exprs: Vec<Vec<Expr>> = cfg
        .matrix
        .iter()
        .map(|r| r.iter().map(|s| parse(s)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let loaded = cfg.load()?;
    let amp = schrodinger_amplitude_net(&exprs, 1.0, 0.0, 1.0, &loaded.pair, &loaded.plan)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let nu = nu_scalar(&amp, &NuParams::default()).map_err(|e| CliError::Input(e.to_string()))?;
    row.support = nu.support.clone();
    row.notes.push(format!(
        "nu via the diagonal propagator: {} +- {}",
        nu.values.last().expect("non-empty"),
        nu.stderrs.last().expect("non-empty")
    ));
    Ok(row)
}

fn triple_row() -> Result<ReproRow, CliError> {
    let f = triple_exponential(&SamplingPlan::default());
    let r = dominated_support(&f, TRIPLE_EXPONENTIAL_C, TRIPLE_EXPONENTIAL_SUP_SUM, &NuParams::default())
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(ReproRow {
        case: "triple exponential".into(),
        config: None,
        reference: None,
        closed_form: None,
        k0: None,
        monte_carlo: r.nu.values.last().copied(),
        stderr: r.nu.stderrs.last().copied(),
        support: r.nu.support.clone(),
        matched: None,
        notes: vec![format!(
            "estimate only; samples bounded by {} (declared bound {})",
            r.nu.max_sample, r.bound
        )],
    })
}

pub fn reproduce_report() -> Result<ReproduceReport, CliError> {
    let rows = vec![
        with_monte_carlo(matrix_row("a=c=1, Hadamard pair", "equal_coupling", Some(0.244853758603))?)?,
        with_monte_carlo(matrix_row("a=1, b=1.3, c=0.4", "rotated_limit", Some(0.636619772368))?)?,
        with_monte_carlo(matrix_row("sqrt(eps) entry, coupling 1", "sqrt_entry", Some(0.284705017367))?)?,
        with_monte_carlo(matrix_row("sqrt(eps) entry, coupling 2", "sqrt_entry_as_printed", None)?)?,
        diagonal_row()?,
        triple_row()?,
    ];
    let all_matched = rows.iter().all(|r| r.matched != Some(false));
    Ok(ReproduceReport { rows, all_matched })
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.12}"))
}

pub fn render_table(r: &ReproduceReport) -> String {
    let mut s = format!(
        "{:<38} {:>15} {:>15} {:>28} {:>6}\n",
        "case", "reference", "closed form", "monte carlo +- stderr", "match"
    );
    for row in &r.rows {
        let mc = match (row.monte_carlo, row.stderr) {
            (Some(m), Some(e)) => format!("{m:.6} +- {e:.1e}"),
            (Some(m), None) => format!("{m:.6}"),
            _ => "-".into(),
        };
        let matched = match row.matched {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "-",
        };
        s.push_str(&format!(
            "{:<38} {:>15} {:>15} {:>28} {:>6}\n",
            row.case,
            cell(row.reference),
            cell(row.closed_form),
            mc,
            matched
        ));
    }
    s
}

pub fn reproduce_cmd(a: &ReproduceArgs) -> Result<Outcome, CliError> {
    let report = reproduce_report()?;
    let json = to_json(&report);
    if let Some(path) = &a.out {
        std::fs::write(path, &json).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    let warnings = report
        .rows
        .iter()
        .filter(|r| r.matched == Some(false))
        .map(|r| format!("{}: closed form does not match the reference value", r.case))
        .collect();
    Ok(Outcome {
        document: match a.format {
            Format::Table => render_table(&report),
            Format::Json => json,
        },
        code: if report.all_matched { EXIT_OK } else { EXIT_MISMATCH },
        warnings,
    })
}
