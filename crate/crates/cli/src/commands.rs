//! Subcommand implementations. Each writes its report to `out`.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use opbayes::gig::BranchSampler;
use opbayes::{
    aggregate_var_sum, calibration, lognormal, ExpertPanel, FrequencyCellState, GammaParams,
    GigParams, LognormalCellState, ParetoCellState, PriorConstraint, Severity, Simulation,
    SUM_OF_VAR_NOTE,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{CellConfig, ModelKind, PriorSpec, XiSource};
use crate::input;

/// A failure and the exit code class it maps to.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<opbayes::Error> for Failure {
    fn from(e: opbayes::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

pub type CmdResult = std::result::Result<(), Failure>;

pub struct FitPriorArgs {
    pub mean: Option<f64>,
    pub interval: Option<(f64, f64)>,
    pub prob: Option<f64>,
    pub vco: Option<f64>,
    pub samples: Option<PathBuf>,
}

pub fn fit_prior(args: FitPriorArgs, out: &mut impl Write) -> CmdResult {
    let fit = match args {
        FitPriorArgs {
            mean: Some(mean),
            interval: Some((lo, hi)),
            prob: Some(prob),
            vco: None,
            samples: None,
        } => {
            let c = PriorConstraint::new(mean, lo, hi, prob)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            calibration::fit_gamma_from_constraint(&c)?
        }
        FitPriorArgs {
            mean: Some(mean),
            vco: Some(vco),
            interval: None,
            prob: None,
            samples: None,
        } => calibration::gamma_from_mean_vco(mean, vco)
            .map_err(|e| Failure::Usage(e.to_string()))?,
        FitPriorArgs {
            samples: Some(path),
            mean: None,
            interval: None,
            prob: None,
            vco: None,
        } => calibration::fit_gamma_moments(&input::read_samples(&path)?)?,
        _ => {
            return Err(Failure::Usage(
                "give one of: --mean with --interval and --prob; --mean with --vco; --samples"
                    .into(),
            ))
        }
    };
    write_gamma(out, fit)?;
    Ok(())
}

fn write_gamma(out: &mut impl Write, g: GammaParams) -> std::io::Result<()> {
    writeln!(out, "prior = gamma")?;
    writeln!(out, "alpha0 = {}", g.shape())?;
    writeln!(out, "beta0 = {}", g.scale())
}

/// Observations of one cell in file order.
enum Data {
    Counts(Vec<u64>),
    Severities(Vec<f64>),
}

impl Data {
    fn len(&self) -> usize {
        match self {
            Data::Counts(c) => c.len(),
            Data::Severities(s) => s.len(),
        }
    }
}

/// A cell's state for any of the three models.
#[derive(Debug, Clone)]
pub enum CellState {
    Frequency(FrequencyCellState),
    Lognormal(LognormalCellState),
    Pareto(ParetoCellState),
}

impl CellState {
    fn push(&self, data: &Data, i: usize) -> Result<Self> {
        Ok(match (self, data) {
            (CellState::Frequency(s), Data::Counts(c)) => {
                CellState::Frequency(s.update_year(c[i])?)
            }
            (CellState::Lognormal(s), Data::Severities(x)) => {
                CellState::Lognormal(s.update_loss(x[i])?)
            }
            (CellState::Pareto(s), Data::Severities(x)) => CellState::Pareto(s.update_loss(x[i])?),
            _ => unreachable!("data kind follows the model kind"),
        })
    }

    pub fn bayes(&self) -> Result<f64> {
        Ok(match self {
            CellState::Frequency(s) => s.bayes_estimate()?,
            CellState::Lognormal(s) => s.bayes_estimate(),
            CellState::Pareto(s) => s.bayes_estimate()?,
        })
    }

    pub fn two_source(&self) -> Result<f64> {
        Ok(match self {
            CellState::Frequency(s) => s.two_source_estimate()?,
            CellState::Lognormal(s) => s.two_source_estimate()?,
            CellState::Pareto(s) => s.two_source_estimate()?,
        })
    }

    /// `None` before the first observation.
    pub fn mle(&self) -> Result<Option<f64>> {
        let empty = match self {
            CellState::Frequency(s) => s.counts().is_empty(),
            CellState::Lognormal(s) => s.log_losses().is_empty(),
            CellState::Pareto(s) => s.losses().is_empty(),
        };
        if empty {
            return Ok(None);
        }
        Ok(Some(match self {
            CellState::Frequency(s) => s.mle()?,
            CellState::Lognormal(s) => s.mle()?,
            CellState::Pareto(s) => s.mle()?,
        }))
    }
}

fn load_panel(cfg: &CellConfig, experts: Option<&Path>) -> Result<ExpertPanel> {
    let Some(path) = experts else {
        return Ok(ExpertPanel::empty());
    };
    let opinions = input::read_opinions(path)?;
    if opinions.is_empty() {
        return Ok(ExpertPanel::empty());
    }
    let xi = match cfg.xi {
        None => bail!("expert opinions were given but the config has no `xi`"),
        Some(XiSource::Value(v)) => v,
        Some(XiSource::FromOpinions) if cfg.model == ModelKind::SeverityLognormal => {
            lognormal::xi_from_opinions_stdev(&opinions)?
        }
        Some(XiSource::FromOpinions) => calibration::xi_from_opinions_moments(&opinions)?,
    };
    Ok(ExpertPanel::new(opinions, xi)?)
}

fn load_data(cfg: &CellConfig, data: Option<&Path>) -> Result<Data> {
    Ok(match (cfg.model, data) {
        (ModelKind::FrequencyPoisson, Some(p)) => Data::Counts(input::read_counts(p)?),
        (ModelKind::FrequencyPoisson, None) => Data::Counts(Vec::new()),
        (_, Some(p)) => Data::Severities(input::read_severities(p, cfg.threshold)?),
        (_, None) => Data::Severities(Vec::new()),
    })
}

fn empty_state(cfg: &CellConfig, panel: ExpertPanel) -> Result<CellState> {
    Ok(match (cfg.model, cfg.prior) {
        (ModelKind::FrequencyPoisson, _) => CellState::Frequency(FrequencyCellState::new(
            cfg.rate_prior()?,
            cfg.volume.expect("frequency config has a volume"),
            panel,
        )?),
        (ModelKind::SeverityPareto, _) => CellState::Pareto(ParetoCellState::new(
            cfg.rate_prior()?,
            cfg.threshold.expect("pareto config has a threshold"),
            panel,
        )?),
        (ModelKind::SeverityLognormal, PriorSpec::Normal(prior)) => {
            CellState::Lognormal(LognormalCellState::new(
                prior,
                cfg.obs_sigma.expect("lognormal config has obs_sigma"),
                panel,
            )?)
        }
        (ModelKind::SeverityLognormal, PriorSpec::Rate(_)) => {
            bail!("the lognormal model needs a normal prior")
        }
    })
}

/// States after 0, 1, …, K observations; command-line paths override the config.
fn load_states(
    cfg: &CellConfig,
    data: Option<&Path>,
    experts: Option<&Path>,
) -> Result<Vec<CellState>> {
    let data_path = data.map(Path::to_path_buf).or_else(|| cfg.data.clone());
    let experts_path = experts
        .map(Path::to_path_buf)
        .or_else(|| cfg.experts.clone());
    let panel = load_panel(cfg, experts_path.as_deref())?;
    let data = load_data(cfg, data_path.as_deref())?;
    let mut states = vec![empty_state(cfg, panel)?];
    for i in 0..data.len() {
        let next = states[i]
            .push(&data, i)
            .with_context(|| format!("observation {}", i + 1))?;
        states.push(next);
    }
    Ok(states)
}

pub fn trajectory(
    config: &Path,
    data: Option<&Path>,
    experts: Option<&Path>,
    out: &mut impl Write,
) -> CmdResult {
    let cfg = CellConfig::load(config)?;
    let states = load_states(&cfg, data, experts)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "bayes", "two_source", "mle"])?;
    for (k, state) in states.iter().enumerate() {
        let mle = state.mle()?.map(|m| m.to_string()).unwrap_or_default();
        w.write_record([
            k.to_string(),
            state.bayes()?.to_string(),
            state.two_source()?.to_string(),
            mle,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Frequency and severity configs of one risk cell.
#[derive(Debug, Clone)]
pub struct CellFiles {
    pub frequency: PathBuf,
    pub severity: PathBuf,
}

pub struct SimulateArgs {
    pub cells: Vec<CellFiles>,
    pub level: f64,
    pub sims: usize,
    pub seed: u64,
    pub workers: usize,
    pub parameter_uncertainty: bool,
}

fn final_state(cfg: &CellConfig) -> Result<CellState> {
    let states = load_states(cfg, None, None)?;
    Ok(states.into_iter().last().expect("at least the prior state"))
}

fn build_cell_model(files: &CellFiles) -> Result<(Option<String>, opbayes::CellModel)> {
    let fcfg = CellConfig::load(&files.frequency)?;
    let scfg = CellConfig::load(&files.severity)?;
    if !fcfg.model.is_frequency() {
        bail!("{} is not a frequency config", files.frequency.display());
    }
    if scfg.model.is_frequency() {
        bail!("{} is not a severity config", files.severity.display());
    }
    let CellState::Frequency(freq) = final_state(&fcfg)? else {
        unreachable!("frequency config yields a frequency state")
    };
    let severity = match final_state(&scfg)? {
        CellState::Lognormal(s) => Severity::Lognormal(s),
        CellState::Pareto(s) => Severity::Pareto(s),
        CellState::Frequency(_) => unreachable!("severity config yields a severity state"),
    };
    let name = fcfg.name.or(scfg.name);
    Ok((name, opbayes::CellModel::new(freq, severity)))
}

pub fn simulate_var(args: SimulateArgs, out: &mut impl Write) -> CmdResult {
    if args.cells.is_empty() {
        return Err(Failure::Usage("give at least one --cell".into()));
    }
    if args.sims == 0 || args.workers == 0 {
        return Err(Failure::Usage(
            "--sims and --workers must be at least 1".into(),
        ));
    }
    let sim = Simulation::new(args.sims, args.seed)
        .workers(args.workers)
        .parameter_uncertainty(args.parameter_uncertainty);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cell", "level", "var", "n_sims", "note"])?;
    let mut estimates = Vec::new();
    for (i, files) in args.cells.iter().enumerate() {
        let (name, model) = build_cell_model(files)?;
        let est = sim
            .var(&model, args.level)
            .with_context(|| format!("simulating cell {}", i + 1))?;
        w.write_record([
            name.unwrap_or_else(|| format!("cell{}", i + 1)),
            est.level.to_string(),
            est.value.to_string(),
            est.n_sims.to_string(),
            est.standard_error_note.clone(),
        ])?;
        estimates.push(est);
    }
    let total = aggregate_var_sum(&estimates)?;
    w.write_record([
        "SUM".to_string(),
        args.level.to_string(),
        total.to_string(),
        args.sims.to_string(),
        SUM_OF_VAR_NOTE.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn sample_gig(
    nu: f64,
    omega: f64,
    phi: f64,
    n: usize,
    seed: u64,
    out: &mut impl Write,
) -> CmdResult {
    let params = GigParams::new(nu, omega, phi).map_err(|e| Failure::Usage(e.to_string()))?;
    let sampler = BranchSampler::new(params).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        writeln!(out, "{}", sampler.sample(&mut rng)?)?;
    }
    Ok(())
}

/// Parse `lo,hi`.
pub fn parse_interval(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{v}` is not a number"))
    };
    Ok((parse(lo)?, parse(hi)?))
}

/// Parse `freq.cfg,sev.cfg`.
pub fn parse_cell(s: &str) -> std::result::Result<CellFiles, String> {
    let (f, sev) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `frequency.cfg,severity.cfg`, got `{s}`"))?;
    Ok(CellFiles {
        frequency: PathBuf::from(f.trim()),
        severity: PathBuf::from(sev.trim()),
    })
}

/// Parse a VaR level strictly inside `(0, 1)`.
pub fn parse_level(s: &str) -> std::result::Result<f64, String> {
    let v = input::parse_fraction(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("level must lie strictly between 0 and 1, got {v}"))
    }
}
