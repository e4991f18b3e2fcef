//! Flat `key = value` cell configuration files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use opbayes::{GammaParams, GigParams, NormalParams, RatePrior};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    FrequencyPoisson,
    SeverityLognormal,
    SeverityPareto,
}

impl ModelKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "frequency-poisson" => Ok(Self::FrequencyPoisson),
            "severity-lognormal" => Ok(Self::SeverityLognormal),
            "severity-pareto" => Ok(Self::SeverityPareto),
            other => bail!(
                "unknown model `{other}` (expected frequency-poisson, severity-lognormal or severity-pareto)"
            ),
        }
    }

    pub fn is_frequency(self) -> bool {
        self == Self::FrequencyPoisson
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorSpec {
    Rate(RatePrior),
    Normal(NormalParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiSource {
    Value(f64),
    FromOpinions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    pub name: Option<String>,
    pub model: ModelKind,
    pub prior: PriorSpec,
    pub volume: Option<f64>,
    pub threshold: Option<f64>,
    pub obs_sigma: Option<f64>,
    pub xi: Option<XiSource>,
    pub data: Option<PathBuf>,
    pub experts: Option<PathBuf>,
}

const COMMON_KEYS: [&str; 6] = ["name", "model", "prior", "xi", "data", "experts"];

fn model_keys(model: ModelKind) -> &'static [&'static str] {
    match model {
        ModelKind::FrequencyPoisson => &["volume"],
        ModelKind::SeverityLognormal => &["obs_sigma"],
        ModelKind::SeverityPareto => &["threshold"],
    }
}

fn prior_keys(prior: &str) -> Result<&'static [&'static str]> {
    match prior {
        "gamma" => Ok(&["alpha0", "beta0"]),
        "gig" => Ok(&["nu0", "omega0", "phi0"]),
        "normal" => Ok(&["mu0", "sigma0"]),
        other => bail!("unknown prior `{other}` (expected gamma, gig or normal)"),
    }
}

struct Entries {
    map: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {line_no}: expected `key = value`, got `{line}`"))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                bail!("line {line_no}: empty key or value");
            }
            if map.insert(key.clone(), (value, line_no)).is_some() {
                bail!("line {line_no}: duplicate key `{key}`");
            }
        }
        Ok(Self { map })
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(v, _)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.text(key)
            .ok_or_else(|| anyhow!("missing required key `{key}`"))
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| anyhow!("line {line}: `{key}` must be a number, got `{v}`")),
        }
    }

    fn required_number(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| anyhow!("missing required key `{key}`"))
    }
}

impl CellConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).with_context(|| format!("in config {}", path.display()))
    }

    /// Parse config text; relative data paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let e = Entries::parse(text)?;
        let model = ModelKind::parse(e.required("model")?)?;
        let prior_name = e.required("prior")?;
        let prior_fields = prior_keys(prior_name)?;

        let allowed: Vec<&str> = COMMON_KEYS
            .iter()
            .chain(model_keys(model))
            .chain(prior_fields)
            .copied()
            .collect();
        for (key, (_, line)) in &e.map {
            if !allowed.contains(&key.as_str()) {
                bail!("line {line}: key `{key}` does not apply to this model and prior");
            }
        }

        let prior = match (model, prior_name) {
            (ModelKind::SeverityLognormal, "normal") => PriorSpec::Normal(NormalParams::new(
                e.required_number("mu0")?,
                e.required_number("sigma0")?,
            )?),
            (ModelKind::SeverityLognormal, other) => {
                bail!("the lognormal model needs a normal prior, got `{other}`")
            }
            (_, "normal") => bail!("a normal prior only applies to severity-lognormal"),
            (_, "gamma") => PriorSpec::Rate(RatePrior::Gamma(GammaParams::new(
                e.required_number("alpha0")?,
                e.required_number("beta0")?,
            )?)),
            (_, _) => PriorSpec::Rate(RatePrior::Gig(GigParams::new(
                e.required_number("nu0")?,
                e.required_number("omega0")?,
                e.required_number("phi0")?,
            )?)),
        };

        let xi = match e.text("xi") {
            None => None,
            Some("from-opinions") => Some(XiSource::FromOpinions),
            Some(_) => Some(XiSource::Value(e.required_number("xi")?)),
        };
        let resolve = |key: &str| e.text(key).map(|p| base.join(p));

        Ok(Self {
            name: e.text("name").map(str::to_string),
            model,
            prior,
            volume: match model {
                ModelKind::FrequencyPoisson => Some(e.required_number("volume")?),
                _ => None,
            },
            threshold: match model {
                ModelKind::SeverityPareto => Some(e.required_number("threshold")?),
                _ => None,
            },
            obs_sigma: match model {
                ModelKind::SeverityLognormal => Some(e.required_number("obs_sigma")?),
                _ => None,
            },
            xi,
            data: resolve("data"),
            experts: resolve("experts"),
        })
    }

    pub fn rate_prior(&self) -> Result<RatePrior> {
        match self.prior {
            PriorSpec::Rate(r) => Ok(r),
            PriorSpec::Normal(_) => bail!("model needs a gamma or gig prior"),
        }
    }
}
