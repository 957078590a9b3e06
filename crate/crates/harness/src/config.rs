//! Experiment configuration and the line-oriented `key = value` override
//! format.

use std::fmt;
use std::str::FromStr;

use pcapp::estimators::Method;
use pcapp::factor_model::{FactorDistribution, FactorModelSpec};
use pcapp::metrics::DistanceNorm;
use pcapp::theory::{fixed_aspect_error, growing_spike_error};

use crate::error::{config_error, HarnessError};

pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_EPS_REL: f64 = 1e-10;

/// Default relative regularizer for `method`. CCA runs unregularized: once
/// `2d > n` its sample correlations tie at one, and any ridge breaks the
/// tie toward high-variance coordinates instead of leaving it arbitrary.
pub fn default_eps_rel(method: Method) -> f64 {
    match method {
        Method::Cca => 0.0,
        _ => DEFAULT_EPS_REL,
    }
}

/// Truncation rank of the constraint covariance for PCA++ and cPCA++.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    /// A fixed rank, capped at `d`.
    Rank(usize),
    /// `round(f · d)`, at least 1.
    Fraction(f64),
    /// No truncation (`s = d`).
    Full,
}

impl Truncation {
    pub fn resolve(self, d: usize) -> usize {
        match self {
            Truncation::Rank(s) => s.min(d),
            Truncation::Fraction(f) => ((f * d as f64).round() as usize).clamp(1, d.max(1)),
            Truncation::Full => d,
        }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Rank(s) => write!(f, "{s}"),
            Truncation::Fraction(x) => write!(f, "{x}d"),
            Truncation::Full => f.write_str("d"),
        }
    }
}

impl FromStr for Truncation {
    type Err = HarnessError;

    /// Accepts `10`, `0.1d` or `d`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "d" || s == "full" {
            return Ok(Truncation::Full);
        }
        if let Some(frac) = s.strip_suffix('d') {
            let f: f64 = parse_num("truncation fraction", frac)?;
            if !(f > 0.0 && f <= 1.0) {
                return Err(config_error(format!(
                    "truncation fraction must lie in (0, 1], got {f}"
                )));
            }
            return Ok(Truncation::Fraction(f));
        }
        let rank: usize = parse_num("truncation rank", s)?;
        if rank == 0 {
            return Err(config_error("truncation rank must be positive"));
        }
        Ok(Truncation::Rank(rank))
    }
}

/// One estimator together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodEntry {
    pub method: Method,
    /// Subspace dimension; defaults to the number of signal spikes.
    pub k: Option<usize>,
    /// Only used by truncated methods; defaults to `2k`.
    pub s: Option<Truncation>,
    pub eps_rel: f64,
    /// cPCA contrast weight.
    pub alpha: f64,
}

impl MethodEntry {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            k: None,
            s: None,
            eps_rel: default_eps_rel(method),
            alpha: 1.0,
        }
    }

    pub fn with_s(mut self, s: Truncation) -> Self {
        self.s = Some(s);
        self
    }

    pub fn truncation(&self, k: usize) -> Option<Truncation> {
        self.method
            .is_truncated()
            .then(|| self.s.unwrap_or(Truncation::Rank(2 * k)))
    }
}

impl FromStr for MethodEntry {
    type Err = HarnessError;

    /// `name` or `name(key=value, ...)` with keys `k`, `s`, `eps_rel`, `alpha`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let (name, params) = match text.find('(') {
            Some(open) => {
                let inner = text[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| config_error(format!("unbalanced parentheses in `{text}`")))?;
                (&text[..open], inner)
            }
            None => (text, ""),
        };
        let method: Method = name.trim().parse().map_err(config_error)?;
        let mut entry = MethodEntry::new(method);
        for param in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = param
                .split_once('=')
                .ok_or_else(|| config_error(format!("expected key=value, got `{param}`")))?;
            let value = value.trim();
            match key.trim() {
                "k" => entry.k = Some(parse_num("k", value)?),
                "s" => entry.s = Some(value.parse()?),
                "eps_rel" => entry.eps_rel = parse_num("eps_rel", value)?,
                "alpha" => entry.alpha = parse_num("alpha", value)?,
                other => return Err(config_error(format!("unknown method parameter `{other}`"))),
            }
        }
        Ok(entry)
    }
}

/// The factor model with `d` left open; each sweep point fixes it.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelTemplate {
    pub signal_variances: Vec<f64>,
    pub background_variances: Vec<f64>,
    pub noise_variance: f64,
    pub overlap_pairs: Vec<(usize, usize)>,
    pub factor_distribution: FactorDistribution,
    pub rotation_seed: Option<u64>,
}

impl ModelTemplate {
    pub fn new(signal_variances: Vec<f64>, background_variances: Vec<f64>) -> Self {
        Self {
            signal_variances,
            background_variances,
            noise_variance: 1.0,
            overlap_pairs: Vec::new(),
            factor_distribution: FactorDistribution::Gaussian,
            rotation_seed: None,
        }
    }

    pub fn k(&self) -> usize {
        self.signal_variances.len()
    }
}

/// What the swept values mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepAxis {
    /// Values are `d/n`; `d = round(scale · value · n)`.
    AspectRatio,
    /// Values are `λ_{A,1} / sqrt(λ_{B,1})` at a fixed `d/n`; the background
    /// variances are rescaled to hit each value.
    BackgroundStrength { aspect_ratio: f64 },
}

/// Theory curve written next to the simulated rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overlay {
    None,
    /// Fixed aspect ratio prediction for the weakest spike.
    Fixed,
    /// Growing-spike prediction with `c_A = d / (n λ_{A,k})`.
    Growing,
}

/// A concrete model for one sweep value.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub d: usize,
    pub spec: FactorModelSpec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub citation: String,
    pub model: ModelTemplate,
    pub n: usize,
    pub sweep: SweepAxis,
    /// Swept values; `d/n` unless `sweep` says otherwise.
    pub aspect_ratios: Vec<f64>,
    pub methods: Vec<MethodEntry>,
    pub trials: usize,
    pub base_seed: u64,
    pub norm: DistanceNorm,
    /// Multiplies `d` and every spike variance.
    pub scale_factor: f64,
    pub overlay: Overlay,
}

impl ExperimentConfig {
    pub fn new(
        name: impl Into<String>,
        model: ModelTemplate,
        n: usize,
        aspect_ratios: Vec<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            citation: String::new(),
            model,
            n,
            sweep: SweepAxis::AspectRatio,
            aspect_ratios,
            methods: Vec::new(),
            trials: DEFAULT_TRIALS,
            base_seed: 0,
            norm: DistanceNorm::Operator,
            scale_factor: 1.0,
            overlay: Overlay::None,
        }
    }

    /// Subspace dimension used by `entry`.
    pub fn k_for(&self, entry: &MethodEntry) -> usize {
        entry.k.unwrap_or(self.model.k())
    }

    /// Name written to the `method` column. Repeated methods are told apart
    /// by their non-default parameters.
    pub fn label(&self, index: usize) -> String {
        let entry = &self.methods[index];
        let repeated = self
            .methods
            .iter()
            .filter(|e| e.method == entry.method)
            .count()
            > 1;
        if !repeated {
            return entry.method.name().to_string();
        }
        let mut params = Vec::new();
        if let Some(k) = entry.k {
            params.push(format!("k={k}"));
        }
        if let Some(t) = entry.truncation(self.k_for(entry)) {
            params.push(format!("s={t}"));
        }
        if entry.eps_rel != default_eps_rel(entry.method) {
            params.push(format!("eps_rel={:e}", entry.eps_rel));
        }
        if entry.method == Method::Cpca && entry.alpha != 1.0 {
            params.push(format!("alpha={}", entry.alpha));
        }
        if params.is_empty() {
            return entry.method.name().to_string();
        }
        format!("{}({})", entry.method, params.join(" "))
    }

    pub fn point(&self, value: f64) -> Result<SweepPoint, HarnessError> {
        let scale = self.scale_factor;
        let signal: Vec<f64> = self
            .model
            .signal_variances
            .iter()
            .map(|v| v * scale)
            .collect();
        let mut background: Vec<f64> = self
            .model
            .background_variances
            .iter()
            .map(|v| v * scale)
            .collect();
        let ratio = match self.sweep {
            SweepAxis::AspectRatio => value,
            SweepAxis::BackgroundStrength { aspect_ratio } => {
                let (lead_a, lead_b) = match (signal.first(), background.first()) {
                    (Some(&a), Some(&b)) if b > 0.0 => (a, b),
                    _ => {
                        return Err(config_error(
                            "a background-strength sweep needs signal and background spikes",
                        ))
                    }
                };
                let target = (lead_a / value).powi(2);
                background.iter_mut().for_each(|b| *b *= target / lead_b);
                aspect_ratio
            }
        };
        let d = (scale * ratio * self.n as f64).round() as usize;
        let mut spec = FactorModelSpec::new(d, signal, background);
        spec.noise_variance = self.model.noise_variance;
        spec.overlap_pairs = self.model.overlap_pairs.clone();
        spec.factor_distribution = self.model.factor_distribution;
        spec.rotation_seed = self.model.rotation_seed;
        Ok(SweepPoint { value, d, spec })
    }

    /// Theory value at one sweep point, if an overlay is configured.
    pub fn theory(&self, point: &SweepPoint) -> Option<f64> {
        let weakest = *point.spec.signal_variances.last()?;
        let c = point.d as f64 / self.n as f64;
        match self.overlay {
            Overlay::None => None,
            Overlay::Fixed => fixed_aspect_error(weakest, c).ok().map(|p| p.dist),
            Overlay::Growing => growing_spike_error(c / weakest).ok(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(config_error("trials must be at least 1"));
        }
        if self.n < 2 {
            return Err(config_error("n must be at least 2"));
        }
        if !(self.scale_factor > 0.0 && self.scale_factor.is_finite()) {
            return Err(config_error("scale_factor must be positive"));
        }
        if self.methods.is_empty() {
            return Err(config_error("no methods configured"));
        }
        if self.aspect_ratios.is_empty() {
            return Err(config_error("no aspect ratios configured"));
        }
        if let Some(bad) = self
            .aspect_ratios
            .iter()
            .find(|r| !(**r > 0.0 && r.is_finite()))
        {
            return Err(config_error(format!(
                "sweep values must be positive, got {bad}"
            )));
        }
        for entry in &self.methods {
            let k = self.k_for(entry);
            if k == 0 {
                return Err(config_error(format!(
                    "{}: k must be positive",
                    entry.method
                )));
            }
            if let Some(Truncation::Rank(s)) = entry.truncation(k) {
                if s < k {
                    return Err(config_error(format!(
                        "{}: s = {s} is below k = {k}",
                        entry.method
                    )));
                }
            }
            if !(entry.eps_rel >= 0.0 && entry.eps_rel.is_finite()) {
                return Err(config_error(format!(
                    "{}: eps_rel must be nonnegative",
                    entry.method
                )));
            }
        }
        for &value in &self.aspect_ratios {
            let point = self.point(value)?;
            point
                .spec
                .validate()
                .map_err(|e| config_error(format!("sweep value {value} (d = {}): {e}", point.d)))?;
            for entry in &self.methods {
                let k = self.k_for(entry);
                if k > point.d {
                    return Err(config_error(format!(
                        "{}: k = {k} exceeds d = {}",
                        entry.method, point.d
                    )));
                }
            }
        }
        Ok(())
    }

    /// Applies one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let value = value.trim();
        match key.trim() {
            "name" => self.name = value.to_string(),
            "citation" => self.citation = value.to_string(),
            "n" => self.n = parse_num(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "seed" | "base_seed" => self.base_seed = parse_num(key, value)?,
            "norm" => self.norm = value.parse().map_err(config_error)?,
            "scale_factor" => self.scale_factor = parse_num(key, value)?,
            "aspect_ratios" => self.aspect_ratios = parse_list(key, value)?,
            "sweep" => {
                self.sweep = match value {
                    "aspect_ratio" => SweepAxis::AspectRatio,
                    "background_strength" => SweepAxis::BackgroundStrength {
                        aspect_ratio: self.fixed_ratio(),
                    },
                    other => return Err(config_error(format!("unknown sweep `{other}`"))),
                }
            }
            "sweep.aspect_ratio" => {
                self.sweep = SweepAxis::BackgroundStrength {
                    aspect_ratio: parse_num(key, value)?,
                }
            }
            "overlay" => {
                self.overlay = match value {
                    "none" => Overlay::None,
                    "fixed" => Overlay::Fixed,
                    "growing" => Overlay::Growing,
                    other => return Err(config_error(format!("unknown overlay `{other}`"))),
                }
            }
            "methods" => {
                self.methods = split_top_level(value)
                    .into_iter()
                    .map(str::parse)
                    .collect::<Result<_, _>>()?
            }
            "model.signal_variances" => self.model.signal_variances = parse_list(key, value)?,
            "model.background_variances" => {
                self.model.background_variances = parse_list(key, value)?
            }
            "model.noise_variance" => self.model.noise_variance = parse_num(key, value)?,
            "model.factor_distribution" => {
                self.model.factor_distribution = FactorDistribution::parse(value)
                    .ok_or_else(|| config_error(format!("unknown factor distribution `{value}`")))?
            }
            "model.rotation_seed" => {
                self.model.rotation_seed = match value {
                    "" | "none" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "model.overlap_pairs" => self.model.overlap_pairs = parse_pairs(value)?,
            other => return Err(config_error(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    fn fixed_ratio(&self) -> f64 {
        match self.sweep {
            SweepAxis::BackgroundStrength { aspect_ratio } => aspect_ratio,
            SweepAxis::AspectRatio => 1.0,
        }
    }
}

/// Parses a config file. A `preset = <name>` line selects the starting
/// point (wherever it appears); every other line overrides one field.
/// Without a preset the file must set the model, `n`, the sweep and the
/// methods itself.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_error(format!("line {}: expected `key = value`", lineno + 1)))?;
        pairs.push((lineno + 1, key.trim(), value.trim()));
    }
    let mut config = match pairs.iter().find(|(_, k, _)| *k == "preset") {
        Some((_, _, name)) => crate::presets::preset(name)?,
        None => ExperimentConfig::new(
            "custom",
            ModelTemplate::new(Vec::new(), Vec::new()),
            0,
            Vec::new(),
        ),
    };
    for (lineno, key, value) in pairs {
        if key == "preset" {
            continue;
        }
        config
            .set(key, value)
            .map_err(|e| config_error(format!("line {lineno}: {e}")))?;
    }
    config.validate()?;
    Ok(config)
}

fn parse_num<T: FromStr>(what: &str, value: &str) -> Result<T, HarnessError> {
    value
        .trim()
        .parse()
        .map_err(|_| config_error(format!("{what}: cannot parse `{}`", value.trim())))
}

fn parse_list(what: &str, value: &str) -> Result<Vec<f64>, HarnessError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse_num(what, v))
        .collect()
}

/// `3:3, 4:4`
fn parse_pairs(value: &str) -> Result<Vec<(usize, usize)>, HarnessError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| {
                config_error(format!("overlap pair `{pair}` should look like `3:3`"))
            })?;
            Ok((
                parse_num("overlap signal index", a)?,
                parse_num("overlap background index", b)?,
            ))
        })
        .collect()
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(value: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in value.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(value[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(value[start..].trim());
    parts.into_iter().filter(|p| !p.is_empty()).collect()
}
