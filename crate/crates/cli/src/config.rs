//! Flat `key = value` run configuration with named presets.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use gridramsey::io::read_graph;
use gridramsey::rational;
use gridramsey::regularity::{EpsSchedule, RegParams};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Desk,
    PaperS3,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper-s3" => Ok(Preset::PaperS3),
            _ => bail!("unknown preset `{s}` (expected desk or paper-s3)"),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Preset::Desk => "desk",
            Preset::PaperS3 => "paper-s3",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HostSpec {
    Cycle { m: usize },
    RandomRegular { n: usize, d: usize, seed: u64 },
    File { path: PathBuf },
}

impl HostSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let f: Vec<&str> = s.split_whitespace().collect();
        match f.as_slice() {
            ["cycle", m] => Ok(HostSpec::Cycle { m: m.parse()? }),
            ["random-regular", n, d] => Ok(HostSpec::RandomRegular {
                n: n.parse()?,
                d: d.parse()?,
                seed: 0,
            }),
            ["random-regular", n, d, seed] => Ok(HostSpec::RandomRegular {
                n: n.parse()?,
                d: d.parse()?,
                seed: seed.parse()?,
            }),
            ["file", path] => Ok(HostSpec::File { path: PathBuf::from(path) }),
            _ => bail!("bad host spec `{s}` (cycle M | random-regular N D [SEED] | file PATH)"),
        }
    }

    /// Degree bound of the host this spec produces.
    pub fn max_degree(&self) -> Result<usize> {
        match self {
            HostSpec::Cycle { .. } => Ok(2),
            HostSpec::RandomRegular { d, .. } => Ok(*d),
            HostSpec::File { path } => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading host {}", path.display()))?;
                Ok(read_graph(&text)?.max_degree().max(2))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strategy {
    Mono { colour: u8 },
    UniformRandom,
    HostSplit,
    DegreeAdversary,
}

impl Strategy {
    pub fn parse(s: &str) -> Result<Self> {
        let f: Vec<&str> = s.split_whitespace().collect();
        match f.as_slice() {
            ["mono"] => Ok(Strategy::Mono { colour: 0 }),
            ["mono", c] => Ok(Strategy::Mono { colour: c.parse()? }),
            ["uniform-random"] => Ok(Strategy::UniformRandom),
            ["host-split"] | ["host-edge-split"] => Ok(Strategy::HostSplit),
            ["degree-adversary"] => Ok(Strategy::DegreeAdversary),
            _ => bail!("unknown colouring strategy `{s}`"),
        }
    }
}

/// Fully resolved configuration; echoed verbatim in every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: Preset,
    pub seed: u64,
    pub host: HostSpec,
    pub max_degree: usize,
    pub s: usize,
    pub r: u8,
    pub eps: f64,
    pub eps_prime: f64,
    pub alpha: f64,
    /// Set when alpha differs from 1/(2r) on purpose.
    pub alpha_deviation: bool,
    pub lambda_rule: f64,
    pub lambda: f64,
    pub delta: f64,
    pub c: f64,
    pub p: f64,
    /// `p` came from `C s^{-1/2}` and was capped at 1.
    pub p_capped: bool,
    pub grid_side: usize,
    pub colouring: Strategy,
    pub exact_cap: usize,
    pub check_trials: usize,
    pub increment_budget: usize,
    pub bad_trials: usize,
    pub embed_trials: usize,
    pub subsets_per_vertex: usize,
    pub vertices_per_position: usize,
    pub cycle_budget: u64,
}

/// Every key a config file or `--set` may carry.
pub const KEYS: &[&str] = &[
    "preset",
    "seed",
    "host",
    "s",
    "r",
    "eps",
    "eps_prime",
    "alpha",
    "alpha_deviation",
    "lambda_rule",
    "delta",
    "c",
    "p",
    "colouring",
    "exact_cap",
    "check_trials",
    "increment_budget",
    "bad_trials",
    "embed_trials",
    "subsets_per_vertex",
    "vertices_per_position",
    "cycle_budget",
];

/// Parses a decimal or an `a/b` fraction.
pub fn number(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| anyhow!("bad number `{s}`"))?;
        let b: f64 = b.trim().parse().map_err(|_| anyhow!("bad number `{s}`"))?;
        if b == 0.0 {
            bail!("zero denominator in `{s}`");
        }
        return Ok(a / b);
    }
    s.parse().map_err(|_| anyhow!("bad number `{s}`"))
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            bail!("line {}: unknown key `{k}`", i + 1);
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    /// Layers, lowest priority first: preset defaults, the config file, flag
    /// overrides. `preset` and `seed` flags win over the file as well.
    pub fn resolve(file: Option<&Path>, preset: Option<&str>, seed: Option<u64>, sets: &[String]) -> Result<Self> {
        let mut kv = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                parse_kv(&text)?
            }
            None => BTreeMap::new(),
        };
        for s in sets {
            let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("override `{s}` is not key=value"))?;
            if !KEYS.contains(&k.trim()) {
                bail!("unknown key `{}`", k.trim());
            }
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        if let Some(p) = preset {
            kv.insert("preset".into(), p.into());
        }
        if let Some(s) = seed {
            kv.insert("seed".into(), s.to_string());
        }
        Self::from_map(&kv)
    }

    pub fn from_map(kv: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| kv.get(k).map(String::as_str);
        let num = |k: &str| get(k).map(number).transpose();
        let int = |k: &str| -> Result<Option<u64>> {
            get(k).map(|v| v.parse::<u64>().map_err(|_| anyhow!("`{k}` must be a non-negative integer, got `{v}`"))).transpose()
        };

        let preset = Preset::parse(get("preset").unwrap_or("desk"))?;
        let seed = int("seed")?.unwrap_or(0);
        let host = HostSpec::parse(get("host").unwrap_or("cycle 10"))?;
        let max_degree = host.max_degree()?;
        let s = int("s")?.unwrap_or(300) as usize;
        let r = int("r")?.unwrap_or(2);
        if !(2..=255).contains(&r) {
            bail!("r must be in 2..=255");
        }
        let r = r as u8;
        let default_alpha = RegParams::default_alpha(r);
        let alpha = num("alpha")?.unwrap_or(default_alpha);
        let alpha_deviation = match get("alpha_deviation") {
            None => false,
            Some("true") => true,
            Some("false") => false,
            Some(v) => bail!("alpha_deviation must be true or false, got `{v}`"),
        };
        if rational::rational(alpha) != rational::rational(default_alpha) && !alpha_deviation {
            bail!("alpha = {alpha} differs from 1/(2r) = {default_alpha}; set alpha_deviation = true to acknowledge");
        }
        let (eps, eps_prime, lambda_rule) = match preset {
            Preset::Desk => {
                let eps = num("eps")?.unwrap_or(0.25);
                (eps, num("eps_prime")?.unwrap_or(eps), num("lambda_rule")?.unwrap_or(0.9))
            }
            Preset::PaperS3 => {
                let eps = num("eps")?.unwrap_or(alpha / 256.0);
                (eps, num("eps_prime")?.unwrap_or(eps / 4.0), num("lambda_rule")?.unwrap_or(0.25))
            }
        };
        let schedule = EpsSchedule::constant(eps_prime, max_degree.max(2), alpha, lambda_rule)?;
        let lambda = schedule.lambda;
        let delta = match (num("delta")?, preset) {
            (Some(d), _) => d,
            (None, Preset::Desk) => 1.0 / 30.0,
            (None, Preset::PaperS3) => (eps / 4.0).min(lambda / 4.0),
        };
        let c = num("c")?.unwrap_or(6.0);
        let (p, p_capped) = match num("p")? {
            Some(p) => (p, false),
            None => {
                let p = c / (s as f64).sqrt();
                (p.min(1.0), p > 1.0)
            }
        };
        if s == 0 {
            bail!("s must be positive");
        }
        let params = RegParams {
            r,
            max_degree,
            eps,
            eps_prime,
            alpha,
            lambda,
            delta,
            c,
            p,
        };
        params.validate()?;
        let grid_side = rational::floor_of(rational::rational(delta) * s as i128);
        let colouring = Strategy::parse(get("colouring").unwrap_or("uniform-random"))?;
        if let Strategy::Mono { colour } = colouring {
            if colour >= r {
                bail!("mono colour {colour} not below r = {r}");
            }
        }
        let knob = |k: &str, d: u64| -> Result<u64> { Ok(int(k)?.unwrap_or(d)) };
        let cfg = RunConfig {
            preset,
            seed,
            host,
            max_degree,
            s,
            r,
            eps,
            eps_prime,
            alpha,
            alpha_deviation,
            lambda_rule,
            lambda,
            delta,
            c,
            p,
            p_capped,
            grid_side,
            colouring,
            exact_cap: knob("exact_cap", 16)? as usize,
            check_trials: knob("check_trials", 64)? as usize,
            increment_budget: knob("increment_budget", 64)? as usize,
            bad_trials: knob("bad_trials", 20)? as usize,
            embed_trials: knob("embed_trials", 64)? as usize,
            subsets_per_vertex: knob("subsets_per_vertex", 10)? as usize,
            vertices_per_position: knob("vertices_per_position", 50)? as usize,
            cycle_budget: knob("cycle_budget", 10_000_000)?,
        };
        for (k, v) in [
            ("check_trials", cfg.check_trials),
            ("bad_trials", cfg.bad_trials),
            ("embed_trials", cfg.embed_trials),
            ("subsets_per_vertex", cfg.subsets_per_vertex),
            ("vertices_per_position", cfg.vertices_per_position),
        ] {
            if v == 0 {
                bail!("{k} must be positive");
            }
        }
        Ok(cfg)
    }

    pub fn params(&self) -> RegParams {
        RegParams {
            r: self.r,
            max_degree: self.max_degree,
            eps: self.eps,
            eps_prime: self.eps_prime,
            alpha: self.alpha,
            lambda: self.lambda,
            delta: self.delta,
            c: self.c,
            p: self.p,
        }
    }

    /// `C` when `p` was derived as `C s^{-1/2}`, for the blow-up sidecar.
    pub fn density_constant(&self) -> Option<f64> {
        ((self.c / (self.s as f64).sqrt()).min(1.0) == self.p).then_some(self.c)
    }

    pub fn schedule(&self) -> Result<EpsSchedule> {
        Ok(EpsSchedule::constant(self.eps_prime, self.max_degree.max(2), self.alpha, self.lambda_rule)?)
    }

    /// Same configuration with another seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        RunConfig { seed, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn desk_defaults() {
        let c = RunConfig::from_map(&map(&[])).unwrap();
        assert_eq!(c.preset, Preset::Desk);
        assert_eq!((c.alpha, c.eps, c.eps_prime), (0.25, 0.25, 0.25));
        assert_eq!(c.grid_side, 10);
        assert!((c.lambda - 0.729).abs() < 1e-12);
    }

    #[test]
    fn s3_preset_constants() {
        let c = RunConfig::from_map(&map(&[("preset", "paper-s3")])).unwrap();
        assert_eq!(c.eps, 0.25 / 256.0);
        assert_eq!(c.eps_prime, c.eps / 4.0);
        assert_eq!(c.delta, c.eps / 4.0);
        assert_eq!(c.grid_side, 0);
    }

    #[test]
    fn delta_bound_enforced() {
        assert!(RunConfig::from_map(&map(&[("delta", "0.07")])).is_err());
        assert!(RunConfig::from_map(&map(&[("delta", "1/16")])).is_ok());
    }

    #[test]
    fn alpha_needs_acknowledgement() {
        assert!(RunConfig::from_map(&map(&[("alpha", "0.5")])).is_err());
        let c = RunConfig::from_map(&map(&[("alpha", "0.5"), ("alpha_deviation", "true")])).unwrap();
        assert_eq!(c.alpha, 0.5);
    }

    #[test]
    fn p_from_density_constant() {
        let c = RunConfig::from_map(&map(&[("s", "400")])).unwrap();
        assert!((c.p - 0.3).abs() < 1e-12);
        let tiny = RunConfig::from_map(&map(&[("s", "10")])).unwrap();
        assert!(tiny.p_capped && tiny.p == 1.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_kv("colour = mono").is_err());
        assert!(parse_kv("s 300").is_err());
        assert_eq!(parse_kv("# c\ns = 300 # part size\n").unwrap()["s"], "300");
    }
}
