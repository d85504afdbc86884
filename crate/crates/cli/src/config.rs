//! Flat key-value run configuration.
//!
//! The format is one `key = value` per line with `#` comments; no nesting,
//! so configs stay diffable text. Unknown keys are errors. Grid values are
//! comma-separated, twists are `h/k` fractions.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use cuspsum::coeffs::FormId;
use cuspsum::sums::Twist;

use crate::report::fnv1a64;

/// Which coefficient table to run on; `UnitImpulse` is the synthetic
/// a(1)-only null model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormChoice {
    Standard(FormId),
    UnitImpulse,
}

impl FormChoice {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "unit" | "unit_impulse" => Ok(FormChoice::UnitImpulse),
            other => FormId::parse(other)
                .map(FormChoice::Standard)
                .map_err(|e| e.to_string()),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FormChoice::Standard(id) => id.label(),
            FormChoice::UnitImpulse => "unit_impulse",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub form: FormChoice,
    pub n_max: usize,
    pub twists: Vec<(i64, u64)>,
    pub m_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub xi: Option<f64>,
    pub v_grid: Vec<f64>,
    pub a_exp: f64,
    pub eps: f64,
    pub c_small: f64,
    pub c_big: f64,
    pub word: String,
    pub out_dir: PathBuf,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            form: FormChoice::Standard(FormId::Delta),
            n_max: 1 << 16,
            twists: vec![(0, 1)],
            // empty: runners default to M = n_max / 2
            m_grid: Vec::new(),
            delta_grid: vec![64.0],
            xi: None,
            v_grid: Vec::new(),
            a_exp: 4.0,
            eps: 0.01,
            c_small: 0.01,
            c_big: 100.0,
            word: "BABAAB".to_string(),
            out_dir: PathBuf::from("reports"),
            workers: 1,
        }
    }
}

impl RunConfig {
    /// Parse the flat key-value format; later keys override earlier ones,
    /// `h`/`k` pairs append a single twist after the whole file is read.
    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        let mut twists: Vec<(i64, u64)> = Vec::new();
        let mut single_h: Option<i64> = None;
        let mut single_k: Option<u64> = None;
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            let fail = |what: &str| format!("line {}: bad {} `{}`", lineno + 1, what, value);
            if !seen.insert(key.to_string()) {
                return Err(format!("line {}: duplicate key `{key}`", lineno + 1));
            }
            match key {
                "form" => cfg.form = FormChoice::parse(value).map_err(|e| format!("line {}: {e}", lineno + 1))?,
                "n_max" => cfg.n_max = value.parse().map_err(|_| fail("n_max"))?,
                "h" => single_h = Some(value.parse().map_err(|_| fail("h"))?),
                "k" => single_k = Some(value.parse().map_err(|_| fail("k"))?),
                "twists" => {
                    for part in value.split(',') {
                        let part = part.trim();
                        let (h, k) = part
                            .split_once('/')
                            .ok_or_else(|| fail("twist (expected h/k)"))?;
                        twists.push((
                            h.trim().parse().map_err(|_| fail("twist numerator"))?,
                            k.trim().parse().map_err(|_| fail("twist denominator"))?,
                        ));
                    }
                }
                "m_grid" => cfg.m_grid = parse_grid(value).map_err(|_| fail("m_grid"))?,
                "delta_grid" => cfg.delta_grid = parse_grid(value).map_err(|_| fail("delta_grid"))?,
                "xi" => cfg.xi = Some(value.parse().map_err(|_| fail("xi"))?),
                "v_grid" => cfg.v_grid = parse_grid(value).map_err(|_| fail("v_grid"))?,
                "a_exp" => cfg.a_exp = value.parse().map_err(|_| fail("a_exp"))?,
                "eps" => cfg.eps = value.parse().map_err(|_| fail("eps"))?,
                "c_small" => cfg.c_small = value.parse().map_err(|_| fail("c_small"))?,
                "c_big" => cfg.c_big = value.parse().map_err(|_| fail("c_big"))?,
                "word" => cfg.word = value.to_string(),
                "out" => cfg.out_dir = PathBuf::from(value),
                "workers" => cfg.workers = value.parse().map_err(|_| fail("workers"))?,
                other => return Err(format!("line {}: unknown key `{other}`", lineno + 1)),
            }
        }
        match (single_h, single_k) {
            (Some(h), Some(k)) => twists.push((h, k)),
            (Some(_), None) => return Err("key `h` given without `k`".into()),
            (None, Some(k)) => twists.push((0, k)),
            (None, None) => {}
        }
        if !twists.is_empty() {
            cfg.twists = twists;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.workers < 1 {
            return Err("workers: must be >= 1".into());
        }
        if self.n_max < 2 {
            return Err("n_max: must be >= 2".into());
        }
        for &(h, k) in &self.twists {
            Twist::new(h, k).map_err(|e| format!("twists: {e}"))?;
        }
        for &m in &self.m_grid {
            if !(m >= 1.0) {
                return Err(format!("m_grid: M = {m} must be >= 1"));
            }
            if 2.0 * m > self.n_max as f64 {
                return Err(format!(
                    "m_grid: 2M = {} exceeds n_max = {}",
                    2.0 * m,
                    self.n_max
                ));
            }
        }
        for &d in &self.delta_grid {
            if !(d >= 0.0) {
                return Err(format!("delta_grid: delta = {d} must be >= 0"));
            }
        }
        if let Some(xi) = self.xi {
            if !(xi > 0.0) {
                return Err(format!("xi: {xi} must be > 0"));
            }
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(format!("eps: {} outside (0, 0.5)", self.eps));
        }
        if !(self.c_small > 0.0) || !(self.c_big > 0.0) {
            return Err("c_small and c_big must be > 0".into());
        }
        if !self.word.chars().all(|c| c == 'A' || c == 'B') {
            return Err(format!("word: `{}` may only contain A and B", self.word));
        }
        Ok(())
    }

    /// Canonical semantic text: what the config hash covers. Output
    /// location and worker count are excluded so that re-runs with different
    /// parallelism or destination hash identically.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "a_exp = {}", self.a_exp);
        let _ = writeln!(s, "c_big = {}", self.c_big);
        let _ = writeln!(s, "c_small = {}", self.c_small);
        let _ = writeln!(
            s,
            "delta_grid = {}",
            self.delta_grid
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        let _ = writeln!(s, "eps = {}", self.eps);
        let _ = writeln!(s, "form = {}", self.form.label());
        let _ = writeln!(
            s,
            "m_grid = {}",
            self.m_grid
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        let _ = writeln!(s, "n_max = {}", self.n_max);
        let _ = writeln!(
            s,
            "twists = {}",
            self.twists
                .iter()
                .map(|(h, k)| format!("{h}/{k}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
        let _ = writeln!(
            s,
            "v_grid = {}",
            self.v_grid
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        let _ = writeln!(s, "word = {}", self.word);
        if let Some(xi) = self.xi {
            let _ = writeln!(s, "xi = {xi}");
        }
        s
    }

    pub fn config_hash(&self) -> String {
        format!("{:016x}", fnv1a64(self.canonical_text().as_bytes()))
    }
}

fn parse_grid(value: &str) -> Result<Vec<f64>, ()> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| ()))
        .collect()
}
