//! Effective run configuration: command-line flags override the optional
//! JSON config file, which overrides built-in defaults. The effective
//! values are echoed into every output file for provenance.

use anyhow::{bail, Context, Result};
use num_complex::Complex64 as Complex;
use serde::Deserialize;
use std::path::Path;

/// Optional JSON config file; every field may be omitted.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub frac: Option<String>,
    pub n: Option<String>,
    pub family: Option<String>,
    pub tol: Option<f64>,
    pub depth: Option<u32>,
    pub grid: Option<usize>,
    pub out: Option<String>,
    pub viewport: Option<String>,
    pub param: Option<String>,
    pub min_cell: Option<f64>,
    pub size: Option<usize>,
    pub window: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flags > config file > defaults.
pub fn pick<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn pick_opt<T: Clone>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn parse_viewport(s: &str) -> Result<(f64, f64, f64, f64)> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .context("viewport expects x0,y0,x1,y1")?;
    if parts.len() != 4 || parts[0] >= parts[2] || parts[1] >= parts[3] {
        bail!("viewport expects x0,y0,x1,y1 with x0 < x1 and y0 < y1");
    }
    Ok((parts[0], parts[1], parts[2], parts[3]))
}

pub fn parse_param(s: &str) -> Result<Complex> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .context("param expects re,im")?;
    if parts.len() != 2 {
        bail!("param expects re,im");
    }
    Ok(Complex::new(parts[0], parts[1]))
}

pub fn parse_orders(s: &str) -> Result<Vec<u32>> {
    let orders: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .context("n expects an integer or a comma list of integers")?;
    if orders.is_empty() || orders.iter().any(|&n| n < 2) {
        bail!("orders must be integers >= 2");
    }
    Ok(orders)
}

/// Key=value provenance string echoed into output files.
pub struct Provenance {
    items: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(command: &str) -> Provenance {
        Provenance {
            items: vec![("command".into(), command.into())],
        }
    }

    pub fn add(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.items.push((key.into(), value.to_string()));
        self
    }

    pub fn line(&self) -> String {
        let body: Vec<String> = self
            .items
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        body.join(" ")
    }

    /// '#'-prefixed comment block for CSV files.
    pub fn csv_header(&self) -> String {
        format!("# {}\n", self.line())
    }
}
