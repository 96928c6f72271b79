use std::str::FromStr;

use rayon::prelude::*;

use super::config::{Scenario, Suite};
use super::report::{num, ScenarioReport, Table};
use super::run::run_scenario;
use crate::error::{Error, Result};
use crate::geometry::ImmersionChart;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Theta,
    H,
    /// Radial node count; `n_φ` keeps its ratio.
    Grid,
    Seed,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" | "θ" => Ok(Axis::Theta),
            "h" => Ok(Axis::H),
            "grid" => Ok(Axis::Grid),
            "seed" => Ok(Axis::Seed),
            _ => Err(Error::Config { key: "axis".into(), message: format!("unknown axis `{s}` (theta, h, grid, seed)") }),
        }
    }
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Theta => "theta",
            Axis::H => "h",
            Axis::Grid => "grid",
            Axis::Seed => "seed",
        }
    }

    /// The scenario with this axis set to `value`. On spherical caps the
    /// θ axis moves the cap angle with the contact angle.
    pub fn apply(&self, sc: &Scenario, value: f64) -> Scenario {
        let mut s = sc.clone();
        match self {
            Axis::Theta => {
                s.theta = value;
                if let ImmersionChart::SphericalCap { theta_c, .. } = &mut s.chart {
                    *theta_c = value;
                }
            }
            Axis::H => s.h = value,
            Axis::Grid => {
                let n = value.round() as usize;
                s.grid.n_phi = (n as f64 * sc.grid.n_phi as f64 / sc.grid.n_r as f64).round() as usize;
                s.grid.n_r = n;
            }
            Axis::Seed => s.seed = value.round() as u64,
        }
        s
    }
}

/// Parses `pi/3`, `0.5`, `2*pi` and plain integers.
pub fn parse_value(s: &str) -> Result<f64> {
    let t = s.trim().replace('π', "pi");
    let bad = || Error::Config { key: "values".into(), message: format!("cannot parse `{s}`") };
    let atom = |a: &str| -> Result<f64> {
        if a == "pi" {
            Ok(std::f64::consts::PI)
        } else {
            a.parse::<f64>().map_err(|_| bad())
        }
    };
    let (num_part, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), atom(d.trim())?),
        None => (t.clone(), 1.0),
    };
    let value = num_part.split('*').map(|a| atom(a.trim())).product::<Result<f64>>()?;
    Ok(value / den)
}

pub fn parse_values(list: &str) -> Result<Vec<f64>> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse_value).collect()
}

fn data_f64(r: &ScenarioReport, s: Suite, path: &[&str]) -> Option<f64> {
    let mut v = &r.suite(s)?.data;
    for p in path {
        v = v.get(*p)?;
    }
    v.as_f64()
}

pub const SWEEP_HEADER: [&str; 11] = [
    "axis", "value", "passed", "hard_failures", "area", "area_order", "index", "energy_index", "r", "bound", "sobolev_margin",
];

/// One scenario run per value on a pool of `workers` threads; rows keep the
/// order of `values`.
pub fn sweep(sc: &Scenario, axis: Axis, values: &[f64], workers: usize) -> Result<(Table, Vec<ScenarioReport>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let reports: Vec<ScenarioReport> =
        pool.install(|| values.par_iter().map(|&v| run_scenario(&axis.apply(sc, v))).collect::<Result<_>>())?;
    let mut table = Table::new("sweep", &SWEEP_HEADER);
    let areas: Vec<f64> = reports.iter().map(|r| r.geometry.area).collect();
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for (i, (v, r)) in values.iter().zip(&reports).enumerate() {
        let order = if axis == Axis::Grid && i >= 2 {
            let (d1, d2) = ((areas[i - 1] - areas[i - 2]).abs(), (areas[i] - areas[i - 1]).abs());
            if d2 > 0.0 { Some((d1 / d2).log2()) } else { None }
        } else {
            None
        };
        table.push(vec![
            axis.name().into(),
            num(*v),
            r.passed.to_string(),
            r.hard_failures().to_string(),
            num(r.geometry.area),
            opt(order),
            opt(data_f64(r, Suite::Spectra, &["index"])),
            opt(data_f64(r, Suite::Spectra, &["energy_index", "index"])),
            opt(data_f64(r, Suite::Bounds, &["r", "r"])),
            opt(data_f64(r, Suite::Bounds, &["bound", "bound"])),
            opt(data_f64(r, Suite::Bounds, &["sobolev_min_margin"])),
        ]);
    }
    Ok((table, reports))
}
