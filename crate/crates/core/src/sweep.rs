//! Parameter sweeps producing load and bound curves.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{lb_genie, lb_uniform};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::math::fmt_sig12;
use crate::optimizer::{baseline_mn_centralized, solve_problem3};
use crate::popularity::PopularitySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    M,
    Gamma,
    N,
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" => Ok(SweepVar::M),
            "gamma" => Ok(SweepVar::Gamma),
            "N" => Ok(SweepVar::N),
            _ => Err(Error::Config(format!("unknown sweep variable {s:?} (M, gamma or N)"))),
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::M => "M",
            SweepVar::Gamma => "gamma",
            SweepVar::N => "N",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub var: f64,
    pub optimized_load: f64,
    pub baseline_mn_load: f64,
    pub lb_genie: f64,
    pub lb_uniform: f64,
}

/// `steps` evenly spaced points from `from` to `to`, both included.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|i| if i + 1 == steps { to } else { from + (to - from) * i as f64 / (steps - 1) as f64 })
            .collect(),
    }
}

fn configure(base: &Config, var: SweepVar, value: f64) -> Result<Config> {
    let mut c = base.clone();
    match var {
        SweepVar::M => c.cache = value,
        SweepVar::Gamma => match c.popularity {
            PopularitySpec::Zipf { .. } => c.popularity = PopularitySpec::Zipf { gamma: value },
            PopularitySpec::Explicit { .. } => {
                return Err(Error::Config("gamma sweeps need a zipf popularity".into()));
            }
        },
        SweepVar::N => {
            let rounded = value.round();
            if (value - rounded).abs() > 1e-9 || rounded < 1.0 {
                return Err(Error::Config(format!("N = {value} is not a positive integer")));
            }
            if matches!(c.popularity, PopularitySpec::Explicit { .. }) {
                return Err(Error::Config("N sweeps need a zipf popularity".into()));
            }
            c.files = rounded as usize;
        }
    }
    Ok(c)
}

pub fn sweep_point(base: &Config, var: SweepVar, value: f64) -> Result<SweepRow> {
    let inst = configure(base, var, value)?.instance()?;
    Ok(SweepRow {
        var: value,
        optimized_load: solve_problem3(&inst)?.value,
        baseline_mn_load: baseline_mn_centralized(&inst)?.value,
        lb_genie: lb_genie(&inst),
        lb_uniform: lb_uniform(inst.k(), inst.n(), inst.m()),
    })
}

/// Evaluate every point; rows come back in sweep order.
pub fn sweep(base: &Config, var: SweepVar, from: f64, to: f64, steps: usize, exec: Execution) -> Result<Vec<SweepRow>> {
    let points = linspace(from, to, steps);
    map_ordered(exec, &points, |&v| sweep_point(base, var, v)).into_iter().collect()
}

pub const CSV_HEADER: &str = "var,optimized_load,baseline_mn_load,lb_genie,lb_uniform";

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_sig12(r.var),
            fmt_sig12(r.optimized_load),
            fmt_sig12(r.baseline_mn_load),
            fmt_sig12(r.lb_genie),
            fmt_sig12(r.lb_uniform)
        )?;
    }
    Ok(())
}
