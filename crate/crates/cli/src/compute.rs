//! `compute`: apply one operator to an input field.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use fraclps_core::fracderiv::{frac_derivative_quadrature, frac_derivative_spectral, FracOrder, SWQuadrature};
use fraclps_core::grid::{read_field_csv, write_field_csv, Field};
use fraclps_core::semigroup::{heat_apply, poisson_apply, subordinate_poisson, SubordinationQuad};
use fraclps_core::squarefuncs::{area_function, default_time_grid, g_function, gstar_function, SquareFunctionReport, TimeGrid};

use crate::config::{fmt_f64, Route, RunConfig, SemigroupKind};
use crate::error::{CliError, Exit};
use crate::output::{write_with, Sidecar};

pub const KINDS: [&str; 5] = ["semigroup", "fracderiv", "gfun", "area", "gstar"];

/// Reads the input field on the grid and value space of `cfg`.
pub fn read_input(cfg: &RunConfig, path: &Path) -> Result<Field<f64>, CliError> {
    let file = File::open(path).map_err(|e| CliError::input(format!("cannot open input {}: {e}", path.display())))?;
    read_field_csv(BufReader::new(file), cfg.grid()?, cfg.banach()?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn sw_quadrature(cfg: &RunConfig) -> Result<SWQuadrature<f64>, CliError> {
    Ok(SWQuadrature::with_tolerance(cfg.sw_near, cfg.sw_far, cfg.sw_tolerance)?)
}

/// The configured time grid, or the default one for `f`.
pub fn time_grid(cfg: &RunConfig, f: &Field<f64>, ord: FracOrder<f64>) -> Result<TimeGrid<f64>, CliError> {
    let tg = match (cfg.t_min, cfg.t_max) {
        (Some(a), Some(b)) => return Ok(TimeGrid::new(a, b, cfg.count.unwrap_or_else(|| TimeGrid::<f64>::default_count(a, b)))?),
        _ => default_time_grid(f, ord, cfg.q)?,
    };
    match cfg.count {
        Some(c) => Ok(TimeGrid::new(tg.t_min(), tg.t_max(), c)?),
        None => Ok(tg),
    }
}

fn alpha_tag(a: f64) -> String {
    fmt_f64(a).replace('.', "p")
}

/// Runs `compute kind` on the field at `input`; writes into `cfg.out`.
pub fn run(cfg: &RunConfig, kind: &str, input: &Path, stdout: &mut dyn Write) -> Result<Exit, CliError> {
    if !KINDS.contains(&kind) {
        return Err(CliError::config(format!("unknown compute kind `{kind}`; expected one of {}", KINDS.join(", "))));
    }
    let f = read_input(cfg, input)?;
    let dir = cfg.out.as_path();
    let mut written = Vec::new();
    match kind {
        "semigroup" => {
            let out = match cfg.semigroup {
                SemigroupKind::Poisson => poisson_apply(&f, cfg.t)?,
                SemigroupKind::Heat => heat_apply(&f, cfg.t)?,
                SemigroupKind::Subordinated => {
                    let quad = SubordinationQuad::with_tolerance(cfg.subordination_nodes, cfg.subordination_tolerance)?;
                    subordinate_poisson(&f, cfg.t, &quad)?
                }
            };
            let name = "semigroup.csv";
            let mut meta = Sidecar::new(cfg, "compute", kind);
            meta.push("semigroup", cfg.semigroup.name());
            meta.push("t", fmt_f64(cfg.t));
            written.push(write_with(dir, name, |b| write_field_csv(&out, b))?);
            meta.write(dir, name)?;
        }
        "fracderiv" => {
            let quad = sw_quadrature(cfg)?;
            let fields = cfg
                .alpha
                .iter()
                .map(|&a| {
                    let ord = FracOrder::new(a)?;
                    match cfg.route {
                        Route::Spectral => frac_derivative_spectral(&f, cfg.t, ord),
                        Route::Quadrature => frac_derivative_quadrature(&f, cfg.t, ord, &quad),
                    }
                })
                .collect::<fraclps_core::Result<Vec<_>>>()?;
            for (&a, out) in cfg.alpha.iter().zip(&fields) {
                let name = format!("fracderiv_alpha_{}.csv", alpha_tag(a));
                let mut meta = Sidecar::new(cfg, "compute", kind);
                meta.push("alpha", fmt_f64(a));
                meta.push("t", fmt_f64(cfg.t));
                meta.push("route", cfg.route.name());
                written.push(write_with(dir, &name, |b| write_field_csv(out, b))?);
                meta.write(dir, &name)?;
            }
        }
        _ => {
            let mut reports: Vec<SquareFunctionReport<f64>> = Vec::new();
            for &a in &cfg.alpha {
                let ord = FracOrder::new(a)?;
                let tg = time_grid(cfg, &f, ord)?;
                let rep = match kind {
                    "gfun" => g_function(&f, ord, cfg.q, &tg)?,
                    "area" => area_function(&f, ord, cfg.q, &tg)?,
                    _ => gstar_function(&f, ord, cfg.q, cfg.lambda, &tg)?,
                };
                if rep.truncation_flag {
                    return Err(CliError::accuracy(format!(
                        "{kind} with alpha = {a}: neglected t-tails estimated at {:.3e} of the result; widen t_min/t_max",
                        rep.tail_estimate
                    )));
                }
                reports.push(rep);
            }
            for (&a, rep) in cfg.alpha.iter().zip(&reports) {
                let name = format!("{kind}_alpha_{}.csv", alpha_tag(a));
                let mut meta = Sidecar::new(cfg, "compute", kind);
                meta.extend(rep.metadata());
                written.push(write_with(dir, &name, |b| rep.write_csv(b))?);
                meta.write(dir, &name)?;
            }
        }
    }
    for p in written {
        writeln!(stdout, "wrote {}", p.display()).map_err(|e| CliError::input(e.to_string()))?;
    }
    Ok(Exit::Ok)
}
