//! `probe`: Banach-space growth probes and the Hilbert convergence probe.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use fraclps_core::banach::{run_cotype_probe, run_type_probe, ProbeConfig, ProbeResult};
use fraclps_core::fracderiv::FracOrder;
use fraclps_core::hilbert::{convergence_study, probe_table, standard_fields, ConvergenceStudy, CutoffPhi, LineSample};

use crate::config::{fmt_f64, RunConfig};
use crate::error::{CliError, Exit};
use crate::output::{write_atomic, write_with, Sidecar};

pub const KINDS: [&str; 3] = ["cotype", "type", "hilbert-convergence"];

/// Multiples of the step used as truncation levels.
const MULTIPLES: [f64; 4] = [16.0, 8.0, 4.0, 2.0];

/// Verdict on `ρ(m_last)/ρ(2)` against the frozen thresholds.
pub fn verdict(trend: f64, cfg: &RunConfig) -> &'static str {
    if trend >= cfg.grow_threshold {
        "growing"
    } else if trend <= cfg.flat_threshold {
        "bounded"
    } else {
        "inconclusive"
    }
}

pub fn probe_config(cfg: &RunConfig) -> Result<ProbeConfig<f64>, CliError> {
    let mut pc = ProbeConfig::new(cfg.r, cfg.q, cfg.m_list.clone(), cfg.trials, cfg.seed)?;
    pc.alpha = FracOrder::new(cfg.alpha[0])?;
    pc.base_freq = cfg.base_freq;
    pc.validate()?;
    Ok(pc)
}

/// `ρ(m_last)/ρ(2)`, or against the first dimension when 2 is not listed.
pub fn trend(res: &ProbeResult<f64>) -> f64 {
    let last = *res.m_list.last().unwrap();
    res.trend_between(2, last).unwrap_or_else(|| res.trend())
}

fn io(e: std::io::Error) -> CliError {
    CliError::input(e.to_string())
}

fn banach_probe(cfg: &RunConfig, kind: &str, stdout: &mut dyn Write) -> Result<Exit, CliError> {
    let pc = probe_config(cfg)?;
    let res = if kind == "cotype" { run_cotype_probe(&pc)? } else { run_type_probe(&pc)? };
    let t = trend(&res);
    let v = verdict(t, cfg);
    let name = format!("probe_{kind}.csv");
    let mut meta = Sidecar::new(cfg, "probe", kind);
    meta.push("r", fmt_f64(cfg.r));
    meta.push("q", fmt_f64(cfg.q));
    meta.push("alpha", fmt_f64(cfg.alpha[0]));
    meta.push("trend", format!("{t:.6e}"));
    meta.push("verdict", v);
    meta.push("grow_threshold", fmt_f64(cfg.grow_threshold));
    meta.push("flat_threshold", fmt_f64(cfg.flat_threshold));
    write_with(&cfg.out, &name, |b| res.write_csv(b))?;
    meta.write(&cfg.out, &name)?;
    let last = res.m_list.last().unwrap();
    writeln!(
        stdout,
        "{kind} r={} q={} rho({last})/rho(2)={t:.4} growth_exponent={:.4} verdict={v}",
        fmt_f64(cfg.r),
        fmt_f64(cfg.q),
        res.growth_exponent
    )
    .map_err(io)?;
    Ok(Exit::Ok)
}

/// The probe field: a Hilbert-sample CSV if given, else the named standard field.
pub fn hilbert_field(cfg: &RunConfig, input: Option<&Path>) -> Result<LineSample<f64>, CliError> {
    match input {
        Some(path) => {
            let file = File::open(path).map_err(|e| CliError::input(format!("cannot open input {}: {e}", path.display())))?;
            LineSample::read_csv(BufReader::new(file), cfg.banach()?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
        }
        None => {
            let fields = standard_fields::<f64>(cfg.half_width, cfg.half_points)?;
            let (_, f) = fields.into_iter().find(|(n, _)| *n == cfg.hilbert_field).expect("name validated with the config");
            Ok(f)
        }
    }
}

/// Median oscillation at the finest resolution and `resolutions − 1` decimations of it.
pub fn hilbert_study(cfg: &RunConfig, f: &LineSample<f64>) -> Result<ConvergenceStudy<f64>, CliError> {
    let m = f.half_points();
    let levels: Vec<usize> = (0..cfg.resolutions).rev().map(|k| m >> k).collect();
    if levels[0] < 8 || levels[0] << (cfg.resolutions - 1) != m {
        return Err(CliError::config(format!("resolutions = {} does not fit the {m} half points of the sample", cfg.resolutions)));
    }
    Ok(convergence_study(|l| f.decimate(m / l), &levels, &MULTIPLES, cfg.osc_threshold)?)
}

fn hilbert_probe(cfg: &RunConfig, input: Option<&Path>, stdout: &mut dyn Write) -> Result<Exit, CliError> {
    let f = hilbert_field(cfg, input)?;
    let study = hilbert_study(cfg, &f)?;
    let mut csv = String::from("h,median_osc,fraction_below\n");
    for ((h, m), fr) in study.steps.iter().zip(&study.medians).zip(&study.fractions) {
        csv.push_str(&format!("{h:.16e},{m:.16e},{fr:.16e}\n"));
    }
    let decreasing = study.medians.windows(2).all(|w| w[1] < w[0]);
    let v = if decreasing { "converging" } else { "not-converging" };
    let source = input.map_or_else(|| cfg.hilbert_field.clone(), |p| p.file_name().map_or("input".into(), |n| n.to_string_lossy().into_owned()));
    let mut meta = Sidecar::new(cfg, "probe", "hilbert-convergence");
    meta.push("field", source.clone());
    meta.push("half_width", fmt_f64(f.half_width()));
    meta.push("half_points", f.half_points().to_string());
    meta.push("multiples", MULTIPLES.iter().map(|&m| fmt_f64(m)).collect::<Vec<_>>().join(","));
    meta.push("rate", format!("{:.6e}", study.rate));
    meta.push("verdict", v);
    let name = "hilbert_convergence.csv";
    write_atomic(&cfg.out, name, csv.as_bytes())?;
    meta.write(&cfg.out, name)?;

    let eps: Vec<f64> = MULTIPLES.iter().map(|&c| c * f.step()).collect();
    let table = probe_table(&f, &CutoffPhi::default(), &eps, cfg.per_octave, cfg.osc_threshold)?;
    let name = "hilbert_probe.csv";
    write_with(&cfg.out, name, |b| table.write_csv(b))?;
    let mut meta = Sidecar::new(cfg, "probe", "hilbert-convergence");
    meta.push("field", source.clone());
    meta.push("eps", eps.iter().map(|&e| format!("{e:e}")).collect::<Vec<_>>().join(","));
    meta.push("fraction_below", format!("{:.6e}", table.report.fraction_below));
    meta.write(&cfg.out, name)?;

    writeln!(stdout, "hilbert-convergence field={source} rate={:.4} verdict={v}", study.rate).map_err(io)?;
    Ok(Exit::Ok)
}

pub fn run(cfg: &RunConfig, kind: &str, input: Option<&Path>, stdout: &mut dyn Write) -> Result<Exit, CliError> {
    match kind {
        "cotype" | "type" => {
            if input.is_some() {
                return Err(CliError::config(format!("the {kind} probe builds its own fields and takes no --input")));
            }
            banach_probe(cfg, kind, stdout)
        }
        "hilbert-convergence" => hilbert_probe(cfg, input, stdout),
        _ => Err(CliError::config(format!("unknown probe kind `{kind}`; expected one of {}", KINDS.join(", ")))),
    }
}
