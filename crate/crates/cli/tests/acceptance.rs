//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use fraclps::probe::{probe_config, trend};
use fraclps::verify::{self, Row};
use fraclps::RunConfig;
use fraclps_core::banach::run_cotype_probe;

fn shipped_config() -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("config/default.conf");
    RunConfig::load(&path).expect("shipped config parses")
}

fn rows_named<'a>(rows: &'a [Row], names: &[&str]) -> Vec<&'a Row> {
    names
        .iter()
        .map(|n| rows.iter().find(|r| r.name == *n).unwrap_or_else(|| panic!("no check named {n}")))
        .collect()
}

fn from_rows(rows: &[Row], names: &[&str]) -> (bool, String) {
    let picked = rows_named(rows, names);
    let ok = picked.iter().all(|r| r.passed);
    let detail = picked
        .iter()
        .map(|r| match &r.error {
            Some(e) => format!("{} error: {e}", r.name),
            None => format!("{}={:.3e}<={:.0e}", r.name, r.value, r.tolerance),
        })
        .collect::<Vec<_>>()
        .join(" ");
    (ok, detail)
}

fn cotype(cfg: &RunConfig) -> (bool, String) {
    let mut parts = Vec::new();
    let mut ok = true;
    for (r, q, growing) in [(4.0, 2.0, true), (2.0, 2.0, false), (4.0, 4.0, false)] {
        let mut c = cfg.clone();
        c.r = r;
        c.q = q;
        let res = probe_config(&c).and_then(|pc| run_cotype_probe(&pc).map_err(fraclps::CliError::from));
        match res {
            Ok(res) => {
                let t = trend(&res);
                ok &= if growing { t >= cfg.grow_threshold } else { t <= cfg.flat_threshold };
                parts.push(format!("(r,q)=({r},{q}) ratio={t:.4}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("(r,q)=({r},{q}) error: {e}"));
            }
        }
    }
    parts.push(format!("thresholds {} / {}", cfg.grow_threshold, cfg.flat_threshold));
    (ok, parts.join(" "))
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn run_twice(cfg: &RunConfig, base: &Path, args: &[&str]) -> Result<bool, String> {
    let mut outputs = Vec::new();
    for k in 0..2 {
        let dir: PathBuf = base.join(format!("run{k}"));
        let mut c = cfg.clone();
        c.out = dir.clone();
        let (mut so, mut se) = (Vec::new(), Vec::new());
        let exit = match args {
            ["verify", suite] => verify::run(&c, suite, &mut so, &mut se),
            ["probe", kind] => fraclps::probe::run(&c, kind, None, &mut so),
            _ => unreachable!(),
        }
        .map_err(|e| e.to_string())?;
        outputs.push((exit, so, read_dir_bytes(&dir)));
    }
    Ok(outputs[0] == outputs[1])
}

fn determinism(cfg: &RunConfig) -> (bool, String) {
    let tmp = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, args) in [["verify", "all"], ["probe", "cotype"], ["probe", "hilbert-convergence"]].iter().enumerate() {
        let mut c = cfg.clone();
        if args[1] == "cotype" {
            c.r = 4.0;
        }
        match run_twice(&c, &tmp.path().join(i.to_string()), args) {
            Ok(same) => {
                ok &= same;
                parts.push(format!("{} {}: {}", args[0], args[1], if same { "identical" } else { "DIFFERENT" }));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{} {}: error {e}", args[0], args[1]));
            }
        }
    }
    (ok, parts.join(", "))
}

fn main() -> ExitCode {
    let cfg = shipped_config();
    let start = Instant::now();
    let rows = verify::evaluate(&cfg, "all").expect("suite exists");
    let table_secs = start.elapsed().as_secs_f64();
    println!("verification table evaluated in {table_secs:.1} s");

    type Criterion<'a> = (&'a str, Box<dyn Fn() -> (bool, String) + 'a>);
    let r = &rows;
    let criteria: Vec<Criterion> = vec![
        ("subordination matches the Poisson multiplier", Box::new(move || from_rows(r, &["subordination"]))),
        (
            "quadrature and spectral routes agree",
            Box::new(move || {
                from_rows(
                    r,
                    &[
                        "route_alpha_0.3",
                        "route_alpha_0.5",
                        "route_alpha_1.0",
                        "route_alpha_1.3",
                        "route_alpha_2.0",
                        "route_alpha_2.7",
                        "integer_order_1",
                        "integer_order_2",
                    ],
                )
            }),
        ),
        ("decay bound stable under time-grid doubling", Box::new(move || from_rows(r, &["decay_stability"]))),
        (
            "order reduction and composition",
            Box::new(move || from_rows(r, &["order_reduction_single", "order_reduction_random", "composition_single", "composition_random"])),
        ),
        ("comparison of orders with explicit constant", Box::new(move || from_rows(r, &["beta_gamma_comparison"]))),
        ("single-mode closed form", Box::new(move || from_rows(r, &["g_single_mode_half", "g_single_mode_closed_form"]))),
        ("L^q identity between S and g", Box::new(move || from_rows(r, &["lq_identity_single", "lq_identity_random"]))),
        ("pointwise chain and g/S stability", Box::new(move || from_rows(r, &["area_gstar_chain", "g_over_s_stability"]))),
        ("polarization identity", Box::new(move || from_rows(r, &["polarization_random", "polarization_single"]))),
        ("iteration identity", Box::new(move || from_rows(r, &["iteration_k1", "iteration_k2"]))),
        ("kernel bounds stable under refinement", Box::new(move || from_rows(r, &["kernel_bounds_stability"]))),
        ("cotype probe trends", Box::new(|| cotype(&cfg))),
        ("Hilbert comparison and log 3", Box::new(move || from_rows(r, &["comparison_stability", "indicator_log3"]))),
        ("determinism of verify and probe", Box::new(|| determinism(&cfg))),
    ];

    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (ok, detail) = run();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:2} {}: {} [{detail}] ({:.1} s)",
            i + 1,
            title,
            if ok { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
