//! Command-line front end for the soliton catalog: exact parameter
//! derivation, family listing and evaluation, residual verification,
//! algebraic-system inspection, and figure-dataset emission.

use clap::{Parser, Subcommand};
use rodwave::cas::{
    self, build_mefm_system, build_sg_system, candidates, theorem1_counts, AlgebraicSystem,
    AuxVariant,
};
use rodwave::catalog::{
    self, coefficient_set, list_families, CatalogError, FamilyId, FamilyInputs,
};
use rodwave::figures::{self, OutputFormat};
use rodwave::materials::{derive_parameters, reference_set_a, MaterialConstants};
use rodwave::rational::rat_to_f64;
use rodwave::verify::{self, GridSpec, ResidualReport, Status};
use serde::Deserialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "rodwave",
    version,
    about = "soliton catalog for a dispersive rod wave equation"
)]
struct Cli {
    /// JSON config file: {"material": {..}, "family": "..", "inputs": {..}}
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,
    /// seed for sampled verification grids
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the exact material parameters (config material or the
    /// built-in reference set)
    Params,
    /// List every cataloged family with classification and constraints
    List,
    /// Evaluate one family at a spacetime point
    Eval {
        /// family id, e.g. sg.case1.tanh.plus (or set "family" in --config)
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Residual-verify the whole catalog or one family
    Verify {
        /// verify a single family id instead of the whole catalog
        #[arg(long)]
        family: Option<String>,
        /// relative residual tolerance (default 1e-9)
        #[arg(long)]
        tol: Option<f64>,
        /// sample grid: "N" points, or "x0:x1:N"
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// flagged errata are reported but do not fail the run
        #[arg(long)]
        allow_errata: bool,
    },
    /// Emit a figure-reproduction dataset
    Figure {
        /// preset id, fig1..fig11
        preset: String,
        /// output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// csv or json
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Regenerate an overdetermined algebraic system and inspect it
    System {
        /// sg or mefm
        kind: String,
        /// expansion order (mefm only; 1..=3)
        m: Option<u32>,
        /// auxiliary flow variant (mefm only): full, sigma0, discrim0, both0
        aux: Option<String>,
        /// check a published case against the system, e.g. mefm.case13
        #[arg(long)]
        check: Option<String>,
    },
}

/// Error carrying the process exit code: 1 failure, 2 invalid input.
struct Failure {
    code: u8,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Config {
    material: Option<MaterialConstants>,
    family: Option<String>,
    inputs: Option<InputOverrides>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct InputOverrides {
    mu: Option<f64>,
    lambda: Option<f64>,
    tau: Option<f64>,
    sigma: Option<f64>,
    e: Option<f64>,
    q0: Option<f64>,
    q1: Option<f64>,
}

fn load_config(path: &Option<PathBuf>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("invalid config: {e}")))
}

fn parse_family(id: &str) -> Result<FamilyId, Failure> {
    FamilyId::from_str(id).map_err(|e| invalid(e.to_string()))
}

/// Family-appropriate defaults with config material and overrides applied.
fn resolve_inputs(id: &FamilyId, config: &Config) -> Result<FamilyInputs, Failure> {
    let material = match &config.material {
        Some(mc) => catalog::MaterialInputs::from_constants(mc)
            .map_err(|e| invalid(format!("invalid material constants: {e}")))?,
        None => catalog::MaterialInputs::from_constants(&reference_set_a())
            .expect("reference material set is valid"),
    };
    let mut inputs = verify::default_inputs_with(id, material);
    if let Some(o) = &config.inputs {
        if let Some(v) = o.mu {
            inputs.mu = v;
        }
        if let Some(v) = o.lambda {
            inputs.lambda = v;
        }
        if let Some(v) = o.tau {
            inputs.tau = v;
        }
        if let Some(v) = o.sigma {
            inputs.sigma = v;
        }
        if let Some(v) = o.e {
            inputs.e = v;
        }
        if let Some(v) = o.q0 {
            inputs.q0 = v;
        }
        if let Some(v) = o.q1 {
            inputs.q1 = v;
        }
    }
    Ok(inputs)
}

fn cfmt(z: rodwave::jet::Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{} - {}i", z.re, -z.im)
    } else {
        format!("{} + {}i", z.re, z.im)
    }
}

fn cmd_params(cli: &Cli) -> Result<(), Failure> {
    let config = load_config(&cli.config)?;
    let mc = config.material.unwrap_or_else(reference_set_a);
    let dp = derive_parameters(&mc).map_err(|e| invalid(e.to_string()))?;
    let mut exact = serde_json::Map::new();
    let mut approx = serde_json::Map::new();
    for (name, rat) in [
        ("n1", &dp.n1),
        ("kappa1", &dp.kappa1),
        ("kappa3", &dp.kappa3),
        ("kappa5", &dp.kappa5),
        ("kappa6", &dp.kappa6),
        ("c1", &dp.c1),
        ("c2", &dp.c2),
        ("beta1", &dp.beta1),
        ("alpha1", &dp.alpha1),
        ("alpha2", &dp.alpha2),
    ] {
        exact.insert(
            name.to_string(),
            json!(rodwave::rational::rat_to_string(rat)),
        );
        approx.insert(name.to_string(), json!(rat_to_f64(rat)));
    }
    let out = json!({ "exact": exact, "approx": approx });
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializes")
    );
    Ok(())
}

fn cmd_list(cli: &Cli) -> Result<(), Failure> {
    let families = list_families();
    if cli.json {
        let rows: Vec<_> = families
            .iter()
            .map(|f| {
                json!({
                    "id": f.id,
                    "classification": f.classification,
                    "free_parameters": f.free_parameters,
                    "constraint": f.constraint,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&rows).expect("serializes")
        );
        return Ok(());
    }
    println!(
        "{:<28} {:<38} {:<36} constraint",
        "family", "classification", "free parameters"
    );
    for f in &families {
        println!(
            "{:<28} {:<38} {:<36} {}",
            f.id.to_string(),
            format!("{:?}", f.classification),
            f.free_parameters.join(","),
            f.constraint
        );
    }
    println!("{} families", families.len());
    Ok(())
}

fn cmd_eval(cli: &Cli, family: &Option<String>, x: f64, t: f64) -> Result<(), Failure> {
    let config = load_config(&cli.config)?;
    let id = match family.as_deref().or(config.family.as_deref()) {
        Some(s) => parse_family(s)?,
        None => return Err(invalid("no family given (use --family or config)")),
    };
    let inputs = resolve_inputs(&id, &config)?;
    let coeffs = coefficient_set(&id, &inputs).map_err(|e| match e {
        CatalogError::ConstraintViolated { .. } | CatalogError::UnknownFamily { .. } => {
            invalid(e.to_string())
        }
        other => failed(other.to_string()),
    })?;
    match catalog::evaluate(&id, &inputs, x, t) {
        Ok(u) => {
            if cli.json {
                let out = json!({
                    "family": id,
                    "x": x,
                    "t": t,
                    "re": u.re,
                    "im": u.im,
                    "lambda": { "re": coeffs.lambda().re, "im": coeffs.lambda().im },
                    "mu": { "re": coeffs.mu().re, "im": coeffs.mu().im },
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out).expect("serializes")
                );
            } else {
                println!("{id} at (x, t) = ({x}, {t})");
                println!("u      = {}", cfmt(u));
                println!("lambda = {}", cfmt(coeffs.lambda()));
                println!("mu     = {}", cfmt(coeffs.mu()));
            }
            Ok(())
        }
        Err(e) => Err(failed(e.to_string())),
    }
}

fn parse_grid(spec: &Option<String>, tol: Option<f64>, seed: u64) -> Result<GridSpec, Failure> {
    let mut grid = GridSpec {
        seed,
        ..GridSpec::default()
    };
    if let Some(tol) = tol {
        if !(tol > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        grid.tolerance = tol;
    }
    if let Some(spec) = spec {
        let parts: Vec<&str> = spec.split(':').collect();
        let err = || {
            invalid(format!(
                "invalid grid spec {spec:?}; use \"N\" or \"x0:x1:N\""
            ))
        };
        match parts.as_slice() {
            [n] => {
                grid.points = n.parse().map_err(|_| err())?;
            }
            [x0, x1, n] => {
                let lo: f64 = x0.parse().map_err(|_| err())?;
                let hi: f64 = x1.parse().map_err(|_| err())?;
                if !(lo < hi) {
                    return Err(err());
                }
                grid.x_range = (lo, hi);
                grid.points = n.parse().map_err(|_| err())?;
            }
            _ => return Err(err()),
        }
        if grid.points == 0 {
            return Err(err());
        }
    }
    Ok(grid)
}

fn verify_exit(reports: &[ResidualReport], allow_errata: bool) -> Result<(), Failure> {
    let fails = reports.iter().filter(|r| r.status == Status::Fail).count();
    let flagged = reports
        .iter()
        .filter(|r| r.status == Status::FlaggedErratum)
        .count();
    if fails > 0 {
        Err(failed(format!("{fails} families FAILED verification")))
    } else if flagged > 0 && !allow_errata {
        Err(failed(format!(
            "{flagged} families flagged as errata (rerun with --allow-errata to tolerate them)"
        )))
    } else {
        Ok(())
    }
}

fn cmd_verify(
    cli: &Cli,
    family: &Option<String>,
    tol: Option<f64>,
    grid_spec: &Option<String>,
    allow_errata: bool,
) -> Result<(), Failure> {
    let config = load_config(&cli.config)?;
    let grid = parse_grid(grid_spec, tol, cli.seed)?;
    let reports: Vec<ResidualReport> = match family.as_deref().or(config.family.as_deref()) {
        Some(s) => {
            let id = parse_family(s)?;
            let inputs = resolve_inputs(&id, &config)?;
            vec![verify::verify_family(&id, &inputs, &grid)]
        }
        None => verify::verify_catalog(&grid),
    };
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&reports).expect("serializes")
        );
    } else {
        print!("{}", verify::render_table(&reports));
        let (mut pass, mut fail, mut flag) = (0, 0, 0);
        for r in &reports {
            match r.status {
                Status::Pass => pass += 1,
                Status::Fail => fail += 1,
                Status::FlaggedErratum => flag += 1,
            }
        }
        println!("{pass} PASS, {fail} FAIL, {flag} FLAGGED_ERRATUM");
        for r in reports.iter().filter(|r| !r.notes.is_empty()) {
            println!("  {}: {}", r.family, r.notes);
        }
    }
    verify_exit(&reports, allow_errata)
}

fn cmd_figure(cli: &Cli, preset: &str, out: &PathBuf, format: &str) -> Result<(), Failure> {
    let format = OutputFormat::parse(format)
        .ok_or_else(|| invalid(format!("unknown format {format:?}; use csv or json")))?;
    let manifest = figures::emit_by_id(preset, out, format).map_err(|e| match e {
        figures::FigureError::UnknownPreset(_) => invalid(e.to_string()),
        other => failed(other.to_string()),
    })?;
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&manifest).expect("serializes")
        );
    } else {
        println!(
            "wrote {} series files and {}_manifest.json to {}",
            manifest.series.len(),
            manifest.figure,
            out.display()
        );
        for note in &manifest.notes {
            println!("  note: {note}");
        }
        for s in &manifest.series {
            println!(
                "  {}: {} rows, {} masked, max |pde residual| = {:.3e}",
                s.file, s.rows, s.masked_cells, s.residual.max_abs_pde_residual
            );
        }
    }
    Ok(())
}

/// Parse "sg.caseN" / "mefm.caseN" into (is_mefm, case number).
fn parse_check(id: &str) -> Result<(bool, u8), Failure> {
    let err = || {
        invalid(format!(
            "invalid case id {id:?}; use sg.caseN or mefm.caseN"
        ))
    };
    let (method, case) = id.split_once('.').ok_or_else(err)?;
    let case_no: u8 = case
        .strip_prefix("case")
        .ok_or_else(err)?
        .parse()
        .map_err(|_| err())?;
    match method {
        "sg" if (1..=6).contains(&case_no) => Ok((false, case_no)),
        "mefm" if (7..=15).contains(&case_no) => Ok((true, case_no)),
        _ => Err(err()),
    }
}

fn run_check(sys: &AlgebraicSystem, id: &str, wants_mefm: bool) -> Result<(), Failure> {
    let (is_mefm, case_no) = parse_check(id)?;
    if is_mefm != wants_mefm {
        return Err(invalid(format!(
            "case id {id:?} does not belong to this system kind"
        )));
    }
    let assignment = if is_mefm {
        candidates::mefm_case(case_no, &sys.ring)
    } else {
        candidates::sg_case(case_no, &sys.ring)
    };
    let residuals = cas::check_candidate(sys, &assignment).map_err(|e| invalid(e.to_string()))?;
    let mut nonzero = 0;
    for (eq, resid) in sys.equations.iter().zip(&residuals) {
        if resid.is_zero() {
            println!("  {}: zero", eq.label);
        } else {
            nonzero += 1;
            println!("  {}: nonzero ({} terms)", eq.label, resid.num_terms());
        }
    }
    if nonzero == 0 {
        println!("all residuals identically zero");
        Ok(())
    } else {
        Err(failed(format!("{nonzero} nonzero residuals")))
    }
}

fn cmd_system(
    cli: &Cli,
    kind: &str,
    m: Option<u32>,
    aux: &Option<String>,
    check: &Option<String>,
) -> Result<(), Failure> {
    match kind {
        "sg" => {
            if m.is_some() || aux.is_some() {
                return Err(invalid("the sg system takes no order or aux arguments"));
            }
            let sys = build_sg_system();
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&sys.to_json()).expect("serializes")
                );
            } else {
                println!(
                    "equations: {} (predicted 9), unknowns: {} (predicted 7)",
                    sys.equations.len(),
                    sys.unknowns.len()
                );
            }
            match check {
                Some(id) => run_check(&sys, id, false),
                None => Ok(()),
            }
        }
        "mefm" => {
            let m = m.ok_or_else(|| {
                invalid("mefm needs an expansion order, e.g. `system mefm 1 full`")
            })?;
            if !(1..=3).contains(&m) {
                // larger orders choke symbolic expansion; refuse rather
                // than hang
                return Err(invalid(format!("unsupported order {m}; use 1..=3")));
            }
            let aux = match aux.as_deref() {
                None => AuxVariant::Full,
                Some(s) => AuxVariant::parse(s)
                    .ok_or_else(|| invalid(format!("unknown aux variant {s:?}")))?,
            };
            let sys = build_mefm_system(m, aux);
            let (pred_eq, pred_unk) = theorem1_counts(m);
            if cli.json {
                let mut value = sys.to_json();
                value["predicted_equations"] = json!(pred_eq);
                value["predicted_unknowns"] = json!(pred_unk);
                println!(
                    "{}",
                    serde_json::to_string_pretty(&value).expect("serializes")
                );
            } else {
                println!(
                    "equations: {} (predicted {}), unknowns: {} (predicted {})",
                    sys.equations.len(),
                    pred_eq,
                    sys.unknowns.len(),
                    pred_unk
                );
            }
            match check {
                Some(id) => {
                    if m != 1 {
                        return Err(invalid("published cases check against order 1 only"));
                    }
                    run_check(&sys, id, true)
                }
                None => Ok(()),
            }
        }
        other => Err(invalid(format!(
            "unknown system kind {other:?}; use sg or mefm"
        ))),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Params => cmd_params(cli),
        Command::List => cmd_list(cli),
        Command::Eval { family, x, t } => cmd_eval(cli, family, *x, *t),
        Command::Verify {
            family,
            tol,
            grid,
            allow_errata,
        } => cmd_verify(cli, family, *tol, grid, *allow_errata),
        Command::Figure {
            preset,
            out,
            format,
        } => cmd_figure(cli, preset, out, format),
        Command::System {
            kind,
            m,
            aux,
            check,
        } => cmd_system(cli, kind, *m, aux, check),
    }
}

fn main() -> ExitCode {
    // die quietly when the consumer closes the pipe, e.g. `rodwave list | head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
