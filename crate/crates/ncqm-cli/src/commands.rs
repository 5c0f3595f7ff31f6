//! Subcommand implementations. Exit-code contract: 0 when everything
//! requested passed, 1 when a check failed, 2 on input errors.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use ncqm_core::axioms::{
    check_lemma_tdot, check_moyal_consistency, check_positivity_nontriviality, check_reality,
    check_strong_uncertainty, check_weak_strong_equivalence, check_weak_uncertainty, CheckOpts,
    CheckReport,
};
use ncqm_core::derivations::{check_diophantine, decompose_derivation};
use ncqm_core::distance::{connes_distance, DistanceOpts};
use ncqm_core::dynamics::{
    assemble_hamiltonian, dirac_operator, heisenberg_fd_residual, HamiltonianSpec, Propagator, WordPoly,
};
use ncqm_core::linalg::CMatrix;
use ncqm_core::models::ModelBundle;

use crate::formats::{
    csv_field, read_json, write_json, CoeffFile, DecompositionFile, DistanceFile, DistanceOutFile,
    HamiltonianFile, ModelFile, ReportFile, RunManifest,
};

/// Outcome of a command: the process exit code.
pub struct Outcome {
    pub exit_code: i32,
}

const ALL_CHECKS: &[&str] =
    &["weak", "strong", "equivalence", "positivity", "reality", "consistency", "lemma"];

fn applicable_checks(bundle: &ModelBundle) -> Vec<&'static str> {
    let family = bundle.spec.family_name();
    ALL_CHECKS
        .iter()
        .copied()
        .filter(|check| match *check {
            "weak" | "positivity" => true,
            "strong" => bundle.opp_mons.is_some(),
            "equivalence" => family == "finite_sum",
            "reality" => bundle.rep.j().is_some(),
            "consistency" => family == "moyal",
            "lemma" => family == "almost_commutative",
            _ => false,
        })
        .collect()
}

fn run_one_check(
    name: &str,
    bundle: &ModelBundle,
    hspec: &HamiltonianSpec,
    h: &CMatrix,
    opts: &CheckOpts,
) -> Result<CheckReport> {
    Ok(match name {
        "weak" => check_weak_uncertainty(bundle, h, opts)?,
        "strong" => check_strong_uncertainty(bundle, h, opts)?,
        "equivalence" => check_weak_strong_equivalence(bundle, 20, opts)?,
        "positivity" => check_positivity_nontriviality(bundle, h, opts)?,
        "reality" => check_reality(bundle, h, opts)?,
        "consistency" => check_moyal_consistency(bundle, h, opts)?,
        "lemma" => check_lemma_tdot(bundle, hspec, h, opts)?,
        other => bail!("unknown check '{other}' (available: {ALL_CHECKS:?})"),
    })
}

pub struct CheckArgs {
    pub spec: PathBuf,
    pub ham: PathBuf,
    pub checks: String,
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: PathBuf,
    pub window_margin: Option<usize>,
    pub jobs: usize,
}

pub fn cmd_check(args: &CheckArgs) -> Result<Outcome> {
    let mut model_file: ModelFile = read_json(&args.spec)?;
    if let Some(margin) = args.window_margin {
        model_file.window_margin = margin;
    }
    let ham_file: HamiltonianFile = read_json(&args.ham)?;
    let spec = model_file.to_spec()?;
    let hspec = ham_file.to_spec()?;
    let bundle = ModelBundle::build(&spec).map_err(|e| anyhow!("building model: {e}"))?;
    let h = assemble_hamiltonian(&bundle, &hspec).map_err(|e| anyhow!("assembling hamiltonian: {e}"))?;

    let requested: Vec<String> = if args.checks == "all" {
        applicable_checks(&bundle).iter().map(|s| s.to_string()).collect()
    } else {
        args.checks.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
    };
    if requested.is_empty() {
        bail!("no checks requested");
    }
    let opts = CheckOpts {
        seed: args.seed,
        tolerance: args.tol.unwrap_or(CheckOpts::default().tolerance),
        ..CheckOpts::default()
    };

    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let manifest = RunManifest {
        model: model_file.clone(),
        hamiltonian: ham_file.clone(),
        checks: requested.clone(),
        seed: args.seed,
        tolerance: opts.tolerance,
    };
    write_json(&args.out.join("manifest.json"), &manifest)?;

    // dispatch up to `jobs` checks concurrently; report writing stays
    // serialized through the collected results
    let jobs = args.jobs.max(1);
    let results: Mutex<Vec<(usize, Result<CheckReport>)>> = Mutex::new(Vec::new());
    let next: Mutex<usize> = Mutex::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(requested.len()) {
            scope.spawn(|| loop {
                let idx = {
                    let mut guard = next.lock().expect("scheduler lock");
                    if *guard >= requested.len() {
                        break;
                    }
                    let i = *guard;
                    *guard += 1;
                    i
                };
                let report = run_one_check(&requested[idx], &bundle, &hspec, &h, &opts);
                results.lock().expect("result lock").push((idx, report));
            });
        }
    });
    let mut collected = results.into_inner().expect("collect");
    collected.sort_by_key(|(i, _)| *i);

    let mut summary = String::from("check,residual_max,verdict\n");
    let mut any_fail = false;
    for (idx, result) in collected {
        let name = &requested[idx];
        let report = result.map_err(|e| anyhow!("check '{name}': {e}"))?;
        let file = ReportFile::from_report(&report);
        write_json(&args.out.join(format!("{name}.json")), &file)?;
        summary.push_str(&format!(
            "{},{:e},{}\n",
            csv_field(name),
            report.max_residual(),
            if report.passed() { "pass" } else { "fail" }
        ));
        if !report.passed() {
            any_fail = true;
        }
        println!("{name}: {} (max residual {:.3e})", if report.passed() { "pass" } else { "FAIL" }, report.max_residual());
    }
    std::fs::write(args.out.join("summary.csv"), summary)?;
    Ok(Outcome { exit_code: if any_fail { 1 } else { 0 } })
}

pub struct DecomposeArgs {
    pub coeffs: PathBuf,
    pub out: PathBuf,
    pub diophantine_max_n: usize,
}

pub fn cmd_decompose(args: &DecomposeArgs) -> Result<Outcome> {
    let coeff_file: CoeffFile = read_json(&args.coeffs)?;
    let coeffs = coeff_file.to_coeffs()?;
    let dio = check_diophantine(coeffs.lambda, args.diophantine_max_n, 8);
    if !dio.passed() {
        bail!("deformation angle unsuitable for decomposition: {}", dio.notes.join("; "));
    }
    let decomposition = decompose_derivation(&coeffs).map_err(|e| anyhow!("{e}"))?;
    write_json(&args.out, &DecompositionFile::from_decomposition(&decomposition))?;
    println!(
        "decomposed radius-{} coefficients; branch agreement {:.3e}",
        coeffs.radius, decomposition.branch_agreement
    );
    Ok(Outcome { exit_code: 0 })
}

pub struct EvolveArgs {
    pub spec: PathBuf,
    pub ham: PathBuf,
    pub observable: String,
    pub times: Vec<f64>,
    pub out: PathBuf,
    pub entries: Vec<(usize, usize)>,
}

pub fn cmd_evolve(args: &EvolveArgs) -> Result<Outcome> {
    let model_file: ModelFile = read_json(&args.spec)?;
    let ham_file: HamiltonianFile = read_json(&args.ham)?;
    let bundle = ModelBundle::build(&model_file.to_spec()?).map_err(|e| anyhow!("{e}"))?;
    let h = assemble_hamiltonian(&bundle, &ham_file.to_spec()?).map_err(|e| anyhow!("{e}"))?;
    let a = WordPoly::term(&[args.observable.as_str()], ncqm_core::linalg::C64::new(1.0, 0.0))
        .evaluate(&bundle)
        .map_err(|e| anyhow!("resolving observable: {e}"))?;
    for &(r, c) in &args.entries {
        if r >= bundle.dim() || c >= bundle.dim() {
            bail!("matrix entry ({r},{c}) out of range for dimension {}", bundle.dim());
        }
    }
    let prop = Propagator::new(&h).map_err(|e| anyhow!("{e}"))?;
    let mut csv = String::from("t,hs_norm,heisenberg_fd_residual");
    for (r, c) in &args.entries {
        csv.push_str(&format!(",re({r}.{c}),im({r}.{c})"));
    }
    csv.push('\n');
    for &t in &args.times {
        let at = prop.evolve(&a, t);
        let fd = heisenberg_fd_residual(&prop, &h, &a, t, 1e-4);
        csv.push_str(&format!("{t},{:.12e},{:.6e}", at.hs_norm(), fd));
        for &(r, c) in &args.entries {
            csv.push_str(&format!(",{:.12e},{:.12e}", at[(r, c)].re, at[(r, c)].im));
        }
        csv.push('\n');
    }
    std::fs::write(&args.out, csv).with_context(|| format!("writing {}", args.out.display()))?;
    println!("evolved '{}' over {} times", args.observable, args.times.len());
    Ok(Outcome { exit_code: 0 })
}

pub struct DistanceArgs {
    pub spec: PathBuf,
    pub problem: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
}

pub fn cmd_distance(args: &DistanceArgs) -> Result<Outcome> {
    let model_file: ModelFile = read_json(&args.spec)?;
    let problem: DistanceFile = read_json(&args.problem)?;
    let bundle = ModelBundle::build(&model_file.to_spec()?).map_err(|e| anyhow!("{e}"))?;
    let d = match (&problem.matrix, &problem.dirac) {
        (Some(rows), None) => crate::formats::dense_matrix(rows)?,
        (None, Some(dirac)) => {
            let dspec = dirac.to_spec()?;
            dirac_operator(&bundle, &dspec).map_err(|e| anyhow!("{e}"))?.0
        }
        _ => bail!("distance problem needs exactly one of 'matrix' or 'dirac'"),
    };
    let chi = problem.chi.to_state()?;
    let phi = problem.phi.to_state()?;
    let opts = DistanceOpts {
        tol: problem.tol.unwrap_or(DistanceOpts::default().tol),
        max_iters: problem.max_iters.unwrap_or(DistanceOpts::default().max_iters),
        seed: args.seed,
    };
    let result = connes_distance(&bundle, &d, &chi, &phi, &opts).map_err(|e| anyhow!("{e}"))?;
    let mut notes = Vec::new();
    if result.degenerate {
        notes.push("constraint is degenerate on the algebra: distance is infinite".to_string());
    }
    if !result.converged {
        notes.push("bound gap above tolerance at the iteration limit".to_string());
    }
    write_json(
        &args.out,
        &DistanceOutFile {
            distance: result.distance,
            lower: result.distance,
            upper: result.upper,
            iters: result.iterations,
            converged: result.converged,
            degenerate: result.degenerate,
            notes,
        },
    )?;
    println!("distance = {} (upper {})", result.distance, result.upper);
    Ok(Outcome { exit_code: 0 })
}

/// Parse "0.0,0.5,1.0" style time grids.
pub fn parse_times(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad time value {x:?}")))
        .collect()
}

/// Parse "0,0;1,2" style entry lists.
pub fn parse_entries(s: &str) -> Result<Vec<(usize, usize)>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|pair| {
            let (r, c) = pair
                .split_once(',')
                .ok_or_else(|| anyhow!("bad entry spec {pair:?} (expected row,col)"))?;
            Ok((r.trim().parse()?, c.trim().parse()?))
        })
        .collect()
}

pub fn ensure_exists(path: &Path) -> Result<()> {
    if !path.exists() {
        bail!("file not found: {}", path.display());
    }
    Ok(())
}
