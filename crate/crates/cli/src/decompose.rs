use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;
use tetradecomp::decomp::{classify_atom, classify_cnu_atom, AtomMode, AtomTable};
use tetradecomp::instance::{InstanceFile, TruthLeaf, TruthMode};
use tetradecomp::modelgen::{structured_atom_decompose, structured_cnu_atom_decompose, StructuredAtomTable};
use tetradecomp::{atom_decompose_with_order, cnu_atom_decompose, compress, ContractionTuple, Error, Tolerance};

use crate::report::{LeafReport, ReportFile};
use crate::{read_file, resolve_tol, DecomposeMode, Failure, EXIT_MATH};

/// Largest projection deviation from the truth table still accepted.
const TRUTH_TOL: f64 = 1e-8;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Instance files.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "unitary")]
    mode: DecomposeMode,
    /// Base tolerance (overrides the instance and TETRADECOMP_TOL).
    #[arg(long)]
    tol: Option<f64>,
    /// Splitting order as 1-based member indices, e.g. "2,1,3".
    #[arg(long, value_delimiter = ',')]
    center_order: Option<Vec<usize>>,
    /// Include every leaf projection in the report.
    #[arg(long)]
    full_projections: bool,
    /// Report file for a single input (stdout when omitted).
    #[arg(long, conflicts_with = "out_dir")]
    out: Option<PathBuf>,
    /// Directory receiving one `<stem>.report.json` per input.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Number of inputs processed concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Serialize)]
struct Echo {
    name: &'static str,
    input: String,
    mode: DecomposeMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    center_order: Option<Vec<usize>>,
}

#[derive(Debug, Default, Serialize)]
struct Body {
    dim: usize,
    arity: usize,
    structured: bool,
    leaves: BTreeMap<String, LeafReport>,
    residuals: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    offending_pair: Option<[usize; 2]>,
    truth_max_deviation: Option<f64>,
}

type Report = ReportFile<Echo, Body>;

pub fn run(args: Args) -> Result<u8, Failure> {
    if args.out.is_some() && args.paths.len() > 1 {
        return Err(Failure::input("--out takes a single input; use --out-dir for several"));
    }
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    }
    let results: Vec<Mutex<Option<Result<Report, Failure>>>> = args.paths.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.clamp(1, args.paths.len()) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= args.paths.len() {
                    break;
                }
                let r = decompose_file(&args, &args.paths[k]);
                *results[k].lock().expect("result slot") = Some(r);
            });
        }
    });

    let mut worst = 0u8;
    for (path, slot) in args.paths.iter().zip(results) {
        let result = slot.into_inner().expect("result slot").expect("every input processed");
        let code = match result {
            Ok(report) => {
                let code = if report.passed() { 0 } else { EXIT_MATH };
                if let Some(e) = &report.error {
                    eprintln!("error: {}: {e}", path.display());
                }
                let target = match (&args.out_dir, &args.out) {
                    (Some(dir), _) => Some(report_path(dir, path)),
                    (None, Some(out)) => Some(out.clone()),
                    (None, None) => None,
                };
                crate::write_output(target.as_ref(), &report.to_json())?;
                code
            }
            Err(f) => {
                eprintln!("error: {}: {}", path.display(), f.message);
                f.code
            }
        };
        worst = worst.max(code);
    }
    Ok(worst)
}

fn report_path(dir: &Path, input: &Path) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into());
    dir.join(format!("{stem}.report.json"))
}

fn decompose_file(args: &Args, path: &Path) -> Result<Report, Failure> {
    let start = Instant::now();
    let inst = InstanceFile::parse(&read_file(&path.to_path_buf())?)?;
    let tol = resolve_tol(args.tol, inst.tol)?;
    let echo = Echo {
        name: "decompose",
        input: path.display().to_string(),
        mode: args.mode,
        center_order: args.center_order.clone(),
    };
    let mut report = Report::new(echo, tol.base, Body::default());
    if inst.structured.is_some() {
        structured(&inst, args, tol, &mut report)?;
    } else {
        dense(&inst, args, tol, &mut report)?;
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// 0-based permutation from the 1-based flag.
fn center_order(flag: &Option<Vec<usize>>, n: usize) -> Result<Vec<usize>, Failure> {
    let Some(order) = flag else {
        return Ok((0..n).collect());
    };
    let mut seen = vec![false; n];
    let bad = || Failure::input(format!("--center-order {order:?} is not a permutation of 1..={n}"));
    if order.len() != n {
        return Err(bad());
    }
    order
        .iter()
        .map(|&c| {
            if c == 0 || c > n || seen[c - 1] {
                return Err(bad());
            }
            seen[c - 1] = true;
            Ok(c - 1)
        })
        .collect()
}

fn dense(inst: &InstanceFile, args: &Args, tol: Tolerance, report: &mut Report) -> Result<(), Failure> {
    let tuple = inst.tuple(tol)?;
    let n = tuple.arity();
    let order = center_order(&args.center_order, n)?;
    let body = &mut report.body;
    body.dim = tuple.dim();
    body.arity = n;
    let commutator = tuple.worst_commutator().map_or(0.0, |p| p.residual);
    let double = tuple.worst_double_commutator().map_or(0.0, |p| p.residual);
    body.residuals.insert("commutator", commutator);
    body.residuals.insert("double_commutator", double);
    report.verdicts.insert("doubly_commuting", tuple.is_doubly_commuting());

    let table = match args.mode {
        DecomposeMode::Unitary => atom_decompose_with_order(&tuple, &order),
        DecomposeMode::Cnu if args.center_order.is_some() => {
            return Err(Failure::input("--center-order applies to --mode unitary"))
        }
        DecomposeMode::Cnu => cnu_atom_decompose(&tuple),
    };
    let table = match table {
        Ok(t) => t,
        Err(e) => return record_failure(report, e),
    };
    let audit = table.audit(&tuple)?;
    let eff = tuple.effective_tol().max(TRUTH_TOL);
    let body = &mut report.body;
    for (sig, leaf) in &table.leaves {
        let mut classes = Vec::new();
        if !leaf.is_zero() {
            for t in tuple.ops() {
                let r = compress(t, leaf)?;
                let tag = match table.mode {
                    AtomMode::UnitaryCnu => classify_atom(&r, tol)?,
                    AtomMode::IsometryCni => classify_cnu_atom(&r, tol)?,
                };
                classes.push(tag.to_string());
            }
        }
        body.leaves.insert(sig.to_string(), LeafReport::dense(leaf.dim(), leaf.projection(), classes, args.full_projections));
    }
    body.residuals.insert("completeness", audit.completeness_residual);
    body.residuals.insert("orthogonality", audit.orthogonality_residual);
    body.residuals.insert("max_reducing", audit.max_reducing_residual);
    report.verdicts.insert("complete", audit.completeness_residual <= eff);
    report.verdicts.insert("orthogonal", audit.orthogonality_residual <= eff);
    report.verdicts.insert("reducing", audit.max_reducing_residual <= eff);
    report.verdicts.insert("tags_match", audit.mismatched_tags.is_empty());

    if let Some(truth) = inst.truth_atoms(tol)?.filter(|t| t.mode == table.mode) {
        let deviation = truth_deviation(&table, &truth, &tuple);
        report.body.truth_max_deviation = Some(deviation);
        report.verdicts.insert("truth_match", deviation <= TRUTH_TOL);
    }
    Ok(())
}

fn truth_deviation(table: &AtomTable, truth: &AtomTable, tuple: &ContractionTuple) -> f64 {
    let zero = tetradecomp::Subspace::zero(tuple.dim());
    let mut worst: f64 = 0.0;
    for (sig, got) in &table.leaves {
        let want = truth.leaf(sig).unwrap_or(&zero);
        if got.dim() != want.dim() {
            return f64::INFINITY;
        }
        worst = worst.max(got.distance(want));
    }
    for (sig, want) in &truth.leaves {
        if !table.leaves.contains_key(sig) && !want.is_zero() {
            return f64::INFINITY;
        }
    }
    worst
}

/// Converts an assertion failure into a failing report; input errors
/// still abort.
fn record_failure(report: &mut Report, e: Error) -> Result<(), Failure> {
    if crate::exit_code(&e) != EXIT_MATH {
        return Err(e.into());
    }
    report.error = Some(match e {
        Error::NotCommuting { i, j, residual } | Error::NotDoublyCommuting { i, j, residual } => {
            report.body.offending_pair = Some([i + 1, j + 1]);
            report.body.residuals.insert("offending_pair", residual);
            let what = if matches!(e, Error::NotCommuting { .. }) { "commute" } else { "doubly commute" };
            format!("members {} and {} do not {what}: residual {residual:.3e}", i + 1, j + 1)
        }
        e => e.to_string(),
    });
    Ok(())
}

fn structured(inst: &InstanceFile, args: &Args, tol: Tolerance, report: &mut Report) -> Result<(), Failure> {
    let members = inst.structured_members(tol)?.expect("structured instance");
    if args.center_order.is_some() {
        // the blockwise split does not depend on an order
        center_order(&args.center_order, members.len())?;
    }
    report.body.dim = inst.dim;
    report.body.arity = members.len();
    report.body.structured = true;
    let table = match args.mode {
        DecomposeMode::Unitary => structured_atom_decompose(&members),
        DecomposeMode::Cnu => structured_cnu_atom_decompose(&members, tol),
    };
    let table = match table {
        Ok(t) => t,
        Err(e) => return record_failure(report, e),
    };
    let mut total = 0;
    for (sig, leaf) in &table.leaves {
        total += leaf.finite_dim;
        let leaf_report = LeafReport {
            dim: leaf.finite_dim,
            checksum: None,
            classifications: if leaf.is_zero() { vec![] } else { sig.0.iter().map(|t| t.to_string()).collect() },
            blocks: Some(leaf.blocks.clone()),
            wandering_dim: Some(leaf.wandering_dim),
            projection: None,
        };
        report.body.leaves.insert(sig.to_string(), leaf_report);
    }
    report.verdicts.insert("complete", total == inst.dim);
    if let Some(truth) = &inst.truth {
        if truth.mode == TruthMode::Structured && args.mode == DecomposeMode::Unitary {
            let matches = structured_matches(&table, &truth.leaves);
            report.body.truth_max_deviation = Some(if matches { 0.0 } else { 1.0 });
            report.verdicts.insert("truth_match", matches);
        }
    }
    Ok(())
}

fn structured_matches(table: &StructuredAtomTable, truth: &BTreeMap<String, TruthLeaf>) -> bool {
    let got: BTreeMap<String, (usize, Vec<usize>, usize)> = table
        .nonzero_leaves()
        .map(|(sig, l)| (sig.to_string(), (l.finite_dim, l.blocks.clone(), l.wandering_dim)))
        .collect();
    let want: BTreeMap<String, (usize, Vec<usize>, usize)> = truth
        .iter()
        .filter(|(_, l)| l.blocks.as_ref().is_some_and(|b| !b.is_empty()))
        .map(|(sig, l)| (sig.clone(), (l.dim, l.blocks.clone().unwrap_or_default(), l.wandering_dim.unwrap_or(0))))
        .collect();
    got == want
}
