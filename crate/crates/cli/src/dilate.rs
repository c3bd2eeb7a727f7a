use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use tetradecomp::instance::{matrix_to_json, InstanceFile, InstanceMode, JsonMatrix};
use tetradecomp::tetrablock::{
    classify_e_triple, dilation_from_pair, dilation_verify, fundamental_operators, sufficient_dilation_hypotheses,
    DilationModel, DilationReport, EKind, HypothesisReport,
};

use crate::report::{checksum, ReportFile};
use crate::{read_file, resolve_tol, write_output, Failure, EXIT_HYPOTHESIS, EXIT_MATH};

/// Unimodular `z` sampled by the numerical-radius hypothesis.
const HYPOTHESIS_SAMPLES: usize = 64;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Triple-mode instance file.
    path: PathBuf,
    /// Number of defect levels in the truncated model.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Largest total degree of the checked monomials (at most --depth).
    #[arg(long)]
    verify_degree: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Include V1, V2, V3 in the report.
    #[arg(long)]
    emit_model: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Echo {
    name: &'static str,
    input: String,
    depth: usize,
    verify_degree: usize,
}

#[derive(Debug, Serialize)]
struct Model {
    depth: usize,
    base_dim: usize,
    defect_dim: usize,
    block_dim: usize,
    checksums: BTreeMap<&'static str, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrices: Option<BTreeMap<&'static str, JsonMatrix>>,
}

impl Model {
    fn new(m: &DilationModel, full: bool) -> Self {
        let named = [("v1", &m.v1), ("v2", &m.v2), ("v3", &m.v3)];
        Model {
            depth: m.depth,
            base_dim: m.base_dim,
            defect_dim: m.defect_dim,
            block_dim: m.block_dim(),
            checksums: named.iter().map(|(k, v)| (*k, checksum(v))).collect(),
            matrices: full.then(|| named.iter().map(|(k, v)| (*k, matrix_to_json(v))).collect()),
        }
    }
}

#[derive(Debug, Default, Serialize)]
struct Body {
    dim: usize,
    classification: Option<EKind>,
    residuals: BTreeMap<&'static str, f64>,
    hypotheses: Option<HypothesisReport>,
    model: Option<Model>,
    verification: Option<DilationReport>,
}

pub fn run(args: Args) -> Result<u8, Failure> {
    let start = Instant::now();
    let degree = args.verify_degree.unwrap_or(args.depth);
    if args.depth == 0 {
        return Err(Failure::input("--depth must be at least 1"));
    }
    if degree > args.depth {
        return Err(Failure::input(format!("--verify-degree {degree} exceeds --depth {}", args.depth)));
    }
    let inst = InstanceFile::parse(&read_file(&args.path)?)?;
    if inst.mode != InstanceMode::Triple {
        return Err(Failure::input("dilate needs a triple-mode instance [A, B, P]"));
    }
    let tol = resolve_tol(args.tol, inst.tol)?;
    let triple = inst.triple(tol)?;
    let echo = Echo { name: "dilate", input: args.path.display().to_string(), depth: args.depth, verify_degree: degree };
    let mut report = ReportFile::new(echo, tol.base, Body { dim: triple.dim(), ..Body::default() });
    report.body.classification = Some(classify_e_triple(&triple).kind);

    let pair = fundamental_operators(&triple)?;
    report.body.residuals.insert("f1_reconstruction", pair.residual1);
    report.body.residuals.insert("f2_reconstruction", pair.residual2);
    let hyp = sufficient_dilation_hypotheses(&pair, HYPOTHESIS_SAMPLES);
    report.body.hypotheses = Some(hyp);
    report.verdicts.insert("hypotheses", hyp.pass);
    let model = dilation_from_pair(&triple, &pair, args.depth)?;
    report.body.model = Some(Model::new(&model, args.emit_model));

    let code = if hyp.pass {
        let verification = dilation_verify(&model, &triple, degree)?;
        report.verdicts.insert("verified", verification.passed());
        let passed = verification.passed();
        report.body.verification = Some(verification);
        if passed { 0 } else { EXIT_MATH }
    } else {
        EXIT_HYPOTHESIS
    };
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    write_output(args.out.as_ref(), &report.to_json())?;
    Ok(code)
}
