use serde::Serialize;
use tetradecomp::linalg::c;
use tetradecomp::tetrablock::{tetra_membership, Region, TetraPoint};

use crate::{resolve_tol, Failure};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// First coordinate as "re,im" (or just "re").
    #[arg(allow_hyphen_values = true)]
    x1: String,
    #[arg(allow_hyphen_values = true)]
    x2: String,
    #[arg(allow_hyphen_values = true)]
    x3: String,
    /// Base tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Serialize)]
struct Output {
    region: Region,
    #[serde(rename = "bE")]
    distinguished_boundary: bool,
    lhs2: f64,
    lhs3: f64,
}

fn parse_complex(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::input(format!("cannot parse {s:?} as re,im"));
    let mut parts = s.split(',');
    let re = parts.next().ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?;
    let im = match parts.next() {
        Some(p) => p.trim().parse::<f64>().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok((re, im))
}

pub fn run(args: Args) -> Result<u8, Failure> {
    let tol = resolve_tol(args.tol, None)?;
    let [x1, x2, x3] = [&args.x1, &args.x2, &args.x3].map(|s| parse_complex(s));
    let (x1, x2, x3) = (x1?, x2?, x3?);
    let p = TetraPoint::new(c(x1.0, x1.1), c(x2.0, x2.1), c(x3.0, x3.1));
    let m = tetra_membership(&p, tol);
    let out = Output { region: m.region, distinguished_boundary: m.distinguished_boundary, lhs2: m.lhs2, lhs3: m.lhs3 };
    println!("{}", serde_json::to_string(&out).expect("point output serializes"));
    Ok(0)
}
