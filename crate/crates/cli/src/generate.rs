use std::path::PathBuf;

use clap::ValueEnum;
use tetradecomp::decomp::AtomType;
use tetradecomp::instance::{GeneratorInfo, InstanceFile};
use tetradecomp::modelgen::{
    direct_sum_family, scramble, structured_atom_decompose, structured_family, BlockSpec, FactorSpec,
    DEFAULT_DIM_CAP,
};
use tetradecomp::Tolerance;

use crate::{write_output, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// one tensor product, e.g. "A1:2,A2:3"
    Tensor,
    /// direct sum of tensor products, e.g. "A1:2,A1:2;A2:2,A1:2"
    Sum,
    /// structured blocks with shifts, e.g. "A1:2,B1:1;A2:2,B2:2"
    Shift,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_enum)]
    family: Family,
    /// Factor list: items "LABEL:size" separated by commas, summands or
    /// blocks separated by semicolons.
    #[arg(long)]
    spec: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the Haar conjugation of dense families.
    #[arg(long)]
    no_scramble: bool,
    /// Largest total dimension accepted.
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
}

fn parse_item(item: &str) -> Result<(AtomType, usize), Failure> {
    let bad = |why: &str| Failure::input(format!("spec item {item:?}: {why}"));
    let (label, size) = item.trim().split_once(':').ok_or_else(|| bad("expected LABEL:size"))?;
    let label: AtomType = label.trim().parse().map_err(|_| bad("unknown label"))?;
    let size: usize = size.trim().parse().map_err(|_| bad("size is not a non-negative integer"))?;
    if size == 0 {
        return Err(bad("size must be at least 1"));
    }
    Ok((label, size))
}

/// Semicolon-separated groups of comma-separated items.
pub fn parse_spec(spec: &str) -> Result<Vec<Vec<(AtomType, usize)>>, Failure> {
    if spec.trim().is_empty() {
        return Err(Failure::input("empty spec"));
    }
    spec.split(';').map(|group| group.split(',').map(parse_item).collect()).collect()
}

fn dense_factor((label, size): (AtomType, usize)) -> Result<FactorSpec, Failure> {
    match label {
        AtomType::A1 => Ok(FactorSpec::Unitary(size)),
        AtomType::A2 => Ok(FactorSpec::Strict(size)),
        other => Err(Failure::input(format!("label {other} needs --family shift"))),
    }
}

pub fn build(args: &Args) -> Result<InstanceFile, Failure> {
    let groups = parse_spec(&args.spec)?;
    let scrambled = args.family != Family::Shift && !args.no_scramble;
    let info = GeneratorInfo {
        family: format!("{:?}", args.family).to_lowercase(),
        spec: args.spec.clone(),
        seed: args.seed,
        scrambled,
    };
    match args.family {
        Family::Tensor | Family::Sum => {
            if args.family == Family::Tensor && groups.len() != 1 {
                return Err(Failure::input("a tensor spec has a single summand; use --family sum"));
            }
            let summands = groups
                .into_iter()
                .map(|g| g.into_iter().map(dense_factor).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let family = direct_sum_family(&summands, args.seed, args.dim_cap)?;
            let family = scramble(&family, scrambled.then_some(args.seed))?;
            Ok(InstanceFile::from_planted(&family, info))
        }
        Family::Shift => {
            let blocks: Vec<Vec<BlockSpec>> = groups
                .into_iter()
                .map(|g| g.into_iter().map(|(label, size)| BlockSpec { label, size }).collect())
                .collect();
            let finite: usize = blocks
                .iter()
                .filter(|b| b.iter().all(|s| s.label != AtomType::B1))
                .map(|b| b[0].size)
                .sum();
            if finite > args.dim_cap {
                return Err(tetradecomp::Error::Size { dim: finite, cap: args.dim_cap }.into());
            }
            let members = structured_family(&blocks, args.seed, Tolerance::default())?;
            let truth = structured_atom_decompose(&members)?;
            Ok(InstanceFile::from_structured(&members, &truth, info)?)
        }
    }
}

pub fn run(args: Args) -> Result<u8, Failure> {
    let instance = build(&args)?;
    write_output(args.out.as_ref(), &instance.to_json())?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_grammar() {
        let g = parse_spec("A1:2,A2:3;B1:1,B2:2").unwrap();
        assert_eq!(g, vec![vec![(AtomType::A1, 2), (AtomType::A2, 3)], vec![(AtomType::B1, 1), (AtomType::B2, 2)]]);
        for bad in ["", "A1", "A1:0", "A3:2", "A1:-1", "A1:2,"] {
            assert_eq!(parse_spec(bad).unwrap_err().code, crate::EXIT_INPUT, "{bad}");
        }
    }
}
