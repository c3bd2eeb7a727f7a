use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tetradecomp::linalg::zeros;
use tetradecomp::modelgen::{direct_sum_family, random_contraction, scramble, FactorSpec};
use tetradecomp::tetrablock::{dilation_construct, dilation_verify, ETriple};
use tetradecomp::{atom_decompose, unitary_part, Tolerance};

fn bench_unitary_part(c: &mut Criterion) {
    let mut group = c.benchmark_group("unitary_part");
    for d in [8, 32, 64] {
        let fam = direct_sum_family(&[vec![FactorSpec::Unitary(d / 2)], vec![FactorSpec::Strict(d / 2)]], 1, 512).unwrap();
        let t = scramble(&fam, Some(2)).unwrap().tuple.ops()[0].clone();
        group.bench_with_input(BenchmarkId::from_parameter(d), &t, |b, t| {
            b.iter(|| unitary_part(t, Tolerance::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_atom_decompose(c: &mut Criterion) {
    let mut group = c.benchmark_group("atom_decompose");
    group.sample_size(20);
    let cases = [
        (
            "n2_d16",
            vec![
                vec![FactorSpec::Unitary(2), FactorSpec::Strict(2)],
                vec![FactorSpec::Strict(2), FactorSpec::Shift(2)],
                vec![FactorSpec::Unitary(2), FactorSpec::Unitary(2)],
                vec![FactorSpec::Shift(2), FactorSpec::Strict(2)],
            ],
        ),
        ("n3_d54", vec![vec![FactorSpec::Unitary(3), FactorSpec::Strict(3), FactorSpec::Shift(3)]; 2]),
    ];
    for (name, specs) in cases {
        let fam = scramble(&direct_sum_family(&specs, 3, 512).unwrap(), Some(4)).unwrap();
        group.bench_function(name, |b| b.iter(|| atom_decompose(&fam.tuple).unwrap()));
    }
    group.finish();
}

fn bench_dilation(c: &mut Criterion) {
    let mut group = c.benchmark_group("dilation");
    let p = random_contraction(6, 5, 0.8).unwrap();
    let zero = zeros(6, 6);
    let triple = ETriple::new(zero.clone(), zero, p, Tolerance::default()).unwrap();
    for depth in [2, 4, 8] {
        group.bench_with_input(BenchmarkId::new("construct_verify", depth), &depth, |b, &depth| {
            b.iter(|| {
                let model = dilation_construct(&triple, depth).unwrap();
                dilation_verify(&model, &triple, depth.min(4)).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_unitary_part, bench_atom_decompose, bench_dilation);
criterion_main!(benches);
