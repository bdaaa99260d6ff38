//! Acceptance criteria 1 to 11. Runs without the libtest harness so that
//! every criterion prints one line; the process fails if any criterion does.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;

use nplectic::cohomology::{ce_cohomology_table, cohomology_table, d_map};
use nplectic::combinatorics::{bell, bell_identity_check};
use nplectic::report::Report;
use nplectic::scalar::Poly;
use nplectic::{suite, Cotensor, NPlecticStructure, Pair, Rational, Tensor, Word};

const SEED: u64 = 20_261_014;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn count_failed(checks: &[nplectic::pair::Check]) -> String {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        format!("{} checks", checks.len())
    } else {
        format!("failed: {}", failed.join(", "))
    }
}

fn models() -> [(&'static str, NPlecticStructure); 2] {
    [
        ("symplectic-plane", NPlecticStructure::symplectic_plane()),
        ("su2-cartan", NPlecticStructure::su2_cartan()),
    ]
}

fn families() -> [(&'static str, Pair); 2] {
    [("su2", Pair::su2()), ("poly3", Pair::poly(3).unwrap())]
}

fn cartan() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, pair) in families() {
        let r = suite::cartan_rules(&pair, SEED, 200);
        ok &= r.passed && r.rules.iter().all(|c| c.instances >= 200);
        parts.push(format!("{name}: {}", count_failed(&r.rules)));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    outcome(ok, format!("{} in {secs:.1}s", parts.join("; ")))
}

fn d_squared() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, pair) in [("su2", Pair::su2()), ("heisenberg", Pair::heisenberg()), ("poly3", Pair::poly(3).unwrap())] {
        let c = suite::d_squared(&pair, SEED, 200);
        ok &= c.passed && c.instances >= 200;
        parts.push(format!("{name}: {} instances", c.instances));
    }
    outcome(ok, parts.join("; "))
}

fn fundamental_pairing() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, st) in models() {
        let checks = suite::fundamental_pairing(&st, SEED, &[2, 3, 4], 50).unwrap();
        ok &= checks.iter().all(|c| c.passed && c.instances >= 50);
        parts.push(format!("{name}: {}", count_failed(&checks)));
    }
    outcome(ok, parts.join("; "))
}

fn linf_certification() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let arities = [2, 3, 4, 5];
    for (name, st) in models() {
        let t = suite::tensor_jacobi(&st.shared_pair(), SEED, &arities, 10).unwrap();
        let e = suite::extension_jacobi(&st, SEED, &arities, 10).unwrap();
        ok &= t.passed && e.passed;
        parts.push(format!("{name}: tensor {}, extension {}", t.passed, e.passed));
    }
    outcome(ok, format!("{} (engine and checker agree)", parts.join("; ")))
}

/// Bell numbers from the Bell triangle, independent of the recurrence.
fn bell_triangle(k: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(1)];
    let mut row = vec![BigInt::from(1)];
    for _ in 0..k {
        let mut next = vec![row.last().unwrap().clone()];
        for v in &row {
            let s = next.last().unwrap() + v;
            next.push(s);
        }
        out.push(next[0].clone());
        row = next;
    }
    out
}

fn bell_identity() -> Outcome {
    let oracle = bell_triangle(12);
    let values_agree = (0..=12).all(|k| bell(k).unwrap() == oracle[k]);
    let identity = (3..=10).all(|k| bell_identity_check(k).unwrap());
    // Direct evaluation with the triangle values.
    let direct = (3..=10usize).all(|k| {
        let f = |m: usize| (1..=m).fold(BigInt::from(1), |a, i| a * i);
        let lhs: BigInt = (2..k).map(|q| f(k - 2) / (f(q - 1) * f(k - 1 - q)) * &oracle[q - 1]).sum();
        lhs == &oracle[k - 1] - &oracle[0]
    });
    outcome(
        values_agree && identity && direct,
        format!("B_0..B_12 match the Bell triangle: {values_agree}; k = 3..10 identity: {identity}"),
    )
}

fn cohomology_bounds() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, st) in models() {
        let top = st.n() as i64 + 1;
        let mut nonzero = Vec::new();
        for window in 0..=2 {
            for r in cohomology_table(&st, window).unwrap() {
                if r.rank > 0 {
                    nonzero.push(r.degree);
                }
                ok &= r.degree >= 0 && r.degree <= top || r.rank == 0;
            }
        }
        nonzero.sort();
        nonzero.dedup();
        parts.push(format!("{name}: nonzero in degrees {nonzero:?}"));
    }
    outcome(ok, parts.join("; "))
}

fn rational_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let mut rank = 0;
    let cols = m.first().map_or(0, |r| r.len());
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let factor = &row[c] / &pivot_row[c];
                for (v, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *v -= &(p * &factor);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Sorting sign of a list of distinct indices and its sorted form.
fn sort_sign(v: &[usize]) -> (Vec<usize>, i64) {
    let mut s = v.to_vec();
    let mut sign = 1;
    for i in 0..s.len() {
        for j in 0..s.len() - 1 - i {
            if s[j] > s[j + 1] {
                s.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    (s, sign)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Dense matrix of the textbook Chevalley-Eilenberg differential
/// `(df)(x_0..x_k) = sum_{i<j} (-1)^{i+j} f([x_i, x_j], x_0..^i..^j..x_k)`
/// for su(2) with `[e_a, e_{a+1}] = e_{a+2}` cyclically.
fn su2_ce_matrix(k: usize) -> Vec<Vec<Rational>> {
    let bracket = |a: usize, b: usize| -> Option<(usize, i64)> {
        if a == b {
            None
        } else if (a + 1) % 3 == b {
            Some(((a + 2) % 3, 1))
        } else {
            Some(((b + 2) % 3, -1))
        }
    };
    let eval = |f: &[usize], args: &[usize]| -> i64 {
        let (sorted, sign) = sort_sign(args);
        if sorted.windows(2).any(|w| w[0] == w[1]) || sorted != f {
            0
        } else {
            sign
        }
    };
    let sources = subsets(3, k);
    let targets = subsets(3, k + 1);
    targets
        .iter()
        .map(|t| {
            sources
                .iter()
                .map(|f| {
                    let mut total = 0;
                    for i in 0..t.len() {
                        for j in i + 1..t.len() {
                            if let Some((c, s)) = bracket(t[i], t[j]) {
                                let mut args = vec![c];
                                args.extend(t.iter().enumerate().filter(|(m, _)| *m != i && *m != j).map(|(_, v)| *v));
                                let e = if (i + j) % 2 == 0 { 1 } else { -1 };
                                total += e * s * eval(f, &args);
                            }
                        }
                    }
                    Rational::from(total)
                })
                .collect()
        })
        .collect()
}

fn ce_oracle() -> Outcome {
    let dims = [1usize, 3, 3, 1];
    let mut oracle_ranks = Vec::new();
    let d_rank = |k: usize| if k >= 3 { 0 } else { rational_rank(su2_ce_matrix(k)) };
    for (k, dim) in dims.iter().enumerate() {
        let incoming = if k == 0 { 0 } else { d_rank(k - 1) };
        oracle_ranks.push(dim - d_rank(k) - incoming);
    }
    let pair = Pair::su2();
    let production: Vec<usize> = ce_cohomology_table(&pair, 0).unwrap().iter().map(|r| r.rank).collect();
    let matrices_agree = (0..=3).all(|k| {
        let m = d_map(&pair, k, 0).unwrap().matrix;
        let dense: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        rational_rank(dense) == m.rank()
    });
    let ok = oracle_ranks == [1, 0, 0, 1] && production == oracle_ranks && matrices_agree;
    outcome(
        ok,
        format!("dense oracle {oracle_ranks:?}, production {production:?}, slice ranks agree: {matrices_agree}"),
    )
}

fn poisson() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, st) in models() {
        let r = suite::poisson(&st, SEED, &[3, 4, 5], 5, 1).unwrap();
        ok &= r.passed && !r.degrees_sampled.is_empty() && r.unary.instances > 0;
        parts.push(format!("{name}: classes from {:?}, passed {}", r.degrees_sampled, r.passed));
    }
    outcome(ok, parts.join("; "))
}

fn inclusion_oracle(xs: &[Tensor]) -> Tensor {
    let k = xs.len();
    let mut w = Tensor::scalar(Poly::one());
    for x in xs.iter().rev() {
        w = w.wedge(x);
    }
    let fact: i64 = (1..k as i64).product();
    w.scale(&Rational::from(if k % 2 == 1 { fact } else { -fact }))
}

fn natural_inclusion() -> Outcome {
    let st = NPlecticStructure::symplectic_plane();
    let pair = st.shared_pair();
    let r = suite::natural_inclusion(&pair, SEED, 4, 6).unwrap();
    let x = Tensor::term(Word::single(0), Poly::var(1));
    let y = suite::rotation_field();
    let a = Tensor::scalar(Poly::var(0));
    let components_ok = [vec![x.clone()], vec![x.clone(), y.clone()], vec![a.clone(), x, y.clone()], vec![a, y]]
        .iter()
        .all(|xs| pair.natural_inclusion(xs).unwrap() == inclusion_oracle(xs));
    outcome(
        r.passed && components_ok,
        format!("{} tuples up to arity {}, {} failures; components match", r.tuples_checked, r.max_arity, r.failures),
    )
}

fn momentum() -> Outcome {
    let m = suite::rotation_momentum(4).unwrap();
    let st = NPlecticStructure::symplectic_plane();
    let x = suite::rotation_field();
    let f = st.hamiltonian_potential(&x).unwrap().unwrap();
    let solved = st.pair().ce_differential(&f).unwrap() == st.contract_omega(&x).unwrap();
    let expected = Cotensor::scalar(Poly::var(0) * Poly::var(0) + Poly::var(1) * Poly::var(1)).scale(&Rational::new(-1, 2));
    outcome(
        m.certified.certified && !m.corrupted.gate_passed && solved && f == expected,
        format!(
            "potential {}, certified {}, corrupted rejected at gate {}",
            m.potential, m.certified.certified, !m.corrupted.gate_passed
        ),
    )
}

#[derive(Serialize)]
struct Bundle {
    cartan: suite::CartanReport,
    identities: suite::IdentitiesReport,
    cohomology: suite::CohomologyReport,
    poisson: suite::PoissonReport,
    momentum: suite::MomentumExample,
}

fn bundle() -> String {
    let plane = NPlecticStructure::symplectic_plane();
    let su2 = NPlecticStructure::su2_cartan();
    let b = Bundle {
        cartan: suite::cartan_rules(&Pair::su2(), SEED, 50),
        identities: suite::identities(plane.pair(), Some(&plane), SEED, 20).unwrap(),
        cohomology: suite::cohomology(&su2, 0).unwrap(),
        poisson: suite::poisson(&su2, SEED, &[3], 3, 0).unwrap(),
        momentum: suite::rotation_momentum(3).unwrap(),
    };
    Report {
        command: "acceptance".into(),
        seed: SEED,
        arity_cap: plane.arity_cap(),
        window: 0,
        passed: true,
        results: b,
    }
    .to_json()
}

fn determinism() -> Outcome {
    let first = bundle();
    let second = std::thread::spawn(bundle).join().unwrap();
    outcome(first == second, format!("{} bytes, identical across runs", first.len()))
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 11] = [
        ("cartan_rules", cartan),
        ("d_squared", d_squared),
        ("fundamental_pairing", fundamental_pairing),
        ("linf_certification", linf_certification),
        ("bell_identity", bell_identity),
        ("cohomology_bounds", cohomology_bounds),
        ("ce_oracle", ce_oracle),
        ("poisson_linf", poisson),
        ("natural_inclusion", natural_inclusion),
        ("momentum_map", momentum),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {name:<20} {status}  {} ({:.1}s)", i + 1, o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
