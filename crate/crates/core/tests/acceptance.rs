//! Acceptance criteria, one line of output per criterion.
//!
//! Run with `cargo test -p seedcheck-core --test acceptance -- --nocapture`
//! to see the PASS/FAIL lines.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use seedcheck_core::verifier::checks::*;
use seedcheck_core::verifier::{
    explore, run_checks, run_full_suite, Canary, CheckRecord, Closure, ExplorationAtlas, ExploreOptions,
    SuiteOptions,
};
use seedcheck_core::{find_skew_symmetrizer, is_acyclic, is_sign_skew_symmetric, IntMatrix, SkewSymmetrizer};

fn matrix(rows: &[&[i64]]) -> IntMatrix {
    let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
    IntMatrix::from_rows(&rows).unwrap()
}

struct Instance {
    name: &'static str,
    b: IntMatrix,
    s: Vec<i64>,
    atlas: ExplorationAtlas,
}

fn finite_instances() -> Vec<Instance> {
    let spec: [(&str, IntMatrix, Vec<i64>); 4] = [
        ("A2", matrix(&[&[0, 1], &[-1, 0]]), vec![1, 1]),
        ("A3", matrix(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]]), vec![1, 1, 1]),
        ("B2", matrix(&[&[0, 1], &[-2, 0]]), vec![2, 1]),
        ("G2", matrix(&[&[0, 1], &[-3, 0]]), vec![3, 1]),
    ];
    spec.into_iter()
        .map(|(name, b, s)| {
            let atlas = explore(&b, &ExploreOptions::with_depth(32)).unwrap();
            Instance { name, b, s, atlas }
        })
        .collect()
}

fn acyclic_b() -> IntMatrix {
    matrix(&[&[0, 1, 1], &[-1, 0, 1], &[-2, -3, 0]])
}

fn affine_b() -> IntMatrix {
    matrix(&[&[0, 2], &[-2, 0]])
}

/// Collects criterion outcomes and prints one line per criterion.
#[derive(Default)]
struct Ledger {
    failed: Vec<String>,
}

impl Ledger {
    fn record(&mut self, criterion: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("PASS  {criterion}: {detail}"),
            Err(detail) => {
                println!("FAIL  {criterion}: {detail}");
                self.failed.push(criterion.to_string());
            }
        }
    }
}

fn require(record: &CheckRecord, context: &str) -> Result<(), String> {
    if record.passed() {
        Ok(())
    } else {
        Err(format!(
            "{context}: {} {:?}, {} failures, witness {:?}",
            record.check, record.status, record.failures, record.witness_path
        ))
    }
}

fn closed(inst: &Instance) -> Result<(), String> {
    match inst.atlas.closure() {
        Closure::Closed { .. } => Ok(()),
        Closure::Truncated => Err(format!("{} did not close", inst.name)),
    }
}

/// Labeled-seed BFS on exact rational evaluations at a fixed point,
/// sharing no code with the Laurent engine. Returns (seeds, distinct values).
fn evaluation_oracle(b: &IntMatrix) -> (usize, usize) {
    let n = b.rows();
    let primes = [2i64, 3, 5, 7, 11, 13, 101, 103, 107, 109, 113, 127];
    let y: Vec<BigRational> = (0..n).map(|j| BigRational::from_integer(BigInt::from(primes[6 + j]))).collect();
    let x: Vec<BigRational> = (0..n).map(|i| BigRational::from_integer(BigInt::from(primes[i]))).collect();
    let mut ext = vec![vec![0i64; n]; 2 * n];
    for i in 0..n {
        ext[i] = b.row(i).to_vec();
        ext[n + i][i] = 1;
    }
    type Node = (Vec<Vec<i64>>, Vec<BigRational>);
    let pow = |v: &BigRational, e: i64| -> BigRational {
        let mut acc = BigRational::one();
        for _ in 0..e {
            acc *= v;
        }
        acc
    };
    let mutate = |(m, vals): &Node, k: usize| -> Node {
        let mut plus = BigRational::one();
        let mut minus = BigRational::one();
        for (i, row) in m.iter().enumerate() {
            let base = if i < n { &vals[i] } else { &y[i - n] };
            let e = row[k];
            if e > 0 {
                plus *= pow(base, e);
            } else if e < 0 {
                minus *= pow(base, -e);
            }
        }
        let mut out_vals = vals.clone();
        out_vals[k] = (plus + minus) / &vals[k];
        let mut out = m.clone();
        for i in 0..2 * n {
            for j in 0..n {
                out[i][j] = if i == k || j == k {
                    -m[i][j]
                } else {
                    let (a, c) = (m[i][k], m[k][j]);
                    m[i][j] + a * (-c).max(0) + a.max(0) * c
                };
            }
        }
        (out, out_vals)
    };
    let start: Node = (ext, x);
    let mut seen: HashSet<Node> = HashSet::from([start.clone()]);
    let mut values: HashSet<BigRational> = start.1.iter().cloned().collect();
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        for k in 0..n {
            let next = mutate(&node, k);
            if seen.insert(next.clone()) {
                values.extend(next.1.iter().cloned());
                queue.push_back(next);
            }
        }
        assert!(seen.len() < 10_000, "oracle did not close");
    }
    (seen.len(), values.len())
}

#[test]
fn acceptance_criteria() {
    let finite = finite_instances();
    let affine = explore(&affine_b(), &ExploreOptions::with_depth(5)).unwrap();
    let acyclic = explore(&acyclic_b(), &ExploreOptions::with_depth(5)).unwrap();
    let mut ledger = Ledger::default();

    ledger.record(
        "main theorem: C-matrix determines the seed (A2, A3, B2, G2)",
        finite
            .iter()
            .try_for_each(|inst| {
                closed(inst)?;
                require(&check_c_determines_seed(&inst.atlas), inst.name)
            })
            .map(|_| {
                let sizes: Vec<String> = finite.iter().map(|i| format!("{} {}", i.name, i.atlas.len())).collect();
                format!("closed, injective over all labeled seeds ({})", sizes.join(", "))
            }),
    );

    ledger.record(
        "G-matrix corollary: G-matrix determines the seed (A2, A3, B2, G2)",
        finite
            .iter()
            .try_for_each(|inst| {
                closed(inst)?;
                require(&check_g_determines_seed(&inst.atlas), inst.name)
            })
            .map(|_| "injective over all labeled seeds".to_string()),
    );

    ledger.record(
        "duality identities and det G = +-1 with the stated symmetrizers",
        finite
            .iter()
            .try_for_each(|inst| {
                let found = find_skew_symmetrizer(&inst.b)
                    .map_err(|e| e.to_string())?
                    .ok_or_else(|| format!("{}: no symmetrizer found", inst.name))?;
                if found.diag() != inst.s.as_slice() {
                    return Err(format!("{}: symmetrizer {:?}, expected {:?}", inst.name, found.diag(), inst.s));
                }
                let s = SkewSymmetrizer::new(inst.s.clone()).map_err(|e| e.to_string())?;
                require(&check_duality(&inst.atlas, &s), inst.name)?;
                for e in inst.atlas.entries() {
                    let det = e.g().determinant().map_err(|e| e.to_string())?;
                    if det.abs() != 1 {
                        return Err(format!("{}: det G = {det} at {:?}", inst.name, e.path()));
                    }
                }
                Ok(())
            })
            .map(|_| "S = diag(1,1), diag(1,1,1), diag(2,1), diag(3,1); exact".to_string()),
    );

    ledger.record(
        "positivity and sign-coherence (closed atlases and affine depth 5)",
        (|| {
            if affine.closure() != Closure::Truncated {
                return Err("affine atlas unexpectedly closed".to_string());
            }
            for inst in &finite {
                require(&check_positivity(&inst.atlas), inst.name)?;
                require(&check_sign_coherence(&inst.atlas), inst.name)?;
            }
            require(&check_positivity(&affine), "affine")?;
            require(&check_sign_coherence(&affine), "affine")?;
            Ok(format!("affine truncated ball of {} seeds included", affine.len()))
        })(),
    );

    ledger.record(
        "separation formula at every explored seed",
        (|| {
            for inst in &finite {
                require(&check_separation(&inst.atlas), inst.name)?;
            }
            require(&check_separation(&affine), "affine")?;
            require(&check_separation(&acyclic), "acyclic")?;
            Ok("all instances, exact equality".to_string())
        })(),
    );

    ledger.record(
        "F-polynomial shape",
        (|| {
            for inst in &finite {
                require(&check_f_polynomial_shape(&inst.atlas, true), inst.name)?;
            }
            require(&check_f_polynomial_shape(&affine, true), "affine")?;
            require(&check_f_polynomial_shape(&acyclic, false), "acyclic")?;
            Ok("constant term 1 and maximal monomial (skew-symmetrizable); constant term 1 (acyclic)".to_string())
        })(),
    );

    ledger.record(
        "identity G-matrix occurs only at the origin",
        finite
            .iter()
            .try_for_each(|inst| {
                closed(inst)?;
                let identity = IntMatrix::identity(inst.b.rows()).unwrap();
                let hits: Vec<&[usize]> = inst
                    .atlas
                    .entries()
                    .iter()
                    .filter(|e| e.g() == &identity)
                    .map(|e| e.path())
                    .collect();
                if hits != [&[] as &[usize]] {
                    return Err(format!("{}: G = I at {hits:?}", inst.name));
                }
                require(&check_lemma_identity_seed(&inst.atlas), inst.name)
            })
            .map(|_| "exactly one hit per closed atlas".to_string()),
    );

    ledger.record(
        "weak version: (G, C, B) determines the seed, acyclic 3x3 at depth 5",
        (|| {
            let b = acyclic_b();
            let sss = is_sign_skew_symmetric(&b).map_err(|e| e.to_string())?;
            if !sss || !is_acyclic(&b).map_err(|e| e.to_string())? {
                return Err("instance is not acyclic sign-skew-symmetric".to_string());
            }
            if find_skew_symmetrizer(&b).map_err(|e| e.to_string())?.is_some() {
                return Err("a skew-symmetrizer was found".to_string());
            }
            if acyclic.depth_bound() != 5 {
                return Err(format!("depth bound {}", acyclic.depth_bound()));
            }
            require(&check_positivity(&acyclic), "acyclic")?;
            require(&check_sign_coherence(&acyclic), "acyclic")?;
            require(&check_triple_determines_seed(&acyclic), "acyclic")?;
            require(&check_witness_replay(&acyclic), "acyclic")?;
            Ok(format!(
                "{} seeds, layers {:?}, no symmetrizer",
                acyclic.len(),
                acyclic.layers()
            ))
        })(),
    );

    ledger.record(
        "engine counts: A2 closes with 10 seeds and 5 cluster variables",
        (|| {
            let a2 = &finite[0].b;
            let (oracle_seeds, oracle_vars) = evaluation_oracle(a2);
            if (oracle_seeds, oracle_vars) != (10, 5) {
                return Err(format!("oracle gives {oracle_seeds} seeds, {oracle_vars} values"));
            }
            for workers in [1, 4, 0] {
                for _ in 0..2 {
                    let opts = ExploreOptions {
                        workers,
                        ..ExploreOptions::with_depth(12)
                    };
                    let atlas = explore(a2, &opts).map_err(|e| e.to_string())?;
                    let got = (atlas.len(), atlas.cluster_variables().len(), atlas.is_closed());
                    if got != (10, 5, true) {
                        return Err(format!("workers {workers}: {got:?}"));
                    }
                    let paths: Vec<&[usize]> = atlas.entries().iter().map(|e| e.path()).collect();
                    let reference: Vec<&[usize]> = finite[0].atlas.entries().iter().map(|e| e.path()).collect();
                    if paths != reference {
                        return Err(format!("workers {workers}: different insertion order"));
                    }
                }
            }
            let others: HashMap<&str, (usize, usize)> = finite[1..]
                .iter()
                .map(|i| (i.name, (i.atlas.len(), i.atlas.cluster_variables().len())))
                .collect();
            for inst in &finite[1..] {
                if others[inst.name] != evaluation_oracle(&inst.b) {
                    return Err(format!("{}: engine {:?} vs oracle {:?}", inst.name, others[inst.name], evaluation_oracle(&inst.b)));
                }
            }
            Ok("stable across runs and workers 1, 4, global pool; oracle agrees on A3, B2, G2".to_string())
        })(),
    );

    ledger.record(
        "negative controls: canaries make their checks fail with a witness",
        (|| {
            let a2 = &finite[0].b;
            for (canary, check) in [(Canary::FlipSign, POSITIVITY), (Canary::PerturbC, SIGN_COHERENCE)] {
                let opts = SuiteOptions {
                    canary: Some(canary),
                    ..SuiteOptions::with_depth(12)
                };
                let report = run_full_suite(a2, &opts).map_err(|e| e.to_string())?;
                let record = report.check(check).ok_or("missing check")?;
                if record.passed() || record.witness_path.is_none() || record.counterexample.is_none() {
                    return Err(format!("{canary:?}: {check} did not fail with a witness"));
                }
                if report.exit_code(false) != 2 {
                    return Err(format!("{canary:?}: exit code {}", report.exit_code(false)));
                }
            }
            let clean = run_checks(&finite[0].atlas, Some(&SkewSymmetrizer::new(vec![1, 1]).unwrap()), 1);
            if clean.iter().any(|c| !c.passed()) {
                return Err("uncorrupted A2 atlas fails a check".to_string());
            }
            Ok("FlipSign fails positivity, PerturbC fails sign_coherence".to_string())
        })(),
    );

    assert!(ledger.failed.is_empty(), "failed criteria: {:?}", ledger.failed);
}

#[test]
fn evaluation_oracle_sanity() {
    assert_eq!(evaluation_oracle(&matrix(&[&[0]])), (2, 2));
}
