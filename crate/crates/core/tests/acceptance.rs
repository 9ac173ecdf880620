//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line.
//!
//! Run with `cargo test -p privlim --test acceptance -- --nocapture` to see
//! the lines.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use privlim::domain::{
    materialize, Amount, AttackSpec, Attacker, LengthDistribution, NodeId, PartitionInstance,
    RewardScheme, Route, SingleTargetInstance, TabulatedScheme,
};
use privlim::econ_sim::{
    apply_attack, apply_delivery, expected_drift, simulate, tax_variance, AttackPolicy, Ledger,
    PolicyKind, SimConfig, DEFAULT_POOL_SIZE,
};
use privlim::merge_avoidance::{
    brute_single_target, has_partition, partition_to_ma, solve_multi_target_exact,
    solve_single_target, DEFAULT_NODE_BUDGET,
};
use privlim::mixing_scheme::{
    advantage_applicant, advantage_concealer, gen_base_case_scheme, impossibility_witness,
    lemma_check, neutral_t0, s_closed, s_sum, verify, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id}: {name} -- {detail}");
}

#[test]
fn criterion_1_greedy_optimality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let mut agree = 0;
    let total = 1000;
    for _ in 0..total {
        let n = rng.gen_range(1..=12);
        let values: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=100)).collect();
        let sum: u64 = values.iter().sum();
        let v = rng.gen_range(1..=sum);
        let inst = SingleTargetInstance::new(values, v).unwrap();
        let greedy = solve_single_target(&inst).unwrap();
        let brute = brute_single_target(&inst).unwrap();
        let covered: u64 = greedy.iter().map(|&i| inst.values[i]).sum();
        if greedy.len() == brute.len() && covered >= v {
            agree += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = agree == total && elapsed < Duration::from_secs(10);
    report(
        1,
        "greedy optimality",
        ok,
        format!("{agree}/{total} agree in {elapsed:.2?}"),
    );
    assert_eq!(agree, total);
    assert!(elapsed < Duration::from_secs(10));
}

#[test]
fn criterion_2_reduction_fidelity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
    let total = 200;
    let (mut agree, mut yes) = (0, 0);
    for _ in 0..total {
        let n = rng.gen_range(1..=10);
        let mut elements: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=30)).collect();
        if elements.iter().sum::<u64>() % 2 == 1 {
            let e = &mut elements[0];
            *e = if *e < 30 { *e + 1 } else { *e - 1 };
        }
        let p = PartitionInstance::new(elements).unwrap();
        let inst = partition_to_ma(&p).unwrap();
        let tx = solve_multi_target_exact(&inst, DEFAULT_NODE_BUDGET)
            .unwrap()
            .tx_count();
        let expected = if has_partition(&p) {
            yes += 1;
            n
        } else {
            n + 1
        };
        if tx == expected {
            agree += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = agree == total && elapsed < Duration::from_secs(60);
    report(
        2,
        "hardness-reduction fidelity",
        ok,
        format!("{agree}/{total} agree ({yes} partitionable) in {elapsed:.2?}"),
    );
    assert_eq!(agree, total);
    assert!(elapsed < Duration::from_secs(60));
}

fn random_positive(rng: &mut ChaCha8Rng) -> Amount {
    Amount::ratio(rng.gen_range(1..=1000), rng.gen_range(1..=16))
}

#[test]
fn criterion_3_impossibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
    let total = 100;
    let mut confirmed = 0;
    for i in 0..total {
        let table: Vec<Amount> = match i % 3 {
            0 => vec![random_positive(&mut rng); 20],
            1 => {
                let mut cur = random_positive(&mut rng) * Amount::from_int(1000);
                (0..20)
                    .map(|_| {
                        let out = cur.clone();
                        cur = &cur * Amount::ratio(rng.gen_range(1..=16), 16);
                        out
                    })
                    .collect()
            }
            _ => (0..20).map(|_| random_positive(&mut rng)).collect(),
        };
        let verdict = impossibility_witness(&table, 19).unwrap();
        let zero_sum = TabulatedScheme::zero_tax(table).unwrap();
        if let Verdict::Violation(v) = &verdict {
            if v.confirm(&zero_sum).unwrap() {
                confirmed += 1;
            }
        }
    }
    let ok = confirmed == total;
    report(
        3,
        "impossibility witness",
        ok,
        format!("{confirmed}/{total} confirmed violations"),
    );
    assert_eq!(confirmed, total);
}

#[test]
fn criterion_4_lemma() {
    let total = 100;
    let mut passed = 0;
    for seed in 0..total {
        let t = gen_base_case_scheme(seed, 40);
        if verify(&t, 30, 10).unwrap().is_pass() && lemma_check(&t, 30, 10).unwrap() {
            passed += 1;
        }
    }
    let ok = passed == total;
    report(
        4,
        "k=1 sufficiency lemma",
        ok,
        format!("{passed}/{total} seeds pass verify(30,10)"),
    );
    assert_eq!(passed, total);
}

#[test]
fn criterion_5_solution_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA5);
    let mut passed = 0;
    let total = 20;
    for _ in 0..total {
        let r0 = random_positive(&mut rng);
        let t0 = Amount::ratio(rng.gen_range(-500..=500), rng.gen_range(1..=16));
        let mut scheme = RewardScheme::halving(r0, t0);
        scheme.lmax = 16;
        scheme.kmax = 16;
        let t = materialize(&scheme, 32).unwrap();
        let pass = verify(&t, 16, 16).unwrap().is_pass();
        let tight = (1..=16).all(|l| {
            advantage_concealer(&t, l, 1).unwrap() == *t.reward(l).unwrap()
                && advantage_applicant(&t, l, 1).unwrap() == t.cost(l).unwrap()
        });
        if pass && tight {
            passed += 1;
        }
    }
    let s_ok = (1..=64).all(|l| s_closed(l) == s_sum(l));
    let ok = passed == total && s_ok;
    report(
        5,
        "closed-form solution family",
        ok,
        format!(
            "{passed}/{total} schemes pass and are tight at k=1; S closed==sum on [1,64]: {s_ok}"
        ),
    );
    assert_eq!(passed, total);
    assert!(s_ok);
}

#[test]
fn criterion_6_economy() {
    let start = Instant::now();

    // (a) zero-sum history of deliveries and both kinds of attack
    let mut rng = ChaCha8Rng::seed_from_u64(0xA6);
    let r: Vec<Amount> = (0..12).map(|_| random_positive(&mut rng)).collect();
    let zero_sum = TabulatedScheme::zero_tax(r).unwrap();
    let mut ledger = Ledger::new();
    let initial = ledger.total().clone();
    let mut next_sybil = 1_000_000u64;
    for _ in 0..10_000 {
        let l = rng.gen_range(1..=6u32);
        let ids = rand::seq::index::sample(&mut rng, 50, l as usize + 1);
        let ids: Vec<NodeId> = ids.iter().map(|x| NodeId(x as u64)).collect();
        let route = Route::new(ids[0], ids[1..].to_vec()).unwrap();
        match rng.gen_range(0..3) {
            0 => apply_delivery(&mut ledger, &route, &zero_sum).unwrap(),
            kind => {
                let k = rng.gen_range(0..=6u32);
                let sybils = (0..k).map(|i| NodeId(next_sybil + u64::from(i))).collect();
                next_sybil += u64::from(k);
                let attacker = if kind == 1 {
                    Attacker::Applicant
                } else {
                    Attacker::Concealer(rng.gen_range(1..=l as usize))
                };
                apply_attack(
                    &mut ledger,
                    &route,
                    &AttackSpec::new(attacker, sybils),
                    &zero_sum,
                )
                .unwrap();
            }
        }
    }
    let conserved = ledger.total() == &initial && ledger.audit();

    // (b) degenerate pmf at l = 2
    let halving = materialize(&RewardScheme::halving(8i64, 0i64), 64).unwrap();
    let at2 = LengthDistribution::degenerate(2).unwrap();
    let rep = simulate(&SimConfig {
        scheme: halving,
        dist: at2,
        messages: 1000,
        attack: AttackPolicy::honest(),
        seed: 6,
        pool_size: DEFAULT_POOL_SIZE,
    })
    .unwrap();
    let drift_b = rep.drift_per_message.clone();
    let degenerate_ok = drift_b == Amount::from_int(-4);

    // (c) credit-neutral T0 under a uniform pmf on {1, 2}
    let uniform = LengthDistribution::uniform(&[1, 2]).unwrap();
    let mut scheme = RewardScheme::halving(8i64, 0i64);
    scheme.t0 = neutral_t0(&scheme, &uniform).unwrap();
    let neutral = materialize(&scheme, scheme.capacity()).unwrap();
    let expected_zero = expected_drift(&neutral, &uniform).unwrap().is_zero();
    let var = tax_variance(&neutral, &uniform).unwrap();
    let n = 100_000u64;
    let rep = simulate(&SimConfig {
        scheme: neutral,
        dist: uniform,
        messages: n,
        attack: AttackPolicy {
            policy: PolicyKind::None,
            k: 0,
        },
        seed: 0xC0FFEE,
        pool_size: DEFAULT_POOL_SIZE,
    })
    .unwrap();
    // |drift| <= 6 sigma / sqrt(n)  <=>  drift^2 <= 36 var / n, exactly
    let d = &rep.drift_per_message;
    let lhs = d * d;
    let rhs = Amount::from_int(36) * &var / Amount::from(n);
    let concentrated = lhs <= rhs;

    let elapsed = start.elapsed();
    let ok = conserved
        && degenerate_ok
        && expected_zero
        && concentrated
        && elapsed < Duration::from_secs(30);
    report(
        6,
        "economy",
        ok,
        format!(
            "(a) conserved={conserved} (b) drift={drift_b} (c) drift={} (~{:.5}), bound^2={rhs}, var={var}; {elapsed:.2?}",
            rep.drift_per_message,
            rep.drift_per_message.to_f64_lossy()
        ),
    );
    assert!(conserved);
    assert!(degenerate_ok);
    assert!(expected_zero);
    assert!(concentrated);
    assert!(elapsed < Duration::from_secs(30));
}

fn run_twice(dir: &Path, name: &str, args: &[&str], expect_code: i32) -> bool {
    let mut outputs = Vec::new();
    for round in 0..2 {
        let out = dir.join(format!("{name}.{round}.json"));
        let trace = dir.join(format!("{name}.{round}.csv"));
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_privlim"));
        cmd.args(args).arg("-o").arg(&out);
        if args[0] == "sim" {
            cmd.arg("--trace").arg(&trace);
        }
        let status = cmd.status().unwrap();
        if status.code() != Some(expect_code) {
            return false;
        }
        let mut bytes = fs::read(&out).unwrap();
        if args[0] == "sim" {
            bytes.extend(fs::read(&trace).unwrap());
        }
        outputs.push(bytes);
    }
    !outputs[0].is_empty() && outputs[0] == outputs[1]
}

#[test]
fn criterion_7_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str, body: &str| {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        path.to_str().unwrap().to_string()
    };
    let single = p("single.json", r#"{"values":[5,3,2],"v":6}"#);
    let multi = p("multi.json", r#"{"inputs":[3,3,5],"outputs":[4,2,5]}"#);
    let part = p("part.json", r#"{"elements":[3,1,1,2,2,1]}"#);
    let scheme = p(
        "scheme.json",
        r#"{"R0":"8","T0":"0","rho":{"kind":"const","value":"1"},"tau":{"kind":"const","value":"0"},"Lmax":10,"Kmax":10}"#,
    );
    let table = p("table.json", r#"{"R":["4","4","4"]}"#);
    let pmf = p("pmf.json", r#"[[1,"1/2"],[2,"1/2"]]"#);
    let sim = p(
        "sim.json",
        r#"{"scheme":{"R0":"8","T0":"-2","rho":{"kind":"const","value":"1"},"tau":{"kind":"const","value":"0"},"Lmax":4,"Kmax":4},
            "length_pmf":[[1,"1/3"],[2,"1/3"],[4,"1/3"]],"messages":5000,"seed":11,
            "attacks":{"policy":"concealer","k":2}}"#,
    );

    let cases: Vec<(&str, Vec<&str>, i32)> = vec![
        ("solve_single", vec!["ma", "solve", "--single", &single], 0),
        ("solve_multi", vec!["ma", "solve", "--multi", &multi], 0),
        (
            "solve_heuristic",
            vec!["ma", "solve", "--multi", &multi, "--heuristic"],
            0,
        ),
        ("reduce", vec!["ma", "reduce", &part], 0),
        ("verify", vec!["scheme", "verify", &scheme], 0),
        (
            "verify_base",
            vec!["scheme", "verify", &scheme, "--base-case"],
            0,
        ),
        (
            "verify_impossible",
            vec!["scheme", "verify", &table, "--impossibility"],
            1,
        ),
        (
            "design",
            vec!["scheme", "design", &scheme, "--pmf", &pmf],
            0,
        ),
        ("sim", vec!["sim", "run", &sim], 0),
    ];
    let mut failures = Vec::new();
    for (name, args, code) in &cases {
        if !run_twice(dir.path(), name, args, *code) {
            failures.push(*name);
        }
    }
    let ok = failures.is_empty();
    report(
        7,
        "CLI determinism",
        ok,
        format!(
            "{}/{} subcommand runs byte-identical; failing: {failures:?}",
            cases.len() - failures.len(),
            cases.len()
        ),
    );
    assert!(ok);
}
