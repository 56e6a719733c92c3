//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.
//!
//! `cargo test -p bhr-harness --test acceptance` (optimized via the
//! workspace test profile). Set `BHR_ACCEPT_ONLY=4,7` to run a subset.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::process::Command;
use std::time::{Duration, Instant};

use bhr_core::{
    divisor_condition, enumerate_multisets, find_path, oracle_find_path, path_hop_lengths,
    validate_realization, HamiltonianPath, HopMultiset, MultisetFilter, ProblemInstance, SearchLimits,
};
use bhr_harness::{verify_all, Mode, ResultLine, Sinks, VerifyConfig, VerifySummary};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn bhr(args: &str) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bhr"))
        .args(args.split_whitespace())
        .output()
        .expect("bhr binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn within(label: &str, started: Instant, budget: Duration) -> Result<Duration, String> {
    let t = started.elapsed();
    if t < budget {
        Ok(t)
    } else {
        Err(format!("{label} took {t:.2?}, budget {budget:?}"))
    }
}

fn expect_count(args: &str, expected: &str, budget: Duration) -> Result<Duration, String> {
    let started = Instant::now();
    let (code, stdout) = bhr(args);
    let t = within(args, started, budget)?;
    if code != 0 || stdout.trim() != expected {
        return Err(format!("`bhr {args}` gave exit {code} and {:?}, expected {expected:?}", stdout.trim()));
    }
    Ok(t)
}

fn c1_fp_counts() -> Outcome {
    let a = expect_count("count --p 31 --mode fp", "p=31 mode=fp total=5096", Duration::from_secs(1))?;
    let b = expect_count("count --p 26 --mode fp", "p=26 mode=fp total=1763", Duration::from_secs(1))?;
    Ok(format!("p=31: 5096 ({a:.2?}), p=26: 1763 ({b:.2?})"))
}

fn c2_multiset_counts() -> Outcome {
    // 170544 = C(22, 7)
    let closed_form: u64 = (0..7u64).fold(1, |acc, i| acc * (22 - i) / (i + 1));
    if closed_form != 170_544 {
        return Err(format!("closed form gave {closed_form}"));
    }
    let t = expect_count(
        "count --p 16 --mode all-multisets",
        "p=16 mode=all-multisets total=170544 divisor_condition=167898",
        Duration::from_secs(10),
    )?;
    Ok(format!("170544 -> 167898 ({t:.2?})"))
}

fn c3_coprime_count() -> Outcome {
    let t = expect_count("count --p 30 --mode coprime", "p=30 mode=coprime total=4960", Duration::from_secs(1))?;
    Ok(format!("4960 over {{1, 7, 11, 13}} ({t:.2?})"))
}

/// Runs `verify` through the library and re-checks every JSONL record
/// independently of the in-run soundness assertion.
fn verify_and_recheck(p: usize) -> Result<(VerifySummary, u64), String> {
    let mut results = Vec::new();
    let summary = verify_all(
        &VerifyConfig::new(p, Mode::Fp),
        None,
        Sinks { results: Some(&mut results), log: &mut io::sink() },
    )
    .map_err(|e| format!("p={p}: {e}"))?;
    let inst = ProblemInstance::new(p).unwrap();
    let mut checked = 0;
    for line in String::from_utf8(results).unwrap().lines() {
        let rec: ResultLine = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let Some(vs) = rec.path else { continue };
        let target = HopMultiset::from_counts(&inst, rec.target.iter().map(|(&l, &c)| (l, c))).unwrap();
        let path = HamiltonianPath::new(vs).map_err(|e| format!("p={p} item {}: {e}", rec.item_index))?;
        if path.vertices()[0] != 0 || !validate_realization(&path, &target, &inst) {
            return Err(format!("p={p} item {} does not realize its target", rec.item_index));
        }
        checked += 1;
    }
    Ok((summary, checked))
}

fn c4_verify_5_to_26(validated: &mut u64) -> Outcome {
    let started = Instant::now();
    let mut total = 0;
    for p in 5..=26 {
        let (s, checked) = verify_and_recheck(p)?;
        if !s.all_solved() || s.exit_code() != 0 {
            return Err(format!("p={p}: solved {} / {}", s.solved, s.total));
        }
        if p == 26 && s.total != 1763 {
            return Err(format!("p=26 total {} != 1763", s.total));
        }
        total += s.total;
        *validated += checked;
    }
    let t = within("p=5..26", started, Duration::from_secs(30 * 60))?;
    Ok(format!("{total} FPs over p=5..26 all solved, 1763 / 1763 at p=26 ({t:.2?})"))
}

fn c5_verify_31(validated: &mut u64) -> Outcome {
    let started = Instant::now();
    let (s, checked) = verify_and_recheck(31)?;
    *validated += checked;
    let t = within("p=31", started, Duration::from_secs(2 * 3600))?;
    if s.solved != 5096 || s.total != 5096 || s.exhausted + s.limited != 0 {
        return Err(format!("solved {} / {}", s.solved, s.total));
    }
    Ok(format!("5096 / 5096, max {} backtracks ({t:.2?})", s.max_backtracks))
}

fn c6_oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut n = 0;
    for p in 4..=8 {
        let inst = ProblemInstance::new(p).unwrap();
        for target in enumerate_multisets(&inst, MultisetFilter::None) {
            let fast = find_path(&target, &inst, None, &SearchLimits::UNLIMITED).unwrap();
            let slow = oracle_find_path(&target, &inst).unwrap();
            if fast.success != slow.success {
                return Err(format!("disagree on {target:?}: solver {} oracle {}", fast.success, slow.success));
            }
            n += 1;
        }
    }
    let t = within("oracle equivalence", started, Duration::from_secs(5 * 60))?;
    Ok(format!("{n} multisets, p=4..8, no disagreement ({t:.2?})"))
}

fn c7_inductive_chain(validated: &mut u64) -> Outcome {
    let dir = std::env::temp_dir().join(format!("bhr-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let out = dir.join("evolve.jsonl");
    let started = Instant::now();
    let (code, stdout) = bhr(&format!("evolve --start-p 30 --iterations 10 --out {}", out.display()));
    let t = within("evolve", started, Duration::from_secs(10 * 60))?;
    if code != 0 {
        return Err(format!("evolve exit code {code}"));
    }
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    let records: Vec<ResultLine> =
        text.lines().map(serde_json::from_str).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let ps: Vec<usize> = records.iter().map(|r| r.p).collect();
    if ps != (31..=40).collect::<Vec<_>>() {
        return Err(format!("iterations reached p = {ps:?}"));
    }
    let mut methods = BTreeMap::new();
    for r in &records {
        let inst = ProblemInstance::new(r.p).unwrap();
        let target = HopMultiset::from_counts(&inst, r.target.iter().map(|(&l, &c)| (l, c))).unwrap();
        let path = r.path.clone().ok_or(format!("p={} has no path", r.p))?;
        let path = HamiltonianPath::new(path).map_err(|e| e.to_string())?;
        if !r.success || !validate_realization(&path, &target, &inst) {
            return Err(format!("p={} step invalid", r.p));
        }
        *methods.entry(r.method_used.clone()).or_insert(0) += 1;
        *validated += 1;
    }
    if stdout.matches("Result: SUCCESS").count() != 10 || !stdout.contains("10 | 40 | ") {
        return Err("log does not show 10 successful iterations ending at p=40".into());
    }
    Ok(format!("p=31..40 all SUCCESS, methods {methods:?} ({t:.2?})"))
}

fn c8_random_paths(validated: u64) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x05ee_db4a);
    for i in 0..10_000 {
        let p = rng.gen_range(2..=50);
        let mut vs: Vec<usize> = (0..p).collect();
        vs.shuffle(&mut rng);
        let inst = ProblemInstance::new(p).unwrap();
        let ms = path_hop_lengths(&HamiltonianPath::new(vs).unwrap(), &inst).unwrap();
        let total: usize = ms.iter().map(|(_, c)| c).sum();
        if total != p - 1 || ms.iter().any(|(l, _)| l == 0 || l > p / 2) {
            return Err(format!("sample {i} (p={p}) produced {ms:?}"));
        }
    }
    Ok(format!("10000 random paths well-formed; {validated} solver results re-validated"))
}

fn c9_divisor_necessity() -> Outcome {
    let started = Instant::now();
    let mut paths = 0u64;
    for p in 4..=8 {
        let inst = ProblemInstance::new(p).unwrap();
        let mut rest: Vec<usize> = (1..p).collect();
        let mut bad = None;
        permute(&mut rest, 0, &mut |perm| {
            let mut vs = vec![0];
            vs.extend_from_slice(perm);
            let ms = path_hop_lengths(&HamiltonianPath::new(vs.clone()).unwrap(), &inst).unwrap();
            paths += 1;
            if !divisor_condition(&ms, &inst).unwrap() {
                bad.get_or_insert(vs);
            }
        });
        if let Some(vs) = bad {
            return Err(format!("path {vs:?} violates the divisor condition at p={p}"));
        }
    }
    let t = within("necessity", started, Duration::from_secs(120))?;
    Ok(format!("{paths} paths from 0 over p=4..8 all satisfy it ({t:.2?})"))
}

fn permute(xs: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

fn main() {
    let only: Option<Vec<u32>> = std::env::var("BHR_ACCEPT_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |n: u32| only.as_ref().is_none_or(|o| o.contains(&n));
    let mut validated = 0u64;
    let mut failed = 0;
    let mut report = |n: u32, name: &str, run: &mut dyn FnMut() -> Outcome| {
        if !wanted(n) {
            return;
        }
        let line = match run() {
            Ok(msg) => format!("[PASS] C{n} {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                format!("[FAIL] C{n} {name}: {msg}")
            }
        };
        let mut err = io::stderr().lock();
        let _ = writeln!(err, "{line}");
    };

    report(1, "FP counts", &mut c1_fp_counts);
    report(2, "multiset counts p=16", &mut c2_multiset_counts);
    report(3, "coprime count p=30", &mut c3_coprime_count);
    report(4, "verify all FPs p=5..26", &mut || c4_verify_5_to_26(&mut validated));
    report(5, "verify all FPs p=31", &mut || c5_verify_31(&mut validated));
    report(6, "solver/oracle equivalence", &mut c6_oracle_equivalence);
    report(7, "inductive chain 30 -> 40", &mut || c7_inductive_chain(&mut validated));
    let v = validated;
    report(8, "realization soundness", &mut || c8_random_paths(v));
    report(9, "divisor-condition necessity", &mut c9_divisor_necessity);
    if wanted(10) {
        let _ = writeln!(
            io::stderr(),
            "[SKIP] C10 excluded by scope: p=30 full enumeration, published backtrack counts; \
             the p=16 long run is `cargo test -p bhr-harness --test long_run -- --ignored`"
        );
    }

    if failed > 0 {
        let _ = writeln!(io::stderr(), "{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
