//! Acceptance criteria, one line each. Runs criteria one after another so
//! the time limits are measured without other tests competing for CPU.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use symcode::workbench::{enumerate_codes, run_sweep, Bounds, CodeFilter, Property, SweepReport};
use symcode::{subset_sum_exact, Code, ExponentMultiset, Natural, Profile, Word};

/// Shor's code profile as printed by `scripts/shor_profile.py`.
const SHOR_PROFILE: [(usize, u64); 12] = [
    (1, 1),
    (2, 2),
    (4, 8),
    (6, 32),
    (8, 256),
    (9, 256),
    (10, 512),
    (11, 1024),
    (12, 2048),
    (13, 8192),
    (14, 16384),
    (15, 32768),
];

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Result<String, String>,
}

fn sweep(property: Property, max_words: usize, max_len: usize) -> Result<SweepReport, String> {
    let report = run_sweep(property, Bounds::new(max_words, max_len)).map_err(|e| e.to_string())?;
    if !report.passed {
        let first = &report.failures[0];
        return Err(format!(
            "{} failures, first: input {} expected {} actual {}",
            report.failures.len(),
            first.input,
            first.expected,
            first.actual
        ));
    }
    if report.instances == 0 {
        return Err("empty universe".into());
    }
    Ok(report)
}

fn code_tree_round_trip() -> Result<String, String> {
    let r = sweep(Property::Theorem1Roundtrip, 4, 4)?;
    Ok(format!("{} prefix-free codes", r.instances))
}

fn tree_code_converse() -> Result<String, String> {
    let r = sweep(Property::Theorem1Converse, 1, 3)?;
    if r.instances != 676 {
        return Err(format!("expected 676 canonical forms, got {}", r.instances));
    }
    Ok(format!("{} symmetric canonical forms", r.instances))
}

fn ternary_bound() -> Result<String, String> {
    let r = sweep(Property::Lemma1, 3, 4)?;
    let k = sweep(Property::KraftForward, 3, 4)?;
    Ok(format!("{} decodable codes, Kraft checked on {}", r.instances, k.instances))
}

/// Plain 0/1 knapsack reachability of `goal`.
fn dp_reaches(items: &[u64], goal: u64) -> bool {
    let mut reach = vec![false; goal as usize + 1];
    reach[0] = true;
    for &x in items {
        for s in (x..=goal).rev() {
            reach[s as usize] |= reach[(s - x) as usize];
        }
    }
    reach[goal as usize]
}

fn exact_subset_sum() -> Result<String, String> {
    let mut checked = 0usize;
    for target in 0..=8u32 {
        let width = target as usize + 1;
        let mut mult = vec![0usize; width];
        loop {
            let exps: Vec<u32> = (0..width).flat_map(|n| std::iter::repeat_n(n as u32, mult[n])).collect();
            let items: Vec<u64> = exps.iter().map(|&n| 1u64 << n).collect();
            let goal = 1u64 << target;
            if items.iter().sum::<u64>() >= goal {
                checked += 1;
                if !dp_reaches(&items, goal) {
                    return Err(format!("knapsack oracle cannot reach 2^{target} from {exps:?}"));
                }
                let input = ExponentMultiset::new(exps.iter().copied());
                let pick = subset_sum_exact(&input, target).map_err(|e| format!("{exps:?}: {e}"))?;
                let mut rest = exps.clone();
                for n in pick.as_slice() {
                    let i = rest
                        .iter()
                        .position(|x| x == n)
                        .ok_or(format!("{exps:?}: {pick} not a sub-multiset"))?;
                    rest.swap_remove(i);
                }
                if pick.as_slice().iter().map(|&n| 1u64 << n).sum::<u64>() != goal {
                    return Err(format!("{exps:?}: {pick} does not sum to {goal}"));
                }
            }
            // Next multiplicity vector, each entry in 0..=3.
            let Some(i) = mult.iter().position(|&m| m < 3) else { break };
            mult[i] += 1;
            mult[..i].iter_mut().for_each(|m| *m = 0);
        }
    }
    Ok(format!("{checked} multisets"))
}

fn prefixify_sweep() -> Result<String, String> {
    let r = sweep(Property::Theorem2, 4, 4)?;
    Ok(format!("{} decodable codes, {} oracle fallbacks", r.instances, r.stats["oracle_fallbacks"]))
}

fn shor_instance() -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_symcode"))
        .args(["prefixify", "--builtin", "shor", "--verify"])
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    if !out.status.success() {
        return Err(format!("exit {:?}: {stderr}", out.status.code()));
    }
    let code = Code::parse(&String::from_utf8_lossy(&out.stdout)).map_err(|e| e.to_string())?;
    if !code.is_prefix_free() {
        return Err(format!("output not prefix-free: {code}"));
    }
    let expected: Profile = Profile::from_entries(SHOR_PROFILE.iter().map(|&(k, v)| (k, Natural::from(v))));
    if code.power_profile() != expected {
        return Err(format!("profile {} differs from {expected}", code.power_profile()));
    }
    let shor = Code::builtin("shor").map_err(|e| e.to_string())?;
    if shor.power_profile() != expected {
        return Err("built-in Shor code disagrees with the frozen profile".into());
    }
    Ok(format!("output cardinality {} (input {})", code.len(), shor.len()))
}

fn decodability_agreement() -> Result<String, String> {
    let r = sweep(Property::SpVsBruteforce, 3, 4)?;
    let mut witnesses = 0;
    for code in enumerate_codes(3, 4, CodeFilter::All) {
        let Some(w) = symcode::sardinas_patterson(&code).witness else { continue };
        let join = |parts: &[Word]| parts.iter().flat_map(|p| p.symbols().to_vec()).collect::<Vec<_>>();
        let known = |parts: &[Word]| parts.iter().all(|p| code.contains(p));
        if join(&w.left) != w.word.symbols()
            || join(&w.right) != w.word.symbols()
            || w.left == w.right
            || !known(&w.left)
            || !known(&w.right)
        {
            return Err(format!("witness {} for {code} does not re-validate", w.word));
        }
        witnesses += 1;
    }
    Ok(format!("{} codes, {witnesses} witnesses re-validated", r.instances))
}

fn kraft_converse() -> Result<String, String> {
    let r = sweep(Property::KraftConverse, 5, 5)?;
    Ok(format!("{} realizable length multisets", r.stats["realized"]))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "code/tree round trip", limit: Duration::from_secs(10), run: code_tree_round_trip },
        Criterion { name: "tree/code converse", limit: Duration::from_secs(30), run: tree_code_converse },
        Criterion { name: "ternary and Kraft bounds", limit: Duration::from_secs(60), run: ternary_bound },
        Criterion { name: "exact subset sum", limit: Duration::from_secs(10), run: exact_subset_sum },
        Criterion {
            name: "prefixify keeps the profile",
            limit: Duration::from_secs(60),
            run: prefixify_sweep,
        },
        Criterion { name: "Shor instance", limit: Duration::from_secs(60), run: shor_instance },
        Criterion {
            name: "decodability oracle agreement",
            limit: Duration::from_secs(60),
            run: decodability_agreement,
        },
        Criterion { name: "Kraft converse", limit: Duration::from_secs(10), run: kraft_converse },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed > c.limit {
                Err(format!("{detail}; took {elapsed:.2?}, limit {:?}", c.limit))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => {
                println!("PASS {} {}: {detail} ({elapsed:.2?}, limit {:?})", i + 1, c.name, c.limit)
            }
            Err(why) => {
                failed += 1;
                println!("FAIL {} {}: {why}", i + 1, c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
