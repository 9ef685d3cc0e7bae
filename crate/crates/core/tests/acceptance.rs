//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use tensoria_core::coset_enum::EnumLimits;
use tensoria_core::group::FinGroup;
use tensoria_core::tensor::{build_nu, tensor_power, BuildLimits};
use tensoria_core::verify::{run_suite, write_json, CheckResult, Corpus, Suite, SuiteConfig, Verdict};

#[derive(Default)]
struct Outcome {
    checked: usize,
    skipped: Vec<String>,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn pass(&mut self) {
        self.checked += 1;
    }

    fn fail(&mut self, what: String) {
        self.checked += 1;
        self.failures.push(what);
    }

    fn skip(&mut self, what: String) {
        self.skipped.push(what);
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.pass()
        } else {
            self.fail(what())
        }
    }

    /// Folds suite rows: skips stay skips, fails carry their witness.
    fn rows<'a>(&mut self, rows: impl IntoIterator<Item = &'a CheckResult>) {
        for r in rows {
            let id = format!("{} {} {:?}", r.check, r.group, r.params);
            match r.verdict {
                Verdict::Pass => self.pass(),
                Verdict::Fail => self.fail(format!("{id}: {}", r.witness.as_deref().unwrap_or(""))),
                Verdict::Skipped => self.skip(id),
            }
        }
    }
}

fn report(n: usize, title: &str, o: &Outcome) -> bool {
    let status = if !o.failures.is_empty() || o.checked == 0 {
        "FAIL"
    } else if !o.skipped.is_empty() {
        "PARTIAL"
    } else {
        "PASS"
    };
    let mut line = format!("criterion {n:>2} {status:<7} {title}: {} checked", o.checked);
    if !o.skipped.is_empty() {
        line.push_str(&format!(", {} skipped(limit) [{}]", o.skipped.len(), o.skipped.join("; ")));
    }
    for note in &o.notes {
        line.push_str(&format!("; {note}"));
    }
    println!("{line}");
    for f in &o.failures {
        println!("    fail: {f}");
    }
    status != "FAIL"
}

/// Invariants of a finite abelian group, written down by hand.
fn abelian_invariants(name: &str) -> Option<Vec<u64>> {
    match name {
        "V4" => Some(vec![2, 2]),
        "Z2^3" => Some(vec![2, 2, 2]),
        _ => name.strip_prefix('C').and_then(|n| n.parse().ok()).map(|n| vec![n]),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `|A^⊗n|` for `A = ⊕ Z_{a_i}`, from `Z_a ⊗ Z_b = Z_gcd(a,b)`.
fn z_power_order(inv: &[u64], n: usize) -> u64 {
    let mut factors = inv.to_vec();
    for _ in 1..n {
        factors = factors.iter().flat_map(|&a| inv.iter().map(move |&b| gcd(a, b))).collect();
    }
    factors.iter().product()
}

fn main() {
    let corpus = Corpus::builtin();
    let config = SuiteConfig::default();
    let small: Vec<&str> =
        corpus.entries.iter().filter(|e| e.expected_order.is_some_and(|o| o <= 16)).map(|e| e.name.as_str()).collect();

    let start = Instant::now();
    let results = run_suite(Suite::All, &corpus, &config);
    let first_run = start.elapsed();
    let rerun = run_suite(Suite::All, &corpus, &config);
    let select = |check: &str, only_small: bool| -> Vec<&CheckResult> {
        results.iter().filter(|r| r.check == check && (!only_small || small.contains(&r.group.as_str()))).collect()
    };
    let elapsed_ms = |rows: &[&CheckResult]| rows.iter().map(|r| r.elapsed_ms).sum::<u64>();
    let mut ok = true;

    let mut o = Outcome::default();
    let rows = select("nu.order", true);
    o.rows(rows.iter().copied());
    let ms = elapsed_ms(&rows);
    o.require(ms < 60_000, || format!("took {ms} ms"));
    o.notes.push(format!("{ms} ms"));
    ok &= report(1, "|ν(G)| = |G|²·|G⊗G| for |G| ≤ 16", &o);

    let mut o = Outcome::default();
    o.rows(select("nu.kernel_factorization", true));
    ok &= report(2, "|ker λ₂| = |Δ(G)|·|H₂(G)| for |G| ≤ 16", &o);

    let mut o = Outcome::default();
    for e in &corpus.entries {
        let Some(inv) = abelian_invariants(&e.name) else { continue };
        for n in 2..=3u64 {
            let row = results.iter().find(|r| r.check == "finiteness" && r.group == e.name && r.params.get("n") == Some(&n));
            match row {
                Some(r) if r.verdict == Verdict::Pass => {
                    let got: u64 = r.data["order"].parse().unwrap();
                    let want = z_power_order(&inv, n as usize);
                    o.require(got == want, || format!("{} n = {n}: {got} != {want}", e.name));
                }
                Some(r) if r.verdict == Verdict::Skipped => o.skip(format!("{} n = {n}", e.name)),
                _ => o.fail(format!("{} n = {n}: no order", e.name)),
            }
        }
    }
    o.rows(select("abelian.power", false));
    ok &= report(3, "abelian tensor powers match Z-module tensor powers, n = 2, 3", &o);

    let mut o = Outcome::default();
    o.rows(select("lambda.image", false));
    let limits = config.limits;
    let fourth: Vec<(String, Result<bool, String>)> = corpus
        .entries
        .par_iter()
        .map(|e| {
            let g = Arc::new(FinGroup::from_presentation(&e.presentation, EnumLimits::default()).unwrap());
            let tower = tensor_power(g.clone(), 4, &limits).unwrap();
            let outcome = match tower.level(4) {
                Some(l) => {
                    let mut image: Vec<u32> = l.lambda.clone();
                    image.sort_unstable();
                    image.dedup();
                    let mut gamma = g.gamma(4).elements().to_vec();
                    gamma.sort_unstable();
                    Ok(image == gamma)
                }
                None => Err(tower.stopped().map(|e| e.to_string()).unwrap_or_default()),
            };
            (e.name.clone(), outcome)
        })
        .collect();
    for (name, outcome) in fourth {
        match outcome {
            Ok(same) => o.require(same, || format!("{name} n = 4: image of λ₄ differs from γ₄")),
            Err(_) => o.skip(format!("{name} n = 4")),
        }
    }
    ok &= report(4, "image λ_n = γ_n(G), n ≤ 4", &o);

    let mut o = Outcome::default();
    let rows = select("h2.agreement", true);
    o.rows(rows.iter().copied());
    // the cocycle route is computed once per group and charged to the first check using it
    let ms = elapsed_ms(&rows) + elapsed_ms(&select("nu.kernel_factorization", true));
    o.require(ms < 120_000, || format!("took {ms} ms"));
    o.notes.push(format!("{ms} ms"));
    ok &= report(5, "H₂ by exterior square equals H₂ by cocycles for |G| ≤ 16", &o);

    let mut o = Outcome::default();
    o.rows(select("gamma.divisibility", true));
    ok &= report(6, "|K⊗|/|K∧| divides |Γ(γ_n/γ_{n+1})|, n ≤ 3", &o);

    let mut o = Outcome::default();
    o.rows(select("finiteness", false));
    let v4 = results.iter().find(|r| r.check == "finiteness" && r.group == "V4" && r.params.get("n") == Some(&3));
    let v4_order = v4.and_then(|r| r.data.get("order")).cloned().unwrap_or_default();
    o.require(v4_order == z_power_order(&[2, 2], 3).to_string(), || format!("V4 n = 3 has order {v4_order}"));
    o.notes.push(format!("|V4^⊗3| = {v4_order}"));
    ok &= report(7, "every G^⊗n, n ≤ 3, is finite with explicit order", &o);

    let mut o = Outcome::default();
    let schur: Vec<&CheckResult> = select("schur_baer", false);
    for h in ["D4", "Q8", "D6", "Heis27"] {
        for n in 1..=2u64 {
            match schur.iter().find(|r| r.group == h && r.params.get("n") == Some(&n)) {
                Some(r) => o.rows([*r]),
                None => o.fail(format!("{h} n = {n}: missing")),
            }
        }
    }
    ok &= report(8, "|γ_{n+1}(H)| divides |(H/Z_n(H))^⊗(n+1)|, n = 1, 2", &o);

    let mut o = Outcome::default();
    for check in ["control.perturbed_action", "control.perturbed_commutator"] {
        match results.iter().find(|r| r.check == check) {
            Some(r) => {
                o.rows([r]);
                let w = r.data.get("witness").cloned().unwrap_or_default();
                o.require(!w.is_empty(), || format!("{check}: no witness"));
                o.notes.push(format!("{check}: {w}"));
            }
            None => o.fail(format!("{check}: missing")),
        }
    }
    let s4 = Corpus::builtin().get("S4").unwrap().presentation.clone();
    let s4 = Arc::new(FinGroup::from_presentation(&s4, EnumLimits::default()).unwrap());
    let perturbed = build_nu(s4, &BuildLimits::default()).unwrap().commutator_check(true).unwrap();
    o.require(!perturbed.passed && perturbed.witness.is_some(), || "perturbed S4 relation holds".into());
    ok &= report(9, "perturbed action and perturbed commutator relation are rejected", &o);

    let mut o = Outcome::default();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_json(&results, &mut a).unwrap();
    write_json(&rerun, &mut b).unwrap();
    o.require(a == b, || "JSON differs between runs".into());
    o.notes.push(format!("{} bytes, {} rows", a.len(), results.len()));
    ok &= report(10, "two full runs give byte-identical JSON", &o);

    let mut verdicts: BTreeMap<Verdict, usize> = BTreeMap::new();
    for r in &results {
        *verdicts.entry(r.verdict).or_default() += 1;
    }
    println!("suite: {verdicts:?} in {:.1} s per run", first_run.as_secs_f64());
    if !ok {
        std::process::exit(1);
    }
}
