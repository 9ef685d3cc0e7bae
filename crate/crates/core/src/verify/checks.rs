use std::sync::Arc;

use super::{timed, CheckResult, CorpusEntry, Subject, SuiteConfig};
use crate::abelian::{gamma_whitehead, z_tensor_power, AbelianGroup};
use crate::actions::{check_compatibility, conjugation_pair};
use crate::coset_enum::enumerate;
use crate::error::{Error, Result};
use crate::group::{FinGroup, Subgroup};
use crate::homology::{h2_from_tensor_square, h2_via_cocycles};
use crate::permgrp::PermGroup;
use crate::presentation::parse_presentation;
use crate::tensor::{
    build_nu, quotient_abelian_invariants, tensor_power, tensor_with_subgroup, BuildLimits, TensorGroup,
    TensorPowerTower, TowerLevel,
};

fn level(s: &Subject, n: usize) -> Result<&TowerLevel> {
    let tower = s.tower.as_ref().map_err(Clone::clone)?;
    tower_level(tower, n)
}

fn tower_level(tower: &TensorPowerTower, n: usize) -> Result<&TowerLevel> {
    match tower.level(n) {
        Some(l) => Ok(l),
        None => Err(tower.stopped().cloned().unwrap_or_else(|| Error::Invalid(format!("level {n} not requested")))),
    }
}

fn square(s: &Subject) -> Result<&TensorGroup> {
    level(s, 2)?.tensor.as_ref().ok_or_else(|| Error::Internal("level two without a tensor".into()))
}

fn sorted(elements: &[u32]) -> Vec<u32> {
    let mut v = elements.to_vec();
    v.sort_unstable();
    v
}

fn show(g: &FinGroup, x: u32) -> String {
    g.word(x).display_with(g.names()).to_string()
}

pub(super) fn identity_checks(s: &Subject, config: &SuiteConfig) -> Vec<CheckResult> {
    let name = s.name.as_str();
    let mut out = Vec::new();
    out.extend(nu_order_checks(s, config));
    out.push(timed(CheckResult::new("nu.kernel_factorization", name), |r| kernel_factorization(s, r)));
    out.push(timed(CheckResult::new("h2.agreement", name), |r| h2_agreement(s, r)));
    out.push(timed(CheckResult::new("tensor.commutator_relation", name), |r| {
        let report = square(s)?.commutator_check(false)?;
        let mut r = r.expect(report.passed, || format!("{:?}", report.witness));
        r.record("tuples", report.tuples_checked);
        Ok(r)
    }));
    for n in 1..=config.max_power {
        out.push(timed(CheckResult::new("finiteness", name).param("n", n as u64), |r| finiteness(s, n, r)));
    }
    for n in 2..=config.max_power {
        out.push(timed(CheckResult::new("lambda.image", name).param("n", n as u64), |r| lambda_image(s, n, r)));
        out.push(timed(CheckResult::new("lambda.kernel_central", name).param("n", n as u64), |r| {
            let l = level(s, n)?;
            let t = l.tensor.as_ref().expect("levels above one carry a tensor");
            let kernel = t.lambda_prime_kernel();
            let mut r = r.expect(t.is_central(&kernel), || "kernel element fails to commute".into());
            r.record("kernel_order", kernel.order());
            Ok(r)
        }));
        if s.g.is_abelian() {
            out.push(timed(CheckResult::new("abelian.power", name).param("n", n as u64), |r| abelian_power(s, n, r)));
        }
    }
    for n in 1..=config.max_power.min(3) {
        out.push(timed(CheckResult::new("gamma.divisibility", name).param("n", n as u64), |r| {
            gamma_divisibility(&s.g, n, &config.limits, r)
        }));
    }
    if s.g.lower_central_series().last().map(Subgroup::order) == Some(1) {
        out.push(timed(CheckResult::new("commutator_power", name), |r| commutator_power(&s.g, r)));
    }
    out
}

/// `|ν(G)| = |G|²·|G⊗G|` and `|ν(G)'| = |G'|³·|ker λ₂|`, from an
/// enumeration of ν(G) over the trivial subgroup.
fn nu_order_checks(s: &Subject, config: &SuiteConfig) -> Vec<CheckResult> {
    let name = s.name.as_str();
    let order_base = CheckResult::new("nu.order", name);
    let derived_base = CheckResult::new("nu.derived_order", name);
    let mut derived = None;
    let order = timed(order_base, |mut r| {
        let t = square(s)?;
        if s.g.order() > config.small_order {
            return Err(Error::SizeLimit {
                what: "full ν enumeration".into(),
                size: s.g.order() as u64,
                limit: config.small_order as u64,
            });
        }
        let table = enumerate(t.eta_presentation(), &[], config.limits.enumeration)?;
        let nu = table.coset_count() as u64;
        let g = s.g.order() as u64;
        let expected = g * g * t.order() as u64;
        r.record("nu_order", nu);
        r.record("tensor_order", t.order());
        let r = r.expect(nu == expected, || format!("|ν(G)| = {nu}, |G|²·|G⊗G| = {expected}"));

        derived = Some(timed(derived_base.clone(), |mut d| {
            let perm = PermGroup::from_coset_table(&table)?.with_known_order(nu);
            let nu_derived = perm.derived_subgroup().order();
            let g_derived = s.g.gamma(2).order() as u64;
            let kernel = t.lambda_kernel().order() as u64;
            let expected = g_derived.pow(3) * kernel;
            d.record("nu_derived_order", nu_derived);
            d.record("kernel_order", kernel);
            Ok(d.expect(nu_derived == expected, || format!("|ν(G)'| = {nu_derived}, |G'|³·|ker λ₂| = {expected}")))
        }));
        Ok(r)
    });
    let derived = derived.unwrap_or_else(|| {
        let mut d = derived_base;
        d.verdict = order.verdict;
        d.witness = order.witness.clone();
        d
    });
    vec![order, derived]
}

fn cocycle_h2(s: &Subject) -> Result<AbelianGroup> {
    s.h2.get_or_init(|| h2_via_cocycles(&s.g)).clone()
}

/// `|ker λ₂| = |Δ(G)|·|H₂(G)|` with `H₂` from the bar complex.
fn kernel_factorization(s: &Subject, mut r: CheckResult) -> Result<CheckResult> {
    let t = square(s)?;
    let kernel = t.lambda_kernel().order() as u64;
    let delta = t.delta_subgroup()?.order() as u64;
    let h2 = cocycle_h2(s)?;
    let h2_order = h2.order().ok_or_else(|| Error::Internal("infinite multiplier".into()))?;
    r.record("kernel_order", kernel);
    r.record("delta_order", delta);
    r.record("h2", &h2);
    Ok(r.expect(kernel == delta * h2_order, || format!("{kernel} != {delta}·{h2_order}")))
}

fn h2_agreement(s: &Subject, mut r: CheckResult) -> Result<CheckResult> {
    let wedge = h2_from_tensor_square(square(s)?)?;
    let cocycles = cocycle_h2(s)?;
    r.record("via_wedge", &wedge);
    r.record("via_cocycles", &cocycles);
    Ok(r.expect(wedge == cocycles, || format!("wedge {wedge}, cocycles {cocycles}")))
}

fn finiteness(s: &Subject, n: usize, mut r: CheckResult) -> Result<CheckResult> {
    let l = level(s, n)?;
    r.record("order", l.order());
    Ok(r)
}

/// Image of `λ_n` equals `γ_n(G)` element for element.
fn lambda_image(s: &Subject, n: usize, mut r: CheckResult) -> Result<CheckResult> {
    let l = level(s, n)?;
    let g = &s.g;
    let image = crate::tensor::subgroup_of(g, l.lambda.iter().copied());
    let gamma = g.gamma(n);
    r.record("image_order", image.order());
    r.record("gamma_order", gamma.order());
    let (a, b) = (sorted(image.elements()), sorted(gamma.elements()));
    Ok(r.expect(a == b, || {
        let odd = a.iter().find(|x| !gamma.contains(**x)).or_else(|| b.iter().find(|x| !image.contains(**x)));
        format!("differs at {}", odd.map_or_else(String::new, |&x| show(g, x)))
    }))
}

/// `G^⊗n` against the tensor power of `Z`-modules.
fn abelian_power(s: &Subject, n: usize, mut r: CheckResult) -> Result<CheckResult> {
    let l = level(s, n)?;
    let ab = s.g.perm_group().abelian_invariants()?;
    let oracle = z_tensor_power(&ab, n)?;
    let m = &l.power;
    if !m.is_abelian() {
        return Ok(r.expect(false, || "tensor power is not abelian".into()));
    }
    let got = quotient_abelian_invariants(m, &m.whole(), &Subgroup::trivial(m.order()))?;
    r.record("tensor_power", &got);
    r.record("oracle", &oracle);
    Ok(r.expect(got == oracle, || format!("{got} != {oracle}")))
}

/// With `K⊗ = ker(G ⊗ γ_n → γ_{n+1})` and `K∧` the kernel on the exterior
/// product, `K⊗ → K∧` is onto and `|K⊗|/|K∧|` divides `|Γ(γ_n/γ_{n+1})|`.
fn gamma_divisibility(g: &Arc<FinGroup>, n: usize, limits: &BuildLimits, mut r: CheckResult) -> Result<CheckResult> {
    let gn = g.gamma(n);
    let gn1 = g.gamma(n + 1);
    let gamma = gamma_whitehead(&quotient_abelian_invariants(g, &gn, &gn1)?)?;
    let gamma_order = gamma.order().ok_or_else(|| Error::Internal("infinite Γ".into()))?;
    r.record("gamma", &gamma);
    if gn.order() == 1 {
        r.record("ratio", 1);
        return Ok(r);
    }
    let (t, embed) = tensor_with_subgroup(g.clone(), &gn, limits)?;
    let tg = t.tensor();
    let pairs: Vec<(u32, u32)> = (0..embed.len() as u32).map(|h| (embed[h as usize], h)).collect();
    let exterior = t.exterior(&pairs)?;
    let lambda = t.lambda_values();

    // cosets of the fibre subgroup, and λ on them
    let mut coset = vec![u32::MAX; tg.order()];
    let mut coset_lambda: Vec<u32> = Vec::new();
    for x in 0..tg.order() as u32 {
        if coset[x as usize] != u32::MAX {
            continue;
        }
        let id = coset_lambda.len() as u32;
        coset_lambda.push(lambda[x as usize]);
        for &f in exterior.fibre.elements() {
            let y = tg.mul(f, x);
            if lambda[y as usize] != lambda[x as usize] {
                return Ok(r.expect(false, || "λ is not constant on a fibre coset".into()));
            }
            coset[y as usize] = id;
        }
    }
    let k_tensor = t.lambda_kernel();
    let k_wedge: Vec<u32> = (0..coset_lambda.len() as u32).filter(|&c| coset_lambda[c as usize] == 0).collect();
    let mut hit = vec![false; coset_lambda.len()];
    for &x in k_tensor.elements() {
        hit[coset[x as usize] as usize] = true;
    }
    let onto = k_wedge.iter().all(|&c| hit[c as usize]);
    let (kt, kw) = (k_tensor.order() as u64, k_wedge.len() as u64);
    r.record("k_tensor", kt);
    r.record("k_wedge", kw);
    let divides = kt % kw == 0 && gamma_order % (kt / kw) == 0;
    if divides {
        r.record("ratio", kt / kw);
    }
    Ok(r.expect(onto && divides, || format!("onto = {onto}, |K⊗| = {kt}, |K∧| = {kw}, |Γ| = {gamma_order}")))
}

/// `[g₁, …, g_{k-1}^m] ≡ [g₁, …, g_{k-1}]^m (mod γ_k)` over generator tuples
/// and `1 ≤ m ≤ exp(G^ab)`, for `2 ≤ k ≤ class + 1`.
fn commutator_power(g: &FinGroup, mut r: CheckResult) -> Result<CheckResult> {
    let class = g.lower_central_series().len() - 1;
    let exponent = g.perm_group().abelian_invariants()?.exponent().unwrap_or(1).max(1);
    let gens = g.generators();
    let mut checked = 0u64;
    for k in 2..=class + 1 {
        let gamma = g.gamma(k);
        let len = k - 1;
        let mut tuple = vec![0usize; len];
        loop {
            let xs: Vec<u32> = tuple.iter().map(|&i| gens[i]).collect();
            let base = g.comm_seq(&xs);
            for m in 1..=exponent as i64 {
                let mut ys = xs.clone();
                *ys.last_mut().expect("nonempty") = g.pow(xs[len - 1], m);
                let lhs = g.comm_seq(&ys);
                let rhs = g.pow(base, m);
                checked += 1;
                if !gamma.contains(g.mul(lhs, g.inv(rhs))) {
                    let names: Vec<String> = xs.iter().map(|&x| show(g, x)).collect();
                    return Ok(r.expect(false, || format!("k = {k}, m = {m}, tuple = ({})", names.join(", "))));
                }
            }
            let mut i = 0;
            while i < len {
                tuple[i] += 1;
                if tuple[i] < gens.len() {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
        }
    }
    r.record("instances", checked);
    r.record("class", class);
    Ok(r)
}

/// With `N = Z_n(H)` and `G = H/N`, `|γ_{n+1}(H)|` divides `|G^⊗(n+1)|`.
pub fn schur_baer_divisibility(entry: &CorpusEntry, n: usize, limits: &BuildLimits) -> CheckResult {
    timed(CheckResult::new("schur_baer", &entry.name).param("n", n as u64), |mut r| {
        let h = FinGroup::from_presentation(&entry.presentation, limits.enumeration)?;
        let centre = h.upper_central(n);
        let (g, _) = h.quotient(&centre, limits.enumeration)?;
        let tower = tensor_power(Arc::new(g), n + 1, limits)?;
        let top = tower_level(&tower, n + 1)?.order() as u64;
        let gamma = h.gamma(n + 1).order() as u64;
        r.record("quotient_order", tower.group().order());
        r.record("tensor_power_order", top);
        r.record("gamma_order", gamma);
        Ok(r.expect(top % gamma == 0, || format!("{gamma} does not divide {top}")))
    })
}

/// Builds `G^⊗n` and records its order.
pub fn finiteness_theorem_check(entry: &CorpusEntry, n: usize, limits: &BuildLimits) -> CheckResult {
    timed(CheckResult::new("finiteness", &entry.name).param("n", n as u64), |mut r| {
        let g = Arc::new(FinGroup::from_presentation(&entry.presentation, limits.enumeration)?);
        let tower = tensor_power(g, n, limits)?;
        r.record("order", tower_level(&tower, n)?.order());
        Ok(r)
    })
}

fn d4() -> Arc<FinGroup> {
    let p = parse_presentation("<a,b | a^4, b^2, (a b)^2>").expect("builtin");
    Arc::new(FinGroup::from_presentation(&p, Default::default()).expect("D4 enumerates"))
}

/// The conjugation pair on D4 with one automorphism image moved. Passes
/// when the compatibility sweep finds a failing triple.
pub fn perturbed_action_control(limits: &BuildLimits) -> CheckResult {
    timed(CheckResult::new("control.perturbed_action", "D4"), |mut r| {
        let g = d4();
        let pair = conjugation_pair(g.clone());
        for gen in 0..g.generator_count() {
            for a in 1..g.order() as u32 {
                for b in a + 1..g.order() as u32 {
                    let report = check_compatibility(&pair.with_perturbed_action(gen, a, b), limits.compat_budget)?;
                    if let Some(w) = report.witness {
                        r.record("perturbation", format!("generator {gen}, swap {} and {}", show(&g, a), show(&g, b)));
                        r.record("witness", format!("{} side: g = {}, h = {}, g1 = {}", w.side, w.g, w.h, w.g1));
                        return Ok(r);
                    }
                }
            }
        }
        Ok(r.expect(false, || "no perturbation broke compatibility".into()))
    })
}

/// The commutator relation on S4 ⊗ S4 with the first argument conjugated.
/// Passes when the perturbed relation fails.
pub fn perturbed_commutator_control(limits: &BuildLimits) -> CheckResult {
    timed(CheckResult::new("control.perturbed_commutator", "S4"), |mut r| {
        let p = parse_presentation("<a,b | a^4, b^2, (a b)^3>").expect("builtin");
        let g = Arc::new(FinGroup::from_presentation(&p, limits.enumeration)?);
        let report = build_nu(g, limits)?.commutator_check(true)?;
        match report.witness {
            Some(w) if !report.passed => {
                r.record("witness", w.join(", "));
                Ok(r)
            }
            _ => Ok(r.expect(false, || "perturbed relation still holds".into())),
        }
    })
}
