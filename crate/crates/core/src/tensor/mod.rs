//! Non-abelian tensor products realized inside the group η(L, R).
//!
//! η(L, R) is generated by copies of both groups subject to their relators
//! and to `[x, y]^z = [x^z, y^z]` for `x` a left generator, `y` a right
//! generator and `z` any generator, all taken with inverses. The subgroup
//! `T` generated by the commutators `[l, r]` is isomorphic to `L ⊗ R` via
//! `l ⊗ r ↦ [l, r]`, and meets the copy of `L` trivially. So `T` acts
//! semiregularly on the cosets of that copy, and its elements are the
//! points of one orbit. Only this coset action is enumerated.

mod tower;

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use tower::{tensor_power, TensorPowerTower, TowerLevel};

use crate::abelian::{z_tensor, AbelianGroup};
use crate::actions::{
    check_compatibility, check_compatibility_on_generators, conjugation_pair, subgroup_conjugation_pair,
    ActionPair, CompatReport, PairKind, DEFAULT_COMPAT_BUDGET,
};
use crate::coset_enum::{enumerate, CosetTable, EnumLimits};
use crate::error::{Error, Result};
use crate::group::{FinGroup, Subgroup};
use crate::permgrp::{regular_abelian_invariants, GroupHom, PermGroup};
use crate::perm::Perm;
use crate::presentation::{Presentation, Word};

const NOT_IN_T: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BuildLimits {
    pub enumeration: EnumLimits,
    pub compat_budget: u64,
}

impl Default for BuildLimits {
    fn default() -> Self {
        BuildLimits { enumeration: EnumLimits::default(), compat_budget: DEFAULT_COMPAT_BUDGET }
    }
}

impl BuildLimits {
    pub fn with_max_cosets(max_cosets: usize) -> BuildLimits {
        BuildLimits { enumeration: EnumLimits::with_max_cosets(max_cosets), ..BuildLimits::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `L ⊗ R` inside η(L, R).
#[derive(Debug)]
pub struct TensorGroup {
    pair: ActionPair,
    eta: Presentation,
    cosets: CosetTable,
    tensor: Arc<FinGroup>,
    labels: Vec<(u32, u32)>,
    point_of: Vec<u32>,
    elem_of: Vec<u32>,
    lambda: Vec<u32>,
    lambda_prime: Vec<u32>,
    compat: CompatReport,
    predicted_bound: u64,
}

/// Letters of the η word for `[l, r]`.
fn label_letters(pair: &ActionPair, l: u32, r: u32) -> Vec<u32> {
    let shift = 2 * pair.left().generator_count() as u32;
    let wl = pair.left().letters(l);
    let wr: Vec<u32> = pair.right().letters(r).into_iter().map(|x| x + shift).collect();
    let mut out = Vec::with_capacity(2 * (wl.len() + wr.len()));
    out.extend(wl.iter().rev().map(|x| x ^ 1));
    out.extend(wr.iter().rev().map(|x| x ^ 1));
    out.extend(&wl);
    out.extend(&wr);
    out
}

/// Element of a group for a letter of its alphabet.
fn letter_element(g: &FinGroup, letter: u32) -> u32 {
    let x = g.generator((letter >> 1) as usize);
    if letter & 1 == 0 {
        x
    } else {
        g.inv(x)
    }
}

/// `(l, r)` conjugated by the η letter `z`.
fn conjugate_label(pair: &ActionPair, (l, r): (u32, u32), z: u32) -> (u32, u32) {
    let (lg, rg) = (pair.left(), pair.right());
    let shift = 2 * lg.generator_count() as u32;
    if z < shift {
        let ze = letter_element(lg, z);
        (lg.conj(l, ze), pair.act_on_right(r, ze))
    } else {
        let ze = letter_element(rg, z - shift);
        (pair.act_on_left(l, ze), rg.conj(r, ze))
    }
}

/// Presentation of η(L, R).
pub fn eta_presentation(pair: &ActionPair) -> Result<Presentation> {
    let (lg, rg) = (pair.left(), pair.right());
    let nl = lg.generator_count();
    let shift = 2 * nl as u32;
    let mut names: Vec<String> = lg.names().to_vec();
    for n in rg.names() {
        let suffix = if pair.kind() == PairKind::Conjugation { "_phi" } else { "_r" };
        let mut name = if names.contains(n) || pair.kind() == PairKind::Conjugation { format!("{n}{suffix}") } else { n.clone() };
        while names.contains(&name) {
            name.push('_');
        }
        names.push(name);
    }
    let mut relators: Vec<Word> = lg.presentation().relators().to_vec();
    relators.extend(rg.presentation().relators().iter().map(|w| w.map_generators(|g| g + nl as u32)));
    let total_letters = 2 * (nl + rg.generator_count()) as u32;
    let mut extra: Vec<Vec<u32>> = Vec::new();
    for x in 0..shift {
        for y in 0..2 * rg.generator_count() as u32 {
            let (xe, ye) = (letter_element(lg, x), letter_element(rg, y));
            let comm = [x ^ 1, (y + shift) ^ 1, x, y + shift];
            for z in 0..total_letters {
                let (xz, yz) = conjugate_label(pair, (xe, ye), z);
                let mut letters = vec![z ^ 1];
                letters.extend(comm);
                letters.push(z);
                let rhs = label_letters(pair, xz, yz);
                letters.extend(rhs.iter().rev().map(|l| l ^ 1));
                extra.push(letters);
            }
        }
    }
    for letters in extra {
        let w = Word::from_letters(letters);
        if !w.is_identity() {
            relators.push(w);
        }
    }
    relators.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    relators.dedup();
    Presentation::new(names, relators)
}

/// Heuristic size of `L ⊗ R`: `|L^ab ⊗ R^ab| · |L'| · |R'|`.
pub fn predicted_tensor_bound(pair: &ActionPair) -> Result<u64> {
    let (lg, rg) = (pair.left(), pair.right());
    let lab = lg.perm_group().abelian_invariants()?;
    let rab = rg.perm_group().abelian_invariants()?;
    let t = z_tensor(&lab, &rab).order().unwrap_or(u64::MAX);
    let ld = (lg.order() as u64) / lab.order().unwrap_or(1);
    let rd = (rg.order() as u64) / rab.order().unwrap_or(1);
    Ok(t.saturating_mul(ld).saturating_mul(rd))
}

/// Orbit of point 0 under words, grown one generator at a time.
struct PointClosure<'a> {
    table: &'a CosetTable,
    gens: Vec<Vec<u32>>,
    points: Vec<u32>,
    mask: Vec<bool>,
}

impl<'a> PointClosure<'a> {
    fn new(table: &'a CosetTable) -> Self {
        let mut mask = vec![false; table.coset_count()];
        mask[0] = true;
        PointClosure { table, gens: Vec::new(), points: vec![0], mask }
    }

    fn apply(&self, p: u32, letters: &[u32]) -> u32 {
        self.table.apply_letters(p as usize, letters.iter().copied()) as u32
    }

    fn push(&mut self, q: u32) {
        if !self.mask[q as usize] {
            self.mask[q as usize] = true;
            self.points.push(q);
        }
    }

    fn add(&mut self, letters: Vec<u32>) {
        let start = self.points.len();
        for i in 0..start {
            let q = self.apply(self.points[i], &letters);
            self.push(q);
        }
        self.gens.push(letters);
        let mut k = start;
        while k < self.points.len() {
            for j in 0..self.gens.len() {
                let q = self.apply(self.points[k], &self.gens[j]);
                self.push(q);
            }
            k += 1;
        }
    }
}

/// Checks the pair and builds `L ⊗ R`.
pub fn build_eta(pair: ActionPair, limits: &BuildLimits) -> Result<TensorGroup> {
    let compat = match check_compatibility(&pair, limits.compat_budget) {
        Ok(r) => r,
        Err(Error::Budget { .. }) => check_compatibility_on_generators(&pair),
        Err(e) => return Err(e),
    };
    if let Some(w) = &compat.witness {
        return Err(Error::Incompatible(format!(
            "{} identity fails at g = {}, h = {}, g1 = {}",
            w.side, w.g, w.h, w.g1
        )));
    }
    let predicted_bound = predicted_tensor_bound(&pair)?;
    let predicted_cosets = predicted_bound.saturating_mul(pair.right().order() as u64);
    if predicted_cosets > limits.enumeration.max_cosets as u64 {
        return Err(Error::SizeLimit {
            what: "predicted coset count".into(),
            size: predicted_cosets,
            limit: limits.enumeration.max_cosets as u64,
        });
    }
    let eta = eta_presentation(&pair)?;
    let nl = pair.left().generator_count();
    let left_copy: Vec<Word> = (0..nl).map(Word::generator).collect();
    let cosets = enumerate(&eta, &left_copy, limits.enumeration)?;
    build_from_cosets(pair, eta, cosets, compat, predicted_bound)
}

fn build_from_cosets(
    pair: ActionPair,
    eta: Presentation,
    cosets: CosetTable,
    compat: CompatReport,
    predicted_bound: u64,
) -> Result<TensorGroup> {
    let (lg, rg) = (pair.left().clone(), pair.right().clone());
    let total_letters = 2 * eta.generator_count() as u32;

    // normal closure of the generator commutators, tracked by labels
    let mut closure = PointClosure::new(&cosets);
    let mut labels: Vec<(u32, u32)> = Vec::new();
    let mut queue: VecDeque<(u32, u32)> = VecDeque::new();
    for &x in &lg.generators() {
        for &y in &rg.generators() {
            queue.push_back((x, y));
        }
    }
    while let Some(label) = queue.pop_front() {
        let letters = label_letters(&pair, label.0, label.1);
        let q = closure.apply(0, &letters);
        if closure.mask[q as usize] {
            continue;
        }
        labels.push(label);
        closure.add(letters);
        for z in (0..total_letters).step_by(2) {
            queue.push_back(conjugate_label(&pair, label, z));
        }
    }
    let order = closure.points.len();
    if cosets.coset_count() != order * rg.order() {
        return Err(Error::Internal(format!(
            "index of the left copy is {}, expected |T|·|R| = {}·{}",
            cosets.coset_count(),
            order,
            rg.order()
        )));
    }

    // breadth-first numbering of T in its own generators
    let gens: Vec<Vec<u32>> = closure.gens.clone();
    let inv_gens: Vec<Vec<u32>> = gens.iter().map(|w| w.iter().rev().map(|l| l ^ 1).collect()).collect();
    let cols = 2 * gens.len();
    let mut elem_of = vec![NOT_IN_T; cosets.coset_count()];
    let mut point_of = vec![0u32];
    elem_of[0] = 0;
    let mut k = 0;
    while k < point_of.len() {
        let p = point_of[k];
        for j in 0..gens.len() {
            for w in [&gens[j], &inv_gens[j]] {
                let q = closure.apply(p, w);
                if elem_of[q as usize] == NOT_IN_T {
                    elem_of[q as usize] = point_of.len() as u32;
                    point_of.push(q);
                }
            }
        }
        k += 1;
    }
    let mut rows = vec![0u32; order * cols];
    for (e, &p) in point_of.iter().enumerate() {
        for j in 0..gens.len() {
            rows[e * cols + 2 * j] = elem_of[closure.apply(p, &gens[j]) as usize];
            rows[e * cols + 2 * j + 1] = elem_of[closure.apply(p, &inv_gens[j]) as usize];
        }
    }
    drop(closure);
    let table = if cols == 0 { CosetTable::trivial(0) } else { CosetTable::from_rows(gens.len(), rows)? };
    let names: Vec<String> = (1..=gens.len()).map(|i| format!("t{i}")).collect();
    let tensor = Arc::new(FinGroup::from_regular_table(names, table)?);

    let (lambda, lambda_prime) = lambda_values(&pair, &eta, &tensor, &labels)?;
    Ok(TensorGroup {
        pair,
        eta,
        cosets,
        tensor,
        labels,
        point_of,
        elem_of,
        lambda,
        lambda_prime,
        compat,
        predicted_bound,
    })
}

/// Semidirect product `N ⋊ A` with `A` acting on `N` on the right:
/// `(n1, a1)(n2, a2) = (n1 · n2^(a1^-1), a1 a2)`.
struct Semidirect<'a> {
    n: &'a FinGroup,
    a: &'a FinGroup,
    act: &'a dyn Fn(u32, u32) -> u32,
}

impl Semidirect<'_> {
    fn mul(&self, (n1, a1): (u32, u32), (n2, a2): (u32, u32)) -> (u32, u32) {
        (self.n.mul(n1, (self.act)(n2, self.a.inv(a1))), self.a.mul(a1, a2))
    }

    fn inv(&self, (n, a): (u32, u32)) -> (u32, u32) {
        ((self.act)(self.n.inv(n), a), self.a.inv(a))
    }

    fn eval(&self, letters: impl IntoIterator<Item = u32>, images: &[(u32, u32)]) -> (u32, u32) {
        letters.into_iter().fold((0, 0), |acc, l| {
            let x = images[(l >> 1) as usize];
            self.mul(acc, if l & 1 == 0 { x } else { self.inv(x) })
        })
    }
}

/// λ: T → L and λ′: T → R, obtained by restricting the maps
/// η → L ⋊ R and η → R ⋊ L, each verified on every η relator.
fn lambda_values(
    pair: &ActionPair,
    eta: &Presentation,
    tensor: &FinGroup,
    labels: &[(u32, u32)],
) -> Result<(Vec<u32>, Vec<u32>)> {
    let (lg, rg) = (&**pair.left(), &**pair.right());
    let act_l = |n: u32, a: u32| pair.act_on_left(n, a);
    let act_r = |n: u32, a: u32| pair.act_on_right(n, a);
    let into_l = Semidirect { n: lg, a: rg, act: &act_l };
    let into_r = Semidirect { n: rg, a: lg, act: &act_r };
    let img_l: Vec<(u32, u32)> = lg
        .generators()
        .into_iter()
        .map(|x| (x, 0))
        .chain(rg.generators().into_iter().map(|y| (0, y)))
        .collect();
    let img_r: Vec<(u32, u32)> = lg
        .generators()
        .into_iter()
        .map(|x| (0, x))
        .chain(rg.generators().into_iter().map(|y| (y, 0)))
        .collect();
    for (index, r) in eta.relators().iter().enumerate() {
        if into_l.eval(r.letters(), &img_l) != (0, 0) || into_r.eval(r.letters(), &img_r) != (0, 0) {
            return Err(Error::Internal(format!(
                "η relator {index} ({}) does not hold in the semidirect products",
                r.display_with(eta.names())
            )));
        }
    }
    let mut gl = Vec::with_capacity(labels.len());
    let mut gr = Vec::with_capacity(labels.len());
    for &(l, r) in labels {
        let letters = label_letters(pair, l, r);
        let (n, a) = into_l.eval(letters.iter().copied(), &img_l);
        let (n2, a2) = into_r.eval(letters.iter().copied(), &img_r);
        if a != 0 || a2 != 0 {
            return Err(Error::Internal("commutator does not map into the normal factor".into()));
        }
        gl.push(n);
        gr.push(n2);
    }
    let lam = tensor.extend_hom(&gl, |x, y| lg.mul(x, y), |x| lg.inv(x))?;
    let lam2 = tensor.extend_hom(&gr, |x, y| rg.mul(x, y), |x| rg.inv(x))?;
    Ok((lam, lam2))
}

/// Conjugation pair on `g`, then η: the tensor square inside ν(G).
pub fn build_nu(g: Arc<FinGroup>, limits: &BuildLimits) -> Result<TensorGroup> {
    build_eta(conjugation_pair(g), limits)
}

/// `G ⊗ N` for a normal subgroup `N`, with both acting by conjugation.
/// Also returns the embedding of `N`'s elements into `G`.
pub fn tensor_with_subgroup(g: Arc<FinGroup>, n: &Subgroup, limits: &BuildLimits) -> Result<(TensorGroup, Vec<u32>)> {
    let (pair, embed) = subgroup_conjugation_pair(g, n)?;
    Ok((build_eta(pair, limits)?, embed))
}

/// Subgroup generated by all `l^-1 l^r` (left) or `r^-1 r^l` (right).
pub fn derivative(pair: &ActionPair, side: Side, budget: u64) -> Result<Subgroup> {
    let (lg, rg) = (pair.left(), pair.right());
    let required = (lg.order() * rg.order()) as u64;
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(match side {
        Side::Left => {
            let mut s = Subgroup::trivial(lg.order());
            for l in 0..lg.order() as u32 {
                for r in 0..rg.order() as u32 {
                    s.add_generator(lg, lg.mul(lg.inv(l), pair.act_on_left(l, r)));
                }
            }
            s
        }
        Side::Right => {
            let mut s = Subgroup::trivial(rg.order());
            for r in 0..rg.order() as u32 {
                for l in 0..lg.order() as u32 {
                    s.add_generator(rg, rg.mul(rg.inv(r), pair.act_on_right(r, l)));
                }
            }
            s
        }
    })
}

/// Subgroup generated by a list of elements.
pub fn subgroup_of(g: &FinGroup, elements: impl IntoIterator<Item = u32>) -> Subgroup {
    let mut s = Subgroup::trivial(g.order());
    for e in elements {
        s.add_generator(g, e);
    }
    s
}

/// Fibre quotient `T / N` where `N` is the normal closure of chosen tensors.
#[derive(Clone, Debug)]
pub struct Exterior {
    pub fibre: Subgroup,
    pub order: usize,
}

/// Invariants of `k / n` for `n ⊆ k` subgroups of `g` with abelian quotient.
pub fn quotient_abelian_invariants(g: &FinGroup, k: &Subgroup, n: &Subgroup) -> Result<AbelianGroup> {
    let perm = coset_action(g, k, n)?;
    if !perm.is_abelian() {
        return Err(Error::Invalid("quotient is not abelian".into()));
    }
    Ok(regular_abelian_invariants(&perm))
}

/// Regular action of `k / n` on the cosets of `n` in `k`.
fn coset_action(g: &FinGroup, k: &Subgroup, n: &Subgroup) -> Result<PermGroup> {
    if !n.is_subgroup_of(k) {
        return Err(Error::NotMember);
    }
    let mut coset_of = vec![u32::MAX; g.order()];
    let mut reps: Vec<u32> = Vec::new();
    for &e in k.elements() {
        if coset_of[e as usize] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(e);
        for &x in n.elements() {
            coset_of[g.mul(x, e) as usize] = id;
        }
    }
    let gens: Vec<Perm> = k
        .generators()
        .iter()
        .map(|&s| Perm::from_images_unchecked(reps.iter().map(|&r| coset_of[g.mul(r, s) as usize]).collect()))
        .collect();
    let m = reps.len();
    Ok(PermGroup::new(m, gens).with_base(if m > 1 { vec![0] } else { vec![] }).with_known_order(m as u64))
}

/// Result of the commutator relation check on generator 4-tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub passed: bool,
    pub tuples_checked: u64,
    pub witness: Option<[String; 4]>,
}

/// Summary of a build, for JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorReport {
    pub left_order: u64,
    pub right_order: u64,
    pub eta_order: u64,
    pub eta_generators: usize,
    pub eta_relators: usize,
    pub cosets_enumerated: u64,
    pub predicted_bound: u64,
    pub tensor_order: u64,
    pub tensor_invariants: AbelianGroup,
    pub tensor_exponent: u64,
    pub tensor_nilpotency_class: Option<usize>,
    pub derivative_order: u64,
    pub lambda_kernel_order: u64,
    pub lambda_kernel_invariants: AbelianGroup,
    pub lambda_kernel_central: bool,
    pub compatibility: CompatReport,
}

impl TensorGroup {
    pub fn pair(&self) -> &ActionPair {
        &self.pair
    }

    pub fn eta_presentation(&self) -> &Presentation {
        &self.eta
    }

    /// The action of η on the cosets of the left copy.
    pub fn eta_cosets(&self) -> &CosetTable {
        &self.cosets
    }

    pub fn eta_order(&self) -> u64 {
        self.cosets.coset_count() as u64 * self.pair.left().order() as u64
    }

    pub fn tensor(&self) -> &Arc<FinGroup> {
        &self.tensor
    }

    pub fn order(&self) -> usize {
        self.tensor.order()
    }

    /// `(l, r)` such that generator `i` of the tensor group is `l ⊗ r`.
    pub fn labels(&self) -> &[(u32, u32)] {
        &self.labels
    }

    pub fn compatibility(&self) -> &CompatReport {
        &self.compat
    }

    pub fn predicted_bound(&self) -> u64 {
        self.predicted_bound
    }

    fn element_at(&self, point: u32) -> Result<u32> {
        match self.elem_of[point as usize] {
            NOT_IN_T => Err(Error::Internal("point outside the tensor orbit".into())),
            e => Ok(e),
        }
    }

    /// The element `l ⊗ r`.
    pub fn tensor_element(&self, l: u32, r: u32) -> Result<u32> {
        let p = self.cosets.apply_letters(0, label_letters(&self.pair, l, r)) as u32;
        self.element_at(p)
    }

    /// `t^l` for `l` in the left group, i.e. conjugation by the left copy.
    pub fn conjugate_by_left(&self, t: u32, l: u32) -> Result<u32> {
        let p = self.cosets.apply_letters(self.point_of[t as usize] as usize, self.pair.left().letters(l)) as u32;
        self.element_at(p)
    }

    /// `t^r` for `r` in the right group, computed on generator labels and
    /// extended as a verified automorphism of the tensor group.
    pub fn right_action_perm(&self, r: u32) -> Result<Vec<u32>> {
        let rg = self.pair.right();
        let images = self
            .labels
            .iter()
            .map(|&(l, x)| self.tensor_element(self.pair.act_on_left(l, r), rg.conj(x, r)))
            .collect::<Result<Vec<_>>>()?;
        let t = &self.tensor;
        let map = t.extend_hom(&images, |x, y| t.mul(x, y), |x| t.inv(x))?;
        let mut seen = vec![false; map.len()];
        for &y in &map {
            if std::mem::replace(&mut seen[y as usize], true) {
                return Err(Error::Internal("diagonal action is not bijective".into()));
            }
        }
        Ok(map)
    }

    /// λ(t) in the left group for every element `t`.
    pub fn lambda_values(&self) -> &[u32] {
        &self.lambda
    }

    /// λ′(t) in the right group for every element `t`.
    pub fn lambda_prime_values(&self) -> &[u32] {
        &self.lambda_prime
    }

    pub fn lambda_image(&self) -> Subgroup {
        subgroup_of(self.pair.left(), self.lambda.iter().copied())
    }

    pub fn lambda_kernel(&self) -> Subgroup {
        kernel_of(&self.tensor, &self.lambda)
    }

    pub fn lambda_prime_image(&self) -> Subgroup {
        subgroup_of(self.pair.right(), self.lambda_prime.iter().copied())
    }

    pub fn lambda_prime_kernel(&self) -> Subgroup {
        kernel_of(&self.tensor, &self.lambda_prime)
    }

    /// λ as a verified permutation homomorphism from the regular
    /// representation of the tensor group into that of the left group.
    pub fn lambda_map(&self) -> Result<GroupHom> {
        let t = &self.tensor;
        let images: Vec<Perm> =
            t.generators().iter().map(|&x| self.pair.left().element_perm(self.lambda[x as usize])).collect();
        let hom = GroupHom::unverified(t.presentation(), t.perm_group(), images)?
            .verify()
            .map_err(|e| Error::Internal(format!("λ restriction failed verification: {e}")))?;
        Ok(hom)
    }

    /// Whether every element of `k` commutes with every tensor generator.
    pub fn is_central(&self, k: &Subgroup) -> bool {
        let t = &self.tensor;
        let gens = t.generators();
        k.generators().iter().all(|&x| gens.iter().all(|&s| t.mul(x, s) == t.mul(s, x)))
    }

    /// `Δ = <g ⊗ g>` over all elements; conjugation pairs only.
    pub fn delta_subgroup(&self) -> Result<Subgroup> {
        if self.pair.kind() != PairKind::Conjugation {
            return Err(Error::Invalid("Δ is defined for the tensor square".into()));
        }
        let n = self.pair.left().order() as u32;
        let elems = (0..n).map(|g| self.tensor_element(g, g)).collect::<Result<Vec<_>>>()?;
        Ok(subgroup_of(&self.tensor, elems))
    }

    /// Quotient by the normal closure of `l ⊗ r` over the given fibre pairs.
    pub fn exterior(&self, fibre_pairs: &[(u32, u32)]) -> Result<Exterior> {
        let seeds = fibre_pairs.iter().map(|&(l, r)| self.tensor_element(l, r)).collect::<Result<Vec<_>>>()?;
        let fibre = self.tensor.normal_closure(&seeds);
        let order = self.tensor.order() / fibre.order();
        Ok(Exterior { fibre, order })
    }

    /// `G ∧ G`: fibre pairs `(g, g)` for the tensor square.
    pub fn exterior_square(&self) -> Result<Exterior> {
        let n = self.pair.left().order() as u32;
        self.exterior(&(0..n).map(|g| (g, g)).collect::<Vec<_>>())
    }

    /// Exterior quotient as a permutation group with its projection.
    pub fn exterior_quotient(&self, e: &Exterior) -> Result<(PermGroup, GroupHom)> {
        let t = &self.tensor;
        let n = PermGroup::new(t.order(), e.fibre.generators().iter().map(|&x| t.element_perm(x)).collect());
        t.perm_group().quotient(&n)
    }

    /// `[m⊗n, m'⊗n'] = λ(m⊗n) ⊗ λ'(m'⊗n')` over generator 4-tuples
    /// (generators and inverses). With `perturb`, the first commutator
    /// argument is conjugated by each left generator in turn, which breaks
    /// the identity whenever that moves `λ(m⊗n) ⊗ λ'(m'⊗n')`.
    pub fn commutator_check(&self, perturb: bool) -> Result<CommutatorReport> {
        let (lg, rg) = (self.pair.left(), self.pair.right());
        let t = &self.tensor;
        let with_inv = |g: &FinGroup| -> Vec<u32> { g.generators().iter().flat_map(|&x| [x, g.inv(x)]).collect() };
        let (ls, rs) = (with_inv(lg), with_inv(rg));
        let twists: Vec<Option<u32>> =
            if perturb { lg.generators().into_iter().map(Some).collect() } else { vec![None] };
        let mut count = 0u64;
        for &m in &ls {
            for &n in &rs {
                let a = self.tensor_element(m, n)?;
                for &m2 in &ls {
                    for &n2 in &rs {
                        let b = self.tensor_element(m2, n2)?;
                        let rhs = self.tensor_element(self.lambda[a as usize], self.lambda_prime[b as usize])?;
                        count += 1;
                        let mut holds = true;
                        for &z in &twists {
                            let a = match z {
                                Some(z) => self.conjugate_by_left(a, z)?,
                                None => a,
                            };
                            holds &= t.comm(a, b) == rhs;
                        }
                        if !holds {
                            let show = |g: &FinGroup, x: u32| g.word(x).display_with(g.names()).to_string();
                            return Ok(CommutatorReport {
                                passed: false,
                                tuples_checked: count,
                                witness: Some([show(lg, m), show(rg, n), show(lg, m2), show(rg, n2)]),
                            });
                        }
                    }
                }
            }
        }
        Ok(CommutatorReport { passed: true, tuples_checked: count, witness: None })
    }

    pub fn report(&self) -> Result<TensorReport> {
        let t = &self.tensor;
        let kernel = self.lambda_kernel();
        let whole = t.whole();
        Ok(TensorReport {
            left_order: self.pair.left().order() as u64,
            right_order: self.pair.right().order() as u64,
            eta_order: self.eta_order(),
            eta_generators: self.eta.generator_count(),
            eta_relators: self.eta.relators().len(),
            cosets_enumerated: self.cosets.coset_count() as u64,
            predicted_bound: self.predicted_bound,
            tensor_order: t.order() as u64,
            tensor_invariants: quotient_abelian_invariants(t, &whole, &t.gamma(2))?,
            tensor_exponent: t.exponent(),
            tensor_nilpotency_class: t.nilpotency_class(),
            derivative_order: self.lambda_image().order() as u64,
            lambda_kernel_order: kernel.order() as u64,
            lambda_kernel_invariants: quotient_abelian_invariants(t, &kernel, &Subgroup::trivial(t.order()))?,
            lambda_kernel_central: self.is_central(&kernel),
            compatibility: self.compat.clone(),
        })
    }
}

fn kernel_of(t: &FinGroup, values: &[u32]) -> Subgroup {
    subgroup_of(t, (0..t.order() as u32).filter(|&x| values[x as usize] == 0))
}

#[cfg(test)]
mod tests;
