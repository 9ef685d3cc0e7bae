//! Mutual actions of two finite groups and the compatibility test.
//!
//! All actions are right actions by automorphisms. For `l` in the left
//! group and `r` in the right group, `l^r` is written `act_on_left(l, r)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coset_enum::CosetTable;
use crate::error::{Error, Result};
use crate::group::{FinGroup, Subgroup};

/// Default number of triple evaluations allowed in a compatibility sweep.
pub const DEFAULT_COMPAT_BUDGET: u64 = 10_000_000;

/// Full action tables are stored up to this many entries.
const ACTION_TABLE_LIMIT: usize = 8_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Conjugation,
    SubgroupConjugation,
    General,
}

/// One group's action on the other: a permutation of the acted-on
/// elements for each generator of the acting group.
#[derive(Clone, Debug)]
struct Action {
    gen_perms: Vec<Vec<u32>>,
    gen_inverse_perms: Vec<Vec<u32>>,
    /// `table[a * n + x]` is `x^a`, present when small enough.
    table: Option<Vec<u32>>,
}

impl Action {
    fn new(acting: &FinGroup, acted_order: usize, gen_perms: Vec<Vec<u32>>) -> Action {
        let gen_inverse_perms = gen_perms
            .iter()
            .map(|p| {
                let mut inv = vec![0u32; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    inv[j as usize] = i as u32;
                }
                inv
            })
            .collect();
        let mut action = Action { gen_perms, gen_inverse_perms, table: None };
        if acting.order().saturating_mul(acted_order) <= ACTION_TABLE_LIMIT {
            let n = acted_order;
            let mut table = vec![0u32; acting.order() * n];
            for a in 0..acting.order() as u32 {
                let letters = acting.letters(a);
                for x in 0..n as u32 {
                    table[a as usize * n + x as usize] = action.apply_letters(x, &letters);
                }
            }
            action.table = Some(table);
        }
        action
    }

    fn letter_perm(&self, l: u32) -> &[u32] {
        if l & 1 == 0 {
            &self.gen_perms[(l >> 1) as usize]
        } else {
            &self.gen_inverse_perms[(l >> 1) as usize]
        }
    }

    fn apply_letters(&self, x: u32, letters: &[u32]) -> u32 {
        letters.iter().fold(x, |y, &l| self.letter_perm(l)[y as usize])
    }

    fn apply(&self, acting: &FinGroup, acted_order: usize, x: u32, a: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * acted_order + x as usize],
            None => self.apply_letters(x, &acting.letters(a)),
        }
    }

    fn is_trivial(&self) -> bool {
        self.gen_perms.iter().all(|p| p.iter().enumerate().all(|(i, &j)| i as u32 == j))
    }
}

/// Two finite groups acting on each other.
#[derive(Clone, Debug)]
pub struct ActionPair {
    left: Arc<FinGroup>,
    right: Arc<FinGroup>,
    right_on_left: Action,
    left_on_right: Action,
    kind: PairKind,
}

impl ActionPair {
    /// Builds a pair from generator images: `right_on_left[j][i]` is the
    /// image of left generator `i` under right generator `j`, and
    /// symmetrically. Each map is checked to be an automorphism, and each
    /// assignment to respect the acting group's relators.
    pub fn new(
        left: Arc<FinGroup>,
        right: Arc<FinGroup>,
        right_on_left: &[Vec<u32>],
        left_on_right: &[Vec<u32>],
    ) -> Result<ActionPair> {
        let rl = automorphisms(&left, &right, right_on_left)?;
        let lr = automorphisms(&right, &left, left_on_right)?;
        ActionPair::from_element_perms(left, right, rl, lr, PairKind::General)
    }

    /// Builds a pair from full element permutations for each acting
    /// generator; checks the acting group's relators.
    pub(crate) fn from_element_perms(
        left: Arc<FinGroup>,
        right: Arc<FinGroup>,
        right_on_left: Vec<Vec<u32>>,
        left_on_right: Vec<Vec<u32>>,
        kind: PairKind,
    ) -> Result<ActionPair> {
        check_relators(&right, &right_on_left, left.order(), "right on left")?;
        check_relators(&left, &left_on_right, right.order(), "left on right")?;
        let rl = Action::new(&right, left.order(), right_on_left);
        let lr = Action::new(&left, right.order(), left_on_right);
        Ok(ActionPair { left, right, right_on_left: rl, left_on_right: lr, kind })
    }

    pub fn left(&self) -> &Arc<FinGroup> {
        &self.left
    }

    pub fn right(&self) -> &Arc<FinGroup> {
        &self.right
    }

    pub fn kind(&self) -> PairKind {
        self.kind
    }

    /// `l^r`.
    pub fn act_on_left(&self, l: u32, r: u32) -> u32 {
        self.right_on_left.apply(&self.right, self.left.order(), l, r)
    }

    /// `r^l`.
    pub fn act_on_right(&self, r: u32, l: u32) -> u32 {
        self.left_on_right.apply(&self.left, self.right.order(), r, l)
    }

    pub fn actions_trivial(&self) -> (bool, bool) {
        (self.right_on_left.is_trivial(), self.left_on_right.is_trivial())
    }

    /// The same groups with the roles exchanged.
    pub fn swapped(&self) -> ActionPair {
        ActionPair {
            left: self.right.clone(),
            right: self.left.clone(),
            right_on_left: self.left_on_right.clone(),
            left_on_right: self.right_on_left.clone(),
            kind: self.kind,
        }
    }

    /// A copy in which right generator `gen` sends left element `a` where
    /// it used to send `b` and vice versa. The result is generally not an
    /// action by automorphisms; it exists to exercise the checks.
    pub fn with_perturbed_action(&self, gen: usize, a: u32, b: u32) -> ActionPair {
        let mut perms = self.right_on_left.gen_perms.clone();
        let p = &mut perms[gen];
        let (ia, ib) = (
            p.iter().position(|&x| x == a).expect("perm"),
            p.iter().position(|&x| x == b).expect("perm"),
        );
        p.swap(ia, ib);
        ActionPair {
            left: self.left.clone(),
            right: self.right.clone(),
            right_on_left: Action::new(&self.right, self.left.order(), perms),
            left_on_right: self.left_on_right.clone(),
            kind: PairKind::General,
        }
    }
}

/// Extends generator images to automorphisms of `acted`, one per generator
/// of `acting`.
fn automorphisms(acted: &FinGroup, acting: &FinGroup, images: &[Vec<u32>]) -> Result<Vec<Vec<u32>>> {
    if images.len() != acting.generator_count() {
        return Err(Error::Invalid(format!(
            "{} automorphisms given for {} acting generators",
            images.len(),
            acting.generator_count()
        )));
    }
    images
        .iter()
        .map(|imgs| {
            let map = acted.extend_hom(imgs, |x, y| acted.mul(x, y), |x| acted.inv(x))?;
            let mut seen = vec![false; map.len()];
            for &y in &map {
                if std::mem::replace(&mut seen[y as usize], true) {
                    return Err(Error::Invalid("action generator is not bijective".into()));
                }
            }
            Ok(map)
        })
        .collect()
}

fn check_relators(acting: &FinGroup, perms: &[Vec<u32>], acted_order: usize, what: &str) -> Result<()> {
    if perms.len() != acting.generator_count() {
        return Err(Error::Invalid(format!("{what}: wrong number of generator actions")));
    }
    let action = Action { gen_perms: perms.to_vec(), gen_inverse_perms: Vec::new(), table: None };
    let inverses: Vec<Vec<u32>> = perms
        .iter()
        .map(|p| {
            let mut inv = vec![0u32; p.len()];
            for (i, &j) in p.iter().enumerate() {
                inv[j as usize] = i as u32;
            }
            inv
        })
        .collect();
    let action = Action { gen_inverse_perms: inverses, ..action };
    let pres = acting.presentation();
    for (index, r) in pres.relators().iter().enumerate() {
        let letters: Vec<u32> = r.letters().collect();
        if (0..acted_order as u32).any(|x| action.apply_letters(x, &letters) != x) {
            return Err(Error::Incompatible(format!(
                "{what}: relator {index} ({}) does not act trivially",
                r.display_with(pres.names())
            )));
        }
    }
    Ok(())
}

/// Conjugation permutation of every element, per generator.
fn conjugation_perms(g: &FinGroup, by: &[u32]) -> Vec<Vec<u32>> {
    by.iter().map(|&s| (0..g.order() as u32).map(|x| g.conj(x, s)).collect()).collect()
}

/// `g` acting on itself by conjugation on both sides.
pub fn conjugation_pair(g: Arc<FinGroup>) -> ActionPair {
    let perms = conjugation_perms(&g, &g.generators());
    ActionPair::from_element_perms(g.clone(), g, perms.clone(), perms, PairKind::Conjugation)
        .expect("conjugation respects relators")
}

/// A subgroup as a group in its own right, generated by its recorded
/// generators, with the embedding of its elements.
pub fn subgroup_as_group(g: &FinGroup, n: &Subgroup) -> Result<(FinGroup, Vec<u32>)> {
    let gens = n.generators().to_vec();
    let mut elems = vec![0u32];
    let mut index = std::collections::HashMap::from([(0u32, 0u32)]);
    let mut k = 0;
    while k < elems.len() {
        for &s in &gens {
            let y = g.mul(elems[k], s);
            if !index.contains_key(&y) {
                index.insert(y, elems.len() as u32);
                elems.push(y);
            }
        }
        k += 1;
    }
    let cols = 2 * gens.len();
    let mut rows = vec![0u32; elems.len() * cols];
    for (i, &e) in elems.iter().enumerate() {
        for (j, &s) in gens.iter().enumerate() {
            rows[i * cols + 2 * j] = index[&g.mul(e, s)];
            rows[i * cols + 2 * j + 1] = index[&g.mul(e, g.inv(s))];
        }
    }
    let table = if cols == 0 { CosetTable::trivial(0) } else { CosetTable::from_rows(gens.len(), rows)? };
    let names = (1..=gens.len()).map(|i| format!("n{i}")).collect();
    let sub = FinGroup::from_regular_table(names, table)?;
    // the table numbering is discovery order; translate to the new numbering
    let embed = (0..sub.order() as u32).map(|e| g.eval_word(&sub.word(e).substitute(&gens.iter().map(|&s| g.word(s)).collect::<Vec<_>>()))).collect();
    Ok((sub, embed))
}

/// `g` and a normal subgroup `n`, acting on each other by conjugation
/// inside `g`. Returns the pair and the embedding of `n` into `g`.
pub fn subgroup_conjugation_pair(g: Arc<FinGroup>, n: &Subgroup) -> Result<(ActionPair, Vec<u32>)> {
    for &x in n.generators() {
        for s in g.generators() {
            if !n.contains(g.conj(x, s)) {
                return Err(Error::NotNormal);
            }
        }
    }
    let (sub, embed) = subgroup_as_group(&g, n)?;
    let mut back = vec![u32::MAX; g.order()];
    for (i, &e) in embed.iter().enumerate() {
        back[e as usize] = i as u32;
    }
    let right_on_left = sub.generators().iter().map(|&s| (0..g.order() as u32).map(|x| g.conj(x, embed[s as usize])).collect()).collect();
    let left_on_right = g
        .generators()
        .iter()
        .map(|&s| (0..sub.order()).map(|y| back[g.conj(embed[y], s) as usize]).collect())
        .collect();
    let pair = ActionPair::from_element_perms(g, Arc::new(sub), right_on_left, left_on_right, PairKind::SubgroupConjugation)?;
    Ok((pair, embed))
}

/// A failing instance of the compatibility identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatWitness {
    /// `left` when `g^(h^g1) != ((g^(g1^-1))^h)^g1` for `g, g1` on the left,
    /// `right` for the mirrored identity.
    pub side: String,
    pub g: String,
    pub h: String,
    pub g1: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatReport {
    pub compatible: bool,
    pub exhaustive: bool,
    pub triples_checked: u64,
    pub witness: Option<CompatWitness>,
}

/// Number of triples in an exhaustive sweep.
pub fn compatibility_triples(p: &ActionPair) -> u64 {
    let (a, b) = (p.left.order() as u64, p.right.order() as u64);
    a * b * (a + b)
}

/// Exhaustive check of both compatibility identities.
pub fn check_compatibility(p: &ActionPair, budget: u64) -> Result<CompatReport> {
    let required = compatibility_triples(p);
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    let all_l: Vec<u32> = (0..p.left.order() as u32).collect();
    let all_r: Vec<u32> = (0..p.right.order() as u32).collect();
    Ok(sweep(p, &all_r, &all_l, &all_l, &all_r, true))
}

/// The identities with the acting elements restricted to generators and
/// their inverses, for pairs too large to sweep exhaustively.
pub fn check_compatibility_on_generators(p: &ActionPair) -> CompatReport {
    let with_inverses = |g: &FinGroup| -> Vec<u32> {
        let mut v: Vec<u32> = g.generators().iter().flat_map(|&x| [x, g.inv(x)]).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (gl, gr) = (with_inverses(&p.left), with_inverses(&p.right));
    sweep(p, &gr, &gl, &gl, &gr, false)
}

fn sweep(p: &ActionPair, hs: &[u32], g1s: &[u32], gs_r: &[u32], h1s: &[u32], exhaustive: bool) -> CompatReport {
    let (l, r) = (&*p.left, &*p.right);
    let left_fail = (0..l.order() as u32).into_par_iter().find_map_first(|g| {
        for &h in hs {
            for &g1 in g1s {
                let lhs = p.act_on_left(g, p.act_on_right(h, g1));
                let rhs = l.conj(p.act_on_left(l.conj(g, l.inv(g1)), h), g1);
                if lhs != rhs {
                    return Some(("left", l.word(g), r.word(h), l.word(g1), l.names(), r.names()));
                }
            }
        }
        None
    });
    let witness = left_fail
        .map(|(side, a, b, c, ln, rn)| CompatWitness {
            side: side.into(),
            g: a.display_with(ln).to_string(),
            h: b.display_with(rn).to_string(),
            g1: c.display_with(ln).to_string(),
        })
        .or_else(|| {
            (0..r.order() as u32)
                .into_par_iter()
                .find_map_first(|h| {
                    for &g in gs_r {
                        for &h1 in h1s {
                            let lhs = p.act_on_right(h, p.act_on_left(g, h1));
                            let rhs = r.conj(p.act_on_right(r.conj(h, r.inv(h1)), g), h1);
                            if lhs != rhs {
                                return Some((h, g, h1));
                            }
                        }
                    }
                    None
                })
                .map(|(h, g, h1)| CompatWitness {
                    side: "right".into(),
                    g: r.word(h).display_with(r.names()).to_string(),
                    h: l.word(g).display_with(l.names()).to_string(),
                    g1: r.word(h1).display_with(r.names()).to_string(),
                })
        });
    let triples = (l.order() * hs.len() * g1s.len() + r.order() * gs_r.len() * h1s.len()) as u64;
    CompatReport { compatible: witness.is_none(), exhaustive, triples_checked: triples, witness }
}

/// Action description: for each acting generator name, the images of the
/// acted-on generators as words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub right_on_left: BTreeMap<String, Vec<String>>,
    pub left_on_right: BTreeMap<String, Vec<String>>,
}

impl ActionSpec {
    /// Resolves the words against both groups and builds the pair.
    pub fn build(&self, left: Arc<FinGroup>, right: Arc<FinGroup>) -> Result<ActionPair> {
        let rl = resolve(&self.right_on_left, &right, &left)?;
        let lr = resolve(&self.left_on_right, &left, &right)?;
        ActionPair::new(left, right, &rl, &lr)
    }
}

fn resolve(map: &BTreeMap<String, Vec<String>>, acting: &FinGroup, acted: &FinGroup) -> Result<Vec<Vec<u32>>> {
    acting
        .names()
        .iter()
        .map(|name| {
            let images = map
                .get(name)
                .ok_or_else(|| Error::Invalid(format!("no action given for generator `{name}`")))?;
            if images.len() != acted.generator_count() {
                return Err(Error::Invalid(format!(
                    "generator `{name}` has {} images, expected {}",
                    images.len(),
                    acted.generator_count()
                )));
            }
            images
                .iter()
                .map(|w| Ok(acted.eval_word(&acted.presentation().parse_word(w)?)))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset_enum::EnumLimits;
    use crate::presentation::parse_presentation;

    fn group(text: &str) -> Arc<FinGroup> {
        Arc::new(FinGroup::from_presentation(&parse_presentation(text).unwrap(), EnumLimits::default()).unwrap())
    }

    #[test]
    fn conjugation_is_compatible() {
        for text in ["<a,b | a^4, b^2, (a b)^2>", "<a,b | a^4, a^2 b^-2, b^-1 a b a>", "<r,s | r^3, s^2, (r s)^2>", "< | >"] {
            let p = conjugation_pair(group(text));
            let r = check_compatibility(&p, DEFAULT_COMPAT_BUDGET).unwrap();
            assert!(r.compatible && r.exhaustive, "{text}");
            assert!(check_compatibility(&p.swapped(), DEFAULT_COMPAT_BUDGET).unwrap().compatible);
        }
    }

    #[test]
    fn trivial_actions_are_compatible() {
        let (c2, c3) = (group("<a | a^2>"), group("<b | b^3>"));
        let p = ActionPair::new(c2.clone(), c3.clone(), &[vec![c2.generator(0)]], &[vec![c3.generator(0)]]).unwrap();
        assert_eq!(p.actions_trivial(), (true, true));
        assert!(check_compatibility(&p, DEFAULT_COMPAT_BUDGET).unwrap().compatible);
    }

    #[test]
    fn budget_is_enforced() {
        let p = conjugation_pair(group("<a,b | a^4, b^2, (a b)^3>"));
        assert_eq!(check_compatibility(&p, 100), Err(Error::Budget { required: 24 * 24 * 48, budget: 100 }));
    }

    #[test]
    fn some_perturbation_fails_with_witness() {
        let p = conjugation_pair(group("<a,b | a^4, b^2, (a b)^2>"));
        let mut failures = 0;
        for a in 1..8 {
            let q = p.with_perturbed_action(0, 0, a);
            let r = check_compatibility(&q, DEFAULT_COMPAT_BUDGET).unwrap();
            if !r.compatible {
                assert!(r.witness.is_some());
                failures += 1;
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn subgroup_pair() {
        let g = group("<r,s | r^3, s^2, (r s)^2>");
        let a3 = g.gamma(2);
        let (p, embed) = subgroup_conjugation_pair(g.clone(), &a3).unwrap();
        assert_eq!(p.right().order(), 3);
        assert!(embed.iter().all(|&e| a3.contains(e)));
        assert!(check_compatibility(&p, DEFAULT_COMPAT_BUDGET).unwrap().compatible);
        let s = g.subgroup(&[g.generator(1)]);
        assert_eq!(subgroup_conjugation_pair(g, &s).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn bad_action_is_rejected() {
        let (c2, c3) = (group("<a | a^2>"), group("<b | b^3>"));
        let inv = c3.inv(c3.generator(0));
        assert!(ActionPair::new(c2.clone(), c3.clone(), &[vec![c2.generator(0)]], &[vec![inv]]).is_ok());
        // inversion has order 2, so a generator of order 3 cannot act by it
        let bad = ActionPair::new(c3.clone(), c3.clone(), &[vec![inv]], &[vec![c3.generator(0)]]);
        assert!(matches!(bad, Err(Error::Incompatible(_))));
    }

    #[test]
    fn action_spec_json() {
        let (c2, c3) = (group("<a | a^2>"), group("<b | b^3>"));
        let spec: ActionSpec = serde_json::from_str(r#"{"right_on_left": {"b": ["a"]}, "left_on_right": {"a": ["b^-1"]}}"#).unwrap();
        let p = spec.build(c2, c3).unwrap();
        assert_eq!(p.actions_trivial(), (true, false));
        assert!(check_compatibility(&p, DEFAULT_COMPAT_BUDGET).unwrap().compatible);
    }
}
