//! Permutation groups: stabilizer chains, subgroups, series, quotients.

mod chain;
mod hom;

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

pub use hom::{define_hom, evaluate_word, GroupHom};
pub(crate) use chain::StabChain;

use crate::abelian::{AbelianGroup, RelationLattice};
use crate::coset_enum::CosetTable;
use crate::error::{Error, Result};
use crate::perm::Perm;

/// Element enumeration is refused above this order.
pub const ELEMENT_LIMIT: u64 = 100_000;

/// Centers are read off the element list up to this order.
pub const CENTER_ENUMERATION_LIMIT: u64 = 10_000;

/// A permutation group given by generators. The stabilizer chain is built
/// on first use and cached.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    base_hint: Vec<u32>,
    known_order: Option<u64>,
    chain: OnceLock<StabChain>,
}

impl PermGroup {
    /// Panics if a generator has the wrong degree.
    pub fn new(degree: usize, gens: Vec<Perm>) -> PermGroup {
        for g in &gens {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
        }
        PermGroup { degree, gens, base_hint: Vec::new(), known_order: None, chain: OnceLock::new() }
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::new(degree, Vec::new())
    }

    /// Right regular action read off a complete coset table over the trivial
    /// subgroup (or any table: the action on its cosets).
    pub fn from_coset_table(table: &CosetTable) -> Result<PermGroup> {
        if !table.is_complete() {
            return Err(Error::IncompleteTable);
        }
        let degree = table.coset_count();
        let gens = (0..table.generator_count())
            .map(|g| Perm::from_images(table.generator_images(g)))
            .collect();
        let mut group = PermGroup::new(degree, gens);
        if degree > 0 {
            group.base_hint = vec![0];
        }
        Ok(group)
    }

    /// `base` must be a base for the group (all elements fixing it pointwise
    /// are trivial).
    pub(crate) fn with_base(mut self, base: Vec<u32>) -> PermGroup {
        self.base_hint = base;
        self.chain = OnceLock::new();
        self
    }

    pub(crate) fn with_known_order(mut self, order: u64) -> PermGroup {
        self.known_order = Some(order);
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    pub(crate) fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| {
            StabChain::build(
                self.degree,
                &self.gens,
                &self.base_hint,
                !self.base_hint.is_empty(),
                self.known_order,
            )
        })
    }

    pub fn base(&self) -> Vec<u32> {
        self.chain().base()
    }

    pub fn order(&self) -> u64 {
        u64::try_from(self.chain().order_u128()).expect("group order overflows u64")
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.chain().contains(g)
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(Perm::is_identity)
    }

    /// Subgroup generated by `elements`, each of which must lie in `self`.
    pub fn subgroup(&self, elements: &[Perm]) -> Result<PermGroup> {
        for e in elements {
            if !self.contains(e) {
                return Err(Error::NotMember);
            }
        }
        Ok(self.subgroup_unchecked(elements.iter().filter(|e| !e.is_identity()).cloned().collect()))
    }

    fn subgroup_unchecked(&self, gens: Vec<Perm>) -> PermGroup {
        PermGroup::new(self.degree, gens).with_base(self.base())
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.gens.iter().all(|g| other.contains(g))
    }

    /// Normal in `g`: closed under conjugation by the generators of `g`.
    pub fn is_normal_in(&self, g: &PermGroup) -> bool {
        self.is_subgroup_of(g)
            && self.gens.iter().all(|x| g.gens.iter().all(|s| self.contains(&x.conjugate(s))))
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(&self, seeds: &[Perm]) -> Result<PermGroup> {
        for s in seeds {
            if !self.contains(s) {
                return Err(Error::NotMember);
            }
        }
        Ok(self.normal_closure_unchecked(seeds))
    }

    fn normal_closure_unchecked(&self, seeds: &[Perm]) -> PermGroup {
        let base = self.base();
        let mut gens: Vec<Perm> = Vec::new();
        let mut current = PermGroup::trivial(self.degree).with_base(base.clone());
        let mut queue: VecDeque<Perm> = VecDeque::new();
        for s in seeds {
            if !current.contains(s) {
                gens.push(s.clone());
                current = PermGroup::new(self.degree, gens.clone()).with_base(base.clone());
                queue.push_back(s.clone());
            }
        }
        while let Some(x) = queue.pop_front() {
            for s in &self.gens {
                let c = x.conjugate(s);
                if !current.contains(&c) {
                    gens.push(c.clone());
                    current = PermGroup::new(self.degree, gens.clone()).with_base(base.clone());
                    queue.push_back(c);
                }
            }
        }
        current
    }

    /// `[a, b]` for subgroups `a`, `b` of `self`, normalized by `self`.
    /// Both arguments are normalized by `self` in every use here, in which
    /// case this is the usual commutator subgroup.
    pub fn commutator_subgroup(&self, a: &PermGroup, b: &PermGroup) -> PermGroup {
        let seeds: Vec<Perm> =
            a.gens.iter().flat_map(|x| b.gens.iter().map(move |y| x.commutator(y))).collect();
        self.normal_closure_unchecked(&seeds)
    }

    pub fn derived_subgroup(&self) -> PermGroup {
        self.commutator_subgroup(self, self)
    }

    pub fn is_abelian(&self) -> bool {
        self.gens.iter().enumerate().all(|(i, x)| self.gens[i + 1..].iter().all(|y| x.mul(y) == y.mul(x)))
    }

    /// `γ₁ ⊇ γ₂ ⊇ ...`, ending at the first repeated term.
    pub fn lower_central_series(&self) -> Vec<PermGroup> {
        let mut series = vec![self.clone()];
        loop {
            let last = series.last().expect("nonempty");
            let next = self.commutator_subgroup(last, self);
            let stop = next.order() == last.order();
            if stop {
                return series;
            }
            series.push(next);
        }
    }

    /// Nilpotency class, or `None` if the lower central series stalls above 1.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let s = self.lower_central_series();
        (s.last().expect("nonempty").order() == 1).then(|| s.len() - 1)
    }

    /// All elements; refuses groups above [`ELEMENT_LIMIT`].
    pub fn elements(&self) -> Result<Vec<Perm>> {
        let n = self.order();
        if n > ELEMENT_LIMIT {
            return Err(Error::SizeLimit { what: "element enumeration".into(), size: n, limit: ELEMENT_LIMIT });
        }
        Ok(self.chain().elements())
    }

    /// `1 = Z₀ ⊆ Z₁ ⊆ ...`, ending at the first repeated term. Uses element
    /// enumeration.
    pub fn upper_central_series(&self) -> Result<Vec<PermGroup>> {
        let elements = self.elements()?;
        let mut series = vec![self.subgroup_unchecked(Vec::new())];
        loop {
            let z = series.last().expect("nonempty");
            let next_gens: Vec<Perm> = elements
                .iter()
                .filter(|x| !z.contains(x) && self.gens.iter().all(|s| z.contains(&x.commutator(s))))
                .cloned()
                .collect();
            if next_gens.is_empty() {
                return Ok(series);
            }
            let mut gens = z.gens.clone();
            let mut next = self.subgroup_unchecked(gens.clone());
            for x in next_gens {
                if !next.contains(&x) {
                    gens.push(x);
                    next = self.subgroup_unchecked(gens.clone());
                }
            }
            series.push(next);
        }
    }

    pub fn center(&self) -> Result<PermGroup> {
        if self.order() <= CENTER_ENUMERATION_LIMIT {
            let central: Vec<Perm> = self
                .elements()?
                .into_iter()
                .filter(|x| self.gens.iter().all(|s| x.mul(s) == s.mul(x)))
                .collect();
            let mut gens = Vec::new();
            let mut z = self.subgroup_unchecked(Vec::new());
            for x in central {
                if !z.contains(&x) {
                    gens.push(x);
                    z = self.subgroup_unchecked(gens.clone());
                }
            }
            return Ok(z);
        }
        // kernel of the conjugation action on the generators' classes
        let mut points: Vec<Perm> = Vec::new();
        let mut index: HashMap<Perm, u32> = HashMap::new();
        for g in &self.gens {
            if index.contains_key(g) {
                continue;
            }
            index.insert(g.clone(), points.len() as u32);
            points.push(g.clone());
            let mut k = points.len() - 1;
            while k < points.len() {
                for s in &self.gens {
                    let c = points[k].conjugate(s);
                    if !index.contains_key(&c) {
                        let limit = ELEMENT_LIMIT as usize;
                        if points.len() >= limit {
                            return Err(Error::SizeLimit {
                                what: "conjugacy classes for the center".into(),
                                size: points.len() as u64,
                                limit: ELEMENT_LIMIT,
                            });
                        }
                        index.insert(c.clone(), points.len() as u32);
                        points.push(c);
                    }
                }
                k += 1;
            }
        }
        let images: Vec<Perm> = self
            .gens
            .iter()
            .map(|s| Perm::from_images_unchecked(points.iter().map(|x| index[&x.conjugate(s)]).collect()))
            .collect();
        GroupHom::from_action(self.clone(), points.len(), images).kernel()
    }

    /// `self / n` acting on the blocks formed by `n`-orbits, together with
    /// the projection.
    pub fn quotient(&self, n: &PermGroup) -> Result<(PermGroup, GroupHom)> {
        if !n.is_normal_in(self) {
            return Err(Error::NotNormal);
        }
        let order = self.order();
        let chain = self.chain();
        if chain.levels.len() <= 1 {
            let omega = chain.levels.first().map_or(0, |l| l.base);
            return Ok(block_quotient(self, n, omega, order / n.order()));
        }
        // no point with trivial stabilizer: pass to the regular action
        let (reg, to_reg) = self.regular_representation()?;
        let n_reg = PermGroup::new(reg.degree, n.gens.iter().map(&to_reg).collect::<Result<_>>()?)
            .with_base(vec![0]);
        let (q, proj) = block_quotient(&reg, &n_reg, 0, order / n.order());
        let proj = GroupHom::from_action(self.clone(), q.degree, proj.images().to_vec());
        Ok((q, proj))
    }

    /// Regular action on the element list, and the map into it.
    pub fn regular_representation(&self) -> Result<(PermGroup, impl Fn(&Perm) -> Result<Perm> + '_)> {
        let elements = self.elements()?;
        let chain = self.chain();
        let key = |g: &Perm| chain.sift_points(g);
        let index: HashMap<Vec<u32>, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (key(e).expect("element is a member"), i as u32))
            .collect();
        let map = move |x: &Perm| -> Result<Perm> {
            let images = elements
                .iter()
                .map(|e| key(&e.mul(x)).map(|k| index[&k]).ok_or(Error::NotMember))
                .collect::<Result<Vec<u32>>>()?;
            Ok(Perm::from_images_unchecked(images))
        };
        let gens = self.gens.iter().map(&map).collect::<Result<Vec<_>>>()?;
        let degree = self.order() as usize;
        let reg = PermGroup::new(degree, gens).with_base(if degree > 0 { vec![0] } else { vec![] });
        Ok((reg, map))
    }

    /// Invariant factors of `self / [self, self]`.
    pub fn abelian_invariants(&self) -> Result<AbelianGroup> {
        let derived = self.derived_subgroup();
        let (q, _) = self.quotient(&derived)?;
        Ok(regular_abelian_invariants(&q))
    }
}

/// Action of `g` on the orbit of the `n`-orbit containing `omega`, where
/// `omega` has trivial stabilizer in `g`.
fn block_quotient(g: &PermGroup, n: &PermGroup, omega: u32, order: u64) -> (PermGroup, GroupHom) {
    let degree = g.degree;
    let mut parent: Vec<u32> = (0..degree as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for s in &n.gens {
        for p in 0..degree as u32 {
            let (a, b) = (find(&mut parent, p), find(&mut parent, s.apply(p)));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut block_index: HashMap<u32, u32> = HashMap::new();
    let mut reps: Vec<u32> = Vec::new();
    let root = find(&mut parent, omega);
    block_index.insert(root, 0);
    reps.push(omega);
    let mut k = 0;
    while k < reps.len() {
        for s in &g.gens {
            let b = find(&mut parent, s.apply(reps[k]));
            if let std::collections::hash_map::Entry::Vacant(e) = block_index.entry(b) {
                e.insert(reps.len() as u32);
                reps.push(s.apply(reps[k]));
            }
        }
        k += 1;
    }
    let images: Vec<Perm> = g
        .gens
        .iter()
        .map(|s| {
            Perm::from_images_unchecked(
                reps.iter().map(|&r| block_index[&find(&mut parent, s.apply(r))]).collect(),
            )
        })
        .collect();
    let m = reps.len();
    // the action on blocks through omega is regular, so point 0 is a base
    let q = PermGroup::new(m, images.clone()).with_base(if m > 1 { vec![0] } else { vec![] }).with_known_order(order);
    let hom = GroupHom::from_action(g.clone(), m, images);
    (q, hom)
}

/// Abelian invariants of an abelian group acting regularly.
pub(crate) fn regular_abelian_invariants(q: &PermGroup) -> AbelianGroup {
    let n = q.degree;
    let k = q.gens.len();
    if n <= 1 {
        return AbelianGroup::trivial();
    }
    // exponent vectors along a spanning tree of the Cayley graph
    let mut vec_of: Vec<Option<Vec<i64>>> = vec![None; n];
    vec_of[0] = Some(vec![0; k]);
    let mut order = vec![0u32];
    let mut idx = 0;
    while idx < order.len() {
        let p = order[idx];
        for (i, s) in q.gens.iter().enumerate() {
            let t = s.apply(p) as usize;
            if vec_of[t].is_none() {
                let mut v = vec_of[p as usize].clone().expect("visited");
                v[i] += 1;
                vec_of[t] = Some(v);
                order.push(t as u32);
            }
        }
        idx += 1;
    }
    let mut lattice = RelationLattice::new(k, Some(n as u64));
    for p in 0..n {
        let vp = vec_of[p].as_ref().expect("regular action is transitive");
        for (i, s) in q.gens.iter().enumerate() {
            let t = s.apply(p as u32) as usize;
            let vt = vec_of[t].as_ref().expect("transitive");
            let row: Vec<(usize, i64)> = (0..k)
                .map(|j| (j, vp[j] + i64::from(j == i) - vt[j]))
                .filter(|&(_, v)| v != 0)
                .collect();
            if !row.is_empty() {
                lattice.add_sparse(&row);
            }
        }
    }
    lattice.finish()
}

#[cfg(test)]
mod tests;
