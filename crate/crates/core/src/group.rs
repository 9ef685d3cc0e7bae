//! Finite presented groups with an explicit regular coset table.
//!
//! Elements are numbered `0..order` by the standardized table, with `0` the
//! identity. Each element carries the Schreier word along the breadth-first
//! tree of the table, so multiplication is a table walk.

use std::collections::VecDeque;
use std::sync::OnceLock;

use crate::coset_enum::{enumerate, CosetTable, EnumLimits};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::permgrp::PermGroup;
use crate::presentation::{Presentation, Word};

/// Element count up to which a full multiplication table is stored.
pub const MUL_TABLE_LIMIT: usize = 1024;

const ROOT: u32 = u32::MAX;

#[derive(Debug)]
pub struct FinGroup {
    names: Vec<String>,
    presentation: OnceLock<Presentation>,
    table: CosetTable,
    parent: Vec<u32>,
    letter: Vec<u32>,
    inverse: Vec<u32>,
    mul_table: Option<Vec<u32>>,
    perm: OnceLock<PermGroup>,
}

impl FinGroup {
    /// Enumerates the group presented by `p`.
    pub fn from_presentation(p: &Presentation, limits: EnumLimits) -> Result<FinGroup> {
        let table = enumerate(p, &[], limits)?;
        let g = FinGroup::from_regular_table(p.names().to_vec(), table)?;
        let _ = g.presentation.set(p.clone());
        Ok(g)
    }

    /// Wraps the regular table of a group. A presentation is derived from
    /// the Cayley graph on first request.
    pub fn from_regular_table(names: Vec<String>, table: CosetTable) -> Result<FinGroup> {
        if !table.is_complete() {
            return Err(Error::IncompleteTable);
        }
        if names.len() != table.generator_count() {
            return Err(Error::Invalid("generator names and table disagree".into()));
        }
        let n = table.coset_count();
        let cols = table.column_count();
        let mut parent = vec![ROOT; n];
        let mut letter = vec![ROOT; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for col in 0..cols as u32 {
                let d = table.get(c, col) as usize;
                if !seen[d] {
                    seen[d] = true;
                    parent[d] = c as u32;
                    letter[d] = col;
                    queue.push_back(d);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Invalid("table is not transitive".into()));
        }
        let mut g = FinGroup {
            names,
            presentation: OnceLock::new(),
            table,
            parent,
            letter,
            inverse: Vec::new(),
            mul_table: None,
            perm: OnceLock::new(),
        };
        let inverse: Vec<u32> = (0..n as u32)
            .map(|e| {
                let letters: Vec<u32> = g.letters(e).into_iter().rev().map(|l| l ^ 1).collect();
                g.table.apply_letters(0, letters) as u32
            })
            .collect();
        g.inverse = inverse;
        // the table is regular only if every element acts freely; check that
        // right multiplication by the inverse returns to the identity
        for e in 0..n as u32 {
            if g.walk(e, g.inverse[e as usize]) != 0 {
                return Err(Error::Invalid("table is not a regular representation".into()));
            }
        }
        if n <= MUL_TABLE_LIMIT {
            let mut mt = vec![0u32; n * n];
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    mt[a as usize * n + b as usize] = g.walk(a, b);
                }
            }
            g.mul_table = Some(mt);
        }
        Ok(g)
    }

    pub fn trivial() -> FinGroup {
        let p = Presentation::new(Vec::new(), Vec::new()).expect("empty presentation");
        FinGroup::from_presentation(&p, EnumLimits::default()).expect("trivial group")
    }

    pub fn order(&self) -> usize {
        self.table.coset_count()
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    /// Element of generator `i`.
    pub fn generator(&self, i: usize) -> u32 {
        self.table.get(0, 2 * i as u32)
    }

    pub fn generators(&self) -> Vec<u32> {
        (0..self.generator_count()).map(|i| self.generator(i)).collect()
    }

    /// Image of element `e` under the letter `l` (column of the table).
    #[inline]
    pub fn apply_letter(&self, e: u32, l: u32) -> u32 {
        self.table.get(e as usize, l)
    }

    /// Letters of the Schreier word of `e`.
    pub fn letters(&self, e: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut c = e;
        while self.parent[c as usize] != ROOT {
            out.push(self.letter[c as usize]);
            c = self.parent[c as usize];
        }
        out.reverse();
        out
    }

    pub fn word(&self, e: u32) -> Word {
        Word::from_letters(self.letters(e))
    }

    fn walk(&self, a: u32, b: u32) -> u32 {
        self.table.apply_letters(a as usize, self.letters(b)) as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul_table {
            Some(mt) => mt[a as usize * self.order() + b as usize],
            None => self.walk(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn pow(&self, a: u32, k: i64) -> u32 {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut acc = 0;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    /// `b^-1 a b`.
    pub fn conj(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(b), a), b)
    }

    /// `a^-1 b^-1 a b`.
    pub fn comm(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    /// Left-normed commutator `[x1, x2, ..., xk]`; a single entry is itself.
    pub fn comm_seq(&self, xs: &[u32]) -> u32 {
        let mut it = xs.iter();
        let mut acc = it.next().copied().unwrap_or(0);
        for &x in it {
            acc = self.comm(acc, x);
        }
        acc
    }

    pub fn eval_word(&self, w: &Word) -> u32 {
        self.table.apply_word(0, w) as u32
    }

    pub fn element_order(&self, a: u32) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> u64 {
        (0..self.order() as u32).map(|x| self.element_order(x)).fold(1, num_integer::lcm)
    }

    /// Length of the lower central series, or `None` if it stalls above 1.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let series = self.lower_central_series();
        (series.last().map(Subgroup::order) == Some(1)).then(|| series.len() - 1)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter().enumerate().all(|(i, &a)| gens[i + 1..].iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Regular right action: element `a` sends `x` to `x a`.
    pub fn element_perm(&self, a: u32) -> Perm {
        Perm::from_images_unchecked((0..self.order() as u32).map(|x| self.mul(x, a)).collect())
    }

    /// Inverse of [`element_perm`](Self::element_perm) on the regular representation.
    pub fn perm_element(&self, p: &Perm) -> u32 {
        p.apply(0)
    }

    /// The regular permutation representation.
    pub fn perm_group(&self) -> &PermGroup {
        self.perm.get_or_init(|| PermGroup::from_coset_table(&self.table).expect("complete table"))
    }

    /// Elements of a subgroup of [`perm_group`](Self::perm_group).
    pub fn elements_of(&self, h: &PermGroup) -> Subgroup {
        let gens: Vec<u32> = h.generators().iter().map(|p| self.perm_element(p)).collect();
        self.subgroup(&gens)
    }

    pub fn subgroup(&self, gens: &[u32]) -> Subgroup {
        let mut s = Subgroup::trivial(self.order());
        for &g in gens {
            s.add_generator(self, g);
        }
        s
    }

    pub fn whole(&self) -> Subgroup {
        self.subgroup(&self.generators())
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(&self, seeds: &[u32]) -> Subgroup {
        let gens = self.generators();
        let mut s = Subgroup::trivial(self.order());
        let mut queue: VecDeque<u32> = VecDeque::new();
        for &x in seeds {
            if !s.contains(x) {
                s.add_generator(self, x);
                queue.push_back(x);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let c = self.conj(x, g);
                if !s.contains(c) {
                    s.add_generator(self, c);
                    queue.push_back(c);
                }
            }
        }
        s
    }

    /// `[a, b]` for subgroups normalized by the whole group.
    pub fn commutator_subgroup(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let seeds: Vec<u32> = a.gens.iter().flat_map(|&x| b.gens.iter().map(move |&y| (x, y))).map(|(x, y)| self.comm(x, y)).collect();
        self.normal_closure(&seeds)
    }

    /// `γ₁ ⊇ γ₂ ⊇ ...` ending at the first repeated term.
    pub fn lower_central_series(&self) -> Vec<Subgroup> {
        let whole = self.whole();
        let mut series = vec![whole.clone()];
        loop {
            let last = series.last().expect("nonempty");
            let next = self.commutator_subgroup(last, &whole);
            if next.order() == last.order() {
                return series;
            }
            series.push(next);
        }
    }

    /// `γ_k` for `k >= 1`, continuing the stable tail.
    pub fn gamma(&self, k: usize) -> Subgroup {
        let series = self.lower_central_series();
        series[(k.max(1) - 1).min(series.len() - 1)].clone()
    }

    /// `Z₀ ⊆ Z₁ ⊆ ...` ending at the first repeated term.
    pub fn upper_central_series(&self) -> Vec<Subgroup> {
        let gens = self.generators();
        let mut series = vec![Subgroup::trivial(self.order())];
        loop {
            let z = series.last().expect("nonempty");
            let mut next = z.clone();
            for x in 0..self.order() as u32 {
                if !next.contains(x) && gens.iter().all(|&s| z.contains(self.comm(x, s))) {
                    next.add_generator(self, x);
                }
            }
            if next.order() == z.order() {
                return series;
            }
            series.push(next);
        }
    }

    /// `Z_k` for `k >= 0`, continuing the stable tail.
    pub fn upper_central(&self, k: usize) -> Subgroup {
        let series = self.upper_central_series();
        series[k.min(series.len() - 1)].clone()
    }

    pub fn center(&self) -> Subgroup {
        self.upper_central(1)
    }

    /// `self / n`, presented by adding the generator words of `n` as
    /// relators, together with the projection of every element.
    pub fn quotient(&self, n: &Subgroup, limits: EnumLimits) -> Result<(FinGroup, Vec<u32>)> {
        let gens = self.generators();
        for &x in &n.gens {
            if gens.iter().any(|&g| !n.contains(self.conj(x, g))) {
                return Err(Error::NotNormal);
            }
        }
        let p = self.presentation().with_relators(n.gens.iter().map(|&x| self.word(x)));
        let q = FinGroup::from_presentation(&p, limits)?;
        if q.order() * n.order() != self.order() {
            return Err(Error::Internal("quotient order mismatch".into()));
        }
        let proj = (0..self.order() as u32).map(|e| q.table.apply_letters(0, self.letters(e)) as u32).collect();
        Ok((q, proj))
    }

    /// Extends generator images to every element along the Schreier tree,
    /// then checks `φ(e s) = φ(e) φ(s)` on every Cayley-graph edge, which is
    /// equivalent to `φ` being a homomorphism.
    pub fn extend_hom(
        &self,
        images: &[u32],
        mul: impl Fn(u32, u32) -> u32,
        inv: impl Fn(u32) -> u32,
    ) -> Result<Vec<u32>> {
        if images.len() != self.generator_count() {
            return Err(Error::Invalid("wrong number of generator images".into()));
        }
        let letter_image: Vec<u32> = images.iter().flat_map(|&x| [x, inv(x)]).collect();
        let n = self.order();
        let mut map = vec![0u32; n];
        // standardized tables list parents before children
        for e in 1..n {
            let p = self.parent[e];
            if p as usize >= e {
                return Err(Error::Internal("table is not in breadth-first order".into()));
            }
            map[e] = mul(map[p as usize], letter_image[self.letter[e] as usize]);
        }
        for e in 0..n as u32 {
            for (g, &img) in images.iter().enumerate() {
                let f = self.apply_letter(e, 2 * g as u32);
                if map[f as usize] != mul(map[e as usize], img) {
                    let rel = self.word(e).mul(&Word::generator(g)).mul(&self.word(f).inverse());
                    return Err(Error::RelatorViolation { index: e as usize, relator: rel.display_with(&self.names).to_string() });
                }
            }
        }
        Ok(map)
    }

    /// The presentation this group was built from, or one read off the
    /// Cayley graph and pruned to a short relator list that still
    /// enumerates to the right order.
    pub fn presentation(&self) -> &Presentation {
        self.presentation.get_or_init(|| self.cayley_presentation())
    }

    fn cayley_presentation(&self) -> Presentation {
        let n = self.order();
        let mut relators: Vec<Word> = Vec::new();
        for e in 0..n as u32 {
            for g in 0..self.generator_count() {
                let f = self.apply_letter(e, 2 * g as u32);
                if self.parent[f as usize] == e && self.letter[f as usize] == 2 * g as u32 {
                    continue;
                }
                let r = self.word(e).mul(&Word::generator(g)).mul(&self.word(f).inverse());
                if !r.is_identity() {
                    relators.push(r);
                }
            }
        }
        relators.sort_by_key(|w| (w.len(), w.letters().collect::<Vec<_>>()));
        relators.dedup();
        let full = Presentation::new(self.names.clone(), relators.clone()).expect("valid generators");
        let mut take = (2 * self.generator_count()).max(4);
        while take < relators.len() {
            let p = Presentation::new(self.names.clone(), relators[..take].to_vec()).expect("valid generators");
            let limits = EnumLimits::with_max_cosets(16 * n + 64);
            if let Ok(t) = enumerate(&p, &[], limits) {
                if t.coset_count() == n {
                    return p;
                }
            }
            take *= 2;
        }
        full
    }
}

/// A subgroup given by its element list, with a membership mask and the
/// generators it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    elements: Vec<u32>,
    mask: Vec<bool>,
    gens: Vec<u32>,
}

impl Subgroup {
    pub fn trivial(ambient_order: usize) -> Subgroup {
        let mut mask = vec![false; ambient_order];
        if ambient_order > 0 {
            mask[0] = true;
        }
        Subgroup { elements: vec![0], mask, gens: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: u32) -> bool {
        self.mask[e as usize]
    }

    /// Elements in discovery order; the identity is first.
    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&e| other.contains(e))
    }

    /// Adds a generator and closes under right multiplication.
    pub fn add_generator(&mut self, g: &FinGroup, x: u32) {
        if self.contains(x) {
            return;
        }
        self.gens.push(x);
        let start = self.elements.len();
        for i in 0..start {
            let y = g.mul(self.elements[i], x);
            if !self.mask[y as usize] {
                self.mask[y as usize] = true;
                self.elements.push(y);
            }
        }
        let mut k = start;
        while k < self.elements.len() {
            for j in 0..self.gens.len() {
                let y = g.mul(self.elements[k], self.gens[j]);
                if !self.mask[y as usize] {
                    self.mask[y as usize] = true;
                    self.elements.push(y);
                }
            }
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn group(text: &str) -> FinGroup {
        FinGroup::from_presentation(&parse_presentation(text).unwrap(), EnumLimits::default()).unwrap()
    }

    #[test]
    fn arithmetic_matches_words() {
        let g = group("<a,b | a^4, b^2, (a b)^3>");
        assert_eq!(g.order(), 24);
        for a in 0..24 {
            assert_eq!(g.mul(a, g.inv(a)), 0);
            assert_eq!(g.eval_word(&g.word(a)), a);
            for b in 0..24 {
                assert_eq!(g.mul(a, b), g.eval_word(&g.word(a).mul(&g.word(b))));
            }
        }
    }

    #[test]
    fn series_and_center() {
        let d4 = group("<a,b | a^4, b^2, (a b)^2>");
        let orders = |s: Vec<Subgroup>| s.iter().map(Subgroup::order).collect::<Vec<_>>();
        assert_eq!(orders(d4.lower_central_series()), vec![8, 2, 1]);
        assert_eq!(orders(d4.upper_central_series()), vec![1, 2, 8]);
        let s3 = group("<r,s | r^3, s^2, (r s)^2>");
        assert_eq!(orders(s3.lower_central_series()), vec![6, 3]);
        assert_eq!(orders(s3.upper_central_series()), vec![1]);
        assert_eq!(s3.gamma(4).order(), 3);
    }

    #[test]
    fn quotient_by_center() {
        let d4 = group("<a,b | a^4, b^2, (a b)^2>");
        let (q, proj) = d4.quotient(&d4.center(), EnumLimits::default()).unwrap();
        assert_eq!(q.order(), 4);
        assert!(q.is_abelian());
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(proj[d4.mul(a, b) as usize], q.mul(proj[a as usize], proj[b as usize]));
            }
        }
    }

    #[test]
    fn cayley_presentation_reenumerates() {
        let g = group("<a,b | a^3, b^2, (a b)^3>");
        let sub = FinGroup::from_regular_table(g.names().to_vec(), g.table().clone()).unwrap();
        let p = sub.presentation();
        let t = enumerate(p, &[], EnumLimits::default()).unwrap();
        assert_eq!(t.coset_count(), 12);
    }

    #[test]
    fn hom_extension_checks_edges() {
        let c4 = group("<a | a^4>");
        let c2 = group("<a | a^2>");
        let ok = c4.extend_hom(&[c2.generator(0)], |x, y| c2.mul(x, y), |x| c2.inv(x)).unwrap();
        assert_eq!(ok.iter().filter(|&&x| x == 0).count(), 2);
        assert!(c2.extend_hom(&[c4.generator(0)], |x, y| c4.mul(x, y), |x| c4.inv(x)).is_err());
    }
}
