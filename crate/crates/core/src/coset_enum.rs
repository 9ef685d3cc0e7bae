//! Todd–Coxeter coset enumeration.
//!
//! Two strategies are provided. HLT scans every relator at every live coset
//! and fills gaps by defining new cosets; Felsch defines one coset at a time
//! and closes each definition under all relator consequences before moving
//! on. Coincidences are resolved with a union-find forest and an immediate
//! queue flush in both modes.
//!
//! Tables are standardized on completion: cosets are renumbered in
//! breadth-first discovery order from the subgroup coset, scanning columns
//! in generator order (`x0, x0^-1, x1, x1^-1, ...`).

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::{Presentation, Word};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Hlt,
    Felsch,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hlt" => Ok(Strategy::Hlt),
            "felsch" => Ok(Strategy::Felsch),
            other => Err(format!("unknown strategy `{other}` (expected hlt or felsch)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnumLimits {
    pub max_cosets: usize,
    pub strategy: Strategy,
}

impl EnumLimits {
    pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

    pub fn with_max_cosets(max_cosets: usize) -> EnumLimits {
        EnumLimits { max_cosets, ..EnumLimits::default() }
    }
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_cosets: Self::DEFAULT_MAX_COSETS, strategy: Strategy::Hlt }
    }
}

/// A complete, standardized coset table.
///
/// Column `2*g` is generator `g`, column `2*g + 1` its inverse. Row 0 is the
/// subgroup coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    generators: usize,
    rows: Vec<u32>,
    count: usize,
    complete: bool,
}

impl CosetTable {
    /// Builds a table from explicit rows. Rows must be complete and each
    /// generator column must be a permutation whose inverse sits in the
    /// paired column.
    pub fn from_rows(generators: usize, rows: Vec<u32>) -> Result<CosetTable> {
        let cols = 2 * generators;
        let count = if cols == 0 { 1 } else { rows.len() / cols };
        if cols > 0 && (rows.len() % cols != 0 || count == 0) {
            return Err(Error::Invalid("ragged coset table".into()));
        }
        for c in 0..count {
            for g in 0..generators {
                let d = rows[c * cols + 2 * g];
                if d as usize >= count || rows[d as usize * cols + 2 * g + 1] != c as u32 {
                    return Err(Error::Invalid("coset table columns are not mutually inverse".into()));
                }
            }
        }
        Ok(CosetTable { generators, rows, count, complete: true })
    }

    /// The single-coset table of a group with `generators` generators all
    /// acting trivially.
    pub fn trivial(generators: usize) -> CosetTable {
        CosetTable { generators, rows: vec![0; 2 * generators], count: 1, complete: true }
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn column_count(&self) -> usize {
        2 * self.generators
    }

    pub fn coset_count(&self) -> usize {
        self.count
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    #[inline]
    pub fn get(&self, coset: usize, column: u32) -> u32 {
        self.rows[coset * 2 * self.generators + column as usize]
    }

    #[inline]
    pub fn apply_letters<I: IntoIterator<Item = u32>>(&self, coset: usize, letters: I) -> usize {
        let cols = 2 * self.generators;
        let mut c = coset;
        for l in letters {
            c = self.rows[c * cols + l as usize] as usize;
        }
        c
    }

    pub fn apply_word(&self, coset: usize, w: &Word) -> usize {
        let cols = 2 * self.generators;
        let mut c = coset;
        for &(g, e) in w.syllables() {
            let col = 2 * g as usize + usize::from(e < 0);
            for _ in 0..e.unsigned_abs() {
                c = self.rows[c * cols + col] as usize;
            }
        }
        c
    }

    /// Image of every coset under one generator.
    pub fn generator_images(&self, g: usize) -> Vec<u32> {
        (0..self.count).map(|c| self.get(c, 2 * g as u32)).collect()
    }
}

/// Enumerates the cosets of the subgroup generated by `subgroup_words` in
/// the group presented by `p`.
pub fn enumerate(p: &Presentation, subgroup_words: &[Word], limits: EnumLimits) -> Result<CosetTable> {
    if limits.max_cosets == 0 {
        return Err(Error::Invalid("max_cosets must be at least 1".into()));
    }
    let gens = p.generator_count();
    if gens == 0 {
        return Ok(CosetTable::trivial(0));
    }
    let relators = prepare_relators(p.relators());
    let subgroup: Vec<Vec<u32>> = subgroup_words
        .iter()
        .map(|w| w.letters().collect::<Vec<_>>())
        .filter(|w| !w.is_empty())
        .collect();
    let mut e = Enumerator::new(gens, relators, limits);
    match limits.strategy {
        Strategy::Hlt => e.run_hlt(&subgroup)?,
        Strategy::Felsch => e.run_felsch(&subgroup)?,
    }
    Ok(e.standardize())
}

/// Cyclically reduced, deduplicated relators, shortest first.
fn prepare_relators(relators: &[Word]) -> Vec<Vec<u32>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in relators {
        let letters = r.cyclic_letters();
        if letters.is_empty() {
            continue;
        }
        let key = canonical_cyclic(&letters);
        if seen.insert(key) {
            out.push(letters);
        }
    }
    out.sort_by_key(|r| r.len());
    out
}

/// Least rotation of the word or of its inverse.
fn canonical_cyclic(w: &[u32]) -> Vec<u32> {
    let inv: Vec<u32> = w.iter().rev().map(|l| l ^ 1).collect();
    let mut best: Option<Vec<u32>> = None;
    for src in [w, &inv[..]] {
        for i in 0..src.len() {
            let rot: Vec<u32> = src[i..].iter().chain(&src[..i]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

struct Enumerator {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    max: usize,
    strategy: Strategy,
    relators: Vec<Vec<u32>>,
    /// Upper bound on cosets defined while processing one coset.
    margin: usize,
    /// Cyclic conjugates of relators and their inverses, grouped by first letter.
    by_first: Vec<Vec<Vec<u32>>>,
    queue: Vec<u32>,
    deductions: Vec<(u32, u32)>,
}

impl Enumerator {
    fn new(gens: usize, relators: Vec<Vec<u32>>, limits: EnumLimits) -> Enumerator {
        let cols = 2 * gens;
        let mut by_first: Vec<Vec<Vec<u32>>> = vec![Vec::new(); cols];
        if limits.strategy == Strategy::Felsch {
            let mut seen = BTreeSet::new();
            for r in &relators {
                let inv: Vec<u32> = r.iter().rev().map(|l| l ^ 1).collect();
                for src in [r, &inv] {
                    for i in 0..src.len() {
                        let rot: Vec<u32> = src[i..].iter().chain(&src[..i]).copied().collect();
                        if seen.insert(rot.clone()) {
                            by_first[rot[0] as usize].push(rot);
                        }
                    }
                }
            }
        }
        let mut e = Enumerator {
            cols,
            table: Vec::with_capacity(cols * 1024),
            parent: Vec::with_capacity(1024),
            live: 0,
            max: limits.max_cosets,
            strategy: limits.strategy,
            margin: relators.iter().map(Vec::len).sum::<usize>() + cols,
            relators,
            by_first,
            queue: Vec::new(),
            deductions: Vec::new(),
        };
        e.table.resize(cols, NONE);
        e.parent.push(0);
        e.live = 1;
        e
    }

    #[inline]
    fn t(&self, c: u32, x: u32) -> u32 {
        self.table[c as usize * self.cols + x as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, x: u32, d: u32) {
        self.table[c as usize * self.cols + x as usize] = d;
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn allocated(&self) -> usize {
        self.parent.len()
    }

    fn define(&mut self, c: u32, x: u32) -> Result<()> {
        if self.allocated() >= self.max {
            return Err(Error::LimitExceeded { max_cosets: self.max });
        }
        let n = self.allocated() as u32;
        self.table.resize(self.table.len() + self.cols, NONE);
        self.parent.push(n);
        self.live += 1;
        self.set(c, x, n);
        self.set(n, x ^ 1, c);
        if self.strategy == Strategy::Felsch {
            self.deductions.push((c, x));
        }
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut k = c;
        while self.parent[k as usize] != r {
            let next = self.parent[k as usize];
            self.parent[k as usize] = r;
            k = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let ra = self.rep(a);
        let rb = self.rep(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
            self.live -= 1;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.cols as u32 {
                let d = self.t(g, x);
                if d == NONE {
                    continue;
                }
                if self.t(d, x ^ 1) == g {
                    self.set(d, x ^ 1, NONE);
                }
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mux = self.t(mu, x);
                if mux != NONE {
                    self.merge(nu, mux);
                } else {
                    let nuxi = self.t(nu, x ^ 1);
                    if nuxi != NONE {
                        self.merge(mu, nuxi);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, x ^ 1, mu);
                        if self.strategy == Strategy::Felsch {
                            self.deductions.push((mu, x));
                        }
                    }
                }
            }
        }
        self.queue.clear();
    }

    fn scan_and_fill(&mut self, a: u32, w: &[u32]) -> Result<()> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = a;
        let mut b = a;
        let mut i: isize = 0;
        let mut j: isize = w.len() as isize - 1;
        loop {
            while i <= j {
                let n = self.t(f, w[i as usize]);
                if n == NONE {
                    break;
                }
                f = n;
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i {
                let n = self.t(b, w[j as usize] ^ 1);
                if n == NONE {
                    break;
                }
                b = n;
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            } else if i == j {
                let x = w[i as usize];
                self.set(f, x, b);
                self.set(b, x ^ 1, f);
                if self.strategy == Strategy::Felsch {
                    self.deductions.push((f, x));
                }
                return Ok(());
            } else {
                self.define(f, w[i as usize])?;
            }
        }
    }

    fn scan(&mut self, a: u32, w: &[u32]) {
        let mut f = a;
        let mut i = 0usize;
        let n = w.len();
        while i < n {
            let d = self.t(f, w[i]);
            if d == NONE {
                break;
            }
            f = d;
            i += 1;
        }
        if i == n {
            if f != a {
                self.coincidence(f, a);
            }
            return;
        }
        let mut b = a;
        let mut j = n;
        while j > i {
            let d = self.t(b, w[j - 1] ^ 1);
            if d == NONE {
                break;
            }
            b = d;
            j -= 1;
        }
        if j == i {
            self.coincidence(f, b);
        } else if j == i + 1 {
            self.set(f, w[i], b);
            self.set(b, w[i] ^ 1, f);
            self.deductions.push((f, w[i]));
        }
    }

    fn process_deductions(&mut self) {
        while let Some((a, x)) = self.deductions.pop() {
            if !self.is_live(a) {
                continue;
            }
            let list = std::mem::take(&mut self.by_first[x as usize]);
            for w in &list {
                self.scan(a, w);
                if !self.is_live(a) {
                    break;
                }
            }
            self.by_first[x as usize] = list;
            if !self.is_live(a) {
                continue;
            }
            let b = self.t(a, x);
            if b == NONE {
                continue;
            }
            let list = std::mem::take(&mut self.by_first[(x ^ 1) as usize]);
            for w in &list {
                self.scan(b, w);
                if !self.is_live(b) {
                    break;
                }
            }
            self.by_first[(x ^ 1) as usize] = list;
        }
    }

    fn next_live(&self, from: usize) -> Option<u32> {
        (from..self.allocated()).find(|&c| self.parent[c] == c as u32).map(|c| c as u32)
    }

    /// Removes dead cosets, preserving the order of the live ones. Returns the
    /// new index of `keep`.
    fn compact(&mut self, keep: u32) -> u32 {
        let n = self.allocated();
        let mut map = vec![NONE; n];
        let mut next = 0u32;
        for c in 0..n {
            if self.parent[c] == c as u32 {
                map[c] = next;
                next += 1;
            }
        }
        let cols = self.cols;
        let mut table = vec![NONE; next as usize * cols];
        for c in 0..n {
            if map[c] == NONE {
                continue;
            }
            let nc = map[c] as usize;
            for x in 0..cols {
                let d = self.table[c * cols + x];
                if d != NONE {
                    table[nc * cols + x] = map[d as usize];
                }
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        map[keep as usize]
    }

    fn maybe_compact(&mut self, at: u32) -> u32 {
        let dead = self.allocated() - self.live;
        if dead > 0 && (dead * 4 >= self.allocated() || self.allocated() + self.margin >= self.max) {
            self.compact(at)
        } else {
            at
        }
    }

    fn run_hlt(&mut self, subgroup: &[Vec<u32>]) -> Result<()> {
        for w in subgroup {
            self.scan_and_fill(0, w)?;
        }
        let relators = std::mem::take(&mut self.relators);
        let mut a = self.next_live(0);
        while let Some(mut cur) = a {
            cur = self.maybe_compact(cur);
            for w in &relators {
                self.scan_and_fill(cur, w)?;
                if !self.is_live(cur) {
                    break;
                }
            }
            if self.is_live(cur) {
                for x in 0..self.cols as u32 {
                    if self.t(cur, x) == NONE {
                        self.define(cur, x)?;
                    }
                }
            }
            a = self.next_live(cur as usize + 1);
        }
        self.relators = relators;
        Ok(())
    }

    fn run_felsch(&mut self, subgroup: &[Vec<u32>]) -> Result<()> {
        for w in subgroup {
            self.scan_and_fill(0, w)?;
        }
        self.process_deductions();
        // relators with no cyclic conjugate touched by a definition (only
        // possible for the subgroup coset before anything is defined)
        let relators = self.relators.clone();
        for w in &relators {
            self.scan_and_fill(0, w)?;
        }
        self.process_deductions();
        let mut a = self.next_live(0);
        while let Some(mut cur) = a {
            cur = self.maybe_compact(cur);
            for x in 0..self.cols as u32 {
                if !self.is_live(cur) {
                    break;
                }
                if self.t(cur, x) == NONE {
                    self.define(cur, x)?;
                    self.process_deductions();
                }
            }
            a = self.next_live(cur as usize + 1);
        }
        Ok(())
    }

    fn standardize(&self) -> CosetTable {
        let n = self.allocated();
        let cols = self.cols;
        let start = (0..n as u32).find(|&c| self.is_live(c)).unwrap_or(0);
        let mut map = vec![NONE; n];
        let mut order = Vec::with_capacity(self.live);
        map[start as usize] = 0;
        order.push(start);
        let mut q = VecDeque::from([start]);
        while let Some(c) = q.pop_front() {
            for x in 0..cols as u32 {
                let d = self.t(c, x);
                debug_assert!(d != NONE && self.is_live(d));
                if map[d as usize] == NONE {
                    map[d as usize] = order.len() as u32;
                    order.push(d);
                    q.push_back(d);
                }
            }
        }
        let mut rows = vec![0u32; order.len() * cols];
        for (i, &c) in order.iter().enumerate() {
            for x in 0..cols {
                rows[i * cols + x] = map[self.t(c, x as u32) as usize];
            }
        }
        CosetTable { generators: cols / 2, rows, count: order.len(), complete: true }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn count(text: &str, sub: &[&str], strategy: Strategy) -> Result<usize> {
        let p = parse_presentation(text).unwrap();
        let words: Vec<Word> = sub.iter().map(|s| p.parse_word(s).unwrap()).collect();
        let limits = EnumLimits { max_cosets: 1000, strategy };
        enumerate(&p, &words, limits).map(|t| t.coset_count())
    }

    #[test]
    fn cyclic_five() {
        for s in [Strategy::Hlt, Strategy::Felsch] {
            assert_eq!(count("<a | a^5>", &[], s).unwrap(), 5);
        }
    }

    #[test]
    fn s3_over_reflection() {
        for s in [Strategy::Hlt, Strategy::Felsch] {
            assert_eq!(count("<r,s | r^3, s^2, (r s)^2>", &["s"], s).unwrap(), 3);
            assert_eq!(count("<r,s | r^3, s^2, (r s)^2>", &[], s).unwrap(), 6);
        }
    }

    #[test]
    fn free_group_hits_limit() {
        for s in [Strategy::Hlt, Strategy::Felsch] {
            let err = count("<a,b | >", &[], s).unwrap_err();
            assert_eq!(err, Error::LimitExceeded { max_cosets: 1000 });
        }
    }

    #[test]
    fn trivial_quotient_collapses() {
        for s in [Strategy::Hlt, Strategy::Felsch] {
            assert_eq!(count("<a,b | a^2, b^3, a b>", &[], s).unwrap(), 1);
            assert_eq!(count("<a | a>", &[], s).unwrap(), 1);
        }
    }

    #[test]
    fn standardized_bfs_order() {
        let p = parse_presentation("<a | a^3>").unwrap();
        let t = enumerate(&p, &[], EnumLimits::default()).unwrap();
        assert_eq!(t.generator_images(0), vec![1, 2, 0]);
    }

    #[test]
    fn strategies_agree_on_larger_groups() {
        for text in [
            "<a,b | a^4, b^2, (a b)^3>",
            "<a,b | a^3, b^2, (a b)^5>",
            "<x,y,z | x^3, y^3, z^3, [x,y] z^-1, [x,z], [y,z]>",
        ] {
            let p = parse_presentation(text).unwrap();
            let h = enumerate(&p, &[], EnumLimits { max_cosets: 100_000, strategy: Strategy::Hlt }).unwrap();
            let f = enumerate(&p, &[], EnumLimits { max_cosets: 100_000, strategy: Strategy::Felsch }).unwrap();
            assert_eq!(h.coset_count(), f.coset_count());
            assert_eq!(h, f, "standardized tables must coincide");
        }
    }
}
