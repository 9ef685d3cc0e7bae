//! Deterministic Schreier–Sims with Schreier-vector transversals.

use crate::perm::Perm;

const NONE: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub(crate) base: u32,
    pub(crate) gens: Vec<Perm>,
    inv: Vec<Perm>,
    pub(crate) orbit: Vec<u32>,
    /// Index of the generator whose image reached a point, `ROOT` for the
    /// base point, `NONE` outside the orbit.
    sv: Vec<u32>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Level {
        let mut sv = vec![NONE; degree];
        sv[base as usize] = ROOT;
        Level { base, gens: Vec::new(), inv: Vec::new(), orbit: vec![base], sv }
    }

    fn push_gen(&mut self, g: Perm) {
        self.inv.push(g.inverse());
        self.gens.push(g);
        self.extend_orbit();
    }

    fn extend_orbit(&mut self) {
        let mut k = 0;
        while k < self.orbit.len() {
            let p = self.orbit[k];
            for (i, g) in self.gens.iter().enumerate() {
                let q = g.apply(p);
                if self.sv[q as usize] == NONE {
                    self.sv[q as usize] = i as u32;
                    self.orbit.push(q);
                }
            }
            k += 1;
        }
    }

    #[inline]
    pub(crate) fn contains(&self, p: u32) -> bool {
        self.sv[p as usize] != NONE
    }

    /// Transversal element mapping the base point to `p`.
    pub(crate) fn transversal(&self, p: u32) -> Perm {
        let mut path = Vec::new();
        let mut q = p;
        while self.sv[q as usize] != ROOT {
            let i = self.sv[q as usize] as usize;
            path.push(i);
            q = self.inv[i].apply(q);
        }
        let degree = self.sv.len();
        let mut acc: Vec<u32> = (0..degree as u32).collect();
        for &i in path.iter().rev() {
            for x in acc.iter_mut() {
                *x = self.gens[i].apply(*x);
            }
        }
        Perm::from_images_unchecked(acc)
    }

    /// Replaces `g` by `g * u_p^-1` where `p` is the image of the base point.
    fn strip(&self, g: &mut [u32], p: u32) {
        let mut q = p;
        while self.sv[q as usize] != ROOT {
            let i = self.sv[q as usize] as usize;
            let inv = &self.inv[i];
            for x in g.iter_mut() {
                *x = inv.apply(*x);
            }
            q = inv.apply(q);
        }
    }

    /// Schreier generators trivially equal to the identity come from tree
    /// edges.
    fn is_tree_edge(&self, p: u32, gen: usize) -> bool {
        let q = self.gens[gen].apply(p);
        self.sv[q as usize] == gen as u32 && q != self.base
    }
}

#[derive(Clone, Debug)]
pub(crate) struct StabChain {
    pub(crate) degree: usize,
    pub(crate) levels: Vec<Level>,
}

impl StabChain {
    /// Builds a chain for `<gens>`. The base starts with `prefix`; when
    /// `certified` is set, `prefix` is known to be a base for the group and
    /// no further points are added. `known_order` allows early exit.
    pub(crate) fn build(
        degree: usize,
        gens: &[Perm],
        prefix: &[u32],
        certified: bool,
        known_order: Option<u64>,
    ) -> StabChain {
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<u32> = prefix.to_vec();
        if !certified {
            for g in &gens {
                if base.iter().all(|&b| g.apply(b) == b) {
                    base.push(g.first_moved().expect("non-identity"));
                }
            }
        }
        let mut chain = StabChain { degree, levels: base.iter().map(|&b| Level::new(b, degree)).collect() };
        for g in &gens {
            for l in 0..chain.levels.len() {
                chain.levels[l].push_gen(g.clone());
                if g.apply(chain.levels[l].base) != chain.levels[l].base {
                    break;
                }
            }
        }
        if chain.levels.is_empty() {
            return chain;
        }
        let mut i = chain.levels.len() - 1;
        'outer: loop {
            if chain.complete_by_order(known_order) {
                break;
            }
            let last = chain.levels.len() - 1;
            if !(certified && i == last) {
                let level = &chain.levels[i];
                let orbit = level.orbit.clone();
                let ngens = level.gens.len();
                for &p in &orbit {
                    let up = chain.levels[i].transversal(p);
                    for s in 0..ngens {
                        if chain.levels[i].is_tree_edge(p, s) {
                            continue;
                        }
                        let h = up.mul(&chain.levels[i].gens[s]);
                        let q = h.apply(chain.levels[i].base);
                        let mut h = h.images().to_vec();
                        chain.levels[i].strip(&mut h, q);
                        let (residue, j) = chain.sift_from(h, i + 1);
                        if let Some(y) = residue {
                            if j == chain.levels.len() {
                                let b = y.first_moved().expect("non-identity residue");
                                chain.levels.push(Level::new(b, degree));
                            }
                            for l in i + 1..=j {
                                chain.levels[l].push_gen(y.clone());
                            }
                            i = j;
                            continue 'outer;
                        }
                    }
                }
            }
            if i == 0 {
                break;
            }
            i -= 1;
        }
        chain
    }

    fn complete_by_order(&self, known_order: Option<u64>) -> bool {
        match known_order {
            Some(n) => self.order_u128() == u128::from(n),
            None => false,
        }
    }

    /// Sifts through levels `start..`; returns the nontrivial residue and the
    /// level at which sifting stopped.
    fn sift_from(&self, mut g: Vec<u32>, start: usize) -> (Option<Perm>, usize) {
        for j in start..self.levels.len() {
            let level = &self.levels[j];
            let p = g[level.base as usize];
            if !level.contains(p) {
                return (Some(Perm::from_images_unchecked(g)), j);
            }
            level.strip(&mut g, p);
        }
        let identity = g.iter().enumerate().all(|(k, &x)| k as u32 == x);
        if identity {
            (None, self.levels.len())
        } else {
            (Some(Perm::from_images_unchecked(g)), self.levels.len())
        }
    }

    pub(crate) fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift_from(g.images().to_vec(), 0).0.is_none()
    }

    pub(crate) fn order_u128(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub(crate) fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Coset representative words for sifting: returns the list of
    /// transversal points at each level, or `None` if `g` is not a member.
    pub(crate) fn sift_points(&self, g: &Perm) -> Option<Vec<u32>> {
        let mut h = g.images().to_vec();
        let mut points = Vec::with_capacity(self.levels.len());
        for level in &self.levels {
            let p = h[level.base as usize];
            if !level.contains(p) {
                return None;
            }
            points.push(p);
            level.strip(&mut h, p);
        }
        h.iter().enumerate().all(|(k, &x)| k as u32 == x).then_some(points)
    }

    /// All group elements (caller bounds the order).
    pub(crate) fn elements(&self) -> Vec<Perm> {
        let mut elems = vec![Perm::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let reps: Vec<Perm> = level.orbit.iter().map(|&p| level.transversal(p)).collect();
            elems = elems.iter().flat_map(|e| reps.iter().map(move |u| e.mul(u))).collect();
        }
        elems
    }
}
