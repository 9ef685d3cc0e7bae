use std::sync::OnceLock;

use super::{PermGroup, StabChain};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::{Presentation, Word};

/// A homomorphism from a permutation group, given by the images of its
/// generators. Only verified homomorphisms can be evaluated.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: PermGroup,
    presentation: Option<Presentation>,
    target_degree: usize,
    images: Vec<Perm>,
    verified: bool,
    graph: OnceLock<StabChain>,
}

/// Product of `images` along `word`.
pub fn evaluate_word(word: &Word, images: &[Perm], degree: usize) -> Perm {
    let inverses: Vec<Perm> = images.iter().map(Perm::inverse).collect();
    let mut acc = Perm::identity(degree);
    for &(g, e) in word.syllables() {
        let p = if e > 0 { &images[g as usize] } else { &inverses[g as usize] };
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(p);
        }
    }
    acc
}

/// Checks generator images against the relators of `pres`. The generators
/// of `source` must correspond to those of `pres`.
pub fn define_hom(pres: &Presentation, source: &PermGroup, images: Vec<Perm>) -> Result<GroupHom> {
    GroupHom::unverified(pres, source, images)?.verify()
}

impl GroupHom {
    /// Records generator images without checking relators.
    pub fn unverified(pres: &Presentation, source: &PermGroup, images: Vec<Perm>) -> Result<GroupHom> {
        let n = pres.generator_count();
        if images.len() != n || source.generators().len() != n {
            return Err(Error::Invalid(format!(
                "{} generators in the presentation, {} in the group, {} images",
                n,
                source.generators().len(),
                images.len()
            )));
        }
        let target_degree = images.first().map_or(1, Perm::degree);
        if images.iter().any(|p| p.degree() != target_degree) {
            return Err(Error::Invalid("images have different degrees".into()));
        }
        Ok(GroupHom {
            source: source.clone(),
            presentation: Some(pres.clone()),
            target_degree,
            images,
            verified: false,
            graph: OnceLock::new(),
        })
    }

    /// Checks every relator; on success the hom becomes usable.
    pub fn verify(mut self) -> Result<GroupHom> {
        let pres = self.presentation.as_ref().ok_or(Error::Unverified)?;
        for (index, r) in pres.relators().iter().enumerate() {
            if !evaluate_word(r, &self.images, self.target_degree).is_identity() {
                return Err(Error::RelatorViolation { index, relator: r.display_with(pres.names()).to_string() });
            }
        }
        self.verified = true;
        Ok(self)
    }

    /// A hom known to be well defined, e.g. a group action.
    pub(crate) fn from_action(source: PermGroup, target_degree: usize, images: Vec<Perm>) -> GroupHom {
        GroupHom { source, presentation: None, target_degree, images, verified: true, graph: OnceLock::new() }
    }

    pub fn source(&self) -> &PermGroup {
        &self.source
    }

    pub fn presentation(&self) -> Option<&Presentation> {
        self.presentation.as_ref()
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    pub fn target_degree(&self) -> usize {
        self.target_degree
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    fn require_verified(&self) -> Result<()> {
        if self.verified {
            Ok(())
        } else {
            Err(Error::Unverified)
        }
    }

    pub fn image(&self) -> Result<PermGroup> {
        self.require_verified()?;
        Ok(PermGroup::new(self.target_degree, self.images.iter().filter(|p| !p.is_identity()).cloned().collect()))
    }

    fn graph_gens(&self) -> Vec<Perm> {
        self.source.generators().iter().zip(&self.images).map(|(s, t)| s.direct_sum(t)).collect()
    }

    /// Chain of the graph `{(x, φ(x))}` with the source base first.
    fn graph(&self) -> &StabChain {
        self.graph.get_or_init(|| {
            StabChain::build(
                self.source.degree() + self.target_degree,
                &self.graph_gens(),
                &self.source.base(),
                true,
                Some(self.source.order()),
            )
        })
    }

    pub fn evaluate(&self, x: &Perm) -> Result<Perm> {
        self.require_verified()?;
        if !self.source.contains(x) {
            return Err(Error::NotMember);
        }
        let ds = self.source.degree();
        let chain = self.graph();
        let mut h = x.direct_sum(&Perm::identity(self.target_degree));
        for level in &chain.levels {
            let p = h.apply(level.base);
            if !level.contains(p) {
                return Err(Error::NotMember);
            }
            h = h.mul(&level.transversal(p).inverse());
        }
        // sifting (x, 1) leaves (1, φ(x)^-1)
        if !h.restrict(0, ds).is_identity() {
            return Err(Error::Internal("graph sift left a nontrivial residue".into()));
        }
        Ok(h.restrict(ds, self.target_degree).inverse())
    }

    /// Preimage of the identity: the pointwise stabilizer of the target
    /// points in the graph group.
    pub fn kernel(&self) -> Result<PermGroup> {
        self.require_verified()?;
        let ds = self.source.degree();
        let source_base = self.source.base();
        if source_base.is_empty() {
            return Ok(PermGroup::trivial(ds));
        }
        let target_base: Vec<u32> = self.image()?.base().iter().map(|&b| b + ds as u32).collect();
        let mut prefix = target_base.clone();
        prefix.extend(&source_base);
        let chain = StabChain::build(ds + self.target_degree, &self.graph_gens(), &prefix, true, Some(self.source.order()));
        let gens: Vec<Perm> = chain
            .levels
            .get(target_base.len())
            .map(|l| l.gens.iter().map(|g| g.restrict(0, ds)).collect())
            .unwrap_or_default();
        Ok(PermGroup::new(ds, gens).with_base(source_base))
    }

    /// The hom restricted to a subgroup of the source.
    pub fn restrict(&self, sub: &PermGroup) -> Result<GroupHom> {
        self.require_verified()?;
        if !sub.is_subgroup_of(&self.source) {
            return Err(Error::NotMember);
        }
        let images = sub.generators().iter().map(|g| self.evaluate(g)).collect::<Result<Vec<_>>>()?;
        Ok(GroupHom::from_action(sub.clone(), self.target_degree, images))
    }

    /// `self` followed by `next`; the image of `self` must lie in the source
    /// of `next`.
    pub fn compose(&self, next: &GroupHom) -> Result<GroupHom> {
        self.require_verified()?;
        let images = self.images.iter().map(|p| next.evaluate(p)).collect::<Result<Vec<_>>>()?;
        Ok(GroupHom::from_action(self.source.clone(), next.target_degree, images))
    }
}
