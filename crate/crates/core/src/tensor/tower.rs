//! Iterated tensor powers `⊗ⁿG = (⊗ⁿ⁻¹G) ⊗ G`.
//!
//! Level one is `G` itself. Level `k + 1` is the tensor product of level `k`
//! with `G`, where `G` acts on level `k` diagonally and level `k` acts on
//! `G` through conjugation by `λ_k`. The map `λ_{k+1}` sends `m ⊗ g` to
//! `[λ_k(m), g]`, so its image is `γ_{k+1}(G)`.

use std::sync::Arc;

use super::{build_eta, BuildLimits, TensorGroup};
use crate::actions::{conjugation_pair, ActionPair, CompatReport, PairKind};
use crate::error::{Error, Result};
use crate::group::FinGroup;
use crate::permgrp::GroupHom;
use crate::perm::Perm;

#[derive(Debug)]
pub struct TowerLevel {
    pub n: usize,
    pub power: Arc<FinGroup>,
    /// `λ_n` as element values in `G`.
    pub lambda: Vec<u32>,
    /// The construction that produced this level; absent for level one.
    pub tensor: Option<TensorGroup>,
}

impl TowerLevel {
    pub fn order(&self) -> usize {
        self.power.order()
    }

    pub fn compatibility(&self) -> Option<&CompatReport> {
        self.tensor.as_ref().map(TensorGroup::compatibility)
    }
}

/// Levels `1..=n` that could be built, and the error that stopped the
/// construction early, if any.
#[derive(Debug)]
pub struct TensorPowerTower {
    g: Arc<FinGroup>,
    levels: Vec<TowerLevel>,
    stopped: Option<Error>,
}

impl TensorPowerTower {
    pub fn group(&self) -> &Arc<FinGroup> {
        &self.g
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> Option<&TowerLevel> {
        n.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    pub fn top(&self) -> &TowerLevel {
        self.levels.last().expect("level one always exists")
    }

    pub fn stopped(&self) -> Option<&Error> {
        self.stopped.as_ref()
    }

    pub fn is_complete(&self) -> bool {
        self.stopped.is_none()
    }

    /// `λ_n` as a verified homomorphism between regular representations.
    pub fn lambda_map(&self, n: usize) -> Result<GroupHom> {
        let level = self.level(n).ok_or_else(|| Error::Invalid(format!("level {n} was not built")))?;
        let m = &level.power;
        let images: Vec<Perm> = m.generators().iter().map(|&x| self.g.element_perm(level.lambda[x as usize])).collect();
        GroupHom::unverified(m.presentation(), m.perm_group(), images)?.verify()
    }
}

/// Pair `(M, G)` for the next level, built from the current top.
fn next_pair(g: &Arc<FinGroup>, top: &TowerLevel) -> Result<ActionPair> {
    let m = top.power.clone();
    let right_on_left = match &top.tensor {
        None => return Ok(conjugation_pair(g.clone())),
        Some(t) => g.generators().iter().map(|&x| t.right_action_perm(x)).collect::<Result<Vec<_>>>()?,
    };
    let left_on_right: Vec<Vec<u32>> = m
        .generators()
        .iter()
        .map(|&s| {
            let a = top.lambda[s as usize];
            (0..g.order() as u32).map(|x| g.conj(x, a)).collect()
        })
        .collect();
    ActionPair::from_element_perms(m, g.clone(), right_on_left, left_on_right, PairKind::General)
}

/// Builds `⊗ᵏG` for `k = 1..=n`. Limit errors stop the tower and are kept
/// in the result; other errors are returned.
pub fn tensor_power(g: Arc<FinGroup>, n: usize, limits: &BuildLimits) -> Result<TensorPowerTower> {
    if n == 0 {
        return Err(Error::Invalid("tensor power must be at least 1".into()));
    }
    let identity: Vec<u32> = (0..g.order() as u32).collect();
    let mut tower = TensorPowerTower {
        g: g.clone(),
        levels: vec![TowerLevel { n: 1, power: g.clone(), lambda: identity, tensor: None }],
        stopped: None,
    };
    for k in 2..=n {
        let built = next_pair(&g, tower.top()).and_then(|pair| build_eta(pair, limits));
        match built {
            Ok(t) => {
                let lambda = t.lambda_prime_values().to_vec();
                tower.levels.push(TowerLevel { n: k, power: t.tensor().clone(), lambda, tensor: Some(t) });
            }
            Err(e) if e.is_limit() => {
                tower.stopped = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(tower)
}
