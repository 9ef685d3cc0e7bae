//! Two independent routes to the Schur multiplier `H₂(G)`.
//!
//! The first reads it off the tensor square as `ker λ / Δ`, the kernel of
//! the commutator map on `G ∧ G`. The second works in the normalized bar
//! complex: `H₂(G)` is the torsion subgroup of `C₂ / im ∂₃`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::{AbelianGroup, SmallModLattice};
use crate::error::{Error, Result};
use crate::group::FinGroup;
use crate::tensor::{build_nu, quotient_abelian_invariants, BuildLimits, TensorGroup};

/// The bar complex route refuses groups above this order.
pub const COCYCLE_ORDER_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H2Report {
    pub via_wedge: AbelianGroup,
    pub via_cocycles: AbelianGroup,
    pub agree: bool,
}

/// `H₂(G)` from an already built tensor square.
pub fn h2_from_tensor_square(t: &TensorGroup) -> Result<AbelianGroup> {
    let exterior = t.exterior_square()?;
    let kernel = t.lambda_kernel();
    if !exterior.fibre.is_subgroup_of(&kernel) {
        return Err(Error::Internal("diagonal tensors outside ker λ".into()));
    }
    quotient_abelian_invariants(t.tensor(), &kernel, &exterior.fibre)
}

/// Builds `G ⊗ G` and returns the kernel of `G ∧ G → G'`.
pub fn h2_via_wedge(g: Arc<FinGroup>, limits: &BuildLimits) -> Result<AbelianGroup> {
    h2_from_tensor_square(&build_nu(g, limits)?)
}

/// Torsion of the cokernel of `∂₃ : C₃ → C₂` on normalized bar chains.
pub fn h2_via_cocycles(g: &FinGroup) -> Result<AbelianGroup> {
    let n = g.order();
    if n > COCYCLE_ORDER_LIMIT {
        return Err(Error::SizeLimit {
            what: "bar complex".into(),
            size: n as u64,
            limit: COCYCLE_ORDER_LIMIT as u64,
        });
    }
    if n == 1 {
        return Ok(AbelianGroup::trivial());
    }
    let m = (n - 1) as u32;
    let pair = |a: u32, b: u32| -> Option<usize> {
        (a != 0 && b != 0).then(|| ((a - 1) * m + (b - 1)) as usize)
    };
    // H₂ has exponent dividing |G|, so working modulo 2|G| keeps it intact
    // and turns only the free part into copies of the modulus.
    let modulus = 2 * n as u64;
    let mut lattice = SmallModLattice::new((m * m) as usize, modulus as u32);
    let mut row: Vec<(usize, i64)> = Vec::with_capacity(4);
    for a in 1..n as u32 {
        for b in 1..n as u32 {
            let ab = g.mul(a, b);
            for c in 1..n as u32 {
                let bc = g.mul(b, c);
                row.clear();
                row.extend(pair(b, c).map(|i| (i, 1)));
                row.extend(pair(ab, c).map(|i| (i, -1)));
                row.extend(pair(a, bc).map(|i| (i, 1)));
                row.extend(pair(a, b).map(|i| (i, -1)));
                lattice.add_sparse(&row);
            }
        }
    }
    let torsion: Vec<u64> = lattice.finish().invariants().iter().copied().filter(|&d| d != modulus).collect();
    Ok(AbelianGroup::from_cyclic_factors(&torsion, 0))
}

/// Runs both routes and compares canonical forms.
pub fn h2_cross_check(g: Arc<FinGroup>, limits: &BuildLimits) -> Result<H2Report> {
    let via_cocycles = h2_via_cocycles(&g)?;
    let via_wedge = h2_via_wedge(g, limits)?;
    let agree = via_wedge == via_cocycles;
    Ok(H2Report { via_wedge, via_cocycles, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::lambda2_exterior;
    use crate::coset_enum::EnumLimits;
    use crate::presentation::parse_presentation;

    fn group(text: &str) -> Arc<FinGroup> {
        Arc::new(FinGroup::from_presentation(&parse_presentation(text).unwrap(), EnumLimits::default()).unwrap())
    }

    fn both(text: &str) -> H2Report {
        h2_cross_check(group(text), &BuildLimits::default()).unwrap()
    }

    #[test]
    fn cyclic_groups_have_trivial_multiplier() {
        for n in [1, 2, 5, 12] {
            let r = both(&format!("<a | a^{n}>"));
            assert!(r.agree && r.via_wedge.is_trivial(), "C{n}");
        }
    }

    #[test]
    fn abelian_groups_match_exterior_square() {
        for (text, factors) in [
            ("<a,b | a^2, b^2, [a,b]>", vec![2, 2]),
            ("<a,b,c | a^2, b^2, c^2, [a,b], [a,c], [b,c]>", vec![2, 2, 2]),
            ("<a,b | a^2, b^4, [a,b]>", vec![2, 4]),
        ] {
            let r = both(text);
            assert!(r.agree);
            assert_eq!(r.via_cocycles, lambda2_exterior(&AbelianGroup::from_cyclic_factors(&factors, 0)));
        }
    }

    #[test]
    fn nonabelian_examples() {
        assert_eq!(both("<r,s | r^3, s^2, (r s)^2>").via_cocycles, AbelianGroup::trivial());
        assert_eq!(both("<a,b | a^4, a^2 b^-2, b^-1 a b a>").via_wedge, AbelianGroup::trivial());
        let d4 = both("<a,b | a^4, b^2, (a b)^2>");
        assert!(d4.agree);
        assert_eq!(d4.via_wedge, AbelianGroup::cyclic(2));
        let a4 = both("<a,b | a^3, b^2, (a b)^3>");
        assert!(a4.agree);
        assert_eq!(a4.via_wedge, AbelianGroup::cyclic(2));
    }

    #[test]
    fn cocycle_route_refuses_large_groups() {
        let g = group("<a | a^65>");
        assert!(h2_via_cocycles(&g).unwrap_err().is_limit());
    }
}
