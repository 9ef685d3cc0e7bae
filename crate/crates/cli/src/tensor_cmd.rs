use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use tensoria_core::abelian::AbelianGroup;
use tensoria_core::error::Error;
use tensoria_core::group::{FinGroup, Subgroup};
use tensoria_core::homology::{h2_from_tensor_square, h2_via_cocycles, H2Report};
use tensoria_core::presentation::Presentation;
use tensoria_core::tensor::{quotient_abelian_invariants, tensor_power, BuildLimits, TowerLevel};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TensorOptions {
    pub power: usize,
    pub exterior: bool,
    pub h2: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub n: usize,
    pub order: u64,
    pub abelianization: AbelianGroup,
    pub exponent: u64,
    pub nilpotency_class: Option<usize>,
    pub lambda_image_order: u64,
    pub lambda_kernel_order: u64,
    pub lambda_kernel: AbelianGroup,
    pub lambda_kernel_central: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExteriorReport {
    pub order: u64,
    pub delta_order: u64,
    pub commutator_kernel: AbelianGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorCommandReport {
    pub group: String,
    pub presentation: String,
    pub order: u64,
    pub power: usize,
    pub levels: Vec<LevelReport>,
    pub exterior: Option<ExteriorReport>,
    pub h2: Option<H2Report>,
}

fn level_report(level: &TowerLevel) -> Result<LevelReport, Error> {
    let m = &level.power;
    let (image, kernel, central) = match &level.tensor {
        Some(t) => {
            let k = t.lambda_prime_kernel();
            let central = t.is_central(&k);
            (t.lambda_prime_image().order(), k, central)
        }
        None => (m.order(), Subgroup::trivial(m.order()), true),
    };
    Ok(LevelReport {
        n: level.n,
        order: m.order() as u64,
        abelianization: quotient_abelian_invariants(m, &m.whole(), &m.gamma(2))?,
        exponent: m.exponent(),
        nilpotency_class: m.nilpotency_class(),
        lambda_image_order: image as u64,
        lambda_kernel_order: kernel.order() as u64,
        lambda_kernel: quotient_abelian_invariants(m, &kernel, &Subgroup::trivial(m.order()))?,
        lambda_kernel_central: central,
    })
}

/// Builds the requested powers and extras. Any limit that stops the build
/// is returned as an error.
pub fn run(name: &str, p: &Presentation, opts: &TensorOptions, limits: &BuildLimits) -> Result<TensorCommandReport, Error> {
    let g = Arc::new(FinGroup::from_presentation(p, limits.enumeration)?);
    let needs_square = opts.exterior || opts.h2;
    let tower = tensor_power(g.clone(), opts.power.max(if needs_square { 2 } else { 1 }), limits)?;
    if let Some(e) = tower.stopped() {
        return Err(e.clone());
    }
    let levels = tower.levels().iter().take(opts.power).map(level_report).collect::<Result<Vec<_>, _>>()?;
    let square = tower.level(2).and_then(|l| l.tensor.as_ref());
    let exterior = match (opts.exterior, square) {
        (true, Some(t)) => {
            let e = t.exterior_square()?;
            Some(ExteriorReport {
                order: e.order as u64,
                delta_order: t.delta_subgroup()?.order() as u64,
                commutator_kernel: h2_from_tensor_square(t)?,
            })
        }
        _ => None,
    };
    let h2 = match (opts.h2, square) {
        (true, Some(t)) => {
            let via_wedge = h2_from_tensor_square(t)?;
            let via_cocycles = h2_via_cocycles(&g)?;
            let agree = via_wedge == via_cocycles;
            Some(H2Report { via_wedge, via_cocycles, agree })
        }
        _ => None,
    };
    Ok(TensorCommandReport {
        group: name.to_string(),
        presentation: p.to_string(),
        order: g.order() as u64,
        power: opts.power,
        levels,
        exterior,
        h2,
    })
}

pub fn render(r: &TensorCommandReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "group {}  {}", r.group, r.presentation);
    let _ = writeln!(s, "order {}", r.order);
    for l in &r.levels {
        let class = l.nilpotency_class.map_or_else(|| "-".to_string(), |c| c.to_string());
        let _ = writeln!(
            s,
            "power {}: order {}, abelianization {}, exponent {}, class {}",
            l.n, l.order, l.abelianization, l.exponent, class
        );
        let _ = writeln!(
            s,
            "  lambda: image order {}, kernel {} (order {}, central: {})",
            l.lambda_image_order, l.lambda_kernel, l.lambda_kernel_order, l.lambda_kernel_central
        );
    }
    if let Some(e) = &r.exterior {
        let _ = writeln!(s, "exterior square: order {}, delta order {}, commutator kernel {}", e.order, e.delta_order, e.commutator_kernel);
    }
    if let Some(h) = &r.h2 {
        let _ = writeln!(s, "H2: {} via wedge, {} via cocycles, agree: {}", h.via_wedge, h.via_cocycles, h.agree);
    }
    s
}
