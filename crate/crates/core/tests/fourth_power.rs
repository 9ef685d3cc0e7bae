//! Fourth tensor powers that need a raised coset limit. Slow; run with
//! `cargo test --release -p tensoria-core --test fourth_power -- --ignored`.

use std::sync::Arc;

use tensoria_core::coset_enum::EnumLimits;
use tensoria_core::group::FinGroup;
use tensoria_core::presentation::parse_presentation;
use tensoria_core::tensor::{tensor_power, BuildLimits};

fn check_fourth_power(text: &str, orders: [usize; 4]) {
    let p = parse_presentation(text).unwrap();
    let g = Arc::new(FinGroup::from_presentation(&p, EnumLimits::default()).unwrap());
    let tower = tensor_power(g.clone(), 4, &BuildLimits::with_max_cosets(3_000_000)).unwrap();
    assert!(tower.is_complete(), "{:?}", tower.stopped());
    let got: Vec<usize> = tower.levels().iter().map(|l| l.order()).collect();
    assert_eq!(got, orders);
    let mut image = tower.level(4).unwrap().lambda.clone();
    image.sort_unstable();
    image.dedup();
    let mut gamma = g.gamma(4).elements().to_vec();
    gamma.sort_unstable();
    assert_eq!(image, gamma);
}

#[test]
#[ignore]
fn dihedral_eight() {
    check_fourth_power("<a,b | a^4, b^2, (a b)^2>", [8, 32, 1024, 262144]);
}

#[test]
#[ignore]
fn quaternion() {
    check_fourth_power("<a,b | a^4, a^2 b^-2, b^-1 a b a>", [8, 64, 256, 65536]);
}

#[test]
#[ignore]
fn dihedral_twelve() {
    check_fourth_power("<a,b | a^6, b^2, (a b)^2>", [12, 48, 768, 196608]);
}
