use super::*;
use crate::presentation::parse_presentation;

fn group(text: &str) -> Arc<FinGroup> {
    Arc::new(FinGroup::from_presentation(&parse_presentation(text).unwrap(), EnumLimits::default()).unwrap())
}

fn nu(text: &str) -> TensorGroup {
    build_nu(group(text), &BuildLimits::default()).unwrap()
}

fn trivial_pair(l: Arc<FinGroup>, r: Arc<FinGroup>) -> ActionPair {
    let rl: Vec<Vec<u32>> = (0..r.generator_count()).map(|_| l.generators()).collect();
    let lr: Vec<Vec<u32>> = (0..l.generator_count()).map(|_| r.generators()).collect();
    ActionPair::new(l, r, &rl, &lr).unwrap()
}

#[test]
fn small_tensor_squares() {
    let c2 = nu("<a | a^2>");
    assert_eq!(c2.order(), 2);
    assert_eq!(c2.eta_order(), 8);
    let v4 = nu("<a,b | a^2, b^2, [a,b]>");
    assert_eq!(v4.order(), 16);
    assert_eq!(v4.report().unwrap().tensor_invariants.to_list(), vec![2, 2, 2, 2]);
    let s3 = nu("<r,s | r^3, s^2, (r s)^2>");
    assert_eq!(s3.order(), 6);
    assert!(s3.tensor().is_abelian());
    let d4 = nu("<a,b | a^4, b^2, (a b)^2>");
    assert_eq!(d4.report().unwrap().tensor_invariants.to_list(), vec![2, 2, 2, 4]);
    let q8 = nu("<a,b | a^4, a^2 b^-2, b^-1 a b a>");
    assert_eq!(q8.order(), 64);
    assert_eq!(q8.report().unwrap().tensor_invariants.to_list(), vec![2, 2, 4, 4]);
}

#[test]
fn delta_and_exterior() {
    let v4 = nu("<a,b | a^2, b^2, [a,b]>");
    assert_eq!(v4.delta_subgroup().unwrap().order(), 8);
    assert_eq!(v4.exterior_square().unwrap().order, 2);
    let s3 = nu("<r,s | r^3, s^2, (r s)^2>");
    assert_eq!(s3.exterior_square().unwrap().order, 3);
    let q8 = nu("<a,b | a^4, a^2 b^-2, b^-1 a b a>");
    assert_eq!(q8.exterior_square().unwrap().order, 2);
}

#[test]
fn trivial_actions_give_abelian_tensor() {
    let t = build_eta(trivial_pair(group("<a | a^2>"), group("<b | b^3>")), &BuildLimits::default()).unwrap();
    assert_eq!(t.order(), 1);
    let t = build_eta(trivial_pair(group("<a | a^4>"), group("<b | b^6>")), &BuildLimits::default()).unwrap();
    assert_eq!(t.order(), 2);
}

#[test]
fn lambda_images_and_kernels() {
    let g = group("<r,s | r^3, s^2, (r s)^2>");
    let t = build_nu(g.clone(), &BuildLimits::default()).unwrap();
    assert_eq!(t.lambda_image().order(), 3);
    assert_eq!(t.lambda_prime_image().order(), 3);
    let hom = t.lambda_map().unwrap();
    assert_eq!(hom.kernel().unwrap().order() as usize, t.lambda_kernel().order());
    assert!(t.is_central(&t.lambda_kernel()));
    for x in 0..t.order() as u32 {
        let p = t.tensor().element_perm(x);
        assert_eq!(g.perm_element(&hom.evaluate(&p).unwrap()), t.lambda_values()[x as usize]);
    }
}

#[test]
fn subgroup_tensor() {
    let g = group("<r,s | r^3, s^2, (r s)^2>");
    let n = g.subgroup(&[g.generator(0)]);
    let (t, embed) = tensor_with_subgroup(g.clone(), &n, &BuildLimits::default()).unwrap();
    assert_eq!(embed.len(), 3);
    assert_eq!(t.lambda_image().order(), 3);
    assert!(t.commutator_check(false).unwrap().passed);
}

#[test]
fn commutator_relation() {
    let s3 = nu("<r,s | r^3, s^2, (r s)^2>");
    let ok = s3.commutator_check(false).unwrap();
    assert!(ok.passed);
    assert_eq!(ok.tuples_checked, 256);
    assert!(s3.commutator_check(true).unwrap().passed);
    let s4 = nu("<a,b | a^4, b^2, (a b)^3>");
    assert!(s4.commutator_check(false).unwrap().passed);
    let bad = s4.commutator_check(true).unwrap();
    assert!(!bad.passed);
    assert!(bad.witness.is_some());
}

#[test]
fn perturbed_action_is_rejected() {
    let g = group("<r,s | r^3, s^2, (r s)^2>");
    let pair = conjugation_pair(g).with_perturbed_action(1, 1, 2);
    assert!(build_eta(pair, &BuildLimits::default()).is_err());
}

#[test]
fn predicted_bound_aborts() {
    let g = group("<a,b | a^2, b^2, [a,b]>");
    let err = build_nu(g, &BuildLimits::with_max_cosets(10)).unwrap_err();
    assert!(err.is_limit());
}

#[test]
fn tower_levels() {
    let v4 = group("<a,b | a^2, b^2, [a,b]>");
    let tower = tensor_power(v4, 3, &BuildLimits::default()).unwrap();
    assert!(tower.is_complete());
    let orders: Vec<usize> = tower.levels().iter().map(TowerLevel::order).collect();
    assert_eq!(orders, vec![4, 16, 256]);

    let s3 = group("<r,s | r^3, s^2, (r s)^2>");
    let tower = tensor_power(s3.clone(), 3, &BuildLimits::default()).unwrap();
    for level in tower.levels() {
        let mut image = subgroup_of(&s3, level.lambda.iter().copied()).elements().to_vec();
        let mut gamma = s3.gamma(level.n).elements().to_vec();
        image.sort_unstable();
        gamma.sort_unstable();
        assert_eq!(image, gamma);
        tower.lambda_map(level.n).unwrap();
    }
}


