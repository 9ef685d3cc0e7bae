use std::collections::HashSet;

use super::*;
use crate::coset_enum::{enumerate, EnumLimits};
use crate::presentation::{parse_presentation, Presentation};

fn regular(text: &str) -> (Presentation, PermGroup) {
    let p = parse_presentation(text).unwrap();
    let t = enumerate(&p, &[], EnumLimits::default()).unwrap();
    let g = PermGroup::from_coset_table(&t).unwrap();
    (p, g)
}

fn s3() -> PermGroup {
    PermGroup::new(3, vec![Perm::from_cycles(3, &[&[1, 2]]), Perm::from_cycles(3, &[&[1, 2, 3]])])
}

fn d4() -> PermGroup {
    // symmetries of a square with vertices 1..4
    PermGroup::new(4, vec![Perm::from_cycles(4, &[&[1, 2, 3, 4]]), Perm::from_cycles(4, &[&[1, 3]])])
}

fn a4() -> PermGroup {
    PermGroup::new(4, vec![Perm::from_cycles(4, &[&[1, 2, 3]]), Perm::from_cycles(4, &[&[1, 2], &[3, 4]])])
}

fn a5() -> PermGroup {
    PermGroup::new(5, vec![Perm::from_cycles(5, &[&[1, 2, 3]]), Perm::from_cycles(5, &[&[1, 2, 3, 4, 5]])])
}

/// Closure of the generators under multiplication.
fn brute_elements(g: &PermGroup) -> HashSet<Perm> {
    let mut seen: HashSet<Perm> = HashSet::new();
    let mut stack = vec![g.identity()];
    seen.insert(g.identity());
    while let Some(x) = stack.pop() {
        for s in g.generators() {
            let y = x.mul(s);
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen
}

fn brute_commutator_subgroup(g: &PermGroup) -> HashSet<Perm> {
    let elems: Vec<Perm> = brute_elements(g).into_iter().collect();
    let comms: Vec<Perm> = elems.iter().flat_map(|x| elems.iter().map(move |y| x.commutator(y))).collect();
    brute_elements(&PermGroup::new(g.degree(), comms))
}

#[test]
fn orders() {
    assert_eq!(s3().order(), 6);
    assert_eq!(PermGroup::trivial(5).order(), 1);
    assert_eq!(a5().order(), 60);
    let (_, d4_reg) = regular("<a,b | a^4, b^2, (a*b)^2>");
    assert_eq!(d4_reg.order(), brute_elements(&d4_reg).len() as u64);
    assert_eq!(d4_reg.order(), 8);
    let s6 = PermGroup::new(6, vec![Perm::from_cycles(6, &[&[1, 2]]), Perm::from_cycles(6, &[&[1, 2, 3, 4, 5, 6]])]);
    assert_eq!(s6.order(), 720);
}

#[test]
fn membership_matches_brute_force() {
    for g in [s3(), d4(), a4(), a5()] {
        let elems = brute_elements(&g);
        let sym = PermGroup::new(
            g.degree(),
            vec![
                Perm::from_cycles(g.degree(), &[&[1, 2]]),
                Perm::from_images((1..g.degree() as u32).chain([0]).collect()),
            ],
        );
        for x in sym.elements().unwrap() {
            assert_eq!(g.contains(&x), elems.contains(&x), "{x}");
        }
        let listed: HashSet<Perm> = g.elements().unwrap().into_iter().collect();
        assert_eq!(listed, elems);
    }
}

#[test]
fn subgroups() {
    let g = s3();
    assert_eq!(g.subgroup(&[Perm::from_cycles(3, &[&[1, 2, 3]])]).unwrap().order(), 3);
    assert_eq!(g.subgroup(&[]).unwrap().order(), 1);
    let r = Perm::from_cycles(4, &[&[1, 2, 3, 4]]);
    let d = d4();
    assert_eq!(d.subgroup(&[r.clone(), r.pow(2)]).unwrap().order(), 4);
    assert_eq!(d.subgroup(&[Perm::from_cycles(4, &[&[1, 2]])]), Err(Error::NotMember).map(|_: ()| unreachable!()));
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.order() == other.order() && self.is_subgroup_of(other)
    }
}

#[test]
fn normal_closures() {
    assert_eq!(s3().normal_closure(&[Perm::from_cycles(3, &[&[1, 2]])]).unwrap().order(), 6);
    assert_eq!(s3().normal_closure(&[]).unwrap().order(), 1);
    let v = a4().normal_closure(&[Perm::from_cycles(4, &[&[1, 2], &[3, 4]])]).unwrap();
    assert_eq!(v.order(), 4);
    assert!(v.is_normal_in(&a4()));
}

#[test]
fn lower_central_series_examples() {
    let orders = |g: &PermGroup| g.lower_central_series().iter().map(PermGroup::order).collect::<Vec<_>>();
    assert_eq!(orders(&s3()), vec![6, 3]);
    assert_eq!(orders(&d4()), vec![8, 2, 1]);
    let (_, c6) = regular("<a | a^6>");
    assert_eq!(orders(&c6), vec![6, 1]);
    assert_eq!(s3().derived_subgroup().order(), brute_commutator_subgroup(&s3()).len() as u64);
    assert_eq!(d4().nilpotency_class(), Some(2));
    assert_eq!(s3().nilpotency_class(), None);
}

#[test]
fn upper_central_series_examples() {
    let orders = |g: &PermGroup| g.upper_central_series().unwrap().iter().map(PermGroup::order).collect::<Vec<_>>();
    assert_eq!(orders(&s3()), vec![1]);
    assert_eq!(orders(&d4()), vec![1, 2, 8]);
    let (_, v4) = regular("<a,b | a^2, b^2, [a,b]>");
    assert_eq!(orders(&v4), vec![1, 4]);
    let (_, heis) = regular("<x,y,z | x^3, y^3, z^3, [x,y] z^-1, [x,z], [y,z]>");
    assert_eq!(orders(&heis), vec![1, 3, 27]);
    assert_eq!(heis.center().unwrap().order(), 3);
}

#[test]
fn centers() {
    assert_eq!(s3().center().unwrap().order(), 1);
    assert_eq!(d4().center().unwrap().order(), 2);
    // exercise the class-action path on a group above the enumeration cutoff
    let s8 = PermGroup::new(8, vec![Perm::from_cycles(8, &[&[1, 2]]), Perm::from_cycles(8, &[&[1, 2, 3, 4, 5, 6, 7, 8]])]);
    assert_eq!(s8.center().unwrap().order(), 1);
    let c = Perm::from_cycles(8, &[&[1, 2, 3, 4], &[5, 6, 7, 8]]);
    let big = PermGroup::new(
        16,
        vec![
            Perm::from_cycles(8, &[&[1, 2]]).direct_sum(&Perm::identity(8)),
            Perm::from_cycles(8, &[&[1, 2, 3, 4, 5, 6, 7, 8]]).direct_sum(&Perm::identity(8)),
            Perm::identity(8).direct_sum(&c),
        ],
    );
    assert!(big.order() > CENTER_ENUMERATION_LIMIT);
    assert_eq!(big.center().unwrap().order(), 4);
}

#[test]
fn quotients() {
    let g = d4();
    let z = g.center().unwrap();
    let (q, proj) = g.quotient(&z).unwrap();
    assert_eq!(q.order(), 4);
    assert!(q.elements().unwrap().iter().all(|x| x.pow(2).is_identity()));
    assert_eq!(proj.kernel().unwrap().order(), 2);
    let (q, _) = g.quotient(&g).unwrap();
    assert_eq!(q.order(), 1);
    let s = s3();
    let a3 = s.derived_subgroup();
    assert_eq!(s.quotient(&a3).unwrap().0.order(), 2);
    assert_eq!(s.quotient(&s.subgroup(&[Perm::from_cycles(3, &[&[1, 2]])]).unwrap()).unwrap_err(), Error::NotNormal);
}

#[test]
fn abelian_invariants_examples() {
    let (_, c6) = regular("<a | a^6>");
    assert_eq!(c6.abelian_invariants().unwrap().invariants(), &[6]);
    let (_, q8) = regular("<a,b | a^4, a^2 b^-2, b^-1 a b a>");
    assert_eq!(q8.abelian_invariants().unwrap().invariants(), &[2, 2]);
    assert!(a5().abelian_invariants().unwrap().is_trivial());
    assert_eq!(s3().abelian_invariants().unwrap().invariants(), &[2]);
    let (_, z) = regular("<a,b,c | a^2, b^4, c^3, [a,b], [a,c], [b,c]>");
    assert_eq!(z.abelian_invariants().unwrap().invariants(), &[2, 12]);
}

#[test]
fn homomorphisms() {
    let (c4p, c4) = regular("<a | a^4>");
    let (c2p, c2) = regular("<a | a^2>");
    let to_c2 = define_hom_checked(&c4p, &c4, vec![c2.generators()[0].clone()]);
    assert_eq!(to_c2.kernel().unwrap().order(), 2);
    let bad = GroupHom::unverified(&c2p, &c2, vec![c4.generators()[0].clone()]).unwrap();
    assert!(matches!(bad.clone().verify(), Err(Error::RelatorViolation { index: 0, .. })));
    assert_eq!(bad.kernel().unwrap_err(), Error::Unverified);

    let (p, g) = regular("<r,s | r^3, s^2, (r s)^2>");
    let id = define_hom_checked(&p, &g, g.generators().to_vec());
    assert_eq!(id.kernel().unwrap().order(), 1);
    let sign = define_hom_checked(&p, &g, vec![Perm::identity(2), Perm::from_cycles(2, &[&[1, 2]])]);
    let k = sign.kernel().unwrap();
    assert_eq!(k.order(), 3);
    assert_eq!(g.order(), k.order() * sign.image().unwrap().order());
    for x in g.elements().unwrap() {
        assert_eq!(sign.evaluate(&x).unwrap().is_identity(), k.contains(&x));
    }
}

fn define_hom_checked(p: &Presentation, g: &PermGroup, images: Vec<Perm>) -> GroupHom {
    hom::define_hom(p, g, images).unwrap()
}

#[test]
fn evaluation_is_multiplicative() {
    let (p, g) = regular("<a,b | a^4, b^2, (a b)^3>");
    // S4 acting on 4 points
    let images = vec![Perm::from_cycles(4, &[&[1, 2, 3, 4]]), Perm::from_cycles(4, &[&[1, 2]])];
    let h = hom::define_hom(&p, &g, images).unwrap();
    let elems = g.elements().unwrap();
    for x in elems.iter().step_by(5) {
        for y in elems.iter().step_by(7) {
            assert_eq!(h.evaluate(&x.mul(y)).unwrap(), h.evaluate(x).unwrap().mul(&h.evaluate(y).unwrap()));
        }
    }
    assert_eq!(h.kernel().unwrap().order(), 1);
    let r = h.restrict(&g.derived_subgroup()).unwrap();
    assert_eq!(r.image().unwrap().order(), 12);
}
