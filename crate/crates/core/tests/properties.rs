//! Property tests over seeded random inputs.

use std::sync::Arc;

use pivotfun::bimodule::{
    find_unitary_bimodule_iso, relative_idempotent, relative_tensor, verify_bimodule, verify_morita_witness,
    DaggerBimodule, DEFAULT_ATTEMPTS, DEFAULT_SEED,
};
use pivotfun::cdagcat::{
    nested_duality, sliding_identities, standard_duality, transpose, verify_duality, CMor, CatObject,
};
use pivotfun::fixtures;
use pivotfun::frobenius::{check_star_morphism, matrix_algebra, pants, verify_frobenius, FrobeniusMonoid};
use pivotfun::matkernel::{kron, polar_unitary, split_dagger_idempotent};
use pivotfun::random;
use pivotfun::repg::functor::verify_fibre_functor;
use pivotfun::repg::group::FiniteGroup;
use pivotfun::upt::{
    double_dual_residual, graded_upt, modification_space, morita_context_from_upts, upt_dagger, upt_dual,
    verify_modification, verify_upt_duality, Modification, Upt,
};
use pivotfun::{CMatrix, Tolerance, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn group(k: usize) -> FiniteGroup {
    match k % 4 {
        0 => FiniteGroup::cyclic(2),
        1 => FiniteGroup::cyclic(3),
        2 => FiniteGroup::cyclic(4),
        _ => FiniteGroup::klein(),
    }
}

/// A graded object of total dimension 1..=4 over a group of order at most 4.
fn graded_object(k: usize, r: &mut ChaCha8Rng) -> CatObject {
    let g = Arc::new(group(k));
    let total = r.gen_range(1..=4);
    let grades: Vec<usize> = (0..total).map(|_| r.gen_range(0..g.order())).collect();
    CatObject::ghilb_graded(g, grades).unwrap()
}

fn graded_morphism(x: &CatObject, y: &CatObject, r: &mut ChaCha8Rng) -> CMor {
    let f = random::gaussian(y.dim(), x.dim(), r);
    let (gx, gy) = (x.grades().unwrap(), y.grades().unwrap());
    let f = CMatrix::from_fn(y.dim(), x.dim(), |i, j| {
        if gy[i] == gx[j] {
            f.get(i, j)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    CMor::new(x.clone(), y.clone(), f).unwrap()
}

/// A random element of the endomorphism modifications of `a`.
fn random_modification(a: &Upt, r: &mut ChaCha8Rng) -> Modification {
    let mut f = CMatrix::zeros(a.dim(), a.dim());
    for b in modification_space(a, a).unwrap() {
        f = f.add(&b.scale(C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))));
    }
    Modification::new(a.clone(), a.clone(), f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn idempotent_split_recombines(seed in any::<u64>(), n in 1usize..=8, k in 0usize..=8) {
        let p = random::projection(n, k.min(n), &mut rng(seed));
        let (v, rank) = split_dagger_idempotent(&p, tol()).unwrap();
        prop_assert_eq!(rank, k.min(n));
        let back = v.compose(&v.adjoint());
        prop_assert!(tol().residual(&back, &p) <= 10.0 * tol().eps() * tol().scale(&back, &p));
    }

    #[test]
    fn kron_commutes_with_adjoint(seed in any::<u64>(), r1 in 1usize..4, c1 in 1usize..4, r2 in 1usize..4, c2 in 1usize..4) {
        let mut r = rng(seed);
        let a = random::gaussian(r1, c1, &mut r);
        let b = random::gaussian(r2, c2, &mut r);
        let lhs = kron(&a, &b).unwrap().adjoint();
        let rhs = kron(&a.adjoint(), &b.adjoint()).unwrap();
        prop_assert!(tol().close(&lhs, &rhs));
    }

    #[test]
    fn polar_fixes_unitaries(seed in any::<u64>(), n in 1usize..=6) {
        let u = random::unitary(n, &mut rng(seed));
        prop_assert!(tol().close(&polar_unitary(&u, tol()).unwrap(), &u));
    }

    #[test]
    fn sliding_holds(seed in any::<u64>(), dx in 1usize..=4, dy in 1usize..=4) {
        let (x, y) = (CatObject::fhilb(dx), CatObject::fhilb(dy));
        let f = CMor::new(x.clone(), y.clone(), random::gaussian(dy, dx, &mut rng(seed))).unwrap();
        let rep = sliding_identities(&f, &standard_duality(&x), &standard_duality(&y), tol()).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn nested_duals_are_duals(seed in any::<u64>(), k in 0usize..4) {
        let mut r = rng(seed);
        let (x, y) = (graded_object(k, &mut r), graded_object(k, &mut r));
        let w = nested_duality(&standard_duality(&x), &standard_duality(&y)).unwrap();
        prop_assert!(verify_duality(&w, tol()).unwrap().passed());
    }

    #[test]
    fn grade_preservation_is_closed(seed in any::<u64>(), k in 0usize..4) {
        let mut r = rng(seed);
        let (x, y, z) = (graded_object(k, &mut r), graded_object(k, &mut r), graded_object(k, &mut r));
        let f = graded_morphism(&x, &y, &mut r);
        let g = graded_morphism(&y, &z, &mut r);
        let gf = g.compose(&f).unwrap();
        let fg = f.tensor(&g).unwrap();
        let ft = transpose(&f, &standard_duality(&x), &standard_duality(&y)).unwrap();
        for m in [gf, fg, f.dagger(), ft] {
            prop_assert!(m.is_grade_preserving(tol()));
        }
    }

    #[test]
    fn double_transpose_is_identity(seed in any::<u64>(), dx in 1usize..=4, dy in 1usize..=4) {
        // The pivotal structure is the identity under the standard duals.
        let (x, y) = (CatObject::fhilb(dx), CatObject::fhilb(dy));
        let (wx, wy) = (standard_duality(&x), standard_duality(&y));
        let f = CMor::new(x, y, random::gaussian(dy, dx, &mut rng(seed))).unwrap();
        let once = transpose(&f, &wx, &wy).unwrap();
        let wxd = standard_duality(&wx.xd);
        let wyd = standard_duality(&wy.xd);
        let twice = transpose(&once, &wyd, &wxd).unwrap();
        prop_assert!(tol().close(&twice.mat, &f.mat));
    }

    #[test]
    fn pants_is_special_frobenius(seed in any::<u64>(), k in 0usize..4) {
        let x = graded_object(k, &mut rng(seed));
        let p = pants(&standard_duality(&x), tol()).unwrap();
        let rep = verify_frobenius(&p, tol()).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
        prop_assert!(check_star_morphism(&CMatrix::identity(p.dim()), &p, &p, tol()).unwrap().passed());
    }

    #[test]
    fn unitary_transport(seed in any::<u64>(), n in 1usize..=3) {
        let a = matrix_algebra(n);
        let u = random::unitary(a.dim(), &mut rng(seed));
        let b = a.transport(&u, CatObject::fhilb(a.dim())).unwrap();
        prop_assert!(verify_frobenius(&b, tol()).unwrap().passed());
        prop_assert!(check_star_morphism(&u, &a, &b, tol()).unwrap().passed());
    }

    #[test]
    fn relative_idempotent_is_a_projection(seed in any::<u64>(), n in 1usize..=3) {
        let u = random::unitary(n, &mut rng(seed));
        let cols = DaggerBimodule::columns(n, tol()).unwrap().conjugate(&u).unwrap();
        let rows = DaggerBimodule::rows(n, tol()).unwrap();
        for (m, nn) in [(&cols, &rows), (&rows, &cols)] {
            let p = relative_idempotent(m, nn).unwrap();
            prop_assert!(tol().close(&p.adjoint(), &p));
            prop_assert!(tol().close(&p.compose(&p), &p));
        }
    }

    #[test]
    fn relative_tensor_unit_laws(seed in any::<u64>(), n in 1usize..=2) {
        let a = matrix_algebra(n);
        let u = random::unitary(n * n, &mut rng(seed));
        let m = DaggerBimodule::regular(&a).conjugate(&u).unwrap();
        prop_assert!(verify_bimodule(&m, tol()).unwrap().passed());
        let reg = DaggerBimodule::regular(&a);
        let (left, _) = relative_tensor(&reg, &m, tol()).unwrap();
        let (right, _) = relative_tensor(&m, &reg, tol()).unwrap();
        for t in [left, right] {
            let s = find_unitary_bimodule_iso(&t, &m, tol(), DEFAULT_SEED, DEFAULT_ATTEMPTS).unwrap();
            prop_assert!(s.found().is_some(), "{:?}", s);
        }
    }

    #[test]
    fn corpus_upts_are_dualizable(k in 0usize..21) {
        let corpus = fixtures::upt_corpus(fixtures::CORPUS_SEED, tol()).unwrap();
        let (name, a) = &corpus[k % corpus.len()];
        let rep = verify_upt_duality(a, tol()).unwrap();
        prop_assert!(rep.passed(), "{}: {:?}", name, rep.first_failure());
        let (res, _) = double_dual_residual(a).unwrap();
        prop_assert!(res <= 1e-9);
    }

    #[test]
    fn unitarity_matches_dagger_equals_dual(seed in any::<u64>(), shear in -1.0f64..1.0) {
        let p = Upt::pauli(tol()).unwrap();
        let mut r = rng(seed);
        let mut s = random::unitary(2, &mut r);
        s.set(0, 1, s.get(0, 1) + C64::new(shear, 0.0));
        let a = p.conjugate(&s).unwrap();
        let unitary = a.is_unitary();
        let (dag, dual) = (upt_dagger(&a).unwrap(), upt_dual(&a).unwrap());
        let loose = Tolerance::new(1e-8).unwrap();
        let equal = (0..4).all(|i| loose.close(dag.component(i), dual.component(i)));
        prop_assert_eq!(unitary, equal);
    }

    #[test]
    fn modification_daggers_and_interchange(seed in any::<u64>(), k in 0usize..3) {
        let mut r = rng(seed);
        let objs = fixtures::objects(group(k));
        let order = objs.group().order();
        let m1: Vec<usize> = (0..order).map(|_| r.gen_range(0..2)).collect();
        let m2: Vec<usize> = (0..order).map(|_| r.gen_range(0..2)).collect();
        prop_assume!(m1.iter().sum::<usize>() > 0 && m2.iter().sum::<usize>() > 0);
        let a = graded_upt(&objs, &m1).unwrap();
        let b = graded_upt(&objs, &m2).unwrap();
        let (f, f2) = (random_modification(&a, &mut r), random_modification(&a, &mut r));
        let (g, g2) = (random_modification(&b, &mut r), random_modification(&b, &mut r));
        for m in [&f, &g] {
            prop_assert!(verify_modification(m, tol()).unwrap().passed());
        }
        let lhs = f.tensor(&g).unwrap().then(&f2.tensor(&g2).unwrap()).unwrap();
        let rhs = f.then(&f2).unwrap().tensor(&g.then(&g2).unwrap()).unwrap();
        prop_assert!(tol().close(lhs.mat(), rhs.mat()));
    }

    #[test]
    fn morita_from_same_target(seed in any::<u64>()) {
        let p = Upt::pauli(tol()).unwrap();
        let q = p.conjugate(&random::unitary(2, &mut rng(seed))).unwrap();
        let (a, b, m, n) = morita_context_from_upts(&p, &q, tol()).unwrap();
        let rep = verify_morita_witness(&a, &b, &m, &n, tol(), DEFAULT_SEED, DEFAULT_ATTEMPTS).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.first_failure());
    }
}

#[test]
fn functor_consequences_hold() {
    let mut functors: Vec<_> = (0..4)
        .map(|k| pivotfun::repg::functor::FibreFunctor::canonical(fixtures::objects(group(k))))
        .collect();
    functors.push(fixtures::twisted_klein_functor(tol()).unwrap());
    for f in &functors {
        let rep = verify_fibre_functor(f, tol()).unwrap();
        for name in [
            "pushpast",
            "conaturality",
            "coassociativity",
            "counitality",
            "inverse_is_dagger",
        ] {
            let c = rep.get(name).unwrap_or_else(|| panic!("missing {name}"));
            assert_eq!(c.status, pivotfun::Status::Pass, "{name}");
        }
    }
}

#[test]
fn trivial_monoid_is_morita_trivial() {
    let t = FrobeniusMonoid::trivial();
    let s = DaggerBimodule::scalars(t.carrier());
    let rep = verify_morita_witness(&t, &t, &s, &s, tol(), DEFAULT_SEED, DEFAULT_ATTEMPTS).unwrap();
    assert!(rep.passed());
}
