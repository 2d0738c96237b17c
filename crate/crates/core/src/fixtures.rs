//! Seeded test corpora: graded and Pauli transformations, non-unitary
//! corruptions of them, constructed equivalences, and functor fixtures.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matkernel::{CMatrix, Tolerance, C64, ONE};
use crate::random;
use crate::repg::functor::{Cocycle, FibreFunctor};
use crate::repg::group::FiniteGroup;
use crate::repg::rep::ObjectList;
use crate::upt::{equivalent_instance, find_unitary_modification, graded_upt, upt_compose, upt_dual, Upt};

pub const CORPUS_SEED: u64 = 20_240_611;

pub fn objects(group: FiniteGroup) -> Arc<ObjectList> {
    Arc::new(ObjectList::standard(Arc::new(group)))
}

/// Graded transformations over Z2, Z3 and Z2×Z2.
pub fn graded_family() -> Result<Vec<(String, Upt)>> {
    let cases: Vec<(&str, FiniteGroup, Vec<Vec<usize>>)> = vec![
        (
            "z2",
            FiniteGroup::cyclic(2),
            vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 1], vec![0, 3]],
        ),
        (
            "z3",
            FiniteGroup::cyclic(3),
            vec![vec![0, 1, 0], vec![1, 1, 1], vec![0, 2, 1], vec![1, 0, 2]],
        ),
        (
            "klein",
            FiniteGroup::klein(),
            vec![vec![0, 0, 1, 0], vec![1, 1, 0, 0], vec![0, 1, 0, 1], vec![1, 1, 1, 1]],
        ),
    ];
    let mut out = Vec::new();
    for (name, g, mults) in cases {
        let objs = objects(g);
        for m in mults {
            out.push((format!("{name} graded {m:?}"), graded_upt(&objs, &m)?));
        }
    }
    Ok(out)
}

/// At least twenty unitary transformations: the graded family, graded over
/// S3, the Pauli transformation, unitary conjugates, composites and duals.
pub fn upt_corpus(seed: u64, tol: Tolerance) -> Result<Vec<(String, Upt)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = graded_family()?;
    let s3 = objects(FiniteGroup::symmetric3());
    out.push(("s3 graded [1,0,0,1,0,0]".into(), graded_upt(&s3, &[1, 0, 0, 1, 0, 0])?));
    out.push(("s3 graded [0,1,1,0,0,0]".into(), graded_upt(&s3, &[0, 1, 1, 0, 0, 0])?));
    let p = Upt::pauli(tol)?;
    out.push(("pauli".into(), p.clone()));
    for k in 0..2 {
        let v = random::unitary(2, &mut rng);
        out.push((format!("pauli conjugate {k}"), p.conjugate(&v)?));
    }
    let z3 = objects(FiniteGroup::cyclic(3));
    let g = graded_upt(&z3, &[1, 1, 1])?;
    out.push((
        "z3 graded [1,1,1] conjugate".into(),
        g.conjugate(&random::unitary(3, &mut rng))?,
    ));
    let klein = objects(FiniteGroup::klein());
    let a = graded_upt(&klein, &[1, 1, 0, 0])?;
    let b = graded_upt(&klein, &[0, 1, 0, 1])?;
    out.push(("klein composite".into(), upt_compose(&a, &b)?));
    out.push(("pauli dual".into(), upt_dual(&p)?));
    out.push(("pauli after klein graded".into(), upt_compose(&a, &p)?));
    Ok(out)
}

/// A non-normal, non-unitary carrier matrix.
fn shear(n: usize, rng: &mut impl Rng) -> CMatrix {
    let mut s = CMatrix::identity(n);
    let z = C64::new(rng.gen_range(0.3..0.8), rng.gen_range(0.2..0.6));
    s.set(0, n - 1, z);
    s.set(n - 1, n - 1, C64::new(rng.gen_range(1.3..1.8), 0.0));
    s
}

/// Non-unitary corruptions of the corpus members with carrier dimension at
/// least two: one component multiplied by a non-unitary carrier matrix, and
/// conjugation of the whole transformation by a non-unitary matrix.
pub fn corruptions(corpus: &[(String, Upt)], seed: u64) -> Result<Vec<(String, Upt)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ffee);
    let mut out = Vec::new();
    for (name, a) in corpus.iter().filter(|(_, a)| a.dim() >= 2) {
        let n = a.dim();
        let i = rng.gen_range(0..a.objects().len());
        let d1 = a.source().dim(i);
        let s = shear(n, &mut rng);
        let bad = a.component(i).compose(&CMatrix::identity(d1).tensor(&s));
        out.push((format!("{name}, object {i} sheared"), a.with_component(i, bad)?));
        // Conjugation is invisible when the shear commutes with every component.
        let conj = a.conjugate(&shear(n, &mut rng))?;
        if !conj.is_unitary() {
            out.push((format!("{name}, conjugated by a shear"), conj));
        }
    }
    Ok(out)
}

/// A constructed equivalence `τ: α1 -> α2 ⊗ E` with `E` one-dimensional.
#[derive(Clone, Debug)]
pub struct EquivalenceCase {
    pub name: String,
    pub a1: Upt,
    pub a2: Upt,
    pub e: Upt,
    pub tau: CMatrix,
}

fn searched(name: &str, a1: Upt, a2: Upt, e: Upt, tol: Tolerance) -> Result<EquivalenceCase> {
    let target = upt_compose(&a2, &e)?;
    let tau = find_unitary_modification(&a1, &target, tol, CORPUS_SEED, 16)?
        .found()
        .cloned()
        .ok_or_else(|| Error::UnsupportedInstance(format!("no unitary modification found for {name}")))?;
    Ok(EquivalenceCase {
        name: name.into(),
        a1,
        a2,
        e,
        tau,
    })
}

fn built(name: &str, a1: Upt, e: Upt, v: CMatrix) -> Result<EquivalenceCase> {
    let (a2, tau) = equivalent_instance(&a1, &e, &v)?;
    Ok(EquivalenceCase {
        name: name.into(),
        a1,
        a2,
        e,
        tau,
    })
}

pub fn equivalence_cases(seed: u64, tol: Tolerance) -> Result<Vec<EquivalenceCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z2 = objects(FiniteGroup::cyclic(2));
    let klein = objects(FiniteGroup::klein());
    let z3 = objects(FiniteGroup::cyclic(3));
    let canonical = Arc::new(FibreFunctor::canonical(z2.clone()));
    let id2 = Upt::identity(canonical);
    let g11 = graded_upt(&z2, &[1, 1])?;
    let p = Upt::pauli(tol)?;
    Ok(vec![
        EquivalenceCase {
            name: "identity".into(),
            a1: id2.clone(),
            a2: id2.clone(),
            e: id2,
            tau: CMatrix::identity(1),
        },
        searched("z2 translation", g11.clone(), g11, graded_upt(&z2, &[0, 1])?, tol)?,
        searched(
            "z2 relabeling (2,1) to (1,2)",
            graded_upt(&z2, &[2, 1])?,
            graded_upt(&z2, &[1, 2])?,
            graded_upt(&z2, &[0, 1])?,
            tol,
        )?,
        built(
            "klein graded twisted by a grading",
            graded_upt(&klein, &[1, 1, 0, 0])?,
            graded_upt(&klein, &[0, 0, 1, 0])?,
            random::unitary(2, &mut rng),
        )?,
        built(
            "klein graded (1,1,1,1) twisted",
            graded_upt(&klein, &[1, 1, 1, 1])?,
            graded_upt(&klein, &[0, 0, 0, 1])?,
            random::unitary(4, &mut rng),
        )?,
        built(
            "z3 graded twisted",
            graded_upt(&z3, &[1, 0, 1])?,
            graded_upt(&z3, &[0, 1, 0])?,
            random::unitary(2, &mut rng),
        )?,
        built(
            "pauli conjugated",
            p.clone(),
            Upt::identity(p.target().clone()),
            random::unitary(2, &mut rng),
        )?,
        built(
            "pauli twisted by a character evaluation",
            p.clone(),
            Upt::graded_on(p.target().clone(), &[0, 0, 1, 0])?,
            random::unitary(2, &mut rng),
        )?,
    ])
}

pub fn twisted_klein_functor(tol: Tolerance) -> Result<FibreFunctor> {
    let objs = Arc::new(ObjectList::characters(Arc::new(FiniteGroup::klein()))?);
    let psi = Cocycle::klein(&objs)?;
    FibreFunctor::twisted(objs, &psi, tol)
}

/// The twisted Klein functor with the multiplicator at `(i, j)` rescaled,
/// which breaks associativity and unitarity there.
pub fn corrupted_klein_functor(i: usize, j: usize, tol: Tolerance) -> Result<FibreFunctor> {
    let mut f = twisted_klein_functor(tol)?;
    let m = f.mult(i, j).scale(C64::new(1.5, 0.0));
    f.set_mult(i, j, m)?;
    Ok(f)
}

/// A Pauli-type transformation whose `(1,0)` component has its sign
/// flipped; monoidality fails at the pairs involving that object.
pub fn sign_flipped_pauli(tol: Tolerance) -> Result<Upt> {
    let p = Upt::pauli(tol)?;
    let i = (0..p.objects().len())
        .find(|&i| crate::repg::rep::klein_label(p.objects().rep(i)) == Some((1, 0)))
        .ok_or_else(|| Error::structural("no (1,0) character"))?;
    p.with_component(i, p.component(i).scale(-ONE))
}
