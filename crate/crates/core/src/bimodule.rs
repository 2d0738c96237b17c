//! Dagger bimodules over special Frobenius monoids, relative tensor products
//! and Morita equivalence witnesses.

use serde::{Deserialize, Serialize};

use crate::cdagcat::{standard_duality, CMor, CatObject};
use crate::diagram::{c, id, m as d, t, Diagram};
use crate::error::{Error, Result};
use crate::frobenius::{center_basis, pants, same_structure, verify_frobenius, FrobeniusMonoid};
use crate::matkernel::{
    cap, linear_solution_space, split_dagger_idempotent, unitary_in_span, CMatrix, Constraint, Tolerance,
    UnitarySearch, C64,
};
use crate::report::{Report, Status};

/// Seed used by the isomorphism search when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed;
/// Random attempts after the identity, when none is given.
pub const DEFAULT_ATTEMPTS: usize = 8;

/// An `A-B` dagger bimodule: carrier `M` with action `ρ: A ⊗ M ⊗ B -> M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BimoduleJson", into = "BimoduleJson")]
pub struct DaggerBimodule {
    left: FrobeniusMonoid,
    right: FrobeniusMonoid,
    carrier: CatObject,
    action: CMor,
}

#[derive(Serialize, Deserialize)]
struct BimoduleJson {
    left: FrobeniusMonoid,
    right: FrobeniusMonoid,
    carrier: CatObject,
    action: CMatrix,
}

impl TryFrom<BimoduleJson> for DaggerBimodule {
    type Error = Error;
    fn try_from(b: BimoduleJson) -> Result<Self> {
        DaggerBimodule::new(b.left, b.right, b.carrier, b.action)
    }
}

impl From<DaggerBimodule> for BimoduleJson {
    fn from(b: DaggerBimodule) -> Self {
        BimoduleJson {
            left: b.left,
            right: b.right,
            carrier: b.carrier,
            action: b.action.mat,
        }
    }
}

impl DaggerBimodule {
    pub fn new(left: FrobeniusMonoid, right: FrobeniusMonoid, carrier: CatObject, action: CMatrix) -> Result<Self> {
        let dom = left.carrier().tensor(&carrier)?.tensor(right.carrier())?;
        let action = CMor::new(dom, carrier.clone(), action)?;
        Ok(DaggerBimodule {
            left,
            right,
            carrier,
            action,
        })
    }

    /// `A` over itself on both sides: `ρ = m (m ⊗ id)`.
    pub fn regular(a: &FrobeniusMonoid) -> Self {
        let n = a.dim();
        let rho = a.mult().compose(&a.mult().tensor(&CMatrix::identity(n)));
        DaggerBimodule::new(a.clone(), a.clone(), a.carrier().clone(), rho).expect("regular bimodule")
    }

    /// Scalar monoids acting on `carrier` by scalars.
    pub fn scalars(carrier: &CatObject) -> Self {
        let triv = FrobeniusMonoid::trivial_like(carrier);
        let n = carrier.dim();
        DaggerBimodule::new(triv.clone(), triv, carrier.clone(), CMatrix::identity(n)).expect("scalar bimodule")
    }

    /// `C^n` as a left module over the pair-of-pants algebra on `C^n ⊗ C^n`
    /// (matrices acting on column vectors), right module over scalars.
    pub fn columns(n: usize, tol: Tolerance) -> Result<Self> {
        let a = pants(&standard_duality(&CatObject::fhilb(n)), tol)?;
        let rho = CMatrix::identity(n).tensor(&cap(n)).scale_re(1.0 / (n as f64).sqrt());
        DaggerBimodule::new(a, FrobeniusMonoid::trivial(), CatObject::fhilb(n), rho)
    }

    /// `C^n` as a right module over the pair-of-pants algebra (row vectors).
    pub fn rows(n: usize, tol: Tolerance) -> Result<Self> {
        let a = pants(&standard_duality(&CatObject::fhilb(n)), tol)?;
        let rho = cap(n).tensor(&CMatrix::identity(n)).scale_re(1.0 / (n as f64).sqrt());
        DaggerBimodule::new(FrobeniusMonoid::trivial(), a, CatObject::fhilb(n), rho)
    }

    /// The same bimodule seen through `U`: action `U ρ (id ⊗ U† ⊗ id)`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        let n = self.dim();
        if u.shape() != (n, n) {
            return Err(Error::structural("conjugating matrix does not fit the carrier"));
        }
        let rho = c([
            d(u),
            d(&self.action.mat),
            t([id(self.left.dim()), d(&u.adjoint()), id(self.right.dim())]),
        ])
        .eval();
        DaggerBimodule::new(self.left.clone(), self.right.clone(), self.carrier.clone(), rho)
    }

    pub fn left(&self) -> &FrobeniusMonoid {
        &self.left
    }

    pub fn right(&self) -> &FrobeniusMonoid {
        &self.right
    }

    pub fn carrier(&self) -> &CatObject {
        &self.carrier
    }

    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn action(&self) -> &CMatrix {
        &self.action.mat
    }

    /// Left action alone, `A ⊗ M -> M`.
    fn left_action(&self) -> Diagram<'_> {
        c([
            d(&self.action.mat),
            t([id(self.left.dim()), id(self.dim()), d(self.right.unit())]),
        ])
    }

    /// Right action alone, `M ⊗ B -> M`.
    fn right_action(&self) -> Diagram<'_> {
        c([
            d(&self.action.mat),
            t([d(self.left.unit()), id(self.dim()), id(self.right.dim())]),
        ])
    }
}

/// Both monoids, then two-sided associativity, unitality and the dagger
/// compatibility of the action.
pub fn verify_bimodule(b: &DaggerBimodule, tol: Tolerance) -> Result<Report> {
    let (na, nm, nb) = (b.left.dim(), b.dim(), b.right.dim());
    if b.action.mat.shape() != (nm, na * nm * nb) {
        return Err(Error::structural("action does not fit A ⊗ M ⊗ B -> M"));
    }
    let rho = &b.action.mat;
    let rho_d = rho.adjoint();
    let (ma, mb) = (b.left.mult(), b.right.mult());
    let (cap_a, cap_b) = (b.left.cap(), b.right.cap());
    let mut r = Report::new("verify_bimodule", tol);
    r.absorb("left", verify_frobenius(&b.left, tol)?);
    r.absorb("right", verify_frobenius(&b.right, tol)?);
    r.equate(
        "associativity",
        None,
        &c([d(rho), t([d(ma), id(nm), d(mb)])]),
        &c([d(rho), t([id(na), d(rho), id(nb)])]),
    );
    r.equate(
        "unitality",
        None,
        &c([d(rho), t([d(b.left.unit()), id(nm), d(b.right.unit())])]),
        &id(nm),
    );
    r.equate(
        "dagger",
        None,
        &c([t([d(&cap_a), id(nm), d(&cap_b)]), t([id(na), d(&rho_d), id(nb)])]),
        &d(rho),
    );
    if b.carrier.grades().is_some() {
        r.residual("grading", None, b.action.grade_residual(), rho.frobenius_norm());
    }
    Ok(r)
}

/// The endomorphism of `M ⊗ N` whose image is `M ⊗_B N`:
/// `(r_M ⊗ l_N)(id ⊗ m† u ⊗ id)`.
pub fn relative_idempotent(m: &DaggerBimodule, n: &DaggerBimodule) -> Result<CMatrix> {
    if !same_structure(&m.right, &n.left) {
        return Err(Error::structural("middle monoids differ"));
    }
    let cup_b = m.right.cup();
    Ok(c([
        t([m.right_action(), n.left_action()]),
        t([id(m.dim()), d(&cup_b), id(n.dim())]),
    ])
    .eval())
}

/// `M ⊗_B N` with the induced `A-C` action, and the isometry
/// `i: M ⊗_B N -> M ⊗ N` splitting the relative idempotent.
pub fn relative_tensor(m: &DaggerBimodule, n: &DaggerBimodule, tol: Tolerance) -> Result<(DaggerBimodule, CMatrix)> {
    let p = relative_idempotent(m, n)?;
    let (iso, rank) = split_dagger_idempotent(&p, tol)?;
    let mn = m.carrier.tensor(&n.carrier)?;
    let carrier = match &mn {
        CatObject::FHilb { .. } => CatObject::fhilb(rank),
        CatObject::GHilb { group, grades } => {
            // p preserves grades, so each column of i is homogeneous.
            let image_grades = (0..rank)
                .map(|k| {
                    let row = (0..iso.rows())
                        .max_by(|&x, &y| iso.get(x, k).norm().total_cmp(&iso.get(y, k).norm()))
                        .unwrap_or(0);
                    grades[row]
                })
                .collect();
            CatObject::ghilb_graded(group.clone(), image_grades)?
        }
    };
    let iso_d = iso.adjoint();
    let (na, nc) = (m.left.dim(), n.right.dim());
    let rho = c([
        d(&iso_d),
        t([m.left_action(), n.right_action()]),
        t([id(na), d(&iso), id(nc)]),
    ])
    .eval();
    let out = DaggerBimodule::new(m.left.clone(), n.right.clone(), carrier, rho)?;
    Ok((out, iso))
}

fn check_same_monoids(m: &DaggerBimodule, n: &DaggerBimodule) -> Result<()> {
    if !same_structure(&m.left, &n.left) || !same_structure(&m.right, &n.right) {
        return Err(Error::structural("bimodules are over different monoids"));
    }
    m.carrier.same_instance(&n.carrier)
}

fn morphism_residual(f: &CMatrix, m: &DaggerBimodule, n: &DaggerBimodule) -> (f64, f64) {
    crate::diagram::compare(
        &c([d(f), d(&m.action.mat)]),
        &c([d(&n.action.mat), t([id(m.left.dim()), d(f), id(m.right.dim())])]),
    )
}

/// Whether `f: M -> N` commutes with the actions and preserves grades.
pub fn is_bimodule_morphism(f: &CMatrix, m: &DaggerBimodule, n: &DaggerBimodule, tol: Tolerance) -> bool {
    if f.shape() != (n.dim(), m.dim()) {
        return false;
    }
    let (r, s) = morphism_residual(f, m, n);
    if !tol.accepts(r, s) {
        return false;
    }
    match CMor::new(m.carrier.clone(), n.carrier.clone(), f.clone()) {
        Ok(g) => g.is_grade_preserving(tol),
        Err(_) => false,
    }
}

/// Orthonormal basis of the bimodule morphisms `M -> N`.
pub fn bimodule_morphism_space(m: &DaggerBimodule, n: &DaggerBimodule) -> Result<Vec<CMatrix>> {
    check_same_monoids(m, n)?;
    let (na, nb) = (m.left.dim(), m.right.dim());
    let mut constraints: Vec<Constraint> = vec![Box::new(move |f: &CMatrix| {
        let lhs = f.compose(&m.action.mat);
        let rhs = c([d(&n.action.mat), t([id(na), d(f), id(nb)])]).eval();
        lhs.sub(&rhs)
    })];
    if let (Some(gm), Some(gn)) = (m.carrier.grades(), n.carrier.grades()) {
        let (gm, gn) = (gm.to_vec(), gn.to_vec());
        constraints.push(Box::new(move |f: &CMatrix| {
            CMatrix::from_fn(f.rows(), f.cols(), |i, j| {
                if gn[i] == gm[j] {
                    C64::new(0.0, 0.0)
                } else {
                    f.get(i, j)
                }
            })
        }));
    }
    Ok(linear_solution_space(n.dim(), m.dim(), &constraints))
}

/// Seeded search for a unitary bimodule isomorphism `M -> N`. A `Found`
/// result is certified; `NotFound` proves nothing.
pub fn find_unitary_bimodule_iso(
    m: &DaggerBimodule,
    n: &DaggerBimodule,
    tol: Tolerance,
    seed: u64,
    attempts: usize,
) -> Result<UnitarySearch> {
    check_same_monoids(m, n)?;
    if m.dim() != n.dim() {
        return Ok(UnitarySearch::DimensionMismatch);
    }
    let basis = bimodule_morphism_space(m, n)?;
    Ok(unitary_in_span(&basis, (n.dim(), m.dim()), tol, seed, attempts, |f| {
        is_bimodule_morphism(f, m, n, tol)
    }))
}

fn push_search(r: &mut Report, name: &str, s: &UnitarySearch) {
    match s {
        UnitarySearch::Found { attempt, .. } => r.push(
            name,
            Status::Pass,
            0.0,
            Some(format!("unitary found on attempt {attempt}")),
        ),
        UnitarySearch::DimensionMismatch => r.push(
            name,
            Status::Fail,
            f64::INFINITY,
            Some("carrier dimensions differ".into()),
        ),
        UnitarySearch::EmptySpan => r.push(name, Status::Fail, f64::INFINITY, Some("no bimodule morphisms".into())),
        UnitarySearch::NotFound { attempts } => r.push(
            name,
            Status::Inconclusive,
            f64::NAN,
            Some(format!("no unitary in {attempts} attempts")),
        ),
    }
}

/// Checks that `M ⊗_B N ≅ A` and `N ⊗_A M ≅ B` as bimodules.
pub fn verify_morita_witness(
    a: &FrobeniusMonoid,
    b: &FrobeniusMonoid,
    m: &DaggerBimodule,
    n: &DaggerBimodule,
    tol: Tolerance,
    seed: u64,
    attempts: usize,
) -> Result<Report> {
    let fits = same_structure(&m.left, a)
        && same_structure(&m.right, b)
        && same_structure(&n.left, b)
        && same_structure(&n.right, a);
    if !fits {
        return Err(Error::structural("witness bimodules are not over (A,B) and (B,A)"));
    }
    let mut r = Report::new("verify_morita_witness", tol);
    r.absorb("m", verify_bimodule(m, tol)?);
    r.absorb("n", verify_bimodule(n, tol)?);
    let (mn, _) = relative_tensor(m, n, tol)?;
    let s = find_unitary_bimodule_iso(&mn, &DaggerBimodule::regular(a), tol, seed, attempts)?;
    push_search(&mut r, "m_tensor_n_iso", &s);
    let (nm, _) = relative_tensor(n, m, tol)?;
    let s = find_unitary_bimodule_iso(&nm, &DaggerBimodule::regular(b), tol, seed, attempts)?;
    push_search(&mut r, "n_tensor_m_iso", &s);
    Ok(r)
}

/// Morita equivalence of FHilb monoids decided by the dimension of the
/// centre, i.e. the number of simple matrix blocks.
pub fn morita_decide_fhilb(a: &FrobeniusMonoid, b: &FrobeniusMonoid) -> Result<bool> {
    Ok(center_basis(a)?.len() == center_basis(b)?.len())
}
