//! Dagger Frobenius monoids. The comonoid is always the dagger of the monoid.

use serde::{Deserialize, Serialize};

use crate::cdagcat::{dimension, CMor, CatObject, DualityWitness, Side};
use crate::diagram::{c, id, m as d, t};
use crate::error::{Error, Result};
use crate::matkernel::{linear_solution_space, CMatrix, Constraint, Tolerance, C64, ONE};
use crate::repg::group::FiniteGroup;
use crate::report::{Report, Status};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MonoidJson", into = "MonoidJson")]
pub struct FrobeniusMonoid {
    carrier: CatObject,
    mult: CMor,
    unit: CMor,
    claim_special: bool,
}

#[derive(Serialize, Deserialize)]
struct MonoidJson {
    carrier: CatObject,
    mult: CMatrix,
    unit: CMatrix,
    #[serde(default)]
    claim_special: bool,
}

impl TryFrom<MonoidJson> for FrobeniusMonoid {
    type Error = Error;
    fn try_from(m: MonoidJson) -> Result<Self> {
        FrobeniusMonoid::new(m.carrier, m.mult, m.unit, m.claim_special)
    }
}

impl From<FrobeniusMonoid> for MonoidJson {
    fn from(m: FrobeniusMonoid) -> Self {
        MonoidJson {
            carrier: m.carrier,
            mult: m.mult.mat,
            unit: m.unit.mat,
            claim_special: m.claim_special,
        }
    }
}

impl FrobeniusMonoid {
    pub fn new(carrier: CatObject, mult: CMatrix, unit: CMatrix, claim_special: bool) -> Result<Self> {
        let aa = carrier.tensor(&carrier)?;
        let mult = CMor::new(aa, carrier.clone(), mult)?;
        let unit = CMor::new(carrier.unit_like(), carrier.clone(), unit)?;
        Ok(FrobeniusMonoid {
            carrier,
            mult,
            unit,
            claim_special,
        })
    }

    /// The unit object with scalar multiplication.
    pub fn trivial() -> Self {
        FrobeniusMonoid::new(CatObject::fhilb(1), CMatrix::identity(1), CMatrix::identity(1), true)
            .expect("scalar monoid")
    }

    /// Scalar monoid on the tensor unit of the same instance as `like`.
    pub fn trivial_like(like: &CatObject) -> Self {
        FrobeniusMonoid::new(like.unit_like(), CMatrix::identity(1), CMatrix::identity(1), true).expect("scalar monoid")
    }

    /// Pointwise multiplication `e_i ⊗ e_i -> e_i` with unit `Σ e_i`.
    pub fn pointwise(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n * n);
        for i in 0..n {
            m.set(i, i * n + i, ONE);
        }
        let u = CMatrix::column(&vec![ONE; n]);
        FrobeniusMonoid::new(CatObject::fhilb(n), m, u, true).expect("pointwise monoid")
    }

    /// Group algebra with the convolution product `e_g ⊗ e_h -> e_{gh}`,
    /// unnormalised, so `m m† = |G| id`.
    pub fn group_algebra(group: &FiniteGroup) -> Self {
        let n = group.order();
        let mut m = CMatrix::zeros(n, n * n);
        for g in 0..n {
            for h in 0..n {
                m.set(group.mul(g, h), g * n + h, ONE);
            }
        }
        let u = CMatrix::unit(n, 1, 0, 0);
        FrobeniusMonoid::new(CatObject::fhilb(n), m, u, false).expect("group algebra")
    }

    pub fn carrier(&self) -> &CatObject {
        &self.carrier
    }

    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn mult(&self) -> &CMatrix {
        &self.mult.mat
    }

    pub fn unit(&self) -> &CMatrix {
        &self.unit.mat
    }

    pub fn claim_special(&self) -> bool {
        self.claim_special
    }

    /// `m† u: unit -> A ⊗ A`.
    pub fn cup(&self) -> CMatrix {
        self.mult.mat.adjoint().compose(&self.unit.mat)
    }

    /// `u† m: A ⊗ A -> unit`.
    pub fn cap(&self) -> CMatrix {
        self.unit.mat.adjoint().compose(&self.mult.mat)
    }

    /// Monoid carried along a unitary `U: A -> B`: `(U m (U† ⊗ U†), U u)`.
    pub fn transport(&self, u: &CMatrix, carrier: CatObject) -> Result<Self> {
        if u.shape() != (carrier.dim(), self.dim()) {
            return Err(Error::structural("transport unitary does not fit the carriers"));
        }
        let ud = u.adjoint();
        FrobeniusMonoid::new(
            carrier,
            u.compose(&self.mult.mat).compose(&ud.tensor(&ud)),
            u.compose(&self.unit.mat),
            self.claim_special,
        )
    }
}

/// Associativity, unit laws, both Frobenius equations and specialness.
/// Specialness is reported as skipped (residual still recorded) when the
/// monoid does not claim it.
pub fn verify_frobenius(a: &FrobeniusMonoid, tol: Tolerance) -> Result<Report> {
    let n = a.dim();
    if a.mult.mat.shape() != (n, n * n) || a.unit.mat.shape() != (n, 1) {
        return Err(Error::structural("monoid structure maps do not fit the carrier"));
    }
    let m = &a.mult.mat;
    let u = &a.unit.mat;
    let md = m.adjoint();
    let mut r = Report::new("verify_frobenius", tol);
    r.equate(
        "associativity",
        None,
        &c([d(m), t([d(m), id(n)])]),
        &c([d(m), t([id(n), d(m)])]),
    );
    r.equate("unit_left", None, &c([d(m), t([d(u), id(n)])]), &id(n));
    r.equate("unit_right", None, &c([d(m), t([id(n), d(u)])]), &id(n));
    let mdm = c([d(&md), d(m)]);
    r.equate("frobenius_left", None, &c([t([d(m), id(n)]), t([id(n), d(&md)])]), &mdm);
    r.equate(
        "frobenius_right",
        None,
        &c([t([id(n), d(m)]), t([d(&md), id(n)])]),
        &mdm,
    );
    let (res, scale) = crate::diagram::compare(&c([d(m), d(&md)]), &id(n));
    if a.claim_special {
        r.residual("special", None, res, scale);
    } else {
        r.push("special", Status::Skipped, res, Some("not claimed".into()));
    }
    if a.carrier.grades().is_some() {
        let g = a.mult.grade_residual().max(a.unit.grade_residual());
        r.residual("grading", None, g, m.frobenius_norm().max(u.frobenius_norm()));
    }
    Ok(r)
}

/// Pair-of-pants monoid on `X ⊗ Xd`: multiplication `(1/√d)(id ⊗ η† ⊗ id)`,
/// unit `√d ε†`, where `d` should be the left dimension of `X`.
pub fn pair_of_pants(w: &DualityWitness, d: C64, tol: Tolerance) -> Result<FrobeniusMonoid> {
    if d.norm() <= tol.eps() {
        return Err(Error::DegenerateDimension(d.norm()));
    }
    let s = d.sqrt();
    let ix = CMatrix::identity(w.x.dim());
    let ixd = CMatrix::identity(w.xd.dim());
    let m = ix.tensor(&w.cup.mat.adjoint()).tensor(&ixd).scale(ONE / s);
    let u = w.cap.mat.adjoint().scale(s);
    FrobeniusMonoid::new(w.x.tensor(&w.xd)?, m, u, true)
}

/// Pair of pants normalised by the left dimension of the witness.
pub fn pants(w: &DualityWitness, tol: Tolerance) -> Result<FrobeniusMonoid> {
    pair_of_pants(w, dimension(w, Side::Left)?, tol)
}

/// Rescale a duality so the cup has unit norm: `η / √d` and `√d ε` with
/// `d = η† η`. The snake equations survive the rescaling.
pub fn normalize_special(w: &DualityWitness, tol: Tolerance) -> Result<DualityWitness> {
    let d = dimension(w, Side::Left)?;
    if d.norm() <= tol.eps() {
        return Err(Error::DegenerateDimension(d.norm()));
    }
    let s = d.sqrt();
    Ok(DualityWitness {
        cup: w.cup.scale(ONE / s),
        cap: w.cap.scale(s),
        ..w.clone()
    })
}

fn check_shapes(f: &CMatrix, a: &FrobeniusMonoid, b: &FrobeniusMonoid) -> Result<()> {
    if f.shape() != (b.dim(), a.dim()) {
        return Err(Error::structural(format!(
            "morphism {:?} does not map a {}-dimensional monoid to a {}-dimensional one",
            f.shape(),
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Homomorphism, cohomomorphism and unitarity residuals of `f: A -> B`, plus
/// the implication "unitary homomorphism ⇒ cohomomorphism".
pub fn check_star_morphism(f: &CMatrix, a: &FrobeniusMonoid, b: &FrobeniusMonoid, tol: Tolerance) -> Result<Report> {
    check_shapes(f, a, b)?;
    let (na, nb) = (a.dim(), b.dim());
    let (ma, ua, mb, ub) = (a.mult(), a.unit(), b.mult(), b.unit());
    let (mad, mbd, uad, ubd) = (ma.adjoint(), mb.adjoint(), ua.adjoint(), ub.adjoint());
    let fd = f.adjoint();
    let (cup_a, cap_b) = (a.cup(), b.cap());
    let (cap_a, cup_b) = (a.cap(), b.cup());
    let mut r = Report::new("check_star_morphism", tol);

    let h1 = r.equate("hom.mult", None, &c([d(f), d(ma)]), &c([d(mb), t([d(f), d(f)])]));
    let h2 = r.compare("hom.unit", None, &f.compose(ua), ub);
    let rhs = c([
        t([id(na), d(&cap_b)]),
        t([id(na), d(f), id(nb)]),
        t([d(&cup_a), id(nb)]),
    ]);
    let h3 = r.equate("hom.dagger", None, &d(&fd), &rhs);

    let c1 = r.equate(
        "cohom.comult",
        None,
        &c([t([d(f), d(f)]), d(&mad)]),
        &c([d(&mbd), d(f)]),
    );
    let c2 = r.compare("cohom.counit", None, &ubd.compose(f), &uad);
    let rhs = c([
        t([d(&cap_a), id(nb)]),
        t([id(na), d(&fd), id(nb)]),
        t([id(na), d(&cup_b)]),
    ]);
    let c3 = r.equate("cohom.dagger", None, &d(f), &rhs);

    let unitary = if f.is_square() {
        let u1 = tol.residual(&fd.compose(f), &CMatrix::identity(na));
        let u2 = tol.residual(&f.compose(&fd), &CMatrix::identity(nb));
        r.residual("unitary", None, u1.max(u2), (na as f64).sqrt())
    } else {
        r.flag("unitary", Some("not square".into()), false)
    };

    let hom = h1 && h2 && h3;
    let cohom = c1 && c2 && c3;
    r.flag("unitary_hom_implies_cohom", None, !(unitary && hom) || cohom);
    Ok(r)
}

/// Orthonormal basis of central elements `z: unit -> A`, i.e. those with
/// `m (z ⊗ id) = m (id ⊗ z)`.
pub fn center_basis(a: &FrobeniusMonoid) -> Result<Vec<CMatrix>> {
    if !matches!(a.carrier, CatObject::FHilb { .. }) {
        return Err(Error::UnsupportedInstance("center_basis needs an FHilb monoid".into()));
    }
    let n = a.dim();
    let eye = CMatrix::identity(n);
    let m = a.mult().clone();
    let constraints: Vec<Constraint> = vec![Box::new(move |z: &CMatrix| {
        m.compose(&z.tensor(&eye)).sub(&m.compose(&eye.tensor(z)))
    })];
    Ok(linear_solution_space(n, 1, &constraints))
}

/// Bit-exact equality of carriers and structure matrices.
pub fn same_structure(a: &FrobeniusMonoid, b: &FrobeniusMonoid) -> bool {
    a.carrier == b.carrier && a.mult.mat == b.mult.mat && a.unit.mat == b.unit.mat
}

/// Full `n x n` matrix algebra in the basis of matrix units `E_ij` (index
/// `i * n + j`), normalised to be special.
pub fn matrix_algebra(n: usize) -> FrobeniusMonoid {
    let d = n * n;
    let s = (n as f64).sqrt();
    let mut m = CMatrix::zeros(d, d * d);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                m.set(i * n + k, (i * n + j) * d + (j * n + k), C64::new(1.0 / s, 0.0));
            }
        }
    }
    let mut u = CMatrix::zeros(d, 1);
    for i in 0..n {
        u.set(i * n + i, 0, C64::new(s, 0.0));
    }
    FrobeniusMonoid::new(CatObject::fhilb(d), m, u, true).expect("matrix algebra")
}
