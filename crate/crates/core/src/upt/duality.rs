//! Dagger, duals and composition of transformations, and modifications
//! between them.

use serde::{Deserialize, Serialize};

use super::{same_functor, verify_upt, Upt};
use crate::cdagcat::{standard_duality, verify_duality, CatObject};
use crate::diagram::{c, id, m as d, t};
use crate::error::{Error, Result};
use crate::matkernel::{
    cap, cup, linear_solution_space, unitary_in_span, CMatrix, Constraint, Tolerance, UnitarySearch,
};
use crate::report::{Instance, Report};

fn dual_index(a: &Upt, i: usize) -> Result<usize> {
    a.objects()
        .dual(i)
        .ok_or_else(|| Error::Structural(format!("object {i} has no listed dual")))
}

/// Right dual `α*: F2 -> F1` on `H*`: each component is the transpose of
/// `α_{X*}` taken with the induced duals of the functors and the standard
/// duality on `H`.
pub fn upt_dual(a: &Upt) -> Result<Upt> {
    let n = a.dim();
    let (f1, f2) = (a.source(), a.target());
    let comps = (0..a.objects().len())
        .map(|x| {
            let y = dual_index(a, x)?;
            let (dx1, dx2) = (f1.dim(x), f2.dim(x));
            let c1 = f1.induced_cup(y, x)?;
            let k2 = f2.induced_cap(y, x)?;
            let cup_a = c([t([id(n), d(&c1), id(n)]), owned_cup(n)]).eval();
            let cap_b = c([owned_cap(n), t([id(n), d(&k2), id(n)])]).eval();
            Ok(c([
                t([id(n * dx1), d(&cap_b)]),
                t([id(n * dx1), d(a.component(y)), id(dx2 * n)]),
                t([d(&cup_a), id(dx2 * n)]),
            ])
            .eval())
        })
        .collect::<Result<Vec<_>>>()?;
    Upt::new(a.target().clone(), a.source().clone(), n, comps)
}

/// Left dual, built from the left dualities `(ε†, η†)` by the opposite
/// transposition.
pub fn upt_left_dual(a: &Upt) -> Result<Upt> {
    let n = a.dim();
    let (f1, f2) = (a.source(), a.target());
    let comps = (0..a.objects().len())
        .map(|x| {
            let z = dual_index(a, x)?;
            let (dx1, dx2) = (f1.dim(x), f2.dim(x));
            let (dz1, dz2) = (f1.dim(z), f2.dim(z));
            let lcup_f1 = f1.induced_cap(z, x)?.adjoint();
            let lcap_f2 = f2.induced_cup(z, x)?.adjoint();
            let lcup_a = c([t([id(dz1), owned_cup(n), id(dx1)]), d(&lcup_f1)]).eval();
            let lcap_b = c([d(&lcap_f2), t([id(dx2), owned_cap(n), id(dz2)])]).eval();
            Ok(c([
                t([d(&lcap_b), id(n * dx1)]),
                t([id(dx2 * n), d(a.component(z)), id(n * dx1)]),
                t([id(dx2 * n), d(&lcup_a)]),
            ])
            .eval())
        })
        .collect::<Result<Vec<_>>>()?;
    Upt::new(a.target().clone(), a.source().clone(), n, comps)
}

/// Dagger `α†: F2 -> F1` on `H*`: the daggered component with its `H`
/// wires bent round by the standard cup and cap.
pub fn upt_dagger(a: &Upt) -> Result<Upt> {
    let n = a.dim();
    let comps = (0..a.objects().len())
        .map(|x| {
            let (dx1, dx2) = (a.source().dim(x), a.target().dim(x));
            let ad = a.component(x).adjoint();
            c([
                t([id(n), id(dx1), owned_cap(n)]),
                t([id(n), d(&ad), id(n)]),
                t([owned_cup(n), id(dx2), id(n)]),
            ])
            .eval()
        })
        .collect();
    Upt::new(a.target().clone(), a.source().clone(), n, comps)
}

fn owned_cup<'a>(n: usize) -> crate::diagram::Diagram<'a> {
    crate::diagram::owned(cup(n))
}

fn owned_cap<'a>(n: usize) -> crate::diagram::Diagram<'a> {
    crate::diagram::owned(cap(n))
}

/// Horizontal composite `α ⊗ β: F1 -> F3` on `H_α ⊗ H_β`, with components
/// `(id ⊗ β_X)(α_X ⊗ id)`.
pub fn upt_compose(a: &Upt, b: &Upt) -> Result<Upt> {
    if !same_functor(a.target(), b.source()) {
        return Err(Error::structural("middle functors differ"));
    }
    a.require_unitary("compose")?;
    b.require_unitary("compose")?;
    let (na, nb) = (a.dim(), b.dim());
    let comps = (0..a.objects().len())
        .map(|x| c([t([id(na), d(b.component(x))]), t([d(a.component(x)), id(nb)])]).eval())
        .collect();
    Upt::new(a.source().clone(), b.target().clone(), na * nb, comps)
}

/// Component at object `x` of the composite of `chain` (first factor
/// applied first), as an unevaluated diagram.
pub(crate) fn chain_component<'a>(chain: &[&'a Upt], x: usize) -> crate::diagram::Diagram<'a> {
    let dims: Vec<usize> = chain.iter().map(|u| u.dim()).collect();
    let mut steps = Vec::with_capacity(chain.len());
    for (k, u) in chain.iter().enumerate().rev() {
        let before: usize = dims[..k].iter().product();
        let after: usize = dims[k + 1..].iter().product();
        steps.push(t([id(before), d(u.component(x)), id(after)]));
    }
    c(steps)
}

/// Modification equation for `f` between two composites, per object,
/// without materialising the composite components.
pub(crate) fn chain_instances(f: &CMatrix, src: &[&Upt], tgt: &[&Upt]) -> Vec<Instance> {
    let first = src[0];
    (0..first.objects().len())
        .map(|x| {
            let d1 = first.source().dim(x);
            let d2 = src[src.len() - 1].target().dim(x);
            crate::diagram::instance(
                &c([chain_component(tgt, x), t([id(d1), d(f)])]),
                &c([t([d(f), id(d2)]), chain_component(src, x)]),
                format!("object {x}"),
            )
        })
        .collect()
}

/// Largest componentwise residual of `α** = α`.
pub fn double_dual_residual(a: &Upt) -> Result<(f64, f64)> {
    let dd = upt_dual(&upt_dual(a)?)?;
    let tol = Tolerance::default();
    Ok((0..a.objects().len())
        .map(|i| {
            (
                tol.residual(dd.component(i), a.component(i)),
                tol.scale(dd.component(i), a.component(i)),
            )
        })
        .fold((0.0, 1.0), |acc, x| if x.0 > acc.0 { x } else { acc }))
}

/// A modification `f: α -> β`, i.e. `f: H_α -> H_β` with
/// `β_X (id ⊗ f) = (f ⊗ id) α_X` for every object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModificationJson", into = "ModificationJson")]
pub struct Modification {
    source: Upt,
    target: Upt,
    mat: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct ModificationJson {
    source: Upt,
    target: Upt,
    mat: CMatrix,
}

impl TryFrom<ModificationJson> for Modification {
    type Error = Error;
    fn try_from(j: ModificationJson) -> Result<Self> {
        Modification::new(j.source, j.target, j.mat)
    }
}

impl From<Modification> for ModificationJson {
    fn from(m: Modification) -> Self {
        ModificationJson {
            source: m.source,
            target: m.target,
            mat: m.mat,
        }
    }
}

impl Modification {
    pub fn new(source: Upt, target: Upt, mat: CMatrix) -> Result<Self> {
        if !same_functor(source.source(), target.source()) || !same_functor(source.target(), target.target()) {
            return Err(Error::structural("modification endpoints have different functors"));
        }
        if mat.shape() != (target.dim(), source.dim()) {
            return Err(Error::Structural(format!(
                "modification matrix has shape {:?}, expected {:?}",
                mat.shape(),
                (target.dim(), source.dim())
            )));
        }
        Ok(Modification { source, target, mat })
    }

    pub fn source(&self) -> &Upt {
        &self.source
    }

    pub fn target(&self) -> &Upt {
        &self.target
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    /// Componentwise dagger `f†: β -> α`.
    pub fn dagger(&self) -> Modification {
        Modification {
            source: self.target.clone(),
            target: self.source.clone(),
            mat: self.mat.adjoint(),
        }
    }

    /// Horizontal composite `f ⊗ g: α ⊗ γ -> β ⊗ δ`.
    pub fn tensor(&self, other: &Modification) -> Result<Modification> {
        Modification::new(
            upt_compose(&self.source, &other.source)?,
            upt_compose(&self.target, &other.target)?,
            self.mat.tensor(&other.mat),
        )
    }

    /// Vertical composite `g ∘ f`.
    pub fn then(&self, g: &Modification) -> Result<Modification> {
        if g.source != self.target {
            return Err(Error::structural("modifications do not compose"));
        }
        Modification::new(self.source.clone(), g.target.clone(), g.mat.compose(&self.mat))
    }
}

fn modification_instances(f: &CMatrix, a: &Upt, b: &Upt) -> Vec<Instance> {
    (0..a.objects().len())
        .map(|x| {
            let (d1, d2) = (a.source().dim(x), a.target().dim(x));
            crate::diagram::instance(
                &c([d(b.component(x)), t([id(d1), d(f)])]),
                &c([t([d(f), id(d2)]), d(a.component(x))]),
                format!("object {x}"),
            )
        })
        .collect()
}

/// Whether `f` is a modification `a -> b` within `tol`.
pub fn is_modification(f: &CMatrix, a: &Upt, b: &Upt, tol: Tolerance) -> bool {
    f.shape() == (b.dim(), a.dim())
        && modification_instances(f, a, b)
            .iter()
            .all(|i| tol.accepts(i.residual, i.scale))
}

/// The modification equation on every object, and the same for the
/// componentwise dagger in the opposite direction.
pub fn verify_modification(m: &Modification, tol: Tolerance) -> Result<Report> {
    let mut r = Report::new("verify_modification", tol);
    r.aggregate("modification", modification_instances(&m.mat, &m.source, &m.target));
    r.aggregate(
        "dagger_is_modification",
        modification_instances(&m.mat.adjoint(), &m.target, &m.source),
    );
    Ok(r)
}

/// Orthonormal basis of all modifications `a -> b`.
pub fn modification_space(a: &Upt, b: &Upt) -> Result<Vec<CMatrix>> {
    if !same_functor(a.source(), b.source()) || !same_functor(a.target(), b.target()) {
        return Err(Error::structural("transformations have different endpoints"));
    }
    let constraints: Vec<Constraint> = (0..a.objects().len())
        .map(|x| {
            let (d1, d2) = (a.source().dim(x), a.target().dim(x));
            let (ax, bx) = (a.component(x), b.component(x));
            Box::new(move |f: &CMatrix| {
                let lhs = c([d(bx), t([id(d1), d(f)])]).eval();
                let rhs = c([t([d(f), id(d2)]), d(ax)]).eval();
                lhs.sub(&rhs)
            }) as Constraint
        })
        .collect();
    Ok(linear_solution_space(b.dim(), a.dim(), &constraints))
}

/// Seeded search for a unitary modification `a -> b`; see
/// [`unitary_in_span`] for what each outcome proves.
pub fn find_unitary_modification(
    a: &Upt,
    b: &Upt,
    tol: Tolerance,
    seed: u64,
    attempts: usize,
) -> Result<UnitarySearch> {
    if !same_functor(a.source(), b.source()) || !same_functor(a.target(), b.target()) {
        return Err(Error::structural("transformations have different endpoints"));
    }
    if a.dim() != b.dim() {
        return Ok(UnitarySearch::DimensionMismatch);
    }
    let basis = modification_space(a, b)?;
    Ok(unitary_in_span(&basis, (b.dim(), a.dim()), tol, seed, attempts, |f| {
        is_modification(f, a, b, tol)
    }))
}

/// Unit `η = cup: id_{F2} -> α* ⊗ α` and counit `ε = cap: α ⊗ α* -> id_{F1}`.
pub fn duality_modifications(a: &Upt) -> Result<(Modification, Modification)> {
    let dual = upt_dual(a)?;
    let n = a.dim();
    let eta = Modification::new(Upt::identity(a.target().clone()), upt_compose(&dual, a)?, cup(n))?;
    let eps = Modification::new(upt_compose(a, &dual)?, Upt::identity(a.source().clone()), cap(n))?;
    Ok((eta, eps))
}

/// The duality theorem for one transformation: the dual is a unitary
/// pseudonatural transformation, `η` and `ε` are modifications, the
/// modification snakes hold and the carrier cup and cap are a dagger
/// duality.
pub fn verify_upt_duality(a: &Upt, tol: Tolerance) -> Result<Report> {
    let mut r = Report::new("verify_upt_duality", tol);
    let dual = upt_dual(a)?;
    r.absorb("dual", verify_upt(&dual, tol)?);
    let (eta, eps) = duality_modifications(a)?;
    r.absorb("eta", verify_modification(&eta, tol)?);
    r.absorb("epsilon", verify_modification(&eps, tol)?);
    let n = a.dim();
    // (ε ⊗ id_α)(id_α ⊗ η) = id_α and (id_α* ⊗ ε)(η ⊗ id_α*) = id_α*.
    r.equate(
        "snake_alpha",
        None,
        &c([t([d(eps.mat()), id(n)]), t([id(n), d(eta.mat())])]),
        &id(n),
    );
    r.equate(
        "snake_dual",
        None,
        &c([t([id(n), d(eps.mat())]), t([d(eta.mat()), id(n)])]),
        &id(n),
    );
    r.absorb("carrier", verify_duality(&standard_duality(&CatObject::fhilb(n)), tol)?);
    let (res, scale) = double_dual_residual(a)?;
    r.residual("double_dual", None, res, scale);
    Ok(r)
}
