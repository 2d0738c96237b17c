//! Frobenius monoids of transformations and the correspondence between
//! equivalences of transformations and unitary *-isomorphisms of their
//! monoids.

use std::sync::Arc;

use serde::Serialize;

use super::duality::{chain_instances, find_unitary_modification, upt_compose, upt_dagger, upt_dual};
use super::{verify_upt, Upt};
use crate::bimodule::DaggerBimodule;
use crate::cdagcat::{dimension, standard_duality, CatObject, Side};
use crate::diagram::{c, id, m as d, owned, t};
use crate::error::{Error, Result};
use crate::frobenius::{center_basis, check_star_morphism, pants, verify_frobenius, FrobeniusMonoid};
use crate::matkernel::{cap, cup, split_dagger_idempotent, CMatrix, Tolerance, UnitarySearch, C64};
use crate::repg::functor::FibreFunctor;
use crate::repg::group::FiniteGroup;
use crate::repg::rep::ObjectList;
use crate::report::Report;

fn trace_dim(n: usize) -> Result<f64> {
    Ok(dimension(&standard_duality(&CatObject::fhilb(n)), Side::Left)?.re)
}

/// Pair-of-pants monoid on the carrier `H ⊗ H*` of `α ⊗ α*`, with a
/// certificate that it is special Frobenius and that its multiplication and
/// unit are modifications, so the monoid lives over the source functor.
pub fn frobenius_from_upt(a: &Upt, tol: Tolerance) -> Result<(FrobeniusMonoid, Report)> {
    a.require_unitary("frobenius_from_upt")?;
    let n = a.dim();
    if n == 0 {
        return Err(Error::DegenerateDimension(0.0));
    }
    let dual = upt_dual(a)?;
    let monoid = pants(&standard_duality(&CatObject::fhilb(n)), tol)?;
    let mut r = Report::new("frobenius_from_upt", tol);
    r.absorb("frobenius", verify_frobenius(&monoid, tol)?);
    r.aggregate(
        "mult.modification",
        chain_instances(monoid.mult(), &[a, &dual, a, &dual], &[a, &dual]),
    );
    let unit_src = Upt::identity(a.source().clone());
    r.aggregate(
        "unit.modification",
        chain_instances(monoid.unit(), &[&unit_src], &[a, &dual]),
    );
    Ok((monoid, r))
}

/// The *-isomorphism obtained from an equivalence, with its certificate.
#[derive(Clone, Debug, Serialize)]
pub struct StarIso {
    pub f: CMatrix,
    pub d_x: f64,
    pub d_y: f64,
    pub d_e: f64,
    pub certificate: Report,
}

impl StarIso {
    /// `f` if every check passed, else the stage that failed first.
    pub fn certified(&self) -> Result<&CMatrix> {
        match self.certificate.first_failure() {
            None => Ok(&self.f),
            Some(chk) => {
                let stage = chk.name.split('.').next().unwrap_or("certificate");
                let at = chk.witness.as_deref().map(|w| format!(" at {w}")).unwrap_or_default();
                Err(Error::certification(
                    stage,
                    format!("{} failed{at} with residual {:e}", chk.name, chk.residual),
                ))
            }
        }
    }
}

/// Given `τ: α1 -> α2 ⊗ E` with `E` one-dimensional, the map
/// `f = √(d_X/d_Y) (τ ⊗ τ̄)` between the pair-of-pants monoids, with the `E`
/// wires capped off. The certificate runs `check_star_morphism` on `f`,
/// then checks `τ` and the dimension identity `d_X = d_Y d_E`.
pub fn star_iso_from_equivalence(a1: &Upt, a2: &Upt, e: &Upt, tau: &CMatrix, tol: Tolerance) -> Result<StarIso> {
    if !super::same_functor(a1.source(), a2.source()) {
        return Err(Error::structural("the two transformations have different sources"));
    }
    if e.dim() != 1 {
        return Err(Error::UnsupportedInstance(format!(
            "equivalences need a one-dimensional E, got dimension {}",
            e.dim()
        )));
    }
    let composite = upt_compose(a2, e)?;
    if tau.shape() != (composite.dim(), a1.dim()) {
        return Err(Error::structural(
            "tau does not map the carrier of a1 to that of a2 ⊗ E",
        ));
    }
    let (d_x, d_y, d_e) = (trace_dim(a1.dim())?, trace_dim(a2.dim())?, trace_dim(e.dim())?);
    if d_y.abs() <= tol.eps() {
        return Err(Error::DegenerateDimension(d_y));
    }
    let f = tau.tensor(&tau.conj()).scale_re((d_x / d_y).sqrt());
    let (m1, _) = frobenius_from_upt(a1, tol)?;
    let (m2, _) = frobenius_from_upt(a2, tol)?;
    let mut r = Report::new("star_iso_from_equivalence", tol);
    r.absorb("check_star_morphism", check_star_morphism(&f, &m1, &m2, tol)?);
    let n1 = a1.dim();
    let u1 = tol.residual(&tau.adjoint().compose(tau), &CMatrix::identity(n1));
    let u2 = tol.residual(&tau.compose(&tau.adjoint()), &CMatrix::identity(tau.rows()));
    r.residual("tau.unitary", None, u1.max(u2), (n1 as f64).sqrt());
    r.aggregate("tau.modification", chain_instances(tau, &[a1], &[a2, e]));
    r.residual("dimension_identity", None, (d_x - d_y * d_e).abs(), d_x.abs());
    Ok(StarIso {
        f,
        d_x,
        d_y,
        d_e,
        certificate: r,
    })
}

/// An equivalence `(E, τ)` recovered from a *-isomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct Equivalence {
    pub e: Upt,
    pub tau: CMatrix,
    pub certificate: Report,
}

/// Backward direction: from a unitary *-isomorphism `f` between the
/// pair-of-pants monoids, split the idempotent
/// `f̃ = (1/√(d_X d_Y)) (η_Y† ⊗ id)(id ⊗ f ⊗ id)(id ⊗ η_X)` on `H_Y* ⊗ H_X`,
/// read off `E` on its image and `τ = √d_Y (id ⊗ ι†)(ε_Y† ⊗ id)`.
pub fn equivalence_from_star_iso(a1: &Upt, a2: &Upt, f: &CMatrix, tol: Tolerance) -> Result<Equivalence> {
    if !super::same_functor(a1.source(), a2.source()) {
        return Err(Error::structural("the two transformations have different sources"));
    }
    let (m1, _) = frobenius_from_upt(a1, tol)?;
    let (m2, _) = frobenius_from_upt(a2, tol)?;
    let star = check_star_morphism(f, &m1, &m2, tol)?;
    if let Some(chk) = star.first_failure() {
        return Err(Error::certification(
            "check_star_morphism",
            format!("{} has residual {:e}", chk.name, chk.residual),
        ));
    }
    let (n1, n2) = (a1.dim(), a2.dim());
    let (d_x, d_y) = (trace_dim(n1)?, trace_dim(n2)?);
    let ft = c([
        t([owned(cap(n2)), id(n2), id(n1)]),
        t([id(n2), d(f), id(n1)]),
        t([id(n2), id(n1), owned(cup(n1))]),
    ])
    .eval()
    .scale_re(1.0 / (d_x * d_y).sqrt());
    let (iota, rank) =
        split_dagger_idempotent(&ft, tol).map_err(|e| Error::certification("idempotent", e.to_string()))?;
    if rank != 1 {
        return Err(Error::certification(
            "dimension",
            format!("recovered E has dimension {rank}, expected 1"),
        ));
    }
    let dual2 = upt_dual(a2)?;
    let mut r = Report::new("equivalence_from_star_iso", tol);
    r.aggregate(
        "f_tilde.modification",
        chain_instances(&ft, &[&dual2, a1], &[&dual2, a1]),
    );
    let iota_d = iota.adjoint();
    let comps = (0..a1.objects().len())
        .map(|x| {
            let (d2, d1) = (a2.target().dim(x), a1.target().dim(x));
            c([
                t([d(&iota_d), id(d1)]),
                super::duality::chain_component(&[&dual2, a1], x),
                t([id(d2), d(&iota)]),
            ])
            .eval()
        })
        .collect();
    let e = Upt::new(a2.target().clone(), a1.target().clone(), 1, comps)?;
    let tau = c([t([id(n2), d(&iota_d)]), t([owned(cup(n2)), id(n1)])])
        .eval()
        .scale_re(d_y.sqrt());
    r.absorb("e", verify_upt(&e, tol)?);
    let u1 = tol.residual(&tau.adjoint().compose(&tau), &CMatrix::identity(n1));
    let u2 = tol.residual(&tau.compose(&tau.adjoint()), &CMatrix::identity(n2));
    r.residual("tau.isometry", None, u1, (n1 as f64).sqrt());
    r.residual("tau.coisometry", None, u2, (n2 as f64).sqrt());
    r.aggregate("tau.modification", chain_instances(&tau, &[a1], &[a2, &e]));
    let d_e = trace_dim(e.dim())?;
    r.residual("dim_right", None, (d_e - d_y / d_x).abs(), 1.0);
    r.residual("dim_left", None, (d_e - d_x / d_y).abs(), 1.0);
    Ok(Equivalence { e, tau, certificate: r })
}

/// Forward map, backward map, and forward again.
#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    pub forward: StarIso,
    pub back: Equivalence,
    pub rederived: StarIso,
    pub deviation: f64,
}

pub fn roundtrip(a1: &Upt, a2: &Upt, e: &Upt, tau: &CMatrix, tol: Tolerance) -> Result<RoundTrip> {
    let forward = star_iso_from_equivalence(a1, a2, e, tau, tol)?;
    let f = forward.certified()?.clone();
    let back = equivalence_from_star_iso(a1, a2, &f, tol)?;
    let rederived = star_iso_from_equivalence(a1, a2, &back.e, &back.tau, tol)?;
    let deviation = rederived.f.sub(&f).frobenius_norm();
    Ok(RoundTrip {
        forward,
        back,
        rederived,
        deviation,
    })
}

/// An equivalence instance built from `a1`, a one-dimensional `E: F2 -> F1`
/// and a unitary `V`: `a2 = V (a1 ⊗ E†) V†`, with `τ = V`.
pub fn equivalent_instance(a1: &Upt, e: &Upt, v: &CMatrix) -> Result<(Upt, CMatrix)> {
    let a2 = upt_compose(a1, &upt_dagger(e)?)?.conjugate(v)?;
    Ok((a2, v.clone()))
}

/// One equivalence class of graded transformations.
#[derive(Clone, Debug, Serialize)]
pub struct UptClass {
    pub representative: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub dim: usize,
    pub center_dim: usize,
    pub pants: FrobeniusMonoid,
    pub certificate: Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub group_order: usize,
    pub max_dim: usize,
    pub candidates: usize,
    pub classes: Vec<UptClass>,
}

fn compositions(parts: usize, max_total: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, parts: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == parts {
            out.push(prefix.clone());
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(prefix, parts, left - k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), parts, max_total, &mut out);
    out.retain(|v| v.iter().sum::<usize>() > 0);
    out.sort_by_key(|v| v.iter().sum::<usize>());
    out
}

fn invariants_close(x: &[C64], y: &[C64], tol: Tolerance) -> bool {
    x.iter()
        .zip(y)
        .all(|(a, b)| (a - b).norm() <= tol.eps() * a.norm().max(b.norm()).max(1.0))
}

/// Graded transformations out of the canonical functor with carrier
/// dimension at most `max_dim`, grouped up to equivalence: `α ~ β` when a
/// unitary modification `α -> β ⊗ E` exists for a one-dimensional twist `E`.
/// Each representative carries its verification and pair-of-pants
/// certificate.
pub fn classify_upts(
    group: Arc<FiniteGroup>,
    max_dim: usize,
    tol: Tolerance,
    seed: u64,
    attempts: usize,
) -> Result<Classification> {
    if max_dim > 6 {
        return Err(Error::UnsupportedInstance(format!("max_dim {max_dim} exceeds 6")));
    }
    let objs = Arc::new(ObjectList::standard(group.clone()));
    let f = Arc::new(FibreFunctor::canonical(objs));
    let order = group.order();
    let twists: Vec<Upt> = (0..order)
        .map(|g| {
            let mut delta = vec![0; order];
            delta[g] = 1;
            Upt::graded_on(f.clone(), &delta)
        })
        .collect::<Result<_>>()?;
    let candidates = compositions(order, max_dim);
    let mut reps: Vec<(Upt, Vec<Vec<C64>>)> = Vec::new();
    let mut members: Vec<Vec<Vec<usize>>> = Vec::new();
    for mult in &candidates {
        let cand = Upt::graded_on(f.clone(), mult)?;
        let inv = cand.trace_invariant();
        let mut home = None;
        'reps: for (k, (rep, twisted_invs)) in reps.iter().enumerate() {
            if rep.dim() != cand.dim() {
                continue;
            }
            for (e, tinv) in twists.iter().zip(twisted_invs) {
                if !invariants_close(&inv, tinv, tol) {
                    continue;
                }
                let target = upt_compose(rep, e)?;
                if let UnitarySearch::Found { .. } = find_unitary_modification(&cand, &target, tol, seed, attempts)? {
                    home = Some(k);
                    break 'reps;
                }
            }
        }
        match home {
            Some(k) => members[k].push(mult.clone()),
            None => {
                let twisted_invs = twists
                    .iter()
                    .map(|e| Ok(upt_compose(&cand, e)?.trace_invariant()))
                    .collect::<Result<Vec<_>>>()?;
                reps.push((cand, twisted_invs));
                members.push(vec![mult.clone()]);
            }
        }
    }
    let classes = reps
        .into_iter()
        .zip(members)
        .map(|((rep, _), members)| {
            let mut cert = Report::new("classify_upt", tol);
            cert.absorb("upt", verify_upt(&rep, tol)?);
            let (pants, pc) = frobenius_from_upt(&rep, tol)?;
            cert.absorb("pants", pc);
            let center_dim = center_basis(&pants)?.len();
            Ok(UptClass {
                representative: members[0].clone(),
                members,
                dim: rep.dim(),
                center_dim,
                pants,
                certificate: cert,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Classification {
        group_order: order,
        max_dim,
        candidates: candidates.len(),
        classes,
    })
}

/// Morita context carried by two transformations with the same target:
/// the pair-of-pants monoids `A` on `H_α ⊗ H_α*` and `B` on `H_β ⊗ H_β*`,
/// with `M` on `H_α ⊗ H_β*` and `N` on `H_β ⊗ H_α*` acting by contraction.
pub fn morita_context_from_upts(
    a: &Upt,
    b: &Upt,
    tol: Tolerance,
) -> Result<(FrobeniusMonoid, FrobeniusMonoid, DaggerBimodule, DaggerBimodule)> {
    if !super::same_functor(a.target(), b.target()) {
        return Err(Error::structural("transformations have different target functors"));
    }
    let (ma, _) = frobenius_from_upt(a, tol)?;
    let (mb, _) = frobenius_from_upt(b, tol)?;
    let (na, nb) = (a.dim(), b.dim());
    let s = 1.0 / ((na * nb) as f64).sqrt();
    let rho_m = CMatrix::identity(na)
        .tensor(&cap(na))
        .tensor(&cap(nb))
        .tensor(&CMatrix::identity(nb))
        .scale_re(s);
    let rho_n = CMatrix::identity(nb)
        .tensor(&cap(nb))
        .tensor(&cap(na))
        .tensor(&CMatrix::identity(na))
        .scale_re(s);
    let m = DaggerBimodule::new(ma.clone(), mb.clone(), CatObject::fhilb(na * nb), rho_m)?;
    let n = DaggerBimodule::new(mb.clone(), ma.clone(), CatObject::fhilb(nb * na), rho_n)?;
    Ok((ma, mb, m, n))
}
