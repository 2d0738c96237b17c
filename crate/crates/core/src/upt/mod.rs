//! Unitary pseudonatural transformations between fibre functors.
//!
//! A transformation `α: F1 -> F2` has a carrier Hilbert space `H` and, for
//! every listed object `X`, a component `α_X: F1(X) ⊗ H -> H ⊗ F2(X)`.

pub mod classify;
pub mod duality;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagram::{c, id, m as d, t};
use crate::error::{Error, Result};
use crate::matkernel::{CMatrix, Tolerance, C64, ONE};
use crate::par;
use crate::repg::functor::{Cocycle, FibreFunctor};
use crate::repg::group::FiniteGroup;
use crate::repg::rep::{intertwiner_basis, klein_label, ObjectList};
use crate::report::{Instance, Report, Status};

pub use classify::{
    classify_upts, equivalence_from_star_iso, equivalent_instance, frobenius_from_upt, morita_context_from_upts,
    roundtrip, star_iso_from_equivalence, Classification, Equivalence, RoundTrip, StarIso, UptClass,
};
pub use duality::{
    double_dual_residual, duality_modifications, find_unitary_modification, is_modification, modification_space,
    upt_compose, upt_dagger, upt_dual, upt_left_dual, verify_modification, verify_upt_duality, Modification,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UptJson", into = "UptJson")]
pub struct Upt {
    source: Arc<FibreFunctor>,
    target: Arc<FibreFunctor>,
    dim: usize,
    components: Vec<CMatrix>,
    unitary: bool,
}

#[derive(Serialize, Deserialize)]
struct UptJson {
    source: FibreFunctor,
    target: FibreFunctor,
    dim: usize,
    components: BTreeMap<String, CMatrix>,
}

impl TryFrom<UptJson> for Upt {
    type Error = Error;
    fn try_from(j: UptJson) -> Result<Self> {
        let n = j.source.len();
        let mut comps = Vec::with_capacity(n);
        for i in 0..n {
            let m = j
                .components
                .get(&i.to_string())
                .ok_or_else(|| Error::Structural(format!("missing component for object {i}")))?;
            comps.push(m.clone());
        }
        if j.components.len() != n {
            return Err(Error::structural("components must be keyed by object indices"));
        }
        Upt::new(Arc::new(j.source), Arc::new(j.target), j.dim, comps)
    }
}

impl From<Upt> for UptJson {
    fn from(u: Upt) -> Self {
        UptJson {
            source: (*u.source).clone(),
            target: (*u.target).clone(),
            dim: u.dim,
            components: u
                .components
                .into_iter()
                .enumerate()
                .map(|(i, m)| (i.to_string(), m))
                .collect(),
        }
    }
}

pub(crate) fn same_functor(a: &Arc<FibreFunctor>, b: &Arc<FibreFunctor>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Upt {
    /// Checks shapes only; whether the components are unitary is recorded
    /// (at the default tolerance) and non-unitary transformations are kept
    /// out of composition.
    pub fn new(
        source: Arc<FibreFunctor>,
        target: Arc<FibreFunctor>,
        dim: usize,
        components: Vec<CMatrix>,
    ) -> Result<Self> {
        if source.objects() != target.objects() {
            return Err(Error::structural("source and target live on different object lists"));
        }
        if components.len() != source.len() {
            return Err(Error::Structural(format!(
                "{} components for {} objects",
                components.len(),
                source.len()
            )));
        }
        for (i, a) in components.iter().enumerate() {
            let want = (dim * target.dim(i), source.dim(i) * dim);
            if a.shape() != want {
                return Err(Error::Structural(format!(
                    "component {i} has shape {:?}, expected {want:?}",
                    a.shape()
                )));
            }
        }
        let tol = Tolerance::default();
        let unitary = components.iter().all(|a| a.is_unitary(tol));
        Ok(Upt {
            source,
            target,
            dim,
            components,
            unitary,
        })
    }

    /// Identity transformation on `f`: trivial carrier, identity components.
    pub fn identity(f: Arc<FibreFunctor>) -> Self {
        let comps = (0..f.len()).map(|i| CMatrix::identity(f.dim(i))).collect();
        Upt::new(f.clone(), f, 1, comps).expect("identity transformation")
    }

    /// `H = ⊕_g C^{mult[g]}` with grades sorted, `α_X(x ⊗ h_g) = h_g ⊗ ρ_X(g) x`,
    /// as an endotransformation of `f`.
    pub fn graded_on(f: Arc<FibreFunctor>, mult: &[usize]) -> Result<Self> {
        let objs = f.objects().clone();
        let group = objs.group();
        if mult.len() != group.order() {
            return Err(Error::Structural(format!(
                "multiplicity vector has length {}, group order is {}",
                mult.len(),
                group.order()
            )));
        }
        let grades: Vec<usize> = mult
            .iter()
            .enumerate()
            .flat_map(|(g, &k)| std::iter::repeat_n(g, k))
            .collect();
        let n = grades.len();
        let comps = (0..objs.len())
            .map(|i| {
                let rep = objs.rep(i);
                let dx = rep.dim();
                let mut a = CMatrix::zeros(n * dx, dx * n);
                for (h, &g) in grades.iter().enumerate() {
                    let r = rep.mat(g);
                    for x in 0..dx {
                        for y in 0..dx {
                            a.set(h * dx + y, x * n + h, r.get(y, x));
                        }
                    }
                }
                a
            })
            .collect();
        Upt::new(f.clone(), f, n, comps)
    }

    /// The Pauli transformation on Z2×Z2: canonical functor to the
    /// cocycle-twisted one, `H = C^2`, `α_(a,b) = Z^a X^b`.
    pub fn pauli(tol: Tolerance) -> Result<Self> {
        let objs = Arc::new(ObjectList::characters(Arc::new(FiniteGroup::klein()))?);
        let f1 = Arc::new(FibreFunctor::canonical(objs.clone()));
        let psi = Cocycle::klein(&objs)?;
        let f2 = Arc::new(FibreFunctor::twisted(objs.clone(), &psi, tol)?);
        let z = CMatrix::diag(&[ONE, C64::new(-1.0, 0.0)]);
        let x = CMatrix::from_fn(2, 2, |i, j| if i != j { ONE } else { C64::new(0.0, 0.0) });
        let comps = objs
            .reps()
            .iter()
            .map(|rep| {
                let (a, b) = klein_label(rep).ok_or_else(|| Error::structural("object is not a Klein character"))?;
                let za = if a == 1 { z.clone() } else { CMatrix::identity(2) };
                let xb = if b == 1 { x.clone() } else { CMatrix::identity(2) };
                Ok(za.compose(&xb))
            })
            .collect::<Result<Vec<_>>>()?;
        Upt::new(f1, f2, 2, comps)
    }

    /// Components `(S ⊗ id) α_X (id ⊗ S⁻¹)`. A non-unitary `S` gives a
    /// pseudonatural transformation that is not unitary.
    pub fn conjugate(&self, s: &CMatrix) -> Result<Self> {
        let n = self.dim;
        if s.shape() != (n, n) {
            return Err(Error::structural("conjugating matrix does not fit the carrier"));
        }
        let s_inv = s
            .inverse()
            .ok_or_else(|| Error::NonInvertible("conjugating matrix".into()))?;
        let comps = self
            .components
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let (d1, d2) = (self.source.dim(i), self.target.dim(i));
                c([t([d(s), id(d2)]), d(a), t([id(d1), d(&s_inv)])]).eval()
            })
            .collect();
        Upt::new(self.source.clone(), self.target.clone(), n, comps)
    }

    /// The same data with component `i` replaced.
    pub fn with_component(&self, i: usize, a: CMatrix) -> Result<Self> {
        let mut comps = self.components.clone();
        if i >= comps.len() {
            return Err(Error::Structural(format!("no object {i}")));
        }
        comps[i] = a;
        Upt::new(self.source.clone(), self.target.clone(), self.dim, comps)
    }

    pub fn source(&self) -> &Arc<FibreFunctor> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FibreFunctor> {
        &self.target
    }

    pub fn objects(&self) -> &Arc<ObjectList> {
        self.source.objects()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, i: usize) -> &CMatrix {
        &self.components[i]
    }

    pub fn components(&self) -> &[CMatrix] {
        &self.components
    }

    /// Whether every component was unitary at construction.
    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub(crate) fn require_unitary(&self, what: &str) -> Result<()> {
        if self.unitary {
            Ok(())
        } else {
            Err(Error::NotUnitary(format!("{what}: components are not unitary")))
        }
    }

    /// `tr(swap ∘ α_X)` for each object; invariant under unitary
    /// modifications, and for graded transformations the character pairing
    /// `Σ_g mult(g) χ_X(g)`.
    pub fn trace_invariant(&self) -> Vec<C64> {
        let n = self.dim;
        self.components
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let dx = self.target.dim(i);
                // (swap α)[(x, h), col] = α[(h, x), col]
                let mut s = C64::new(0.0, 0.0);
                for x in 0..dx {
                    for h in 0..n {
                        s += a.get(h * dx + x, x * n + h);
                    }
                }
                s
            })
            .collect()
    }
}

/// Graded endotransformation of the canonical functor on `objs`.
pub fn graded_upt(objs: &Arc<ObjectList>, mult: &[usize]) -> Result<Upt> {
    Upt::graded_on(Arc::new(FibreFunctor::canonical(objs.clone())), mult)
}

/// Naturality over intertwiner bases, monoidality for listed products, the
/// unit law and unitarity; then the cross-check that unitarity holds exactly
/// when the dagger equals the dual.
pub fn verify_upt(a: &Upt, tol: Tolerance) -> Result<Report> {
    let objs = a.objects().clone();
    let (f1, f2) = (&a.source, &a.target);
    let n = a.dim;
    let k = objs.len();
    let mut r = Report::new("verify_upt", tol);

    let unitary: Vec<Instance> = a
        .components
        .iter()
        .enumerate()
        .flat_map(|(i, x)| {
            let w = format!("object {i}");
            [
                Instance::compare(&x.adjoint().compose(x), &CMatrix::identity(x.cols()), w.clone()),
                Instance::compare(&x.compose(&x.adjoint()), &CMatrix::identity(x.rows()), w),
            ]
        })
        .collect();
    let unitary_ok = r.aggregate("unitarity", unitary);

    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let nat = par::map(&pairs, |&(i, j)| -> Result<Vec<Instance>> {
        let basis = intertwiner_basis(objs.rep(i), objs.rep(j))?;
        Ok(basis
            .iter()
            .map(|f| {
                crate::diagram::instance(
                    &c([d(&a.components[j]), t([d(f), id(n)])]),
                    &c([t([id(n), d(f)]), d(&a.components[i])]),
                    format!("pair ({i},{j})"),
                )
            })
            .collect())
    });
    let mut nat_all = Vec::new();
    for v in nat {
        nat_all.extend(v?);
    }
    r.aggregate("naturality", nat_all);

    let mut skipped = 0;
    let mut mon = Vec::new();
    for &(i, j) in &pairs {
        let Some(p) = objs.product(i, j) else {
            skipped += 1;
            continue;
        };
        let (di, dj) = (objs.dim(i), objs.dim(j));
        mon.push(crate::diagram::instance(
            &c([d(&a.components[p]), t([d(f1.mult(i, j)), id(n)])]),
            &c([
                t([id(n), d(f2.mult(i, j))]),
                t([d(&a.components[i]), id(dj)]),
                t([id(di), d(&a.components[j])]),
            ]),
            format!("pair ({i},{j})"),
        ));
    }
    r.aggregate("monoidality", mon);
    if skipped > 0 {
        r.push(
            "monoidality.skipped",
            Status::Skipped,
            0.0,
            Some(format!("{skipped} pairs with an unlisted tensor")),
        );
    }

    r.equate(
        "unit",
        Some("object 0".into()),
        &c([d(&a.components[0]), t([d(f1.unitor()), id(n)])]),
        &t([id(n), d(f2.unitor())]),
    );

    if (0..k).all(|i| objs.dual(i).is_some()) {
        let dag = upt_dagger(a)?;
        let dual = upt_dual(a)?;
        let insts: Vec<Instance> = (0..k)
            .map(|i| Instance::compare(dag.component(i), dual.component(i), format!("object {i}")))
            .collect();
        let worst = insts.iter().map(|x| x.residual).fold(0.0, f64::max);
        let equal = insts.iter().all(|x| tol.accepts(x.residual, x.scale));
        let agree = equal == unitary_ok;
        r.push(
            "unitarity_equivalence",
            if agree { Status::Pass } else { Status::Fail },
            worst,
            Some(format!("unitary: {unitary_ok}, dagger equals dual: {equal}")),
        );
    } else {
        r.push(
            "unitarity_equivalence",
            Status::Skipped,
            0.0,
            Some("object list is not closed under duals".into()),
        );
    }
    Ok(r)
}
