//! Fibre functors `Rep(G) -> Hilb` on a finite object list.
//!
//! Every functor here sends a representation to its underlying space and a
//! intertwiner to its own matrix; `F(X ⊗ Y)` is the Kronecker space of the
//! two factors. A functor is then determined by its multiplicators
//! `m_{X,Y}: F(X) ⊗ F(Y) -> F(X ⊗ Y)` and its unitor `u: C -> F(1)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{cap, cup, CMatrix, Tolerance, C64, ONE};
use crate::par;
use crate::repg::rep::{intertwiner_basis, klein_label, ObjectList};
use crate::report::{Instance, Report};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctorJson", into = "FunctorJson")]
pub struct FibreFunctor {
    objects: Arc<ObjectList>,
    mult: Vec<Vec<CMatrix>>,
    unitor: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct FunctorJson {
    objects: ObjectList,
    mult: BTreeMap<String, CMatrix>,
    unitor: CMatrix,
}

impl TryFrom<FunctorJson> for FibreFunctor {
    type Error = Error;
    fn try_from(f: FunctorJson) -> Result<Self> {
        let n = f.objects.len();
        let mut mult = vec![Vec::with_capacity(n); n];
        for (i, row) in mult.iter_mut().enumerate() {
            for j in 0..n {
                let key = format!("{i},{j}");
                let m = f
                    .mult
                    .get(&key)
                    .ok_or_else(|| Error::Parse(format!("missing multiplicator \"{key}\"")))?;
                row.push(m.clone());
            }
        }
        if f.mult.len() != n * n {
            return Err(Error::Parse(format!(
                "expected {} multiplicators, got {}",
                n * n,
                f.mult.len()
            )));
        }
        FibreFunctor::from_parts(Arc::new(f.objects), mult, f.unitor)
    }
}

impl From<FibreFunctor> for FunctorJson {
    fn from(f: FibreFunctor) -> Self {
        let mut mult = BTreeMap::new();
        for (i, row) in f.mult.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                mult.insert(format!("{i},{j}"), m.clone());
            }
        }
        FunctorJson {
            objects: (*f.objects).clone(),
            mult,
            unitor: f.unitor,
        }
    }
}

/// Normalised 2-cocycle on the listed characters of an abelian group.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    table: Vec<Vec<C64>>,
}

impl Cocycle {
    pub fn new(table: Vec<Vec<C64>>) -> Result<Self> {
        let n = table.len();
        if table.iter().any(|r| r.len() != n) {
            return Err(Error::structural("cocycle table must be square"));
        }
        Ok(Cocycle { table })
    }

    pub fn trivial(n: usize) -> Self {
        Cocycle {
            table: vec![vec![ONE; n]; n],
        }
    }

    /// `ψ(x, y) = (-1)^{x2 y1}` on Z2×Z2 characters labelled `(x1, x2)`.
    pub fn klein(objs: &ObjectList) -> Result<Self> {
        let labels = (0..objs.len())
            .map(|i| klein_label(objs.rep(i)).ok_or(Error::NotACharacter(i)))
            .collect::<Result<Vec<_>>>()?;
        let table = labels
            .iter()
            .map(|x| labels.iter().map(|y| if x.1 * y.0 == 1 { -ONE } else { ONE }).collect())
            .collect();
        Cocycle::new(table)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.table[i][j]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Unit modulus, normalisation and the cocycle identity
    /// `ψ(g,h) ψ(gh,k) = ψ(h,k) ψ(g,hk)` over listed products.
    pub fn verify(&self, objs: &ObjectList, tol: Tolerance) -> Result<()> {
        let n = objs.len();
        if self.len() != n {
            return Err(Error::structural(format!(
                "cocycle indexed by {} objects, list has {n}",
                self.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let z = self.table[i][j];
                if (z.norm() - 1.0).abs() > tol.eps() {
                    return Err(Error::structural(format!("cocycle value at ({i},{j}) is not a phase")));
                }
            }
            if (self.table[0][i] - ONE).norm() > tol.eps() || (self.table[i][0] - ONE).norm() > tol.eps() {
                return Err(Error::structural(format!("cocycle is not normalised at {i}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (Some(ab), Some(bc)) = (objs.product(a, b), objs.product(b, c)) else {
                        continue;
                    };
                    let lhs = self.table[a][b] * self.table[ab][c];
                    let rhs = self.table[b][c] * self.table[a][bc];
                    let residual = (lhs - rhs).norm();
                    if residual > tol.eps() {
                        return Err(Error::NotACocycle {
                            triple: (a, b, c),
                            residual,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

impl FibreFunctor {
    /// Structural constructor: checks shapes only.
    pub fn from_parts(objects: Arc<ObjectList>, mult: Vec<Vec<CMatrix>>, unitor: CMatrix) -> Result<Self> {
        let n = objects.len();
        if mult.len() != n || mult.iter().any(|r| r.len() != n) {
            return Err(Error::structural(format!("need an {n}x{n} table of multiplicators")));
        }
        for (i, row) in mult.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                let d = objects.dim(i) * objects.dim(j);
                if m.shape() != (d, d) {
                    return Err(Error::structural(format!(
                        "multiplicator ({i},{j}) has shape {:?}, expected {d}x{d}",
                        m.shape()
                    )));
                }
            }
        }
        if unitor.shape() != (1, 1) {
            return Err(Error::structural("unitor must be 1x1"));
        }
        Ok(FibreFunctor { objects, mult, unitor })
    }

    /// The forgetful functor: identity multiplicators and unitor.
    pub fn canonical(objects: Arc<ObjectList>) -> Self {
        let n = objects.len();
        let mult = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| CMatrix::identity(objects.dim(i) * objects.dim(j)))
                    .collect()
            })
            .collect();
        FibreFunctor {
            objects,
            mult,
            unitor: CMatrix::identity(1),
        }
    }

    /// Twist of the canonical functor on characters by a 2-cocycle.
    pub fn twisted(objects: Arc<ObjectList>, psi: &Cocycle, tol: Tolerance) -> Result<Self> {
        if let Some(i) = (0..objects.len()).find(|&i| !objects.rep(i).is_character()) {
            return Err(Error::NotACharacter(i));
        }
        psi.verify(&objects, tol)?;
        let n = objects.len();
        let mult = (0..n)
            .map(|i| (0..n).map(|j| CMatrix::scalar(psi.get(i, j))).collect())
            .collect();
        Ok(FibreFunctor {
            objects,
            mult,
            unitor: CMatrix::identity(1),
        })
    }

    pub fn objects(&self) -> &Arc<ObjectList> {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn dim(&self, i: usize) -> usize {
        self.objects.dim(i)
    }

    pub fn mult(&self, i: usize, j: usize) -> &CMatrix {
        &self.mult[i][j]
    }

    pub fn unitor(&self) -> &CMatrix {
        &self.unitor
    }

    pub fn set_mult(&mut self, i: usize, j: usize, m: CMatrix) -> Result<()> {
        if m.shape() != self.mult[i][j].shape() {
            return Err(Error::structural("replacement multiplicator has the wrong shape"));
        }
        self.mult[i][j] = m;
        Ok(())
    }

    pub fn mult_inv(&self, i: usize, j: usize) -> Result<CMatrix> {
        self.mult[i][j]
            .inverse()
            .ok_or_else(|| Error::NonInvertible(format!("multiplicator ({i},{j})")))
    }

    pub fn unitor_inv(&self) -> Result<CMatrix> {
        self.unitor
            .inverse()
            .ok_or_else(|| Error::NonInvertible("unitor".into()))
    }

    /// Induced cup `F(X*) ⊗ F(X)` from `F(η_X)`, where `x_star` lists the dual.
    pub fn induced_cup(&self, x: usize, x_star: usize) -> Result<CMatrix> {
        Ok(self
            .mult_inv(x_star, x)?
            .compose(&cup(self.dim(x)))
            .compose(&self.unitor))
    }

    /// Induced cap `F(X) ⊗ F(X*) -> C` from `F(ε_X)`.
    pub fn induced_cap(&self, x: usize, x_star: usize) -> Result<CMatrix> {
        Ok(self
            .unitor_inv()?
            .compose(&cap(self.dim(x)))
            .compose(&self.mult[x][x_star]))
    }

    /// Induced left cap `F(X*) ⊗ F(X) -> C` from `F(η_X†)`.
    pub fn induced_left_cap(&self, x: usize, x_star: usize) -> Result<CMatrix> {
        Ok(self
            .unitor_inv()?
            .compose(&cup(self.dim(x)).adjoint())
            .compose(&self.mult[x_star][x]))
    }
}

/// Check every pseudofunctor axiom of `f` over its object list.
pub fn verify_fibre_functor(f: &FibreFunctor, tol: Tolerance) -> Result<Report> {
    // Re-run the structural checks in case the value was mutated in place.
    FibreFunctor::from_parts(f.objects.clone(), f.mult.clone(), f.unitor.clone())?;
    let objs = &f.objects;
    let n = objs.len();
    let mut r = Report::new("verify_fibre_functor", tol);

    // Unitarity first; later checks need inverses.
    let mut unitary = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let m = &f.mult[i][j];
            let d = m.rows();
            unitary.push(Instance::compare(
                &m.adjoint().compose(m),
                &CMatrix::identity(d),
                format!("pair ({i},{j})"),
            ));
        }
    }
    r.aggregate("unitarity.mult", unitary);
    r.compare(
        "unitarity.unitor",
        Some("unit".into()),
        &f.unitor.adjoint().compose(&f.unitor),
        &CMatrix::identity(1),
    );

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let bases = par::map(&pairs, |&(i, j)| intertwiner_basis(objs.rep(i), objs.rep(j)));
    let bases = bases.into_iter().collect::<Result<Vec<_>>>()?;

    let naturality = par::map(&pairs, |&(i, j)| {
        let mut out = Vec::new();
        for t in &bases[i * n + j] {
            for y in 0..n {
                let id_y = CMatrix::identity(objs.dim(y));
                let left = t.tensor(&id_y);
                out.push(Instance::compare(
                    &f.mult[j][y].compose(&left),
                    &left.compose(&f.mult[i][y]),
                    format!("intertwiner ({i}->{j}) tensor object {y} on the right"),
                ));
                let right = id_y.tensor(t);
                out.push(Instance::compare(
                    &f.mult[y][j].compose(&right),
                    &right.compose(&f.mult[y][i]),
                    format!("intertwiner ({i}->{j}) tensor object {y} on the left"),
                ));
            }
        }
        out
    });
    r.aggregate("naturality", naturality.into_iter().flatten());

    let inverses: Vec<Vec<Option<CMatrix>>> = (0..n)
        .map(|i| (0..n).map(|j| f.mult[i][j].inverse()).collect())
        .collect();
    let unitor_inv = f.unitor.inverse();
    let invertible = inverses.iter().flatten().all(Option::is_some) && unitor_inv.is_some();
    r.flag("invertibility", None, invertible);

    let mut assoc = Vec::new();
    let mut pushpast = Vec::new();
    let mut coassoc = Vec::new();
    let mut skipped = 0usize;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (Some(ab), Some(bc)) = (objs.product(a, b), objs.product(b, c)) else {
                    skipped += 1;
                    continue;
                };
                let w = format!("triple ({a},{b},{c})");
                let (ia, ic) = (CMatrix::identity(objs.dim(a)), CMatrix::identity(objs.dim(c)));
                let lhs = f.mult[ab][c].compose(&f.mult[a][b].tensor(&ic));
                let rhs = f.mult[a][bc].compose(&ia.tensor(&f.mult[b][c]));
                assoc.push(Instance::compare(&lhs, &rhs, w.clone()));
                if invertible {
                    let inv = |i: usize, j: usize| inverses[i][j].as_ref().expect("checked");
                    let l1 = f.mult[a][b].tensor(&ic).compose(&ia.tensor(inv(b, c)));
                    let r1 = inv(ab, c).compose(&f.mult[a][bc]);
                    pushpast.push(Instance::compare(&l1, &r1, format!("{w} first")));
                    let l2 = ia.tensor(&f.mult[b][c]).compose(&inv(a, b).tensor(&ic));
                    let r2 = inv(a, bc).compose(&f.mult[ab][c]);
                    pushpast.push(Instance::compare(&l2, &r2, format!("{w} second")));
                    let l3 = inv(a, b).tensor(&ic).compose(inv(ab, c));
                    let r3 = ia.tensor(inv(b, c)).compose(inv(a, bc));
                    coassoc.push(Instance::compare(&l3, &r3, w));
                }
            }
        }
    }
    r.aggregate("associativity", assoc);
    r.push(
        "associativity.skipped",
        crate::report::Status::Skipped,
        0.0,
        Some(format!("{skipped} triples with an unlisted tensor")),
    );
    r.aggregate("pushpast", pushpast);
    r.aggregate("coassociativity", coassoc);

    let mut unital = Vec::new();
    let mut counital = Vec::new();
    for x in 0..n {
        let ix = CMatrix::identity(objs.dim(x));
        unital.push(Instance::compare(
            &f.mult[0][x].compose(&f.unitor.tensor(&ix)),
            &ix,
            format!("object {x} left"),
        ));
        unital.push(Instance::compare(
            &f.mult[x][0].compose(&ix.tensor(&f.unitor)),
            &ix,
            format!("object {x} right"),
        ));
        if let (true, Some(ui)) = (invertible, unitor_inv.as_ref()) {
            let inv = |i: usize, j: usize| inverses[i][j].as_ref().expect("checked");
            counital.push(Instance::compare(
                &ui.tensor(&ix).compose(inv(0, x)),
                &ix,
                format!("object {x} left"),
            ));
            counital.push(Instance::compare(
                &ix.tensor(ui).compose(inv(x, 0)),
                &ix,
                format!("object {x} right"),
            ));
        }
    }
    r.aggregate("unitality", unital);
    r.aggregate("counitality", counital);

    if invertible {
        let inv = |i: usize, j: usize| inverses[i][j].as_ref().expect("checked");
        let mut conat = Vec::new();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            for t in &bases[k] {
                for y in 0..n {
                    let left = t.tensor(&CMatrix::identity(objs.dim(y)));
                    conat.push(Instance::compare(
                        &left.compose(inv(i, y)),
                        &inv(j, y).compose(&left),
                        format!("intertwiner ({i}->{j}) tensor object {y}"),
                    ));
                }
            }
        }
        r.aggregate("conaturality", conat);
        let mut dagger = Vec::new();
        for (i, j) in pairs.iter().copied() {
            dagger.push(Instance::compare(
                inv(i, j),
                &f.mult[i][j].adjoint(),
                format!("pair ({i},{j})"),
            ));
        }
        r.aggregate("inverse_is_dagger", dagger);

        let mut snakes = Vec::new();
        let mut pivotal = Vec::new();
        for x in 0..n {
            let Some(xs) = objs.dual(x) else { continue };
            let d = objs.dim(x);
            let id = CMatrix::identity(d);
            let cup_ind = f.induced_cup(x, xs)?;
            let cap_ind = f.induced_cap(x, xs)?;
            let w = format!("object {x}");
            snakes.push(Instance::compare(
                &cap_ind.tensor(&id).compose(&id.tensor(&cup_ind)),
                &id,
                format!("{w} on F(X)"),
            ));
            snakes.push(Instance::compare(
                &id.tensor(&cap_ind).compose(&cup_ind.tensor(&id)),
                &id,
                format!("{w} on F(X*)"),
            ));
            let f_r = id.tensor(&cap_ind).compose(&cup(d).tensor(&id));
            let left_cap = f.induced_left_cap(x, xs)?;
            let f_l = left_cap.tensor(&id).compose(&id.tensor(&cap(d).adjoint()));
            pivotal.push(Instance::compare(&f_l, &f_r, w));
        }
        r.aggregate("induced_duals", snakes);
        r.aggregate("pivotality", pivotal);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repg::group::FiniteGroup;
    use crate::report::Status;

    fn klein_objs() -> Arc<ObjectList> {
        Arc::new(ObjectList::characters(Arc::new(FiniteGroup::klein())).unwrap())
    }

    #[test]
    fn canonical_functor_is_exact() {
        let tol = Tolerance::default();
        for objs in [
            klein_objs(),
            Arc::new(ObjectList::trivial_and_regular(Arc::new(FiniteGroup::symmetric3()))),
        ] {
            let f = FibreFunctor::canonical(objs);
            assert_eq!(f.unitor(), &CMatrix::identity(1));
            let r = verify_fibre_functor(&f, tol).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.max_residual(), 0.0);
        }
    }

    #[test]
    fn trivial_twist_is_canonical() {
        let objs = klein_objs();
        let f = FibreFunctor::twisted(objs.clone(), &Cocycle::trivial(4), Tolerance::default()).unwrap();
        assert_eq!(f, FibreFunctor::canonical(objs));
    }

    #[test]
    fn klein_twist_passes_everything() {
        let objs = klein_objs();
        let psi = Cocycle::klein(&objs).unwrap();
        let f = FibreFunctor::twisted(objs, &psi, Tolerance::default()).unwrap();
        let r = verify_fibre_functor(&f, Tolerance::default()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.get("pivotality").unwrap().status, Status::Pass);
        assert_eq!(r.get("associativity").unwrap().status, Status::Pass);
    }

    #[test]
    fn klein_cocycle_brute_force() {
        // Oracle: evaluate the cocycle identity on labels directly.
        let psi = |x: (usize, usize), y: (usize, usize)| if x.1 * y.0 == 1 { -1.0 } else { 1.0 };
        let add = |x: (usize, usize), y: (usize, usize)| ((x.0 + y.0) % 2, (x.1 + y.1) % 2);
        let labels = [(0, 0), (0, 1), (1, 0), (1, 1)];
        for &g in &labels {
            for &h in &labels {
                for &k in &labels {
                    assert_eq!(psi(g, h) * psi(add(g, h), k), psi(h, k) * psi(g, add(h, k)));
                }
            }
        }
    }

    #[test]
    fn non_cocycle_fails_with_triple() {
        let objs = Arc::new(ObjectList::characters(Arc::new(FiniteGroup::cyclic(3))).unwrap());
        let mut table = vec![vec![ONE; 3]; 3];
        table[1][1] = C64::new(0.0, 1.0);
        let psi = Cocycle::new(table.clone()).unwrap();
        assert!(matches!(
            FibreFunctor::twisted(objs.clone(), &psi, Tolerance::default()),
            Err(Error::NotACocycle { .. })
        ));
        let mult = table
            .iter()
            .map(|row| row.iter().map(|&z| CMatrix::scalar(z)).collect())
            .collect();
        let f = FibreFunctor::from_parts(objs, mult, CMatrix::identity(1)).unwrap();
        let r = verify_fibre_functor(&f, Tolerance::default()).unwrap();
        let c = r.get("associativity").unwrap();
        assert_eq!(c.status, Status::Fail);
        assert!(c.residual > 0.0);
        assert!(c.witness.as_deref().unwrap().starts_with("triple"));
    }

    #[test]
    fn non_unitary_multiplicator_is_caught() {
        let objs = klein_objs();
        let mut f = FibreFunctor::canonical(objs);
        f.set_mult(1, 2, CMatrix::scalar(C64::new(2.0, 0.0))).unwrap();
        let r = verify_fibre_functor(&f, Tolerance::default()).unwrap();
        let c = r.get("unitarity.mult").unwrap();
        assert_eq!(c.status, Status::Fail);
        assert_eq!(c.witness.as_deref(), Some("pair (1,2)"));
    }

    #[test]
    fn regular_list_skips_unlisted_triples() {
        let f = FibreFunctor::canonical(Arc::new(ObjectList::trivial_and_regular(Arc::new(
            FiniteGroup::cyclic(2),
        ))));
        let r = verify_fibre_functor(&f, Tolerance::default()).unwrap();
        let skipped = r.get("associativity.skipped").unwrap();
        assert_eq!(skipped.witness.as_deref(), Some("3 triples with an unlisted tensor"));
    }

    #[test]
    fn rejects_non_characters() {
        let objs = Arc::new(ObjectList::trivial_and_regular(Arc::new(FiniteGroup::cyclic(2))));
        assert!(matches!(
            FibreFunctor::twisted(objs, &Cocycle::trivial(2), Tolerance::default()),
            Err(Error::NotACharacter(1))
        ));
    }

    #[test]
    fn functor_json_roundtrip() {
        let objs = klein_objs();
        let f = FibreFunctor::twisted(objs.clone(), &Cocycle::klein(&objs).unwrap(), Tolerance::default()).unwrap();
        let s = crate::json::to_string_pretty(&f).unwrap();
        let back: FibreFunctor = crate::json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
