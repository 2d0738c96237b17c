//! Unitary representations, characters, intertwiners and object lists.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{linear_solution_space, CMatrix, Constraint, Tolerance, C64, ONE, ZERO};
use crate::repg::group::FiniteGroup;
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryRep {
    pub group: Arc<FiniteGroup>,
    pub mats: Vec<CMatrix>,
}

impl UnitaryRep {
    /// Validated constructor.
    pub fn new(group: Arc<FiniteGroup>, mats: Vec<CMatrix>, tol: Tolerance) -> Result<Self> {
        let rep = UnitaryRep { group, mats };
        rep.check_shapes()?;
        let report = rep.verify(tol);
        if let Some(c) = report.first_failure() {
            return Err(Error::structural(format!(
                "not a unitary representation: {} fails at {}",
                c.name,
                c.witness.as_deref().unwrap_or("?")
            )));
        }
        Ok(rep)
    }

    fn check_shapes(&self) -> Result<()> {
        if self.mats.len() != self.group.order() {
            return Err(Error::structural(format!(
                "{} matrices for a group of order {}",
                self.mats.len(),
                self.group.order()
            )));
        }
        let d = self.mats[0].rows();
        if self.mats.iter().any(|m| m.shape() != (d, d)) {
            return Err(Error::structural("representation matrices must share one square shape"));
        }
        Ok(())
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        UnitaryRep {
            group,
            mats: vec![CMatrix::identity(1); n],
        }
    }

    /// One-dimensional representation with the given values.
    pub fn character(group: Arc<FiniteGroup>, values: &[C64]) -> Self {
        UnitaryRep {
            mats: values.iter().map(|&z| CMatrix::scalar(z)).collect(),
            group,
        }
    }

    /// Left regular representation: `ρ(g) e_h = e_{gh}`.
    pub fn regular(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let mats = (0..n)
            .map(|g| CMatrix::from_fn(n, n, |i, j| if group.mul(g, j) == i { ONE } else { ZERO }))
            .collect();
        UnitaryRep { group, mats }
    }

    pub fn dim(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn mat(&self, g: usize) -> &CMatrix {
        &self.mats[g]
    }

    pub fn tensor(&self, other: &UnitaryRep) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::structural("tensor of representations of different groups"));
        }
        Ok(UnitaryRep {
            group: self.group.clone(),
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a.tensor(b)).collect(),
        })
    }

    /// Dual representation `g ↦ conj(ρ(g))`.
    pub fn dual(&self) -> Self {
        UnitaryRep {
            group: self.group.clone(),
            mats: self.mats.iter().map(CMatrix::conj).collect(),
        }
    }

    pub fn approx_eq(&self, other: &UnitaryRep, tol: Tolerance) -> bool {
        self.group == other.group
            && self.dim() == other.dim()
            && self.mats.iter().zip(&other.mats).all(|(a, b)| tol.close(a, b))
    }

    pub fn verify(&self, tol: Tolerance) -> Report {
        let mut r = Report::new("verify_rep", tol);
        if let Err(e) = self.check_shapes() {
            r.flag("shape", Some(e.to_string()), false);
            return r;
        }
        let g = &self.group;
        let n = g.order();
        let mut worst = (0.0, None);
        for a in 0..n {
            for b in 0..n {
                let res = tol.residual(&self.mats[a].compose(&self.mats[b]), &self.mats[g.mul(a, b)]);
                if res > worst.0 {
                    worst = (res, Some(format!("pair ({a},{b})")));
                }
            }
        }
        r.residual("homomorphism", worst.1, worst.0, (self.dim() as f64).sqrt());
        let mut worst = (0.0, None);
        let id = CMatrix::identity(self.dim());
        for (a, m) in self.mats.iter().enumerate() {
            let res = tol.residual(&m.adjoint().compose(m), &id);
            if res > worst.0 {
                worst = (res, Some(format!("element {a}")));
            }
        }
        r.residual("unitarity", worst.1, worst.0, (self.dim() as f64).sqrt());
        r
    }

    /// Whether this is a one-dimensional representation.
    pub fn is_character(&self) -> bool {
        self.dim() == 1
    }
}

/// Orthonormal basis of `{T | ρ_Y(g) T = T ρ_X(g) for all g}`.
pub fn intertwiner_basis(x: &UnitaryRep, y: &UnitaryRep) -> Result<Vec<CMatrix>> {
    if x.group != y.group {
        return Err(Error::structural(
            "intertwiners between representations of different groups",
        ));
    }
    let constraints: Vec<Constraint> = (0..x.group.order())
        .map(|g| {
            let (rx, ry) = (x.mat(g).clone(), y.mat(g).clone());
            Box::new(move |t: &CMatrix| ry.compose(t).sub(&t.compose(&rx))) as Constraint
        })
        .collect();
    Ok(linear_solution_space(y.dim(), x.dim(), &constraints))
}

/// Exponent vectors of all characters of an abelian group: character `k`
/// sends element `g` to `ζ^{e_k[g]}` with `ζ = exp(2πi/|G|)`. Sorted
/// lexicographically, so the trivial character comes first.
pub fn character_exponents(group: &FiniteGroup) -> Result<Vec<Vec<usize>>> {
    if !group.is_abelian() {
        return Err(Error::UnsupportedInstance(
            "characters are enumerated for abelian groups only".into(),
        ));
    }
    let n = group.order();
    let mut out = Vec::new();
    let mut e = vec![0usize; n];
    fn extend(g: &FiniteGroup, e: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        let n = g.order();
        if k == n {
            out.push(e.clone());
            return;
        }
        for v in 0..n {
            e[k] = v;
            let consistent = (0..=k).all(|a| {
                (0..=k).all(|b| {
                    let c = g.mul(a, b);
                    c > k || (e[a] + e[b]) % n == e[c]
                })
            });
            if consistent {
                extend(g, e, k + 1, out);
            }
        }
    }
    extend(group, &mut e, 1, &mut out);
    Ok(out)
}

pub fn root_of_unity(k: usize, n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

pub fn characters(group: Arc<FiniteGroup>) -> Result<Vec<UnitaryRep>> {
    let n = group.order();
    Ok(character_exponents(&group)?
        .into_iter()
        .map(|e| {
            let vals: Vec<C64> = e.iter().map(|&k| root_of_unity(k, n)).collect();
            UnitaryRep::character(group.clone(), &vals)
        })
        .collect())
}

/// A finite list of representations standing in for all of `Rep(G)`.
///
/// Index 0 is the trivial representation. Products and duals that happen to
/// be listed are recorded so that associativity and duality checks can be
/// phrased over the list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<UnitaryRep>", into = "Vec<UnitaryRep>")]
pub struct ObjectList {
    group: Arc<FiniteGroup>,
    reps: Vec<UnitaryRep>,
    products: Vec<Vec<Option<usize>>>,
    duals: Vec<Option<usize>>,
}

impl TryFrom<Vec<UnitaryRep>> for ObjectList {
    type Error = Error;
    fn try_from(reps: Vec<UnitaryRep>) -> Result<Self> {
        ObjectList::new(reps, Tolerance::default())
    }
}

impl From<ObjectList> for Vec<UnitaryRep> {
    fn from(o: ObjectList) -> Self {
        o.reps
    }
}

const MATCH_EPS: f64 = 1e-10;

impl ObjectList {
    pub fn new(reps: Vec<UnitaryRep>, tol: Tolerance) -> Result<Self> {
        let first = reps.first().ok_or_else(|| Error::structural("empty object list"))?;
        let group = first.group.clone();
        for (i, r) in reps.iter().enumerate() {
            if r.group != group {
                return Err(Error::structural(format!("object {i} is over a different group")));
            }
            r.check_shapes()?;
            if let Some(c) = r.verify(tol).first_failure() {
                return Err(Error::structural(format!("object {i}: {} fails", c.name)));
            }
        }
        let matcher = Tolerance::new(MATCH_EPS).expect("positive");
        if !first.approx_eq(&UnitaryRep::trivial(group.clone()), matcher) {
            return Err(Error::structural("object 0 must be the trivial representation"));
        }
        let find = |r: &UnitaryRep| reps.iter().position(|s| s.approx_eq(r, matcher));
        let products = reps
            .iter()
            .map(|a| reps.iter().map(|b| find(&a.tensor(b).expect("same group"))).collect())
            .collect();
        let duals = reps.iter().map(|a| find(&a.dual())).collect();
        Ok(ObjectList {
            group,
            reps,
            products,
            duals,
        })
    }

    /// All characters of an abelian group, in lexicographic exponent order.
    pub fn characters(group: Arc<FiniteGroup>) -> Result<Self> {
        ObjectList::new(characters(group)?, Tolerance::default())
    }

    /// Trivial and regular representation.
    pub fn trivial_and_regular(group: Arc<FiniteGroup>) -> Self {
        let reps = vec![UnitaryRep::trivial(group.clone()), UnitaryRep::regular(group)];
        ObjectList::new(reps, Tolerance::default()).expect("standard representations")
    }

    /// The natural list for a group: its characters when abelian, otherwise
    /// the trivial and regular representations.
    pub fn standard(group: Arc<FiniteGroup>) -> Self {
        if group.is_abelian() {
            ObjectList::characters(group).expect("abelian group")
        } else {
            ObjectList::trivial_and_regular(group)
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, i: usize) -> &UnitaryRep {
        &self.reps[i]
    }

    pub fn reps(&self) -> &[UnitaryRep] {
        &self.reps
    }

    pub fn dim(&self, i: usize) -> usize {
        self.reps[i].dim()
    }

    /// Index of the listed object equal to `X_i ⊗ X_j`, if any.
    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        self.products[i][j]
    }

    /// Index of the listed object equal to the dual of `X_i`, if any.
    pub fn dual(&self, i: usize) -> Option<usize> {
        self.duals[i]
    }

    pub fn all_characters(&self) -> bool {
        self.reps.iter().all(UnitaryRep::is_character)
    }

    /// Whether every irreducible constituent of the regular representation
    /// visibly occurs: the regular representation itself is listed, or the
    /// group is abelian and every character is listed. A `false` answer means
    /// quantifiers over this list may not reach all of `Rep(G)`.
    pub fn covers_regular(&self) -> bool {
        let matcher = Tolerance::new(MATCH_EPS).expect("positive");
        let reg = UnitaryRep::regular(self.group.clone());
        if self.reps.iter().any(|r| r.approx_eq(&reg, matcher)) {
            return true;
        }
        match characters(self.group.clone()) {
            Ok(chars) => chars.iter().all(|c| self.reps.iter().any(|r| r.approx_eq(c, matcher))),
            Err(_) => false,
        }
    }
}

/// Label `(a, b)` of a Z2×Z2 character: `a = 1` iff it is -1 on `(1,0)`,
/// `b = 1` iff it is -1 on `(0,1)`.
pub fn klein_label(rep: &UnitaryRep) -> Option<(usize, usize)> {
    if rep.group.order() != 4 || rep.dim() != 1 {
        return None;
    }
    let sign = |g: usize| usize::from(rep.mat(g).get(0, 0).re < 0.0);
    Some((sign(2), sign(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    #[test]
    fn intertwiner_dimensions() {
        let g = z2();
        let triv = UnitaryRep::trivial(g.clone());
        let sign = UnitaryRep::character(g.clone(), &[ONE, -ONE]);
        let reg = UnitaryRep::regular(g.clone());
        assert_eq!(intertwiner_basis(&triv, &triv).unwrap().len(), 1);
        assert_eq!(intertwiner_basis(&sign, &triv).unwrap().len(), 0);
        assert_eq!(intertwiner_basis(&reg, &reg).unwrap().len(), 2);
        assert_eq!(intertwiner_basis(&triv, &reg).unwrap().len(), 1);
        let other = UnitaryRep::trivial(Arc::new(FiniteGroup::cyclic(3)));
        assert!(intertwiner_basis(&triv, &other).is_err());
    }

    #[test]
    fn regular_of_s3_has_commutant_of_dim_six() {
        // 1 + 1 + 2^2 by the multiplicities of the irreducibles.
        let reg = UnitaryRep::regular(Arc::new(FiniteGroup::symmetric3()));
        assert_eq!(intertwiner_basis(&reg, &reg).unwrap().len(), 6);
    }

    #[test]
    fn characters_of_small_groups() {
        assert_eq!(character_exponents(&FiniteGroup::cyclic(3)).unwrap().len(), 3);
        let k = character_exponents(&FiniteGroup::klein()).unwrap();
        assert_eq!(
            k,
            vec![vec![0, 0, 0, 0], vec![0, 0, 2, 2], vec![0, 2, 0, 2], vec![0, 2, 2, 0]]
        );
        assert!(character_exponents(&FiniteGroup::symmetric3()).is_err());
        let chars = characters(Arc::new(FiniteGroup::klein())).unwrap();
        let labels: Vec<_> = chars.iter().map(|c| klein_label(c).unwrap()).collect();
        assert_eq!(labels, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn object_list_tables() {
        let objs = ObjectList::characters(Arc::new(FiniteGroup::cyclic(3))).unwrap();
        assert_eq!(objs.product(1, 1), Some(2));
        assert_eq!(objs.product(1, 2), Some(0));
        assert_eq!(objs.dual(1), Some(2));
        assert!(objs.covers_regular());
        let reg = ObjectList::trivial_and_regular(Arc::new(FiniteGroup::symmetric3()));
        assert_eq!(reg.product(1, 1), None);
        assert_eq!(reg.dual(1), Some(1));
        assert!(reg.covers_regular());
        let partial = ObjectList::new(vec![UnitaryRep::trivial(z2())], Tolerance::default()).unwrap();
        assert!(!partial.covers_regular());
    }

    #[test]
    fn rejects_bad_reps() {
        let g = z2();
        let bad = UnitaryRep {
            group: g.clone(),
            mats: vec![CMatrix::identity(1), CMatrix::scalar(C64::new(2.0, 0.0))],
        };
        assert!(ObjectList::new(vec![UnitaryRep::trivial(g.clone()), bad], Tolerance::default()).is_err());
        let sign = UnitaryRep::character(g, &[ONE, -ONE]);
        assert!(ObjectList::new(vec![sign], Tolerance::default()).is_err());
    }
}
