//! Concrete pivotal dagger categories: finite-dimensional Hilbert spaces
//! (`FHilb`) and G-graded Hilbert spaces (`GHilb`).
//!
//! A `GHilb` object carries one group element per basis vector. Objects built
//! from a multiplicity vector list their basis sorted by grade. The tensor of
//! two graded objects keeps the Kronecker basis order, grading basis vector
//! `i * n + k` by `g_i h_k`; this keeps the tensor strictly associative on the
//! nose. [`CatObject::canonical_reorder`] gives the permutation back to sorted
//! order when a block-sorted basis is wanted.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{cap, cup, swap, CMatrix, Tolerance, C64};
use crate::repg::group::FiniteGroup;
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObjectJson", into = "ObjectJson")]
pub enum CatObject {
    FHilb {
        dim: usize,
    },
    GHilb {
        group: Arc<FiniteGroup>,
        grades: Vec<usize>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "instance", rename_all = "lowercase")]
enum ObjectJson {
    Fhilb {
        dim: usize,
    },
    Ghilb {
        group: FiniteGroup,
        mult: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grades: Option<Vec<usize>>,
    },
}

impl TryFrom<ObjectJson> for CatObject {
    type Error = Error;
    fn try_from(o: ObjectJson) -> Result<Self> {
        match o {
            ObjectJson::Fhilb { dim } => Ok(CatObject::FHilb { dim }),
            ObjectJson::Ghilb { group, mult, grades } => {
                let group = Arc::new(group);
                match grades {
                    None => CatObject::ghilb(group, &mult),
                    Some(grades) => {
                        let obj = CatObject::ghilb_graded(group, grades)?;
                        if obj.mult().as_deref() != Some(&mult[..]) {
                            return Err(Error::Parse("grades disagree with multiplicity vector".into()));
                        }
                        Ok(obj)
                    }
                }
            }
        }
    }
}

impl From<CatObject> for ObjectJson {
    fn from(o: CatObject) -> Self {
        match o {
            CatObject::FHilb { dim } => ObjectJson::Fhilb { dim },
            CatObject::GHilb { group, grades } => {
                let obj = CatObject::GHilb {
                    group: group.clone(),
                    grades: grades.clone(),
                };
                let mult = obj.mult().expect("graded object");
                let sorted = grades.windows(2).all(|w| w[0] <= w[1]);
                ObjectJson::Ghilb {
                    group: (*group).clone(),
                    mult,
                    grades: if sorted { None } else { Some(grades) },
                }
            }
        }
    }
}

impl CatObject {
    pub fn fhilb(dim: usize) -> Self {
        CatObject::FHilb { dim }
    }

    /// Graded object with `mult[g]` basis vectors of grade `g`, sorted by grade.
    pub fn ghilb(group: Arc<FiniteGroup>, mult: &[usize]) -> Result<Self> {
        if mult.len() != group.order() {
            return Err(Error::structural(format!(
                "multiplicity vector has {} entries for a group of order {}",
                mult.len(),
                group.order()
            )));
        }
        let grades = mult
            .iter()
            .enumerate()
            .flat_map(|(g, &m)| std::iter::repeat_n(g, m))
            .collect();
        Ok(CatObject::GHilb { group, grades })
    }

    pub fn ghilb_graded(group: Arc<FiniteGroup>, grades: Vec<usize>) -> Result<Self> {
        if let Some(&g) = grades.iter().find(|&&g| g >= group.order()) {
            return Err(Error::structural(format!("grade {g} is not a group element")));
        }
        Ok(CatObject::GHilb { group, grades })
    }

    pub fn dim(&self) -> usize {
        match self {
            CatObject::FHilb { dim } => *dim,
            CatObject::GHilb { grades, .. } => grades.len(),
        }
    }

    pub fn instance(&self) -> &'static str {
        match self {
            CatObject::FHilb { .. } => "fhilb",
            CatObject::GHilb { .. } => "ghilb",
        }
    }

    pub fn grades(&self) -> Option<&[usize]> {
        match self {
            CatObject::FHilb { .. } => None,
            CatObject::GHilb { grades, .. } => Some(grades),
        }
    }

    pub fn mult(&self) -> Option<Vec<usize>> {
        match self {
            CatObject::FHilb { .. } => None,
            CatObject::GHilb { group, grades } => {
                let mut m = vec![0; group.order()];
                grades.iter().for_each(|&g| m[g] += 1);
                Some(m)
            }
        }
    }

    /// Tensor unit of the same instance.
    pub fn unit_like(&self) -> Self {
        match self {
            CatObject::FHilb { .. } => CatObject::FHilb { dim: 1 },
            CatObject::GHilb { group, .. } => CatObject::GHilb {
                group: group.clone(),
                grades: vec![0],
            },
        }
    }

    /// Dual object: same dimension, inverse grades in the same order.
    pub fn dual(&self) -> Self {
        match self {
            CatObject::FHilb { dim } => CatObject::FHilb { dim: *dim },
            CatObject::GHilb { group, grades } => CatObject::GHilb {
                group: group.clone(),
                grades: grades.iter().map(|&g| group.inv(g)).collect(),
            },
        }
    }

    pub fn same_instance(&self, other: &CatObject) -> Result<()> {
        match (self, other) {
            (CatObject::FHilb { .. }, CatObject::FHilb { .. }) => Ok(()),
            (CatObject::GHilb { group: a, .. }, CatObject::GHilb { group: b, .. }) if a == b => Ok(()),
            _ => Err(Error::InstanceMismatch(format!(
                "cannot combine {} and {} objects",
                self.instance(),
                other.instance()
            ))),
        }
    }

    pub fn tensor(&self, other: &CatObject) -> Result<Self> {
        self.same_instance(other)?;
        Ok(match (self, other) {
            (CatObject::FHilb { dim: a }, CatObject::FHilb { dim: b }) => CatObject::FHilb { dim: a * b },
            (CatObject::GHilb { group, grades: a }, CatObject::GHilb { grades: b, .. }) => CatObject::GHilb {
                group: group.clone(),
                grades: a
                    .iter()
                    .flat_map(|&g| b.iter().map(move |&h| (g, h)))
                    .map(|(g, h)| group.mul(g, h))
                    .collect(),
            },
            _ => unreachable!(),
        })
    }

    /// Permutation matrix sending this basis to the grade-sorted basis
    /// (stable within each grade). Identity for `FHilb`.
    pub fn canonical_reorder(&self) -> CMatrix {
        let n = self.dim();
        match self {
            CatObject::FHilb { .. } => CMatrix::identity(n),
            CatObject::GHilb { grades, .. } => {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by_key(|&i| grades[i]);
                let mut p = CMatrix::zeros(n, n);
                for (new, &old) in order.iter().enumerate() {
                    p.set(new, old, C64::new(1.0, 0.0));
                }
                p
            }
        }
    }
}

/// A morphism with typed domain and codomain.
#[derive(Clone, Debug, PartialEq)]
pub struct CMor {
    pub dom: CatObject,
    pub cod: CatObject,
    pub mat: CMatrix,
}

impl CMor {
    pub fn new(dom: CatObject, cod: CatObject, mat: CMatrix) -> Result<Self> {
        dom.same_instance(&cod)?;
        if mat.shape() != (cod.dim(), dom.dim()) {
            return Err(Error::structural(format!(
                "matrix {:?} does not fit {} -> {} morphism",
                mat.shape(),
                dom.dim(),
                cod.dim()
            )));
        }
        Ok(CMor { dom, cod, mat })
    }

    pub fn id(x: &CatObject) -> Self {
        CMor {
            dom: x.clone(),
            cod: x.clone(),
            mat: CMatrix::identity(x.dim()),
        }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &CMor) -> Result<Self> {
        if rhs.cod != self.dom {
            return Err(Error::structural("composite of non-composable morphisms"));
        }
        Ok(CMor {
            dom: rhs.dom.clone(),
            cod: self.cod.clone(),
            mat: self.mat.compose(&rhs.mat),
        })
    }

    pub fn tensor(&self, rhs: &CMor) -> Result<Self> {
        Ok(CMor {
            dom: self.dom.tensor(&rhs.dom)?,
            cod: self.cod.tensor(&rhs.cod)?,
            mat: self.mat.tensor(&rhs.mat),
        })
    }

    pub fn dagger(&self) -> Self {
        CMor {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        CMor {
            mat: self.mat.scale(z),
            ..self.clone()
        }
    }

    /// Frobenius norm of the entries coupling basis vectors of different grades.
    pub fn grade_residual(&self) -> f64 {
        match (self.dom.grades(), self.cod.grades()) {
            (Some(gd), Some(gc)) => {
                let mut s = 0.0;
                for (i, &a) in gc.iter().enumerate() {
                    for (j, &b) in gd.iter().enumerate() {
                        if a != b {
                            s += self.mat.get(i, j).norm_sqr();
                        }
                    }
                }
                s.sqrt()
            }
            _ => 0.0,
        }
    }

    pub fn is_grade_preserving(&self, tol: Tolerance) -> bool {
        tol.accepts(self.grade_residual(), self.mat.frobenius_norm())
    }
}

/// Right duality data: `cup: unit -> Xd ⊗ X`, `cap: X ⊗ Xd -> unit`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityWitness {
    pub x: CatObject,
    pub xd: CatObject,
    pub cup: CMor,
    pub cap: CMor,
}

pub fn standard_duality(x: &CatObject) -> DualityWitness {
    let n = x.dim();
    let xd = x.dual();
    let unit = x.unit_like();
    let cup_obj = xd.tensor(x).expect("dual shares the instance");
    let cap_obj = x.tensor(&xd).expect("dual shares the instance");
    DualityWitness {
        x: x.clone(),
        xd: xd.clone(),
        cup: CMor {
            dom: unit.clone(),
            cod: cup_obj,
            mat: cup(n),
        },
        cap: CMor {
            dom: cap_obj,
            cod: unit,
            mat: cap(n),
        },
    }
}

impl DualityWitness {
    /// The same witness with cup and cap rescaled.
    pub fn scaled(&self, cup_factor: f64, cap_factor: f64) -> Self {
        DualityWitness {
            cup: self.cup.scale(C64::new(cup_factor, 0.0)),
            cap: self.cap.scale(C64::new(cap_factor, 0.0)),
            ..self.clone()
        }
    }

    fn check_shapes(&self) -> Result<()> {
        let (n, nd) = (self.x.dim(), self.xd.dim());
        if self.cup.mat.shape() != (nd * n, 1) || self.cap.mat.shape() != (1, n * nd) {
            return Err(Error::structural(format!(
                "cup {:?} / cap {:?} do not fit objects of dimension {n} and {nd}",
                self.cup.mat.shape(),
                self.cap.mat.shape()
            )));
        }
        Ok(())
    }
}

/// Snake equations only.
pub fn verify_snakes(w: &DualityWitness, tol: Tolerance) -> Result<Report> {
    w.check_shapes()?;
    let (n, nd) = (w.x.dim(), w.xd.dim());
    let (id, idd) = (CMatrix::identity(n), CMatrix::identity(nd));
    let mut r = Report::new("verify_duality", tol);
    let snake_x = w.cap.mat.tensor(&id).compose(&id.tensor(&w.cup.mat));
    r.compare("snake_x", Some("X".into()), &snake_x, &id);
    let snake_xd = idd.tensor(&w.cap.mat).compose(&w.cup.mat.tensor(&idd));
    r.compare("snake_xd", Some("Xd".into()), &snake_xd, &idd);
    Ok(r)
}

/// Snake equations plus the dagger-duality equations: the left duality built
/// from the daggers of cap and cup must be the swapped right duality.
pub fn verify_duality(w: &DualityWitness, tol: Tolerance) -> Result<Report> {
    let mut r = verify_snakes(w, tol)?;
    let (n, nd) = (w.x.dim(), w.xd.dim());
    let sigma = swap(nd, n);
    r.compare(
        "dagger_cap",
        Some("X".into()),
        &w.cap.mat.adjoint(),
        &sigma.compose(&w.cup.mat),
    );
    r.compare(
        "dagger_cup",
        Some("Xd".into()),
        &w.cup.mat.adjoint(),
        &w.cap.mat.compose(&sigma),
    );
    Ok(r)
}

/// Whether the snake checks of a duality report passed.
pub fn snakes_pass(r: &Report) -> bool {
    r.checks
        .iter()
        .filter(|c| c.name.starts_with("snake"))
        .all(|c| c.status != crate::report::Status::Fail)
}

fn witness_for(f_obj: &CatObject, w: &DualityWitness, which: &str) -> Result<()> {
    if &w.x != f_obj {
        return Err(Error::structural(format!(
            "witness does not belong to the {which} object"
        )));
    }
    w.check_shapes()
}

/// Right transpose `f*: Yd -> Xd` of `f: X -> Y`, bent with the given witnesses.
pub fn transpose(f: &CMor, wx: &DualityWitness, wy: &DualityWitness) -> Result<CMor> {
    witness_for(&f.dom, wx, "domain")?;
    witness_for(&f.cod, wy, "codomain")?;
    let idxd = CMatrix::identity(wx.xd.dim());
    let idyd = CMatrix::identity(wy.xd.dim());
    let mat = idxd
        .tensor(&wy.cap.mat)
        .compose(&idxd.tensor(&f.mat).tensor(&idyd))
        .compose(&wx.cup.mat.tensor(&idyd));
    CMor::new(wy.xd.clone(), wx.xd.clone(), mat)
}

/// Conjugate `f_*: Xd -> Yd`, the transpose of the dagger.
pub fn conjugate(f: &CMor, wx: &DualityWitness, wy: &DualityWitness) -> Result<CMor> {
    transpose(&f.dagger(), wy, wx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Scalar trace of an endomorphism: right trace `ε (f ⊗ id) ε†`, left trace
/// `η† (id ⊗ f) η`.
pub fn trace(f: &CMor, side: Side, w: &DualityWitness) -> Result<C64> {
    if f.dom != f.cod {
        return Err(Error::structural("trace of a non-endomorphism"));
    }
    witness_for(&f.dom, w, "traced")?;
    let idd = CMatrix::identity(w.xd.dim());
    let s = match side {
        Side::Right => w.cap.mat.compose(&f.mat.tensor(&idd)).compose(&w.cap.mat.adjoint()),
        Side::Left => w.cup.mat.adjoint().compose(&idd.tensor(&f.mat)).compose(&w.cup.mat),
    };
    Ok(s.get(0, 0))
}

pub fn dimension(w: &DualityWitness, side: Side) -> Result<C64> {
    trace(&CMor::id(&w.x), side, w)
}

/// Duality for `X ⊗ Y` with dual `Yd ⊗ Xd`, nesting the two witnesses.
pub fn nested_duality(wx: &DualityWitness, wy: &DualityWitness) -> Result<DualityWitness> {
    wx.check_shapes()?;
    wy.check_shapes()?;
    let x = wx.x.tensor(&wy.x)?;
    let xd = wy.xd.tensor(&wx.xd)?;
    let unit = x.unit_like();
    let id_x = CMatrix::identity(wx.x.dim());
    let id_xd = CMatrix::identity(wx.xd.dim());
    let id_y = CMatrix::identity(wy.x.dim());
    let id_yd = CMatrix::identity(wy.xd.dim());
    let cup = id_yd.tensor(&wx.cup.mat).tensor(&id_y).compose(&wy.cup.mat);
    let cap = wx.cap.mat.compose(&id_x.tensor(&wy.cap.mat).tensor(&id_xd));
    Ok(DualityWitness {
        cup: CMor::new(unit.clone(), xd.tensor(&x)?, cup)?,
        cap: CMor::new(x.tensor(&xd)?, unit, cap)?,
        x,
        xd,
    })
}

/// The eight cup/cap sliding identities for `f: X -> Y`.
pub fn sliding_identities(f: &CMor, wx: &DualityWitness, wy: &DualityWitness, tol: Tolerance) -> Result<Report> {
    let ft = transpose(f, wx, wy)?.mat;
    let fc = conjugate(f, wx, wy)?.mat;
    let fd = f.mat.adjoint();
    let (ix, ixd) = (CMatrix::identity(wx.x.dim()), CMatrix::identity(wx.xd.dim()));
    let (iy, iyd) = (CMatrix::identity(wy.x.dim()), CMatrix::identity(wy.xd.dim()));
    let (eta_x, eps_x) = (&wx.cup.mat, &wx.cap.mat);
    let (eta_y, eps_y) = (&wy.cup.mat, &wy.cap.mat);
    let mut r = Report::new("sliding", tol);
    r.compare(
        "cup_transpose",
        None,
        &ixd.tensor(&f.mat).compose(eta_x),
        &ft.tensor(&iy).compose(eta_y),
    );
    r.compare(
        "cap_transpose",
        None,
        &eps_y.compose(&f.mat.tensor(&iyd)),
        &eps_x.compose(&ix.tensor(&ft)),
    );
    r.compare(
        "cap_dagger_transpose",
        None,
        &f.mat.tensor(&ixd).compose(&eps_x.adjoint()),
        &iy.tensor(&ft).compose(&eps_y.adjoint()),
    );
    r.compare(
        "cup_dagger_transpose",
        None,
        &eta_y.adjoint().compose(&iyd.tensor(&f.mat)),
        &eta_x.adjoint().compose(&ft.tensor(&ix)),
    );
    r.compare(
        "cup_conjugate",
        None,
        &iyd.tensor(&fd).compose(eta_y),
        &fc.tensor(&ix).compose(eta_x),
    );
    r.compare(
        "cap_conjugate",
        None,
        &eps_x.compose(&fd.tensor(&ixd)),
        &eps_y.compose(&iy.tensor(&fc)),
    );
    r.compare(
        "cap_dagger_conjugate",
        None,
        &fd.tensor(&iyd).compose(&eps_y.adjoint()),
        &ix.tensor(&fc).compose(&eps_x.adjoint()),
    );
    r.compare(
        "cup_dagger_conjugate",
        None,
        &eta_x.adjoint().compose(&ixd.tensor(&fd)),
        &eta_y.adjoint().compose(&fc.tensor(&iy)),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    #[test]
    fn tensor_of_objects() {
        assert_eq!(CatObject::fhilb(2).tensor(&CatObject::fhilb(3)).unwrap().dim(), 6);
        let a = CatObject::ghilb(z2(), &[1, 0]).unwrap();
        let b = CatObject::ghilb(z2(), &[0, 1]).unwrap();
        assert_eq!(a.tensor(&b).unwrap().mult(), Some(vec![0, 1]));
        let c = CatObject::ghilb(z2(), &[1, 1]).unwrap();
        assert_eq!(c.tensor(&c).unwrap().mult(), Some(vec![2, 2]));
        assert!(matches!(
            a.tensor(&CatObject::fhilb(1)),
            Err(Error::InstanceMismatch(_))
        ));
    }

    #[test]
    fn graded_convolution_matches_brute_force() {
        let g = Arc::new(FiniteGroup::klein());
        let ma = [1, 0, 2, 1];
        let mb = [0, 1, 1, 1];
        let a = CatObject::ghilb(g.clone(), &ma).unwrap();
        let b = CatObject::ghilb(g.clone(), &mb).unwrap();
        let mut expect = [0; 4];
        for x in 0..4 {
            for y in 0..4 {
                expect[g.mul(x, y)] += ma[x] * mb[y];
            }
        }
        assert_eq!(a.tensor(&b).unwrap().mult().unwrap(), expect.to_vec());
    }

    #[test]
    fn canonical_reorder_sorts_grades() {
        let c = CatObject::ghilb(z2(), &[1, 1]).unwrap();
        let cc = c.tensor(&c).unwrap();
        assert_eq!(cc.grades().unwrap(), &[0, 1, 1, 0]);
        let p = cc.canonical_reorder();
        let sorted = CatObject::ghilb(z2(), &[2, 2]).unwrap();
        let m = CMor::new(cc, sorted, p).unwrap();
        assert!(m.is_grade_preserving(Tolerance::default()));
    }

    #[test]
    fn standard_duality_examples() {
        let tol = Tolerance::default();
        let w1 = standard_duality(&CatObject::fhilb(1));
        assert_eq!(w1.cup.mat, CMatrix::identity(1));
        assert_eq!(w1.cap.mat, CMatrix::identity(1));
        for n in 1..=5 {
            let w = standard_duality(&CatObject::fhilb(n));
            let r = verify_duality(&w, tol).unwrap();
            assert!(r.passed());
            assert_eq!(r.max_residual(), 0.0);
            assert_eq!(dimension(&w, Side::Right).unwrap(), C64::new(n as f64, 0.0));
        }
        let x = CatObject::ghilb(z2(), &[0, 1]).unwrap();
        assert_eq!(x.dual().mult(), Some(vec![0, 1]));
        let w = standard_duality(&x);
        assert!(w.cup.is_grade_preserving(tol) && w.cap.is_grade_preserving(tol));
    }

    #[test]
    fn scaled_witnesses() {
        let tol = Tolerance::default();
        let w = standard_duality(&CatObject::fhilb(4));
        let r = verify_duality(&w.scaled(2.0, 1.0), tol).unwrap();
        assert!(!snakes_pass(&r));
        // (2η, ε) composite is 2·id, so the residual is ‖id‖_F = 2 for dim 4.
        assert!((r.get("snake_x").unwrap().residual - 2.0).abs() < 1e-12);

        let r = verify_duality(&w.scaled(2.0, 0.5), tol).unwrap();
        assert!(snakes_pass(&r));
        assert!(!r.passed());
        let expect = 1.5 * 2.0;
        assert!((r.get("dagger_cap").unwrap().residual - expect).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_structural() {
        let mut w = standard_duality(&CatObject::fhilb(2));
        w.cup.mat = CMatrix::zeros(3, 1);
        assert!(matches!(
            verify_duality(&w, Tolerance::default()),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn transpose_and_conjugate() {
        let tol = Tolerance::default();
        let x = CatObject::fhilb(2);
        let w = standard_duality(&x);
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new((2 * i + j + 1) as f64, (i as f64) - (j as f64)));
        let f = CMor::new(x.clone(), x.clone(), a.clone()).unwrap();
        assert_eq!(transpose(&CMor::id(&x), &w, &w).unwrap().mat, CMatrix::identity(2));
        let ft = transpose(&f, &w, &w).unwrap();
        assert!(tol.close(&ft.mat, &a.transpose()));
        assert!(tol.close(&transpose(&ft, &w, &w).unwrap().mat, &a));
        let fc = conjugate(&f, &w, &w).unwrap();
        assert!(tol.close(&fc.mat, &a.conj()));
        assert!(tol.close(&fc.mat, &ft.mat.adjoint()));

        let one = CatObject::fhilb(1);
        let w1 = standard_duality(&one);
        let i = CMor::new(one.clone(), one, CMatrix::scalar(C64::new(0.0, 1.0))).unwrap();
        assert_eq!(
            conjugate(&i, &w1, &w1).unwrap().mat,
            CMatrix::scalar(C64::new(0.0, -1.0))
        );
    }

    #[test]
    fn rectangular_transpose_is_matrix_transpose() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (x, y) = (CatObject::fhilb(2), CatObject::fhilb(3));
        let f = CMor::new(x.clone(), y.clone(), random::gaussian(3, 2, &mut rng)).unwrap();
        let (wx, wy) = (standard_duality(&x), standard_duality(&y));
        let ft = transpose(&f, &wx, &wy).unwrap();
        assert_eq!(ft.mat.shape(), (2, 3));
        assert!(tol.close(&ft.mat, &f.mat.transpose()));
        let a = transpose(&f, &wx, &wy).unwrap().dagger();
        let b = transpose(&f.dagger(), &wy, &wx).unwrap();
        assert!(tol.close(&a.mat, &b.mat));
    }

    #[test]
    fn traces() {
        let x = CatObject::fhilb(3);
        let w = standard_duality(&x);
        let d = CMor::new(
            x.clone(),
            x.clone(),
            CMatrix::diag(&[1.0, 2.0, 3.0].map(|r| C64::new(r, 0.0))),
        )
        .unwrap();
        assert_eq!(trace(&d, Side::Right, &w).unwrap(), C64::new(6.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = CMor::new(x.clone(), x.clone(), random::gaussian(3, 3, &mut rng)).unwrap();
        let l = trace(&f, Side::Left, &w).unwrap();
        let r = trace(&f, Side::Right, &w).unwrap();
        assert!((l - r).norm() < 1e-12);
        assert!((l - f.mat.trace()).norm() < 1e-12);
        let g = CMor::new(x, CatObject::fhilb(2), CMatrix::zeros(2, 3)).unwrap();
        assert!(trace(&g, Side::Left, &w).is_err());
    }

    #[test]
    fn nested_and_sliding() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (x, y) = (CatObject::fhilb(2), CatObject::fhilb(3));
        let (wx, wy) = (standard_duality(&x), standard_duality(&y));
        let wxy = nested_duality(&wx, &wy).unwrap();
        assert!(verify_duality(&wxy, tol).unwrap().passed());
        let f = CMor::new(x, y, random::gaussian(3, 2, &mut rng)).unwrap();
        let r = sliding_identities(&f, &wx, &wy, tol).unwrap();
        assert_eq!(r.checks.len(), 8);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn graded_closure() {
        let tol = Tolerance::default();
        let g = Arc::new(FiniteGroup::klein());
        let x = CatObject::ghilb(g.clone(), &[1, 1, 0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut a = random::gaussian(3, 3, &mut rng);
        for i in 0..3 {
            for j in 0..3 {
                if x.grades().unwrap()[i] != x.grades().unwrap()[j] {
                    a.set(i, j, C64::new(0.0, 0.0));
                }
            }
        }
        let f = CMor::new(x.clone(), x.clone(), a).unwrap();
        assert!(f.is_grade_preserving(tol));
        let w = standard_duality(&x);
        assert!(f.tensor(&f).unwrap().is_grade_preserving(tol));
        assert!(f.dagger().is_grade_preserving(tol));
        assert!(f.compose(&f).unwrap().is_grade_preserving(tol));
        let ft = transpose(&f, &w, &w).unwrap();
        assert!(ft.is_grade_preserving(tol));
        assert!(verify_duality(&w, tol).unwrap().passed());
    }

    #[test]
    fn object_json() {
        let x = CatObject::ghilb(z2(), &[2, 1]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains("\"instance\":\"ghilb\""));
        let back: CatObject = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let c = CatObject::ghilb(z2(), &[1, 1]).unwrap();
        let cc = c.tensor(&c).unwrap();
        let back: CatObject = serde_json::from_str(&serde_json::to_string(&cc).unwrap()).unwrap();
        assert_eq!(back, cc);
        let f: CatObject = serde_json::from_str(r#"{"instance":"fhilb","dim":3}"#).unwrap();
        assert_eq!(f, CatObject::fhilb(3));
    }
}
