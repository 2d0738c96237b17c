//! Lazy evaluation of string diagrams built from matrices by tensor and
//! composition, without materialising the Kronecker products.
//!
//! `(A ⊗ B) vec(X) = vec(A X Bᵀ)` for row-major `vec`, so a tensor of factors
//! acts on a block of columns by reshaping and applying each factor in turn.
//! Equations between diagrams are compared on blocks of identity columns, in
//! parallel, accumulating Frobenius norms.

use nalgebra::DMatrix;

use crate::matkernel::{CMatrix, Tolerance, C64};
use crate::par;
use crate::report::Instance;

#[derive(Clone, Debug)]
pub enum Diagram<'a> {
    Id(usize),
    Mat(&'a CMatrix),
    Owned(CMatrix),
    Tensor(Vec<Diagram<'a>>),
    /// Composite in the usual order: `Compose([g, f]) = g ∘ f`.
    Compose(Vec<Diagram<'a>>),
    Scale(C64, Box<Diagram<'a>>),
}

pub fn id<'a>(n: usize) -> Diagram<'a> {
    Diagram::Id(n)
}

pub fn m(x: &CMatrix) -> Diagram<'_> {
    Diagram::Mat(x)
}

pub fn owned<'a>(x: CMatrix) -> Diagram<'a> {
    Diagram::Owned(x)
}

pub fn t<'a>(factors: impl IntoIterator<Item = Diagram<'a>>) -> Diagram<'a> {
    Diagram::Tensor(factors.into_iter().collect())
}

pub fn c<'a>(steps: impl IntoIterator<Item = Diagram<'a>>) -> Diagram<'a> {
    Diagram::Compose(steps.into_iter().collect())
}

pub fn scaled(z: C64, d: Diagram<'_>) -> Diagram<'_> {
    Diagram::Scale(z, Box::new(d))
}

const BLOCK: usize = 64;

impl<'a> Diagram<'a> {
    pub fn rows(&self) -> usize {
        match self {
            Diagram::Id(n) => *n,
            Diagram::Mat(x) => x.rows(),
            Diagram::Owned(x) => x.rows(),
            Diagram::Tensor(fs) => fs.iter().map(Diagram::rows).product(),
            Diagram::Compose(s) => s.first().map_or(0, Diagram::rows),
            Diagram::Scale(_, d) => d.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Diagram::Id(n) => *n,
            Diagram::Mat(x) => x.cols(),
            Diagram::Owned(x) => x.cols(),
            Diagram::Tensor(fs) => fs.iter().map(Diagram::cols).product(),
            Diagram::Compose(s) => s.last().map_or(0, Diagram::cols),
            Diagram::Scale(_, d) => d.cols(),
        }
    }

    /// Shape consistency of every composite and tensor inside.
    pub fn well_formed(&self) -> bool {
        match self {
            Diagram::Id(_) | Diagram::Mat(_) | Diagram::Owned(_) => true,
            Diagram::Tensor(fs) => !fs.is_empty() && fs.iter().all(Diagram::well_formed),
            Diagram::Compose(s) => {
                !s.is_empty() && s.iter().all(Diagram::well_formed) && s.windows(2).all(|w| w[0].cols() == w[1].rows())
            }
            Diagram::Scale(_, d) => d.well_formed(),
        }
    }

    /// The adjoint diagram: reversed composites, daggered boxes.
    pub fn adjoint(&self) -> Diagram<'a> {
        match self {
            Diagram::Id(n) => Diagram::Id(*n),
            Diagram::Mat(x) => Diagram::Owned(x.adjoint()),
            Diagram::Owned(x) => Diagram::Owned(x.adjoint()),
            Diagram::Tensor(fs) => Diagram::Tensor(fs.iter().map(Diagram::adjoint).collect()),
            Diagram::Compose(s) => Diagram::Compose(s.iter().rev().map(Diagram::adjoint).collect()),
            Diagram::Scale(z, d) => Diagram::Scale(z.conj(), Box::new(d.adjoint())),
        }
    }

    /// `self · x` for a block of columns.
    pub fn apply(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        match self {
            Diagram::Id(_) => x.clone(),
            Diagram::Mat(a) => mul_skipping_zero_columns(a, x),
            Diagram::Owned(a) => mul_skipping_zero_columns(a, x),
            Diagram::Compose(s) => {
                let mut y = x.clone();
                for step in s.iter().rev() {
                    y = step.apply(&y);
                }
                y
            }
            Diagram::Tensor(fs) => apply_tensor(fs, x),
            Diagram::Scale(z, d) => d.apply(x) * *z,
        }
    }

    /// Dense matrix, evaluated from whichever side is smaller.
    pub fn eval(&self) -> CMatrix {
        if self.rows() < self.cols() {
            self.adjoint().to_matrix().adjoint()
        } else {
            self.to_matrix()
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_dmatrix(self.apply(&DMatrix::identity(self.cols(), self.cols())))
    }
}

/// Basis blocks pushed through identity wires are mostly zero; only the
/// nonzero rows and columns of `x` take part in the product.
fn mul_skipping_zero_columns(a: &CMatrix, x: &DMatrix<C64>) -> DMatrix<C64> {
    let is_nz = |z: &C64| z.re != 0.0 || z.im != 0.0;
    let cols: Vec<usize> = (0..x.ncols()).filter(|&j| x.column(j).iter().any(is_nz)).collect();
    let rows: Vec<usize> = (0..x.nrows()).filter(|&i| x.row(i).iter().any(is_nz)).collect();
    if 2 * cols.len() >= x.ncols() && 2 * rows.len() >= x.nrows() {
        return a.as_dmatrix() * x;
    }
    let mut out = DMatrix::from_element(a.rows(), x.ncols(), C64::new(0.0, 0.0));
    if cols.is_empty() || rows.is_empty() {
        return out;
    }
    let packed = x.select_columns(&cols).select_rows(&rows);
    let prod = a.as_dmatrix().select_columns(&rows) * packed;
    for (k, &j) in cols.iter().enumerate() {
        out.set_column(j, &prod.column(k));
    }
    out
}

fn apply_tensor(fs: &[Diagram<'_>], x: &DMatrix<C64>) -> DMatrix<C64> {
    match fs {
        [] => x.clone(),
        [only] => only.apply(x),
        [a, rest @ ..] => {
            let rest_rows: usize = rest.iter().map(Diagram::rows).product();
            let rest_cols: usize = rest.iter().map(Diagram::cols).product();
            let (ra, ca) = (a.rows(), a.cols());
            let ncol = x.ncols();
            // Each column j reshapes to X_j (ca x rest_cols); compute A X_j.
            let w = if matches!(a, Diagram::Id(_)) {
                None
            } else {
                let xall = DMatrix::from_fn(ca, rest_cols * ncol, |i, jk| {
                    let (j, k) = (jk / rest_cols, jk % rest_cols);
                    x[(i * rest_cols + k, j)]
                });
                Some(a.apply(&xall))
            };
            // Then apply the remaining factors to the rows: (rest · W_jᵀ)ᵀ.
            let wt = DMatrix::from_fn(rest_cols, ra * ncol, |k, ji| {
                let (j, i) = (ji / ra, ji % ra);
                match &w {
                    Some(w) => w[(i, j * rest_cols + k)],
                    None => x[(i * rest_cols + k, j)],
                }
            });
            let all_id = rest.iter().all(|d| matches!(d, Diagram::Id(_)));
            let v = if all_id { wt } else { apply_tensor(rest, &wt) };
            DMatrix::from_fn(ra * rest_rows, ncol, |il, j| {
                let (i, l) = (il / rest_rows, il % rest_rows);
                v[(l, j * ra + i)]
            })
        }
    }
}

/// Residual and scale of `lhs = rhs`, evaluated on blocks of basis columns
/// of whichever side (input or output) is smaller.
pub fn compare(lhs: &Diagram<'_>, rhs: &Diagram<'_>) -> (f64, f64) {
    if lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols() || !lhs.well_formed() || !rhs.well_formed() {
        return (f64::INFINITY, 1.0);
    }
    if lhs.rows() < lhs.cols() {
        return compare_columns(&lhs.adjoint(), &rhs.adjoint());
    }
    compare_columns(lhs, rhs)
}

fn compare_columns(lhs: &Diagram<'_>, rhs: &Diagram<'_>) -> (f64, f64) {
    let n = lhs.cols();
    let blocks: Vec<(usize, usize)> = (0..n).step_by(BLOCK).map(|s| (s, (s + BLOCK).min(n))).collect();
    let parts = par::map(&blocks, |&(s, e)| {
        let basis = DMatrix::from_fn(n, e - s, |i, j| {
            if i == s + j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let l = lhs.apply(&basis);
        let r = rhs.apply(&basis);
        let diff: f64 = l.iter().zip(r.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        let nl: f64 = l.iter().map(|z| z.norm_sqr()).sum();
        let nr: f64 = r.iter().map(|z| z.norm_sqr()).sum();
        (diff, nl, nr)
    });
    let (d, l, r) = parts
        .into_iter()
        .fold((0.0, 0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1, acc.2 + p.2));
    (d.sqrt(), 1f64.max(l.sqrt()).max(r.sqrt()))
}

pub fn instance(lhs: &Diagram<'_>, rhs: &Diagram<'_>, witness: impl Into<String>) -> Instance {
    let (residual, scale) = compare(lhs, rhs);
    Instance {
        residual,
        scale,
        witness: witness.into(),
    }
}

pub fn close(lhs: &Diagram<'_>, rhs: &Diagram<'_>, tol: Tolerance) -> bool {
    let (r, s) = compare(lhs, rhs);
    tol.accepts(r, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random::gaussian(2, 3, &mut rng);
        let b = random::gaussian(4, 2, &mut rng);
        let cc = random::gaussian(3, 3, &mut rng);
        let g = random::gaussian(5, 2 * 4 * 3, &mut rng);
        let lazy = c([m(&g), t([m(&a), m(&b), m(&cc)]), t([id(3), id(2), id(3)])]);
        let dense = g.compose(&a.tensor(&b).tensor(&cc));
        let tol = Tolerance::default();
        assert!(tol.close(&lazy.to_matrix(), &dense));
        let with_ids = t([id(2), m(&b), id(3)]).to_matrix();
        assert!(tol.close(
            &with_ids,
            &CMatrix::identity(2).tensor(&b).tensor(&CMatrix::identity(3))
        ));
        let (r, _) = compare(&lazy, &owned(dense.clone()));
        assert!(r < 1e-12);
        assert!(tol.close(&lazy.adjoint().to_matrix(), &dense.adjoint()));
    }

    #[test]
    fn shape_mismatch_compares_as_infinite() {
        let a = CMatrix::identity(2);
        let (r, _) = compare(&m(&a), &id(3));
        assert!(r.is_infinite());
        let b = CMatrix::zeros(2, 3);
        assert!(!c([m(&b), m(&b)]).well_formed());
    }
}
