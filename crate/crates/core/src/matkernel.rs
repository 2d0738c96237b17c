//! Dense complex linear algebra underneath every other module.
//!
//! Matrices are stored by [`nalgebra`]; this module pins the conventions the
//! rest of the crate relies on:
//!
//! * a morphism `f: X -> Y` is a `dim(Y) x dim(X)` matrix and `g ∘ f` is the
//!   product `g * f`;
//! * the tensor product is the Kronecker product with row-major pair indices,
//!   so basis vector `e_i ⊗ e_k` of `C^m ⊗ C^n` sits at index `i * n + k`;
//! * approximate equality follows [`Tolerance`]: `‖a - b‖_F <= eps * max(1, ‖a‖_F, ‖b‖_F)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::from_element(rows, cols, ZERO))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    /// 1x1 matrix holding `z`.
    pub fn scalar(z: C64) -> Self {
        CMatrix(DMatrix::from_element(1, 1, z))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        let expected = rows.checked_mul(cols).ok_or(Error::Size { rows, cols })?;
        if entries.len() != expected {
            return Err(Error::Structural(format!(
                "expected {expected} entries for a {rows}x{cols} matrix, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Structural("matrix entries must be finite".into()));
        }
        Ok(CMatrix(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Real matrix from row-major data. Panics if `data.len() != rows * cols`.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "real matrix data has wrong length");
        CMatrix::from_fn(rows, cols, |i, j| C64::new(data[i * cols + j], 0.0))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// Column vector.
    pub fn column(entries: &[C64]) -> Self {
        CMatrix::from_fn(entries.len(), 1, |i, _| entries[i])
    }

    /// Matrix unit `E_ij` of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        m.0[(i, j)] = ONE;
        m
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        CMatrix(m)
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.0[(i, j)] = z;
    }

    pub fn row_major(&self) -> Vec<C64> {
        let (r, c) = self.shape();
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        CMatrix(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        CMatrix(self.0.transpose())
    }

    pub fn scale(&self, z: C64) -> Self {
        CMatrix(self.0.map(|w| w * z))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        CMatrix(self.0.map(|w| w * s))
    }

    /// Composite `self ∘ rhs` (matrix product). Panics on mismatched shapes.
    pub fn compose(&self, rhs: &CMatrix) -> Self {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "cannot compose {:?} after {:?}",
            self.shape(),
            rhs.shape()
        );
        CMatrix(&self.0 * &rhs.0)
    }

    pub fn add(&self, rhs: &CMatrix) -> Self {
        CMatrix(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &CMatrix) -> Self {
        CMatrix(&self.0 - &rhs.0)
    }

    /// Kronecker product; panics only when the result size overflows `usize`.
    pub fn tensor(&self, rhs: &CMatrix) -> Self {
        kron(self, rhs).expect("tensor product size overflow")
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Inverse via LU; `None` when singular.
    pub fn inverse(&self) -> Option<CMatrix> {
        if !self.is_square() {
            return None;
        }
        self.0.clone().try_inverse().map(CMatrix)
    }

    pub fn is_unitary(&self, tol: Tolerance) -> bool {
        self.is_square()
            && tol.close(&self.adjoint().compose(self), &CMatrix::identity(self.cols()))
            && tol.close(&self.compose(&self.adjoint()), &CMatrix::identity(self.rows()))
    }
}

/// Tensor product of two matrices (row-major Kronecker convention).
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    match (rows, cols) {
        (Some(r), Some(c)) if r.checked_mul(c).is_some() => Ok(CMatrix(a.0.kronecker(&b.0))),
        _ => Err(Error::Size {
            rows: a.rows().saturating_mul(b.rows()),
            cols: a.cols().saturating_mul(b.cols()),
        }),
    }
}

/// Left-to-right tensor product of several factors.
pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    factors.iter().fold(CMatrix::identity(1), |acc, f| acc.tensor(f))
}

/// Compose a chain written in diagram order: `chain(&[f, g, h]) = h ∘ g ∘ f`.
pub fn chain(steps: &[&CMatrix]) -> CMatrix {
    let mut it = steps.iter();
    let first = (*it.next().expect("empty chain")).clone();
    it.fold(first, |acc, s| s.compose(&acc))
}

/// Standard cup `Σ_i e_i ⊗ e_i` as an `n^2 x 1` column.
pub fn cup(n: usize) -> CMatrix {
    let mut v = CMatrix::zeros(n * n, 1);
    for i in 0..n {
        v.set(i * n + i, 0, ONE);
    }
    v
}

/// Standard cap, the adjoint of [`cup`].
pub fn cap(n: usize) -> CMatrix {
    cup(n).adjoint()
}

/// Symmetry `C^p ⊗ C^q -> C^q ⊗ C^p`.
pub fn swap(p: usize, q: usize) -> CMatrix {
    let n = p * q;
    let mut s = CMatrix::zeros(n, n);
    for a in 0..p {
        for b in 0..q {
            s.set(b * p + a, a * q + b, ONE);
        }
    }
    s
}

/// Comparison policy for floating-point morphism equality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: 1e-9 }
    }
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps.is_finite() {
            Ok(Tolerance { eps })
        } else {
            Err(Error::Structural(format!(
                "tolerance must be positive and finite, got {eps}"
            )))
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Frobenius distance; shapes must agree.
    pub fn residual(&self, a: &CMatrix, b: &CMatrix) -> f64 {
        assert_eq!(a.shape(), b.shape(), "residual between mismatched shapes");
        a.sub(b).frobenius_norm()
    }

    pub fn scale(&self, a: &CMatrix, b: &CMatrix) -> f64 {
        1f64.max(a.frobenius_norm()).max(b.frobenius_norm())
    }

    pub fn close(&self, a: &CMatrix, b: &CMatrix) -> bool {
        a.shape() == b.shape() && self.residual(a, b) <= self.eps * self.scale(a, b)
    }

    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.eps * scale.max(1.0)
    }
}

/// Split a dagger idempotent `p = p† = p²` as `p = V V†` with `V† V = I`.
///
/// The rank is read off the spectrum; every eigenvalue must lie within `tol`
/// of 0 or 1. Columns of `V` come from a pivoted Gram-Schmidt pass over the
/// columns of `p` (largest remaining column first, ties to the lower index),
/// then are reported in ascending pivot-column order, so the output carries no
/// solver-dependent phase.
pub fn split_dagger_idempotent(p: &CMatrix, tol: Tolerance) -> Result<(CMatrix, usize)> {
    if !p.is_square() {
        return Err(Error::Structural(format!(
            "idempotent must be square, got {:?}",
            p.shape()
        )));
    }
    let n = p.rows();
    if !tol.close(p, &p.adjoint()) {
        return Err(Error::NotAnIdempotent(format!(
            "not Hermitian: residual {:e}",
            tol.residual(p, &p.adjoint())
        )));
    }
    let herm = p.add(&p.adjoint()).scale_re(0.5);
    let eig = herm.0.clone().symmetric_eigen();
    let mut rank = 0;
    for &lambda in eig.eigenvalues.iter() {
        if (lambda - 1.0).abs() <= tol.eps() {
            rank += 1;
        } else if lambda.abs() > tol.eps() {
            return Err(Error::NotAnIdempotent(format!(
                "eigenvalue {lambda} is not within {} of 0 or 1",
                tol.eps()
            )));
        }
    }
    let mut basis: Vec<(usize, Vec<C64>)> = Vec::with_capacity(rank);
    let mut residual_cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| herm.get(i, j)).collect()).collect();
    for _ in 0..rank {
        let (best, _) =
            residual_cols
                .iter()
                .enumerate()
                .map(|(j, c)| (j, norm(c)))
                .fold(
                    (usize::MAX, -1.0),
                    |acc, (j, nv)| if nv > acc.1 + 1e-14 { (j, nv) } else { acc },
                );
        let mut v = residual_cols[best].clone();
        for (_, q) in &basis {
            project_out(&mut v, q);
        }
        let nv = norm(&v);
        if nv <= f64::EPSILON {
            return Err(Error::NotAnIdempotent("rank deficiency while splitting".into()));
        }
        v.iter_mut().for_each(|z| *z /= nv);
        for c in residual_cols.iter_mut() {
            project_out(c, &v);
        }
        basis.push((best, v));
    }
    basis.sort_by_key(|(j, _)| *j);
    // Re-orthonormalise in reported order.
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(rank);
    for (_, v) in basis {
        let mut v = v;
        for q in &cols {
            project_out(&mut v, q);
        }
        let nv = norm(&v);
        v.iter_mut().for_each(|z| *z /= nv);
        cols.push(v);
    }
    let v = CMatrix::from_fn(n, rank, |i, j| cols[j][i]);
    Ok((v, rank))
}

/// Unitary factor `U W†` of the singular value decomposition `a = U Σ W†`.
pub fn polar_unitary(a: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Structural(format!(
            "polar factor needs a square matrix, got {:?}",
            a.shape()
        )));
    }
    let svd = a.0.clone().svd(true, true);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin < tol.eps() {
        return Err(Error::NonInvertible(format!("smallest singular value {smin:e}")));
    }
    let u = svd.u.expect("left singular vectors requested");
    let wt = svd.v_t.expect("right singular vectors requested");
    Ok(CMatrix(u * wt))
}

/// A homogeneous linear map on `rows x cols` matrices.
pub type Constraint<'a> = Box<dyn Fn(&CMatrix) -> CMatrix + Sync + 'a>;

/// Orthonormal basis (Frobenius inner product) of the joint kernel of the
/// constraints on `rows x cols` matrices.
///
/// The constraint system is reduced to row echelon form with partial pivoting
/// over columns taken in row-major entry order; free entries seed the kernel
/// vectors, which are then orthonormalised by modified Gram-Schmidt. The
/// result depends only on the constraints and their order.
pub fn linear_solution_space(rows: usize, cols: usize, constraints: &[Constraint<'_>]) -> Vec<CMatrix> {
    let n = rows * cols;
    if n == 0 {
        return Vec::new();
    }
    // Column j of the system is the image of the j-th matrix unit.
    let mut images: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let e = CMatrix::unit(rows, cols, j / cols, j % cols);
        let mut col = Vec::new();
        for c in constraints {
            col.extend(c(&e).row_major());
        }
        images.push(col);
    }
    let m = images.first().map_or(0, Vec::len);
    let mut sys: Vec<Vec<C64>> = (0..m).map(|i| images.iter().map(|c| c[i]).collect()).collect();
    let scale = sys.iter().flat_map(|r| r.iter()).map(|z| z.norm()).fold(1.0, f64::max);
    let thresh = 1e-10 * scale;

    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let (best, mag) = (row..m)
            .map(|r| (r, sys[r][col].norm()))
            .fold((row, -1.0), |acc, (r, v)| if v > acc.1 { (r, v) } else { acc });
        if mag <= thresh {
            continue;
        }
        sys.swap(row, best);
        let piv = sys[row][col];
        for z in sys[row].iter_mut() {
            *z /= piv;
        }
        let pivot_row = sys[row].clone();
        for (r, line) in sys.iter_mut().enumerate() {
            if r != row {
                let factor = line[col];
                if factor != ZERO {
                    for (z, p) in line.iter_mut().zip(&pivot_row) {
                        *z -= factor * p;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }

    let mut basis: Vec<Vec<C64>> = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![ZERO; n];
        v[free] = ONE;
        for (k, &pc) in pivots.iter().enumerate() {
            v[pc] = -sys[k][free];
        }
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for q in &basis {
                project_out(&mut v, q);
            }
        }
        let nv = norm(&v);
        if nv > 1e-12 {
            v.iter_mut().for_each(|z| *z /= nv);
            basis.push(v);
        }
    }
    basis
        .into_iter()
        .map(|v| CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
        .collect()
}

/// Outcome of a randomized search for a unitary in a linear span.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitarySearch {
    /// A certified unitary satisfying the caller's check.
    Found { unitary: CMatrix, attempt: usize },
    /// The two sides have different dimensions.
    DimensionMismatch,
    /// The span is zero, so no isomorphism exists.
    EmptySpan,
    /// Every attempt failed; nothing is proved either way.
    NotFound { attempts: usize },
}

impl UnitarySearch {
    pub fn found(&self) -> Option<&CMatrix> {
        match self {
            UnitarySearch::Found { unitary, .. } => Some(unitary),
            _ => None,
        }
    }

    /// Definitive negatives, as opposed to an exhausted search.
    pub fn is_definitive_negative(&self) -> bool {
        matches!(self, UnitarySearch::DimensionMismatch | UnitarySearch::EmptySpan)
    }
}

/// Look for a unitary `U` in the span of `basis` that passes `accept`.
///
/// Attempt 0 tries the identity when the shape is square; later attempts take
/// the polar factor of a seeded Gaussian combination of the basis. Every
/// candidate must pass `accept` and be unitary before it is returned.
pub fn unitary_in_span(
    basis: &[CMatrix],
    shape: (usize, usize),
    tol: Tolerance,
    seed: u64,
    attempts: usize,
    accept: impl Fn(&CMatrix) -> bool,
) -> UnitarySearch {
    use rand::SeedableRng;
    if shape.0 != shape.1 {
        return UnitarySearch::DimensionMismatch;
    }
    if basis.is_empty() {
        return UnitarySearch::EmptySpan;
    }
    let n = shape.0;
    let id = CMatrix::identity(n);
    if accept(&id) {
        return UnitarySearch::Found {
            unitary: id,
            attempt: 0,
        };
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=attempts {
        let coeffs = crate::random::gaussian(basis.len(), 1, &mut rng);
        let f = basis
            .iter()
            .enumerate()
            .fold(CMatrix::zeros(n, n), |acc, (k, b)| acc.add(&b.scale(coeffs.get(k, 0))));
        let Ok(u) = polar_unitary(&f, tol) else { continue };
        if u.is_unitary(tol) && accept(&u) {
            return UnitarySearch::Found { unitary: u, attempt };
        }
    }
    UnitarySearch::NotFound { attempts }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(v: &mut [C64], q: &[C64]) {
    let ip: C64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    for (z, a) in v.iter_mut().zip(q) {
        *z -= ip * a;
    }
}
