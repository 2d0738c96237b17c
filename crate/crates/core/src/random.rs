//! Seeded random matrices for corpora and property tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::matkernel::{CMatrix, C64};

pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary via phase-corrected QR of a Ginibre matrix.
pub fn unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian(n, n, rng);
    let qr = g.as_dmatrix().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    CMatrix::from_dmatrix(q).compose(&CMatrix::diag(&phases))
}

/// Random orthogonal projection of the given rank.
pub fn projection(n: usize, rank: usize, rng: &mut impl Rng) -> CMatrix {
    let u = unitary(n, rng);
    let v = CMatrix::from_fn(n, rank, |i, j| u.get(i, j));
    v.compose(&v.adjoint())
}

pub fn hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian(n, n, rng);
    g.add(&g.adjoint()).scale_re(0.5)
}
