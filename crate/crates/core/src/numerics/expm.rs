//! Scaling and squaring with the [13/13] Padé approximant (Higham 2005).

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::scalar::Scalar;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the [13/13] approximant is accurate to unit roundoff in f64.
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential.
pub fn expm<T: Scalar>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    let n = m.n();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0));
    }
    let norm = m.norm_1().to_f64_lossy();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scaled(T::c(0.5f64.powi(squarings)));
    let mut e = pade13(&a)?;
    for _ in 0..squarings {
        e = e.matmul(&e);
        if !e.is_finite() {
            return Err(Error::NonFinite("expm squaring"));
        }
    }
    Ok(e)
}

fn pade13<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = a.n();
    let b = |k: usize| T::c(PADE13[k]);
    let ident = DenseMatrix::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let comb = |c6: T, c4: T, c2: T, c0: T| {
        a6.scaled(c6)
            .add(&a4.scaled(c4))
            .add(&a2.scaled(c2))
            .add(&ident.scaled(c0))
    };

    let u_inner =
        a6.matmul(&comb(b(13), b(11), b(9), T::zero()))
            .add(&comb(b(7), b(5), b(3), b(1)));
    let u = a.matmul(&u_inner);
    let v = a6
        .matmul(&comb(b(12), b(10), b(8), T::zero()))
        .add(&comb(b(6), b(4), b(2), b(0)));

    let p = v.add(&u);
    let q = v.sub(&u);
    let r = q
        .solve(&p)
        .ok_or(Error::NonFinite("expm Padé denominator"))?;
    if !r.is_finite() {
        return Err(Error::NonFinite("expm Padé"));
    }
    Ok(r)
}
