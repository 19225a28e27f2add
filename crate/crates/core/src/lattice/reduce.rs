use nalgebra::DMatrix;

use crate::lattice::LatticeBasis;
use crate::{Error, Result};

/// Lovász parameter; 0.99 keeps the reduction close to optimal at these sizes.
const DELTA: f64 = 0.99;

/// Outcome of a reduction: same lattice, near-orthogonal columns, plus the
/// integer change of coordinates `reduced = original * transform`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub cols: DMatrix<f64>,
    pub transform: Vec<Vec<i64>>, // column-major: transform[j] are the coefficients of reduced column j
}

impl Reduction {
    /// Map coefficients w.r.t. the reduced basis back to the original basis.
    pub fn to_original_coeffs(&self, reduced: &[i64]) -> Vec<i64> {
        let d = self.transform.len();
        let mut out = vec![0i64; d];
        for (j, kj) in reduced.iter().enumerate() {
            for i in 0..d {
                out[i] += self.transform[j][i] * kj;
            }
        }
        out
    }
}

/// Size reduction with Lovász-condition swaps (Lagrange reduction when d = 2).
/// Works on the raw column matrix; callers wanting a `LatticeBasis` should go
/// through [`reduce_basis`].
pub fn reduce_columns(cols: &DMatrix<f64>) -> Result<Reduction> {
    let d = cols.ncols();
    let mut b = cols.clone();
    let mut u: Vec<Vec<i64>> = (0..d)
        .map(|j| (0..d).map(|i| i64::from(i == j)).collect())
        .collect();

    // Gram-Schmidt data, recomputed from scratch; fine at these dimensions.
    let gram_schmidt = |b: &DMatrix<f64>| -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let mut mu = vec![vec![0.0; d]; d];
        let mut star: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(d);
        let mut norms = vec![0.0; d];
        for i in 0..d {
            let mut v = b.column(i).clone_owned();
            for j in 0..i {
                let m = b.column(i).dot(&star[j]) / norms[j];
                mu[i][j] = m;
                v -= &star[j] * m;
            }
            norms[i] = v.dot(&v);
            if norms[i] < 1e-24 {
                return Err(Error::DegenerateBasis("columns nearly dependent".into()));
            }
            star.push(v);
        }
        Ok((mu, norms))
    };

    let mut k = 1usize;
    let mut guard =  10_000usize;
    while k < d {
        guard -= 1;
        if guard == 0 {
            return Err(Error::DegenerateBasis("reduction failed to terminate".into()));
        }
        let (mut mu, mut norms) = gram_schmidt(&b)?;
        // Size-reduce column k against all earlier columns.
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if r != 0.0 {
                let col_j = b.column(j).clone_owned();
                let mut col_k = b.column(k).clone_owned();
                col_k -= col_j * r;
                b.set_column(k, &col_k);
                let ri = r as i64;
                for i in 0..d {
                    u[k][i] -= ri * u[j][i];
                }
                let res = gram_schmidt(&b)?;
                mu = res.0;
                norms = res.1;
            }
        }
        // Lovász condition between k-1 and k.
        if norms[k] >= (DELTA - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            let tmp = b.column(k).clone_owned();
            b.set_column(k, &b.column(k - 1).clone_owned());
            b.set_column(k - 1, &tmp);
            u.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }

    Ok(Reduction { cols: b, transform: u })
}

/// Reduce a lattice basis, returning the same lattice on near-orthogonal
/// generators. The affine shift (if any) is carried over unchanged.
pub fn reduce_basis(basis: &LatticeBasis) -> Result<LatticeBasis> {
    let red = reduce_columns(basis.columns())?;
    Ok(basis.replace_columns(red.cols))
}
