use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Tolerance on `| |det| - 1 |` for a basis to count as unimodular.
pub const UNIMODULAR_TOL: f64 = 1e-9;

/// A (possibly affine) unimodular lattice, stored as column generators plus an
/// optional origin shift.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    cols: DMatrix<f64>,
    shift: Option<DVector<f64>>,
}

impl LatticeBasis {
    /// Wrap a column-generator matrix, checking unimodularity.
    pub fn new(cols: DMatrix<f64>) -> Result<Self> {
        if cols.nrows() != cols.ncols() || cols.nrows() == 0 {
            return Err(Error::DegenerateBasis("generator matrix must be square".into()));
        }
        let det = cols.determinant();
        if (det.abs() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::DegenerateBasis(format!("|det| = {} is not 1", det.abs())));
        }
        Ok(LatticeBasis { cols, shift: None })
    }

    /// The integer lattice `Z^d`.
    pub fn standard(d: usize) -> Self {
        LatticeBasis { cols: DMatrix::identity(d, d), shift: None }
    }

    /// Lattice of approximation errors of `x`: the integer span of
    /// `{(q x - p, q)}` realized by the columns `(e_i, 0)` and `(x, 1)`.
    pub fn dani(x: &[f64]) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        let d = x.len() + 1;
        let mut cols = DMatrix::identity(d, d);
        for (i, &xi) in x.iter().enumerate() {
            cols[(i, d - 1)] = xi;
        }
        Ok(LatticeBasis { cols, shift: None })
    }

    /// Block-triangular basis realizing `{(M q - p, q)}` for an `m x n`
    /// coefficient matrix given in row-major order.
    pub fn linear_forms(m: usize, n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != m * n {
            return Err(Error::DimensionMismatch { expected: m * n, got: entries.len() });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        let d = m + n;
        let mut cols = DMatrix::identity(d, d);
        for i in 0..m {
            for j in 0..n {
                cols[(i, m + j)] = entries[i * n + j];
            }
        }
        Ok(LatticeBasis { cols, shift: None })
    }

    /// Attach an affine origin shift.
    pub fn with_shift(mut self, shift: Vec<f64>) -> Result<Self> {
        if shift.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: shift.len() });
        }
        self.shift = Some(DVector::from_vec(shift));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.cols.nrows()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.cols
    }

    pub fn shift(&self) -> Option<&DVector<f64>> {
        self.shift.as_ref()
    }

    pub fn determinant(&self) -> f64 {
        self.cols.determinant()
    }

    /// Coordinates of the lattice point with the given integer coefficients.
    pub fn point(&self, coeffs: &[i64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.dim());
        let k = DVector::from_iterator(self.dim(), coeffs.iter().map(|&v| v as f64));
        let mut p = &self.cols * k;
        if let Some(shift) = &self.shift {
            p += shift;
        }
        p.as_slice().to_vec()
    }

    pub(crate) fn replace_columns(&self, cols: DMatrix<f64>) -> Self {
        LatticeBasis { cols, shift: self.shift.clone() }
    }
}

/// A lattice point, kept together with the integer coefficients that produced
/// it. The primitivity flag is meaningful only for homogeneous lattices.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePoint {
    pub coeffs: Vec<i64>,
    pub coords: Vec<f64>,
    pub primitive: Option<bool>,
}

/// One-parameter diagonal flow with zero weight sum, so the exponentials
/// multiply to one and unimodularity is preserved.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalFlow {
    weights: Vec<f64>,
    t: f64,
}

impl DiagonalFlow {
    /// Spiralling flow: weights `(1, ..., 1, -(d-1))`.
    pub fn spiralling(d: usize, t: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("spiralling flow needs d >= 2, got {d}")));
        }
        let mut weights = vec![1.0; d];
        weights[d - 1] = -((d - 1) as f64);
        Ok(DiagonalFlow { weights, t })
    }

    /// Linear-forms flow: weights `(n/m, ..., n/m, -1, ..., -1)`.
    pub fn linear_forms(m: usize, n: usize, t: f64) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::Domain(format!("flow needs m, n >= 1, got ({m}, {n})")));
        }
        let mut weights = vec![n as f64 / m as f64; m];
        weights.extend(std::iter::repeat(-1.0).take(n));
        Ok(DiagonalFlow { weights, t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Diagonal entries `e^{w_i t}`.
    pub fn diagonal(&self) -> Vec<f64> {
        self.weights.iter().map(|w| (w * self.t).exp()).collect()
    }

    /// Apply the flow to a basis (rows scaled by the diagonal entries); the
    /// affine shift, when present, is transported along.
    pub fn apply(&self, basis: &LatticeBasis) -> Result<LatticeBasis> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: basis.dim() });
        }
        let diag = self.diagonal();
        let mut cols = basis.cols.clone();
        for (i, &g) in diag.iter().enumerate() {
            for j in 0..cols.ncols() {
                cols[(i, j)] *= g;
            }
        }
        let shift = basis
            .shift
            .as_ref()
            .map(|s| DVector::from_iterator(s.len(), s.iter().zip(&diag).map(|(v, g)| v * g)));
        Ok(LatticeBasis { cols, shift })
    }
}
