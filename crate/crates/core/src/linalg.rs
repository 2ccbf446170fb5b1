use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use nalgebra::DMatrix;

/// Dense row-major square matrix. Dimensions here never exceed 6, so the
/// plain `Vec` layout is all that is needed.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from `n` rows of length `n`.
    ///
    /// Panics when the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "ragged matrix rows");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// `M v`, contracting the second index.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| crate::math::dot(self.row(i), v)).collect()
    }

    /// `uᵀ M`, contracting the first index.
    pub fn vec_mul(&self, u: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| u[i] * self[(i, j)]).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| (0..self.n).map(|k| self[(i, k)] * other[(k, j)]).sum())
    }

    /// `M(u, v) = uⁱ M_ij vʲ`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        crate::math::dot(u, &self.mul_vec(v))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        crate::math::max_abs(&self.data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for SquareMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.n))?;
        for i in 0..self.n {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending, the
/// matching unit eigenvectors as columns-turned-rows.
pub(crate) fn symmetric_eigen(m: &SquareMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.dim();
    // symmetrize explicitly: the solver only reads one triangle
    let sym = SquareMatrix::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = nalgebra::SymmetricEigen::new(sym.to_nalgebra());
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Eigenvalues of a general real matrix as `(re, im)` pairs.
pub(crate) fn general_eigenvalues(m: &SquareMatrix) -> Vec<(f64, f64)> {
    let ev = m.to_nalgebra().complex_eigenvalues();
    let mut out: Vec<(f64, f64)> = ev.iter().map(|c| (c.re, c.im)).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

pub(crate) fn inverse(m: &SquareMatrix) -> Option<SquareMatrix> {
    m.to_nalgebra().try_inverse().map(|inv| SquareMatrix::from_nalgebra(&inv))
}

/// Orthonormal basis (Euclidean) of the null space of `m`, using singular
/// values below `tol · σ_max`.
pub(crate) fn null_space(m: &SquareMatrix, tol: f64) -> Vec<Vec<f64>> {
    let n = m.dim();
    let svd = m.to_nalgebra().svd(false, true);
    let v_t = match svd.v_t {
        Some(v) => v,
        None => return Vec::new(),
    };
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, s| a.max(*s));
    let cutoff = tol * smax.max(1.0);
    (0..n)
        .filter(|&k| svd.singular_values[k] <= cutoff)
        .map(|k| v_t.row(k).iter().copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_eigen_sorted() {
        let m = SquareMatrix::from_rows(&[vec![0.0, -0.5], vec![-0.5, 0.0]]);
        let (vals, vecs) = symmetric_eigen(&m);
        assert!((vals[0] + 0.5).abs() < 1e-15);
        assert!((vals[1] - 0.5).abs() < 1e-15);
        let mv = m.mul_vec(&vecs[1]);
        assert!((mv[0] - 0.5 * vecs[1][0]).abs() < 1e-15);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let m = SquareMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let ev = general_eigenvalues(&m);
        assert!(ev.iter().all(|(re, im)| re.abs() < 1e-14 && (im.abs() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        assert!((ns[0][0] + ns[0][1]).abs() < 1e-14);
    }
}
