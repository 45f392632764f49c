//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted ascending.
pub fn sorted_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sorted_eigen(m).0[0]
}

/// `m^{-1/2}` for a symmetric positive-definite matrix.
pub fn inverse_sqrt(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let (values, vectors) = sorted_eigen(m);
    if values[0] <= 0.0 {
        return None;
    }
    let scaled = DVector::from_iterator(values.len(), values.iter().map(|v| 1.0 / v.sqrt()));
    Some(&vectors * DMatrix::from_diagonal(&scaled) * vectors.transpose())
}

/// Second-moment matrix `(1/n) Σ x xᵀ` of the given vectors.
pub fn second_moment<'a, I>(dim: usize, points: I) -> DMatrix<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut m = DMatrix::zeros(dim, dim);
    let mut n = 0usize;
    for x in points {
        for i in 0..dim {
            for j in i..dim {
                m[(i, j)] += x[i] * x[j];
            }
        }
        n += 1;
    }
    for i in 0..dim {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    if n > 0 {
        m /= n as f64;
    }
    m
}

/// Orthonormal basis (as columns) of the orthogonal complement of `v` in `R^k`.
///
/// Deterministic: Gram–Schmidt over the standard basis after `v`.
pub fn orthogonal_complement(v: &[f64]) -> Vec<Vec<f64>> {
    let k = v.len();
    let vn = crate::point::normalized(v);
    let mut basis: Vec<Vec<f64>> = vec![vn];
    for e in 0..k {
        if basis.len() == k {
            break;
        }
        let mut c = vec![0.0; k];
        c[e] = 1.0;
        // two passes of Gram-Schmidt for stability
        for _ in 0..2 {
            for b in &basis {
                let p = crate::point::dot(&c, b);
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= p * bi;
                }
            }
        }
        let n = crate::point::norm(&c);
        if n > 1e-8 {
            basis.push(c.iter().map(|x| x / n).collect());
        }
    }
    basis.remove(0);
    basis
}

/// Row-major serde for dense matrices (`[[row0...], [row1...], ...]`).
pub mod row_major {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt_squares_to_inverse() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let r = inverse_sqrt(&m).unwrap();
        let back = &r * &r * &m;
        assert!((back - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn complement_is_orthonormal() {
        let v = [0.3, -0.2, 0.9];
        let c = orthogonal_complement(&v);
        assert_eq!(c.len(), 2);
        for a in &c {
            assert!((crate::point::norm(a) - 1.0).abs() < 1e-12);
            assert!(crate::point::dot(a, &v).abs() < 1e-12);
        }
        assert!(crate::point::dot(&c[0], &c[1]).abs() < 1e-12);
    }
}
