use serde::{Deserialize, Serialize};

use super::{EmbedError, EmbeddingTensor};

/// Principal components retained from a tensor sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Orthonormal, ordered by decreasing eigenvalue.
    pub components: Vec<Vec<f64>>,
    /// All covariance eigenvalues in decreasing order, clamped at 0.
    pub eigenvalues: Vec<f64>,
    pub explained_ratio: f64,
    pub threshold: f64,
}

impl PcaModel {
    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn project_values(&self, values: &[f64]) -> Result<Vec<f64>, EmbedError> {
        if values.len() != self.width() {
            return Err(EmbedError::WidthMismatch {
                expected: self.width(),
                found: values.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(values.iter().zip(&self.mean)).map(|(a, (x, m))| a * (x - m)).sum())
            .collect())
    }

    pub fn project(&self, t: &EmbeddingTensor) -> Result<Vec<f64>, EmbedError> {
        self.project_values(&t.values)
    }

    pub fn reconstruct(&self, reduced: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, &r) in self.components.iter().zip(reduced) {
            for (o, a) in out.iter_mut().zip(c) {
                *o += r * a;
            }
        }
        out
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in decreasing order and the matching unit
/// eigenvectors, each with its largest-magnitude entry made positive.
pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| f64::from(i == j)).collect()).collect();

    let frob: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob || off == 0.0 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col: Vec<f64> = v.iter().map(|row| row[i]).collect();
            let pivot = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if pivot < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();
    (values, vectors)
}

/// Fits a PCA model keeping the fewest components whose cumulative share of
/// the total variance reaches `threshold`.
pub fn fit_pca(tensors: &[EmbeddingTensor], threshold: f64) -> Result<PcaModel, EmbedError> {
    let rows: Vec<&[f64]> = tensors.iter().map(|t| t.values.as_slice()).collect();
    fit_pca_rows(&rows, threshold)
}

pub(crate) fn fit_pca_rows(rows: &[&[f64]], threshold: f64) -> Result<PcaModel, EmbedError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(EmbedError::InvalidThreshold(threshold));
    }
    if rows.len() < 2 {
        return Err(EmbedError::TooFewTensors(rows.len()));
    }
    let d = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(EmbedError::WidthMismatch {
            expected: d,
            found: bad.len(),
        });
    }
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for r in rows {
        let c: Vec<f64> = r.iter().zip(&mean).map(|(x, m)| x - m).collect();
        for i in 0..d {
            for j in i..d {
                cov[i][j] += c[i] * c[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= n - 1.0;
            cov[j][i] = cov[i][j];
        }
    }

    let (values, vectors) = symmetric_eigen(&cov);
    let eigenvalues: Vec<f64> = values.into_iter().map(|x| x.max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    let (keep, ratio) = if total <= 0.0 {
        (1, 1.0)
    } else {
        let mut cumulative = 0.0;
        let mut keep = eigenvalues.len();
        for (i, ev) in eigenvalues.iter().enumerate() {
            cumulative += ev;
            if cumulative / total >= threshold - 1e-12 {
                keep = i + 1;
                break;
            }
        }
        let kept: f64 = eigenvalues[..keep].iter().sum();
        (keep, (kept / total).min(1.0))
    };
    Ok(PcaModel {
        mean,
        components: vectors.into_iter().take(keep).collect(),
        eigenvalues,
        explained_ratio: ratio,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::Provider;

    fn tensor(values: Vec<f64>) -> EmbeddingTensor {
        EmbeddingTensor {
            design: "d".into(),
            property: 0,
            values,
            provider: Provider::Imported,
        }
    }

    #[test]
    fn jacobi_on_known_matrix() {
        let (vals, vecs) = symmetric_eigen(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((vals[0] - 3.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let h = 0.5f64.sqrt();
        assert!((vecs[0][0] - h).abs() < 1e-12 && (vecs[0][1] - h).abs() < 1e-12);
    }

    #[test]
    fn line_in_three_space() {
        let ts: Vec<_> = (0..6).map(|i| tensor(vec![i as f64, 2.0 * i as f64, -(i as f64)])).collect();
        let m = fit_pca(&ts, 0.95).unwrap();
        assert_eq!(m.num_components(), 1);
        assert!((m.explained_ratio - 1.0).abs() < 1e-12);
        for t in &ts {
            let back = m.reconstruct(&m.project(t).unwrap());
            for (a, b) in back.iter().zip(&t.values) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mean_projects_to_zero() {
        let ts = vec![tensor(vec![1.0, 0.0]), tensor(vec![0.0, 1.0]), tensor(vec![2.0, 2.0])];
        let m = fit_pca(&ts, 1.0).unwrap();
        let z = m.project_values(&m.mean.clone()).unwrap();
        assert!(z.iter().all(|x| x.abs() < 1e-15));
        assert!(matches!(m.project_values(&[1.0]), Err(EmbedError::WidthMismatch { .. })));
    }

    #[test]
    fn identical_tensors_keep_one_component() {
        let ts = vec![tensor(vec![0.5; 4]); 3];
        let m = fit_pca(&ts, 0.95).unwrap();
        assert_eq!(m.num_components(), 1);
        assert_eq!(m.explained_ratio, 1.0);
    }

    #[test]
    fn argument_errors() {
        let one = vec![tensor(vec![1.0])];
        assert_eq!(fit_pca(&one, 0.95), Err(EmbedError::TooFewTensors(1)));
        let two = vec![tensor(vec![1.0]), tensor(vec![2.0])];
        assert_eq!(fit_pca(&two, 0.0), Err(EmbedError::InvalidThreshold(0.0)));
        assert!(fit_pca(&two, 1.5).is_err());
        let mixed = vec![tensor(vec![1.0]), tensor(vec![2.0, 3.0])];
        assert!(matches!(fit_pca(&mixed, 0.9), Err(EmbedError::WidthMismatch { .. })));
    }
}
