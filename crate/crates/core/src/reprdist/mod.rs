//! Fréchet distance between Gaussians fitted to two embedding sets.
//!
//! ```text
//! FID = |mu_a - mu_b|^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2))
//! ```
//!
//! The trace of the matrix square root is computed without leaving real
//! symmetric arithmetic: `Tr((S_a S_b)^(1/2)) = sum_i sqrt(lambda_i)` where
//! `lambda_i` are the eigenvalues of `S_a^(1/2) S_b S_a^(1/2)`, a symmetric
//! PSD matrix similar to `S_a S_b`.

mod embeddings;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use embeddings::{
    load_embeddings, read_embeddings, save_embeddings, write_embeddings, EMBEDDING_MAGIC,
};

/// Negative results down to this value are treated as rounding and clamped.
pub const NEGATIVE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_EPS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ReprError {
    #[error("not an embedding file (bad magic)")]
    BadMagic,
    #[error("embedding file is truncated")]
    TruncatedFile,
    #[error("embedding file has {0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("non-finite value in row {0}")]
    NonFiniteValue(usize),
    #[error("data length {len} does not match {n} x {d}")]
    ShapeMismatch { n: usize, d: usize, len: usize },
    #[error("ids sidecar has {found} entries, expected {expected}")]
    IdsMismatch { expected: usize, found: usize },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("FID evaluated to {0}, below the rounding tolerance")]
    NumericalFailure(f64),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl ReprError {
    pub fn name(&self) -> &'static str {
        match self {
            ReprError::BadMagic => "BadMagic",
            ReprError::TruncatedFile => "TruncatedFile",
            ReprError::TrailingBytes(_) => "TrailingBytes",
            ReprError::NonFiniteValue(_) => "NonFiniteValue",
            ReprError::ShapeMismatch { .. } => "ShapeMismatch",
            ReprError::IdsMismatch { .. } => "IdsMismatch",
            ReprError::TooFewSamples(_) => "TooFewSamples",
            ReprError::DimensionMismatch(..) => "DimensionMismatch",
            ReprError::NumericalFailure(_) => "NumericalFailure",
            ReprError::Io(_) => "IoError",
        }
    }
}

/// `n` rows of `d` finite 32-bit floats, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    n: usize,
    d: usize,
    data: Vec<f32>,
    ids: Option<Vec<String>>,
}

impl EmbeddingSet {
    pub fn new(n: usize, d: usize, data: Vec<f32>) -> Result<Self, ReprError> {
        if data.len() != n * d {
            return Err(ReprError::ShapeMismatch {
                n,
                d,
                len: data.len(),
            });
        }
        if d > 0 {
            if let Some(row) = data
                .chunks(d)
                .position(|r| r.iter().any(|v| !v.is_finite()))
            {
                return Err(ReprError::NonFiniteValue(row));
            }
        }
        Ok(EmbeddingSet {
            n,
            d,
            data,
            ids: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f32>]) -> Result<Self, ReprError> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(ReprError::ShapeMismatch {
                n: rows.len(),
                d,
                len: bad.len(),
            });
        }
        Self::new(rows.len(), d, rows.concat())
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self, ReprError> {
        if ids.len() != self.n {
            return Err(ReprError::IdsMismatch {
                expected: self.n,
                found: ids.len(),
            });
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks(self.d.max(1)).take(self.n)
    }
}

/// Mean vector and d x d covariance (row-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianStats {
    pub mean: Vec<f64>,
    pub cov: Vec<f64>,
}

impl GaussianStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    fn cov_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.cov)
    }
}

/// Column means and the unbiased (n - 1) sample covariance, symmetrized.
pub fn gaussian_stats(set: &EmbeddingSet) -> Result<GaussianStats, ReprError> {
    let (n, d) = (set.n(), set.d());
    if n < 2 {
        return Err(ReprError::TooFewSamples(n));
    }
    let mut mean = vec![0.0f64; d];
    for row in set.rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += *v as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = vec![0.0f64; d * d];
    let mut centered = vec![0.0f64; d];
    for row in set.rows() {
        for ((c, v), m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = *v as f64 - m;
        }
        for i in 0..d {
            let ci = centered[i];
            for j in i..d {
                cov[i * d + j] += ci * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    Ok(GaussianStats { mean, cov })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidResult {
    pub fid: f64,
    /// `eps * I` was added to both covariances before the square root.
    pub stabilized: bool,
}

fn sqrt_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone().symmetric_eigenvalues().min()
}

pub fn fid(a: &GaussianStats, b: &GaussianStats, eps: f64) -> Result<FidResult, ReprError> {
    let d = a.dim();
    if b.dim() != d {
        return Err(ReprError::DimensionMismatch(d, b.dim()));
    }
    let mean_term: f64 = a
        .mean
        .iter()
        .zip(&b.mean)
        .map(|(x, y)| (x - y).powi(2))
        .sum();

    let mut sa = a.cov_matrix();
    let mut sb = b.cov_matrix();
    let stabilized = min_eigenvalue(&sa) < eps || min_eigenvalue(&sb) < eps;
    if stabilized {
        for i in 0..d {
            sa[(i, i)] += eps;
            sb[(i, i)] += eps;
        }
    }

    let root_a = sqrt_psd(&sa);
    let inner = &root_a * &sb * &root_a;
    let inner = (&inner + inner.transpose()) * 0.5;
    let trace_sqrt: f64 = if d == 0 {
        0.0
    } else {
        inner
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.max(0.0).sqrt())
            .sum()
    };

    let value = mean_term + sa.trace() + sb.trace() - 2.0 * trace_sqrt;
    let fid = if value >= 0.0 {
        value
    } else if value >= -NEGATIVE_TOLERANCE {
        0.0
    } else {
        return Err(ReprError::NumericalFailure(value));
    };
    Ok(FidResult { fid, stabilized })
}

pub fn fid_between(a: &EmbeddingSet, b: &EmbeddingSet, eps: f64) -> Result<FidResult, ReprError> {
    if a.d() != b.d() {
        return Err(ReprError::DimensionMismatch(a.d(), b.d()));
    }
    fid(&gaussian_stats(a)?, &gaussian_stats(b)?, eps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidRow {
    pub eval_name: String,
    pub fid_vs_human: f64,
    pub fid_vs_mt: f64,
    /// `fid_vs_mt - fid_vs_human`; negative means closer to the MT training data.
    pub delta: f64,
}

/// For each evaluation set, its FID against human-origin and MT-origin
/// training embeddings.
pub fn fid_report(
    train_human: &EmbeddingSet,
    train_mt: &EmbeddingSet,
    eval_sets: &[(String, EmbeddingSet)],
    eps: f64,
) -> Result<Vec<FidRow>, ReprError> {
    let d = train_human.d();
    if train_mt.d() != d {
        return Err(ReprError::DimensionMismatch(d, train_mt.d()));
    }
    if let Some((_, bad)) = eval_sets.iter().find(|(_, e)| e.d() != d) {
        return Err(ReprError::DimensionMismatch(d, bad.d()));
    }
    let human = gaussian_stats(train_human)?;
    let mt = gaussian_stats(train_mt)?;
    std::thread::scope(|s| {
        let handles: Vec<_> = eval_sets
            .iter()
            .map(|(name, set)| {
                let (human, mt) = (&human, &mt);
                s.spawn(move || -> Result<FidRow, ReprError> {
                    let stats = gaussian_stats(set)?;
                    let fid_vs_human = fid(&stats, human, eps)?.fid;
                    let fid_vs_mt = fid(&stats, mt, eps)?.fid;
                    Ok(FidRow {
                        eval_name: name.clone(),
                        fid_vs_human,
                        fid_vs_mt,
                        delta: fid_vs_mt - fid_vs_human,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("FID worker panicked"))
            .collect()
    })
}
