use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vsm::{cosine, sort_ranking, SparseVec, TermSpace, VsmIndex};

pub const DEFAULT_LSI_DIM: usize = 500;
const POWER_ITERATIONS: usize = 5;
const OVERSAMPLE: usize = 10;

/// Latent semantic index: documents projected onto the leading left
/// singular vectors of the term-document TF-IDF matrix.
#[derive(Debug, Clone)]
pub struct LsiIndex {
    space: TermSpace,
    ids: Vec<u64>,
    /// terms x d, orthonormal columns, by descending singular value.
    basis: DMatrix<f64>,
    singular_values: Vec<f64>,
    docs: Vec<DVector<f64>>,
}

/// `A * m` for `A` given as sparse columns.
fn a_times(cols: &[SparseVec], terms: usize, m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(terms, m.ncols());
    for (j, col) in cols.iter().enumerate() {
        for &(t, w) in col {
            for c in 0..m.ncols() {
                out[(t, c)] += w * m[(j, c)];
            }
        }
    }
    out
}

/// `A^T * m`.
fn at_times(cols: &[SparseVec], m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(cols.len(), m.ncols());
    for (j, col) in cols.iter().enumerate() {
        for &(t, w) in col {
            for c in 0..m.ncols() {
                out[(j, c)] += w * m[(t, c)];
            }
        }
    }
    out
}

fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

fn project(basis: &DMatrix<f64>, v: &SparseVec) -> DVector<f64> {
    let mut out = DVector::zeros(basis.ncols());
    for &(t, w) in v {
        for c in 0..basis.ncols() {
            out[c] += w * basis[(t, c)];
        }
    }
    out
}

/// Leading `dim` left singular vectors of the matrix with the given sparse
/// columns, by randomized subspace iteration. Directions whose singular
/// value is negligible are dropped, so the result may have fewer columns.
pub fn truncated_basis(cols: &[SparseVec], terms: usize, dim: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>) {
    let width = (dim + OVERSAMPLE).min(terms).min(cols.len());
    if width == 0 {
        return (DMatrix::zeros(terms, 0), Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DMatrix::from_fn(cols.len(), width, |_, _| rng.gen_range(-1.0..1.0));
    let mut q = orthonormalize(a_times(cols, terms, &omega));
    for _ in 0..POWER_ITERATIONS {
        let z = orthonormalize(at_times(cols, &q));
        q = orthonormalize(a_times(cols, terms, &z));
    }
    let small = at_times(cols, &q).transpose();
    let svd = small.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let top = order.first().map_or(0.0, |&i| svd.singular_values[i]);
    let keep: Vec<usize> =
        order.into_iter().filter(|&i| top > 0.0 && svd.singular_values[i] > top * 1e-10).take(dim).collect();
    let picked = DMatrix::from_fn(u.nrows(), keep.len(), |r, c| u[(r, keep[c])]);
    let values = keep.iter().map(|&i| svd.singular_values[i]).collect();
    (q * picked, values)
}

impl LsiIndex {
    /// Fits on the TF-IDF matrix of `vsm`. `dim` is capped at the matrix rank.
    pub fn fit(vsm: &VsmIndex, dim: usize, seed: u64) -> Self {
        Self::from_columns(vsm.space.clone(), vsm.ids.clone(), &vsm.vectors, dim, seed)
    }

    pub(crate) fn from_columns(space: TermSpace, ids: Vec<u64>, cols: &[SparseVec], dim: usize, seed: u64) -> Self {
        let (basis, singular_values) = truncated_basis(cols, space.len(), dim, seed);
        let docs = cols.iter().map(|c| project(&basis, c)).collect();
        Self { space, ids, basis, singular_values, docs }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn project_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> DVector<f64> {
        project(&self.basis, &self.space.tfidf(tokens))
    }

    pub fn rank<S: AsRef<str>>(&self, query: &[S], exclude: Option<u64>) -> Vec<(u64, f64)> {
        self.rank_projected(&self.project_tokens(query), exclude)
    }

    pub(crate) fn rank_projected(&self, q: &DVector<f64>, exclude: Option<u64>) -> Vec<(u64, f64)> {
        let qn = q.norm();
        let mut hits: Vec<(u64, f64)> = self
            .ids
            .iter()
            .zip(&self.docs)
            .filter(|(id, _)| Some(**id) != exclude)
            .map(|(id, d)| (*id, cosine(q.dot(d), qn, d.norm())))
            .collect();
        sort_ranking(&mut hits);
        hits
    }

    pub fn nearest<S: AsRef<str>>(&self, query: &[S], exclude: Option<u64>) -> Option<(u64, f64)> {
        self.rank(query, exclude).into_iter().next()
    }
}
