use std::collections::{BTreeMap, HashMap};

/// Sparse vector as `(term index, weight)` pairs sorted by term index.
pub type SparseVec = Vec<(usize, f64)>;

pub(crate) fn dot(a: &SparseVec, b: &SparseVec) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

pub(crate) fn norm(v: &[(usize, f64)]) -> f64 {
    v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
}

/// Cosine similarity; 0 when either vector is zero.
pub(crate) fn cosine(dot: f64, na: f64, nb: f64) -> f64 {
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Cosines closer than 1e-9 count as tied, so rounding noise between
/// equivalent computations cannot reorder documents.
pub(crate) fn tie_key(score: f64) -> i64 {
    (score * 1e9).round() as i64
}

/// Sorts `(doc id, score)` by score descending, ties by ascending id.
pub(crate) fn sort_ranking(hits: &mut [(u64, f64)]) {
    hits.sort_by(|a, b| tie_key(b.1).cmp(&tie_key(a.1)).then(a.0.cmp(&b.0)));
}

/// Term dictionary over training documents with document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TermSpace {
    index: HashMap<String, usize>,
    terms: Vec<String>,
    df: Vec<u32>,
    docs: usize,
}

impl TermSpace {
    pub fn build<S: AsRef<str>>(docs: &[&[S]]) -> Self {
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for d in docs {
            let mut seen: Vec<&str> = d.iter().map(AsRef::as_ref).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_default() += 1;
            }
        }
        let terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
        Self {
            index: terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect(),
            df: df.into_values().collect(),
            terms,
            docs: docs.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Raw term counts; out-of-vocabulary tokens are dropped.
    pub fn counts<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVec {
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for t in tokens {
            if let Some(&i) = self.index.get(t.as_ref()) {
                *tf.entry(i).or_default() += 1.0;
            }
        }
        tf.into_iter().collect()
    }

    /// `tf * ln(N / df)` weights.
    pub fn tfidf<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVec {
        let n = self.docs as f64;
        self.counts(tokens).into_iter().map(|(i, tf)| (i, tf * (n / f64::from(self.df[i])).ln())).collect()
    }
}

/// Nearest-neighbor retrieval by TF-IDF cosine.
#[derive(Debug, Clone)]
pub struct VsmIndex {
    pub(crate) space: TermSpace,
    pub(crate) ids: Vec<u64>,
    pub(crate) vectors: Vec<SparseVec>,
    norms: Vec<f64>,
}

impl VsmIndex {
    pub fn build<S: AsRef<str>>(docs: &[(u64, &[S])]) -> Self {
        let tokens: Vec<&[S]> = docs.iter().map(|d| d.1).collect();
        let space = TermSpace::build(&tokens);
        let vectors: Vec<SparseVec> = tokens.iter().map(|t| space.tfidf(t)).collect();
        Self {
            norms: vectors.iter().map(|v| norm(v)).collect(),
            ids: docs.iter().map(|d| d.0).collect(),
            vectors,
            space,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Every document (except `exclude`) by cosine, best first.
    pub fn rank<S: AsRef<str>>(&self, query: &[S], exclude: Option<u64>) -> Vec<(u64, f64)> {
        let q = self.space.tfidf(query);
        let qn = norm(&q);
        let mut hits: Vec<(u64, f64)> = self
            .ids
            .iter()
            .zip(&self.vectors)
            .zip(&self.norms)
            .filter(|((id, _), _)| Some(**id) != exclude)
            .map(|((id, v), n)| (*id, cosine(dot(&q, v), qn, *n)))
            .collect();
        sort_ranking(&mut hits);
        hits
    }

    pub fn nearest<S: AsRef<str>>(&self, query: &[S], exclude: Option<u64>) -> Option<(u64, f64)> {
        self.rank(query, exclude).into_iter().next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn index(docs: &[&str]) -> VsmIndex {
        let owned: Vec<Vec<String>> = docs.iter().map(|d| toks(d)).collect();
        let pairs: Vec<(u64, &[String])> =
            owned.iter().enumerate().map(|(i, d)| (i as u64 * 10, d.as_slice())).collect();
        VsmIndex::build(&pairs)
    }

    #[test]
    fn tfidf_weights() {
        let idx = index(&["a b", "a c c", "d"]);
        let v = idx.space.tfidf(&toks("a c c zzz"));
        // a: df 2 -> ln(3/2); c: tf 2, df 1 -> 2 ln 3
        assert_eq!(v.len(), 2);
        assert!((v[0].1 - (1.5f64).ln()).abs() < 1e-15);
        assert!((v[1].1 - 2.0 * 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn identical_wins_and_orthogonal_ties_to_lowest_id() {
        let idx = index(&["a b", "c d", "a c"]);
        let best = idx.nearest(&toks("c d"), None).unwrap();
        assert_eq!(best.0, 10);
        assert!((best.1 - 1.0).abs() < 1e-12);
        let r = idx.rank(&toks("zzz"), None);
        assert!(r.iter().all(|h| h.1 == 0.0));
        assert_eq!(r[0].0, 0);
        assert_eq!(idx.nearest(&toks("zzz"), Some(0)).unwrap().0, 10);
    }
}
