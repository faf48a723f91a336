use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::RetrievalError;

/// One entry of a postings list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    /// Dense internal document number (position in ascending id order).
    pub doc: u32,
    pub tf: u32,
}

/// BM25 free parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

/// Inverted index over whitespace-tokenized documents.
///
/// Documents are stored in ascending external id order so that postings,
/// which are sorted by internal number, are also sorted by external id.
#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    pub(crate) doc_ids: Vec<u64>,
    pub(crate) doc_len: Vec<u32>,
    pub(crate) postings: BTreeMap<String, Vec<Posting>>,
    pub(crate) avg_len: f64,
    pub(crate) params: Bm25Params,
}

/// A ranked hit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalResult {
    pub doc_id: u64,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

impl Index {
    /// Builds an index from `(id, tokens)` pairs.
    pub fn build<'a, I, S>(docs: I) -> Result<Self, RetrievalError>
    where
        I: IntoIterator<Item = (u64, &'a [S])>,
        S: AsRef<str> + 'a,
    {
        let mut docs: Vec<(u64, &'a [S])> = docs.into_iter().collect();
        if docs.is_empty() {
            return Err(RetrievalError::EmptyCorpus);
        }
        docs.sort_by_key(|(id, _)| *id);
        if let Some(w) = docs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(RetrievalError::DuplicateDoc(w[0].0));
        }

        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        let mut doc_ids = Vec::with_capacity(docs.len());
        let mut doc_len = Vec::with_capacity(docs.len());
        for (internal, (id, tokens)) in docs.iter().enumerate() {
            doc_ids.push(*id);
            doc_len.push(tokens.len() as u32);
            let mut tf: BTreeMap<&str, u32> = BTreeMap::new();
            for t in tokens.iter() {
                *tf.entry(t.as_ref()).or_default() += 1;
            }
            for (term, count) in tf {
                postings.entry(term.to_string()).or_default().push(Posting { doc: internal as u32, tf: count });
            }
        }
        Ok(Self::from_parts(doc_ids, doc_len, postings, Bm25Params::default()))
    }

    pub(crate) fn from_parts(
        doc_ids: Vec<u64>,
        doc_len: Vec<u32>,
        postings: BTreeMap<String, Vec<Posting>>,
        params: Bm25Params,
    ) -> Self {
        let total: u64 = doc_len.iter().map(|&l| u64::from(l)).sum();
        let avg_len = total as f64 / doc_len.len().max(1) as f64;
        Self { doc_ids, doc_len, postings, avg_len, params }
    }

    pub fn with_params(mut self, params: Bm25Params) -> Self {
        self.params = params;
        self
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avg_len(&self) -> f64 {
        self.avg_len
    }

    pub fn doc_ids(&self) -> &[u64] {
        &self.doc_ids
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    fn internal(&self, doc_id: u64) -> Option<usize> {
        self.doc_ids.binary_search(&doc_id).ok()
    }

    pub fn doc_len(&self, doc_id: u64) -> Option<u32> {
        self.internal(doc_id).map(|i| self.doc_len[i])
    }

    pub fn df(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn tf(&self, term: &str, doc_id: u64) -> u32 {
        let (Some(list), Some(internal)) = (self.postings.get(term), self.internal(doc_id)) else {
            return 0;
        };
        list.binary_search_by_key(&(internal as u32), |p| p.doc).map_or(0, |i| list[i].tf)
    }

    /// `(doc id, tf)` pairs for a term, ascending by doc id.
    pub fn postings(&self, term: &str) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.postings.get(term).into_iter().flatten().map(|p| (self.doc_ids[p.doc as usize], p.tf))
    }

    fn idf(&self, df: usize) -> f64 {
        let n = self.doc_count() as f64;
        let df = df as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    fn term_weight(&self, idf: f64, tf: u32, dl: u32) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let tf = f64::from(tf);
        let len_ratio = if self.avg_len > 0.0 { f64::from(dl) / self.avg_len } else { 1.0 };
        idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len_ratio))
    }

    /// BM25 of one document; repeated query terms count once and the
    /// summation runs over distinct terms in lexicographic order.
    pub fn bm25_score<S: AsRef<str>>(&self, query: &[S], doc_id: u64) -> Result<f64, RetrievalError> {
        let internal = self.internal(doc_id).ok_or(RetrievalError::UnknownDoc(doc_id))?;
        let dl = self.doc_len[internal];
        let mut score = 0.0;
        for term in distinct(query) {
            let Some(list) = self.postings.get(term) else { continue };
            if let Ok(i) = list.binary_search_by_key(&(internal as u32), |p| p.doc) {
                score += self.term_weight(self.idf(list.len()), list[i].tf, dl);
            }
        }
        Ok(score)
    }

    /// Top-`k` documents by BM25, ties broken by ascending doc id.
    ///
    /// Documents sharing no term with the query score 0 and still rank
    /// (after every matching document), so `k = N` yields every document.
    pub fn retrieve<S: AsRef<str>>(&self, query: &[S], k: usize, exclude: Option<u64>) -> Vec<RetrievalResult> {
        let mut acc: HashMap<u32, f64> = HashMap::new();
        for term in distinct(query) {
            let Some(list) = self.postings.get(term) else { continue };
            let idf = self.idf(list.len());
            for p in list {
                let w = self.term_weight(idf, p.tf, self.doc_len[p.doc as usize]);
                *acc.entry(p.doc).or_insert(0.0) += w;
            }
        }
        let excluded = exclude.and_then(|id| self.internal(id)).map(|i| i as u32);
        let mut hits: Vec<(u32, f64)> = acc.into_iter().filter(|(d, _)| Some(*d) != excluded).collect();
        hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        hits.truncate(k);

        if hits.len() < k {
            let matched: BTreeSet<u32> = hits.iter().map(|h| h.0).collect();
            let fill = (0..self.doc_count() as u32)
                .filter(|d| Some(*d) != excluded && !matched.contains(d))
                .take(k - hits.len())
                .map(|d| (d, 0.0))
                .collect::<Vec<_>>();
            hits.extend(fill);
        }
        hits.into_iter()
            .enumerate()
            .map(|(i, (d, score))| RetrievalResult { doc_id: self.doc_ids[d as usize], score, rank: i + 1 })
            .collect()
    }
}

fn distinct<S: AsRef<str>>(query: &[S]) -> BTreeSet<&str> {
    query.iter().map(AsRef::as_ref).collect()
}
