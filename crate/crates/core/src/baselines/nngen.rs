use super::vsm::{cosine, dot, norm, sort_ranking, SparseVec, TermSpace};
use crate::eval::sentence_bleu;

pub const DEFAULT_NEIGHBORS: usize = 5;

/// Nearest-neighbor comment selection: shortlist by bag-of-words cosine,
/// then keep the neighbor whose code is closest to the query by BLEU.
#[derive(Debug, Clone)]
pub struct NnGen {
    space: TermSpace,
    ids: Vec<u64>,
    code: Vec<Vec<String>>,
    vectors: Vec<SparseVec>,
    norms: Vec<f64>,
}

impl NnGen {
    pub fn build<S: AsRef<str>>(docs: &[(u64, &[S])]) -> Self {
        let tokens: Vec<&[S]> = docs.iter().map(|d| d.1).collect();
        let space = TermSpace::build(&tokens);
        let vectors: Vec<SparseVec> = tokens.iter().map(|t| space.counts(t)).collect();
        Self {
            norms: vectors.iter().map(|v| norm(v)).collect(),
            ids: docs.iter().map(|d| d.0).collect(),
            code: tokens.iter().map(|t| t.iter().map(|s| s.as_ref().to_string()).collect()).collect(),
            vectors,
            space,
        }
    }

    /// Documents by raw-count cosine, best first.
    pub fn rank<S: AsRef<str>>(&self, query: &[S], exclude: Option<u64>) -> Vec<(u64, f64)> {
        let q = self.space.counts(query);
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

    /// The chosen neighbor's id and its BLEU against the query code.
    pub fn select<S: AsRef<str>>(&self, query: &[S], k: usize, exclude: Option<u64>) -> Option<(u64, f64)> {
        let position = |id: u64| self.ids.iter().position(|&d| d == id).expect("ranked id is indexed");
        let mut best: Option<(u64, f64)> = None;
        for (id, _) in self.rank(query, exclude).into_iter().take(k.max(1)) {
            let bleu = sentence_bleu(&self.code[position(id)], query);
            let better = match best {
                None => true,
                Some((bid, bb)) => bleu > bb || (bleu == bb && id < bid),
            };
            if better {
                best = Some((id, bleu));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn build(docs: &[Vec<String>]) -> NnGen {
        let pairs: Vec<(u64, &[String])> = docs.iter().enumerate().map(|(i, d)| (i as u64 + 1, d.as_slice())).collect();
        NnGen::build(&pairs)
    }

    #[test]
    fn duplicate_is_selected_with_full_bleu() {
        let docs: Vec<Vec<String>> =
            ["get name return name", "set name value", "get id return id x"].iter().map(|s| toks(s)).collect();
        let n = build(&docs);
        let (id, bleu) = n.select(&toks("get id return id x"), 5, None).unwrap();
        assert_eq!(id, 3);
        assert!((bleu - 100.0).abs() < 1e-9);
    }

    #[test]
    fn bleu_can_overrule_cosine() {
        // Same bag of words as the query but scrambled, versus a partial
        // match in the right order.
        let docs: Vec<Vec<String>> = ["d c b a", "a b c d e"].iter().map(|s| toks(s)).collect();
        let n = build(&docs);
        let q = toks("a b c d");
        assert_eq!(n.rank(&q, None)[0].0, 1);
        assert_eq!(n.select(&q, 1, None).unwrap().0, 1);
        assert_eq!(n.select(&q, 2, None).unwrap().0, 2);
        assert_eq!(n.select(&q, 100, None).unwrap().0, 2);
    }

    fn corpus() -> impl Strategy<Value = Vec<Vec<String>>> {
        prop::collection::vec(prop::collection::vec(0u8..6, 1..6), 1..10)
            .prop_map(|docs| docs.into_iter().map(|d| d.into_iter().map(|t| format!("w{t}")).collect()).collect())
    }

    proptest! {
        #[test]
        fn one_neighbor_is_the_cosine_nearest(docs in corpus(), query in prop::collection::vec(0u8..8, 0..6)) {
            let n = build(&docs);
            let q: Vec<String> = query.into_iter().map(|t| format!("w{t}")).collect();
            prop_assert_eq!(n.select(&q, 1, None).map(|h| h.0), n.rank(&q, None).first().map(|h| h.0));
        }

        #[test]
        fn large_k_considers_every_doc(docs in corpus(), query in prop::collection::vec(0u8..8, 0..6)) {
            let n = build(&docs);
            let q: Vec<String> = query.into_iter().map(|t| format!("w{t}")).collect();
            let mut oracle: Option<(u64, f64)> = None;
            for (i, d) in docs.iter().enumerate() {
                let b = sentence_bleu(d, &q);
                if oracle.map_or(true, |(_, ob)| b > ob) {
                    oracle = Some((i as u64 + 1, b));
                }
            }
            prop_assert_eq!(n.select(&q, docs.len() + 3, None).map(|h| h.0), oracle.map(|h| h.0));
        }
    }
}
