use std::cmp::Ordering;

/// A left-to-right model that scores next tokens given a decoder state.
pub trait StepModel {
    type State: Clone;

    fn vocab_size(&self) -> usize;

    /// For each `(state, previous token)` row: log-probabilities over the
    /// vocabulary and the successor state.
    fn step(&mut self, states: &[Self::State], prev: &[usize]) -> (Vec<Vec<f64>>, Vec<Self::State>);
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub beam: usize,
    /// Content tokens allowed before `eos` is forced.
    pub max_len: usize,
    pub bos: usize,
    pub eos: usize,
    /// Token ids that are never emitted.
    pub banned: Vec<usize>,
}

/// A finished search result without `bos`/`eos`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub tokens: Vec<usize>,
    /// Cumulative log-probability, including the closing `eos`.
    pub score: f64,
}

struct Live<S> {
    tokens: Vec<usize>,
    score: f64,
    state: S,
}

fn better(a: (f64, &[usize]), b: (f64, &[usize])) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1))
}

/// Beam search with cumulative log-probability scores and no length
/// normalization. Each step expands every live hypothesis over the allowed
/// vocabulary and keeps the best `beam` candidates (score descending, token
/// sequence ascending on ties); candidates that end in `eos` are final. The
/// search stops once the best final score is at least the best live score,
/// since extending a hypothesis can only lower it.
pub fn beam_search<M: StepModel>(model: &mut M, init: M::State, cfg: &SearchConfig) -> Hypothesis {
    assert!(cfg.beam >= 1, "beam size must be at least 1");
    let vocab = model.vocab_size();
    let allowed: Vec<usize> = (0..vocab).filter(|t| *t != cfg.bos && !cfg.banned.contains(t)).collect();
    let mut live = vec![Live { tokens: Vec::new(), score: 0.0, state: init }];
    let mut finished: Vec<Hypothesis> = Vec::new();

    for step in 0..=cfg.max_len {
        let states: Vec<M::State> = live.iter().map(|h| h.state.clone()).collect();
        let prev: Vec<usize> = live.iter().map(|h| *h.tokens.last().unwrap_or(&cfg.bos)).collect();
        let (logps, next_states) = model.step(&states, &prev);

        let mut cands: Vec<(f64, Vec<usize>, usize)> = Vec::new();
        for (parent, h) in live.iter().enumerate() {
            for &tok in &allowed {
                if step == cfg.max_len && tok != cfg.eos {
                    continue;
                }
                let mut tokens = h.tokens.clone();
                tokens.push(tok);
                cands.push((h.score + logps[parent][tok], tokens, parent));
            }
        }
        cands.sort_by(|a, b| better((a.0, &a.1), (b.0, &b.1)));
        cands.truncate(cfg.beam);

        let mut next = Vec::new();
        for (score, mut tokens, parent) in cands {
            if tokens.last() == Some(&cfg.eos) {
                tokens.pop();
                finished.push(Hypothesis { tokens, score });
            } else {
                next.push(Live { tokens, score, state: next_states[parent].clone() });
            }
        }
        live = next;
        let best_final = finished.iter().map(|h| h.score).fold(f64::NEG_INFINITY, f64::max);
        match live.first() {
            None => break,
            Some(top) if best_final >= top.score => break,
            _ => {}
        }
    }
    finished.sort_by(|a, b| better((a.score, &a.tokens), (b.score, &b.tokens)));
    finished.into_iter().next().unwrap_or(Hypothesis { tokens: Vec::new(), score: f64::NEG_INFINITY })
}

/// Picks the most probable allowed token at each step (lowest id on ties)
/// until `eos` or the length cap.
pub fn greedy_search<M: StepModel>(model: &mut M, init: M::State, cfg: &SearchConfig) -> Hypothesis {
    let vocab = model.vocab_size();
    let mut state = init;
    let mut tokens = Vec::new();
    let mut score = 0.0;
    loop {
        let prev = *tokens.last().unwrap_or(&cfg.bos);
        let (logps, mut states) = model.step(std::slice::from_ref(&state), &[prev]);
        let row = &logps[0];
        let pick = if tokens.len() == cfg.max_len {
            cfg.eos
        } else {
            (0..vocab)
                .filter(|t| *t != cfg.bos && !cfg.banned.contains(t))
                .fold(None, |best: Option<usize>, t| match best {
                    Some(b) if row[b] >= row[t] => Some(b),
                    _ => Some(t),
                })
                .expect("some token allowed")
        };
        score += row[pick];
        if pick == cfg.eos {
            return Hypothesis { tokens, score };
        }
        tokens.push(pick);
        state = states.swap_remove(0);
    }
}
