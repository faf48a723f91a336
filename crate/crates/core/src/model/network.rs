//! Parameters and forward computation of the refine network.
//!
//! Four bidirectional LSTM encoders read the input code, its SBT, the
//! retrieved similar code and the exemplar comment. A sigmoid gate over the
//! code and similar-code summaries scores how far the exemplar can be
//! trusted; it blends the decoder's initial state and, at every step, the
//! attention context between the exemplar side and an affine fusion of the
//! code and SBT sides.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::vocab::PAD;
use super::{ModelConfig, ModelError};
use crate::autodiff::{ParamId, ParamStore, Tape, Tensor, Var};

/// The four encoded input sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Code,
    Sbt,
    SimilarCode,
    Exemplar,
}

impl Stream {
    pub const ALL: [Stream; 4] = [Stream::Code, Stream::Sbt, Stream::SimilarCode, Stream::Exemplar];

    pub fn name(self) -> &'static str {
        match self {
            Stream::Code => "code",
            Stream::Sbt => "sbt",
            Stream::SimilarCode => "similar",
            Stream::Exemplar => "exemplar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LstmIds {
    w_in: ParamId,
    w_hid: ParamId,
    bias: ParamId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EncoderIds {
    embed: ParamId,
    fwd: LstmIds,
    bwd: LstmIds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AttnIds {
    w_query: ParamId,
    b_query: ParamId,
    w_key: ParamId,
    score: ParamId,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ParamIds {
    encoders: [EncoderIds; 4],
    gate: ParamId,
    fuse_w: ParamId,
    fuse_b: ParamId,
    fuse_ctx_w: ParamId,
    fuse_ctx_b: ParamId,
    dec_embed: ParamId,
    dec: LstmIds,
    attn: [AttnIds; 3],
    out_w: ParamId,
    out_b: ParamId,
}

/// Expected `(name, rows, cols)` of every parameter, in registration order.
pub(crate) fn layout(cfg: &ModelConfig, vocab_sizes: [usize; 4]) -> Vec<(String, usize, usize)> {
    let (e, h, d, a) = (cfg.embed_dim, cfg.hidden_dim, cfg.decoder_dim(), cfg.attention_dim);
    let mut out = Vec::new();
    for (stream, v) in Stream::ALL.iter().zip(vocab_sizes) {
        let p = format!("enc.{}", stream.name());
        out.push((format!("{p}.embed"), v, e));
        for dir in ["fwd", "bwd"] {
            out.push((format!("{p}.{dir}.w_in"), e, 4 * h));
            out.push((format!("{p}.{dir}.w_hid"), h, 4 * h));
            out.push((format!("{p}.{dir}.bias"), 1, 4 * h));
        }
    }
    out.push(("gate.w".into(), 2 * d, 1));
    out.push(("fuse.w".into(), 2 * d, d));
    out.push(("fuse.b".into(), 1, d));
    if !cfg.tie_fusion {
        out.push(("fuse_ctx.w".into(), 2 * d, d));
        out.push(("fuse_ctx.b".into(), 1, d));
    }
    out.push(("dec.embed".into(), vocab_sizes[3], e));
    out.push(("dec.w_in".into(), e, 4 * d));
    out.push(("dec.w_hid".into(), d, 4 * d));
    out.push(("dec.bias".into(), 1, 4 * d));
    for s in ["code", "sbt", "exemplar"] {
        out.push((format!("attn.{s}.w_query"), d, a));
        out.push((format!("attn.{s}.b_query"), 1, a));
        out.push((format!("attn.{s}.w_key"), d, a));
        out.push((format!("attn.{s}.score"), 1, a));
    }
    out.push(("out.w".into(), e + 2 * d, vocab_sizes[3]));
    out.push(("out.b".into(), 1, vocab_sizes[3]));
    out
}

impl ParamIds {
    /// Resolves every parameter by name; `None` if any is missing.
    pub(crate) fn resolve(store: &ParamStore, tie_fusion: bool) -> Option<Self> {
        let id = |n: &str| store.id(n);
        let lstm = |p: &str| -> Option<LstmIds> {
            Some(LstmIds {
                w_in: id(&format!("{p}.w_in"))?,
                w_hid: id(&format!("{p}.w_hid"))?,
                bias: id(&format!("{p}.bias"))?,
            })
        };
        let enc = |s: Stream| -> Option<EncoderIds> {
            let p = format!("enc.{}", s.name());
            Some(EncoderIds {
                embed: id(&format!("{p}.embed"))?,
                fwd: lstm(&format!("{p}.fwd"))?,
                bwd: lstm(&format!("{p}.bwd"))?,
            })
        };
        let attn = |s: &str| -> Option<AttnIds> {
            Some(AttnIds {
                w_query: id(&format!("attn.{s}.w_query"))?,
                b_query: id(&format!("attn.{s}.b_query"))?,
                w_key: id(&format!("attn.{s}.w_key"))?,
                score: id(&format!("attn.{s}.score"))?,
            })
        };
        let fuse_w = id("fuse.w")?;
        let fuse_b = id("fuse.b")?;
        let (fuse_ctx_w, fuse_ctx_b) =
            if tie_fusion { (fuse_w, fuse_b) } else { (id("fuse_ctx.w")?, id("fuse_ctx.b")?) };
        Some(Self {
            encoders: [enc(Stream::Code)?, enc(Stream::Sbt)?, enc(Stream::SimilarCode)?, enc(Stream::Exemplar)?],
            gate: id("gate.w")?,
            fuse_w,
            fuse_b,
            fuse_ctx_w,
            fuse_ctx_b,
            dec_embed: id("dec.embed")?,
            dec: LstmIds { w_in: id("dec.w_in")?, w_hid: id("dec.w_hid")?, bias: id("dec.bias")? },
            attn: [attn("code")?, attn("sbt")?, attn("exemplar")?],
            out_w: id("out.w")?,
            out_b: id("out.b")?,
        })
    }

    pub(crate) fn encoder_params(&self, stream: Stream) -> Vec<ParamId> {
        let e = self.encoders[stream as usize];
        vec![e.embed, e.fwd.w_in, e.fwd.w_hid, e.fwd.bias, e.bwd.w_in, e.bwd.w_hid, e.bwd.bias]
    }
}

/// Dropout with externally seeded masks. Without a generator it is the
/// identity, which is how evaluation runs.
pub struct Dropout<'r> {
    rate: f64,
    rng: Option<&'r mut ChaCha8Rng>,
}

impl<'r> Dropout<'r> {
    pub fn off() -> Self {
        Self { rate: 0.0, rng: None }
    }

    pub fn new(rate: f64, rng: &'r mut ChaCha8Rng) -> Self {
        Self { rate, rng: Some(rng) }
    }

    fn apply(&mut self, tape: &mut Tape, v: Var) -> Var {
        let Some(rng) = self.rng.as_deref_mut() else { return v };
        if self.rate == 0.0 {
            return v;
        }
        let (r, c) = tape.value(v).shape();
        let keep = 1.0 - self.rate;
        let mask = (0..r * c).map(|_| if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 }).collect();
        tape.mul_const(v, Tensor::new(r, c, mask))
    }
}

/// Per-forward handles to the dense parameters.
struct Bound {
    enc: [[(Var, Var, Var); 2]; 4],
    gate: Var,
    fuse_w: Var,
    fuse_b: Var,
    fuse_ctx_w: Var,
    fuse_ctx_b: Var,
    dec: (Var, Var, Var),
    attn: [(Var, Var, Var, Var); 3],
    out_w: Var,
    out_b: Var,
}

/// An attended stream: per-position states and their precomputed keys.
#[derive(Clone)]
struct Memory {
    states: Var,
    keys: Var,
    mask: Tensor,
}

impl Memory {
    fn select(&self, tape: &mut Tape, rows: &[usize]) -> Self {
        let mut mask = Tensor::zeros(rows.len(), self.mask.cols);
        for (i, &r) in rows.iter().enumerate() {
            mask.row_mut(i).copy_from_slice(self.mask.row(r));
        }
        Self { states: tape.gather_rows(self.states, rows), keys: tape.gather_rows(self.keys, rows), mask }
    }
}

pub(crate) struct Encoded {
    memories: [Memory; 3],
    sim: Var,
    h0: Var,
    /// `W_c [h^x; h^t] + b_c`, the code-side branch of the initial state.
    h_code: Var,
    h_exemplar: Var,
}

impl Encoded {
    fn select(&self, tape: &mut Tape, rows: &[usize]) -> Self {
        Self {
            memories: [
                self.memories[0].select(tape, rows),
                self.memories[1].select(tape, rows),
                self.memories[2].select(tape, rows),
            ],
            sim: tape.gather_rows(self.sim, rows),
            h0: tape.gather_rows(self.h0, rows),
            h_code: tape.gather_rows(self.h_code, rows),
            h_exemplar: tape.gather_rows(self.h_exemplar, rows),
        }
    }
}

pub(crate) struct StepOut {
    pub h: Var,
    pub cell: Var,
    pub logits: Var,
    pub context: Var,
    pub code_context: Var,
    pub exemplar_context: Var,
    pub attention: [Var; 3],
}

/// Model inputs for one sample, already mapped to ids and truncated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub id: u64,
    pub code: Vec<usize>,
    pub sbt: Vec<usize>,
    pub similar_code: Vec<usize>,
    pub exemplar: Vec<usize>,
    /// Comment content ids, without `<s>`/`</s>`.
    pub target: Vec<usize>,
}

impl Example {
    fn stream(&self, s: Stream) -> &[usize] {
        match s {
            Stream::Code => &self.code,
            Stream::Sbt => &self.sbt,
            Stream::SimilarCode => &self.similar_code,
            Stream::Exemplar => &self.exemplar,
        }
    }
}

pub(crate) struct Network<'a> {
    pub cfg: &'a ModelConfig,
    pub store: &'a ParamStore,
    pub ids: &'a ParamIds,
}

impl<'a> Network<'a> {
    fn bind(&self, tape: &mut Tape) -> Bound {
        let s = self.store;
        let mut p = |id: ParamId| tape.param(s, id);
        let lstm = |p: &mut dyn FnMut(ParamId) -> Var, l: LstmIds| (p(l.w_in), p(l.w_hid), p(l.bias));
        let enc = self.ids.encoders.map(|e| [lstm(&mut p, e.fwd), lstm(&mut p, e.bwd)]);
        let attn = self.ids.attn.map(|a| (p(a.w_query), p(a.b_query), p(a.w_key), p(a.score)));
        let tied = self.cfg.tie_fusion;
        let fuse_w = p(self.ids.fuse_w);
        let fuse_b = p(self.ids.fuse_b);
        let (fuse_ctx_w, fuse_ctx_b) =
            if tied { (fuse_w, fuse_b) } else { (p(self.ids.fuse_ctx_w), p(self.ids.fuse_ctx_b)) };
        Bound {
            enc,
            gate: p(self.ids.gate),
            fuse_w,
            fuse_b,
            fuse_ctx_w,
            fuse_ctx_b,
            dec: lstm(&mut p, self.ids.dec),
            attn,
            out_w: p(self.ids.out_w),
            out_b: p(self.ids.out_b),
        }
    }

    /// Runs one direction; returns per-position outputs and the final state.
    #[allow(clippy::too_many_arguments)]
    fn run_direction(
        &self,
        tape: &mut Tape,
        x_proj: Var,
        w_hid: Var,
        lens: &[usize],
        steps: usize,
        hidden: usize,
        reverse: bool,
    ) -> (Vec<Var>, Var) {
        let b = lens.len();
        let mut h = tape.leaf(Tensor::zeros(b, hidden));
        let mut c = tape.leaf(Tensor::zeros(b, hidden));
        let mut outs = vec![h; steps];
        let order: Vec<usize> = if reverse { (0..steps).rev().collect() } else { (0..steps).collect() };
        for t in order {
            let rows: Vec<usize> = (t * b..(t + 1) * b).collect();
            let xt = tape.gather_rows(x_proj, &rows);
            let hh = tape.matmul(h, w_hid);
            let pre = tape.add(xt, hh);
            let hc = tape.lstm_cell(pre, c);
            let hn = tape.slice_cols(hc, 0, hidden);
            let cn = tape.slice_cols(hc, hidden, hidden);
            if lens.iter().all(|&n| t < n) {
                h = hn;
                c = cn;
            } else {
                let m = tape.leaf(Tensor::column(lens.iter().map(|&n| if t < n { 1.0 } else { 0.0 }).collect()));
                h = tape.blend(m, hn, h);
                c = tape.blend(m, cn, c);
            }
            outs[t] = h;
        }
        (outs, h)
    }

    /// Bidirectional encoding of one stream: per-position `[fwd; bwd]`
    /// states and the final state `[fwd_T; bwd_1]`.
    fn encode_stream(
        &self,
        tape: &mut Tape,
        bound: &Bound,
        stream: Stream,
        seqs: &[&[usize]],
        dropout: &mut Dropout,
    ) -> Result<(Vec<Var>, Var, Tensor), ModelError> {
        if let Some(i) = seqs.iter().position(|s| s.is_empty()) {
            return Err(ModelError::EmptySequence { stream: stream.name(), row: i });
        }
        let b = seqs.len();
        let lens: Vec<usize> = seqs.iter().map(|s| s.len().min(self.cfg.max_src_len)).collect();
        let steps = *lens.iter().max().expect("non-empty batch");
        let mut ids = Vec::with_capacity(steps * b);
        for t in 0..steps {
            for (s, &n) in seqs.iter().zip(&lens) {
                ids.push(if t < n { s[t] } else { PAD });
            }
        }
        let e = self.ids.encoders[stream as usize];
        let emb = tape.embed(self.store, e.embed, &ids);
        let emb = dropout.apply(tape, emb);
        let h = self.cfg.hidden_dim;
        let mut finals = Vec::new();
        let mut per_dir = Vec::new();
        for (dir, reverse) in [(0, false), (1, true)] {
            let (w_in, w_hid, bias) = bound.enc[stream as usize][dir];
            let proj = tape.matmul(emb, w_in);
            let proj = tape.add_row(proj, bias);
            let (outs, last) = self.run_direction(tape, proj, w_hid, &lens, steps, h, reverse);
            per_dir.push(outs);
            finals.push(last);
        }
        let states = (0..steps).map(|t| tape.concat(&[per_dir[0][t], per_dir[1][t]])).collect();
        let final_state = tape.concat(&finals);
        let mut mask = Tensor::zeros(b, steps);
        for (r, &n) in lens.iter().enumerate() {
            mask.row_mut(r)[..n].fill(1.0);
        }
        Ok((states, final_state, mask))
    }

    fn memory(&self, tape: &mut Tape, bound: &Bound, which: usize, states: &[Var], mask: Tensor) -> Memory {
        let w_key = bound.attn[which].2;
        let keys: Vec<Var> = states.iter().map(|&s| tape.matmul(s, w_key)).collect();
        Memory { states: tape.concat(states), keys: tape.concat(&keys), mask }
    }

    fn encode(
        &self,
        tape: &mut Tape,
        bound: &Bound,
        batch: &[&Example],
        dropout: &mut Dropout,
        sim_override: Option<f64>,
    ) -> Result<Encoded, ModelError> {
        let mut enc = Vec::new();
        for s in Stream::ALL {
            let seqs: Vec<&[usize]> = batch.iter().map(|ex| ex.stream(s)).collect();
            enc.push(self.encode_stream(tape, bound, s, &seqs, dropout)?);
        }
        let [x, t, s, r]: [_; 4] = enc.try_into().expect("four streams");
        let sim = match sim_override {
            Some(v) => tape.leaf(Tensor::column(vec![v; batch.len()])),
            None => {
                let joined = tape.concat(&[x.1, s.1]);
                let pre = tape.matmul(joined, bound.gate);
                tape.sigmoid(pre)
            }
        };
        let joined = tape.concat(&[x.1, t.1]);
        let hc = tape.matmul(joined, bound.fuse_w);
        let h_code = tape.add_row(hc, bound.fuse_b);
        let h0 = tape.blend(sim, r.1, h_code);
        Ok(Encoded {
            memories: [
                self.memory(tape, bound, 0, &x.0, x.2),
                self.memory(tape, bound, 1, &t.0, t.2),
                self.memory(tape, bound, 2, &r.0, r.2),
            ],
            sim,
            h0,
            h_code,
            h_exemplar: r.1,
        })
    }

    fn attend(&self, tape: &mut Tape, bound: &Bound, which: usize, mem: &Memory, h_prev: Var) -> (Var, Var) {
        let (w_q, b_q, _, score) = bound.attn[which];
        let q = tape.matmul(h_prev, w_q);
        let q = tape.add_row(q, b_q);
        let s = tape.attention_scores(q, mem.keys, score);
        let alpha = tape.softmax(s, Some(mem.mask.clone()));
        let ctx = tape.weighted_sum(alpha, mem.states);
        (alpha, ctx)
    }

    #[allow(clippy::too_many_arguments)]
    fn decode_step(
        &self,
        tape: &mut Tape,
        bound: &Bound,
        enc: &Encoded,
        h_prev: Var,
        cell_prev: Var,
        prev_tokens: &[usize],
        dropout: &mut Dropout,
    ) -> StepOut {
        let (ax, cx) = self.attend(tape, bound, 0, &enc.memories[0], h_prev);
        let (at, ct) = self.attend(tape, bound, 1, &enc.memories[1], h_prev);
        let (ar, cr) = self.attend(tape, bound, 2, &enc.memories[2], h_prev);
        let joined = tape.concat(&[cx, ct]);
        let fused = tape.matmul(joined, bound.fuse_ctx_w);
        let code_context = tape.add_row(fused, bound.fuse_ctx_b);
        let context = tape.blend(enc.sim, cr, code_context);

        let emb = tape.embed(self.store, self.ids.dec_embed, prev_tokens);
        let emb = dropout.apply(tape, emb);
        let (w_in, w_hid, bias) = bound.dec;
        let xi = tape.matmul(emb, w_in);
        let hh = tape.matmul(h_prev, w_hid);
        let pre = tape.add(xi, hh);
        let pre = tape.add_row(pre, bias);
        let hc = tape.lstm_cell(pre, cell_prev);
        let d = self.cfg.decoder_dim();
        let h = tape.slice_cols(hc, 0, d);
        let cell = tape.slice_cols(hc, d, d);

        let feat = tape.concat(&[emb, h, context]);
        let feat = dropout.apply(tape, feat);
        let logits = tape.matmul(feat, bound.out_w);
        let logits = tape.add_row(logits, bound.out_b);
        StepOut { h, cell, logits, context, code_context, exemplar_context: cr, attention: [ax, at, ar] }
    }

    /// Teacher-forced loss: per-sample sum of token cross-entropies over
    /// `comment + </s>`, averaged over the batch.
    pub fn loss(
        &self,
        tape: &mut Tape,
        batch: &[&Example],
        dropout: &mut Dropout,
        sim_override: Option<f64>,
    ) -> Result<Var, ModelError> {
        let bound = self.bind(tape);
        let enc = self.encode(tape, &bound, batch, dropout, sim_override)?;
        let cap = self.cfg.max_content_len();
        let seqs: Vec<Vec<usize>> = batch
            .iter()
            .map(|ex| {
                let mut s = vec![super::vocab::BOS];
                s.extend(ex.target.iter().take(cap));
                s.push(super::vocab::EOS);
                s
            })
            .collect();
        let steps = seqs.iter().map(Vec::len).max().unwrap_or(1) - 1;
        let n = batch.len() as f64;
        let mut h = enc.h0;
        let mut cell = tape.leaf(Tensor::zeros(batch.len(), self.cfg.decoder_dim()));
        let mut losses = Vec::with_capacity(steps);
        for i in 0..steps {
            let prev: Vec<usize> = seqs.iter().map(|s| s.get(i).copied().unwrap_or(PAD)).collect();
            let out = self.decode_step(tape, &bound, &enc, h, cell, &prev, dropout);
            let targets: Vec<usize> = seqs.iter().map(|s| s.get(i + 1).copied().unwrap_or(PAD)).collect();
            let weights: Vec<f64> = seqs.iter().map(|s| if i + 1 < s.len() { 1.0 / n } else { 0.0 }).collect();
            losses.push(tape.cross_entropy_weighted(out.logits, &targets, &weights)?);
            h = out.h;
            cell = out.cell;
        }
        Ok(tape.sum_scalars(&losses))
    }
}

/// Step-wise decoding of one sample for search.
pub(crate) struct Decoder<'a> {
    net: Network<'a>,
    tape: Tape,
    bound: Bound,
    enc: Encoded,
    vocab: usize,
}

pub(crate) type DecoderState = (Vec<f64>, Vec<f64>);

impl<'a> Decoder<'a> {
    pub fn new(net: Network<'a>, ex: &Example, sim_override: Option<f64>) -> Result<(Self, DecoderState), ModelError> {
        let mut tape = Tape::new();
        let bound = net.bind(&mut tape);
        let enc = net.encode(&mut tape, &bound, &[ex], &mut Dropout::off(), sim_override)?;
        let h0 = tape.value(enc.h0).data.clone();
        let cell0 = vec![0.0; h0.len()];
        let vocab = net.store.value(net.ids.out_b).cols;
        Ok((Self { net, tape, bound, enc, vocab }, (h0, cell0)))
    }
}

impl super::beam::StepModel for Decoder<'_> {
    type State = DecoderState;

    fn vocab_size(&self) -> usize {
        self.vocab
    }

    fn step(&mut self, states: &[DecoderState], prev: &[usize]) -> (Vec<Vec<f64>>, Vec<DecoderState>) {
        let n = states.len();
        let d = self.net.cfg.decoder_dim();
        let tape = &mut self.tape;
        let h = tape.leaf(Tensor::new(n, d, states.iter().flat_map(|s| s.0.iter().copied()).collect()));
        let cell = tape.leaf(Tensor::new(n, d, states.iter().flat_map(|s| s.1.iter().copied()).collect()));
        let enc = self.enc.select(tape, &vec![0; n]);
        let out = self.net.decode_step(tape, &self.bound, &enc, h, cell, prev, &mut Dropout::off());
        let logits = tape.value(out.logits);
        let hv = tape.value(out.h);
        let cv = tape.value(out.cell);
        let mut logps = Vec::with_capacity(n);
        let mut next = Vec::with_capacity(n);
        for r in 0..n {
            let row = logits.row(r);
            let lse = crate::autodiff::log_sum_exp(row);
            logps.push(row.iter().map(|x| x - lse).collect());
            next.push((hv.row(r).to_vec(), cv.row(r).to_vec()));
        }
        (logps, next)
    }
}

/// Values of the gate and the first decoder step, for inspection.
#[derive(Debug, Clone)]
pub struct FirstStep {
    pub sim: Tensor,
    pub h0: Tensor,
    pub h_code: Tensor,
    pub h_exemplar: Tensor,
    pub context: Tensor,
    pub code_context: Tensor,
    pub exemplar_context: Tensor,
    /// Attention weights over code, SBT and exemplar positions.
    pub attention: [Tensor; 3],
    pub probs: Tensor,
}

impl Network<'_> {
    pub fn first_step(&self, batch: &[&Example], sim_override: Option<f64>) -> Result<FirstStep, ModelError> {
        let mut tape = Tape::new();
        let bound = self.bind(&mut tape);
        let enc = self.encode(&mut tape, &bound, batch, &mut Dropout::off(), sim_override)?;
        let cell = tape.leaf(Tensor::zeros(batch.len(), self.cfg.decoder_dim()));
        let prev = vec![super::vocab::BOS; batch.len()];
        let out = self.decode_step(&mut tape, &bound, &enc, enc.h0, cell, &prev, &mut Dropout::off());
        let probs = tape.softmax(out.logits, None);
        let v = |x: Var| tape.value(x).clone();
        Ok(FirstStep {
            sim: v(enc.sim),
            h0: v(enc.h0),
            h_code: v(enc.h_code),
            h_exemplar: v(enc.h_exemplar),
            context: v(out.context),
            code_context: v(out.code_context),
            exemplar_context: v(out.exemplar_context),
            attention: out.attention.map(v),
            probs: v(probs),
        })
    }

    /// Per-position states and final states of one encoder.
    pub fn encode_only(&self, stream: Stream, seqs: &[&[usize]]) -> Result<(Vec<Tensor>, Tensor), ModelError> {
        let mut tape = Tape::new();
        let bound = self.bind(&mut tape);
        let (states, fin, _) = self.encode_stream(&mut tape, &bound, stream, seqs, &mut Dropout::off())?;
        Ok((states.iter().map(|&s| tape.value(s).clone()).collect(), tape.value(fin).clone()))
    }
}
