use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::autodiff::sigmoid;

fn vocab(prefix: &str, n: usize) -> Vocabulary {
    let toks: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    Vocabulary::build(std::iter::once(toks.as_slice()), n)
}

pub(crate) fn tiny_config() -> ModelConfig {
    ModelConfig {
        embed_dim: 8,
        hidden_dim: 12,
        attention_dim: 10,
        max_src_len: 6,
        max_tgt_len: 7,
        dropout: 0.0,
        batch_size: 2,
        seed: 5,
        init_range: 0.3,
        ..ModelConfig::default()
    }
}

fn tiny_model(cfg: ModelConfig) -> RefineModel {
    RefineModel::new(cfg, vocab("c", 9), vocab("t", 7), vocab("w", 8)).unwrap()
}

fn random_example(rng: &mut ChaCha8Rng, id: u64) -> Example {
    let mut seq = |lo: usize, hi: usize, len: usize| {
        (0..rng.gen_range(1..=len)).map(|_| rng.gen_range(lo..hi)).collect::<Vec<_>>()
    };
    Example {
        id,
        code: seq(1, 15, 6),
        sbt: seq(1, 13, 6),
        similar_code: seq(1, 15, 6),
        exemplar: seq(1, 14, 5),
        target: seq(6, 14, 4),
    }
}

fn examples(seed: u64, n: usize) -> Vec<Example> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| random_example(&mut rng, i as u64)).collect()
}

/// Plain-loop LSTM over one sequence, used as an oracle.
fn lstm_oracle(m: &RefineModel, prefix: &str, emb: &str, seq: &[usize]) -> Vec<Vec<f64>> {
    let p = |n: &str| m.params.value(m.params.id(&format!("{prefix}.{n}")).unwrap()).clone();
    let (w_in, w_hid, bias) = (p("w_in"), p("w_hid"), p("bias"));
    let table = m.params.value(m.params.id(emb).unwrap());
    let h = w_hid.rows;
    let mut hs = vec![0.0; h];
    let mut cs = vec![0.0; h];
    let mut out = Vec::new();
    for &tok in seq {
        let x = table.row(tok);
        let mut pre = bias.data.clone();
        for (j, pj) in pre.iter_mut().enumerate() {
            for (k, xk) in x.iter().enumerate() {
                *pj += xk * w_in.get(k, j);
            }
            for (k, hk) in hs.iter().enumerate() {
                *pj += hk * w_hid.get(k, j);
            }
        }
        for j in 0..h {
            let i = sigmoid(pre[j]);
            let f = sigmoid(pre[h + j]);
            let g = pre[2 * h + j].tanh();
            let o = sigmoid(pre[3 * h + j]);
            cs[j] = f * cs[j] + i * g;
            hs[j] = o * cs[j].tanh();
        }
        out.push(hs.clone());
    }
    out
}

#[test]
fn encoder_matches_scalar_oracle() {
    let m = tiny_model(tiny_config());
    let seq = vec![3usize, 7, 1, 9];
    let (states, fin) = m.encode_stream(Stream::Code, &[&seq]).unwrap();
    let fwd = lstm_oracle(&m, "enc.code.fwd", "enc.code.embed", &seq);
    let rev: Vec<usize> = seq.iter().rev().copied().collect();
    let mut bwd = lstm_oracle(&m, "enc.code.bwd", "enc.code.embed", &rev);
    bwd.reverse();
    let h = 12;
    for t in 0..seq.len() {
        for j in 0..h {
            assert!((states[t].get(0, j) - fwd[t][j]).abs() < 1e-10);
            assert!((states[t].get(0, h + j) - bwd[t][j]).abs() < 1e-10);
        }
    }
    for j in 0..h {
        assert!((fin.get(0, j) - fwd[3][j]).abs() < 1e-10);
        assert!((fin.get(0, h + j) - bwd[0][j]).abs() < 1e-10);
    }
}

#[test]
fn length_one_sequence_and_padding() {
    let m = tiny_model(tiny_config());
    let (states, fin) = m.encode_stream(Stream::Sbt, &[&[4]]).unwrap();
    assert_eq!(states.len(), 1);
    assert_eq!(states[0], fin);

    let short = vec![5usize, 2];
    let long = vec![1usize, 2, 3, 4, 5];
    let (_, alone) = m.encode_stream(Stream::Exemplar, &[&short]).unwrap();
    let (_, padded) = m.encode_stream(Stream::Exemplar, &[&short, &long]).unwrap();
    assert_eq!(alone.row(0), padded.row(0));
    assert!(matches!(m.encode_stream(Stream::Code, &[&short, &[]]), Err(ModelError::EmptySequence { row: 1, .. })));
}

#[test]
fn zero_gate_weights_give_half() {
    let mut m = tiny_model(tiny_config());
    let g = m.params.id("gate.w").unwrap();
    m.params.value_mut(g).data.fill(0.0);
    let ex = examples(1, 3);
    let refs: Vec<&Example> = ex.iter().collect();
    let s = m.first_step(&refs, None).unwrap();
    assert!(s.sim.data.iter().all(|&v| v == 0.5));
}

#[test]
fn sim_matches_dot_product() {
    let m = tiny_model(tiny_config());
    let ex = &examples(2, 1)[0];
    let (_, hx) = m.encode_stream(Stream::Code, &[&ex.code]).unwrap();
    let (_, hs) = m.encode_stream(Stream::SimilarCode, &[&ex.similar_code]).unwrap();
    let w = m.params.value(m.params.id("gate.w").unwrap());
    let dot: f64 = hx.data.iter().chain(&hs.data).zip(&w.data).map(|(a, b)| a * b).sum();
    let s = m.first_step(&[ex], None).unwrap();
    assert!((s.sim.item() - sigmoid(dot)).abs() < 1e-12);
}

#[test]
fn gate_limits_are_exact() {
    for tie in [true, false] {
        let m = tiny_model(ModelConfig { tie_fusion: tie, ..tiny_config() });
        let ex = examples(3, 2);
        let refs: Vec<&Example> = ex.iter().collect();
        let one = m.first_step(&refs, Some(1.0)).unwrap();
        assert_eq!(one.h0, one.h_exemplar);
        assert_eq!(one.context, one.exemplar_context);
        let zero = m.first_step(&refs, Some(0.0)).unwrap();
        assert_eq!(zero.h0, zero.h_code);
        assert_eq!(zero.context, zero.code_context);
        let half = m.first_step(&refs, Some(0.5)).unwrap();
        for ((h, a), b) in half.h0.data.iter().zip(&half.h_code.data).zip(&half.h_exemplar.data) {
            assert!((h - (0.5 * a + 0.5 * b)).abs() < 1e-15);
        }
    }
}

#[test]
fn attention_and_output_are_distributions() {
    let m = tiny_model(tiny_config());
    let ex = examples(4, 3);
    let refs: Vec<&Example> = ex.iter().collect();
    let s = m.first_step(&refs, None).unwrap();
    let lens = |e: &Example| [e.code.len(), e.sbt.len(), e.exemplar.len()];
    for (b, e) in ex.iter().enumerate() {
        for (k, &n) in lens(e).iter().enumerate() {
            let row = s.attention[k].row(b);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(row[..n].iter().all(|&w| w >= 0.0));
            assert!(row[n..].iter().all(|&w| w == 0.0));
        }
        assert!((s.probs.row(b).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_position_attention_is_the_state() {
    let m = tiny_model(tiny_config());
    let mut ex = examples(5, 1).remove(0);
    ex.exemplar = vec![6];
    let s = m.first_step(&[&ex], Some(1.0)).unwrap();
    assert_eq!(s.attention[2].data, vec![1.0]);
    let (states, _) = m.encode_stream(Stream::Exemplar, &[&ex.exemplar]).unwrap();
    assert_eq!(s.exemplar_context, states[0]);
}

#[test]
fn batch_loss_is_mean_of_sample_losses() {
    let m = tiny_model(tiny_config());
    let ex = examples(6, 4);
    let singles: Vec<f64> = ex.iter().map(|e| m.loss(&[e]).unwrap()).collect();
    let all: Vec<&Example> = ex.iter().collect();
    let mean = singles.iter().sum::<f64>() / 4.0;
    assert!((m.loss(&all).unwrap() - mean).abs() < 1e-12);
    let permuted = vec![&ex[2], &ex[0], &ex[3], &ex[1]];
    assert!((m.loss(&permuted).unwrap() - mean).abs() < 1e-12);
}

#[test]
fn uniform_output_costs_ln_v_per_token() {
    let mut m = tiny_model(tiny_config());
    for name in ["out.w", "out.b"] {
        let id = m.params.id(name).unwrap();
        m.params.value_mut(id).data.fill(0.0);
    }
    let ex = &examples(7, 1)[0];
    let v = m.comment_vocab.len() as f64;
    let tokens = (ex.target.len() + 1) as f64;
    assert!((m.loss(&[ex]).unwrap() - tokens * v.ln()).abs() < 1e-12);
}

/// Central differences on a few entries of every parameter tensor.
pub(crate) fn gradient_check(mut m: RefineModel, batch: &[Example], per_param: usize) -> Vec<(String, f64)> {
    let refs: Vec<&Example> = batch.iter().collect();
    m.params.zero_grads();
    m.accumulate_gradients(&refs, Dropout::off()).unwrap();
    let analytic = m.params.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let h = 1e-5;
    let mut worst = Vec::new();
    for id in analytic.ids() {
        let n = analytic.value(id).len();
        let mut max_rel: f64 = 0.0;
        // prefer entries with a nonzero gradient so sparse embeddings are tested
        let live: Vec<usize> = (0..n).filter(|&e| analytic.grad(id).data[e] != 0.0).collect();
        for k in 0..per_param.min(n) {
            let e =
                if live.is_empty() || k % 4 == 3 { rng.gen_range(0..n) } else { live[rng.gen_range(0..live.len())] };
            let orig = m.params.value(id).data[e];
            m.params.value_mut(id).data[e] = orig + h;
            let up = m.loss(&refs).unwrap();
            m.params.value_mut(id).data[e] = orig - h;
            let down = m.loss(&refs).unwrap();
            m.params.value_mut(id).data[e] = orig;
            let numeric = (up - down) / (2.0 * h);
            let a = analytic.grad(id).data[e];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
            max_rel = max_rel.max(rel);
        }
        worst.push((analytic.name(id).to_string(), max_rel));
    }
    worst
}

#[test]
fn full_model_gradient_check() {
    for tie in [true, false] {
        let m = tiny_model(ModelConfig { tie_fusion: tie, ..tiny_config() });
        let batch = examples(8, 2);
        for (name, rel) in gradient_check(m, &batch, 6) {
            assert!(rel <= 1e-3, "{name}: relative error {rel}");
        }
    }
}

#[test]
fn encoders_are_parameter_disjoint() {
    let base = tiny_model(tiny_config());
    let seqs: Vec<Vec<usize>> = vec![vec![1, 2, 3], vec![4, 5]];
    let refs: Vec<&[usize]> = seqs.iter().map(Vec::as_slice).collect();
    for zeroed in Stream::ALL {
        let mut m = base.clone();
        for name in m.encoder_param_names(zeroed) {
            let id = m.params.id(&name).unwrap();
            m.params.value_mut(id).data.fill(0.0);
        }
        for other in Stream::ALL.into_iter().filter(|s| *s != zeroed) {
            assert_eq!(m.encode_stream(other, &refs).unwrap(), base.encode_stream(other, &refs).unwrap());
        }
    }
}

#[test]
fn checkpoint_round_trip_and_rejection() {
    let m = tiny_model(ModelConfig { tie_fusion: false, ..tiny_config() });
    let bytes = m.to_bytes();
    let back = RefineModel::from_bytes(&bytes).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.to_bytes(), bytes);
    assert!(RefineModel::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    assert!(RefineModel::from_bytes(b"EXCKP\0\x09\x00").is_err());
}

#[test]
fn beam_width_one_matches_greedy_on_network() {
    for seed in 0..5 {
        let m = tiny_model(ModelConfig { seed, init_range: 1.0, ..tiny_config() });
        for ex in examples(seed + 20, 3) {
            let b = m.generate_ids(&ex, 1).unwrap();
            let g = m.greedy_ids(&ex).unwrap();
            assert_eq!(b.tokens, g.tokens);
            assert!(b.tokens.len() <= m.config.max_content_len());
        }
    }
}

#[test]
fn overfits_one_sample_and_is_deterministic() {
    let cfg = ModelConfig { epochs: 150, batch_size: 1, lr: 0.5, lr_decay: 1.0, init_range: 0.08, ..tiny_config() };
    let data = examples(9, 1);
    let mut a = tiny_model(cfg.clone());
    let out_a = train(&mut a, &data, &[], |_| {}).unwrap();
    let final_loss = a.loss(&[&data[0]]).unwrap();
    assert!(final_loss < 0.05, "loss {final_loss}");
    assert_eq!(a.generate_ids(&data[0], 5).unwrap().tokens, data[0].target);

    let mut b = tiny_model(cfg);
    let out_b = train(&mut b, &data, &[], |_| {}).unwrap();
    assert_eq!(out_a, out_b);
    assert_eq!(a.params, b.params);
}

#[test]
fn learning_rate_decays_per_epoch() {
    let cfg = ModelConfig { epochs: 3, ..tiny_config() };
    let mut m = tiny_model(cfg);
    let out = train(&mut m, &examples(10, 2), &examples(11, 2), |_| {}).unwrap();
    let lrs: Vec<f64> = out.epochs.iter().map(|e| e.lr).collect();
    assert!((lrs[2] - 0.1805).abs() < 1e-12);
    assert!(out.epochs.iter().all(|e| e.valid_loss.is_some()));
}
