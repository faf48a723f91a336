use log::info;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Dropout, Example, ModelError, RefineModel, Selection};
use crate::autodiff::sgd_step;
use crate::eval::corpus_bleu;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub lr: f64,
    /// Mean of the batch losses.
    pub train_loss: f64,
    pub valid_loss: Option<f64>,
    pub valid_bleu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainOutcome {
    pub epochs: Vec<EpochStats>,
    /// The epoch whose parameters the model holds afterwards.
    pub best_epoch: usize,
}

fn mean_loss(model: &RefineModel, data: &[Example], batch: usize) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for chunk in data.chunks(batch) {
        let refs: Vec<&Example> = chunk.iter().collect();
        total += model.loss(&refs)? * chunk.len() as f64;
    }
    Ok(total / data.len() as f64)
}

fn greedy_bleu(model: &RefineModel, data: &[Example]) -> Result<f64, ModelError> {
    let mut preds = Vec::with_capacity(data.len());
    let mut refs = Vec::with_capacity(data.len());
    for ex in data {
        preds.push(model.comment_vocab.decode(&model.greedy_ids(ex)?.tokens));
        refs.push(model.comment_vocab.decode(&ex.target));
    }
    Ok(corpus_bleu(&preds, &refs, 4).map(|r| r.bleu).unwrap_or(0.0))
}

/// Mini-batch SGD with per-epoch learning-rate decay and global-norm
/// clipping. Shuffling and dropout draw from one generator seeded by the
/// configuration, so a rerun reproduces every loss exactly. The model ends
/// up holding the parameters of the best epoch on `valid` (by loss or
/// BLEU); with no validation data the training loss decides.
pub fn train(
    model: &mut RefineModel,
    train: &[Example],
    valid: &[Example],
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome, ModelError> {
    let cfg = model.config.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut epochs = Vec::new();
    let mut best: Option<(f64, usize, crate::autodiff::ParamStore)> = None;

    for epoch in 0..cfg.epochs {
        let lr = cfg.lr_at(epoch);
        order.shuffle(&mut rng);
        let mut losses = Vec::new();
        for (bi, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<&Example> = chunk.iter().map(|&i| &train[i]).collect();
            let loss = model.accumulate_gradients(&batch, Dropout::new(cfg.dropout, &mut rng))?;
            if !loss.is_finite() {
                return Err(ModelError::NonFiniteLoss { epoch, batch: bi });
            }
            sgd_step(&mut model.params, lr, cfg.clip_norm);
            losses.push(loss);
        }
        let train_loss = losses.iter().sum::<f64>() / losses.len().max(1) as f64;
        let (valid_loss, valid_bleu) = if valid.is_empty() {
            (None, None)
        } else {
            let vl = mean_loss(model, valid, cfg.batch_size)?;
            let vb = match cfg.selection {
                Selection::Bleu => Some(greedy_bleu(model, valid)?),
                Selection::Loss => None,
            };
            (Some(vl), vb)
        };
        let stats = EpochStats { epoch, lr, train_loss, valid_loss, valid_bleu };
        info!(
            "epoch {epoch} lr {lr:.5} train_loss {train_loss:.5} valid_loss {:?} valid_bleu {:?}",
            valid_loss, valid_bleu
        );
        on_epoch(&stats);
        // lower is better
        let key = match (valid_bleu, valid_loss) {
            (Some(b), _) => -b,
            (None, Some(l)) => l,
            (None, None) => train_loss,
        };
        if best.as_ref().map_or(true, |(k, _, _)| key < *k) {
            best = Some((key, epoch, model.params.clone()));
        }
        epochs.push(stats);
    }
    let best_epoch = match best {
        Some((_, e, params)) => {
            model.params = params;
            e
        }
        None => 0,
    };
    Ok(TrainOutcome { epochs, best_epoch })
}
