use super::tensor::{gemm, log_sum_exp, sigmoid, softmax_row};
use super::{AutodiffError, ParamId, ParamStore, Tensor};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug)]
enum Op {
    Leaf,
    Param(ParamId),
    Embed { table: ParamId, ids: Vec<usize> },
    MatMul(Var, Var),
    Add(Var, Var),
    AddRow(Var, Var),
    Mul(Var, Var),
    MulConst(Var, Tensor),
    Concat(Vec<Var>),
    SliceCols(Var, usize),
    GatherRows(Var, Vec<usize>),
    Sigmoid(Var),
    Tanh(Var),
    Softmax(Var),
    Blend(Var, Var, Var),
    LstmCell { pre: Var, c_prev: Var },
    AttnScores { query: Var, keys: Var, v: Var },
    WeightedSum { weights: Var, memory: Var },
    CrossEntropy { logits: Var, targets: Vec<usize>, weights: Vec<f64> },
    Sum(Var),
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    op: Op,
}

/// Records a forward computation so gradients can be pulled back through it.
///
/// Nodes are appended in evaluation order, so the tape is topologically
/// sorted by construction and backward is a single reverse sweep.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Per-node gradients from one backward sweep.
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    /// `None` when the node does not influence the loss.
    pub fn get(&self, v: Var) -> Option<&Tensor> {
        self.grads[v.0].as_ref()
    }
}

fn same_shape(a: &Tensor, b: &Tensor, op: &str) {
    assert_eq!(a.shape(), b.shape(), "{op}: shape mismatch");
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    /// A constant input; its gradient is still reported by [`Tape::backward`].
    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn param(&mut self, store: &ParamStore, id: ParamId) -> Var {
        self.push(store.value(id).clone(), Op::Param(id))
    }

    /// Rows `ids` of an embedding table, without copying the whole table.
    pub fn embed(&mut self, store: &ParamStore, table: ParamId, ids: &[usize]) -> Var {
        let t = store.value(table);
        let mut out = Tensor::zeros(ids.len(), t.cols);
        for (r, &id) in ids.iter().enumerate() {
            assert!(id < t.rows, "embedding id {id} out of range for {} rows", t.rows);
            out.row_mut(r).copy_from_slice(t.row(id));
        }
        self.push(out, Op::Embed { table, ids: ids.to_vec() })
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (av, bv) = (self.value(a), self.value(b));
        let mut out = Tensor::zeros(av.rows, bv.cols);
        gemm(1.0, av, false, bv, false, 0.0, &mut out);
        self.push(out, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let (av, bv) = (self.value(a), self.value(b));
        same_shape(av, bv, "add");
        let data = av.data.iter().zip(&bv.data).map(|(x, y)| x + y).collect();
        let out = Tensor::new(av.rows, av.cols, data);
        self.push(out, Op::Add(a, b))
    }

    /// Adds a `1 x n` row to every row of `a`.
    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        let (av, rv) = (self.value(a), self.value(row));
        assert_eq!((rv.rows, rv.cols), (1, av.cols), "add_row: bias shape");
        let mut out = av.clone();
        for r in 0..out.rows {
            for (o, b) in out.row_mut(r).iter_mut().zip(&rv.data) {
                *o += b;
            }
        }
        self.push(out, Op::AddRow(a, row))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let (av, bv) = (self.value(a), self.value(b));
        same_shape(av, bv, "mul");
        let data = av.data.iter().zip(&bv.data).map(|(x, y)| x * y).collect();
        let out = Tensor::new(av.rows, av.cols, data);
        self.push(out, Op::Mul(a, b))
    }

    /// Elementwise product with a constant, e.g. a pre-scaled dropout mask.
    pub fn mul_const(&mut self, a: Var, c: Tensor) -> Var {
        let av = self.value(a);
        same_shape(av, &c, "mul_const");
        let data = av.data.iter().zip(&c.data).map(|(x, y)| x * y).collect();
        let out = Tensor::new(av.rows, av.cols, data);
        self.push(out, Op::MulConst(a, c))
    }

    /// Concatenation along columns.
    pub fn concat(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty(), "concat of nothing");
        let rows = self.value(parts[0]).rows;
        let cols: usize = parts.iter().map(|&p| self.value(p).cols).sum();
        let mut out = Tensor::zeros(rows, cols);
        let mut off = 0;
        for &p in parts {
            let pv = self.value(p);
            assert_eq!(pv.rows, rows, "concat: row mismatch");
            for r in 0..rows {
                out.row_mut(r)[off..off + pv.cols].copy_from_slice(pv.row(r));
            }
            off += pv.cols;
        }
        self.push(out, Op::Concat(parts.to_vec()))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, len: usize) -> Var {
        let av = self.value(a);
        assert!(start + len <= av.cols, "slice_cols out of range");
        let mut out = Tensor::zeros(av.rows, len);
        for r in 0..av.rows {
            out.row_mut(r).copy_from_slice(&av.row(r)[start..start + len]);
        }
        self.push(out, Op::SliceCols(a, start))
    }

    pub fn gather_rows(&mut self, a: Var, rows: &[usize]) -> Var {
        let av = self.value(a);
        let mut out = Tensor::zeros(rows.len(), av.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.row_mut(i).copy_from_slice(av.row(r));
        }
        self.push(out, Op::GatherRows(a, rows.to_vec()))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let av = self.value(a);
        let out = Tensor::new(av.rows, av.cols, av.data.iter().map(|&x| sigmoid(x)).collect());
        self.push(out, Op::Sigmoid(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let av = self.value(a);
        let out = Tensor::new(av.rows, av.cols, av.data.iter().map(|x| x.tanh()).collect());
        self.push(out, Op::Tanh(a))
    }

    /// Row-wise softmax. Entries where `mask` is 0 get probability 0.
    pub fn softmax(&mut self, a: Var, mask: Option<Tensor>) -> Var {
        let av = self.value(a);
        if let Some(m) = &mask {
            same_shape(av, m, "softmax mask");
        }
        let mut out = Tensor::zeros(av.rows, av.cols);
        for r in 0..av.rows {
            let m = mask.as_ref().map(|m| m.row(r));
            softmax_row(av.row(r), m, out.row_mut(r));
        }
        self.push(out, Op::Softmax(a))
    }

    /// `gate * x + (1 - gate) * y` with one gate value per row.
    pub fn blend(&mut self, gate: Var, x: Var, y: Var) -> Var {
        let (gv, xv, yv) = (self.value(gate), self.value(x), self.value(y));
        same_shape(xv, yv, "blend");
        assert_eq!((gv.rows, gv.cols), (xv.rows, 1), "blend: gate must be a column");
        let mut out = Tensor::zeros(xv.rows, xv.cols);
        for r in 0..xv.rows {
            let g = gv.data[r];
            for ((o, a), b) in out.row_mut(r).iter_mut().zip(xv.row(r)).zip(yv.row(r)) {
                *o = g * a + (1.0 - g) * b;
            }
        }
        self.push(out, Op::Blend(gate, x, y))
    }

    /// One LSTM cell from gate pre-activations laid out `[i | f | g | o]`.
    /// Returns `[h | c]`.
    pub fn lstm_cell(&mut self, pre: Var, c_prev: Var) -> Var {
        let (pv, cv) = (self.value(pre), self.value(c_prev));
        let h = cv.cols;
        assert_eq!((pv.rows, pv.cols), (cv.rows, 4 * h), "lstm_cell: shapes");
        let mut out = Tensor::zeros(cv.rows, 2 * h);
        for r in 0..cv.rows {
            let p = pv.row(r);
            let cp = cv.row(r);
            let o_row = out.row_mut(r);
            for j in 0..h {
                let i = sigmoid(p[j]);
                let f = sigmoid(p[h + j]);
                let g = p[2 * h + j].tanh();
                let o = sigmoid(p[3 * h + j]);
                let c = f * cp[j] + i * g;
                o_row[h + j] = c;
                o_row[j] = o * c.tanh();
            }
        }
        self.push(out, Op::LstmCell { pre, c_prev })
    }

    /// Additive attention scores `s[b, l] = sum_a v[a] * tanh(q[b, a] + k[b, l*A + a])`.
    pub fn attention_scores(&mut self, query: Var, keys: Var, v: Var) -> Var {
        let (qv, kv, vv) = (self.value(query), self.value(keys), self.value(v));
        let a = qv.cols;
        assert_eq!((vv.rows, vv.cols), (1, a), "attention_scores: v shape");
        assert!(a > 0 && kv.cols % a == 0 && kv.rows == qv.rows, "attention_scores: key shape");
        let l = kv.cols / a;
        let mut out = Tensor::zeros(qv.rows, l);
        for b in 0..qv.rows {
            let q = qv.row(b);
            let k = kv.row(b);
            for pos in 0..l {
                let kp = &k[pos * a..(pos + 1) * a];
                out.data[b * l + pos] = (0..a).map(|j| vv.data[j] * (q[j] + kp[j]).tanh()).sum();
            }
        }
        self.push(out, Op::AttnScores { query, keys, v })
    }

    /// `out[b, :] = sum_l weights[b, l] * memory[b, l*D .. (l+1)*D]`.
    pub fn weighted_sum(&mut self, weights: Var, memory: Var) -> Var {
        let (wv, mv) = (self.value(weights), self.value(memory));
        let l = wv.cols;
        assert!(l > 0 && mv.cols % l == 0 && mv.rows == wv.rows, "weighted_sum: shapes");
        let d = mv.cols / l;
        let mut out = Tensor::zeros(wv.rows, d);
        for b in 0..wv.rows {
            let m = mv.row(b);
            let o = out.row_mut(b);
            for pos in 0..l {
                let w = wv.data[b * l + pos];
                for (oj, mj) in o.iter_mut().zip(&m[pos * d..(pos + 1) * d]) {
                    *oj += w * mj;
                }
            }
        }
        self.push(out, Op::WeightedSum { weights, memory })
    }

    /// `sum_b weights[b] * -log softmax(logits[b])[targets[b]]`, a `1 x 1` value.
    pub fn cross_entropy_weighted(
        &mut self,
        logits: Var,
        targets: &[usize],
        weights: &[f64],
    ) -> Result<Var, AutodiffError> {
        let lv = self.value(logits);
        if targets.len() != lv.rows || weights.len() != lv.rows {
            return Err(AutodiffError::ShapeMismatch(format!(
                "{} rows of logits, {} targets, {} weights",
                lv.rows,
                targets.len(),
                weights.len()
            )));
        }
        let mut loss = 0.0;
        for (b, (&t, &w)) in targets.iter().zip(weights).enumerate() {
            if t >= lv.cols {
                return Err(AutodiffError::TargetOutOfRange { target: t, classes: lv.cols });
            }
            if w != 0.0 {
                let row = lv.row(b);
                loss += w * (log_sum_exp(row) - row[t]);
            }
        }
        Ok(self.push(
            Tensor::scalar(loss),
            Op::CrossEntropy { logits, targets: targets.to_vec(), weights: weights.to_vec() },
        ))
    }

    /// Mean cross-entropy over the rows whose target is `Some`.
    pub fn cross_entropy(&mut self, logits: Var, targets: &[Option<usize>]) -> Result<Var, AutodiffError> {
        let live = targets.iter().filter(|t| t.is_some()).count();
        let w = if live == 0 { 0.0 } else { 1.0 / live as f64 };
        let weights: Vec<f64> = targets.iter().map(|t| if t.is_some() { w } else { 0.0 }).collect();
        let ids: Vec<usize> = targets.iter().map(|t| t.unwrap_or(0)).collect();
        self.cross_entropy_weighted(logits, &ids, &weights)
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let s = self.value(a).data.iter().sum();
        self.push(Tensor::scalar(s), Op::Sum(a))
    }

    /// Sums several `1 x 1` values.
    pub fn sum_scalars(&mut self, parts: &[Var]) -> Var {
        let joined = self.concat(parts);
        self.sum(joined)
    }

    /// Reverse sweep from a `1 x 1` loss. Parameter gradients are added to
    /// `store`; every node's gradient is returned.
    pub fn backward(&self, loss: Var, store: &mut ParamStore) -> Gradients {
        assert_eq!(self.value(loss).shape(), (1, 1), "loss must be a scalar");
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::scalar(1.0));
        for i in (0..=loss.0).rev() {
            let Some(g) = grads[i].take() else { continue };
            self.backward_node(i, &g, &mut grads, store);
            grads[i] = Some(g);
        }
        Gradients { grads }
    }

    fn slot<'g>(&self, grads: &'g mut [Option<Tensor>], v: Var) -> &'g mut Tensor {
        let (rows, cols) = self.value(v).shape();
        grads[v.0].get_or_insert_with(|| Tensor::zeros(rows, cols))
    }

    fn backward_node(&self, i: usize, g: &Tensor, grads: &mut [Option<Tensor>], store: &mut ParamStore) {
        let node = &self.nodes[i];
        let out = &node.value;
        match &node.op {
            Op::Leaf => {}
            Op::Param(id) => store.grad_mut(*id).add_assign(g),
            Op::Embed { table, ids } => {
                let tg = store.grad_mut(*table);
                for (r, &id) in ids.iter().enumerate() {
                    for (t, x) in tg.row_mut(id).iter_mut().zip(g.row(r)) {
                        *t += x;
                    }
                }
            }
            Op::MatMul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                gemm(1.0, g, false, bv, true, 1.0, self.slot(grads, *a));
                gemm(1.0, av, true, g, false, 1.0, self.slot(grads, *b));
            }
            Op::Add(a, b) => {
                self.slot(grads, *a).add_assign(g);
                self.slot(grads, *b).add_assign(g);
            }
            Op::AddRow(a, row) => {
                self.slot(grads, *a).add_assign(g);
                let rg = self.slot(grads, *row);
                for r in 0..g.rows {
                    for (x, y) in rg.data.iter_mut().zip(g.row(r)) {
                        *x += y;
                    }
                }
            }
            Op::Mul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                for ((x, gi), bi) in self.slot(grads, *a).data.iter_mut().zip(&g.data).zip(&bv.data) {
                    *x += gi * bi;
                }
                for ((x, gi), ai) in self.slot(grads, *b).data.iter_mut().zip(&g.data).zip(&av.data) {
                    *x += gi * ai;
                }
            }
            Op::MulConst(a, c) => {
                for ((x, gi), ci) in self.slot(grads, *a).data.iter_mut().zip(&g.data).zip(&c.data) {
                    *x += gi * ci;
                }
            }
            Op::Concat(parts) => {
                let mut off = 0;
                for &p in parts {
                    let pg = self.slot(grads, p);
                    let w = pg.cols;
                    for r in 0..g.rows {
                        for (x, y) in pg.row_mut(r).iter_mut().zip(&g.row(r)[off..off + w]) {
                            *x += y;
                        }
                    }
                    off += w;
                }
            }
            Op::SliceCols(a, start) => {
                let ag = self.slot(grads, *a);
                for r in 0..g.rows {
                    for (x, y) in ag.row_mut(r)[*start..*start + g.cols].iter_mut().zip(g.row(r)) {
                        *x += y;
                    }
                }
            }
            Op::GatherRows(a, rows) => {
                let ag = self.slot(grads, *a);
                for (i, &r) in rows.iter().enumerate() {
                    for (x, y) in ag.row_mut(r).iter_mut().zip(g.row(i)) {
                        *x += y;
                    }
                }
            }
            Op::Sigmoid(a) => {
                for ((x, gi), y) in self.slot(grads, *a).data.iter_mut().zip(&g.data).zip(&out.data) {
                    *x += gi * y * (1.0 - y);
                }
            }
            Op::Tanh(a) => {
                for ((x, gi), y) in self.slot(grads, *a).data.iter_mut().zip(&g.data).zip(&out.data) {
                    *x += gi * (1.0 - y * y);
                }
            }
            Op::Softmax(a) => {
                let ag = self.slot(grads, *a);
                for r in 0..g.rows {
                    let (gr, yr) = (g.row(r), out.row(r));
                    let dot: f64 = gr.iter().zip(yr).map(|(x, y)| x * y).sum();
                    for ((x, gi), y) in ag.row_mut(r).iter_mut().zip(gr).zip(yr) {
                        *x += y * (gi - dot);
                    }
                }
            }
            Op::Blend(gate, x, y) => {
                let (gv, xv, yv) = (self.value(*gate), self.value(*x), self.value(*y));
                let gg = self.slot(grads, *gate);
                for r in 0..g.rows {
                    gg.data[r] +=
                        g.row(r).iter().zip(xv.row(r)).zip(yv.row(r)).map(|((d, a), b)| d * (a - b)).sum::<f64>();
                }
                let xg = self.slot(grads, *x);
                for r in 0..g.rows {
                    for (t, d) in xg.row_mut(r).iter_mut().zip(g.row(r)) {
                        *t += gv.data[r] * d;
                    }
                }
                let yg = self.slot(grads, *y);
                for r in 0..g.rows {
                    for (t, d) in yg.row_mut(r).iter_mut().zip(g.row(r)) {
                        *t += (1.0 - gv.data[r]) * d;
                    }
                }
            }
            Op::LstmCell { pre, c_prev } => {
                let (pv, cv) = (self.value(*pre), self.value(*c_prev));
                let h = cv.cols;
                let mut dpre = Tensor::zeros(pv.rows, pv.cols);
                let mut dcp = Tensor::zeros(cv.rows, h);
                for r in 0..cv.rows {
                    let (p, cp, o_row, gr) = (pv.row(r), cv.row(r), out.row(r), g.row(r));
                    let dp = &mut dpre.data[r * 4 * h..(r + 1) * 4 * h];
                    for j in 0..h {
                        let i = sigmoid(p[j]);
                        let f = sigmoid(p[h + j]);
                        let gg = p[2 * h + j].tanh();
                        let o = sigmoid(p[3 * h + j]);
                        let tc = o_row[h + j].tanh();
                        let gh = gr[j];
                        let gc = gr[h + j] + gh * o * (1.0 - tc * tc);
                        dp[j] = gc * gg * i * (1.0 - i);
                        dp[h + j] = gc * cp[j] * f * (1.0 - f);
                        dp[2 * h + j] = gc * i * (1.0 - gg * gg);
                        dp[3 * h + j] = gh * tc * o * (1.0 - o);
                        dcp.data[r * h + j] = gc * f;
                    }
                }
                self.slot(grads, *pre).add_assign(&dpre);
                self.slot(grads, *c_prev).add_assign(&dcp);
            }
            Op::AttnScores { query, keys, v } => {
                let (qv, kv, vv) = (self.value(*query), self.value(*keys), self.value(*v));
                let a = qv.cols;
                let l = g.cols;
                let mut dq = Tensor::zeros(qv.rows, a);
                let mut dk = Tensor::zeros(kv.rows, kv.cols);
                let mut dv = Tensor::zeros(1, a);
                for b in 0..qv.rows {
                    let (q, k) = (qv.row(b), kv.row(b));
                    for pos in 0..l {
                        let gs = g.data[b * l + pos];
                        if gs == 0.0 {
                            continue;
                        }
                        for j in 0..a {
                            let t = (q[j] + k[pos * a + j]).tanh();
                            let d = gs * vv.data[j] * (1.0 - t * t);
                            dq.data[b * a + j] += d;
                            dk.data[b * kv.cols + pos * a + j] += d;
                            dv.data[j] += gs * t;
                        }
                    }
                }
                self.slot(grads, *query).add_assign(&dq);
                self.slot(grads, *keys).add_assign(&dk);
                self.slot(grads, *v).add_assign(&dv);
            }
            Op::WeightedSum { weights, memory } => {
                let (wv, mv) = (self.value(*weights), self.value(*memory));
                let l = wv.cols;
                let d = g.cols;
                let mut dw = Tensor::zeros(wv.rows, l);
                let mut dm = Tensor::zeros(mv.rows, mv.cols);
                for b in 0..wv.rows {
                    let gr = g.row(b);
                    let m = mv.row(b);
                    for pos in 0..l {
                        let w = wv.data[b * l + pos];
                        let seg = &m[pos * d..(pos + 1) * d];
                        dw.data[b * l + pos] = gr.iter().zip(seg).map(|(x, y)| x * y).sum();
                        for (t, x) in dm.data[b * mv.cols + pos * d..b * mv.cols + (pos + 1) * d].iter_mut().zip(gr) {
                            *t = w * x;
                        }
                    }
                }
                self.slot(grads, *weights).add_assign(&dw);
                self.slot(grads, *memory).add_assign(&dm);
            }
            Op::CrossEntropy { logits, targets, weights } => {
                let lv = self.value(*logits);
                let scale = g.item();
                let lg = self.slot(grads, *logits);
                let mut p = vec![0.0; lv.cols];
                for (b, (&t, &w)) in targets.iter().zip(weights).enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    softmax_row(lv.row(b), None, &mut p);
                    p[t] -= 1.0;
                    for (x, pj) in lg.row_mut(b).iter_mut().zip(&p) {
                        *x += scale * w * pj;
                    }
                }
            }
            Op::Sum(a) => {
                let s = g.item();
                for x in self.slot(grads, *a).data.iter_mut() {
                    *x += s;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_tensor(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Tensor {
        Tensor::uniform(r, c, 1.0, rng)
    }

    /// Checks the analytic gradient of every leaf against central differences.
    fn check(inputs: Vec<Tensor>, f: impl Fn(&mut Tape, &[Var]) -> Var) {
        let mut store = ParamStore::new();
        let mut tape = Tape::new();
        let vars: Vec<Var> = inputs.iter().map(|t| tape.leaf(t.clone())).collect();
        let loss = f(&mut tape, &vars);
        let grads = tape.backward(loss, &mut store);
        let eval = |inputs: &[Tensor]| {
            let mut t = Tape::new();
            let vs: Vec<Var> = inputs.iter().map(|x| t.leaf(x.clone())).collect();
            let l = f(&mut t, &vs);
            t.value(l).item()
        };
        let h = 1e-5;
        for (k, input) in inputs.iter().enumerate() {
            for e in 0..input.len() {
                let mut plus = inputs.clone();
                plus[k].data[e] += h;
                let mut minus = inputs.clone();
                minus[k].data[e] -= h;
                let numeric = (eval(&plus) - eval(&minus)) / (2.0 * h);
                let analytic = grads.get(vars[k]).map_or(0.0, |g| g.data[e]);
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
                assert!(rel < 1e-5, "input {k} elem {e}: analytic {analytic} numeric {numeric}");
            }
        }
    }

    /// Reduces to a scalar through a fixed random projection so every output
    /// element gets a distinct upstream gradient.
    fn project(tape: &mut Tape, v: Var, seed: u64) -> Var {
        let shape = tape.value(v).shape();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = rand_tensor(&mut rng, shape.0, shape.1);
        let m = tape.mul_const(v, w);
        tape.sum(m)
    }

    #[test]
    fn sum_gives_ones() {
        let mut store = ParamStore::new();
        let w = store.add("w", Tensor::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]));
        let unused = store.add("u", Tensor::zeros(1, 3));
        let mut tape = Tape::new();
        let wv = tape.param(&store, w);
        let s = tape.sum(wv);
        tape.backward(s, &mut store);
        assert_eq!(store.grad(w).data, vec![1.0; 4]);
        assert_eq!(store.grad(unused).data, vec![0.0; 3]);
    }

    #[test]
    fn sigmoid_closed_form() {
        let mut store = ParamStore::new();
        let w = store.add("w", Tensor::scalar(0.3));
        let mut tape = Tape::new();
        let wv = tape.param(&store, w);
        let s = tape.sigmoid(wv);
        let v = tape.leaf(Tensor::scalar(-2.0));
        let prod = tape.mul(s, v);
        tape.backward(prod, &mut store);
        let sg = sigmoid(0.3);
        assert!((store.grad(w).item() - sg * (1.0 - sg) * -2.0).abs() < 1e-15);
    }

    #[test]
    fn cross_entropy_cases() {
        let mut tape = Tape::new();
        let uniform = tape.leaf(Tensor::zeros(2, 4));
        let l = tape.cross_entropy(uniform, &[Some(1), Some(3)]).unwrap();
        assert!((tape.value(l).item() - 4f64.ln()).abs() < 1e-15);
        let confident = tape.leaf(Tensor::row_vector(vec![0.0, 50.0]));
        let l = tape.cross_entropy(confident, &[Some(1)]).unwrap();
        assert!(tape.value(l).item() < 1e-20);
        assert!(matches!(
            tape.cross_entropy(uniform, &[Some(4), None]),
            Err(AutodiffError::TargetOutOfRange { target: 4, classes: 4 })
        ));
        // padding rows do not count
        let mixed = tape.leaf(Tensor::new(2, 2, vec![0.0, 0.0, 9.0, -9.0]));
        let l = tape.cross_entropy(mixed, &[Some(0), None]).unwrap();
        assert!((tape.value(l).item() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn cross_entropy_matches_scalar_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let logits = rand_tensor(&mut rng, 3, 5);
        let targets = [2usize, 0, 4];
        let mut want = 0.0;
        for (b, &t) in targets.iter().enumerate() {
            let row = logits.row(b);
            let z: f64 = row.iter().map(|x| x.exp()).sum();
            want += -(row[t].exp() / z).ln();
        }
        want /= 3.0;
        let mut tape = Tape::new();
        let lv = tape.leaf(logits);
        let l = tape.cross_entropy(lv, &targets.map(Some)).unwrap();
        assert!((tape.value(l).item() - want).abs() < 1e-12);
    }

    #[test]
    fn gradient_checks_per_primitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut r = |a, b| rand_tensor(&mut rng, a, b);

        check(vec![r(2, 3), r(3, 4)], |t, v| {
            let m = t.matmul(v[0], v[1]);
            project(t, m, 1)
        });
        check(vec![r(2, 3), r(2, 3)], |t, v| {
            let a = t.add(v[0], v[1]);
            let m = t.mul(a, v[1]);
            project(t, m, 2)
        });
        check(vec![r(3, 2), r(1, 2)], |t, v| {
            let a = t.add_row(v[0], v[1]);
            project(t, a, 3)
        });
        check(vec![r(2, 2), r(2, 3)], |t, v| {
            let c = t.concat(&[v[0], v[1], v[0]]);
            let s = t.slice_cols(c, 1, 4);
            let g = t.gather_rows(s, &[1, 0, 1]);
            project(t, g, 4)
        });
        check(vec![r(2, 3)], |t, v| {
            let s = t.sigmoid(v[0]);
            let h = t.tanh(s);
            project(t, h, 5)
        });
        check(vec![r(2, 4)], |t, v| {
            let mask = Tensor::new(2, 4, vec![1., 1., 0., 1., 0., 1., 1., 1.]);
            let s = t.softmax(v[0], Some(mask));
            project(t, s, 6)
        });
        check(vec![r(3, 1), r(3, 2), r(3, 2)], |t, v| {
            let b = t.blend(v[0], v[1], v[2]);
            project(t, b, 7)
        });
        check(vec![r(2, 12), r(2, 3)], |t, v| {
            let hc = t.lstm_cell(v[0], v[1]);
            project(t, hc, 8)
        });
        check(vec![r(2, 3), r(2, 12), r(1, 3)], |t, v| {
            let s = t.attention_scores(v[0], v[1], v[2]);
            project(t, s, 9)
        });
        check(vec![r(2, 3), r(2, 6)], |t, v| {
            let w = t.weighted_sum(v[0], v[1]);
            project(t, w, 10)
        });
        check(vec![r(3, 4)], |t, v| t.cross_entropy_weighted(v[0], &[0, 3, 1], &[0.5, 1.0, 0.0]).unwrap());
    }

    #[test]
    fn embedding_gradient_scatters() {
        let mut store = ParamStore::new();
        let table = store.add("emb", Tensor::new(3, 2, vec![0., 1., 2., 3., 4., 5.]));
        let mut tape = Tape::new();
        let e = tape.embed(&store, table, &[2, 0, 2]);
        assert_eq!(tape.value(e).data, vec![4., 5., 0., 1., 4., 5.]);
        let s = tape.sum(e);
        tape.backward(s, &mut store);
        assert_eq!(store.grad(table).data, vec![1., 1., 0., 0., 2., 2.]);
    }

    #[test]
    fn blend_limits_are_exact() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::row_vector(vec![0.1, -0.7, 3.3]));
        let y = tape.leaf(Tensor::row_vector(vec![9.0, 0.25, -1.5]));
        let one = tape.leaf(Tensor::scalar(1.0));
        let zero = tape.leaf(Tensor::scalar(0.0));
        let half = tape.leaf(Tensor::scalar(0.5));
        let a = tape.blend(one, x, y);
        let b = tape.blend(zero, x, y);
        let c = tape.blend(half, x, y);
        assert_eq!(tape.value(a), tape.value(x));
        assert_eq!(tape.value(b), tape.value(y));
        for (got, want) in tape.value(c).data.iter().zip([4.55, -0.225, 0.9]) {
            assert!((got - want).abs() < 1e-15);
        }
    }
}
