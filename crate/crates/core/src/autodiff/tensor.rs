use rand::Rng;

/// Dense row-major matrix. Vectors are `1 x n` rows and scalars `1 x 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len(), "shape {rows}x{cols} does not match {} values", data.len());
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, v: f64) -> Self {
        Self { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn scalar(v: f64) -> Self {
        Self::new(1, 1, vec![v])
    }

    pub fn row_vector(data: Vec<f64>) -> Self {
        Self::new(1, data.len(), data)
    }

    pub fn column(data: Vec<f64>) -> Self {
        Self::new(data.len(), 1, data)
    }

    /// Uniform values in `[-range, range)`.
    pub fn uniform<R: Rng>(rows: usize, cols: usize, range: f64, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| rng.gen_range(-range..range)).collect();
        Self::new(rows, cols, data)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn item(&self) -> f64 {
        assert_eq!(self.data.len(), 1, "not a scalar");
        self.data[0]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn add_assign(&mut self, other: &Tensor) {
        assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn squared_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// `c = alpha * op(a) * op(b) + beta * c`, where `op` optionally transposes.
pub(crate) fn gemm(alpha: f64, a: &Tensor, ta: bool, b: &Tensor, tb: bool, beta: f64, c: &mut Tensor) {
    let (m, k) = if ta { (a.cols, a.rows) } else { (a.rows, a.cols) };
    let (k2, n) = if tb { (b.cols, b.rows) } else { (b.rows, b.cols) };
    assert_eq!(k, k2, "inner dimensions differ: {:?} x {:?}", a.shape(), b.shape());
    assert_eq!((c.rows, c.cols), (m, n));
    let (rsa, csa) = if ta { (1, a.cols as isize) } else { (a.cols as isize, 1) };
    let (rsb, csb) = if tb { (1, b.cols as isize) } else { (b.cols as isize, 1) };
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: the shape asserts above guarantee every strided access stays
    // within the three buffers, and `c` does not alias `a` or `b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr(),
            rsa,
            csa,
            b.data.as_ptr(),
            rsb,
            csb,
            beta,
            c.data.as_mut_ptr(),
            c.cols as isize,
            1,
        );
    }
}

pub fn matmul(a: &Tensor, b: &Tensor) -> Tensor {
    let mut out = Tensor::zeros(a.rows, b.cols);
    gemm(1.0, a, false, b, false, 0.0, &mut out);
    out
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Softmax of one row with max subtraction. Masked-out entries (mask 0)
/// get probability 0; a fully masked row stays all zero.
pub(crate) fn softmax_row(x: &[f64], mask: Option<&[f64]>, out: &mut [f64]) {
    let keep = |i: usize| mask.map_or(true, |m| m[i] != 0.0);
    let max = (0..x.len()).filter(|&i| keep(i)).map(|i| x[i]).fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for i in 0..x.len() {
        out[i] = if keep(i) { (x[i] - max).exp() } else { 0.0 };
        sum += out[i];
    }
    if sum > 0.0 {
        for v in out.iter_mut() {
            *v /= sum;
        }
    }
}

/// `ln(sum(exp(x)))` computed stably.
pub(crate) fn log_sum_exp(x: &[f64]) -> f64 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + x.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gemm_transposes() {
        let a = Tensor::new(2, 3, vec![1., 2., 3., 4., 5., 6.]);
        let b = Tensor::new(3, 2, vec![1., 0., 0., 1., 1., 1.]);
        assert_eq!(matmul(&a, &b).data, vec![4., 5., 10., 11.]);
        // a^T a
        let mut c = Tensor::zeros(3, 3);
        gemm(1.0, &a, true, &a, false, 0.0, &mut c);
        assert_eq!(c.data, vec![17., 22., 27., 22., 29., 36., 27., 36., 45.]);
        // a a^T accumulated onto ones
        let mut d = Tensor::filled(2, 2, 1.0);
        gemm(1.0, &a, false, &a, true, 1.0, &mut d);
        assert_eq!(d.data, vec![15., 33., 33., 78.]);
    }

    #[test]
    fn softmax_cases() {
        let mut out = [0.0; 2];
        softmax_row(&[0.0, 0.0], None, &mut out);
        assert_eq!(out, [0.5, 0.5]);
        softmax_row(&[1000.0, 1000.0], None, &mut out);
        assert_eq!(out, [0.5, 0.5]);
        softmax_row(&[0.0, 3f64.ln()], None, &mut out);
        assert!((out[0] - 0.25).abs() < 1e-15 && (out[1] - 0.75).abs() < 1e-15);
        let mut three = [0.0; 3];
        softmax_row(&[5.0, 1.0, 1.0], Some(&[0.0, 1.0, 1.0]), &mut three);
        assert_eq!(three, [0.0, 0.5, 0.5]);
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
