use super::ParamStore;

/// One plain SGD update with global-norm clipping, then zeroes the gradients.
///
/// Returns the gradient norm measured before clipping.
pub fn sgd_step(store: &mut ParamStore, lr: f64, clip_norm: f64) -> f64 {
    let norm = store.grad_norm();
    let scale = if clip_norm > 0.0 && norm > clip_norm { clip_norm / norm } else { 1.0 };
    for id in store.ids().collect::<Vec<_>>() {
        let grad = store.grad(id).data.clone();
        for (p, g) in store.value_mut(id).data.iter_mut().zip(grad) {
            *p -= lr * scale * g;
        }
    }
    store.zero_grads();
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Tensor;

    #[test]
    fn scalar_arithmetic() {
        let mut s = ParamStore::new();
        let p = s.add("p", Tensor::scalar(1.0));
        s.grad_mut(p).data[0] = 0.5;
        sgd_step(&mut s, 0.2, 5.0);
        assert!((s.value(p).item() - 0.9).abs() < 1e-15);
        assert_eq!(s.grad(p).item(), 0.0);
    }

    #[test]
    fn clipping_halves_norm_ten() {
        let mut s = ParamStore::new();
        let p = s.add("p", Tensor::row_vector(vec![0.0, 0.0]));
        s.grad_mut(p).data.copy_from_slice(&[6.0, 8.0]);
        let norm = sgd_step(&mut s, 1.0, 5.0);
        assert_eq!(norm, 10.0);
        assert_eq!(s.value(p).data, vec![-3.0, -4.0]);
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut s = ParamStore::new();
        let p = s.add("p", Tensor::row_vector(vec![0.25, -1.0]));
        sgd_step(&mut s, 0.2, 5.0);
        assert_eq!(s.value(p).data, vec![0.25, -1.0]);
    }
}
