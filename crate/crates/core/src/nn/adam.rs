use super::{Scalar, Tensor};

/// Adam with bias-corrected moment estimates:
///
/// ```text
/// m ← β1·m + (1−β1)·g        v ← β2·v + (1−β2)·g²
/// θ ← θ − lr · (m / (1−β1ᵗ)) / (√(v / (1−β2ᵗ)) + ε)
/// ```
#[derive(Debug, Clone)]
pub struct Adam<T> {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(learning_rate: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Adam {
            learning_rate,
            beta1,
            beta2,
            epsilon,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn update(&mut self, params: &mut [Tensor<T>], grads: &[Vec<T>]) {
        if self.m.is_empty() {
            self.m = params.iter().map(|p| vec![T::zero(); p.len()]).collect();
            self.v = self.m.clone();
        }
        self.step += 1;
        let t = self.step as i32;
        let b1 = T::from_f64(self.beta1);
        let b2 = T::from_f64(self.beta2);
        let c1 = T::from_f64(1.0 - self.beta1);
        let c2 = T::from_f64(1.0 - self.beta2);
        let corr1 = T::from_f64(1.0 - self.beta1.powi(t));
        let corr2 = T::from_f64(1.0 - self.beta2.powi(t));
        let lr = T::from_f64(self.learning_rate);
        let eps = T::from_f64(self.epsilon);
        for (i, p) in params.iter_mut().enumerate() {
            let (m, v) = (&mut self.m[i], &mut self.v[i]);
            for (j, w) in p.data_mut().iter_mut().enumerate() {
                let g = grads[i][j];
                m[j] = b1 * m[j] + c1 * g;
                v[j] = b2 * v[j] + c2 * g * g;
                let m_hat = m[j] / corr1;
                let v_hat = v[j] / corr2;
                *w -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

impl<T: Scalar> Default for Adam<T> {
    fn default() -> Self {
        Adam::new(1e-3, 0.9, 0.999, 1e-7)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_hand_computed_steps() {
        // One parameter, gradients 0.5 then -1.0, lr 0.1.
        //   t=1: m=0.05  v=0.00025  m̂=0.5  v̂=0.25  step=0.1·0.5/(0.5+ε)
        //   t=2: m=0.045-0.1=-0.055  v=0.00024975+0.001=0.00124975
        //        m̂=-0.055/0.19  v̂=0.00124975/0.001999
        let mut opt = Adam::<f64>::new(0.1, 0.9, 0.999, 1e-7);
        let mut p = vec![Tensor::from_vec(&[1], vec![1.0]).unwrap()];
        opt.update(&mut p, &[vec![0.5]]);
        let w1 = 1.0 - 0.1 * 0.5 / (0.5 + 1e-7);
        approx::assert_relative_eq!(p[0].data()[0], w1, max_relative = 1e-14);
        opt.update(&mut p, &[vec![-1.0]]);
        let m_hat = -0.055 / 0.19;
        let v_hat: f64 = 0.00124975 / 0.001999;
        let w2 = w1 - 0.1 * m_hat / (v_hat.sqrt() + 1e-7);
        approx::assert_relative_eq!(p[0].data()[0], w2, max_relative = 1e-12);
        assert_eq!(opt.steps(), 2);
    }
}
