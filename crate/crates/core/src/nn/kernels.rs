//! Forward and backward kernels. Feature maps are `[h, w, c]` row-major,
//! dense weights `[in, units]`, convolution weights `[kh, kw, c, f]`.
//!
//! Inputs are adjacency matrices, so forward and weight-gradient loops skip
//! zero activations.

use super::spec::Activation;
use super::Scalar;

#[derive(Debug, Clone, Copy)]
pub(crate) struct ConvGeom {
    pub h: usize,
    pub w: usize,
    pub c: usize,
    pub kh: usize,
    pub kw: usize,
    pub sh: usize,
    pub sw: usize,
    pub f: usize,
}

impl ConvGeom {
    pub fn out_h(&self) -> usize {
        (self.h - self.kh) / self.sh + 1
    }

    pub fn out_w(&self) -> usize {
        (self.w - self.kw) / self.sw + 1
    }
}

#[inline]
fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    let mut acc = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        acc += a * b;
    }
    acc
}

pub(crate) fn dense_forward<T: Scalar>(x: &[T], w: &[T], b: &[T], out: &mut [T]) {
    let units = b.len();
    out.copy_from_slice(b);
    for (i, &xi) in x.iter().enumerate() {
        if xi != T::zero() {
            axpy(xi, &w[i * units..(i + 1) * units], out);
        }
    }
}

/// Accumulates weight and bias gradients and, when `dx` is given, writes the
/// input gradient.
pub(crate) fn dense_backward<T: Scalar>(
    x: &[T],
    w: &[T],
    dy: &[T],
    dw: &mut [T],
    db: &mut [T],
    dx: Option<&mut [T]>,
) {
    let units = dy.len();
    for (d, &g) in db.iter_mut().zip(dy) {
        *d += g;
    }
    for (i, &xi) in x.iter().enumerate() {
        if xi != T::zero() {
            axpy(xi, dy, &mut dw[i * units..(i + 1) * units]);
        }
    }
    if let Some(dx) = dx {
        for (i, d) in dx.iter_mut().enumerate() {
            *d += dot(&w[i * units..(i + 1) * units], dy);
        }
    }
}

pub(crate) fn conv_forward<T: Scalar>(g: &ConvGeom, x: &[T], w: &[T], b: &[T], out: &mut [T]) {
    let (oh, ow) = (g.out_h(), g.out_w());
    for oy in 0..oh {
        for ox in 0..ow {
            let o = &mut out[(oy * ow + ox) * g.f..(oy * ow + ox + 1) * g.f];
            o.copy_from_slice(b);
            for ky in 0..g.kh {
                let iy = oy * g.sh + ky;
                for kx in 0..g.kw {
                    let ix = ox * g.sw + kx;
                    let xin = &x[(iy * g.w + ix) * g.c..(iy * g.w + ix + 1) * g.c];
                    let wbase = (ky * g.kw + kx) * g.c;
                    for (ci, &xv) in xin.iter().enumerate() {
                        if xv != T::zero() {
                            let wi = (wbase + ci) * g.f;
                            axpy(xv, &w[wi..wi + g.f], o);
                        }
                    }
                }
            }
        }
    }
}

pub(crate) fn conv_backward<T: Scalar>(
    g: &ConvGeom,
    x: &[T],
    w: &[T],
    dy: &[T],
    dw: &mut [T],
    db: &mut [T],
    mut dx: Option<&mut [T]>,
) {
    let (oh, ow) = (g.out_h(), g.out_w());
    for oy in 0..oh {
        for ox in 0..ow {
            let d = &dy[(oy * ow + ox) * g.f..(oy * ow + ox + 1) * g.f];
            if d.iter().all(|&v| v == T::zero()) {
                continue;
            }
            for (acc, &v) in db.iter_mut().zip(d) {
                *acc += v;
            }
            for ky in 0..g.kh {
                let iy = oy * g.sh + ky;
                for kx in 0..g.kw {
                    let ix = ox * g.sw + kx;
                    let xoff = (iy * g.w + ix) * g.c;
                    let wbase = (ky * g.kw + kx) * g.c;
                    for ci in 0..g.c {
                        let wi = (wbase + ci) * g.f;
                        let xv = x[xoff + ci];
                        if xv != T::zero() {
                            axpy(xv, d, &mut dw[wi..wi + g.f]);
                        }
                        if let Some(dx) = dx.as_deref_mut() {
                            dx[xoff + ci] += dot(&w[wi..wi + g.f], d);
                        }
                    }
                }
            }
        }
    }
}

/// Non-overlapping max pooling; `arg` receives the flat input index of each
/// window maximum (the first one on ties).
pub(crate) fn maxpool_forward<T: Scalar>(
    x: &[T],
    (h, w, c): (usize, usize, usize),
    pool: usize,
    out: &mut [T],
    arg: &mut [usize],
) {
    let (oh, ow) = (h / pool, w / pool);
    for oy in 0..oh {
        for ox in 0..ow {
            for ci in 0..c {
                let mut best = (oy * pool * w + ox * pool) * c + ci;
                for py in 0..pool {
                    for px in 0..pool {
                        let i = ((oy * pool + py) * w + ox * pool + px) * c + ci;
                        if x[i] > x[best] {
                            best = i;
                        }
                    }
                }
                let o = (oy * ow + ox) * c + ci;
                out[o] = x[best];
                arg[o] = best;
            }
        }
    }
}

pub(crate) fn maxpool_backward<T: Scalar>(dy: &[T], arg: &[usize], dx: &mut [T]) {
    for (&g, &i) in dy.iter().zip(arg) {
        dx[i] += g;
    }
}

pub(crate) fn activate<T: Scalar>(act: Activation, pre: &[T], out: &mut [T]) {
    match act {
        Activation::Linear => out.copy_from_slice(pre),
        Activation::Relu => {
            for (o, &p) in out.iter_mut().zip(pre) {
                *o = if p > T::zero() { p } else { T::zero() };
            }
        }
        Activation::LeakyRelu(alpha) => {
            let a = T::from_f64(alpha);
            for (o, &p) in out.iter_mut().zip(pre) {
                *o = if p > T::zero() { p } else { a * p };
            }
        }
    }
}

/// Multiplies `grad` in place by the activation derivative at `pre`. The
/// derivative at exactly zero is taken from the negative side.
pub(crate) fn activate_backward<T: Scalar>(act: Activation, pre: &[T], grad: &mut [T]) {
    match act {
        Activation::Linear => {}
        Activation::Relu => {
            for (g, &p) in grad.iter_mut().zip(pre) {
                if p <= T::zero() {
                    *g = T::zero();
                }
            }
        }
        Activation::LeakyRelu(alpha) => {
            let a = T::from_f64(alpha);
            for (g, &p) in grad.iter_mut().zip(pre) {
                if p <= T::zero() {
                    *g *= a;
                }
            }
        }
    }
}
