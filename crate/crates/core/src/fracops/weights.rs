//! Product-integration weights for the Riemann–Liouville kernel.
//!
//! For a panel [a, b] and an evaluation point t ≥ b the hat weights are
//! W₀ = ∫_a^b (t−s)^{β−1} s^p (b−s)/(b−a) ds and W₁ = ∫_a^b (t−s)^{β−1} s^p (s−a)/(b−a) ds.
//! Both are nonnegative for β ∈ (0, 1] and p ∈ (−1, 0].

use crate::special::{beta as beta_fn, gauss_rule, gauss_size_for_distance};

const SERIES_LIMIT: f64 = 0.9;
const SERIES_CAP: usize = 20_000;

/// Hat weights of one panel for a single kernel exponent.
#[cfg(test)]
pub(crate) fn hat_weights(t: f64, a: f64, b: f64, beta: f64, p: f64) -> (f64, f64) {
    let mut out = [(0.0, 0.0)];
    hat_weights_multi(t, a, b, &[beta], p, &mut out);
    out[0]
}

/// Hat weights of one panel for several kernel exponents at once.
pub(crate) fn hat_weights_multi(
    t: f64,
    a: f64,
    b: f64,
    betas: &[f64],
    p: f64,
    out: &mut [(f64, f64)],
) {
    debug_assert!(a < b && b <= t && a >= 0.0);
    debug_assert_eq!(betas.len(), out.len());
    for o in out.iter_mut() {
        *o = (0.0, 0.0);
    }
    piece(t, a, b, betas, p, out);
}

/// Adds the own-hat weights of [c, e] to `out`.
fn piece(t: f64, c: f64, e: f64, betas: &[f64], p: f64, out: &mut [(f64, f64)]) {
    if c == 0.0 && e == t {
        for (o, &bt) in out.iter_mut().zip(betas) {
            let scale = t.powf(bt + p);
            o.0 += scale * beta_fn(p + 1.0, bt + 1.0);
            o.1 += scale * beta_fn(p + 2.0, bt);
        }
        return;
    }
    if e == t {
        let x = (t - c) / t;
        if x > SERIES_LIMIT {
            split(t, c, e, t * (1.0 - SERIES_LIMIT), betas, p, out);
        } else {
            for (o, &bt) in out.iter_mut().zip(betas) {
                let (w0, w1) = right_end_series(t, c, bt, p);
                o.0 += w0;
                o.1 += w1;
            }
        }
        return;
    }
    if c == 0.0 {
        let y = e / t;
        if y > SERIES_LIMIT {
            split(t, c, e, t * SERIES_LIMIT, betas, p, out);
        } else {
            for (o, &bt) in out.iter_mut().zip(betas) {
                let (w0, w1) = origin_series(t, e, bt, p);
                o.0 += w0;
                o.1 += w1;
            }
        }
        return;
    }
    let h = e - c;
    let d_left = if p < 0.0 { c / h } else { f64::INFINITY };
    let d_right = if betas.iter().any(|&b| b < 1.0) {
        (t - e) / h
    } else {
        f64::INFINITY
    };
    match gauss_size_for_distance(d_left.min(d_right)) {
        Some(n) => gauss(t, c, e, n, betas, p, out),
        None => split(t, c, e, 0.5 * (c + e), betas, p, out),
    }
}

/// Own-hat weights of [c, e] assembled from the two halves [c, m] and [m, e].
fn split(t: f64, c: f64, e: f64, m: f64, betas: &[f64], p: f64, out: &mut [(f64, f64)]) {
    let n = betas.len();
    let mut left = vec![(0.0, 0.0); n];
    let mut right = vec![(0.0, 0.0); n];
    piece(t, c, m, betas, p, &mut left);
    piece(t, m, e, betas, p, &mut right);
    // Parent hats at m: (e−m)/(e−c) and (m−c)/(e−c).
    let h0 = (e - m) / (e - c);
    let h1 = (m - c) / (e - c);
    for ((o, l), r) in out.iter_mut().zip(&left).zip(&right) {
        o.0 += l.0 + h0 * l.1 + h0 * r.0;
        o.1 += h1 * l.1 + h1 * r.0 + r.1;
    }
}

fn gauss(t: f64, c: f64, e: f64, n: usize, betas: &[f64], p: f64, out: &mut [(f64, f64)]) {
    let (xs, ws) = gauss_rule(n);
    let half = 0.5 * (e - c);
    let mid = 0.5 * (e + c);
    for (&x, &w) in xs.iter().zip(ws) {
        let s = mid + half * x;
        let weight = w * half * if p == 0.0 { 1.0 } else { s.powf(p) };
        let l0 = (e - s) / (e - c);
        let l1 = (s - c) / (e - c);
        let ln_ts = (t - s).ln();
        for (o, &bt) in out.iter_mut().zip(betas) {
            let k = if bt == 1.0 {
                weight
            } else {
                weight * ((bt - 1.0) * ln_ts).exp()
            };
            o.0 += k * l0;
            o.1 += k * l1;
        }
    }
}

/// Panel [a, t] ending at the evaluation point, s^p expanded about t.
fn right_end_series(t: f64, a: f64, bt: f64, p: f64) -> (f64, f64) {
    let d = t - a;
    let x = d / t;
    let scale = t.powf(p) * d.powf(bt);
    let (mut s0, mut s1) = (0.0, 0.0);
    let mut coef = 1.0;
    let mut xn = 1.0;
    for n in 0..SERIES_CAP {
        let nb = bt + n as f64;
        let term = coef * xn;
        s0 += term / (nb + 1.0);
        s1 += term / (nb * (nb + 1.0));
        if term < 1e-17 * s1.min(s0) || coef == 0.0 {
            break;
        }
        coef *= (n as f64 - p) / (n as f64 + 1.0);
        xn *= x;
    }
    (scale * s0, scale * s1)
}

/// Panel [0, b] with b < t, kernel expanded about s = 0.
fn origin_series(t: f64, b: f64, bt: f64, p: f64) -> (f64, f64) {
    let y = b / t;
    let scale = t.powf(bt - 1.0) * b.powf(p + 1.0);
    let (mut s0, mut s1) = (0.0, 0.0);
    let mut coef = 1.0;
    let mut yn = 1.0;
    for n in 0..SERIES_CAP {
        let np = p + n as f64;
        let term = coef * yn;
        s0 += term / ((np + 1.0) * (np + 2.0));
        s1 += term / (np + 2.0);
        if term < 1e-17 * s0.min(s1) || coef == 0.0 {
            break;
        }
        coef *= (n as f64 + 1.0 - bt) / (n as f64 + 1.0);
        yn *= y;
    }
    (scale * s0, scale * s1)
}

/// L1 Caputo weight of the difference quotient on [a, b] at t ≥ b:
/// ((t−a)^{1−α} − (t−b)^{1−α}) / (Γ(2−α)(b−a)).
pub(crate) fn l1_weight(t: f64, a: f64, b: f64, alpha: f64, rgamma_2ma: f64) -> f64 {
    let e = 1.0 - alpha;
    let da = t - a;
    let db = t - b;
    // (da^e − db^e) = da^e (1 − (db/da)^e), evaluated with expm1 for accuracy.
    let diff = if db == 0.0 {
        da.powf(e)
    } else {
        -da.powf(e) * (e * (db / da).ln()).exp_m1()
    };
    diff * rgamma_2ma / (b - a)
}
