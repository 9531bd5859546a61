//! Degree-block summation of the multinomial Mittag-Leffler series with
//! compensated f64 accumulation and selective extended-precision recomputation.

use super::extended::{ln_gamma, ln_gamma_parts, BigArith, Dd, DdArith, ExtArith};
use super::multiindex::next_composition;
use super::{MlArguments, MlOptions};
use crate::error::{Error, Result};
use crate::special::NeumaierSum;

const EPS: f64 = f64::EPSILON;

/// Caller-owned scratch state reused across evaluations.
#[derive(Default)]
pub struct MlContext {
    dd: Option<DdArith>,
    big: Vec<BigArith>,
    ln_fact: LnFact,
}

impl MlContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn dd(&mut self) -> &DdArith {
        self.dd.get_or_insert_with(DdArith::new)
    }
}

fn big_for(cache: &mut Vec<BigArith>, bits: u32) -> &BigArith {
    let bits = bits.div_ceil(64) * 64;
    if let Some(i) = cache.iter().position(|b| b.bits() == bits) {
        return &cache[i];
    }
    if cache.len() > 4 {
        cache.remove(0);
    }
    cache.push(BigArith::new(bits));
    cache.last().unwrap()
}

#[derive(Default)]
struct LnFact(Vec<f64>);

impl LnFact {
    /// ln j! for j = 0..=k.
    fn upto(&mut self, k: usize) -> &[f64] {
        if self.0.is_empty() {
            self.0.push(0.0);
        }
        while self.0.len() <= k {
            let n = self.0.len();
            self.0.push(libm::lgamma(n as f64 + 1.0));
        }
        &self.0[..=k]
    }
}

/// Sum of blocks k ≥ start, as an unevaluated double-double pair.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesSum {
    pub hi: f64,
    pub lo: f64,
    pub err: f64,
    pub terms: usize,
    pub escalated: bool,
}

impl SeriesSum {
    pub fn dd(&self) -> Dd {
        Dd::new(self.hi, self.lo)
    }
}

/// Arguments restricted to the nonzero coordinates of z.
struct Active {
    beta0: f64,
    beta: Vec<f64>,
    absz: Vec<f64>,
    lnz: Vec<f64>,
    neg: Vec<bool>,
}

/// f64 evaluation of one term: (value, ln|value|, relative error bound).
#[inline]
fn term64(a: &Active, k: u32, parts: &[u32], lf: &[f64]) -> (f64, f64, f64) {
    let mut x = a.beta0;
    let lfk = lf[k as usize];
    let mut l = lfk;
    let mut mag = 3.0 + lfk;
    let mut odd = false;
    for (j, &kj) in parts.iter().enumerate() {
        if kj == 0 {
            continue;
        }
        let kf = kj as f64;
        let lfj = lf[kj as usize];
        let zl = kf * a.lnz[j];
        l += zl - lfj;
        mag += zl.abs() + lfj;
        x += kf * a.beta[j];
        odd ^= a.neg[j] && kj % 2 == 1;
    }
    let lg = libm::lgamma(x);
    l -= lg;
    mag += lg.abs();
    let v = l.exp();
    (if odd { -v } else { v }, l, 2.0 * EPS * mag)
}

struct Pass {
    end: u32,
    sum: NeumaierSum,
    err: f64,
    terms: usize,
    max_ln: f64,
    max_partial: f64,
    tail: f64,
    /// Sum of per-term error bounds by binary exponent of the bound.
    err_hist: Vec<f64>,
    /// (value, ln|value|, error bound) of every term in enumeration order.
    cache: Vec<(f64, f64, f64)>,
}

fn first_pass(a: &Active, start: u32, tol: f64, opts: &MlOptions, lf: &mut LnFact) -> Result<Pass> {
    let m = a.beta.len();
    let mut parts = vec![0u32; m];
    let mut sum = NeumaierSum::new();
    let mut err = 0.0;
    let mut terms = 0usize;
    let mut max_ln = f64::NEG_INFINITY;
    let mut max_partial: f64 = 0.0;
    let mut hist = [f64::NAN; 3];
    let mut small_run = 0;
    let mut err_hist = vec![0.0; 2048];
    let mut cache = Vec::new();
    let mut k = start;
    loop {
        parts.iter_mut().for_each(|p| *p = 0);
        parts[0] = k;
        let mut block = 0.0;
        let lfk = lf.upto(k as usize);
        loop {
            let (v, l, rel) = term64(a, k, &parts, lfk);
            sum.add(v);
            block += v.abs();
            let e = v.abs() * rel;
            err += e;
            err_hist[(e.to_bits() >> 52) as usize & 2047] += e;
            cache.push((v, l, e));
            max_ln = max_ln.max(l);
            terms += 1;
            if !next_composition(&mut parts) {
                break;
            }
        }
        max_partial = max_partial.max(sum.value().abs());
        if terms > opts.term_cap {
            return Err(Error::NonConvergence {
                terms,
                last_block: block,
            });
        }
        hist = [hist[1], hist[2], block];
        if block < tol / 10.0 {
            small_run += 1;
        } else {
            small_run = 0;
        }
        k += 1;
        if small_run >= 3 {
            let ratio = |num: f64, den: f64| if num == 0.0 { 0.0 } else { num / den };
            let r = ratio(hist[2], hist[1]).max(ratio(hist[1], hist[0]));
            if r < 0.95 {
                let tail = hist[2] * r / (1.0 - r);
                if tail < tol / 10.0 {
                    return Ok(Pass {
                        end: k,
                        sum,
                        err,
                        terms,
                        max_ln,
                        max_partial,
                        tail,
                        err_hist,
                        cache,
                    });
                }
            }
        }
    }
}

/// Sums blocks k ≥ `start` of the series to absolute accuracy `tol`.
pub(crate) fn sum_blocks(
    args: &MlArguments,
    start: u32,
    tol: f64,
    opts: &MlOptions,
    ctx: &mut MlContext,
) -> Result<SeriesSum> {
    let zmax = args.z.iter().fold(0.0f64, |acc, z| acc.max(z.abs()));
    if zmax > opts.z_max {
        return Err(Error::ArgumentRange {
            magnitude: zmax,
            limit: opts.z_max,
        });
    }
    let mut a = Active {
        beta0: args.beta0,
        beta: Vec::new(),
        absz: Vec::new(),
        lnz: Vec::new(),
        neg: Vec::new(),
    };
    for (b, z) in args.beta.iter().zip(&args.z) {
        if *z != 0.0 {
            a.beta.push(*b);
            a.absz.push(z.abs());
            a.lnz.push(z.abs().ln());
            a.neg.push(*z < 0.0);
        }
    }
    if a.beta.is_empty() {
        if start > 0 {
            return Ok(SeriesSum {
                hi: 0.0,
                lo: 0.0,
                err: 0.0,
                terms: 1,
                escalated: false,
            });
        }
        let dd = ctx.dd();
        let r = dd.exp(&ln_gamma(dd, &Dd::from_f64(args.beta0)).neg());
        return Ok(SeriesSum {
            hi: r.hi,
            lo: r.lo,
            err: 1e-31,
            terms: 1,
            escalated: false,
        });
    }

    let pass = first_pass(&a, start, tol, opts, &mut ctx.ln_fact)?;
    let value = pass.sum.value();
    let err64 = pass.err + EPS * value.abs() + pass.tail;
    let cancellation = pass.max_partial > 1e8 * value.abs();
    if err64 <= tol / 2.0 && !cancellation {
        let (hi, lo) = pass.sum.parts();
        return Ok(SeriesSum {
            hi,
            lo,
            err: err64,
            terms: pass.terms,
            escalated: false,
        });
    }

    let n = pass.terms as f64;
    let ln_need = pass.max_ln + n.ln() - (tol / 4.0).ln();
    let bits = (ln_need / std::f64::consts::LN_2).max(0.0) + (pass.max_ln.abs() + 2.0).log2() + 8.0;
    let MlContext { dd, big, .. } = ctx;
    if bits <= 100.0 {
        let ar = dd.get_or_insert_with(DdArith::new);
        Ok(recompute(ar, &a, start, &pass, tol))
    } else {
        let ar = big_for(big, bits.ceil() as u32 + 16);
        Ok(recompute(ar, &a, start, &pass, tol))
    }
}

/// Second pass: terms whose f64 error would exceed their share of the budget
/// are recomputed in the extended arithmetic `ar`.
fn recompute<A: ExtArith>(ar: &A, a: &Active, start: u32, pass: &Pass, tol: f64) -> SeriesSum {
    let m = a.beta.len();
    // Largest threshold whose skipped terms stay within a quarter of the budget.
    let mut thr = 0.0;
    let mut skipped = 0.0;
    for (b, e) in pass.err_hist.iter().enumerate() {
        if skipped + e > tol / 4.0 {
            break;
        }
        skipped += e;
        thr = f64::from_bits(((b as u64) + 1) << 52);
    }
    let lnz: Vec<A::R> = a.absz.iter().map(|&z| ar.ln(&ar.from_f64(z))).collect();
    let beta: Vec<A::R> = a.beta.iter().map(|&b| ar.from_f64(b)).collect();
    let beta0 = ar.from_f64(a.beta0);
    let mut lf_ext: Vec<A::R> = vec![ar.from_f64(0.0)];
    let lf_ext_at = |i: usize, lf_ext: &mut Vec<A::R>| -> A::R {
        while lf_ext.len() <= i {
            let n = lf_ext.len();
            let next = ar.add(lf_ext.last().unwrap(), &ar.ln(&ar.from_f64(n as f64)));
            lf_ext.push(next);
        }
        lf_ext[i].clone()
    };

    let mut acc = ar.from_f64(0.0);
    let mut small = NeumaierSum::new();
    let mut err_small = 0.0;
    let mut n_ext = 0usize;
    let mut max_l_ext = f64::NEG_INFINITY;
    let mut parts = vec![0u32; m];
    let mut cached = pass.cache.iter();
    for k in start..pass.end {
        parts.iter_mut().for_each(|p| *p = 0);
        parts[0] = k;
        loop {
            let &(v, l, e) = cached.next().expect("cache covers every enumerated term");
            if e < thr && v.is_finite() {
                small.add(v);
                err_small += e;
            } else {
                n_ext += 1;
                max_l_ext = max_l_ext.max(l);
                let mut x = beta0.clone();
                let mut lt = lf_ext_at(k as usize, &mut lf_ext);
                let mut odd = false;
                for j in 0..m {
                    let kj = parts[j];
                    if kj == 0 {
                        continue;
                    }
                    let kf = ar.from_f64(kj as f64);
                    x = ar.add(&x, &ar.mul(&kf, &beta[j]));
                    lt = ar.add(&lt, &ar.mul(&kf, &lnz[j]));
                    lt = ar.sub(&lt, &lf_ext_at(kj as usize, &mut lf_ext));
                    odd ^= a.neg[j] && kj % 2 == 1;
                }
                let (lg, shift) = ln_gamma_parts(ar, &x);
                let mut t = ar.exp(&ar.sub(&lt, &lg));
                if let Some(p) = shift {
                    t = ar.mul(&t, &p);
                }
                acc = if odd {
                    ar.sub(&acc, &t)
                } else {
                    ar.add(&acc, &t)
                };
            }
            if !next_composition(&mut parts) {
                break;
            }
        }
    }
    let (s_hi, s_lo) = small.parts();
    acc = ar.add(&acc, &ar.from_f64(s_hi));
    acc = ar.add(&acc, &ar.from_f64(s_lo));
    let (hi, lo) = ar.to_pair(&acc);
    let ext_err = if n_ext > 0 {
        n_ext as f64 * max_l_ext.exp() * ar.unit() * (2.0 + max_l_ext.abs())
    } else {
        0.0
    };
    SeriesSum {
        hi,
        lo,
        err: err_small + ext_err + pass.tail + 1e-32 * hi.abs(),
        terms: pass.terms,
        escalated: true,
    }
}
