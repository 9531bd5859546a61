//! Software extended precision: double-double and arbitrary-precision
//! fixed point, plus a Stirling ln Γ generic over both.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic context for an extended real type.
pub(crate) trait ExtArith {
    type R: Clone;
    fn from_f64(&self, x: f64) -> Self::R;
    fn to_f64(&self, a: &Self::R) -> f64;
    /// Rounded (hi, lo) pair with hi + lo ≈ a to double-double accuracy.
    fn to_pair(&self, a: &Self::R) -> (f64, f64);
    fn add(&self, a: &Self::R, b: &Self::R) -> Self::R;
    fn sub(&self, a: &Self::R, b: &Self::R) -> Self::R;
    fn mul(&self, a: &Self::R, b: &Self::R) -> Self::R;
    fn div(&self, a: &Self::R, b: &Self::R) -> Self::R;
    fn exp(&self, a: &Self::R) -> Self::R;
    /// Natural logarithm, a > 0.
    fn ln(&self, a: &Self::R) -> Self::R;
    fn stirling(&self) -> &Stirling<Self::R>;
    /// Relative rounding unit of the arithmetic.
    fn unit(&self) -> f64;
}

/// Asymptotic-series data for ln Γ.
pub(crate) struct Stirling<R> {
    /// B_{2k} / (2k (2k − 1)), k = 1..=K.
    coeffs: Vec<R>,
    half_ln_two_pi: R,
    /// Arguments are shifted up to at least this value before the series.
    x_min: f64,
    /// Coefficients past the extended ones, small enough to sum in f64.
    tail64: Vec<f64>,
}

/// ln Γ(x) for x > 0.
pub(crate) fn ln_gamma<A: ExtArith>(ar: &A, x: &A::R) -> A::R {
    let (lg, p) = ln_gamma_parts(ar, x);
    match p {
        Some(p) => ar.sub(&lg, &ar.ln(&p)),
        None => lg,
    }
}

/// (ln Γ(x + n), x (x+1) ⋯ (x+n−1)) with x + n ≥ x_min, so that
/// Γ(x) = Γ(x + n) / product. The product is `None` when n = 0.
pub(crate) fn ln_gamma_parts<A: ExtArith>(ar: &A, x: &A::R) -> (A::R, Option<A::R>) {
    let st = ar.stirling();
    let xf = ar.to_f64(x);
    let mut xs = x.clone();
    let mut shift = None;
    if xf < st.x_min {
        let n = (st.x_min - xf).ceil() as i64;
        let mut p = x.clone();
        for i in 1..n {
            p = ar.mul(&p, &ar.add(x, &ar.from_f64(i as f64)));
        }
        xs = ar.add(x, &ar.from_f64(n as f64));
        shift = Some(p);
    }
    let lnx = ar.ln(&xs);
    let mut r = ar.mul(&ar.sub(&xs, &ar.from_f64(0.5)), &lnx);
    r = ar.sub(&r, &xs);
    r = ar.add(&r, &st.half_ln_two_pi);
    let inv = ar.div(&ar.from_f64(1.0), &xs);
    let inv2 = ar.mul(&inv, &inv);
    let mut acc = ar.from_f64(0.0);
    if !st.tail64.is_empty() {
        let i2 = ar.to_f64(&inv2);
        let t = st.tail64.iter().rev().fold(0.0, |t, c| c + t * i2);
        acc = ar.from_f64(t);
    }
    // Horner form: the late coefficients are huge, so powers of 1/x must not be rounded first.
    for c in st.coeffs.iter().rev() {
        acc = ar.add(c, &ar.mul(&acc, &inv2));
    }
    r = ar.add(&r, &ar.mul(&acc, &inv));
    (r, shift)
}

/// Tangent numbers T_1..=T_n (1, 2, 16, 272, …).
fn tangent_numbers(n: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); n + 1];
    if n == 0 {
        return t;
    }
    t[1] = BigInt::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * BigInt::from(k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * BigInt::from(j - k) + &t[j] * BigInt::from(j - k + 2);
        }
    }
    t
}

/// Exact rational (sign, numerator, denominator) of B_{2k}/(2k(2k−1)).
fn stirling_rational(k: usize, tangent: &[BigInt]) -> (bool, BigInt, BigInt) {
    // B_{2k} = (−1)^{k−1} 2k T_k / (4^k (4^k − 1))
    let four_k = BigInt::one() << (2 * k);
    let den = BigInt::from(2 * k - 1) * &four_k * (&four_k - BigInt::one());
    (k % 2 == 0, tangent[k].clone(), den)
}

/// ln|B_{2k}/(2k(2k−1))| estimated in f64.
fn ln_stirling_coeff(k: usize) -> f64 {
    let kf = k as f64;
    std::f64::consts::LN_2 + crate::special::ln_gamma(2.0 * kf + 1.0)
        - 2.0 * kf * (2.0 * std::f64::consts::PI).ln()
        - (2.0 * kf * (2.0 * kf - 1.0)).ln()
}

// ---------------------------------------------------------------------------
// double-double

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Exact product by Dekker splitting; inlined, unlike a library fma call.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, b: Dd) -> Dd {
        self.add(b.neg())
    }

    #[inline]
    pub fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self.sub(b.mul_f64(q1));
        let q2 = r.hi / b.hi;
        let r = r.sub(b.mul_f64(q2));
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

const DD_LN2: Dd = Dd::new(std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);

/// Double-double tables built once in fixed point: 1/n! for n ≤ 12,
/// 2^{j/64} for j < 64 and ln(1 + j/128) for j ≤ 128.
struct DdTables {
    inv_fact: [Dd; 13],
    exp2: [Dd; 64],
    ln1p: [Dd; 129],
}

fn dd_tables() -> &'static DdTables {
    static T: OnceLock<DdTables> = OnceLock::new();
    T.get_or_init(|| {
        let ar = BigArith::new(192);
        let pair = |v: BigInt| {
            let (hi, lo) = ar.to_pair(&v);
            Dd::new(hi, lo)
        };
        let mut inv_fact = [Dd::from_f64(1.0); 13];
        let mut f = ar.from_f64(1.0);
        for (n, slot) in inv_fact.iter_mut().enumerate().skip(1) {
            f = ar.div(&f, &ar.from_f64(n as f64));
            *slot = pair(f.clone());
        }
        let ln2 = ar.ln(&ar.from_f64(2.0));
        let exp2 =
            std::array::from_fn(|j| pair(ar.exp(&ar.mul(&ar.from_f64(j as f64 / 64.0), &ln2))));
        let ln1p = std::array::from_fn(|j| pair(ar.ln(&ar.from_f64(1.0 + j as f64 / 128.0))));
        DdTables {
            inv_fact,
            exp2,
            ln1p,
        }
    })
}

#[inline]
fn pow2(e: i32) -> f64 {
    f64::from_bits(((1023 + e) as u64) << 52)
}

fn dd_exp(a: Dd) -> Dd {
    if a.hi > 709.7 {
        return Dd::from_f64(f64::INFINITY);
    }
    if a.hi < -745.0 {
        return Dd::from_f64(0.0);
    }
    let t = dd_tables();
    let k = (a.hi * (64.0 / std::f64::consts::LN_2)).round();
    // |r| ≤ ln2/128, so degree 12 leaves a relative remainder below 1e-35.
    let r = a.sub(DD_LN2.mul_f64(k / 64.0));
    let mut p = t.inv_fact[12];
    for n in (1..12).rev() {
        p = p.mul(r).add(t.inv_fact[n]);
    }
    let s = p.mul(r).add(Dd::from_f64(1.0));
    let k = k as i64;
    let s = s.mul(t.exp2[k.rem_euclid(64) as usize]);
    // Two steps keep 2^n representable for subnormal results.
    let n = k.div_euclid(64) as i32;
    let (n1, n2) = (n / 2, n - n / 2);
    s.mul_f64(pow2(n1)).mul_f64(pow2(n2))
}

fn dd_ln(a: Dd) -> Dd {
    let t = dd_tables();
    let (_, e) = libm::frexp(a.hi);
    let e = e - 1;
    let m = Dd::new(libm::scalbn(a.hi, -e), libm::scalbn(a.lo, -e));
    // m ∈ [1, 2) up to the low word; c is the nearest table point.
    let j = ((m.hi - 1.0) * 128.0).round().clamp(0.0, 128.0);
    let c = Dd::from_f64(1.0 + j / 128.0);
    // ln(m/c) = 2 atanh(r), |r| ≤ 1/513.
    let r = m.sub(c).div(m.add(c));
    let s = r.mul(r);
    let sf = s.hi;
    let tail = sf * (1.0 / 7.0 + sf * (1.0 / 9.0 + sf * (1.0 / 11.0)));
    let p = Dd::from_f64(1.0).add(s.mul(DD_THIRD.add(s.mul(DD_FIFTH.add(Dd::from_f64(tail))))));
    DD_LN2
        .mul_f64(e as f64)
        .add(t.ln1p[j as usize])
        .add(r.mul(p).mul_f64(2.0))
}

const DD_THIRD: Dd = Dd::new(0.333_333_333_333_333_3, 1.850_371_707_708_594e-17);
const DD_FIFTH: Dd = Dd::new(0.2, -1.110_223_024_625_156_6e-17);

fn big_to_dd(n: &BigInt) -> Dd {
    let hi = n.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() || hi == 0.0 {
        return Dd::from_f64(hi);
    }
    let rest = n - BigInt::from_f64_exact(hi);
    Dd::new(hi, rest.to_f64().unwrap_or(0.0))
}

trait FromF64Exact {
    fn from_f64_exact(x: f64) -> BigInt;
}

impl FromF64Exact for BigInt {
    fn from_f64_exact(x: f64) -> BigInt {
        num_traits::FromPrimitive::from_f64(x).expect("finite integral value")
    }
}

/// Double-double arithmetic (about 106 significant bits).
pub(crate) struct DdArith {
    stirling: Stirling<Dd>,
}

impl DdArith {
    pub fn new() -> Self {
        let k = 16;
        let tangent = tangent_numbers(k);
        let mut coeffs: Vec<Dd> = (1..=k)
            .map(|i| {
                let (neg, num, den) = stirling_rational(i, &tangent);
                let c = big_to_dd(&num).div(big_to_dd(&den));
                if neg {
                    c.neg()
                } else {
                    c
                }
            })
            .collect();
        // From the fifth term on, contributions at x ≥ 20 are below 2e-16.
        let tail64 = coeffs.split_off(4).iter().map(|c| c.to_f64()).collect();
        let pi = Dd::new(std::f64::consts::PI, 1.224_646_799_147_353_2e-16);
        let half_ln_two_pi = dd_ln(pi.mul_f64(2.0)).mul_f64(0.5);
        DdArith {
            stirling: Stirling {
                coeffs,
                half_ln_two_pi,
                x_min: 20.0,
                tail64,
            },
        }
    }
}

impl ExtArith for DdArith {
    type R = Dd;
    fn from_f64(&self, x: f64) -> Dd {
        Dd::from_f64(x)
    }
    fn to_f64(&self, a: &Dd) -> f64 {
        a.to_f64()
    }
    fn to_pair(&self, a: &Dd) -> (f64, f64) {
        (a.hi, a.lo)
    }
    fn add(&self, a: &Dd, b: &Dd) -> Dd {
        a.add(*b)
    }
    fn sub(&self, a: &Dd, b: &Dd) -> Dd {
        a.sub(*b)
    }
    fn mul(&self, a: &Dd, b: &Dd) -> Dd {
        a.mul(*b)
    }
    fn div(&self, a: &Dd, b: &Dd) -> Dd {
        a.div(*b)
    }
    fn exp(&self, a: &Dd) -> Dd {
        dd_exp(*a)
    }
    fn ln(&self, a: &Dd) -> Dd {
        dd_ln(*a)
    }
    fn stirling(&self) -> &Stirling<Dd> {
        &self.stirling
    }
    fn unit(&self) -> f64 {
        1.0e-31
    }
}

// ---------------------------------------------------------------------------
// arbitrary-precision fixed point

/// Fixed-point arithmetic with `bits` fractional bits: a value v is stored as
/// the integer round(v · 2^bits).
pub(crate) struct BigArith {
    bits: u32,
    one: BigInt,
    ln2: BigInt,
    stirling: Stirling<BigInt>,
}

impl BigArith {
    pub fn new(bits: u32) -> Self {
        let bits = bits.max(96);
        let one = BigInt::one() << bits;
        let mut ar = BigArith {
            bits,
            one: one.clone(),
            ln2: BigInt::zero(),
            stirling: Stirling {
                coeffs: Vec::new(),
                half_ln_two_pi: BigInt::zero(),
                x_min: 0.0,
                tail64: Vec::new(),
            },
        };
        ar.ln2 = ar.atanh_inv(3) << 1;
        let pi = (ar.atan_inv(5) << 4) - (ar.atan_inv(239) << 2);
        let half_ln_two_pi = ar.ln(&(pi << 1)) >> 1;

        let p = bits as f64 * std::f64::consts::LN_2;
        let x_min = (0.2 * bits as f64).max(20.0);
        let mut k = 1;
        while ln_stirling_coeff(k + 1) - (2 * k + 1) as f64 * x_min.ln() > -p - 8.0 {
            k += 1;
        }
        let tangent = tangent_numbers(k);
        let coeffs = (1..=k)
            .map(|i| {
                let (neg, num, den) = stirling_rational(i, &tangent);
                let c = (num << bits) / den;
                if neg {
                    -c
                } else {
                    c
                }
            })
            .collect();
        ar.stirling = Stirling {
            coeffs,
            half_ln_two_pi,
            x_min,
            tail64: Vec::new(),
        };
        ar
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Σ 1/((2k+1) n^{2k+1}).
    fn atanh_inv(&self, n: u64) -> BigInt {
        let n2 = BigInt::from(n * n);
        let mut x = &self.one / BigInt::from(n);
        let mut sum = x.clone();
        let mut k = 1u64;
        loop {
            x = &x / &n2;
            if x.is_zero() {
                break;
            }
            sum += &x / BigInt::from(2 * k + 1);
            k += 1;
        }
        sum
    }

    /// Σ (−1)^k/((2k+1) n^{2k+1}).
    fn atan_inv(&self, n: u64) -> BigInt {
        let n2 = BigInt::from(n * n);
        let mut x = &self.one / BigInt::from(n);
        let mut sum = x.clone();
        let mut k = 1u64;
        loop {
            x = &x / &n2;
            if x.is_zero() {
                break;
            }
            let t = &x / BigInt::from(2 * k + 1);
            if k % 2 == 1 {
                sum -= t;
            } else {
                sum += t;
            }
            k += 1;
        }
        sum
    }
}

fn shift(a: BigInt, s: i64) -> BigInt {
    if s >= 0 {
        a << (s as u64)
    } else {
        a >> ((-s) as u64)
    }
}

impl ExtArith for BigArith {
    type R = BigInt;

    fn from_f64(&self, x: f64) -> BigInt {
        if x == 0.0 {
            return BigInt::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let v = shift(BigInt::from(mant), e + self.bits as i64);
        if sign < 0 {
            -v
        } else {
            v
        }
    }

    fn to_f64(&self, a: &BigInt) -> f64 {
        if a.is_zero() {
            return 0.0;
        }
        let nb = a.bits() as i64;
        if nb > 64 {
            let top = (a >> ((nb - 64) as u64)).to_f64().unwrap();
            libm::scalbn(top, (nb - 64 - self.bits as i64) as i32)
        } else {
            libm::scalbn(a.to_f64().unwrap(), -(self.bits as i32))
        }
    }

    fn to_pair(&self, a: &BigInt) -> (f64, f64) {
        let hi = self.to_f64(a);
        let rest = a - self.from_f64(hi);
        (hi, self.to_f64(&rest))
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }
    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits) / b
    }

    fn exp(&self, a: &BigInt) -> BigInt {
        let af = self.to_f64(a);
        let n = (af / std::f64::consts::LN_2).round() as i64;
        let r = a - &self.ln2 * BigInt::from(n);
        let s = 12u32;
        let r = r >> s;
        let mut term = self.one.clone();
        let mut sum = self.one.clone();
        let mut k = 1u64;
        loop {
            term = ((&term * &r) >> self.bits) / BigInt::from(k);
            if term.is_zero() {
                break;
            }
            sum += &term;
            k += 1;
        }
        for _ in 0..s {
            sum = (&sum * &sum) >> self.bits;
        }
        shift(sum, n)
    }

    fn ln(&self, a: &BigInt) -> BigInt {
        assert!(a.is_positive(), "logarithm of a nonpositive value");
        let e = a.bits() as i64 - 1 - self.bits as i64;
        let mut y = shift(a.clone(), -e);
        let s = 8u32;
        for _ in 0..s {
            y = (y << self.bits).sqrt();
        }
        let w = ((&y - &self.one) << self.bits) / (&y + &self.one);
        let w2 = (&w * &w) >> self.bits;
        let mut pw = w.clone();
        let mut sum = w;
        let mut k = 1u64;
        loop {
            pw = (&pw * &w2) >> self.bits;
            if pw.is_zero() {
                break;
            }
            sum += &pw / BigInt::from(2 * k + 1);
            k += 1;
        }
        (sum << (s + 1)) + &self.ln2 * BigInt::from(e)
    }

    fn stirling(&self) -> &Stirling<BigInt> {
        &self.stirling
    }

    fn unit(&self) -> f64 {
        libm::scalbn(1.0, 20 - self.bits as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_numbers_match_known_values() {
        let t = tangent_numbers(5);
        let v: Vec<i64> = t[1..].iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(v, vec![1, 2, 16, 272, 7936]);
    }

    #[test]
    fn dd_exp_ln_round_trip() {
        let ar = DdArith::new();
        for x in [1e-3, 0.5, 1.0, 3.7, 50.0, 700.0] {
            let a = Dd::from_f64(x);
            let b = ar.exp(&ar.ln(&a));
            assert!((b.sub(a).to_f64() / x).abs() < 1e-30, "{x}");
        }
        let e = ar.exp(&Dd::from_f64(1.0));
        // e to 32 digits
        let err = e.sub(Dd::new(2.718_281_828_459_045, 1.445_646_891_729_250_2e-16));
        assert!(err.to_f64().abs() < 1e-31);
    }

    #[test]
    fn dd_ln_gamma_matches_factorials() {
        let ar = DdArith::new();
        // ln 20! = ln 2432902008176640000
        let v = ln_gamma(&ar, &Dd::from_f64(21.0));
        let exact = big_to_dd(&BigInt::from(2_432_902_008_176_640_000u64));
        let r = ar.ln(&exact);
        assert!(v.sub(r).to_f64().abs() < 1e-29);
        let half = ln_gamma(&ar, &Dd::from_f64(0.5));
        let pi = Dd::new(std::f64::consts::PI, 1.224_646_799_147_353_2e-16);
        let expect = ar.ln(&pi).mul_f64(0.5);
        assert!(half.sub(expect).to_f64().abs() < 1e-30);
    }

    #[test]
    fn big_constants_and_functions() {
        let ar = BigArith::new(300);
        let ln2 = ar.to_f64(&ar.ln2);
        assert!((ln2 - std::f64::consts::LN_2).abs() < 1e-16);
        for x in [1e-20, 0.3, 1.0, 7.25, 1e30] {
            let a = ar.from_f64(x);
            let back = ar.exp(&ar.ln(&a));
            // Fixed point: absolute resolution 2^{-300} for small x.
            let err = ar.to_f64(&(&back - &a)).abs() / x.max(1.0);
            assert!(err < 1e-80 * x.min(1.0) + 1e-88, "{x} {err}");
        }
        // Γ(1/2)² = π
        let h = ln_gamma(&ar, &ar.from_f64(0.5));
        let pi = (ar.atan_inv(5) << 4) - (ar.atan_inv(239) << 2);
        let d = ar.to_f64(&((h << 1) - ar.ln(&pi)));
        assert!(d.abs() < 1e-80, "{d}");
        // ln Γ(101) = ln 100!
        let mut f = BigInt::one();
        for i in 1..=100u32 {
            f *= i;
        }
        let lf = ar.ln(&(f << ar.bits()));
        let lg = ln_gamma(&ar, &ar.from_f64(101.0));
        assert!(ar.to_f64(&(lf - lg)).abs() < 1e-75);
    }

    #[test]
    fn big_and_dd_agree() {
        let big = BigArith::new(200);
        let dd = DdArith::new();
        for x in [0.1, 1.3, 2.5, 17.75, 60.2] {
            let a = ln_gamma(&dd, &Dd::from_f64(x));
            let b = ln_gamma(&big, &big.from_f64(x));
            let (hi, lo) = big.to_pair(&b);
            assert!(
                (a.sub(Dd::new(hi, lo))).to_f64().abs() < 1e-29 * (1.0 + a.hi.abs()),
                "{x}"
            );
        }
    }

    #[test]
    fn dd_exp_and_ln_match_fixed_point() {
        let big = BigArith::new(256);
        let dd = DdArith::new();
        for x in [
            -90.3, -41.7, -1.0, -3e-3, 0.0, 1e-9, 0.37, 5.5, 88.125, 650.9,
        ] {
            let a = dd.exp(&Dd::new(x, x * 1e-17));
            let b = big.exp(&big.add(&big.from_f64(x), &big.from_f64(x * 1e-17)));
            let diff = big.sub(&big.add(&big.from_f64(a.hi), &big.from_f64(a.lo)), &b);
            let rel = big.to_f64(&diff) / big.to_f64(&b);
            assert!(rel.abs() < 1e-31 * (1.0 + x.abs()), "exp {x}: {rel:e}");
        }
        assert_eq!(dd.exp(&Dd::from_f64(-800.0)).to_f64(), 0.0);
        let tiny = dd.exp(&Dd::from_f64(-740.0)).to_f64();
        assert!((tiny / (-740.0f64).exp() - 1.0).abs() < 1e-3);
        for x in [1e-300, 3.1e-5, 0.75, 1.0, 1.99, 2.0, 1234.5, 6.02e23, 1e300] {
            let a = dd.ln(&Dd::new(x, x * 3e-17));
            if (1e-70..=1e70).contains(&x) {
                let (hi, lo) =
                    big.to_pair(&big.ln(&big.add(&big.from_f64(x), &big.from_f64(x * 3e-17))));
                assert!(
                    a.sub(Dd::new(hi, lo)).to_f64().abs() < 1e-31 * (1.0 + hi.abs()),
                    "ln {x}"
                );
            } else {
                assert!(
                    a.to_f64().is_finite() && (a.to_f64() - x.ln()).abs() < 1e-12 * x.ln().abs(),
                    "ln {x}"
                );
            }
        }
    }
}
