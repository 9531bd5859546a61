use num_traits::ToPrimitive;

use super::extended::{ln_gamma, Dd, ExtArith};
use super::multiindex::{multinomial_coefficient, next_composition};
use super::series::{sum_blocks, MlContext};
use super::{MlArguments, MlOptions};
use crate::error::{Error, Result};

/// |E_{β,β₀}(z) − 1/Γ(β₀) − Σ_j z_j E_{β,β₀+β_j}(z)|, from m + 1 separate evaluations.
pub fn ml_recurrence_residual(args: &MlArguments, tol: f64) -> Result<f64> {
    ml_recurrence_residual_with(args, tol, &MlOptions::default(), &mut MlContext::new())
}

pub fn ml_recurrence_residual_with(
    args: &MlArguments,
    tol: f64,
    opts: &MlOptions,
    ctx: &mut MlContext,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::arg("tol", "must be positive"));
    }
    let lhs = sum_blocks(args, 0, tol, opts, ctx)?.dd();
    let dd = ctx.dd();
    let mut r = lhs.sub(dd.exp(&ln_gamma(dd, &Dd::from_f64(args.beta0)).neg()));
    for j in 0..args.m() {
        let shifted = MlArguments {
            beta0: args.beta0 + args.beta[j],
            ..args.clone()
        };
        let e = sum_blocks(&shifted, 0, tol, opts, ctx)?.dd();
        r = r.sub(e.mul_f64(args.z[j]));
    }
    Ok(r.to_f64().abs())
}

/// Tail of the series after the first ℓ blocks, computed directly and through
/// the multinomial remainder identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderPair {
    pub direct_tail: f64,
    pub identity_value: f64,
}

/// Σ_{k≥ℓ} blocks versus Σ_{|l|=ℓ} (ℓ; l) Π z_j^{l_j} E_{β,β₀+l·β}(z).
pub fn ml_remainder(ell: u32, args: &MlArguments, tol: f64) -> Result<RemainderPair> {
    ml_remainder_with(ell, args, tol, &MlOptions::default(), &mut MlContext::new())
}

pub fn ml_remainder_with(
    ell: u32,
    args: &MlArguments,
    tol: f64,
    opts: &MlOptions,
    ctx: &mut MlContext,
) -> Result<RemainderPair> {
    if ell == 0 {
        return Err(Error::arg("ell", "must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::arg("tol", "must be positive"));
    }
    let m = args.m();
    let count = super::MultiIndexBlock::new(ell, m)?.len();
    if count > 1_000_000 {
        return Err(Error::arg(
            "ell",
            format!("{count} compositions exceed the enumeration limit"),
        ));
    }
    let direct = sum_blocks(args, ell, tol / 2.0, opts, ctx)?;

    let mut parts = vec![0u32; m];
    parts[0] = ell;
    let mut coeffs = Vec::with_capacity(count as usize);
    loop {
        let big: Vec<u64> = parts.iter().map(|&p| p as u64).collect();
        let mult = multinomial_coefficient(ell as u64, &big)?;
        let mut c = Dd::from_f64(mult.to_f64().unwrap_or(f64::INFINITY));
        let mut shift = args.beta0;
        for j in 0..m {
            for _ in 0..parts[j] {
                c = c.mul_f64(args.z[j]);
            }
            shift += parts[j] as f64 * args.beta[j];
        }
        coeffs.push((c, shift));
        if !next_composition(&mut parts) {
            break;
        }
    }
    // Each product c·E receives an equal share of half the budget.
    let share = tol / (2.0 * coeffs.len() as f64);
    let mut acc = Dd::from_f64(0.0);
    for (c, beta0) in coeffs {
        if c.hi == 0.0 {
            continue;
        }
        let a = MlArguments {
            beta0,
            ..args.clone()
        };
        let e = sum_blocks(&a, 0, share / c.hi.abs().max(1.0), opts, ctx)?.dd();
        acc = acc.add(c.mul(e));
    }
    Ok(RemainderPair {
        direct_tail: direct.hi + direct.lo,
        identity_value: acc.to_f64(),
    })
}
