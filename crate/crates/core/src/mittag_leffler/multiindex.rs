use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// All compositions (k₁,…,k_m) of a total degree k into m nonnegative parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiIndexBlock {
    pub k: u32,
    pub m: usize,
}

impl MultiIndexBlock {
    pub fn new(k: u32, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::arg("m", "at least one part is required"));
        }
        Ok(MultiIndexBlock { k, m })
    }

    /// C(k+m−1, m−1).
    pub fn len(&self) -> u128 {
        let mut c: u128 = 1;
        for i in 1..self.m as u128 {
            c = c * (self.k as u128 + i) / i;
        }
        c
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> Compositions {
        let mut first = vec![0; self.m];
        first[0] = self.k;
        Compositions { next: Some(first) }
    }
}

/// Iterator over the compositions of a block in lexicographically decreasing order.
pub struct Compositions {
    next: Option<Vec<u32>>,
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if next_composition(&mut succ) {
            self.next = Some(succ);
        }
        Some(cur)
    }
}

/// Advances `parts` to the next composition with the same total; false when exhausted.
pub(crate) fn next_composition(parts: &mut [u32]) -> bool {
    let m = parts.len();
    if m < 2 {
        return false;
    }
    let Some(j) = (0..m - 1).rev().find(|&j| parts[j] > 0) else {
        return false;
    };
    let tail = parts[m - 1];
    parts[m - 1] = 0;
    parts[j] -= 1;
    parts[j + 1] = tail + 1;
    true
}

/// k! / (k₁! ⋯ k_m!) exactly.
pub fn multinomial_coefficient(k: u64, parts: &[u64]) -> Result<BigUint> {
    let total: u128 = parts.iter().map(|&p| p as u128).sum();
    if total != k as u128 {
        return Err(Error::arg(
            "parts",
            format!("parts sum to {total}, expected {k}"),
        ));
    }
    let mut acc = BigUint::one();
    let mut n: u64 = 0;
    for &p in parts {
        // multiply by C(n + p, p)
        for i in 1..=p {
            acc *= n + i;
            acc /= i;
        }
        n += p;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_sizes() {
        for m in 1..5 {
            for k in 0..9 {
                let b = MultiIndexBlock::new(k, m).unwrap();
                let all: Vec<_> = b.iter().collect();
                assert_eq!(all.len() as u128, b.len());
                for c in &all {
                    assert_eq!(c.iter().sum::<u32>(), k);
                }
                let mut sorted = all.clone();
                sorted.dedup();
                assert_eq!(sorted.len(), all.len());
            }
        }
    }

    #[test]
    fn small_coefficients() {
        assert_eq!(
            multinomial_coefficient(2, &[1, 1]).unwrap(),
            BigUint::from(2u32)
        );
        assert_eq!(
            multinomial_coefficient(3, &[3, 0]).unwrap(),
            BigUint::from(1u32)
        );
        assert_eq!(
            multinomial_coefficient(6, &[1, 2, 3]).unwrap(),
            BigUint::from(60u32)
        );
        assert!(multinomial_coefficient(3, &[1, 1]).is_err());
    }

    #[test]
    fn beyond_u64() {
        // 60!/(30!30!) = C(60,30)
        let c = multinomial_coefficient(60, &[30, 30]).unwrap();
        assert_eq!(c.to_string(), "118264581564861424");
        let big = multinomial_coefficient(120, &[40, 40, 40]).unwrap();
        assert!(big.bits() > 64);
    }
}
