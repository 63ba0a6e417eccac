//! Three independent exact engines: permutation enumeration (oracle),
//! Ryser inclusion-exclusion with Gray-code subset order, and Glynn's
//! polarization formula.
//!
//! Intermediate products are exact: each Gray-code term is a product of n
//! row sums bounded by 34, split into two u128 half-products (each at most
//! 34^17 < 2^87) and widened into a 256-bit accumulator. Terms are at most
//! 34^34 < 2^173 and there are at most 2^34 of them, so the running sums
//! stay below 2^207 and never wrap.

use super::{BigCount, SquareBitMatrix, BRUTEFORCE_DIM_LIMIT, EXACT_DIM_LIMIT};
use crate::error::Result;
use num_bigint::{BigInt, BigUint, Sign};

/// Unsigned 256-bit accumulator, little-endian u64 limbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct U256([u64; 4]);

impl U256 {
    const ZERO: U256 = U256([0; 4]);

    #[inline]
    fn add_assign(&mut self, other: U256) {
        let mut carry = 0u64;
        for i in 0..4 {
            let (s1, c1) = self.0[i].overflowing_add(other.0[i]);
            let (s2, c2) = s1.overflowing_add(carry);
            self.0[i] = s2;
            carry = (c1 as u64) + (c2 as u64);
        }
        debug_assert_eq!(carry, 0, "256-bit accumulator overflow");
    }

    /// Adds the full 256-bit product a*b.
    #[inline]
    fn add_mul(&mut self, a: u128, b: u128) {
        let (a0, a1) = (a as u64 as u128, (a >> 64) as u64 as u128);
        let (b0, b1) = (b as u64 as u128, (b >> 64) as u64 as u128);
        let p00 = a0 * b0;
        let p01 = a0 * b1;
        let p10 = a1 * b0;
        let p11 = a1 * b1;
        let mut limbs = [p00 as u64, (p00 >> 64) as u64, p11 as u64, (p11 >> 64) as u64];
        let mut prod = U256(limbs);
        // middle partials shifted by 64 bits
        limbs = [0, p01 as u64, (p01 >> 64) as u64, 0];
        prod.add_assign(U256(limbs));
        limbs = [0, p10 as u64, (p10 >> 64) as u64, 0];
        prod.add_assign(U256(limbs));
        self.add_assign(prod);
    }

    fn to_biguint(self) -> BigUint {
        let mut bytes = [0u8; 32];
        for (i, limb) in self.0.iter().enumerate() {
            bytes[i * 8..(i + 1) * 8].copy_from_slice(&limb.to_le_bytes());
        }
        BigUint::from_bytes_le(&bytes)
    }
}

/// Oracle engine: direct sum over all n! permutations. n <= 10.
pub fn permanent_bruteforce(m: &SquareBitMatrix) -> Result<BigCount> {
    m.check_dim(BRUTEFORCE_DIM_LIMIT)?;
    fn count(rows: &[u64], depth: usize, used: u64) -> u64 {
        if depth == rows.len() {
            return 1;
        }
        let mut avail = rows[depth] & !used;
        let mut total = 0;
        while avail != 0 {
            let bit = avail & avail.wrapping_neg();
            total += count(rows, depth + 1, used | bit);
            avail ^= bit;
        }
        total
    }
    Ok(BigCount::from_u64(count(m.rows(), 0, 0)))
}

/// Ryser's formula over column subsets in Gray-code order; O(2^n * n).
pub fn permanent_ryser(m: &SquareBitMatrix) -> Result<BigCount> {
    m.check_dim(EXACT_DIM_LIMIT)?;
    let n = m.n();
    if m.rows().iter().any(|&r| r == 0) {
        return Ok(BigCount::zero());
    }
    let cols: Vec<u64> = (0..n).map(|j| m.column_mask(j)).collect();
    let mut rowsums = vec![0u64; n];
    // acc[parity of |S|]
    let mut acc = [U256::ZERO, U256::ZERO];
    let half = n / 2;
    let mut parity = 0usize;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        let added = (k ^ (k >> 1)) >> j & 1 == 1;
        let mut cm = cols[j];
        if added {
            while cm != 0 {
                let i = cm.trailing_zeros() as usize;
                rowsums[i] += 1;
                cm &= cm - 1;
            }
        } else {
            while cm != 0 {
                let i = cm.trailing_zeros() as usize;
                rowsums[i] -= 1;
                cm &= cm - 1;
            }
        }
        parity ^= 1;
        let mut p1: u128 = 1;
        for &r in &rowsums[..half] {
            p1 *= r as u128;
        }
        if p1 == 0 {
            continue;
        }
        let mut p2: u128 = 1;
        for &r in &rowsums[half..] {
            p2 *= r as u128;
        }
        if p2 == 0 {
            continue;
        }
        acc[parity].add_mul(p1, p2);
    }
    // per = (-1)^n * (sum over even |S| - sum over odd |S|)
    let even = BigInt::from(acc[0].to_biguint());
    let odd = BigInt::from(acc[1].to_biguint());
    let mut per = even - odd;
    if n % 2 == 1 {
        per = -per;
    }
    debug_assert!(per.sign() != Sign::Minus, "Ryser sum must be nonnegative");
    Ok(BigCount(per.to_biguint().expect("nonnegative permanent")))
}

/// Glynn's polarization identity over sign vectors with the last sign fixed;
/// structurally independent of Ryser for cross-validation.
pub fn permanent_glynn(m: &SquareBitMatrix) -> Result<BigCount> {
    m.check_dim(EXACT_DIM_LIMIT)?;
    let n = m.n();
    if m.rows().iter().any(|&r| r == 0) {
        return Ok(BigCount::zero());
    }
    let half = n / 2;
    // signed row sums, all deltas initially +1
    let mut rowsums: Vec<i64> = m.rows().iter().map(|&r| r.count_ones() as i64).collect();
    let cols: Vec<u64> = (0..n).map(|j| m.column_mask(j)).collect();
    let mut pos = U256::ZERO;
    let mut neg = U256::ZERO;
    let mut delta_sign = 1i32;
    let mut delta_mask = 0u64; // bit j set when delta_j == -1; only first n-1 vary

    let accumulate = |rowsums: &[i64], delta_sign: i32, pos: &mut U256, neg: &mut U256| {
        let mut sign = delta_sign;
        let mut p1: u128 = 1;
        for &r in &rowsums[..half] {
            if r < 0 {
                sign = -sign;
            }
            p1 *= r.unsigned_abs() as u128;
        }
        if p1 == 0 {
            return;
        }
        let mut p2: u128 = 1;
        for &r in &rowsums[half..] {
            if r < 0 {
                sign = -sign;
            }
            p2 *= r.unsigned_abs() as u128;
        }
        if p2 == 0 {
            return;
        }
        if sign > 0 {
            pos.add_mul(p1, p2);
        } else {
            neg.add_mul(p1, p2);
        }
    };

    accumulate(&rowsums, delta_sign, &mut pos, &mut neg);
    let variants = if n == 1 { 0u64 } else { 1u64 << (n - 1) };
    for k in 1..variants {
        let j = k.trailing_zeros() as usize;
        delta_mask ^= 1 << j;
        let now_minus = delta_mask >> j & 1 == 1;
        let mut cm = cols[j];
        while cm != 0 {
            let i = cm.trailing_zeros() as usize;
            rowsums[i] += if now_minus { -2 } else { 2 };
            cm &= cm - 1;
        }
        delta_sign = -delta_sign;
        accumulate(&rowsums, delta_sign, &mut pos, &mut neg);
    }

    let diff = BigInt::from(pos.to_biguint()) - BigInt::from(neg.to_biguint());
    debug_assert!(diff.sign() != Sign::Minus, "Glynn sum must be nonnegative");
    let total = diff.to_biguint().expect("nonnegative Glynn sum");
    let denom = BigUint::from(1u64) << (n - 1);
    debug_assert!(
        (&total % &denom) == BigUint::from(0u32),
        "Glynn sum must be divisible by 2^(n-1)"
    );
    Ok(BigCount(total / denom))
}
