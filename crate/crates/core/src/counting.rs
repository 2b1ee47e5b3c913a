//! Exact counts from recurrences and closed forms.
//!
//! Everything here is plain big-integer dynamic programming; the only
//! function that touches the series engine is [`count_valleyless_npk`].

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::series::{b_n_closed, Orders};
use crate::{Error, Result};

/// Binomial coefficient `C(a, b)`, zero when `b > a`.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    // acc = C(a - b + i, i) after step i; each division is exact
    for i in 1..=b {
        acc *= a - b + i;
        acc /= i;
    }
    acc
}

/// Number of permutations of length `n` with exactly `k` valleys, from
/// `P(n, k) = 2(k + 1) P(n - 1, k) + (n - 2k) P(n - 1, k - 1)` with `P(1, 0) = 1`.
pub fn count_valley_perms(n: usize, k: usize) -> Result<BigUint> {
    Ok(valley_perm_row(n)?.get(k).cloned().unwrap_or_default())
}

/// The full row `P(n, 0), ..., P(n, (n - 1) / 2)`.
pub fn valley_perm_row(n: usize) -> Result<Vec<BigUint>> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    let mut row = vec![BigUint::one()];
    for m in 2..=n {
        let width = (m - 1) / 2 + 1;
        let next = (0..width)
            .map(|k| {
                let mut v = BigUint::zero();
                if let Some(same) = row.get(k) {
                    v += same * (2 * (k as u64 + 1));
                }
                if k > 0 && 2 * k <= m {
                    if let Some(fewer) = row.get(k - 1) {
                        v += fewer * ((m - 2 * k) as u64);
                    }
                }
                v
            })
            .collect();
        row = next;
    }
    Ok(row)
}

/// Eulerian number `E(n, k)` from `E(n, k) = (k + 1) E(n - 1, k) + (n - k) E(n - 1, k - 1)`
/// with `E(1, 0) = 1`.
pub fn eulerian(n: usize, k: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    if k >= n {
        return Ok(BigUint::zero());
    }
    let mut row = vec![BigUint::one()];
    for m in 2..=n {
        let next = (0..m)
            .map(|j| {
                let mut v = BigUint::zero();
                if let Some(same) = row.get(j) {
                    v += same * (j as u64 + 1);
                }
                if j > 0 {
                    v += &row[j - 1] * ((m - j) as u64);
                }
                v
            })
            .collect();
        row = next;
    }
    Ok(row.swap_remove(k))
}

/// Number of valleyless sequences of length `n` with maximum entry exactly
/// `k`: `C(n - 1 + 2(k - 1), 2(k - 1))`.
pub fn count_valleyless_nk(n: usize, k: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("maximum entry must be at least 1".into()));
    }
    let twice = 2 * (k as u64 - 1);
    Ok(binomial(n as u64 - 1 + twice, twice))
}

/// Number of valleyless sequences of length `n`, entry sum `p` and maximum
/// entry exactly `k`.
///
/// This is the `x^n q^p` coefficient of the `y^k` term of the trivariate
/// generating function, i.e. of `x q^k (1 - x q^k) / (xq)_k^2`.
pub fn count_valleyless_npk(n: usize, p: usize, k: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("maximum entry must be at least 1".into()));
    }
    // one entry equals k, the other n - 1 are at least 1
    if p < n + k - 1 || p > n * k {
        return Ok(BigUint::zero());
    }
    let orders = Orders::new(n + 1, p + 1, 1);
    let coeff = b_n_closed(k, orders)?.coefficient(n, p, 0).clone();
    Ok(coeff.to_biguint().expect("counts are nonnegative"))
}
