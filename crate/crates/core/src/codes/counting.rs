//! Counting the distinct error operators produced by pairwise `zz` evolution.
//!
//! Expanding `prod_{k<l} (cos - i sin Z_k Z_l)` yields products of pair terms. A product
//! of at most `m` pairs is exactly an even-weight z-string of weight at most `2m`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, MAX_SPINS};

/// Largest spin count searched by [`min_ancillae`].
pub const MAX_COUNT_SPINS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorOrder {
    UpTo(usize),
    All,
}

impl ErrorOrder {
    fn max_weight(self, n: usize) -> usize {
        match self {
            ErrorOrder::UpTo(m) => (2 * m).min(n),
            ErrorOrder::All => n,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Every distinct error operator of order `<= max_order` on `n` spins, identity first,
/// then by weight and by spin mask.
pub fn enumerate_zz_errors(n: usize, max_order: ErrorOrder) -> Result<Vec<PauliString>> {
    if !(2..=MAX_SPINS).contains(&n) {
        return Err(Error::InvalidArgument(format!("error enumeration needs 2..={MAX_SPINS} spins, got {n}")));
    }
    let wmax = max_order.max_weight(n);
    let mut masks: Vec<u32> = (0u32..1 << n)
        .filter(|m| m.count_ones() % 2 == 0 && m.count_ones() as usize <= wmax)
        .collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    Ok(masks.into_iter().map(|m| PauliString::z_mask(n, m)).collect())
}

/// Number of distinct errors of exact order `m` on `n` spins: `C(n, 2m)`.
pub fn count_of_order(n: usize, m: usize) -> u128 {
    binomial(n, 2 * m)
}

/// Number of distinct errors of order `<= max_order`, identity included.
pub fn error_count(n: usize, max_order: ErrorOrder) -> u128 {
    let wmax = max_order.max_weight(n);
    (0..=wmax / 2).map(|m| count_of_order(n, m)).sum()
}

/// The sum as printed for the total error count, `sum_m C(N-1, m) 2^m` (equals `3^(N-1)`).
pub fn printed_total_sum(n: usize) -> u128 {
    (0..n).map(|m| binomial(n - 1, m) << m).sum()
}

/// The capacity sum as printed, `sum_{m <= m_max} C(N, 2m) 2^m`.
pub fn printed_capacity_sum(n: usize, m_max: usize) -> u128 {
    (0..=m_max).map(|m| binomial(n, 2 * m) << m).sum()
}

/// Smallest ancilla count whose `2^N_a` subspaces hold every error of order `<= m_max`.
pub fn min_ancillae(n_data: usize, m_max: usize) -> Result<usize> {
    if n_data == 0 || m_max == 0 {
        return Err(Error::InvalidArgument("n_data and m_max must be at least 1".into()));
    }
    (0..=MAX_COUNT_SPINS - n_data)
        .find(|&na| error_count(n_data + na, ErrorOrder::UpTo(m_max)) <= 1u128 << na)
        .ok_or_else(|| Error::InvalidArgument(format!("no ancilla count up to {MAX_COUNT_SPINS} spins suffices")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderCount {
    pub order: usize,
    pub count: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityReport {
    pub n_data: usize,
    pub m_max: usize,
    pub min_ancillae: usize,
    pub nspins: usize,
    /// Errors of order `<= m_max` on `nspins` spins, identity included.
    pub error_count: u128,
    pub capacity: u128,
    pub census: Vec<OrderCount>,
    /// Simplified bound as printed, `N_a >= 2 m_max` (stated for two data spins).
    pub printed_bound_min_ancillae: usize,
    pub printed_capacity_sum: u128,
    pub all_orders_count: u128,
    pub printed_total_sum: u128,
}

/// Capacity census. With `nspins` given, the census is taken on that many spins instead
/// of at the minimal ancilla count.
pub fn capacity(n_data: usize, m_max: usize, nspins: Option<usize>) -> Result<CapacityReport> {
    let min_na = min_ancillae(n_data, m_max)?;
    let n = match nspins {
        Some(n) if n < n_data.max(2) => {
            return Err(Error::InvalidArgument(format!("nspins {n} is smaller than the data spins")))
        }
        Some(n) => n,
        None => n_data + min_na,
    };
    let order = ErrorOrder::UpTo(m_max);
    let census = (0..=order.max_weight(n) / 2)
        .map(|m| OrderCount {
            order: m,
            count: count_of_order(n, m),
        })
        .collect();
    Ok(CapacityReport {
        n_data,
        m_max,
        min_ancillae: min_na,
        nspins: n,
        error_count: error_count(n, order),
        capacity: 1u128 << (n - n_data),
        census,
        printed_bound_min_ancillae: 2 * m_max,
        printed_capacity_sum: printed_capacity_sum(n, m_max),
        all_orders_count: error_count(n, ErrorOrder::All),
        printed_total_sum: printed_total_sum(n),
    })
}
