use serde::Serialize;

use super::ArithError;

/// `2^32`, the fixed-point unit of probability.
pub const PROB_ONE: u64 = 1 << 32;

/// Largest trial count a binomial table is built for.
pub const MAX_BINOMIAL_TRIALS: usize = 1 << 24;

/// Probability in 32-bit fixed point.
///
/// Raw value `k` in `1..u32::MAX` means `k / 2^32`. The two end values are
/// reserved for the degenerate models: `0` is probability zero and
/// `u32::MAX` is probability one. Coding against a degenerate model emits
/// nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FixedProb(u32);

impl FixedProb {
    pub const ZERO: FixedProb = FixedProb(0);
    pub const ONE: FixedProb = FixedProb(u32::MAX);
    pub const HALF: FixedProb = FixedProb(1 << 31);

    pub const fn from_raw(raw: u32) -> Self {
        Self(raw)
    }

    /// Rounds `p` to the nearest multiple of `2^-32`; results that would
    /// land on `0` or on `2^32 - 1` or above collapse to the degenerate ends.
    pub fn quantize(p: f64) -> Self {
        if p.is_nan() || p <= 0.0 {
            return Self::ZERO;
        }
        let k = (p * PROB_ONE as f64).round();
        if k >= (PROB_ONE - 1) as f64 {
            Self::ONE
        } else {
            Self(k as u32)
        }
    }

    pub const fn raw(self) -> u32 {
        self.0
    }

    /// Probability in units of `2^-32`, in `0..=2^32`.
    pub const fn units(self) -> u64 {
        if self.0 == u32::MAX {
            PROB_ONE
        } else {
            self.0 as u64
        }
    }

    pub fn to_f64(self) -> f64 {
        self.units() as f64 / PROB_ONE as f64
    }

    pub const fn is_degenerate(self) -> bool {
        self.0 == 0 || self.0 == u32::MAX
    }
}

/// Unnormalized fixed-point binomial weights for `Binomial(m, prob)`.
///
/// Integer evaluation, fixed order: start from `2^62` at the mode
/// `floor((m+1)p)`, walk upward with `w(k+1) = w(k)(m-k)P / ((k+1)(2^32-P))`
/// then downward with `w(k-1) = w(k)k(2^32-P) / ((m-k+1)P)`, truncating each
/// quotient. Each weight is then scaled to `round(w(k) 2^32 / sum)` and
/// floored at one unit so that every count stays codable. The result sums to
/// `2^32 ± (m+1)`.
pub fn binomial_weights(m: usize, prob: FixedProb) -> Result<Vec<u64>, ArithError> {
    if prob.is_degenerate() {
        return Err(ArithError::DegenerateModel);
    }
    if m == 0 || m > MAX_BINOMIAL_TRIALS {
        return Err(ArithError::ModelTooLarge(m));
    }
    let p = prob.units() as u128;
    let q = PROB_ONE as u128 - p;
    let m128 = m as u128;
    let mode = (((m128 + 1) * p) >> 32).min(m128) as usize;

    let mut vals = vec![0u128; m + 1];
    vals[mode] = 1 << 62;
    for k in mode..m {
        let k128 = k as u128;
        vals[k + 1] = vals[k] * (m128 - k128) * p / ((k128 + 1) * q);
    }
    for k in (1..=mode).rev() {
        let k128 = k as u128;
        vals[k - 1] = vals[k] * k128 * q / ((m128 - k128 + 1) * p);
    }
    let total: u128 = vals.iter().sum();
    Ok(vals
        .iter()
        .map(|&v| ((((v << 32) + total / 2) / total) as u64).max(1))
        .collect())
}

/// Cumulative table `cum[0] = 0, ..., cum[m+1] = 2^32` for coding
/// `Binomial(m, prob)`. The unnormalized weights are brought to an exact
/// total of `2^32` by adjusting the largest weight (first index on ties),
/// repeating on the next largest while any excess remains.
pub fn binomial_cumulative(m: usize, prob: FixedProb) -> Result<Vec<u64>, ArithError> {
    let mut w = binomial_weights(m, prob)?;
    let sum: u64 = w.iter().sum();
    if sum < PROB_ONE {
        let i = argmax(&w);
        w[i] += PROB_ONE - sum;
    } else {
        let mut excess = sum - PROB_ONE;
        while excess > 0 {
            let i = argmax(&w);
            let take = excess.min(w[i] - 1);
            if take == 0 {
                return Err(ArithError::ModelTooLarge(m));
            }
            w[i] -= take;
            excess -= take;
        }
    }
    let mut cum = Vec::with_capacity(m + 2);
    let mut acc = 0u64;
    cum.push(0);
    for x in w {
        acc += x;
        cum.push(acc);
    }
    debug_assert_eq!(acc, PROB_ONE);
    Ok(cum)
}

fn argmax(w: &[u64]) -> usize {
    let mut best = 0;
    for (i, &x) in w.iter().enumerate() {
        if x > w[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_ends() {
        assert_eq!(FixedProb::quantize(0.0), FixedProb::ZERO);
        assert_eq!(FixedProb::quantize(1.0), FixedProb::ONE);
        assert_eq!(FixedProb::quantize(0.5), FixedProb::HALF);
        assert_eq!(FixedProb::quantize(1e-12), FixedProb::ZERO);
        assert_eq!(FixedProb::quantize(1.0 - 1e-12), FixedProb::ONE);
        assert_eq!(FixedProb::quantize(2f64.powi(-20)).raw(), 1 << 12);
        assert_eq!(FixedProb::ONE.units(), PROB_ONE);
        assert!((FixedProb::quantize(0.3).to_f64() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn five_fair_trials_match_pascal_row() {
        let cum = binomial_cumulative(5, FixedProb::HALF).unwrap();
        let unit = PROB_ONE / 32;
        let expect: Vec<u64> = [0u64, 1, 6, 16, 26, 31, 32].iter().map(|c| c * unit).collect();
        assert_eq!(cum, expect);
    }

    #[test]
    fn weight_sum_bookkeeping() {
        for &m in &[1usize, 2, 7, 50, 200, 1000, 5000] {
            for &p in &[0.001, 0.05, 0.3, 0.5, 0.9, 0.999] {
                let w = binomial_weights(m, FixedProb::quantize(p)).unwrap();
                let sum: u64 = w.iter().sum();
                assert!(sum.abs_diff(PROB_ONE) <= m as u64 + 1, "m={m} p={p} sum={sum}");
                assert!(w.iter().all(|&x| x >= 1));
                let cum = binomial_cumulative(m, FixedProb::quantize(p)).unwrap();
                assert_eq!(*cum.last().unwrap(), PROB_ONE);
                assert!(cum.windows(2).all(|c| c[1] > c[0]));
            }
        }
    }

    #[test]
    fn weights_track_float_pmf() {
        let m = 200usize;
        let prob = FixedProb::quantize(0.3);
        let p = prob.to_f64();
        let w = binomial_weights(m, prob).unwrap();
        let mut ln_pmf = (m as f64) * (1.0 - p).ln();
        for (k, &x) in w.iter().enumerate() {
            let expect = ln_pmf.exp() * PROB_ONE as f64;
            assert!((x as f64 - expect).abs() <= 1.0 + expect * 1e-9, "k={k}: {x} vs {expect}");
            ln_pmf += ((m - k) as f64 / (k + 1) as f64 * p / (1.0 - p)).ln();
        }
    }

    #[test]
    fn degenerate_and_oversized_models_rejected() {
        assert!(binomial_weights(4, FixedProb::ZERO).is_err());
        assert!(binomial_weights(4, FixedProb::ONE).is_err());
        assert!(binomial_weights(0, FixedProb::HALF).is_err());
    }
}
