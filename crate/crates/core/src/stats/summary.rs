use crate::error::{Error, Result};

/// The six row statistics of a results table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

impl SummaryStats {
    pub const ROW_NAMES: [&'static str; 6] = ["Min", "1st Qu", "Median", "Mean", "3rd Qu", "Max"];

    /// Values in `ROW_NAMES` order.
    pub fn rows(&self) -> [f64; 6] {
        [self.min, self.q1, self.median, self.mean, self.q3, self.max]
    }

    pub fn from_rows(r: [f64; 6]) -> Self {
        SummaryStats {
            min: r[0],
            q1: r[1],
            median: r[2],
            mean: r[3],
            q3: r[4],
            max: r[5],
        }
    }
}

/// Linear-interpolation quantile at position `(n - 1) p` of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::Argument("cannot summarize an empty list".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("cannot summarize non-finite values".into()));
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let mean = (s.iter().sum::<f64>() / s.len() as f64).clamp(s[0], s[s.len() - 1]);
    Ok(SummaryStats {
        min: s[0],
        q1: quantile_sorted(&s, 0.25),
        median: quantile_sorted(&s, 0.5),
        mean,
        q3: quantile_sorted(&s, 0.75),
        max: s[s.len() - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Quantile via the textbook "1 + (n - 1) p" one-based position, computed
    /// from an insertion-sorted copy.
    fn reference_quantile(values: &[f64], p: f64) -> f64 {
        let mut v: Vec<f64> = Vec::new();
        for &x in values {
            let pos = v.iter().position(|&y| y > x).unwrap_or(v.len());
            v.insert(pos, x);
        }
        let pos = 1.0 + (v.len() as f64 - 1.0) * p;
        let j = pos.trunc() as usize;
        let g = pos - j as f64;
        if j >= v.len() {
            return v[v.len() - 1];
        }
        (1.0 - g) * v[j - 1] + g * v[j]
    }

    #[test]
    fn table_examples() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.rows(), [1.0, 1.75, 2.5, 2.5, 3.25, 4.0]);
        assert_eq!(summarize(&[5.0]).unwrap().rows(), [5.0; 6]);
        let s = summarize(&[1.0, 1.0, 1.0, 9.0]).unwrap();
        assert_eq!((s.mean, s.median), (3.0, 1.0));
        assert!(summarize(&[]).is_err());
        assert!(summarize(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn matches_reference_quantiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.random_range(1..60);
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..100.0)).collect();
            let s = summarize(&v).unwrap();
            for (got, p) in [(s.q1, 0.25), (s.median, 0.5), (s.q3, 0.75), (s.min, 0.0), (s.max, 1.0)] {
                assert!((got - reference_quantile(&v, p)).abs() <= 1e-9);
            }
            let mean = v.iter().sum::<f64>() / n as f64;
            assert!((s.mean - mean).abs() <= 1e-9);
        }
    }

    proptest! {
        #[test]
        fn ordering_invariant(v in prop::collection::vec(-1e6f64..1e6, 1..80)) {
            let s = summarize(&v).unwrap();
            prop_assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
            prop_assert!(s.min <= s.mean && s.mean <= s.max);
        }
    }
}
