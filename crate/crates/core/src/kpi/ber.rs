/// Bit-error tally that merges across trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BerCounter {
    pub errors: u64,
    pub bits: u64,
}

impl BerCounter {
    pub fn new(errors: u64, bits: u64) -> Self {
        Self { errors, bits }
    }

    pub fn count(tx: &[u8], rx: &[u8]) -> Self {
        let errors = tx.iter().zip(rx).filter(|(a, b)| a != b).count() as u64;
        Self { errors, bits: tx.len() as u64 }
    }

    pub fn merge(self, other: Self) -> Self {
        Self { errors: self.errors + other.errors, bits: self.bits + other.bits }
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }

    /// Wilson score interval at the given normal quantile.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        if self.bits == 0 {
            return (0.0, 1.0);
        }
        let n = self.bits as f64;
        let p = self.ber();
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        let lo = if self.errors == 0 { 0.0 } else { (centre - half).max(0.0) };
        let hi = if self.errors == self.bits { 1.0 } else { (centre + half).min(1.0) };
        (lo, hi)
    }

    /// 95% Wilson interval.
    pub fn ci95(&self) -> (f64, f64) {
        self.wilson(1.959_963_984_540_054)
    }
}

/// Pools trial tallies into one point.
pub fn ber_aggregate(trials: &[BerCounter]) -> crate::Result<BerCounter> {
    let total = trials.iter().fold(BerCounter::default(), |a, &b| a.merge(b));
    if total.bits == 0 {
        return Err(crate::Error::Config("no bits to aggregate".into()));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_zero_errors() {
        let (lo, hi) = BerCounter::new(0, 1_000_000).ci95();
        assert_eq!(lo, 0.0);
        let z2 = 1.959_963_984_540_054f64.powi(2);
        assert!((hi - z2 / (1e6 + z2)).abs() < 1e-15);
        assert!((hi - 3.84e-6).abs() < 0.01e-6);
    }

    #[test]
    fn merging_adds_counts() {
        let a = BerCounter::count(&[0, 1, 1, 0], &[0, 0, 1, 1]);
        assert_eq!(a, BerCounter::new(2, 4));
        assert_eq!(a.merge(BerCounter::new(1, 6)), BerCounter::new(3, 10));
        let (lo, hi) = a.ci95();
        assert!(lo < 0.5 && 0.5 < hi);
        assert!(ber_aggregate(&[]).is_err());
        assert_eq!(ber_aggregate(&[a, a]).unwrap(), BerCounter::new(4, 8));
    }
}
