use std::io::Write;

use crate::error::{Error, Result};

/// Right-continuous empirical CDF of a finite sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCdf {
    samples: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empirical CDF needs at least one sample".into()));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::NumericalBreakdown { context: "Monte Carlo sample".into(), value: *bad });
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// `#{samples ≤ x} / count`.
    pub fn eval(&self, x: f64) -> f64 {
        self.samples.partition_point(|&v| v <= x) as f64 / self.count() as f64
    }

    /// Fraction of samples strictly above `x`.
    pub fn exceedance(&self, x: f64) -> f64 {
        1.0 - self.eval(x)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.count() as f64
    }

    /// Sample standard deviation (denominator `count − 1`; zero for one sample).
    pub fn std_dev(&self) -> f64 {
        let n = self.count();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self.samples.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    /// Empirical quantile: the smallest sample with `eval ≥ q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.count();
        let k = ((q * n as f64).ceil() as usize).clamp(1, n);
        self.samples[k - 1]
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    /// `sup_x |F̂(x) − F(x)|` for a continuous CDF `F`, evaluated at the
    /// jump points on both sides of each step.
    pub fn ks_distance<F: FnMut(f64) -> f64>(&self, mut cdf: F) -> f64 {
        self.try_ks_distance(|x| Ok(cdf(x))).expect("infallible CDF")
    }

    pub fn try_ks_distance<F: FnMut(f64) -> Result<f64>>(&self, cdf: F) -> Result<f64> {
        let values = self.samples.iter().copied().map(cdf).collect::<Result<Vec<f64>>>()?;
        Ok(self.ks_from_values(&values))
    }

    /// KS distance given `F` already evaluated at each entry of [`samples`](Self::samples).
    pub fn ks_from_values(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.samples.len(), "one CDF value per sample");
        let n = self.count() as f64;
        let mut worst: f64 = 0.0;
        let mut i = 0;
        while i < self.samples.len() {
            let mut j = i;
            while j < self.samples.len() && self.samples[j] == self.samples[i] {
                j += 1;
            }
            let f = values[i];
            worst = worst.max((j as f64 / n - f).abs()).max((f - i as f64 / n).abs());
            i = j;
        }
        worst
    }

    /// Two-sample KS distance `sup_x |F̂₁(x) − F̂₂(x)|`.
    pub fn ks_two_sample(&self, other: &EmpiricalCdf) -> f64 {
        let (a, b) = (&self.samples, &other.samples);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j) = (0, 0);
        let mut worst: f64 = 0.0;
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            worst = worst.max((i as f64 / na - j as f64 / nb).abs());
        }
        worst
    }

    /// One value per line after `#`-prefixed header lines.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> std::io::Result<()> {
        for h in header {
            writeln!(out, "# {h}")?;
        }
        for v in &self.samples {
            writeln!(out, "{v:.16e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_step() {
        let e = EmpiricalCdf::new(vec![2.0]).unwrap();
        assert_eq!(e.eval(1.999), 0.0);
        assert_eq!(e.eval(2.0), 1.0);
        assert_eq!(e.median(), 2.0);
        assert_eq!(e.std_dev(), 0.0);
        assert!(EmpiricalCdf::new(vec![]).is_err());
        assert!(EmpiricalCdf::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn ks_of_uniform_grid() {
        // Samples at (i − 1/2)/n against U(0,1): distance exactly 1/(2n).
        let n = 100;
        let e = EmpiricalCdf::new((0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()).unwrap();
        let d = e.ks_distance(|x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let e = EmpiricalCdf::new(vec![0.1, 1.0 / 3.0, 7.5e300]).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf, &["m=1".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back: Vec<f64> = text.lines().filter(|l| !l.starts_with('#')).map(|l| l.parse().unwrap()).collect();
        assert_eq!(back, e.samples());
    }

    proptest! {
        #[test]
        fn eval_is_rank_over_count(mut v in prop::collection::vec(-1e3f64..1e3, 1..60), x in -1e3f64..1e3) {
            let e = EmpiricalCdf::new(v.clone()).unwrap();
            v.sort_by(f64::total_cmp);
            prop_assert!(e.samples().windows(2).all(|w| w[0] <= w[1]));
            let rank = v.iter().filter(|&&s| s <= x).count();
            prop_assert_eq!(e.eval(x), rank as f64 / v.len() as f64);
        }

        #[test]
        fn two_sample_matches_brute_force(a in prop::collection::vec(0u8..20, 1..30), b in prop::collection::vec(0u8..20, 1..30)) {
            let ea = EmpiricalCdf::new(a.iter().map(|&v| v as f64).collect()).unwrap();
            let eb = EmpiricalCdf::new(b.iter().map(|&v| v as f64).collect()).unwrap();
            let brute = (0..20).map(|x| (ea.eval(x as f64) - eb.eval(x as f64)).abs()).fold(0.0, f64::max);
            prop_assert!((ea.ks_two_sample(&eb) - brute).abs() < 1e-15);
        }
    }
}
