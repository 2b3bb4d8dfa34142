//! Welch's unequal-variance two-sample t-test.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Mean, sample standard deviation (n − 1 divisor) and size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl SampleSummary {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("a sample needs at least 2 values"));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Ok(Self {
            mean,
            sd: var.sqrt(),
            n: samples.len(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    /// Welch–Satterthwaite.
    pub degrees_of_freedom: f64,
}

/// Two-sided Welch test of mean(a) − mean(b).
pub fn welch_t_test(a: &SampleSummary, b: &SampleSummary) -> Result<TTestResult> {
    for s in [a, b] {
        if s.n < 2 {
            return Err(Error::invalid(format!("sample size must be at least 2, got {}", s.n)));
        }
        if !(s.sd >= 0.0) || !s.sd.is_finite() || !s.mean.is_finite() {
            return Err(Error::invalid("summary needs a finite mean and sd >= 0"));
        }
    }
    let va = a.sd * a.sd / a.n as f64;
    let vb = b.sd * b.sd / b.n as f64;
    if va + vb == 0.0 {
        return Err(Error::invalid("both samples have zero variance"));
    }
    let t = (a.mean - b.mean) / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    // P(|T| > |t|) = I_{df/(df+t²)}(df/2, 1/2)
    let x = df / (df + t * t);
    let p = if x >= 1.0 { 1.0 } else { beta_reg(df / 2.0, 0.5, x) };
    Ok(TTestResult {
        t_statistic: t,
        p_value: p.clamp(f64::MIN_POSITIVE, 1.0),
        degrees_of_freedom: df,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(mean: f64, sd: f64, n: usize) -> SampleSummary {
        SampleSummary { mean, sd, n }
    }

    #[test]
    fn identical_samples() {
        let r = welch_t_test(&s(5.0, 1.0, 8), &s(5.0, 1.0, 8)).unwrap();
        assert_eq!(r.t_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn equal_variance_df_is_pooled_df() {
        let r = welch_t_test(&s(1.0, 2.0, 10), &s(0.0, 2.0, 10)).unwrap();
        assert!((r.degrees_of_freedom - 18.0).abs() < 1e-12);
    }

    #[test]
    fn known_p_value() {
        // t = 2.101 on 18 df is the two-sided 5% critical value
        let se = (2.0f64 * 4.0 / 10.0).sqrt();
        let r = welch_t_test(&s(2.100922 * se, 2.0, 10), &s(0.0, 2.0, 10)).unwrap();
        assert!((r.p_value - 0.05).abs() < 1e-6, "{}", r.p_value);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(welch_t_test(&s(1.0, 1.0, 1), &s(0.0, 1.0, 8)).is_err());
        assert!(welch_t_test(&s(1.0, 0.0, 4), &s(0.0, 0.0, 8)).is_err());
        assert!(SampleSummary::from_samples(&[1.0]).is_err());
    }

    #[test]
    fn summary_from_samples() {
        let sm = SampleSummary::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(sm.mean, 2.5);
        assert!((sm.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
