//! Empirical distributions as sorted samples.
//!
//! Every risk functional in this crate acts on an [`EmpiricalSample`]: a
//! finite, nonempty, ascending-sorted vector of finite reals. Only the
//! empirical law matters, so construction discards input order. The quantile
//! estimator is the `ceil(alpha * M)`-th order statistic (no interpolation),
//! matching the lower-quantile VaR convention and keeping co-monotonic
//! additivity exact on aligned samples.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    /// Builds a sample from raw observations; sorts a copy, rejects empty or
    /// non-finite input.
    pub fn from_raw(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidParameter(
                "empirical sample must be nonempty".into(),
            ));
        }
        if let Some(bad) = raw.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "empirical sample contains non-finite entry {bad}"
            )));
        }
        let mut values = raw.to_vec();
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Empirical survival `#(values > x) / M`.
    pub fn survival(&self, x: f64) -> f64 {
        let above = self.values.partition_point(|&v| v <= x);
        (self.len() - above) as f64 / self.len() as f64
    }

    /// The `ceil(alpha * M)`-th order statistic (1-indexed), `alpha` in (0,1).
    pub fn sample_quantile(&self, alpha: f64) -> f64 {
        assert!(
            alpha > 0.0 && alpha < 1.0,
            "quantile level must lie in (0,1), got {alpha}"
        );
        let m = self.len();
        let k = (alpha * m as f64).ceil() as usize;
        self.values[k.clamp(1, m) - 1]
    }

    pub fn sample_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// `(mean of |values|^p)^(1/p)` for `p >= 1`.
    pub fn p_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "p-norm requires p >= 1, got {p}");
        let m = self.len() as f64;
        if p == 1.0 {
            return self.values.iter().map(|v| v.abs()).sum::<f64>() / m;
        }
        (self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / m).powf(1.0 / p)
    }

    /// One-column CSV dump (debugging aid exposed through the CLI).
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "value")?;
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn from_raw_sorts() {
        let s = EmpiricalSample::from_raw(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        let s = EmpiricalSample::from_raw(&[5.0]).unwrap();
        assert_eq!(s.values(), &[5.0]);
        let s = EmpiricalSample::from_raw(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn from_raw_rejects_bad_input() {
        assert!(EmpiricalSample::from_raw(&[]).is_err());
        assert!(EmpiricalSample::from_raw(&[1.0, f64::NAN]).is_err());
        assert!(EmpiricalSample::from_raw(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn survival_examples() {
        let s = EmpiricalSample::from_raw(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.survival(0.0), 0.25);
        let s = EmpiricalSample::from_raw(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.survival(4.0), 0.0);
        assert_eq!(s.survival(0.5), 1.0);
        assert_eq!(s.survival(s.min() - 1.0), 1.0);
        assert_eq!(s.survival(s.max()), 0.0);
    }

    #[test]
    fn quantile_examples() {
        let s = EmpiricalSample::from_raw(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.sample_quantile(0.9), 1.0); // ceil(3.6) = 4th
        assert_eq!(s.sample_quantile(0.75), 0.0); // ceil(3.0) = 3rd
        let s = EmpiricalSample::from_raw(&[3.0, 4.0]).unwrap();
        assert_eq!(s.p_norm(1.0), 3.5);
    }

    #[test]
    fn csv_roundtrip_shape() {
        let s = EmpiricalSample::from_raw(&[1.5, -0.5]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "value\n-0.5\n1.5\n");
    }

    proptest! {
        #[test]
        fn from_raw_is_idempotent(raw in prop::collection::vec(-1e6f64..1e6, 1..64)) {
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            let again = EmpiricalSample::from_raw(s.values()).unwrap();
            prop_assert_eq!(s, again);
        }

        #[test]
        fn survival_is_nonincreasing(
            raw in prop::collection::vec(-100.0f64..100.0, 1..64),
            xs in prop::collection::vec(-120.0f64..120.0, 2..16),
        ) {
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            let mut xs = xs;
            xs.sort_by(f64::total_cmp);
            for w in xs.windows(2) {
                prop_assert!(s.survival(w[0]) >= s.survival(w[1]));
            }
        }

        #[test]
        fn quantile_nondecreasing_and_max_tail(
            raw in prop::collection::vec(-100.0f64..100.0, 1..64),
        ) {
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for i in 1..100 {
                let q = s.sample_quantile(i as f64 / 100.0);
                prop_assert!(q >= prev);
                prev = q;
            }
            let m = s.len() as f64;
            let a = ((m - 1.0) / m + 1.0) / 2.0; // strictly above (M-1)/M
            prop_assert_eq!(s.sample_quantile(a), s.max());
        }

        #[test]
        fn p_norm_nondecreasing_in_p(raw in prop::collection::vec(-50.0f64..50.0, 1..48)) {
            let s = EmpiricalSample::from_raw(&raw).unwrap();
            let ps = [1.0, 1.5, 2.0, 3.0, 4.0];
            for w in ps.windows(2) {
                let lo = s.p_norm(w[0]);
                let hi = s.p_norm(w[1]);
                prop_assert!(lo <= hi * (1.0 + 1e-12) + 1e-300);
            }
        }
    }
}
