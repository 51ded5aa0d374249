//! Summary statistics, the Student t distribution and Welch's t-test.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean and population SD (`n` denominator). Empty input gives zeros.
pub fn population_mean_sd(values: &[f64]) -> MeanSd {
    let m = mean(values);
    if values.is_empty() {
        return MeanSd::default();
    }
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
    MeanSd {
        mean: m,
        sd: libm::sqrt(var),
    }
}

/// Mean and sample SD (`n - 1` denominator). A single value has SD 0.
pub fn sample_mean_sd(values: &[f64]) -> MeanSd {
    let m = mean(values);
    if values.len() < 2 {
        return MeanSd { mean: m, sd: 0.0 };
    }
    MeanSd {
        mean: m,
        sd: libm::sqrt(sample_variance(values, m)),
    }
}

fn sample_variance(values: &[f64], m: f64) -> f64 {
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}

fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if libm::fabs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = libm::exp(a * libm::log(x) + b * libm::log(1.0 - x) - ln_beta(a, b));
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

/// Two-tailed p-value `P(|T| >= |t|)` for Student's t with `df` degrees of
/// freedom. `df` may be fractional.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5)
}

/// Student t CDF.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let tail = student_t_two_tailed(t, df) / 2.0;
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub a: MeanSd,
    pub b: MeanSd,
    /// Both samples had zero variance; `t` and `p` are the limiting values.
    pub degenerate: bool,
}

/// Welch's unequal-variance t-test with Welch–Satterthwaite degrees of
/// freedom and a two-tailed p-value.
pub fn welch_ttest(sample_a: &[f64], sample_b: &[f64]) -> Result<WelchTest> {
    let found = sample_a.len().min(sample_b.len());
    if found < 2 {
        return Err(Error::TooFewSamples { found, needed: 2 });
    }
    let (na, nb) = (sample_a.len() as f64, sample_b.len() as f64);
    let (ma, mb) = (mean(sample_a), mean(sample_b));
    let (va, vb) = (sample_variance(sample_a, ma), sample_variance(sample_b, mb));
    let a = MeanSd {
        mean: ma,
        sd: libm::sqrt(va),
    };
    let b = MeanSd {
        mean: mb,
        sd: libm::sqrt(vb),
    };
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let diff = ma - mb;
        let (t, p) = if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (diff.signum() * f64::INFINITY, 0.0)
        };
        return Ok(WelchTest {
            t,
            df: na + nb - 2.0,
            p,
            a,
            b,
            degenerate: true,
        });
    }
    let t = (ma - mb) / libm::sqrt(se2);
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    Ok(WelchTest {
        t,
        df,
        p: student_t_two_tailed(t, df),
        a,
        b,
        degenerate: false,
    })
}

/// A sample of size `n` whose sample mean and sample SD are exactly `mean`
/// and `sd` (up to rounding): values alternate around the mean, with the
/// odd one out at the mean itself when `n` is odd.
pub fn matching_moment_sample(n: usize, mean: f64, sd: f64) -> Vec<f64> {
    let pairs = n / 2;
    if pairs == 0 {
        return alloc::vec![mean; n];
    }
    let offset = sd * libm::sqrt((n as f64 - 1.0) / (2.0 * pairs as f64));
    let mut out = Vec::with_capacity(n);
    for _ in 0..pairs {
        out.push(mean + offset);
        out.push(mean - offset);
    }
    if n % 2 == 1 {
        out.push(mean);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, StudentsT};

    #[test]
    fn summaries() {
        let s = sample_mean_sd(&[80.0, 84.0]);
        assert_eq!(s.mean, 82.0);
        assert!((s.sd - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(sample_mean_sd(&[3.0, 3.0, 3.0]).sd, 0.0);
        assert_eq!(
            population_mean_sd(&[0.0, 2.0]),
            MeanSd { mean: 1.0, sd: 1.0 }
        );
    }

    #[test]
    fn t_cdf_matches_statrs() {
        for &df in &[1.0, 2.5, 7.0, 21.97, 100.0] {
            let reference = StudentsT::new(0.0, 1.0, df).unwrap();
            for &t in &[-6.0, -2.2, -0.3, 0.0, 0.7, 1.5, 3.9] {
                let ours = student_t_cdf(t, df);
                assert!((ours - reference.cdf(t)).abs() < 1e-10, "df={df} t={t}");
            }
        }
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let r = welch_ttest(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = [1.0, 2.5, 3.1, 4.0, 2.2];
        let b = [2.0, 3.5, 4.4, 5.0];
        let ab = welch_ttest(&a, &b).unwrap();
        let ba = welch_ttest(&b, &a).unwrap();
        assert_eq!(ab.t, -ba.t);
        assert_eq!(ab.p, ba.p);
        assert_eq!(ab.df, ba.df);
    }

    #[test]
    fn hand_computed() {
        // a: mean 2, var 1; b: mean 4, var 1; n = 3 each.
        // t = -2 / sqrt(2/3), df = (2/3)^2 / (2 * (1/3)^2 / 2) = 4.
        let r = welch_ttest(&[1.0, 2.0, 3.0], &[3.0, 4.0, 5.0]).unwrap();
        assert!((r.t + 2.0 / (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((r.df - 4.0).abs() < 1e-12);
        let reference = 2.0 * (1.0 - StudentsT::new(0.0, 1.0, 4.0).unwrap().cdf(r.t.abs()));
        assert!((r.p - reference).abs() < 1e-12);
    }

    #[test]
    fn degenerate_pairs() {
        let r = welch_ttest(&[2.0, 2.0], &[2.0, 2.0]).unwrap();
        assert!(r.degenerate);
        assert_eq!((r.t, r.p), (0.0, 1.0));
        let r = welch_ttest(&[2.0, 2.0], &[3.0, 3.0]).unwrap();
        assert!(r.degenerate && r.t == f64::NEG_INFINITY && r.p == 0.0);
        assert!(welch_ttest(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn matching_moments() {
        for n in [2, 5, 12, 13] {
            let s = sample_mean_sd(&matching_moment_sample(n, 83.26, 2.63));
            assert!((s.mean - 83.26).abs() < 1e-10);
            assert!((s.sd - 2.63).abs() < 1e-10, "n={n}");
        }
    }
}
