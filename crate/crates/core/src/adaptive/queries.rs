use super::QuerySpec;
use crate::error::{ensure_positive, Error, Result};
use crate::{LqBall, Norm};

/// Lower median of values in `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct BoundedMedian {
    lo: f64,
    hi: f64,
    domain: LqBall,
}

impl BoundedMedian {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::param(format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        let domain = LqBall::new(Norm::Linf, vec![0.5 * (lo + hi)], 0.5 * (hi - lo))?;
        Ok(Self { lo, hi, domain })
    }

    fn sorted(&self, data: &[f64]) -> Result<Vec<f64>> {
        if data.is_empty() {
            return Err(Error::data("dataset is empty"));
        }
        if data.iter().any(|v| !(self.lo..=self.hi).contains(v)) {
            return Err(Error::data(format!("values must lie in [{}, {}]", self.lo, self.hi)));
        }
        let mut s = data.to_vec();
        s.sort_by(f64::total_cmp);
        Ok(s)
    }

    /// Order statistic of the sorted data padded with `lo` below and `hi`
    /// above; index 1 is the smallest record.
    fn padded(&self, s: &[f64], i: isize) -> f64 {
        if i < 1 {
            self.lo
        } else if i as usize > s.len() {
            self.hi
        } else {
            s[i as usize - 1]
        }
    }

    /// `A_k = max_{t=0..k+1} (y_{m+t} − y_{m+t−k−1})`, the largest local
    /// sensitivity among datasets within `k` replacements.
    fn reach(&self, s: &[f64], k: usize) -> f64 {
        let m = ((s.len() - 1) / 2 + 1) as isize;
        let k = k as isize;
        (0..=k + 1).map(|t| self.padded(s, m + t) - self.padded(s, m + t - k - 1)).fold(0.0, f64::max)
    }
}

impl QuerySpec for BoundedMedian {
    type Data = [f64];

    fn domain(&self) -> &LqBall {
        &self.domain
    }

    fn evaluate(&self, data: &[f64]) -> Result<Vec<f64>> {
        let s = self.sorted(data)?;
        Ok(vec![s[(s.len() - 1) / 2]])
    }

    fn local_sensitivity(&self, data: &[f64]) -> Option<f64> {
        let s = self.sorted(data).ok()?;
        Some(self.reach(&s, 0))
    }

    fn distance_to_violation(&self, data: &[f64], beta: f64) -> Option<usize> {
        let s = self.sorted(data).ok()?;
        // A_k reaches hi − lo once k covers the whole padded range.
        let cap = s.len() + 2;
        Some((0..=cap).find(|&k| self.reach(&s, k) > beta).unwrap_or(usize::MAX))
    }
}

/// `q(D) = w·hist(D)/n` over `d` categories, released in the `ℓ2` ball of
/// radius `w`. Replacing one record moves it by exactly `w√2/n`.
#[derive(Debug, Clone)]
pub struct ScaledHistogram {
    weight: f64,
    domain: LqBall,
}

impl ScaledHistogram {
    pub fn new(categories: usize, weight: f64) -> Result<Self> {
        ensure_positive("weight", weight)?;
        Ok(Self { weight, domain: LqBall::centered(Norm::L2, categories, weight)? })
    }
}

impl QuerySpec for ScaledHistogram {
    type Data = [usize];

    fn domain(&self) -> &LqBall {
        &self.domain
    }

    fn evaluate(&self, data: &[usize]) -> Result<Vec<f64>> {
        if data.is_empty() {
            return Err(Error::data("dataset is empty"));
        }
        let d = self.dim();
        let mut q = vec![0.0; d];
        for &c in data {
            if c >= d {
                return Err(Error::data(format!("category {c} outside 0..{d}")));
            }
            q[c] += 1.0;
        }
        let n = data.len() as f64;
        q.iter_mut().for_each(|v| *v *= self.weight / n);
        Ok(q)
    }

    fn local_sensitivity(&self, data: &[usize]) -> Option<f64> {
        (!data.is_empty()).then(|| self.weight * std::f64::consts::SQRT_2 / data.len() as f64)
    }

    fn distance_to_violation(&self, data: &[usize], beta: f64) -> Option<usize> {
        let ls = self.local_sensitivity(data)?;
        Some(if ls > beta { 0 } else { usize::MAX })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIVERSE: [f64; 3] = [0.0, 0.5, 1.0];

    fn lower_median(counts: [usize; 3]) -> f64 {
        let n: usize = counts.iter().sum();
        let m = (n - 1) / 2;
        let mut seen = 0;
        for (i, &c) in counts.iter().enumerate() {
            seen += c;
            if seen > m {
                return UNIVERSE[i];
            }
        }
        unreachable!()
    }

    fn multisets(n: usize) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for a in 0..=n {
            for b in 0..=n - a {
                out.push([a, b, n - a - b]);
            }
        }
        out
    }

    fn distance(x: [usize; 3], y: [usize; 3]) -> usize {
        let n: usize = x.iter().sum();
        n - (0..3).map(|i| x[i].min(y[i])).sum::<usize>()
    }

    fn to_data(c: [usize; 3]) -> Vec<f64> {
        (0..3).flat_map(|i| std::iter::repeat_n(UNIVERSE[i], c[i])).collect()
    }

    #[test]
    fn median_oracles_match_brute_force() {
        let q = BoundedMedian::new(0.0, 1.0).unwrap();
        for n in 1..=6 {
            let all = multisets(n);
            let ls_brute = |x: [usize; 3]| -> f64 {
                all.iter()
                    .filter(|y| distance(x, **y) == 1)
                    .map(|y| (lower_median(*y) - lower_median(x)).abs())
                    .fold(0.0, f64::max)
            };
            for &x in &all {
                let data = to_data(x);
                assert_eq!(q.evaluate(&data).unwrap()[0], lower_median(x));
                let ls = q.local_sensitivity(&data).unwrap();
                assert_eq!(ls, ls_brute(x), "LS at {x:?}");
                for beta in [0.0, 0.25, 0.5, 0.75, 1.0] {
                    let brute = all
                        .iter()
                        .filter(|y| ls_brute(**y) > beta)
                        .map(|y| distance(x, *y))
                        .min()
                        .unwrap_or(usize::MAX);
                    let got = q.distance_to_violation(&data, beta).unwrap();
                    assert_eq!(got, brute, "D_beta at {x:?}, beta {beta}");
                    assert_eq!(got == 0, ls > beta);
                }
            }
        }
    }

    #[test]
    fn histogram_sensitivity_is_exact() {
        let q = ScaledHistogram::new(3, 2.0).unwrap();
        let a = [0usize, 1, 1, 2];
        let b = [0usize, 1, 2, 2];
        let qa = q.evaluate(&a).unwrap();
        let qb = q.evaluate(&b).unwrap();
        let diff = Norm::L2.of(&crate::linalg::sub(&qa, &qb));
        assert!((diff - q.local_sensitivity(&a).unwrap()).abs() < 1e-15);
        assert!(q.domain().contains(&qa));
        assert_eq!(q.distance_to_violation(&a, 0.8), Some(usize::MAX));
        assert_eq!(q.distance_to_violation(&a, 0.5), Some(0));
    }
}
