use rand::Rng;

/// Piecewise cubic Hermite interpolant: C¹ with prescribed knot slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteSpline {
    /// Panics unless the three vectors have equal length ≥ 2 and the knots increase.
    pub fn new(knots: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Self {
        assert!(knots.len() >= 2 && knots.len() == values.len() && knots.len() == slopes.len());
        assert!(knots.windows(2).all(|w| w[1] > w[0]));
        HermiteSpline {
            knots,
            values,
            slopes,
        }
    }

    /// Uniform knots on [0, horizon] with values in [lo, hi] and |slope| ≤ max_slope.
    pub fn random(
        rng: &mut impl Rng,
        horizon: f64,
        pieces: usize,
        (lo, hi): (f64, f64),
        max_slope: f64,
    ) -> Self {
        let n = pieces.max(1) + 1;
        let knots = (0..n)
            .map(|i| horizon * i as f64 / (n - 1) as f64)
            .collect();
        let values = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
        let slopes = (0..n)
            .map(|_| rng.gen_range(-max_slope..=max_slope))
            .collect();
        HermiteSpline::new(knots, values, slopes)
    }

    /// Constant extrapolation outside the knot range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.knots.len();
        if t <= self.knots[0] {
            return self.values[0];
        }
        if t >= self.knots[n - 1] {
            return self.values[n - 1];
        }
        let i = self.knots.partition_point(|k| *k <= t) - 1;
        let h = self.knots[i + 1] - self.knots[i];
        let s = (t - self.knots[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knot_data_and_cubics() {
        // p(t) = t³ − t on knots 0, 0.5, 2
        let p = |t: f64| t * t * t - t;
        let dp = |t: f64| 3.0 * t * t - 1.0;
        let k = vec![0.0, 0.5, 2.0];
        let s = HermiteSpline::new(
            k.clone(),
            k.iter().map(|&t| p(t)).collect(),
            k.iter().map(|&t| dp(t)).collect(),
        );
        for t in [0.0, 0.1, 0.5, 0.77, 1.9, 2.0] {
            assert!((s.eval(t) - p(t)).abs() < 1e-14, "{t}");
        }
    }
}
