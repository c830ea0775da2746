use crate::dsp::RawSignal;
use crate::error::{Error, Result};

/// Natural cubic spline through uniformly spaced knots, parameterized in
/// knot-index units.
#[derive(Clone, Debug)]
pub struct NaturalCubicSpline<'a> {
    knots: &'a [f64],
    /// Second derivatives at each knot (index units); zero at both ends.
    curvature: Vec<f64>,
}

impl<'a> NaturalCubicSpline<'a> {
    pub fn new(knots: &'a [f64]) -> Result<Self> {
        if knots.len() < 4 {
            return Err(Error::InsufficientData(format!(
                "cubic spline needs at least 4 samples, got {}",
                knots.len()
            )));
        }
        let n = knots.len();
        let m = n - 2;
        // Tridiagonal system: M[i-1] + 4 M[i] + M[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]).
        let mut diag = vec![4.0; m];
        let mut rhs: Vec<f64> = (1..n - 1)
            .map(|i| 6.0 * (knots[i + 1] - 2.0 * knots[i] + knots[i - 1]))
            .collect();
        for i in 1..m {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        let mut curvature = vec![0.0; n];
        curvature[m] = rhs[m - 1] / diag[m - 1];
        for i in (1..m).rev() {
            curvature[i] = (rhs[i - 1] - curvature[i + 1]) / diag[i - 1];
        }
        Ok(Self { knots, curvature })
    }

    /// Value at fractional knot position `pos` (clamped to the knot range).
    /// Exact at integer positions.
    pub fn eval(&self, pos: f64) -> f64 {
        let last = self.knots.len() - 1;
        if pos <= 0.0 {
            return self.knots[0];
        }
        if pos >= last as f64 {
            return self.knots[last];
        }
        let i = pos.floor() as usize;
        let u = pos - i as f64;
        let (y0, y1) = (self.knots[i], self.knots[i + 1]);
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        y0 + u * (y1 - y0 - (2.0 * m0 + m1) / 6.0) + u * u * (m0 / 2.0) + u * u * u * ((m1 - m0) / 6.0)
    }
}

/// Resamples `signal` to `target_rate` by evaluating a natural cubic spline
/// through the original samples at every `k / target_rate` that does not
/// pass the last original sample.
pub fn cubic_spline_resample(signal: &RawSignal, target_rate: f64) -> Result<RawSignal> {
    if !(target_rate > 0.0 && target_rate.is_finite()) {
        return Err(Error::Parameter(format!(
            "target rate must be positive, got {target_rate}"
        )));
    }
    let spline = NaturalCubicSpline::new(signal.samples())?;
    let rate = signal.sampling_rate();
    let last = (signal.len() - 1) as f64;
    let count = (last * target_rate / rate + 1e-9).floor() as usize + 1;
    let samples = (0..count).map(|k| spline.eval(k as f64 * rate / target_rate)).collect();
    RawSignal::new(samples, target_rate)
}
