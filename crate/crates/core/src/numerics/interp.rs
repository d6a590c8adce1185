use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterpError {
    #[error("interpolation table needs at least 2 points, got {0}")]
    TooShort(usize),
    #[error("abscissae and ordinates differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("abscissae must be non-negative and strictly increasing (violated at index {0})")]
    NotIncreasing(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("x = {x} outside table range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("log-log interpolation needs positive data (index {0})")]
    NonPositive(usize),
}

/// Sampled function on a strictly increasing, non-negative grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl InterpolationTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, InterpError> {
        if xs.len() != ys.len() {
            return Err(InterpError::LengthMismatch(xs.len(), ys.len()));
        }
        if xs.len() < 2 {
            return Err(InterpError::TooShort(xs.len()));
        }
        for (i, (x, y)) in xs.iter().zip(&ys).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(InterpError::NonFinite(i));
            }
        }
        if xs[0] < 0.0 {
            return Err(InterpError::NotIncreasing(0));
        }
        if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(InterpError::NotIncreasing(i + 1));
        }
        Ok(Self { xs, ys })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.xs
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ys
    }

    pub fn first(&self) -> (f64, f64) {
        (self.xs[0], self.ys[0])
    }

    pub fn last(&self) -> (f64, f64) {
        let n = self.xs.len() - 1;
        (self.xs[n], self.ys[n])
    }

    /// Index `i` of the segment `[xs[i], xs[i+1]]` containing `x`.
    fn segment(&self, x: f64) -> Result<usize, InterpError> {
        let (lo, hi) = (self.xs[0], self.xs[self.xs.len() - 1]);
        if !(x >= lo && x <= hi) {
            return Err(InterpError::OutOfRange { x, lo, hi });
        }
        let i = self.xs.partition_point(|&v| v <= x);
        Ok(i.saturating_sub(1).min(self.xs.len() - 2))
    }

    /// Piecewise-linear interpolation.
    pub fn interp_linear(&self, x: f64) -> Result<f64, InterpError> {
        let i = self.segment(x)?;
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        if x == x0 {
            return Ok(y0);
        }
        if x == x1 {
            return Ok(y1);
        }
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Piecewise-linear interpolation in `(ln x, ln y)`; exact for power laws.
    pub fn interp_loglog(&self, x: f64) -> Result<f64, InterpError> {
        let i = self.segment(x)?;
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        if x == x0 {
            return Ok(y0);
        }
        if x == x1 {
            return Ok(y1);
        }
        if x0 <= 0.0 {
            return Err(InterpError::NotIncreasing(i));
        }
        if y0 <= 0.0 {
            return Err(InterpError::NonPositive(i));
        }
        if y1 <= 0.0 {
            return Err(InterpError::NonPositive(i + 1));
        }
        let slope = (y1 / y0).ln() / (x1 / x0).ln();
        Ok(y0 * (x / x0).powf(slope))
    }

    /// Trapezoid integral of the linear interpolant over the full range.
    pub fn trapezoid(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}
