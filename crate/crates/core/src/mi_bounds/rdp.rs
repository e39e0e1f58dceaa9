use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::{MiBound, MiKind};

/// Orders at which a curve is spot-checked for nonnegativity and monotonicity.
pub const MONOTONICITY_GRID: [f64; 10] =
    [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0];

#[derive(Clone)]
enum Shape {
    Linear { slope: f64 },
    Constant { epsilon: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A Rényi-DP curve `alpha -> epsilon(alpha)` on an order domain `[min, max]`.
#[derive(Clone)]
pub struct RdpCurve {
    shape: Shape,
    min_order: f64,
    max_order: f64,
    limit: Option<f64>,
    label: String,
}

impl fmt::Debug for RdpCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RdpCurve")
            .field("label", &self.label)
            .field("domain", &(self.min_order, self.max_order))
            .finish()
    }
}

impl RdpCurve {
    /// `epsilon(alpha) = slope * alpha` for every `alpha >= 1`.
    pub fn linear(slope: f64) -> Result<Self> {
        if !(slope >= 0.0) || !slope.is_finite() {
            return Err(Error::invalid(format!(
                "RDP slope {slope} must be finite and >= 0"
            )));
        }
        Ok(Self {
            shape: Shape::Linear { slope },
            min_order: 1.0,
            max_order: f64::INFINITY,
            limit: (slope == 0.0).then_some(0.0),
            label: format!("linear(slope={slope})"),
        })
    }

    /// `epsilon(alpha) = epsilon` for every order; the curve of a pure `epsilon`-DP mechanism.
    pub fn constant(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::invalid(format!("epsilon {epsilon} must be >= 0")));
        }
        Ok(Self {
            shape: Shape::Constant { epsilon },
            min_order: 1.0,
            max_order: f64::INFINITY,
            limit: Some(epsilon),
            label: format!("constant(epsilon={epsilon})"),
        })
    }

    /// Wraps an arbitrary evaluator valid on `[min_order, max_order]`.
    pub fn from_fn<F>(
        label: impl Into<String>,
        min_order: f64,
        max_order: f64,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(min_order >= 1.0) || !(max_order >= min_order) {
            return Err(Error::invalid(format!(
                "invalid order domain [{min_order}, {max_order}]"
            )));
        }
        let curve = Self {
            shape: Shape::Custom(Arc::new(f)),
            min_order,
            max_order,
            limit: None,
            label: label.into(),
        };
        curve.check_grid()?;
        Ok(curve)
    }

    /// Records the value of `epsilon(alpha)` as `alpha -> inf`, when known.
    pub fn with_limit(mut self, limit: f64) -> Self {
        self.limit = Some(limit);
        self
    }

    fn check_grid(&self) -> Result<()> {
        let mut prev = 0.0;
        for &a in MONOTONICITY_GRID
            .iter()
            .filter(|&&a| a >= self.min_order && a <= self.max_order)
        {
            let e = self.raw(a);
            if e.is_nan() || e < 0.0 {
                return Err(Error::invalid(format!(
                    "{}: epsilon({a}) = {e} is not >= 0",
                    self.label
                )));
            }
            if e < prev {
                return Err(Error::invalid(format!(
                    "{}: epsilon decreases between orders on the check grid at alpha={a}",
                    self.label
                )));
            }
            prev = e;
        }
        Ok(())
    }

    fn raw(&self, alpha: f64) -> f64 {
        match &self.shape {
            Shape::Linear { slope } => slope * alpha,
            Shape::Constant { epsilon } => *epsilon,
            Shape::Custom(f) => f(alpha),
        }
    }

    pub fn eval(&self, alpha: f64) -> Result<f64> {
        if !(alpha >= self.min_order && alpha <= self.max_order) {
            return Err(Error::OrderOutOfDomain {
                alpha,
                min: self.min_order,
                max: self.max_order,
            });
        }
        Ok(self.raw(alpha))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.min_order, self.max_order)
    }

    pub fn limit_at_infinity(&self) -> Option<f64> {
        self.limit
    }

    /// Slope of a linear curve, `None` for other shapes.
    pub fn slope(&self) -> Option<f64> {
        match self.shape {
            Shape::Linear { slope } => Some(slope),
            _ => None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Order-`alpha` information bound implied by an RDP curve: `I_alpha(X; Y) <= epsilon(alpha)`.
pub fn mi_from_rdp(curve: &RdpCurve, alpha: f64) -> Result<MiBound> {
    let eps = curve.eval(alpha)?;
    MiBound::new(
        eps,
        alpha,
        MiKind::RdpDerived,
        None,
        format!("{} at alpha={alpha}", curve.label()),
    )
}

/// Gaussian mechanism: `epsilon(alpha) = alpha * delta^2 / (2 sigma^2)`.
pub fn gaussian_rdp_curve(delta: f64, sigma: f64) -> Result<RdpCurve> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("sigma {sigma} must be > 0")));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::invalid(format!("sensitivity {delta} must be >= 0")));
    }
    let mut c = RdpCurve::linear(delta * delta / (2.0 * sigma * sigma))?;
    c.label = format!("gaussian(delta={delta}, sigma={sigma})");
    Ok(c)
}

/// Unamplified DP-SGD composition over `steps` steps: `epsilon(alpha) = alpha * T * C^2 / (2 sigma^2)`.
pub fn dpsgd_rdp_curve(steps: u64, sigma: f64, clip: f64) -> Result<RdpCurve> {
    if steps == 0 {
        return Err(Error::invalid("DP-SGD needs at least one step"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!(
            "noise multiplier {sigma} must be > 0"
        )));
    }
    if !(clip > 0.0) || !clip.is_finite() {
        return Err(Error::invalid(format!("clipping norm {clip} must be > 0")));
    }
    let mut c = RdpCurve::linear(steps as f64 * clip * clip / (2.0 * sigma * sigma))?;
    c.label = format!("dpsgd(T={steps}, sigma={sigma}, C={clip})");
    Ok(c)
}
