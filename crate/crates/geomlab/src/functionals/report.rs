//! Result type for functional evaluations that carry maximizing parameters.

use crate::geom::point::P3;

/// Value of a functional together with the maximizing parameters (when the
/// functional is a supremum), an error estimate, and the evaluation count.
#[derive(Debug, Clone)]
pub struct FunctionalReport {
    pub value: f64,
    /// Maximizing center v, when the functional is a sup over centers.
    pub argmax_point: Option<P3>,
    /// Maximizing Gaussian scale λ, when applicable.
    pub argmax_scale: Option<f64>,
    /// Nonnegative estimate combining quadrature error and search
    /// convergence; inspect before trusting tight comparisons.
    pub error_estimate: f64,
    pub evaluations: u64,
}

impl FunctionalReport {
    pub fn plain(value: f64, error_estimate: f64, evaluations: u64) -> Self {
        FunctionalReport {
            value,
            argmax_point: None,
            argmax_scale: None,
            error_estimate,
            evaluations,
        }
    }

    /// CSV row `name,value,vx,vy,vz,lambda,error,evals` (blank fields when a
    /// parameter is not applicable).
    pub fn csv_row(&self, name: &str) -> String {
        let (vx, vy, vz) = match &self.argmax_point {
            Some(p) => (p.x().to_string(), p.y().to_string(), p.z().to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        let lambda = self
            .argmax_scale
            .map(|l| l.to_string())
            .unwrap_or_default();
        format!(
            "{name},{},{vx},{vy},{vz},{lambda},{},{}",
            self.value, self.error_estimate, self.evaluations
        )
    }
}
