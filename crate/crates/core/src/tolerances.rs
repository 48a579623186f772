//! Numerical tolerances and resolutions shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Distance agreement required of every reported projection.
    pub eps_proj: f64,
    /// Relative slack admitting a local minimizer as a global one.
    pub tau_rel: f64,
    /// "Lies on the boundary" threshold, as a fraction of the clip box diameter.
    pub eps_bd_rel: f64,
    /// Spacing of the dense boundary sampling behind projections and ball tests.
    pub dense_spacing: f64,
    /// Spacing of the boundary samples carrying radius-of-curvature values.
    pub target_spacing: f64,
    /// Projections within `cluster_factor * dense_spacing` merge.
    pub cluster_factor: f64,
    /// At most this many clusters are reported for one projection set.
    pub cluster_cap: usize,
    /// Upper bound on the size of the neighborhood used by the touching-ball test.
    pub locality: f64,
    /// Number of bracket halvings when bisecting the touching-ball radius.
    pub bisection_steps: u32,
    /// Shrinking schedule for the lower semicontinuous envelope.
    pub env_radii: Vec<f64>,
    /// Default resolution of the cut-locus classifier.
    pub resolution: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_proj: 1e-6,
            tau_rel: 1e-7,
            eps_bd_rel: 1e-12,
            dense_spacing: 1e-3,
            target_spacing: 1e-2,
            cluster_factor: 3.0,
            cluster_cap: 64,
            locality: 1e-2,
            bisection_steps: 40,
            env_radii: vec![0.4, 0.2, 0.1],
            resolution: 1e-3,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 11] = [
        "eps_proj",
        "tau_rel",
        "eps_bd_rel",
        "dense_spacing",
        "target_spacing",
        "cluster_factor",
        "cluster_cap",
        "locality",
        "bisection_steps",
        "env_radii",
        "resolution",
    ];

    /// Applies one `KEY=VAL` override; `env_radii` takes a `;`-separated list.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("expected KEY=VAL, got '{assignment}'")))?;
        let key = key.trim();
        let value = value.trim();
        let num = || {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("'{key}' needs a positive number, got '{value}'"))
                })
        };
        match key {
            "eps_proj" => self.eps_proj = num()?,
            "tau_rel" => self.tau_rel = num()?,
            "eps_bd_rel" => self.eps_bd_rel = num()?,
            "dense_spacing" => self.dense_spacing = num()?,
            "target_spacing" => self.target_spacing = num()?,
            "cluster_factor" => self.cluster_factor = num()?,
            "cluster_cap" => self.cluster_cap = num()?.round().max(2.0) as usize,
            "locality" => self.locality = num()?,
            "bisection_steps" => self.bisection_steps = num()?.round() as u32,
            "resolution" => self.resolution = num()?,
            "env_radii" => {
                let radii = value
                    .split([';', ' '])
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::InvalidArgument(format!("env_radii: {e}")))?;
                if radii.is_empty() || radii.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(Error::InvalidArgument(
                        "env_radii must be a nonempty decreasing list".into(),
                    ));
                }
                self.env_radii = radii;
            }
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown tolerance '{other}' (known: {})",
                    Self::KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Radius within which nearby projections are merged into one cluster.
    pub fn cluster_radius(&self) -> f64 {
        self.cluster_factor * self.dense_spacing
    }

    /// Tolerance for the cut-locus inequality checks at grid spacing `h`.
    pub fn tol_theorem(&self, h: f64, rho_uncertainty: f64) -> f64 {
        (2.0 * rho_uncertainty).max(4.0 * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let mut t = Tolerances::default();
        t.apply_override("tau_rel=1e-8").unwrap();
        t.apply_override("env_radii=0.3;0.15").unwrap();
        assert_eq!(t.tau_rel, 1e-8);
        assert_eq!(t.env_radii, vec![0.3, 0.15]);
        assert!(t.apply_override("env_radii=0.1;0.2").is_err());
        assert!(t.apply_override("nope=1").is_err());
        assert!(t.apply_override("eps_proj=-1").is_err());
    }
}
