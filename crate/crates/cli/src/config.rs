//! Flat `key = value` overrides for solver tolerances.

use andrievskii::envelope::EnvelopeConfig;
use andrievskii::extremal::OracleConfig;
use andrievskii::problem::ProblemConfig;
use andrievskii::quadrature::QuadratureConfig;

/// Every tunable, with module defaults.
#[derive(Debug, Clone, Copy, Default)]
pub struct Settings {
    pub quad: QuadratureConfig,
    pub envelope: EnvelopeConfig,
    pub problem: ProblemConfig,
}

pub const KEYS: &[&str] = &[
    "quad.abs_tol",
    "quad.rel_tol",
    "quad.max_depth",
    "quad.base_nodes",
    "envelope.alpha_grid",
    "envelope.alpha_tol",
    "envelope.tie_tol",
    "envelope.root_tol",
    "envelope.scan_points",
    "oracle.grid_density",
    "oracle.refine_rounds",
    "oracle.feas_tol",
    "oracle.value_tol",
    "oracle.max_iterations",
    "problem.alpha_grid",
    "problem.alpha_tol",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("config key {key}: cannot parse {v:?}"))
}

impl Settings {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply(&mut self, text: &str) -> Result<(), String> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value, got {raw:?}", lineno + 1))?;
            self.set(k.trim(), v.trim())?;
        }
        self.sync();
        self.validate()
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let o = &mut self.problem.oracle;
        match key {
            "quad.abs_tol" => self.quad.abs_tol = num(key, v)?,
            "quad.rel_tol" => self.quad.rel_tol = num(key, v)?,
            "quad.max_depth" => self.quad.max_depth = num(key, v)?,
            "quad.base_nodes" => self.quad.base_nodes = num(key, v)?,
            "envelope.alpha_grid" => self.envelope.alpha_grid = num(key, v)?,
            "envelope.alpha_tol" => self.envelope.alpha_tol = num(key, v)?,
            "envelope.tie_tol" => self.envelope.tie_tol = num(key, v)?,
            "envelope.root_tol" => self.envelope.root_tol = num(key, v)?,
            "envelope.scan_points" => self.envelope.scan_points = num(key, v)?,
            "oracle.grid_density" => o.grid_density = Some(num(key, v)?),
            "oracle.refine_rounds" => o.refine_rounds = num(key, v)?,
            "oracle.feas_tol" => o.feas_tol = num(key, v)?,
            "oracle.value_tol" => o.value_tol = num(key, v)?,
            "oracle.max_iterations" => o.max_iterations = Some(num(key, v)?),
            "problem.alpha_grid" => self.problem.alpha_grid = num(key, v)?,
            "problem.alpha_tol" => self.problem.alpha_tol = num(key, v)?,
            _ => return Err(format!("unknown config key {key:?}; known keys: {}", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Quadrature settings feed every module that integrates.
    fn sync(&mut self) {
        self.envelope.quad = self.quad;
        self.problem.envelope = self.envelope;
    }

    pub fn validate(&self) -> Result<(), String> {
        self.problem.validate().map_err(|e| e.to_string())
    }

    pub fn oracle(&self) -> OracleConfig {
        self.problem.oracle
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_comments() {
        let mut s = Settings::default();
        s.apply("# tolerances\nquad.abs_tol = 1e-9\noracle.grid_density=128 # denser\n\n").unwrap();
        assert_eq!(s.quad.abs_tol, 1e-9);
        assert_eq!(s.envelope.quad.abs_tol, 1e-9);
        assert_eq!(s.problem.envelope.quad.abs_tol, 1e-9);
        assert_eq!(s.oracle().grid_density, Some(128));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Settings::default().apply("nonsense").is_err());
        assert!(Settings::default().apply("quad.abs_tol = x").is_err());
        assert!(Settings::default().apply("quad.unknown = 1").is_err());
        assert!(Settings::default().apply("oracle.feas_tol = -1").is_err());
    }
}
