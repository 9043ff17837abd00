//! JSON problem descriptions. Complex numbers are `[re, im]` pairs and
//! matrices are row-major nested arrays of them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{CMatrix, C64};
use crate::cocycle::{CocycleGenerator, Generator, DEFAULT_EVOLVE_TOL};
use crate::dynamics::{RationalMap, SemigroupModel};
use crate::error::{Error, Result};
use crate::series::DEFAULT_ORDER;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupSpec {
    pub f_num: Vec<C64>,
    #[serde(default = "one")]
    pub f_den: Vec<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point_hint: Option<C64>,
}

fn one() -> Vec<C64> {
    vec![C64::new(1.0, 0.0)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Rational {
        dim: usize,
        num_coeffs: Vec<CMatrix>,
        #[serde(default = "one")]
        den_coeffs: Vec<C64>,
    },
    /// A generator from the built-in catalog, for maps that are not rational.
    Named { named: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default = "default_times")]
    pub t_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_values: Option<Vec<C64>>,
    #[serde(default = "default_disk")]
    pub disk_radius: f64,
    #[serde(default = "default_radial")]
    pub radial_nodes: usize,
    #[serde(default = "default_angular")]
    pub angular_nodes: usize,
}

fn default_times() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0, 3.0]
}
fn default_disk() -> f64 {
    0.5
}
fn default_radial() -> usize {
    2
}
fn default_angular() -> usize {
    8
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_values: default_times(),
            z_values: None,
            disk_radius: default_disk(),
            radial_nodes: default_radial(),
            angular_nodes: default_angular(),
        }
    }
}

impl GridSpec {
    /// Explicit points, or the center plus polar nodes on `radial_nodes` circles.
    pub fn points(&self, center: C64) -> Vec<C64> {
        if let Some(z) = &self.z_values {
            return z.clone();
        }
        let mut out = vec![center];
        for i in 1..=self.radial_nodes {
            let r = self.disk_radius * i as f64 / self.radial_nodes as f64;
            for j in 0..self.angular_nodes {
                let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / self.angular_nodes as f64;
                out.push(center + C64::from_polar(r, theta));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "tol_ode")]
    pub ode: f64,
    #[serde(default = "tol_sylvester")]
    pub sylvester: f64,
    #[serde(default = "tol_resonance")]
    pub resonance: f64,
}

fn tol_ode() -> f64 {
    DEFAULT_EVOLVE_TOL
}
fn tol_sylvester() -> f64 {
    1e-9
}
fn tol_resonance() -> f64 {
    crate::algebra::RESONANCE_RTOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ode: tol_ode(), sylvester: tol_sylvester(), resonance: tol_resonance() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub semigroup: SemigroupSpec,
    pub generator: GeneratorSpec,
    #[serde(default = "default_order")]
    pub truncation_order: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let zero = C64::new(0.0, 0.0);
        if self.semigroup.f_num.is_empty() {
            return Err(Error::InvalidInput("f_num is empty".into()));
        }
        if self.semigroup.f_den.first().copied().unwrap_or(zero).norm() == 0.0 {
            return Err(Error::InvalidInput("f_den vanishes at z = 0".into()));
        }
        if let GeneratorSpec::Rational { dim, num_coeffs, den_coeffs } = &self.generator {
            if *dim == 0 || num_coeffs.is_empty() {
                return Err(Error::InvalidInput("generator needs dim ≥ 1 and a coefficient".into()));
            }
            if let Some(bad) = num_coeffs.iter().find(|m| m.dim() != *dim) {
                return Err(Error::DimensionMismatch { expected: *dim, found: bad.dim() });
            }
            if den_coeffs.first().copied().unwrap_or(zero).norm() == 0.0 {
                return Err(Error::InvalidInput("den_coeffs vanish at z = 0".into()));
            }
        }
        if self.grid.t_values.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidInput("t_values must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn rational_map(&self) -> Result<RationalMap> {
        RationalMap::new(self.semigroup.f_num.clone(), self.semigroup.f_den.clone())
    }

    /// Interior model when a fixed point exists, boundary model otherwise.
    pub fn model(&self) -> Result<SemigroupModel> {
        let mut m = SemigroupModel::auto(self.rational_map()?, self.semigroup.fixed_point_hint, self.truncation_order)?;
        m.flow_tol = self.tolerances.ode;
        Ok(m)
    }

    pub fn generator(&self) -> Result<Arc<dyn Generator>> {
        match &self.generator {
            GeneratorSpec::Rational { num_coeffs, den_coeffs, .. } => {
                Ok(Arc::new(CocycleGenerator::new(num_coeffs.clone(), den_coeffs.clone())?))
            }
            GeneratorSpec::Named { named } => crate::demos::named_generator(named),
        }
    }

    /// Scenario for a rational generator.
    pub fn rational(f: &RationalMap, b: &CocycleGenerator) -> Self {
        Self {
            semigroup: SemigroupSpec {
                f_num: f.numerator.clone(),
                f_den: f.denominator.clone(),
                fixed_point_hint: None,
            },
            generator: GeneratorSpec::Rational {
                dim: b.dim,
                num_coeffs: b.matrix_numerator.clone(),
                den_coeffs: b.scalar_denominator.clone(),
            },
            truncation_order: DEFAULT_ORDER,
            grid: GridSpec::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_scenario() {
        let text = r#"{
            "semigroup": {"f_num": [[0, 0], [-1, 0]]},
            "generator": {"dim": 2, "num_coeffs": [[[[1, 0], [0, 0]], [[0, 0], [2, 0]]],
                                                   [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]]}
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.truncation_order, 24);
        let g = s.generator().unwrap();
        let b = g.eval(C64::new(0.5, 0.0)).unwrap();
        assert_eq!(b[(0, 1)], C64::new(0.5, 0.0));
        assert_eq!(s.model().unwrap().lambda(), Some(C64::new(1.0, 0.0)));
        let again = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Scenario::from_json("{").is_err());
        let ragged = r#"{"semigroup": {"f_num": [[0, 0], [-1, 0]]},
            "generator": {"dim": 2, "num_coeffs": [[[[1, 0]]]]}}"#;
        assert!(matches!(Scenario::from_json(ragged), Err(Error::DimensionMismatch { .. })));
        let pole = r#"{"semigroup": {"f_num": [[0, 0], [-1, 0]]},
            "generator": {"dim": 1, "num_coeffs": [[[[1, 0]]]], "den_coeffs": [[0, 0], [1, 0]]}}"#;
        assert!(Scenario::from_json(pole).is_err());
    }

    #[test]
    fn named_generator_resolves() {
        let text = r#"{"semigroup": {"f_num": [[0, 0], [-1, 0]]}, "generator": {"named": "sqrt-nonexp"}}"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.generator().unwrap().dim(), 1);
    }
}
