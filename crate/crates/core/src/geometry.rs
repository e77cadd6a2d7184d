//! Scatterer architectures: positions, spectral gaps and couplings, plus the
//! generators and the JSON file format.
//!
//! Lengths are in waist units. Gaps `eps` are internal transition energies;
//! the scattering kernels use `Delta = 2 omega0 eps`.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gap assigned by the generators, in units of `omega0`.
pub const DEFAULT_GAP: f64 = 1.0e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scatterer {
    pub x: f64,
    pub y: f64,
    pub gaps: Vec<f64>,
    /// Width of a Gaussian charge distribution; 0 is a point particle.
    pub orbital_width: f64,
}

impl Scatterer {
    pub fn point(x: f64, y: f64) -> Self {
        Scatterer {
            x,
            y,
            gaps: vec![DEFAULT_GAP],
            orbital_width: 0.0,
        }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Architecture {
    pub label: String,
    pub omega0: f64,
    pub g_coh: f64,
    pub g_inc: f64,
    pub scatterers: Vec<Scatterer>,
}

impl Architecture {
    /// Unit couplings and `omega0 = 1`.
    pub fn new(label: impl Into<String>, scatterers: Vec<Scatterer>) -> Self {
        Architecture {
            label: label.into(),
            omega0: 1.0,
            g_coh: 1.0,
            g_inc: 1.0,
            scatterers,
        }
    }

    pub fn len(&self) -> usize {
        self.scatterers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scatterers.is_empty()
    }

    /// Scaled gaps `Delta = 2 omega0 eps` of scatterer `alpha`.
    pub fn deltas(&self, alpha: usize) -> Vec<f64> {
        self.scatterers[alpha]
            .gaps
            .iter()
            .map(|e| 2.0 * self.omega0 * e)
            .collect()
    }

    pub fn with_gaps(mut self, gaps: &[f64]) -> Self {
        for s in &mut self.scatterers {
            s.gaps = gaps.to_vec();
        }
        self
    }

    pub fn with_couplings(mut self, g_coh: f64, g_inc: f64) -> Self {
        self.g_coh = g_coh;
        self.g_inc = g_inc;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.scatterers.is_empty() {
            return Err(Error::schema("scatterers", "at least one scatterer is required"));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::schema("omega0", format!("must be positive, got {}", self.omega0)));
        }
        for (name, v) in [("g_coh", self.g_coh), ("g_inc", self.g_inc)] {
            if !v.is_finite() {
                return Err(Error::schema(name, "must be finite"));
            }
        }
        for (i, s) in self.scatterers.iter().enumerate() {
            if !(s.x.is_finite() && s.y.is_finite()) {
                return Err(Error::schema(format!("scatterers[{i}]"), "position must be finite"));
            }
            if !(s.orbital_width.is_finite() && s.orbital_width >= 0.0) {
                return Err(Error::schema(
                    format!("scatterers[{i}].orbital_width"),
                    format!("must be non-negative, got {}", s.orbital_width),
                ));
            }
            for (j, g) in s.gaps.iter().enumerate() {
                if !(g.is_finite() && *g >= 0.0) {
                    return Err(Error::schema(
                        format!("scatterers[{i}].gaps[{j}]"),
                        format!("gap must be finite and non-negative, got {g}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Parses and validates the JSON file format.
    pub fn from_json(text: &str) -> Result<Self> {
        let arch: Architecture = serde_json::from_str(text).map_err(json_error)?;
        arch.validate()?;
        Ok(arch)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("architecture serializes")
    }
}

fn json_error(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("field"))
                .unwrap_or("<document>")
                .to_string();
            Error::schema(field, msg)
        }
        _ => Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    }
}

pub fn load_architecture(path: impl AsRef<Path>) -> Result<Architecture> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Architecture::from_json(&text)
}

pub fn save_architecture(arch: &Architecture, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, arch.to_json()).map_err(|e| Error::io(path, e))
}

/// `count` point scatterers spread uniformly by area over the annulus
/// `a <= r < b`, drawn from ChaCha8 seeded with `seed`.
pub fn gen_uniform_cylinder(a: f64, b: f64, count: usize, seed: u64) -> Result<Architecture> {
    if !(a >= 0.0 && a < b && b.is_finite()) {
        return Err(Error::domain(format!("annulus needs 0 <= a < b, got a = {a}, b = {b}")));
    }
    if count == 0 {
        return Err(Error::domain("scatterer count must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scatterers = (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let phi: f64 = rng.gen::<f64>() * 2.0 * PI;
            let r = (a * a + u * (b * b - a * a)).sqrt();
            Scatterer::point(r * phi.cos(), r * phi.sin())
        })
        .collect();
    Ok(Architecture::new(format!("cylinder a={a} b={b} n={count} seed={seed}"), scatterers))
}

/// `count` point scatterers equally spaced on a circle, the first at `(radius, 0)`.
pub fn gen_ring(radius: f64, count: usize) -> Result<Architecture> {
    if !(radius > 0.0 && radius.is_finite()) || count == 0 {
        return Err(Error::domain("ring needs positive radius and count"));
    }
    let scatterers = (0..count)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / count as f64;
            Scatterer::point(radius * phi.cos(), radius * phi.sin())
        })
        .collect();
    Ok(Architecture::new(format!("ring r={radius} n={count}"), scatterers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Architecture {
        let mut arch = Architecture::new(
            "three",
            vec![
                Scatterer::point(0.1, -0.2),
                Scatterer {
                    x: 1.0 / 3.0,
                    y: 2.0f64.sqrt(),
                    gaps: vec![1e-3, 0.25, 7.0],
                    orbital_width: 0.05,
                },
                Scatterer::point(-1.7e-9, 3.3),
            ],
        );
        arch.g_coh = 0.1 + 0.2;
        arch
    }

    #[test]
    fn json_round_trip_is_exact() {
        let arch = sample();
        let back = Architecture::from_json(&arch.to_json()).unwrap();
        assert_eq!(arch, back);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.json");
        save_architecture(&arch, &path).unwrap();
        assert_eq!(load_architecture(&path).unwrap(), arch);
    }

    #[test]
    fn validation_errors() {
        let mut arch = sample();
        arch.scatterers[1].gaps[1] = -0.5;
        let err = Architecture::from_json(&arch.to_json()).unwrap_err();
        assert!(matches!(&err, Error::Schema { field, .. } if field == "scatterers[1].gaps[1]"), "{err}");

        let mut arch = sample();
        arch.scatterers.clear();
        assert!(matches!(Architecture::from_json(&arch.to_json()), Err(Error::Schema { .. })));

        let missing = r#"{"label": "x", "omega0": 1, "g_coh": 1, "scatterers": []}"#;
        let err = Architecture::from_json(missing).unwrap_err();
        assert!(matches!(&err, Error::Schema { field, .. } if field == "g_inc"), "{err}");

        let broken = "{\n  \"label\": \"x\",\n  \"omega0\": ,\n}";
        match Architecture::from_json(broken).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn ring_geometry() {
        let one = gen_ring(2.0, 1).unwrap();
        assert_eq!((one.scatterers[0].x, one.scatterers[0].y), (2.0, 0.0));
        let ring = gen_ring(1.5, 7).unwrap();
        let (sx, sy) = ring.scatterers.iter().fold((0.0, 0.0), |(sx, sy), s| (sx + s.x, sy + s.y));
        assert!(sx.abs() < 1e-12 && sy.abs() < 1e-12);
        for w in ring.scatterers.windows(2) {
            let d = (w[1].angle() - w[0].angle()).rem_euclid(2.0 * PI);
            assert!((d - 2.0 * PI / 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cylinder_is_reproducible_and_bounded() {
        let a = gen_uniform_cylinder(0.4, 0.6, 500, 9).unwrap();
        let b = gen_uniform_cylinder(0.4, 0.6, 500, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_uniform_cylinder(0.4, 0.6, 500, 10).unwrap());
        assert!(a.scatterers.iter().all(|s| (0.4 - 1e-12..=0.6 + 1e-12).contains(&s.radius())));
        assert!(gen_uniform_cylinder(0.6, 0.6, 5, 1).is_err());
        let ring = gen_uniform_cylinder(1.0, 1.0 + 1e-12, 20, 3).unwrap();
        assert!(ring.scatterers.iter().all(|s| (s.radius() - 1.0).abs() < 1e-11));
    }

    #[test]
    fn cylinder_passes_chi_square_on_equal_area_bins() {
        let (a, b, n) = (0.5, 2.0, 10_000);
        let arch = gen_uniform_cylinder(a, b, n, 2024).unwrap();
        let mut counts = [0usize; 10];
        for s in &arch.scatterers {
            let u = (s.radius().powi(2) - a * a) / (b * b - a * a);
            counts[((u * 10.0) as usize).min(9)] += 1;
        }
        let expected = n as f64 / 10.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99th percentile of chi-square with 9 degrees of freedom
        assert!(chi2 < 21.666, "chi2 = {chi2}");
    }

    proptest! {
        #[test]
        fn sub_annulus_counts_match_area(seed in 0u64..1000) {
            let (a, b, n) = (1.0, 3.0, 4000);
            let arch = gen_uniform_cylinder(a, b, n, seed).unwrap();
            let (r1, r2) = (1.5, 2.2);
            let hits = arch.scatterers.iter().filter(|s| (r1..r2).contains(&s.radius())).count() as f64;
            let p = (r2 * r2 - r1 * r1) / (b * b - a * a);
            let mean = n as f64 * p;
            let sd = (n as f64 * p * (1.0 - p)).sqrt();
            prop_assert!((hits - mean).abs() < 5.0 * sd);
        }
    }
}
