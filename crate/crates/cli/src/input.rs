//! Curve files.

use std::path::Path;

use nalgebra::DVector;
use serde::Deserialize;
use spaceforms::mobius::SampledCurve;
use spaceforms::{Kind, Model, PolygonalCurve, SpaceForm};

use crate::CliError;

/// On-disk description of a curve.
///
/// ```json
/// {"space": "sphere", "dim": 2, "closed": true,
///  "vertices": [[0, 0, 1], [1, 0, 0], [0, 1, 0]]}
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub space: Kind,
    pub dim: usize,
    #[serde(default)]
    pub model: Option<Model>,
    #[serde(default)]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub samples: Option<Vec<Vec<f64>>>,
    pub closed: bool,
}

impl CurveFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let file: CurveFile = serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("{origin}:{}:{}: {e}", e.line(), e.column())))?;
        match (&file.vertices, &file.samples) {
            (Some(_), Some(_)) => Err(CliError::Input(format!(
                "{origin}: give either \"vertices\" or \"samples\", not both"
            ))),
            (None, None) => Err(CliError::Input(format!(
                "{origin}: missing \"vertices\" or \"samples\""
            ))),
            _ => Ok(file),
        }
    }

    pub fn space(&self) -> Result<SpaceForm, CliError> {
        let model = self.model.unwrap_or(match self.space {
            Kind::Euclidean => Model::Cartesian,
            Kind::Sphere => Model::UnitSphereEmbedded,
            Kind::Hyperbolic => Model::PoincareBall,
        });
        Ok(SpaceForm::new(self.space, self.dim, model)?)
    }

    fn coords(&self) -> &[Vec<f64>] {
        self.vertices
            .as_deref()
            .or(self.samples.as_deref())
            .unwrap_or(&[])
    }

    pub fn polygonal(&self) -> Result<PolygonalCurve, CliError> {
        Ok(PolygonalCurve::from_coords(
            self.space()?,
            self.coords(),
            self.closed,
        )?)
    }

    /// Points on the unit sphere of `ℝ^(dim+1)`.
    pub fn sphere_points(&self) -> Result<Vec<DVector<f64>>, CliError> {
        let space = self.space()?;
        if space.kind() != Kind::Sphere || space.model() != Model::UnitSphereEmbedded {
            return Err(CliError::Input(
                "expected points on the unit sphere in embedded coordinates".into(),
            ));
        }
        self.coords()
            .iter()
            .map(|c| space.point(c.clone()).map(|p| p.coords().clone()))
            .collect::<spaceforms::Result<Vec<_>>>()
            .map_err(Into::into)
    }

    pub fn sampled(&self) -> Result<SampledCurve, CliError> {
        Ok(SampledCurve::new(self.sphere_points()?, self.closed)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_errors_carry_position() {
        let err = CurveFile::parse("{\n  \"space\": \"sphere\",\n  \"dim\": ,\n}", "bad.json")
            .unwrap_err();
        assert!(err.to_string().contains("bad.json:3:"), "{err}");
    }

    #[test]
    fn defaults_to_canonical_model() {
        let f = CurveFile::parse(
            r#"{"space": "hyperbolic", "dim": 3, "closed": true,
                "vertices": [[0,0,0],[0.5,0,0],[0,0.5,0]]}"#,
            "x",
        )
        .unwrap();
        assert_eq!(f.space().unwrap().model(), Model::PoincareBall);
        assert_eq!(f.polygonal().unwrap().len(), 3);
        assert!(f.sphere_points().is_err());
    }

    #[test]
    fn rejects_both_point_lists() {
        let text = r#"{"space": "euclidean", "dim": 2, "closed": false,
                       "vertices": [[0,0],[1,0]], "samples": [[0,0],[1,0]]}"#;
        assert!(CurveFile::parse(text, "x").is_err());
    }
}
