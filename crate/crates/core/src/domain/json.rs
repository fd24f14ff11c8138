//! JSON document format for fractured domains.
//!
//! ```json
//! {
//!   "bounding_box": [[0, 0], [1, 1]],
//!   "components": {
//!     "bulk":   [{ "vertices": [[0,0],[0.5,0],[0.5,1],[0,1]],
//!                  "edges": ["outer", {"crack": 0}, "outer", "outer"],
//!                  "beta": [1, 0], "alpha": 0, "f": 0, "g": 1 }],
//!     "cracks": [{ "vertices": [[0.5,0],[0.5,1]], "start": "outer", "end": "outer",
//!                  "left": 0, "right": 1, "speed": 1 }],
//!     "points": []
//!   }
//! }
//! ```
//!
//! Edge `k` of a bulk loop runs from vertex `k` to vertex `k + 1`. Crack
//! endpoints are `"outer"` or `{"point": i}`; points list their incident
//! cracks as `{"crack": i, "end": "start" | "end"}`. Indices are 0-based.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    BulkComponent, CrackComponent, EdgeTag, EndTag, Endpoint, FracturedDomain, PointComponent, ScalarField,
    VectorField,
};
use crate::{vec2, Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub bounding_box: [[f64; 2]; 2],
    pub components: ComponentsDoc,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentsDoc {
    #[serde(default)]
    pub bulk: Vec<BulkDoc>,
    #[serde(default)]
    pub cracks: Vec<CrackDoc>,
    #[serde(default)]
    pub points: Vec<PointDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BulkDoc {
    #[serde(default)]
    pub name: String,
    pub vertices: Vec<[f64; 2]>,
    pub edges: Vec<EdgeTag>,
    pub beta: VectorField,
    #[serde(default)]
    pub alpha: ScalarField,
    #[serde(default)]
    pub f: ScalarField,
    #[serde(default)]
    pub g: ScalarField,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrackDoc {
    #[serde(default)]
    pub name: String,
    pub vertices: Vec<[f64; 2]>,
    pub start: EndTag,
    pub end: EndTag,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub speed: ScalarField,
    #[serde(default)]
    pub alpha: ScalarField,
    #[serde(default)]
    pub f: ScalarField,
    #[serde(default)]
    pub g: ScalarField,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentDoc {
    pub crack: usize,
    pub end: Endpoint,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    #[serde(default)]
    pub name: String,
    pub x: [f64; 2],
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub f: f64,
    pub incident: Vec<IncidentDoc>,
}

fn v(p: [f64; 2]) -> crate::Vec2 {
    vec2(p[0], p[1])
}

fn a(p: crate::Vec2) -> [f64; 2] {
    [p.x, p.y]
}

impl DomainDoc {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn into_domain(self) -> Result<FracturedDomain> {
        let bulks = self
            .components
            .bulk
            .into_iter()
            .map(|b| BulkComponent {
                name: b.name,
                vertices: b.vertices.into_iter().map(v).collect(),
                edge_tags: b.edges,
                beta: b.beta,
                alpha: b.alpha,
                f: b.f,
                g: b.g,
                pieces: Vec::new(),
            })
            .collect();
        let cracks = self
            .components
            .cracks
            .into_iter()
            .map(|c| CrackComponent {
                name: c.name,
                vertices: c.vertices.into_iter().map(v).collect(),
                start: c.start,
                end: c.end,
                left: c.left,
                right: c.right,
                speed: c.speed,
                alpha: c.alpha,
                f: c.f,
                g: c.g,
            })
            .collect();
        let points = self
            .components
            .points
            .into_iter()
            .map(|p| PointComponent {
                name: p.name,
                x: v(p.x),
                alpha: p.alpha,
                f: p.f,
                incident: p.incident.into_iter().map(|i| (i.crack, i.end)).collect(),
            })
            .collect();
        FracturedDomain::new([v(self.bounding_box[0]), v(self.bounding_box[1])], bulks, cracks, points)
    }

    pub fn from_domain(d: &FracturedDomain) -> Self {
        DomainDoc {
            description: None,
            bounding_box: [a(d.bbox[0]), a(d.bbox[1])],
            components: ComponentsDoc {
                bulk: d
                    .bulks
                    .iter()
                    .map(|b| BulkDoc {
                        name: b.name.clone(),
                        vertices: b.vertices.iter().copied().map(a).collect(),
                        edges: b.edge_tags.clone(),
                        beta: b.beta.clone(),
                        alpha: b.alpha.clone(),
                        f: b.f.clone(),
                        g: b.g.clone(),
                    })
                    .collect(),
                cracks: d
                    .cracks
                    .iter()
                    .map(|c| CrackDoc {
                        name: c.name.clone(),
                        vertices: c.vertices.iter().copied().map(a).collect(),
                        start: c.start,
                        end: c.end,
                        left: c.left,
                        right: c.right,
                        speed: c.speed.clone(),
                        alpha: c.alpha.clone(),
                        f: c.f.clone(),
                        g: c.g.clone(),
                    })
                    .collect(),
                points: d
                    .points
                    .iter()
                    .map(|p| PointDoc {
                        name: p.name.clone(),
                        x: a(p.x),
                        alpha: p.alpha,
                        f: p.f,
                        incident: p
                            .incident
                            .iter()
                            .map(|&(crack, end)| IncidentDoc { crack, end })
                            .collect(),
                    })
                    .collect(),
            },
        }
    }
}

/// Load and validate a domain from a JSON file.
pub fn load_domain(path: &Path) -> Result<FracturedDomain> {
    DomainDoc::load(path)?.into_domain()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"bounding_box": [[0,0],[1,1]], "components": {}, "extra": 1}"#;
        assert!(DomainDoc::parse(text).is_err());
    }

    #[test]
    fn single_bulk_document() {
        let text = r#"{
            "bounding_box": [[0,0],[1,1]],
            "components": { "bulk": [{
                "vertices": [[0,0],[1,0],[1,1],[0,1]],
                "edges": ["outer","outer","outer","outer"],
                "beta": [1, 0], "alpha": 1
            }]}
        }"#;
        let d = DomainDoc::parse(text).unwrap().into_domain().unwrap();
        assert_eq!(d.bulks.len(), 1);
        assert!((d.bulks[0].area() - 1.0).abs() < 1e-15);
        assert_eq!(d.bulks[0].pieces.len(), 2);
    }

    #[test]
    fn round_trip_preserves_structure() {
        for p in crate::presets::Preset::all() {
            let d = p.domain();
            let text = serde_json::to_string(&DomainDoc::from_domain(&d)).unwrap();
            let back = DomainDoc::parse(&text).unwrap().into_domain().unwrap();
            assert_eq!(back.bulks.len(), d.bulks.len());
            assert_eq!(back.cracks.len(), d.cracks.len());
            assert_eq!(back.points.len(), d.points.len());
        }
    }
}
