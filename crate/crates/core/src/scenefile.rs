//! JSON scene files.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "boxes": [[["1/3", "2/3"], ["1/3", "2/3"]]],
//!   "identifications": [{"axis": 0, "source": "0", "target": "1"}],
//!   "points": {"a": [0, 0], "b": [1, 1]},
//!   "budget": {"max_paths": 100000, "max_steps": 12},
//!   "retract": {"direction": "future", "A": ["a", "(1/3,1/3)"]},
//!   "chain": [{"direction": "future", "A": [{"box": [[0, "1/3"], [0, "1/3"]]}, "b"]}],
//!   "cover": {"x1": [[[0, "2/3"]], [[0, 1]]], "x2": [[["1/3", 1]], [[0, 1]]], "A1": ["a"], "A2": ["b"]}
//! }
//! ```
//!
//! Coordinates are decimal or fraction strings, or integers; binary floats
//! are rejected. A point reference is a marked-point name, a coordinate
//! tuple such as `"(1/3,0)"`, `"@extremal"`, `"@all"` or `{"box": ...}` for
//! every grid vertex in a closed box.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::category::extremal_set;
use crate::dipath::{Budget, LatticePath};
use crate::error::{Error, Result};
use crate::grid::{GridComplex, VertexId, Window};
use crate::retract::{Assignment, Direction, RetractData};
use crate::scene::{format_coord, parse_coord, validate_scene, Coord, CubicalScene, OpenBox, SlabIdentification};
use crate::vankampen::Cover;

/// A coordinate as written in a scene file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordText(pub Coord);

impl Serialize for CoordText {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_coord(&self.0))
    }
}

impl<'de> Deserialize<'de> for CoordText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = CoordText;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a coordinate string such as \"1/3\" or \"0.25\", or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<CoordText, E> {
                parse_coord(v).map(CoordText).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<CoordText, E> {
                Ok(CoordText(Coord::from_integer(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<CoordText, E> {
                i64::try_from(v).map(|v| CoordText(Coord::from_integer(v))).map_err(|_| E::custom("integer out of range"))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<CoordText, E> {
                Err(E::custom(format!("binary float {v} is not exact; write it as a string such as \"0.25\"")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentificationSpec {
    pub axis: usize,
    pub source: CoordText,
    pub target: CoordText,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    pub max_paths: Option<usize>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRef {
    Name(String),
    Region {
        #[serde(rename = "box")]
        region: Vec<[CoordText; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentSpec {
    pub target: PointRef,
    /// Axis of each step of the witness path.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetractSpec {
    pub direction: Direction,
    /// Domain objects; all grid vertices (or the previous chain step) when
    /// omitted.
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<PointRef>>,
    #[serde(rename = "A")]
    pub codomain: Vec<PointRef>,
    /// Keys are point references written as strings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<BTreeMap<String, AssignmentSpec>>,
}

/// Per-axis unions of closed intervals.
pub type WindowSpec = Vec<Vec<[CoordText; 2]>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    pub x1: WindowSpec,
    pub x2: WindowSpec,
    #[serde(rename = "A1")]
    pub a1: Vec<PointRef>,
    #[serde(rename = "A2")]
    pub a2: Vec<PointRef>,
    #[serde(rename = "B1", default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<Vec<PointRef>>,
    #[serde(rename = "B2", default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<Vec<PointRef>>,
    /// Global chain steps, restricted to each piece to build the piece
    /// models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<ChainStepSpec>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainStepSpec {
    pub direction: Direction,
    #[serde(rename = "A")]
    pub codomain: Vec<PointRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub dim: usize,
    #[serde(default)]
    pub boxes: Vec<Vec<[CoordText; 2]>>,
    #[serde(default)]
    pub identifications: Vec<IdentificationSpec>,
    #[serde(default)]
    pub points: BTreeMap<String, Vec<CoordText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retract: Option<RetractSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<RetractSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverSpec>,
}

fn pair(iv: &[CoordText; 2]) -> (Coord, Coord) {
    (iv[0].0, iv[1].0)
}

fn file_error(message: impl Into<String>) -> Error {
    Error::SceneFile { message: message.into(), line: 0, column: 0 }
}

impl SceneDocument {
    pub fn parse(text: &str) -> Result<SceneDocument> {
        serde_json::from_str(text).map_err(|e| Error::SceneFile { message: e.to_string(), line: e.line(), column: e.column() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene documents serialize")
    }

    pub fn from_scene(scene: &CubicalScene) -> SceneDocument {
        SceneDocument {
            dim: scene.dim,
            boxes: scene.forbidden.iter().map(|b| b.0.iter().map(|(lo, hi)| [CoordText(*lo), CoordText(*hi)]).collect()).collect(),
            identifications: scene
                .identifications
                .iter()
                .map(|i| IdentificationSpec { axis: i.axis, source: CoordText(i.source), target: CoordText(i.target) })
                .collect(),
            points: scene.marked_points.iter().map(|(k, p)| (k.clone(), p.iter().map(|c| CoordText(*c)).collect())).collect(),
            budget: None,
            retract: None,
            chain: None,
            cover: None,
        }
    }

    /// The validated scene.
    pub fn scene(&self) -> Result<CubicalScene> {
        validate_scene(CubicalScene {
            dim: self.dim,
            forbidden: self.boxes.iter().map(|b| OpenBox(b.iter().map(pair).collect())).collect(),
            identifications: self
                .identifications
                .iter()
                .map(|i| SlabIdentification { axis: i.axis, source: i.source.0, target: i.target.0 })
                .collect(),
            marked_points: self.points.iter().map(|(k, p)| (k.clone(), p.iter().map(|c| c.0).collect())).collect(),
        })
    }

    /// File budget over `fallback`.
    pub fn budget(&self, fallback: Budget) -> Budget {
        match self.budget {
            None => fallback,
            Some(b) => Budget::new(b.max_paths.unwrap_or(fallback.max_paths), b.max_steps.unwrap_or(fallback.max_steps)),
        }
    }
}

/// Resolves point references against a grid and its scene.
pub struct Resolver<'a> {
    pub grid: &'a GridComplex,
    pub scene: &'a CubicalScene,
}

impl Resolver<'_> {
    pub fn point(&self, name: &str) -> Result<VertexId> {
        let p = if name.starts_with('(') {
            let inner = name.trim_start_matches('(').trim_end_matches(')');
            inner.split(',').map(parse_coord).collect::<Result<Vec<_>>>()?
        } else {
            self.scene.point(name)?.clone()
        };
        self.grid.vertex_at(&p).ok_or_else(|| Error::UnknownPoint(format!("{name} is not a grid vertex")))
    }

    pub fn set(&self, refs: &[PointRef]) -> Result<Vec<VertexId>> {
        let mut out = Vec::new();
        for r in refs {
            match r {
                PointRef::Name(n) if n == "@extremal" => out.extend(extremal_set(self.grid)),
                PointRef::Name(n) if n == "@all" => out.extend(self.grid.vertices()),
                PointRef::Name(n) => out.push(self.point(n)?),
                PointRef::Region { region } => {
                    if region.len() != self.grid.dim() {
                        return Err(file_error("box reference has the wrong dimension"));
                    }
                    let iv: Vec<_> = region.iter().map(pair).collect();
                    out.extend(self.grid.vertices_in(&Window::closed_box(&iv)));
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn window(&self, spec: &WindowSpec) -> Result<Window> {
        if spec.len() != self.grid.dim() {
            return Err(file_error("window has the wrong dimension"));
        }
        Ok(Window(spec.iter().map(|axis| axis.iter().map(pair).collect()).collect()))
    }

    /// Retract data when an assignment is given; otherwise `None` and the
    /// caller searches.
    pub fn retract(&self, spec: &RetractSpec, domain: &[VertexId]) -> Result<Option<RetractData>> {
        let codomain = self.set(&spec.codomain)?;
        let Some(assignment) = &spec.assignment else { return Ok(None) };
        let mut out = BTreeMap::new();
        for (key, a) in assignment {
            let x = self.point(key)?;
            let target = self.set(std::slice::from_ref(&a.target))?;
            let [target] = target.as_slice() else { return Err(file_error(format!("target of {key} must be a single point"))) };
            let (start, end) = match spec.direction {
                Direction::Future => (x, *target),
                Direction::Past => (*target, x),
            };
            let witness = LatticePath::from_axes(self.grid, start, &a.witness)?;
            if witness.end(self.grid) != end {
                return Err(Error::InvalidPath(format!("witness for {key} does not end at its target")));
            }
            out.insert(x, Assignment { target: *target, witness });
        }
        Ok(Some(RetractData { direction: spec.direction, domain: domain.to_vec(), codomain, assignment: out }))
    }

    pub fn cover(&self, spec: &CoverSpec) -> Result<Cover> {
        let mut cover = Cover::new(self.window(&spec.x1)?, self.window(&spec.x2)?, &self.set(&spec.a1)?, &self.set(&spec.a2)?);
        cover.b = match (&spec.b1, &spec.b2) {
            (Some(b1), Some(b2)) => Some((self.set(b1)?, self.set(b2)?)),
            (None, None) => None,
            _ => return Err(file_error("B1 and B2 must be given together")),
        };
        Ok(cover)
    }
}
