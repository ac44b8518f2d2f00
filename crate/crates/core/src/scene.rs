//! Declarative cubical scenes: the unit cube minus open isothetic boxes,
//! optionally glued along one hyperplane pair per axis.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact scene coordinate.
pub type Coord = Rational64;

/// A point of the ambient cube.
pub type Point = Vec<Coord>;

/// Parses `"1/3"`, `"0.25"`, `"-2"` or `"1"` into an exact rational.
pub fn parse_coord(text: &str) -> Result<Coord> {
    let bad = |reason: &str| Error::BadCoordinate { text: text.to_string(), reason: reason.to_string() };
    let s = text.trim();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: i64 = den.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational64::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad("no digits"));
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad("not a decimal or fraction"));
    }
    if frac.len() > 15 {
        return Err(bad("too many decimal places"));
    }
    let digits = format!("{int}{frac}");
    let n: i64 = digits.parse().map_err(|_| bad("out of range"))?;
    let d = 10i64.pow(frac.len() as u32);
    let value = Rational64::new(n, d);
    Ok(if neg { -value } else { value })
}

/// Renders a coordinate as `p/q`, or `p` when integral.
pub fn format_coord(c: &Coord) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn format_point(p: &[Coord]) -> String {
    let parts: Vec<String> = p.iter().map(format_coord).collect();
    format!("({})", parts.join(","))
}

/// An open isothetic box, one open interval `(lo, hi)` per axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenBox(pub Vec<(Coord, Coord)>);

impl OpenBox {
    pub fn new(intervals: Vec<(Coord, Coord)>) -> Self {
        OpenBox(intervals)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// True iff `p` lies in the open box.
    pub fn contains(&self, p: &[Coord]) -> bool {
        self.0.iter().zip(p).all(|((lo, hi), x)| lo < x && x < hi)
    }
}

/// Identifies the hyperplane `x[axis] = target` with `x[axis] = source`.
///
/// The gluing is a translation, so directions are preserved. Everything on
/// either side of the slab is kept: a path arriving at the glued hyperplane
/// may continue into the slab or past the target hyperplane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlabIdentification {
    pub axis: usize,
    pub source: Coord,
    pub target: Coord,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CubicalScene {
    pub dim: usize,
    pub forbidden: Vec<OpenBox>,
    pub identifications: Vec<SlabIdentification>,
    pub marked_points: BTreeMap<String, Point>,
}

impl CubicalScene {
    pub fn new(dim: usize) -> Self {
        CubicalScene { dim, ..Default::default() }
    }

    pub fn with_box(mut self, intervals: &[(Coord, Coord)]) -> Self {
        self.forbidden.push(OpenBox::new(intervals.to_vec()));
        self
    }

    pub fn with_identification(mut self, axis: usize, source: Coord, target: Coord) -> Self {
        self.identifications.push(SlabIdentification { axis, source, target });
        self
    }

    pub fn with_point(mut self, name: &str, p: &[Coord]) -> Self {
        self.marked_points.insert(name.to_string(), p.to_vec());
        self
    }

    pub fn point(&self, name: &str) -> Result<&Point> {
        self.marked_points.get(name).ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    /// True iff `p` is in the closed cube and outside every forbidden box.
    pub fn is_allowed(&self, p: &[Coord]) -> bool {
        p.len() == self.dim
            && p.iter().all(|x| *x >= Coord::zero() && *x <= Coord::one())
            && !self.forbidden.iter().any(|b| b.contains(p))
    }

    pub fn identification(&self, axis: usize) -> Option<&SlabIdentification> {
        self.identifications.iter().find(|id| id.axis == axis)
    }
}

impl fmt::Display for CubicalScene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "scene dim={} boxes={} identifications={}", self.dim, self.forbidden.len(), self.identifications.len())
    }
}

/// Checks every scene invariant and hands the scene back.
pub fn validate_scene(scene: CubicalScene) -> Result<CubicalScene> {
    let zero = Coord::zero();
    let one = Coord::one();
    if scene.dim == 0 {
        return Err(Error::SceneFile { message: "dimension must be positive".into(), line: 0, column: 0 });
    }
    for (index, b) in scene.forbidden.iter().enumerate() {
        if b.dim() != scene.dim {
            return Err(Error::DimensionMismatch { index, found: b.dim(), dim: scene.dim });
        }
        for (axis, (lo, hi)) in b.0.iter().enumerate() {
            if lo >= hi {
                return Err(Error::DegenerateBox { index, axis });
            }
            if *lo < zero || *hi > one {
                return Err(Error::BoxOutOfAmbient { index, axis });
            }
        }
    }
    let mut seen = vec![false; scene.dim];
    for id in &scene.identifications {
        let conflict = |reason: &str| Error::IdentificationConflict { axis: id.axis, reason: reason.to_string() };
        if id.axis >= scene.dim {
            return Err(conflict("axis out of range"));
        }
        if seen[id.axis] {
            return Err(conflict("more than one identification on this axis"));
        }
        seen[id.axis] = true;
        if !(zero <= id.source && id.source < id.target && id.target <= one) {
            return Err(conflict("need 0 <= source < target <= 1"));
        }
        for (index, b) in scene.forbidden.iter().enumerate() {
            let (lo, hi) = b.0[id.axis];
            if (lo < id.source && id.source < hi) || (lo < id.target && id.target < hi) {
                return Err(conflict(&format!("box {index} meets a glued hyperplane")));
            }
        }
    }
    for (name, p) in &scene.marked_points {
        if p.len() != scene.dim || p.iter().any(|x| *x < zero || *x > one) {
            return Err(Error::MarkedPointOutOfAmbient { name: name.clone() });
        }
        if scene.forbidden.iter().any(|b| b.contains(p)) {
            return Err(Error::MarkedPointForbidden { name: name.clone() });
        }
    }
    Ok(scene)
}

/// Shorthand for building rationals in tests and examples.
pub fn q(n: i64, d: i64) -> Coord {
    Rational64::new(n, d)
}
