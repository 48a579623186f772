//! Declarative domain descriptions and their JSON form.
//!
//! ```json
//! {"kind": "ellipse", "params": {"a": 2, "b": 1}, "clip_box": [-2.5, -1.5, 2.5, 1.5], "margin": 0.125}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::point::Point;
use crate::error::{Error, Result};

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl ClipBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        ClipBox { x0, y0, x1, y1 }
    }

    pub fn square(half: f64) -> Self {
        ClipBox::new(-half, -half, half, half)
    }

    pub fn diameter(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    /// The box shrunk by `w` on every side.
    pub fn shrunk(&self, w: f64) -> ClipBox {
        ClipBox::new(self.x0 + w, self.y0 + w, self.x1 - w, self.y1 - w)
    }
}

/// Which side of the boundary chain is the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// The region described by the kind (disc interior, area above a graph, ...).
    #[default]
    Interior,
    /// Its complement inside the clip box.
    Exterior,
}

/// One piece of a `parametric` boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PieceSpec {
    Segment {
        from: [f64; 2],
        to: [f64; 2],
    },
    Arc {
        center: [f64; 2],
        radius: f64,
        start: f64,
        end: f64,
    },
    EllipticArc {
        center: [f64; 2],
        rx: f64,
        ry: f64,
        start: f64,
        end: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Disc {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// Union of the unit disc and the open upper half plane.
    DiscHalfplane,
    /// `{ y > |x|^p }`
    GraphPower {
        p: f64,
    },
    /// `{ y > c_left x² }` for `x < 0`, `{ y > c_right x² }` for `x ≥ 0`.
    GraphPiecewiseParabola {
        c_left: f64,
        c_right: f64,
    },
    /// Interior of a closed simple polygon.
    Polyline {
        vertices: Vec<Point>,
    },
    /// Region bounded by a closed chain of pieces; `c1_joints[i]`, when given,
    /// declares whether the joint after piece `i` is C1.
    Parametric {
        pieces: Vec<PieceSpec>,
        c1_joints: Option<Vec<bool>>,
    },
}

impl DomainKind {
    pub fn name(&self) -> &'static str {
        match self {
            DomainKind::Disc { .. } => "disc",
            DomainKind::Ellipse { .. } => "ellipse",
            DomainKind::DiscHalfplane => "disc_halfplane",
            DomainKind::GraphPower { .. } => "graph_power",
            DomainKind::GraphPiecewiseParabola { .. } => "graph_piecewise_parabola",
            DomainKind::Polyline { .. } => "polyline",
            DomainKind::Parametric { .. } => "parametric",
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(
            self,
            DomainKind::DiscHalfplane
                | DomainKind::GraphPower { .. }
                | DomainKind::GraphPiecewiseParabola { .. }
        )
    }

    fn params_json(&self) -> Value {
        match self {
            DomainKind::Disc { radius } => json!({ "radius": radius }),
            DomainKind::Ellipse { a, b } => json!({ "a": a, "b": b }),
            DomainKind::DiscHalfplane => json!({}),
            DomainKind::GraphPower { p } => json!({ "p": p }),
            DomainKind::GraphPiecewiseParabola { c_left, c_right } => {
                json!({ "c_left": c_left, "c_right": c_right })
            }
            DomainKind::Polyline { vertices } => {
                let v: Vec<[f64; 2]> = vertices.iter().map(|&p| p.into()).collect();
                json!({ "vertices": v })
            }
            DomainKind::Parametric { pieces, c1_joints } => {
                let mut m = Map::new();
                m.insert("pieces".into(), serde_json::to_value(pieces).unwrap());
                if let Some(j) = c1_joints {
                    m.insert("c1_joints".into(), json!(j));
                }
                Value::Object(m)
            }
        }
    }
}

/// A planar open set together with the box that truncates it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub clip_box: ClipBox,
    /// Width of the band along the clip box edges excluded from queries.
    pub margin: f64,
    pub orientation: Orientation,
}

/// Unbounded kinds share this clip box and margin.
const UNBOUNDED_HALF_WIDTH: f64 = 4.0;
const UNBOUNDED_MARGIN: f64 = 0.5;

impl DomainSpec {
    fn with_defaults(kind: DomainKind) -> Self {
        let (clip_box, margin) = default_clip(&kind);
        DomainSpec {
            kind,
            clip_box,
            margin,
            orientation: Orientation::Interior,
        }
    }

    pub fn disc(radius: f64) -> Self {
        Self::with_defaults(DomainKind::Disc { radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        Self::with_defaults(DomainKind::Ellipse { a, b })
    }

    pub fn disc_halfplane() -> Self {
        Self::with_defaults(DomainKind::DiscHalfplane)
    }

    pub fn graph_power(p: f64) -> Self {
        Self::with_defaults(DomainKind::GraphPower { p })
    }

    pub fn graph_piecewise_parabola(c_left: f64, c_right: f64) -> Self {
        Self::with_defaults(DomainKind::GraphPiecewiseParabola { c_left, c_right })
    }

    pub fn polyline(vertices: Vec<Point>) -> Self {
        Self::with_defaults(DomainKind::Polyline { vertices })
    }

    pub fn parametric(pieces: Vec<PieceSpec>) -> Self {
        Self::with_defaults(DomainKind::Parametric {
            pieces,
            c1_joints: None,
        })
    }

    /// The default `polyline` builtin: the strip `[-1.5, 1.5] × [-0.5, 0.5]`.
    pub fn strip() -> Self {
        Self::polyline(vec![
            Point::new(-1.5, -0.5),
            Point::new(1.5, -0.5),
            Point::new(1.5, 0.5),
            Point::new(-1.5, 0.5),
        ])
    }

    pub const BUILTIN_NAMES: [&'static str; 6] = [
        "disc",
        "ellipse",
        "disc_halfplane",
        "graph_power",
        "graph_piecewise_parabola",
        "polyline",
    ];

    /// Resolves a builtin name with optional numeric overrides (`a=2`, `p=1.5`, ...).
    pub fn builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
        let allowed: &[&str] = match name {
            "disc" => &["radius", "r"],
            "ellipse" => &["a", "b"],
            "disc_halfplane" => &[],
            "graph_power" => &["p"],
            "graph_piecewise_parabola" => &["c_left", "c_right"],
            "polyline" => &["width", "height"],
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown builtin domain '{other}' (expected one of {})",
                    Self::BUILTIN_NAMES.join(", ")
                )))
            }
        };
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidArgument(format!(
                "parameter '{bad}' not accepted by builtin '{name}'"
            )));
        }
        let spec = match name {
            "disc" => Self::disc(params.get("r").copied().unwrap_or(get("radius", 1.0))),
            "ellipse" => Self::ellipse(get("a", 2.0), get("b", 1.0)),
            "disc_halfplane" => Self::disc_halfplane(),
            "graph_power" => Self::graph_power(get("p", 1.5)),
            "graph_piecewise_parabola" => {
                Self::graph_piecewise_parabola(get("c_left", 0.25), get("c_right", 0.5))
            }
            _ => {
                let (w, h) = (get("width", 3.0) / 2.0, get("height", 1.0) / 2.0);
                Self::polyline(vec![
                    Point::new(-w, -h),
                    Point::new(w, -h),
                    Point::new(w, h),
                    Point::new(-w, h),
                ])
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_clip_box(mut self, clip_box: ClipBox, margin: f64) -> Self {
        self.clip_box = clip_box;
        self.margin = margin;
        self
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    /// Region in which queries are admitted.
    pub fn query_box(&self) -> ClipBox {
        self.clip_box.shrunk(self.margin)
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.clip_box;
        let finite = [c.x0, c.y0, c.x1, c.y1, self.margin]
            .iter()
            .all(|v| v.is_finite());
        if !finite || c.x1 <= c.x0 || c.y1 <= c.y0 {
            return Err(Error::InvalidDomain("clip box must have positive area".into()));
        }
        if self.margin < 0.0 || 2.0 * self.margin >= (c.x1 - c.x0).min(c.y1 - c.y0) {
            return Err(Error::InvalidDomain(
                "margin must be nonnegative and leave a nonempty query box".into(),
            ));
        }
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidDomain(format!("{what} must be positive and finite")))
            }
        };
        match &self.kind {
            DomainKind::Disc { radius } => positive(*radius, "radius")?,
            DomainKind::Ellipse { a, b } => {
                positive(*a, "a")?;
                positive(*b, "b")?;
            }
            DomainKind::DiscHalfplane => {
                if !(c.x0 < -1.0 && c.x1 > 1.0 && c.y0 < -1.0 && c.y1 > 0.0) {
                    return Err(Error::InvalidDomain(
                        "disc_halfplane clip box must contain the unit disc".into(),
                    ));
                }
            }
            DomainKind::GraphPower { p } => {
                if !(p.is_finite() && *p > 1.0) {
                    return Err(Error::InvalidDomain(
                        "graph_power exponent must exceed 1 (C1 boundary)".into(),
                    ));
                }
                if !(c.x0 < 0.0 && c.x1 > 0.0 && c.y0 < 0.0 && c.y1 > 0.0) {
                    return Err(Error::InvalidDomain("clip box must contain the origin".into()));
                }
            }
            DomainKind::GraphPiecewiseParabola { c_left, c_right } => {
                positive(*c_left, "c_left")?;
                positive(*c_right, "c_right")?;
                if !(c.x0 < 0.0 && c.x1 > 0.0 && c.y0 < 0.0 && c.y1 > 0.0) {
                    return Err(Error::InvalidDomain("clip box must contain the origin".into()));
                }
            }
            DomainKind::Polyline { vertices } => {
                if vertices.len() < 3 || vertices.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidDomain(
                        "polyline needs at least three finite vertices".into(),
                    ));
                }
            }
            DomainKind::Parametric { pieces, c1_joints } => {
                if pieces.is_empty() {
                    return Err(Error::InvalidDomain("parametric domain has no pieces".into()));
                }
                if let Some(j) = c1_joints {
                    if j.len() != pieces.len() {
                        return Err(Error::InvalidDomain(
                            "c1_joints needs one flag per piece".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn default_clip(kind: &DomainKind) -> (ClipBox, f64) {
    match kind {
        DomainKind::Disc { radius } => (ClipBox::square(1.25 * radius), 0.125 * radius),
        DomainKind::Ellipse { a, b } => {
            let pad = 0.25 * a.max(*b);
            (ClipBox::new(-a - pad, -b - pad, a + pad, b + pad), 0.5 * pad)
        }
        DomainKind::DiscHalfplane
        | DomainKind::GraphPower { .. }
        | DomainKind::GraphPiecewiseParabola { .. } => {
            (ClipBox::square(UNBOUNDED_HALF_WIDTH), UNBOUNDED_MARGIN)
        }
        DomainKind::Polyline { vertices } => bbox_clip(vertices.iter().copied()),
        DomainKind::Parametric { pieces, .. } => {
            // bounding box of a coarse sampling of every piece
            let pts = pieces.iter().flat_map(|p| {
                let c = super::domain::curve_from_piece_spec(p);
                (0..=64).map(move |k| c.point(k as f64 / 64.0))
            });
            bbox_clip(pts)
        }
    }
}

fn bbox_clip(points: impl Iterator<Item = Point>) -> (ClipBox, f64) {
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for p in points {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    if !(x0.is_finite() && y0.is_finite()) {
        return (ClipBox::square(1.0), 0.1);
    }
    let pad = 0.25 * (x1 - x0).max(y1 - y0).clamp(1e-3, 1.0);
    (ClipBox::new(x0 - pad, y0 - pad, x1 + pad, y1 + pad), 0.5 * pad)
}

/// Wire form of [`DomainSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSpec {
    kind: String,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clip_box: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
    #[serde(default)]
    orientation: Orientation,
}

fn param_f64(params: &Map<String, Value>, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key) {
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::InvalidDomain(format!("parameter '{key}' must be a number"))),
        None => default.ok_or_else(|| Error::InvalidDomain(format!("missing parameter '{key}'"))),
    }
}

impl TryFrom<RawSpec> for DomainSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let p = &raw.params;
        let kind = match raw.kind.as_str() {
            "disc" => DomainKind::Disc {
                radius: param_f64(p, "radius", Some(1.0))?,
            },
            "ellipse" => DomainKind::Ellipse {
                a: param_f64(p, "a", Some(2.0))?,
                b: param_f64(p, "b", Some(1.0))?,
            },
            "disc_halfplane" => DomainKind::DiscHalfplane,
            "graph_power" => DomainKind::GraphPower {
                p: param_f64(p, "p", Some(1.5))?,
            },
            "graph_piecewise_parabola" => DomainKind::GraphPiecewiseParabola {
                c_left: param_f64(p, "c_left", Some(0.25))?,
                c_right: param_f64(p, "c_right", Some(0.5))?,
            },
            "polyline" => {
                let v = p
                    .get("vertices")
                    .ok_or_else(|| Error::InvalidDomain("polyline needs 'vertices'".into()))?;
                let v: Vec<[f64; 2]> = serde_json::from_value(v.clone())?;
                DomainKind::Polyline {
                    vertices: v.into_iter().map(Point::from).collect(),
                }
            }
            "parametric" => {
                let pieces = p
                    .get("pieces")
                    .ok_or_else(|| Error::InvalidDomain("parametric needs 'pieces'".into()))?;
                let pieces: Vec<PieceSpec> = serde_json::from_value(pieces.clone())?;
                let c1_joints = match p.get("c1_joints") {
                    Some(v) => Some(serde_json::from_value(v.clone())?),
                    None => None,
                };
                DomainKind::Parametric { pieces, c1_joints }
            }
            other => return Err(Error::InvalidDomain(format!("unknown kind '{other}'"))),
        };
        let mut spec = DomainSpec::with_defaults(kind);
        if let Some([x0, y0, x1, y1]) = raw.clip_box {
            spec.clip_box = ClipBox::new(x0, y0, x1, y1);
        }
        if let Some(m) = raw.margin {
            spec.margin = m;
        }
        spec.orientation = raw.orientation;
        spec.validate()?;
        Ok(spec)
    }
}

impl From<DomainSpec> for RawSpec {
    fn from(spec: DomainSpec) -> Self {
        let params = match spec.kind.params_json() {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        let c = spec.clip_box;
        RawSpec {
            kind: spec.kind.name().to_string(),
            params,
            clip_box: Some([c.x0, c.y0, c.x1, c.y1]),
            margin: Some(spec.margin),
            orientation: spec.orientation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_json() {
        let spec: DomainSpec =
            serde_json::from_str(r#"{"kind":"ellipse","params":{"a":3,"b":1.5}}"#).unwrap();
        assert_eq!(spec.kind, DomainKind::Ellipse { a: 3.0, b: 1.5 });
        assert!(spec.clip_box.contains(Point::new(3.0, 0.0)));
    }

    #[test]
    fn json_round_trip_is_identity() {
        for name in DomainSpec::BUILTIN_NAMES {
            let spec = DomainSpec::builtin(name, &BTreeMap::new()).unwrap();
            let text = serde_json::to_string(&spec).unwrap();
            let back: DomainSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(spec, back, "{text}");
        }
    }

    #[test]
    fn unbounded_kinds_use_shared_clip() {
        let s = DomainSpec::disc_halfplane();
        assert_eq!(s.clip_box, ClipBox::square(4.0));
        assert_eq!(s.margin, 0.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(serde_json::from_str::<DomainSpec>(r#"{"kind":"torus"}"#).is_err());
        assert!(serde_json::from_str::<DomainSpec>(
            r#"{"kind":"disc","params":{"radius":1},"clip_box":[0,0,0,1]}"#
        )
        .is_err());
        assert!(DomainSpec::builtin("disc", &BTreeMap::from([("a".into(), 1.0)])).is_err());
    }

    #[test]
    fn parametric_pieces_round_trip() {
        let text = r#"{"kind":"parametric","params":{"pieces":[
            {"type":"segment","from":[-1,0],"to":[1,0]},
            {"type":"arc","center":[0,0],"radius":1,"start":0,"end":3.141592653589793}]}}"#;
        let spec: DomainSpec = serde_json::from_str(text).unwrap();
        let again: DomainSpec =
            serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, again);
    }
}
