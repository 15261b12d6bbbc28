use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::MapError;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapClass {
    Divider,
    Crossing,
    Boundary,
    Centerline,
}

impl MapClass {
    pub const ALL: [MapClass; 4] = [
        MapClass::Divider,
        MapClass::Crossing,
        MapClass::Boundary,
        MapClass::Centerline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapClass::Divider => "divider",
            MapClass::Crossing => "crossing",
            MapClass::Boundary => "boundary",
            MapClass::Centerline => "centerline",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            MapClass::Divider => "Div.",
            MapClass::Crossing => "Cross.",
            MapClass::Boundary => "Bound.",
            MapClass::Centerline => "Center.",
        }
    }
}

impl std::fmt::Display for MapClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MapClass {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MapClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| MapError::UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    World,
    Ego,
}

/// A polyline or polygon map label. Closed polygons do not repeat their
/// first point.
#[derive(Debug, Clone, PartialEq)]
pub struct MapElement<T: Real> {
    pub points: Vec<Vector2<T>>,
    pub frame: Frame,
    pub class: MapClass,
    pub is_closed: bool,
}

impl<T: Real> MapElement<T> {
    pub fn new(
        points: Vec<Vector2<T>>,
        frame: Frame,
        class: MapClass,
        is_closed: bool,
    ) -> Result<Self, MapError> {
        let e = Self {
            points,
            frame,
            class,
            is_closed,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn open(points: Vec<Vector2<T>>, frame: Frame, class: MapClass) -> Result<Self, MapError> {
        Self::new(points, frame, class, false)
    }

    pub fn validate(&self) -> Result<(), MapError> {
        if self.points.len() < 2 {
            return Err(MapError::TooFewPoints(self.points.len()));
        }
        if self.points.iter().flatten().any(|v| !v.is_finite_real()) {
            return Err(MapError::NonFinite);
        }
        Ok(())
    }

    /// Total length, including the closing edge of closed elements.
    pub fn arc_length(&self) -> T {
        let open: T = self
            .points
            .windows(2)
            .fold(T::zero(), |acc, w| acc + (w[1] - w[0]).norm());
        if self.is_closed && self.points.len() > 1 {
            open + (self.points[0] - self.points[self.points.len() - 1]).norm()
        } else {
            open
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Map elements sharing one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MapLayer<T: Real> {
    pub frame: Frame,
    pub elements: Vec<MapElement<T>>,
}

impl<T: Real> MapLayer<T> {
    pub fn new(frame: Frame, elements: Vec<MapElement<T>>) -> Result<Self, MapError> {
        for e in &elements {
            e.validate()?;
            if e.frame != frame {
                return Err(MapError::WrongFrame {
                    expected: frame,
                    found: e.frame,
                });
            }
        }
        Ok(Self { frame, elements })
    }

    pub fn empty(frame: Frame) -> Self {
        Self {
            frame,
            elements: Vec::new(),
        }
    }

    pub fn of_class(&self, class: MapClass) -> impl Iterator<Item = &MapElement<T>> {
        self.elements.iter().filter(move |e| e.class == class)
    }
}

/// Axis-aligned ego-frame rectangle in which labels are kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BevRange<T: Real> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
}

impl<T: Real> BevRange<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T) -> Result<Self, MapError> {
        if !(x_min < x_max && y_min < y_max) {
            return Err(MapError::InvalidRange);
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    pub fn contains(&self, p: &Vector2<T>) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn clamp(&self, p: Vector2<T>) -> Vector2<T> {
        Vector2::new(
            p.x.clamp(self.x_min, self.x_max),
            p.y.clamp(self.y_min, self.y_max),
        )
    }
}

impl<T: Real> Default for BevRange<T> {
    /// 60 m longitudinal (x, forward) by 30 m lateral (y, left).
    fn default() -> Self {
        Self {
            x_min: T::lit(-30.0),
            x_max: T::lit(30.0),
            y_min: T::lit(-15.0),
            y_max: T::lit(15.0),
        }
    }
}
