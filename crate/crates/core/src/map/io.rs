//! JSON map layer files: `{frame, range?, elements: [{class, is_closed, points}]}`.

use std::path::Path;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::{BevRange, Frame, MapClass, MapElement, MapError, MapLayer};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ElementRecord {
    pub class: MapClass,
    #[serde(default)]
    pub is_closed: bool,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MapFile {
    pub frame: Frame,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<BevRange<f64>>,
    pub elements: Vec<ElementRecord>,
}

impl MapFile {
    pub fn from_layer(layer: &MapLayer<f64>, range: Option<BevRange<f64>>) -> Self {
        Self {
            frame: layer.frame,
            range,
            elements: layer
                .elements
                .iter()
                .map(|e| ElementRecord {
                    class: e.class,
                    is_closed: e.is_closed,
                    points: e.points.iter().map(|p| [p.x, p.y]).collect(),
                })
                .collect(),
        }
    }

    pub fn to_layer(&self) -> Result<MapLayer<f64>, MapError> {
        let elements = self
            .elements
            .iter()
            .map(|r| {
                MapElement::new(
                    r.points.iter().map(|p| Vector2::new(p[0], p[1])).collect(),
                    self.frame,
                    r.class,
                    r.is_closed,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        MapLayer::new(self.frame, elements)
    }
}

pub fn load_map(path: impl AsRef<Path>) -> Result<MapFile, MapError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MapError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn save_map(file: &MapFile, path: impl AsRef<Path>) -> Result<(), MapError> {
    let path = path.as_ref();
    std::fs::write(path, serde_json::to_string(file)?).map_err(|source| MapError::Io {
        path: path.to_path_buf(),
        source,
    })
}
