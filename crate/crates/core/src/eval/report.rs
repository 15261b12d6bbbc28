use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{ApMode, Pooling};
use crate::map::MapClass;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassResult {
    pub class: MapClass,
    /// AP per threshold, aligned with [`EvalReport::thresholds`]. `None` when
    /// undefined (no ground truth and no predictions).
    pub ap_by_threshold: Vec<Option<f64>>,
    /// Mean of the defined per-threshold values.
    pub ap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub thresholds: Vec<f64>,
    pub mode: ApMode,
    pub pooling: Pooling,
    pub num_samples: usize,
    pub classes: Vec<ClassResult>,
    /// Mean class AP times 100.
    pub map: f64,
}

impl EvalReport {
    pub fn class(&self, class: MapClass) -> Option<&ClassResult> {
        self.classes.iter().find(|c| c.class == class)
    }

    /// Class-by-threshold table with values times 100.
    pub fn to_table(&self) -> String {
        let fmt =
            |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{:.1}", 100.0 * v));
        let mut out = String::new();
        let _ = write!(out, "{:<10}", "");
        for c in &self.classes {
            let _ = write!(out, "{:>9}", c.class.short_name());
        }
        let _ = writeln!(out, "{:>9}", "mAP");
        for (i, t) in self.thresholds.iter().enumerate() {
            let _ = write!(out, "{:<10}", format!("AP@{t:.1}m"));
            for c in &self.classes {
                let _ = write!(out, "{:>9}", fmt(c.ap_by_threshold[i]));
            }
            let defined: Vec<f64> = self
                .classes
                .iter()
                .filter_map(|c| c.ap_by_threshold[i])
                .collect();
            let mean =
                (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
            let _ = writeln!(out, "{:>9}", fmt(mean));
        }
        let _ = write!(out, "{:<10}", "AP");
        for c in &self.classes {
            let _ = write!(out, "{:>9}", fmt(c.ap));
        }
        let _ = writeln!(out, "{:>9.1}", self.map);
        out
    }
}
