use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

/// The six waste categories. Integer codes follow alphabetical order and
/// are part of the model export contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Cardboard = 0,
    Glass = 1,
    Metal = 2,
    Paper = 3,
    Plastic = 4,
    Trash = 5,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("UnknownLabel: {0:?}")]
pub struct UnknownLabel(pub String);

impl ClassLabel {
    pub const COUNT: usize = 6;

    /// All labels in code order.
    pub const ALL: [ClassLabel; 6] = [
        ClassLabel::Cardboard,
        ClassLabel::Glass,
        ClassLabel::Metal,
        ClassLabel::Paper,
        ClassLabel::Plastic,
        ClassLabel::Trash,
    ];

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<Self> {
        Self::ALL.get(code).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Cardboard => "cardboard",
            ClassLabel::Glass => "glass",
            ClassLabel::Metal => "metal",
            ClassLabel::Paper => "paper",
            ClassLabel::Plastic => "plastic",
            ClassLabel::Trash => "trash",
        }
    }
}

/// Case-insensitive lookup by name.
pub fn label_from_text(name: &str) -> Result<ClassLabel, UnknownLabel> {
    ClassLabel::ALL
        .into_iter()
        .find(|l| l.name().eq_ignore_ascii_case(name.trim()))
        .ok_or_else(|| UnknownLabel(name.to_string()))
}

impl FromStr for ClassLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        label_from_text(s)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A classified tile center: where, what, and how sure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLabeledPoint")]
pub struct LabeledPoint {
    #[serde(rename = "pos")]
    pub position: Point,
    pub label: ClassLabel,
    pub confidence: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLabeledPoint {
    pos: Point,
    label: ClassLabel,
    confidence: f64,
}

impl TryFrom<RawLabeledPoint> for LabeledPoint {
    type Error = String;

    fn try_from(raw: RawLabeledPoint) -> Result<Self, Self::Error> {
        LabeledPoint::new(raw.pos, raw.label, raw.confidence)
    }
}

impl LabeledPoint {
    /// Fails unless `confidence` lies in `[0, 1]`.
    pub fn new(position: Point, label: ClassLabel, confidence: f64) -> Result<Self, String> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(format!("confidence {confidence} is outside [0, 1]"));
        }
        Ok(Self {
            position,
            label,
            confidence,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_is_case_insensitive() {
        assert_eq!(label_from_text("glass").unwrap(), ClassLabel::Glass);
        assert_eq!(label_from_text("CARDBOARD").unwrap(), ClassLabel::Cardboard);
        assert_eq!("Plastic".parse::<ClassLabel>().unwrap(), ClassLabel::Plastic);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert_eq!(label_from_text("bottle"), Err(UnknownLabel("bottle".into())));
        assert!(label_from_text("").is_err());
    }

    #[test]
    fn codes_form_a_bijection() {
        for (i, l) in ClassLabel::ALL.iter().enumerate() {
            assert_eq!(l.code(), i);
            assert_eq!(ClassLabel::from_code(i), Some(*l));
            assert_eq!(label_from_text(l.name()).unwrap(), *l);
        }
        assert_eq!(ClassLabel::from_code(6), None);
    }

    #[test]
    fn serde_uses_lowercase_names() {
        for l in ClassLabel::ALL {
            let text = serde_json::to_string(&l).unwrap();
            assert_eq!(text, format!("\"{}\"", l.name()));
            assert_eq!(serde_json::from_str::<ClassLabel>(&text).unwrap(), l);
        }
        assert!(serde_json::from_str::<ClassLabel>("\"Glass\"").is_err());
    }

    #[test]
    fn labeled_point_json_shape() {
        let p = LabeledPoint::new(Point::new(64.0, 32.0), ClassLabel::Metal, 0.75).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"pos":[64.0,32.0],"label":"metal","confidence":0.75}"#);
        assert_eq!(serde_json::from_str::<LabeledPoint>(&text).unwrap(), p);
        assert!(serde_json::from_str::<LabeledPoint>(&text.replace("0.75", "1.5")).is_err());
        assert!(LabeledPoint::new(Point::default(), ClassLabel::Glass, -0.1).is_err());
    }
}
