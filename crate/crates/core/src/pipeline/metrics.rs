//! Scene-level detection scoring and tile-level confusion matrices.

use serde::{Deserialize, Serialize};

use super::io::SceneGroundTruth;
use crate::gmm::DetectedObject;
use crate::label::ClassLabel;

/// Labels that take part in detection scoring; trash is left out.
pub const SCORED_LABELS: [ClassLabel; 5] = [
    ClassLabel::Cardboard,
    ClassLabel::Glass,
    ClassLabel::Metal,
    ClassLabel::Paper,
    ClassLabel::Plastic,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: ClassLabel,
    pub correctly_identified: usize,
    pub identified: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub rows: Vec<ReportRow>,
    /// Σ identified / Σ total; counts false positives, so it can exceed 1.
    pub detection_rate: f64,
}

impl DetectionReport {
    pub fn from_rows(rows: Vec<ReportRow>) -> Self {
        let identified: usize = rows.iter().map(|r| r.identified).sum();
        let total: usize = rows.iter().map(|r| r.total).sum();
        let detection_rate = if total == 0 {
            0.0
        } else {
            identified as f64 / total as f64
        };
        Self {
            rows,
            detection_rate,
        }
    }

    pub fn row(&self, label: ClassLabel) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Plain-text table followed by the aggregate rate.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<10} {:>20} {:>10} {:>6}\n",
            "label", "correctly_identified", "identified", "total"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<10} {:>20} {:>10} {:>6}\n",
                r.label.name(),
                r.correctly_identified,
                r.identified,
                r.total
            ));
        }
        out.push_str(&format!("detection rate: {:.1}%\n", self.detection_rate * 100.0));
        out
    }
}

/// Per-label counts of detections and ground-truth objects.
///
/// Detections are matched greedily in descending support order (stable on
/// ties); each is correct if its center falls inside a not-yet-matched
/// ground-truth box of the same label.
pub fn match_and_score(objects: &[DetectedObject], truth: &SceneGroundTruth) -> DetectionReport {
    let mut order: Vec<usize> = (0..objects.len())
        .filter(|&i| objects[i].label != ClassLabel::Trash)
        .collect();
    order.sort_by(|&a, &b| objects[b].support.cmp(&objects[a].support));

    let mut matched = vec![false; truth.objects.len()];
    let mut correct = [0usize; ClassLabel::COUNT];
    for &i in &order {
        let obj = &objects[i];
        let hit = truth.objects.iter().enumerate().position(|(t, gt)| {
            !matched[t] && gt.label == obj.label && gt.bbox.contains_point(obj.center)
        });
        if let Some(t) = hit {
            matched[t] = true;
            correct[obj.label.code()] += 1;
        }
    }
    let rows = SCORED_LABELS
        .iter()
        .map(|&label| ReportRow {
            label,
            correctly_identified: correct[label.code()],
            identified: objects.iter().filter(|o| o.label == label).count(),
            total: truth.objects.iter().filter(|o| o.label == label).count(),
        })
        .collect();
    DetectionReport::from_rows(rows)
}

/// Rows are true labels, columns predicted labels, both in code order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; ClassLabel::COUNT]; ClassLabel::COUNT],
    pub row_normalized: [[f64; ClassLabel::COUNT]; ClassLabel::COUNT],
}

pub fn confusion_matrix(pairs: &[(ClassLabel, ClassLabel)]) -> ConfusionMatrix {
    let mut counts = [[0u64; ClassLabel::COUNT]; ClassLabel::COUNT];
    for &(t, p) in pairs {
        counts[t.code()][p.code()] += 1;
    }
    let row_normalized = counts.map(|row| {
        let n: u64 = row.iter().sum();
        if n == 0 {
            [0.0; ClassLabel::COUNT]
        } else {
            row.map(|c| c as f64 / n as f64)
        }
    });
    ConfusionMatrix {
        counts,
        row_normalized,
    }
}

impl ConfusionMatrix {
    pub fn row_total(&self, label: ClassLabel) -> u64 {
        self.counts[label.code()].iter().sum()
    }

    /// Fraction of all pairs on the diagonal.
    pub fn accuracy(&self) -> f64 {
        let total: u64 = self.counts.iter().flatten().sum();
        let diag: u64 = (0..ClassLabel::COUNT).map(|i| self.counts[i][i]).sum();
        if total == 0 {
            0.0
        } else {
            diag as f64 / total as f64
        }
    }

    /// Mean per-class recall over classes that have samples; equals
    /// [`accuracy`](Self::accuracy) when classes are balanced.
    pub fn balanced_accuracy(&self) -> f64 {
        let present: Vec<usize> = (0..ClassLabel::COUNT)
            .filter(|&i| self.counts[i].iter().sum::<u64>() > 0)
            .collect();
        if present.is_empty() {
            return 0.0;
        }
        present.iter().map(|&i| self.row_normalized[i][i]).sum::<f64>() / present.len() as f64
    }

    /// Header of the six label names, then one row of counts per true label.
    pub fn to_csv(&self) -> String {
        let mut out = ClassLabel::ALL.map(|l| l.name()).join(",");
        out.push('\n');
        for row in &self.counts {
            out.push_str(&row.map(|c| c.to_string()).join(","));
            out.push('\n');
        }
        out
    }
}
