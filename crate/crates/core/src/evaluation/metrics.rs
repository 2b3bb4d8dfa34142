//! Confusion counts, the derived metric set, and ROC analysis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recording::Label;

/// Task is the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn from_predictions(truth: &[Label], predicted: &[Label]) -> Self {
        let mut cm = Self::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            cm.record(t, p);
        }
        cm
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Task, Label::Task) => self.tp += 1,
            (Label::Rest, Label::Task) => self.fp += 1,
            (Label::Rest, Label::Rest) => self.tn += 1,
            (Label::Task, Label::Rest) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    /// Sensitivity.
    pub tpr: f64,
    /// Specificity.
    pub tnr: f64,
    pub kappa: f64,
    pub f1: f64,
    pub auc: Option<f64>,
}

/// Accuracy, TPR, TNR, Cohen's kappa and F1 from confusion counts.
///
/// Conventions for empty denominators: tpr = 1 with no actual positives,
/// tnr = 1 with no actual negatives, precision = 0 with no predicted
/// positives, f1 = 0 when precision + recall = 0, and kappa = 1 (perfect
/// agreement) or 0 (otherwise) when chance agreement is 1.
pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Empty("confusion matrix has no samples"));
    }
    let n = total as f64;
    let (tp, fp, tn, fn_) = (cm.tp as f64, cm.fp as f64, cm.tn as f64, cm.fn_ as f64);
    let accuracy = (tp + tn) / n;
    let tpr = if cm.tp + cm.fn_ == 0 { 1.0 } else { tp / (tp + fn_) };
    let tnr = if cm.tn + cm.fp == 0 { 1.0 } else { tn / (tn + fp) };
    let precision = if cm.tp + cm.fp == 0 { 0.0 } else { tp / (tp + fp) };
    let f1 = if precision + tpr == 0.0 {
        0.0
    } else {
        2.0 * precision * tpr / (precision + tpr)
    };
    let p_e = ((tp + fp) * (tp + fn_) + (tn + fn_) * (tn + fp)) / (n * n);
    let kappa = if p_e == 1.0 {
        if accuracy == 1.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (accuracy - p_e) / (1.0 - p_e)
    };
    Ok(Metrics {
        accuracy,
        tpr,
        tnr,
        kappa,
        f1,
        auc: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC by descending threshold sweep; tied scores move together, so the
/// trapezoid AUC equals the Mann–Whitney statistic with ties counted half.
pub fn roc_curve(labels: &[Label], scores: &[f64]) -> Result<RocCurve> {
    if labels.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: scores.len(),
        });
    }
    let pos = labels.iter().filter(|l| l.is_task()).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::invalid("ROC needs both classes"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (prev_tp, prev_fp) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]].is_task() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        // trapezoid in count space, normalised at the end
        auc += (fp - prev_fp) as f64 * (tp + prev_tp) as f64 / 2.0;
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
    }
    Ok(RocCurve {
        points,
        auc: auc / (pos as f64 * neg as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(tp: usize, fp: usize, tn: usize, fn_: usize) -> ConfusionMatrix {
        ConfusionMatrix { tp, fp, tn, fn_ }
    }

    #[test]
    fn metric_examples() {
        let m = compute_metrics(&cm(50, 0, 50, 0)).unwrap();
        assert_eq!((m.accuracy, m.kappa, m.f1), (1.0, 1.0, 1.0));

        let m = compute_metrics(&cm(40, 10, 40, 10)).unwrap();
        assert!((m.accuracy - 0.8).abs() < 1e-15);
        assert!((m.kappa - 0.6).abs() < 1e-12);
        assert!((m.f1 - 0.8).abs() < 1e-12);

        let m = compute_metrics(&cm(0, 0, 10, 10)).unwrap();
        assert_eq!((m.tpr, m.tnr, m.f1), (0.0, 1.0, 0.0));

        assert!(compute_metrics(&cm(0, 0, 0, 0)).is_err());
    }

    #[test]
    fn kappa_when_chance_is_certain() {
        assert_eq!(compute_metrics(&cm(0, 0, 7, 0)).unwrap().kappa, 1.0);
    }

    #[test]
    fn roc_examples() {
        let labels = [Label::Task, Label::Task, Label::Rest, Label::Rest];
        let perfect = roc_curve(&labels, &[0.9, 0.8, 0.1, 0.2]).unwrap();
        assert_eq!(perfect.auc, 1.0);
        let reversed = roc_curve(&labels, &[-0.9, -0.8, -0.1, -0.2]).unwrap();
        assert_eq!(reversed.auc, 0.0);
        let tied = roc_curve(&labels, &[0.3; 4]).unwrap();
        assert_eq!(tied.auc, 0.5);
        assert_eq!(tied.points.len(), 2);
        assert!(roc_curve(&[Label::Task; 3], &[0.0; 3]).is_err());
    }
}
