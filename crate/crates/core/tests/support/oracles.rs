//! Slow, independent re-derivations used to check the library.
#![allow(dead_code)]

use fnirs_core::Label;

/// |X[k]|, k = 1..n−1, by the O(n²) DFT sum.
pub fn naive_dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (1..n)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &v) in x.iter().enumerate() {
                let angle = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                re += v * angle.cos();
                im += v * angle.sin();
            }
            re.hypot(im)
        })
        .collect()
}

fn centred_embedding(x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let rows = x.len() - m + 1;
    let mut emb: Vec<Vec<f64>> = (0..rows).map(|i| x[i..i + m].to_vec()).collect();
    for j in 0..m {
        let mean = emb.iter().map(|r| r[j]).sum::<f64>() / rows as f64;
        emb.iter_mut().for_each(|r| r[j] -= mean);
    }
    emb
}

/// First principal-component scores of the delay embedding via power
/// iteration on the covariance. Sign is arbitrary.
pub fn power_iteration_component(x: &[f64], m: usize) -> Vec<f64> {
    let emb = centred_embedding(x, m);
    let rows = emb.len() as f64;
    let mut cov = vec![vec![0.0; m]; m];
    for r in &emb {
        for i in 0..m {
            for j in 0..m {
                cov[i][j] += r[i] * r[j] / rows;
            }
        }
    }
    let mut v: Vec<f64> = (0..m).map(|i| 1.0 + i as f64 * 0.01).collect();
    for _ in 0..100_000 {
        let mut next: Vec<f64> = (0..m).map(|i| (0..m).map(|j| cov[i][j] * v[j]).sum()).collect();
        let norm = next.iter().map(|a| a * a).sum::<f64>().sqrt();
        next.iter_mut().for_each(|a| *a /= norm);
        let change = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if change < 1e-15 {
            break;
        }
    }
    emb.iter().map(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum()).collect()
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// (Σ_pooled + ridge·I)⁻¹ (μ_task − μ_rest), ridge = factor · trace/d,
/// pooled divisor n − 2.
pub fn lda_weights(rows: &[Vec<f64>], labels: &[Label], ridge_factor: f64) -> Vec<f64> {
    let d = rows[0].len();
    let mean = |want: Label| {
        let members: Vec<&Vec<f64>> = rows.iter().zip(labels).filter(|(_, &l)| l == want).map(|(r, _)| r).collect();
        (0..d).map(|j| members.iter().map(|r| r[j]).sum::<f64>() / members.len() as f64).collect::<Vec<f64>>()
    };
    let (mt, mr) = (mean(Label::Task), mean(Label::Rest));
    let mut cov = vec![vec![0.0; d]; d];
    for (r, &l) in rows.iter().zip(labels) {
        let mu = if l == Label::Task { &mt } else { &mr };
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += (r[i] - mu[i]) * (r[j] - mu[j]);
            }
        }
    }
    let denom = (rows.len() - 2) as f64;
    cov.iter_mut().flatten().for_each(|c| *c /= denom);
    let trace: f64 = (0..d).map(|i| cov[i][i]).sum();
    for i in 0..d {
        cov[i][i] += ridge_factor * trace / d as f64;
    }
    let diff = mt.iter().zip(&mr).map(|(a, b)| a - b).collect();
    gauss_solve(cov, diff)
}

pub struct Counted {
    pub accuracy: f64,
    pub tpr: f64,
    pub tnr: f64,
    pub kappa: f64,
    pub f1: f64,
}

/// Metrics re-derived from raw prediction lists. Assumes both classes occur
/// in `truth` and at least one task prediction or task truth exists.
pub fn count_metrics(truth: &[Label], predicted: &[Label]) -> Counted {
    let n = truth.len() as f64;
    let count = |t: Label, p: Label| truth.iter().zip(predicted).filter(|(&a, &b)| a == t && b == p).count() as f64;
    let (tp, fp, tn, fn_) = (
        count(Label::Task, Label::Task),
        count(Label::Rest, Label::Task),
        count(Label::Rest, Label::Rest),
        count(Label::Task, Label::Rest),
    );
    let agree = truth.iter().zip(predicted).filter(|(a, b)| a == b).count() as f64;
    let p_o = agree / n;
    let truth_task = truth.iter().filter(|l| l.is_task()).count() as f64 / n;
    let pred_task = predicted.iter().filter(|l| l.is_task()).count() as f64 / n;
    let p_e = truth_task * pred_task + (1.0 - truth_task) * (1.0 - pred_task);
    Counted {
        accuracy: p_o,
        tpr: tp / (tp + fn_),
        tnr: tn / (tn + fp),
        kappa: (p_o - p_e) / (1.0 - p_e),
        f1: 2.0 * tp / (2.0 * tp + fp + fn_),
    }
}

/// P(score_task > score_rest) + ½ P(tie), by enumerating all pairs.
pub fn mann_whitney_auc(labels: &[Label], scores: &[f64]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, li) in labels.iter().enumerate() {
        if !li.is_task() {
            continue;
        }
        for (j, lj) in labels.iter().enumerate() {
            if lj.is_task() {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
