//! Softmax-regression role classification over repeated stratified splits.

use std::io::Write;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::{par, seed};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    pub train_frac: f64,
    pub repeats: usize,
    pub seed: u64,
    /// L2 penalty on the weights (biases are not penalized).
    pub lambda: f64,
    pub max_iters: usize,
    pub tolerance: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            train_frac: 0.7,
            repeats: 50,
            seed: 0,
            lambda: 1e-4,
            max_iters: 500,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub task: String,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub config: Vec<(String, String)>,
}

impl EvalReport {
    pub fn new(task: impl Into<String>, accuracies: Vec<f64>, config: Vec<(String, String)>) -> Self {
        let mean = accuracies.iter().sum::<f64>() / accuracies.len().max(1) as f64;
        EvalReport {
            task: task.into(),
            accuracies,
            mean,
            config,
        }
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# task={}", self.task)?;
        for (k, v) in &self.config {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "repeat\taccuracy")?;
        for (i, a) in self.accuracies.iter().enumerate() {
            writeln!(w, "{i}\t{a:.6}")?;
        }
        writeln!(w, "mean\t{:.6}", self.mean)
    }

    pub fn summary(&self) -> String {
        let n = self.accuracies.len();
        let var = self.accuracies.iter().map(|a| (a - self.mean).powi(2)).sum::<f64>() / n.max(2).saturating_sub(1) as f64;
        format!(
            "{}: mean accuracy {:.4} (sd {:.4}) over {} repeats",
            self.task,
            self.mean,
            var.sqrt(),
            n
        )
    }
}

/// Row-major feature matrix view.
#[derive(Debug, Clone, Copy)]
pub struct Features<'a> {
    pub data: &'a [f64],
    pub dim: usize,
}

impl<'a> Features<'a> {
    pub fn new(data: &'a [f64], dim: usize) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::invalid("feature matrix width does not divide its length"));
        }
        Ok(Features { data, dim })
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Mean held-out accuracy of softmax regression over `cfg.repeats`
/// stratified splits. Repeat `i` draws its split from `derive(seed, i)`, so
/// the report does not depend on how repeats are scheduled.
pub fn classify(features: Features<'_>, labels: &[usize], cfg: &ClassifyConfig) -> Result<EvalReport> {
    if labels.len() != features.rows() {
        return Err(Error::invalid(format!(
            "{} labels for {} embedding rows",
            labels.len(),
            features.rows()
        )));
    }
    if !(cfg.train_frac > 0.0 && cfg.train_frac < 1.0) {
        return Err(Error::invalid("train fraction must lie in (0, 1)"));
    }
    if cfg.repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    let (labels, classes) = group_by_class(labels);
    let labels = labels.as_slice();
    if classes.len() < 2 {
        return Err(Error::invalid("classification needs at least 2 classes"));
    }
    if let Some(c) = classes.iter().position(|m| m.len() < 2) {
        return Err(Error::invalid(format!("class {c} has fewer than 2 labeled nodes")));
    }

    let runs = par::map_indexed(cfg.repeats, |i| {
        let (train, test) = stratified_split(&classes, cfg.train_frac, seed::derive(cfg.seed, i as u64));
        let model = Softmax::fit(features, labels, &train, classes.len(), cfg);
        let hits = test.iter().filter(|&&r| model.predict(features.row(r)) == labels[r]).count();
        hits as f64 / test.len() as f64
    });
    let config = vec![
        ("train_frac".into(), cfg.train_frac.to_string()),
        ("repeats".into(), cfg.repeats.to_string()),
        ("seed".into(), cfg.seed.to_string()),
        ("lambda".into(), cfg.lambda.to_string()),
        ("max_iters".into(), cfg.max_iters.to_string()),
        ("rows".into(), features.rows().to_string()),
        ("classes".into(), classes.len().to_string()),
    ];
    Ok(EvalReport::new("classify", runs, config))
}

/// Dense class ids (in ascending order of the original ids) and the member
/// rows of each class.
fn group_by_class(labels: &[usize]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut ids: Vec<usize> = labels.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let dense: Vec<usize> = labels.iter().map(|l| ids.binary_search(l).unwrap()).collect();
    let mut members = vec![Vec::new(); ids.len()];
    for (i, &c) in dense.iter().enumerate() {
        members[c].push(i);
    }
    (dense, members)
}

/// Every class has at least two members, so clamping the per-class cut to
/// `1..len` always leaves each class on both sides of the split.
fn stratified_split(classes: &[Vec<usize>], train_frac: f64, split_seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = seed::rng(split_seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in classes {
        let mut m = members.clone();
        m.shuffle(&mut rng);
        let cut = ((m.len() as f64 * train_frac).round() as usize).clamp(1, m.len() - 1);
        train.extend_from_slice(&m[..cut]);
        test.extend_from_slice(&m[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Multinomial logistic regression on standardized features.
struct Softmax {
    mean: Vec<f64>,
    scale: Vec<f64>,
    /// `k x (d + 1)`, bias last.
    weights: Vec<f64>,
    k: usize,
}

impl Softmax {
    fn fit(features: Features<'_>, labels: &[usize], rows: &[usize], k: usize, cfg: &ClassifyConfig) -> Self {
        let d = features.dim;
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for &r in rows {
            mean.iter_mut().zip(features.row(r)).for_each(|(m, x)| *m += x / n);
        }
        let mut var = vec![0.0; d];
        for &r in rows {
            for j in 0..d {
                var[j] += (features.row(r)[j] - mean[j]).powi(2) / n;
            }
        }
        let scale: Vec<f64> = var.iter().map(|v| if *v > 1e-24 { 1.0 / v.sqrt() } else { 1.0 }).collect();
        let x: Vec<f64> = rows
            .iter()
            .flat_map(|&r| {
                let row = features.row(r);
                (0..d).map(|j| (row[j] - mean[j]) * scale[j]).chain(std::iter::once(1.0)).collect::<Vec<_>>()
            })
            .collect();
        let y: Vec<usize> = rows.iter().map(|&r| labels[r]).collect();

        let problem = Problem { x: &x, y: &y, k, d1: d + 1, lambda: cfg.lambda };
        let mut w = vec![0.0; k * (d + 1)];
        let mut grad = vec![0.0; w.len()];
        let mut f = problem.eval(&w, &mut grad);
        let mut step = 1.0;
        let mut trial = vec![0.0; w.len()];
        let mut trial_grad = vec![0.0; w.len()];
        for _ in 0..cfg.max_iters {
            let g2: f64 = grad.iter().map(|g| g * g).sum();
            if g2.sqrt() < cfg.tolerance {
                break;
            }
            let mut accepted = false;
            while step > 1e-12 {
                trial.iter_mut().zip(&w).zip(&grad).for_each(|((t, wi), g)| *t = wi - step * g);
                let ft = problem.eval(&trial, &mut trial_grad);
                if ft <= f - 0.5 * step * g2 {
                    std::mem::swap(&mut w, &mut trial);
                    std::mem::swap(&mut grad, &mut trial_grad);
                    f = ft;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            step *= 2.0;
        }
        Softmax { mean, scale, weights: w, k }
    }

    fn predict(&self, row: &[f64]) -> usize {
        let d = self.mean.len();
        let mut best = (f64::NEG_INFINITY, 0);
        for c in 0..self.k {
            let w = &self.weights[c * (d + 1)..(c + 1) * (d + 1)];
            let mut s = w[d];
            for j in 0..d {
                s += w[j] * (row[j] - self.mean[j]) * self.scale[j];
            }
            if s > best.0 {
                best = (s, c);
            }
        }
        best.1
    }
}

struct Problem<'a> {
    x: &'a [f64],
    y: &'a [usize],
    k: usize,
    d1: usize,
    lambda: f64,
}

impl Problem<'_> {
    /// Mean cross-entropy plus `λ/2 ‖W‖²`; writes the gradient.
    fn eval(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        let (k, d1) = (self.k, self.d1);
        let n = self.y.len() as f64;
        grad.fill(0.0);
        let mut loss = 0.0;
        let mut logits = vec![0.0; k];
        for (i, &yi) in self.y.iter().enumerate() {
            let xi = &self.x[i * d1..(i + 1) * d1];
            for c in 0..k {
                logits[c] = w[c * d1..(c + 1) * d1].iter().zip(xi).map(|(a, b)| a * b).sum();
            }
            let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = logits.iter().map(|l| (l - m).exp()).sum();
            loss += m + z.ln() - logits[yi];
            for c in 0..k {
                let p = (logits[c] - m).exp() / z - if c == yi { 1.0 } else { 0.0 };
                for (g, x) in grad[c * d1..(c + 1) * d1].iter_mut().zip(xi) {
                    *g += p * x / n;
                }
            }
        }
        let mut penalty = 0.0;
        for c in 0..k {
            for j in 0..d1 - 1 {
                let wi = w[c * d1 + j];
                penalty += wi * wi;
                grad[c * d1 + j] += self.lambda * wi;
            }
        }
        loss / n + 0.5 * self.lambda * penalty
    }
}
