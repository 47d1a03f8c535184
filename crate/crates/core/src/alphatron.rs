//! The kernel Alphatron: synchronous residual updates of dual coefficients
//! with model selection over iterations.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};

/// Default failure probability of the iteration-count rule.
pub const DEFAULT_DELTA: f64 = 0.1;

/// `T = ceil(sqrt(N / ln(1/δ)))`.
pub fn default_iterations(n: usize, delta: f64) -> usize {
    ((n as f64 / (1.0 / delta).ln()).sqrt().ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QkaModel {
    pub alpha: Vec<f64>,
    /// 1-based index of the selected iterate.
    pub selected_iteration: usize,
    pub lambda: f64,
    pub iterations: usize,
    pub training_params: Vec<Vec<f64>>,
    /// Validation risk of `ĥ^t` for `t = 1..=T`.
    pub validation_risk: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub lambda: f64,
    pub iterations: usize,
}

/// Runs `T` synchronous updates `α^{t+1} = α^t + (λ/N)(b − K α^t)` from
/// `α¹ = 0` and keeps the iterate with the smallest validation risk (ties go
/// to the earliest).
///
/// `k_val` holds one row per validation point: its kernel values against the
/// training set.
pub fn train_qka(
    k_train: &DMatrix<f64>,
    b: &[f64],
    options: TrainOptions,
    k_val: &[Vec<f64>],
    y_val: &[f64],
) -> Result<QkaModel> {
    let n = b.len();
    check_len(n, k_train.nrows())?;
    check_len(n, k_train.ncols())?;
    check_len(k_val.len(), y_val.len())?;
    if options.iterations == 0 {
        return Err(Error::InvalidArgument("need at least one iteration".into()));
    }
    if k_val.is_empty() {
        return Err(Error::InvalidArgument("validation set is empty".into()));
    }
    for row in k_val {
        check_len(n, row.len())?;
    }
    let k_val = DMatrix::from_fn(k_val.len(), n, |r, c| k_val[r][c]);
    let y_val = DVector::from_column_slice(y_val);
    let b = DVector::from_column_slice(b);
    let step = options.lambda / n as f64;

    let mut alpha = DVector::zeros(n);
    let mut best = (f64::INFINITY, 0, alpha.clone());
    let mut risks = Vec::with_capacity(options.iterations);
    for t in 1..=options.iterations {
        let val_pred = &k_val * &alpha;
        let risk = (val_pred - &y_val).norm_squared() / y_val.len() as f64;
        if !risk.is_finite() {
            return Err(Error::TrainingDivergence { iteration: t });
        }
        risks.push(risk);
        if risk < best.0 {
            best = (risk, t, alpha.clone());
        }
        if t < options.iterations {
            // ĥ^t(a_i) = Σ_j α_j K[j][i]
            let h = k_train.tr_mul(&alpha);
            alpha += (&b - h) * step;
        }
    }
    Ok(QkaModel {
        alpha: best.2.iter().copied().collect(),
        selected_iteration: best.1,
        lambda: options.lambda,
        iterations: options.iterations,
        training_params: Vec::new(),
        validation_risk: risks,
    })
}

/// `α^T` without model selection: the iterate reached after a fixed number
/// of updates.
pub fn final_iterate(k_train: &DMatrix<f64>, b: &[f64], options: TrainOptions) -> Result<Vec<f64>> {
    let n = b.len();
    check_len(n, k_train.nrows())?;
    check_len(n, k_train.ncols())?;
    if options.iterations == 0 {
        return Err(Error::InvalidArgument("need at least one iteration".into()));
    }
    let b = DVector::from_column_slice(b);
    let step = options.lambda / n as f64;
    let mut alpha = DVector::zeros(n);
    for t in 1..options.iterations {
        alpha += (&b - k_train.tr_mul(&alpha)) * step;
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::TrainingDivergence { iteration: t + 1 });
        }
    }
    Ok(alpha.iter().copied().collect())
}

pub fn predict(model: &QkaModel, k: &[f64]) -> Result<f64> {
    check_len(model.alpha.len(), k.len())?;
    Ok(model.alpha.iter().zip(k).map(|(a, k)| a * k).sum())
}

pub fn empirical_risk(preds: &[f64], labels: &[f64]) -> Result<f64> {
    check_len(labels.len(), preds.len())?;
    if preds.is_empty() {
        return Ok(0.0);
    }
    Ok(preds.iter().zip(labels).map(|(p, l)| (p - l).powi(2)).sum::<f64>() / preds.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    C1,
    C2,
    Reject,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::C1 => "c1",
            Class::C2 => "c2",
            Class::Reject => "reject",
        })
    }
}

/// `value > t1` is `C1`, `value < t2` is `C2`, anything between is rejected.
pub fn classify(value: f64, t1: f64, t2: f64) -> Result<Class> {
    if t2 > t1 {
        return Err(Error::InvalidArgument(format!("thresholds need t2 <= t1, got t1={t1}, t2={t2}")));
    }
    Ok(if value > t1 {
        Class::C1
    } else if value < t2 {
        Class::C2
    } else {
        Class::Reject
    })
}

pub fn success_rate<T: PartialEq>(predicted: &[T], truth: &[T]) -> Result<f64> {
    check_len(truth.len(), predicted.len())?;
    if predicted.is_empty() {
        return Err(Error::InvalidArgument("success rate of an empty set".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / predicted.len() as f64)
}

/// Solves `(K + ridge·I) α = b`.
pub fn kernel_ridge_solve(k: &DMatrix<f64>, b: &[f64], ridge: f64) -> Result<Vec<f64>> {
    check_len(k.nrows(), k.ncols())?;
    check_len(k.nrows(), b.len())?;
    if !(ridge >= 0.0) {
        return Err(Error::InvalidArgument(format!("ridge must be non-negative, got {ridge}")));
    }
    let n = b.len();
    let system = k + DMatrix::<f64>::identity(n, n) * ridge;
    let solution = system
        .lu()
        .solve(&DVector::from_column_slice(b))
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Singular(format!("kernel system singular at ridge {ridge:e}")))?;
    Ok(solution.iter().copied().collect())
}

/// Median over the 3×3 neighbourhood (clipped at the border) of every cell of
/// a row-major `rows × cols` grid.
pub fn median_smooth(values: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    check_len(rows * cols, values.len())?;
    let mut out = Vec::with_capacity(values.len());
    for r in 0..rows {
        for c in 0..cols {
            let mut window: Vec<f64> = (r.saturating_sub(1)..=(r + 1).min(rows - 1))
                .flat_map(|rr| (c.saturating_sub(1)..=(c + 1).min(cols - 1)).map(move |cc| (rr, cc)))
                .map(|(rr, cc)| values[rr * cols + cc])
                .collect();
            window.sort_by(f64::total_cmp);
            let m = window.len();
            out.push(if m % 2 == 1 {
                window[m / 2]
            } else {
                (window[m / 2 - 1] + window[m / 2]) / 2.0
            });
        }
    }
    Ok(out)
}

impl QkaModel {
    /// Text form: `N lambda T r d`, then the α values, then one training
    /// parameter vector per line.
    pub fn to_text(&self) -> String {
        let d = self.training_params.first().map_or(0, Vec::len);
        let mut out = format!(
            "{} {:.17e} {} {} {}\n",
            self.alpha.len(),
            self.lambda,
            self.iterations,
            self.selected_iteration,
            d
        );
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(" ");
        out.push_str(&join(&self.alpha));
        out.push('\n');
        for p in &self.training_params {
            out.push_str(&join(p));
            out.push('\n');
        }
        out.push_str(&join(&self.validation_risk));
        out.push('\n');
        out
    }
}

impl FromStr for QkaModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        fn floats(line: Option<&str>, no: usize) -> Result<Vec<f64>> {
            line.ok_or_else(|| Error::parse(no, "unexpected end of model"))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::parse(no, format!("bad number `{t}`"))))
                .collect()
        }
        let mut lines = s.lines();
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty model"))?
            .split_whitespace()
            .collect();
        if header.len() != 5 {
            return Err(Error::parse(1, "header needs `N lambda T r d`"));
        }
        let int = |i: usize| -> Result<usize> { header[i].parse().map_err(|_| Error::parse(1, format!("bad header field `{}`", header[i]))) };
        let n = int(0)?;
        let lambda: f64 = header[1].parse().map_err(|_| Error::parse(1, "bad lambda"))?;
        let (iterations, selected_iteration, d) = (int(2)?, int(3)?, int(4)?);
        let alpha = floats(lines.next(), 2)?;
        check_len(n, alpha.len())?;
        let mut training_params = Vec::with_capacity(n);
        for i in 0..n {
            let p = floats(lines.next(), 3 + i)?;
            check_len(d, p.len())?;
            training_params.push(p);
        }
        let validation_risk = floats(lines.next(), 3 + n)?;
        if !(1..=iterations).contains(&selected_iteration) {
            return Err(Error::parse(1, "selected iteration outside 1..=T"));
        }
        Ok(QkaModel {
            alpha,
            selected_iteration,
            lambda,
            iterations,
            training_params,
            validation_risk,
        })
    }
}

/// Rows `param..., prediction, label, class`.
pub fn predictions_csv(
    param_names: &[&str],
    params: &[Vec<f64>],
    predictions: &[f64],
    labels: &[f64],
    classes: &[Class],
) -> Result<String> {
    check_len(params.len(), predictions.len())?;
    check_len(params.len(), labels.len())?;
    check_len(params.len(), classes.len())?;
    let mut out = param_names.join(",");
    out.push_str(if param_names.is_empty() { "prediction,label,class\n" } else { ",prediction,label,class\n" });
    for (((p, pred), label), class) in params.iter().zip(predictions).zip(labels).zip(classes) {
        for v in p {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{pred},{label},{class}\n"));
    }
    Ok(out)
}
