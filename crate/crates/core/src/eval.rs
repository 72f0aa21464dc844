//! Classification accuracy and cross-modal retrieval scores for embeddings.
//! Embeddings are `m × n` with one column per sample.

use crate::error::{Error, Result};
use crate::framework::argmax_columns;
use crate::linalg::{row_means, subtract_column, Mat, Vector};

pub const CLASSIFIER_RIDGE: f64 = 1e-4;

/// One-vs-rest linear scorer `scores = W z + b`.
#[derive(Debug, Clone)]
pub struct LinearClassifier {
    /// `c × m`.
    pub weights: Mat,
    pub bias: Vector,
}

impl LinearClassifier {
    pub fn scores(&self, z: &Mat) -> Result<Mat> {
        if z.nrows() != self.weights.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "classifier expects {} features, got {}",
                self.weights.ncols(),
                z.nrows()
            )));
        }
        let mut s = &self.weights * z;
        for mut col in s.column_iter_mut() {
            col += &self.bias;
        }
        Ok(s)
    }

    pub fn predict(&self, z: &Mat) -> Result<Vec<usize>> {
        Ok(argmax_columns(&self.scores(z)?))
    }
}

/// Ridge regression of `±1` class targets on centered features with an
/// unpenalized bias.
pub fn train_linear_classifier(
    z: &Mat,
    labels: &[usize],
    num_classes: usize,
) -> Result<LinearClassifier> {
    let (m, n) = z.shape();
    if labels.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {} samples",
            labels.len(),
            n
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
        return Err(Error::InvalidParameter(format!(
            "label index {bad} out of range for {num_classes} classes"
        )));
    }
    let targets = Mat::from_fn(num_classes, n, |r, j| if labels[j] == r { 1.0 } else { -1.0 });
    let mu = row_means(z);
    let zc = subtract_column(z, &mu);
    let gram = &zc * zc.transpose() + Mat::identity(m, m) * CLASSIFIER_RIDGE;
    let rhs = &zc * targets.transpose();
    let solved = gram
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?
        .solve(&rhs);
    let weights = solved.transpose();
    let bias = row_means(&targets) - &weights * mu;
    Ok(LinearClassifier { weights, bias })
}

fn sq_dist(a: nalgebra::DVectorView<'_, f64>, b: nalgebra::DVectorView<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean 1-nearest neighbour; ties go to the lowest training index.
pub fn knn1_classify(z_train: &Mat, labels: &[usize], z_test: &Mat) -> Result<Vec<usize>> {
    if z_train.nrows() != z_test.nrows() || labels.len() != z_train.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "train {:?} with {} labels, test {:?}",
            z_train.shape(),
            labels.len(),
            z_test.shape()
        )));
    }
    if z_train.ncols() == 0 {
        return Err(Error::InvalidParameter("empty training set".into()));
    }
    Ok(z_test
        .column_iter()
        .map(|q| {
            let mut best = (f64::INFINITY, 0);
            for (i, t) in z_train.column_iter().enumerate() {
                let d = sq_dist(q.as_view(), t.as_view());
                if d < best.0 {
                    best = (d, i);
                }
            }
            labels[best.1]
        })
        .collect())
}

pub fn accuracy<T: PartialEq>(predicted: &[T], actual: &[T]) -> f64 {
    assert_eq!(predicted.len(), actual.len(), "prediction length mismatch");
    if actual.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    hits as f64 / actual.len() as f64
}

/// `(1/R) Σ_k Prec@k · rel(k)`; zero when nothing is relevant.
pub fn average_precision(relevance: &[bool]) -> f64 {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (k, &rel) in relevance.iter().enumerate() {
        if rel {
            hits += 1;
            sum += hits as f64 / (k + 1) as f64;
        }
    }
    if hits == 0 {
        0.0
    } else {
        sum / hits as f64
    }
}

/// Gallery indices by ascending distance to `query`, ties by index.
pub fn rank_gallery(query: nalgebra::DVectorView<'_, f64>, gallery: &Mat) -> Vec<usize> {
    let dists: Vec<f64> = gallery
        .column_iter()
        .map(|g| sq_dist(query, g.as_view()))
        .collect();
    let mut order: Vec<usize> = (0..dists.len()).collect();
    order.sort_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(a.cmp(&b)));
    order
}

/// Per-query average precision for one retrieval direction.
pub fn retrieval_aps(
    queries: &Mat,
    query_labels: &[usize],
    gallery: &Mat,
    gallery_labels: &[usize],
) -> Result<Vec<f64>> {
    if queries.nrows() != gallery.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "query dimension {} differs from gallery dimension {}",
            queries.nrows(),
            gallery.nrows()
        )));
    }
    if queries.ncols() != query_labels.len() || gallery.ncols() != gallery_labels.len() {
        return Err(Error::ShapeMismatch("labels must cover queries and gallery".into()));
    }
    Ok(queries
        .column_iter()
        .zip(query_labels)
        .map(|(q, &lq)| {
            let relevance: Vec<bool> = rank_gallery(q.as_view(), gallery)
                .into_iter()
                .map(|i| gallery_labels[i] == lq)
                .collect();
            average_precision(&relevance)
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct RetrievalResult {
    pub ap_a_to_b: Vec<f64>,
    pub ap_b_to_a: Vec<f64>,
    pub map_a_to_b: f64,
    pub map_b_to_a: f64,
    pub map_mean: f64,
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Both retrieval directions between two embedded views in the common space.
pub fn cross_modal_retrieve(
    za: &Mat,
    labels_a: &[usize],
    zb: &Mat,
    labels_b: &[usize],
) -> Result<RetrievalResult> {
    let ap_a_to_b = retrieval_aps(za, labels_a, zb, labels_b)?;
    let ap_b_to_a = retrieval_aps(zb, labels_b, za, labels_a)?;
    let map_a_to_b = mean(&ap_a_to_b);
    let map_b_to_a = mean(&ap_b_to_a);
    Ok(RetrievalResult {
        ap_a_to_b,
        ap_b_to_a,
        map_a_to_b,
        map_b_to_a,
        map_mean: (map_a_to_b + map_b_to_a) / 2.0,
    })
}

/// Mean and sample standard deviation; the deviation of one value is zero.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let m = mean(values);
    if values.len() < 2 {
        return (m, 0.0);
    }
    let var = values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (values.len() - 1) as f64;
    (m, var.sqrt())
}
