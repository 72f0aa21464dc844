//! Multi-view datasets, label indicator algebra, target transforms, PCA
//! reduction and seeded splitting.
//!
//! Views are stored column-per-sample: the `s`-th view is a `d_s × n` matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::SymmetricEigen;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{centering_matrix, row_means, subtract_column, vstack, Mat, Vector};

/// Class labels re-indexed to `0..c`, with the original values kept on the side.
#[derive(Debug, Clone, PartialEq)]
pub struct Labels {
    indices: Vec<usize>,
    values: Vec<i64>,
}

impl Labels {
    /// Re-indexes arbitrary integer labels to `0..c` in ascending order of value.
    pub fn from_values(raw: &[i64]) -> Self {
        let mut map = BTreeMap::new();
        for &r in raw {
            map.entry(r).or_insert(0usize);
        }
        for (i, slot) in map.values_mut().enumerate() {
            *slot = i;
        }
        let indices = raw.iter().map(|r| map[r]).collect();
        let values = map.keys().copied().collect();
        Labels { indices, values }
    }

    /// Labels already given as class indices in `0..num_classes`. Class `r`
    /// is reported with original value `r + 1`.
    pub fn from_indices(indices: Vec<usize>, num_classes: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= num_classes) {
            return Err(Error::InvalidDataset(format!(
                "label index {bad} out of range for {num_classes} classes"
            )));
        }
        let values = (1..=num_classes as i64).collect();
        Ok(Labels { indices, values })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Original label value of each class index.
    pub fn class_values(&self) -> &[i64] {
        &self.values
    }

    pub fn original(&self, i: usize) -> i64 {
        self.values[self.indices[i]]
    }

    pub fn num_classes(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &i in &self.indices {
            counts[i] += 1;
        }
        counts
    }

    /// Restriction to the given samples; the class indexing is unchanged.
    pub fn subset(&self, idx: &[usize]) -> Labels {
        Labels {
            indices: idx.iter().map(|&i| self.indices[i]).collect(),
            values: self.values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<Mat>,
    labels: Option<Labels>,
}

impl MultiViewDataset {
    pub fn new(views: Vec<Mat>, labels: Option<Labels>) -> Result<Self> {
        let Some(first) = views.first() else {
            return Err(Error::InvalidDataset("at least one view is required".into()));
        };
        let n = first.ncols();
        if n < 2 {
            return Err(Error::InvalidDataset(format!(
                "at least 2 samples are required, got {n}"
            )));
        }
        for (s, x) in views.iter().enumerate() {
            if x.ncols() != n {
                return Err(Error::RowCountMismatch {
                    first: "view 1".into(),
                    expected: n,
                    other: format!("view {}", s + 1),
                    found: x.ncols(),
                });
            }
            if x.nrows() == 0 {
                return Err(Error::InvalidDataset(format!("view {} has no features", s + 1)));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::RowCountMismatch {
                    first: "views".into(),
                    expected: n,
                    other: "labels".into(),
                    found: labels.len(),
                });
            }
            if let Some(r) = labels.counts().iter().position(|&c| c == 0) {
                return Err(Error::EmptyClass(r));
            }
        }
        Ok(MultiViewDataset { views, labels })
    }

    pub fn views(&self) -> &[Mat] {
        &self.views
    }

    pub fn view(&self, s: usize) -> &Mat {
        &self.views[s]
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn require_labels(&self, what: &str) -> Result<&Labels> {
        self.labels
            .as_ref()
            .ok_or_else(|| Error::MissingLabels(what.to_string()))
    }

    pub fn n(&self) -> usize {
        self.views[0].ncols()
    }

    pub fn v(&self) -> usize {
        self.views.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.views.iter().map(|x| x.nrows()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.views.iter().map(|x| x.nrows()).sum()
    }

    /// The `d × n` vertical concatenation of all views.
    pub fn stacked(&self) -> Mat {
        vstack(&self.views)
    }

    pub fn means(&self) -> Vec<Vector> {
        self.views.iter().map(row_means).collect()
    }

    pub fn centered_views(&self) -> Vec<Mat> {
        self.views.iter().map(center_columns).collect()
    }

    /// Dataset restricted to the given sample indices, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let views = self
            .views
            .iter()
            .map(|x| Mat::from_fn(x.nrows(), idx.len(), |r, c| x[(r, idx[c])]))
            .collect();
        MultiViewDataset::new(views, self.labels.as_ref().map(|l| l.subset(idx)))
    }

    /// Same samples and labels, different view matrices.
    pub fn with_views(&self, views: Vec<Mat>) -> Result<Self> {
        MultiViewDataset::new(views, self.labels.clone())
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => parse_err(path, 0, format!("{other:?}")),
        })
}

/// Reads a comma-separated matrix stored one row per line.
pub fn read_csv_matrix(path: &Path) -> Result<Mat> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in csv_reader(path)?.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, i + 1, e.to_string()))?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>()
                    .map_err(|_| parse_err(path, i + 1, format!("non-numeric cell `{cell}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    path,
                    i + 1,
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(Mat::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

/// Writes through a sibling temporary file and a rename, so readers never see
/// a partially written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Writes a matrix one row per line with round-trip float formatting.
pub fn write_csv_matrix(path: &Path, m: &Mat) -> Result<()> {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = m.row(r).iter().map(|x| format!("{x}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_atomic(path, &out)
}

fn read_labels(path: &Path) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for (i, record) in csv_reader(path)?.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, i + 1, e.to_string()))?;
        let cell = record.get(0).unwrap_or("");
        if cell.is_empty() && record.len() <= 1 {
            continue;
        }
        let value = cell
            .parse::<i64>()
            .map_err(|_| parse_err(path, i + 1, format!("invalid label `{cell}`")))?;
        out.push(value);
    }
    let c = out.iter().copied().max().unwrap_or(0);
    if let Some(&bad) = out.iter().find(|&&l| l < 1) {
        return Err(Error::InvalidDataset(format!("label {bad} outside 1..={c}")));
    }
    for r in 1..=c {
        if !out.contains(&r) {
            return Err(Error::InvalidDataset(format!(
                "labels must cover 1..={c} contiguously; class {r} is missing"
            )));
        }
    }
    Ok(out)
}

/// Loads `view_1.csv … view_v.csv` (one sample per row) and an optional
/// `labels.csv` from `root`.
pub fn load_dataset(root: &Path) -> Result<MultiViewDataset> {
    if !root.is_dir() {
        return Err(Error::InvalidDataset(format!(
            "dataset directory {} does not exist",
            root.display()
        )));
    }
    let mut views = Vec::new();
    let mut first_rows = 0;
    for s in 1.. {
        let path = root.join(format!("view_{s}.csv"));
        if !path.exists() {
            break;
        }
        let rows = read_csv_matrix(&path)?;
        if s == 1 {
            first_rows = rows.nrows();
        } else if rows.nrows() != first_rows {
            return Err(Error::RowCountMismatch {
                first: "view_1.csv".into(),
                expected: first_rows,
                other: format!("view_{s}.csv"),
                found: rows.nrows(),
            });
        }
        views.push(rows.transpose());
    }
    if views.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "no view_1.csv found in {}",
            root.display()
        )));
    }
    let label_path = root.join("labels.csv");
    let labels = if label_path.exists() {
        let raw = read_labels(&label_path)?;
        if raw.len() != first_rows {
            return Err(Error::RowCountMismatch {
                first: "view_1.csv".into(),
                expected: first_rows,
                other: "labels.csv".into(),
                found: raw.len(),
            });
        }
        Some(Labels::from_values(&raw))
    } else {
        None
    };
    MultiViewDataset::new(views, labels)
}

/// Writes a dataset in the layout read by [`load_dataset`].
pub fn save_dataset(ds: &MultiViewDataset, root: &Path) -> Result<()> {
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    for (s, x) in ds.views().iter().enumerate() {
        write_csv_matrix(&root.join(format!("view_{}.csv", s + 1)), &x.transpose())?;
    }
    if let Some(labels) = ds.labels() {
        let path = root.join("labels.csv");
        let body: String = (0..labels.len())
            .map(|i| format!("{}\n", labels.original(i)))
            .collect();
        write_atomic(&path, &body)?;
    }
    Ok(())
}

/// `X H_n`: removes the mean column from every column.
pub fn center_columns(x: &Mat) -> Mat {
    subtract_column(x, &row_means(x))
}

/// One-hot indicator `Y`, class counts `Σ = Y Yᵀ`, and the class-similarity
/// kernel `Q = Yᵀ Σ⁻¹ Y`.
#[derive(Debug, Clone)]
pub struct IndicatorMatrix {
    y: Mat,
    counts: Vec<f64>,
    q: Mat,
}

pub fn build_indicator(labels: &Labels) -> Result<IndicatorMatrix> {
    let c = labels.num_classes();
    let n = labels.len();
    let counts: Vec<f64> = labels.counts().into_iter().map(|k| k as f64).collect();
    if let Some(r) = counts.iter().position(|&k| k == 0.0) {
        return Err(Error::EmptyClass(r));
    }
    let idx = labels.indices();
    let y = Mat::from_fn(c, n, |r, i| if idx[i] == r { 1.0 } else { 0.0 });
    let q = Mat::from_fn(n, n, |i, j| {
        if idx[i] == idx[j] {
            1.0 / counts[idx[i]]
        } else {
            0.0
        }
    });
    Ok(IndicatorMatrix { y, counts, q })
}

impl IndicatorMatrix {
    pub fn y(&self) -> &Mat {
        &self.y
    }

    pub fn q(&self) -> &Mat {
        &self.q
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    /// `Σ` as a dense diagonal matrix.
    pub fn sigma(&self) -> Mat {
        Mat::from_diagonal(&Vector::from_column_slice(&self.counts))
    }

    pub fn n(&self) -> usize {
        self.y.ncols()
    }

    pub fn c(&self) -> usize {
        self.y.nrows()
    }

    /// `Q − (1/n) 1 1ᵀ`, which equals `H_n Q H_n`.
    pub fn centered_q(&self) -> Mat {
        let n = self.n();
        &self.q - Mat::from_element(n, n, 1.0 / n as f64)
    }

    /// `Σ⁻¹ Y`: each row averages over one class.
    pub fn class_averaging(&self) -> Mat {
        let mut m = self.y.clone();
        for (r, mut row) in m.row_iter_mut().enumerate() {
            row /= self.counts[r];
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetKind {
    /// `Y H_n`.
    CenteredOneHot,
    /// `Σ^{-1/2} Y`.
    SigmaInvSqrtOneHot,
    /// `I_n`: every sample is its own class.
    IdentityN,
    /// `H_c Σ⁻¹ Y`.
    CenteredNormalizedLabel,
}

impl TargetKind {
    pub fn is_supervised(self) -> bool {
        !matches!(self, TargetKind::IdentityN)
    }

    pub fn name(self) -> &'static str {
        match self {
            TargetKind::CenteredOneHot => "centered_one_hot",
            TargetKind::SigmaInvSqrtOneHot => "sigma_inv_sqrt_one_hot",
            TargetKind::IdentityN => "identity",
            TargetKind::CenteredNormalizedLabel => "centered_normalized_label",
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            TargetKind::CenteredOneHot,
            TargetKind::SigmaInvSqrtOneHot,
            TargetKind::IdentityN,
            TargetKind::CenteredNormalizedLabel,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown target kind `{s}`")))
    }
}

/// The transformed output matrix `Ỹ` (`o × n`).
#[derive(Debug, Clone)]
pub struct TargetMatrix {
    pub values: Mat,
    pub kind: TargetKind,
}

pub fn make_target(ds: &MultiViewDataset, kind: TargetKind) -> Result<TargetMatrix> {
    let n = ds.n();
    let values = match kind {
        TargetKind::IdentityN => Mat::identity(n, n),
        supervised => {
            let ind = build_indicator(ds.require_labels(supervised.name())?)?;
            match supervised {
                TargetKind::CenteredOneHot => crate::linalg::subtract_column(
                    ind.y(),
                    &row_means(ind.y()),
                ),
                TargetKind::SigmaInvSqrtOneHot => {
                    let mut y = ind.y().clone();
                    for (r, mut row) in y.row_iter_mut().enumerate() {
                        row /= ind.counts()[r].sqrt();
                    }
                    y
                }
                TargetKind::CenteredNormalizedLabel => {
                    centering_matrix(ind.c()) * ind.class_averaging()
                }
                TargetKind::IdentityN => unreachable!(),
            }
        }
    };
    Ok(TargetMatrix { values, kind })
}

/// Per-view PCA fitted on a training set.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub means: Vec<Vector>,
    /// `d_s × m_s` orthonormal loadings, leading components first.
    pub loadings: Vec<Mat>,
    /// Fraction of per-view variance retained.
    pub retained: Vec<f64>,
}

impl PcaModel {
    pub fn transform_views(&self, views: &[Mat]) -> Result<Vec<Mat>> {
        if views.len() != self.loadings.len() {
            return Err(Error::ShapeMismatch(format!(
                "PCA fitted on {} views, got {}",
                self.loadings.len(),
                views.len()
            )));
        }
        views
            .iter()
            .zip(self.loadings.iter().zip(&self.means))
            .enumerate()
            .map(|(s, (x, (l, mu)))| {
                if x.nrows() != l.nrows() {
                    return Err(Error::ShapeMismatch(format!(
                        "view {} has {} features, PCA expects {}",
                        s + 1,
                        x.nrows(),
                        l.nrows()
                    )));
                }
                Ok(l.transpose() * subtract_column(x, mu))
            })
            .collect()
    }

    pub fn transform(&self, ds: &MultiViewDataset) -> Result<MultiViewDataset> {
        ds.with_views(self.transform_views(ds.views())?)
    }
}

/// Leading eigenpairs (descending) of the covariance `X̂ X̂ᵀ`, computed through
/// the smaller of the two Gram matrices.
fn covariance_spectrum(xc: &Mat) -> (Vec<f64>, Mat) {
    let (d, n) = xc.shape();
    let mut pairs: Vec<(f64, Vector)> = if d <= n {
        let eig = SymmetricEigen::new(xc * xc.transpose());
        (0..d)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
            .collect()
    } else {
        let eig = SymmetricEigen::new(xc.transpose() * xc);
        (0..n)
            .filter(|&i| eig.eigenvalues[i] > 0.0)
            .map(|i| {
                let lam = eig.eigenvalues[i];
                let u = xc * eig.eigenvectors.column(i) / lam.sqrt();
                (lam, u.normalize())
            })
            .collect()
    };
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let values = pairs.iter().map(|p| p.0.max(0.0)).collect();
    let vectors = Mat::from_columns(&pairs.iter().map(|p| p.1.clone()).collect::<Vec<_>>());
    (values, vectors)
}

/// Reduces every view independently, keeping the fewest leading components
/// whose eigenvalue sum reaches `energy` of the total.
pub fn pca_reduce(ds: &MultiViewDataset, energy: f64) -> Result<(MultiViewDataset, PcaModel)> {
    if !(energy > 0.0 && energy <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "PCA energy must lie in (0, 1], got {energy}"
        )));
    }
    let mut means = Vec::new();
    let mut loadings = Vec::new();
    let mut retained = Vec::new();
    for (s, x) in ds.views().iter().enumerate() {
        let mu = row_means(x);
        let xc = subtract_column(x, &mu);
        let (values, vectors) = covariance_spectrum(&xc);
        let total: f64 = values.iter().sum();
        let scale = x.norm_squared().max(f64::MIN_POSITIVE);
        if total <= 1e-20 * scale {
            return Err(Error::ZeroVariance { view: s + 1 });
        }
        let threshold = energy * total - 1e-12 * total;
        let mut acc = 0.0;
        let mut keep = values.len();
        for (i, &lam) in values.iter().enumerate() {
            acc += lam;
            if acc >= threshold {
                keep = i + 1;
                break;
            }
        }
        let kept: f64 = values[..keep].iter().sum();
        means.push(mu);
        loadings.push(vectors.columns(0, keep).into_owned());
        retained.push(kept / total);
    }
    let model = PcaModel {
        means,
        loadings,
        retained,
    };
    let reduced = model.transform(ds)?;
    Ok((reduced, model))
}

/// Seeded train/test index partition, stratified by class when labels exist.
/// Both index lists are sorted ascending.
pub fn split_indices(
    ds: &MultiViewDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<(Option<i64>, Vec<usize>)> = match ds.labels() {
        Some(labels) => {
            let mut groups = vec![Vec::new(); labels.num_classes()];
            for (i, &r) in labels.indices().iter().enumerate() {
                groups[r].push(i);
            }
            groups
                .into_iter()
                .enumerate()
                .map(|(r, g)| (Some(labels.class_values()[r]), g))
                .collect()
        }
        None => vec![(None, (0..ds.n()).collect())],
    };
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut members) in groups {
        let size = members.len();
        if size < 2 {
            return Err(Error::UnsplittableClass {
                class: class.unwrap_or(0),
                size,
            });
        }
        let wanted = (train_fraction * size as f64).round() as usize;
        let take = wanted.clamp(1, size - 1);
        members.shuffle(&mut rng);
        train.extend_from_slice(&members[..take]);
        test.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split(
    ds: &MultiViewDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(MultiViewDataset, MultiViewDataset)> {
    let (train, test) = split_indices(ds, train_fraction, seed)?;
    Ok((ds.subset(&train)?, ds.subset(&test)?))
}
