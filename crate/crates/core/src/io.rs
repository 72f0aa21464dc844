//! Flat `key = value` files and on-disk model directories.
//!
//! A linear model directory holds `P_1.csv … P_v.csv`, `W.csv` and `meta.txt`.
//! A deep model adds `network.txt`, per-layer `net<s>_layer<i>_weight.csv` /
//! `net<s>_layer<i>_bias.csv` and `loss_history.csv`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::data::{read_csv_matrix, write_atomic, write_csv_matrix, TargetKind};
use crate::deep::{Activation, DeepModel, Layer, MlpConfig, MlpNetwork};
use crate::error::{Error, Result};
use crate::framework::{InputTransform, ModelSpec, SubspaceModel};
use crate::linalg::{Mat, Vector};
use crate::methods::{MethodConfig, MethodId};
use crate::regularizers::Regularizer;

/// Parsed `key = value` lines; `#` starts a comment line.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
    origin: PathBuf,
}

impl KeyValues {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: origin.to_path_buf(),
                    line: i + 1,
                    message: format!("expected `key = value`, found `{line}`"),
                });
            };
            let key = key.trim().to_string();
            if entries.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
                return Err(Error::Parse {
                    path: origin.to_path_buf(),
                    line: i + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(KeyValues {
            entries,
            origin: origin.to_path_buf(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        KeyValues::parse(&text, path)
    }

    pub fn origin(&self) -> &Path {
        &self.origin
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    fn bad(&self, key: &str, message: String) -> Error {
        Error::Parse {
            path: self.origin.clone(),
            line: self.entries.get(key).map_or(0, |(l, _)| *l),
            message,
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.get_str(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| self.bad(key, format!("invalid value for `{key}`: {e}"))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        self.get(key)?.ok_or_else(|| Error::Parse {
            path: self.origin.clone(),
            line: 0,
            message: format!("missing key `{key}`"),
        })
    }

    /// Comma-separated list; an empty value is an empty list.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        match self.get_str(key) {
            None => Ok(None),
            Some(v) => parse_list(v)
                .map(Some)
                .map_err(|e| self.bad(key, format!("invalid list for `{key}`: {e}"))),
        }
    }

    pub fn require_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: Display,
    {
        self.get_list(key)?.ok_or_else(|| Error::Parse {
            path: self.origin.clone(),
            line: 0,
            message: format!("missing key `{key}`"),
        })
    }
}

pub fn parse_list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: Display,
{
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|e| format!("`{}`: {e}", p.trim())))
        .collect()
}

pub fn join_list<T: Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn format_key_values(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn save_model(model: &SubspaceModel, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    for (s, p) in model.projections.iter().enumerate() {
        write_csv_matrix(&dir.join(format!("P_{}.csv", s + 1)), p)?;
    }
    write_csv_matrix(&dir.join("W.csv"), &model.w)?;
    let regs: Vec<String> = model
        .spec
        .regularizers
        .iter()
        .map(|(r, w)| format!("{r}@{w}"))
        .collect();
    let mut pairs = vec![
        ("views", model.projections.len().to_string()),
        ("dims", join_list(&model.dims())),
        ("k", model.spec.k.to_string()),
        ("gamma", model.spec.gamma.to_string()),
        ("input", model.spec.input.to_string()),
        ("target", model.spec.target.to_string()),
        ("regularizers", regs.join(",")),
        ("eigenvalues", join_list(&model.eigenvalues)),
        ("spectrum_gap", model.spectrum_gap.to_string()),
    ];
    let means: Vec<String> = model
        .means
        .iter()
        .map(|m| join_list(m.as_slice()))
        .collect();
    let mean_keys: Vec<String> = (1..=means.len()).map(|s| format!("mean_{s}")).collect();
    for (k, m) in mean_keys.iter().zip(means) {
        pairs.push((k.as_str(), m));
    }
    write_atomic(&dir.join("meta.txt"), &format_key_values(&pairs))
}

fn parse_regularizer(entry: &str) -> Result<(Regularizer, f64)> {
    let (name, weight) = entry
        .rsplit_once('@')
        .ok_or_else(|| Error::InvalidParameter(format!("regularizer entry `{entry}` lacks a weight")))?;
    let weight = weight
        .parse::<f64>()
        .map_err(|_| Error::InvalidParameter(format!("bad regularizer weight in `{entry}`")))?;
    Ok((name.parse()?, weight))
}

pub fn load_model(dir: &Path) -> Result<SubspaceModel> {
    let meta = KeyValues::read(&dir.join("meta.txt"))?;
    let views: usize = meta.require("views")?;
    let dims: Vec<usize> = meta.require_list("dims")?;
    if dims.len() != views {
        return Err(Error::InvalidDataset(format!(
            "model meta lists {} dims for {views} views",
            dims.len()
        )));
    }
    let input: InputTransform = meta.require("input")?;
    let target: TargetKind = meta.require("target")?;
    let k: usize = meta.require("k")?;
    let regularizers = meta
        .require_list::<String>("regularizers")?
        .iter()
        .map(|e| parse_regularizer(e))
        .collect::<Result<Vec<_>>>()?;
    let spec = ModelSpec {
        input,
        target,
        regularizers,
        k,
        gamma: meta.require("gamma")?,
    };
    let mut projections = Vec::with_capacity(views);
    let mut means = Vec::with_capacity(views);
    for s in 1..=views {
        let p = read_csv_matrix(&dir.join(format!("P_{s}.csv")))?;
        if p.shape() != (dims[s - 1], k) {
            return Err(Error::ShapeMismatch(format!(
                "P_{s}.csv is {:?}, expected ({}, {k})",
                p.shape(),
                dims[s - 1]
            )));
        }
        projections.push(p);
        let m: Vec<f64> = meta.require_list(&format!("mean_{s}"))?;
        means.push(Vector::from_vec(m));
    }
    let w = read_csv_matrix(&dir.join("W.csv"))?;
    Ok(SubspaceModel {
        projections,
        w,
        means,
        eigenvalues: meta.require_list("eigenvalues")?,
        spectrum_gap: meta.require("spectrum_gap")?,
        spec,
    })
}

fn layer_path(dir: &Path, s: usize, i: usize, part: &str) -> PathBuf {
    dir.join(format!("net{}_layer{}_{part}.csv", s + 1, i + 1))
}

pub fn save_deep_model(model: &DeepModel, dir: &Path) -> Result<()> {
    save_model(&model.model, dir)?;
    for (s, net) in model.nets.iter().enumerate() {
        for (i, layer) in net.layers.iter().enumerate() {
            write_csv_matrix(&layer_path(dir, s, i, "weight"), &layer.weight)?;
            let bias = Mat::from_column_slice(layer.bias.len(), 1, layer.bias.as_slice());
            write_csv_matrix(&layer_path(dir, s, i, "bias"), &bias)?;
        }
    }
    let inputs: Vec<usize> = model.nets.iter().map(|n| n.input_dim()).collect();
    let pairs = [
        ("activation", model.mlp.activation.to_string()),
        ("hidden", join_list(&model.mlp.hidden)),
        ("output", model.mlp.output.to_string()),
        ("seed", model.mlp.seed.to_string()),
        ("inputs", join_list(&inputs)),
        ("method", model.method.id.to_string()),
        ("method_k", model.method.k.to_string()),
        ("method_gamma", model.method.gamma.to_string()),
        ("method_lambda", model.method.lambda.to_string()),
    ];
    write_atomic(&dir.join("network.txt"), &format_key_values(&pairs))?;
    let history: String = model.history.iter().map(|l| format!("{l}\n")).collect();
    write_atomic(&dir.join("loss_history.csv"), &history)
}

pub fn load_deep_model(dir: &Path) -> Result<DeepModel> {
    let model = load_model(dir)?;
    let meta = KeyValues::read(&dir.join("network.txt"))?;
    let activation: Activation = meta.require("activation")?;
    let mlp = MlpConfig::new(
        meta.require_list("hidden")?,
        meta.require("output")?,
        activation,
        meta.require("seed")?,
    );
    let inputs: Vec<usize> = meta.require_list("inputs")?;
    let method = MethodConfig {
        id: meta.require::<MethodId>("method")?,
        gamma: meta.require("method_gamma")?,
        lambda: meta.require("method_lambda")?,
        k: meta.require("method_k")?,
    };
    let mut nets = Vec::with_capacity(inputs.len());
    for s in 0..inputs.len() {
        let layers = (0..mlp.depth())
            .map(|i| {
                let weight = read_csv_matrix(&layer_path(dir, s, i, "weight"))?;
                let bias = read_csv_matrix(&layer_path(dir, s, i, "bias"))?;
                Ok(Layer {
                    weight,
                    bias: Vector::from_column_slice(bias.as_slice()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        nets.push(MlpNetwork { layers, activation });
    }
    let history_path = dir.join("loss_history.csv");
    let history = std::fs::read_to_string(&history_path)
        .map_err(|e| Error::io(&history_path, e))?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidDataset(format!("bad loss value `{l}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeepModel {
        nets,
        model,
        mlp,
        method,
        history,
    })
}
