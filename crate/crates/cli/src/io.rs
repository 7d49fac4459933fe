//! Dataset, matroid and stream file formats.
//!
//! A dataset is either JSON lines, one point per line:
//!
//! ```text
//! {"id": 0, "coords": [0.5, 1.0], "weight": 0.4, "category": 1}
//! ```
//!
//! or a single JSON object holding a distance matrix (`.json` extension):
//!
//! ```text
//! {"matrix": [[0, 1], [1, 0]], "weights": [0.5, 0.5], "categories": [0, 1]}
//! ```
//!
//! `id` is optional but must equal the line index when present. Weights and
//! categories are all-or-none.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use robust_center::bigdata::PointStream;
use robust_center::{
    Dataset, MatrixCheck, Matroid, PartitionMatroid, PointId, TransversalMatroid, UniformMatroid,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
    pub coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub categories: Option<Vec<u32>>,
}

/// True for files read as a single distance-matrix object.
pub fn is_matrix_path(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    if is_matrix_path(path) {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let m: MatrixFile = serde_json::from_reader(BufReader::new(file))
            .with_context(|| format!("{} is not a matrix dataset", path.display()))?;
        let ds = Dataset::from_matrix(m.matrix, MatrixCheck::Sampled)?;
        return attach(ds, m.weights, m.categories);
    }
    let records = read_points(path)?;
    dataset_from_records(&records)
}

pub fn read_points(path: &Path) -> Result<Vec<PointRecord>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PointRecord = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: malformed point", path.display(), i + 1))?;
        if let Some(id) = rec.id {
            if id != out.len() {
                bail!("{}:{}: id {id} out of sequence", path.display(), i + 1);
            }
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn dataset_from_records(records: &[PointRecord]) -> Result<Dataset> {
    let ds = Dataset::from_coords(records.iter().map(|r| r.coords.clone()).collect())?;
    let weights = all_or_none(records.iter().map(|r| r.weight), "weight")?;
    let categories = all_or_none(records.iter().map(|r| r.category), "category")?;
    attach(ds, weights, categories)
}

fn all_or_none<T>(values: impl Iterator<Item = Option<T>>, what: &str) -> Result<Option<Vec<T>>> {
    let values: Vec<Option<T>> = values.collect();
    let present = values.iter().filter(|v| v.is_some()).count();
    if present == 0 {
        return Ok(None);
    }
    if present != values.len() {
        bail!("{what} given for {present} of {} points", values.len());
    }
    Ok(Some(values.into_iter().flatten().collect()))
}

fn attach(ds: Dataset, weights: Option<Vec<f64>>, categories: Option<Vec<u32>>) -> Result<Dataset> {
    let ds = match weights {
        Some(w) => ds.with_weights(w)?,
        None => ds,
    };
    Ok(match categories {
        Some(c) => ds.with_categories(c)?,
        None => ds,
    })
}

pub fn write_points(path: &Path, records: &[PointRecord]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Matroid description; partition categories come from the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MatroidSpec {
    Uniform {
        k: usize,
    },
    /// Keys are category labels written as strings, as JSON requires.
    Partition {
        quotas: BTreeMap<String, usize>,
    },
    Transversal {
        slots: usize,
        adjacency: Vec<Vec<usize>>,
    },
}

impl MatroidSpec {
    pub fn partition(quotas: &BTreeMap<u32, usize>) -> Self {
        MatroidSpec::Partition {
            quotas: quotas.iter().map(|(c, q)| (c.to_string(), *q)).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        serde_json::from_reader(BufReader::new(file))
            .with_context(|| format!("{} is not a matroid description", path.display()))
    }

    pub fn build(&self, ds: &Dataset) -> Result<Box<dyn Matroid>> {
        Ok(match self {
            MatroidSpec::Uniform { k } => Box::new(UniformMatroid::new(ds.len(), *k)?),
            MatroidSpec::Partition { quotas } => {
                let Some(cats) = ds.categories() else {
                    bail!("a partition matroid needs a category for every point");
                };
                let mut parsed = BTreeMap::new();
                for (c, q) in quotas {
                    let c: u32 = c
                        .parse()
                        .with_context(|| format!("bad category label {c:?}"))?;
                    parsed.insert(c, *q);
                }
                Box::new(PartitionMatroid::new(cats.to_vec(), parsed)?)
            }
            MatroidSpec::Transversal { slots, adjacency } => {
                if adjacency.len() != ds.len() {
                    bail!(
                        "adjacency lists {} points, dataset has {}",
                        adjacency.len(),
                        ds.len()
                    );
                }
                Box::new(TransversalMatroid::new(*slots, adjacency.clone())?)
            }
        })
    }
}

/// Streams a JSON-lines dataset by re-reading the file on every pass.
#[derive(Debug)]
pub struct FileStream {
    path: PathBuf,
    reader: Option<BufReader<File>>,
    next: usize,
    line: String,
}

impl FileStream {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FileStream {
            path: path.into(),
            reader: None,
            next: 0,
            line: String::new(),
        }
    }
}

impl PointStream for FileStream {
    fn begin_pass(&mut self) -> robust_center::Result<()> {
        let file = File::open(&self.path)
            .map_err(|_| robust_center::Error::InvalidParameter("stream file cannot be opened"))?;
        self.reader = Some(BufReader::new(file));
        self.next = 0;
        Ok(())
    }

    fn next_point(&mut self) -> robust_center::Result<Option<PointId>> {
        let reader = self
            .reader
            .as_mut()
            .ok_or(robust_center::Error::InvalidParameter(
                "no pass in progress",
            ))?;
        loop {
            self.line.clear();
            let read = reader.read_line(&mut self.line).map_err(|_| {
                robust_center::Error::InvalidParameter("stream file cannot be read")
            })?;
            if read == 0 {
                return Ok(None);
            }
            if self.line.trim().is_empty() {
                continue;
            }
            let rec: PointRecord = serde_json::from_str(&self.line)
                .map_err(|_| robust_center::Error::InvalidParameter("malformed stream record"))?;
            if rec.id.is_some_and(|id| id != self.next) {
                return Err(robust_center::Error::InvalidParameter(
                    "stream id out of sequence",
                ));
            }
            let id = PointId(self.next);
            self.next += 1;
            return Ok(Some(id));
        }
    }
}
