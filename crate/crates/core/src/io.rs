//! File formats: graphs, covers, samples, timing sidecars and LSGM inputs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::concliques::ConcliqueCover;
use crate::error::{Error, Result};
use crate::models::EdgeWeights;
use crate::sampler::Field;
use crate::topology::{NeighborhoodGraph, SiteLabels};

const BINARY_MAGIC: &[u8; 4] = b"CGS1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GraphDocument {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertex_pairs: Option<Vec<[usize; 2]>>,
}

pub fn graph_to_json(graph: &NeighborhoodGraph) -> Result<String> {
    let mut doc = GraphDocument {
        n: graph.n(),
        adjacency: (0..graph.n())
            .map(|i| graph.neighbors(i).to_vec())
            .collect(),
        coords: None,
        vertex_pairs: None,
    };
    match graph.labels() {
        SiteLabels::None => {}
        SiteLabels::Coords(c) => doc.coords = Some(c.iter().map(|&(u, v)| [u, v]).collect()),
        SiteLabels::VertexPairs(p) => {
            doc.vertex_pairs = Some(p.iter().map(|&(a, b)| [a, b]).collect())
        }
    }
    Ok(serde_json::to_string(&doc)?)
}

pub fn graph_from_json(text: &str) -> Result<NeighborhoodGraph> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    if doc.adjacency.len() != doc.n {
        return Err(Error::LengthMismatch {
            expected: doc.n,
            actual: doc.adjacency.len(),
        });
    }
    let labels = match (doc.coords, doc.vertex_pairs) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidGraph(
                "a graph carries coords or vertex_pairs, not both".into(),
            ))
        }
        (Some(c), None) => SiteLabels::Coords(c.into_iter().map(|[u, v]| (u, v)).collect()),
        (None, Some(p)) => SiteLabels::VertexPairs(p.into_iter().map(|[a, b]| (a, b)).collect()),
        (None, None) => SiteLabels::None,
    };
    NeighborhoodGraph::from_adjacency(doc.adjacency)?.with_labels(labels)
}

pub fn read_graph_json(path: &Path) -> Result<NeighborhoodGraph> {
    graph_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_graph_json(path: &Path, graph: &NeighborhoodGraph) -> Result<()> {
    std::fs::write(path, graph_to_json(graph)?)?;
    Ok(())
}

/// Parses whitespace-separated `i j` lines (0-based). Blank lines and lines
/// starting with `#` are skipped. The site count is one more than the
/// largest index unless `n` is given.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<NeighborhoodGraph> {
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut next = || -> Result<usize> {
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: expected two indices", lineno + 1)))?
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
        };
        let (i, j) = (next()?, next()?);
        if parts.next().is_some() {
            return Err(Error::Parse(format!(
                "line {}: expected exactly two indices",
                lineno + 1
            )));
        }
        edges.push((i, j));
    }
    let inferred = edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
    let n = n.unwrap_or(inferred);
    NeighborhoodGraph::from_edges(n, &edges)
}

pub fn read_edge_list(path: &Path, n: Option<usize>) -> Result<NeighborhoodGraph> {
    parse_edge_list(&std::fs::read_to_string(path)?, n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CoverDocument {
    #[serde(rename = "Q")]
    q: usize,
    assignment: Vec<usize>,
}

pub fn cover_to_json(cover: &ConcliqueCover) -> Result<String> {
    Ok(serde_json::to_string(&CoverDocument {
        q: cover.q(),
        assignment: cover.assignment().to_vec(),
    })?)
}

pub fn cover_from_json(text: &str) -> Result<ConcliqueCover> {
    let doc: CoverDocument = serde_json::from_str(text)?;
    if let Some(&c) = doc.assignment.iter().find(|&&c| c >= doc.q) {
        return Err(Error::InvalidCover(format!(
            "class label {c} not below Q = {}",
            doc.q
        )));
    }
    let cover = ConcliqueCover::from_assignment(&doc.assignment);
    if cover.q() != doc.q {
        return Err(Error::InvalidCover(format!(
            "Q = {} but {} classes are occupied",
            doc.q,
            cover.q()
        )));
    }
    Ok(cover)
}

pub fn read_cover_json(path: &Path) -> Result<ConcliqueCover> {
    cover_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_cover_json(path: &Path, cover: &ConcliqueCover) -> Result<()> {
    std::fs::write(path, cover_to_json(cover)?)?;
    Ok(())
}

/// Streaming CSV sample writer: a `site_0,…` header, then one retained
/// iteration per row.
pub struct CsvSampleWriter<W: Write> {
    inner: csv::Writer<W>,
    n: usize,
}

impl<W: Write> CsvSampleWriter<W> {
    pub fn new(writer: W, n: usize) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(writer);
        inner.write_record((0..n).map(|i| format!("site_{i}")))?;
        Ok(Self { inner, n })
    }

    pub fn write(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: values.len(),
            });
        }
        self.inner
            .write_record(values.iter().map(|v| v.to_string()))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_samples_csv<W: Write>(writer: W, n: usize, samples: &[Field]) -> Result<()> {
    let mut w = CsvSampleWriter::new(writer, n)?;
    for f in samples {
        w.write(f.values())?;
    }
    w.finish()
}

pub fn read_samples_csv<R: Read>(reader: R) -> Result<Vec<Field>> {
    let mut r = csv::Reader::from_reader(reader);
    let n = r.headers()?.len();
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        if record.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: record.len(),
            });
        }
        let values = record
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("sample value {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(Field::new(values));
    }
    Ok(out)
}

/// Streaming writer for the binary sample format: `CGS1`, u64 site count,
/// u64 sample count, then row-major f64 values, all little-endian.
pub struct BinarySampleWriter<W: Write> {
    inner: W,
    n: usize,
}

impl<W: Write> BinarySampleWriter<W> {
    pub fn new(mut inner: W, n: usize, count: u64) -> Result<Self> {
        inner.write_all(BINARY_MAGIC)?;
        inner.write_all(&(n as u64).to_le_bytes())?;
        inner.write_all(&count.to_le_bytes())?;
        Ok(Self { inner, n })
    }

    pub fn write(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: values.len(),
            });
        }
        for v in values {
            self.inner.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub fn write_samples_binary<W: Write>(writer: W, n: usize, samples: &[Field]) -> Result<()> {
    let mut w = BinarySampleWriter::new(writer, n, samples.len() as u64)?;
    for f in samples {
        w.write(f.values())?;
    }
    w.finish()?;
    Ok(())
}

pub fn read_samples_binary<R: Read>(mut reader: R) -> Result<Vec<Field>> {
    let mut magic = [0u8; 4];
    reader.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Parse("not a CGS1 sample file".into()));
    }
    let mut word = [0u8; 8];
    reader.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    reader.read_exact(&mut word)?;
    let count = u64::from_le_bytes(word) as usize;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            reader.read_exact(&mut word)?;
            values.push(f64::from_le_bytes(word));
        }
        out.push(Field::new(values));
    }
    Ok(out)
}

/// Timing metadata written next to a sample file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSidecar {
    pub seconds_total: f64,
    pub seconds_per_iteration: f64,
    pub overhead_seconds: f64,
    #[serde(rename = "Q")]
    pub q: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: u64,
    pub seed: u64,
}

/// Reads `site_index,x1,x2,x3` rows; every site must appear exactly once.
pub fn read_covariates_csv<R: Read>(reader: R, n: usize) -> Result<Vec<[f64; 3]>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out: Vec<Option<[f64; 3]>> = vec![None; n];
    for row in r.deserialize::<(usize, f64, f64, f64)>() {
        let (i, x1, x2, x3) = row?;
        let slot = out
            .get_mut(i)
            .ok_or_else(|| Error::Parse(format!("covariate row for site {i} outside 0..{n}")))?;
        if slot.replace([x1, x2, x3]).is_some() {
            return Err(Error::Parse(format!("site {i} has two covariate rows")));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, x)| x.ok_or(Error::MissingValue(i)))
        .collect()
}

/// Reads `i,j,d` rows into explicit edge weights.
pub fn read_weights_csv<R: Read>(reader: R) -> Result<EdgeWeights> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let rows = r
        .deserialize::<(usize, usize, f64)>()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(EdgeWeights::explicit(rows))
}

/// Reads a square matrix of distances, one row per line, no header.
pub fn read_distance_matrix_csv<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        rows.push(
            record
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("distance {s:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(rows)
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}
