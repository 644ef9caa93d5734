//! Embedding TSV files.
//!
//! ```text
//! # d=2 mode=haw L=6 T=1024 window=5
//! raw_id <TAB> x_1 <TAB> ... <TAB> x_d
//! ```
//! Values are written with 9 significant digits. Nodes without a context
//! (isolated nodes) have no embedding and are omitted.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::EmbeddingModel;
use crate::error::{Error, Result};

/// Row-major embedding matrix keyed by raw node id.
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings {
    pub raw_ids: Vec<String>,
    pub dim: usize,
    pub data: Vec<f64>,
    /// Provenance line without the leading `#`.
    pub header: String,
}

impl Embeddings {
    pub fn from_model(model: &EmbeddingModel, raw_ids: &[String]) -> Self {
        let mut ids = Vec::new();
        let mut data = Vec::new();
        for (v, raw) in raw_ids.iter().enumerate().take(model.num_nodes()) {
            if model.is_trained(v) {
                ids.push(raw.clone());
                data.extend_from_slice(model.node_vec(v));
            }
        }
        let p = model.provenance();
        Embeddings {
            raw_ids: ids,
            dim: model.dim(),
            data,
            header: format!(
                "d={} mode={} L={} T={} window={}",
                model.dim(),
                p.mode,
                p.walk_length,
                p.samples,
                p.window
            ),
        }
    }

    pub fn from_rows(raw_ids: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.len() != raw_ids.len() || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("ragged embedding rows"));
        }
        Ok(Embeddings {
            raw_ids,
            dim,
            data: rows.concat(),
            header: format!("d={dim}"),
        })
    }

    pub fn len(&self) -> usize {
        self.raw_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw_ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn index_of(&self, raw: &str) -> Option<usize> {
        self.raw_ids.iter().position(|r| r == raw)
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {}", self.header)?;
        for (i, id) in self.raw_ids.iter().enumerate() {
            w.write_all(id.as_bytes())?;
            for x in self.row(i) {
                write!(w, "\t{x:.8e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

pub fn export_embeddings(model: &EmbeddingModel, raw_ids: &[String], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    Embeddings::from_model(model, raw_ids).write_tsv(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<Embeddings> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut header = String::new();
    let mut raw_ids = Vec::new();
    let mut data = Vec::new();
    let mut dim = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some(h) = line.strip_prefix('#') {
            if header.is_empty() {
                header = h.trim().to_string();
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut f = line.split('\t');
        let id = f.next().unwrap_or_default().to_string();
        let row: Vec<f64> = f
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: e.to_string(),
            })?;
        if *dim.get_or_insert(row.len()) != row.len() || row.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: "inconsistent embedding width".into(),
            });
        }
        raw_ids.push(id);
        data.extend(row);
    }
    Ok(Embeddings {
        raw_ids,
        dim: dim.unwrap_or(0),
        data,
        header,
    })
}
