//! TSV graph files.
//!
//! `nodes.tsv`: `raw_id <TAB> type_name [<TAB> class_label]`
//! `edges.tsv`: `raw_src <TAB> raw_dst`
//!
//! Blank lines and lines starting with `#` are skipped. Lines without a tab
//! are split on whitespace instead.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{HeteroGraph, RoleLabeling};
use crate::error::{Error, Result};

fn fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Yields `(1-based line number, fields)` for every data line.
fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push((i + 1, line));
    }
    Ok(out)
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

#[derive(Default)]
struct Interner {
    ids: HashMap<String, usize>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> usize {
        if let Some(&i) = self.ids.get(s) {
            return i;
        }
        let i = self.names.len();
        self.ids.insert(s.to_string(), i);
        self.names.push(s.to_string());
        i
    }
}

pub fn load_graph(node_file: impl AsRef<Path>, edge_file: impl AsRef<Path>) -> Result<HeteroGraph> {
    let node_file = node_file.as_ref();
    let edge_file = edge_file.as_ref();

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut raw_ids = Vec::new();
    let mut node_types: Vec<usize> = Vec::new();
    let mut labels: Vec<Option<usize>> = Vec::new();
    let mut types = Interner::default();
    let mut classes = Interner::default();

    for (lineno, line) in data_lines(node_file)? {
        let f = fields(&line);
        if f.len() < 2 || f.len() > 3 || f[0].is_empty() || f[1].is_empty() {
            return Err(parse_err(node_file, lineno, "expected raw_id, type_name [, class_label]"));
        }
        let ty = types.intern(f[1]);
        let label = f.get(2).filter(|s| !s.is_empty()).map(|s| classes.intern(s));
        match index.get(f[0]) {
            Some(&v) => {
                if node_types[v] != ty {
                    return Err(Error::ConflictingType {
                        id: f[0].to_string(),
                        first: types.names[node_types[v]].clone(),
                        second: f[1].to_string(),
                    });
                }
                if label.is_some() && labels[v].is_some() && labels[v] != label {
                    return Err(parse_err(node_file, lineno, format!("conflicting class label for `{}`", f[0])));
                }
                if labels[v].is_none() {
                    labels[v] = label;
                }
            }
            None => {
                index.insert(f[0].to_string(), raw_ids.len());
                raw_ids.push(f[0].to_string());
                node_types.push(ty);
                labels.push(label);
            }
        }
    }

    let mut edges = Vec::new();
    for (lineno, line) in data_lines(edge_file)? {
        let f = fields(&line);
        if f.len() != 2 {
            return Err(parse_err(edge_file, lineno, "expected raw_src, raw_dst"));
        }
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownNode(s.to_string()));
        let (u, v) = (lookup(f[0])?, lookup(f[1])?);
        if u == v {
            return Err(parse_err(edge_file, lineno, format!("self-loop on `{}`", f[0])));
        }
        edges.push((u, v));
    }

    HeteroGraph::from_edges(node_types, types.names, edges)?
        .with_raw_ids(raw_ids)?
        .with_labels(labels, classes.names)
}

/// Reads `raw_id <TAB> label` pairs in file order.
pub fn read_label_pairs(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    data_lines(path)?
        .into_iter()
        .map(|(lineno, line)| match fields(&line)[..] {
            [id, label] if !id.is_empty() && !label.is_empty() => Ok((id.to_string(), label.to_string())),
            _ => Err(parse_err(path, lineno, "expected raw_id, label")),
        })
        .collect()
}

/// Reads a `raw_id <TAB> label` file (e.g. a roles file) into per-node
/// labels for `graph`. Nodes absent from the file stay unlabeled.
pub fn load_labels(path: impl AsRef<Path>, graph: &HeteroGraph) -> Result<(Vec<Option<usize>>, Vec<String>)> {
    let mut labels = vec![None; graph.num_nodes()];
    let mut classes = Interner::default();
    for (id, label) in read_label_pairs(path)? {
        let v = graph.node_by_raw(&id).ok_or(Error::UnknownNode(id))?;
        labels[v] = Some(classes.intern(&label));
    }
    Ok((labels, classes.names))
}

/// Raw node ids of a node file in dense-id order.
pub fn read_node_ids(node_file: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = node_file.as_ref();
    let mut seen = std::collections::HashSet::new();
    let mut ids = Vec::new();
    for (lineno, line) in data_lines(path)? {
        let f = fields(&line);
        if f.len() < 2 || f[0].is_empty() {
            return Err(parse_err(path, lineno, "expected raw_id, type_name [, class_label]"));
        }
        if seen.insert(f[0].to_string()) {
            ids.push(f[0].to_string());
        }
    }
    Ok(ids)
}

pub fn write_graph(graph: &HeteroGraph, node_file: impl AsRef<Path>, edge_file: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(node_file)?);
    writeln!(w, "# raw_id\ttype\tclass")?;
    for v in 0..graph.num_nodes() {
        write!(w, "{}\t{}", graph.raw_id(v), graph.type_name(graph.node_type(v)))?;
        if let Some(c) = graph.labels()[v] {
            write!(w, "\t{}", graph.label_names()[c])?;
        }
        writeln!(w)?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(edge_file)?);
    writeln!(w, "# src\tdst")?;
    for (u, v) in graph.edges() {
        writeln!(w, "{}\t{}", graph.raw_id(u), graph.raw_id(v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_roles(graph: &HeteroGraph, roles: &RoleLabeling, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# raw_id\trole_id")?;
    for (v, r) in roles.roles.iter().enumerate() {
        writeln!(w, "{}\t{}", graph.raw_id(v), r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn node_ids_and_label_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(dir.path(), "n.tsv", "# header\nx\tA\ny\tB\tc1\nx\tA\n");
        assert_eq!(read_node_ids(&n).unwrap(), ["x", "y"]);
        let l = write(dir.path(), "l.tsv", "x\t0\ny\t1\n");
        assert_eq!(read_label_pairs(&l).unwrap()[1], ("y".to_string(), "1".to_string()));
        let bad = write(dir.path(), "b.tsv", "x\t0\ny\n");
        assert!(matches!(read_label_pairs(&bad), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn smallest_graph() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(dir.path(), "n.tsv", "0\tA\n1\tB\n");
        let e = write(dir.path(), "e.tsv", "0\t1\n");
        let g = load_graph(&n, &e).unwrap();
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.type_name(g.node_type(1)), "B");
    }

    #[test]
    fn symmetric_duplicates_dedup() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(dir.path(), "n.tsv", "# nodes\n0\tA\n1\tA\n\n");
        let e = write(dir.path(), "e.tsv", "0 1\n1 0\n");
        let g = load_graph(&n, &e).unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn unknown_node_reported() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(dir.path(), "n.tsv", "0\tA\n1\tA\n");
        let e = write(dir.path(), "e.tsv", "0 5\n");
        let err = load_graph(&n, &e).unwrap_err();
        assert!(err.to_string().contains("unknown node id"), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(dir.path(), "n.tsv", "0\tA\n# c\nonlyone\n");
        let e = write(dir.path(), "e.tsv", "");
        match load_graph(&n, &e).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn conflicting_type_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(dir.path(), "n.tsv", "x\tA\nx\tB\n");
        let e = write(dir.path(), "e.tsv", "");
        assert!(matches!(load_graph(&n, &e), Err(Error::ConflictingType { .. })));
    }

    #[test]
    fn raw_ids_densified_in_file_order_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let n = write(dir.path(), "n.tsv", "u9\tuser\tgood\nq3\tquestion\nu1\tuser\tbad\n");
        let e = write(dir.path(), "e.tsv", "u9\tq3\nq3\tu1\n");
        let g = load_graph(&n, &e).unwrap();
        assert_eq!(g.node_by_raw("q3"), Some(1));
        assert_eq!(g.labels(), &[Some(0), None, Some(1)]);

        let (n2, e2) = (dir.path().join("n2.tsv"), dir.path().join("e2.tsv"));
        write_graph(&g, &n2, &e2).unwrap();
        let g2 = load_graph(&n2, &e2).unwrap();
        assert_eq!(g, g2);
    }
}
