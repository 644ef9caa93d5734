//! Flat `key=value` run manifests.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

#[derive(Debug, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest::default();
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        let v = value.to_string().replace(['\n', '\r'], " ");
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = v,
            None => self.entries.push((key.to_string(), v)),
        }
    }

    /// Records a file by name and content hash.
    pub fn file(&mut self, role: &str, path: &Path) -> std::io::Result<()> {
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        self.set(role, name);
        self.set(&format!("{role}.sha256"), sha256_file(path)?);
        Ok(())
    }

    #[cfg(test)]
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut f = fs::File::create(path)?;
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Manifest path that sits next to an output file: `out.tsv.manifest`.
pub fn beside(output: &Path) -> std::path::PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    output.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_order_and_overwrite() {
        let mut m = Manifest::new("x");
        m.set("b", 1);
        m.set("a", "two\nlines");
        m.set("b", 3);
        assert_eq!(m.get("b"), Some("3"));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m");
        m.write(&p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let keys: Vec<&str> = text.lines().map(|l| l.split('=').next().unwrap()).collect();
        assert_eq!(keys, ["command", "version", "b", "a"]);
        assert!(text.contains("a=two lines\n"));
    }

    #[test]
    fn file_hash() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        fs::write(&p, "abc").unwrap();
        let mut m = Manifest::default();
        m.file("artifact", &p).unwrap();
        assert_eq!(m.get("artifact"), Some("f.txt"));
        assert_eq!(
            m.get("artifact.sha256"),
            Some("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")
        );
        assert_eq!(beside(&p), dir.path().join("f.txt.manifest"));
    }
}
