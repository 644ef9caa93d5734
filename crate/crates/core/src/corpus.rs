//! Per-node walk corpora and the token lexicon.
//!
//! Every node with at least one neighbor gets a context of exactly `T`
//! tokens, each from an independently sampled walk. Sampling for node `v`
//! uses a generator seeded from `(seed, v)`, and token ids are assigned in
//! order of first occurrence scanning nodes by id, so the corpus is
//! identical however many workers build it.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hetgraph::{HeteroGraph, NodeId};
use crate::par;
use crate::seed;
use crate::walklang::{TokenWriter, WalkMode};

pub type TokenId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lexicon {
    tokens: Vec<String>,
    index: HashMap<String, TokenId>,
    frequencies: Vec<u64>,
}

impl Lexicon {
    fn intern(&mut self, tok: &str) -> TokenId {
        if let Some(&id) = self.index.get(tok) {
            return id;
        }
        let id = self.tokens.len() as TokenId;
        self.tokens.push(tok.to_string());
        self.index.insert(tok.to_string(), id);
        self.frequencies.push(0);
        id
    }

    /// Builds a lexicon from `(token, frequency)` pairs in id order.
    pub fn from_entries(entries: impl IntoIterator<Item = (String, u64)>) -> Result<Self> {
        let mut lex = Lexicon::default();
        for (tok, f) in entries {
            let id = lex.tokens.len() as TokenId;
            if lex.intern(&tok) != id {
                return Err(Error::Format(format!("duplicate token `{tok}`")));
            }
            lex.frequencies[id as usize] = f;
        }
        Ok(lex)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: TokenId) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn frequency(&self, id: TokenId) -> u64 {
        self.frequencies[id as usize]
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.frequencies
    }

    pub fn total(&self) -> u64 {
        self.frequencies.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    /// One context per graph node; empty for isolated nodes.
    pub contexts: Vec<Vec<TokenId>>,
    pub samples: usize,
    pub walk_length: usize,
    pub mode: WalkMode,
}

impl Corpus {
    pub fn num_nodes(&self) -> usize {
        self.contexts.len()
    }

    pub fn context(&self, v: NodeId) -> &[TokenId] {
        &self.contexts[v]
    }

    pub fn has_context(&self, v: NodeId) -> bool {
        !self.contexts[v].is_empty()
    }

    pub fn isolated(&self) -> Vec<NodeId> {
        (0..self.num_nodes()).filter(|&v| !self.has_context(v)).collect()
    }

    pub fn num_tokens(&self) -> usize {
        self.contexts.iter().map(Vec::len).sum()
    }

    /// Checks context lengths and token ids against `lexicon`, and that
    /// lexicon frequencies match the corpus.
    pub fn validate(&self, lexicon: &Lexicon) -> Result<()> {
        let mut freq = vec![0u64; lexicon.len()];
        for ctx in &self.contexts {
            if !ctx.is_empty() && ctx.len() != self.samples {
                return Err(Error::Format("context length differs from sample count".into()));
            }
            for &t in ctx {
                let slot = freq
                    .get_mut(t as usize)
                    .ok_or_else(|| Error::Format(format!("token id {t} outside lexicon")))?;
                *slot += 1;
            }
        }
        if freq != lexicon.frequencies {
            return Err(Error::Format("lexicon frequencies disagree with corpus".into()));
        }
        if freq.iter().any(|&f| f == 0) {
            return Err(Error::Format("lexicon contains unused token".into()));
        }
        Ok(())
    }
}

struct NodeTokens {
    local: Vec<String>,
    ids: Vec<TokenId>,
}

/// All walks of a node advance one step at a time, so the neighbor-list
/// loads of different walks are independent and their cache misses overlap.
fn sample_node(graph: &HeteroGraph, v: NodeId, samples: usize, length: usize, mode: WalkMode, seed_v: u64) -> NodeTokens {
    if graph.degree(v) == 0 {
        return NodeTokens { local: Vec::new(), ids: Vec::new() };
    }
    let mut rng = seed::derived_rng(seed_v, v as u64);
    let stride = length + 1;
    let mut walks = vec![v; samples * stride];
    for step in 1..stride {
        for w in walks.chunks_exact_mut(stride) {
            let ns = graph.neighbors(w[step - 1]);
            w[step] = ns[rng.gen_range(0..ns.len())];
        }
    }

    let mut writer = TokenWriter::default();
    let mut tok = String::new();
    let mut index: HashMap<String, TokenId> = HashMap::new();
    let mut local = Vec::new();
    let mut ids = Vec::with_capacity(samples);
    for nodes in walks.chunks_exact(stride) {
        writer.write(nodes, graph, mode, &mut tok);
        let id = match index.get(tok.as_str()) {
            Some(&id) => id,
            None => {
                let id = local.len() as TokenId;
                index.insert(tok.clone(), id);
                local.push(tok.clone());
                id
            }
        };
        ids.push(id);
    }
    NodeTokens { local, ids }
}

/// Samples `samples` walks of `walk_length` steps from every non-isolated
/// node and interns their tokens.
pub fn build_corpus(
    graph: &HeteroGraph,
    samples: usize,
    walk_length: usize,
    mode: WalkMode,
    seed: u64,
) -> Result<(Corpus, Lexicon)> {
    if samples < 1 {
        return Err(Error::invalid("samples per node must be at least 1"));
    }
    if walk_length < 1 {
        return Err(Error::invalid("walk length must be at least 1"));
    }
    if (0..graph.num_nodes()).all(|v| graph.degree(v) == 0) {
        return Err(Error::NoWalkableNodes);
    }

    let per_node = par::map_indexed(graph.num_nodes(), |v| sample_node(graph, v, samples, walk_length, mode, seed));

    let mut lexicon = Lexicon::default();
    let mut contexts = Vec::with_capacity(per_node.len());
    for NodeTokens { local, ids } in per_node {
        let remap: Vec<TokenId> = local.iter().map(|t| lexicon.intern(t)).collect();
        let ctx: Vec<TokenId> = ids.iter().map(|&i| remap[i as usize]).collect();
        for &t in &ctx {
            lexicon.frequencies[t as usize] += 1;
        }
        contexts.push(ctx);
    }
    Ok((
        Corpus {
            contexts,
            samples,
            walk_length,
            mode,
        },
        lexicon,
    ))
}

const MAGIC: &[u8; 8] = b"HAWECORP";
const VERSION: u32 = 1;

fn truncated(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Truncated("corpus file ended early".into())
    } else {
        Error::Io(e)
    }
}

struct Reader<R>(R);

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0.read_exact(&mut b).map_err(truncated)?;
        Ok(b)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
}

/// Binary layout (little endian): magic, version u32, mode u8, samples u64,
/// walk length u64, node count u64, token count u64, then per token
/// (byte length u32, UTF-8 bytes, frequency u64), then per node a flag u8
/// (0 isolated, 1 present) followed by `samples` u32 token ids when present.
pub fn save_corpus(corpus: &Corpus, lexicon: &Lexicon, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_corpus(corpus, lexicon, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_corpus<W: Write>(corpus: &Corpus, lexicon: &Lexicon, w: &mut W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[corpus.mode.code()])?;
    w.write_all(&(corpus.samples as u64).to_le_bytes())?;
    w.write_all(&(corpus.walk_length as u64).to_le_bytes())?;
    w.write_all(&(corpus.num_nodes() as u64).to_le_bytes())?;
    w.write_all(&(lexicon.len() as u64).to_le_bytes())?;
    for (tok, &f) in lexicon.tokens.iter().zip(&lexicon.frequencies) {
        w.write_all(&(tok.len() as u32).to_le_bytes())?;
        w.write_all(tok.as_bytes())?;
        w.write_all(&f.to_le_bytes())?;
    }
    for ctx in &corpus.contexts {
        w.write_all(&[u8::from(!ctx.is_empty())])?;
        for &t in ctx {
            w.write_all(&t.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<(Corpus, Lexicon)> {
    read_corpus(BufReader::new(File::open(path)?))
}

pub fn read_corpus<R: Read>(r: R) -> Result<(Corpus, Lexicon)> {
    let mut r = Reader(r);
    if &r.bytes::<8>()? != MAGIC {
        return Err(Error::Format("not a corpus file (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("corpus version {version}, expected {VERSION}")));
    }
    let mode = WalkMode::from_code(r.u8()?).ok_or_else(|| Error::Format("unknown walk mode".into()))?;
    let samples = r.u64()? as usize;
    let walk_length = r.u64()? as usize;
    let num_nodes = r.u64()? as usize;
    let num_tokens = r.u64()? as usize;
    let mut entries = Vec::with_capacity(num_tokens.min(1 << 20));
    for _ in 0..num_tokens {
        let len = r.u32()? as usize;
        let mut buf = vec![0u8; len];
        r.0.read_exact(&mut buf).map_err(truncated)?;
        let tok = String::from_utf8(buf).map_err(|_| Error::Format("token is not UTF-8".into()))?;
        entries.push((tok, r.u64()?));
    }
    let lexicon = Lexicon::from_entries(entries)?;
    let mut contexts = Vec::with_capacity(num_nodes.min(1 << 24));
    for _ in 0..num_nodes {
        let ctx = match r.u8()? {
            0 => Vec::new(),
            1 => (0..samples).map(|_| r.u32()).collect::<Result<_>>()?,
            f => return Err(Error::Format(format!("bad context flag {f}"))),
        };
        contexts.push(ctx);
    }
    let mut rest = [0u8; 1];
    if r.0.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after corpus".into()));
    }
    let corpus = Corpus {
        contexts,
        samples,
        walk_length,
        mode,
    };
    corpus.validate(&lexicon)?;
    Ok((corpus, lexicon))
}

/// Debug export: `raw_id <TAB> token token ...` per non-isolated node.
pub fn write_corpus_tsv<W: Write>(corpus: &Corpus, lexicon: &Lexicon, raw_ids: &[String], mut w: W) -> Result<()> {
    writeln!(w, "# node\ttokens (mode={}, L={}, T={})", corpus.mode, corpus.walk_length, corpus.samples)?;
    for (v, ctx) in corpus.contexts.iter().enumerate() {
        if ctx.is_empty() {
            continue;
        }
        write!(w, "{}\t", raw_ids[v])?;
        for (i, &t) in ctx.iter().enumerate() {
            if i > 0 {
                w.write_all(b" ")?;
            }
            w.write_all(lexicon.token(t).as_bytes())?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetgraph::{default_type_names, gen_er, gen_pinwheel};

    #[test]
    fn forced_corpus_on_single_edge() {
        let g = HeteroGraph::from_edges(vec![0, 0], default_type_names(1), [(0, 1)]).unwrap();
        let (c, lex) = build_corpus(&g, 4, 2, WalkMode::Aw, 1).unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.token(0), "0-1-0");
        assert_eq!(c.context(0), &[0, 0, 0, 0]);
        assert_eq!(c.context(1), &[0, 0, 0, 0]);
        assert_eq!(lex.total(), 8);
    }

    #[test]
    fn isolated_nodes_get_empty_contexts() {
        let g = HeteroGraph::from_edges(vec![0; 3], default_type_names(1), [(0, 1)]).unwrap();
        let (c, lex) = build_corpus(&g, 3, 2, WalkMode::Haw, 1).unwrap();
        assert_eq!(c.isolated(), vec![2]);
        c.validate(&lex).unwrap();
        let empty = HeteroGraph::from_edges(vec![0; 3], default_type_names(1), []).unwrap();
        assert!(matches!(build_corpus(&empty, 3, 2, WalkMode::Aw, 1), Err(Error::NoWalkableNodes)));
        assert!(build_corpus(&g, 0, 2, WalkMode::Aw, 1).is_err());
        assert!(build_corpus(&g, 1, 0, WalkMode::Aw, 1).is_err());
    }

    #[test]
    fn frequencies_conserve_tokens() {
        let g = gen_er(200, 0.05, 3, 2).unwrap();
        let (c, lex) = build_corpus(&g, 32, 4, WalkMode::Haw, 7).unwrap();
        c.validate(&lex).unwrap();
        let walkable = (0..200).filter(|&v| g.degree(v) > 0).count() as u64;
        assert_eq!(lex.total(), 32 * walkable);
        assert_eq!(lex.total() as usize, c.num_tokens());
    }

    #[test]
    fn single_type_haw_mirrors_aw() {
        let g = gen_er(150, 0.04, 1, 3).unwrap();
        let (ca, la) = build_corpus(&g, 64, 5, WalkMode::Aw, 11).unwrap();
        let (ch, lh) = build_corpus(&g, 64, 5, WalkMode::Haw, 11).unwrap();
        assert_eq!(la.len(), lh.len());
        assert_eq!(la.frequencies(), lh.frequencies());
        assert_eq!(ca.contexts, ch.contexts);
    }

    #[test]
    fn chaw_lexicon_is_no_larger_than_haw() {
        for s in 0..5 {
            let g = gen_er(200, 0.05, 3, s).unwrap();
            let (_, lh) = build_corpus(&g, 64, 6, WalkMode::Haw, s).unwrap();
            let (_, lc) = build_corpus(&g, 64, 6, WalkMode::Chaw, s).unwrap();
            let (_, la) = build_corpus(&g, 64, 6, WalkMode::Aw, s).unwrap();
            assert!(lc.len() <= lh.len(), "seed {s}: {} > {}", lc.len(), lh.len());
            assert!(la.len() <= lc.len());
        }
    }

    #[test]
    fn corpus_is_thread_count_independent() {
        let g = gen_er(300, 0.03, 2, 9).unwrap();
        let one = par::with_threads(1, || build_corpus(&g, 16, 4, WalkMode::Chaw, 5).unwrap());
        let many = par::with_threads(4, || build_corpus(&g, 16, 4, WalkMode::Chaw, 5).unwrap());
        assert_eq!(one, many);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_corpus(&one.0, &one.1, &mut a).unwrap();
        write_corpus(&many.0, &many.1, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binary_round_trip() {
        let g = gen_pinwheel(8, 2, true, 0).unwrap();
        let (c, lex) = build_corpus(&g, 20, 4, WalkMode::Haw, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.bin");
        save_corpus(&c, &lex, &p).unwrap();
        let (c2, lex2) = load_corpus(&p).unwrap();
        assert_eq!(c, c2);
        assert_eq!(lex, lex2);
        assert_eq!(lex.tokens(), lex2.tokens());
    }

    #[test]
    fn bad_magic_and_truncation() {
        let g = gen_pinwheel(4, 1, false, 0).unwrap();
        let (c, lex) = build_corpus(&g, 8, 3, WalkMode::Aw, 3).unwrap();
        let mut buf = Vec::new();
        write_corpus(&c, &lex, &mut buf).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_corpus(&bad[..]), Err(Error::Format(_))));

        let mut wrong_version = buf.clone();
        wrong_version[8] = 9;
        assert!(matches!(read_corpus(&wrong_version[..]), Err(Error::Format(_))));

        assert!(matches!(read_corpus(&buf[..buf.len() - 3]), Err(Error::Truncated(_))));

        let mut extra = buf.clone();
        extra.push(0);
        assert!(read_corpus(&extra[..]).is_err());
    }

    #[test]
    fn tsv_export_lists_tokens() {
        let g = HeteroGraph::from_edges(vec![0, 0], default_type_names(1), [(0, 1)]).unwrap();
        let (c, lex) = build_corpus(&g, 2, 1, WalkMode::Aw, 1).unwrap();
        let mut out = Vec::new();
        write_corpus_tsv(&c, &lex, g.raw_ids(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("0\t0-1 0-1\n"));
    }
}
