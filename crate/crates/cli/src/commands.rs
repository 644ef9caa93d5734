use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use hawe::corpus::{load_corpus, save_corpus, write_corpus_tsv};
use hawe::evalharness::{
    bench_runtime, classify, loglog_slope, run_pipeline, topk_search, write_bench_tsv, write_sweep_tsv, BenchConfig,
    ClassifyConfig, Family, Features, Metric, PipelineConfig, SweepParam,
};
use hawe::hetgraph::{
    gen_ba, gen_er, gen_pinwheel, load_graph, load_labels, read_label_pairs, read_node_ids, wl_roles, write_graph,
    write_roles, HeteroGraph,
};
use hawe::pvdm::{export_embeddings, read_embeddings, train_with_report, TrainConfig};
use hawe::walklang::{bell, count_haws};
use hawe::{build_corpus, par, WalkMode};

use crate::manifest::{beside, Manifest};
use crate::{
    BenchArgs, ClassifyArgs, ClassifyOpts, Cli, CliError, Command, CountArgs, GenFamily, GenerateArgs, GraphFiles,
    MetricArg, SampleArgs, SearchArgs, SweepArgs, TrainArgs, TrainOpts, WalkOpts, WlRolesArgs,
};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => generate(cli, a),
        Command::Sample(a) => sample(cli, a),
        Command::Train(a) => train(cli, a),
        Command::Classify(a) => classify_cmd(cli, a),
        Command::Search(a) => search(a),
        Command::Count(a) => count(a),
        Command::Sweep(a) => sweep_cmd(cli, a),
        Command::Bench(a) => bench(cli, a),
        Command::WlRoles(a) => roles(a),
    }
}

fn need(paths: &[&Path]) -> Result<()> {
    match paths.iter().find(|p| !p.is_file()) {
        Some(p) => Err(CliError::Input(format!("missing input file {}", p.display()))),
        None => Ok(()),
    }
}

fn threads(cli: &Cli) -> usize {
    if cli.threads == 0 {
        par::current_threads()
    } else {
        cli.threads
    }
}

fn load(g: &GraphFiles, m: &mut Manifest) -> Result<HeteroGraph> {
    need(&[&g.nodes, &g.edges])?;
    let graph = load_graph(&g.nodes, &g.edges)?;
    m.file("input.nodes", &g.nodes)?;
    m.file("input.edges", &g.edges)?;
    m.set("graph.nodes", graph.num_nodes());
    m.set("graph.edges", graph.num_edges());
    m.set("graph.types", graph.num_types());
    Ok(graph)
}

fn echo_walk(m: &mut Manifest, w: &WalkOpts) {
    m.set("samples", w.samples);
    m.set("walk_length", w.walk_length);
    m.set("mode", WalkMode::from(w.mode));
}

fn train_config(cli: &Cli, t: &TrainOpts, seed: u64) -> TrainConfig {
    TrainConfig {
        dim: t.dim,
        window: t.window,
        epochs: t.epochs,
        lr_start: t.lr_start,
        lr_end: t.lr_end,
        seed,
        threads: threads(cli),
        deterministic: t.deterministic,
    }
}

fn echo_train(m: &mut Manifest, c: &TrainConfig) {
    m.set("dim", c.dim);
    m.set("window", c.window);
    m.set("epochs", c.epochs);
    m.set("lr_start", c.lr_start);
    m.set("lr_end", c.lr_end);
    m.set("deterministic", c.deterministic);
    if !c.deterministic {
        m.set("threads", c.threads);
    }
}

fn classify_config(c: &ClassifyOpts, seed: u64) -> ClassifyConfig {
    ClassifyConfig {
        train_frac: c.train_frac,
        repeats: c.repeats,
        seed,
        ..Default::default()
    }
}

fn echo_classify(m: &mut Manifest, c: &ClassifyConfig) {
    m.set("train_frac", c.train_frac);
    m.set("repeats", c.repeats);
    m.set("lambda", c.lambda);
    m.set("max_iters", c.max_iters);
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))
}

fn generate(cli: &Cli, a: &GenerateArgs) -> Result<()> {
    let mut m = Manifest::new("generate");
    m.set("seed", cli.seed);
    let graph = match a.family {
        GenFamily::Pinwheel => {
            m.set("family", "pinwheel");
            m.set("blades", a.blades);
            m.set("blade_len", a.blade_len);
            m.set("hetero", a.hetero);
            gen_pinwheel(a.blades, a.blade_len, a.hetero, cli.seed)?
        }
        GenFamily::Er => {
            let p = a.edge_prob.unwrap_or(a.avg_degree_factor / a.num_nodes.max(1) as f64).min(1.0);
            m.set("family", "er");
            m.set("num_nodes", a.num_nodes);
            m.set("edge_prob", p);
            m.set("types", a.types);
            gen_er(a.num_nodes, p, a.types, cli.seed)?
        }
        GenFamily::Ba => {
            m.set("family", "ba");
            m.set("num_nodes", a.num_nodes);
            m.set("edges_per_node", a.edges_per_node);
            m.set("types", a.types);
            gen_ba(a.num_nodes, a.edges_per_node, a.types, cli.seed)?
        }
    };
    fs::create_dir_all(&a.out)?;
    let (nodes, edges, roles_path) = (a.out.join("nodes.tsv"), a.out.join("edges.tsv"), a.out.join("roles.tsv"));
    write_graph(&graph, &nodes, &edges)?;
    let roles = wl_roles(&graph, a.wl_iters)?;
    write_roles(&graph, &roles, &roles_path)?;
    m.set("wl_iters", a.wl_iters);
    m.set("graph.nodes", graph.num_nodes());
    m.set("graph.edges", graph.num_edges());
    m.set("roles", roles.num_roles);
    m.file("artifact.nodes", &nodes)?;
    m.file("artifact.edges", &edges)?;
    m.file("artifact.roles", &roles_path)?;
    m.write(&a.out.join("manifest.txt"))?;
    println!(
        "{} nodes, {} edges, {} roles -> {}",
        graph.num_nodes(),
        graph.num_edges(),
        roles.num_roles,
        a.out.display()
    );
    Ok(())
}

fn roles(a: &WlRolesArgs) -> Result<()> {
    let mut m = Manifest::new("wl-roles");
    let graph = load(&a.graph, &mut m)?;
    let roles = wl_roles(&graph, a.max_iters)?;
    write_roles(&graph, &roles, &a.out)?;
    m.set("max_iters", a.max_iters);
    m.set("roles", roles.num_roles);
    m.file("artifact.roles", &a.out)?;
    m.write(&beside(&a.out))?;
    println!("{} roles", roles.num_roles);
    Ok(())
}

fn sample(cli: &Cli, a: &SampleArgs) -> Result<()> {
    let mut m = Manifest::new("sample");
    let graph = load(&a.graph, &mut m)?;
    m.set("seed", cli.seed);
    echo_walk(&mut m, &a.walk);
    let (corpus, lexicon) = build_corpus(&graph, a.walk.samples, a.walk.walk_length, a.walk.mode.into(), cli.seed)?;
    save_corpus(&corpus, &lexicon, &a.out)?;
    m.set("lexicon", lexicon.len());
    m.set("isolated", corpus.isolated().len());
    m.file("artifact.corpus", &a.out)?;
    if let Some(tsv) = &a.tsv {
        let mut w = create(tsv)?;
        write_corpus_tsv(&corpus, &lexicon, graph.raw_ids(), &mut w)?;
        w.flush()?;
        m.file("artifact.corpus_tsv", tsv)?;
    }
    m.write(&beside(&a.out))?;
    println!("{} distinct tokens over {} nodes", lexicon.len(), graph.num_nodes());
    Ok(())
}

fn train(cli: &Cli, a: &TrainArgs) -> Result<()> {
    let mut m = Manifest::new("train");
    need(&[&a.corpus, &a.nodes])?;
    let (corpus, lexicon) = load_corpus(&a.corpus)?;
    let ids = read_node_ids(&a.nodes)?;
    if ids.len() != corpus.num_nodes() {
        return Err(CliError::Input(format!(
            "node file lists {} nodes but the corpus has {}",
            ids.len(),
            corpus.num_nodes()
        )));
    }
    m.file("input.corpus", &a.corpus)?;
    m.file("input.nodes", &a.nodes)?;
    m.set("seed", cli.seed);
    let cfg = train_config(cli, &a.train, cli.seed);
    echo_train(&mut m, &cfg);
    let (model, report) = train_with_report(&corpus, &lexicon, &cfg)?;
    if !model.is_finite() {
        return Err(CliError::Runtime("training diverged (non-finite parameters)".into()));
    }
    export_embeddings(&model, &ids, &a.out)?;
    if let Some(last) = report.epoch_mean_log_prob.last() {
        m.set("final_epoch_mean_log_prob", format!("{last:.6}"));
    }
    m.file("artifact.embeddings", &a.out)?;
    m.write(&beside(&a.out))?;
    println!("trained {} x {} embeddings -> {}", corpus.num_nodes(), cfg.dim, a.out.display());
    Ok(())
}

/// Embedding rows that have a label, with labels densified in order of
/// first appearance in the label file.
fn label_rows(emb: &hawe::pvdm::Embeddings, pairs: Vec<(String, String)>) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for (id, label) in pairs {
        let next = names.len();
        let c = *names.entry(label).or_insert(next);
        by_id.insert(id, c);
    }
    let mut data = Vec::new();
    let mut ys = Vec::new();
    for (i, id) in emb.raw_ids.iter().enumerate() {
        if let Some(&c) = by_id.get(id) {
            data.extend_from_slice(emb.row(i));
            ys.push(c);
        }
    }
    if ys.is_empty() {
        return Err(CliError::Input("no embedded node has a label".into()));
    }
    Ok((data, ys))
}

fn classify_cmd(cli: &Cli, a: &ClassifyArgs) -> Result<()> {
    let mut m = Manifest::new("classify");
    need(&[&a.embeddings, &a.labels])?;
    let emb = read_embeddings(&a.embeddings)?;
    let pairs = read_label_pairs(&a.labels)?;
    m.file("input.embeddings", &a.embeddings)?;
    m.file("input.labels", &a.labels)?;
    m.set("seed", cli.seed);
    let cfg = classify_config(&a.classify, cli.seed);
    echo_classify(&mut m, &cfg);
    let (data, ys) = label_rows(&emb, pairs)?;
    let report = classify(Features::new(&data, emb.dim)?, &ys, &cfg)?;
    let mut w = create(&a.out)?;
    report.write_tsv(&mut w)?;
    w.flush()?;
    m.set("labeled_rows", ys.len());
    m.set("mean_accuracy", format!("{:.6}", report.mean));
    m.file("artifact.report", &a.out)?;
    m.write(&beside(&a.out))?;
    println!("{}", report.summary());
    Ok(())
}

fn search(a: &SearchArgs) -> Result<()> {
    need(&[&a.embeddings])?;
    let emb = read_embeddings(&a.embeddings)?;
    let target = emb
        .index_of(&a.target)
        .ok_or_else(|| CliError::Input(format!("unknown node id `{}`", a.target)))?;
    let list = topk_search(Features::new(&emb.data, emb.dim)?, &emb.raw_ids, target, a.k)?;
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            list.write_tsv(&mut w)?;
            w.flush()?;
            let mut m = Manifest::new("search");
            m.file("input.embeddings", &a.embeddings)?;
            m.set("target", &a.target);
            m.set("k", a.k);
            m.file("artifact.neighbors", path)?;
            m.write(&beside(path))?;
        }
        None => list.write_tsv(io::stdout().lock())?,
    }
    Ok(())
}

fn count(a: &CountArgs) -> Result<()> {
    let c = count_haws(a.length, a.types)?;
    let b = bell(a.length);
    println!("l\tbell\thaw_exact\thaw_bound");
    println!("{}\t{}\t{}\t{}", a.length, b, c.exact, c.bound);
    if let Some(path) = &a.manifest {
        let mut m = Manifest::new("count");
        m.set("length", a.length);
        m.set("types", a.types);
        m.set("bell", &b);
        m.set("haw_exact", &c.exact);
        m.set("haw_bound", &c.bound);
        m.write(path)?;
    }
    Ok(())
}

fn sweep_cmd(cli: &Cli, a: &SweepArgs) -> Result<()> {
    let mut m = Manifest::new("sweep");
    let graph = load(&a.graph, &mut m)?;
    let labels = match &a.labels {
        Some(path) => {
            need(&[path])?;
            m.file("input.labels", path)?;
            load_labels(path, &graph)?.0
        }
        None if graph.has_labels() => graph.labels().to_vec(),
        None => return Err(CliError::Input("no labels: pass --labels or add a class column to the node file".into())),
    };
    let param: SweepParam = a.param.parse()?;
    m.set("seed", cli.seed);
    m.set("param", param);
    m.set("values", a.values.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
    echo_walk(&mut m, &a.walk);
    let tcfg = train_config(cli, &a.train, 0);
    echo_train(&mut m, &tcfg);
    let metric = match a.metric {
        MetricArg::Classify => {
            let c = classify_config(&a.classify, 0);
            echo_classify(&mut m, &c);
            m.set("metric", "classify");
            Metric::Classify(c)
        }
        MetricArg::Nn => {
            m.set("metric", "nn");
            Metric::NearestNeighbor
        }
    };
    let base = PipelineConfig {
        samples: a.walk.samples,
        walk_length: a.walk.walk_length,
        mode: a.walk.mode.into(),
        train: tcfg,
        metric,
        seed: cli.seed,
    };
    let mut rows = Vec::new();
    for &v in &a.values {
        let run = run_pipeline(&graph, &labels, &param.apply(&base, v))?;
        println!("{param}={v}\taccuracy={:.4}", run.accuracy);
        rows.push(hawe::evalharness::SweepRow {
            value: v,
            accuracy: run.accuracy,
        });
    }
    let mut w = create(&a.out)?;
    write_sweep_tsv(param, &rows, &mut w)?;
    w.flush()?;
    m.file("artifact.sweep", &a.out)?;
    m.write(&beside(&a.out))?;
    Ok(())
}

fn bench(cli: &Cli, a: &BenchArgs) -> Result<()> {
    let family: Family = a.family.parse()?;
    let cfg = BenchConfig {
        samples: a.samples,
        walk_length: a.walk_length,
        mode: a.mode.into(),
        train: TrainConfig {
            dim: a.dim,
            window: a.window,
            epochs: a.epochs,
            threads: threads(cli),
            deterministic: a.deterministic,
            ..Default::default()
        },
        runs: a.runs,
        num_types: a.types,
        avg_degree_factor: a.avg_degree_factor,
        ba_edges: a.edges_per_node,
        seed: cli.seed,
    };
    let rows = bench_runtime(&a.sizes, family, &cfg)?;
    let mut w = create(&a.out)?;
    write_bench_tsv(&rows, &mut w)?;
    w.flush()?;
    let mut m = Manifest::new("bench");
    m.set("seed", cli.seed);
    m.set("family", family);
    m.set("sizes", a.sizes.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
    m.set("runs", a.runs);
    m.set("samples", a.samples);
    m.set("walk_length", a.walk_length);
    m.set("mode", cfg.mode);
    echo_train(&mut m, &cfg.train);
    m.set("avg_degree_factor", a.avg_degree_factor);
    m.set("edges_per_node", a.edges_per_node);
    m.set("types", a.types);
    if let Some(s) = loglog_slope(&rows) {
        m.set("loglog_slope", format!("{s:.4}"));
        println!("log-log slope {s:.4}");
    }
    m.file("artifact.bench", &a.out)?;
    m.write(&beside(&a.out))?;
    write_bench_tsv(&rows, io::stdout().lock())?;
    Ok(())
}
