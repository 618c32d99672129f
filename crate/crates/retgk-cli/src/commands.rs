use std::path::Path;
use std::time::Instant;

use retgk::dataset::{load_tu_dataset, write_gram, write_rpf, GramFormat, TuDatasetLayout};
use retgk::graph::GraphDataset;
use retgk::pipeline::{build_grams, classify, GramBundle, PipelineConfig};
use retgk::rng::derive_stream;
use retgk::rpf::{dataset_rpf, RpfConfig};
use retgk::svm::CvConfig;

use crate::args::{FormatArg, RunArgs, SweepArgs, SweepAxis};
use crate::meta::{append_result_row, write_record, ResultRow, RunRecord, Timings};

pub enum CliError {
    Usage(String),
    Lib(retgk::Error),
    Io(std::io::Error),
}

impl From<retgk::Error> for CliError {
    fn from(e: retgk::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub fn validate(args: &RunArgs) -> Result<(), CliError> {
    let usage = |msg: String| Err(CliError::Usage(msg));
    if args.steps < 1 {
        return usage("--steps must be at least 1".into());
    }
    if args.mc_trials < 1 {
        return usage("--mc-trials must be at least 1".into());
    }
    if args.folds < 2 {
        return usage("--folds must be at least 2".into());
    }
    if args.repeats < 1 {
        return usage("--repeats must be at least 1".into());
    }
    if args.p_grid.is_empty() || args.p_grid.iter().any(|&p| p.is_nan() || p <= 0.0 || p > 2.0) {
        return usage(format!(
            "--p-grid values must lie in (0, 2], got {:?}",
            args.p_grid
        ));
    }
    if args.c_grid.is_empty() || args.c_grid.iter().any(|&c| c <= 0.0 || c.is_nan()) {
        return usage(format!(
            "--c-grid values must be positive, got {:?}",
            args.c_grid
        ));
    }
    if args.d0 == Some(0) || args.dc == Some(0) {
        return usage("--d0 and --dc must be at least 1".into());
    }
    Ok(())
}

fn pipeline_config(args: &RunArgs) -> PipelineConfig {
    let mut config = PipelineConfig::new(args.dataset.clone());
    config.variant = args.variant.to_pipeline();
    config.rpf_method = args.rpf_method.to_pipeline();
    config.steps = args.steps;
    config.mc_trials = args.mc_trials;
    config.d0 = args.d0;
    config.dc = args.dc;
    config.p_grid = args.p_grid.clone();
    config.self_loops = args.self_loops.to_policy();
    config.seed = args.seed;
    config.rff_freq = args.rff_freq.to_pipeline();
    config
}

fn load(args: &RunArgs) -> Result<(GraphDataset, f64), CliError> {
    let t = Instant::now();
    let layout = TuDatasetLayout::new(args.dataset_dir.clone(), args.dataset.clone());
    let dataset = load_tu_dataset(&layout)?;
    Ok((dataset, t.elapsed().as_secs_f64()))
}

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn base_record(args: &RunArgs, command: &str) -> RunRecord {
    RunRecord {
        command: command.into(),
        dataset: args.dataset.clone(),
        dataset_dir: args.dataset_dir.display().to_string(),
        variant: format!("{:?}", args.variant).to_ascii_lowercase(),
        rpf_method: match args.rpf_method {
            crate::args::RpfMethodArg::Spectral => "spectral".into(),
            crate::args::RpfMethodArg::MonteCarlo => "monte-carlo".into(),
        },
        steps: args.steps,
        mc_trials: args.mc_trials,
        d0: args.d0,
        dc: args.dc,
        p_grid: args.p_grid.clone(),
        c_grid: args.c_grid.clone(),
        folds: args.folds,
        repeats: args.repeats,
        seed: args.seed,
        self_loops: match args.self_loops {
            crate::args::SelfLoopsArg::Isolated => "isolated".into(),
            crate::args::SelfLoopsArg::All => "all".into(),
        },
        rff_freq: match args.rff_freq {
            crate::args::RffFreqArg::Gaussian => "gaussian".into(),
            crate::args::RffFreqArg::Cauchy => "cauchy".into(),
        },
        format: match args.format {
            FormatArg::Csv => "csv".into(),
            FormatArg::Binary => "binary".into(),
        },
        gamma0: None,
        gamma_c: None,
        graph_gammas: Vec::new(),
        ridge: None,
        mean_accuracy: None,
        std_accuracy: None,
        per_repeat: Vec::new(),
        modal_p: None,
        selection_counts: Vec::new(),
        timings: Timings::default(),
        out_files: Vec::new(),
    }
}

fn fill_bundle(record: &mut RunRecord, bundle: &GramBundle) {
    record.gamma0 = Some(bundle.gamma0);
    record.gamma_c = bundle.gamma_c;
    record.graph_gammas = bundle.graph_gammas.clone();
    record.d0 = bundle.d0;
    record.dc = bundle.dc;
    record.timings.rpf = bundle.timings.rpf;
    record.timings.embed = bundle.timings.embed;
    record.timings.gram = bundle.timings.gram;
    record.timings.cv = bundle.timings.cv;
}

fn fmt_p(p: f64) -> String {
    if p.fract() == 0.0 {
        format!("{}", p as i64)
    } else {
        format!("{p}")
    }
}

pub fn cmd_rpf(args: &RunArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let (dataset, load_s) = load(args)?;
    ensure_out(&args.out)?;
    let prepared = dataset.apply_self_loops(args.self_loops.to_policy(), 1.0);
    let rpf_config = RpfConfig {
        steps: args.steps,
        method: args.rpf_method.to_pipeline(),
        mc_trials: args.mc_trials,
        seed: derive_stream(args.seed, "rpf-mc", &[]),
    };
    let t = Instant::now();
    let rpfs = dataset_rpf(&prepared.graphs, &rpf_config)?;
    let rpf_s = t.elapsed().as_secs_f64();
    let path = args.out.join(format!("{}_rpf.csv", args.dataset));
    write_rpf(&rpfs, args.steps, &path)?;
    let nodes: usize = prepared.graphs.iter().map(|g| g.node_count()).sum();
    println!(
        "{}: {} graphs, {nodes} nodes, S = {} -> {}",
        args.dataset,
        dataset.len(),
        args.steps,
        path.display()
    );
    println!(
        "timings: load {load_s:.3} s, rpf {rpf_s:.3} s, total {:.3} s",
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

pub fn cmd_gram(args: &RunArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let (dataset, load_s) = load(args)?;
    ensure_out(&args.out)?;
    let config = pipeline_config(args);
    let bundle = build_grams(&dataset, &config)?;

    let variant = config.variant.name();
    let mut record = base_record(args, "gram");
    fill_bundle(&mut record, &bundle);
    record.timings.load = load_s;

    let (format, ext) = match args.format {
        FormatArg::Csv => (GramFormat::Csv, "csv"),
        FormatArg::Binary => (GramFormat::Binary, "bin"),
    };
    for (p, gram) in &bundle.grams {
        let path = args.out.join(format!(
            "{}_{variant}_p{}.gram.{ext}",
            args.dataset,
            fmt_p(*p)
        ));
        write_gram(gram, &path, format)?;
        println!("wrote {} ({} x {})", path.display(), gram.len(), gram.len());
        record.out_files.push(path.display().to_string());
    }
    record.timings.total = start.elapsed().as_secs_f64();
    let meta_path = args
        .out
        .join(format!("{}_{variant}.gram.meta.json", args.dataset));
    write_record(&record, &meta_path)?;
    println!("metadata -> {}", meta_path.display());
    Ok(())
}

pub fn classify_once(args: &RunArgs, meta_suffix: &str) -> Result<String, CliError> {
    let start = Instant::now();
    let (dataset, load_s) = load(args)?;
    ensure_out(&args.out)?;
    let distinct: std::collections::BTreeSet<i64> =
        dataset.class_labels.iter().copied().collect();
    if distinct.len() < 2 {
        eprintln!(
            "warning: {} has a single class; accuracy is trivially 100%",
            args.dataset
        );
    }
    let config = pipeline_config(args);
    let cv_config = CvConfig {
        folds: args.folds,
        repeats: args.repeats,
        c_grid: args.c_grid.clone(),
        seed: 0,
    };
    let outcome = classify(&dataset, &config, &cv_config)?;
    let wall = start.elapsed().as_secs_f64();

    let variant = config.variant.name();
    let mut record = base_record(args, "classify");
    fill_bundle(&mut record, &outcome.bundle);
    record.timings.load = load_s;
    record.timings.total = wall;
    record.mean_accuracy = Some(outcome.cv.mean_accuracy);
    record.std_accuracy = Some(outcome.cv.std_accuracy);
    record.per_repeat = outcome.cv.per_repeat.clone();
    record.modal_p = Some(outcome.modal_p);
    record.selection_counts = outcome.cv.selection_counts.clone();
    record.ridge = Some(outcome.cv.ridge);

    let row = ResultRow {
        dataset: &args.dataset,
        kernel: variant,
        steps: args.steps,
        d0: outcome.bundle.d0,
        dc: outcome.bundle.dc,
        p: outcome.modal_p,
        mean: outcome.cv.mean_accuracy,
        std: outcome.cv.std_accuracy,
        wall,
    }
    .to_csv();
    let results_path = args.out.join("results.csv");
    append_result_row(&results_path, &row)?;
    record.out_files.push(results_path.display().to_string());

    let meta_path = args
        .out
        .join(format!("{}_{variant}{meta_suffix}.classify.meta.json", args.dataset));
    write_record(&record, &meta_path)?;

    println!(
        "{} {variant}: accuracy {:.1} ± {:.1} % (S={}, p={}, {} repeats x {}-fold, {wall:.1} s)",
        args.dataset,
        100.0 * outcome.cv.mean_accuracy,
        100.0 * outcome.cv.std_accuracy,
        args.steps,
        outcome.modal_p,
        args.repeats,
        args.folds,
    );
    Ok(row)
}

pub fn cmd_classify(args: &RunArgs) -> Result<(), CliError> {
    classify_once(args, "")?;
    Ok(())
}

pub fn cmd_sweep(sweep: &SweepArgs) -> Result<(), CliError> {
    if sweep.values.is_empty() {
        return Err(CliError::Usage("--values must not be empty".into()));
    }
    if sweep.values.contains(&0) {
        return Err(CliError::Usage("--values must be positive".into()));
    }
    let axis_name = match sweep.axis {
        SweepAxis::S => "S",
        SweepAxis::D0 => "d0",
        SweepAxis::Dc => "dc",
    };
    let mut rows = Vec::new();
    for &value in &sweep.values {
        let mut args = sweep.run.clone();
        match sweep.axis {
            SweepAxis::S => args.steps = value,
            SweepAxis::D0 => args.d0 = Some(value),
            SweepAxis::Dc => args.dc = Some(value),
        }
        let suffix = format!(".sweep-{axis_name}-{value}");
        rows.push(classify_once(&args, &suffix)?);
    }
    println!("sweep over {axis_name} complete:");
    println!("{}", crate::meta::RESULTS_HEADER);
    for row in rows {
        println!("{row}");
    }
    Ok(())
}
