use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use ecoc_core::benchmark::{run_benchmark, BenchmarkConfig};
use ecoc_core::coding::{read_matrix, write_matrix, CodeMatrix, Strategy};
use ecoc_core::dataset::synth::eight_gaussians;
use ecoc_core::dataset::{apply_scaling, fit_scaling, load_dense, load_sparse, write_dense, write_sparse, Dataset, LabelColumn};
use ecoc_core::ensemble::{
    build_matching_code_for_data, evaluate as evaluate_strategy, load_ensemble, save_ensemble, train_ensemble,
    EvaluationSettings,
};
use ecoc_core::matching::{brute_force, format_graph, parse_graph, solve_with_bye};
use ecoc_core::util::write_atomic;
use ecoc_core::{EcocError, Result};

use crate::{
    BenchmarkArgs, CodegenArgs, DataArgs, EvaluateArgs, Format, MatchArgs, MatchingArgs, PredictArgs, SynthArgs, TrainArgs,
    OUTPUT_DIR_ENV,
};

pub struct Context {
    pub seed: u64,
    pub quiet: bool,
}

impl Context {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn default_output(sub: &str) -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("ecoc-output"))
        .join(sub)
}

fn stdout_write(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| EcocError::io("<stdout>", e))
}

fn parse_delimiter(s: &str) -> Result<char> {
    match s {
        "ws" | "whitespace" | " " => Ok(' '),
        "tab" | "\\t" => Ok('\t'),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(EcocError::invalid(format!("delimiter must be one character, \"ws\" or \"tab\", got {s:?}"))),
            }
        }
    }
}

fn guess_format(path: &Path, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("svm" | "libsvm") => Format::Sparse,
        _ => Format::Dense,
    })
}

fn load_data(path: &Path, args: &DataArgs) -> Result<Dataset> {
    match guess_format(path, args.format) {
        Format::Sparse => load_sparse(path),
        Format::Dense => {
            let label = args.label_column.map_or(LabelColumn::Last, LabelColumn::Index);
            load_dense(path, label, parse_delimiter(&args.delimiter)?)
        }
    }
}

fn scaled(data: &Dataset) -> Result<Dataset> {
    apply_scaling(data, &fit_scaling(data)?)
}

fn matching_matrix(ctx: &Context, data: &Dataset, cfg: &ecoc_core::svm::SvmConfig, m: &MatchingArgs) -> Result<CodeMatrix> {
    ctx.note(format!(
        "building the matching code for {} classes ({}-fold pair scores)",
        data.n_classes(),
        m.inner_k
    ));
    let code = build_matching_code_for_data(&scaled(data)?, cfg, m.inner_k, ctx.seed, m.weight_orientation)?;
    Ok(code.matrix)
}

pub fn codegen(ctx: &Context, args: CodegenArgs) -> Result<()> {
    let data = args.data.as_deref().map(|p| load_data(p, &args.data_args)).transpose()?;
    let n = match (&data, args.classes) {
        (Some(d), Some(n)) if d.n_classes() != n => {
            return Err(EcocError::invalid(format!("--classes {n} but the data has {} classes", d.n_classes())))
        }
        (Some(d), _) => d.n_classes(),
        (None, Some(n)) => n,
        (None, None) => return Err(EcocError::invalid("give --classes or --data")),
    };
    let matrix = match (args.strategy, &data) {
        (Strategy::Matching, Some(d)) => {
            let cfg = args.learner.config();
            cfg.validate()?;
            matching_matrix(ctx, d, &cfg, &args.matching)?
        }
        (Strategy::Matching, None) => return Err(EcocError::invalid("the matching strategy needs --data")),
        (s, _) => s.build_fixed(n, ctx.seed)?,
    };
    match &args.output {
        Some(path) => {
            write_matrix(&matrix, path)?;
            ctx.note(format!("wrote {} x {} matrix to {}", matrix.n_classes(), matrix.n_columns(), path.display()));
        }
        None => stdout_write(&matrix.to_text())?,
    }
    if args.render {
        stdout_write(&matrix.render(data.as_ref().map(|d| d.classes())))?;
    }
    Ok(())
}

pub fn train(ctx: &Context, args: TrainArgs) -> Result<()> {
    let data = load_data(&args.data, &args.data_args)?;
    let cfg = args.learner.config();
    cfg.validate()?;
    let matrix = match &args.matrix {
        Some(path) => {
            let m = read_matrix(path)?;
            if m.n_classes() != data.n_classes() {
                return Err(EcocError::invalid(format!(
                    "matrix has {} rows, data has {} classes",
                    m.n_classes(),
                    data.n_classes()
                )));
            }
            m
        }
        None if args.strategy == Strategy::Matching => matching_matrix(ctx, &data, &cfg, &args.matching)?,
        None => args.strategy.build_fixed(data.n_classes(), ctx.seed)?,
    };
    let out = args.output.clone().unwrap_or_else(|| default_output("model"));
    let ensemble = train_ensemble(&data, matrix, &cfg, args.decoder)?;
    save_ensemble(&ensemble, &out, Some(ctx.seed))?;

    let mut text = format!("trained {} columns into {}\n", ensemble.models.len(), out.display());
    for (j, m) in ensemble.models.iter().enumerate() {
        let state = if m.converged { "converged" } else { "NOT converged" };
        let _ = writeln!(
            text,
            "column {j}: {state} after {} iterations, {} support vectors",
            m.iterations,
            m.support_vectors.len()
        );
    }
    stdout_write(&text)
}

/// Feature rows of a prediction input. Labels, when present, are dropped.
fn read_rows(text: &str, format: Format, delimiter: char, labelled: bool, n_features: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |col: usize, msg: String| EcocError::Parse {
            line: i + 1,
            column: col,
            message: msg,
        };
        let row = match format {
            Format::Dense => {
                let mut cells: Vec<&str> = if delimiter.is_whitespace() {
                    line.split_whitespace().collect()
                } else {
                    line.split(delimiter).map(str::trim).collect()
                };
                if labelled {
                    cells.pop();
                }
                cells
                    .iter()
                    .enumerate()
                    .map(|(c, v)| v.parse::<f64>().map_err(|_| bad(c + 1, format!("not a number: {v:?}"))))
                    .collect::<Result<Vec<f64>>>()?
            }
            Format::Sparse => {
                let mut row = vec![0.0; n_features];
                let tokens = line.split_whitespace().enumerate().skip(usize::from(labelled));
                for (c, tok) in tokens {
                    let (idx, val) = tok
                        .split_once(':')
                        .ok_or_else(|| bad(c + 1, format!("expected index:value, got {tok:?}")))?;
                    let idx: usize = idx.parse().map_err(|_| bad(c + 1, format!("bad index {idx:?}")))?;
                    let val: f64 = val.parse().map_err(|_| bad(c + 1, format!("bad value {val:?}")))?;
                    if idx == 0 || idx > n_features {
                        return Err(EcocError::DimensionMismatch {
                            expected: n_features,
                            actual: idx,
                        });
                    }
                    row[idx - 1] = val;
                }
                row
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn predict(_ctx: &Context, args: PredictArgs) -> Result<()> {
    let (mut ensemble, _) = load_ensemble(&args.model)?;
    if let Some(d) = args.decoder {
        ensemble.decoder = d;
    }
    let text = fs::read_to_string(&args.input).map_err(|e| EcocError::io(&args.input, e))?;
    let format = guess_format(&args.input, args.format);
    let rows = read_rows(&text, format, parse_delimiter(&args.delimiter)?, args.labelled, ensemble.n_features())?;
    let mut out = String::new();
    for row in &rows {
        let (class, dists) = ensemble.predict_with_distances(row)?;
        out.push_str(&ensemble.classes[class]);
        if args.scores {
            for d in dists {
                let _ = write!(out, " {d}");
            }
        }
        out.push('\n');
    }
    match &args.output {
        Some(path) => write_atomic(path, out.as_bytes()),
        None => stdout_write(&out),
    }
}

fn settings(learner: &crate::LearnerArgs, m: &MatchingArgs, decoder: ecoc_core::decoding::DecoderSpec, unstratified: bool) -> EvaluationSettings {
    EvaluationSettings {
        svm: learner.config(),
        decoder,
        inner_k: m.inner_k,
        orientation: m.weight_orientation,
        stratified: !unstratified,
    }
}

pub fn evaluate(ctx: &Context, args: EvaluateArgs) -> Result<()> {
    let data = load_data(&args.data, &args.data_args)?;
    let settings = settings(&args.learner, &args.matching, args.decoder, args.unstratified);
    ctx.note(format!("{}-fold evaluation of {} on {}", args.folds, args.strategy, data.name()));
    let report = evaluate_strategy(&data, args.strategy, &settings, args.folds, ctx.seed)?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "dataset {}  classes {}  strategy {}  classifiers {}",
        report.dataset, report.n_classes, report.strategy, report.n_classifiers
    );
    let _ = writeln!(
        text,
        "accuracy {:.2} ± {:.2} %",
        100.0 * report.accuracy_mean,
        100.0 * report.accuracy_std
    );
    let folds: Vec<String> = report.fold_accuracies.iter().map(|a| format!("{:.4}", a)).collect();
    let _ = writeln!(text, "folds {}", folds.join(" "));
    if report.non_converged > 0 {
        let _ = writeln!(text, "warning: {} column models hit the iteration budget", report.non_converged);
    }
    if report.code_per_fold {
        text.push_str("code matrix rebuilt per fold from training data only\n");
    }
    let t = &report.timings;
    let _ = writeln!(
        text,
        "time: code {:.3}s  train {:.3}s  predict {:.1}µs/instance",
        t.code_seconds,
        t.train_seconds,
        1e6 * t.predict_seconds_per_instance
    );
    if let Some(path) = &args.json {
        write_atomic(path, report.to_json().as_bytes())?;
    }
    stdout_write(&text)
}

pub fn benchmark(ctx: &Context, args: BenchmarkArgs) -> Result<()> {
    let datasets = args
        .data
        .iter()
        .map(|p| load_data(p, &args.data_args))
        .collect::<Result<Vec<_>>>()?;
    let config = BenchmarkConfig {
        strategies: args.strategies.clone(),
        repeats: args.repeats,
        outer_k: args.folds,
        seed: ctx.seed,
        settings: settings(&args.learner, &args.matching, args.decoder, args.unstratified),
    };
    ctx.note(format!(
        "benchmarking {} strategies on {} datasets",
        config.strategies.len(),
        datasets.len()
    ));
    let report = run_benchmark(&datasets, &config)?;
    let dir = args.output_dir.clone().unwrap_or_else(|| default_output("benchmark"));
    report.write(&dir)?;
    ctx.note(format!("reports written to {}", dir.display()));
    stdout_write(&report.to_text())
}

pub fn solve_match(_ctx: &Context, args: MatchArgs) -> Result<()> {
    let text = if args.graph.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| EcocError::io("<stdin>", e))?;
        s
    } else {
        fs::read_to_string(&args.graph).map_err(|e| EcocError::io(&args.graph, e))?
    };
    let problem = parse_graph(&text)?;
    let (matching, bye) = solve_with_bye(&problem)?;
    let mut out = String::new();
    for &(i, j) in &matching.pairs {
        let _ = writeln!(out, "{i} {j} {}", problem.weight(i, j));
    }
    if let Some(b) = bye {
        let _ = writeln!(out, "bye {b}");
    }
    let _ = writeln!(out, "total {}", matching.total_weight);
    if args.brute_force {
        if bye.is_some() {
            return Err(EcocError::invalid("--brute-force needs an even node count"));
        }
        let oracle = brute_force(&problem)?;
        if (oracle.total_weight - matching.total_weight).abs() > 1e-9 {
            return Err(EcocError::Numerical(format!(
                "solver total {} differs from exhaustive {}\n{}",
                matching.total_weight,
                oracle.total_weight,
                format_graph(&problem)
            )));
        }
        let _ = writeln!(out, "brute force total {}", oracle.total_weight);
    }
    stdout_write(&out)
}

pub fn synth(ctx: &Context, args: SynthArgs) -> Result<()> {
    let data = eight_gaussians(args.points_per_class, args.spread, ctx.seed)?;
    match args.format {
        Format::Dense => write_dense(&data, &args.output, ',')?,
        Format::Sparse => write_sparse(&data, &args.output)?,
    }
    ctx.note(format!("wrote {} instances to {}", data.len(), args.output.display()));
    Ok(())
}
