use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde_json::json;

use sumaudit::baselines::{
    avg_compression_ratio_sentences, run_summarizer, BaselineConfig, EmbeddingDir, FileEmbeddings, Registry,
    SimilarityBackend, TfIdfBackend,
};
use sumaudit::corpus::{load_jsonl, load_system_jsonl, write_jsonl, write_system_jsonl, Corpus, Field, Sample};
use sumaudit::filters::{self, compression_ratio, FilterConfig};
use sumaudit::report::{self, Format, ScoreRow};
use sumaudit::rouge::{score_corpus, Variant};
use sumaudit::stats::{self, OutlierMode, SortKey, Unit};
use sumaudit::textproc::{count_tokens, load_abbreviations, normalize, SentenceSplitter};

use crate::manifest::RunManifest;
use crate::{
    AuditArgs, BaselineArgs, FieldArg, FilterArgs, FilterOptions, FormatArg, InspectArgs, InspectMode, KeyArg,
    Preset, ScoreArgs, StatsArgs, UnitArg,
};

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Md => Format::Md,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

impl From<KeyArg> for SortKey {
    fn from(k: KeyArg) -> Self {
        match k {
            KeyArg::Position => SortKey::Position,
            KeyArg::RefLength => SortKey::RefLength,
            KeyArg::SummaryLength => SortKey::SummaryLength,
            KeyArg::Cr => SortKey::Cr,
        }
    }
}

fn load(path: &Path) -> Result<Corpus> {
    load_jsonl(path).with_context(|| format!("reading {}", path.display()))
}

fn filter_config(opts: &FilterOptions) -> Result<FilterConfig> {
    match &opts.config {
        Some(path) => Ok(FilterConfig::load(path)?),
        None => Ok(match opts.preset {
            Preset::Default => FilterConfig::default(),
            Preset::Wikilingua => FilterConfig::wikilingua(),
        }),
    }
}

fn splitter(abbreviations: Option<&Path>) -> Result<SentenceSplitter> {
    let splitter = SentenceSplitter::default();
    Ok(match abbreviations {
        Some(path) => splitter.with_extra(load_abbreviations(path)?),
        None => splitter,
    })
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn audit(args: AuditArgs) -> Result<()> {
    let config = filter_config(&args.filter)?;
    let corpus = load(&args.input)?;
    let mut result = filters::audit(&corpus, &config);
    result.report.split_label = Some(
        args.label
            .clone()
            .or_else(|| corpus.split_label.clone())
            .unwrap_or_else(|| file_stem(&args.input)),
    );
    result.report.check()?;

    let reports = [result.report];
    let with_max_cr = config.max_cr.is_some();
    let formats: Vec<Format> = args.format.iter().map(|&f| f.into()).collect();
    print!("{}", report::render_audit(&reports, with_max_cr, formats[0]));

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for &format in &formats {
            let path = dir.join(format!("audit.{}", format.extension()));
            write_file(&path, &report::render_audit(&reports, with_max_cr, format))?;
        }
        write_file(&dir.join("verdicts.jsonl"), &report::verdicts_jsonl(&result.verdicts))?;
        RunManifest::new(
            "audit",
            &[&args.input],
            json!({ "filter": config, "label": reports[0].split_label }),
            vec![],
        )
        .write_sidecar(&dir.join("audit"))?;
    }
    Ok(())
}

pub fn filter(args: FilterArgs) -> Result<()> {
    let config = filter_config(&args.filter)?;
    let corpus = load(&args.input)?;
    let kept = filters::filter(&corpus, &config);
    write_jsonl(&kept, &args.out)?;
    RunManifest::new("filter", &[&args.input], json!({ "filter": config }), vec![]).write_sidecar(&args.out)?;
    eprintln!("kept {} of {} samples", kept.len(), corpus.len());
    Ok(())
}

pub fn stats(args: StatsArgs) -> Result<()> {
    let corpus = load(&args.input)?;
    let result = match (args.cr, args.field, args.unit) {
        (true, _, _) => stats::cr_distribution(&corpus)?,
        (false, Some(field), Some(unit)) => {
            let field = match field {
                FieldArg::Reference => Field::Reference,
                FieldArg::Summary => Field::Summary,
            };
            let unit = match unit {
                UnitArg::Chars => Unit::Chars,
                UnitArg::Tokens => Unit::Tokens,
                UnitArg::Sentences => Unit::Sentences,
            };
            let splitter = splitter(args.abbreviations.as_deref())?;
            stats::length_distribution_with(&corpus, field, unit, &splitter)?
        }
        _ => bail!("either --cr or both --field and --unit are required"),
    };
    print!("{}", report::stats_markdown(std::slice::from_ref(&result)));
    if let Some(path) = &args.violin_out {
        write_file(path, &report::violin_json(&result))?;
        RunManifest::new(
            "stats",
            &[&args.input],
            json!({ "field": result.field, "unit": result.unit }),
            vec![],
        )
        .write_sidecar(path)?;
    }
    Ok(())
}

fn truncate(text: &str, max: usize) -> String {
    let text = normalize(text);
    match text.char_indices().nth(max) {
        Some((cut, _)) => format!("{}…", &text[..cut]),
        None => text,
    }
}

pub fn inspect(args: InspectArgs) -> Result<()> {
    let corpus = load(&args.input)?;
    let picked: Vec<&Sample> = match args.mode {
        InspectMode::Ordered => {
            stats::inspect_ordered(&corpus, args.key.unwrap_or(KeyArg::Position).into(), args.n)?
        }
        InspectMode::Random => stats::inspect_random(&corpus, args.n, args.seed)?,
        InspectMode::Outliers | InspectMode::Representative => {
            let mode = if args.mode == InspectMode::Outliers {
                OutlierMode::Extreme
            } else {
                OutlierMode::Representative
            };
            stats::inspect_outliers(&corpus, args.key.unwrap_or(KeyArg::Cr).into(), args.n, mode)?
        }
    };
    for (rank, sample) in picked.iter().enumerate() {
        let cr = compression_ratio(sample).map_or_else(|_| "undefined".to_string(), |cr| format!("{cr:.2}"));
        println!(
            "[{}] id={}  ref_tokens={}  summary_tokens={}  cr={}",
            rank + 1,
            sample.id,
            count_tokens(&sample.reference),
            count_tokens(&sample.summary),
            cr
        );
        println!("    reference: {}", truncate(&sample.reference, 160));
        println!("    summary:   {}", truncate(&sample.summary, 160));
    }
    Ok(())
}

pub fn baseline(args: BaselineArgs) -> Result<()> {
    let registry = Registry::default();
    let Some(method) = registry.resolve(&args.method) else {
        bail!(
            "unknown method {:?}; available: {}",
            args.method,
            registry.names().join(", ")
        );
    };
    if method != "lead3" && args.k.is_none() && args.cr_avg.is_none() && args.train.is_none() {
        bail!("--method {method} needs one of --k, --cr-avg or --train to choose the summary length");
    }
    let splitter = splitter(args.abbreviations.as_deref())?;
    let corpus = load(&args.input)?;

    let cr_avg = match (&args.train, args.cr_avg) {
        (Some(train), _) => {
            let cr = avg_compression_ratio_sentences(&load(train)?, &splitter)?;
            eprintln!("average sentence compression ratio of {}: {cr:.4}", train.display());
            Some(cr)
        }
        (None, cr) => cr,
    };
    let config = BaselineConfig {
        method: method.to_string(),
        k_override: args.k,
        cr_avg,
        damping: args.damping,
        tolerance: args.tolerance,
        max_iterations: args.max_iterations,
    };

    let backend: Arc<dyn SimilarityBackend> = match &args.embeddings {
        Some(path) if path.is_dir() => Arc::new(EmbeddingDir::new(path)),
        Some(path) => {
            if corpus.len() > 1 {
                bail!(
                    "{} holds vectors for one document but the corpus has {} samples; pass a directory of <id>.jsonl files",
                    path.display(),
                    corpus.len()
                );
            }
            Arc::new(FileEmbeddings::load(path)?)
        }
        None => Arc::new(TfIdfBackend::default()),
    };
    let summarizer = registry.build(&config, Arc::clone(&backend))?;
    let run = run_summarizer(&corpus, summarizer.as_ref(), &splitter)?;
    if !run.unconverged.is_empty() {
        eprintln!(
            "warning: centrality did not converge within {} iterations for {} sample(s): {}",
            config.max_iterations,
            run.unconverged.len(),
            run.unconverged.join(", ")
        );
    }
    write_system_jsonl(&run.outputs, &args.out)?;

    let mut inputs: Vec<&Path> = vec![&args.input];
    inputs.extend(args.train.as_deref());
    inputs.extend(args.embeddings.as_deref());
    RunManifest::new(
        "baseline",
        &inputs,
        json!({ "baseline": config, "similarity": backend.name() }),
        vec![],
    )
    .write_sidecar(&args.out)?;
    Ok(())
}

pub fn score(args: ScoreArgs) -> Result<()> {
    let variants = args
        .variants
        .iter()
        .map(|v| v.parse::<Variant>())
        .collect::<Result<Vec<_>, _>>()?;
    let stem = !args.no_stem;
    if !args.label.is_empty() && args.label.len() != args.system.len() {
        bail!("got {} --label values for {} --system files", args.label.len(), args.system.len());
    }
    if args.per_sample_csv.is_some() && args.system.len() > 1 {
        bail!("--per-sample-csv needs exactly one --system");
    }
    let gold = load(&args.gold)?;

    let mut rows = Vec::with_capacity(args.system.len());
    for (i, path) in args.system.iter().enumerate() {
        let outputs = load_system_jsonl(path)?;
        let scores = score_corpus(&outputs, &gold, &variants, stem)
            .with_context(|| format!("scoring {}", path.display()))?;
        if !scores.missing.is_empty() {
            eprintln!(
                "warning: {} has no output for {} gold sample(s); coverage {:.2}%",
                path.display(),
                scores.missing.len(),
                scores.coverage * 100.0
            );
        }
        if let Some(csv) = &args.per_sample_csv {
            write_file(csv, &report::per_sample_csv(&scores))?;
        }
        rows.push(ScoreRow {
            system: args.label.get(i).cloned().unwrap_or_else(|| file_stem(path)),
            coverage: scores.coverage,
            aggregates: scores.aggregate(args.resamples, args.seed)?,
        });
    }

    let body = report::render_scores(&rows, args.format.into());
    print!("{body}");
    if let Some(out) = &args.out {
        write_file(out, &body)?;
        let mut inputs: Vec<&Path> = args.system.iter().map(|p| p.as_path()).collect();
        inputs.push(&args.gold);
        RunManifest::new(
            "score",
            &inputs,
            json!({
                "variants": variants,
                "stem": stem,
                "resamples": args.resamples,
                "labels": rows.iter().map(|r| r.system.clone()).collect::<Vec<_>>(),
            }),
            vec![args.seed],
        )
        .write_sidecar(out)?;
    }
    Ok(())
}
