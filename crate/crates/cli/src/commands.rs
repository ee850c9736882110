use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use semcom_core::corpus::build_vocabulary;
use semcom_core::experiments::{
    avg_words, export_csv, mean_bleu, run_sweep, Experiment, PipelineConfig, TauResult,
};
use semcom_core::info::{verify_bound as explore_bound, GapSigns, DEFAULT_GAMMA};
use semcom_core::phy::{ber_theoretical, measure_ber};
use semcom_core::{ChannelConfig, Scheme};

use crate::config::{constraint, parse_scheme, pick, FileConfig, PipelineArgs, Source, SourceArgs};
use crate::CliError;

const DEFAULT_GRID: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
const DEFAULT_TAUS: [f64; 5] = [0.0, 0.3, 0.5, 0.7, 0.9];
const GAP_ZERO_TOL: f64 = 1e-12;

#[derive(Serialize)]
struct Resolved<'a> {
    source: &'a Source,
    pipeline: &'a PipelineConfig,
}

/// Writes the fully resolved settings of a command to stderr.
fn log_config<T: Serialize>(command: &str, cfg: &T) {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        command: &'a str,
        resolved: &'a T,
    }
    match toml::to_string(&Wrapped {
        command,
        resolved: cfg,
    }) {
        Ok(text) => eprint!("{text}"),
        Err(e) => eprintln!("# config not printable: {e}"),
    }
}

fn create_parent(path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    }
    Ok(())
}

fn schemes(arg: Option<String>, file: &FileConfig) -> Result<Vec<Scheme>, CliError> {
    let s = pick(arg, file.scheme.clone(), "BOTH".into());
    if s.eq_ignore_ascii_case("both") {
        Ok(vec![Scheme::Random, Scheme::Ordered])
    } else {
        Ok(vec![parse_scheme(&s)?])
    }
}

fn setup(
    file: &FileConfig,
    source: &SourceArgs,
    pipeline: &PipelineArgs,
) -> Result<(Source, PipelineConfig, Experiment), CliError> {
    let source = source.resolve(file);
    let cfg = pipeline.resolve(file)?;
    cfg.validate()?;
    let corpus = source.corpus()?;
    let base = source.base_kb()?;
    let exp = Experiment::new(&corpus, &base, &cfg)?;
    Ok((source, cfg, exp))
}

pub fn ingest(source: &Source, out: &Path) -> Result<(), CliError> {
    log_config("ingest", source);
    let corpus = source.corpus()?;
    let vocab = build_vocabulary(&corpus);
    create_parent(out)?;
    let mut w = csv::Writer::from_path(out).map_err(|e| CliError::input(e.to_string()))?;
    w.write_record(["word", "count"])
        .map_err(|e| CliError::input(e.to_string()))?;
    for word in vocab.by_frequency() {
        w.write_record([word, &vocab.count(word).to_string()])
            .map_err(|e| CliError::input(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::input(e.to_string()))?;
    println!(
        "sentences={} tokens={} vocabulary={} mean_len={:.4}",
        corpus.len(),
        corpus.total_tokens(),
        vocab.len(),
        corpus.mean_sentence_len()
    );
    Ok(())
}

pub fn train(
    file: &FileConfig,
    source: &SourceArgs,
    pipeline: &PipelineArgs,
    scheme: Option<String>,
    rho: Option<f64>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let (source, mut cfg, exp) = setup(file, source, pipeline)?;
    cfg.scheme = parse_scheme(&pick(scheme, file.scheme.clone(), "BASE".into()))?;
    cfg.rho = pick(rho, file.rho, 0.0);
    cfg.validate()?;
    log_config(
        "train",
        &Resolved {
            source: &source,
            pipeline: &cfg,
        },
    );

    let kb = exp.knowledge_base(cfg.scheme, cfg.rho, cfg.seed, 0)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::input(format!("{}: {e}", out_dir.display())))?;
    exp.lm.save(&out_dir.join("lm.txt"))?;
    kb.save(&out_dir.join("kb.json"))?;
    let refs = exp.transmitter_references(&kb, &cfg)?;
    let path = out_dir.join("xhat.txt");
    let mut f =
        fs::File::create(&path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    for r in &refs {
        writeln!(f, "{r}").map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    println!(
        "train_sentences={} kb_size={} references={}",
        exp.train.len(),
        kb.len(),
        refs.len()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    file: &FileConfig,
    source: &SourceArgs,
    pipeline: &PipelineArgs,
    scheme: Option<String>,
    rho: Option<f64>,
    full_baseline: bool,
    out: &Path,
) -> Result<(), CliError> {
    let (source, mut cfg, exp) = setup(file, source, pipeline)?;
    cfg.scheme = parse_scheme(&pick(scheme, file.scheme.clone(), "ORDERED".into()))?;
    cfg.rho = pick(rho, file.rho, 0.0);
    cfg.full_baseline = full_baseline;
    cfg.validate()?;
    log_config(
        "run",
        &Resolved {
            source: &source,
            pipeline: &cfg,
        },
    );

    let kb = if cfg.full_baseline {
        exp.full_kb()?
    } else {
        exp.knowledge_base(cfg.scheme, cfg.rho, cfg.seed, 0)?
    };
    let results = exp.evaluate(&kb, &cfg, 0, 0)?;
    create_parent(out)?;
    export_csv(&results, out)?;
    let b = mean_bleu(&results)?;
    println!(
        "sentences={} kb_size={} w_bar={:.6} bleu1={:.6} bleu2={:.6} bleu3={:.6} bleu4={:.6}",
        results.len(),
        kb.len(),
        avg_words(&results)?,
        b[0],
        b[1],
        b[2],
        b[3]
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn sweep(
    file: &FileConfig,
    source: &SourceArgs,
    pipeline: &PipelineArgs,
    scheme: Option<String>,
    rho_grid: Option<Vec<f64>>,
    seeds: Option<usize>,
    out: &Path,
) -> Result<(), CliError> {
    let (source, mut cfg, exp) = setup(file, source, pipeline)?;
    let schemes = schemes(scheme, file)?;
    let grid = pick(rho_grid, file.rho_grid.clone(), DEFAULT_GRID.to_vec());
    cfg.seed_count = pick(seeds, file.seeds, cfg.seed_count);
    cfg.validate()?;

    #[derive(Serialize)]
    struct Resolved<'a> {
        source: &'a Source,
        schemes: Vec<String>,
        rho_grid: &'a [f64],
        pipeline: &'a PipelineConfig,
    }
    log_config(
        "sweep",
        &Resolved {
            source: &source,
            schemes: schemes.iter().map(Scheme::to_string).collect(),
            rho_grid: &grid,
            pipeline: &cfg,
        },
    );

    let mut points = Vec::new();
    for &s in &schemes {
        points.extend(run_sweep(&exp, s, &grid, &cfg)?.curve()?);
    }
    create_parent(out)?;
    export_csv(&points, out)?;
    for p in &points {
        println!(
            "scheme={} rho={} w_bar={:.6} bleu1={:.6} bleu2={:.6} bleu3={:.6} bleu4={:.6}",
            p.scheme,
            p.rho,
            p.w_bar,
            p.mean_bleu[0],
            p.mean_bleu[1],
            p.mean_bleu[2],
            p.mean_bleu[3]
        );
    }
    Ok(())
}

pub struct OptimizeArgs {
    pub tau: Option<Vec<f64>>,
    pub scheme: Option<String>,
    pub rho_grid: Option<Vec<f64>>,
    pub seeds: Option<usize>,
    pub satisfaction: Option<f64>,
    pub bleu_order: Option<usize>,
}

pub fn optimize(
    file: &FileConfig,
    source: &SourceArgs,
    pipeline: &PipelineArgs,
    args: OptimizeArgs,
    out: &Path,
) -> Result<(), CliError> {
    let (source, mut cfg, exp) = setup(file, source, pipeline)?;
    let schemes = schemes(args.scheme, file)?;
    let grid = pick(args.rho_grid, file.rho_grid.clone(), DEFAULT_GRID.to_vec());
    let taus = pick(args.tau, file.tau.clone(), DEFAULT_TAUS.to_vec());
    let policy = constraint(
        pick(args.satisfaction, file.satisfaction, 1.0),
        pick(args.bleu_order, file.bleu_order, 1),
    );
    cfg.seed_count = pick(args.seeds, file.seeds, cfg.seed_count);
    cfg.validate()?;
    if taus.is_empty() {
        return Err(CliError::usage("tau list is empty"));
    }

    #[derive(Serialize)]
    struct Resolved<'a> {
        source: &'a Source,
        schemes: Vec<String>,
        tau: &'a [f64],
        rho_grid: &'a [f64],
        constraint: semcom_core::experiments::ConstraintPolicy,
        pipeline: &'a PipelineConfig,
    }
    log_config(
        "optimize",
        &Resolved {
            source: &source,
            schemes: schemes.iter().map(Scheme::to_string).collect(),
            tau: &taus,
            rho_grid: &grid,
            constraint: policy,
            pipeline: &cfg,
        },
    );

    let mut rows: Vec<TauResult> = Vec::new();
    for &s in &schemes {
        let sweep = run_sweep(&exp, s, &grid, &cfg)?;
        for &tau in &taus {
            rows.push(sweep.min_words_for_tau(tau, &policy)?);
        }
    }
    create_parent(out)?;
    export_csv(&rows, out)?;
    for r in &rows {
        let fmt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x}"));
        println!(
            "scheme={} tau={} feasible={} rho_star={} w_bar={} satisfaction_rate={:.6}",
            r.scheme,
            r.tau,
            r.feasible,
            fmt(r.rho_star),
            fmt(r.w_bar),
            r.satisfaction_rate
        );
    }
    let infeasible: Vec<String> = rows
        .iter()
        .filter(|r| !r.feasible)
        .map(|r| format!("{}@{}", r.scheme, r.tau))
        .collect();
    if infeasible.is_empty() {
        Ok(())
    } else {
        Err(CliError::infeasible(format!(
            "no grid rho meets tau for {}",
            infeasible.join(",")
        )))
    }
}

pub fn verify_bound(
    file: &FileConfig,
    trials: Option<usize>,
    support: Option<usize>,
    gamma: Option<f64>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Resolved {
        trials: usize,
        support: usize,
        gamma: f64,
        seed: u64,
    }
    let r = Resolved {
        trials: pick(trials, file.trials, 1000),
        support: pick(support, file.support, 8),
        gamma: pick(gamma, file.gamma, DEFAULT_GAMMA),
        seed: pick(seed, file.seed, 0),
    };
    log_config("verify-bound", &r);
    let reports = explore_bound(r.trials, r.support, r.gamma, r.seed)?;
    create_parent(out)?;
    export_csv(&reports, out)?;
    let signs = GapSigns::tally(&reports, GAP_ZERO_TOL);
    let max_identity = reports
        .iter()
        .map(|r| r.identity_error().abs())
        .fold(0.0, f64::max);
    println!(
        "trials={} gap_negative={} gap_zero={} gap_positive={} max_identity_error={:.3e}",
        reports.len(),
        signs.negative,
        signs.zero,
        signs.positive,
        max_identity
    );
    Ok(())
}

pub fn channel_test(
    file: &FileConfig,
    snr_db: Option<f64>,
    bits: Option<u64>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let d = ChannelConfig::default();
    let ch = ChannelConfig {
        snr_db: pick(snr_db, file.snr_db, d.snr_db),
        gain: pick(None, file.gain, d.gain),
        seed: pick(seed, file.seed, 0),
    };
    let bits = pick(bits, file.bits, 1_000_000);
    if bits == 0 {
        return Err(CliError::usage("bits must be at least 1"));
    }
    #[derive(Serialize)]
    struct Resolved<'a> {
        channel: &'a ChannelConfig,
        bits: u64,
    }
    log_config("channel-test", &Resolved { channel: &ch, bits });

    let m = measure_ber(&ch, bits)?;
    let theory = ber_theoretical(&ch);
    let rel = if theory > 0.0 {
        (m.rate() - theory).abs() / theory
    } else {
        m.rate()
    };
    println!(
        "snr_db={} bits={} errors={} ber_empirical={:.6e} ber_theoretical={:.6e} rel_diff={:.4}",
        ch.snr_db,
        m.bits,
        m.errors,
        m.rate(),
        theory,
        rel
    );
    if let Some(out) = out {
        create_parent(out)?;
        let mut w = csv::Writer::from_path(out).map_err(|e| CliError::input(e.to_string()))?;
        let rows = [
            vec![
                "snr_db",
                "bits",
                "errors",
                "ber_empirical",
                "ber_theoretical",
                "rel_diff",
            ]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>(),
            vec![
                ch.snr_db.to_string(),
                m.bits.to_string(),
                m.errors.to_string(),
                m.rate().to_string(),
                theory.to_string(),
                rel.to_string(),
            ],
        ];
        for row in rows {
            w.write_record(&row)
                .map_err(|e| CliError::input(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::input(e.to_string()))?;
    }
    Ok(())
}
