use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ch0kit::cache::GbCache;
use ch0kit::campaign::{self, CampaignError, Params};
use ch0kit::groebner::{Budget, Engine};
use ch0kit::instances::DEFAULT_RETRIES;

const DEFAULT_CACHE_DIR: &str = ".ch0kit-cache";

#[derive(Parser)]
#[command(name = "ch0kit", version, about = "Exact checks for blowup resolutions, Galois lattices and CH0 certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named campaign: appendix-a, appendix-c, padic-cubic or am-instance.
    Verify {
        campaign: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Singular scheme and ODP report for a hypersurface JSON file.
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    Instances {
        #[command(subcommand)]
        action: InstancesCmd,
    },
}

#[derive(Subcommand)]
enum InstancesCmd {
    /// Write the named instances as JSON (one file per instance with --out <dir>).
    Export {
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args, Clone, Default)]
struct Opts {
    /// qq, fp:<p> or fq:<p>:<k>
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Candidate draws allowed when constructing the Artin-Mumford forms.
    #[arg(long)]
    retries: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    no_cache: bool,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Fully resolved settings.
struct Settings {
    field: Option<String>,
    seed: u64,
    retries: usize,
    out: Option<PathBuf>,
    jobs: usize,
    cache: Option<GbCache>,
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CampaignError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CampaignError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CampaignError::Config(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        let key = k.trim().replace('_', "-");
        if !["field", "seed", "retries", "out", "jobs", "no-cache", "cache-dir"].contains(&key.as_str()) {
            return Err(CampaignError::Config(format!("{}:{}: unknown key {key:?}", path.display(), i + 1)));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CampaignError> {
    v.parse().map_err(|_| CampaignError::Config(format!("{key}: not a number: {v:?}")))
}

fn resolve(opts: &Opts) -> Result<Settings, CampaignError> {
    let cfg = match &opts.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let get = |k: &str| cfg.get(k).map(String::as_str);
    let seed = match (opts.seed, get("seed")) {
        (Some(s), _) => s,
        (None, Some(v)) => parse_num("seed", v)?,
        _ => Params::default().seed,
    };
    let retries = match (opts.retries, get("retries")) {
        (Some(r), _) => r,
        (None, Some(v)) => parse_num("retries", v)?,
        _ => DEFAULT_RETRIES,
    };
    let jobs = match (opts.jobs, get("jobs")) {
        (Some(j), _) => j,
        (None, Some(v)) => parse_num("jobs", v)?,
        _ => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    if jobs == 0 {
        return Err(CampaignError::Config("jobs must be at least 1".into()));
    }
    let no_cache = opts.no_cache
        || match get("no-cache") {
            Some("true") | Some("1") | Some("yes") => true,
            Some("false") | Some("0") | Some("no") | None => false,
            Some(other) => return Err(CampaignError::Config(format!("no-cache: expected true or false, got {other:?}"))),
        };
    let cache = if no_cache {
        None
    } else {
        Some(match (&opts.cache_dir, get("cache-dir")) {
            (Some(d), _) => GbCache::new(d),
            (None, Some(d)) => GbCache::new(d),
            _ => GbCache::from_env_or(DEFAULT_CACHE_DIR),
        })
    };
    let field = opts.field.clone().or_else(|| get("field").map(String::from));
    if let Some(f) = &field {
        campaign::parse_field(f)?;
    }
    Ok(Settings {
        field,
        seed,
        retries,
        out: opts.out.clone().or_else(|| get("out").map(PathBuf::from)),
        jobs,
        cache,
    })
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CampaignError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CampaignError::Config(format!("thread pool: {e}")))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CampaignError> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run_report(name: &str, path: Option<PathBuf>, opts: &Opts) -> Result<i32, CampaignError> {
    let s = resolve(opts)?;
    let engine = Engine::new(Budget::default(), s.cache.clone());
    let params = Params { field: s.field.clone(), seed: s.seed, retries: s.retries, path, jobs: s.jobs };
    let report = pool(s.jobs)?.install(|| campaign::run_campaign(name, &params, &engine))?;
    write_out(s.out.as_deref(), &report.to_pretty())?;
    for c in &report.claims {
        eprintln!("{:<14} {}", serde_json::to_value(c.status).unwrap().as_str().unwrap_or("?"), c.id);
    }
    Ok(report.exit_code())
}

fn export(opts: &Opts) -> Result<i32, CampaignError> {
    let s = resolve(opts)?;
    let engine = Engine::new(Budget::default(), s.cache.clone());
    let list = pool(s.jobs)?.install(|| campaign::export_instances(&engine, s.field.as_deref(), s.seed, s.retries))?;
    match &s.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for inst in &list {
                let text = serde_json::to_string_pretty(&inst.to_json()).unwrap() + "\n";
                let path = dir.join(format!("{}.json", inst.tag.name()));
                std::fs::write(&path, text)?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let all: Vec<_> = list.iter().map(|i| i.to_json()).collect();
            println!("{}", serde_json::to_string_pretty(&all).unwrap());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { campaign, opts } => {
            if campaign == "analyze" {
                Err(CampaignError::Config("use `ch0kit analyze <path>`".into()))
            } else {
                run_report(campaign, None, opts)
            }
        }
        Command::Analyze { path, opts } => run_report("analyze", Some(path.clone()), opts),
        Command::Instances { action: InstancesCmd::Export { opts } } => export(opts),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
