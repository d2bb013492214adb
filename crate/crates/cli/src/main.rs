//! Command-line front end: group construction, one-off sumset computation,
//! theorem verifiers, critical-pair searches, and the nonabelian witness
//! reproduction.
//!
//! Exit status: 0 on success with no findings, 1 on usage or precondition
//! errors (diagnostic on stderr, nothing on stdout), 2 when a verifier
//! reports findings (violations, counterexamples, or classification
//! failures) — the report still goes to stdout.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use critpair_core::report::critical_pairs_csv;
use critpair_core::search::{self, CommutativityCandidates, Normalization, SearchMode, SearchTask};
use critpair_core::{
    AutSpec, Automorphism, BoundKind, Caps, FiniteGroup, GroupSpec, Subset, VerificationReport,
};

#[derive(Parser)]
#[command(
    name = "critpair",
    about = "Exact sumset bounds and critical-pair structure in finite groups",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    /// Emit the canonical JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Worker threads for the search verifiers (default: rayon's choice).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Raise every soft resource cap to at least this value.
    #[arg(long, global = true, value_name = "N")]
    cap_override: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Inspect a group built from a construction descriptor.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Compute a product set or restricted product set.
    Sumset(SumsetArgs),
    /// Run a theorem verifier.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Enumerate and classify critical pairs.
    Search {
        #[command(subcommand)]
        cmd: SearchCmd,
    },
    /// Reproduce a named worked example.
    Example {
        /// Example name (available: eh-nonabelian).
        name: String,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Print order, minimal torsion, and structure facts.
    Info {
        #[arg(long, value_name = "SPEC")]
        group: String,
    },
}

#[derive(Args)]
struct SumsetArgs {
    #[arg(long, value_name = "SPEC")]
    group: String,
    /// Subset literal: indices "0,1,2", tuples "[[0,0],1];[[1,0],1]", or hex "0x7".
    #[arg(long, value_name = "SET")]
    a: String,
    #[arg(long, value_name = "SET")]
    b: String,
    /// Restrict to pairs with a != b.
    #[arg(long)]
    restricted: bool,
    /// Automorphism applied to the right-hand side (restricted products).
    #[arg(long, value_name = "SPEC")]
    theta: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(alias = "all_pairs")]
    AllPairs,
    #[value(alias = "ap_pairs_same_difference", alias = "ap-same-difference")]
    ApPairsSameDifference,
    #[value(alias = "geometric_pairs_same_ratio", alias = "geometric-same-ratio")]
    GeometricPairsSameRatio,
    #[value(alias = "self_pairs")]
    SelfPairs,
    #[value(alias = "supplied_candidates", alias = "supplied")]
    SuppliedCandidates,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> SearchMode {
        match m {
            ModeArg::AllPairs => SearchMode::AllPairs,
            ModeArg::ApPairsSameDifference => SearchMode::ApPairsSameDifference,
            ModeArg::GeometricPairsSameRatio => SearchMode::GeometricPairsSameRatio,
            ModeArg::SelfPairs => SearchMode::SelfPairs,
            ModeArg::SuppliedCandidates => SearchMode::SuppliedCandidates,
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    /// Group construction descriptor (JSON).
    #[arg(long, value_name = "SPEC")]
    group: Option<String>,
    /// Automorphism descriptor (JSON); identity by default.
    #[arg(long, value_name = "SPEC")]
    theta: Option<String>,
    /// Enumeration mode.
    #[arg(long, value_enum, default_value = "all-pairs")]
    mode: ModeArg,
    /// |A| as a single size "3" or inclusive range "2..5".
    #[arg(long, value_name = "INT|RANGE")]
    k: Option<String>,
    /// |B| as a single size or inclusive range.
    #[arg(long, value_name = "INT|RANGE")]
    l: Option<String>,
    /// Shard as INDEX/TOTAL, e.g. 0/4.
    #[arg(long, value_name = "I/T")]
    shard: Option<String>,
    /// Affine normalization (cyclic groups, identity map only).
    #[arg(long)]
    normalize: bool,
    /// Candidate pair for supplied mode: set literal for A.
    #[arg(long, value_name = "SET")]
    a: Option<String>,
    /// Candidate pair for supplied mode: set literal for B.
    #[arg(long, value_name = "SET")]
    b: Option<String>,
    /// Full task descriptor (JSON); overrides the other flags.
    #[arg(long, value_name = "JSON")]
    task: Option<String>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Unrestricted product bound min(p(G), |A|+|B|-1).
    Cd(ScanArgs),
    /// Restricted product bound min(p(G)-delta, |A|+|B|-3).
    Eh(ScanArgs),
    /// Composite-modulus sum bound under the unit side condition.
    Chowla {
        #[arg(long)]
        n: u64,
        #[arg(long, value_name = "I/T")]
        shard: Option<String>,
    },
    /// Classify every unrestricted-product critical pair in Z/p.
    Vosper {
        #[arg(long)]
        p: u64,
    },
    /// Criticality iff progression for k-subsets of Z/p.
    InverseDh {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, value_name = "I/T")]
        shard: Option<String>,
    },
    /// Same-difference progression pairs: critical implies A = B.
    Thm51 {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, value_name = "I/T")]
        shard: Option<String>,
    },
    /// Same-ratio geometric pairs: critical implies shared endpoints.
    Thm61 {
        #[arg(long, value_name = "SPEC")]
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        /// Ratio candidates as element literals (default: derived slice).
        #[arg(long = "q", value_name = "ELEM")]
        q: Vec<String>,
        #[arg(long, value_name = "N")]
        max_triples: Option<u64>,
        #[arg(long, value_name = "I/T")]
        shard: Option<String>,
    },
    /// Commutativity of restricted-critical sets.
    Dupan {
        #[arg(long, value_name = "SPEC")]
        group: String,
        /// Candidate set literals (repeatable).
        #[arg(long = "candidate", value_name = "SET")]
        candidates: Vec<String>,
        /// Sample this many random sets instead.
        #[arg(long, value_name = "N")]
        samples: Option<u64>,
        /// Size of sampled sets.
        #[arg(long, value_name = "K", default_value_t = 4)]
        size: usize,
        #[arg(long, value_name = "SEED", default_value_t = 1)]
        seed: u64,
    },
    /// Olson inequality with the stabilizer fallback.
    Olson(ScanArgs),
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Enumerate critical pairs and classify each one.
    Critical {
        #[command(flatten)]
        scan: ScanArgs,
        /// Which bound defines criticality.
        #[arg(long, value_enum, default_value = "cd")]
        bound: BoundArg,
        /// Write enumerated critical pairs as CSV.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Cd,
    Eh,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; route usage errors to stderr
            // with exit status 1, keep --help/--version on stdout with 0
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    eprint!("{e}");
                    std::process::exit(1);
                }
            }
        }
    };
    if let Some(n) = cli.workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn run(cli: &Cli) -> Result<i32, critpair_core::Error> {
    let caps = match cli.cap_override {
        Some(v) => Caps::default().with_override(v),
        None => Caps::default(),
    };
    match &cli.cmd {
        Cmd::Group {
            cmd: GroupCmd::Info { group },
        } => {
            let spec = GroupSpec::from_json(group)?;
            let g = FiniteGroup::from_spec_with(&spec, caps)?;
            let p = g
                .p_of_g()
                .map(|p| serde_json::json!(p))
                .unwrap_or(serde_json::json!("infinity"));
            let center = g.center().map(|c| c.len()).ok();
            let nilpotent = g.is_nilpotent().ok();
            let abelian = center.map(|c| c as u64 == g.order());
            let value = serde_json::json!({
                "order": g.order(),
                "p_of_g": p,
                "identity": g.format_element(0),
                "center_size": center,
                "abelian": abelian,
                "nilpotent": nilpotent,
                "spec": spec,
            });
            let text = format!(
                "order: {}\np(G): {}\nidentity: {}\ncenter size: {}\nabelian: {}\nnilpotent: {}\n",
                g.order(),
                g.p_of_g().map(|p| p.to_string()).unwrap_or("infinity".into()),
                g.format_element(0),
                opt_str(&center),
                opt_str(&abelian),
                opt_str(&nilpotent),
            );
            emit(cli, &value, &text)?;
            Ok(0)
        }
        Cmd::Sumset(args) => {
            let spec = GroupSpec::from_json(&args.group)?;
            let g = FiniteGroup::from_spec_with(&spec, caps)?;
            let a = Subset::parse(&g, &args.a)?;
            let b = Subset::parse(&g, &args.b)?;
            let result = if args.restricted {
                let theta_spec = match &args.theta {
                    Some(t) => AutSpec::from_json(t)?,
                    None => AutSpec::identity(),
                };
                let theta = Automorphism::new(&g, &theta_spec)?;
                critpair_core::sumset::restricted_product_set(&a, &b, &theta)?
            } else {
                critpair_core::sumset::product_set(&a, &b)?
            };
            let flat = g.is_cyclic_repr() || g.is_table_repr();
            let elems: Vec<serde_json::Value> = result
                .indices()
                .iter()
                .map(|&i| {
                    if flat {
                        serde_json::json!(i)
                    } else {
                        serde_json::json!(g.format_element(i))
                    }
                })
                .collect();
            let value = serde_json::json!({
                "result": elems,
                "size": result.len(),
                "restricted": args.restricted,
            });
            let listing = if flat {
                result.format_flat()
            } else {
                result.format_elements()
            };
            let text = format!("result: {listing}\nsize: {}\n", result.len());
            emit(cli, &value, &text)?;
            Ok(0)
        }
        Cmd::Verify { cmd } => {
            let report = match cmd {
                VerifyCmd::Cd(scan) => search::verify_cd_bound(&build_task(scan)?, caps)?,
                VerifyCmd::Eh(scan) => search::verify_eh_bound(&build_task(scan)?, caps)?,
                VerifyCmd::Olson(scan) => search::verify_olson(&build_task(scan)?, caps)?,
                VerifyCmd::Chowla { n, shard } => {
                    search::verify_chowla(*n, parse_shard(shard.as_deref())?, caps)?
                }
                VerifyCmd::Vosper { p } => {
                    let task = SearchTask::new(GroupSpec::Cyclic(*p));
                    let (report, _records) =
                        search::enumerate_critical_pairs(&task, caps, BoundKind::Cd)?;
                    report
                }
                VerifyCmd::InverseDh { p, k, shard } => search::verify_criticality_iff_progression(
                    *p,
                    *k,
                    parse_shard(shard.as_deref())?,
                    caps,
                )?,
                VerifyCmd::Thm51 { n, k, l, shard } => search::verify_ap_critical_equality(
                    *n,
                    *k,
                    *l,
                    parse_shard(shard.as_deref())?,
                    caps,
                )?,
                VerifyCmd::Thm61 {
                    group,
                    k,
                    l,
                    q,
                    max_triples,
                    shard,
                } => {
                    let spec = GroupSpec::from_json(group)?;
                    let qs = if q.is_empty() { None } else { Some(q.as_slice()) };
                    search::verify_geometric_critical_endpoints(
                        &spec,
                        *k,
                        *l,
                        qs,
                        *max_triples,
                        parse_shard(shard.as_deref())?,
                        caps,
                    )?
                }
                VerifyCmd::Dupan {
                    group,
                    candidates,
                    samples,
                    size,
                    seed,
                } => {
                    let spec = GroupSpec::from_json(group)?;
                    let source = match samples {
                        Some(count) => CommutativityCandidates::Sampled {
                            count: *count,
                            size: *size,
                            seed: *seed,
                        },
                        None => CommutativityCandidates::Supplied(candidates.clone()),
                    };
                    search::verify_critical_commutativity(&spec, source, caps)?
                }
            };
            emit_report(cli, &report)
        }
        Cmd::Search {
            cmd: SearchCmd::Critical { scan, bound, csv },
        } => {
            let task = build_task(scan)?;
            let kind = match bound {
                BoundArg::Cd => BoundKind::Cd,
                BoundArg::Eh => BoundKind::Eh,
            };
            let (report, records) = search::enumerate_critical_pairs(&task, caps, kind)?;
            if let Some(path) = csv {
                std::fs::write(path, critical_pairs_csv(&records))
                    .map_err(|e| critpair_core::Error::InvalidSpec(format!("cannot write csv: {e}")))?;
            }
            emit_report(cli, &report)
        }
        Cmd::Example { name } => {
            if name != "eh-nonabelian" {
                return Err(critpair_core::Error::InvalidSpec(format!(
                    "unknown example \"{name}\" (available: eh-nonabelian)"
                )));
            }
            let report = search::reproduce_eh_nonabelian(caps)?;
            emit_report(cli, &report)
        }
    }
}

fn opt_str<T: std::fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "unknown (cap exceeded)".into(),
    }
}

fn build_task(scan: &ScanArgs) -> Result<SearchTask, critpair_core::Error> {
    if let Some(json) = &scan.task {
        return SearchTask::from_json(json);
    }
    let group = scan.group.as_ref().ok_or_else(|| {
        critpair_core::Error::InvalidSpec("--group (or --task) is required".into())
    })?;
    let mut task = SearchTask::new(GroupSpec::from_json(group)?);
    if let Some(theta) = &scan.theta {
        task = task.with_theta(AutSpec::from_json(theta)?);
    }
    task = task.with_mode(scan.mode.into());
    if scan.k.is_some() || scan.l.is_some() {
        let k = parse_range(scan.k.as_deref())?;
        let l = parse_range(scan.l.as_deref())?;
        task = task.with_cardinalities(k, l);
    }
    if let Some(shard) = &scan.shard {
        let [i, t] = parse_shard(Some(shard))?;
        task = task.with_shard(i, t);
    }
    if scan.normalize {
        task = task.with_normalization(Normalization::Affine);
    }
    if matches!(task.mode, SearchMode::SuppliedCandidates) {
        let (a, b) = match (&scan.a, &scan.b) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => {
                return Err(critpair_core::Error::InvalidSpec(
                    "supplied mode needs --a and --b".into(),
                ))
            }
        };
        task.candidates = vec![[a, b]];
    }
    Ok(task)
}

fn parse_range(text: Option<&str>) -> Result<[usize; 2], critpair_core::Error> {
    let text = match text {
        Some(t) => t,
        None => return Ok([1, usize::MAX]),
    };
    let bad = || critpair_core::Error::InvalidSpec(format!("bad size range \"{text}\""));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        Ok([lo, hi])
    } else {
        let v: usize = text.trim().parse().map_err(|_| bad())?;
        if v == 0 {
            return Err(bad());
        }
        Ok([v, v])
    }
}

fn parse_shard(text: Option<&str>) -> Result<[u64; 2], critpair_core::Error> {
    let text = match text {
        Some(t) => t,
        None => return Ok([0, 1]),
    };
    let bad = || critpair_core::Error::InvalidSpec(format!("bad shard \"{text}\" (want I/T)"));
    let (i, t) = text.split_once('/').ok_or_else(bad)?;
    let i: u64 = i.trim().parse().map_err(|_| bad())?;
    let t: u64 = t.trim().parse().map_err(|_| bad())?;
    if t == 0 || i >= t {
        return Err(bad());
    }
    Ok([i, t])
}

fn emit(cli: &Cli, value: &serde_json::Value, text: &str) -> Result<(), critpair_core::Error> {
    let rendered = if cli.json {
        format!("{}\n", serde_json::to_string_pretty(value).expect("serializes"))
    } else {
        text.to_string()
    };
    print!("{rendered}");
    if let Some(path) = &cli.out {
        let mut f = std::fs::File::create(path)
            .map_err(|e| critpair_core::Error::InvalidSpec(format!("cannot write {path:?}: {e}")))?;
        f.write_all(rendered.as_bytes())
            .map_err(|e| critpair_core::Error::InvalidSpec(format!("cannot write {path:?}: {e}")))?;
    }
    Ok(())
}

fn emit_report(cli: &Cli, report: &VerificationReport) -> Result<i32, critpair_core::Error> {
    emit(cli, &report.to_json_value(), &report.render_text())?;
    Ok(exit_code_for(report))
}

fn exit_code_for(report: &VerificationReport) -> i32 {
    if report.has_findings() {
        2
    } else {
        0
    }
}
