//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on invalid input or an exceeded size guard,
//! 3 on an internal consistency failure (a cross-check the underlying
//! mathematics guarantees came out false).

mod cache;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rootstrata::forests::{enumerate_forests, CellComplex, MarkedForest};
use rootstrata::morse::{
    collapse_pipeline, gamma_closed, length_band_family, refinement_closure, SubcomplexShape,
};
use rootstrata::partitions::NumberPartition;
use rootstrata::ppos::{build_p_poset, compare_beta0, counterexample_pair};
use rootstrata::quotient_oracle::oracle_sweep;
use rootstrata::sigma::{betti_sigma, verify_arnold};
use rootstrata::{Error, Guards};

use cache::{descriptor, Cache};

#[derive(Parser)]
#[command(
    name = "rootstrata",
    about = "Betti numbers of multiple-root strata via marked forests",
    version
)]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest Bell number the lattice oracle may touch.
    #[arg(long, global = true)]
    guard_bell: Option<u128>,
    /// Largest cell or chain enumeration.
    #[arg(long, global = true)]
    guard_forests: Option<u64>,
    /// Cache directory for sweep results (env: ROOTSTRATA_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PairArgs {
    /// Partition, comma-separated parts, e.g. 2,1,1,1.
    #[arg(long)]
    lambda: String,
    /// Coarsening of lambda, e.g. 5.
    #[arg(long)]
    mu: String,
}

#[derive(Subcommand)]
enum Command {
    /// Cell counts, Betti numbers, and Euler characteristic of one building
    /// block.
    BettiX {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        json: bool,
    },
    /// Aggregated Betti numbers of the compactified stratum for lambda.
    BettiSigma {
        #[arg(long)]
        lambda: String,
        /// Optional; must equal the sum of lambda's parts.
        #[arg(long)]
        n: Option<u32>,
        /// Assume every coarsening is join-reachable when n is too large to
        /// check.
        #[arg(long)]
        assume_reachable: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check the indicator pattern for all (k^m, 1^(n-km)) with n <= n_max.
    VerifyArnold {
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        json: bool,
    },
    /// Compare the forest model against the brute-force quotient oracle.
    OracleCheck {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Collapsibility certificate for a family complex.
    Collapse {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long, value_enum, default_value_t = Family::Arnold)]
        family: Family,
        /// JSON file with an array of partition strings; used with
        /// --family custom-file.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Ground total for the stanley and hanlon families.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate forests of one rank, or compute a boundary from JSON.
    Forests {
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        /// Read one forest (JSON) and print its boundary.
        #[arg(long)]
        boundary_of: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// The poset of bracketed partitions and its component count.
    PPoset {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        components: bool,
        #[arg(long)]
        list_elements: bool,
        #[arg(long)]
        json: bool,
    },
    /// The disconnected example at n = 23 with its cross-check.
    Counterexample {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// All coarsenings of lambda except the one-part partition.
    Arnold,
    /// Partitions of n with at least two and at most n-1 parts.
    Stanley,
    /// Partitions of n with at least three and at most n-1 parts.
    Hanlon,
    /// Read the family from --file.
    CustomFile,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rootstrata::configure_threads(t);
    }
    let mut guards = Guards::default();
    if let Some(b) = cli.guard_bell {
        guards.max_bell = b;
    }
    if let Some(f) = cli.guard_forests {
        guards.max_cells = f;
    }
    let cache_dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("ROOTSTRATA_CACHE_DIR").map(PathBuf::from));
    let cache = Cache::new(cache_dir);
    match run(cli.command, &guards, &cache) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::InvalidInput(_) | Error::GuardExceeded(_) => ExitCode::from(2),
                Error::Inconsistency(_) => ExitCode::from(3),
            }
        }
    }
}

fn parse_partition(s: &str) -> Result<NumberPartition, Error> {
    s.parse()
}

fn betti_table(betti: &Value) -> String {
    let mut out = String::from("  i   betti\n");
    if let Value::Object(map) = betti {
        let mut keys: Vec<i64> = map.keys().filter_map(|k| k.parse().ok()).collect();
        keys.sort_unstable();
        for k in keys {
            out.push_str(&format!("{:>3}   {}\n", k, map[&k.to_string()]));
        }
    }
    out
}

fn run(command: Command, guards: &Guards, cache: &Cache) -> Result<(), Error> {
    match command {
        Command::BettiX { pair, json } => {
            let lambda = parse_partition(&pair.lambda)?;
            let mu = parse_partition(&pair.mu)?;
            let cx = CellComplex::x_lambda_mu(&lambda, &mu, guards)?;
            let chain = cx.chain_complex()?;
            let betti = chain.reduced_betti()?;
            let report = json!({
                "f_vector": chain.f_vector(),
                "betti": serde_json::to_value(&betti).unwrap(),
                "euler": chain.euler_characteristic(),
            });
            if json {
                println!("{}", report);
            } else {
                println!("X for lambda = {}, mu = {}", lambda, mu);
                println!("f-vector: {:?}", chain.f_vector());
                println!("Euler characteristic: {}", chain.euler_characteristic());
                print!("{}", betti_table(&report["betti"]));
            }
            Ok(())
        }
        Command::BettiSigma {
            lambda,
            n,
            assume_reachable,
            json,
        } => {
            let lambda = parse_partition(&lambda)?;
            if let Some(n) = n {
                if n != lambda.n() {
                    return Err(Error::InvalidInput(format!(
                        "lambda = {} partitions {}, not {}",
                        lambda,
                        lambda.n(),
                        n
                    )));
                }
            }
            let report = betti_sigma(&lambda, guards, assume_reachable)?;
            if json {
                println!("{}", serde_json::to_value(&report).unwrap());
            } else {
                println!(
                    "stratum for lambda = {} (n = {}){}",
                    report.lambda,
                    report.n,
                    if report.reachability_assumed {
                        ", reachability assumed"
                    } else {
                        ""
                    }
                );
                let betti = serde_json::to_value(&report.betti).unwrap();
                print!("{}", betti_table(&betti));
            }
            Ok(())
        }
        Command::VerifyArnold { n_max, json } => {
            let desc = descriptor(
                "verify-arnold",
                &format!("n_max={}", n_max),
                guards.max_bell,
                guards.max_cells,
            );
            let payload = match cache.get(&desc) {
                Some(hit) => hit,
                None => {
                    let report = verify_arnold(n_max, guards)?;
                    let payload = serde_json::to_value(&report).unwrap().to_string();
                    cache.put(&desc, &payload);
                    payload
                }
            };
            if json {
                println!("{}", payload);
            } else {
                let report: Value = serde_json::from_str(&payload).unwrap();
                println!(
                    "all cases up to n = {}: {}",
                    n_max,
                    if report["all_ok"].as_bool() == Some(true) {
                        "ok"
                    } else {
                        "FAILED"
                    }
                );
                for case in report["cases"].as_array().into_iter().flatten() {
                    println!(
                        "  lambda = {:<16} expected dimension {:>2}: {}",
                        case["lambda"].as_str().unwrap_or("?"),
                        case["expected_dimension"],
                        if case["ok"].as_bool() == Some(true) {
                            "ok"
                        } else {
                            "FAILED"
                        }
                    );
                }
            }
            Ok(())
        }
        Command::OracleCheck { n, lambda, json } => {
            let filter = lambda.as_deref().map(parse_partition).transpose()?;
            let args = format!(
                "n={}|lambda={}",
                n,
                filter.as_ref().map_or(String::new(), |l| l.to_string())
            );
            let desc = descriptor("oracle-check", &args, guards.max_bell, guards.max_cells);
            let payload = match cache.get(&desc) {
                Some(hit) => hit,
                None => {
                    let reports = oracle_sweep(n, filter.as_ref(), guards)?;
                    let payload = serde_json::to_value(&reports).unwrap().to_string();
                    cache.put(&desc, &payload);
                    payload
                }
            };
            if json {
                println!("{}", payload);
            } else {
                let reports: Value = serde_json::from_str(&payload).unwrap();
                for r in reports.as_array().into_iter().flatten() {
                    println!(
                        "lambda = {:<16} mu = {:<12} reachable = {:<5} bijective = {:<5} betti_equal = {:<5} ok = {}",
                        r["lambda"].as_str().unwrap_or("?"),
                        r["mu"].as_str().unwrap_or("?"),
                        r["reachable"],
                        r["bijective"],
                        r["betti_equal"],
                        r["ok"]
                    );
                }
            }
            Ok(())
        }
        Command::Collapse {
            k,
            lambda,
            mu,
            family,
            file,
            n,
            json,
        } => {
            let lambda = lambda.as_deref().map(parse_partition).transpose()?;
            let (set, mu): (BTreeSet<NumberPartition>, NumberPartition) = match family {
                Family::Arnold => {
                    let lambda = lambda.ok_or_else(|| {
                        Error::InvalidInput("--family arnold needs --lambda".into())
                    })?;
                    let mu = match mu {
                        Some(m) => parse_partition(&m)?,
                        None => NumberPartition::single(lambda.n()),
                    };
                    (refinement_closure(&lambda), mu)
                }
                Family::Stanley | Family::Hanlon => {
                    let n = n.ok_or_else(|| {
                        Error::InvalidInput("this family needs --n".into())
                    })?;
                    let min_len = if family == Family::Stanley { 2 } else { 3 };
                    let mu = match mu {
                        Some(m) => parse_partition(&m)?,
                        None => NumberPartition::single(n),
                    };
                    (length_band_family(n, min_len, n as usize - 1), mu)
                }
                Family::CustomFile => {
                    let path = file.ok_or_else(|| {
                        Error::InvalidInput("--family custom-file needs --file".into())
                    })?;
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::InvalidInput(format!("cannot read {}: {}", path.display(), e))
                    })?;
                    let names: Vec<String> = serde_json::from_str(&text).map_err(|e| {
                        Error::InvalidInput(format!("bad family file: {}", e))
                    })?;
                    let set = names
                        .iter()
                        .map(|s| parse_partition(s))
                        .collect::<Result<BTreeSet<_>, _>>()?;
                    let mu = mu.ok_or_else(|| {
                        Error::InvalidInput("--family custom-file needs --mu".into())
                    })?;
                    (set, parse_partition(&mu)?)
                }
            };
            if !gamma_closed(&set, k)? {
                return Err(Error::InvalidInput(format!(
                    "family is not closed under splitting parts into {}'s and 1's",
                    k
                )));
            }
            let cert = collapse_pipeline(&set, &mu, k, guards)?;
            let shape = match cert.shape {
                SubcomplexShape::Simplex => "simplex",
                SubcomplexShape::Cone => "cone",
                SubcomplexShape::Empty => "empty",
            };
            let report = json!({
                "matched": cert.matched,
                "critical": cert.critical,
                "K": shape,
                "acyclic": cert.acyclic,
                "betti_zero": cert.betti_zero,
            });
            if json {
                println!("{}", report);
            } else {
                println!(
                    "collapse for mu = {} over a family of {} partitions (k = {})",
                    cert.mu, cert.family_size, k
                );
                println!("cells: {:?}", cert.cell_counts);
                println!(
                    "matched pairs: {}, critical cells: {}, K: {}, acyclic: {}, betti zero: {}",
                    cert.matched, cert.critical, shape, cert.acyclic, cert.betti_zero
                );
            }
            Ok(())
        }
        Command::Forests {
            lambda,
            mu,
            rank,
            boundary_of,
            json,
        } => {
            if let Some(path) = boundary_of {
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    Error::InvalidInput(format!("cannot read {}: {}", path.display(), e))
                })?;
                let forest: MarkedForest = serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidInput(format!("bad forest JSON: {}", e)))?;
                let boundary = forest.boundary();
                if json {
                    let terms: Vec<Value> = boundary
                        .iter()
                        .map(|(c, f)| {
                            json!({"coefficient": c, "forest": serde_json::to_value(f).unwrap()})
                        })
                        .collect();
                    println!("{}", Value::Array(terms));
                } else {
                    for (c, f) in &boundary {
                        println!("{:+}  {}", c, f.canonical_key());
                    }
                }
                return Ok(());
            }
            let (lambda, mu, rank) = match (lambda, mu, rank) {
                (Some(l), Some(m), Some(r)) => (parse_partition(&l)?, parse_partition(&m)?, r),
                _ => {
                    return Err(Error::InvalidInput(
                        "need --lambda, --mu and --rank (or --boundary-of)".into(),
                    ))
                }
            };
            if !lambda.refines(&mu)? {
                return Err(Error::InvalidInput(format!(
                    "{} does not refine {}",
                    lambda, mu
                )));
            }
            let forests = enumerate_forests(
                |t| lambda.refines(t).unwrap_or(false),
                &mu,
                rank,
                guards,
            )?;
            if json {
                println!("{}", serde_json::to_value(&forests).unwrap());
            } else {
                for f in &forests {
                    println!("{}", f.canonical_key());
                }
                println!("{} forests of rank {}", forests.len(), rank);
            }
            Ok(())
        }
        Command::PPoset {
            pair,
            components,
            list_elements,
            json,
        } => {
            let lambda = parse_partition(&pair.lambda)?;
            let mu = parse_partition(&pair.mu)?;
            let poset = build_p_poset(&lambda, &mu, guards)?;
            let beta0 = poset.beta0();
            if json {
                let mut report = json!({
                    "lambda": lambda.to_string(),
                    "mu": mu.to_string(),
                    "elements": poset.elements.len(),
                    "components": beta0,
                });
                if list_elements {
                    report["list"] = Value::Array(
                        poset
                            .elements
                            .iter()
                            .map(|e| Value::String(e.to_string()))
                            .collect(),
                    );
                }
                println!("{}", report);
            } else {
                println!(
                    "poset for lambda = {}, mu = {}: {} elements",
                    lambda,
                    mu,
                    poset.elements.len()
                );
                if components {
                    println!("connected components: {}", beta0);
                }
                if list_elements {
                    for e in &poset.elements {
                        println!("  {}", e);
                    }
                }
            }
            Ok(())
        }
        Command::Counterexample { json } => {
            let (lambda, mu) = counterexample_pair();
            let report = compare_beta0(&lambda, &mu, guards)?;
            let disconnected = report.p_components >= 2;
            if !disconnected {
                return Err(Error::Inconsistency(
                    "expected at least two components".into(),
                ));
            }
            if json {
                let value = json!({
                    "lambda": lambda.to_string(),
                    "mu": mu.to_string(),
                    "p_elements": report.p_elements,
                    "p_components": report.p_components,
                    "x_vertices": report.x_vertices,
                    "x_components": report.x_components,
                    "equal": report.equal,
                    "disconnected": disconnected,
                });
                println!("{}", value);
            } else {
                println!("lambda = {}, mu = {} (n = {})", lambda, mu, lambda.n());
                println!(
                    "bracketed-partition poset: {} elements, {} components",
                    report.p_elements, report.p_components
                );
                println!(
                    "forest model: {} vertices, {} components",
                    report.x_vertices, report.x_components
                );
                println!("component counts agree: {}", report.equal);
                println!("the space is disconnected: its reduced Betti number in degree 0 is nonzero");
            }
            Ok(())
        }
    }
}
