//! `hcube`: searches, verifications and tables for hypercube intersection
//! sizes.
//!
//! Exit status: 0 when everything passed, 1 when a verification failed, 2 on
//! usage or input errors.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hypercube_sections::codim1::{codim1_table, large_codim1_sizes, SignCount};
use hypercube_sections::cube::{evaluate_pattern_with, oracle_enumerate, LinearMap, DEFAULT_ORACLE_BUDGET};
use hypercube_sections::rational::{format_fraction, parse_rational};
use hypercube_sections::report::{json_document, tsv_document, Report};
use hypercube_sections::search::{bfs_search_with, final_shapes, Mode, SearchConfig};
use hypercube_sections::shape::{canonical_form, classify_star, max_intersection_with, shape_fraction, Shape};
use hypercube_sections::theorems::{
    antichain_bound_check, h_n_window, ints_window_check, lemma_small_bound_sweep, sum_of_powers_members,
    verify_large_sets, verify_small_window, VERIFY_MAX_K,
};
use hypercube_sections::{Exec, Rational};
use serde_json::json;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "hcube", version, about = "Exact intersection sizes of subspaces with the hypercube")]
struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size tables from closed forms.
    #[command(subcommand)]
    Sizes(SizesCmd),
    /// Breadth-first shape search.
    Search(SearchArgs),
    /// End-to-end verification reports.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Size windows assembled from constructions.
    #[command(subcommand)]
    Window(WindowCmd),
    /// Brute-force evaluation and enumeration.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Canonical form, star class and best sign assignment of one shape.
    Shape(ShapeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand, Debug)]
enum SizesCmd {
    /// Without --k: the (a,b,t) table of full-support rows strictly between
    /// half and all of their cube. With --k: the sizes above 2^(k-1) of
    /// one-row maps on k coordinates.
    Codim1 {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 7)]
        max_support: usize,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    mode: Mode,
    #[arg(long)]
    k: usize,
    /// Exclusive lower bound on the shape fraction, as p/q (default 1/2 for
    /// large, 15/32 for small).
    #[arg(long, value_parser = parse_fraction)]
    threshold: Option<Rational>,
    /// Deepest level, in edges (default k - 1).
    #[arg(long)]
    max_edges: Option<usize>,
    /// Keep every derivation instead of merging isomorphic shapes.
    #[arg(long)]
    no_dedupe: bool,
    #[arg(long)]
    node_budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// The chain H+(k+i, k), i = 1..n_max-k.
    Large {
        /// A dimension or an inclusive range such as 6..8.
        #[arg(long, value_parser = parse_range)]
        k: RangeInclusive<usize>,
        /// Largest n (default 2k).
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// The window just below half the cube.
    Small {
        #[arg(long)]
        k: usize,
    },
    /// Four-antichain bound on random subset-sum instances.
    Antichain {
        #[arg(long, value_parser = parse_range)]
        ell: RangeInclusive<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Restriction monotonicity and the non-redundant last-row bound.
    Reduction {
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
    },
    /// Maps with entries outside {-1,0,1} avoid the window below half.
    Ints {
        #[arg(long, value_parser = parse_range)]
        k: RangeInclusive<usize>,
        /// Comma-separated entries, each an integer or p/q.
        #[arg(long, default_value = "-2,-1,-1/2,0,1/2,1,2", allow_hyphen_values = true)]
        entries: String,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Membership of a sum of distinct powers of two.
    Powers {
        #[arg(long)]
        k: usize,
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',')]
        exponents: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum WindowCmd {
    /// H(n) between 2^n/4 and 2^n.
    Hn {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Intersection pattern of one map given as JSON.
    Eval {
        /// Map JSON, or @path to read it from a file.
        #[arg(long)]
        map: String,
    },
    /// Every size of k x m maps over an entry set.
    Enumerate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
        entries: String,
        /// Keep sizes strictly above this fraction of 2^k.
        #[arg(long, value_parser = parse_fraction, default_value = "0/1")]
        above: Rational,
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u128,
    },
}

#[derive(Args, Debug)]
struct ShapeArgs {
    /// Shape JSON {"k":..,"edges":[[..],..]}, or @path.
    #[arg(long)]
    shape: String,
    /// Skip assignments whose size reaches this value.
    #[arg(long)]
    exclude: Option<u64>,
}

fn parse_fraction(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|k| k..=k),
    }
}

fn parse_entries(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|e| parse_rational(e.trim()).with_context(|| format!("entry {e:?}"))).collect()
}

fn read_arg(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => Ok(s.to_string()),
    }
}

/// A rendered document and whether its checks passed.
struct Output {
    text: String,
    passed: bool,
}

fn document(command: &str, config: serde_json::Value, body: &impl serde::Serialize) -> Output {
    Output { text: json_document(command, &config, body), passed: true }
}

fn reports(command: &str, config: serde_json::Value, reports: Vec<Report>) -> Output {
    let passed = reports.iter().all(Report::passed);
    let body = json!({ "passed": passed, "reports": reports });
    Output { text: json_document(command, &config, &body), passed }
}

/// Errors that are the caller's fault map to exit status 2.
struct Usage(anyhow::Error);

fn usage<T>(r: hypercube_sections::Result<T>) -> Result<T, Usage> {
    r.map_err(|e| Usage(e.into()))
}

fn run(cli: &Cli) -> Result<Output, Usage> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match &cli.command {
        Command::Sizes(SizesCmd::Codim1 { k, max_support, format }) => {
            let config = json!({ "k": k, "max_support": max_support });
            match k {
                None => {
                    let rows = codim1_table(*max_support);
                    Ok(match format {
                        Format::Tsv => {
                            let rows: Vec<Vec<String>> =
                                rows.iter().map(|r| vec![r.a.to_string(), r.b.to_string(), r.t.to_string()]).collect();
                            Output { text: tsv_document("sizes codim1", &config, &["a", "b", "t"], &rows), passed: true }
                        }
                        Format::Json => document("sizes codim1", config, &rows),
                    })
                }
                Some(k) => {
                    let sizes = usage(large_codim1_sizes(*k))?;
                    let rows: Vec<(u64, SignCount)> = sizes
                        .iter()
                        .map(|&t| {
                            let sc = (0..=*k)
                                .flat_map(|a| (0..=*k - a).map(move |b| SignCount::new(a, b, *k - a - b)))
                                .find(|sc| hypercube_sections::codim1::codim1_size(*sc) == t as u128)
                                .expect("enumerated size has a sign count");
                            (t, sc)
                        })
                        .collect();
                    Ok(match format {
                        Format::Tsv => {
                            let rows: Vec<Vec<String>> = rows
                                .iter()
                                .map(|(t, sc)| vec![t.to_string(), sc.a.to_string(), sc.b.to_string(), sc.c.to_string()])
                                .collect();
                            Output {
                                text: tsv_document("sizes codim1", &config, &["size", "a", "b", "c"], &rows),
                                passed: true,
                            }
                        }
                        Format::Json => {
                            let body: Vec<_> = rows.iter().map(|(t, sc)| json!({"size": t, "sign_count": sc})).collect();
                            document("sizes codim1", config, &body)
                        }
                    })
                }
            }
        }
        Command::Search(a) => {
            let mut config = match a.mode {
                Mode::MinimalLarge => usage(SearchConfig::large(a.k))?,
                Mode::NonRedundantSmall => usage(SearchConfig::small(a.k))?,
            };
            if let Some(t) = a.threshold {
                let edges = a.max_edges.unwrap_or(config.max_edges);
                config = usage(SearchConfig::new(a.mode, a.k, t, edges))?;
            }
            if let Some(e) = a.max_edges {
                if e == 0 {
                    return Err(Usage(anyhow::anyhow!("--max-edges must be positive")));
                }
                config = config.with_max_edges(e);
            }
            config = config.with_dedupe(!a.no_dedupe);
            if let Some(b) = a.node_budget {
                config.node_budget = b;
            }
            let result = usage(bfs_search_with(&config, exec))?;
            let deepest = result.depths.last().map_or(0, |d| d.edges);
            let finals: Vec<_> = final_shapes(&result, deepest)
                .into_iter()
                .map(|(s, m)| json!({"shape": s, "max": m}))
                .collect();
            let body = json!({
                "config": result.config,
                "depths": result.depths,
                "evaluated": result.evaluated,
                "pruned": result.pruned,
                "termination": result.termination,
                "final_canonical": finals,
            });
            Ok(document("search", serde_json::to_value(&config).expect("config serialises"), &body))
        }
        Command::Verify(v) => verify(v, exec),
        Command::Window(WindowCmd::Hn { n }) => {
            let set = usage(h_n_window(*n))?;
            Ok(document("window hn", json!({ "n": n }), &set))
        }
        Command::Oracle(OracleCmd::Eval { map }) => {
            let text = read_arg(map).map_err(Usage)?;
            let map: LinearMap = serde_json::from_str(&text).context("parsing map JSON").map_err(Usage)?;
            let (pattern, size) = evaluate_pattern_with(&map, exec);
            Ok(document("oracle eval", json!({ "map": map }), &json!({ "size": size, "pattern": pattern })))
        }
        Command::Oracle(OracleCmd::Enumerate { k, m, entries, above, budget }) => {
            let list = parse_entries(entries).map_err(Usage)?;
            let set = usage(oracle_enumerate(*k, *m, &list, *above, *budget, exec))?;
            let config = json!({ "k": k, "m": m, "entries": entries, "above": format_fraction(above), "budget": budget.to_string() });
            Ok(document("oracle enumerate", config, &set))
        }
        Command::Shape(ShapeArgs { shape, exclude }) => {
            let text = read_arg(shape).map_err(Usage)?;
            let shape: Shape = serde_json::from_str(&text).context("parsing shape JSON").map_err(Usage)?;
            let best = max_intersection_with(&shape, *exclude, exec);
            let body = json!({
                "shape": shape,
                "canonical": canonical_form(&shape),
                "class": classify_star(&shape),
                "max": best.as_ref().map(|b| b.max),
                "witness": best.as_ref().map(|b| b.witness.signs(&shape)),
                "fraction": format_fraction(&shape_fraction(&shape)),
            });
            Ok(document("shape", json!({ "shape": shape, "exclude": exclude }), &body))
        }
    }
}

fn verify(v: &VerifyCmd, exec: Exec) -> Result<Output, Usage> {
    match v {
        VerifyCmd::Large { k, n_max } => {
            if *k.start() < 6 || *k.end() > VERIFY_MAX_K {
                return Err(Usage(anyhow::anyhow!(
                    "--k {}..{} out of range: large-set verification supports 6..{VERIFY_MAX_K}",
                    k.start(),
                    k.end()
                )));
            }
            let list = k.clone().map(|k| usage(verify_large_sets(k, n_max.unwrap_or(2 * k), exec))).collect::<Result<_, _>>()?;
            Ok(reports("verify large", json!({ "k": [k.start(), k.end()], "n_max": n_max }), list))
        }
        VerifyCmd::Small { k } => {
            let r = usage(verify_small_window(*k, exec))?;
            Ok(reports("verify small", json!({ "k": k }), vec![r]))
        }
        VerifyCmd::Antichain { ell, trials, seed } => {
            let r = usage(antichain_bound_check(ell.clone(), *trials, *seed, exec))?;
            Ok(reports("verify antichain", json!({ "ell": [ell.start(), ell.end()], "trials": trials, "seed": seed }), vec![r]))
        }
        VerifyCmd::Reduction { k, m } => {
            let r = usage(lemma_small_bound_sweep(*k, *m, exec))?;
            Ok(reports("verify reduction", json!({ "k": k, "m": m }), vec![r]))
        }
        VerifyCmd::Ints { k, entries, samples, seed } => {
            let list = parse_entries(entries).map_err(Usage)?;
            let rs = k.clone().map(|k| usage(ints_window_check(k, &list, *samples, *seed, exec))).collect::<Result<_, _>>()?;
            let config = json!({ "k": [k.start(), k.end()], "entries": entries, "samples": samples, "seed": seed });
            Ok(reports("verify ints", config, rs))
        }
        VerifyCmd::Powers { k, exponents } => {
            let r = usage(sum_of_powers_members(*k, exponents, exec))?;
            Ok(reports("verify powers", json!({ "k": k, "exponents": exponents }), vec![r]))
        }
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, &out.text).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(out.text.as_bytes()).context("writing stdout")
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let out = match run(&cli) {
        Ok(out) => out,
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &out) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if out.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("verification failed");
        ExitCode::from(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("6..8").unwrap(), 6..=8);
        assert_eq!(parse_range("6..=8").unwrap(), 6..=8);
        assert_eq!(parse_range("7").unwrap(), 7..=7);
        assert!(parse_range("8..6").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn commands_parse() {
        let c = Cli::try_parse_from(["hcube", "sizes", "codim1", "--k", "6"]).unwrap();
        assert!(matches!(c.command, Command::Sizes(SizesCmd::Codim1 { k: Some(6), .. })));
        let c = Cli::try_parse_from(["hcube", "search", "--mode", "small", "--k", "8", "--threshold", "15/32"]).unwrap();
        match c.command {
            Command::Search(a) => {
                assert_eq!(a.mode, Mode::NonRedundantSmall);
                assert_eq!(a.threshold, Some(Rational::new(15, 32)));
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["hcube", "search", "--mode", "small", "--k", "8", "--threshold", "x/2"]).is_err());
        assert!(Cli::try_parse_from(["hcube", "frobnicate"]).is_err());
    }

    #[test]
    fn large_range_is_checked() {
        let c = Cli::try_parse_from(["hcube", "verify", "large", "--k", "9"]).unwrap();
        assert!(run(&c).is_err());
    }

    #[test]
    fn failed_claims_fail_the_run() {
        let mut bad = Report::new("x");
        bad.check("holds", false, "");
        let out = reports("verify", json!({}), vec![Report::new("ok"), bad]);
        assert!(!out.passed);
        assert!(out.text.contains("\"passed\": false"));
    }
}
