//! The `vls` command line.
//!
//! ```text
//! vls count perms --n 5 --valleys 1           # 88
//! vls count seqs --len 10 --max 5 --sum 20    # 325
//! vls enum perms --n 4 [--valleys 1]
//! vls enum seqs --len 3 --max 2
//! vls gf valley-perms --k 2 --order 10
//! vls gf vxy --x-order 6 --y-order 6
//! vls gf vxqy --x-order 4 --q-order 10 --y-order 4
//! vls gf an --n 3 --q-order 10 --y-order 4
//! vls biject perm-to-comp --perm 3,2,1        # 1,1,1
//! vls verify [--max-n 8] [--json]
//! ```
//!
//! Exit codes: 0 success, 1 invalid input, 2 verification failure.

use std::collections::BTreeSet;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bijections::{
    composition_to_valleyless_perm, generate_k_valley_permutations,
    generate_valleyless_permutations, generate_valleyless_sequences, theta_decode, theta_encode,
    valleyless_perm_to_composition, Composition,
};
use crate::counting::{count_valley_perms, count_valleyless_nk, count_valleyless_npk};
use crate::oracle::{verify_all, OracleLimits, VerifyLimits};
use crate::seq_core::Permutation;
use crate::series::{a_n_recurrence, gf_valley_perms, gf_valleyless_bivariate, v_xqy, TruncatedSeries};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vls", about = "Valleyless sequences and permutations by valley count", version)]
pub struct Cli {
    /// Emit JSON instead of plain text
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact counts
    #[command(subcommand)]
    Count(CountCmd),
    /// List objects, one per line
    #[command(subcommand)]
    Enum(EnumCmd),
    /// Expand generating functions
    #[command(subcommand)]
    Gf(GfCmd),
    /// Apply the bijections
    #[command(subcommand)]
    Biject(BijectCmd),
    /// Cross-check every route against brute force
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum CountCmd {
    /// Permutations of length N with exactly K valleys
    Perms {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        valleys: usize,
    },
    /// Valleyless sequences of length N with maximum K (and sum P)
    Seqs {
        #[arg(long)]
        len: usize,
        #[arg(long)]
        max: usize,
        #[arg(long)]
        sum: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EnumCmd {
    /// Valleyless permutations, or those with exactly K valleys
    Perms {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        valleys: Option<usize>,
    },
    /// Valleyless sequences of length N with maximum exactly K
    Seqs {
        #[arg(long)]
        len: usize,
        #[arg(long)]
        max: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum GfCmd {
    /// Generating function of permutations with exactly K valleys
    ValleyPerms {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        order: usize,
    },
    /// V(x, y): valleyless sequences by length and maximum
    Vxy {
        #[arg(long)]
        x_order: usize,
        #[arg(long)]
        y_order: usize,
    },
    /// V(x, q, y): valleyless sequences by length, sum and maximum
    Vxqy {
        #[arg(long)]
        x_order: usize,
        #[arg(long)]
        q_order: usize,
        #[arg(long)]
        y_order: usize,
    },
    /// a_n(q, y) from the three-term recurrence
    An {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q_order: usize,
        #[arg(long)]
        y_order: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum BijectCmd {
    /// Valleyless permutation -> composition
    PermToComp {
        #[arg(long)]
        perm: String,
    },
    /// Composition -> valleyless permutation
    CompToPerm {
        #[arg(long)]
        comp: String,
    },
    /// Composition -> set of partial sums
    Theta {
        #[arg(long)]
        comp: String,
    },
    /// Set of cut points -> composition of TOTAL
    Untheta {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long)]
        total: usize,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest length checked exhaustively
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    /// Entry-sum cap for the trivariate check
    #[arg(long, default_value_t = 16)]
    pub sum_cap: usize,
}

fn parse_list(raw: &str, what: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::InvalidArgument(format!("bad {what} entry {t:?}"))))
        .collect()
}

/// Comma-separated, or compact digits (`2731546`) when there are at most 9 entries.
pub fn parse_permutation(raw: &str) -> Result<Permutation> {
    let raw = raw.trim();
    let entries: Vec<u32> = if raw.contains(',') {
        parse_list(raw, "permutation")?.into_iter().map(|v| v as u32).collect()
    } else {
        if raw.len() > 9 {
            return Err(Error::InvalidArgument(
                "compact permutation form is limited to 9 entries; separate entries with commas".into(),
            ));
        }
        raw.chars()
            .map(|c| c.to_digit(10).ok_or_else(|| Error::InvalidArgument(format!("bad permutation digit {c:?}"))))
            .collect::<Result<_>>()?
    };
    if entries.is_empty() {
        return Err(Error::InvalidArgument("empty permutation".into()));
    }
    Permutation::new(entries)
}

pub fn parse_composition(raw: &str) -> Result<Composition> {
    Composition::new(parse_list(raw, "composition")?)
}

fn join(values: impl IntoIterator<Item = usize>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

enum Output {
    Text(String),
    Json(Value),
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INVALID
                }
            };
        }
    };
    let json = cli.json;
    match execute(cli) {
        Ok((output, code)) => {
            let written = match output {
                Output::Text(t) => write!(out, "{t}"),
                Output::Json(v) => writeln!(out, "{v}"),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INVALID;
            }
            code
        }
        Err(e) => {
            if json {
                let _ = writeln!(err, "{}", json!({ "error": e.to_string() }));
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            EXIT_INVALID
        }
    }
}

fn series_output(s: &TruncatedSeries, json: bool) -> Output {
    if json {
        Output::Json(serde_json::to_value(s.to_json()).expect("series JSON is serializable"))
    } else {
        Output::Text(s.to_plain())
    }
}

fn lines<T: ToString>(items: &[T]) -> String {
    items.iter().map(|i| format!("{}\n", i.to_string())).collect()
}

fn execute(cli: Cli) -> Result<(Output, i32)> {
    let json = cli.json;
    let count = |c: num_bigint::BigUint| {
        if json {
            Output::Json(json!({ "count": c.to_string() }))
        } else {
            Output::Text(format!("{c}\n"))
        }
    };
    let output = match cli.command {
        Command::Count(CountCmd::Perms { n, valleys }) => count(count_valley_perms(n, valleys)?),
        Command::Count(CountCmd::Seqs { len, max, sum: None }) => count(count_valleyless_nk(len, max)?),
        Command::Count(CountCmd::Seqs { len, max, sum: Some(p) }) => count(count_valleyless_npk(len, p, max)?),

        Command::Enum(cmd) => {
            let words: Vec<Vec<u32>> = match cmd {
                EnumCmd::Perms { n, valleys: None } => {
                    generate_valleyless_permutations(n)?.into_iter().map(Permutation::into_inner).collect()
                }
                EnumCmd::Perms { n, valleys: Some(k) } => {
                    generate_k_valley_permutations(n, k)?.into_iter().map(Permutation::into_inner).collect()
                }
                EnumCmd::Seqs { len, max } => {
                    generate_valleyless_sequences(len, max)?.into_iter().map(|s| s.into_inner()).collect()
                }
            };
            if json {
                Output::Json(json!({ "count": words.len(), "items": words }))
            } else {
                let rendered: Vec<String> = words
                    .iter()
                    .map(|w| {
                        if w.iter().all(|&e| e <= 9) {
                            w.iter().map(u32::to_string).collect()
                        } else {
                            join(w.iter().map(|&e| e as usize))
                        }
                    })
                    .collect();
                Output::Text(lines(&rendered))
            }
        }

        Command::Gf(cmd) => {
            let s = match cmd {
                GfCmd::ValleyPerms { k, order } => gf_valley_perms(k, order),
                GfCmd::Vxy { x_order, y_order } => gf_valleyless_bivariate(x_order, y_order),
                GfCmd::Vxqy { x_order, q_order, y_order } => v_xqy(x_order, q_order, y_order),
                GfCmd::An { n, q_order, y_order } => a_n_recurrence(n, q_order, y_order),
            };
            series_output(&s, json)
        }

        Command::Biject(cmd) => match cmd {
            BijectCmd::PermToComp { perm } => {
                let c = valleyless_perm_to_composition(&parse_permutation(&perm)?)?;
                if json {
                    Output::Json(json!({ "composition": c.parts() }))
                } else {
                    Output::Text(format!("{c}\n"))
                }
            }
            BijectCmd::CompToPerm { comp } => {
                let p = composition_to_valleyless_perm(&parse_composition(&comp)?);
                if json {
                    Output::Json(json!({ "permutation": p.word() }))
                } else {
                    Output::Text(format!("{p}\n"))
                }
            }
            BijectCmd::Theta { comp } => {
                let set = theta_encode(&parse_composition(&comp)?);
                if json {
                    Output::Json(json!({ "set": set }))
                } else {
                    Output::Text(format!("{}\n", join(set)))
                }
            }
            BijectCmd::Untheta { set, total } => {
                let cuts: BTreeSet<usize> = parse_list(&set, "set")?.into_iter().collect();
                let c = theta_decode(&cuts, total)?;
                if json {
                    Output::Json(json!({ "composition": c.parts() }))
                } else {
                    Output::Text(format!("{c}\n"))
                }
            }
        },

        Command::Verify(args) => {
            let limits = VerifyLimits { max_n: args.max_n, sum_cap: args.sum_cap, oracle: OracleLimits::from_env()? };
            let report = verify_all(&limits);
            let code = if report.all_passed() { crate::cli::EXIT_OK } else { EXIT_VERIFY_FAILED };
            let output = if json {
                Output::Json(serde_json::to_value(&report).expect("report is serializable"))
            } else {
                let mut text = String::new();
                for c in &report.checks {
                    match &c.counterexample {
                        None => text.push_str(&format!("PASS {} ({} ms)\n", c.name, c.elapsed_ms)),
                        Some(cx) => text.push_str(&format!("FAIL {} ({} ms): {cx}\n", c.name, c.elapsed_ms)),
                    }
                }
                let passed = report.checks.iter().filter(|c| c.counterexample.is_none()).count();
                text.push_str(&format!("{passed}/{} checks passed\n", report.checks.len()));
                Output::Text(text)
            };
            return Ok((output, code));
        }
    };
    Ok((output, EXIT_OK))
}
