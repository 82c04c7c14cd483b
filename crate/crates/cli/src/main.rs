//! wmac: exact computations with wreath Macdonald polynomials.
//!
//! Output is deterministic JSON on stdout (or LaTeX with --out latex);
//! human-readable progress goes to stderr. Exit codes: 0 success,
//! 1 mathematical invariant failure (with a witness), 2 usage error.

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;
use wmac_cli::{cache, verify};
use wmac_core::fock::{self, FockVector};
use wmac_core::macdonald::BosonicKind;
use wmac_core::partitions::{core_quotient, Partition};
use wmac_core::scalars::Scalar;
use wmac_core::shuffle::{self, e_pn, f_pn, h_pn};
use wmac_core::symfunc::Basis;

#[derive(Parser)]
#[command(name = "wmac", version, about = "wreath Macdonald polynomial calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OutFormat {
    Json,
    Latex,
}

#[derive(Args)]
struct CommonOut {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    out: OutFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Core, charge vector, and quotient of a partition.
    CoreQuotient {
        #[arg(long)]
        ell: u64,
        /// Comma-separated decreasing part list; empty or "-" for the
        /// empty partition.
        #[arg(long)]
        partition: String,
        #[command(flatten)]
        out: CommonOut,
    },
    /// The wreath Macdonald polynomial of one partition.
    Hlambda {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        partition: String,
        /// Basis for the output expansion.
        #[arg(long, default_value = "s")]
        basis: String,
        #[arg(long)]
        no_cache: bool,
        /// Seed for the randomized dimension pre-check.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Solve a whole cell (fixed core and quotient size).
    Table {
        #[arg(long)]
        ell: u64,
        /// Comma-separated charge vector, e.g. 1,-1,0.
        #[arg(long)]
        core: String,
        #[arg(long)]
        size: u64,
        #[arg(long)]
        no_cache: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Apply a shuffle operator to a dual Fock basis state.
    FockAct {
        #[arg(long)]
        ell: u64,
        /// Operator family: F, E, or H.
        #[arg(long)]
        op: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        /// Source partition.
        #[arg(long)]
        state: String,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Build a shuffle element and run one of its validators.
    Shuffle {
        #[arg(long)]
        ell: u64,
        /// Element family: F, E, or H.
        #[arg(long)]
        elem: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        /// wheel | pole | limits | pairings
        #[arg(long)]
        check: String,
    },
    /// Run a verification suite.
    Verify {
        /// combinatorics | macdonald | shuffle | fock | main | all
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 3)]
        ell: u64,
        #[arg(long, default_value_t = 9)]
        max_size: u64,
        /// Charge vector for the main suite.
        #[arg(long, default_value = "")]
        core: String,
        /// Quotient-size bound for the macdonald/main suites.
        #[arg(long, default_value_t = 2)]
        max_n: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        no_cache: bool,
    },
}

fn parse_partition(s: &str) -> Result<Partition, String> {
    Partition::parse(s).ok_or_else(|| format!("cannot parse partition '{}'", s))
}

fn parse_charges(s: &str, ell: u64) -> Result<Vec<i64>, String> {
    if s.trim().is_empty() {
        return Ok(vec![0; ell as usize]);
    }
    let charges: Result<Vec<i64>, _> = s.split(',').map(|t| t.trim().parse::<i64>()).collect();
    let charges = charges.map_err(|e| format!("cannot parse charges '{}': {}", s, e))?;
    if charges.len() != ell as usize {
        return Err(format!("expected {} charges, got {}", ell, charges.len()));
    }
    if charges.iter().sum::<i64>() != 0 {
        return Err("charges must sum to zero".into());
    }
    Ok(charges)
}

fn emit(value: serde_json::Value, latex: Option<String>, fmt: OutFormat) {
    match fmt {
        OutFormat::Json => println!("{}", serde_json::to_string_pretty(&value).unwrap()),
        OutFormat::Latex => println!("{}", latex.unwrap_or_else(|| "% no latex form".into())),
    }
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::CoreQuotient {
            ell,
            partition,
            out,
        } => {
            if ell < 1 {
                return Err("ell must be at least 1".into());
            }
            let lam = parse_partition(&partition)?;
            let (core, charges, quot) = core_quotient(&lam, ell);
            let value = serde_json::json!({
                "ell": ell,
                "partition": lam.parts().to_vec(),
                "core": core.parts().to_vec(),
                "charges": charges,
                "quotient": quot.iter().map(|q| q.parts().to_vec()).collect::<Vec<_>>(),
            });
            let latex = format!(
                "\\mathrm{{core}} = ({}),\\ \\mathrm{{quot}} = [{}]",
                core.to_display_string(),
                quot.iter()
                    .map(|q| q.to_display_string())
                    .collect::<Vec<_>>()
                    .join(" , ")
            );
            emit(value, Some(latex), out.out);
            Ok(true)
        }
        Command::Hlambda {
            ell,
            partition,
            basis,
            no_cache,
            seed,
            out,
        } => {
            let lam = parse_partition(&partition)?;
            let basis = Basis::parse(&basis).ok_or_else(|| format!("unknown basis '{}'", basis))?;
            let (_, charges, quot) = core_quotient(&lam, ell);
            let n: u64 = quot.iter().map(|q| q.size()).sum();
            let table = cache::load_or_solve(ell, &charges, n, no_cache, seed)?;
            let h = table
                .polynomials
                .get(&lam)
                .ok_or_else(|| "partition missing from its own cell".to_string())?;
            let converted = h.convert(basis).map_err(|e| e.to_string())?;
            emit(converted.to_json(), Some(converted.to_latex()), out.out);
            Ok(true)
        }
        Command::Table {
            ell,
            core,
            size,
            no_cache,
            seed,
            out,
        } => {
            let charges = parse_charges(&core, ell)?;
            let table = cache::load_or_solve(ell, &charges, size, no_cache, seed)?;
            match out.out {
                OutFormat::Json => emit(table.to_json(), None, OutFormat::Json),
                OutFormat::Latex => {
                    let lines: Vec<String> = table
                        .cell
                        .members
                        .iter()
                        .map(|m| {
                            format!(
                                "H_{{({})}} &= {} \\\\",
                                m.to_display_string(),
                                table.polynomials[m]
                                    .convert(Basis::S)
                                    .map(|f| f.to_latex())
                                    .unwrap_or_else(|e| e.to_string())
                            )
                        })
                        .collect();
                    println!("\\begin{{align*}}\n{}\n\\end{{align*}}", lines.join("\n"));
                }
            }
            Ok(true)
        }
        Command::FockAct {
            ell,
            op,
            p,
            n,
            state,
            out,
        } => {
            let lam = parse_partition(&state)?;
            let element = build_element(&op, p, n, ell)?;
            let v = FockVector::basis_state(ell, lam);
            let result = fock::shuffle_action(&element, &v).map_err(|e| e.to_string())?;
            emit(
                serde_json::json!({
                    "ell": ell, "op": op, "p": p, "n": n,
                    "result": result.to_json(),
                }),
                None,
                out.out,
            );
            Ok(true)
        }
        Command::Shuffle {
            ell,
            elem,
            p,
            n,
            check,
        } => {
            let element = build_element(&elem, p, n, ell)?;
            let (ok, detail) = match check.as_str() {
                "wheel" => match shuffle::wheel_check(&element) {
                    Ok(()) => (true, serde_json::json!(null)),
                    Err(w) => (false, serde_json::json!(w.0)),
                },
                "pole" => match shuffle::pole_check(&element) {
                    Ok(()) => (true, serde_json::json!(null)),
                    Err(w) => (false, serde_json::json!(w.0)),
                },
                "limits" => {
                    let w = verify_limits_of(&element, &elem, p, n, ell);
                    (w.is_none(), serde_json::json!(w))
                }
                "pairings" => {
                    let w = verify_pairings_of(&element, &elem, p, n, ell);
                    (w.is_none(), serde_json::json!(w))
                }
                other => return Err(format!("unknown check '{}'", other)),
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "elem": elem, "p": p, "n": n, "check": check,
                    "passed": ok, "witness": detail,
                }))
                .unwrap()
            );
            Ok(ok)
        }
        Command::Verify {
            suite,
            ell,
            max_size,
            core,
            max_n,
            seed,
            no_cache,
        } => {
            let mut reports = Vec::new();
            match suite.as_str() {
                "combinatorics" => reports.push(verify::suite_combinatorics(ell, max_size)),
                "macdonald" => reports.push(verify::suite_macdonald(ell, 2, max_n, seed)),
                "shuffle" => reports.push(verify::suite_shuffle(ell, 2, seed.unwrap_or(1))),
                "fock" => reports.push(verify::suite_fock(ell, max_size)),
                "main" => {
                    let charges = parse_charges(&core, ell)?;
                    let opts = verify::MainTheoremOptions {
                        corrupt: None,
                        no_cache,
                        seed,
                    };
                    reports.push(verify::verify_main_theorem(ell, &charges, max_n, &opts));
                }
                "all" => {
                    reports.push(verify::suite_combinatorics(ell, max_size));
                    reports.push(verify::suite_macdonald(ell, 2, max_n, seed));
                    reports.push(verify::suite_shuffle(ell, 2, seed.unwrap_or(1)));
                    reports.push(verify::suite_fock(ell, max_size));
                    let charges = parse_charges(&core, ell)?;
                    let opts = verify::MainTheoremOptions {
                        corrupt: None,
                        no_cache,
                        seed,
                    };
                    reports.push(verify::verify_main_theorem(ell, &charges, max_n, &opts));
                }
                other => return Err(format!("unknown suite '{}'", other)),
            }
            let mut ok = true;
            let mut jsons = Vec::new();
            for r in &reports {
                r.print_lines();
                ok &= r.all_passed();
                jsons.push(r.to_json());
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Array(jsons)).unwrap()
            );
            Ok(ok)
        }
    }
}

fn build_element(
    family: &str,
    p: u64,
    n: u64,
    ell: u64,
) -> Result<shuffle::ShuffleElement, String> {
    if ell < 3 {
        return Err("shuffle elements require ell >= 3".into());
    }
    if p >= ell {
        return Err("p must lie in 0..ell".into());
    }
    Ok(match family {
        "F" => f_pn(p, n, ell),
        "E" => e_pn(p, n, ell),
        "H" => h_pn(p, n, ell),
        other => return Err(format!("unknown element family '{}'", other)),
    })
}

fn verify_limits_of(
    element: &shuffle::ShuffleElement,
    family: &str,
    p: u64,
    n: u64,
    ell: u64,
) -> Option<String> {
    let _ = (p, n);
    use shuffle::{interval_vector, limit_profile, limits_equal, LimitProfile, LimitSide};
    for a in 0..ell as i64 {
        for len in 1..=element.degree.total() as i64 {
            let v = interval_vector(a, a + len, ell);
            if !v.leq(&element.degree) {
                continue;
            }
            let at0 = match limit_profile(element, &v, LimitSide::AtZero) {
                Ok(x) => x,
                Err(e) => return Some(e.to_string()),
            };
            if v.is_diagonal() {
                let ati = match limit_profile(element, &v, LimitSide::AtInfinity) {
                    Ok(x) => x,
                    Err(e) => return Some(e.to_string()),
                };
                if !limits_equal(&at0, &ati) || matches!(at0, LimitProfile::Divergent) {
                    return Some(format!("diagonal interval ({};{}] limits differ", a, a + len));
                }
            } else if !matches!(at0, LimitProfile::Zero) {
                return Some(format!(
                    "off-diagonal interval ({};{}] does not vanish at 0 ({} only requires it for S(0) members)",
                    a,
                    a + len,
                    family
                ));
            }
        }
    }
    None
}

fn verify_pairings_of(
    element: &shuffle::ShuffleElement,
    family: &str,
    p: u64,
    n: u64,
    ell: u64,
) -> Option<String> {
    // report the long-dual pairing row of the element
    for p_prime in 0..ell {
        match shuffle::pairing_r(element, p_prime, n) {
            Ok(v) => eprintln!(
                "<R_{{{},{}}}, {}_{{{},{}}}> = {}",
                p_prime,
                n,
                family,
                p,
                n,
                v.to_display_string()
            ),
            Err(e) => return Some(e.to_string()),
        }
        match shuffle::pairing_r_star(element, p_prime, n) {
            Ok(v) => eprintln!(
                "<R*_{{{},{}}}, {}_{{{},{}}}> = {}",
                p_prime,
                n,
                family,
                p,
                n,
                v.to_display_string()
            ),
            Err(e) => return Some(e.to_string()),
        }
    }
    None
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
    }
}

// silence unused-import warnings for items used only in some builds
#[allow(unused_imports)]
use BosonicKind as _;
#[allow(unused_imports)]
use Scalar as _;
