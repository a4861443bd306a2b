use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use momentcut::lattice::{parse_rational, Rational};
use momentcut::{Error, ErrorClass};

mod commands;

#[derive(Parser)]
#[command(name = "momentcut", version, about = "Exact operations on labeled moment polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Io {
    /// Input polytope file, `-` for stdin.
    #[arg(long = "in", default_value = "-")]
    input: String,
    /// Output file, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
    /// Emit reports as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check facets, simplicity and boundedness.
    Validate {
        #[command(flatten)]
        io: Io,
    },
    /// Vertices with classes and weights, fixed components, facet stabilizers.
    Info {
        #[command(flatten)]
        io: Io,
        /// Circle direction as comma-separated integers (default e1).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<i64>>,
    },
    /// Reduced polytope at a regular level of x1.
    Reduce {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        level: Rational,
    },
    /// Cut at a regular level, keeping x1 <= a (or x1 >= a with --above).
    Cut {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        level: Rational,
        #[arg(long)]
        above: bool,
    },
    /// Cut at both ends: keep min <= x1 <= max.
    Compactify {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        min: Rational,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        max: Rational,
    },
    /// Chop a smooth or Z2 vertex.
    Blowup {
        #[command(flatten)]
        io: Io,
        /// Index into the vertex list printed by `info`.
        #[arg(long)]
        vertex_index: usize,
        #[arg(long, value_parser = rational_arg)]
        depth: Rational,
        /// Existing class ledger to extend.
        #[arg(long)]
        ledger_in: Option<String>,
        /// Where to write the updated class ledger.
        #[arg(long)]
        ledger_out: Option<String>,
    },
    /// Cut at eps and blow up the Z2 points on the new facet.
    AddFixedPoints {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        #[arg(long)]
        ledger_out: Option<String>,
    },
    /// Reverse the circle action (x1 -> -x1).
    Reverse {
        #[command(flatten)]
        io: Io,
    },
    /// Duistermaat-Heckman profile of x1.
    Dh {
        #[command(flatten)]
        io: Io,
        /// Write (s, mu) samples as CSV to this path.
        #[arg(long)]
        csv: Option<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        check_log_concavity: bool,
        #[arg(long)]
        local_minima: bool,
    },
    /// Check the slices on both sides of a critical level.
    WallCheck {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        wall: Rational,
        /// Half-width of the checked window; defaults to the distance to the
        /// nearest other critical value.
        #[arg(long, value_parser = rational_arg)]
        window: Option<Rational>,
    },
    /// Randomized checks on linear actions.
    LocalModel(LocalModelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Monotone,
    Solve,
    Membership,
    Npm,
    Convexity,
    Psh,
    CutIdentity,
    BlowupPotential,
}

#[derive(Args)]
struct LocalModelArgs {
    #[arg(value_enum)]
    check: Check,
    /// Weights as comma-separated integers; random per trial when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Option<Vec<i64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Tolerance; each check has its own default.
    #[arg(long)]
    tol: Option<f64>,
    /// Outer radius for `convexity`.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Inner radius for `convexity`.
    #[arg(long, default_value_t = 0.25)]
    eps_prime: f64,
    #[arg(long, default_value = "-")]
    out: String,
}

/// Exact rational flag; decimals are refused with the equivalent fraction.
fn rational_arg(s: &str) -> Result<Rational, String> {
    if s.contains(['.', 'e', 'E']) {
        return Err(match decimal_to_fraction(s) {
            Some(f) => format!("expected an exact rational, not a decimal; write {f} instead of {s}"),
            None => format!("expected an exact rational such as 3/4, got {s}"),
        });
    }
    parse_rational(s).map_err(|e| e.to_string())
}

fn decimal_to_fraction(s: &str) -> Option<String> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) || frac_part.len() > 18 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let den = format!("1{}", "0".repeat(frac_part.len()));
    let q = parse_rational(&format!("{}{}/{}", if neg { "-" } else { "" }, digits.trim_start_matches('0').max("0"), den)).ok()?;
    Some(q.to_string())
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Input => 1,
        ErrorClass::Precondition => 2,
        ErrorClass::Internal => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}

pub(crate) type CmdResult = Result<(), Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_refused_with_a_fraction() {
        let err = rational_arg("0.25").unwrap_err();
        assert!(err.contains("1/4"), "{err}");
        assert!(rational_arg("-1.5").unwrap_err().contains("-3/2"));
        assert!(rational_arg("1e-3").is_err());
        assert_eq!(rational_arg("-3/4").unwrap(), Rational::new((-3).into(), 4.into()));
    }
}
