//! Command-line front end. [`run_cli`] parses an argument vector and
//! [`dispatch`] executes it, returning the exit status and the text to print.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{check_cons_free, check_immutability, data_order, typecheck};
use crate::interp::{
    enumerate_with, evaluate_one, Chooser, EvalError, RandomChooser, ScriptedChooser, Strategy, DEFAULT_FUEL,
};
use crate::saturate::{np_saturate, saturate, NpConfig, PoolMode, DEFAULT_POOL_CAP, DEFAULT_UNIVERSE_CAP};
use crate::syntax::{parse_input_bits, parse_program, pretty_print, Program};
use crate::tmcompile::{compile_machine, compile_machine_source, StepPolynomial};
use crate::transform::{compose_pushdown, eliminate_fvar_clauses, verify_order_collapsed};
use crate::turing::{index_options, parse_machine, run_machine, validate_machine, word_bits, Machine};
use crate::value::Value;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug, Clone, PartialEq, Eq)]
#[command(name = "consfree", version, about = "Cons-free programs and Turing machine compilation")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Paths,
    Memo,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Paths => Strategy::Paths,
            StrategyArg::Memo => Strategy::Memo,
        }
    }
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Type-check a program and report cons-freeness, data order and immutability.
    Check {
        program: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate `main` once, or enumerate all its results with `--all`.
    Run {
        program: PathBuf,
        /// One bit word per argument of `main`, such as `0110`.
        #[arg(long = "input")]
        inputs: Vec<String>,
        #[arg(long, env = "CONSFREE_FUEL", default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// `first`, `random:SEED`, or a comma-separated script such as `0,1,1`.
        #[arg(long, default_value = "first")]
        chooser: String,
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// Result set by saturation.
    Saturate {
        program: PathBuf,
        #[arg(long = "input")]
        inputs: Vec<String>,
    },
    /// Result set by saturation restricted to guessed pools of functional values.
    NpRun {
        program: PathBuf,
        #[arg(long = "input")]
        inputs: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u32,
        /// Use every graph below the maximal one instead of a random pool.
        #[arg(long)]
        exhaustive: bool,
        /// Graphs per pool site in seeded mode.
        #[arg(long, default_value_t = DEFAULT_POOL_CAP)]
        cap: usize,
        #[arg(long, default_value_t = DEFAULT_UNIVERSE_CAP)]
        universe_cap: usize,
    },
    /// Inline functional-variable clauses and push compositions down.
    Transform {
        program: PathBuf,
        /// Only push compositions down.
        #[arg(long)]
        pushdown_only: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Compile a Turing machine with step bound `a * n^b` into a program.
    CompileTm {
        machine: PathBuf,
        #[arg(long)]
        poly: StepPolynomial,
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Search for an accepting run of a Turing machine.
    TmRun {
        machine: PathBuf,
        #[arg(long = "word", required = true)]
        words: Vec<String>,
        /// Step bound `a * n^b`; overridden by `--steps`.
        #[arg(long, required_unless_present = "steps")]
        poly: Option<StepPolynomial>,
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Compile a machine and compare the program with the machine on each word.
    Pipeline {
        machine: PathBuf,
        #[arg(long)]
        poly: StepPolynomial,
        #[arg(long, value_delimiter = ',', required = true)]
        words: Vec<String>,
        #[arg(long, default_value_t = 0)]
        order: usize,
        /// Clause firings per path; unbounded when absent.
        #[arg(long)]
        fuel: Option<u64>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => dispatch(&cfg),
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            (code, e.render().to_string())
        }
    }
}

enum Failure {
    Usage(String),
    Analysis(String),
}

type Outcome = Result<(i32, String), Failure>;

pub fn dispatch(cfg: &RunConfig) -> (i32, String) {
    let out = match &cfg.command {
        Command::Check { program, json } => check(program, *json),
        Command::Run {
            program,
            inputs,
            fuel,
            chooser,
            all,
            strategy,
        } => run(program, inputs, *fuel, chooser, *all, (*strategy).into()),
        Command::Saturate { program, inputs } => saturate_cmd(program, inputs),
        Command::NpRun {
            program,
            inputs,
            seed,
            trials,
            exhaustive,
            cap,
            universe_cap,
        } => {
            let mode = if *exhaustive {
                PoolMode::Exhaustive
            } else {
                PoolMode::Seeded {
                    seed: *seed,
                    trials: *trials,
                }
            };
            let np = NpConfig {
                mode,
                pool_cap: *cap,
                universe_cap: *universe_cap,
            };
            np_run(program, inputs, &np)
        }
        Command::Transform {
            program,
            pushdown_only,
            output,
        } => transform(program, *pushdown_only, output.as_deref()),
        Command::CompileTm {
            machine,
            poly,
            order,
            output,
        } => compile_tm(machine, *poly, *order, output.as_deref()),
        Command::TmRun {
            machine,
            words,
            poly,
            steps,
        } => tm_run(machine, words, *poly, *steps),
        Command::Pipeline {
            machine,
            poly,
            words,
            order,
            fuel,
        } => pipeline(machine, *poly, words, *order, *fuel),
    };
    match out {
        Ok(r) => r,
        Err(Failure::Usage(m)) => (EXIT_USAGE, format!("error: {m}\n")),
        Err(Failure::Analysis(m)) => (EXIT_FAILURE, format!("error: {m}\n")),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    parse_program(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_machine(path: &Path) -> Result<Machine, Failure> {
    parse_machine(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_inputs(words: &[String]) -> Result<Vec<Value>, Failure> {
    words
        .iter()
        .map(|w| parse_input_bits(w).map_err(|e| Failure::Usage(format!("--input {w}: {e}"))))
        .collect()
}

fn parse_word(w: &str) -> Result<Vec<bool>, Failure> {
    word_bits(w).ok_or_else(|| Failure::Usage(format!("--word {w}: expected a word over 0 and 1")))
}

fn lines(values: impl IntoIterator<Item = String>) -> String {
    values.into_iter().map(|v| v + "\n").collect()
}

fn check(path: &Path, json: bool) -> Outcome {
    let p = load_program(path)?;
    let tp = match typecheck(&p) {
        Ok(tp) => tp,
        Err(errs) => {
            let mut out = String::from("typecheck: fail\n");
            for e in errs {
                let _ = writeln!(out, "  {e}");
            }
            return Ok((EXIT_FAILURE, out));
        }
    };
    let reports = [
        check_cons_free(&p),
        check_immutability(&tp, 1),
        verify_order_collapsed(&tp),
    ];
    let order = data_order(&p);
    let code = if reports[..2].iter().all(|r| r.passed()) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    let out = if json {
        let v = serde_json::json!({
            "typecheck": "pass",
            "data_order": order,
            "terminating": p.terminating,
            "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&v).expect("json") + "\n"
    } else {
        let mut out = String::from("typecheck: pass\n");
        let _ = writeln!(out, "data order: {order}");
        let _ = writeln!(out, "terminating: {}", if p.terminating { "yes" } else { "no" });
        for r in &reports {
            out.push_str(&r.to_string());
        }
        out
    };
    Ok((code, out))
}

fn parse_chooser(spec: &str) -> Result<Box<dyn Chooser + Send>, Failure> {
    if spec == "first" {
        return Ok(Box::new(ScriptedChooser::new(Vec::new())));
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed = seed
            .parse()
            .map_err(|_| Failure::Usage(format!("--chooser {spec}: bad seed")))?;
        return Ok(Box::new(RandomChooser(ChaCha8Rng::seed_from_u64(seed))));
    }
    let script = spec
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Usage(format!("--chooser {spec}: expected first, random:SEED or a list of indices")))?;
    Ok(Box::new(ScriptedChooser::new(script)))
}

fn eval_failure(e: EvalError) -> Failure {
    match e {
        EvalError::BadInput(m) => Failure::Usage(m),
        other => Failure::Analysis(other.to_string()),
    }
}

fn run(path: &Path, inputs: &[String], fuel: u64, chooser: &str, all: bool, strategy: Strategy) -> Outcome {
    let p = load_program(path)?;
    typecheck(&p).map_err(|e| Failure::Analysis(format!("{}: {}", path.display(), e[0])))?;
    let args = parse_inputs(inputs)?;
    if all {
        let out = enumerate_with(&p, &p.main, &args, fuel, strategy).map_err(eval_failure)?;
        let mut text = lines(out.rendered());
        if !out.exhausted {
            text.push_str("# fuel ran out on some path; results may be incomplete\n");
        }
        Ok((EXIT_OK, text))
    } else {
        let mut ch = parse_chooser(chooser)?;
        let v = evaluate_one(&p, &args, ch.as_mut(), fuel).map_err(eval_failure)?;
        Ok((EXIT_OK, format!("{v}\n")))
    }
}

fn saturate_cmd(path: &Path, inputs: &[String]) -> Outcome {
    let p = load_program(path)?;
    let args = parse_inputs(inputs)?;
    let s = saturate(&p, &args).map_err(|e| Failure::Analysis(e.to_string()))?;
    let mut out = lines(s.results.iter().map(Value::to_string));
    let _ = writeln!(
        out,
        "# calls: {}, statements: {}, iterations: {}",
        s.stats.calls, s.stats.statements, s.stats.iterations
    );
    Ok((EXIT_OK, out))
}

fn np_run(path: &Path, inputs: &[String], cfg: &NpConfig) -> Outcome {
    let p = load_program(path)?;
    let args = parse_inputs(inputs)?;
    let s = np_saturate(&p, &args, cfg).map_err(|e| Failure::Analysis(e.to_string()))?;
    let mut out = lines(s.results.iter().map(Value::to_string));
    let _ = writeln!(
        out,
        "# calls: {}, statements: {}, iterations: {}",
        s.stats.calls, s.stats.statements, s.stats.iterations
    );
    let _ = writeln!(out, "# T = {}, N = {}", s.t, s.n);
    for (ty, size) in &s.pool_sizes {
        let _ = writeln!(out, "# pool {ty}: {size}");
    }
    Ok((EXIT_OK, out))
}

fn transform(path: &Path, pushdown_only: bool, output: Option<&Path>) -> Outcome {
    let p = load_program(path)?;
    let trace = if pushdown_only {
        compose_pushdown(&p)
    } else {
        eliminate_fvar_clauses(&p).map_err(|e| Failure::Analysis(e.to_string()))?
    };
    let program = pretty_print(&trace.after);
    let log: String = trace.log().lines().map(|l| format!("# {l}\n")).collect();
    match output {
        Some(o) => {
            write(o, &program)?;
            Ok((EXIT_OK, log))
        }
        None => Ok((EXIT_OK, program + &log)),
    }
}

fn compile_tm(path: &Path, poly: StepPolynomial, order: usize, output: Option<&Path>) -> Outcome {
    let m = load_machine(path)?;
    let im = index_options(&m);
    let text = compile_machine_source(&im, poly, order).map_err(|e| Failure::Analysis(e.to_string()))?;
    match output {
        Some(o) => {
            write(o, &text)?;
            Ok((EXIT_OK, String::new()))
        }
        None => Ok((EXIT_OK, text)),
    }
}

fn machine_bound(poly: Option<StepPolynomial>, steps: Option<u64>, n: usize) -> u64 {
    match (steps, poly) {
        (Some(s), _) => s,
        (None, Some(h)) => h.steps(n as u64),
        (None, None) => 0,
    }
}

fn tm_run(path: &Path, words: &[String], poly: Option<StepPolynomial>, steps: Option<u64>) -> Outcome {
    let m = load_machine(path)?;
    let report = validate_machine(&m);
    if !report.passed() {
        return Ok((EXIT_FAILURE, report.to_string()));
    }
    let mut out = String::new();
    for w in words {
        let bits = parse_word(w)?;
        let bound = machine_bound(poly, steps, bits.len());
        let r = run_machine(&m, &bits, bound).map_err(|e| Failure::Analysis(e.to_string()))?;
        match r.witness {
            Some(ks) => {
                let ks: Vec<String> = ks.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "{w}: accept (options {})", ks.join(" "));
            }
            None => {
                let _ = writeln!(out, "{w}: reject");
            }
        }
    }
    Ok((EXIT_OK, out))
}

fn pipeline(path: &Path, poly: StepPolynomial, words: &[String], order: usize, fuel: Option<u64>) -> Outcome {
    let m = load_machine(path)?;
    let im = index_options(&m);
    let p = compile_machine(&im, poly, order).map_err(|e| Failure::Analysis(e.to_string()))?;
    let verdict = |b: bool| if b { "accept" } else { "reject" };
    let mut parts = Vec::new();
    let mut code = EXIT_OK;
    for w in words {
        let bits = parse_word(w)?;
        let expect = run_machine(&m, &bits, poly.steps(bits.len() as u64))
            .map_err(|e| Failure::Analysis(e.to_string()))?
            .accepted;
        let out = enumerate_with(&p, &p.main, &[Value::bool_list(&bits)], fuel.unwrap_or(u64::MAX), Strategy::Auto)
            .map_err(eval_failure)?;
        let got = out.results.contains(&Value::boolean(true));
        if !got && !out.exhausted {
            code = EXIT_FAILURE;
            parts.push(format!("{w}: INCOMPLETE (machine {}, fuel ran out)", verdict(expect)));
        } else if got == expect {
            parts.push(format!("{w}: OK ({})", verdict(expect)));
        } else {
            code = EXIT_FAILURE;
            parts.push(format!("{w}: MISMATCH (machine {}, program {})", verdict(expect), verdict(got)));
        }
    }
    Ok((code, parts.join(", ") + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp(name: &str, text: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        (dir, path)
    }

    const LAST: &str = "# terminating\nfun last : list => bool\nlast (x :: nil) = x\nlast (x :: y :: zs) = last (y :: zs)\n";
    const CONTAINS11: &str = "symbols: 0 1 _\nstates: start scan seen1 accept reject\n\
        start _ -> _ R scan\nscan 0 -> 0 R scan\nscan 1 -> 1 R scan\nscan 1 -> 1 R seen1\nseen1 1 -> 1 R accept\n";

    fn cli(args: &[&str]) -> (i32, String) {
        run_cli(std::iter::once("consfree").chain(args.iter().copied()))
    }

    #[test]
    fn check_and_run() {
        let (_d, p) = temp("last.cf", LAST);
        let p = p.to_str().unwrap();
        let (code, out) = cli(&["check", p]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("cons-free: pass"));
        assert!(out.contains("data order: 0"));
        assert_eq!(cli(&["run", p, "--input", "10", "--fuel", "1000"]), (0, "false\n".into()));
        assert_eq!(cli(&["run", p, "--input", "10", "--all"]), (0, "false\n".into()));
        let (code, out) = cli(&["saturate", p, "--input", "01"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("true\n# calls"));
        assert_eq!(cli(&["run", p, "--input", "", "--all"]).0, 1);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(cli(&["run"]).0, 2);
        assert_eq!(cli(&["frobnicate"]).0, 2);
        let (code, out) = cli(&["check", "/nonexistent/x.cf"]);
        assert_eq!(code, 2);
        assert!(out.contains("/nonexistent/x.cf"));
        assert_eq!(cli(&["--help"]).0, 0);
    }

    #[test]
    fn machine_commands() {
        let (_d, m) = temp("contains11.tm", CONTAINS11);
        let m = m.to_str().unwrap();
        assert_eq!(
            cli(&["pipeline", m, "--poly", "2,1", "--words", "0110,0100"]),
            (0, "0110: OK (accept), 0100: OK (reject)\n".into())
        );
        let (code, out) = cli(&["tm-run", m, "--word", "011", "--word", "010", "--poly", "2,1"]);
        assert_eq!(code, 0);
        assert!(out.contains("011: accept") && out.contains("010: reject"));
        let (code, out) = cli(&["compile-tm", m, "--poly", "2,1"]);
        assert_eq!(code, 0);
        assert!(parse_program(&out).is_ok());
        assert_eq!(cli(&["compile-tm", m, "--poly", "2"]).0, 2);
    }

    #[test]
    fn deterministic_output() {
        let (_d, p) = temp("last.cf", LAST);
        let p = p.to_str().unwrap();
        let a = cli(&["np-run", p, "--input", "110", "--seed", "7"]);
        assert_eq!(a, cli(&["np-run", p, "--input", "110", "--seed", "7"]));
        assert!(a.1.contains("# T = "));
    }
}
