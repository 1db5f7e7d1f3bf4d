//! The `satcut` command line.
//!
//! Exit codes: 0 success, true or provable; 1 false or unprovable; 2 search
//! budget exhausted; 3 input error; 4 internal invariant violation.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use satcut_core::apds::{self, from_fsa, saturate};
use satcut_core::calculus::{check_proof, general_cuts, render_path, CalculusId, RuleTable};
use satcut_core::fdl::{self, eval, fdl_rule_table, prove_fdl};
use satcut_core::natded::{self, freeze, nd_rule_table, pseudo_automaton_table, specific_cuts};
use satcut_core::oracle::enumerate_shard;
use satcut_core::sequent::{equiv_check, prove, rule_table, Outcome, SearchBudget};
use satcut_core::syntax::{Sequent, Term};

use crate::textio::{
    parse_apds, parse_fact, parse_fdl_model, parse_formula, parse_fsa, parse_proof_unchecked, parse_sequent,
    parse_term, print_apds_flagged, print_proof, print_sequent, ProofStyle,
};

pub const SUCCESS: i32 = 0;
pub const NEGATIVE: i32 = 1;
pub const BUDGET: i32 = 2;
pub const INPUT_ERROR: i32 = 3;
pub const INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "satcut", version, about = "Saturation-based provers and proof checkers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProveCalculus {
    G,
    K,
    D,
    Fdl,
    Delay,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckCalculus {
    G,
    K,
    D,
    Fdl,
    Nd,
    Delay,
    Apds,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Records,
    Tree,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a proof of a sequent.
    Prove {
        #[arg(long, value_enum)]
        calculus: ProveCalculus,
        /// Finite model, required for `fdl`.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        /// Witness terms, comma separated.
        #[arg(long, value_delimiter = ',')]
        witnesses: Vec<String>,
        #[arg(long, value_enum, default_value = "records")]
        format: Format,
        /// The sequent, or `@file` to read it from a file.
        sequent: String,
    },
    /// Check a proof file.
    Check {
        #[arg(long, value_enum)]
        calculus: CheckCalculus,
        /// Pushdown system the proof refers to; it is saturated first.
        #[arg(long)]
        system: Option<PathBuf>,
        /// Finite model for `fdl` proofs.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Also list general cuts, and specific cuts in natural deduction.
        #[arg(long)]
        report_cuts: bool,
        file: PathBuf,
    },
    /// Saturate a pushdown system.
    Saturate {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide a fact such as `S(a b)` in a pushdown system.
    Decide {
        system: PathBuf,
        fact: String,
        /// Print the cut-free proof of a true fact.
        #[arg(long)]
        proof: bool,
    },
    /// Evaluate a closed formula in a finite model.
    FdlEval {
        #[arg(long)]
        model: PathBuf,
        formula: String,
    },
    /// Compare G, K, D and the oracle on propositional sequents.
    Compare {
        #[arg(long, value_delimiter = ',', default_value = "p,q")]
        atoms: Vec<String>,
        #[arg(long, default_value_t = 2)]
        max_connectives: usize,
        /// One sequent per line instead of the enumeration.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Print disagreements only.
        #[arg(long)]
        quiet: bool,
        /// Worker threads; defaults to the available cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run a word through a finite automaton via its pushdown encoding.
    Fsa {
        #[arg(long)]
        file: PathBuf,
        /// Space separated symbols.
        #[arg(long)]
        word: String,
        #[arg(long)]
        state: String,
    },
}

/// A failure that ends the command with an exit code.
struct Exit(i32, String);

impl Exit {
    fn input(msg: impl std::fmt::Display) -> Exit {
        Exit(INPUT_ERROR, format!("error: {msg}"))
    }
}

fn read(path: &Path) -> Result<String, Exit> {
    std::fs::read_to_string(path).map_err(|e| Exit::input(format!("{}: {e}", path.display())))
}

fn in_file<T, E: std::fmt::Display>(path: &Path, r: Result<T, E>) -> Result<T, Exit> {
    r.map_err(|e| Exit::input(format!("{}:{e}", path.display())))
}

fn sequent_arg(arg: &str) -> Result<Sequent, Exit> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let path = Path::new(path);
            let text = read(path)?;
            in_file(path, parse_sequent(text.trim()))
        }
        None => parse_sequent(arg).map_err(Exit::input),
    }
}

fn style(f: Format) -> ProofStyle {
    match f {
        Format::Records => ProofStyle::Records,
        Format::Tree => ProofStyle::Tree,
    }
}

fn verdict(out: &mut dyn Write, yes: bool, pos: &str, neg: &str) -> io::Result<i32> {
    writeln!(out, "{}", if yes { pos } else { neg })?;
    Ok(if yes { SUCCESS } else { NEGATIVE })
}

/// Runs the command line on `args` (program name first).
pub fn run(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { SUCCESS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(Ok(code)) => code,
        Ok(Err(Exit(code, msg))) => {
            let _ = writeln!(err, "{msg}");
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            INTERNAL
        }
    }
}

pub fn main(args: impl IntoIterator<Item = OsString>) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

fn execute(cmd: Command, out: &mut dyn Write) -> io::Result<Result<i32, Exit>> {
    match cmd {
        Command::Prove { calculus, model, depth, witnesses, format, sequent } => {
            cmd_prove(calculus, model, depth, witnesses, format, &sequent, out)
        }
        Command::Check { calculus, system, model, report_cuts, file } => {
            cmd_check(calculus, system, model, report_cuts, &file, out)
        }
        Command::Saturate { input, output } => cmd_saturate(&input, output.as_deref(), out),
        Command::Decide { system, fact, proof } => cmd_decide(&system, &fact, proof, out),
        Command::FdlEval { model, formula } => cmd_fdl_eval(&model, &formula, out),
        Command::Compare { atoms, max_connectives, file, quiet, jobs } => {
            cmd_compare(&atoms, max_connectives, file.as_deref(), quiet, jobs, out)
        }
        Command::Fsa { file, word, state } => cmd_fsa(&file, &word, &state, out),
    }
}

macro_rules! tryx {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(x) => return Ok(Err(x)),
        }
    };
}

fn cmd_prove(
    calculus: ProveCalculus,
    model: Option<PathBuf>,
    depth: Option<usize>,
    witnesses: Vec<String>,
    format: Format,
    sequent: &str,
    out: &mut dyn Write,
) -> io::Result<Result<i32, Exit>> {
    let s = tryx!(sequent_arg(sequent));
    let terms: Vec<Term> = tryx!(witnesses.iter().map(|w| parse_term(w).map_err(Exit::input)).collect());
    let emit = |out: &mut dyn Write, p: &satcut_core::proof::Proof| out.write_all(print_proof(p, style(format)).as_bytes());
    match calculus {
        ProveCalculus::G | ProveCalculus::K | ProveCalculus::D => {
            let id = match calculus {
                ProveCalculus::G => CalculusId::G,
                ProveCalculus::K => CalculusId::K,
                _ => CalculusId::D,
            };
            let mut budget = SearchBudget::for_sequent(&s);
            if !terms.is_empty() {
                budget.witness_universe = terms;
            }
            if let Some(d) = depth {
                budget.max_depth = d;
            }
            match prove(id, &s, &budget).expect("sequent calculus") {
                Outcome::Proved(p) => {
                    emit(out, &p)?;
                    Ok(Ok(SUCCESS))
                }
                Outcome::Unprovable => verdict(out, false, "", "UNPROVABLE").map(Ok),
                Outcome::BudgetExhausted => {
                    writeln!(out, "BUDGET")?;
                    Ok(Ok(BUDGET))
                }
            }
        }
        ProveCalculus::Fdl => {
            let Some(path) = model else { return Ok(Err(Exit::input("--model is required for fdl"))) };
            let m = tryx!(in_file(&path, parse_fdl_model(&tryx!(read(&path)))));
            if !s.context().is_empty() {
                return Ok(Err(Exit::input("finite-domain sequents have an empty context")));
            }
            let goal = tryx!(fdl::normalize(s.goal()).map_err(Exit::input));
            match tryx!(prove_fdl(&m, &goal).map_err(Exit::input)) {
                Some(p) => {
                    emit(out, &p)?;
                    Ok(Ok(SUCCESS))
                }
                None => verdict(out, false, "", "UNPROVABLE").map(Ok),
            }
        }
        ProveCalculus::Delay => {
            let frozen = Sequent::new(s.context().to_vec(), freeze(s.goal()));
            match tryx!(natded::prove_delay(&frozen, &terms).map_err(Exit::input)) {
                Some((p, leaves)) => {
                    emit(out, &p)?;
                    for leaf in leaves {
                        writeln!(out, "# delayed {} :: {}", render_path(&leaf.path), print_sequent(&leaf.sequent))?;
                    }
                    Ok(Ok(SUCCESS))
                }
                None => verdict(out, false, "", "UNPROVABLE").map(Ok),
            }
        }
    }
}

fn check_table(
    calculus: CheckCalculus,
    system: Option<PathBuf>,
    model: Option<PathBuf>,
) -> Result<RuleTable, Exit> {
    Ok(match calculus {
        CheckCalculus::G => rule_table(CalculusId::G).expect("sequent calculus"),
        CheckCalculus::K => rule_table(CalculusId::K).expect("sequent calculus"),
        CheckCalculus::D => rule_table(CalculusId::D).expect("sequent calculus"),
        CheckCalculus::Nd => nd_rule_table(),
        CheckCalculus::Delay => pseudo_automaton_table(),
        CheckCalculus::Fdl => {
            let path = model.ok_or_else(|| Exit::input("--model is required for fdl"))?;
            fdl_rule_table(&in_file(&path, parse_fdl_model(&read(&path)?))?)
        }
        CheckCalculus::Apds => {
            let path = system.ok_or_else(|| Exit::input("--system is required for apds"))?;
            let sys = in_file(&path, parse_apds(&read(&path)?))?;
            apds::apds_rule_table(&saturate(&sys).map_err(Exit::input)?)
        }
    })
}

fn cmd_check(
    calculus: CheckCalculus,
    system: Option<PathBuf>,
    model: Option<PathBuf>,
    report_cuts: bool,
    file: &Path,
    out: &mut dyn Write,
) -> io::Result<Result<i32, Exit>> {
    let table = tryx!(check_table(calculus, system, model));
    let proof = tryx!(in_file(file, parse_proof_unchecked(&tryx!(read(file)))));
    if let Err(e) = check_proof(&proof, &table) {
        writeln!(out, "INVALID {e}")?;
        return Ok(Ok(NEGATIVE));
    }
    writeln!(out, "OK")?;
    if report_cuts {
        for path in general_cuts(&proof, &table) {
            writeln!(out, "general cut at {}", render_path(&path))?;
        }
        if matches!(calculus, CheckCalculus::Nd) {
            for path in specific_cuts(&proof) {
                writeln!(out, "specific cut at {}", render_path(&path))?;
            }
        }
    }
    Ok(Ok(SUCCESS))
}

fn cmd_saturate(input: &Path, output: Option<&Path>, out: &mut dyn Write) -> io::Result<Result<i32, Exit>> {
    let sys = tryx!(in_file(input, parse_apds(&tryx!(read(input)))));
    let sat = tryx!(saturate(&sys).map_err(Exit::input));
    let text = print_apds_flagged(&sat, &|r| !sys.rules().iter().any(|o| o.shape() == r.shape()));
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                return Ok(Err(Exit::input(format!("{}: {e}", path.display()))));
            }
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(Ok(SUCCESS))
}

fn cmd_decide(system: &Path, fact: &str, proof: bool, out: &mut dyn Write) -> io::Result<Result<i32, Exit>> {
    let sys = tryx!(in_file(system, parse_apds(&tryx!(read(system)))));
    let atom = tryx!(parse_fact(fact).map_err(Exit::input));
    if !proof {
        let yes = tryx!(apds::decide(&sys, &atom).map_err(Exit::input));
        return verdict(out, yes, "TRUE", "FALSE").map(Ok);
    }
    match tryx!(apds::prove(&sys, &atom).map_err(Exit::input)) {
        Some(p) => {
            writeln!(out, "TRUE")?;
            out.write_all(print_proof(&p, ProofStyle::Records).as_bytes())?;
            Ok(Ok(SUCCESS))
        }
        None => verdict(out, false, "TRUE", "FALSE").map(Ok),
    }
}

fn cmd_fdl_eval(model: &Path, formula: &str, out: &mut dyn Write) -> io::Result<Result<i32, Exit>> {
    let m = tryx!(in_file(model, parse_fdl_model(&tryx!(read(model)))));
    let f = tryx!(parse_formula(formula).map_err(Exit::input));
    let yes = tryx!(eval(&m, &f).map_err(Exit::input));
    verdict(out, yes, "TRUE", "FALSE").map(Ok)
}

fn report_line(s: &Sequent) -> Result<(String, bool), Exit> {
    let r = equiv_check(s).map_err(Exit::input)?;
    let line = format!("{}\t{}\t{}\t{}\t{}", print_sequent(s), r.g, r.k, r.d, r.oracle);
    Ok((line, r.agree()))
}

fn cmd_compare(
    atoms: &[String],
    max_connectives: usize,
    file: Option<&Path>,
    quiet: bool,
    jobs: Option<usize>,
    out: &mut dyn Write,
) -> io::Result<Result<i32, Exit>> {
    let mut lines: Vec<(String, bool)> = Vec::new();
    if let Some(path) = file {
        let text = tryx!(read(path));
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let s = tryx!(parse_sequent(body).map_err(|e| Exit::input(format!("{}:{}: {e}", path.display(), i + 1))));
            lines.push(tryx!(report_line(&s)));
        }
    } else {
        if atoms.is_empty() {
            return Ok(Err(Exit::input("at least one atom is required")));
        }
        let names: Vec<&str> = atoms.iter().map(String::as_str).collect();
        let shards = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
        let results: Vec<Vec<(String, bool)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..shards)
                .map(|shard| {
                    let names = &names;
                    scope.spawn(move || {
                        enumerate_shard(names, max_connectives, shard, shards)
                            .map(|f| {
                                let s = Sequent::goal_only(f);
                                let r = equiv_check(&s).expect("propositional");
                                let line = format!("{}\t{}\t{}\t{}\t{}", print_sequent(&s), r.g, r.k, r.d, r.oracle);
                                (line, r.agree())
                            })
                            .filter(|(_, agree)| !quiet || !agree)
                            .collect()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        if quiet {
            let mut all: Vec<(String, bool)> = results.into_iter().flatten().collect();
            all.sort();
            lines = all;
        } else {
            // interleave the shards back into enumeration order
            let mut iters: Vec<_> = results.into_iter().map(Vec::into_iter).collect();
            'outer: loop {
                for it in iters.iter_mut() {
                    match it.next() {
                        Some(x) => lines.push(x),
                        None => break 'outer,
                    }
                }
            }
            for it in iters {
                lines.extend(it);
            }
        }
    }
    let mut disagreements = 0;
    for (line, agree) in &lines {
        if !agree {
            disagreements += 1;
        }
        if !quiet || !agree {
            writeln!(out, "{line}")?;
        }
    }
    Ok(Ok(if disagreements == 0 { SUCCESS } else { INTERNAL }))
}

fn cmd_fsa(file: &Path, word: &str, state: &str, out: &mut dyn Write) -> io::Result<Result<i32, Exit>> {
    let m = tryx!(in_file(file, parse_fsa(&tryx!(read(file)))));
    if !m.states.contains(state) {
        return Ok(Err(Exit::input(format!("unknown state `{state}`"))));
    }
    let symbols: Vec<&str> = word.split_whitespace().collect();
    if let Some(g) = symbols.iter().find(|g| !m.alphabet.contains(**g)) {
        return Ok(Err(Exit::input(format!("`{g}` is not in the alphabet"))));
    }
    let atom = satcut_core::syntax::Atom::new(state, vec![Term::word(&symbols)]);
    let yes = tryx!(apds::decide(&from_fsa(&m), &atom).map_err(Exit::input));
    verdict(out, yes, "ACCEPT", "REJECT").map(Ok)
}
