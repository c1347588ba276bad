use std::fmt::Debug;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qtorus::conjugacy::{main_conjugacy, ConjError};
use qtorus::lattice::{canonical_presentation, central_lattice, is_fgc, symbol_decomposition, LatticeError, Presentation};
use qtorus::matlie::{mad_extension_test, MatLieError, MorphismWord, TorusMatrix};
use qtorus::modules::ModError;
use qtorus::qtorus::{DegreeBasis, QtError, TorusElement};
use qtorus::scalar::{parse_literal, Order, ScalarError};
use qtorus::specialize::{certify, propose_prime, specialize_presentation, Designated, SpecializeError};
use qtorus::verify::verify_lemmas;

/// Exact computations with quantum tori and sl_ℓ over them.
#[derive(Parser)]
#[command(name = "qtorus", version)]
struct Cli {
    /// Indent JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Basis and index of the central lattice.
    Centre { file: PathBuf },
    /// Whether every q_ij has finite order, with the orders.
    Fgc { file: PathBuf },
    /// Canonical presentation, base change and symbol decomposition.
    Canonical { file: PathBuf },
    /// Propose and certify a reduction modulo a prime.
    Specialize {
        file: PathBuf,
        file2: Option<PathBuf>,
        #[arg(long)]
        prime_limit: u64,
        #[arg(long)]
        order_bound: u64,
        /// JSON list of scalar literals, elements or matrices over FILE.
        #[arg(long)]
        designate: Option<PathBuf>,
        /// Matrix sizes that must be invertible modulo the prime.
        #[arg(long = "ell")]
        ells: Vec<usize>,
    },
    /// Decide whether a diagonal matrix lies in the standard MAD.
    MadCheck {
        file: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Conjugate the image of the standard MAD back to the standard MAD.
    Conjugate {
        file: PathBuf,
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        t_max: Option<i64>,
        /// Degree basis as a JSON integer matrix, rows are basis vectors.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Run the randomized lemma checks against a presentation.
    VerifyLemmas {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    origin: String,
    message: String,
    location: Option<Value>,
}

impl Failure {
    fn new(code: u8, origin: impl Into<String>, message: impl Into<String>) -> Failure {
        Failure { code, origin: origin.into(), message: message.into(), location: None }
    }

    fn at(mut self, loc: Value) -> Failure {
        self.location = Some(loc);
        self
    }
}

const DOMAIN: u8 = 2;
const VERIFICATION: u8 = 3;
const WINDOW: u8 = 4;

fn variant<E: Debug>(e: &E) -> String {
    let d = format!("{:?}", e);
    d.split(['(', ' ', '{']).next().unwrap_or_default().to_string()
}

fn tagged<E: Debug + std::fmt::Display>(code: u8, kind: &str, e: &E) -> Failure {
    Failure::new(code, format!("{}::{}", kind, variant(e)), e.to_string())
}

fn scalar_err(e: ScalarError) -> Failure {
    match &e {
        ScalarError::Parse { pos, .. } => tagged(DOMAIN, "ScalarError", &e).at(json!({ "position": pos })),
        _ => tagged(DOMAIN, "ScalarError", &e),
    }
}

fn lattice_err(e: LatticeError) -> Failure {
    match e {
        LatticeError::Scalar(s) => scalar_err(s),
        LatticeError::EntryParse { i, j, source } => {
            let mut f = scalar_err(source);
            f.message = format!("entry q_{}{}: {}", i, j, f.message);
            f
        }
        e => tagged(DOMAIN, "LatticeError", &e),
    }
}

fn qt_err(e: QtError) -> Failure {
    match e {
        QtError::Scalar(s) => scalar_err(s),
        e => tagged(DOMAIN, "QtError", &e),
    }
}

fn matlie_err(e: MatLieError) -> Failure {
    match e {
        MatLieError::Qt(q) => qt_err(q),
        MatLieError::Lattice(l) => lattice_err(l),
        MatLieError::Scalar(s) => scalar_err(s),
        MatLieError::NotInvertible => tagged(VERIFICATION, "MatLieError", &e),
        e => tagged(DOMAIN, "MatLieError", &e),
    }
}

fn mod_err(e: ModError) -> Failure {
    match e {
        ModError::MatLie(m) => matlie_err(m),
        ModError::WindowExhausted(_) => tagged(WINDOW, "ModError", &e),
        ModError::NotInvertible => tagged(VERIFICATION, "ModError", &e),
        e => tagged(DOMAIN, "ModError", &e),
    }
}

fn conj_err(e: ConjError) -> Failure {
    match e {
        ConjError::Modules(m) => mod_err(m),
        ConjError::MatLie(m) => matlie_err(m),
        ConjError::Lattice(l) => lattice_err(l),
        ConjError::VerificationFailed(_) => tagged(VERIFICATION, "ConjError", &e),
        e => tagged(DOMAIN, "ConjError", &e),
    }
}

fn spec_err(e: SpecializeError) -> Failure {
    match e {
        SpecializeError::Lattice(l) => lattice_err(l),
        SpecializeError::MatLie(m) => matlie_err(m),
        SpecializeError::Scalar(s) => scalar_err(s),
        SpecializeError::NoPrimeInRange(_) => tagged(WINDOW, "SpecializeError", &e),
        e => tagged(DOMAIN, "SpecializeError", &e),
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(DOMAIN, "IoError", format!("{}: {}", path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::new(DOMAIN, "ParseError", format!("{}: {}", path.display(), e))
            .at(json!({ "file": path.display().to_string(), "line": e.line(), "column": e.column() }))
    })
}

fn with_file(path: &Path) -> impl Fn(Failure) -> Failure + '_ {
    move |mut f| {
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn load_presentation(path: &Path) -> Result<Arc<Presentation>, Failure> {
    let v = read_json(path)?;
    Presentation::from_json(&v).map(Presentation::into_arc).map_err(lattice_err).map_err(with_file(path))
}

fn order_json(o: &Order) -> Value {
    match o {
        Order::Finite(k) => json!(k),
        Order::Infinite => json!("infinite"),
    }
}

fn designated(pres: &Arc<Presentation>, path: &Path) -> Result<Vec<Designated>, Failure> {
    let v = read_json(path)?;
    let items = v.as_array().ok_or_else(|| Failure::new(DOMAIN, "ParseError", format!("{}: expected a list", path.display())))?;
    let field = pres.field();
    items
        .iter()
        .map(|it| match it {
            Value::String(s) => Ok(Designated::Scalar(
                parse_literal(s).and_then(|l| l.eval(&field)).map_err(scalar_err).map_err(with_file(path))?,
            )),
            Value::Number(x) => Ok(Designated::Scalar(
                parse_literal(&x.to_string()).and_then(|l| l.eval(&field)).map_err(scalar_err).map_err(with_file(path))?,
            )),
            Value::Array(_) => Ok(Designated::Element(TorusElement::from_json(pres, it).map_err(qt_err).map_err(with_file(path))?)),
            _ => Ok(Designated::Matrix(TorusMatrix::from_json(pres, it).map_err(matlie_err).map_err(with_file(path))?)),
        })
        .collect()
}

fn run(cmd: Command) -> Result<(Value, u8), Failure> {
    match cmd {
        Command::Centre { file } => {
            let p = load_presentation(&file)?;
            let c = central_lattice(&p).map_err(lattice_err)?;
            Ok((json!({ "basis": c.basis, "index": order_json(&c.index) }), 0))
        }
        Command::Fgc { file } => {
            let p = load_presentation(&file)?;
            let orders: Vec<Vec<Value>> = p.entry_orders().iter().map(|r| r.iter().map(order_json).collect()).collect();
            Ok((json!({ "fgc": is_fgc(&p), "entry_orders": orders }), 0))
        }
        Command::Canonical { file } => {
            let p = load_presentation(&file)?;
            let (a, pc) = canonical_presentation(&p).map_err(lattice_err)?;
            let sd = symbol_decomposition(&pc).map_err(lattice_err)?;
            Ok((json!({ "A": a, "canonical": pc.to_json(), "symbol_decomposition": sd }), 0))
        }
        Command::Specialize { file, file2, prime_limit, order_bound, designate, ells } => {
            let p = load_presentation(&file)?;
            let mut pres = vec![p.clone()];
            if let Some(f2) = file2 {
                pres.push(load_presentation(&f2)?);
            }
            let des = match designate {
                Some(d) => designated(&p, &d)?,
                None => Vec::new(),
            };
            let refs: Vec<&Presentation> = pres.iter().map(|q| q.as_ref()).collect();
            let h = propose_prime(&refs, &ells, &des, order_bound, prime_limit).map_err(spec_err)?;
            let cert = certify(&refs, &ells, &des, &h);
            let reduced: Vec<Value> = refs.iter().map(|q| specialize_presentation(q, &h).map(|r| r.to_json()).unwrap_or(Value::Null)).collect();
            let code = if cert.is_valid() { 0 } else { VERIFICATION };
            Ok((json!({ "residue_map": h, "certificate": cert.to_json(), "reduced": reduced }), code))
        }
        Command::MadCheck { file, matrix } => {
            let p = load_presentation(&file)?;
            let m = TorusMatrix::from_json(&p, &read_json(&matrix)?).map_err(matlie_err).map_err(with_file(&matrix))?;
            let out = mad_extension_test(&m).map_err(matlie_err)?;
            Ok((out.to_json(), 0))
        }
        Command::Conjugate { file, word, t_max, eps } => {
            let p = load_presentation(&file)?;
            let w = MorphismWord::from_json(&p, &read_json(&word)?).map_err(matlie_err).map_err(with_file(&word))?;
            let eps = match eps {
                Some(text) => {
                    let a = serde_json::from_str(&text).map_err(|e| {
                        Failure::new(DOMAIN, "ParseError", format!("--eps: {}", e)).at(json!({ "line": e.line(), "column": e.column() }))
                    })?;
                    DegreeBasis::new(a).map_err(lattice_err)?
                }
                None => DegreeBasis::standard(p.rank()),
            };
            let (c, report) = main_conjugacy(&w, &eps, t_max).map_err(conj_err)?;
            Ok((json!({ "g": c.g.to_json(), "g_inv": c.g_inv.to_json(), "report": report.to_json() }), 0))
        }
        Command::VerifyLemmas { .. } => unreachable!("handled separately"),
    }
}

fn lemma_table(file: &Path, seed: u64, trials: usize, as_json: bool) -> Result<u8, Failure> {
    let p = load_presentation(file)?;
    let outcomes = verify_lemmas(&p, seed, trials);
    let code = if outcomes.iter().all(|o| o.passed()) { 0 } else { VERIFICATION };
    if as_json {
        println!("{}", serde_json::to_string(&outcomes).expect("serializable"));
        return Ok(code);
    }
    println!("{:<10} {:>7} {:>10} {:>9}  first violation", "lemma", "cases", "violations", "ms");
    for o in &outcomes {
        println!("{:<10} {:>7} {:>10} {:>9}  {}", o.lemma, o.cases, o.violations, o.millis, o.first_violation.as_deref().unwrap_or("-"));
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    println!("{} of {} lemmas passed", outcomes.len() - failed, outcomes.len());
    Ok(code)
}

fn report(f: &Failure) {
    let mut v = json!({ "error": f.origin, "message": f.message });
    if let Some(loc) = &f.location {
        v["location"] = loc.clone();
    }
    eprintln!("{}", v);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::VerifyLemmas { file, seed, trials, json } => lemma_table(&file, seed, trials, json),
        cmd => run(cmd).map(|(v, code)| {
            let text = if cli.pretty { serde_json::to_string_pretty(&v) } else { serde_json::to_string(&v) };
            println!("{}", text.expect("serializable"));
            code
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            report(&f);
            ExitCode::from(f.code)
        }
    }
}
