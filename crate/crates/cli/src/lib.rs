//! Command-line front end. [`run`] takes the full argument list and returns
//! the exit code together with everything written to stdout and stderr.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use valtrop::cones::{self, SetFunctionVector};
use valtrop::entropy::{entropy_vector, EntropyMethod, EntropyVector};
use valtrop::field::parse_rational;
use valtrop::io::{lattice_file_json, matrix_to_json, parse_lattice_file, DynLattice, EntryCodec};
use valtrop::lattice::{smith_decomposition, Lattice};
use valtrop::subset::Subset;
use valtrop::tropical::{grid, TropicalPolynomial};
use valtrop::verify::{self, IndexOracle};
use valtrop::{Error, Exec};

#[derive(Parser, Debug)]
#[command(name = "valtrop", version, about = "Entropy vectors and tropical tail polynomials of lattices over valued fields")]
struct Cli {
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the entropy vector h_I for every subset I.
    Entropy {
        file: PathBuf,
        #[arg(long, default_value = "hnf", value_parser = ["minors", "hnf", "iterative"])]
        method: String,
    },
    /// Print the Hermite normal form as a lattice file.
    Hnf { file: PathBuf },
    /// Print A = U D V with U, V unimodular and D diagonal.
    Smith { file: PathBuf },
    /// Evaluate phi(v) = max_I (v_I - h_I).
    Phi(PointArgs),
    /// Tail probability q^-phi(v).
    Tail(PointArgs),
    /// Point mass P(V = v).
    Pmf(PointArgs),
    /// Supermodular cone membership of an entropy vector or set function.
    Supermodular { file: PathBuf },
    /// Test a conditional independence statement (1-based indices).
    Ci {
        file: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value = "")]
        given: String,
    },
    /// Draw samples of the valuation vector.
    Sample(SampleArgs),
    /// Compare empirical and exact tails on a box, one JSON line per point.
    Report {
        #[command(flatten)]
        sample: SampleArgs,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Brute-force index [L : L cap pi^v] in a finite quotient.
    Index {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        modexp: Option<u32>,
    },
    /// Project a three-dimensional entropy vector to W and classify it.
    D3fan { file: PathBuf },
    /// Lattice with entropy vector (0; x1, x2; x12).
    S2pre {
        #[arg(long, allow_hyphen_values = true)]
        x1: String,
        #[arg(long, allow_hyphen_values = true)]
        x2: String,
        #[arg(long, allow_hyphen_values = true)]
        x12: String,
    },
    /// Dump (I, indicator, h_I) lines for polyhedral software.
    ExportTropical { file: PathBuf },
}

#[derive(Args, Debug)]
struct PointArgs {
    file: PathBuf,
    /// Comma-separated point, e.g. 1,-2.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "box_", required_unless_present = "box_")]
    v: Option<String>,
    /// Integer box LO:HI, e.g. -1,0:4,5.
    #[arg(long = "box", id = "box_", allow_hyphen_values = true)]
    box_: Option<String>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    file: PathBuf,
    #[arg(long)]
    n: usize,
    /// Digits of precision N; defaults to the box maximum plus 20.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    seed: u64,
    #[arg(long = "box", allow_hyphen_values = true)]
    box_: Option<String>,
}

type Out = (String, String);

fn err<T>(e: Error) -> Result<T, Error> {
    Err(e)
}

fn parse_ints(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::InvalidArgument(format!("not an integer: {x:?}"))))
        .collect()
}

fn parse_rationals(s: &str) -> Result<Vec<BigRational>, Error> {
    s.split(',').map(|x| parse_rational(x.trim())).collect()
}

fn parse_box(s: &str) -> Result<(Vec<i64>, Vec<i64>), Error> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("box must be LO:HI, got {s:?}")))?;
    let (lo, hi) = (parse_ints(lo)?, parse_ints(hi)?);
    if lo.len() != hi.len() {
        return err(Error::InvalidArgument("box corners differ in length".into()));
    }
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return err(Error::InvalidArgument("box lower corner exceeds upper corner".into()));
    }
    Ok((lo, hi))
}

fn line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("json");
    s.push('\n');
    s
}

fn entropy_of(l: &DynLattice, method: EntropyMethod, exec: Exec) -> EntropyVector {
    match l {
        DynLattice::PAdic(l) => entropy_vector(l, method, exec),
        DynLattice::Puiseux(l) => entropy_vector(l, method, exec),
    }
}

fn tropical_of(l: &DynLattice, exec: Exec) -> TropicalPolynomial {
    TropicalPolynomial::new(entropy_of(l, EntropyMethod::Hnf, exec), l.descriptor().q())
}

fn int_strings(v: &[i64]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn rationals_json(v: &[BigRational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

/// Entropy vector from a lattice file or a set function file
/// `{"d": 3, "values": {"1": "0", ...}}`.
fn set_function_from_file(path: &Path, exec: Exec) -> Result<SetFunctionVector, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::MalformedFile(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::MalformedFile(format!("invalid JSON: {e}")))?;
    if v.get("field").is_some() {
        let l = valtrop::io::parse_lattice_value(&v)?;
        return Ok(SetFunctionVector::from(&entropy_of(&l, EntropyMethod::Hnf, exec)));
    }
    let d = v
        .get("d")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::MalformedFile("expected a lattice file or {\"d\": .., \"values\": {..}}".into()))?;
    let values = v.get("values").ok_or_else(|| Error::MalformedFile("missing \"values\"".into()))?;
    SetFunctionVector::from_json(d as usize, values)
}

fn hnf_json<F: EntryCodec>(l: &Lattice<F>) -> Value {
    lattice_file_json(l.field(), &l.hermite_normal_form())
}

fn smith_json<F: EntryCodec>(l: &Lattice<F>) -> Result<Value, Error> {
    let s = smith_decomposition(l.field(), l.basis())?;
    let diag: Vec<Value> = (0..l.dim())
        .map(|i| Value::String(l.field().valuation(&s.d[(i, i)]).to_string()))
        .collect();
    Ok(json!({
        "field": l.field().descriptor(),
        "U": matrix_to_json(l.field(), &s.u),
        "D": matrix_to_json(l.field(), &s.d),
        "V": matrix_to_json(l.field(), &s.v),
        "exponents": diag,
    }))
}

fn points(args: &PointArgs, d: usize) -> Result<Vec<Vec<BigRational>>, Error> {
    let pts = match (&args.v, &args.box_) {
        (Some(v), _) => vec![parse_rationals(v)?],
        (None, Some(b)) => {
            let (lo, hi) = parse_box(b)?;
            grid(&lo, &hi).into_iter().map(|p| p.into_iter().map(|x| BigRational::from_integer(x.into())).collect()).collect()
        }
        (None, None) => return err(Error::InvalidArgument("give --v or --box".into())),
    };
    if let Some(p) = pts.iter().find(|p| p.len() != d) {
        return err(Error::Dimension(format!("point of length {} for d = {d}", p.len())));
    }
    Ok(pts)
}

fn integral(v: &[BigRational]) -> Result<Vec<i64>, Error> {
    v.iter()
        .map(|x| {
            if x.is_integer() {
                x.to_integer().to_i64().ok_or_else(|| Error::InvalidArgument(format!("{x} out of range")))
            } else {
                err(Error::InvalidArgument(format!("{x} is not an integer")))
            }
        })
        .collect()
}

fn dispatch(cli: Cli) -> Result<Out, Error> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let mut out = String::new();
    let mut diag = String::new();
    match cli.command {
        Command::Entropy { file, method } => {
            let l = parse_lattice_file(&file)?;
            let method: EntropyMethod = method.parse()?;
            out.push_str(&line(&entropy_of(&l, method, exec).to_json()));
        }
        Command::Hnf { file } => {
            let v = match parse_lattice_file(&file)? {
                DynLattice::PAdic(l) => hnf_json(&l),
                DynLattice::Puiseux(l) => hnf_json(&l),
            };
            out.push_str(&line(&v));
        }
        Command::Smith { file } => {
            let v = match parse_lattice_file(&file)? {
                DynLattice::PAdic(l) => smith_json(&l)?,
                DynLattice::Puiseux(l) => smith_json(&l)?,
            };
            out.push_str(&line(&v));
        }
        Command::Phi(args) => {
            let l = parse_lattice_file(&args.file)?;
            let t = tropical_of(&l, exec);
            for v in points(&args, l.dim())? {
                let phi = t.phi_eval(&v)?;
                out.push_str(&line(&json!({"v": rationals_json(&v), "phi": phi.to_string()})));
            }
        }
        Command::Tail(args) => {
            let l = parse_lattice_file(&args.file)?;
            l.as_padic()?;
            let t = tropical_of(&l, exec);
            for v in points(&args, l.dim())? {
                let q = t.tail_prob(&integral(&v)?)?;
                out.push_str(&line(&json!({"v": rationals_json(&v), "tail": q.to_string()})));
            }
        }
        Command::Pmf(args) => {
            let l = parse_lattice_file(&args.file)?;
            l.as_padic()?;
            let t = tropical_of(&l, exec);
            if let (None, Some(b)) = (&args.v, &args.box_) {
                let (lo, hi) = parse_box(b)?;
                let rows = t.pmf_box(&lo, &hi, exec)?;
                let mut total = BigRational::from_integer(0.into());
                for (v, m) in &rows {
                    total += m;
                    out.push_str(&line(&json!({"v": int_strings(v), "pmf": m.to_string()})));
                }
                diag.push_str(&format!("total mass on box: {total}\n"));
            } else {
                for v in points(&args, l.dim())? {
                    let v = integral(&v)?;
                    out.push_str(&line(&json!({"v": int_strings(&v), "pmf": t.pmf_at(&v)?.to_string()})));
                }
            }
        }
        Command::Supermodular { file } => {
            let x = set_function_from_file(&file, exec)?;
            out.push_str(&line(&cones::supermodular_membership_with(&x, exec)?.to_json()));
        }
        Command::Ci { file, i, j, given } => {
            let l = parse_lattice_file(&file)?;
            let d = l.dim();
            if i == 0 || j == 0 || i > d || j > d {
                return err(Error::InvalidArgument(format!("indices must lie in 1..={d}")));
            }
            let h = entropy_of(&l, EntropyMethod::Hnf, exec);
            let holds = cones::ci_statement(&h, i - 1, j - 1, Subset::parse(&given, d)?)?;
            out.push_str(&line(&Value::Bool(holds)));
        }
        Command::Sample(args) => {
            let l = parse_lattice_file(&args.file)?;
            let l = l.as_padic()?;
            let precision = precision_for(&args)?;
            let batch = verify::sample_valuations(l, args.n, precision, args.seed, exec)?;
            if !batch.usable() {
                diag.push_str(&format!("warning: {:.2}% of samples censored\n", 100.0 * batch.censored_fraction()));
            }
            out.push_str(&line(&json!({
                "n": batch.n,
                "precision": batch.precision,
                "seed": batch.seed,
                "guard": batch.guard,
                "thresholds": batch.thresholds,
                "censored": batch.censored,
                "usable": batch.usable(),
                "valuations": batch.valuations,
            })));
        }
        Command::Report { sample, csv } => {
            let l = parse_lattice_file(&sample.file)?;
            let lp = l.as_padic()?;
            let (lo, hi) = match &sample.box_ {
                Some(b) => parse_box(b)?,
                None => return err(Error::InvalidArgument("report needs --box".into())),
            };
            let precision = precision_for(&sample)?;
            let batch = verify::sample_valuations(lp, sample.n, precision, sample.seed, exec)?;
            if !batch.usable() {
                return err(Error::InvalidArgument(format!(
                    "{:.2}% of samples censored; raise --precision",
                    100.0 * batch.censored_fraction()
                )));
            }
            let t = TropicalPolynomial::from_lattice(lp, exec);
            let rows = verify::empirical_tail_report(&batch, &t, &lo, &hi, exec)?;
            for r in &rows {
                out.push_str(&line(&r.to_json()));
            }
            let tested = rows.iter().filter(|r| r.z.is_some()).count();
            let worst = rows.iter().filter_map(|r| r.z).fold(0.0f64, |m, z| m.max(z.abs()));
            diag.push_str(&format!(
                "{} cells, {tested} with a z-score, max |z| = {worst:.3} (threshold 4 per cell, no multiplicity correction); censored {}/{}\n",
                rows.len(),
                batch.censored,
                batch.n
            ));
            if let Some(path) = csv {
                std::fs::write(&path, verify::tail_report_csv(&rows))
                    .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
            }
        }
        Command::Index { file, v, modexp } => {
            let l = parse_lattice_file(&file)?;
            let l = l.as_padic()?;
            let v = parse_ints(&v)?;
            let mut oracle = IndexOracle::new(l);
            let m = modexp.unwrap_or_else(|| oracle.default_modexp(&v));
            let index = oracle.index(&v, m)?;
            out.push_str(&line(&json!({"v": v, "modexp": m, "index": index.to_string()})));
        }
        Command::D3fan { file } => {
            let x = set_function_from_file(&file, exec)?;
            let w = cones::project_to_w(&x)?;
            out.push_str(&line(&json!({
                "w": w.to_json(),
                "in_C": cones::cone_c_membership(&w),
                "P": cones::fan_p_membership(&w).to_json(),
            })));
        }
        Command::S2pre { x1, x2, x12 } => {
            let (x1, x2, x12) = (parse_rational(&x1)?, parse_rational(&x2)?, parse_rational(&x12)?);
            let l = cones::s2_preimage(&x1, &x2, &x12)?;
            out.push_str(&line(&lattice_file_json(l.field(), l.basis())));
        }
        Command::ExportTropical { file } => {
            let l = parse_lattice_file(&file)?;
            out.push_str(&tropical_of(&l, exec).export_text());
        }
    }
    Ok((out, diag))
}

fn precision_for(args: &SampleArgs) -> Result<u32, Error> {
    if let Some(p) = args.precision {
        return Ok(p);
    }
    let top = match &args.box_ {
        Some(b) => parse_box(b)?.1.into_iter().max().unwrap_or(0),
        None => 10,
    };
    Ok((top.max(0) + 20) as u32)
}

/// Runs one command. Exit codes: 0 success, 1 domain error, 2 usage error.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (code, String::new(), text) };
        }
    };
    match dispatch(cli) {
        Ok((out, diag)) => (0, out, diag),
        Err(e) => (1, String::new(), format!("error: {e}\n")),
    }
}
