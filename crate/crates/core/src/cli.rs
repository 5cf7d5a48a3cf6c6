//! The `invpde` command line: `generate`, `invariants` and `verify`.

use std::io::Write;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::conformal::{conformal_traces, generate_conformal_pde};
use crate::error::{Error, Result};
use crate::euclidean::{generate_euclidean_pde, power_traces};
use crate::expr::format::parse_rational;
use crate::expr::{emit, Evaluator, Format};
use crate::harness::run_invariance_suite;
use crate::invariant::{Family, InvariantPde, InvariantPoly};
use crate::jet::JetPoint2;
use crate::Rational;

#[derive(Parser, Debug)]
#[command(name = "invpde", version, about = "Invariant second-order PDEs for hypersurface graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the cleared numerator of F(τ) = 0 and the cleared factor.
    Generate {
        #[arg(long)]
        group: Family,
        #[arg(short = 'n')]
        n: usize,
        /// e.g. "1/2*t1^2 - 1/2*t2" or "c2^3 - 2*c3^2".
        #[arg(long)]
        poly: String,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Evaluate τ_1..τ_n (or τ°_2..τ°_n) at a jet read from a JSON file.
    Invariants {
        #[arg(long)]
        group: Family,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        jet: std::path::PathBuf,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Run a randomized invariance suite and print its report.
    Verify {
        #[arg(long)]
        suite: Family,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Parses `Σ coef * s_k^e * ...` over the symbols of `family`, then checks
/// symbol ranges for `n` and homogeneity for the conformal family.
pub fn parse_poly(spec: &str, family: Family, n: usize) -> Result<InvariantPoly> {
    let poly = Parser0 { src: spec.as_bytes(), pos: 0, family }.poly()?;
    poly.validate(n)?;
    Ok(poly)
}

struct Parser0<'a> {
    src: &'a [u8],
    pos: usize,
    family: Family,
}

impl Parser0<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn poly(&mut self) -> Result<InvariantPoly> {
        let mut out = InvariantPoly::new(self.family);
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let mut first = true;
        while let Some(c) = self.peek() {
            let sign = match c {
                b'+' | b'-' => {
                    self.pos += 1;
                    if c == b'-' {
                        -Rational::from_integer(1.into())
                    } else {
                        Rational::from_integer(1.into())
                    }
                }
                _ if first => Rational::from_integer(1.into()),
                _ => return self.err("expected '+' or '-'"),
            };
            first = false;
            let (coef, powers) = self.term()?;
            out.add_term(sign * coef, &powers);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Rational, Vec<(usize, u32)>)> {
        let mut coef = Rational::from_integer(1.into());
        let mut powers = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => coef *= self.number()?,
                Some(c) if c.is_ascii_alphabetic() => powers.push(self.symbol()?),
                Some(_) => return self.err("expected a coefficient or a symbol"),
                None => return self.err("unexpected end of input"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((coef, powers));
            }
        }
    }

    fn number(&mut self) -> Result<Rational> {
        let start = self.pos;
        let p = self.digits().expect("caller saw a digit").to_string();
        let mut text = p;
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            match self.digits() {
                Some(q) => text = format!("{text}/{q}"),
                None => return self.err("expected a denominator"),
            }
        }
        match parse_rational(&text) {
            Some(r) => Ok(r),
            None => Err(Error::Parse { position: start, message: format!("invalid coefficient '{text}'") }),
        }
    }

    fn symbol(&mut self) -> Result<(usize, u32)> {
        let start = self.pos;
        if self.src[self.pos] != self.family.prefix() as u8 {
            return self.err(format!("expected a symbol '{}k'", self.family.prefix()));
        }
        self.pos += 1;
        let Some(k) = self.digits() else {
            return self.err("expected a symbol index");
        };
        let k: usize = k.parse().map_err(|_| Error::Parse { position: start, message: "index too large".into() })?;
        let mut e = 1u32;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let Some(d) = self.digits() else {
                return self.err("expected an exponent");
            };
            e = d.parse().map_err(|_| Error::Parse { position: start, message: "exponent too large".into() })?;
        }
        Ok((k, e))
    }
}

/// Equation for `spec` in family `group`, dimension `n`.
pub fn generate(group: Family, n: usize, spec: &str) -> Result<InvariantPde> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if group == Family::Conformal && n < 2 {
        return Err(Error::NoInvariants);
    }
    let f = parse_poly(spec, group, n)?;
    match group {
        Family::Euclidean => generate_euclidean_pde(&f, n),
        Family::Conformal => generate_conformal_pde(&f, n),
    }
}

fn render_pde(pde: &InvariantPde, spec: &str, format: Format) -> String {
    let num = pde.numerator_expr();
    let den = pde.cleared_expr();
    let cleared = |f: Format| match (pde.cleared_w_power(), f) {
        (Some(k), Format::Latex) => format!("(\\sqrt{{\\det g}})^{{{k}}}"),
        (Some(k), _) => format!("w^{k}"),
        (None, _) => emit(&den, f),
    };
    match format {
        Format::Text => format!(
            "{} = 0\ncleared: {}\nscale: {}\npolynomial: {}\n",
            emit(&num, Format::Text),
            cleared(Format::Text),
            pde.scale,
            pde.polynomial
        ),
        Format::Latex => format!("{} = 0\n% cleared factor: {}\n", emit(&num, Format::Latex), cleared(Format::Latex)),
        Format::Json => {
            let parse = |s: String| serde_json::from_str::<Value>(&s).expect("emitter writes valid JSON");
            let v = json!({
                "group": pde.family,
                "n": pde.n,
                "poly": spec,
                "numerator": parse(emit(&num, Format::Json)),
                "cleared": parse(emit(&den, Format::Json)),
                "scale": pde.scale.to_string(),
                "polynomial": pde.polynomial,
                "cleared_w_power": pde.cleared_w_power(),
            });
            format!("{v}\n")
        }
    }
}

/// `(name, value)` for every invariant symbol of `group` at `p`.
pub fn invariant_values(group: Family, p: &JetPoint2) -> Result<Vec<(String, f64)>> {
    let (exprs, first) = match group {
        Family::Euclidean => (power_traces(p.n), 1),
        Family::Conformal => (conformal_traces(p.n)?, 2),
    };
    exprs
        .iter()
        .enumerate()
        .map(|(i, e)| Ok((format!("{}{}", group.prefix(), i + first), Evaluator::new(e).eval(&|v| p.value(v))?)))
        .collect()
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::InvalidInput(e.to_string());
    match cmd {
        Command::Generate { group, n, poly, format } => {
            let pde = generate(group, n, &poly)?;
            write!(out, "{}", render_pde(&pde, &poly, format)).map_err(io)?;
            Ok(0)
        }
        Command::Invariants { group, n, jet, format } => {
            let src = std::fs::read_to_string(&jet).map_err(|e| Error::InvalidInput(format!("{}: {e}", jet.display())))?;
            let p = JetPoint2::from_json(&src)?;
            if p.n != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.n });
            }
            let values = invariant_values(group, &p)?;
            match format {
                Format::Json => {
                    let map: serde_json::Map<String, Value> = values.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
                    writeln!(out, "{}", json!({"group": group, "n": n, "values": map})).map_err(io)?;
                }
                Format::Latex => {
                    for (i, (_, v)) in values.iter().enumerate() {
                        let k = i + group.first_symbol();
                        writeln!(out, "{} = {v}", group.latex_symbol(k)).map_err(io)?;
                    }
                }
                Format::Text => {
                    for (k, v) in &values {
                        writeln!(out, "{k} = {v}").map_err(io)?;
                    }
                }
            }
            Ok(0)
        }
        Command::Verify { suite, n, trials, tol, seed } => {
            let report = run_invariance_suite(suite, n, trials, tol, seed)?;
            writeln!(out, "{}", report.to_json()).map_err(io)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the exit
/// code: 0 on success, 1 on suite failures, 2 on usage or input errors.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
