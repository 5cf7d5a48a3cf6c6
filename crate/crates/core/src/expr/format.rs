use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde_json::{json, Value};

use super::var::VarId;
use super::{is_negative_term, negate_term, Expr};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidInput(format!("unknown format '{other}'"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Latex => "latex",
            Format::Json => "json",
        })
    }
}

/// Renders an expression tree as written; normalize first for canonical output.
pub fn emit(e: &Expr, format: Format) -> String {
    match format {
        Format::Text => Printer::TEXT.expr(e),
        Format::Latex => Printer::LATEX.expr(e),
        Format::Json => to_json(e).to_string(),
    }
}

struct Printer {
    latex: bool,
}

impl Printer {
    const TEXT: Printer = Printer { latex: false };
    const LATEX: Printer = Printer { latex: true };

    fn expr(&self, e: &Expr) -> String {
        match e {
            Expr::Const(c) => self.constant(c),
            Expr::Var(v) => self.var(v),
            Expr::Sum(terms) => self.sum(terms),
            Expr::Product(f) => self.product(f),
            Expr::Pow(b, k) if *k < 0 => self.fraction("1".into(), &[self.denominator(b, -k)]),
            Expr::Pow(b, k) => self.power(b, *k),
        }
    }

    fn constant(&self, c: &Rational) -> String {
        if c.is_integer() || !self.latex {
            return c.to_string();
        }
        let sign = if c.is_negative() { "-" } else { "" };
        format!("{sign}\\frac{{{}}}{{{}}}", c.numer().abs(), c.denom())
    }

    fn var(&self, v: &VarId) -> String {
        if self.latex {
            v.latex()
        } else {
            v.to_string()
        }
    }

    fn paren(&self, s: String) -> String {
        if self.latex {
            format!("\\left({s}\\right)")
        } else {
            format!("({s})")
        }
    }

    fn sum(&self, terms: &[Expr]) -> String {
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, t) in terms.iter().enumerate() {
            let neg = is_negative_term(t);
            let body = if neg && i > 0 { negate_term(t) } else { t.clone() };
            if i > 0 {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&self.expr(&body));
        }
        out
    }

    /// A factor inside a product, parenthesized when it would bind loosely.
    fn factor(&self, e: &Expr, first: bool) -> String {
        match e {
            Expr::Sum(t) if t.len() > 1 => self.paren(self.sum(t)),
            Expr::Product(_) => self.paren(self.expr(e)),
            Expr::Const(c) if !first && (c.is_negative() || (!self.latex && !c.is_integer())) => {
                self.paren(self.constant(c))
            }
            _ => self.expr(e),
        }
    }

    fn product(&self, factors: &[Expr]) -> String {
        let mut num: Vec<&Expr> = Vec::new();
        let mut den: Vec<String> = Vec::new();
        for f in factors {
            match f {
                Expr::Pow(b, k) if *k < 0 => den.push(self.denominator(b, -k)),
                _ => num.push(f),
            }
        }
        let mut sign = "";
        if let Some(Expr::Const(c)) = num.first() {
            if (-c.clone()).is_one() && num.len() > 1 {
                sign = "-";
                num.remove(0);
            }
        }
        let joiner = if self.latex { " " } else { "*" };
        let num_str = if num.is_empty() {
            "1".to_string()
        } else if num.len() == 1 && !den.is_empty() && !self.latex {
            self.factor(num[0], false)
        } else if num.len() == 1 && self.latex {
            self.expr(num[0])
        } else {
            num.iter().enumerate().map(|(i, f)| self.factor(f, i == 0)).collect::<Vec<_>>().join(joiner)
        };
        if den.is_empty() {
            format!("{sign}{num_str}")
        } else {
            format!("{sign}{}", self.fraction(num_str, &den))
        }
    }

    fn fraction(&self, num: String, den: &[String]) -> String {
        if self.latex {
            return format!("\\frac{{{num}}}{{{}}}", den.join(" "));
        }
        if den.len() == 1 {
            format!("{num}/{}", den[0])
        } else {
            format!("{num}/({})", den.join("*"))
        }
    }

    /// `\frac` already groups its denominator.
    fn denominator(&self, b: &Expr, k: i64) -> String {
        if self.latex && k == 1 {
            self.expr(b)
        } else {
            self.power(b, k)
        }
    }

    fn power(&self, b: &Expr, k: i64) -> String {
        let base = match b {
            Expr::Var(_) => self.expr(b),
            Expr::Const(c) if c.is_integer() && !c.is_negative() => self.expr(b),
            Expr::Sum(t) if t.len() > 1 => self.paren(self.sum(t)),
            _ => self.paren(self.expr(b)),
        };
        if k == 1 {
            return base;
        }
        if self.latex {
            format!("{base}^{{{k}}}")
        } else {
            format!("{base}^{k}")
        }
    }
}

fn to_json(e: &Expr) -> Value {
    match e {
        Expr::Const(c) => json!({ "c": c.to_string() }),
        Expr::Var(v) => json!({ "v": { "kind": v.kind_name(), "idx": v.indices() } }),
        Expr::Sum(a) => json!({ "op": "+", "args": a.iter().map(to_json).collect::<Vec<_>>() }),
        Expr::Product(a) => json!({ "op": "*", "args": a.iter().map(to_json).collect::<Vec<_>>() }),
        Expr::Pow(b, k) => json!({ "op": "^", "args": [to_json(b), { "c": k.to_string() }] }),
    }
}

fn bad(message: impl Into<String>) -> Error {
    Error::Parse { position: 0, message: message.into() }
}

/// Parses an exact decimal-free rational `"p"` or `"p/q"`.
pub(crate) fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let ok = |t: &str| {
        let t = t.strip_prefix('-').unwrap_or(t);
        !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
    };
    match s.split_once('/') {
        None if ok(s) => Some(Rational::from_integer(s.parse::<BigInt>().ok()?)),
        Some((p, q)) if ok(p) && !q.is_empty() && q.bytes().all(|b| b.is_ascii_digit()) => {
            let p: BigInt = p.parse().ok()?;
            let q: BigInt = q.parse().ok()?;
            (q != BigInt::from(0)).then(|| Rational::new(p, q))
        }
        _ => None,
    }
}

/// Parses the JSON expression schema into a tree.
pub fn parse_json(src: &str) -> Result<Expr> {
    let v: Value = serde_json::from_str(src).map_err(|e| Error::Parse { position: e.column(), message: e.to_string() })?;
    from_json(&v)
}

fn from_json(v: &Value) -> Result<Expr> {
    let obj = v.as_object().ok_or_else(|| bad("expression node must be an object"))?;
    if let Some(c) = obj.get("c") {
        let s = c.as_str().ok_or_else(|| bad("constant must be a string"))?;
        return parse_rational(s).map(Expr::Const).ok_or_else(|| bad(format!("invalid rational '{s}'")));
    }
    if let Some(var) = obj.get("v") {
        let kind = var.get("kind").and_then(Value::as_str).ok_or_else(|| bad("variable needs a kind"))?;
        let idx: Vec<usize> = match var.get("idx") {
            None => Vec::new(),
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| x.as_u64().map(|i| i as usize).ok_or_else(|| bad("index must be a positive integer")))
                .collect::<Result<_>>()?,
            Some(_) => return Err(bad("idx must be an array")),
        };
        return VarId::from_kind_name(kind, &idx)
            .map(Expr::Var)
            .ok_or_else(|| bad(format!("invalid variable {kind}{idx:?}")));
    }
    let op = obj.get("op").and_then(Value::as_str).ok_or_else(|| bad("node needs c, v or op"))?;
    let args = obj.get("args").and_then(Value::as_array).ok_or_else(|| bad("op node needs args"))?;
    match op {
        "+" => Ok(Expr::Sum(args.iter().map(from_json).collect::<Result<_>>()?)),
        "*" => Ok(Expr::Product(args.iter().map(from_json).collect::<Result<_>>()?)),
        "^" => {
            if args.len() != 2 {
                return Err(bad("'^' takes two arguments"));
            }
            let base = from_json(&args[0])?;
            let Expr::Const(k) = from_json(&args[1])? else {
                return Err(bad("exponent must be a constant"));
            };
            if !k.is_integer() {
                return Err(bad("exponent must be an integer"));
            }
            let k: i64 = k.to_integer().try_into().map_err(|_| bad("exponent too large"))?;
            Ok(base.pow(k))
        }
        other => Err(bad(format!("unknown op '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::normalize;
    use super::*;

    fn uu(i: usize, j: usize) -> Expr {
        Expr::var(VarId::d2u(i, j))
    }

    #[test]
    fn latex_names() {
        let e = normalize(&(uu(1, 1) + uu(2, 2)), 2).unwrap();
        assert_eq!(emit(&e, Format::Latex), "u_{11} + u_{22}");
    }

    #[test]
    fn text_constant() {
        assert_eq!(emit(&Expr::rational(1, 2), Format::Text), "1/2");
        assert_eq!(emit(&Expr::rational(1, 2), Format::Latex), "\\frac{1}{2}");
    }

    #[test]
    fn text_of_normal_forms() {
        let u1 = Expr::var(VarId::du(1));
        let e = normalize(&(Expr::int(1) - Expr::int(2) * u1.clone() * uu(1, 2) + u1.clone().pow(2)), 2).unwrap();
        assert_eq!(emit(&e, Format::Text), "u_1^2 - 2*u_1*u_12 + 1");
        let f = normalize(&(uu(1, 1) / (u1.clone().pow(2) + Expr::int(1))), 1).unwrap();
        assert_eq!(emit(&f, Format::Text), "u_11/(u_1^2 + 1)");
        assert_eq!(emit(&f, Format::Latex), "\\frac{u_{11}}{u_{1}^{2} + 1}");
        let g = normalize(&(Expr::var(VarId::w()) / Expr::int(2)), 1).unwrap();
        assert_eq!(emit(&g, Format::Text), "1/2*w");
    }

    #[test]
    fn json_round_trip() {
        let e = Expr::rational(-3, 7) * uu(1, 2).pow(-2) + Expr::var(VarId::x(2)) + Expr::var(VarId::w());
        let s = emit(&e, Format::Json);
        assert_eq!(parse_json(&s).unwrap(), e);
    }

    #[test]
    fn json_rejects_decimals_and_bad_nodes() {
        assert!(parse_json(r#"{"c":"0.5"}"#).is_err());
        assert!(parse_json(r#"{"v":{"kind":"d2u","idx":[1]}}"#).is_err());
        assert!(parse_json(r#"{"op":"^","args":[{"c":"2"},{"c":"1/2"}]}"#).is_err());
        assert!(parse_json("[").is_err());
    }
}
