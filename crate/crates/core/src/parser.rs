//! The `.crn` text format.
//!
//! ```text
//! # comment
//! 0 -> 2A + B @ 1.0
//! A <-> 2B @ 1, 2/3
//! ```
//!
//! One statement per line. A missing rate means 1; a single rate on a
//! `<->` line applies to both directions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::network::{Complex, RateAssignment, ReactionNetwork};
use crate::Rational;

/// A parsed network together with its rates and the text it came from.
#[derive(Clone, Debug)]
pub struct NetworkDocument {
    pub network: ReactionNetwork,
    pub rates: RateAssignment,
    pub source_text: String,
}

impl NetworkDocument {
    pub fn new(network: ReactionNetwork, rates: RateAssignment) -> Self {
        let mut doc = NetworkDocument {
            network,
            rates,
            source_text: String::new(),
        };
        doc.source_text = format_network(&doc);
        doc
    }

    /// Same network and rates, ignoring the source text.
    pub fn same_model(&self, other: &NetworkDocument) -> bool {
        self.network == other.network && self.rates == other.rates
    }
}

struct Statement {
    line: usize,
    source: Vec<(String, u32)>,
    product: Vec<(String, u32)>,
    reversible: bool,
    rates: Vec<Rational>,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        message: message.into(),
    }
}

/// Character cursor over one line, reporting 1-based columns.
struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor {
            chars: text.char_indices().collect(),
            pos: 0,
            line,
            text,
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let start = self.chars.get(self.pos).map_or(self.text.len(), |&(b, _)| b);
        if self.text[start..].starts_with(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek().filter(|&c| f(c)) {
            out.push(c);
            self.pos += 1;
        }
        out
    }

    fn error(&self, message: impl Into<String>) -> Error {
        syntax(self.line, self.col(), message)
    }
}

fn parse_complex(cur: &mut Cursor<'_>, what: &str) -> Result<Vec<(String, u32)>> {
    cur.skip_ws();
    if cur.peek().is_none() {
        return Err(cur.error(format!("missing {what} complex")));
    }
    if cur.peek() == Some('0') {
        let start = cur.pos;
        let digits = cur.take_while(|c| c.is_ascii_digit());
        let after = cur.peek();
        if digits == "0" && !after.is_some_and(|c| c.is_alphabetic() || c == '_') {
            cur.skip_ws();
            if cur.peek() == Some('+') {
                return Err(cur.error("the empty complex cannot be combined with terms"));
            }
            return Ok(Vec::new());
        }
        cur.pos = start;
    }
    let mut terms = Vec::new();
    loop {
        cur.skip_ws();
        let start_col = cur.col();
        let digits = cur.take_while(|c| c.is_ascii_digit());
        let coef = if digits.is_empty() {
            1
        } else {
            match digits.parse::<u32>() {
                Ok(0) => return Err(syntax(cur.line, start_col, "coefficient must be positive")),
                Ok(v) => v,
                Err(_) => return Err(syntax(cur.line, start_col, "coefficient too large")),
            }
        };
        cur.skip_ws();
        match cur.peek() {
            Some(c) if c.is_alphabetic() => {}
            Some(_) => return Err(cur.error("expected species name")),
            None if digits.is_empty() => {
                return Err(cur.error(format!("missing {what} complex")));
            }
            None => return Err(syntax(cur.line, start_col, "coefficient without species")),
        }
        let name = cur.take_while(|c| c.is_alphanumeric() || c == '_');
        terms.push((name, coef));
        cur.skip_ws();
        if cur.peek() == Some('+') {
            cur.pos += 1;
            continue;
        }
        break;
    }
    Ok(terms)
}

/// Parses a decimal (`2`, `0.5`, `1e-3`) or fraction (`2/3`) literal exactly.
pub fn parse_rate(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = parse_signed_int(p)?;
        let q: BigInt = parse_signed_int(q)?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let scale = exponent - i32::try_from(frac_part.len()).ok()?;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(num * Pow::pow(&ten, scale.unsigned_abs()))
    } else {
        Rational::new(num, Pow::pow(&ten, scale.unsigned_abs()))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

fn parse_signed_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let body = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_rates(cur: &mut Cursor<'_>, reversible: bool) -> Result<Vec<Rational>> {
    let mut rates = Vec::new();
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            return Err(cur.error("missing rate after '@'"));
        }
        let col = cur.col();
        let tok = cur.take_while(|c| !c.is_whitespace() && c != ',');
        let value = parse_rate(&tok)
            .ok_or_else(|| syntax(cur.line, col, format!("invalid rate '{tok}'")))?;
        if !value.is_positive() {
            return Err(Error::NegativeRate(tok));
        }
        rates.push(value);
        cur.skip_ws();
        if cur.peek() == Some(',') {
            if !reversible || rates.len() == 2 {
                return Err(cur.error("too many rates for this reaction"));
            }
            cur.pos += 1;
            continue;
        }
        break;
    }
    if !cur.at_end() {
        return Err(cur.error("unexpected text after rate"));
    }
    Ok(rates)
}

fn parse_statement(text: &str, line: usize) -> Result<Option<Statement>> {
    let body = text.split('#').next().unwrap_or("");
    let mut cur = Cursor::new(body, line);
    if cur.at_end() {
        return Ok(None);
    }
    let source = parse_complex(&mut cur, "source")?;
    cur.skip_ws();
    let arrow_col = cur.col();
    let reversible = if cur.eat("<->") {
        true
    } else if cur.eat("->") {
        false
    } else if cur.peek().is_none() {
        return Err(cur.error("missing '->'"));
    } else {
        return Err(cur.error("expected '->' or '<->'"));
    };
    cur.skip_ws();
    if cur.peek().is_none() || cur.peek() == Some('@') {
        return Err(syntax(line, arrow_col, "missing product complex"));
    }
    let product = parse_complex(&mut cur, "product")?;
    cur.skip_ws();
    let rates = match cur.peek() {
        None => Vec::new(),
        Some('@') => {
            cur.pos += 1;
            parse_rates(&mut cur, reversible)?
        }
        Some(_) => return Err(cur.error("expected '+', '@' or end of line")),
    };
    Ok(Some(Statement {
        line,
        source,
        product,
        reversible,
        rates,
    }))
}

/// Parses `.crn` text into a validated network with rates.
pub fn parse_network(text: &str) -> Result<NetworkDocument> {
    let mut statements = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(st) = parse_statement(raw, i + 1)? {
            statements.push(st);
        }
    }
    if statements.is_empty() {
        return Err(Error::EmptyNetwork);
    }

    let mut species: Vec<String> = Vec::new();
    for st in &statements {
        for (name, _) in st.source.iter().chain(&st.product) {
            if !species.contains(name) {
                species.push(name.clone());
            }
        }
    }
    let to_complex = |terms: &[(String, u32)]| {
        let mut v = vec![0u32; species.len()];
        for (name, c) in terms {
            let i = species.iter().position(|s| s == name).expect("collected");
            v[i] += c;
        }
        Complex(v)
    };

    let mut pairs: Vec<(Complex, Complex, Rational, usize)> = Vec::new();
    for st in &statements {
        let s = to_complex(&st.source);
        let p = to_complex(&st.product);
        let forward = st.rates.first().cloned().unwrap_or_else(Rational::one);
        let backward = st.rates.get(1).cloned().unwrap_or_else(|| forward.clone());
        if st.reversible {
            pairs.push((p.clone(), s.clone(), backward, st.line));
        }
        pairs.push((s, p, forward, st.line));
    }
    let reactions: Vec<(Complex, Complex)> =
        pairs.iter().map(|(s, p, _, _)| (s.clone(), p.clone())).collect();
    let network = ReactionNetwork::new(&species, &reactions).map_err(|e| match e {
        Error::SelfLoop(r) => {
            let line = pairs
                .iter()
                .find(|(s, p, _, _)| s == p)
                .map_or(0, |t| t.3);
            Error::SelfLoop(format!("line {line}: {r}"))
        }
        other => other,
    })?;
    let mut rates = vec![Rational::one(); network.reactions().len()];
    for (s, p, k, _) in pairs {
        let r = network.reaction_index(&s, &p).expect("reaction present");
        rates[r] = k;
    }
    let rates = RateAssignment::new(&network, rates)?;
    Ok(NetworkDocument {
        network,
        rates,
        source_text: text.to_string(),
    })
}

/// Canonical rate literal: integer, terminating decimal, or `p/q`.
pub fn format_rate(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut a, mut b) = (0u32, 0u32);
    while d.is_even() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let k = a.max(b);
    let scaled = r * Rational::from_integer(Pow::pow(&BigInt::from(10), k));
    let n = scaled.to_integer();
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let k = k.to_usize().expect("small exponent");
    let digits = format!("{digits:0>width$}", width = k + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - k);
    format!("{}{int_part}.{frac_part}", if neg { "-" } else { "" })
}

/// Canonical text for a document. Lines follow canonical reaction order
/// except where an earlier line is needed to keep the species order.
pub fn format_network(doc: &NetworkDocument) -> String {
    let net = &doc.network;
    let species = net.species();
    let render = |r: usize| {
        let mut line = net.reaction_label(r);
        let k = doc.rates.get(r);
        if !k.is_one() {
            line.push_str(" @ ");
            line.push_str(&format_rate(k));
        }
        line
    };
    // species of a reaction in textual order
    let appearance = |r: usize| -> Vec<usize> {
        let mut out = Vec::new();
        for c in [net.source(r), net.product(r)] {
            for (i, &v) in c.0.iter().enumerate() {
                if v > 0 && !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        out
    };
    let mut seen = 0usize;
    let mut remaining: Vec<usize> = (0..net.reactions().len()).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let fits = |r: usize| {
            let fresh: Vec<usize> = appearance(r).into_iter().filter(|&i| i >= seen).collect();
            fresh.iter().enumerate().all(|(j, &i)| i == seen + j)
        };
        let pos = remaining.iter().position(|&r| fits(r)).unwrap_or(0);
        let r = remaining.remove(pos);
        let top = appearance(r).into_iter().max().map_or(0, |m| m + 1);
        seen = seen.max(top).min(species.len());
        order.push(r);
    }
    let mut out = String::new();
    for r in order {
        out.push_str(&render(r));
        out.push('\n');
    }
    out
}
