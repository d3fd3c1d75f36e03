//! Surface syntax for algebra elements.
//!
//! expr   := term (("+"|"-") term)*
//! term   := factor ("*" factor)*
//! factor := atom ["^" uint]           (q also admits a signed exponent)
//! atom   := "A" | "B" | "Bs" | "x(-1)" | "x0" | "x1"
//!         | "a" | "b" | "c" | "d" | "E" | "F" | "K" | "Kinv"
//!         | "1" | decimal | "q" ["^" int] | "i" | "(" expr ")"
//!
//! No implicit multiplication; "Bs" stands for B*.

use podles_core::ncalg::{AlgebraElement, AlgebraId, Gen, Monomial};
use podles_core::scalars::{Cplx, MpReal, Real, ScalarContext};

type R = MpReal;
type Ctx = ScalarContext<R>;
type Elem = AlgebraElement<R>;

#[derive(Debug, Clone)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at column {}: {}", self.position + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Caret,
    Star,
    Plus,
    Minus,
    LPar,
    RPar,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LPar));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RPar));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // scientific exponent, sign included
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                match text.parse::<f64>() {
                    Ok(v) => out.push((start, Tok::Num(v))),
                    Err(_) => return err(start, format!("bad number literal '{text}'")),
                }
            }
            'A'..='Z' | 'a'..='z' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'A'..='Z' | 'a'..='z' | '0'..='9')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            _ => return err(i, format!("unexpected character '{c}'")),
        }
    }
    Ok(out)
}

/// A parsed value: a bare scalar or an algebra element. Scalars stay
/// algebra-neutral until combined with an element.
#[derive(Clone)]
enum Val {
    Scalar(Cplx<R>),
    El(Elem),
}

impl Val {
    fn into_element(self, ctx: &Ctx) -> (AlgebraId, Elem) {
        match self {
            Val::El(e) => (e.algebra, e),
            // a pure scalar is reported as a sphere element
            Val::Scalar(c) => (
                AlgebraId::Sphere,
                AlgebraElement::unit(AlgebraId::Sphere, ctx).scale(&c),
            ),
        }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ctx: &'a Ctx,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let p = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => err(p, format!("expected {what}")),
        }
    }

    fn combine_err(&self, p: usize, e: podles_core::CoreError) -> ParseError {
        ParseError {
            position: p,
            message: match e {
                podles_core::CoreError::AlgebraMismatch(_) => "mixed algebras".to_string(),
                other => other.to_string(),
            },
        }
    }

    fn expr(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.term()?;
        loop {
            let p = self.here();
            let sign = match self.peek() {
                Some(Tok::Plus) => 1.0,
                Some(Tok::Minus) => -1.0,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            acc = self.add(acc, rhs, sign, p)?;
        }
        Ok(acc)
    }

    fn add(&self, lhs: Val, rhs: Val, sign: f64, p: usize) -> Result<Val, ParseError> {
        let ctx = self.ctx;
        let s = ctx.cplx(sign, 0.0);
        match (lhs, rhs) {
            (Val::Scalar(a), Val::Scalar(b)) => Ok(Val::Scalar(a + b * s)),
            (Val::El(a), Val::El(b)) => a
                .add(&b.scale(&s), ctx)
                .map(Val::El)
                .map_err(|e| self.combine_err(p, e)),
            (Val::Scalar(a), Val::El(b)) => {
                let unit = AlgebraElement::unit(b.algebra, ctx).scale(&a);
                unit.add(&b.scale(&s), ctx)
                    .map(Val::El)
                    .map_err(|e| self.combine_err(p, e))
            }
            (Val::El(a), Val::Scalar(b)) => {
                let unit = AlgebraElement::unit(a.algebra, ctx).scale(&(b * s));
                a.add(&unit, ctx)
                    .map(Val::El)
                    .map_err(|e| self.combine_err(p, e))
            }
        }
    }

    fn term(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            let p = self.here();
            self.bump();
            let rhs = self.factor()?;
            acc = self.mul(acc, rhs, p)?;
        }
        Ok(acc)
    }

    fn mul(&self, lhs: Val, rhs: Val, p: usize) -> Result<Val, ParseError> {
        let ctx = self.ctx;
        match (lhs, rhs) {
            (Val::Scalar(a), Val::Scalar(b)) => Ok(Val::Scalar(a * b)),
            (Val::Scalar(a), Val::El(b)) => Ok(Val::El(b.scale(&a))),
            (Val::El(a), Val::Scalar(b)) => Ok(Val::El(a.scale(&b))),
            (Val::El(a), Val::El(b)) => a
                .multiply(&b, ctx)
                .map(Val::El)
                .map_err(|e| self.combine_err(p, e)),
        }
    }

    fn factor(&mut self) -> Result<Val, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            let p = self.here();
            self.bump();
            let ep = self.here();
            let n = match self.bump() {
                Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 => v as u64,
                _ => return err(ep, "expected a nonnegative integer exponent"),
            };
            return self.pow(base, n, p);
        }
        Ok(base)
    }

    fn pow(&self, base: Val, n: u64, p: usize) -> Result<Val, ParseError> {
        let ctx = self.ctx;
        match base {
            Val::Scalar(c) => {
                let mut acc = ctx.cone();
                for _ in 0..n {
                    acc = acc * c.clone();
                }
                Ok(Val::Scalar(acc))
            }
            Val::El(e) => {
                let mut acc = AlgebraElement::unit(e.algebra, ctx);
                for _ in 0..n {
                    acc = acc.multiply(&e, ctx).map_err(|er| self.combine_err(p, er))?;
                }
                Ok(Val::El(acc))
            }
        }
    }

    fn atom(&mut self) -> Result<Val, ParseError> {
        let ctx = self.ctx;
        let p = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Val::Scalar(ctx.cplx(v, 0.0))),
            Some(Tok::LPar) => {
                let v = self.expr()?;
                self.expect(Tok::RPar, "')'")?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "A" => Ok(Val::El(AlgebraElement::generator(Gen::A, ctx))),
                "B" => Ok(Val::El(AlgebraElement::generator(Gen::B, ctx))),
                "Bs" => Ok(Val::El(AlgebraElement::generator(Gen::Bs, ctx))),
                "a" => Ok(Val::El(AlgebraElement::generator(Gen::Qa, ctx))),
                "b" => Ok(Val::El(AlgebraElement::generator(Gen::Qb, ctx))),
                "c" => Ok(Val::El(AlgebraElement::generator(Gen::Qc, ctx))),
                "d" => Ok(Val::El(AlgebraElement::generator(Gen::Qd, ctx))),
                "E" => Ok(Val::El(AlgebraElement::generator(Gen::E, ctx))),
                "F" => Ok(Val::El(AlgebraElement::generator(Gen::F, ctx))),
                "K" => Ok(Val::El(AlgebraElement::generator(Gen::K, ctx))),
                "Kinv" => Ok(Val::El(AlgebraElement::generator(Gen::Kinv, ctx))),
                "i" => Ok(Val::Scalar(ctx.i())),
                "q" => {
                    // q admits a signed integer exponent
                    if matches!(self.peek(), Some(Tok::Caret)) {
                        self.bump();
                        let neg = if matches!(self.peek(), Some(Tok::Minus)) {
                            self.bump();
                            true
                        } else {
                            false
                        };
                        let ep = self.here();
                        let n = match self.bump() {
                            Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 => v as i64,
                            _ => return err(ep, "expected an integer exponent after q^"),
                        };
                        let e = if neg { -n } else { n };
                        Ok(Val::Scalar(Cplx::from_real(ctx.q_powi(e))))
                    } else {
                        Ok(Val::Scalar(Cplx::from_real(ctx.q())))
                    }
                }
                "x0" => Ok(Val::El(x_sphere(0, ctx))),
                "x1" => Ok(Val::El(x_sphere(1, ctx))),
                "x" => {
                    // only "x(-1)" reaches here
                    self.expect(Tok::LPar, "'(' in x(-1)")?;
                    self.expect(Tok::Minus, "'-' in x(-1)")?;
                    let ep = self.here();
                    match self.bump() {
                        Some(Tok::Num(v)) if (v - 1.0).abs() < 1e-9 => {}
                        _ => return err(ep, "expected x(-1)"),
                    }
                    self.expect(Tok::RPar, "')' in x(-1)")?;
                    Ok(Val::El(x_sphere(-1, ctx)))
                }
                other => err(p, format!("unknown generator '{other}'")),
            },
            _ => err(p, "expected an atom"),
        }
    }
}

/// x_{-1} = (1+q^-2)^{1/2} B, x_0 = 1 - (1+q^2) A, x_1 = -(1+q^2)^{1/2} B*
/// as sphere elements.
fn x_sphere(i: i64, ctx: &Ctx) -> Elem {
    match i {
        -1 => AlgebraElement::generator(Gen::B, ctx)
            .scale(&Cplx::from_real((ctx.one() + ctx.q_powi(-2)).sqrt())),
        0 => {
            let a = AlgebraElement::generator(Gen::A, ctx)
                .scale(&Cplx::from_real(ctx.one() + ctx.q_powi(2)));
            AlgebraElement::unit(AlgebraId::Sphere, ctx)
                .sub(&a, ctx)
                .expect("same algebra")
        }
        1 => AlgebraElement::generator(Gen::Bs, ctx)
            .scale(&-Cplx::from_real((ctx.one() + ctx.q_powi(2)).sqrt())),
        _ => unreachable!(),
    }
}

/// Parses a source string into a normal-form element, inferring the
/// algebra from the generators used (pure scalars report as sphere).
pub fn parse(src: &str, ctx: &Ctx) -> Result<(AlgebraId, Elem), ParseError> {
    if src.trim().is_empty() {
        return err(0, "empty expression");
    }
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        ctx,
        src_len: src.len(),
    };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return err(p.here(), "trailing input");
    }
    Ok(v.into_element(ctx))
}

fn dec(x: f64) -> String {
    format!("{x:.16e}")
}

fn coeff_text(c: &Cplx<R>) -> String {
    let re = c.re.to_f64();
    let im = c.im.to_f64();
    if im == 0.0 {
        if re >= 0.0 {
            dec(re)
        } else {
            format!("(0 - {})", dec(-re))
        }
    } else {
        let re_part = if re >= 0.0 {
            dec(re)
        } else {
            format!("0 - {}", dec(-re))
        };
        let im_part = if im >= 0.0 {
            format!(" + {}*i", dec(im))
        } else {
            format!(" - {}*i", dec(-im))
        };
        format!("({re_part}{im_part})")
    }
}

fn mono_text(algebra: AlgebraId, m: &Monomial) -> String {
    let names: &[&str] = match algebra {
        AlgebraId::Sphere => &["A", "B", "Bs"],
        AlgebraId::Suq2 => &["a", "b", "c", "d"],
        AlgebraId::Uq => &["F", "K", "E"],
    };
    let mut parts = Vec::new();
    for (idx, name) in names.iter().enumerate() {
        let e = m.e[idx];
        if e == 0 {
            continue;
        }
        // the K exponent may be negative: print Kinv
        let (label, count) = if algebra == AlgebraId::Uq && idx == 1 && e < 0 {
            ("Kinv", -e)
        } else {
            (*name, e)
        };
        if count == 1 {
            parts.push(label.to_string());
        } else {
            parts.push(format!("{label}^{count}"));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Prints an element so that `parse(print(e))` reparses to an element
/// equal to `e` (coefficients rendered as 17-digit decimals).
pub fn print_element(el: &Elem, ctx: &Ctx) -> String {
    let _ = ctx;
    if el.terms.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (m, c) in &el.terms {
        let mono = mono_text(el.algebra, m);
        let re = c.re.to_f64();
        let im = c.im.to_f64();
        let piece = if re == 1.0 && im == 0.0 {
            mono
        } else if mono == "1" {
            coeff_text(c)
        } else {
            format!("{}*{mono}", coeff_text(c))
        };
        parts.push(piece);
    }
    parts.join(" + ")
}
