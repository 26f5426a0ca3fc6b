//! Text input: elements, polynomials, subgroups and characters.
//!
//! Elements use `+ - * / ^`, parentheses, integers (read mod p), the base
//! variable, the Laurent variables and `zeta` (the generator g). A number
//! followed directly by a name multiplies, so `3x` is `3*x`.

use super::{BasisIndex, Context, Elem, FieldError, FieldTower, KClass, Poly};
use crate::linalg_fl::Subspace;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Name(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, FieldError> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| FieldError::Parse(format!("number {t} too large")))?));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Name(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(FieldError::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    k: &'a FieldTower,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Elem, FieldError> {
        let n = self.k.top();
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = self.k.add_at(n, &acc, &t);
            } else if self.eat('-') {
                let t = self.term()?;
                acc = self.k.sub_at(n, &acc, &t);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Elem, FieldError> {
        let n = self.k.top();
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let f = self.unary()?;
                acc = self.k.mul_at(n, &acc, &f);
            } else if self.eat('/') {
                let f = self.unary()?;
                acc = self.k.mul_at(n, &acc, &self.k.inv_at(n, &f)?);
            } else if matches!(self.peek(), Some(Tok::Name(_)) | Some(Tok::Op('('))) {
                let f = self.unary()?;
                acc = self.k.mul_at(n, &acc, &f);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Elem, FieldError> {
        if self.eat('-') {
            let a = self.unary()?;
            return Ok(self.k.neg_at(self.k.top(), &a));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Elem, FieldError> {
        let a = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.peek() {
                Some(Tok::Num(e)) => *e,
                other => return Err(FieldError::Parse(format!("expected an exponent, got {other:?}"))),
            };
            self.pos += 1;
            return self.k.pow_at(self.k.top(), &a, if neg { -e } else { e });
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Elem, FieldError> {
        let k = self.k;
        let n = k.top();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(k.constant_at(n, k.field().from_int(v)))
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                if name == "zeta" {
                    return Ok(k.constant_at(n, k.generator()));
                }
                if k.base_var() == Some(name.as_str()) {
                    let x = Elem::Rat(k.rat(Poly::x(), Poly::one())?);
                    return Ok(k.lift(0, n, x));
                }
                match k.vars().iter().position(|v| *v == name) {
                    Some(j) => Ok(k.lift(j + 1, n, k.var_elem(j + 1))),
                    None => Err(FieldError::Parse(format!("unknown name {name:?}"))),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(FieldError::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(FieldError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

// Top-level split on a separator outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl FieldTower {
    pub fn parse_elem(&self, s: &str) -> Result<Elem, FieldError> {
        let toks = lex(s)?;
        if toks.is_empty() {
            return Err(FieldError::Parse("empty expression".into()));
        }
        let mut p = Parser { k: self, toks, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(FieldError::Parse(format!("trailing input in {s:?}")));
        }
        Ok(e)
    }

    /// A polynomial in the base variable.
    pub fn parse_poly(&self, s: &str) -> Result<Poly, FieldError> {
        if !self.is_rational() {
            return Err(FieldError::Parse("polynomials need a rational base".into()));
        }
        let base = self.residue_tower(self.top())?;
        match base.parse_elem(s)? {
            Elem::Rat(r) if r.den.is_one() => Ok(r.num),
            _ => Err(FieldError::Parse(format!("{s:?} is not a polynomial"))),
        }
    }

    /// The class of an element expression, in context coordinates.
    pub fn parse_class(&self, ctx: &Context, s: &str) -> Result<Vec<u8>, FieldError> {
        let c = self.class_of(&self.parse_elem(s)?)?;
        ctx.to_dense(&c).map_err(|_| FieldError::OutOfContext(format!("class of {s:?} leaves the context")))
    }

    /// Comma-separated generators; `0` or empty is the trivial group, `full` the whole space.
    pub fn parse_subgroup(&self, ctx: &Context, s: &str) -> Result<Subspace, FieldError> {
        let t = s.trim();
        let n = ctx.dim();
        if t.is_empty() || t == "0" || t == "1" {
            return Ok(Subspace::zero(self.ell, n));
        }
        if t == "full" {
            return Ok(Subspace::full(self.ell, n));
        }
        let gens = split_top(t, ',').into_iter().map(|g| self.parse_class(ctx, g)).collect::<Result<Vec<_>, _>>()?;
        Ok(Subspace::span(self.ell, n, &gens)?)
    }

    /// A basis label named as an element whose class is a single basis vector.
    pub fn parse_basis_name(&self, s: &str) -> Result<BasisIndex, FieldError> {
        let c: KClass = self.class_of(&self.parse_elem(s)?)?;
        let mut it = c.iter();
        match (it.next(), it.next()) {
            (Some((b, 1)), None) => Ok(b.clone()),
            _ => Err(FieldError::Parse(format!("{s:?} does not name a basis class"))),
        }
    }

    /// Dual vector such as `s* + 2 t*` or `zeta* - (x+1)*`, in context coordinates.
    pub fn parse_character(&self, ctx: &Context, s: &str) -> Result<Vec<u8>, FieldError> {
        let ell = self.ell;
        let mut out = vec![0u8; ctx.dim()];
        // turn top-level '-' into '+-' so that splitting on '+' keeps signs
        let mut norm = String::new();
        let mut depth = 0;
        for c in s.chars() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '-' if depth == 0 => {
                    norm.push_str("+-");
                    continue;
                }
                _ => {}
            }
            norm.push(c);
        }
        for raw in split_top(&norm, '+') {
            let mut term = raw.trim();
            if term.is_empty() {
                continue;
            }
            let mut sign: i64 = 1;
            if let Some(rest) = term.strip_prefix('-') {
                sign = -1;
                term = rest.trim();
            }
            let term = term
                .strip_suffix('*')
                .ok_or_else(|| FieldError::Parse(format!("character term {raw:?} must end in '*'")))?
                .trim();
            let digits: String = term.chars().take_while(|c| c.is_ascii_digit()).collect();
            let (coef, name) = if digits.is_empty() {
                (1, term)
            } else {
                let rest = term[digits.len()..].trim_start();
                let rest = rest.strip_prefix('*').unwrap_or(rest).trim();
                (digits.parse::<i64>().map_err(|_| FieldError::Parse(format!("bad coefficient in {raw:?}")))?, rest)
            };
            let b = self.parse_basis_name(name)?;
            let i = ctx.position(&b).ok_or_else(|| FieldError::OutOfContext(format!("{name:?} is not in the context")))?;
            out[i] = crate::linalg_fl::reduce_i64(out[i] as i64 + sign * coef, ell);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::super::Base;
    use super::*;

    fn rat_tower() -> FieldTower {
        FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec!["t".into()]).unwrap()
    }

    #[test]
    fn elements() {
        let k = rat_tower();
        let a = k.parse_elem("(x+1)^2 * t^-1").unwrap();
        let b = k.parse_elem("(x^2 + 2x + 1)/t").unwrap();
        assert_eq!(a, b);
        assert_eq!(k.parse_elem("8").unwrap(), k.parse_elem("1").unwrap());
        assert!(k.parse_elem("y").is_err());
        assert!(k.parse_elem("(x").is_err());
        assert!(k.parse_elem("1/(1+t)").is_err());
        assert_eq!(k.parse_poly("x-1").unwrap(), Poly::from_coeffs(vec![6, 1]));
    }

    #[test]
    fn subgroups_and_characters() {
        let k = rat_tower();
        let ctx = k.context(&[Poly::from_coeffs(vec![1, 1])]).unwrap();
        let h = k.parse_subgroup(&ctx, "zeta, (x+1)*t").unwrap();
        assert_eq!(h.dim(), 2);
        assert!(h.contains(&[0, 1, 1]));
        assert!(k.parse_subgroup(&ctx, "x").is_err());
        assert_eq!(k.parse_character(&ctx, "t* + 2 zeta*").unwrap(), vec![2, 0, 1]);
        assert_eq!(k.parse_character(&ctx, "-(x+1)*").unwrap(), vec![0, 2, 0]);
        assert_eq!(k.parse_subgroup(&ctx, "full").unwrap().dim(), 3);
    }
}
