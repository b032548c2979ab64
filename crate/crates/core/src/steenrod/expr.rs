//! Parser for sums of words in Steenrod operations.
//!
//! ```text
//! expr  := term (('+'|'-') term)*
//! term  := [int] word | int
//! word  := token+
//! token := Sq<k> | P<k> | Q<k> | b | Sq(r1,r2,..) | P(r1,r2,..)
//! ```
//! `Sq^k`, `P^k` and `Q_k` are accepted as spellings of the same tokens.
//! The parenthesized forms name Milnor basis elements directly, which is
//! what the printer emits.

use super::{Milnor, MilnorElement, Profile};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{token} at {pos} is not in {algebra}")]
    OutsideProfile { token: String, pos: usize, algebra: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Sq(u32),
    P(u32),
    Q(u32),
    Bockstein,
    MilnorSq(Vec<u32>),
    MilnorP(Vec<u32>),
}

impl Token {
    fn monomial(&self) -> Milnor {
        match self {
            Token::Sq(k) | Token::P(k) => Milnor::p_part(&[*k]),
            Token::MilnorSq(r) | Token::MilnorP(r) => Milnor::p_part(r),
            Token::Q(k) => Milnor::q_i(*k as usize),
            Token::Bockstein => Milnor::q_i(0),
        }
    }

    fn allowed_at(&self, p: u32) -> bool {
        match self {
            Token::Sq(_) | Token::MilnorSq(_) => p == 2,
            _ => p > 2,
        }
    }
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<u32, ExprError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("integer out of range")
        })
    }

    fn list(&mut self) -> Result<Vec<u32>, ExprError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            out.push(self.int()?);
            self.skip_ws();
            if self.eat(",") {
                continue;
            }
            if self.eat(")") {
                return Ok(out);
            }
            return self.err("expected ',' or ')'");
        }
    }

    fn token(&mut self) -> Result<Option<Token>, ExprError> {
        if self.eat("Sq") {
            if self.eat("(") {
                return Ok(Some(Token::MilnorSq(self.list()?)));
            }
            self.eat("^");
            return Ok(Some(Token::Sq(self.int()?)));
        }
        if self.eat("P") {
            if self.eat("(") {
                return Ok(Some(Token::MilnorP(self.list()?)));
            }
            self.eat("^");
            return Ok(Some(Token::P(self.int()?)));
        }
        if self.eat("Q") {
            self.eat("_");
            return Ok(Some(Token::Q(self.int()?)));
        }
        if self.peek() == Some(b'b') {
            let next = self.s.get(self.pos + 1).copied();
            if next.is_none_or(|c| !c.is_ascii_alphanumeric() || c == b'P' || c == b'Q' || c == b'S' || c == b'b') {
                self.pos += 1;
                return Ok(Some(Token::Bockstein));
            }
        }
        if self.eat("β") {
            return Ok(Some(Token::Bockstein));
        }
        Ok(None)
    }
}

/// Parses a single token such as `Sq4`, `P1`, `Q1` or `b`.
pub fn parse_token(text: &str) -> Option<Token> {
    let mut lx = Lexer { s: text.as_bytes(), pos: 0 };
    let t = lx.token().ok()??;
    (lx.pos == text.len()).then_some(t)
}

/// Parses and evaluates an expression in the given profile.
pub fn parse_expr(text: &str, profile: &Profile) -> Result<MilnorElement, ExprError> {
    let p = profile.p;
    let mut lx = Lexer { s: text.as_bytes(), pos: 0 };
    let mut total = MilnorElement::zero(p);
    let mut sign = 1u32;
    let mut first = true;
    loop {
        lx.skip_ws();
        if first {
            if lx.eat("-") {
                sign = p - 1;
            } else {
                lx.eat("+");
            }
            lx.skip_ws();
        }
        let mut coef = 1u32;
        let mut saw_int = false;
        if lx.peek().is_some_and(|c| c.is_ascii_digit()) {
            coef = lx.int()? % p;
            saw_int = true;
        }
        let mut word = MilnorElement::unit(p);
        let mut tokens = 0;
        loop {
            lx.skip_ws();
            let start = lx.pos;
            let Some(tok) = lx.token()? else { break };
            if !tok.allowed_at(p) {
                return Err(ExprError::Syntax {
                    pos: start,
                    msg: if p == 2 { "only Sq tokens at p = 2".into() } else { "Sq tokens need p = 2".into() },
                });
            }
            let m = tok.monomial();
            if !profile.contains(&m) {
                return Err(ExprError::OutsideProfile {
                    token: String::from_utf8_lossy(&lx.s[start..lx.pos]).into_owned(),
                    pos: start,
                    algebra: profile.name.clone(),
                });
            }
            word = word.multiply(&MilnorElement::monomial(p, m, 1));
            tokens += 1;
        }
        if tokens == 0 && !saw_int {
            return lx.err("expected a term");
        }
        total.add(&word, coef * sign % p);
        lx.skip_ws();
        match lx.peek() {
            None => return Ok(total),
            Some(b'+') => sign = 1,
            Some(b'-') => sign = p - 1,
            Some(_) => return lx.err("expected '+', '-' or end of input"),
        }
        lx.pos += 1;
        first = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steenrod::Algebra;
    use proptest::prelude::*;

    #[test]
    fn single_token() {
        let e = parse_expr("Sq1", &Profile::a(1)).unwrap();
        assert_eq!(e, MilnorElement::monomial(2, Milnor::p_part(&[1]), 1));
        assert_eq!(parse_expr("  Sq^1 ", &Profile::a(1)).unwrap(), e);
    }

    #[test]
    fn adem_sum_in_a3() {
        let a3 = Profile::a(3);
        let e = parse_expr("Sq4 Sq6 + Sq6 Sq4", &a3).unwrap();
        assert!(!e.is_zero());
        assert_eq!(e.degree(), Some(10));
        let x = parse_expr("Sq4 Sq6", &a3).unwrap();
        let mut y = parse_expr("Sq6Sq4", &a3).unwrap();
        y.add(&x, 1);
        assert_eq!(y, e);
    }

    #[test]
    fn q1_from_commutator() {
        let a1 = Profile::odd_a(3, 1);
        let e = parse_expr("P1 b - b P1", &a1).unwrap();
        assert_eq!(e, MilnorElement::monomial(3, Milnor::q_i(1), 1));
        assert_eq!(parse_expr("Q1", &a1).unwrap(), e);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_expr("Sq8", &Profile::a(2)), Err(ExprError::OutsideProfile { pos: 0, .. })));
        assert!(matches!(parse_expr("Sq1 +", &Profile::a(2)), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("Sq1 * Sq2", &Profile::a(2)), Err(ExprError::Syntax { pos: 4, .. })));
        assert!(parse_expr("P1", &Profile::a(2)).is_err());
        assert!(parse_expr("Sq1", &Profile::odd_a(3, 1)).is_err());
        assert!(parse_expr("", &Profile::a(1)).is_err());
    }

    #[test]
    fn scalars_and_zero() {
        let a = Profile::odd_a(3, 1);
        assert!(parse_expr("0", &a).unwrap().is_zero());
        assert_eq!(parse_expr("2", &a).unwrap(), MilnorElement::monomial(3, Milnor::unit(), 2));
        assert!(parse_expr("3 P1", &a).unwrap().is_zero());
        assert!(parse_expr("b b", &a).unwrap().is_zero());
    }

    #[test]
    fn tokens() {
        assert_eq!(parse_token("Sq4"), Some(Token::Sq(4)));
        assert_eq!(parse_token("b"), Some(Token::Bockstein));
        assert_eq!(parse_token("g0"), None);
        assert_eq!(parse_token("bg"), None);
        assert_eq!(parse_token("P(0,1)"), Some(Token::MilnorP(vec![0, 1])));
    }

    proptest! {
        #[test]
        fn printer_round_trip(deg in 0usize..24, seed in proptest::collection::vec(0u32..3, 1..12), odd in any::<bool>()) {
            let (profile, p) = if odd { (Profile::odd_a(3, 1), 3) } else { (Profile::a(2), 2) };
            let a = Algebra::new(profile.clone()).unwrap();
            let deg = deg % (a.max_degree() + 1);
            let mut v = crate::fplin::FpVector::new(p, a.dim(deg));
            for i in 0..a.dim(deg) {
                v.set_entry(i, seed[i % seed.len()] % p);
            }
            let e = a.from_vector(deg, &v);
            let text = e.to_string();
            prop_assert_eq!(parse_expr(&text, &profile).unwrap(), e);
        }

        #[test]
        fn never_panics(s in "\\PC{0,40}") {
            let _ = parse_expr(&s, &Profile::a(2));
            let _ = parse_expr(&s, &Profile::odd_a(3, 1));
        }
    }
}
