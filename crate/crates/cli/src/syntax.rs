//! Line-level lexing shared by scenario files and directory dumps.

use std::collections::BTreeMap;
use std::fmt;

use semspace_core::{AgentId, Body, Condition, Promise, Sign, Target, TypeTag, Valency};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    /// 1-based, in characters.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

pub type Parsed<T> = Result<T, SyntaxError>;

/// A word together with the column where it starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tok {
    pub text: String,
    pub column: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '/' | '\'' | ':')
}

pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn column(&self) -> usize {
        self.src[..self.pos].chars().count() + 1
    }

    pub fn error<T>(&self, message: impl Into<String>) -> Parsed<T> {
        Err(SyntaxError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// Consumes `lit` (after whitespace) when present.
    pub fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, lit: &str) -> Parsed<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.error(format!("expected `{}`", lit))
        }
    }

    /// Consumes `word` only when it is followed by a non-word character.
    pub fn eat_keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with(word) && !rest[word.len()..].chars().next().is_some_and(is_word_char) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    pub fn word(&mut self, what: &str) -> Parsed<Tok> {
        self.skip_ws();
        let column = self.column();
        let len: usize = self
            .rest()
            .chars()
            .take_while(|c| is_word_char(*c))
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return self.error(format!("expected {}", what));
        }
        let text = self.rest()[..len].to_string();
        self.pos += len;
        Ok(Tok { text, column })
    }

    pub fn int(&mut self, what: &str) -> Parsed<i64> {
        self.skip_ws();
        let column = self.column();
        let rest = self.rest();
        let sign = usize::from(rest.starts_with('-'));
        let digits = rest[sign..].chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            return self.error(format!("expected {}", what));
        }
        let text = &rest[..sign + digits];
        self.pos += sign + digits;
        text.parse().map_err(|_| SyntaxError {
            column,
            message: format!("{} out of range", what),
        })
    }

    pub fn uint(&mut self, what: &str) -> Parsed<u64> {
        let column = {
            self.skip_ws();
            self.column()
        };
        let v = self.int(what)?;
        u64::try_from(v).map_err(|_| SyntaxError {
            column,
            message: format!("{} must not be negative", what),
        })
    }

    /// `key=` followed by an unsigned integer.
    pub fn keyed_uint(&mut self, key: &str) -> Parsed<u64> {
        self.expect(&format!("{}=", key))?;
        self.uint(key)
    }

    /// A quoted string; no escapes.
    pub fn quoted(&mut self) -> Parsed<String> {
        self.expect("\"")?;
        match self.rest().find('"') {
            Some(end) => {
                let s = self.rest()[..end].to_string();
                self.pos += end + 1;
                Ok(s)
            }
            None => self.error("unterminated string"),
        }
    }

    /// `( w, w, ... )` after the opening keyword has been consumed.
    pub fn word_list(&mut self, what: &str) -> Parsed<Vec<Tok>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            out.push(self.word(what)?);
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    /// `{ w w ... }` with whitespace separators.
    pub fn braced_words(&mut self, what: &str) -> Parsed<Vec<Tok>> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.eat("}") {
            if self.at_end() {
                return self.error("expected `}`");
            }
            out.push(self.word(what)?);
        }
        Ok(out)
    }

    pub fn int_list(&mut self, what: &str) -> Parsed<Vec<i64>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            out.push(self.int(what)?);
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    pub fn finish(&mut self) -> Parsed<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    /// `name` or `(a∪b∪...)`; a comma also separates composite parts.
    pub fn type_tag(&mut self) -> Parsed<TypeTag> {
        if self.eat("(") {
            let mut names = vec![self.word("type name")?.text];
            while !self.eat(")") {
                if !(self.eat("∪") || self.eat(",")) {
                    return self.error("expected `∪` or `)`");
                }
                names.push(self.word("type name")?.text);
            }
            Ok(TypeTag::from_names(names).expect("non-empty"))
        } else {
            Ok(TypeTag::new(self.word("type name")?.text))
        }
    }

    /// `[+|-]type[{sym[*k],...}] [#n|#*] [| [-]cond] [refs(a,...)]`.
    ///
    /// Without an explicit sign, `default_sign` applies. Referenced agents
    /// are returned with their columns so callers can check them.
    pub fn body(&mut self, default_sign: Option<Sign>) -> Parsed<(Body, Vec<Tok>)> {
        let sign = if self.eat("+") {
            Sign::Plus
        } else if self.eat("-") {
            Sign::Minus
        } else if let Some(s) = default_sign {
            s
        } else {
            return self.error("expected `+` or `-`");
        };
        let type_tag = self.type_tag()?;
        let mut body = Body::new(sign, "_");
        body.symbols = type_tag.names().map(|n| (n.to_string(), 1)).collect();
        body.type_tag = type_tag;
        if self.rest().starts_with('{') {
            self.pos += 1;
            let mut symbols = BTreeMap::new();
            while !self.eat("}") {
                if !symbols.is_empty() {
                    self.expect(",")?;
                }
                let s = self.word("symbol")?;
                let k = if self.eat("*") { self.uint("coefficient")? } else { 1 };
                let k = u32::try_from(k).map_err(|_| SyntaxError {
                    column: s.column,
                    message: "coefficient out of range".into(),
                })?;
                symbols.insert(s.text, k);
            }
            body.symbols = symbols;
        }
        if self.eat("#") {
            if self.eat("*") {
                body.valency = Valency::Unbounded;
            } else {
                let column = self.column();
                let n = self.uint("valency")?;
                let n = u32::try_from(n).ok().filter(|n| *n > 0).ok_or(SyntaxError {
                    column,
                    message: "valency must be between 1 and 2^32-1".into(),
                })?;
                body.valency = Valency::Bounded(n);
            }
        }
        if self.eat("|") {
            let csign = if self.eat("-") {
                Sign::Minus
            } else {
                self.eat("+");
                Sign::Plus
            };
            body.condition = Some(Condition::new(csign, self.type_tag()?));
        }
        let mut refs = Vec::new();
        if self.eat_keyword("refs") {
            refs = self.word_list("agent")?;
            body.agent_refs = refs.iter().map(|t| AgentId::new(t.text.as_str())).collect();
        }
        Ok((body, refs))
    }

    /// `*` or `a,b,...`.
    pub fn target(&mut self) -> Parsed<(Target, Vec<Tok>)> {
        if self.eat("*") {
            return Ok((Target::Wildcard, Vec::new()));
        }
        let mut toks = vec![self.word("promisee")?];
        while self.eat(",") {
            toks.push(self.word("promisee")?);
        }
        let target = Target::of(toks.iter().map(|t| AgentId::new(t.text.as_str())));
        Ok((target, toks))
    }

    /// `from -> to : body [scope(a,...)]`, returning every agent token mentioned.
    pub fn promise(&mut self) -> Parsed<(Promise, Vec<Tok>)> {
        let from = self.word("promiser")?;
        self.expect("->")?;
        let (to, mut toks) = self.target()?;
        self.expect(":")?;
        let (body, refs) = self.body(None)?;
        let mut p = Promise::new(from.text.as_str(), to, body);
        toks.insert(0, from);
        toks.extend(refs);
        if self.eat_keyword("scope") {
            let scope = self.word_list("agent")?;
            p = p.with_scope(Target::of(scope.iter().map(|t| AgentId::new(t.text.as_str()))));
            toks.extend(scope);
        }
        Ok((p, toks))
    }
}

/// Parses the canonical promise text (the form `Display` writes).
pub fn parse_promise(text: &str) -> Parsed<Promise> {
    let mut c = Cursor::new(text);
    let (p, _) = c.promise()?;
    c.finish()?;
    Ok(p)
}
