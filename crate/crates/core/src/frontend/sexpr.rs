//! Minimal s-expression reader with source positions.

use std::fmt;

use super::{FrontendError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExp {
    /// Symbol or numeral; `|quoted|` symbols are stored without the bars.
    Atom(String, SourceSpan),
    List(Vec<SExp>, SourceSpan),
}

impl SExp {
    pub fn span(&self) -> SourceSpan {
        match self {
            SExp::Atom(_, s) | SExp::List(_, s) => *s,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExp::Atom(a, _) => Some(a),
            SExp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExp]> {
        match self {
            SExp::List(items, _) => Some(items),
            SExp::Atom(..) => None,
        }
    }

    /// `(head rest...)` with an atom head.
    pub fn head(&self) -> Option<(&str, &[SExp])> {
        let items = self.as_list()?;
        let (h, rest) = items.split_first()?;
        Some((h.as_atom()?, rest))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[SExp], FrontendError> {
        self.as_list().ok_or_else(|| FrontendError::syntax(self.span(), format!("expected {what}")))
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str, FrontendError> {
        self.as_atom().ok_or_else(|| FrontendError::syntax(self.span(), format!("expected {what}")))
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExp::Atom(a, _) => write!(f, "{a}"),
            SExp::List(items, _) => {
                write!(f, "(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> (usize, usize) {
        (self.line, self.col)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn span_from(&self, start: (usize, usize)) -> SourceSpan {
        SourceSpan { line: start.0, col: start.1, end_line: self.line, end_col: self.col }
    }

    fn read(&mut self) -> Result<SExp, FrontendError> {
        self.skip_trivia();
        let start = self.pos();
        match self.peek() {
            None => Err(FrontendError::syntax(self.span_from(start), "unexpected end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        Some(')') => {
                            self.bump();
                            return Ok(SExp::List(items, self.span_from(start)));
                        }
                        None => {
                            return Err(FrontendError::syntax(self.span_from(start), "unclosed parenthesis"))
                        }
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some(')') => {
                self.bump();
                Err(FrontendError::syntax(self.span_from(start), "unexpected `)`"))
            }
            Some('|') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('|') => break,
                        Some(c) => s.push(c),
                        None => {
                            return Err(FrontendError::syntax(
                                self.span_from(start),
                                "unterminated quoted symbol",
                            ))
                        }
                    }
                }
                Ok(SExp::Atom(s, self.span_from(start)))
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(SExp::Atom(s, self.span_from(start)))
            }
        }
    }
}

/// Read every top-level expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<SExp>, FrontendError> {
    let mut r = Reader { chars: text.char_indices().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

/// Read exactly one expression.
pub fn read_one(text: &str) -> Result<SExp, FrontendError> {
    let mut all = read_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(FrontendError::syntax(SourceSpan::default(), "empty input")),
        _ => Err(FrontendError::syntax(all[1].span(), "trailing input after expression")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let e = read_one("(a\n  (b |c'|) ; note\n 12)").unwrap();
        let items = e.as_list().unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[1].to_string(), "(b c')");
        assert_eq!(items[1].span().line, 2);
        assert_eq!(items[1].span().col, 3);
        assert_eq!(items[2].as_atom(), Some("12"));
    }

    #[test]
    fn reports_unclosed() {
        let err = read_one("(a (b)").unwrap_err();
        assert!(err.to_string().contains("unclosed"));
    }
}
