//! Tokens with source positions. Comments run from `--` to the end of the line.

use std::fmt;

use super::SyntaxError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    /// Punctuation and operators.
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMS: &[&str] = &["=>", "->", "&&", "||", "(", ")", "{", "}", "[", "]", ",", ";", ":", "=", "+", "*", "@", "<", ".", "|", "~"];

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if ident_start(c) {
            let start = i;
            // a `-` joins two identifier parts, as in `let1-beta`
            while i < chars.len()
                && (ident_char(chars[i]) || (chars[i] == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric())))
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(s), pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let n = s.parse().map_err(|_| SyntaxError::new(pos, format!("integer literal `{s}` is too large")))?;
            out.push(Token { tok: Tok::Int(n), pos });
            continue;
        }
        let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let sym = SYMS.iter().find(|s| rest.starts_with(**s));
        match sym {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push(Token { tok: Tok::Sym(s), pos });
            }
            None => return Err(SyntaxError::new(pos, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens() {
        let ts: Vec<Tok> = lex("let x = f (y, ()); -- note\nbr l x => -> let1-beta a").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(ts[0], Tok::Ident("let".into()));
        assert_eq!(ts[3], Tok::Ident("f".into()));
        assert!(ts.contains(&Tok::Sym("=>")));
        assert!(ts.contains(&Tok::Sym("->")));
        assert!(ts.contains(&Tok::Ident("let1-beta".into())));
        assert!(ts.contains(&Tok::Ident("a".into())));
        assert_eq!(ts.last(), Some(&Tok::Eof));
        // a trailing `-` is not part of the identifier
        assert_eq!(lex("a-").unwrap_err().pos, Pos { line: 1, col: 2 });
    }

    #[test]
    fn positions() {
        let ts = lex("a\n  b").unwrap();
        assert_eq!(ts[1].pos, Pos { line: 2, col: 3 });
        let e = lex("a $").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 3 });
    }
}
