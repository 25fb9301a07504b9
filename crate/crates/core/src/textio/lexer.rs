use super::{Pos, TextError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Semi,
    Comma,
    Eq,
    Colon,
    Star,
    LArrow,
    Squig,
    RArrow,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Num(n) => return write!(f, "`{n}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Eq => "=",
            Tok::Colon => ":",
            Tok::Star => "*",
            Tok::LArrow => "<-",
            Tok::Squig => "~>",
            Tok::RArrow => "->",
        };
        write!(f, "`{s}`")
    }
}

const PUNCT: &str = "(){}[];,=:*#<>~-\"";

pub fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !PUNCT.contains(c) && !"♦■←⤳→⟶∗∅".contains(c)
}

pub fn check_binder(name: &str, pos: Pos) -> Result<(), TextError> {
    if name.starts_with('_') {
        return Err(TextError::parse(pos, format!("names starting with `_` are reserved: {name}")));
    }
    Ok(())
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, TextError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let two = |s: &str| chars[i..].iter().take(2).collect::<String>() == s;
        let (tok, len) = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            ';' => (Tok::Semi, 1),
            ',' => (Tok::Comma, 1),
            '=' => (Tok::Eq, 1),
            ':' => (Tok::Colon, 1),
            '*' | '∗' => (Tok::Star, 1),
            '←' => (Tok::LArrow, 1),
            '⤳' => (Tok::Squig, 1),
            '→' | '⟶' => (Tok::RArrow, 1),
            '♦' => (Tok::Ident("point".into()), 1),
            '■' => (Tok::Ident("arrow".into()), 1),
            '∅' => (Tok::Num(0), 1),
            '<' if two("<-") => (Tok::LArrow, 2),
            '~' if two("~>") => (Tok::Squig, 2),
            '-' if two("->") => (Tok::RArrow, 2),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                if j < chars.len() && is_name_char(chars[j]) {
                    return Err(TextError::parse(pos, format!("names cannot start with a digit: {text}{}", chars[j])));
                }
                let n = text.parse().map_err(|_| TextError::parse(pos, "number too large"))?;
                (Tok::Num(n), j - i)
            }
            c if is_name_char(c) => {
                let mut j = i;
                while j < chars.len() && is_name_char(chars[j]) {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            c => return Err(TextError::parse(pos, format!("unexpected character {c:?}"))),
        };
        out.push((tok, pos));
        i += len;
        col += len;
    }
    Ok(out)
}

/// Token cursor with one-token lookahead.
pub struct Cursor {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, TextError> {
        let toks = lex(src)?;
        let end = Pos { line: src.lines().count().max(1), col: src.lines().last().map_or(1, |l| l.chars().count() + 1) };
        Ok(Cursor { toks, at: 0, end })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    pub fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|(t, _)| t)
    }

    pub fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    pub fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok) -> Result<(), TextError> {
        if self.eat(t) {
            return Ok(());
        }
        Err(self.unexpected(&t.to_string()))
    }

    pub fn ident(&mut self) -> Result<String, TextError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    /// A name that introduces a variable; a leading `_` marks degenerate terms.
    pub fn binder(&mut self) -> Result<String, TextError> {
        let pos = self.pos();
        let n = self.ident()?;
        check_binder(&n, pos)?;
        Ok(n)
    }

    pub fn num(&mut self) -> Result<usize, TextError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.at += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    pub fn unexpected(&self, wanted: &str) -> TextError {
        match self.peek() {
            Some(t) => TextError::parse(self.pos(), format!("expected {wanted}, found {t}")),
            None => TextError::parse(self.pos(), format!("expected {wanted}, found end of input")),
        }
    }

    pub fn finish(&self) -> Result<(), TextError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}
