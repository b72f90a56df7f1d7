use std::fmt;

use thiserror::Error;

/// 1-based source position plus byte offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub offset: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Get,
    File,
    Dataset,
    Name,
    Match,
    Files,
    Rename,
    Recode,
    Execute,
    Frequencies,
    Variables,
    Crosstabs,
    Tables,
    By,
    Save,
    Outfile,
    Thru,
    Lowest,
    Highest,
}

impl Keyword {
    pub fn lookup(word: &str) -> Option<Keyword> {
        use Keyword::*;
        let kw = match word.to_ascii_uppercase().as_str() {
            "GET" => Get,
            "FILE" => File,
            "DATASET" => Dataset,
            "NAME" => Name,
            "MATCH" => Match,
            "FILES" => Files,
            "RENAME" => Rename,
            "RECODE" => Recode,
            "EXECUTE" => Execute,
            "FREQUENCIES" => Frequencies,
            "VARIABLES" => Variables,
            "CROSSTABS" => Crosstabs,
            "TABLES" => Tables,
            "BY" => By,
            "SAVE" => Save,
            "OUTFILE" => Outfile,
            "THRU" => Thru,
            "LOWEST" | "LO" => Lowest,
            "HIGHEST" | "HI" => Highest,
            _ => return None,
        };
        Some(kw)
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Get => "GET",
            File => "FILE",
            Dataset => "DATASET",
            Name => "NAME",
            Match => "MATCH",
            Files => "FILES",
            Rename => "RENAME",
            Recode => "RECODE",
            Execute => "EXECUTE",
            Frequencies => "FREQUENCIES",
            Variables => "VARIABLES",
            Crosstabs => "CROSSTABS",
            Tables => "TABLES",
            By => "BY",
            Save => "SAVE",
            Outfile => "OUTFILE",
            Thru => "THRU",
            Lowest => "LOWEST",
            Highest => "HIGHEST",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Number(f64),
    Str(String),
    LParen,
    RParen,
    Equals,
    Slash,
    Star,
    /// Statement-ending period.
    Terminator,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "keyword {}", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Number(x) => write!(f, "number {x}"),
            TokenKind::Str(s) => write!(f, "string '{s}'"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Equals => f.write_str("`=`"),
            TokenKind::Slash => f.write_str("`/`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Terminator => f.write_str("end of statement"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source spelling (for keywords and identifiers, the exact case).
    pub text: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{line}:{col}: unterminated string")]
    UnterminatedString { line: usize, col: usize },
    #[error("{line}:{col}: illegal character {ch:?}")]
    IllegalCharacter { ch: char, line: usize, col: usize },
}

impl LexError {
    pub fn position(&self) -> (usize, usize) {
        match *self {
            LexError::UnterminatedString { line, col } | LexError::IllegalCharacter { line, col, .. } => (line, col),
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.src[self.offset..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span { line: self.line, col: self.col, offset: self.offset }
    }

    /// True when only horizontal whitespace (or a comment) separates the
    /// cursor from the end of the physical line.
    fn at_line_end(&self) -> bool {
        for c in self.src[self.offset..].chars() {
            match c {
                ' ' | '\t' => continue,
                '\n' | '\r' | '#' => return true,
                _ => return false,
            }
        }
        true
    }
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '@' || c == '$'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '@' || c == '$'
}

/// Splits script text into tokens.
///
/// A period ends a statement only when nothing but whitespace or a comment
/// follows it on the same line, so periods inside quoted paths and decimal
/// numbers are unaffected. `#` starts a comment running to end of line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor { src: text, offset: 0, line: 1, col: 1 };
    let mut out = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.span();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let single = match c {
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            '=' => Some(TokenKind::Equals),
            '/' => Some(TokenKind::Slash),
            '*' => Some(TokenKind::Star),
            _ => None,
        };
        if let Some(kind) = single {
            cur.bump();
            out.push(Token { kind, text: c.to_string(), span: start });
            continue;
        }

        let digit_at = |n: usize| cur.peek_nth(n).is_some_and(|c| c.is_ascii_digit());
        let starts_number = c.is_ascii_digit()
            || (c == '.' && digit_at(1))
            || ((c == '-' || c == '+') && (digit_at(1) || (cur.peek_nth(1) == Some('.') && digit_at(2))));

        if c == '.' && !starts_number {
            cur.bump();
            if cur.at_line_end() {
                out.push(Token { kind: TokenKind::Terminator, text: ".".into(), span: start });
                continue;
            }
            return Err(LexError::IllegalCharacter { ch: '.', line: start.line, col: start.col });
        }

        if starts_number {
            cur.bump();
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            if cur.peek() == Some('.') && cur.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
            }
            if cur.peek().is_some_and(ident_continue) {
                // Barewords such as `2A` start with digits.
                while cur.peek().is_some_and(ident_continue) {
                    cur.bump();
                }
                let word = &text[start.offset..cur.offset];
                out.push(Token { kind: TokenKind::Ident(word.to_owned()), text: word.to_owned(), span: start });
            } else {
                let lexeme = &text[start.offset..cur.offset];
                let value: f64 = lexeme.parse().expect("lexed digits parse as f64");
                out.push(Token { kind: TokenKind::Number(value), text: lexeme.to_owned(), span: start });
            }
            continue;
        }

        if ident_start(c) {
            while cur.peek().is_some_and(ident_continue) {
                cur.bump();
            }
            let word = &text[start.offset..cur.offset];
            let kind = match Keyword::lookup(word) {
                Some(kw) => TokenKind::Keyword(kw),
                None => TokenKind::Ident(word.to_owned()),
            };
            out.push(Token { kind, text: word.to_owned(), span: start });
            continue;
        }

        if c == '\'' || c == '"' {
            cur.bump();
            let mut value = String::new();
            loop {
                match cur.peek() {
                    None | Some('\n') | Some('\r') => {
                        return Err(LexError::UnterminatedString { line: start.line, col: start.col });
                    }
                    Some(q) if q == c => {
                        cur.bump();
                        if cur.peek() == Some(c) {
                            cur.bump();
                            value.push(c);
                        } else {
                            break;
                        }
                    }
                    Some(other) => {
                        cur.bump();
                        value.push(other);
                    }
                }
            }
            let lexeme = text[start.offset..cur.offset].to_owned();
            out.push(Token { kind: TokenKind::Str(value), text: lexeme, span: start });
            continue;
        }

        return Err(LexError::IllegalCharacter { ch: c, line: start.line, col: start.col });
    }
    Ok(out)
}
