use thiserror::Error;

use super::ast::{
    Annotation, AnnotationArg, Command, FileRef, Pattern, RecodeRule, RecodeSpec, RecodeSpecError, Script, Statement,
};
use super::lexer::{tokenize, Keyword, LexError, Span, Token, TokenKind};
use crate::table::RenameMap;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{line}:{col}: expected {}, found {found}", expected.join(" or "))]
    Unexpected { line: usize, col: usize, expected: Vec<&'static str>, found: String },
    #[error("{line}:{col}: {message}")]
    Invalid { line: usize, col: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Lex(e) => e.position(),
            ParseError::Unexpected { line, col, .. } | ParseError::Invalid { line, col, .. } => (*line, *col),
        }
    }

    fn invalid(span: Span, message: impl Into<String>) -> ParseError {
        ParseError::Invalid { line: span.line, col: span.col, message: message.into() }
    }
}

type PResult<T> = Result<T, ParseError>;

const COMMANDS: &[&str] = &["GET", "DATASET", "MATCH", "RECODE", "EXECUTE", "FREQUENCIES", "CROSSTABS", "SAVE"];

/// Parses a whole script. The first error aborts.
pub fn parse_script(text: &str) -> PResult<Script> {
    let tokens = tokenize(text)?;
    let eof = end_span(text);
    let mut statements = Vec::new();
    let mut start = 0;
    while start < tokens.len() {
        let end = tokens[start..]
            .iter()
            .position(|t| t.kind == TokenKind::Terminator)
            .map_or(tokens.len(), |i| start + i);
        let body = &tokens[start..end];
        if !body.is_empty() {
            let end_at = tokens.get(end).map_or(eof, |t| t.span);
            statements.push(Parser::new(body, end_at).statement()?);
        }
        start = end + 1;
    }
    Ok(Script { statements })
}

/// Parses recode rules from tokens starting at the first `(`. A trailing
/// terminator is allowed; anything else after the rules is an error.
pub fn parse_recode_spec(tokens: &[Token]) -> PResult<RecodeSpec> {
    let body = match tokens.last() {
        Some(t) if t.kind == TokenKind::Terminator => &tokens[..tokens.len() - 1],
        _ => tokens,
    };
    let end = tokens.last().map_or(Span::default(), |t| t.span);
    let mut p = Parser::new(body, end);
    let spec = p.recode_rules()?;
    p.finish()?;
    Ok(spec)
}

fn end_span(text: &str) -> Span {
    let line = text.matches('\n').count() + 1;
    let col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Span { line, col, offset: text.len() }
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    end: Span,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token], end: Span) -> Self {
        Parser { tokens, pos: 0, end }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_nth_kind(&self, n: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos)?;
        self.pos += 1;
        Some(t)
    }

    fn span(&self) -> Span {
        self.peek().map_or(self.end, |t| t.span)
    }

    fn unexpected<T>(&self, expected: &[&'static str]) -> PResult<T> {
        let span = self.span();
        let found = self.peek().map_or_else(|| "end of statement".to_owned(), |t| t.kind.to_string());
        Err(ParseError::Unexpected { line: span.line, col: span.col, expected: expected.to_vec(), found })
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek_kind() == Some(kind)
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.at(&TokenKind::Keyword(kw))
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &'static str) -> PResult<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            self.unexpected(&[what])
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> PResult<()> {
        if self.eat(&TokenKind::Keyword(kw)) {
            Ok(())
        } else {
            self.unexpected(&[kw.as_str()])
        }
    }

    fn is_word(&self) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Ident(_) | TokenKind::Keyword(_)))
    }

    /// An identifier; keywords are accepted in identifier position with
    /// their source spelling.
    fn word(&mut self) -> PResult<String> {
        if self.is_word() {
            Ok(self.bump().expect("peeked").text.clone())
        } else {
            self.unexpected(&["identifier"])
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek_kind() {
            Some(TokenKind::Str(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => self.unexpected(&["quoted string"]),
        }
    }

    fn finish(&self) -> PResult<()> {
        if self.peek().is_some() {
            self.unexpected(&["end of statement"])
        } else {
            Ok(())
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        let span = self.span();
        let kw = match self.peek_kind() {
            Some(TokenKind::Keyword(kw)) => *kw,
            _ => return self.unexpected(COMMANDS),
        };
        let command = match kw {
            Keyword::Get => {
                self.bump();
                self.expect_keyword(Keyword::File)?;
                self.eat(&TokenKind::Equals);
                Command::GetFile { path: self.string()? }
            }
            Keyword::Dataset => {
                self.bump();
                self.expect_keyword(Keyword::Name)?;
                Command::DatasetName { name: self.word()? }
            }
            Keyword::Match => {
                self.bump();
                self.expect_keyword(Keyword::Files)?;
                return self.match_files(span);
            }
            Keyword::Recode => {
                self.bump();
                let mut vars = Vec::new();
                while self.is_word() {
                    vars.push(self.word()?);
                }
                if vars.is_empty() {
                    return self.unexpected(&["variable name"]);
                }
                if !self.at(&TokenKind::LParen) {
                    return self.unexpected(&["variable name", "`(`"]);
                }
                let spec = self.recode_rules()?;
                self.finish()?;
                return Ok(Statement { command: Command::Recode { vars, spec }, annotations: Vec::new(), span });
            }
            Keyword::Execute => {
                self.bump();
                Command::Execute
            }
            Keyword::Frequencies => {
                self.bump();
                let slash = self.eat(&TokenKind::Slash);
                if self.at_keyword(Keyword::Variables) && self.peek_nth_kind(1) == Some(&TokenKind::Equals) {
                    self.pos += 2;
                } else if slash {
                    return self.unexpected(&["VARIABLES"]);
                }
                let mut vars = Vec::new();
                while self.is_word() {
                    vars.push(self.word()?);
                }
                if vars.is_empty() {
                    return self.unexpected(&["variable name"]);
                }
                Command::Frequencies { vars }
            }
            Keyword::Crosstabs => {
                self.bump();
                let slash = self.eat(&TokenKind::Slash);
                if self.at_keyword(Keyword::Tables) && self.peek_nth_kind(1) == Some(&TokenKind::Equals) {
                    self.pos += 2;
                } else if slash {
                    return self.unexpected(&["TABLES"]);
                }
                let row = self.word()?;
                self.expect_keyword(Keyword::By)?;
                let col = self.word()?;
                Command::Crosstabs { row, col }
            }
            Keyword::Save => {
                self.bump();
                self.expect_keyword(Keyword::Outfile)?;
                self.eat(&TokenKind::Equals);
                Command::SaveOutfile { path: self.string()? }
            }
            _ => return self.unexpected(COMMANDS),
        };
        let annotations = self.annotations()?;
        Ok(Statement { command, annotations, span })
    }

    fn match_files(&mut self, span: Span) -> PResult<Statement> {
        let mut files = Vec::new();
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut annotations = Vec::new();
        let mut rename_at = None;
        while self.at(&TokenKind::Slash) {
            match self.peek_nth_kind(1) {
                Some(TokenKind::Keyword(Keyword::File)) => {
                    self.pos += 2;
                    self.expect(TokenKind::Equals, "`=`")?;
                    if self.eat(&TokenKind::Star) {
                        files.push(FileRef::Active);
                    } else if matches!(self.peek_kind(), Some(TokenKind::Str(_))) {
                        files.push(FileRef::Path(self.string()?));
                    } else {
                        return self.unexpected(&["`*`", "quoted string"]);
                    }
                }
                Some(TokenKind::Keyword(Keyword::Rename)) => {
                    self.pos += 2;
                    rename_at.get_or_insert(self.span());
                    self.eat(&TokenKind::Equals);
                    if !self.at(&TokenKind::LParen) {
                        return self.unexpected(&["`(`"]);
                    }
                    while self.at(&TokenKind::LParen) {
                        pairs.extend(self.rename_group()?);
                    }
                }
                _ => annotations.push(self.annotation()?),
            }
        }
        self.finish().or_else(|_| self.unexpected(&["`/`", "end of statement"]))?;
        if files.is_empty() {
            return Err(ParseError::invalid(span, "MATCH FILES needs at least one /FILE"));
        }
        let rename = RenameMap::new(pairs)
            .map_err(|e| ParseError::invalid(rename_at.unwrap_or(span), format!("invalid /RENAME: {e}")))?;
        Ok(Statement { command: Command::MatchFiles { files, rename }, annotations, span })
    }

    /// `( old... = new... )`
    fn rename_group(&mut self) -> PResult<Vec<(String, String)>> {
        let open = self.span();
        self.expect(TokenKind::LParen, "`(`")?;
        let mut old = Vec::new();
        while self.is_word() {
            old.push(self.word()?);
        }
        if old.is_empty() {
            return self.unexpected(&["variable name"]);
        }
        self.expect(TokenKind::Equals, "`=`")?;
        let mut new = Vec::new();
        while self.is_word() {
            new.push(self.word()?);
        }
        if new.is_empty() {
            return self.unexpected(&["new variable name"]);
        }
        self.expect(TokenKind::RParen, "`)`")?;
        if old.len() != new.len() {
            return Err(ParseError::invalid(
                open,
                format!("/RENAME lists {} old names but {} new names", old.len(), new.len()),
            ));
        }
        Ok(old.into_iter().zip(new).collect())
    }

    fn annotations(&mut self) -> PResult<Vec<Annotation>> {
        let mut out = Vec::new();
        while self.peek().is_some() {
            out.push(self.annotation()?);
        }
        Ok(out)
    }

    /// `[/]NAME [= args...]`, running up to the next `/` or statement end.
    fn annotation(&mut self) -> PResult<Annotation> {
        let slash = self.eat(&TokenKind::Slash);
        if !self.is_word() {
            return if slash { self.unexpected(&["subcommand name"]) } else { self.unexpected(&["`/`", "end of statement"]) };
        }
        if !slash && self.peek_nth_kind(1) != Some(&TokenKind::Equals) {
            return self.unexpected(&["`/`", "end of statement"]);
        }
        let name = self.word()?;
        let equals = self.eat(&TokenKind::Equals);
        let mut args = Vec::new();
        while let Some(t) = self.peek() {
            let arg = match &t.kind {
                TokenKind::Slash | TokenKind::Terminator => break,
                TokenKind::Keyword(_) | TokenKind::Ident(_) => AnnotationArg::Word(t.text.clone()),
                TokenKind::Number(x) => AnnotationArg::Number(*x),
                TokenKind::Str(s) => AnnotationArg::Str(s.clone()),
                TokenKind::Star => AnnotationArg::Star,
                TokenKind::LParen => AnnotationArg::LParen,
                TokenKind::RParen => AnnotationArg::RParen,
                TokenKind::Equals => AnnotationArg::Equals,
            };
            args.push(arg);
            self.pos += 1;
        }
        Ok(Annotation { slash, name, equals, args })
    }

    fn recode_rules(&mut self) -> PResult<RecodeSpec> {
        let mut rules = Vec::new();
        while self.at(&TokenKind::LParen) {
            rules.extend(self.recode_rule()?);
        }
        if rules.is_empty() {
            return self.unexpected(&["`(`"]);
        }
        RecodeSpec::new(rules).map_err(|e| ParseError::invalid(self.span(), e.to_string()))
    }

    /// `( source... = target )`; several sources share one target.
    fn recode_rule(&mut self) -> PResult<Vec<RecodeRule>> {
        self.expect(TokenKind::LParen, "`(`")?;
        let mut patterns = Vec::new();
        while !self.at(&TokenKind::Equals) {
            patterns.push(self.recode_source()?);
        }
        if patterns.is_empty() {
            return self.unexpected(&["recode source value"]);
        }
        self.expect(TokenKind::Equals, "`=`")?;
        let target = match self.peek_kind() {
            Some(TokenKind::Number(x)) => Value::number(*x),
            Some(TokenKind::Str(s)) => Value::Text(s.clone()),
            Some(TokenKind::Ident(s)) => Value::Text(s.clone()),
            _ => return self.unexpected(&["number", "quoted string"]),
        };
        self.pos += 1;
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(patterns.into_iter().map(|pattern| RecodeRule { pattern, target: target.clone() }).collect())
    }

    fn number(&mut self) -> PResult<f64> {
        match self.peek_kind() {
            Some(TokenKind::Number(x)) => {
                self.pos += 1;
                Ok(*x)
            }
            _ => self.unexpected(&["number"]),
        }
    }

    fn recode_source(&mut self) -> PResult<Pattern> {
        let span = self.span();
        let Some(tok) = self.peek() else {
            return self.unexpected(&["recode source value"]);
        };
        match &tok.kind {
            TokenKind::Keyword(Keyword::Lowest) => {
                self.pos += 1;
                self.expect_keyword(Keyword::Thru)?;
                Ok(Pattern::LowestThru(self.number()?))
            }
            TokenKind::Number(lo) => {
                let lo = *lo;
                self.pos += 1;
                if !self.eat(&TokenKind::Keyword(Keyword::Thru)) {
                    return Ok(Pattern::Exact(Value::number(lo)));
                }
                if self.eat(&TokenKind::Keyword(Keyword::Highest)) {
                    return Ok(Pattern::ThruHighest(lo));
                }
                let hi = self.number().or_else(|_| self.unexpected(&["number", "HIGHEST"]))?;
                if lo > hi {
                    return Err(ParseError::invalid(
                        span,
                        RecodeSpecError::InvertedRange { lo: lo.to_string(), hi: hi.to_string() }.to_string(),
                    ));
                }
                Ok(Pattern::Range { lo, hi })
            }
            TokenKind::Str(s) => {
                self.pos += 1;
                Ok(Pattern::Exact(Value::Text(s.clone())))
            }
            TokenKind::Keyword(Keyword::Thru | Keyword::Highest) => self.unexpected(&["recode source value"]),
            TokenKind::Ident(_) | TokenKind::Keyword(_) => {
                self.pos += 1;
                Ok(Pattern::Exact(Value::Text(tok.text.clone())))
            }
            _ => self.unexpected(&["recode source value", "`=`"]),
        }
    }
}
