//! Minimal RFC-4180 record reader and writer.
//!
//! Unlike general CSV crates this keeps track of whether each field was
//! quoted, which the persistence format needs to tell an empty text cell
//! (`""`) from a missing one (nothing). Blank lines are records with one
//! empty field; they are never skipped.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Field {
    pub text: String,
    pub quoted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Record {
    /// 1-based physical line the record starts on.
    pub line: usize,
    pub fields: Vec<Field>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CsvSyntaxError {
    UnterminatedQuote { line: usize },
    TextAfterQuote { line: usize },
}

impl CsvSyntaxError {
    pub fn line(self) -> usize {
        match self {
            CsvSyntaxError::UnterminatedQuote { line } | CsvSyntaxError::TextAfterQuote { line } => line,
        }
    }
}

/// Splits `input` into records. Accepts LF or CRLF terminators; a final
/// terminator does not start an extra record.
pub(crate) fn read_records(input: &str, delimiter: char) -> Result<Vec<Record>, CsvSyntaxError> {
    let mut records = Vec::new();
    let mut chars = input.chars().peekable();
    let mut line = 1;

    while chars.peek().is_some() {
        let start_line = line;
        let mut fields = Vec::new();
        loop {
            let mut text = String::new();
            let quoted = chars.peek() == Some(&'"');
            if quoted {
                chars.next();
                loop {
                    match chars.next() {
                        None => return Err(CsvSyntaxError::UnterminatedQuote { line: start_line }),
                        Some('"') if chars.peek() == Some(&'"') => {
                            chars.next();
                            text.push('"');
                        }
                        Some('"') => break,
                        Some(c) => {
                            if c == '\n' {
                                line += 1;
                            }
                            text.push(c);
                        }
                    }
                }
            } else {
                while let Some(&c) = chars.peek() {
                    if c == delimiter || c == '\n' || (c == '\r' && is_crlf(&chars)) {
                        break;
                    }
                    text.push(c);
                    chars.next();
                }
            }
            fields.push(Field { text, quoted });

            match chars.next() {
                Some(c) if c == delimiter => continue,
                Some('\n') => {
                    line += 1;
                    break;
                }
                Some('\r') if chars.peek() == Some(&'\n') => {
                    chars.next();
                    line += 1;
                    break;
                }
                None => break,
                Some(_) => return Err(CsvSyntaxError::TextAfterQuote { line }),
            }
        }
        records.push(Record { line: start_line, fields });
    }
    Ok(records)
}

fn is_crlf(chars: &std::iter::Peekable<std::str::Chars<'_>>) -> bool {
    let mut ahead = chars.clone();
    ahead.next();
    ahead.peek() == Some(&'\n')
}

/// Appends one field, quoting when the content requires it or when
/// `force_quote` is set.
pub(crate) fn write_field(out: &mut String, text: &str, delimiter: char, force_quote: bool) {
    let needs = force_quote || text.chars().any(|c| c == delimiter || c == '"' || c == '\n' || c == '\r');
    if needs {
        out.push('"');
        for c in text.chars() {
            if c == '"' {
                out.push('"');
            }
            out.push(c);
        }
        out.push('"');
    } else {
        out.push_str(text);
    }
}
