//! Comment extraction for the four studied languages.
//!
//! A small lexer per language family walks the source text and pulls out
//! comment spans while respecting string literals, so comment markers
//! inside strings are never mistaken for comments. C++, C# and Java share
//! one state machine (`//` line and `/* */` block comments, with raw,
//! verbatim and text-block string forms); Python gets its own (`#` line
//! comments plus definition-leading triple-quoted docstrings).

use serde::{Deserialize, Serialize};

use crate::types::Language;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommentKind {
    Line,
    Block,
    DocString,
}

/// One extracted comment. `text` is the inner content with the comment
/// delimiters stripped and surrounding whitespace trimmed; `start_line`
/// is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentSpan {
    pub kind: CommentKind,
    pub text: String,
    pub start_line: u32,
}

/// Extraction result: spans in document order plus any lexer warnings
/// (e.g. an unterminated block comment).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommentScan {
    pub spans: Vec<CommentSpan>,
    pub warnings: Vec<String>,
}

/// Extract all comments from `source` in document order.
pub fn extract_comments(source: &str, language: Language) -> CommentScan {
    match language {
        Language::Cpp | Language::CSharp | Language::Java => {
            CFamilyLexer::new(source, language).run()
        }
        Language::Python => PythonLexer::new(source).run(),
    }
}

fn trimmed(text: &str) -> String {
    text.trim().to_string()
}

struct CFamilyLexer {
    chars: Vec<char>,
    language: Language,
    pos: usize,
    line: u32,
    out: CommentScan,
}

impl CFamilyLexer {
    fn new(source: &str, language: Language) -> Self {
        CFamilyLexer {
            chars: source.chars().collect(),
            language,
            pos: 0,
            line: 1,
            out: CommentScan::default(),
        }
    }

    fn peek(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) {
        if self.peek(0) == Some('\n') {
            self.line += 1;
        }
        self.pos += 1;
    }

    fn starts_with(&self, pat: &str) -> bool {
        pat.chars()
            .enumerate()
            .all(|(i, c)| self.peek(i) == Some(c))
    }

    fn run(mut self) -> CommentScan {
        while self.pos < self.chars.len() {
            if self.starts_with("//") {
                self.line_comment();
            } else if self.starts_with("/*") {
                self.block_comment();
            } else if self.language == Language::Cpp && self.at_raw_string() {
                self.skip_raw_string();
            } else if self.language == Language::CSharp && self.at_verbatim_string() {
                self.skip_verbatim_string();
            } else if self.starts_with("\"\"\"")
                && matches!(self.language, Language::Java | Language::CSharp)
            {
                self.skip_text_block();
            } else if self.peek(0) == Some('"') {
                self.skip_quoted('"');
            } else if self.peek(0) == Some('\'') && !self.is_digit_separator() {
                self.skip_quoted('\'');
            } else {
                self.bump();
            }
        }
        self.out
    }

    fn line_comment(&mut self) {
        let start = self.line;
        self.pos += 2;
        // Fold `///`-style doc markers into the line kind.
        while self.peek(0) == Some('/') {
            self.pos += 1;
        }
        let mut text = String::new();
        while let Some(c) = self.peek(0) {
            if c == '\n' {
                break;
            }
            text.push(c);
            self.pos += 1;
        }
        self.out.spans.push(CommentSpan {
            kind: CommentKind::Line,
            text: trimmed(&text),
            start_line: start,
        });
    }

    fn block_comment(&mut self) {
        let start = self.line;
        self.pos += 2;
        let mut text = String::new();
        loop {
            if self.starts_with("*/") {
                self.pos += 2;
                break;
            }
            match self.peek(0) {
                Some(c) => {
                    text.push(c);
                    self.bump();
                }
                None => {
                    self.out
                        .warnings
                        .push(format!("unterminated block comment at line {start}"));
                    break;
                }
            }
        }
        self.out.spans.push(CommentSpan {
            kind: CommentKind::Block,
            text: trimmed(&text),
            start_line: start,
        });
    }

    /// C++ raw string literal ahead: an optional encoding prefix, `R`,
    /// then a quote, at a token boundary.
    fn at_raw_string(&self) -> bool {
        let prefixes = ["R\"", "u8R\"", "uR\"", "UR\"", "LR\""];
        let boundary = self.pos == 0 || {
            let prev = self.chars[self.pos - 1];
            !prev.is_alphanumeric() && prev != '_'
        };
        boundary && prefixes.iter().any(|p| self.starts_with(p))
    }

    fn skip_raw_string(&mut self) {
        // Skip to the opening quote.
        while self.pos < self.chars.len() && self.peek(0) != Some('"') {
            self.pos += 1;
        }
        self.pos += 1;
        let mut delim = String::new();
        while let Some(c) = self.peek(0) {
            if c == '(' {
                break;
            }
            delim.push(c);
            self.pos += 1;
        }
        let close: String = format!("){delim}\"");
        while self.pos < self.chars.len() && !self.starts_with(&close) {
            self.bump();
        }
        self.pos += close.chars().count().min(self.chars.len() - self.pos);
    }

    /// C# verbatim string ahead: `@"`, `@$"` or `$@"`.
    fn at_verbatim_string(&self) -> bool {
        self.starts_with("@\"") || self.starts_with("@$\"") || self.starts_with("$@\"")
    }

    fn skip_verbatim_string(&mut self) {
        while self.pos < self.chars.len() && self.peek(0) != Some('"') {
            self.pos += 1;
        }
        self.pos += 1;
        while self.pos < self.chars.len() {
            if self.peek(0) == Some('"') {
                if self.peek(1) == Some('"') {
                    self.pos += 2; // doubled quote stays inside the string
                    continue;
                }
                self.pos += 1;
                return;
            }
            self.bump();
        }
    }

    fn skip_text_block(&mut self) {
        self.pos += 3;
        while self.pos < self.chars.len() && !self.starts_with("\"\"\"") {
            self.bump();
        }
        self.pos += 3.min(self.chars.len() - self.pos);
    }

    fn skip_quoted(&mut self, quote: char) {
        self.pos += 1;
        while let Some(c) = self.peek(0) {
            if c == '\\' {
                self.pos += 2;
                continue;
            }
            if c == quote {
                self.pos += 1;
                return;
            }
            self.bump();
        }
    }

    /// C++14 digit separator: a quote squeezed between alphanumerics, as
    /// in `1'000'000` or `0xFF'FF`.
    fn is_digit_separator(&self) -> bool {
        if self.language != Language::Cpp || self.pos == 0 {
            return false;
        }
        let prev = self.chars[self.pos - 1];
        let next = self.peek(1);
        prev.is_ascii_alphanumeric() && next.is_some_and(|c| c.is_ascii_alphanumeric())
    }
}

/// What the next statement-leading triple-quoted string would mean.
/// A definition's docstring must sit deeper than the `def`/`class`
/// header itself, so a string following a one-liner body is not one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DocExpect {
    ModuleStart,
    AfterDefinition { def_indent: usize },
    No,
}

struct PythonLexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    line_start: usize,
    bracket_depth: i32,
    at_stmt_start: bool,
    expect: DocExpect,
    stmt_is_definition: bool,
    stmt_indent: usize,
    stmt_has_colon: bool,
    out: CommentScan,
}

impl PythonLexer {
    fn new(source: &str) -> Self {
        PythonLexer {
            chars: source.chars().collect(),
            pos: 0,
            line: 1,
            line_start: 0,
            bracket_depth: 0,
            at_stmt_start: true,
            expect: DocExpect::ModuleStart,
            stmt_is_definition: false,
            stmt_indent: 0,
            stmt_has_colon: false,
            out: CommentScan::default(),
        }
    }

    fn peek(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) {
        if self.peek(0) == Some('\n') {
            self.line += 1;
            self.pos += 1;
            self.line_start = self.pos;
        } else {
            self.pos += 1;
        }
    }

    fn run(mut self) -> CommentScan {
        // A shebang is executable metadata, not documentation.
        if self.chars.starts_with(&['#', '!']) {
            while self.peek(0).is_some_and(|c| c != '\n') {
                self.pos += 1;
            }
        }
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            match c {
                '#' => self.line_comment(),
                '\'' | '"' => self.string_token(),
                '(' | '[' | '{' => {
                    self.bracket_depth += 1;
                    self.note_statement_char(c);
                    self.bump();
                }
                ')' | ']' | '}' => {
                    self.bracket_depth -= 1;
                    self.bump();
                }
                '\\' if self.peek(1) == Some('\n') => {
                    self.bump();
                    self.bump(); // explicit line continuation
                }
                '\n' => {
                    if self.bracket_depth <= 0 {
                        self.end_statement();
                    }
                    self.bump();
                }
                ':' => {
                    if self.bracket_depth <= 0 {
                        self.stmt_has_colon = true;
                    }
                    self.bump();
                }
                c if c.is_whitespace() => self.bump(),
                c => {
                    self.note_statement_char(c);
                    self.bump();
                }
            }
        }
        self.end_statement();
        self.out
    }

    fn word_at(&self, mut i: usize) -> (String, usize) {
        let mut word = String::new();
        while let Some(&w) = self.chars.get(i) {
            if w.is_alphanumeric() || w == '_' {
                word.push(w);
                i += 1;
            } else {
                break;
            }
        }
        (word, i)
    }

    /// First significant character of a logical line opens a statement;
    /// its leading word decides whether a docstring may follow.
    fn note_statement_char(&mut self, _c: char) {
        if self.at_stmt_start && self.bracket_depth <= 0 {
            self.at_stmt_start = false;
            self.stmt_indent = self.pos - self.line_start;
            self.stmt_has_colon = false;
            let (word, after) = self.word_at(self.pos);
            self.stmt_is_definition = match word.as_str() {
                "def" | "class" => true,
                "async" => {
                    let mut i = after;
                    while self.chars.get(i).is_some_and(|c| *c == ' ' || *c == '\t') {
                        i += 1;
                    }
                    self.word_at(i).0 == "def"
                }
                _ => false,
            };
            if !self.stmt_is_definition {
                self.expect = DocExpect::No;
            }
        }
    }

    fn end_statement(&mut self) {
        if !self.at_stmt_start {
            if self.stmt_is_definition && self.stmt_has_colon {
                self.expect = DocExpect::AfterDefinition {
                    def_indent: self.stmt_indent,
                };
            }
            self.at_stmt_start = true;
        }
    }

    fn line_comment(&mut self) {
        let start = self.line;
        // A comment-only line neither starts a statement nor cancels a
        // pending docstring position.
        self.pos += 1;
        let mut text = String::new();
        while let Some(c) = self.peek(0) {
            if c == '\n' {
                break;
            }
            text.push(c);
            self.pos += 1;
        }
        self.out.spans.push(CommentSpan {
            kind: CommentKind::Line,
            text: trimmed(&text),
            start_line: start,
        });
    }

    fn string_token(&mut self) {
        let starts_statement = self.at_stmt_start && self.bracket_depth <= 0;
        let indent = self.pos - self.line_start;
        if starts_statement {
            self.at_stmt_start = false;
            self.stmt_is_definition = false;
            self.stmt_has_colon = false;
        }
        let quote = self.chars[self.pos];
        let start_line = self.line;
        if self.peek(1) == Some(quote) && self.peek(2) == Some(quote) {
            let is_doc = starts_statement
                && match self.expect {
                    DocExpect::ModuleStart => true,
                    DocExpect::AfterDefinition { def_indent } => indent > def_indent,
                    DocExpect::No => false,
                };
            self.triple_string(quote, is_doc, start_line);
        } else {
            self.single_string(quote);
        }
        if starts_statement {
            self.expect = DocExpect::No;
        }
    }

    fn triple_string(&mut self, quote: char, is_doc: bool, start_line: u32) {
        self.pos += 3;
        let mut text = String::new();
        let mut terminated = false;
        while self.pos < self.chars.len() {
            if self.peek(0) == Some(quote)
                && self.peek(1) == Some(quote)
                && self.peek(2) == Some(quote)
            {
                self.pos += 3;
                terminated = true;
                break;
            }
            if self.peek(0) == Some('\\') {
                text.push('\\');
                if let Some(c) = self.peek(1) {
                    text.push(c);
                }
                self.bump();
                self.bump();
                continue;
            }
            text.push(self.chars[self.pos]);
            self.bump();
        }
        if is_doc {
            if !terminated {
                self.out
                    .warnings
                    .push(format!("unterminated docstring at line {start_line}"));
            }
            self.out.spans.push(CommentSpan {
                kind: CommentKind::DocString,
                text: trimmed(&text),
                start_line,
            });
        }
    }

    fn single_string(&mut self, quote: char) {
        self.pos += 1;
        while let Some(c) = self.peek(0) {
            if c == '\\' {
                self.bump();
                self.bump();
                continue;
            }
            if c == quote {
                self.pos += 1;
                return;
            }
            if c == '\n' {
                return; // unterminated single-line string
            }
            self.pos += 1;
        }
    }
}
