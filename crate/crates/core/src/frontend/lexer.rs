//! Tokenizer for the Verilog-like design subset and SVA-lite assertions.

use super::FrontendError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Radix {
    Binary,
    Octal,
    Decimal,
    Hex,
}

impl Radix {
    fn base(self) -> u32 {
        match self {
            Radix::Binary => 2,
            Radix::Octal => 8,
            Radix::Decimal => 10,
            Radix::Hex => 16,
        }
    }

    fn letter(self) -> char {
        match self {
            Radix::Binary => 'b',
            Radix::Octal => 'o',
            Radix::Decimal => 'd',
            Radix::Hex => 'h',
        }
    }
}

/// A numeric literal such as `63`, `8'd63` or `'b1010`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NumLit {
    pub value: u64,
    /// Explicit width prefix, `None` for unsized literals.
    pub width: Option<u32>,
    /// `None` for plain decimal literals without a base specifier.
    pub radix: Option<Radix>,
}

impl NumLit {
    pub fn unsized_value(value: u64) -> Self {
        NumLit {
            value,
            width: None,
            radix: None,
        }
    }

    pub fn sized(value: u64, width: u32) -> Self {
        NumLit {
            value,
            width: Some(width),
            radix: Some(Radix::Decimal),
        }
    }
}

impl std::fmt::Display for NumLit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let Some(radix) = self.radix else {
            return write!(f, "{}", self.value);
        };
        if let Some(w) = self.width {
            write!(f, "{w}")?;
        }
        write!(f, "'{}", radix.letter())?;
        match radix {
            Radix::Binary => write!(f, "{:b}", self.value),
            Radix::Octal => write!(f, "{:o}", self.value),
            Radix::Decimal => write!(f, "{}", self.value),
            Radix::Hex => write!(f, "{:X}", self.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number(NumLit),
    Keyword,
    Operator,
    Punct,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the first character.
    pub line: usize,
    /// 1-based column (in characters) of the first character.
    pub col: usize,
    /// Byte offset of the first character.
    pub offset: usize,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.kind != TokenKind::Eof && !matches!(self.kind, TokenKind::Number(_)) && self.text == text
    }

    pub fn describe(&self) -> String {
        match self.kind {
            TokenKind::Eof => "end of input".to_string(),
            _ => format!("`{}`", self.text),
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "module",
    "endmodule",
    "input",
    "output",
    "reg",
    "wire",
    "logic",
    "always_ff",
    "always",
    "posedge",
    "negedge",
    "begin",
    "end",
    "if",
    "else",
    "assign",
    "assert",
    "assume",
    "property",
];

// Longest first so that `<=` wins over `<`.
const OPERATORS: &[&str] = &[
    "<=", ">=", "==", "!=", "&&", "||", "<", ">", "+", "-", "&", "|", "^", "~", "!", "?", "=",
];

const PUNCT: &[char] = &['(', ')', '[', ']', '{', '}', ';', ',', ':', '@'];

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, col: usize, message: impl Into<String>) -> FrontendError {
        FrontendError::Lex {
            line,
            col,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), FrontendError> {
        loop {
            match (self.peek(), self.peek_at(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(), self.peek_at(1)) {
                            (Some('*'), Some('/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => {
                                return Err(self.error(line, col, "unterminated block comment"))
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.bump();
        }
    }

    fn number(&mut self, line: usize, col: usize) -> Result<NumLit, FrontendError> {
        let start = self.pos;
        let mut width = None;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.take_while(|c| c.is_ascii_digit() || c == '_');
            let digits: String = self.src[start..self.pos].chars().filter(|&c| c != '_').collect();
            if self.peek() != Some('\'') {
                let value = digits
                    .parse::<u64>()
                    .map_err(|_| self.error(line, col, "integer literal out of range"))?;
                return Ok(NumLit::unsized_value(value));
            }
            let w = digits
                .parse::<u32>()
                .map_err(|_| self.error(line, col, "literal width out of range"))?;
            if w == 0 || w > 64 {
                return Err(self.error(line, col, format!("literal width {w} not in 1..=64")));
            }
            width = Some(w);
        }
        // at the apostrophe
        self.bump();
        if matches!(self.peek(), Some('s' | 'S')) {
            return Err(self.error(line, col, "signed literals are not supported"));
        }
        let radix = match self.peek().map(|c| c.to_ascii_lowercase()) {
            Some('b') => Radix::Binary,
            Some('o') => Radix::Octal,
            Some('d') => Radix::Decimal,
            Some('h') => Radix::Hex,
            _ => return Err(self.error(line, col, "unterminated number: expected base specifier")),
        };
        self.bump();
        let digits_start = self.pos;
        self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        let digits: String = self.src[digits_start..self.pos]
            .chars()
            .filter(|&c| c != '_')
            .collect();
        if digits.is_empty() {
            return Err(self.error(line, col, "unterminated number: missing digits"));
        }
        if digits.chars().any(|c| matches!(c, 'x' | 'X' | 'z' | 'Z' | '?')) {
            return Err(self.error(line, col, "four-state digits (x/z) are not supported"));
        }
        let value = u64::from_str_radix(&digits, radix.base())
            .map_err(|_| self.error(line, col, format!("invalid digits `{digits}` for literal")))?;
        if let Some(w) = width {
            if w < 64 && value >> w != 0 {
                return Err(self.error(line, col, format!("value {value} does not fit in {w} bits")));
            }
        }
        Ok(NumLit {
            value,
            width,
            radix: Some(radix),
        })
    }

    fn next_token(&mut self) -> Result<Token, FrontendError> {
        self.skip_trivia()?;
        let (line, col, start) = (self.line, self.col, self.pos);
        let Some(c) = self.peek() else {
            return Ok(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                line,
                col,
                offset: start,
            });
        };
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$');
            if KEYWORDS.contains(&&self.src[start..self.pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() || c == '\'' {
            TokenKind::Number(self.number(line, col)?)
        } else if let Some(op) = OPERATORS.iter().find(|op| self.src[self.pos..].starts_with(**op)) {
            for _ in 0..op.len() {
                self.bump();
            }
            TokenKind::Operator
        } else if PUNCT.contains(&c) {
            self.bump();
            TokenKind::Punct
        } else {
            return Err(self.error(line, col, format!("illegal character `{c}`")));
        };
        Ok(Token {
            kind,
            text: self.src[start..self.pos].to_string(),
            line,
            col,
            offset: start,
        })
    }
}

/// Splits `source` into tokens, always terminated by a single `Eof` token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lexer = Lexer {
        src: source,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    loop {
        let tok = lexer.next_token()?;
        let done = tok.kind == TokenKind::Eof;
        tokens.push(tok);
        if done {
            return Ok(tokens);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn empty_input_is_just_eof() {
        assert_eq!(kinds(""), vec![TokenKind::Eof]);
        assert_eq!(kinds("  // only a comment\n /* and */ "), vec![TokenKind::Eof]);
    }

    #[test]
    fn nonblocking_assignment() {
        let toks = tokenize("count1 <= count1 + 1;").unwrap();
        let summary: Vec<(TokenKind, &str)> = toks.iter().map(|t| (t.kind.clone(), t.text.as_str())).collect();
        assert_eq!(
            summary,
            vec![
                (TokenKind::Ident, "count1"),
                (TokenKind::Operator, "<="),
                (TokenKind::Ident, "count1"),
                (TokenKind::Operator, "+"),
                (TokenKind::Number(NumLit::unsized_value(1)), "1"),
                (TokenKind::Punct, ";"),
                (TokenKind::Eof, ""),
            ]
        );
    }

    #[test]
    fn sized_literal() {
        let toks = tokenize("8'd63").unwrap();
        assert_eq!(toks.len(), 2);
        let TokenKind::Number(n) = toks[0].kind else { panic!() };
        assert_eq!(n.value, 63);
        assert_eq!(n.width, Some(8));
        assert_eq!(n.radix, Some(Radix::Decimal));
        let TokenKind::Number(h) = tokenize("32'h7FFF_FFFF").unwrap()[0].kind else { panic!() };
        assert_eq!(h.value, 0x7FFF_FFFF);
        let TokenKind::Number(b) = tokenize("'b101").unwrap()[0].kind else { panic!() };
        assert_eq!((b.value, b.width), (5, None));
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("a\n  bb").unwrap();
        assert_eq!((toks[0].line, toks[0].col), (1, 1));
        assert_eq!((toks[1].line, toks[1].col), (2, 3));
    }

    #[test]
    fn lex_errors() {
        let cases = [
            ("a # b", 1, 3),
            ("x /* open", 1, 3),
            ("8'", 1, 1),
            ("8'd", 1, 1),
            ("4'd20", 1, 1),
            ("8'bx1", 1, 1),
            ("\n $past(x)", 2, 2),
        ];
        for (src, line, col) in cases {
            match tokenize(src) {
                Err(FrontendError::Lex { line: l, col: c, .. }) => assert_eq!((l, c), (line, col), "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn numlit_display_round_trips() {
        for src in ["63", "8'd63", "1'b1", "32'h7FFFFFFF", "'o17", "4'b0"] {
            let TokenKind::Number(n) = tokenize(src).unwrap()[0].kind else { panic!() };
            let TokenKind::Number(m) = tokenize(&n.to_string()).unwrap()[0].kind else { panic!() };
            assert_eq!(n, m);
        }
    }
}
