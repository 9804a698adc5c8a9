//! Recursive-descent parser. The first error aborts; there is no recovery.

use super::ast::*;
use super::lexer::{tokenize, NumLit, Token, TokenKind};
use super::FrontendError;

pub(crate) struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    auto_names: usize,
}

type PResult<T> = Result<T, FrontendError>;

impl<'t> Parser<'t> {
    pub(crate) fn new(tokens: &'t [Token]) -> Self {
        assert!(
            tokens.last().is_some_and(|t| t.kind == TokenKind::Eof),
            "token stream must end with Eof"
        );
        Parser {
            tokens,
            pos: 0,
            auto_names: 0,
        }
    }

    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos]
    }

    fn peek_nth(&self, n: usize) -> &'t Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> &'t Token {
        let tok = &self.tokens[self.pos];
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    pub(crate) fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn error(&self, expected: impl Into<String>) -> FrontendError {
        let tok = self.peek();
        FrontendError::Parse {
            line: tok.line,
            col: tok.col,
            expected: expected.into(),
            found: tok.describe(),
        }
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.peek().is(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.eat(text) {
            Ok(())
        } else {
            Err(self.error(format!("`{text}`")))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        if self.peek().kind == TokenKind::Ident {
            Ok(self.advance().text.clone())
        } else {
            Err(self.error("identifier"))
        }
    }

    fn number(&mut self) -> PResult<NumLit> {
        match self.peek().kind {
            TokenKind::Number(n) => {
                self.advance();
                Ok(n)
            }
            _ => Err(self.error("number")),
        }
    }

    fn small_int(&mut self) -> PResult<u32> {
        let n = self.number()?;
        u32::try_from(n.value).map_err(|_| {
            let tok = &self.tokens[self.pos - 1];
            FrontendError::Parse {
                line: tok.line,
                col: tok.col,
                expected: "index below 2^32".into(),
                found: tok.describe(),
            }
        })
    }

    /// Folds `N`, `N-1`, `N+M-1` style range bounds.
    fn const_int(&mut self) -> PResult<i64> {
        let mut acc = self.small_int()? as i64;
        loop {
            if self.eat("-") {
                acc -= self.small_int()? as i64;
            } else if self.eat("+") {
                acc += self.small_int()? as i64;
            } else {
                return Ok(acc);
            }
        }
    }

    /// Optional `[msb:0]` packed range; width 1 when absent.
    fn opt_range(&mut self) -> PResult<u32> {
        if !self.peek().is("[") {
            return Ok(1);
        }
        self.advance();
        let msb_tok = self.peek();
        let msb = self.const_int()?;
        self.expect(":")?;
        let lsb_tok = self.peek();
        let lsb = self.const_int()?;
        if lsb != 0 {
            return Err(FrontendError::Parse {
                line: lsb_tok.line,
                col: lsb_tok.col,
                expected: "range ending in `:0`".into(),
                found: lsb_tok.describe(),
            });
        }
        if !(0..64).contains(&msb) {
            return Err(FrontendError::Parse {
                line: msb_tok.line,
                col: msb_tok.col,
                expected: "msb in 0..=63".into(),
                found: msb_tok.describe(),
            });
        }
        self.expect("]")?;
        Ok(msb as u32 + 1)
    }

    fn net_kind(&mut self) -> Option<NetKind> {
        let kind = match self.peek().text.as_str() {
            "reg" => NetKind::Reg,
            "wire" => NetKind::Wire,
            "logic" => NetKind::Logic,
            _ => return None,
        };
        if self.peek().kind != TokenKind::Keyword {
            return None;
        }
        self.advance();
        Some(kind)
    }

    pub(crate) fn module(&mut self) -> PResult<ModuleAst> {
        self.expect("module")?;
        let name = self.ident()?;
        let mut ports = Vec::new();
        if self.eat("(") {
            if !self.eat(")") {
                let mut current: Option<(PortDir, Option<NetKind>, u32)> = None;
                loop {
                    let dir = if self.eat("input") {
                        Some(PortDir::Input)
                    } else if self.eat("output") {
                        Some(PortDir::Output)
                    } else {
                        None
                    };
                    let header = match dir {
                        Some(dir) => {
                            let net = self.net_kind();
                            let width = self.opt_range()?;
                            (dir, net, width)
                        }
                        None => current.ok_or_else(|| self.error("`input` or `output`"))?,
                    };
                    current = Some(header);
                    let port_name = self.ident()?;
                    ports.push(Port {
                        dir: header.0,
                        net: header.1,
                        name: port_name,
                        width: header.2,
                    });
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
        }
        self.expect(";")?;

        let mut module = ModuleAst {
            name,
            ports,
            decls: Vec::new(),
            assigns: Vec::new(),
            seq_blocks: Vec::new(),
            assertions: Vec::new(),
        };
        while !self.eat("endmodule") {
            self.module_item(&mut module)?;
        }
        if !self.at_eof() {
            return Err(self.error("end of input"));
        }
        Ok(module)
    }

    fn module_item(&mut self, module: &mut ModuleAst) -> PResult<()> {
        if let Some(kind) = self.net_kind() {
            let width = self.opt_range()?;
            loop {
                let name = self.ident()?;
                let init = if self.eat("=") { Some(self.number()?) } else { None };
                module.decls.push(Decl {
                    kind,
                    name,
                    width,
                    init,
                });
                if self.eat(";") {
                    return Ok(());
                }
                if !self.eat(",") {
                    return Err(self.error("`;` or `,`"));
                }
            }
        }
        if self.eat("assign") {
            let lhs = self.ident()?;
            self.expect("=")?;
            let rhs = self.expr()?;
            self.expect(";")?;
            module.assigns.push(ContAssign { lhs, rhs });
            return Ok(());
        }
        if self.peek().is("always_ff") || self.peek().is("always") {
            self.advance();
            self.expect("@")?;
            self.expect("(")?;
            self.expect("posedge")?;
            let clock = self.ident()?;
            self.expect(")")?;
            let body = self.stmt_block()?;
            module.seq_blocks.push(SeqBlock { clock, body });
            return Ok(());
        }
        if self.peek().is("assert") || self.peek().is("assume") || self.is_label() {
            let assertion = self.assertion_stmt()?;
            module.assertions.push(assertion);
            return Ok(());
        }
        Err(self.error("module item"))
    }

    fn is_label(&self) -> bool {
        self.peek().kind == TokenKind::Ident
            && self.peek_nth(1).is(":")
            && (self.peek_nth(2).is("assert") || self.peek_nth(2).is("assume"))
    }

    /// `begin ... end` or a single statement.
    fn stmt_block(&mut self) -> PResult<Vec<Stmt>> {
        if self.eat("begin") {
            let mut body = Vec::new();
            while !self.eat("end") {
                body.push(self.stmt()?);
            }
            Ok(body)
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.eat("if") {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let then = self.stmt_block()?;
            let els = if self.eat("else") {
                Some(self.stmt_block()?)
            } else {
                None
            };
            return Ok(Stmt::If { cond, then, els });
        }
        if self.peek().kind != TokenKind::Ident {
            return Err(self.error("statement"));
        }
        let lhs = self.ident()?;
        self.expect("<=")?;
        let rhs = self.expr()?;
        self.expect(";")?;
        Ok(Stmt::NonBlocking { lhs, rhs })
    }

    fn fresh_name(&mut self, kind: AssertKind) -> String {
        let name = format!("{}_{}", kind.keyword(), self.auto_names);
        self.auto_names += 1;
        name
    }

    /// `[label:] assert|assume property ( [@(posedge clk)] expr ) ;`
    fn assertion_stmt(&mut self) -> PResult<AssertionAst> {
        let label = if self.is_label() {
            let l = self.ident()?;
            self.expect(":")?;
            Some(l)
        } else {
            None
        };
        let kind = if self.eat("assert") {
            AssertKind::Assert
        } else if self.eat("assume") {
            AssertKind::Assume
        } else {
            return Err(self.error("`assert` or `assume`"));
        };
        self.expect("property")?;
        self.expect("(")?;
        let clock = if self.eat("@") {
            self.expect("(")?;
            self.expect("posedge")?;
            let clk = self.ident()?;
            self.expect(")")?;
            Some(clk)
        } else {
            None
        };
        let body = self.expr()?;
        self.expect(")")?;
        self.expect(";")?;
        let name = match label {
            Some(l) => l,
            None => self.fresh_name(kind),
        };
        Ok(AssertionAst {
            name,
            kind,
            body,
            clock,
        })
    }

    /// Full statement form or a bare boolean expression (optional trailing `;`).
    pub(crate) fn assertion(&mut self) -> PResult<AssertionAst> {
        if self.peek().is("assert") || self.peek().is("assume") || self.is_label() {
            return self.assertion_stmt();
        }
        let body = self.expr()?;
        self.eat(";");
        Ok(AssertionAst {
            name: self.fresh_name(AssertKind::Assert),
            kind: AssertKind::Assert,
            body,
            clock: None,
        })
    }

    pub(crate) fn expr(&mut self) -> PResult<ExprAst> {
        let cond = self.binary(1)?;
        if self.eat("?") {
            let then = self.expr()?;
            self.expect(":")?;
            let els = self.expr()?;
            return Ok(ExprAst::Ternary {
                cond: Box::new(cond),
                then: Box::new(then),
                els: Box::new(els),
            });
        }
        Ok(cond)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<ExprAst> {
        let mut lhs = self.unary()?;
        loop {
            let tok = self.peek();
            if tok.kind != TokenKind::Operator {
                return Ok(lhs);
            }
            let Some(op) = BinaryOp::from_symbol(&tok.text) else {
                return Ok(lhs);
            };
            if op.precedence() < min_prec {
                return Ok(lhs);
            }
            self.advance();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<ExprAst> {
        let tok = self.peek();
        if tok.kind == TokenKind::Operator {
            let op = match tok.text.as_str() {
                "~" => Some(UnaryOp::Not),
                "!" => Some(UnaryOp::LogNot),
                "-" => Some(UnaryOp::Neg),
                "&" => Some(UnaryOp::RedAnd),
                "|" => Some(UnaryOp::RedOr),
                "^" => Some(UnaryOp::RedXor),
                _ => None,
            };
            if let Some(op) = op {
                self.advance();
                let arg = self.unary()?;
                return Ok(ExprAst::Unary {
                    op,
                    arg: Box::new(arg),
                });
            }
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<ExprAst> {
        let mut base = self.primary()?;
        while self.eat("[") {
            let hi = self.small_int()?;
            if self.eat(":") {
                let lo = self.small_int()?;
                self.expect("]")?;
                base = ExprAst::Slice {
                    base: Box::new(base),
                    hi,
                    lo,
                };
            } else {
                self.expect("]")?;
                base = ExprAst::Index {
                    base: Box::new(base),
                    index: hi,
                };
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<ExprAst> {
        let tok = self.peek();
        match &tok.kind {
            TokenKind::Ident => {
                self.advance();
                Ok(ExprAst::Ident(tok.text.clone()))
            }
            TokenKind::Number(n) => {
                self.advance();
                Ok(ExprAst::Number(*n))
            }
            TokenKind::Punct if tok.text == "(" => {
                self.advance();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            TokenKind::Punct if tok.text == "{" => {
                self.advance();
                let mut parts = vec![self.expr()?];
                while self.eat(",") {
                    parts.push(self.expr()?);
                }
                self.expect("}")?;
                Ok(ExprAst::Concat(parts))
            }
            _ => Err(self.error("expression")),
        }
    }
}

/// Parses a complete module from a token stream produced by `tokenize`.
pub fn parse_module(tokens: &[Token]) -> Result<ModuleAst, FrontendError> {
    Parser::new(tokens).module()
}

/// Tokenizes and parses a design source file.
pub fn parse_module_source(source: &str) -> Result<ModuleAst, FrontendError> {
    parse_module(&tokenize(source)?)
}

fn check_symbols(assertion: &AssertionAst, symbols: &SymbolTable) -> Result<(), FrontendError> {
    let mut unknown = None;
    assertion.body.for_each_ident(&mut |name| {
        if unknown.is_none() && !symbols.contains_key(name) {
            unknown = Some(name.to_string());
        }
    });
    match unknown {
        Some(name) => Err(FrontendError::UnknownSymbol { name }),
        None => Ok(()),
    }
}

/// Parses one standalone assertion and checks every identifier against `symbols`.
///
/// Accepts `assert property (@(posedge clk) E);`, `assume property (...)`, an
/// optional `label:` prefix, and the bare `E` form.
pub fn parse_assertion(source: &str, symbols: &SymbolTable) -> Result<AssertionAst, FrontendError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser::new(&tokens);
    let assertion = parser.assertion()?;
    if !parser.at_eof() {
        return Err(parser.error("end of assertion"));
    }
    check_symbols(&assertion, symbols)?;
    Ok(assertion)
}

/// Parses an assertion file: zero or more full-form assertion statements.
pub fn parse_assertion_file(source: &str, symbols: &SymbolTable) -> Result<Vec<AssertionAst>, FrontendError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser::new(&tokens);
    let mut out = Vec::new();
    while !parser.at_eof() {
        let a = parser.assertion_stmt()?;
        check_symbols(&a, symbols)?;
        out.push(a);
    }
    Ok(out)
}
