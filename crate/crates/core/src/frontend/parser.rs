//! Recursive-descent parser producing a [`Program`].
//!
//! Surface syntax summary:
//!
//! ```text
//! parties 0, 1, 2;
//! fn f(x: int@{1}, n: int) -> int@{1} bound n { <stmts> <expr> }
//! input x : int from 1;                 // sugar for val x : int@{1} := input(1, int);
//! val y : int@{1} := x * 2;
//! y := if (y < 3) then { y } else { 0 };
//! a[i] := v;
//! while (i < 4) { ...; i := i + 1; }
//! if (c) { ... } else { ... }
//! output eval({1}, y);
//! ```

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, LexError, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{pos}: expected {}, found {found}", expected.join(" or "))]
    Unexpected {
        pos: Span,
        expected: Vec<String>,
        found: String,
    },
    #[error("{pos}: {message}")]
    Invalid { pos: Span, message: String },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Lex(e) => e.span(),
            ParseError::Unexpected { pos, .. } | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}

type PResult<T> = Result<T, ParseError>;

/// Tokenize and parse in one step.
pub fn parse_source(source: &str) -> PResult<Program> {
    let tokens = tokenize(source)?;
    parse(&tokens)
}

/// Parse a token sequence. Stops at the first error.
pub fn parse(tokens: &[Token]) -> PResult<Program> {
    let mut p = Parser {
        toks: tokens,
        pos: 0,
    };
    let prog = p.program()?;
    check_well_formed(&prog)?;
    Ok(prog)
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&'a TokenKind> {
        self.toks.get(self.pos + n).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        match self.toks.get(self.pos) {
            Some(t) => t.span,
            None => self
                .toks
                .last()
                .map(|t| Span {
                    lo: t.span.hi,
                    ..t.span
                })
                .unwrap_or_default(),
        }
    }

    fn prev_span(&self) -> Span {
        self.pos
            .checked_sub(1)
            .map(|i| self.toks[i].span)
            .unwrap_or_default()
    }

    fn unexpected<T>(&self, expected: &[&str]) -> PResult<T> {
        let found = self
            .peek()
            .map(|k| k.to_string())
            .unwrap_or_else(|| "end of input".into());
        Err(ParseError::Unexpected {
            pos: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        })
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.peek() == Some(&kind) {
            self.pos += 1;
            Ok(self.prev_span())
        } else {
            self.unexpected(&[&kind.to_string()])
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                self.pos += 1;
                Ok(name.clone())
            }
            _ => self.unexpected(&["identifier"]),
        }
    }

    fn number(&mut self) -> PResult<i64> {
        match self.peek() {
            Some(TokenKind::Num(n)) => {
                self.pos += 1;
                Ok(*n)
            }
            _ => self.unexpected(&["number"]),
        }
    }

    fn party(&mut self) -> PResult<PartyId> {
        let pos = self.span();
        let n = self.number()?;
        PartyId::try_from(n).map_err(|_| ParseError::Invalid {
            pos,
            message: format!("party id {n} out of range"),
        })
    }

    fn program(&mut self) -> PResult<Program> {
        let mut prog = Program::default();
        while let Some(tok) = self.peek() {
            match tok {
                TokenKind::Parties => {
                    self.pos += 1;
                    loop {
                        let p = self.party()?;
                        prog.declared_parties.insert(p);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                    self.expect(TokenKind::Semi)?;
                }
                TokenKind::Fn => prog.functions.push(self.func_def()?),
                _ => {
                    match self.stmt_or_result()? {
                        Item::Stmt(s) => prog.main.stmts.push(s),
                        Item::Result(e) => return Err(ParseError::Invalid {
                            pos: e.span,
                            message:
                                "a bare expression is only allowed at the end of a function body"
                                    .into(),
                        }),
                    }
                }
            }
        }
        Ok(prog)
    }

    fn func_def(&mut self) -> PResult<FuncDef> {
        let start = self.expect(TokenKind::Fn)?;
        let name = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                let pname = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let ty = self.sec_type()?;
                params.push(Param { name: pname, ty });
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                self.expect(TokenKind::Comma)?;
            }
        }
        self.expect(TokenKind::Arrow)?;
        let return_type = self.sec_type()?;
        let bound = if self.eat(&TokenKind::Bound) {
            Some(self.expr()?)
        } else {
            None
        };
        let body = self.block(true)?;
        if body.result.is_none() {
            return Err(ParseError::Invalid {
                pos: self.prev_span(),
                message: format!("body of `{name}` must end with a result expression"),
            });
        }
        Ok(FuncDef {
            name,
            params,
            return_type,
            bound,
            body,
            span: start.to(self.prev_span()),
        })
    }

    fn owner_set(&mut self) -> PResult<BTreeSet<PartyId>> {
        self.expect(TokenKind::LBrace)?;
        let mut set = BTreeSet::new();
        loop {
            set.insert(self.party()?);
            if self.eat(&TokenKind::RBrace) {
                return Ok(set);
            }
            self.expect(TokenKind::Comma)?;
        }
    }

    fn sec_type(&mut self) -> PResult<SecTypeSyntax> {
        let start = self.span();
        let atomic = match self.peek() {
            Some(TokenKind::Int) => AtomicSyntax::Int,
            Some(TokenKind::Bool) => AtomicSyntax::Bool,
            _ => return self.unexpected(&["`int`", "`bool`"]),
        };
        self.pos += 1;
        let array = if self.eat(&TokenKind::LBracket) {
            if self.eat(&TokenKind::RBracket) {
                Some(None)
            } else {
                let pos = self.span();
                let n = self.number()?;
                let n = u32::try_from(n).map_err(|_| ParseError::Invalid {
                    pos,
                    message: "array length out of range".into(),
                })?;
                self.expect(TokenKind::RBracket)?;
                Some(Some(n))
            }
        } else {
            None
        };
        let owners = if self.eat(&TokenKind::At) {
            Some(self.owner_set()?)
        } else {
            None
        };
        Ok(SecTypeSyntax {
            atomic,
            array,
            owners,
            span: start.to(self.prev_span()),
        })
    }

    /// `{ stmt* [expr] }`
    fn block(&mut self, allow_result: bool) -> PResult<Block> {
        self.expect(TokenKind::LBrace)?;
        let mut block = Block::default();
        loop {
            if self.eat(&TokenKind::RBrace) {
                return Ok(block);
            }
            match self.stmt_or_result()? {
                Item::Stmt(s) => block.stmts.push(s),
                Item::Result(e) => {
                    if !allow_result {
                        return Err(ParseError::Invalid {
                            pos: e.span,
                            message: "expression result not allowed in a statement block".into(),
                        });
                    }
                    block.result = Some(Box::new(e));
                    self.expect(TokenKind::RBrace)?;
                    return Ok(block);
                }
            }
        }
    }

    fn stmt_or_result(&mut self) -> PResult<Item> {
        let start = self.span();
        let kind = match self.peek() {
            Some(TokenKind::Skip) => {
                self.pos += 1;
                self.expect(TokenKind::Semi)?;
                StmtKind::Skip
            }
            Some(TokenKind::Val) => {
                self.pos += 1;
                let name = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let ty = self.sec_type()?;
                self.expect(TokenKind::Assign)?;
                let e = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::ValDecl(name, ty, e)
            }
            Some(TokenKind::Input) if matches!(self.peek_at(1), Some(TokenKind::Ident(_))) => {
                self.pos += 1;
                let name = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let ty = self.sec_type()?;
                if ty.owners.is_some() {
                    return Err(ParseError::Invalid {
                        pos: ty.span,
                        message: "input types take their owner from the `from` clause".into(),
                    });
                }
                self.expect(TokenKind::From)?;
                let party = self.party()?;
                self.expect(TokenKind::Semi)?;
                let span = start.to(self.prev_span());
                let declared = SecTypeSyntax {
                    owners: Some(BTreeSet::from([party])),
                    ..ty.clone()
                };
                StmtKind::ValDecl(name, declared, Expr::new(ExprKind::Input(party, ty), span))
            }
            Some(TokenKind::While) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let var = self.ident()?;
                self.expect(TokenKind::Lt)?;
                let bound = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let body = self.block(false)?;
                StmtKind::While(var, bound, body)
            }
            Some(TokenKind::Output) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Output(e)
            }
            Some(TokenKind::If) => {
                self.pos += 1;
                let cond = self.expr()?;
                if self.peek() == Some(&TokenKind::Then) {
                    let e = self.finish_if_expr(start, cond)?;
                    let e = self.binary_rest(e, 0)?;
                    return Ok(Item::Result(e));
                }
                let then_block = self.block(false)?;
                let else_block = if self.eat(&TokenKind::Else) {
                    if self.peek() == Some(&TokenKind::If) {
                        match self.stmt_or_result()? {
                            Item::Stmt(s) => Block {
                                stmts: vec![s],
                                result: None,
                            },
                            Item::Result(e) => {
                                return Err(ParseError::Invalid {
                                    pos: e.span,
                                    message: "`else if` must continue a statement conditional"
                                        .into(),
                                })
                            }
                        }
                    } else {
                        self.block(false)?
                    }
                } else {
                    Block::default()
                };
                StmtKind::If(cond, then_block, else_block)
            }
            _ => {
                let e = self.expr()?;
                if self.eat(&TokenKind::Assign) {
                    let value = self.expr()?;
                    self.expect(TokenKind::Semi)?;
                    match e.kind {
                        ExprKind::Var(name) => StmtKind::Assign(name, value),
                        ExprKind::ArrIndex(name, idx) => StmtKind::ArrUpdate(name, *idx, value),
                        _ => {
                            return Err(ParseError::Invalid {
                                pos: e.span,
                                message: "left side of `:=` must be a variable or an array element"
                                    .into(),
                            })
                        }
                    }
                } else if self.peek() == Some(&TokenKind::RBrace) {
                    return Ok(Item::Result(e));
                } else {
                    return self.unexpected(&["`:=`", "`}`"]);
                }
            }
        };
        Ok(Item::Stmt(Stmt {
            kind,
            span: start.to(self.prev_span()),
        }))
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.unary()?;
        self.binary_rest(lhs, 0)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek()? {
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::NotEq => BinOp::Ne,
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::Plus => BinOp::Add,
            TokenKind::Minus => BinOp::Sub,
            TokenKind::Star => BinOp::Mul,
            TokenKind::Slash => BinOp::Div,
            TokenKind::Percent => BinOp::Rem,
            TokenKind::AndAnd => BinOp::And,
            TokenKind::OrOr => BinOp::Or,
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary_rest(&mut self, mut lhs: Expr, min_prec: u8) -> PResult<Expr> {
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let mut rhs = self.unary()?;
            while let Some(next) = self.binop() {
                if next.precedence() > prec {
                    rhs = self.binary_rest(rhs, prec + 1)?;
                } else {
                    break;
                }
            }
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::BinOp(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        // Negative integer literals are the only prefix form.
        if self.peek() == Some(&TokenKind::Minus) {
            if let Some(TokenKind::Num(n)) = self.peek_at(1) {
                let start = self.span();
                self.pos += 2;
                return Ok(Expr::new(ExprKind::IntLit(-n), start.to(self.prev_span())));
            }
        }
        self.primary()
    }

    fn finish_if_expr(&mut self, start: Span, cond: Expr) -> PResult<Expr> {
        self.expect(TokenKind::Then)?;
        self.expect(TokenKind::LBrace)?;
        let a = self.expr()?;
        self.expect(TokenKind::RBrace)?;
        self.expect(TokenKind::Else)?;
        let b = if self.peek() == Some(&TokenKind::If) {
            let s = self.span();
            self.pos += 1;
            let c = self.expr()?;
            self.finish_if_expr(s, c)?
        } else {
            self.expect(TokenKind::LBrace)?;
            let b = self.expr()?;
            self.expect(TokenKind::RBrace)?;
            b
        };
        Ok(Expr::new(
            ExprKind::If(Box::new(cond), Box::new(a), Box::new(b)),
            start.to(self.prev_span()),
        ))
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&TokenKind::RParen) {
                return Ok(args);
            }
            self.expect(TokenKind::Comma)?;
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.span();
        let kind = match self.peek() {
            Some(TokenKind::Num(n)) => {
                self.pos += 1;
                ExprKind::IntLit(*n)
            }
            Some(TokenKind::True) => {
                self.pos += 1;
                ExprKind::BoolLit(true)
            }
            Some(TokenKind::False) => {
                self.pos += 1;
                ExprKind::BoolLit(false)
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(e);
            }
            Some(TokenKind::If) => {
                self.pos += 1;
                let cond = self.expr()?;
                return self.finish_if_expr(start, cond);
            }
            Some(TokenKind::Eval) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let owners = self.owner_set()?;
                self.expect(TokenKind::Comma)?;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                ExprKind::Eval(owners, Box::new(e))
            }
            Some(TokenKind::Pow) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let base = self.expr()?;
                self.expect(TokenKind::Comma)?;
                let pos = self.span();
                let n = self.number()?;
                let n = u32::try_from(n).map_err(|_| ParseError::Invalid {
                    pos,
                    message: "exponent out of range".into(),
                })?;
                self.expect(TokenKind::RParen)?;
                ExprKind::Pow(Box::new(base), n)
            }
            Some(TokenKind::Reduce) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let op = match self.peek() {
                    Some(TokenKind::Plus) => ReduceOp::Add,
                    Some(TokenKind::Star) => ReduceOp::Mul,
                    Some(TokenKind::Ident(w)) if w == "max" => ReduceOp::Max,
                    Some(TokenKind::Ident(w)) if w == "min" => ReduceOp::Min,
                    _ => return self.unexpected(&["`+`", "`*`", "`max`", "`min`"]),
                };
                self.pos += 1;
                self.expect(TokenKind::Comma)?;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                ExprKind::Reduce(op, Box::new(e))
            }
            Some(TokenKind::Input) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let party = self.party()?;
                self.expect(TokenKind::Comma)?;
                let ty = self.sec_type()?;
                self.expect(TokenKind::RParen)?;
                ExprKind::Input(party, ty)
            }
            Some(TokenKind::Zeros) => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                ExprKind::Zeros(Box::new(e))
            }
            Some(TokenKind::LBracket) => {
                self.pos += 1;
                let mut elems = Vec::new();
                if !self.eat(&TokenKind::RBracket) {
                    loop {
                        elems.push(self.expr()?);
                        if self.eat(&TokenKind::RBracket) {
                            break;
                        }
                        self.expect(TokenKind::Comma)?;
                    }
                }
                ExprKind::ArrayLit(elems)
            }
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                match self.peek() {
                    Some(TokenKind::LParen) => {
                        self.pos += 1;
                        ExprKind::Call(name, self.args()?)
                    }
                    Some(TokenKind::LBracket) => {
                        self.pos += 1;
                        let idx = self.expr()?;
                        self.expect(TokenKind::RBracket)?;
                        ExprKind::ArrIndex(name, Box::new(idx))
                    }
                    Some(TokenKind::Dot) => {
                        self.pos += 1;
                        match self.peek() {
                            Some(TokenKind::Ident(m)) if m == "length" => {
                                self.pos += 1;
                                ExprKind::ArrLen(name)
                            }
                            Some(TokenKind::Ident(m)) if m == "slice" => {
                                self.pos += 1;
                                self.expect(TokenKind::LParen)?;
                                let i = self.expr()?;
                                self.expect(TokenKind::Comma)?;
                                let j = self.expr()?;
                                self.expect(TokenKind::RParen)?;
                                ExprKind::ArrSlice(name, Box::new(i), Box::new(j))
                            }
                            _ => return self.unexpected(&["`length`", "`slice`"]),
                        }
                    }
                    _ => ExprKind::Var(name),
                }
            }
            _ => return self.unexpected(&["expression"]),
        };
        Ok(Expr::new(kind, start.to(self.prev_span())))
    }
}

enum Item {
    Stmt(Stmt),
    Result(Expr),
}

/// Program-level invariants: unique function names and declared parties.
fn check_well_formed(prog: &Program) -> PResult<()> {
    let mut seen = BTreeSet::new();
    for f in &prog.functions {
        if !seen.insert(f.name.as_str()) {
            return Err(ParseError::Invalid {
                pos: f.span,
                message: format!("duplicate function `{}`", f.name),
            });
        }
    }
    let mut bad: Option<(Span, PartyId)> = None;
    let mut check_set = |set: &BTreeSet<PartyId>, span: Span| {
        if bad.is_none() {
            if let Some(p) = set.iter().find(|p| !prog.declared_parties.contains(p)) {
                bad = Some((span, *p));
            }
        }
    };
    let visit_ty = |ty: &SecTypeSyntax, check: &mut dyn FnMut(&BTreeSet<PartyId>, Span)| {
        if let Some(o) = &ty.owners {
            check(o, ty.span);
        }
    };
    let visit_block = |b: &Block, check: &mut dyn FnMut(&BTreeSet<PartyId>, Span)| {
        b.walk_stmts(&mut |s| {
            if let StmtKind::ValDecl(_, ty, _) = &s.kind {
                if let Some(o) = &ty.owners {
                    check(o, ty.span);
                }
            }
        });
        b.walk_exprs(&mut |e| match &e.kind {
            ExprKind::Eval(o, _) => check(o, e.span),
            ExprKind::Input(p, _) => check(&BTreeSet::from([*p]), e.span),
            _ => {}
        });
    };
    for f in &prog.functions {
        for p in &f.params {
            visit_ty(&p.ty, &mut check_set);
        }
        visit_ty(&f.return_type, &mut check_set);
        visit_block(&f.body, &mut check_set);
    }
    visit_block(&prog.main, &mut check_set);
    if let Some((pos, p)) = bad {
        return Err(ParseError::Invalid {
            pos,
            message: format!("party {p} is not declared in `parties`"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp() -> Span {
        Span::default()
    }

    fn e(kind: ExprKind) -> Expr {
        Expr::new(kind, sp())
    }

    #[test]
    fn skip_program() {
        let p = parse_source("skip;").unwrap();
        assert_eq!(
            p.main.stmts,
            vec![Stmt {
                kind: StmtKind::Skip,
                span: sp()
            }]
        );
        assert!(p.functions.is_empty());
    }

    #[test]
    fn precedence_and_associativity() {
        let p = parse_source("val x : int := 1 + 2 * 3 - 4;").unwrap();
        let StmtKind::ValDecl(_, _, rhs) = &p.main.stmts[0].kind else {
            panic!()
        };
        let lit = |n| Box::new(e(ExprKind::IntLit(n)));
        let expected = e(ExprKind::BinOp(
            BinOp::Sub,
            Box::new(e(ExprKind::BinOp(
                BinOp::Add,
                lit(1),
                Box::new(e(ExprKind::BinOp(BinOp::Mul, lit(2), lit(3)))),
            ))),
            lit(4),
        ));
        assert_eq!(rhs, &expected);
    }

    #[test]
    fn input_sugar_desugars_to_declaration() {
        let p = parse_source("parties 1; input x : int from 1;").unwrap();
        let q = parse_source("parties 1; val x : int@{1} := input(1, int);").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn undeclared_party_rejected() {
        let err = parse_source("parties 1; input x : int from 2;").unwrap_err();
        assert!(matches!(err, ParseError::Invalid { .. }), "{err}");
    }

    #[test]
    fn duplicate_function_rejected() {
        let src = "fn f() -> int { 1 } fn f() -> int { 2 }";
        assert!(parse_source(src).is_err());
    }

    #[test]
    fn error_reports_expected_set() {
        let err = parse_source("val x int := 1;").unwrap_err();
        match err {
            ParseError::Unexpected { pos, expected, .. } => {
                assert_eq!((pos.line, pos.col), (1, 7));
                assert_eq!(expected, vec!["`:`".to_string()]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn function_with_bound_and_if_expression() {
        let src = "parties 1;
            fn gcd(x: int@{1}, y: int@{1}) -> int@{1} bound 5 {
                if (x == 0) then { y } else { gcd(y % x, x) }
            }";
        let p = parse_source(src).unwrap();
        let f = &p.functions[0];
        assert_eq!(f.name, "gcd");
        assert_eq!(f.bound.as_ref().unwrap().kind, ExprKind::IntLit(5));
        assert!(matches!(
            f.body.result.as_deref().unwrap().kind,
            ExprKind::If(..)
        ));
    }

    #[test]
    fn else_if_chain_nests() {
        let p =
            parse_source("val x : int := 0; if (x < 1) { x := 1; } else if (x < 2) { x := 2; }")
                .unwrap();
        let StmtKind::If(_, _, els) = &p.main.stmts[1].kind else {
            panic!()
        };
        assert!(matches!(els.stmts[0].kind, StmtKind::If(..)));
    }

    #[test]
    fn array_update_and_builtins() {
        let src = "parties 1; input a : int[4] from 1; a[1] := a[0] + a.length;
                   val s : int@{1} := reduce(+, a.slice(0, 2));";
        let p = parse_source(src).unwrap();
        assert!(matches!(p.main.stmts[1].kind, StmtKind::ArrUpdate(..)));
    }

    #[test]
    fn bare_expression_in_main_rejected() {
        assert!(parse_source("1 + 2 }").is_err());
    }
}
