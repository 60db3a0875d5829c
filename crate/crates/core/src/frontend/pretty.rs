//! Source printer. Output re-parses to a structurally equal AST.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    if !p.declared_parties.is_empty() {
        let ids: Vec<String> = p.declared_parties.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(out, "parties {};", ids.join(", "));
    }
    for f in &p.functions {
        print_func(&mut out, f);
    }
    print_stmts(&mut out, &p.main.stmts, 0);
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    expr(&mut s, e);
    s
}

pub fn print_type(t: &SecTypeSyntax) -> String {
    let mut s = t.atomic.to_string();
    match t.array {
        None => {}
        Some(None) => s.push_str("[]"),
        Some(Some(n)) => {
            let _ = write!(s, "[{n}]");
        }
    }
    if let Some(o) = &t.owners {
        let _ = write!(s, "@{}", owner_set(o));
    }
    s
}

fn owner_set(o: &BTreeSet<PartyId>) -> String {
    let ids: Vec<String> = o.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", ids.join(", "))
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn print_func(out: &mut String, f: &FuncDef) {
    let params: Vec<String> = f
        .params
        .iter()
        .map(|p| format!("{}: {}", p.name, print_type(&p.ty)))
        .collect();
    let _ = write!(
        out,
        "fn {}({}) -> {}",
        f.name,
        params.join(", "),
        print_type(&f.return_type)
    );
    if let Some(b) = &f.bound {
        let _ = write!(out, " bound {}", print_expr(b));
    }
    out.push_str(" {\n");
    print_stmts(out, &f.body.stmts, 1);
    if let Some(r) = &f.body.result {
        indent(out, 1);
        out.push_str(&print_expr(r));
        out.push('\n');
    }
    out.push_str("}\n");
}

fn print_stmts(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        print_stmt(out, s, depth);
    }
}

fn print_block(out: &mut String, b: &Block, depth: usize) {
    out.push_str("{\n");
    print_stmts(out, &b.stmts, depth + 1);
    indent(out, depth);
    out.push('}');
}

fn print_stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    print_stmt_body(out, s, depth);
    out.push('\n');
}

fn print_stmt_body(out: &mut String, s: &Stmt, depth: usize) {
    match &s.kind {
        StmtKind::Skip => out.push_str("skip;"),
        StmtKind::ValDecl(x, t, e) => {
            let _ = write!(out, "val {x} : {} := {};", print_type(t), print_expr(e));
        }
        StmtKind::Assign(x, e) => {
            let _ = write!(out, "{x} := {};", print_expr(e));
        }
        StmtKind::ArrUpdate(x, i, v) => {
            let _ = write!(out, "{x}[{}] := {};", print_expr(i), print_expr(v));
        }
        StmtKind::Output(e) => {
            let _ = write!(out, "output {};", print_expr(e));
        }
        StmtKind::While(x, bound, body) => {
            let _ = write!(out, "while ({x} < {}) ", print_expr(bound));
            print_block(out, body, depth);
        }
        StmtKind::If(c, t, e) => {
            let _ = write!(out, "if ({}) ", print_expr(c));
            print_block(out, t, depth);
            match e.stmts.as_slice() {
                [] => {}
                [nested @ Stmt {
                    kind: StmtKind::If(..),
                    ..
                }] => {
                    out.push_str(" else ");
                    print_stmt_body(out, nested, depth);
                }
                _ => {
                    out.push_str(" else ");
                    print_block(out, e, depth);
                }
            }
        }
    }
}

fn operand(out: &mut String, e: &Expr, parent_prec: u8, right: bool) {
    let wrap = match &e.kind {
        ExprKind::BinOp(op, _, _) => {
            op.precedence() < parent_prec || (right && op.precedence() == parent_prec)
        }
        ExprKind::If(..) => true,
        _ => false,
    };
    if wrap {
        out.push('(');
        expr(out, e);
        out.push(')');
    } else {
        expr(out, e);
    }
}

fn expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::IntLit(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::BoolLit(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Var(x) => out.push_str(x),
        ExprKind::Eval(o, inner) => {
            let _ = write!(out, "eval({}, ", owner_set(o));
            expr(out, inner);
            out.push(')');
        }
        ExprKind::BinOp(op, a, b) => {
            let prec = op.precedence();
            operand(out, a, prec, false);
            let _ = write!(out, " {} ", op.symbol());
            operand(out, b, prec, true);
        }
        ExprKind::If(c, a, b) => {
            out.push_str("if (");
            expr(out, c);
            out.push_str(") then { ");
            expr(out, a);
            out.push_str(" } else { ");
            expr(out, b);
            out.push_str(" }");
        }
        ExprKind::Call(f, args) => {
            let args: Vec<String> = args.iter().map(print_expr).collect();
            let _ = write!(out, "{f}({})", args.join(", "));
        }
        ExprKind::ArrIndex(x, i) => {
            let _ = write!(out, "{x}[{}]", print_expr(i));
        }
        ExprKind::ArrSlice(x, i, j) => {
            let _ = write!(out, "{x}.slice({}, {})", print_expr(i), print_expr(j));
        }
        ExprKind::ArrLen(x) => {
            let _ = write!(out, "{x}.length");
        }
        ExprKind::Reduce(op, inner) => {
            let _ = write!(out, "reduce({}, {})", op.symbol(), print_expr(inner));
        }
        ExprKind::Pow(base, n) => {
            let _ = write!(out, "pow({}, {n})", print_expr(base));
        }
        ExprKind::Input(p, t) => {
            let _ = write!(out, "input({p}, {})", print_type(t));
        }
        ExprKind::ArrayLit(elems) => {
            let elems: Vec<String> = elems.iter().map(print_expr).collect();
            let _ = write!(out, "[{}]", elems.join(", "));
        }
        ExprKind::Zeros(n) => {
            let _ = write!(out, "zeros({})", print_expr(n));
        }
    }
}
