//! Expected typing judgments, checked against `check_expr` and `check_stmt`.

use mpcc_core::frontend::{parse_source, Expr, Stmt, StmtKind};
use mpcc_core::typecheck::{check_expr, check_stmt, Atomic, OwnerSet, Scheme, SecType, TypeEnv};

pub enum Expect {
    /// The expression has this type.
    Type(&'static str),
    /// The statement succeeds and binds the variable to this type.
    Binds(&'static str, &'static str),
    /// The judgment fails under this rule.
    Rule(&'static str),
}

pub struct Judgment {
    pub scheme: Scheme,
    /// A statement when it ends in `;` or in a block other than an `if`
    /// expression's; otherwise a bare expression.
    pub src: &'static str,
    pub expect: Expect,
}

const G: Scheme = Scheme::Generic;
const T: Scheme = Scheme::Tfhe;
const A3: Scheme = Scheme::AdditiveShare(3);

fn j(scheme: Scheme, src: &'static str, expect: Expect) -> Judgment {
    Judgment {
        scheme,
        src,
        expect,
    }
}

pub fn table() -> Vec<Judgment> {
    use Expect::*;
    vec![
        j(G, "x1 + x2", Type("int@{1, 2}")),
        j(G, "x1 + 3", Type("int@{1}")),
        j(G, "n * 4", Type("int")),
        j(G, "x1 < x2", Type("bool@{1, 2}")),
        j(G, "b1 && t", Type("bool@{1}")),
        j(G, "b1 || b2", Type("bool@{1, 2}")),
        j(G, "x1 + t", Rule("binop")),
        j(G, "x1 / 2", Rule("div-plain")),
        j(G, "eval({1, 2}, x1 + x2)", Type("int")),
        j(G, "eval({1, 2}, x1)", Type("int")),
        j(G, "eval({1}, x12)", Rule("eval-valid")),
        j(G, "eval({1}, n)", Rule("eval")),
        j(G, "if (b1) then { x2 } else { 0 }", Type("int@{1, 2}")),
        j(G, "if (t) then { n } else { 1 }", Type("int")),
        j(G, "if (n) then { 1 } else { 2 }", Rule("if")),
        j(G, "arr1[n]", Type("int@{1}")),
        j(G, "parr[x2]", Type("int@{2}")),
        j(G, "arr1.length", Type("int")),
        j(G, "arr1.slice(0, 2)", Type("int[]@{1}")),
        j(G, "reduce(+, arr1)", Type("int@{1}")),
        j(G, "pow(x1, 3)", Type("int@{1}")),
        j(G, "[x1, x2]", Type("int[]@{1, 2}")),
        j(G, "zeros(3)", Type("int[]")),
        j(G, "y", Rule("var")),
        j(T, "x1 + x2", Rule("tfhe-owner")),
        j(T, "x1 + 3", Type("int@{1}")),
        j(T, "eval({1}, x1)", Type("int")),
        j(T, "eval({1, 2}, x1)", Rule("eval-valid")),
        j(A3, "eval({0, 1, 2}, x1)", Type("int")),
        j(A3, "x0 * x2", Type("int@{0, 2}")),
        j(G, "val x1 : int := 3;", Rule("decl")),
        j(G, "val z : int@{1} := x1;", Binds("z", "int@{1}")),
        j(G, "val z : int@{1, 2} := x1;", Binds("z", "int@{1, 2}")),
        j(G, "val z : int@{1} := x12;", Rule("decl")),
        j(G, "val z : int := x1;", Rule("decl")),
        j(G, "val z : int@{2} := 7;", Binds("z", "int@{2}")),
        j(T, "val z : int@{1, 2} := 0;", Rule("tfhe-singleton")),
        j(G, "x1 := x2;", Binds("x1", "int@{1, 2}")),
        j(G, "x12 := x1;", Binds("x12", "int@{1, 2}")),
        j(G, "x12 := t;", Rule("assign")),
        j(G, "n := x1;", Binds("n", "int@{1}")),
        j(G, "output x1;", Rule("output")),
        j(G, "output eval({1}, x1);", Binds("x1", "int@{1}")),
        j(
            G,
            "if (b1) { x1 := 1; } else { x12 := 2; }",
            Binds("x1", "int@{1}"),
        ),
        j(
            G,
            "if (b2) { x1 := 1; } else { }",
            Binds("x1", "int@{1, 2}"),
        ),
        j(G, "if (b2) { n := 1; } else { }", Binds("n", "int@{2}")),
        j(G, "if (b1) { output 1; } else { }", Rule("output-pc")),
        j(G, "arr1[n] := x1;", Binds("arr1", "int[]@{1}")),
        j(G, "while (n < 3) { n := n + 1; }", Binds("n", "int")),
        j(G, "while (x1 < 3) { n := n + 1; }", Rule("while")),
    ]
}

/// Γ shared by every judgment.
pub fn env() -> TypeEnv {
    let own = |a, ps: &[u32]| SecType::Owned(a, OwnerSet::new(ps.iter().copied()));
    TypeEnv::from([
        ("x0".into(), own(Atomic::Int, &[0])),
        ("x1".into(), own(Atomic::Int, &[1])),
        ("x2".into(), own(Atomic::Int, &[2])),
        ("x12".into(), own(Atomic::Int, &[1, 2])),
        ("b1".into(), own(Atomic::Bool, &[1])),
        ("b2".into(), own(Atomic::Bool, &[2])),
        ("n".into(), SecType::Plain(Atomic::Int)),
        ("t".into(), SecType::Plain(Atomic::Bool)),
        ("arr1".into(), SecType::Arr(OwnerSet::singleton(1))),
        ("parr".into(), SecType::PlainArr),
    ])
}

fn parse_stmt(src: &str) -> Stmt {
    let p =
        parse_source(&format!("parties 0, 1, 2;\n{src}")).unwrap_or_else(|e| panic!("{src}: {e}"));
    p.main.stmts.into_iter().next().expect("one statement")
}

fn parse_expr(src: &str) -> Expr {
    match parse_stmt(&format!("output {src};")).kind {
        StmtKind::Output(e) => e,
        _ => unreachable!(),
    }
}

/// `Err` describes the first judgment that does not hold.
pub fn check(jd: &Judgment) -> Result<(), String> {
    let gamma = env();
    let is_stmt = jd.src.ends_with(';') || jd.src.ends_with('}') && !jd.src.contains(" then ");
    let got: Result<String, String> = if is_stmt {
        let s = parse_stmt(jd.src);
        check_stmt(&gamma, &s, jd.scheme)
            .map_err(|e| e.rule.to_string())
            .map(|out| match &jd.expect {
                Expect::Binds(x, _) => out.get(*x).map(|t| t.to_string()).unwrap_or_default(),
                _ => String::new(),
            })
    } else {
        check_expr(&gamma, &parse_expr(jd.src), jd.scheme)
            .map(|t| t.to_string())
            .map_err(|e| e.rule.to_string())
    };
    let ok = match (&jd.expect, &got) {
        (Expect::Type(t), Ok(g)) | (Expect::Binds(_, t), Ok(g)) => t == g,
        (Expect::Rule(r), Err(g)) => r == g,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{:?} `{}`: got {:?}", jd.scheme, jd.src, got))
    }
}
