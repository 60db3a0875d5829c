use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::types::{valid, Atomic, OwnerSet, Scheme, SecType};
use crate::frontend::{BinOp, Block, Expr, ExprKind, Program, SecTypeSyntax, Span, Stmt, StmtKind};

/// Γ: variable bindings in scope.
pub type TypeEnv = BTreeMap<String, SecType>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: error[{rule}]: {message}")]
pub struct TypeError {
    pub span: Span,
    /// Name of the rule that failed to apply.
    pub rule: &'static str,
    pub message: String,
}

fn err<T>(span: Span, rule: &'static str, message: impl Into<String>) -> Result<T, TypeError> {
    Err(TypeError {
        span,
        rule,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub params: Vec<(String, SecType)>,
    pub ret: SecType,
}

/// A program together with the type of every expression, keyed by source span.
#[derive(Debug, Clone)]
pub struct TypedProgram {
    pub program: Program,
    pub scheme: Scheme,
    pub types: HashMap<(usize, usize), SecType>,
    pub signatures: BTreeMap<String, Signature>,
}

impl TypedProgram {
    pub fn type_of(&self, e: &Expr) -> Option<&SecType> {
        self.types.get(&e.span.key())
    }
}

/// Secret control context introduced by a branch on an owned condition.
struct PcFrame {
    owners: OwnerSet,
    /// Variables declared outside the branch; only these are tainted.
    outer: BTreeSet<String>,
}

struct Checker {
    scheme: Scheme,
    sigs: BTreeMap<String, Signature>,
    types: HashMap<(usize, usize), SecType>,
    pc: Vec<PcFrame>,
}

impl Checker {
    fn new(scheme: Scheme) -> Checker {
        Checker {
            scheme,
            sigs: BTreeMap::new(),
            types: HashMap::new(),
            pc: Vec::new(),
        }
    }

    fn resolve(&self, t: &SecTypeSyntax) -> Result<SecType, TypeError> {
        let atomic = Atomic::from(t.atomic);
        if t.is_array() && atomic != Atomic::Int {
            return err(t.span, "array-element", "array elements must be `int`");
        }
        if let Some(o) = &t.owners {
            if self.scheme == Scheme::Tfhe && o.len() != 1 {
                return err(
                    t.span,
                    "tfhe-singleton",
                    "owner sets must be a single party under tfhe",
                );
            }
        }
        let owners = t.owners.clone().map(OwnerSet::from);
        let shape = if t.is_array() {
            SecType::PlainArr
        } else {
            SecType::Plain(atomic)
        };
        Ok(shape.with_owners(owners))
    }

    /// Union of owner sets; under tfhe every owned part must share one singleton.
    fn join(&self, parts: &[Option<&OwnerSet>], span: Span) -> Result<Option<OwnerSet>, TypeError> {
        let mut acc: Option<OwnerSet> = None;
        for o in parts.iter().flatten() {
            acc = Some(match acc {
                None => (*o).clone(),
                Some(a) => {
                    if self.scheme == Scheme::Tfhe && &a != *o {
                        return err(
                            span,
                            "tfhe-owner",
                            format!("cannot combine values owned by {a} and {o} under tfhe"),
                        );
                    }
                    a.union(o)
                }
            });
        }
        Ok(acc)
    }

    fn assignable(&self, actual: &SecType, declared: &SecType) -> bool {
        let same_shape = match (actual.atomic(), declared.atomic()) {
            (Some(a), Some(b)) => a == b,
            (None, None) => true,
            _ => false,
        };
        if !same_shape {
            return false;
        }
        match (actual.owners(), declared.owners()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(o), Some(d)) => match self.scheme {
                Scheme::Tfhe => o == d,
                _ => o.is_subset(d),
            },
        }
    }

    fn pc_owners_for(&self, x: &str) -> Vec<&OwnerSet> {
        self.pc
            .iter()
            .filter(|f| f.outer.contains(x))
            .map(|f| &f.owners)
            .collect()
    }

    fn lookup<'e>(&self, env: &'e TypeEnv, x: &str, span: Span) -> Result<&'e SecType, TypeError> {
        match env.get(x) {
            Some(t) => Ok(t),
            None => err(span, "var", format!("unbound variable `{x}`")),
        }
    }

    fn scalar(
        &self,
        t: &SecType,
        want: Atomic,
        span: Span,
        rule: &'static str,
    ) -> Result<(), TypeError> {
        if t.atomic() == Some(want) {
            Ok(())
        } else {
            err(span, rule, format!("expected {want}, found {t}"))
        }
    }

    fn array<'t>(
        &self,
        t: &'t SecType,
        span: Span,
        rule: &'static str,
    ) -> Result<&'t SecType, TypeError> {
        if t.is_array() {
            Ok(t)
        } else {
            err(span, rule, format!("expected an array, found {t}"))
        }
    }

    fn expr(&mut self, env: &TypeEnv, e: &Expr) -> Result<SecType, TypeError> {
        let t = self.expr_inner(env, e)?;
        self.types.insert(e.span.key(), t.clone());
        Ok(t)
    }

    fn expr_inner(&mut self, env: &TypeEnv, e: &Expr) -> Result<SecType, TypeError> {
        let span = e.span;
        match &e.kind {
            ExprKind::IntLit(_) => Ok(SecType::Plain(Atomic::Int)),
            ExprKind::BoolLit(_) => Ok(SecType::Plain(Atomic::Bool)),
            ExprKind::Var(x) => self.lookup(env, x, span).cloned(),
            ExprKind::Eval(audience, inner) => {
                let t = self.expr(env, inner)?;
                let audience = OwnerSet::from(audience.clone());
                match t.owners() {
                    None => err(span, "eval", format!("eval of plaintext value of type {t}")),
                    Some(o) if !valid(o, &audience, self.scheme) => err(
                        span,
                        "eval-valid",
                        format!("data owned by {o} may not be revealed to {audience}"),
                    ),
                    Some(_) => Ok(t.with_owners(None)),
                }
            }
            ExprKind::BinOp(op, a, b) => {
                let ta = self.expr(env, a)?;
                let tb = self.expr(env, b)?;
                if ta.is_array() || tb.is_array() {
                    return err(
                        span,
                        "binop",
                        format!("operator `{}` does not apply to arrays", op.symbol()),
                    );
                }
                let (aa, ab) = (ta.atomic().unwrap(), tb.atomic().unwrap());
                let result = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Rem | BinOp::Div => {
                        self.scalar(&ta, Atomic::Int, a.span, "binop")?;
                        self.scalar(&tb, Atomic::Int, b.span, "binop")?;
                        Atomic::Int
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        self.scalar(&ta, Atomic::Int, a.span, "binop")?;
                        self.scalar(&tb, Atomic::Int, b.span, "binop")?;
                        Atomic::Bool
                    }
                    BinOp::Eq | BinOp::Ne => {
                        if aa != ab {
                            return err(span, "binop", format!("cannot compare {ta} with {tb}"));
                        }
                        Atomic::Bool
                    }
                    BinOp::And | BinOp::Or => {
                        self.scalar(&ta, Atomic::Bool, a.span, "binop")?;
                        self.scalar(&tb, Atomic::Bool, b.span, "binop")?;
                        Atomic::Bool
                    }
                };
                if *op == BinOp::Div && !(ta.is_plain() && tb.is_plain()) {
                    return err(
                        span,
                        "div-plain",
                        "division is only defined on plaintext operands",
                    );
                }
                let owners = self.join(&[ta.owners(), tb.owners()], span)?;
                Ok(SecType::Plain(result).with_owners(owners))
            }
            ExprKind::If(c, a, b) => {
                let tc = self.expr(env, c)?;
                self.scalar(&tc, Atomic::Bool, c.span, "if")?;
                let ta = self.expr(env, a)?;
                let tb = self.expr(env, b)?;
                if ta.atomic() != tb.atomic() {
                    return err(span, "if", format!("branch types differ: {ta} and {tb}"));
                }
                let owners = self.join(&[tc.owners(), ta.owners(), tb.owners()], span)?;
                Ok(ta.with_owners(owners))
            }
            ExprKind::Call(f, args) => {
                let Some(sig) = self.sigs.get(f).cloned() else {
                    return err(span, "call", format!("unknown function `{f}`"));
                };
                if sig.params.len() != args.len() {
                    return err(
                        span,
                        "call",
                        format!(
                            "`{f}` takes {} arguments, got {}",
                            sig.params.len(),
                            args.len()
                        ),
                    );
                }
                for (arg, (pname, pty)) in args.iter().zip(&sig.params) {
                    let ta = self.expr(env, arg)?;
                    if !self.assignable(&ta, pty) {
                        return err(
                            arg.span,
                            "call-arg",
                            format!("argument `{pname}` expects {pty}, found {ta}"),
                        );
                    }
                }
                Ok(sig.ret)
            }
            ExprKind::ArrIndex(x, i) => {
                let tx = self.lookup(env, x, span)?.clone();
                self.array(&tx, span, "index")?;
                let ti = self.expr(env, i)?;
                self.scalar(&ti, Atomic::Int, i.span, "index")?;
                let owners = self.join(&[tx.owners(), ti.owners()], span)?;
                Ok(SecType::Plain(Atomic::Int).with_owners(owners))
            }
            ExprKind::ArrSlice(x, i, j) => {
                let tx = self.lookup(env, x, span)?.clone();
                self.array(&tx, span, "slice")?;
                for bound in [i, j] {
                    let tb = self.expr(env, bound)?;
                    if tb != SecType::Plain(Atomic::Int) {
                        return err(
                            bound.span,
                            "slice",
                            format!("slice bounds must be plaintext int, found {tb}"),
                        );
                    }
                }
                Ok(tx)
            }
            ExprKind::ArrLen(x) => {
                let tx = self.lookup(env, x, span)?;
                self.array(tx, span, "length")?;
                Ok(SecType::Plain(Atomic::Int))
            }
            ExprKind::Reduce(_, inner) => {
                let t = self.expr(env, inner)?;
                self.array(&t, inner.span, "reduce")?;
                Ok(SecType::Plain(Atomic::Int).with_owners(t.owners().cloned()))
            }
            ExprKind::Pow(base, _) => {
                let t = self.expr(env, base)?;
                self.scalar(&t, Atomic::Int, base.span, "pow")?;
                Ok(t)
            }
            ExprKind::Input(p, ty) => {
                if ty.owners.is_some() {
                    return err(ty.span, "input", "input types carry no owner annotation");
                }
                let plain = self.resolve(ty)?;
                Ok(plain.with_owners(Some(OwnerSet::singleton(*p))))
            }
            ExprKind::ArrayLit(elems) => {
                let mut owners: Option<OwnerSet> = None;
                for el in elems {
                    let t = self.expr(env, el)?;
                    self.scalar(&t, Atomic::Int, el.span, "array-literal")?;
                    owners = self.join(&[owners.as_ref(), t.owners()], el.span)?;
                }
                Ok(SecType::PlainArr.with_owners(owners))
            }
            ExprKind::Zeros(n) => {
                let t = self.expr(env, n)?;
                if t != SecType::Plain(Atomic::Int) {
                    return err(
                        n.span,
                        "zeros",
                        format!("length must be plaintext int, found {t}"),
                    );
                }
                Ok(SecType::PlainArr)
            }
        }
    }

    fn join_envs(
        &self,
        base: &TypeEnv,
        a: &TypeEnv,
        b: &TypeEnv,
        span: Span,
    ) -> Result<TypeEnv, TypeError> {
        let mut out = TypeEnv::new();
        for (x, t0) in base {
            let ta = a.get(x).unwrap_or(t0);
            let tb = b.get(x).unwrap_or(t0);
            let t = if ta == tb {
                ta.clone()
            } else {
                let owners = self.join(&[ta.owners(), tb.owners()], span)?;
                ta.with_owners(owners)
            };
            out.insert(x.clone(), t);
        }
        Ok(out)
    }

    fn block(&mut self, env: &mut TypeEnv, b: &Block, errors: &mut Vec<TypeError>) {
        for s in &b.stmts {
            if let Err(e) = self.stmt(env, s, errors) {
                errors.push(e);
            }
        }
    }

    /// Check one statement. Errors from nested blocks go to `errors`; the
    /// statement's own failure is returned.
    fn stmt(
        &mut self,
        env: &mut TypeEnv,
        s: &Stmt,
        errors: &mut Vec<TypeError>,
    ) -> Result<(), TypeError> {
        let span = s.span;
        match &s.kind {
            StmtKind::Skip => Ok(()),
            StmtKind::ValDecl(x, ty, e) => {
                if env.contains_key(x) {
                    return err(span, "decl", format!("`{x}` is already declared"));
                }
                let declared = self.resolve(ty)?;
                env.insert(x.clone(), declared.clone());
                let te = self.expr(env, e)?;
                if !self.assignable(&te, &declared) {
                    return err(
                        e.span,
                        "decl",
                        format!("`{x}` declared as {declared} but initialized with {te}"),
                    );
                }
                Ok(())
            }
            StmtKind::Assign(x, e) => {
                let old = self.lookup(env, x, span)?.clone();
                let te = self.expr(env, e)?;
                if old.atomic() != te.atomic() {
                    return err(
                        span,
                        "assign",
                        format!("cannot assign {te} to `{x}` of type {old}"),
                    );
                }
                let mut parts = vec![old.owners(), te.owners()];
                parts.extend(self.pc_owners_for(x).into_iter().map(Some));
                let owners = self.join(&parts, span)?;
                env.insert(x.clone(), old.with_owners(owners));
                Ok(())
            }
            StmtKind::ArrUpdate(x, i, v) => {
                let tx = self.lookup(env, x, span)?.clone();
                self.array(&tx, span, "update")?;
                let ti = self.expr(env, i)?;
                self.scalar(&ti, Atomic::Int, i.span, "update")?;
                let tv = self.expr(env, v)?;
                self.scalar(&tv, Atomic::Int, v.span, "update")?;
                let mut parts = vec![tx.owners(), ti.owners(), tv.owners()];
                parts.extend(self.pc_owners_for(x).into_iter().map(Some));
                let owners = self.join(&parts, span)?;
                env.insert(x.clone(), tx.with_owners(owners));
                Ok(())
            }
            StmtKind::While(x, bound, body) => {
                let tx = self.lookup(env, x, span)?;
                if *tx != SecType::Plain(Atomic::Int) {
                    return err(
                        span,
                        "while",
                        format!("loop variable `{x}` must be plaintext int, found {tx}"),
                    );
                }
                let tb = self.expr(env, bound)?;
                if tb != SecType::Plain(Atomic::Int) {
                    return err(
                        bound.span,
                        "while",
                        format!("loop bound must be plaintext int, found {tb}"),
                    );
                }
                // Owner sets only grow, so this converges.
                let mut cur = env.clone();
                loop {
                    let mut inner = cur.clone();
                    let mut scratch = Vec::new();
                    self.block(&mut inner, body, &mut scratch);
                    let next = self.join_envs(&cur, &cur, &inner, span)?;
                    if next == cur {
                        break;
                    }
                    cur = next;
                }
                let mut inner = cur.clone();
                self.block(&mut inner, body, errors);
                *env = cur;
                if env[x] != SecType::Plain(Atomic::Int) {
                    return err(
                        span,
                        "while",
                        format!("loop variable `{x}` becomes private in the loop body"),
                    );
                }
                Ok(())
            }
            StmtKind::If(c, then_b, else_b) => {
                let tc = self.expr(env, c)?;
                self.scalar(&tc, Atomic::Bool, c.span, "if")?;
                let secret = tc.owners().cloned();
                if let Some(owners) = secret.clone() {
                    self.pc.push(PcFrame {
                        owners,
                        outer: env.keys().cloned().collect(),
                    });
                }
                let mut env_t = env.clone();
                self.block(&mut env_t, then_b, errors);
                let mut env_e = env.clone();
                self.block(&mut env_e, else_b, errors);
                if secret.is_some() {
                    self.pc.pop();
                }
                *env = self.join_envs(env, &env_t, &env_e, span)?;
                Ok(())
            }
            StmtKind::Output(e) => {
                let t = self.expr(env, e)?;
                if !t.is_plain() {
                    return err(
                        span,
                        "output",
                        format!("cannot output private value of type {t}; use eval"),
                    );
                }
                if !self.pc.is_empty() {
                    return err(span, "output-pc", "output under a private condition");
                }
                Ok(())
            }
        }
    }
}

/// Type of `e` in `env`. Calls are rejected since no functions are in scope.
pub fn check_expr(env: &TypeEnv, e: &Expr, scheme: Scheme) -> Result<SecType, TypeError> {
    Checker::new(scheme).expr(env, e)
}

/// Environment after `s`, or the first error.
pub fn check_stmt(env: &TypeEnv, s: &Stmt, scheme: Scheme) -> Result<TypeEnv, TypeError> {
    let mut checker = Checker::new(scheme);
    let mut out = env.clone();
    let mut errors = Vec::new();
    checker.stmt(&mut out, s, &mut errors)?;
    match errors.into_iter().next() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Check a whole program, reporting every error found.
pub fn check_program(p: &Program, scheme: Scheme) -> Result<TypedProgram, Vec<TypeError>> {
    let mut checker = Checker::new(scheme);
    let mut errors = Vec::new();

    for f in &p.functions {
        let mut params = Vec::new();
        let mut ok = true;
        for param in &f.params {
            match checker.resolve(&param.ty) {
                Ok(t) => params.push((param.name.clone(), t)),
                Err(e) => {
                    errors.push(e);
                    ok = false;
                }
            }
        }
        match checker.resolve(&f.return_type) {
            Ok(ret) if ok => {
                checker
                    .sigs
                    .insert(f.name.clone(), Signature { params, ret });
            }
            Ok(_) => {}
            Err(e) => errors.push(e),
        }
    }

    for f in &p.functions {
        let Some(sig) = checker.sigs.get(&f.name).cloned() else {
            continue;
        };
        let mut env = TypeEnv::new();
        for (name, t) in &sig.params {
            if env.insert(name.clone(), t.clone()).is_some() {
                errors.push(TypeError {
                    span: f.span,
                    rule: "decl",
                    message: format!("duplicate parameter `{name}`"),
                });
            }
        }
        if let Some(bound) = &f.bound {
            let plain_env: TypeEnv = env
                .iter()
                .filter(|(_, t)| t.is_plain())
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            match checker.expr(&plain_env, bound) {
                Ok(SecType::Plain(Atomic::Int)) => {}
                Ok(t) => errors.push(TypeError {
                    span: bound.span,
                    rule: "bound",
                    message: format!("bound must be plaintext int, found {t}"),
                }),
                Err(e) => errors.push(TypeError { rule: "bound", ..e }),
            }
        }
        checker.block(&mut env, &f.body, &mut errors);
        if let Some(result) = &f.body.result {
            match checker.expr(&env, result) {
                Ok(t) if checker.assignable(&t, &sig.ret) => {}
                Ok(t) => errors.push(TypeError {
                    span: result.span,
                    rule: "return",
                    message: format!("`{}` returns {}, found {t}", f.name, sig.ret),
                }),
                Err(e) => errors.push(e),
            }
        }
    }

    let mut env = TypeEnv::new();
    checker.block(&mut env, &p.main, &mut errors);

    if errors.is_empty() {
        Ok(TypedProgram {
            program: p.clone(),
            scheme,
            types: checker.types,
            signatures: checker.sigs,
        })
    } else {
        errors.sort_by_key(|e| e.span.lo);
        Err(errors)
    }
}
