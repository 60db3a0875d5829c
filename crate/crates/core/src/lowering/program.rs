use std::collections::{BTreeMap, BTreeSet};

use crate::backends::wrap;
use crate::frontend::{BinOp, Block, Expr, ExprKind, Program, ReduceOp, Span, Stmt, StmtKind};
use crate::hir::{Circuit, GateKind, NodeId};
use crate::optimizer::{pow_by_squaring, pow_linear, tree_reduce};
use crate::typecheck::{OwnerSet, TypedProgram};

use super::arrays::{lower_private_index, lower_private_update};
use super::builder::Builder;
use super::compare::lower_comparison;
use super::values::{arith, mul, mux, rem, scalar, sub, Val};
use super::{LowerConfig, LowerError};

/// Unrolled loop iterations allowed per loop.
const UNROLL_LIMIT: usize = 1 << 20;

pub type Env = BTreeMap<String, Val>;

/// Merge branch environments after a branch on a private condition.
/// Variables assigned in either branch become `Mux(cond, then, else)`; all
/// others keep their value from `base`.
pub fn lower_oblivious_if(
    b: &mut Builder,
    cond: NodeId,
    base: &Env,
    then_env: &Env,
    else_env: &Env,
    assigned: &BTreeSet<String>,
) -> Result<Env, LowerError> {
    let mut out = base.clone();
    let sel = Val::Wire(cond);
    for v in assigned {
        let (Some(t), Some(e)) = (then_env.get(v), else_env.get(v)) else {
            continue;
        };
        if base.contains_key(v) {
            out.insert(v.clone(), mux(b, &sel, t, e)?);
        }
    }
    Ok(out)
}

struct Lowerer<'p> {
    prog: &'p Program,
    cfg: &'p LowerConfig,
    b: Builder,
    /// Remaining fuel of each function currently being inlined.
    fuel: BTreeMap<String, i64>,
    recursive: BTreeSet<String>,
    /// Nesting depth of branches on private conditions.
    private_depth: usize,
    /// Variable being declared, used to name input ports.
    decl_name: Option<String>,
    output_names: BTreeSet<String>,
    anon_inputs: usize,
    anon_outputs: usize,
}

pub(super) fn lower_arith(tp: &TypedProgram, cfg: &LowerConfig) -> Result<Circuit, LowerError> {
    let prog = &tp.program;
    let parties = OwnerSet::from(prog.declared_parties.clone());
    let mut l = Lowerer {
        prog,
        cfg,
        b: Builder::new(cfg.bitwidth, cfg.scheme, parties, cfg.expand_mux),
        fuel: BTreeMap::new(),
        recursive: recursive_functions(prog),
        private_depth: 0,
        decl_name: None,
        output_names: BTreeSet::new(),
        anon_inputs: 0,
        anon_outputs: 0,
    };
    let mut env = Env::new();
    l.block(&mut env, &prog.main)?;
    Ok(l.b.finish())
}

/// Functions that can reach themselves through calls.
fn recursive_functions(p: &Program) -> BTreeSet<String> {
    let mut calls: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for f in &p.functions {
        let mut callees = BTreeSet::new();
        f.body.walk_exprs(&mut |e| {
            if let ExprKind::Call(g, _) = &e.kind {
                callees.insert(g.as_str());
            }
        });
        calls.insert(f.name.as_str(), callees);
    }
    let mut out = BTreeSet::new();
    for f in &p.functions {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = calls[f.name.as_str()].iter().copied().collect();
        while let Some(g) = stack.pop() {
            if g == f.name {
                out.insert(f.name.clone());
                break;
            }
            if seen.insert(g) {
                if let Some(next) = calls.get(g) {
                    stack.extend(next.iter().copied());
                }
            }
        }
    }
    out
}

impl Lowerer<'_> {
    fn plain_of(&self, v: &Val, span: Span, what: &'static str) -> Result<i64, LowerError> {
        v.as_plain()
            .ok_or(LowerError::NotCompileTime { span, what })
    }

    fn array_of<'v>(&self, env: &'v Env, x: &str, span: Span) -> Result<&'v Vec<Val>, LowerError> {
        match env.get(x) {
            Some(Val::Array(items)) => Ok(items),
            Some(_) => Err(LowerError::Internal(format!(
                "{span}: `{x}` is not an array"
            ))),
            None => Err(LowerError::Internal(format!("{span}: unbound `{x}`"))),
        }
    }

    fn wires(&mut self, items: &[Val]) -> Result<Vec<NodeId>, LowerError> {
        items.iter().map(|v| scalar(&mut self.b, v)).collect()
    }

    /// Does `e` call a function whose fuel is spent?
    fn exhausted_expr(&self, e: &Expr) -> bool {
        let mut hit = false;
        e.walk(&mut |x| {
            if let ExprKind::Call(g, _) = &x.kind {
                hit |= self.fuel.get(g) == Some(&0);
            }
        });
        hit
    }

    fn exhausted_block(&self, b: &Block) -> bool {
        let mut hit = false;
        b.walk_exprs(&mut |x| {
            if let ExprKind::Call(g, _) = &x.kind {
                hit |= self.fuel.get(g) == Some(&0);
            }
        });
        hit
    }

    fn expr(&mut self, env: &Env, e: &Expr) -> Result<Val, LowerError> {
        let span = e.span;
        let w = self.cfg.bitwidth;
        match &e.kind {
            ExprKind::IntLit(n) => Ok(Val::lit(wrap(*n, w))),
            ExprKind::BoolLit(v) => Ok(Val::lit(*v as i64)),
            ExprKind::Var(x) => env
                .get(x)
                .cloned()
                .ok_or_else(|| LowerError::Internal(format!("{span}: unbound `{x}`"))),
            ExprKind::Eval(audience, inner) => {
                if self.private_depth > 0 {
                    return Err(LowerError::SideEffectUndetectable { span });
                }
                let v = self.expr(env, inner)?;
                self.reveal(&v, &OwnerSet::from(audience.clone()))
            }
            ExprKind::BinOp(op, a, c) => {
                let x = self.expr(env, a)?;
                let y = self.expr(env, c)?;
                self.binop(*op, &x, &y, span)
            }
            ExprKind::If(c, a, alt) => {
                match (self.exhausted_expr(a), self.exhausted_expr(alt)) {
                    (true, false) => return self.expr(env, alt),
                    (false, true) => return self.expr(env, a),
                    _ => {}
                }
                let vc = self.expr(env, c)?;
                if let Some(cv) = vc.as_plain() {
                    return self.expr(env, if cv != 0 { a } else { alt });
                }
                self.private_depth += 1;
                let va = self.expr(env, a);
                let vb = self.expr(env, alt);
                self.private_depth -= 1;
                mux(&mut self.b, &vc, &va?, &vb?)
            }
            ExprKind::Call(f, args) => self.call(env, f, args, span),
            ExprKind::ArrIndex(x, i) => {
                let vi = self.expr(env, i)?;
                let items = self.array_of(env, x, span)?;
                match vi.as_plain() {
                    Some(k) => {
                        let len = items.len();
                        usize::try_from(k)
                            .ok()
                            .and_then(|k| items.get(k))
                            .cloned()
                            .ok_or(LowerError::IndexOutOfBounds {
                                span,
                                index: k,
                                len,
                            })
                    }
                    None => {
                        let items = items.clone();
                        let arr = self.wires(&items)?;
                        let idx = scalar(&mut self.b, &vi)?;
                        Ok(Val::Wire(lower_private_index(&mut self.b, &arr, idx)?))
                    }
                }
            }
            ExprKind::ArrSlice(x, i, j) => {
                let vi = self.expr(env, i)?;
                let vj = self.expr(env, j)?;
                let (i, j) = (
                    self.plain_of(&vi, span, "slice bound")?,
                    self.plain_of(&vj, span, "slice bound")?,
                );
                let items = self.array_of(env, x, span)?;
                let len = items.len();
                if i < 0 || j < i || j as usize > len {
                    return Err(LowerError::IndexOutOfBounds {
                        span,
                        index: if i < 0 { i } else { j },
                        len,
                    });
                }
                Ok(Val::Array(items[i as usize..j as usize].to_vec()))
            }
            ExprKind::ArrLen(x) => Ok(Val::lit(self.array_of(env, x, span)?.len() as i64)),
            ExprKind::Reduce(op, inner) => {
                let Val::Array(items) = self.expr(env, inner)? else {
                    return Err(LowerError::Internal(format!(
                        "{span}: reduce over a scalar"
                    )));
                };
                if items.is_empty() {
                    return Err(LowerError::EmptyArray);
                }
                let b = &mut self.b;
                let r = tree_reduce(items, &mut |x: Val, y: Val| -> Result<Val, LowerError> {
                    match op {
                        ReduceOp::Add => arith(b, GateKind::Add, &x, &y, false),
                        ReduceOp::Mul => mul(b, &x, &y),
                        ReduceOp::Max | ReduceOp::Min => {
                            let less = super::values::lt(b, &x, &y)?;
                            if *op == ReduceOp::Max {
                                mux(b, &less, &y, &x)
                            } else {
                                mux(b, &less, &x, &y)
                            }
                        }
                    }
                })?;
                Ok(r.expect("non-empty"))
            }
            ExprKind::Pow(base, n) => {
                let v = self.expr(env, base)?;
                let b = &mut self.b;
                let mut one = || Ok(Val::lit(1));
                let mut m = |x: &Val, y: &Val| mul(b, x, y);
                if self.cfg.pow_by_squaring {
                    pow_by_squaring(&v, *n, &mut one, &mut m)
                } else {
                    pow_linear(&v, *n, &mut one, &mut m)
                }
            }
            ExprKind::Input(p, ty) => {
                let name = match &self.decl_name {
                    Some(n) => n.clone(),
                    None => {
                        self.anon_inputs += 1;
                        format!("in{}", self.anon_inputs)
                    }
                };
                match ty.array {
                    None => Ok(Val::Wire(self.b.input(*p, name))),
                    Some(None) => Err(LowerError::NonConstLength { span }),
                    Some(Some(n)) => {
                        let items = (0..n)
                            .map(|i| Val::Wire(self.b.input(*p, format!("{name}[{i}]"))))
                            .collect();
                        Ok(Val::Array(items))
                    }
                }
            }
            ExprKind::ArrayLit(elems) => {
                let mut items = Vec::with_capacity(elems.len());
                for el in elems {
                    match self.expr(env, el)? {
                        Val::Array(_) => {
                            return Err(LowerError::Internal(format!("{span}: nested array")))
                        }
                        v => items.push(v.collapse()),
                    }
                }
                Ok(Val::Array(items))
            }
            ExprKind::Zeros(n) => {
                let v = self.expr(env, n)?;
                let n = self.plain_of(&v, span, "array length")?;
                if n < 0 {
                    return Err(LowerError::NonConstLength { span });
                }
                Ok(Val::Array(vec![Val::lit(0); n as usize]))
            }
        }
    }

    fn binop(&mut self, op: BinOp, x: &Val, y: &Val, span: Span) -> Result<Val, LowerError> {
        let b = &mut self.b;
        match op {
            BinOp::Add => arith(b, GateKind::Add, x, y, true),
            BinOp::Sub => arith(b, GateKind::Sub, x, y, true),
            BinOp::Mul => arith(b, GateKind::Mul, x, y, true),
            BinOp::Rem => rem(b, x, y),
            BinOp::Div => {
                let (p, q) = (
                    self.plain_of(x, span, "dividend")?,
                    self.plain_of(y, span, "divisor")?,
                );
                if q == 0 {
                    return Err(LowerError::DivisionByZero { span });
                }
                Ok(Val::lit(wrap(p.wrapping_div(q), self.cfg.bitwidth)))
            }
            BinOp::And => mul(b, x, y),
            BinOp::Or => {
                let s = arith(b, GateKind::Add, x, y, false)?;
                let both = mul(b, x, y)?;
                sub(b, &s, &both)
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => {
                lower_comparison(b, op, x, y, self.cfg.comparison_encoding)
            }
        }
    }

    fn reveal(&mut self, v: &Val, audience: &OwnerSet) -> Result<Val, LowerError> {
        match v {
            Val::Array(items) => {
                let items: Result<Vec<_>, _> =
                    items.iter().map(|x| self.reveal(x, audience)).collect();
                Ok(Val::Array(items?))
            }
            _ => {
                let n = scalar(&mut self.b, v)?;
                Ok(Val::Wire(self.b.reveal(n, audience.clone())))
            }
        }
    }

    /// Inline a call. The outermost call of a function evaluates its bound
    /// once; each nested call of the same function runs on one less fuel.
    fn call(
        &mut self,
        env: &Env,
        name: &str,
        args: &[Expr],
        span: Span,
    ) -> Result<Val, LowerError> {
        let f = self
            .prog
            .function(name)
            .ok_or_else(|| LowerError::Internal(format!("{span}: unknown function `{name}`")))?;
        let mut fenv = Env::new();
        for (p, a) in f.params.iter().zip(args) {
            let v = self.expr(env, a)?;
            fenv.insert(p.name.clone(), v.collapse());
        }
        let saved = self.fuel.get(name).copied();
        let fuel = match saved {
            Some(0) => {
                return Err(LowerError::FuelExhausted {
                    function: name.to_string(),
                    span,
                })
            }
            Some(k) => k - 1,
            None => match &f.bound {
                Some(bound) => {
                    let v = self.expr(&fenv, bound)?;
                    let d = self.plain_of(&v, bound.span, "recursion bound")?;
                    if d < 0 {
                        return Err(LowerError::BoundNegative {
                            function: name.to_string(),
                            value: d,
                        });
                    }
                    d
                }
                None if self.recursive.contains(name) => {
                    return Err(LowerError::BoundMissing {
                        function: name.to_string(),
                    })
                }
                None => 0,
            },
        };
        self.fuel.insert(name.to_string(), fuel);
        let decl = self.decl_name.take();
        let result = self.block_result(&mut fenv, &f.body);
        self.decl_name = decl;
        match saved {
            Some(k) => self.fuel.insert(name.to_string(), k),
            None => self.fuel.remove(name),
        };
        result
    }

    fn block_result(&mut self, env: &mut Env, b: &Block) -> Result<Val, LowerError> {
        for s in &b.stmts {
            self.stmt(env, s)?;
        }
        match &b.result {
            Some(r) => self.expr(env, r),
            None => Err(LowerError::Internal("function body without result".into())),
        }
    }

    /// Run a block; declarations made inside it go out of scope.
    fn block(&mut self, env: &mut Env, b: &Block) -> Result<(), LowerError> {
        let outer: BTreeSet<String> = env.keys().cloned().collect();
        for s in &b.stmts {
            self.stmt(env, s)?;
        }
        env.retain(|k, _| outer.contains(k));
        Ok(())
    }

    fn stmt(&mut self, env: &mut Env, s: &Stmt) -> Result<(), LowerError> {
        let span = s.span;
        match &s.kind {
            StmtKind::Skip => Ok(()),
            StmtKind::ValDecl(x, _, e) => {
                self.decl_name = Some(x.clone());
                let v = self.expr(env, e);
                self.decl_name = None;
                env.insert(x.clone(), v?);
                Ok(())
            }
            StmtKind::Assign(x, e) => {
                let v = self.expr(env, e)?.collapse();
                env.insert(x.clone(), v);
                Ok(())
            }
            StmtKind::ArrUpdate(x, i, v) => {
                let vi = self.expr(env, i)?;
                let vv = self.expr(env, v)?.collapse();
                let items = self.array_of(env, x, span)?.clone();
                let updated = match vi.as_plain() {
                    Some(k) => {
                        let len = items.len();
                        let k = usize::try_from(k).ok().filter(|k| *k < len).ok_or(
                            LowerError::IndexOutOfBounds {
                                span,
                                index: k,
                                len,
                            },
                        )?;
                        let mut items = items;
                        items[k] = vv;
                        items
                    }
                    None => {
                        let arr = self.wires(&items)?;
                        let idx = scalar(&mut self.b, &vi)?;
                        let val = scalar(&mut self.b, &vv)?;
                        lower_private_update(&mut self.b, &arr, idx, val)?
                            .into_iter()
                            .map(Val::Wire)
                            .collect()
                    }
                };
                env.insert(x.clone(), Val::Array(updated));
                Ok(())
            }
            StmtKind::While(x, bound, body) => self.unroll_while(env, x, bound, body, span),
            StmtKind::If(c, then_b, else_b) => {
                match (self.exhausted_block(then_b), self.exhausted_block(else_b)) {
                    (true, false) => return self.block(env, else_b),
                    (false, true) => return self.block(env, then_b),
                    _ => {}
                }
                let vc = self.expr(env, c)?;
                if let Some(cv) = vc.as_plain() {
                    return self.block(env, if cv != 0 { then_b } else { else_b });
                }
                let cond = scalar(&mut self.b, &vc)?;
                self.private_depth += 1;
                let mut env_t = env.clone();
                let rt = self.block(&mut env_t, then_b);
                let mut env_e = env.clone();
                let re = self.block(&mut env_e, else_b);
                self.private_depth -= 1;
                rt?;
                re?;
                let mut assigned = then_b.assigned_vars();
                assigned.extend(else_b.assigned_vars());
                *env = lower_oblivious_if(&mut self.b, cond, env, &env_t, &env_e, &assigned)?;
                Ok(())
            }
            StmtKind::Output(e) => {
                if self.private_depth > 0 {
                    return Err(LowerError::SideEffectUndetectable { span });
                }
                let v = self.expr(env, e)?;
                let base = self.output_name(e);
                self.emit_output(&v, base)
            }
        }
    }

    /// `while (x < bound)`: the counter is a compile-time value, so the body
    /// is simply repeated.
    fn unroll_while(
        &mut self,
        env: &mut Env,
        x: &str,
        bound: &Expr,
        body: &Block,
        span: Span,
    ) -> Result<(), LowerError> {
        let mut iterations = 0usize;
        loop {
            let i = env
                .get(x)
                .and_then(Val::as_plain)
                .ok_or(LowerError::NonConstBound { span })?;
            let n = self
                .expr(env, bound)?
                .as_plain()
                .ok_or(LowerError::NonConstBound { span })?;
            if i >= n {
                return Ok(());
            }
            iterations += 1;
            if iterations > UNROLL_LIMIT {
                return Err(LowerError::UnrollLimit { span });
            }
            self.block(env, body)?;
        }
    }

    fn output_name(&mut self, e: &Expr) -> String {
        let var = match &e.kind {
            ExprKind::Var(x) => Some(x),
            ExprKind::Eval(_, inner) => match &inner.kind {
                ExprKind::Var(x) => Some(x),
                _ => None,
            },
            _ => None,
        };
        let base = match var {
            Some(x) => x.clone(),
            None => {
                self.anon_outputs += 1;
                format!("out{}", self.anon_outputs)
            }
        };
        let mut name = base.clone();
        let mut k = 1;
        while self.output_names.contains(&name) {
            k += 1;
            name = format!("{base}_{k}");
        }
        self.output_names.insert(name.clone());
        name
    }

    fn emit_output(&mut self, v: &Val, name: String) -> Result<(), LowerError> {
        match v {
            Val::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    self.emit_output(item, format!("{name}[{i}]"))?;
                }
                Ok(())
            }
            _ => {
                let n = scalar(&mut self.b, v)?;
                let (node, audience) = if self.b.is_reveal(n) {
                    (
                        n,
                        self.b.circuit.node(n).audience.clone().unwrap_or_default(),
                    )
                } else {
                    let audience = self.b.all_parties().clone();
                    (self.b.reveal(n, audience.clone()), audience)
                };
                self.b.output(node, audience, name);
                Ok(())
            }
        }
    }
}
