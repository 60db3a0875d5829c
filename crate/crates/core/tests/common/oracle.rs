//! Reference interpreter that runs the surface language directly on `i64`,
//! wrapping every arithmetic result to the word size. It shares no code with
//! the lowering; only the public AST and `wrap` are used.

use std::collections::{BTreeMap, BTreeSet};

use mpcc_core::backends::{wrap, InputValues};
use mpcc_core::frontend::{BinOp, Block, Expr, ExprKind, Program, ReduceOp, Stmt, StmtKind};

#[derive(Debug, Clone, PartialEq, Eq)]
enum V {
    I(i64),
    A(Vec<i64>),
}

impl V {
    fn int(&self) -> i64 {
        match self {
            V::I(v) => *v,
            V::A(_) => panic!("oracle: expected a scalar"),
        }
    }

    fn arr(&self) -> &Vec<i64> {
        match self {
            V::A(a) => a,
            V::I(_) => panic!("oracle: expected an array"),
        }
    }
}

type Env = BTreeMap<String, V>;

struct Interp<'a> {
    prog: &'a Program,
    inputs: &'a InputValues,
    w: u32,
    fuel: BTreeMap<String, i64>,
    recursive: BTreeSet<String>,
    decl: Option<String>,
    anon_in: usize,
    anon_out: usize,
    names: BTreeSet<String>,
    outputs: BTreeMap<String, i64>,
}

fn calls_in_block(b: &Block) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    b.walk_exprs(&mut |e| {
        if let ExprKind::Call(g, _) = &e.kind {
            out.insert(g.clone());
        }
    });
    out
}

fn recursive_set(p: &Program) -> BTreeSet<String> {
    let graph: BTreeMap<String, BTreeSet<String>> = p
        .functions
        .iter()
        .map(|f| {
            let mut calls = calls_in_block(&f.body);
            if let Some(bound) = &f.bound {
                bound.walk(&mut |e| {
                    if let ExprKind::Call(g, _) = &e.kind {
                        calls.insert(g.clone());
                    }
                });
            }
            (f.name.clone(), calls)
        })
        .collect();
    let mut rec = BTreeSet::new();
    for f in graph.keys() {
        let mut seen = BTreeSet::new();
        let mut todo: Vec<&String> = graph[f].iter().collect();
        while let Some(g) = todo.pop() {
            if g == f {
                rec.insert(f.clone());
                break;
            }
            if seen.insert(g.clone()) {
                if let Some(next) = graph.get(g) {
                    todo.extend(next.iter());
                }
            }
        }
    }
    rec
}

impl Interp<'_> {
    fn spent(&self, calls: impl IntoIterator<Item = String>) -> bool {
        calls.into_iter().any(|g| self.fuel.get(&g) == Some(&0))
    }

    fn expr_calls(e: &Expr) -> Vec<String> {
        let mut out = Vec::new();
        e.walk(&mut |x| {
            if let ExprKind::Call(g, _) = &x.kind {
                out.push(g.clone());
            }
        });
        out
    }

    fn expr(&mut self, env: &Env, e: &Expr) -> Result<V, String> {
        let w = self.w;
        Ok(match &e.kind {
            ExprKind::IntLit(n) => V::I(wrap(*n, w)),
            ExprKind::BoolLit(b) => V::I(*b as i64),
            ExprKind::Var(x) => env.get(x).cloned().ok_or_else(|| format!("unbound {x}"))?,
            ExprKind::Eval(_, inner) => self.expr(env, inner)?,
            ExprKind::BinOp(op, a, b) => {
                let x = self.expr(env, a)?.int();
                let y = self.expr(env, b)?.int();
                V::I(binop(*op, x, y, w)?)
            }
            ExprKind::If(c, a, b) => {
                match (
                    self.spent(Self::expr_calls(a)),
                    self.spent(Self::expr_calls(b)),
                ) {
                    (true, false) => return self.expr(env, b),
                    (false, true) => return self.expr(env, a),
                    _ => {}
                }
                let cv = self.expr(env, c)?.int();
                self.expr(env, if cv != 0 { a } else { b })?
            }
            ExprKind::Call(f, args) => self.call(env, f, args)?,
            ExprKind::ArrIndex(x, i) => {
                let k = self.expr(env, i)?.int();
                let items = env[x].arr();
                V::I(items[k.clamp(0, items.len() as i64 - 1) as usize])
            }
            ExprKind::ArrSlice(x, i, j) => {
                let (i, j) = (self.expr(env, i)?.int(), self.expr(env, j)?.int());
                V::A(env[x].arr()[i as usize..j as usize].to_vec())
            }
            ExprKind::ArrLen(x) => V::I(env[x].arr().len() as i64),
            ExprKind::Reduce(op, inner) => {
                let items = self.expr(env, inner)?.arr().clone();
                let mut acc = items[0];
                for &v in &items[1..] {
                    acc = match op {
                        ReduceOp::Add => wrap(acc.wrapping_add(v), w),
                        ReduceOp::Mul => wrap(acc.wrapping_mul(v), w),
                        ReduceOp::Max => acc.max(v),
                        ReduceOp::Min => acc.min(v),
                    };
                }
                V::I(acc)
            }
            ExprKind::Pow(base, n) => {
                let b = self.expr(env, base)?.int();
                V::I((0..*n).fold(1i64, |acc, _| wrap(acc.wrapping_mul(b), w)))
            }
            ExprKind::Input(p, ty) => {
                let name = match &self.decl {
                    Some(n) => n.clone(),
                    None => {
                        self.anon_in += 1;
                        format!("in{}", self.anon_in)
                    }
                };
                let get = |n: &str| {
                    self.inputs
                        .get(*p, n)
                        .ok_or_else(|| format!("missing input {n}"))
                };
                match ty.array {
                    None => V::I(get(&name)?),
                    Some(Some(n)) => V::A(
                        (0..n)
                            .map(|i| get(&format!("{name}[{i}]")))
                            .collect::<Result<_, _>>()?,
                    ),
                    Some(None) => return Err("unsized input array".into()),
                }
            }
            ExprKind::ArrayLit(items) => V::A(
                items
                    .iter()
                    .map(|x| self.expr(env, x).map(|v| v.int()))
                    .collect::<Result<_, _>>()?,
            ),
            ExprKind::Zeros(n) => V::A(vec![0; self.expr(env, n)?.int() as usize]),
        })
    }

    fn call(&mut self, env: &Env, name: &str, args: &[Expr]) -> Result<V, String> {
        let f = self
            .prog
            .function(name)
            .ok_or_else(|| format!("unknown {name}"))?;
        let mut fenv = Env::new();
        for (p, a) in f.params.iter().zip(args) {
            let v = self.expr(env, a)?;
            fenv.insert(p.name.clone(), v);
        }
        let saved = self.fuel.get(name).copied();
        let fuel = match saved {
            Some(0) => return Err(format!("fuel of {name} exhausted")),
            Some(k) => k - 1,
            None => match &f.bound {
                Some(b) => self.expr(&fenv, b)?.int(),
                None if self.recursive.contains(name) => {
                    return Err(format!("{name} has no bound"))
                }
                None => 0,
            },
        };
        self.fuel.insert(name.to_string(), fuel);
        let decl = self.decl.take();
        for s in &f.body.stmts {
            self.stmt(&mut fenv, s)?;
        }
        let r = self.expr(&fenv, f.body.result.as_ref().ok_or("no result")?);
        self.decl = decl;
        match saved {
            Some(k) => self.fuel.insert(name.to_string(), k),
            None => self.fuel.remove(name),
        };
        r
    }

    fn block(&mut self, env: &mut Env, b: &Block) -> Result<(), String> {
        let outer: BTreeSet<String> = env.keys().cloned().collect();
        for s in &b.stmts {
            self.stmt(env, s)?;
        }
        env.retain(|k, _| outer.contains(k));
        Ok(())
    }

    fn stmt(&mut self, env: &mut Env, s: &Stmt) -> Result<(), String> {
        match &s.kind {
            StmtKind::Skip => {}
            StmtKind::ValDecl(x, _, e) => {
                self.decl = Some(x.clone());
                let v = self.expr(env, e);
                self.decl = None;
                env.insert(x.clone(), v?);
            }
            StmtKind::Assign(x, e) => {
                let v = self.expr(env, e)?;
                env.insert(x.clone(), v);
            }
            StmtKind::ArrUpdate(x, i, v) => {
                let k = self.expr(env, i)?.int();
                let v = self.expr(env, v)?.int();
                let V::A(items) = env.get_mut(x).ok_or("unbound array")? else {
                    return Err("not an array".into());
                };
                if (0..items.len() as i64).contains(&k) {
                    items[k as usize] = v;
                }
            }
            StmtKind::While(x, bound, body) => loop {
                let i = env[x].int();
                if i >= self.expr(env, bound)?.int() {
                    break;
                }
                self.block(env, body)?;
            },
            StmtKind::If(c, t, e) => {
                match (self.spent(calls_in_block(t)), self.spent(calls_in_block(e))) {
                    (true, false) => return self.block(env, e),
                    (false, true) => return self.block(env, t),
                    _ => {}
                }
                let cv = self.expr(env, c)?.int();
                self.block(env, if cv != 0 { t } else { e })?;
            }
            StmtKind::Output(e) => {
                let v = self.expr(env, e)?;
                let var = match &e.kind {
                    ExprKind::Var(x) => Some(x.clone()),
                    ExprKind::Eval(_, inner) => match &inner.kind {
                        ExprKind::Var(x) => Some(x.clone()),
                        _ => None,
                    },
                    _ => None,
                };
                let base = var.unwrap_or_else(|| {
                    self.anon_out += 1;
                    format!("out{}", self.anon_out)
                });
                let mut name = base.clone();
                let mut k = 1;
                while self.names.contains(&name) {
                    k += 1;
                    name = format!("{base}_{k}");
                }
                self.names.insert(name.clone());
                match v {
                    V::I(x) => {
                        self.outputs.insert(name, x);
                    }
                    V::A(items) => {
                        for (i, x) in items.into_iter().enumerate() {
                            self.outputs.insert(format!("{name}[{i}]"), x);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn binop(op: BinOp, x: i64, y: i64, w: u32) -> Result<i64, String> {
    Ok(match op {
        BinOp::Add => wrap(x.wrapping_add(y), w),
        BinOp::Sub => wrap(x.wrapping_sub(y), w),
        BinOp::Mul | BinOp::And => wrap(x.wrapping_mul(y), w),
        BinOp::Or => wrap(x + y - x * y, w),
        BinOp::Div => {
            if y == 0 {
                return Err("division by zero".into());
            }
            wrap(x.wrapping_div(y), w)
        }
        BinOp::Rem => {
            if y == 0 {
                x
            } else {
                x % y
            }
        }
        BinOp::Eq => (x == y) as i64,
        BinOp::Ne => (x != y) as i64,
        BinOp::Lt => (x < y) as i64,
        BinOp::Le => (x <= y) as i64,
        BinOp::Gt => (x > y) as i64,
        BinOp::Ge => (x >= y) as i64,
    })
}

/// Outputs of `prog` on `inputs` at word size `w`, named as the compiler
/// names its output ports.
pub fn run(prog: &Program, inputs: &InputValues, w: u32) -> Result<BTreeMap<String, i64>, String> {
    let mut it = Interp {
        prog,
        inputs,
        w,
        fuel: BTreeMap::new(),
        recursive: recursive_set(prog),
        decl: None,
        anon_in: 0,
        anon_out: 0,
        names: BTreeSet::new(),
        outputs: BTreeMap::new(),
    };
    let mut env = Env::new();
    for s in &prog.main.stmts {
        it.stmt(&mut env, s)?;
    }
    Ok(it.outputs)
}

pub fn euclid(mut a: i64, mut b: i64) -> i64 {
    while a != 0 {
        (a, b) = (b % a, a);
    }
    b
}

/// Recursion depth of the corpus `gcd(x, y)`, counting the final call.
pub fn euclid_calls(mut x: i64, mut y: i64) -> usize {
    let mut n = 1;
    while x != 0 {
        (x, y) = (y % x, x);
        n += 1;
    }
    n
}

/// `(winner, price)`: first index of the highest bid, second-highest bid.
pub fn second_price(bids: &[i64]) -> (i64, i64) {
    let top = *bids.iter().max().unwrap();
    let winner = bids.iter().position(|&b| b == top).unwrap() as i64;
    let mut sorted = bids.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    (winner, sorted[1])
}
