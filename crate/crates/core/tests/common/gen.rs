//! Random well-typed programs over three private inputs from two parties.

use mpcc_core::backends::InputValues;
use mpcc_core::frontend::{parse_source, Program};
use rand::seq::SliceRandom;
use rand::Rng;

pub const MAX_NODES: usize = 40;

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    /// Whether `v` is in scope as an operand.
    has_v: bool,
}

impl<R: Rng> Gen<'_, R> {
    fn leaf(&mut self) -> String {
        let mut pool = vec!["a", "b", "c", "k"];
        if self.has_v {
            pool.push("v");
        }
        if self.rng.gen_bool(0.3) {
            self.rng.gen_range(0..10).to_string()
        } else {
            pool.choose(self.rng).unwrap().to_string()
        }
    }

    fn int(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return self.leaf();
        }
        match self.rng.gen_range(0..6) {
            0 => format!("({} + {})", self.int(depth - 1), self.int(depth - 1)),
            1 => format!("({} - {})", self.int(depth - 1), self.int(depth - 1)),
            2 => format!("({} * {})", self.int(depth - 1), self.int(depth - 1)),
            3 => format!("pow({}, {})", self.int(depth - 1), self.rng.gen_range(0..4)),
            4 => format!(
                "if ({}) then {{ {} }} else {{ {} }}",
                self.boolean(depth - 1),
                self.int(depth - 1),
                self.int(depth - 1)
            ),
            _ => self.leaf(),
        }
    }

    fn boolean(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return if self.rng.gen_bool(0.5) {
                "true".into()
            } else {
                "false".into()
            };
        }
        match self.rng.gen_range(0..4) {
            0 | 1 => {
                let op = ["<", "<=", ">", ">=", "==", "!="].choose(self.rng).unwrap();
                format!("({} {op} {})", self.int(depth - 1), self.int(depth - 1))
            }
            2 => format!(
                "({} && {})",
                self.boolean(depth - 1),
                self.boolean(depth - 1)
            ),
            _ => format!(
                "({} || {})",
                self.boolean(depth - 1),
                self.boolean(depth - 1)
            ),
        }
    }

    fn program(&mut self) -> String {
        let mut s = String::from(
            "parties 0, 1;\ninput a : int from 0;\ninput b : int from 1;\ninput c : int from 0;\n",
        );
        s += &format!("val k : int := {};\n", self.rng.gen_range(0..5));
        s += &format!("val v : int@{{0, 1}} := {};\n", self.int(3));
        self.has_v = true;
        if self.rng.gen_bool(0.4) {
            s += &format!(
                "if ({}) {{ v := {}; }} else {{ v := {}; }}\n",
                self.boolean(2),
                self.int(2),
                self.int(2)
            );
        }
        if self.rng.gen_bool(0.3) {
            s += &format!(
                "val i : int := 0;\nwhile (i < 2) {{ v := v + {}; i := i + 1; }}\n",
                self.int(1)
            );
        }
        s += "output eval({0, 1}, v);\n";
        if self.rng.gen_bool(0.5) {
            s += &format!("output eval({{0, 1}}, (v < {}));\n", self.int(2));
        }
        if self.rng.gen_bool(0.3) {
            s += "output k * 2;\n";
        }
        s
    }
}

/// AST size: statements plus expressions.
pub fn node_count(p: &Program) -> usize {
    let mut n = 0;
    p.main.walk_stmts(&mut |_| n += 1);
    p.main.walk_exprs(&mut |_| n += 1);
    n
}

/// A program of at most [`MAX_NODES`] AST nodes with its parsed form.
pub fn program(rng: &mut impl Rng) -> (String, Program) {
    loop {
        let src = Gen {
            rng: &mut *rng,
            has_v: false,
        }
        .program();
        let p = parse_source(&src)
            .unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{src}"));
        if node_count(&p) <= MAX_NODES {
            return (src, p);
        }
    }
}

/// Values for `a`, `b`, `c` in `[-60, 60]`.
pub fn inputs(rng: &mut impl Rng) -> InputValues {
    let mut iv = InputValues::new();
    iv.insert(0, "a", rng.gen_range(-60..=60));
    iv.insert(1, "b", rng.gen_range(-60..=60));
    iv.insert(0, "c", rng.gen_range(-60..=60));
    iv
}
