use std::fmt;
use std::sync::Arc;

/// Builtin unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// Expression tree. Variables are indices into the owning [`Expr`]'s coordinate list.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
    Bump { arg: Box<Node>, r0: f64, r1: f64 },
}

impl Node {
    pub(crate) fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Node::Num(_) => {}
            Node::Var(i) => {
                if !out.contains(i) {
                    out.push(*i)
                }
            }
            Node::Neg(a) | Node::Call(_, a) => a.collect_vars(out),
            Node::Bump { arg, .. } => arg.collect_vars(out),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub(crate) fn substitute(&self, repl: &[Node]) -> Node {
        let s = |n: &Node| Box::new(n.substitute(repl));
        match self {
            Node::Num(v) => Node::Num(*v),
            Node::Var(i) => repl[*i].clone(),
            Node::Neg(a) => Node::Neg(s(a)),
            Node::Add(a, b) => Node::Add(s(a), s(b)),
            Node::Sub(a, b) => Node::Sub(s(a), s(b)),
            Node::Mul(a, b) => Node::Mul(s(a), s(b)),
            Node::Div(a, b) => Node::Div(s(a), s(b)),
            Node::Pow(a, b) => Node::Pow(s(a), s(b)),
            Node::Call(f, a) => Node::Call(*f, s(a)),
            Node::Bump { arg, r0, r1 } => Node::Bump { arg: s(arg), r0: *r0, r1: *r1 },
        }
    }

    fn write(&self, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut fmt::Formatter<'_>, a: &Node, op: &str, b: &Node| -> fmt::Result {
            write!(f, "(")?;
            a.write(names, f)?;
            write!(f, " {op} ")?;
            b.write(names, f)?;
            write!(f, ")")
        };
        match self {
            Node::Num(v) if v.is_sign_negative() => write!(f, "(-{:?})", -v),
            Node::Num(v) => write!(f, "{v:?}"),
            Node::Var(i) => write!(f, "{}", names[*i]),
            Node::Neg(a) => {
                write!(f, "(-")?;
                a.write(names, f)?;
                write!(f, ")")
            }
            Node::Add(a, b) => bin(f, a, "+", b),
            Node::Sub(a, b) => bin(f, a, "-", b),
            Node::Mul(a, b) => bin(f, a, "*", b),
            Node::Div(a, b) => bin(f, a, "/", b),
            Node::Pow(a, b) => bin(f, a, "^", b),
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(names, f)?;
                write!(f, ")")
            }
            Node::Bump { arg, r0, r1 } => {
                write!(f, "bump(")?;
                arg.write(names, f)?;
                write!(f, "; {r0:?}, {r1:?})")
            }
        }
    }
}

/// A parsed scalar expression over a declared coordinate list.
#[derive(Clone, PartialEq)]
pub struct Expr {
    pub(crate) coords: Arc<Vec<String>>,
    pub(crate) root: Arc<Node>,
}

impl Expr {
    pub(crate) fn from_node(coords: Arc<Vec<String>>, root: Node) -> Expr {
        Expr { coords, root: Arc::new(root) }
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn node(&self) -> &Node {
        &self.root
    }

    /// Indices of the coordinates actually referenced, in first-use order.
    pub fn free_vars(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.root.collect_vars(&mut v);
        v
    }

    pub fn free_var_names(&self) -> Vec<&str> {
        self.free_vars().into_iter().map(|i| self.coords[i].as_str()).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn constant(coords: &[String], v: f64) -> Expr {
        Expr::from_node(Arc::new(coords.to_vec()), Node::Num(v))
    }

    /// The coordinate function `coords[i]`.
    pub fn var(coords: &[String], i: usize) -> Expr {
        assert!(i < coords.len(), "coordinate index out of range");
        Expr::from_node(Arc::new(coords.to_vec()), Node::Var(i))
    }

    fn binary(&self, other: &Expr, f: fn(Box<Node>, Box<Node>) -> Node) -> Expr {
        assert_eq!(self.coords, other.coords, "expressions over different coordinates");
        Expr::from_node(
            self.coords.clone(),
            f(Box::new((*self.root).clone()), Box::new((*other.root).clone())),
        )
    }

    pub fn add(&self, o: &Expr) -> Expr {
        self.binary(o, Node::Add)
    }

    pub fn sub(&self, o: &Expr) -> Expr {
        self.binary(o, Node::Sub)
    }

    pub fn mul(&self, o: &Expr) -> Expr {
        self.binary(o, Node::Mul)
    }

    pub fn div(&self, o: &Expr) -> Expr {
        self.binary(o, Node::Div)
    }

    pub fn pow(&self, o: &Expr) -> Expr {
        self.binary(o, Node::Pow)
    }

    pub fn neg(&self) -> Expr {
        Expr::from_node(self.coords.clone(), Node::Neg(Box::new((*self.root).clone())))
    }

    pub fn scale(&self, c: f64) -> Expr {
        Expr::constant(&self.coords, c).mul(self)
    }

    pub fn apply(&self, f: Func) -> Expr {
        Expr::from_node(self.coords.clone(), Node::Call(f, Box::new((*self.root).clone())))
    }

    /// Composition: replaces coordinate `i` by `repl[i]`; the result lives over the coordinates of `repl`.
    pub fn substitute(&self, repl: &[Expr]) -> Expr {
        assert_eq!(repl.len(), self.coords.len(), "one replacement per coordinate");
        let coords = repl
            .first()
            .map(|e| e.coords.clone())
            .unwrap_or_else(|| Arc::new(Vec::new()));
        let nodes: Vec<Node> = repl
            .iter()
            .map(|e| {
                assert_eq!(e.coords, coords, "replacements over different coordinates");
                (*e.root).clone()
            })
            .collect();
        Expr::from_node(coords, self.root.substitute(&nodes))
    }

    /// Same tree reinterpreted over a larger coordinate list in which every old name occurs.
    pub fn rebase(&self, coords: &[String]) -> Expr {
        let repl: Vec<Expr> = self
            .coords
            .iter()
            .map(|n| {
                let i = coords
                    .iter()
                    .position(|c| c == n)
                    .unwrap_or_else(|| panic!("coordinate `{n}` missing from rebase target"));
                Expr::var(coords, i)
            })
            .collect();
        if repl.is_empty() {
            return Expr::from_node(Arc::new(coords.to_vec()), (*self.root).clone());
        }
        self.substitute(&repl)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(&self.coords, f)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}
