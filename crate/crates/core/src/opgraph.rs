//! Operation graphs of the arithmetic kernels.
//!
//! A kernel is traced by running it on [`Traced`] words: each primitive
//! integer operation becomes one node. Data-dependent branches are
//! if-converted, so both arms are recorded and merged with select nodes, the
//! way a dataflow machine executes them. Constants are folded and identical
//! operations are shared, so the graph holds what a straightforward compiler
//! would emit.
//!
//! Reports give node counts per category, height (nodes on the longest
//! path), width (most nodes at one depth), a weighted latency and a
//! pipelined reciprocal-throughput estimate under a per-category port budget.
//! These are model figures, not silicon measurements.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::ops::{Add, BitAnd, BitOr, BitXor, Not, Shl, Shr, Sub};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft::{self, Arith, Complex};
use crate::word::{Merge, Prim, Word};
use crate::{posit, softfloat};

/// Header line stated on every report.
pub const MODEL_NOTE: &str = "branch-free model: both arms of every data-dependent branch are executed and merged with select";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    MinMax,
    IntArith,
    Bitwise,
    SelectOther,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::MinMax, Category::IntArith, Category::Bitwise, Category::SelectOther];

    pub fn of(p: Prim) -> Category {
        use Prim::*;
        match p {
            UMin | UMax | SMin | SMax => Category::MinMax,
            Add | Sub | Mul | MulHi | Eq | Ne | Ult | Ule | Slt | Sle => Category::IntArith,
            And | Or | Xor | Not | Shl | Shr | Sar => Category::Bitwise,
            Select | Clz => Category::SelectOther,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::MinMax => "min_max",
            Category::IntArith => "int_arith",
            Category::Bitwise => "bitwise",
            Category::SelectOther => "select_other",
        }
    }
}

/// Where a node argument comes from. Inputs and constants are leaves and do
/// not count as operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Operand {
    Input(u32),
    Const(u32),
    Node(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpNode {
    pub id: u32,
    pub prim: Prim,
    pub category: Category,
    pub inputs: Vec<Operand>,
    /// 1 for multiplier operations, 0 otherwise.
    pub latency_class: u8,
}

impl OpNode {
    pub fn new(id: u32, prim: Prim, inputs: Vec<Operand>) -> Self {
        let latency_class = matches!(prim, Prim::Mul | Prim::MulHi) as u8;
        OpNode { id, prim, category: Category::of(prim), inputs, latency_class }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpGraph {
    pub name: String,
    pub n_inputs: u32,
    pub nodes: Vec<OpNode>,
    pub outputs: Vec<Operand>,
}

impl OpGraph {
    /// Evaluates the graph on concrete inputs.
    pub fn eval(&self, inputs: &[u32]) -> Vec<u32> {
        assert_eq!(inputs.len(), self.n_inputs as usize);
        let order = self.topo_order().expect("acyclic graph");
        let index: HashMap<u32, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let mut vals = vec![0u32; self.nodes.len()];
        let get = |vals: &[u32], o: &Operand| match *o {
            Operand::Input(i) => inputs[i as usize],
            Operand::Const(c) => c,
            Operand::Node(id) => vals[index[&id]],
        };
        for i in order {
            let n = &self.nodes[i];
            let args: Vec<u32> = n.inputs.iter().map(|o| get(&vals, o)).collect();
            vals[i] = n.prim.eval(&args);
        }
        self.outputs.iter().map(|o| get(&vals, o)).collect()
    }

    /// Node indices in dependency order; fails on a cycle or a dangling id.
    pub fn topo_order(&self) -> Result<Vec<usize>> {
        let index: HashMap<u32, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let mut indeg = vec![0usize; self.nodes.len()];
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for o in &n.inputs {
                if let Operand::Node(id) = o {
                    let j = *index.get(id).ok_or(Error::CycleDetected)?;
                    indeg[i] += 1;
                    users[j].push(i);
                }
            }
        }
        let mut ready: Vec<usize> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = ready.pop() {
            order.push(i);
            for &u in users[i].iter().rev() {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    ready.push(u);
                }
            }
        }
        if order.len() != self.nodes.len() {
            return Err(Error::CycleDetected);
        }
        Ok(order)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    /// Graphviz text.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", self.name);
        let _ = writeln!(s, "  // {MODEL_NOTE}");
        for i in 0..self.n_inputs {
            let _ = writeln!(s, "  in{i} [shape=box,label=\"in{i}\"];");
        }
        let mut consts = Vec::new();
        for n in &self.nodes {
            let _ = writeln!(s, "  n{} [label=\"{:?}\",group={}];", n.id, n.prim, n.category.name());
            for o in &n.inputs {
                let src = match o {
                    Operand::Input(i) => format!("in{i}"),
                    Operand::Const(c) => {
                        let name = format!("c{}_{}", n.id, consts.len());
                        consts.push((name.clone(), *c));
                        name
                    }
                    Operand::Node(j) => format!("n{j}"),
                };
                let _ = writeln!(s, "  {src} -> n{};", n.id);
            }
        }
        for (name, c) in consts {
            let _ = writeln!(s, "  {name} [shape=plaintext,label=\"{c:#x}\"];");
        }
        for (i, o) in self.outputs.iter().enumerate() {
            let src = match o {
                Operand::Input(j) => format!("in{j}"),
                Operand::Const(c) => format!("\"{c:#x}\""),
                Operand::Node(j) => format!("n{j}"),
            };
            let _ = writeln!(s, "  {src} -> out{i};");
            let _ = writeln!(s, "  out{i} [shape=box];");
        }
        s.push_str("}\n");
        s
    }
}

// ---------------------------------------------------------------------------
// Tracing

/// A word inside an active trace. Only meaningful on the thread and within
/// the [`trace`] call that created it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Traced(u32);

#[derive(Clone, Copy)]
enum Val {
    Input(u32),
    Const(u32),
    Op(Prim, [u32; 3]),
}

#[derive(Default)]
struct Recorder {
    vals: Vec<Val>,
    consts: HashMap<u32, u32>,
    memo: HashMap<(Prim, [u32; 3]), u32>,
}

thread_local! {
    static RECORDER: RefCell<Option<Recorder>> = const { RefCell::new(None) };
}

fn with_rec<R>(f: impl FnOnce(&mut Recorder) -> R) -> R {
    RECORDER.with(|r| f(r.borrow_mut().as_mut().expect("Traced word used outside trace()")))
}

impl Recorder {
    fn push(&mut self, v: Val) -> Traced {
        self.vals.push(v);
        Traced(self.vals.len() as u32 - 1)
    }

    fn lit(&mut self, c: u32) -> Traced {
        if let Some(&id) = self.consts.get(&c) {
            return Traced(id);
        }
        let t = self.push(Val::Const(c));
        self.consts.insert(c, t.0);
        t
    }

    fn known(&self, t: Traced) -> Option<u32> {
        match self.vals[t.0 as usize] {
            Val::Const(c) => Some(c),
            _ => None,
        }
    }

    fn op(&mut self, prim: Prim, args: &[Traced]) -> Traced {
        use Prim::*;
        let kn: Vec<Option<u32>> = args.iter().map(|&a| self.known(a)).collect();
        if kn.iter().all(Option::is_some) {
            let vals: Vec<u32> = kn.iter().map(|v| v.unwrap()).collect();
            return self.lit(prim.eval(&vals));
        }
        let a = args[0];
        let b = args.get(1).copied().unwrap_or(a);
        let (ka, kb) = (kn[0], kn.get(1).copied().flatten());
        let simplified = match prim {
            Select => match kn[0] {
                Some(c) => Some(if c != 0 { args[1] } else { args[2] }),
                None if args[1] == args[2] => Some(args[1]),
                None => None,
            },
            Add | Or | Xor if ka == Some(0) => Some(b),
            Add | Sub | Or | Xor | Shl | Shr | Sar if kb == Some(0) => Some(a),
            And if ka == Some(0) || kb == Some(0) => Some(self.lit(0)),
            And if ka == Some(u32::MAX) => Some(b),
            And if kb == Some(u32::MAX) => Some(a),
            Or if ka == Some(u32::MAX) || kb == Some(u32::MAX) => Some(self.lit(u32::MAX)),
            Mul | MulHi if ka == Some(0) || kb == Some(0) => Some(self.lit(0)),
            Mul if ka == Some(1) => Some(b),
            Mul if kb == Some(1) => Some(a),
            Shl | Shr if ka == Some(0) => Some(self.lit(0)),
            Sub | Xor | Ne | Ult | Slt if a == b => Some(self.lit(0)),
            Eq | Ule | Sle if a == b => Some(self.lit(1)),
            And | Or | UMin | UMax | SMin | SMax if a == b => Some(a),
            _ => None,
        };
        if let Some(t) = simplified {
            return t;
        }
        let mut key = [0u32; 3];
        for (slot, t) in key.iter_mut().zip(args) {
            *slot = t.0;
        }
        if matches!(prim, Add | Mul | MulHi | And | Or | Xor | Eq | Ne | UMin | UMax | SMin | SMax) && key[0] > key[1] {
            key.swap(0, 1);
        }
        if let Some(&id) = self.memo.get(&(prim, key)) {
            return Traced(id);
        }
        let t = self.push(Val::Op(prim, key));
        self.memo.insert((prim, key), t.0);
        t
    }
}

/// Records `f` applied to `n_inputs` fresh input words. Traces are isolated
/// per call; nesting on one thread is not allowed.
pub fn trace(name: &str, n_inputs: u32, f: impl FnOnce(&[Traced]) -> Vec<Traced>) -> OpGraph {
    RECORDER.with(|r| {
        let mut r = r.borrow_mut();
        assert!(r.is_none(), "nested trace");
        *r = Some(Recorder::default());
    });
    struct Reset;
    impl Drop for Reset {
        fn drop(&mut self) {
            RECORDER.with(|r| *r.borrow_mut() = None);
        }
    }
    let _reset = Reset;
    let inputs: Vec<Traced> = (0..n_inputs).map(|i| with_rec(|r| r.push(Val::Input(i)))).collect();
    let outs = f(&inputs);
    let rec = RECORDER.with(|r| r.borrow_mut().take().expect("recorder"));
    finish(name, n_inputs, &rec, &outs)
}

/// Keeps the operations the outputs depend on, renumbered in record order.
fn finish(name: &str, n_inputs: u32, rec: &Recorder, outs: &[Traced]) -> OpGraph {
    let mut live = vec![false; rec.vals.len()];
    let mut stack: Vec<u32> = outs.iter().map(|t| t.0).collect();
    while let Some(i) = stack.pop() {
        if std::mem::replace(&mut live[i as usize], true) {
            continue;
        }
        if let Val::Op(p, args) = rec.vals[i as usize] {
            stack.extend(&args[..p.arity()]);
        }
    }
    let mut node_id = vec![u32::MAX; rec.vals.len()];
    let mut nodes = Vec::new();
    let operand = |node_id: &[u32], i: u32| match rec.vals[i as usize] {
        Val::Input(k) => Operand::Input(k),
        Val::Const(c) => Operand::Const(c),
        Val::Op(..) => Operand::Node(node_id[i as usize]),
    };
    for (i, v) in rec.vals.iter().enumerate() {
        if let (true, Val::Op(p, args)) = (live[i], v) {
            let inputs = args[..p.arity()].iter().map(|&a| operand(&node_id, a)).collect();
            node_id[i] = nodes.len() as u32;
            nodes.push(OpNode::new(node_id[i], *p, inputs));
        }
    }
    let outputs = outs.iter().map(|t| operand(&node_id, t.0)).collect();
    OpGraph { name: name.to_string(), n_inputs, nodes, outputs }
}

macro_rules! traced_binop {
    ($tr:ident, $f:ident, $p:ident) => {
        impl $tr for Traced {
            type Output = Traced;
            fn $f(self, o: Traced) -> Traced {
                with_rec(|r| r.op(Prim::$p, &[self, o]))
            }
        }
    };
}

traced_binop!(Add, add, Add);
traced_binop!(Sub, sub, Sub);
traced_binop!(BitAnd, bitand, And);
traced_binop!(BitOr, bitor, Or);
traced_binop!(BitXor, bitxor, Xor);
traced_binop!(Shl, shl, Shl);
traced_binop!(Shr, shr, Shr);

impl Not for Traced {
    type Output = Traced;
    fn not(self) -> Traced {
        with_rec(|r| r.op(Prim::Not, &[self]))
    }
}

impl Traced {
    fn bin(self, p: Prim, o: Traced) -> Traced {
        with_rec(|r| r.op(p, &[self, o]))
    }
}

impl Word for Traced {
    fn lit(v: u32) -> Self {
        with_rec(|r| r.lit(v))
    }
    fn mul(self, o: Self) -> Self {
        self.bin(Prim::Mul, o)
    }
    fn mulhi(self, o: Self) -> Self {
        self.bin(Prim::MulHi, o)
    }
    fn sar(self, o: Self) -> Self {
        self.bin(Prim::Sar, o)
    }
    fn clz(self) -> Self {
        with_rec(|r| r.op(Prim::Clz, &[self]))
    }
    fn eq(self, o: Self) -> Self {
        self.bin(Prim::Eq, o)
    }
    fn ne(self, o: Self) -> Self {
        self.bin(Prim::Ne, o)
    }
    fn ult(self, o: Self) -> Self {
        self.bin(Prim::Ult, o)
    }
    fn ule(self, o: Self) -> Self {
        self.bin(Prim::Ule, o)
    }
    fn slt(self, o: Self) -> Self {
        self.bin(Prim::Slt, o)
    }
    fn sle(self, o: Self) -> Self {
        self.bin(Prim::Sle, o)
    }
    fn umin(self, o: Self) -> Self {
        self.bin(Prim::UMin, o)
    }
    fn umax(self, o: Self) -> Self {
        self.bin(Prim::UMax, o)
    }
    fn smin(self, o: Self) -> Self {
        self.bin(Prim::SMin, o)
    }
    fn smax(self, o: Self) -> Self {
        self.bin(Prim::SMax, o)
    }
    fn select(c: Self, a: Self, b: Self) -> Self {
        with_rec(|r| r.op(Prim::Select, &[c, a, b]))
    }
    fn cond<T: Merge<Self>>(c: Self, then: impl FnOnce() -> T, els: impl FnOnce() -> T) -> T {
        match c.known() {
            Some(0) => els(),
            Some(_) => then(),
            None => {
                let a = then();
                let b = els();
                T::merge(c, a, b)
            }
        }
    }
    fn known(self) -> Option<u32> {
        with_rec(|r| r.known(self))
    }
}

// ---------------------------------------------------------------------------
// Operators

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    PositAdd,
    PositSub,
    PositMul,
    Sf32Add,
    Sf32Sub,
    Sf32Mul,
}

impl Operator {
    pub const ALL: [Operator; 6] =
        [Operator::PositAdd, Operator::PositSub, Operator::PositMul, Operator::Sf32Add, Operator::Sf32Sub, Operator::Sf32Mul];

    pub fn name(self) -> &'static str {
        match self {
            Operator::PositAdd => "posit_add",
            Operator::PositSub => "posit_sub",
            Operator::PositMul => "posit_mul",
            Operator::Sf32Add => "sf32_add",
            Operator::Sf32Sub => "sf32_sub",
            Operator::Sf32Mul => "sf32_mul",
        }
    }

    /// Applies the operator to concrete words.
    pub fn apply(self, a: u32, b: u32, fastmath: bool) -> u32 {
        self.kernel(crate::word::Bits(a), crate::word::Bits(b), fastmath).0
    }

    fn kernel<W: Word>(self, a: W, b: W, fastmath: bool) -> W {
        match self {
            Operator::PositAdd => posit::kernel::add(a, b, fastmath),
            Operator::PositSub => posit::kernel::sub(a, b, fastmath),
            Operator::PositMul => posit::kernel::mul(a, b, fastmath),
            Operator::Sf32Add => softfloat::kernel::add(a, b, fastmath),
            Operator::Sf32Sub => softfloat::kernel::sub(a, b, fastmath),
            Operator::Sf32Mul => softfloat::kernel::mul(a, b, fastmath),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Operator::ALL.into_iter().find(|o| o.name() == s).ok_or_else(|| Error::Parse(s.to_string()))
    }
}

/// Graph of one operator on two input words.
pub fn trace_operator(op: Operator, fastmath: bool) -> OpGraph {
    trace(op.name(), 2, |x| vec![op.kernel(x[0], x[1], fastmath)])
}

// ---------------------------------------------------------------------------
// Reports

/// Per-category node weights and issue ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatencyModel {
    pub weight: [u32; 4],
    /// Weight of multiplier nodes, which overrides their category weight.
    pub multiply_weight: u32,
    pub ports: [u32; 4],
}

impl Default for LatencyModel {
    fn default() -> Self {
        LatencyModel { weight: [1; 4], multiply_weight: 1, ports: [4; 4] }
    }
}

impl LatencyModel {
    fn node_weight(&self, n: &OpNode) -> u64 {
        if n.latency_class == 1 {
            self.multiply_weight as u64
        } else {
            self.weight[n.category.index()] as u64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphReport {
    pub name: String,
    pub note: String,
    pub total_nodes: u64,
    pub per_category: [u64; 4],
    pub height: u64,
    pub width: u64,
    pub est_latency_cycles: u64,
    pub est_reciprocal_throughput: u64,
    /// Nodes at each depth, starting from depth 1.
    pub level_occupancy: Vec<u64>,
}

impl GraphReport {
    pub fn category_count(&self, c: Category) -> u64 {
        self.per_category[c.index()]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn graph_report(g: &OpGraph, model: &LatencyModel) -> Result<GraphReport> {
    let order = g.topo_order()?;
    let index: HashMap<u32, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    let mut depth = vec![0u64; g.nodes.len()];
    let mut finish = vec![0u64; g.nodes.len()];
    for &i in &order {
        let n = &g.nodes[i];
        let (mut d, mut t) = (0, 0);
        for o in &n.inputs {
            if let Operand::Node(id) = o {
                let j = index[id];
                d = d.max(depth[j]);
                t = t.max(finish[j]);
            }
        }
        depth[i] = d + 1;
        finish[i] = t + model.node_weight(n);
    }
    let height = depth.iter().copied().max().unwrap_or(0);
    let mut per_level = vec![[0u64; 4]; height as usize];
    let mut per_category = [0u64; 4];
    for (i, n) in g.nodes.iter().enumerate() {
        per_level[depth[i] as usize - 1][n.category.index()] += 1;
        per_category[n.category.index()] += 1;
    }
    let level_occupancy: Vec<u64> = per_level.iter().map(|l| l.iter().sum()).collect();
    let rt = per_level
        .iter()
        .flat_map(|l| (0..4).map(move |c| l[c].div_ceil(model.ports[c].max(1) as u64)))
        .max()
        .unwrap_or(0);
    Ok(GraphReport {
        name: g.name.clone(),
        note: MODEL_NOTE.to_string(),
        total_nodes: g.nodes.len() as u64,
        per_category,
        height,
        width: level_occupancy.iter().copied().max().unwrap_or(0),
        est_latency_cycles: finish.iter().copied().max().unwrap_or(0),
        est_reciprocal_throughput: rt,
        level_occupancy,
    })
}

/// Report for the default model.
pub fn operator_report(op: Operator, fastmath: bool) -> GraphReport {
    graph_report(&trace_operator(op, fastmath), &LatencyModel::default()).expect("traced graphs are acyclic")
}

// ---------------------------------------------------------------------------
// FFT cost

/// Scalar formats whose butterfly can be traced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TracedFormat {
    Posit32,
    Float32,
}

impl TracedFormat {
    pub fn name(self) -> &'static str {
        match self {
            TracedFormat::Posit32 => "posit32",
            TracedFormat::Float32 => "float32",
        }
    }
}

struct TracedArith {
    format: TracedFormat,
    fastmath: bool,
}

impl Arith for TracedArith {
    type Scalar = Traced;
    fn add(&self, a: &Traced, b: &Traced) -> Traced {
        match self.format {
            TracedFormat::Posit32 => posit::kernel::add(*a, *b, self.fastmath),
            TracedFormat::Float32 => softfloat::kernel::add(*a, *b, self.fastmath),
        }
    }
    fn sub(&self, a: &Traced, b: &Traced) -> Traced {
        match self.format {
            TracedFormat::Posit32 => posit::kernel::sub(*a, *b, self.fastmath),
            TracedFormat::Float32 => softfloat::kernel::sub(*a, *b, self.fastmath),
        }
    }
    fn mul(&self, a: &Traced, b: &Traced) -> Traced {
        match self.format {
            TracedFormat::Posit32 => posit::kernel::mul(*a, *b, self.fastmath),
            TracedFormat::Float32 => softfloat::kernel::mul(*a, *b, self.fastmath),
        }
    }
}

fn complex_inputs(x: &[Traced], n: usize) -> Vec<Complex<Traced>> {
    (0..n).map(|i| Complex { re: x[2 * i], im: x[2 * i + 1] }).collect()
}

fn flatten(v: &[Complex<Traced>]) -> Vec<Traced> {
    v.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// Graph of one forward radix-4 butterfly: four complex data inputs and three
/// complex twiddles (inputs 0..8 data, 8..14 twiddles, re/im interleaved).
pub fn trace_butterfly4(format: TracedFormat, fastmath: bool) -> OpGraph {
    let ar = TracedArith { format, fastmath };
    trace(&format!("{}_butterfly4", format.name()), 14, |x| {
        let d = complex_inputs(x, 7);
        let out = fft::butterfly4(&ar, [&d[0], &d[1], &d[2], &d[3]], [&d[4], &d[5], &d[6]], false);
        flatten(&out)
    })
}

/// Graph of one radix-2 butterfly (no twiddles).
pub fn trace_butterfly2(format: TracedFormat, fastmath: bool) -> OpGraph {
    let ar = TracedArith { format, fastmath };
    trace(&format!("{}_butterfly2", format.name()), 4, |x| {
        let d = complex_inputs(x, 2);
        flatten(&fft::butterfly2(&ar, &d[0], &d[1]))
    })
}

/// Cost of a forward transform of size `n`, composed from butterfly graphs.
///
/// The butterflies of one stage are independent and the stages run in
/// sequence, so counts scale by the number of butterflies, height and latency
/// add across stages, width scales by the butterflies per stage, and the
/// throughput bound is the butterfly's bound times the butterflies per stage
/// summed over stages.
pub fn fft_cost_report(n: usize, format: TracedFormat, fastmath: bool) -> Result<GraphReport> {
    let log2 = fft::log2_size(n)?;
    let model = LatencyModel::default();
    let b4 = graph_report(&trace_butterfly4(format, fastmath), &model)?;
    let mut parts = vec![(b4, log2 / 2, n as u64 / 4)];
    if log2 % 2 == 1 {
        let b2 = graph_report(&trace_butterfly2(format, fastmath), &model)?;
        parts.push((b2, 1, n as u64 / 2));
    }
    let mut r = GraphReport {
        name: format!("{}_fft_{n}", format.name()),
        note: MODEL_NOTE.to_string(),
        total_nodes: 0,
        per_category: [0; 4],
        height: 0,
        width: 0,
        est_latency_cycles: 0,
        est_reciprocal_throughput: 0,
        level_occupancy: Vec::new(),
    };
    for (b, stages, per_stage) in parts {
        let stages = stages as u64;
        r.total_nodes += b.total_nodes * per_stage * stages;
        for c in 0..4 {
            r.per_category[c] += b.per_category[c] * per_stage * stages;
        }
        r.height += b.height * stages;
        r.width = r.width.max(b.width * per_stage);
        r.est_latency_cycles += b.est_latency_cycles * stages;
        r.est_reciprocal_throughput += b.est_reciprocal_throughput * per_stage * stages;
        for _ in 0..stages {
            r.level_occupancy.extend(b.level_occupancy.iter().map(|&w| w * per_stage));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::k;

    #[test]
    fn chain_of_adds() {
        let g = trace("chain", 1, |x| {
            let mut v = x[0];
            for i in 1..=5 {
                v = v + k(i);
            }
            vec![v]
        });
        let r = graph_report(&g, &LatencyModel::default()).unwrap();
        assert_eq!((r.total_nodes, r.height, r.width), (5, 5, 1));
        assert_eq!(g.eval(&[10]), vec![25]);
    }

    #[test]
    fn independent_adds_and_ports() {
        let g = trace("wide", 16, |x| (0..8).map(|i| x[2 * i] + x[2 * i + 1]).collect());
        let r = graph_report(&g, &LatencyModel::default()).unwrap();
        assert_eq!((r.total_nodes, r.height, r.width), (8, 1, 8));
        assert_eq!(r.est_reciprocal_throughput, 2);
    }

    #[test]
    fn folding_and_sharing() {
        let g = trace("fold", 2, |x| {
            let a = x[0] + x[1];
            let b = x[1] + x[0];
            let c = k::<Traced>(3) + k(4);
            let s = Traced::select(k(1), a, b);
            vec![s ^ c, a & k(u32::MAX), x[0] - x[0]]
        });
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.outputs[2], Operand::Const(0));
        assert_eq!(g.eval(&[1, 2]), vec![3 ^ 7, 3, 0]);
    }

    #[test]
    fn cycles_are_reported() {
        let g = OpGraph {
            name: "cycle".into(),
            n_inputs: 0,
            nodes: vec![
                OpNode::new(0, Prim::Add, vec![Operand::Node(1), Operand::Const(1)]),
                OpNode::new(1, Prim::Add, vec![Operand::Node(0), Operand::Const(1)]),
            ],
            outputs: vec![Operand::Node(0)],
        };
        assert!(matches!(graph_report(&g, &LatencyModel::default()), Err(Error::CycleDetected)));
    }

    #[test]
    fn dot_and_json_export() {
        let g = trace_operator(Operator::Sf32Mul, true);
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph") && dot.contains("MulHi"));
        let r = graph_report(&g, &LatencyModel::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["total_nodes"].as_u64(), Some(r.total_nodes));
        assert!(v["level_occupancy"].is_array());
    }
}
