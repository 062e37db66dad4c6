//! Monotone circuits and their reduction to colored graphs.
//!
//! Gate `k` owns the vertex pair `P_k = (2k, 2k + 1)`. Color refinement
//! splits `P_k` exactly when gate `k` evaluates to 1:
//!
//! * a constant-1 gate colors its two vertices differently;
//! * an and-gate `k = i & j` adds a CFI gadget on `P_i, P_j, P_k`: four
//!   vertices `e_xy` with `e_xy` adjacent to `a_x` in `P_i`, `b_y` in `P_j`
//!   and `c_(x xor y)` in `P_k`;
//! * an or-gate `k = i | j` adds `IMP(P_i, P_k)` and `IMP(P_j, P_k)`, where
//!   `IMP(P_i, P_k)` is a CFI gadget on two fresh pairs `P'_i, P''_i` and
//!   `P_k`, each fresh pair joined to `P_i` by a matching of double edges.
//!
//! Variant `Gp` also joins the output pair by double-edge matchings to
//! every constant-0 pair, which makes the graph discrete iff the circuit
//! evaluates to 1. Variant `Gpp` further attaches `IMP(P_l, P_(l+1))` to a
//! fresh pair; for circuits evaluating to 0 the result is not refinable.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::rng;
use crate::graph::{ColoredGraph, GraphBuilder};
use crate::refinement::stable_partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gate {
    Const0,
    Const1,
    And(usize, usize),
    Or(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneCircuit {
    gates: Vec<Gate>,
    output: usize,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedCircuit(msg.into())
}

impl MonotoneCircuit {
    /// Gate inputs must be two distinct earlier gates.
    pub fn new(gates: Vec<Gate>, output: usize) -> Result<Self> {
        if output >= gates.len() {
            return Err(malformed(format!(
                "output gate {output} does not exist ({} gates)",
                gates.len()
            )));
        }
        for (k, gate) in gates.iter().enumerate() {
            if let Gate::And(i, j) | Gate::Or(i, j) = *gate {
                if i >= k || j >= k {
                    return Err(malformed(format!(
                        "gate {k} reads a gate that is not earlier"
                    )));
                }
                if i == j {
                    return Err(malformed(format!("gate {k} reads gate {i} twice")));
                }
            }
        }
        Ok(MonotoneCircuit { gates, output })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Values of all gates.
    pub fn values(&self) -> Vec<bool> {
        let mut val = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::Const0 => false,
                Gate::Const1 => true,
                Gate::And(i, j) => val[i] && val[j],
                Gate::Or(i, j) => val[i] || val[j],
            };
            val.push(v);
        }
        val
    }

    pub fn evaluate(&self) -> bool {
        self.values()[self.output]
    }
}

/// Text form: one `g <id> const0|const1|and <i> <j>|or <i> <j>` line per
/// gate in id order, then `out <id>`. `#` starts a comment.
impl FromStr for MonotoneCircuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut gates = Vec::new();
        let mut output = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let toks: Vec<&str> = raw.split('#').next().unwrap().split_whitespace().collect();
            let num = |s: &str| -> Result<usize> {
                s.parse()
                    .map_err(|_| parse_err(line, format!("bad gate id {s:?}")))
            };
            match toks.as_slice() {
                [] => {}
                ["out", id] => {
                    if output.replace(num(id)?).is_some() {
                        return Err(parse_err(line, "second output line".into()));
                    }
                }
                ["g", id, rest @ ..] => {
                    if num(id)? != gates.len() {
                        return Err(parse_err(line, format!("expected gate {}", gates.len())));
                    }
                    let gate = match rest {
                        ["const0"] => Gate::Const0,
                        ["const1"] => Gate::Const1,
                        ["and", i, j] => Gate::And(num(i)?, num(j)?),
                        ["or", i, j] => Gate::Or(num(i)?, num(j)?),
                        _ => return Err(parse_err(line, format!("bad gate {raw:?}"))),
                    };
                    gates.push(gate);
                }
                _ => return Err(parse_err(line, format!("unknown line {raw:?}"))),
            }
        }
        let output = output.ok_or_else(|| malformed("missing out line"))?;
        MonotoneCircuit::new(gates, output)
    }
}

impl fmt::Display for MonotoneCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Const0 => writeln!(f, "g {k} const0")?,
                Gate::Const1 => writeln!(f, "g {k} const1")?,
                Gate::And(i, j) => writeln!(f, "g {k} and {i} {j}")?,
                Gate::Or(i, j) => writeln!(f, "g {k} or {i} {j}")?,
            }
        }
        writeln!(f, "out {}", self.output)
    }
}

/// A random circuit with `num_gates >= 1` gates whose last gate is the
/// output. The first two gates are constants; later gates are constants
/// with probability 1/4.
pub fn random_circuit(num_gates: usize, seed: u64) -> Result<MonotoneCircuit> {
    if num_gates == 0 {
        return Err(Error::InvalidParameter("a circuit needs a gate".into()));
    }
    let mut rng = rng(seed);
    let mut gates = Vec::with_capacity(num_gates);
    for k in 0..num_gates {
        let gate = if k < 2 || rng.gen_bool(0.25) {
            if rng.gen_bool(0.5) {
                Gate::Const1
            } else {
                Gate::Const0
            }
        } else {
            let i = rng.gen_range(0..k);
            let mut j = rng.gen_range(0..k - 1);
            if j >= i {
                j += 1;
            }
            if rng.gen_bool(0.5) {
                Gate::And(i, j)
            } else {
                Gate::Or(i, j)
            }
        };
        gates.push(gate);
    }
    MonotoneCircuit::new(gates, num_gates - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    G,
    Gp,
    Gpp,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "G" => Ok(Variant::G),
            "Gp" => Ok(Variant::Gp),
            "Gpp" => Ok(Variant::Gpp),
            _ => Err(Error::InvalidParameter(format!("unknown variant {s:?}"))),
        }
    }
}

pub type Pair = (usize, usize);

/// A CFI gadget on pairs `p, q, r` with connecting vertices `f`, where
/// `f[2x + y]` is adjacent to `p.x`, `q.y` and `r.(x xor y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cfi {
    pub p: Pair,
    pub q: Pair,
    pub r: Pair,
    pub f: [usize; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gadget {
    /// And-gate `gate`.
    And { gate: usize, cfi: Cfi },
    /// `IMP(source, target)`: `cfi.p` and `cfi.q` are the fresh pairs
    /// linked to `source`, `cfi.r` is `target`.
    Imp {
        source: Pair,
        target: Pair,
        cfi: Cfi,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionOutput {
    pub variant: Variant,
    #[serde(skip)]
    pub graph: ColoredGraph,
    /// `P_k` for gate `k`.
    pub pair_map: Vec<Pair>,
    /// The extra pair of variant `Gpp`.
    pub extra_pair: Option<Pair>,
    pub gadgets: Vec<Gadget>,
}

struct Builder {
    colors: Vec<u32>,
    next_color: u32,
    edges: Vec<(usize, usize, u32)>,
}

impl Builder {
    fn class(&mut self, size: usize) -> Vec<usize> {
        let start = self.colors.len();
        self.colors
            .extend(std::iter::repeat_n(self.next_color, size));
        self.next_color += 1;
        (start..start + size).collect()
    }

    fn pair(&mut self) -> Pair {
        let v = self.class(2);
        (v[0], v[1])
    }

    fn link(&mut self, from: Pair, to: Pair) {
        self.edges.push((from.0, to.0, 2));
        self.edges.push((from.1, to.1, 2));
    }

    fn cfi(&mut self, p: Pair, q: Pair, r: Pair) -> Cfi {
        let f = self.class(4);
        let pick = |pair: Pair, bit: usize| if bit == 0 { pair.0 } else { pair.1 };
        for x in 0..2 {
            for y in 0..2 {
                let e = f[2 * x + y];
                self.edges.push((e, pick(p, x), 1));
                self.edges.push((e, pick(q, y), 1));
                self.edges.push((e, pick(r, x ^ y), 1));
            }
        }
        Cfi {
            p,
            q,
            r,
            f: [f[0], f[1], f[2], f[3]],
        }
    }

    fn imp(&mut self, source: Pair, target: Pair) -> Gadget {
        let p1 = self.pair();
        let p2 = self.pair();
        self.link(p1, source);
        self.link(p2, source);
        let cfi = self.cfi(p1, p2, target);
        Gadget::Imp {
            source,
            target,
            cfi,
        }
    }

    fn build(self) -> ColoredGraph {
        let mut b = GraphBuilder::new(self.colors.len());
        b.colors(&self.colors);
        for (u, v, m) in self.edges {
            b.edge_mult(u, v, m);
        }
        b.build().expect("reduction builds a valid graph")
    }
}

/// Builds the graph of `variant` for `circuit`. Vertices: all gate pairs
/// in gate order, the extra pair of `Gpp`, then gadget vertices in gate
/// order. Every pair and every gadget class is its own color class,
/// numbered in the same order, except that constant-1 pairs use two colors.
pub fn reduce(circuit: &MonotoneCircuit, variant: Variant) -> ReductionOutput {
    let mut b = Builder {
        colors: Vec::new(),
        next_color: 0,
        edges: Vec::new(),
    };
    let pair_map: Vec<Pair> = circuit
        .gates
        .iter()
        .map(|gate| match gate {
            Gate::Const1 => (b.class(1)[0], b.class(1)[0]),
            _ => b.pair(),
        })
        .collect();
    let extra_pair = (variant == Variant::Gpp).then(|| b.pair());
    let mut gadgets = Vec::new();
    for (k, gate) in circuit.gates.iter().enumerate() {
        match *gate {
            Gate::And(i, j) => {
                let cfi = b.cfi(pair_map[i], pair_map[j], pair_map[k]);
                gadgets.push(Gadget::And { gate: k, cfi });
            }
            Gate::Or(i, j) => {
                gadgets.push(b.imp(pair_map[i], pair_map[k]));
                gadgets.push(b.imp(pair_map[j], pair_map[k]));
            }
            Gate::Const0 | Gate::Const1 => {}
        }
    }
    let l = circuit.output;
    if variant != Variant::G {
        for (k, gate) in circuit.gates.iter().enumerate() {
            if *gate == Gate::Const0 && k != l {
                b.link(pair_map[l], pair_map[k]);
            }
        }
    }
    if let Some(extra) = extra_pair {
        gadgets.push(b.imp(pair_map[l], extra));
    }
    ReductionOutput {
        variant,
        graph: b.build(),
        pair_map,
        extra_pair,
        gadgets,
    }
}

/// For every gate: the stable partition separates `P_k` iff gate `k`
/// evaluates to 1.
pub fn verify_gate_propagation(out: &ReductionOutput, circuit: &MonotoneCircuit) -> bool {
    let (p, _) = stable_partition(&out.graph);
    circuit
        .values()
        .iter()
        .zip(&out.pair_map)
        .all(|(&value, &(a, b))| (p.class_of(a) != p.class_of(b)) == value)
}

fn gadget_graph(pairs: usize, gadgets: &[(usize, usize, usize)]) -> ColoredGraph {
    let mut b = Builder {
        colors: Vec::new(),
        next_color: 0,
        edges: Vec::new(),
    };
    let p: Vec<Pair> = (0..pairs).map(|_| b.pair()).collect();
    for &(i, j, k) in gadgets {
        b.cfi(p[i], p[j], p[k]);
    }
    b.build()
}

/// `CFI(P_1, P_2, P_3)` alone: pairs `(0,1), (2,3), (4,5)`, then `F`.
pub fn cfi_gadget() -> ColoredGraph {
    gadget_graph(3, &[(0, 1, 2)])
}

/// `CFI(P_1, P_2, P_3)` and `CFI(P_1, P_2, P_4)` sharing the input pairs:
/// pairs `(0,1) .. (6,7)`, then `F` and `F'`. Refinable but not Tinhofer.
pub fn separating_graph() -> ColoredGraph {
    gadget_graph(4, &[(0, 1, 2), (0, 1, 3)])
}

/// Which of the `pairs` a permutation swaps.
pub fn flipped_pairs(perm: &[usize], pairs: &[Pair]) -> Vec<bool> {
    pairs.iter().map(|&(a, b)| perm[a] == b).collect()
}
