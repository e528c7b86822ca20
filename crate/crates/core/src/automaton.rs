//! The automaton recognizing pairs of admissible digit streams with equal
//! sums `Σ εᵢαⁱ = Σ ε′ᵢαⁱ`.
//!
//! After reading `(ε_k, ε′_k)` the state is `A_k = A_{k−1}/α + (ε_k − ε′_k)α²`.
//! A pair of infinite streams has equal sums exactly when the states stay
//! bounded, and bounded states of `Z[α]` form a finite set.
//!
//! Construction: candidate states are generated from 0 and kept when
//! `|A| ≤ (a − 1)|α|³/(1 − |α|)`. That numeric test alone admits two extra
//! states, `±(1 − α + a·α²)`, which are only reachable by streams that break
//! the admissibility rule. The closure is therefore run over a product that
//! also remembers the recent digits of each stream, dead ends are pruned,
//! and the result is projected back onto values.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use num_integer::Integer;
#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{AlgNum, Embedding, FamilyParam};
use crate::error::{Error, Result};
use crate::numeration::PeriodicWord;

/// Slack added to the state bound.
pub const STATE_BOUND_SLACK: f64 = 1e-9;

/// Default cap on the number of product states explored during [`BoundaryAutomaton::build`].
pub const DEFAULT_STATE_CAP: usize = 200_000;

/// An edge `from → to` for the digit difference `diff = ε − ε′`, with the
/// concrete label pairs `(ε, ε′)` that realize it between admissible streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub diff: i32,
    pub to: usize,
    pub labels: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// Index of the state reached.
    Accepted(usize),
    /// Position (0-based) of the first pair without a transition.
    Rejected { position: usize },
}

#[derive(Clone, Debug)]
pub struct BoundaryAutomaton {
    param: FamilyParam,
    states: Vec<AlgNum>,
    initial: usize,
    transitions: Vec<Transition>,
    /// `(from, ε, ε′) → to`
    step: BTreeMap<(usize, u32, u32), usize>,
}

/// Classes (zero, middle, top) of the last three digits of one stream; the
/// admissibility rule looks at nothing else.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Context {
    last: u32,
    second: u32,
    third: u32,
}

impl Context {
    const START: Context = Context {
        last: 0,
        second: 0,
        third: 0,
    };

    fn push(self, param: FamilyParam, d: u32) -> Option<Context> {
        let top = param.a() - 1;
        let class = if d == 0 {
            0
        } else if d == top {
            2
        } else {
            1
        };
        if class == 2 && self.last == 2 && (self.second != 0 || self.third != 0) {
            return None;
        }
        Some(Context {
            last: class,
            second: self.last,
            third: self.second,
        })
    }
}

type ProductState = (usize, Context, Context);

impl BoundaryAutomaton {
    pub fn build(param: FamilyParam, e: &Embedding) -> Result<Self> {
        Self::build_with_cap(param, e, DEFAULT_STATE_CAP)
    }

    pub fn build_with_cap(param: FamilyParam, e: &Embedding, cap: usize) -> Result<Self> {
        if e.param() != param {
            return Err(Error::ParamMismatch(param.a(), e.param().a()));
        }
        let top = param.a() - 1;
        let m = e.alpha_abs();
        let bound = f64::from(top) * m.powi(3) / (1.0 - m) + STATE_BOUND_SLACK;
        let alpha2 = AlgNum::new(param, 0, 0, 1);

        // value interning and the (value, d) → value transition cache
        let mut values: Vec<AlgNum> = vec![AlgNum::zero(param)];
        let mut value_index: BTreeMap<AlgNum, usize> = BTreeMap::new();
        value_index.insert(values[0].clone(), 0);
        let mut value_step: BTreeMap<(usize, i32), Option<usize>> = BTreeMap::new();

        let start: ProductState = (0, Context::START, Context::START);
        let mut product: BTreeMap<ProductState, usize> = BTreeMap::new();
        let mut nodes: Vec<ProductState> = vec![start];
        product.insert(start, 0);
        // product edges: (from node, ε, ε′, to node)
        let mut edges: Vec<(usize, u32, u32, usize)> = Vec::new();
        let mut queue = VecDeque::from([0usize]);

        while let Some(n) = queue.pop_front() {
            let (v, c1, c2) = nodes[n];
            for eps in 0..=top {
                let Some(n1) = c1.push(param, eps) else { continue };
                for eps2 in 0..=top {
                    let Some(n2) = c2.push(param, eps2) else { continue };
                    let d = eps as i32 - eps2 as i32;
                    let next = *value_step.entry((v, d)).or_insert_with(|| {
                        let cand = values[v].mul_alpha_inv() + alpha2.scale_i64(i64::from(d));
                        if e.embed(&cand).norm() > bound {
                            return None;
                        }
                        Some(*value_index.entry(cand.clone()).or_insert_with(|| {
                            values.push(cand);
                            values.len() - 1
                        }))
                    });
                    let Some(w) = next else { continue };
                    let key = (w, n1, n2);
                    let target = match product.get(&key) {
                        Some(&t) => t,
                        None => {
                            if nodes.len() >= cap {
                                return Err(Error::StateCap(cap));
                            }
                            nodes.push(key);
                            product.insert(key, nodes.len() - 1);
                            queue.push_back(nodes.len() - 1);
                            nodes.len() - 1
                        }
                    };
                    edges.push((n, eps, eps2, target));
                }
            }
        }

        let alive = prune(nodes.len(), &edges, 0);
        let mut live_values: BTreeSet<AlgNum> = BTreeSet::new();
        for (n, &(v, _, _)) in nodes.iter().enumerate() {
            if alive[n] {
                live_values.insert(values[v].clone());
            }
        }
        let states: Vec<AlgNum> = live_values.into_iter().collect();
        let index_of = |v: usize| states.binary_search(&values[v]).expect("live value");

        let mut grouped: BTreeMap<(usize, i32, usize), BTreeSet<(u32, u32)>> = BTreeMap::new();
        for &(from, eps, eps2, to) in &edges {
            if alive[from] && alive[to] {
                let key = (
                    index_of(nodes[from].0),
                    eps as i32 - eps2 as i32,
                    index_of(nodes[to].0),
                );
                grouped.entry(key).or_default().insert((eps, eps2));
            }
        }
        let mut step = BTreeMap::new();
        let transitions: Vec<Transition> = grouped
            .into_iter()
            .map(|((from, diff, to), labels)| {
                for &(x, y) in &labels {
                    step.insert((from, x, y), to);
                }
                Transition {
                    from,
                    diff,
                    to,
                    labels: labels.into_iter().collect(),
                }
            })
            .collect();
        let initial = states
            .binary_search(&AlgNum::zero(param))
            .map_err(|_| Error::IdentityFailure("zero state pruned"))?;
        Ok(BoundaryAutomaton {
            param,
            states,
            initial,
            transitions,
            step,
        })
    }

    pub fn param(&self) -> FamilyParam {
        self.param
    }

    /// States sorted by coefficient triple.
    pub fn states(&self) -> &[AlgNum] {
        &self.states
    }

    pub fn state_index(&self, value: &AlgNum) -> Option<usize> {
        self.states.binary_search(value).ok()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// Transitions sorted by `(from, diff, to)`.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn outgoing(&self, state: usize) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.from == state)
    }

    pub fn step(&self, state: usize, eps: u32, eps2: u32) -> Option<usize> {
        self.step.get(&(state, eps, eps2)).copied()
    }

    fn check_pair(&self, position: usize, pair: (u32, u32)) -> Result<()> {
        let max = self.param.a() - 1;
        for digit in [pair.0, pair.1] {
            if digit > max {
                return Err(Error::DigitOutOfRange {
                    index: position as i64,
                    digit,
                    max,
                });
            }
        }
        Ok(())
    }

    /// Feeds `(ε_i, ε′_i)` from the initial state.
    pub fn run_prefix(&self, pairs: &[(u32, u32)]) -> Result<RunOutcome> {
        let mut state = self.initial;
        for (position, &pair) in pairs.iter().enumerate() {
            self.check_pair(position, pair)?;
            match self.step(state, pair.0, pair.1) {
                Some(next) => state = next,
                None => return Ok(RunOutcome::Rejected { position }),
            }
        }
        Ok(RunOutcome::Accepted(state))
    }

    /// Whether two admissible eventually periodic streams have equal sums.
    ///
    /// Past both preperiods the pair sequence has period `L = lcm(p, p′)`,
    /// so the run either dies or revisits a state at a multiple of `L`.
    pub fn verify_equality(&self, first: &PeriodicWord, second: &PeriodicWord) -> Result<bool> {
        for w in [first, second] {
            if !w.is_admissible(self.param)? {
                return Err(Error::NotAdmissible);
            }
        }
        let lo = first.start().min(second.start());
        let periodic_from = first.period_start().max(second.period_start());
        let period = first.period().len().lcm(&second.period().len()) as i64;
        let mut state = self.initial;
        let mut seen = BTreeSet::new();
        let mut i = lo;
        loop {
            if i >= periodic_from && (i - periodic_from) % period == 0 && !seen.insert(state) {
                return Ok(true);
            }
            let pair = (first.get(i), second.get(i));
            self.check_pair((i - lo) as usize, pair)?;
            match self.step(state, pair.0, pair.1) {
                Some(next) => state = next,
                None => return Ok(false),
            }
            i += 1;
        }
    }

    /// Graphviz text: nodes named by their polynomial form, one edge per
    /// `(from, diff, to)` listing its label pairs.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph boundary_automaton {{");
        let _ = writeln!(out, "  // a = {}, {} states", self.param.a(), self.states.len());
        let _ = writeln!(out, "  rankdir=LR;");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if i == self.initial { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  \"{s}\" [shape={shape}];");
        }
        for t in &self.transitions {
            let labels: Vec<String> = t.labels.iter().map(|(x, y)| format!("({x},{y})")).collect();
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"d={}: {}\"];",
                self.states[t.from],
                self.states[t.to],
                t.diff,
                labels.join(" ")
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Drops nodes without successors until stable, then nodes unreachable from `root`.
fn prune(n: usize, edges: &[(usize, u32, u32, usize)], root: usize) -> Vec<bool> {
    let mut alive = vec![true; n];
    let mut out_degree = vec![0usize; n];
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(from, _, _, to) in edges {
        out_degree[from] += 1;
        incoming[to].push(from);
    }
    let mut dead: Vec<usize> = (0..n).filter(|&v| out_degree[v] == 0).collect();
    while let Some(v) = dead.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &u in &incoming[v] {
            out_degree[u] -= 1;
            if out_degree[u] == 0 && alive[u] {
                dead.push(u);
            }
        }
    }
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(from, _, _, to) in edges {
        if alive[from] && alive[to] {
            outgoing[from].push(to);
        }
    }
    let mut reached = vec![false; n];
    if alive[root] {
        let mut stack = vec![root];
        reached[root] = true;
        while let Some(v) = stack.pop() {
            for &w in &outgoing[v] {
                if !reached[w] {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    reached
}

/// The fifteen expected states `0, ±α, ±α², ±(α − α²), ±(1 + (a−1)α²),
/// ±(1 + (a−2)α²), ±(1 − α + (a−1)α²), ±(1 − 2α + aα²)`, sorted.
pub fn expected_states(param: FamilyParam) -> Vec<AlgNum> {
    let a = i64::from(param.a());
    let base = [
        [0, 1, 0],
        [0, 0, 1],
        [0, 1, -1],
        [1, 0, a - 1],
        [1, 0, a - 2],
        [1, -1, a - 1],
        [1, -2, a],
    ];
    let mut out = vec![AlgNum::zero(param)];
    for [c0, c1, c2] in base {
        let s = AlgNum::new(param, c0, c1, c2);
        out.push(-&s);
        out.push(s);
    }
    out.sort();
    out
}
