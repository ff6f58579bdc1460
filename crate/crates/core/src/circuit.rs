//! Tropical circuits: fan-in-2 DAGs of extremum and sum gates.
//!
//! Gates may be stored in any order; a topological order is computed on
//! construction. Dead gates (not reaching the output) are kept and counted in
//! [`Circuit::size`].

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{poly_equiv, Flavor, Monomial, Polynomial, Valuation, VariableId};

pub type GateId = usize;

/// Default bound on the total number of monomials held across all gates
/// during extraction.
pub const DEFAULT_CAP: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(VariableId),
    Const0,
    Ext(GateId, GateId),
    Sum(GateId, GateId),
}

impl Gate {
    pub fn children(&self) -> Option<(GateId, GateId)> {
        match *self {
            Gate::Ext(l, r) | Gate::Sum(l, r) => Some((l, r)),
            _ => None,
        }
    }
}

/// A multiset of universe indices, sorted ascending. `x²` is `[i, i]`.
pub type IndexMonomial = Box<[u32]>;

/// Sorted, duplicate-free list of indexed monomials.
pub type IndexPoly = Vec<IndexMonomial>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: GateId,
    flavor: Flavor,
    universe: Vec<VariableId>,
    input_index: Vec<u32>,
    topo: Vec<GateId>,
}

impl Circuit {
    /// Builds a circuit, checking references, acyclicity and that every
    /// input variable belongs to `universe`.
    pub fn new(
        gates: Vec<Gate>,
        output: GateId,
        flavor: Flavor,
        universe: impl IntoIterator<Item = VariableId>,
    ) -> Result<Self> {
        let universe: Vec<VariableId> =
            universe.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let doc = CircuitDoc::from_parts(&gates, Some(output), flavor, &universe);
        let report = validate_doc(&doc);
        if let Some(d) = report.errors.first() {
            return Err(Error::InvalidCircuit(d.to_string()));
        }
        let lookup: HashMap<&VariableId, u32> =
            universe.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
        let input_index = gates
            .iter()
            .map(|g| match g {
                Gate::Input(x) => lookup[x],
                _ => u32::MAX,
            })
            .collect();
        let topo = topological_order(&gates).expect("validated acyclic");
        Ok(Circuit { gates, output, flavor, universe, input_index, topo })
    }

    pub fn from_doc(doc: &CircuitDoc) -> Result<Self> {
        let report = validate_doc(doc);
        if let Some(d) = report.errors.first() {
            return Err(Error::InvalidCircuit(d.to_string()));
        }
        let gates = doc
            .gates
            .iter()
            .map(|g| match g {
                GateDoc::Input { var } => Gate::Input(var.clone()),
                GateDoc::Const0 => Gate::Const0,
                GateDoc::Ext { l, r } => Gate::Ext(l.unwrap(), r.unwrap()),
                GateDoc::Sum { l, r } => Gate::Sum(l.unwrap(), r.unwrap()),
            })
            .collect();
        Circuit::new(gates, doc.output.unwrap(), doc.flavor, doc.universe.iter().cloned())
    }

    pub fn to_doc(&self) -> CircuitDoc {
        CircuitDoc::from_parts(&self.gates, Some(self.output), self.flavor, &self.universe)
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id]
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn universe(&self) -> &[VariableId] {
        &self.universe
    }

    pub fn topo_order(&self) -> &[GateId] {
        &self.topo
    }

    /// Same gates, different designated output.
    pub fn with_output(&self, output: GateId) -> Result<Circuit> {
        if output >= self.gates.len() {
            return Err(Error::InvalidCircuit(format!("output {output} does not exist")));
        }
        Ok(Circuit { output, ..self.clone() })
    }

    pub fn validate(&self) -> ValidationReport {
        validate_doc(&self.to_doc())
    }

    /// Gates from which the output is reachable.
    pub fn reachable(&self) -> Vec<bool> {
        reachable_from(&self.gates, self.output)
    }

    /// Aligns a valuation with the universe order.
    pub fn weights(&self, v: &Valuation) -> Result<Vec<i64>> {
        self.universe.iter().map(|x| v.get(x)).collect()
    }

    pub fn evaluate(&self, v: &Valuation) -> Result<i64> {
        self.evaluate_weights(&self.weights(v)?)
    }

    /// Evaluates with weights given in universe order.
    pub fn evaluate_weights(&self, w: &[i64]) -> Result<i64> {
        let values = self.evaluate_all_weights(w)?;
        Ok(values[self.output])
    }

    /// Values of every gate, in gate-id order.
    pub fn evaluate_all_weights(&self, w: &[i64]) -> Result<Vec<i64>> {
        if w.len() != self.universe.len() {
            return Err(Error::InvalidCircuit(format!(
                "expected {} weights, got {}",
                self.universe.len(),
                w.len()
            )));
        }
        let mut val = vec![0i64; self.gates.len()];
        for &g in &self.topo {
            val[g] = match self.gates[g] {
                Gate::Input(_) => w[self.input_index[g] as usize],
                Gate::Const0 => 0,
                Gate::Ext(l, r) => self.flavor.pick(val[l], val[r]),
                Gate::Sum(l, r) => {
                    val[l].checked_add(val[r]).ok_or(Error::Overflow("circuit evaluation"))?
                }
            };
        }
        Ok(val)
    }

    pub fn extract_polynomial(&self, cap: usize) -> Result<Polynomial> {
        let polys = self.extract_gates(cap)?;
        Ok(polys.polynomial(self.output))
    }

    /// Monomial sets of every gate that reaches the output.
    pub fn extract_gates(&self, cap: usize) -> Result<GatePolys> {
        let live = self.reachable();
        let mut polys: Vec<Option<IndexPoly>> = vec![None; self.gates.len()];
        let mut slots = 0usize;
        for &g in &self.topo {
            if !live[g] {
                continue;
            }
            let p = match self.gates[g] {
                Gate::Input(_) => vec![vec![self.input_index[g]].into_boxed_slice()],
                Gate::Const0 => vec![Box::default()],
                Gate::Ext(l, r) => {
                    union_sorted(polys[l].as_ref().unwrap(), polys[r].as_ref().unwrap())
                }
                Gate::Sum(l, r) => {
                    product(polys[l].as_ref().unwrap(), polys[r].as_ref().unwrap(), cap)?
                }
            };
            slots += p.len();
            if slots > cap {
                return Err(Error::CapExceeded { cap });
            }
            polys[g] = Some(p);
        }
        Ok(GatePolys { universe: self.universe.clone(), polys })
    }

    /// True iff the circuit's polynomial has exactly the monomials of `p`.
    pub fn calculates(&self, p: &Polynomial, cap: usize) -> Result<bool> {
        let f = self.extract_polynomial(cap)?;
        if !f.is_multilinear() || !p.is_multilinear() {
            return Err(Error::NotMultilinear);
        }
        Ok(poly_equiv(&f, p))
    }

    /// Replaces each input gate according to `subst`, keeping gate ids.
    pub fn substitute(
        &self,
        universe: impl IntoIterator<Item = VariableId>,
        mut subst: impl FnMut(&VariableId) -> Substitution,
    ) -> Result<Circuit> {
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Input(x) => match subst(x) {
                    Substitution::Keep => Gate::Input(x.clone()),
                    Substitution::Var(y) => Gate::Input(y),
                    Substitution::Const0 => Gate::Const0,
                },
                other => other.clone(),
            })
            .collect();
        Circuit::new(gates, self.output, self.flavor, universe)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph circuit {\n  rankdir=BT;\n");
        for (i, g) in self.gates.iter().enumerate() {
            let label = match g {
                Gate::Input(x) => format!("{x}"),
                Gate::Const0 => "0".to_string(),
                Gate::Ext(..) => self.flavor.to_string(),
                Gate::Sum(..) => "+".to_string(),
            };
            let shape = if i == self.output { ", peripheries=2" } else { "" };
            let _ = writeln!(s, "  g{i} [label=\"{}\"{shape}];", label.replace('"', "\\\""));
        }
        for (i, g) in self.gates.iter().enumerate() {
            if let Some((l, r)) = g.children() {
                let _ = writeln!(s, "  g{l} -> g{i};\n  g{r} -> g{i};");
            }
        }
        s.push_str("}\n");
        s
    }
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = CircuitDoc::deserialize(d)?;
        Circuit::from_doc(&doc).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Substitution {
    Keep,
    Var(VariableId),
    Const0,
}

/// Per-gate monomial sets produced by [`Circuit::extract_gates`].
#[derive(Clone, Debug)]
pub struct GatePolys {
    universe: Vec<VariableId>,
    polys: Vec<Option<IndexPoly>>,
}

impl GatePolys {
    pub fn universe(&self) -> &[VariableId] {
        &self.universe
    }

    /// `None` for gates that do not reach the output.
    pub fn indexed(&self, g: GateId) -> Option<&IndexPoly> {
        self.polys[g].as_ref()
    }

    pub fn polynomial(&self, g: GateId) -> Polynomial {
        self.polys[g]
            .as_ref()
            .map(|p| p.iter().map(|m| to_monomial(m, &self.universe)).collect())
            .unwrap_or_default()
    }
}

pub fn to_monomial(m: &[u32], universe: &[VariableId]) -> Monomial {
    Monomial::from_pairs(m.iter().map(|&i| (universe[i as usize].clone(), 1)))
}

/// Indexes a monomial against a sorted universe. Fails if a variable is absent.
pub fn index_monomial(m: &Monomial, universe: &[VariableId]) -> Result<IndexMonomial> {
    let mut out = Vec::with_capacity(m.degree() as usize);
    for (x, e) in m.exponents() {
        let i = universe.binary_search(x).map_err(|_| Error::SupportNotInUniverse(x.clone()))?;
        out.extend(std::iter::repeat_n(i as u32, *e as usize));
    }
    Ok(out.into_boxed_slice())
}

pub fn union_sorted(a: &IndexPoly, b: &IndexPoly) -> IndexPoly {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn mul_monomials(a: &[u32], b: &[u32]) -> IndexMonomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out.into_boxed_slice()
}

/// `a / b` for sorted multisets, if `b` divides `a`.
pub fn div_monomials(a: &[u32], b: &[u32]) -> Option<IndexMonomial> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &x in a {
        if j < b.len() && b[j] == x {
            j += 1;
        } else if j < b.len() && b[j] < x {
            return None;
        } else {
            out.push(x);
        }
    }
    (j == b.len()).then(|| out.into_boxed_slice())
}

pub fn is_multilinear(m: &[u32]) -> bool {
    m.windows(2).all(|w| w[0] != w[1])
}

fn product(a: &IndexPoly, b: &IndexPoly, cap: usize) -> Result<IndexPoly> {
    if a.len().saturating_mul(b.len()) > cap.saturating_mul(4) {
        return Err(Error::CapExceeded { cap });
    }
    let mut out: Vec<IndexMonomial> = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(mul_monomials(x, y));
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn topological_order(gates: &[Gate]) -> Option<Vec<GateId>> {
    let n = gates.len();
    let mut indeg = vec![0usize; n];
    let mut users: Vec<Vec<GateId>> = vec![Vec::new(); n];
    for (i, g) in gates.iter().enumerate() {
        if let Some((l, r)) = g.children() {
            indeg[i] = 2;
            users[l].push(i);
            users[r].push(i);
        }
    }
    let mut order: Vec<GateId> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut head = 0;
    while head < order.len() {
        let g = order[head];
        head += 1;
        for &u in &users[g] {
            indeg[u] -= 1;
            if indeg[u] == 0 {
                order.push(u);
            }
        }
    }
    (order.len() == n).then_some(order)
}

fn reachable_from(gates: &[Gate], output: GateId) -> Vec<bool> {
    let mut seen = vec![false; gates.len()];
    let mut stack = vec![output];
    while let Some(g) = stack.pop() {
        if g >= gates.len() || seen[g] {
            continue;
        }
        seen[g] = true;
        if let Some((l, r)) = gates[g].children() {
            stack.push(l);
            stack.push(r);
        }
    }
    seen
}

/// Serialized circuit. Operand fields are optional so malformed input can be
/// diagnosed instead of rejected by the parser.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitDoc {
    pub flavor: Flavor,
    pub universe: Vec<VariableId>,
    pub gates: Vec<GateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<GateId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum GateDoc {
    Input {
        var: VariableId,
    },
    Const0,
    Ext {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<GateId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<GateId>,
    },
    Sum {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<GateId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<GateId>,
    },
}

impl CircuitDoc {
    fn from_parts(
        gates: &[Gate],
        output: Option<GateId>,
        flavor: Flavor,
        universe: &[VariableId],
    ) -> Self {
        CircuitDoc {
            flavor,
            universe: universe.to_vec(),
            gates: gates
                .iter()
                .map(|g| match *g {
                    Gate::Input(ref x) => GateDoc::Input { var: x.clone() },
                    Gate::Const0 => GateDoc::Const0,
                    Gate::Ext(l, r) => GateDoc::Ext { l: Some(l), r: Some(r) },
                    Gate::Sum(l, r) => GateDoc::Sum { l: Some(l), r: Some(r) },
                })
                .collect(),
            output,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    CycleDetected,
    BadFanin,
    BadReference,
    MissingOutput,
    UnknownVariable,
    UnreachableGate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateId>,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}: {}", self.code, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
    pub size: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has(&self, code: DiagnosticCode) -> bool {
        self.errors.iter().chain(&self.warnings).any(|d| d.code == code)
    }
}

pub fn validate_doc(doc: &CircuitDoc) -> ValidationReport {
    let n = doc.gates.len();
    let mut rep = ValidationReport { size: n, ..Default::default() };
    let mut err = |code, gate: Option<GateId>, message: String| {
        rep.errors.push(Diagnostic { code, gate, message });
    };
    let universe: BTreeSet<&VariableId> = doc.universe.iter().collect();

    // Structurally sound gates feed the cycle and reachability passes.
    let mut sound: Vec<Gate> = Vec::with_capacity(n);
    for (i, g) in doc.gates.iter().enumerate() {
        let gate = match g {
            GateDoc::Input { var } => {
                if !universe.contains(var) {
                    err(
                        DiagnosticCode::UnknownVariable,
                        Some(i),
                        format!("gate {i} reads `{var}`, which is not in the universe"),
                    );
                }
                Gate::Const0
            }
            GateDoc::Const0 => Gate::Const0,
            GateDoc::Ext { l, r } | GateDoc::Sum { l, r } => match (l, r) {
                (Some(l), Some(r)) if *l < n && *r < n => Gate::Ext(*l, *r),
                (Some(l), Some(r)) => {
                    err(
                        DiagnosticCode::BadReference,
                        Some(i),
                        format!("gate {i} references {} which does not exist", if *l >= n { l } else { r }),
                    );
                    Gate::Const0
                }
                _ => {
                    err(DiagnosticCode::BadFanin, Some(i), format!("gate {i} needs exactly two operands"));
                    Gate::Const0
                }
            },
        };
        sound.push(gate);
    }
    if topological_order(&sound).is_none() {
        let cyclic = cyclic_gates(&sound);
        err(
            DiagnosticCode::CycleDetected,
            cyclic.first().copied(),
            format!("gates {cyclic:?} lie on or behind a cycle"),
        );
    }
    match doc.output {
        Some(o) if o < n => {
            let live = reachable_from(&sound, o);
            for (i, l) in live.iter().enumerate() {
                if !l {
                    rep.warnings.push(Diagnostic {
                        code: DiagnosticCode::UnreachableGate,
                        gate: Some(i),
                        message: format!("gate {i} does not reach the output"),
                    });
                }
            }
        }
        Some(o) => err(DiagnosticCode::MissingOutput, None, format!("output gate {o} does not exist")),
        None => err(DiagnosticCode::MissingOutput, None, "no output gate designated".to_string()),
    }
    rep
}

fn cyclic_gates(gates: &[Gate]) -> Vec<GateId> {
    let order = {
        let mut indeg = vec![0usize; gates.len()];
        let mut users: Vec<Vec<GateId>> = vec![Vec::new(); gates.len()];
        for (i, g) in gates.iter().enumerate() {
            if let Some((l, r)) = g.children() {
                indeg[i] = 2;
                users[l].push(i);
                users[r].push(i);
            }
        }
        let mut done = vec![false; gates.len()];
        let mut stack: Vec<GateId> = (0..gates.len()).filter(|&i| indeg[i] == 0).collect();
        while let Some(g) = stack.pop() {
            done[g] = true;
            for &u in &users[g] {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    stack.push(u);
                }
            }
        }
        done
    };
    (0..gates.len()).filter(|&i| !order[i]).collect()
}

/// Incremental circuit construction with memoized input and constant gates.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    flavor: Flavor,
    gates: Vec<Gate>,
    inputs: HashMap<VariableId, GateId>,
    zero: Option<GateId>,
}

impl CircuitBuilder {
    pub fn new(flavor: Flavor) -> Self {
        CircuitBuilder { flavor, gates: Vec::new(), inputs: HashMap::new(), zero: None }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn input(&mut self, x: impl Into<VariableId>) -> GateId {
        let x = x.into();
        if let Some(&g) = self.inputs.get(&x) {
            return g;
        }
        let g = self.push(Gate::Input(x.clone()));
        self.inputs.insert(x, g);
        g
    }

    pub fn const0(&mut self) -> GateId {
        if let Some(g) = self.zero {
            return g;
        }
        let g = self.push(Gate::Const0);
        self.zero = Some(g);
        g
    }

    pub fn ext(&mut self, l: GateId, r: GateId) -> GateId {
        self.push(Gate::Ext(l, r))
    }

    pub fn sum(&mut self, l: GateId, r: GateId) -> GateId {
        self.push(Gate::Sum(l, r))
    }

    /// Extremum over a nonempty list, as a left fold.
    pub fn ext_all(&mut self, gs: impl IntoIterator<Item = GateId>) -> Option<GateId> {
        gs.into_iter().reduce(|a, b| self.ext(a, b))
    }

    /// Pushes a raw gate without memoization.
    pub fn push(&mut self, g: Gate) -> GateId {
        self.gates.push(g);
        self.gates.len() - 1
    }

    /// Finishes with the universe set to the variables actually read.
    pub fn finish(self, output: GateId) -> Circuit {
        let universe: Vec<VariableId> = self.inputs.keys().cloned().collect();
        self.finish_with_universe(output, universe).expect("builder emits valid circuits")
    }

    pub fn finish_with_universe(
        self,
        output: GateId,
        universe: impl IntoIterator<Item = VariableId>,
    ) -> Result<Circuit> {
        Circuit::new(self.gates, output, self.flavor, universe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(pairs: &[(&str, i64)]) -> Valuation {
        pairs.iter().map(|&(k, v)| (k, v)).collect()
    }

    fn mono(vars: &[&str]) -> Monomial {
        Monomial::product_of(vars.iter().copied())
    }

    #[test]
    fn evaluation_examples() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let (x, y) = (b.input("x"), b.input("y"));
        let m = b.ext(x, y);
        assert_eq!(b.finish(m).evaluate(&val(&[("x", 3), ("y", 5)])).unwrap(), 5);

        let mut b = CircuitBuilder::new(Flavor::MinPlus);
        let z = b.const0();
        assert_eq!(b.finish(z).evaluate(&Valuation::new()).unwrap(), 0);

        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let (x, y) = (b.input("x"), b.input("y"));
        let s = b.sum(x, y);
        assert_eq!(b.finish(s).evaluate(&val(&[("x", 2), ("y", -7)])).unwrap(), -5);
    }

    #[test]
    fn missing_weight_is_reported() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let x = b.input("x");
        let c = b.finish(x);
        assert!(matches!(c.evaluate(&val(&[("y", 1)])), Err(Error::MissingVariable(_))));
    }

    #[test]
    fn extraction_examples() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let (x, y, z) = (b.input("x"), b.input("y"), b.input("z"));
        let xy = b.sum(x, y);
        let out = b.ext(xy, z);
        let c = b.finish(out);
        let p = c.extract_polynomial(DEFAULT_CAP).unwrap();
        assert_eq!(p, Polynomial::from_monomials([mono(&["x", "y"]), mono(&["z"])]));

        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let x = b.input("x");
        let sq = b.sum(x, x);
        let p = b.finish(sq).extract_polynomial(DEFAULT_CAP).unwrap();
        assert_eq!(p, Polynomial::from_monomials([Monomial::from_pairs([("x", 2)])]));
    }

    #[test]
    fn cap_is_enforced() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let mut acc = b.const0();
        for i in 0..12 {
            let x = b.input(format!("x{i}"));
            let z = b.const0();
            let choice = b.ext(x, z);
            acc = b.sum(acc, choice);
        }
        let c = b.finish(acc);
        assert_eq!(c.extract_polynomial(DEFAULT_CAP).unwrap().len(), 4096);
        let err = c.extract_polynomial(1000).unwrap_err();
        assert!(err.is_scale());
    }

    #[test]
    fn calculates_examples() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let x = b.input("x");
        let out = b.ext(x, x);
        let c = b.finish(out);
        assert!(c.calculates(&Polynomial::from_monomials([mono(&["x"])]), DEFAULT_CAP).unwrap());

        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let (x, y) = (b.input("x"), b.input("y"));
        let out = b.sum(x, y);
        let c = b.finish(out);
        assert!(!c.calculates(&Polynomial::from_monomials([mono(&["x"])]), DEFAULT_CAP).unwrap());

        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let x = b.input("x");
        let out = b.sum(x, x);
        let c = b.finish(out);
        let p = Polynomial::from_monomials([Monomial::from_pairs([("x", 2)])]);
        assert!(matches!(c.calculates(&p, DEFAULT_CAP), Err(Error::NotMultilinear)));
    }

    fn doc(gates: Vec<GateDoc>, output: Option<usize>) -> CircuitDoc {
        CircuitDoc { flavor: Flavor::MaxPlus, universe: vec!["x".into(), "y".into()], gates, output }
    }

    #[test]
    fn validation_diagnostics() {
        let ok = doc(vec![GateDoc::Input { var: "x".into() }], Some(0));
        assert!(validate_doc(&ok).is_valid());

        let selfloop = doc(vec![GateDoc::Ext { l: Some(0), r: Some(0) }], Some(0));
        let rep = validate_doc(&selfloop);
        assert!(rep.has(DiagnosticCode::CycleDetected));

        let fanin = doc(
            vec![GateDoc::Input { var: "x".into() }, GateDoc::Ext { l: Some(0), r: None }],
            Some(1),
        );
        assert!(validate_doc(&fanin).has(DiagnosticCode::BadFanin));

        let unknown = doc(vec![GateDoc::Input { var: "q".into() }], Some(0));
        assert!(validate_doc(&unknown).has(DiagnosticCode::UnknownVariable));

        let no_out = doc(vec![GateDoc::Const0], None);
        assert!(validate_doc(&no_out).has(DiagnosticCode::MissingOutput));
        let bad_out = doc(vec![GateDoc::Const0], Some(3));
        assert!(validate_doc(&bad_out).has(DiagnosticCode::MissingOutput));

        let dead = doc(vec![GateDoc::Input { var: "x".into() }, GateDoc::Input { var: "y".into() }], Some(0));
        let rep = validate_doc(&dead);
        assert!(rep.is_valid());
        assert!(rep.has(DiagnosticCode::UnreachableGate));
        assert_eq!(rep.size, 2);
    }

    #[test]
    fn out_of_order_gates_are_accepted() {
        let d = doc(
            vec![
                GateDoc::Sum { l: Some(1), r: Some(2) },
                GateDoc::Input { var: "x".into() },
                GateDoc::Input { var: "y".into() },
            ],
            Some(0),
        );
        let c = Circuit::from_doc(&d).unwrap();
        assert_eq!(c.evaluate(&val(&[("x", 4), ("y", 6)])).unwrap(), 10);
    }

    #[test]
    fn json_round_trip() {
        let mut b = CircuitBuilder::new(Flavor::MinPlus);
        let (x, y) = (b.input("x"), b.input("y"));
        let s = b.sum(x, y);
        let z = b.const0();
        let out = b.ext(s, z);
        let c = b.finish(out);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains(r#"{"op":"ext","l":2,"r":3}"#));
        let back: Circuit = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        let v = val(&[("x", -3), ("y", 1)]);
        assert_eq!(back.evaluate(&v).unwrap(), c.evaluate(&v).unwrap());
    }

    #[test]
    fn substitution_keeps_size() {
        let mut b = CircuitBuilder::new(Flavor::MinPlus);
        let (x, y) = (b.input("x"), b.input("y"));
        let out = b.sum(x, y);
        let c = b.finish(out);
        let d = c
            .substitute(["z".into()], |v| {
                if v.as_str() == "x" {
                    Substitution::Const0
                } else {
                    Substitution::Var("z".into())
                }
            })
            .unwrap();
        assert_eq!(d.size(), c.size());
        assert_eq!(d.extract_polynomial(DEFAULT_CAP).unwrap(), Polynomial::from_monomials([mono(&["z"])]));
    }

    #[test]
    fn dot_mentions_every_gate() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let (x, y) = (b.input("x"), b.input("y"));
        let out = b.ext(x, y);
        let dot = b.finish(out).to_dot();
        assert!(dot.contains("g2 [label=\"max\", peripheries=2]"));
        assert!(dot.contains("g0 -> g2"));
    }

    #[test]
    fn index_helpers() {
        assert_eq!(&*mul_monomials(&[0, 2], &[1, 2]), &[0, 1, 2, 2]);
        assert_eq!(div_monomials(&[0, 1, 2], &[1]).as_deref(), Some(&[0u32, 2][..]));
        assert!(div_monomials(&[0, 2], &[1]).is_none());
        assert!(is_multilinear(&[0, 1, 5]) && !is_multilinear(&[1, 1]));
    }
}
