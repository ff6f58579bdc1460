//! Tropical monomials and polynomials.
//!
//! A polynomial is a set of monomials; repeated monomials collapse, so
//! `x + x` and `x` are the same value. Evaluation under a [`Flavor`] turns
//! the polynomial sum into max or min and the product into integer addition.
//! All arithmetic is checked `i64`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of one input weight. Ordered lexicographically by its string form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: impl Into<String>) -> Self {
        VariableId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VariableId {
    fn from(s: &str) -> Self {
        VariableId(s.to_string())
    }
}

impl From<String> for VariableId {
    fn from(s: String) -> Self {
        VariableId(s)
    }
}

/// Which extremum plays the role of polynomial addition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "max")]
    MaxPlus,
    #[serde(rename = "min")]
    MinPlus,
}

impl Flavor {
    pub fn pick(self, a: i64, b: i64) -> i64 {
        match self {
            Flavor::MaxPlus => a.max(b),
            Flavor::MinPlus => a.min(b),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::MaxPlus => f.write_str("max"),
            Flavor::MinPlus => f.write_str("min"),
        }
    }
}

/// A product of variables with positive exponents, kept sorted by variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exps: Vec<(VariableId, u32)>,
}

impl Monomial {
    /// The empty product (tropical constant 0).
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(x: impl Into<VariableId>) -> Self {
        Monomial { exps: vec![(x.into(), 1)] }
    }

    /// Builds a monomial from `(variable, exponent)` pairs. Repeated
    /// variables add up; zero exponents are dropped.
    pub fn from_pairs<I, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (V, u32)>,
        V: Into<VariableId>,
    {
        let mut map: BTreeMap<VariableId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *map.entry(v.into()).or_insert(0) += e;
            }
        }
        Monomial { exps: map.into_iter().collect() }
    }

    /// Multilinear monomial over the given variables.
    pub fn product_of<I, V>(vars: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<VariableId>,
    {
        Monomial::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn exponents(&self) -> &[(VariableId, u32)] {
        &self.exps
    }

    pub fn exponent(&self, x: &VariableId) -> u32 {
        self.exps
            .binary_search_by(|(v, _)| v.cmp(x))
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|(_, e)| e).sum()
    }

    pub fn support(&self) -> impl Iterator<Item = &VariableId> + '_ {
        self.exps.iter().map(|(v, _)| v)
    }

    pub fn support_len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_multilinear(&self) -> bool {
        self.exps.iter().all(|&(_, e)| e == 1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (a, b) = (&self.exps[i], &other.exps[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0.clone(), a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Monomial { exps: out }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.exps.len());
        let mut j = 0;
        for (v, e) in &self.exps {
            if j < other.exps.len() && other.exps[j].0 == *v {
                let d = other.exps[j].1;
                if d > *e {
                    return None;
                }
                if d < *e {
                    out.push((v.clone(), e - d));
                }
                j += 1;
            } else if j < other.exps.len() && other.exps[j].0 < *v {
                return None;
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.exps.len() {
            return None;
        }
        Some(Monomial { exps: out })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (i, (v, e)) in self.exps.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A set of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    monomials: BTreeSet<Monomial>,
}

impl Polynomial {
    pub fn new() -> Self {
        Polynomial::default()
    }

    pub fn from_monomials(ms: impl IntoIterator<Item = Monomial>) -> Self {
        Polynomial { monomials: ms.into_iter().collect() }
    }

    pub fn insert(&mut self, m: Monomial) -> bool {
        self.monomials.insert(m)
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.monomials.contains(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.monomials.iter()
    }

    pub fn support(&self) -> BTreeSet<VariableId> {
        self.monomials.iter().flat_map(|m| m.support().cloned()).collect()
    }

    pub fn is_multilinear(&self) -> bool {
        self.monomials.iter().all(Monomial::is_multilinear)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.monomials.iter().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Tropical sum: union of monomial sets.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        Polynomial { monomials: self.monomials.union(&other.monomials).cloned().collect() }
    }

    /// Tropical product: all pairwise monomial products.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = BTreeSet::new();
        for a in &self.monomials {
            for b in &other.monomials {
                out.insert(a.mul(b));
            }
        }
        Polynomial { monomials: out }
    }
}

impl FromIterator<Monomial> for Polynomial {
    fn from_iter<T: IntoIterator<Item = Monomial>>(iter: T) -> Self {
        Polynomial::from_monomials(iter)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return f.write_str("∅");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialDoc {
    variables: Vec<VariableId>,
    monomials: Vec<Vec<(VariableId, u32)>>,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialDoc {
            variables: self.support().into_iter().collect(),
            monomials: self.monomials.iter().map(|m| m.exps.clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PolynomialDoc::deserialize(d)?;
        let declared: BTreeSet<_> = doc.variables.into_iter().collect();
        let mut p = Polynomial::new();
        for pairs in doc.monomials {
            if let Some((v, _)) = pairs.iter().find(|(v, _)| !declared.contains(v)) {
                return Err(serde::de::Error::custom(format!(
                    "monomial uses undeclared variable `{v}`"
                )));
            }
            p.insert(Monomial::from_pairs(pairs));
        }
        Ok(p)
    }
}

/// Integer weights for a finite set of variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation {
    values: BTreeMap<VariableId, i64>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn set(&mut self, x: impl Into<VariableId>, value: i64) {
        self.values.insert(x.into(), value);
    }

    pub fn get(&self, x: &VariableId) -> Result<i64> {
        self.values.get(x).copied().ok_or_else(|| Error::MissingVariable(x.clone()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VariableId, i64)> + '_ {
        self.values.iter().map(|(k, v)| (k, *v))
    }

    /// Independent uniform weights in `lo..=hi` for each variable.
    pub fn random<R: rand::Rng + ?Sized>(
        vars: impl IntoIterator<Item = VariableId>,
        lo: i64,
        hi: i64,
        rng: &mut R,
    ) -> Self {
        vars.into_iter().map(|x| (x, rng.random_range(lo..=hi))).collect()
    }
}

impl<V: Into<VariableId>> FromIterator<(V, i64)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (V, i64)>>(iter: T) -> Self {
        Valuation { values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }
}

pub fn eval_monomial(m: &Monomial, v: &Valuation) -> Result<i64> {
    m.exps.iter().try_fold(0i64, |acc, (x, e)| {
        let term = v.get(x)?.checked_mul(i64::from(*e)).ok_or(Error::Overflow("monomial evaluation"))?;
        acc.checked_add(term).ok_or(Error::Overflow("monomial evaluation"))
    })
}

pub fn eval_poly(p: &Polynomial, v: &Valuation, flavor: Flavor) -> Result<i64> {
    let mut best: Option<i64> = None;
    for m in &p.monomials {
        let val = eval_monomial(m, v)?;
        best = Some(best.map_or(val, |b| flavor.pick(b, val)));
    }
    best.ok_or(Error::EmptyPolynomial)
}

/// The valuation that is `1` on the support of `m` and `-1` elsewhere in
/// `universe`.
pub fn characteristic_valuation<'a>(
    m: &Monomial,
    universe: impl IntoIterator<Item = &'a VariableId>,
) -> Result<Valuation> {
    let universe: BTreeSet<&VariableId> = universe.into_iter().collect();
    if let Some(x) = m.support().find(|x| !universe.contains(x)) {
        return Err(Error::SupportNotInUniverse(x.clone()));
    }
    Ok(universe
        .into_iter()
        .map(|x| (x.clone(), if m.exponent(x) > 0 { 1 } else { -1 }))
        .collect())
}

pub fn poly_subset(p: &Polynomial, q: &Polynomial) -> bool {
    p.monomials.is_subset(&q.monomials)
}

/// Exact set equality of monomials (`p ≃ q`).
pub fn poly_equiv(p: &Polynomial, q: &Polynomial) -> bool {
    p.monomials == q.monomials
}
