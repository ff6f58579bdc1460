//! Permutations of `{0, .., n-1}`, cycle types and class enumeration.
//!
//! Internally images are 0-based; JSON and cycle notation are 1-based.
//! Composition applies the right factor first: `compose(a, b)(x) = a(b(x))`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest domain accepted by enumeration routines.
pub const MAX_DOMAIN: usize = 14;

/// Largest class that [`enumerate_class`] materializes.
pub const MAX_MATERIALIZED: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n as u8).collect() }
    }

    /// From 0-based images.
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        if n > u8::MAX as usize {
            return Err(Error::InvalidPermutation(format!("domain {n} is too large")));
        }
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based images.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let mut v = Vec::with_capacity(images.len());
        for &x in images {
            if x == 0 || x > images.len() {
                return Err(Error::InvalidPermutation(format!("image {x} out of range")));
            }
            v.push((x - 1) as u8);
        }
        Permutation::new(v)
    }

    /// From 1-based cycles; unmentioned points are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (1..=n).collect();
        let mut touched = vec![false; n + 1];
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x == 0 || x > n || touched[x] {
                    return Err(Error::InvalidPermutation(format!("bad cycle {c:?}")));
                }
                touched[x] = true;
                images[x - 1] = c[(i + 1) % c.len()];
            }
        }
        Permutation::from_one_based(&images)
    }

    pub(crate) fn from_images_unchecked(images: Vec<u8>) -> Self {
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Permutation { images: inv }
    }

    /// 0-based cycles, each starting at its least element, ordered by that
    /// element. Fixed points are included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = self.images[x] as usize;
            }
            out.push(c);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.cycles().iter().map(Vec::len).collect())
    }

    pub fn is_single_cycle(&self) -> bool {
        let n = self.images.len();
        if n == 0 {
            return false;
        }
        let mut x = self.images[0] as usize;
        let mut len = 1;
        while x != 0 {
            x = self.images[x] as usize;
            len += 1;
        }
        len == n
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
        let mut images: Vec<u8> = (0..n as u8).collect();
        images.shuffle(rng);
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation without fixed points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            f.write_str("(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_based(&v).map_err(serde::de::Error::custom)
    }
}

pub fn compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    if a.len() != b.len() {
        return Err(Error::DomainMismatch(a.len(), b.len()));
    }
    Ok(Permutation { images: b.images.iter().map(|&x| a.images[x as usize]).collect() })
}

/// `π⁻¹ ρ π`.
pub fn conjugate(rho: &Permutation, pi: &Permutation) -> Result<Permutation> {
    if rho.len() != pi.len() {
        return Err(Error::DomainMismatch(rho.len(), pi.len()));
    }
    let inv = pi.inverse();
    Ok(Permutation {
        images: pi.images.iter().map(|&x| inv.images[rho.images[x as usize] as usize]).collect(),
    })
}

/// Product of a sequence, applied right to left: `product([a, b, c]) = a b c`.
pub fn product(n: usize, factors: &[&Permutation]) -> Result<Permutation> {
    let mut acc = Permutation::identity(n);
    for p in factors.iter().rev() {
        acc = compose(p, &acc)?;
    }
    Ok(acc)
}

/// Multiset of cycle lengths, stored in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleType {
    sizes: Vec<usize>,
}

impl CycleType {
    pub fn new(mut sizes: Vec<usize>) -> Self {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { sizes }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn domain(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Size of the centralizer of any permutation of this type:
    /// `∏ m_i! · i^{m_i}` where `m_i` counts cycles of length `i`.
    pub fn centralizer_order(&self) -> u128 {
        let mut out = 1u128;
        let mut i = 0;
        while i < self.sizes.len() {
            let len = self.sizes[i];
            let mut m = 0;
            while i < self.sizes.len() && self.sizes[i] == len {
                m += 1;
                i += 1;
            }
            out *= factorial(m) * (len as u128).pow(m as u32);
        }
        out
    }

    /// Number of permutations of this type.
    pub fn class_size(&self) -> u128 {
        factorial(self.domain()) / self.centralizer_order()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.sizes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassSpec {
    /// One cycle through the whole domain.
    SingleCycle,
    /// Fixed-point-free involutions of an even domain.
    AllTwoCycles,
    /// Exactly two cycles of equal length on an even domain.
    TwoKCycles,
    Explicit(CycleType),
}

impl ClassSpec {
    pub fn cycle_type(&self, n: usize) -> Result<CycleType> {
        match self {
            ClassSpec::SingleCycle if n >= 1 => Ok(CycleType::new(vec![n])),
            ClassSpec::SingleCycle => Err(Error::InvalidSpec("empty domain".into())),
            ClassSpec::AllTwoCycles | ClassSpec::TwoKCycles if n == 0 || n % 2 == 1 => {
                Err(Error::InvalidSpec(format!("class needs an even positive domain, got {n}")))
            }
            ClassSpec::AllTwoCycles => Ok(CycleType::new(vec![2; n / 2])),
            ClassSpec::TwoKCycles => Ok(CycleType::new(vec![n / 2; 2])),
            ClassSpec::Explicit(t) if t.domain() == n && t.sizes.iter().all(|&s| s > 0) => {
                Ok(t.clone())
            }
            ClassSpec::Explicit(t) => {
                Err(Error::InvalidSpec(format!("cycle type {t} does not partition {n}")))
            }
        }
    }

    pub fn contains(&self, rho: &Permutation) -> bool {
        match self {
            ClassSpec::SingleCycle => rho.is_single_cycle(),
            _ => self.cycle_type(rho.len()).is_ok_and(|t| t == rho.cycle_type()),
        }
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// `n!!`, with `0!! = 1`.
pub fn double_factorial(n: usize) -> u128 {
    (1..=n as u128).rev().step_by(2).product()
}

/// Calls `f` on every permutation of the given type, in generation order
/// (not sorted).
pub fn for_each_of_type(t: &CycleType, mut f: impl FnMut(&[u8])) {
    let n = t.domain();
    let mut images = vec![u8::MAX; n];
    let mut remaining: Vec<(usize, usize)> = Vec::new();
    for &s in t.sizes() {
        match remaining.last_mut() {
            Some((len, m)) if *len == s => *m += 1,
            _ => remaining.push((s, 1)),
        }
    }
    let mut cycle = Vec::with_capacity(n);
    fill_cycles(&mut images, &mut remaining, &mut cycle, &mut f);
}

fn fill_cycles(
    images: &mut [u8],
    remaining: &mut [(usize, usize)],
    cycle: &mut Vec<usize>,
    f: &mut impl FnMut(&[u8]),
) {
    let Some(start) = images.iter().position(|&x| x == u8::MAX) else {
        f(images);
        return;
    };
    for t in 0..remaining.len() {
        if remaining[t].1 == 0 {
            continue;
        }
        remaining[t].1 -= 1;
        let len = remaining[t].0;
        cycle.clear();
        cycle.push(start);
        // Mark start as used while choosing the rest of its cycle.
        images[start] = start as u8;
        extend_cycle(images, remaining, cycle, len, f);
        images[start] = u8::MAX;
        remaining[t].1 += 1;
    }
}

fn extend_cycle(
    images: &mut [u8],
    remaining: &mut [(usize, usize)],
    cycle: &mut Vec<usize>,
    len: usize,
    f: &mut impl FnMut(&[u8]),
) {
    if cycle.len() == len {
        let saved: Vec<usize> = cycle.clone();
        for i in 0..len {
            images[saved[i]] = saved[(i + 1) % len] as u8;
        }
        fill_cycles(images, remaining, cycle, f);
        for &x in &saved[1..] {
            images[x] = u8::MAX;
        }
        images[saved[0]] = saved[0] as u8;
        cycle.clear();
        cycle.extend_from_slice(&saved);
        return;
    }
    for x in cycle[0] + 1..images.len() {
        if images[x] != u8::MAX {
            continue;
        }
        images[x] = x as u8;
        cycle.push(x);
        extend_cycle(images, remaining, cycle, len, f);
        cycle.pop();
        images[x] = u8::MAX;
    }
}

/// All permutations of a class, sorted lexicographically by image sequence.
pub fn enumerate_class(n: usize, spec: &ClassSpec) -> Result<Vec<Permutation>> {
    let t = spec.cycle_type(n)?;
    if n > MAX_DOMAIN {
        return Err(Error::ScaleExceeded(format!("domain {n} exceeds {MAX_DOMAIN}")));
    }
    let size = t.class_size();
    if size > MAX_MATERIALIZED {
        return Err(Error::ScaleExceeded(format!("class of size {size} is too large to list")));
    }
    let mut out = Vec::with_capacity(size as usize);
    for_each_of_type(&t, |img| out.push(Permutation::from_images_unchecked(img.to_vec())));
    out.sort_unstable();
    Ok(out)
}

/// All of `S_n` in lexicographic order.
pub fn enumerate_all(n: usize) -> Result<Vec<Permutation>> {
    if factorial(n) > MAX_MATERIALIZED {
        return Err(Error::ScaleExceeded(format!("S_{n} is too large to list")));
    }
    let mut cur: Vec<u8> = (0..n as u8).collect();
    let mut out = vec![Permutation::from_images_unchecked(cur.clone())];
    while next_permutation(&mut cur) {
        out.push(Permutation::from_images_unchecked(cur.clone()));
    }
    Ok(out)
}

/// Advances to the next permutation in lexicographic order.
pub fn next_permutation(a: &mut [u8]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let Some(i) = (0..a.len() - 1).rev().find(|&i| a[i] < a[i + 1]) else {
        return false;
    };
    let j = (i + 1..a.len()).rev().find(|&j| a[j] > a[i]).unwrap();
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// Number of `π` with `π⁻¹ ρ1 π = ρ2`.
pub fn count_conjugators(rho1: &Permutation, rho2: &Permutation) -> Result<u128> {
    if rho1.len() != rho2.len() {
        return Err(Error::DomainMismatch(rho1.len(), rho2.len()));
    }
    let t = rho1.cycle_type();
    if t != rho2.cycle_type() {
        return Ok(0);
    }
    Ok(t.centralizer_order())
}

/// Number of fixed-point-free involutions `ρ2` with `ρ2 ρ1` made of two
/// equal cycles, by enumeration.
pub fn count_completions(rho1: &Permutation) -> Result<u128> {
    if !ClassSpec::AllTwoCycles.contains(rho1) {
        return Err(Error::NotInClass);
    }
    let n = rho1.len();
    let two = ClassSpec::AllTwoCycles.cycle_type(n)?;
    let target = ClassSpec::TwoKCycles.cycle_type(n)?;
    let mut count = 0u128;
    let mut prod = vec![0u8; n];
    for_each_of_type(&two, |rho2| {
        for (x, p) in prod.iter_mut().enumerate() {
            *p = rho2[rho1.images[x] as usize];
        }
        if Permutation::from_images_unchecked(prod.clone()).cycle_type() == target {
            count += 1;
        }
    });
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn composition_examples() {
        let s = p(4, &[&[1, 3, 2]]);
        assert_eq!(compose(&Permutation::identity(4), &s).unwrap(), s);
        let t = p(2, &[&[1, 2]]);
        assert!(compose(&t, &t).unwrap().is_identity());
        let a = p(4, &[&[1, 3], &[2, 4]]);
        let b = p(4, &[&[1, 2], &[3, 4]]);
        assert_eq!(compose(&a, &b).unwrap(), p(4, &[&[1, 4], &[2, 3]]));
        assert!(matches!(compose(&t, &s), Err(Error::DomainMismatch(2, 4))));
    }

    #[test]
    fn conjugation_examples() {
        let pi = p(3, &[&[1, 2]]);
        assert!(conjugate(&Permutation::identity(3), &pi).unwrap().is_identity());
        let r = conjugate(&p(3, &[&[1, 2, 3]]), &pi).unwrap();
        assert_eq!(r, p(3, &[&[1, 3, 2]]));
        assert_eq!(r.to_string(), "(1 3 2)");
    }

    #[test]
    fn cycle_types() {
        assert_eq!(Permutation::identity(3).cycle_type().sizes(), &[1, 1, 1]);
        assert_eq!(p(3, &[&[1, 2]]).cycle_type().sizes(), &[2, 1]);
        assert_eq!(p(4, &[&[1, 2, 3, 4]]).cycle_type().sizes(), &[4]);
    }

    #[test]
    fn class_sizes() {
        assert_eq!(enumerate_class(4, &ClassSpec::SingleCycle).unwrap().len(), 6);
        assert_eq!(enumerate_class(6, &ClassSpec::AllTwoCycles).unwrap().len(), 15);
        assert_eq!(enumerate_class(6, &ClassSpec::TwoKCycles).unwrap().len(), 40);
        assert!(matches!(enumerate_class(5, &ClassSpec::AllTwoCycles), Err(Error::InvalidSpec(_))));
        let bad = ClassSpec::Explicit(CycleType::new(vec![2, 2]));
        assert!(matches!(enumerate_class(5, &bad), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn class_enumeration_is_sorted_and_matches_filter() {
        let all = enumerate_all(6).unwrap();
        for spec in [ClassSpec::SingleCycle, ClassSpec::AllTwoCycles, ClassSpec::TwoKCycles] {
            let listed = enumerate_class(6, &spec).unwrap();
            let filtered: Vec<_> = all.iter().filter(|q| spec.contains(q)).cloned().collect();
            assert_eq!(listed, filtered);
        }
    }

    #[test]
    fn conjugator_counts() {
        let t = p(3, &[&[1, 2]]);
        assert_eq!(count_conjugators(&t, &t).unwrap(), 2);
        let brute = enumerate_all(3)
            .unwrap()
            .iter()
            .filter(|pi| conjugate(&t, pi).unwrap() == t)
            .count();
        assert_eq!(brute, 2);
        assert_eq!(count_conjugators(&p(3, &[&[1, 2, 3]]), &Permutation::identity(3)).unwrap(), 0);
        let id = Permutation::identity(4);
        assert_eq!(count_conjugators(&id, &id).unwrap(), 24);
    }

    #[test]
    fn completion_counts() {
        assert_eq!(count_completions(&p(4, &[&[1, 2], &[3, 4]])).unwrap(), 2);
        for rho in enumerate_class(6, &ClassSpec::AllTwoCycles).unwrap() {
            assert_eq!(count_completions(&rho).unwrap(), 8);
        }
        // On [2] the two-equal-cycles class is {id}, and (1 2)(1 2) = id.
        assert_eq!(count_completions(&p(2, &[&[1, 2]])).unwrap(), 1);
        assert!(matches!(count_completions(&p(4, &[&[1, 2]])), Err(Error::NotInClass)));
    }

    #[test]
    fn factorials() {
        assert_eq!(double_factorial(0), 1);
        assert_eq!(double_factorial(5), 15);
        assert_eq!(double_factorial(6), 48);
        assert_eq!(factorial(5), 120);
    }

    #[test]
    fn json_is_one_based() {
        let q = p(3, &[&[1, 2, 3]]);
        assert_eq!(serde_json::to_string(&q).unwrap(), "[2,3,1]");
        let back: Permutation = serde_json::from_str("[2,3,1]").unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<Permutation>("[1,1,2]").is_err());
    }

    fn perm_pair(n: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
        let one = Just((0..n as u8).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap());
        (one.clone(), one)
    }

    proptest! {
        #[test]
        fn conjugation_preserves_type((rho, pi) in perm_pair(5)) {
            prop_assert_eq!(conjugate(&rho, &pi).unwrap().cycle_type(), rho.cycle_type());
        }

        #[test]
        fn inverse_composes_to_identity((rho, _pi) in perm_pair(7)) {
            prop_assert!(compose(&rho, &rho.inverse()).unwrap().is_identity());
        }

        #[test]
        fn product_is_associative((a, b) in perm_pair(6), c in perm_pair(6).prop_map(|x| x.0)) {
            let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
            let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(product(6, &[&a, &b, &c]).unwrap(), left);
        }
    }
}
