//! Sparse multivariate polynomials and monomial orders.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::field::{Embedding, FieldElement, FieldSpec};
use crate::upoly::UPoly;

pub type Exps = SmallVec<[u32; 8]>;

/// Exponent vector; the derived order is lex with variable 0 most significant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(pub Exps);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize, e: u32) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = e;
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    Lex,
    DegRevLex,
}

/// A monomial order with a variable priority: `priority[0]` is the most
/// significant variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub priority: Vec<usize>,
}

impl MonomialOrder {
    pub fn lex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::Lex, priority: (0..nvars).collect() }
    }

    pub fn degrevlex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::DegRevLex, priority: (0..nvars).collect() }
    }

    pub fn lex_with(priority: Vec<usize>) -> Self {
        MonomialOrder { kind: OrderKind::Lex, priority }
    }

    pub fn degrevlex_with(priority: Vec<usize>) -> Self {
        MonomialOrder { kind: OrderKind::DegRevLex, priority }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.priority {
                    match a.0[v].cmp(&b.0[v]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            OrderKind::DegRevLex => {
                match a.degree().cmp(&b.degree()) {
                    Ordering::Equal => {}
                    o => return o,
                }
                for &v in self.priority.iter().rev() {
                    match a.0[v].cmp(&b.0[v]) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }
        }
    }
}

struct RingInner {
    field: FieldSpec,
    vars: Vec<String>,
}

/// Coefficient field plus an ordered variable table.
#[derive(Clone)]
pub struct PolyRing(Arc<RingInner>);

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.field == other.0.field && self.0.vars == other.0.vars)
    }
}

impl fmt::Debug for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.0.field, self.0.vars.join(","))
    }
}

impl PolyRing {
    pub fn new<S: AsRef<str>>(field: &FieldSpec, vars: &[S]) -> Self {
        let vars = vars.iter().map(|s| s.as_ref().to_string()).collect();
        PolyRing(Arc::new(RingInner { field: field.clone(), vars }))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.0.field
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn var(&self, i: usize) -> MPoly {
        MPoly::monomial(self, Monomial::var(self.nvars(), i, 1), self.field().one())
    }

    pub fn var_named(&self, name: &str) -> MPoly {
        self.var(self.index_of(name).unwrap_or_else(|| panic!("unknown variable {name}")))
    }

    pub fn constant(&self, c: FieldElement) -> MPoly {
        MPoly::monomial(self, Monomial::one(self.nvars()), c)
    }

    pub fn int(&self, c: i64) -> MPoly {
        self.constant(self.field().from_i64(c))
    }

    pub fn zero(&self) -> MPoly {
        MPoly { ring: self.clone(), terms: Vec::new() }
    }

    pub fn one(&self) -> MPoly {
        self.int(1)
    }

    /// Same variables over another field.
    pub fn with_field(&self, field: &FieldSpec) -> PolyRing {
        PolyRing::new(field, self.vars())
    }

    /// Univariate polynomial in variable `var`, as an element of this ring.
    pub fn from_upoly(&self, p: &UPoly, var: usize) -> MPoly {
        let n = self.nvars();
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.field().is_zero(c))
            .map(|(i, c)| (Monomial::var(n, var, i as u32), c.clone()))
            .collect();
        MPoly::from_terms(self, terms)
    }
}

/// Terms sorted descending in lex order on [`Monomial`], no zero coefficients.
#[derive(Clone)]
pub struct MPoly {
    ring: PolyRing,
    terms: Vec<(Monomial, FieldElement)>,
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for MPoly {}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string())
    }
}

impl MPoly {
    pub fn monomial(ring: &PolyRing, m: Monomial, c: FieldElement) -> Self {
        if ring.field().is_zero(&c) {
            return ring.zero();
        }
        MPoly { ring: ring.clone(), terms: vec![(m, c)] }
    }

    /// Any term list; like monomials are combined.
    pub fn from_terms(ring: &PolyRing, terms: Vec<(Monomial, FieldElement)>) -> Self {
        let f = ring.field();
        let mut acc: HashMap<Monomial, FieldElement> = HashMap::with_capacity(terms.len());
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(slot) => f.add_assign(slot, &c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !f.is_zero(c)).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        MPoly { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn field(&self) -> &FieldSpec {
        self.ring.field()
    }

    pub fn terms(&self) -> &[(Monomial, FieldElement)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<FieldElement> {
        match self.terms.as_slice() {
            [] => Some(self.field().zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_nonzero_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.0[var]).max()
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.0[var] > 0)
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let f = self.field();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = f.add(&self.terms[i].1, &other.terms[j].1);
                    if !f.is_zero(&c) {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        MPoly { ring: self.ring.clone(), terms: out }
    }

    pub fn neg(&self) -> MPoly {
        let f = self.field();
        MPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), f.neg(c))).collect() }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> MPoly {
        let f = self.field();
        if f.is_zero(c) {
            return self.ring.zero();
        }
        MPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, a)| (m.clone(), f.mul(a, c))).collect() }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let f = self.field();
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                terms.push((m1.mul(m2), f.mul(c1, c2)));
            }
        }
        MPoly::from_terms(&self.ring, terms)
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &FieldElement) -> MPoly {
        let f = self.field();
        if f.is_zero(c) {
            return self.ring.zero();
        }
        MPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|(a, b)| (a.mul(m), f.mul(b, c))).collect() }
    }

    pub fn pow(&self, n: u32) -> MPoly {
        let mut result = self.ring.one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Coefficients of `var^k`, k = 0..=deg, as polynomials not involving `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<MPoly> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<(Monomial, FieldElement)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut m2 = m.clone();
            m2.0[var] = 0;
            buckets[k].push((m2, c.clone()));
        }
        buckets.into_iter().map(|terms| MPoly { ring: self.ring.clone(), terms }).collect()
    }

    /// Substitutes a constant for one variable.
    pub fn substitute(&self, var: usize, value: &FieldElement) -> MPoly {
        let f = self.field();
        let deg = self.degree_in(var).unwrap_or(0);
        let mut powers = vec![f.one()];
        for _ in 0..deg {
            let next = f.mul(powers.last().unwrap(), value);
            powers.push(next);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m2 = m.clone();
                let k = m2.0[var] as usize;
                m2.0[var] = 0;
                (m2, f.mul(c, &powers[k]))
            })
            .collect();
        MPoly::from_terms(&self.ring, terms)
    }

    /// Substitutes polynomials for every variable.
    pub fn compose(&self, images: &[MPoly]) -> MPoly {
        assert_eq!(images.len(), self.ring.nvars());
        let target = images.first().map(|p| p.ring.clone()).unwrap_or_else(|| self.ring.clone());
        let mut cache: HashMap<(usize, u32), MPoly> = HashMap::new();
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut t = target.constant(c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = cache.entry((v, e)).or_insert_with(|| images[v].pow(e)).clone();
                t = t.mul(&pw);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Moves the polynomial into `target`, whose variable `map[i]` replaces
    /// variable `i` of this ring.
    pub fn rename(&self, target: &PolyRing, map: &[usize]) -> MPoly {
        let n = target.nvars();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m2 = Monomial::one(n);
                for (i, &e) in m.0.iter().enumerate() {
                    m2.0[map[i]] += e;
                }
                (m2, c.clone())
            })
            .collect();
        MPoly::from_terms(target, terms)
    }

    /// Image of the coefficients under a field embedding.
    pub fn map_field(&self, target: &PolyRing, emb: &Embedding) -> MPoly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), emb.apply(c))).collect();
        MPoly::from_terms(target, terms)
    }

    /// Value at a point whose coordinates live in `emb.target()`.
    pub fn eval_embedded(&self, point: &[FieldElement], emb: &Embedding) -> FieldElement {
        let f = emb.target();
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = emb.apply(c);
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = f.mul(&t, &f.pow(&point[v], e as u64));
                }
            }
            f.add_assign(&mut acc, &t);
        }
        acc
    }

    pub fn eval(&self, point: &[FieldElement]) -> FieldElement {
        let f = self.field();
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = f.mul(&t, &f.pow(&point[v], e as u64));
                }
            }
            f.add_assign(&mut acc, &t);
        }
        acc
    }

    /// Univariate view if at most `var` occurs.
    pub fn to_upoly(&self, var: usize) -> Option<UPoly> {
        let f = self.field();
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut coeffs = vec![f.zero(); deg + 1];
        for (m, c) in &self.terms {
            if m.0.iter().enumerate().any(|(i, &e)| i != var && e > 0) {
                return None;
            }
            coeffs[m.0[var] as usize] = c.clone();
        }
        Some(UPoly::from_coeffs(f, coeffs))
    }

    /// Leading term under `order`.
    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(Monomial, FieldElement)> {
        self.terms.iter().max_by(|a, b| order.cmp(&a.0, &b.0)).cloned()
    }

    pub fn monic(&self, order: &MonomialOrder) -> MPoly {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => self.scale(&self.field().inv(&c).unwrap()),
        }
    }

    /// Terms sorted by `order`, largest first.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(Monomial, FieldElement)> {
        let mut t = self.terms.clone();
        t.sort_by(|a, b| order.cmp(&b.0, &a.0));
        t
    }

    pub fn display_with(&self, order: &MonomialOrder) -> String {
        format_terms(&self.ring, &self.sorted_terms(order))
    }
}

fn format_terms(ring: &PolyRing, terms: &[(Monomial, FieldElement)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let f = ring.field();
    let mut out = String::new();
    for (k, (m, c)) in terms.iter().enumerate() {
        let mut mono = Vec::new();
        for (v, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => mono.push(ring.vars()[v].clone()),
                _ => mono.push(format!("{}^{}", ring.vars()[v], e)),
            }
        }
        let mono = mono.join("*");
        let (neg, cabs) = match f.as_prime(c) {
            Some(v) if 2 * v > f.characteristic() => (true, f.neg(c)),
            _ => (false, c.clone()),
        };
        let cs = f.format(&cabs);
        let cs = if cs.contains('+') { format!("({cs})") } else { cs };
        let body = if mono.is_empty() {
            cs
        } else if f.is_one(&cabs) {
            mono
        } else {
            format!("{cs}*{mono}")
        };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(&self.ring, &self.terms))
    }
}
