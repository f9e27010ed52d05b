//! Gröbner bases over finite fields.
//!
//! Buchberger's algorithm with the normal selection strategy and the
//! Gebauer–Möller criteria. Field equations `v^Q - v` are handled as an
//! exponent rewriting rule, so the computation runs in the ring of functions
//! on GF(Q)^n. Zero-dimensional bases are converted to lex by FGLM and solved
//! by triangular back-substitution.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use smallvec::SmallVec;
use thiserror::Error;

use crate::field::{Embedding, Extension, FieldElement, FieldSpec};
use crate::mpoly::{MPoly, Monomial, MonomialOrder, OrderKind, PolyRing};
use crate::upoly::UPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GbError {
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
    #[error("resource limit reached: {0}")]
    ResourceLimit(String),
    #[error("field equation exponent {0} is too large")]
    FieldEquationTooLarge(String),
}

/// Generators together with the monomial order used for them.
#[derive(Clone, Debug)]
pub struct Ideal {
    pub ring: PolyRing,
    pub generators: Vec<MPoly>,
    pub order: MonomialOrder,
}

impl Ideal {
    pub fn new(ring: &PolyRing, generators: Vec<MPoly>, order: MonomialOrder) -> Self {
        assert_eq!(order.priority.len(), ring.nvars());
        Ideal { ring: ring.clone(), generators, order }
    }

    pub fn with_order(&self, order: MonomialOrder) -> Self {
        Ideal { ring: self.ring.clone(), generators: self.generators.clone(), order }
    }
}

#[derive(Clone, Debug, Default)]
pub struct GbOptions {
    /// Adds `v^Q - v` for every variable.
    pub field_equations: Option<BigUint>,
    /// Collects a human readable log of the run.
    pub trace: bool,
    /// Fails once this many S-pairs have been reduced.
    pub max_pairs: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GbStats {
    pub pairs_reduced: usize,
    pub zero_reductions: usize,
    pub max_basis: usize,
}

/// A reduced Gröbner basis.
#[derive(Clone)]
pub struct GroebnerBasis {
    pub ring: PolyRing,
    pub order: MonomialOrder,
    /// Sorted by leading monomial, smallest first; monic.
    pub polys: Vec<MPoly>,
    pub field_equation_q: Option<u32>,
    pub stats: GbStats,
    pub trace: Vec<String>,
    internal: Vec<IPoly>,
}

impl fmt::Debug for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.polys.iter().map(|p| p.display_with(&self.order))).finish()
    }
}

impl GroebnerBasis {
    /// Wraps polynomials already known to form a reduced basis (field
    /// equations not included).
    fn from_reduced(ring: &PolyRing, order: &MonomialOrder, polys: Vec<MPoly>, fe: Option<u32>) -> Self {
        let ctx = Ctx::new(ring, order, fe);
        let mut internal: Vec<IPoly> = polys.iter().map(|p| ctx.monic(ctx.import(p))).collect();
        internal.sort_by(|a, b| ctx.cmp(&a[0].m, &b[0].m));
        let mut polys: Vec<MPoly> = internal.iter().map(|g| ctx.export(g)).collect();
        if let Some(q) = fe {
            append_field_equations(&ctx, &internal, q, &mut polys, order);
        }
        GroebnerBasis {
            ring: ring.clone(),
            order: order.clone(),
            polys,
            field_equation_q: fe,
            stats: GbStats::default(),
            trace: Vec::new(),
            internal,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_nonzero_constant()
    }

    /// Leading monomials in the original variable numbering.
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().map(|p| p.leading_term(&self.order).unwrap().0).collect()
    }

    /// True if every variable has a pure power among the leading monomials.
    pub fn is_zero_dimensional(&self) -> bool {
        if self.is_unit() {
            return true;
        }
        let lms = self.leading_monomials();
        (0..self.ring.nvars()).all(|v| {
            self.field_equation_q.is_some()
                || lms.iter().any(|m| m.0[v] > 0 && m.0.iter().enumerate().all(|(i, &e)| i == v || e == 0))
        })
    }

    /// Normal form of `f` with respect to this basis.
    pub fn reduce(&self, f: &MPoly) -> MPoly {
        let ctx = Ctx::new(&self.ring, &self.order, self.field_equation_q);
        let p = ctx.import(f);
        let refs: Vec<&IPoly> = self.internal.iter().collect();
        ctx.export(&ctx.full_reduce(p, &refs))
    }

    /// Number of standard monomials, if finite.
    pub fn quotient_dimension(&self) -> Option<usize> {
        if !self.is_zero_dimensional() {
            return None;
        }
        let ctx = Ctx::new(&self.ring, &self.order, self.field_equation_q);
        Some(ctx.staircase(&self.internal).len())
    }
}

/// Normal form of `f` modulo `basis`, which need not be a Gröbner basis.
pub fn reduce(f: &MPoly, basis: &[MPoly], order: &MonomialOrder) -> MPoly {
    let ctx = Ctx::new(f.ring(), order, None);
    let divisors: Vec<IPoly> = basis.iter().map(|g| ctx.monic(ctx.import(g))).filter(|g| !g.is_empty()).collect();
    let refs: Vec<&IPoly> = divisors.iter().collect();
    ctx.export(&ctx.full_reduce(ctx.import(f), &refs))
}

// ---------------------------------------------------------------------------
// Internal representation: exponents permuted so that position 0 is the most
// significant variable of the order.

type IExps = SmallVec<[u32; 12]>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct IMono {
    deg: u32,
    sev: u64,
    e: IExps,
}

impl IMono {
    fn new(e: IExps) -> Self {
        let deg = e.iter().sum();
        let sev = sev_of(&e);
        IMono { deg, sev, e }
    }

    fn divides(&self, other: &IMono) -> bool {
        self.sev & !other.sev == 0 && self.deg <= other.deg && self.e.iter().zip(&other.e).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &IMono) -> IMono {
        IMono {
            deg: self.deg + other.deg,
            sev: self.sev | other.sev,
            e: self.e.iter().zip(&other.e).map(|(a, b)| a + b).collect(),
        }
    }

    fn div(&self, other: &IMono) -> IMono {
        IMono::new(self.e.iter().zip(&other.e).map(|(a, b)| a - b).collect())
    }

    fn lcm(&self, other: &IMono) -> IMono {
        IMono::new(self.e.iter().zip(&other.e).map(|(a, b)| *a.max(b)).collect())
    }

    fn coprime(&self, other: &IMono) -> bool {
        self.e.iter().zip(&other.e).all(|(a, b)| *a == 0 || *b == 0)
    }

    fn is_one(&self) -> bool {
        self.deg == 0
    }
}

fn sev_of(e: &[u32]) -> u64 {
    let mut s = 0u64;
    for (i, &x) in e.iter().enumerate() {
        if x > 0 {
            s |= 1 << (i % 64);
        }
    }
    s
}

#[derive(Clone, Debug)]
struct ITerm {
    m: IMono,
    c: FieldElement,
}

type IPoly = Vec<ITerm>;

struct Ctx {
    ring: PolyRing,
    field: FieldSpec,
    kind: OrderKind,
    /// internal position -> ring variable
    perm: Vec<usize>,
    fe: Option<u32>,
}

impl Ctx {
    fn new(ring: &PolyRing, order: &MonomialOrder, fe: Option<u32>) -> Self {
        Ctx { ring: ring.clone(), field: ring.field().clone(), kind: order.kind, perm: order.priority.clone(), fe }
    }

    #[inline]
    fn cmp(&self, a: &IMono, b: &IMono) -> Ordering {
        match self.kind {
            OrderKind::Lex => a.e.cmp(&b.e),
            OrderKind::DegRevLex => match a.deg.cmp(&b.deg) {
                Ordering::Equal => {
                    for (x, y) in a.e.iter().zip(&b.e).rev() {
                        if x != y {
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                }
                o => o,
            },
        }
    }

    fn import_mono(&self, m: &Monomial) -> IMono {
        IMono::new(self.perm.iter().map(|&v| m.0[v]).collect())
    }

    fn export_mono(&self, m: &IMono) -> Monomial {
        let mut out = Monomial::one(self.perm.len());
        for (i, &v) in self.perm.iter().enumerate() {
            out.0[v] = m.e[i];
        }
        out
    }

    fn import(&self, f: &MPoly) -> IPoly {
        let terms = f.terms().iter().map(|(m, c)| ITerm { m: self.import_mono(m), c: c.clone() }).collect();
        self.normalize(terms)
    }

    fn export(&self, p: &IPoly) -> MPoly {
        MPoly::from_terms(&self.ring, p.iter().map(|t| (self.export_mono(&t.m), t.c.clone())).collect())
    }

    /// Applies the field-equation rewriting, sorts and combines like terms.
    fn normalize(&self, terms: Vec<ITerm>) -> IPoly {
        let f = &self.field;
        let mut terms: Vec<ITerm> = match self.fe {
            Some(q) => terms
                .into_iter()
                .map(|mut t| {
                    if t.m.e.iter().any(|&e| e >= q) {
                        let e = t.m.e.iter().map(|&e| if e >= q { (e - 1) % (q - 1) + 1 } else { e }).collect();
                        t.m = IMono::new(e);
                    }
                    t
                })
                .collect(),
            None => terms,
        };
        terms.sort_by(|a, b| self.cmp(&b.m, &a.m));
        let mut out: IPoly = Vec::with_capacity(terms.len());
        for t in terms {
            if let Some(last) = out.last_mut() {
                if last.m == t.m {
                    f.add_assign(&mut last.c, &t.c);
                    continue;
                }
            }
            out.push(t);
        }
        out.retain(|t| !f.is_zero(&t.c));
        out
    }

    fn monic(&self, mut p: IPoly) -> IPoly {
        if let Some(first) = p.first() {
            if !self.field.is_one(&first.c) {
                let inv = self.field.inv(&first.c).unwrap();
                for t in p.iter_mut() {
                    t.c = self.field.mul(&t.c, &inv);
                }
            }
        }
        p
    }

    fn overflows(&self, m: &IMono) -> bool {
        matches!(self.fe, Some(q) if m.e.iter().any(|&e| e >= q))
    }

    /// `c * m * g[skip..]`, in order.
    fn mul_term(&self, g: &[ITerm], m: &IMono, c: &FieldElement) -> IPoly {
        let f = &self.field;
        let terms: Vec<ITerm> = g.iter().map(|t| ITerm { m: t.m.mul(m), c: f.mul(&t.c, c) }).collect();
        if terms.iter().any(|t| self.overflows(&t.m)) {
            self.normalize(terms)
        } else {
            terms
        }
    }

    /// `a - b`, both sorted.
    fn sub_sorted(&self, a: &[ITerm], b: IPoly) -> IPoly {
        let f = &self.field;
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut i = 0;
        let mut bi = b.into_iter().peekable();
        while i < a.len() {
            match bi.peek() {
                None => break,
                Some(tb) => match self.cmp(&a[i].m, &tb.m) {
                    Ordering::Greater => {
                        out.push(a[i].clone());
                        i += 1;
                    }
                    Ordering::Less => {
                        let tb = bi.next().unwrap();
                        out.push(ITerm { m: tb.m, c: f.neg(&tb.c) });
                    }
                    Ordering::Equal => {
                        let tb = bi.next().unwrap();
                        let c = f.sub(&a[i].c, &tb.c);
                        if !f.is_zero(&c) {
                            out.push(ITerm { m: tb.m, c });
                        }
                        i += 1;
                    }
                },
            }
        }
        out.extend_from_slice(&a[i..]);
        for tb in bi {
            out.push(ITerm { m: tb.m, c: f.neg(&tb.c) });
        }
        out
    }

    fn find_divisor<'a>(&self, m: &IMono, basis: &[&'a IPoly]) -> Option<&'a IPoly> {
        basis.iter().find(|g| g[0].m.divides(m)).copied()
    }

    /// Full reduction; `basis` elements must be monic.
    fn full_reduce(&self, mut p: IPoly, basis: &[&IPoly]) -> IPoly {
        let mut rem: IPoly = Vec::new();
        let mut start = 0;
        loop {
            if start >= p.len() {
                break;
            }
            let lt = &p[start];
            match self.find_divisor(&lt.m, basis) {
                Some(g) => {
                    let q = lt.m.div(&g[0].m);
                    let c = lt.c.clone();
                    let prod = self.mul_term(&g[1..], &q, &c);
                    p = self.sub_sorted(&p[start + 1..], prod);
                    start = 0;
                }
                None => {
                    rem.push(lt.clone());
                    start += 1;
                }
            }
        }
        rem
    }

    /// Reduces only until the leading term is irreducible.
    fn top_reduce(&self, mut p: IPoly, basis: &[&IPoly]) -> IPoly {
        while let Some(lt) = p.first() {
            match self.find_divisor(&lt.m, basis) {
                Some(g) => {
                    let q = lt.m.div(&g[0].m);
                    let c = lt.c.clone();
                    let prod = self.mul_term(&g[1..], &q, &c);
                    p = self.sub_sorted(&p[1..], prod);
                }
                None => break,
            }
        }
        p
    }

    fn spoly(&self, f: &IPoly, g: &IPoly, lcm: &IMono) -> IPoly {
        let a = self.mul_term(&f[1..], &lcm.div(&f[0].m), &self.field.one());
        let b = self.mul_term(&g[1..], &lcm.div(&g[0].m), &self.field.one());
        self.sub_sorted(&a, b)
    }

    fn mono_string(&self, m: &IMono) -> String {
        let mm = self.export_mono(m);
        let parts: Vec<String> = mm
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| if e == 1 { self.ring.vars()[v].clone() } else { format!("{}^{}", self.ring.vars()[v], e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Standard monomials of a zero-dimensional basis, ascending.
    fn staircase(&self, basis: &[IPoly]) -> Vec<IMono> {
        let n = self.perm.len();
        let lms: Vec<&IMono> = basis.iter().map(|g| &g[0].m).collect();
        let reducible =
            |m: &IMono| lms.iter().any(|l| l.divides(m)) || matches!(self.fe, Some(q) if m.e.iter().any(|&e| e >= q));
        let mut seen: HashMap<IExps, ()> = HashMap::new();
        let one = IMono::new(SmallVec::from_elem(0, n));
        let mut out = Vec::new();
        if reducible(&one) {
            return out;
        }
        let mut stack = vec![one];
        while let Some(m) = stack.pop() {
            if seen.insert(m.e.clone(), ()).is_some() {
                continue;
            }
            for v in 0..n {
                let mut e = m.e.clone();
                e[v] += 1;
                let next = IMono::new(e);
                if !reducible(&next) && !seen.contains_key(&next.e) {
                    stack.push(next);
                }
            }
            out.push(m);
        }
        out.sort_by(|a, b| self.cmp(a, b));
        out
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    /// `None` marks a field-equation pair for variable `v`.
    j: Option<usize>,
    v: usize,
    lcm: IMono,
}

struct Engine<'a> {
    ctx: &'a Ctx,
    polys: Vec<IPoly>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
    stats: GbStats,
    trace: Option<Vec<String>>,
}

impl Engine<'_> {
    fn log(&mut self, line: impl FnOnce() -> String) {
        if let Some(t) = self.trace.as_mut() {
            t.push(line());
        }
    }

    fn active_refs(&self) -> Vec<&IPoly> {
        self.active.iter().map(|&i| &self.polys[i]).collect()
    }

    fn insert(&mut self, h: IPoly) {
        let hidx = self.polys.len();
        let hm = h[0].m.clone();
        self.polys.push(h);
        // Gebauer-Möller update.
        let cands: Vec<(usize, IMono, bool)> = self
            .active
            .iter()
            .map(|&g| {
                let gm = &self.polys[g][0].m;
                (g, hm.lcm(gm), hm.coprime(gm))
            })
            .collect();
        let mut kept: Vec<(usize, IMono, bool)> = Vec::new();
        for k in 0..cands.len() {
            let (_, l1, coprime) = &cands[k];
            let dominated =
                cands[k + 1..].iter().any(|(_, l2, _)| l2.divides(l1)) || kept.iter().any(|(_, l2, _)| l2.divides(l1));
            if *coprime || !dominated {
                kept.push(cands[k].clone());
            }
        }
        let polys = &self.polys;
        self.pairs.retain(|p| match p.j {
            None => true,
            Some(j) => {
                let l1 = &polys[p.i][0].m.lcm(&hm);
                let l2 = &polys[j][0].m.lcm(&hm);
                !(hm.divides(&p.lcm) && *l1 != p.lcm && *l2 != p.lcm)
            }
        });
        for (g, lcm, coprime) in kept {
            if !coprime {
                self.pairs.push(Pair { i: g, j: Some(hidx), v: 0, lcm });
            }
        }
        if let Some(q) = self.ctx.fe {
            for v in 0..hm.e.len() {
                if hm.e[v] > 0 {
                    let mut e = hm.e.clone();
                    e[v] = q;
                    self.pairs.push(Pair { i: hidx, j: None, v, lcm: IMono::new(e) });
                }
            }
        }
        let polys = &self.polys;
        self.active.retain(|&g| !hm.divides(&polys[g][0].m));
        self.active.push(hidx);
        self.stats.max_basis = self.stats.max_basis.max(self.active.len());
    }

    fn select(&mut self) -> Option<Pair> {
        let ctx = self.ctx;
        let best = (0..self.pairs.len()).min_by(|&a, &b| {
            let (pa, pb) = (&self.pairs[a], &self.pairs[b]);
            pa.lcm
                .deg
                .cmp(&pb.lcm.deg)
                .then_with(|| ctx.cmp(&pa.lcm, &pb.lcm))
                .then_with(|| (pa.j.unwrap_or(usize::MAX), pa.i).cmp(&(pb.j.unwrap_or(usize::MAX), pb.i)))
        })?;
        Some(self.pairs.swap_remove(best))
    }
}

fn fe_exponent(q: &Option<BigUint>) -> Result<Option<u32>, GbError> {
    match q {
        None => Ok(None),
        Some(q) => {
            let v: u32 = q.try_into().map_err(|_| GbError::FieldEquationTooLarge(q.to_string()))?;
            if v > 1 << 24 {
                return Err(GbError::FieldEquationTooLarge(q.to_string()));
            }
            Ok(Some(v))
        }
    }
}

/// Reduced Gröbner basis of `ideal` under `ideal.order`.
pub fn groebner_basis(ideal: &Ideal, opts: &GbOptions) -> Result<GroebnerBasis, GbError> {
    let fe = fe_exponent(&opts.field_equations)?;
    let ctx = Ctx::new(&ideal.ring, &ideal.order, fe);
    let mut eng = Engine {
        ctx: &ctx,
        polys: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        stats: GbStats::default(),
        trace: opts.trace.then(Vec::new),
    };
    let mut inputs: Vec<IPoly> = ideal.generators.iter().map(|g| ctx.import(g)).filter(|g| !g.is_empty()).collect();
    inputs.sort_by(|a, b| ctx.cmp(&a[0].m, &b[0].m));
    let mut unit = false;
    for g in inputs {
        let h = ctx.full_reduce(g, &eng.active_refs());
        if h.is_empty() {
            continue;
        }
        let h = ctx.monic(h);
        if h[0].m.is_one() {
            unit = true;
            break;
        }
        let lm = ctx.mono_string(&h[0].m);
        eng.log(|| format!("input: new element with leading monomial {lm}"));
        eng.insert(h);
    }
    while !unit {
        let Some(pair) = eng.select() else { break };
        if let Some(limit) = opts.max_pairs {
            if eng.stats.pairs_reduced >= limit {
                return Err(GbError::ResourceLimit(format!("{limit} S-pairs")));
            }
        }
        eng.stats.pairs_reduced += 1;
        let s = match pair.j {
            Some(j) => ctx.spoly(&eng.polys[pair.i], &eng.polys[j], &pair.lcm),
            None => {
                let f = &eng.polys[pair.i];
                let mut e: IExps = SmallVec::from_elem(0, ctx.perm.len());
                e[pair.v] = fe.unwrap() - f[0].m.e[pair.v];
                ctx.mul_term(f, &IMono::new(e), &ctx.field.one())
            }
        };
        let h = ctx.top_reduce(s, &eng.active_refs());
        if h.is_empty() {
            eng.stats.zero_reductions += 1;
            let ctx = eng.ctx;
            eng.log(|| match pair.j {
                Some(j) => format!("pair ({}, {}) lcm {} -> 0", pair.i, j, ctx.mono_string(&pair.lcm)),
                None => format!("pair ({}, field eq {}) -> 0", pair.i, ctx.ring.vars()[ctx.perm[pair.v]]),
            });
            continue;
        }
        let h = ctx.monic(ctx.full_reduce(h, &eng.active_refs()));
        let new_index = eng.polys.len();
        eng.log(|| {
            format!(
                "pair ({}, {}) lcm {} -> new element {} with leading monomial {}",
                pair.i,
                pair.j.map_or("fe".to_string(), |j| j.to_string()),
                ctx.mono_string(&pair.lcm),
                new_index,
                ctx.mono_string(&h[0].m)
            )
        });
        if h[0].m.is_one() {
            unit = true;
            break;
        }
        eng.insert(h);
    }
    let mut trace = eng.trace.take().unwrap_or_default();
    let stats = eng.stats.clone();
    let internal: Vec<IPoly> = if unit {
        trace.push("basis is {1}".into());
        vec![vec![ITerm { m: IMono::new(SmallVec::from_elem(0, ctx.perm.len())), c: ctx.field.one() }]]
    } else {
        // Inter-reduce the minimal basis.
        let mut basis: Vec<IPoly> = eng.active.iter().map(|&i| eng.polys[i].clone()).collect();
        basis.sort_by(|a, b| ctx.cmp(&a[0].m, &b[0].m));
        let mut out = Vec::with_capacity(basis.len());
        for k in 0..basis.len() {
            let others: Vec<&IPoly> = basis.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, g)| g).collect();
            let head = basis[k][0].clone();
            let tail = ctx.full_reduce(basis[k][1..].to_vec(), &others);
            let mut g = vec![head];
            g.extend(tail);
            out.push(g);
        }
        out
    };
    let mut polys: Vec<MPoly> = internal.iter().map(|g| ctx.export(g)).collect();
    if let (Some(q), false) = (fe, unit) {
        append_field_equations(&ctx, &internal, q, &mut polys, &ideal.order);
    }
    Ok(GroebnerBasis {
        ring: ideal.ring.clone(),
        order: ideal.order.clone(),
        polys,
        field_equation_q: fe,
        stats,
        trace,
        internal,
    })
}

fn append_field_equations(ctx: &Ctx, internal: &[IPoly], q: u32, polys: &mut Vec<MPoly>, order: &MonomialOrder) {
    let ring = &ctx.ring;
    for v in 0..ring.nvars() {
        let pure = internal.iter().any(|g| {
            let m = ctx.export_mono(&g[0].m);
            m.0[v] > 0 && m.0.iter().enumerate().all(|(i, &e)| i == v || e == 0)
        });
        if !pure {
            polys.push(ring.var(v).pow(q).sub(&ring.var(v)));
        }
    }
    polys.sort_by(|a, b| order.cmp(&a.leading_term(order).unwrap().0, &b.leading_term(order).unwrap().0));
}

/// True if the ideal has a zero over the algebraic closure.
pub fn is_solvable_over_closure(ideal: &Ideal) -> bool {
    let drl = ideal.with_order(MonomialOrder::degrevlex_with(ideal.order.priority.clone()));
    !groebner_basis(&drl, &GbOptions::default()).expect("no limits set").is_unit()
}

/// Converts a zero-dimensional reduced basis to another order (FGLM).
pub fn fglm(gb: &GroebnerBasis, target: &MonomialOrder) -> Result<GroebnerBasis, GbError> {
    if gb.is_unit() {
        let ideal = Ideal::new(&gb.ring, vec![gb.ring.one()], target.clone());
        return groebner_basis(&ideal, &GbOptions::default());
    }
    if !gb.is_zero_dimensional() {
        return Err(GbError::NotZeroDimensional);
    }
    let src = Ctx::new(&gb.ring, &gb.order, gb.field_equation_q);
    let f = &src.field;
    let n = gb.ring.nvars();
    let stairs = src.staircase(&gb.internal);
    let dim = stairs.len();
    let index: HashMap<IExps, usize> = stairs.iter().enumerate().map(|(i, m)| (m.e.clone(), i)).collect();
    let refs: Vec<&IPoly> = gb.internal.iter().collect();
    let to_vec = |p: &IPoly| {
        let mut v = vec![f.zero(); dim];
        for t in p {
            v[index[&t.m.e]] = t.c.clone();
        }
        v
    };
    // Multiplication matrices: mult[var][b] = NF(x_var * stairs[b]) (ring var numbering).
    let mut mult: Vec<Vec<Vec<FieldElement>>> = Vec::with_capacity(n);
    for v in 0..n {
        let pos = src.perm.iter().position(|&x| x == v).unwrap();
        let mut cols = Vec::with_capacity(dim);
        for b in &stairs {
            let mut e = b.e.clone();
            e[pos] += 1;
            let p = src.normalize(vec![ITerm { m: IMono::new(e), c: f.one() }]);
            cols.push(to_vec(&src.full_reduce(p, &refs)));
        }
        mult.push(cols);
    }
    let apply = |v: usize, x: &[FieldElement]| {
        let mut out = vec![f.zero(); dim];
        for (b, xb) in x.iter().enumerate() {
            if f.is_zero(xb) {
                continue;
            }
            for (k, c) in mult[v][b].iter().enumerate() {
                if !f.is_zero(c) {
                    let t = f.mul(xb, c);
                    f.add_assign(&mut out[k], &t);
                }
            }
        }
        out
    };
    // Echelon rows: (pivot, reduced vector, combination over accepted monomials).
    let mut rows: Vec<(usize, Vec<FieldElement>, Vec<FieldElement>)> = Vec::new();
    let mut accepted: Vec<(Monomial, Vec<FieldElement>)> = Vec::new();
    let mut new_basis: Vec<MPoly> = Vec::new();
    let mut new_lms: Vec<Monomial> = Vec::new();
    let one = Monomial::one(n);
    let mut queue: Vec<(Monomial, Vec<FieldElement>)> = vec![(
        one.clone(),
        to_vec(&src.full_reduce(vec![ITerm { m: IMono::new(SmallVec::from_elem(0, n)), c: f.one() }], &refs)),
    )];
    let cmp_t = |a: &Monomial, b: &Monomial| target.cmp(a, b);
    while !queue.is_empty() {
        // smallest candidate in the target order
        let k = (0..queue.len()).min_by(|&a, &b| cmp_t(&queue[a].0, &queue[b].0)).unwrap();
        let (m, vec) = queue.swap_remove(k);
        queue.retain(|(q, _)| q != &m);
        if new_lms.iter().any(|l| l.divides(&m)) || accepted.iter().any(|(a, _)| a == &m) {
            continue;
        }
        // reduce against echelon rows
        let mut r = vec.clone();
        let mut comb = vec![f.zero(); accepted.len() + 1];
        comb[accepted.len()] = f.one();
        for (piv, row, rc) in &rows {
            let c = r[*piv].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (x, y) in r.iter_mut().zip(row) {
                f.sub_mul_assign(x, &c, y);
            }
            for (x, y) in comb.iter_mut().zip(rc) {
                f.sub_mul_assign(x, &c, y);
            }
        }
        match r.iter().position(|c| !f.is_zero(c)) {
            None => {
                // m + sum comb[i] accepted[i] = 0
                let mut terms = vec![(m.clone(), f.one())];
                for (i, (a, _)) in accepted.iter().enumerate() {
                    if !f.is_zero(&comb[i]) {
                        terms.push((a.clone(), comb[i].clone()));
                    }
                }
                let g = MPoly::from_terms(&gb.ring, terms);
                new_lms.push(m);
                new_basis.push(g);
            }
            Some(piv) => {
                let inv = f.inv(&r[piv]).unwrap();
                for x in r.iter_mut() {
                    *x = f.mul(x, &inv);
                }
                for x in comb.iter_mut() {
                    *x = f.mul(x, &inv);
                }
                for (_, _, rc) in rows.iter_mut() {
                    rc.push(f.zero());
                }
                rows.push((piv, r, comb));
                for v in 0..n {
                    let mut e = m.0.clone();
                    e[v] += 1;
                    let next = Monomial(e);
                    let over = matches!(gb.field_equation_q, Some(q) if next.0[v] >= q);
                    if !over && !queue.iter().any(|(q, _)| q == &next) {
                        queue.push((next, apply(v, &vec)));
                    }
                }
                accepted.push((m, vec));
            }
        }
    }
    let mut polys = new_basis;
    // minimalize: drop elements whose leading monomial is a multiple of another
    let lms: Vec<Monomial> = polys.iter().map(|p| p.leading_term(target).unwrap().0).collect();
    let keep: Vec<bool> =
        (0..polys.len()).map(|i| !(0..polys.len()).any(|j| j != i && lms[j].divides(&lms[i]))).collect();
    polys = polys.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
    Ok(GroebnerBasis::from_reduced(&gb.ring, target, polys, gb.field_equation_q))
}

/// A zero over a finite extension of the coefficient field.
#[derive(Clone, Debug)]
pub struct SolutionPoint {
    pub extension: Extension,
    pub coords: Vec<FieldElement>,
    /// Degree over the coefficient field of the field generated by the coordinates.
    pub degree: usize,
}

impl SolutionPoint {
    pub fn field(&self) -> &FieldSpec {
        &self.extension.field
    }
}

struct ExtCache {
    map: HashMap<(u64, usize), Extension>,
}

impl ExtCache {
    fn get(&mut self, f: &FieldSpec, d: usize) -> Extension {
        self.map.entry((f.id(), d)).or_insert_with(|| f.extend(d)).clone()
    }
}

/// All zeros of a zero-dimensional ideal with coordinates generating an
/// extension of degree at most `max_degree`.
pub fn solve(ideal: &Ideal, max_degree: usize) -> Result<Vec<SolutionPoint>, GbError> {
    solve_with(ideal, max_degree, &GbOptions::default())
}

pub fn solve_with(ideal: &Ideal, max_degree: usize, opts: &GbOptions) -> Result<Vec<SolutionPoint>, GbError> {
    let drl = ideal.with_order(MonomialOrder::degrevlex_with(ideal.order.priority.clone()));
    let gb = groebner_basis(&drl, opts)?;
    if gb.is_unit() {
        return Ok(Vec::new());
    }
    if !gb.is_zero_dimensional() {
        return Err(GbError::NotZeroDimensional);
    }
    let lex = MonomialOrder::lex_with(ideal.order.priority.clone());
    let lexgb = fglm(&gb, &lex)?;
    Ok(solve_triangular(&lexgb, max_degree))
}

/// Back-substitution on a zero-dimensional lex basis.
pub fn solve_triangular(gb: &GroebnerBasis, max_degree: usize) -> Vec<SolutionPoint> {
    assert_eq!(gb.order.kind, OrderKind::Lex);
    let base = gb.ring.field().clone();
    let prio = &gb.order.priority;
    let n = prio.len();
    // level[k]: basis elements whose most significant variable is prio[k]
    let mut levels: Vec<Vec<&MPoly>> = vec![Vec::new(); n];
    for p in &gb.polys {
        let lm = p.leading_term(&gb.order).unwrap().0;
        if let Some(k) = prio.iter().position(|&v| lm.0[v] > 0) {
            levels[k].push(p);
        } else {
            return Vec::new();
        }
    }
    let mut cache = ExtCache { map: HashMap::new() };
    let mut out = Vec::new();
    let start = Extension { field: base.clone(), embedding: Embedding::identity(&base) };
    let coords = vec![base.zero(); n];
    descend(gb, &levels, n, start, coords, 1, max_degree, &mut cache, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn descend(
    gb: &GroebnerBasis,
    levels: &[Vec<&MPoly>],
    k: usize,
    ext: Extension,
    coords: Vec<FieldElement>,
    degree: usize,
    max_degree: usize,
    cache: &mut ExtCache,
    out: &mut Vec<SolutionPoint>,
) {
    if k == 0 {
        out.push(SolutionPoint { extension: ext, coords, degree });
        return;
    }
    let level = k - 1;
    let var = gb.order.priority[level];
    let field = ext.field.clone();
    // Specialize the polynomials of this level at the known coordinates.
    let mut h = UPoly::zero(&field);
    for p in &levels[level] {
        let mut coeffs = vec![field.zero(); p.degree_in(var).unwrap_or(0) as usize + 1];
        for (m, c) in p.terms() {
            let mut t = ext.embedding.apply(c);
            for (v, &e) in m.0.iter().enumerate() {
                if v != var && e > 0 {
                    t = field.mul(&t, &field.pow(&coords[v], e as u64));
                }
            }
            field.add_assign(&mut coeffs[m.0[var] as usize], &t);
        }
        h = h.gcd(&UPoly::from_coeffs(&field, coeffs));
    }
    if h.is_zero() {
        return;
    }
    let budget = max_degree / degree;
    if budget == 0 {
        return;
    }
    // Count roots of exact degree j over the current field.
    let x = UPoly::x(&field);
    let mut xq = x.clone();
    let mut counts = vec![0usize; budget + 1];
    for j in 1..=budget {
        if h.degree() == Some(0) {
            break;
        }
        xq = xq.powmod(field.order(), &h);
        counts[j] = xq.sub(&x).gcd(&h).degree().unwrap_or(0);
    }
    for j in 1..=budget {
        let exact: i64 = (1..=j).filter(|d| j % d == 0).map(|d| mobius(j / d) * counts[d] as i64).sum();
        if exact <= 0 {
            continue;
        }
        let step = cache.get(&field, j);
        let roots = h.map(&step.embedding);
        let big = step.field.clone();
        for r in roots.roots() {
            let rdeg = lcm(big.element_degree(&r), field.degree()) / field.degree();
            if rdeg != j {
                continue;
            }
            let mut c: Vec<FieldElement> = coords.iter().map(|c| step.embedding.apply(c)).collect();
            c[var] = r;
            let next = Extension { field: big.clone(), embedding: ext.embedding.then(&step.embedding) };
            descend(gb, levels, k - 1, next, c, degree * j, max_degree, cache, out);
        }
    }
}

fn mobius(n: usize) -> i64 {
    let mut n = n;
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::parse::parse_mpoly;
    use proptest::prelude::*;

    fn ring(p: u64, vars: &[&str]) -> PolyRing {
        PolyRing::new(&make_field(p, 1).unwrap(), vars)
    }

    fn polys(r: &PolyRing, texts: &[&str]) -> Vec<MPoly> {
        texts.iter().map(|t| parse_mpoly(r, t).unwrap()).collect()
    }

    /// Textbook division by repeated subtraction, written against the public
    /// polynomial API only.
    fn naive_reduce(f: &MPoly, basis: &[MPoly], order: &MonomialOrder) -> MPoly {
        let field = f.field().clone();
        let mut p = f.clone();
        let mut rem = f.ring().zero();
        'outer: while let Some((m, c)) = p.leading_term(order) {
            for g in basis {
                let (gm, gc) = g.leading_term(order).unwrap();
                if gm.divides(&m) {
                    let q = Monomial(m.0.iter().zip(&gm.0).map(|(a, b)| a - b).collect());
                    let coef = field.div(&c, &gc).unwrap();
                    p = p.sub(&g.mul_monomial(&q, &coef));
                    continue 'outer;
                }
            }
            let t = MPoly::monomial(f.ring(), m, c);
            rem = rem.add(&t);
            p = p.sub(&t);
        }
        rem
    }

    fn naive_spoly(f: &MPoly, g: &MPoly, order: &MonomialOrder) -> MPoly {
        let field = f.field().clone();
        let (fm, fc) = f.leading_term(order).unwrap();
        let (gm, gc) = g.leading_term(order).unwrap();
        let l = Monomial(fm.0.iter().zip(&gm.0).map(|(a, b)| *a.max(b)).collect());
        let qf = Monomial(l.0.iter().zip(&fm.0).map(|(a, b)| a - b).collect());
        let qg = Monomial(l.0.iter().zip(&gm.0).map(|(a, b)| a - b).collect());
        f.mul_monomial(&qf, &field.inv(&fc).unwrap()).sub(&g.mul_monomial(&qg, &field.inv(&gc).unwrap()))
    }

    pub(crate) fn check_invariants(ideal: &Ideal, gb: &GroebnerBasis) {
        let o = &gb.order;
        for g in &ideal.generators {
            assert!(naive_reduce(g, &gb.polys, o).is_zero(), "generator {g} not in ideal of basis");
        }
        for i in 0..gb.polys.len() {
            for j in i + 1..gb.polys.len() {
                let s = naive_spoly(&gb.polys[i], &gb.polys[j], o);
                assert!(naive_reduce(&s, &gb.polys, o).is_zero(), "S-pair {i},{j} does not reduce to zero");
            }
        }
        let lms = gb.leading_monomials();
        for (i, g) in gb.polys.iter().enumerate() {
            assert!(gb.field().is_one(&g.leading_term(o).unwrap().1));
            for (m, _) in g.terms() {
                for (j, l) in lms.iter().enumerate() {
                    if i != j {
                        assert!(!l.divides(m), "basis not reduced");
                    }
                }
            }
        }
    }

    impl GroebnerBasis {
        fn field(&self) -> &FieldSpec {
            self.ring.field()
        }
    }

    #[test]
    fn single_step_reduction() {
        let r = ring(7, &["x", "y"]);
        let f = parse_mpoly(&r, "x^2*y").unwrap();
        let g = polys(&r, &["x^2 - y"]);
        assert_eq!(reduce(&f, &g, &MonomialOrder::lex(2)), parse_mpoly(&r, "y^2").unwrap());
    }

    #[test]
    fn inconsistent_ideal_is_unit() {
        let r = ring(7, &["x"]);
        let ideal = Ideal::new(&r, polys(&r, &["x - 1", "x - 2"]), MonomialOrder::lex(1));
        let gb = groebner_basis(&ideal, &GbOptions::default()).unwrap();
        assert!(gb.is_unit());
        assert!(!is_solvable_over_closure(&ideal));
        assert!(solve(&ideal, 3).unwrap().is_empty());
    }

    #[test]
    fn lex_basis_and_solutions() {
        let r = ring(7, &["x", "y"]);
        let ideal = Ideal::new(&r, polys(&r, &["x^2 + y", "x*y - 1"]), MonomialOrder::lex(2));
        let gb = groebner_basis(&ideal, &GbOptions::default()).unwrap();
        assert_eq!(gb.polys, polys(&r, &["y^3 + 1", "x + y^2"]));
        check_invariants(&ideal, &gb);
        let sols = solve(&ideal, 1).unwrap();
        let ys: Vec<u64> = sols.iter().map(|s| s.field().as_prime(&s.coords[1]).unwrap()).collect();
        assert_eq!(ys.len(), 3);
        for y in [3, 5, 6] {
            assert!(ys.contains(&y));
        }
    }

    #[test]
    fn fglm_matches_direct_lex() {
        let r = ring(11, &["a", "b", "c"]);
        let gens = polys(&r, &["a^2 + b*c - 1", "b^2 - a*c + 2", "c^2 + a - b"]);
        let lex = Ideal::new(&r, gens.clone(), MonomialOrder::lex(3));
        let drl = Ideal::new(&r, gens, MonomialOrder::degrevlex(3));
        let direct = groebner_basis(&lex, &GbOptions::default()).unwrap();
        let g = groebner_basis(&drl, &GbOptions::default()).unwrap();
        check_invariants(&drl, &g);
        let converted = fglm(&g, &MonomialOrder::lex(3)).unwrap();
        assert_eq!(converted.polys, direct.polys);
        assert_eq!(g.quotient_dimension(), Some(8));
    }

    #[test]
    fn field_equations_restrict_points() {
        let r = ring(7, &["x", "y"]);
        let gens = polys(&r, &["x^2 + 1", "y - x"]);
        let ideal = Ideal::new(&r, gens, MonomialOrder::degrevlex(2));
        let over7 = GbOptions { field_equations: Some(BigUint::from(7u32)), ..Default::default() };
        assert!(groebner_basis(&ideal, &over7).unwrap().is_unit());
        let over49 = GbOptions { field_equations: Some(BigUint::from(49u32)), ..Default::default() };
        let gb = groebner_basis(&ideal, &over49).unwrap();
        assert!(!gb.is_unit());
        let sols = solve_with(&ideal, 2, &over49).unwrap();
        assert_eq!(sols.len(), 2);
        assert!(sols.iter().all(|s| s.degree == 2));
    }

    #[test]
    fn positive_dimensional_is_rejected() {
        let r = ring(5, &["x", "y"]);
        let ideal = Ideal::new(&r, polys(&r, &["x*y - 1"]), MonomialOrder::lex(2));
        assert_eq!(solve(&ideal, 1).unwrap_err(), GbError::NotZeroDimensional);
        let opts = GbOptions { field_equations: Some(BigUint::from(5u32)), ..Default::default() };
        assert_eq!(solve_with(&ideal, 1, &opts).unwrap().len(), 4);
    }

    #[test]
    fn trace_records_pairs() {
        let r = ring(7, &["x", "y"]);
        let ideal = Ideal::new(&r, polys(&r, &["x^2 + y", "x*y - 1"]), MonomialOrder::degrevlex(2));
        let gb = groebner_basis(&ideal, &GbOptions { trace: true, ..Default::default() }).unwrap();
        assert!(gb.trace.iter().any(|l| l.starts_with("pair")));
        assert!(gb.stats.pairs_reduced > 0);
    }

    fn random_poly(r: &PolyRing, shape: &[(u8, u8, u8, u8)]) -> MPoly {
        let n = r.nvars();
        let terms = shape
            .iter()
            .map(|&(c, a, b, d)| {
                let mut e = [a as u32 % 3, b as u32 % 3, d as u32 % 3];
                while e.iter().sum::<u32>() > 3 {
                    let k = e.iter().position(|&x| x > 0).unwrap();
                    e[k] -= 1;
                }
                (Monomial(e[..n].iter().copied().collect()), r.field().from_u64(c as u64))
            })
            .collect();
        MPoly::from_terms(r, terms)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn random_bases_are_groebner(
            nv in 2usize..4,
            lexo in any::<bool>(),
            gens in proptest::collection::vec(proptest::collection::vec(any::<(u8, u8, u8, u8)>(), 1..5), 1..4)
        ) {
            let names = ["x", "y", "z"];
            let r = ring(7, &names[..nv]);
            let g: Vec<MPoly> = gens.iter().map(|s| random_poly(&r, s)).collect();
            let order = if lexo { MonomialOrder::lex(nv) } else { MonomialOrder::degrevlex(nv) };
            let ideal = Ideal::new(&r, g, order);
            let gb = groebner_basis(&ideal, &GbOptions::default()).unwrap();
            check_invariants(&ideal, &gb);
            if gb.is_zero_dimensional() && !gb.is_unit() {
                let sols = solve(&ideal, 1).unwrap();
                let f = r.field();
                let mut found: Vec<Vec<FieldElement>> = sols.iter().map(|s| s.coords.clone()).collect();
                found.sort();
                let mut brute: Vec<Vec<FieldElement>> = Vec::new();
                let elems: Vec<FieldElement> = f.elements().collect();
                let mut idx = vec![0usize; nv];
                loop {
                    let pt: Vec<FieldElement> = idx.iter().map(|&i| elems[i].clone()).collect();
                    if ideal.generators.iter().all(|g| f.is_zero(&g.eval(&pt))) {
                        brute.push(pt);
                    }
                    let mut k = 0;
                    while k < nv {
                        idx[k] += 1;
                        if idx[k] < elems.len() { break; }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == nv { break; }
                }
                brute.sort();
                prop_assert_eq!(found, brute);
            }
        }
    }
}
