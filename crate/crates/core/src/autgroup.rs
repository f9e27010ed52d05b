//! Automorphism groups of `y^2 = D(x)`: normal-form detection over the
//! algebraic closure, explicit generators, the concrete group they generate,
//! and the extension fields over which its elements are defined.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::basis_change::{self, curve_genus, BasisError, CaseKind, Target, TypeWitness};
use crate::field::{root_of_unity, Embedding, Extension, FieldElement, FieldError, FieldSpec};
use crate::groebner::{self, lcm};
use crate::normal_forms::{
    additive_basis, enumerate_templates, generator_is_valid, is_subgroup, Catalog, GroupType, NormalFormTemplate,
    ParamEncoding,
};
use crate::parse::{parse_upoly, ParseError};
use crate::upoly::UPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{gtype} is not realized over an extension of degree at most {max_d}")]
    ExceedsMaxDegree { gtype: GroupType, max_d: usize },
    #[error("group closure exceeds {0} elements")]
    GroupTooLarge(usize),
    #[error("generator {0} violates the curve equation")]
    InvalidGenerator(String),
}

impl AutError {
    /// Whether the error comes from the input rather than the computation.
    pub fn is_input_error(&self) -> bool {
        match self {
            AutError::Parse(_) | AutError::Field(_) => true,
            AutError::Basis(b) => !matches!(b, BasisError::Groebner(_)),
            _ => false,
        }
    }
}

/// `y^2 = D(x)` with `D` monic, separable, of degree `2g+1` or `2g+2`, `g >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub d: UPoly,
    pub genus: usize,
}

impl Curve {
    pub fn new(d: UPoly) -> Result<Self, AutError> {
        let genus = curve_genus(&d)?;
        Ok(Curve { d, genus })
    }

    pub fn parse(field: &FieldSpec, text: &str) -> Result<Self, AutError> {
        Curve::new(parse_upoly(field, text)?)
    }

    pub fn field(&self) -> &FieldSpec {
        self.d.field()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Decide every template.
    Exhaustive,
    /// Examine types by decreasing order and stop at the first detected one.
    LargestFirst,
}

#[derive(Clone, Debug)]
pub struct AutOptions {
    pub catalog: Catalog,
    pub max_d: usize,
    pub strategy: Strategy,
    pub encoding: ParamEncoding,
    pub group_cap: usize,
}

impl Default for AutOptions {
    fn default() -> Self {
        AutOptions {
            catalog: Catalog::default(),
            max_d: 12,
            strategy: Strategy::Exhaustive,
            encoding: ParamEncoding::Eliminated,
            group_cap: 10_000,
        }
    }
}

/// Smallest `d` with `n | q^d - 1` for `q = |field|`.
pub fn unity_degree(field: &FieldSpec, n: u64) -> usize {
    let q = (field.order() % n).to_u64().unwrap();
    let (mut d, mut acc) = (1, q % n);
    while acc != 1 % n {
        acc = acc * q % n;
        d += 1;
    }
    d
}

// ---------------------------------------------------------------------------
// Detection

#[derive(Clone, Debug)]
pub struct TemplateOutcome {
    pub template: NormalFormTemplate,
    pub solvable: bool,
    /// Label of the first solvable case.
    pub case: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Detection {
    pub outcomes: Vec<TemplateOutcome>,
    /// Detected types, by increasing order.
    pub detected: Vec<GroupType>,
    /// Whether every template was decided.
    pub complete: bool,
}

impl Detection {
    pub fn is_detected(&self, g: &GroupType) -> bool {
        self.detected.contains(g)
    }
}

fn target_for(t: &NormalFormTemplate, enc: ParamEncoding) -> Target {
    Target::Template(t.clone(), enc)
}

/// Label of the first case in which `y^2 = D` has the normal form `t` over
/// the algebraic closure.
pub fn template_solvable(
    curve: &Curve,
    t: &NormalFormTemplate,
    enc: ParamEncoding,
) -> Result<Option<String>, AutError> {
    if t.gtype == GroupType::Trivial {
        return Ok((t.degree == curve.d.degree().unwrap()).then(|| "identity".to_string()));
    }
    let target = target_for(t, enc);
    for kind in CaseKind::ALL {
        for sys in basis_change::case_systems(&curve.d, &target, kind, false)? {
            if groebner::is_solvable_over_closure(&sys.ideal()) {
                return Ok(Some(sys.label()));
            }
        }
    }
    Ok(None)
}

fn sort_types(v: &mut Vec<GroupType>) {
    v.sort_by_key(|g| (g.order(), *g));
    v.dedup();
}

pub fn detect_types(curve: &Curve, opts: &AutOptions) -> Result<Detection, AutError> {
    let templates = enumerate_templates(curve.genus, curve.field().characteristic(), &opts.catalog);
    let mut outcomes = Vec::new();
    let mut detected = Vec::new();
    match opts.strategy {
        Strategy::Exhaustive => {
            for t in templates {
                let case = template_solvable(curve, &t, opts.encoding)?;
                if case.is_some() {
                    detected.push(t.gtype);
                }
                outcomes.push(TemplateOutcome { template: t, solvable: case.is_some(), case });
            }
        }
        Strategy::LargestFirst => {
            let mut by_type: BTreeMap<(std::cmp::Reverse<u64>, GroupType), Vec<NormalFormTemplate>> = BTreeMap::new();
            for t in templates {
                by_type.entry((std::cmp::Reverse(t.gtype.order()), t.gtype)).or_default().push(t);
            }
            'types: for ((_, g), ts) in by_type {
                for t in ts {
                    let case = template_solvable(curve, &t, opts.encoding)?;
                    let hit = case.is_some();
                    outcomes.push(TemplateOutcome { template: t, solvable: hit, case });
                    if hit {
                        detected.push(g);
                        if g != GroupType::Trivial {
                            detected.push(GroupType::Trivial);
                        }
                        break 'types;
                    }
                }
            }
        }
    }
    if !detected.contains(&GroupType::Trivial) {
        detected.push(GroupType::Trivial);
    }
    sort_types(&mut detected);
    Ok(Detection { outcomes, detected, complete: opts.strategy == Strategy::Exhaustive })
}

// ---------------------------------------------------------------------------
// Automorphisms as matrices

/// `t -> (a t + b)/(c t + d)`, `u -> kappa u / (c t + d)^(g+1)` over `field`,
/// with the first nonzero matrix entry equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AutDescription {
    pub name: String,
    pub matrix: [FieldElement; 4],
    pub kappa: FieldElement,
}

/// Arithmetic of automorphisms of a fixed curve over a fixed field.
#[derive(Clone, Debug)]
pub struct AutAlgebra {
    pub field: FieldSpec,
    pub genus: usize,
}

type Elem = ([FieldElement; 4], FieldElement);

impl AutAlgebra {
    pub fn normalize(&self, m: [FieldElement; 4], kappa: FieldElement) -> Elem {
        let f = &self.field;
        let lead = m.iter().find(|x| !f.is_zero(x)).expect("nonsingular matrix").clone();
        let inv = f.inv(&lead).unwrap();
        let m = m.map(|x| f.mul(&x, &inv));
        let kappa = f.mul(&kappa, &f.pow(&inv, self.genus as u64 + 1));
        (m, kappa)
    }

    pub fn identity(&self) -> Elem {
        let f = &self.field;
        ([f.one(), f.zero(), f.zero(), f.one()], f.one())
    }

    /// `a` after `b`, as maps of points.
    pub fn compose(&self, a: &Elem, b: &Elem) -> Elem {
        let f = &self.field;
        let (x, y) = (&a.0, &b.0);
        let mm = |i: usize, j: usize, k: usize, l: usize| f.add(&f.mul(&x[i], &y[j]), &f.mul(&x[k], &y[l]));
        let m = [mm(0, 0, 1, 2), mm(0, 1, 1, 3), mm(2, 0, 3, 2), mm(2, 1, 3, 3)];
        self.normalize(m, f.mul(&a.1, &b.1))
    }

    pub fn inverse(&self, a: &Elem) -> Elem {
        let f = &self.field;
        let [p, q, r, s] = &a.0;
        let det = f.sub(&f.mul(p, s), &f.mul(q, r));
        let kappa = f.div(&f.pow(&det, self.genus as u64 + 1), &a.1).unwrap();
        self.normalize([s.clone(), f.neg(q), f.neg(r), p.clone()], kappa)
    }

    pub fn describe(&self, name: &str, e: &Elem) -> AutDescription {
        AutDescription { name: name.into(), matrix: e.0.clone(), kappa: e.1.clone() }
    }

    pub fn elem(&self, d: &AutDescription) -> Elem {
        self.normalize(d.matrix.clone(), d.kappa.clone())
    }

    pub fn is_valid(&self, d: &UPoly, e: &Elem) -> bool {
        generator_is_valid(d, self.genus, &e.0, &e.1)
    }

    /// Degree over GF(p) of the field generated by the coefficients.
    pub fn coefficient_degree(&self, e: &Elem) -> usize {
        let f = &self.field;
        e.0.iter().chain([&e.1]).map(|x| f.element_degree(x)).fold(1, lcm)
    }

    /// `var -> ...; w -> ...` text of an element.
    pub fn format(&self, e: &Elem, var: &str, fun: &str) -> String {
        let f = &self.field;
        // scale so that the denominator is monic
        let lead = if f.is_zero(&e.0[2]) { &e.0[3] } else { &e.0[2] };
        let s = f.inv(lead).unwrap();
        let m: Vec<FieldElement> = e.0.iter().map(|x| f.mul(x, &s)).collect();
        let e = (m, f.mul(&e.1, &f.pow(&s, self.genus as u64 + 1)));
        let num = UPoly::from_coeffs(f, vec![e.0[1].clone(), e.0[0].clone()]);
        let den = UPoly::from_coeffs(f, vec![e.0[3].clone(), e.0[2].clone()]);
        let paren = |p: &UPoly| {
            let s = p.display(var);
            if s.contains(' ') || s.contains('*') {
                format!("({s})")
            } else {
                s
            }
        };
        let kappa = f.format(&e.1);
        let kappa_u = if f.is_one(&e.1) {
            fun.to_string()
        } else if kappa == format!("{}", f.characteristic() - 1) {
            format!("-{fun}")
        } else if kappa.contains('+') {
            format!("({kappa})*{fun}")
        } else {
            format!("{kappa}*{fun}")
        };
        if den.is_one() {
            format!("{var} -> {}; {fun} -> {kappa_u}", num.display(var))
        } else {
            let g1 = self.genus + 1;
            format!("{var} -> {}/{}; {fun} -> {kappa_u}/{}^{g1}", paren(&num), paren(&den), paren(&den))
        }
    }
}

// ---------------------------------------------------------------------------
// Realization of a type

/// A type realized by explicit automorphisms over a finite field.
#[derive(Clone, Debug)]
pub struct Realization {
    pub template: NormalFormTemplate,
    pub witness: TypeWitness,
    /// Field of the generators, with the embedding of the base field.
    pub extension: Extension,
    /// Degree of `extension` over the base field.
    pub degree: usize,
    pub algebra: AutAlgebra,
    pub d_t: UPoly,
    /// Generators on `(t, u)`.
    pub raw: Vec<AutDescription>,
    /// The same generators on `(x, y)`.
    pub transported: Vec<AutDescription>,
    /// Named constants used by the generators.
    pub constants: Vec<(String, FieldElement)>,
}

fn ea_linearized(t: &NormalFormTemplate, w: &TypeWitness) -> Option<UPoly> {
    let GroupType::ElemAbelian(p, m) = t.gtype else { return None };
    let f = w.field();
    let mut l = UPoly::monomial(f, f.one(), p.pow(m) as usize);
    for i in 0..m as usize {
        l = l.add(&UPoly::monomial(f, w.params[i].clone(), p.pow(i as u32) as usize));
    }
    Some(l)
}

/// Degree over the base field of the smallest field holding the witness
/// coordinates and every constant of the generator recipes.
pub fn required_degree(base: &FieldSpec, t: &NormalFormTemplate, w: &TypeWitness) -> usize {
    let req = t.required_constants();
    let mut d = w.degree;
    if let Some(l) = ea_linearized(t, w) {
        let split = l.factor_degrees().into_iter().fold(1, lcm);
        d *= split;
    }
    if req.root_order > 1 {
        d = lcm(d, unity_degree(base, req.root_order));
    }
    if req.need_i {
        d = lcm(d, unity_degree(base, 4));
    }
    d
}

/// All witnesses of `t` with coordinates of degree at most `max_d`, with
/// their required degrees. With `first_only`, stops at the first case that
/// has any.
pub fn template_witnesses(
    curve: &Curve,
    t: &NormalFormTemplate,
    opts: &AutOptions,
    max_d: usize,
    first_only: bool,
) -> Result<Vec<(TypeWitness, usize)>, AutError> {
    let base = curve.field();
    if t.gtype == GroupType::Trivial {
        if t.degree != curve.d.degree().unwrap() {
            return Ok(Vec::new());
        }
        let w = TypeWitness {
            kind: CaseKind::Linear,
            extension: Extension { field: base.clone(), embedding: Embedding::identity(base) },
            degree: 1,
            matrix: [base.one(), base.zero(), base.zero(), base.one()],
            beta_sq: base.one(),
            beta: Some(base.one()),
            d_t: curve.d.clone(),
            params: Vec::new(),
            genus: curve.genus,
        };
        return Ok(vec![(w, 1)]);
    }
    let target = target_for(t, opts.encoding);
    let mut out = Vec::new();
    for kind in CaseKind::ALL {
        for sys in basis_change::case_systems(&curve.d, &target, kind, false)? {
            let ws = basis_change::solve_system(&curve.d, &target, &sys, max_d)?;
            for w in ws {
                let d = required_degree(base, t, &w);
                if d <= max_d {
                    out.push((w, d));
                }
            }
            if first_only && !out.is_empty() {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

/// Writes down the generators of `t` at witness `w` over the extension of
/// degree `degree` of the base field.
pub fn realize(curve: &Curve, t: &NormalFormTemplate, w: &TypeWitness, degree: usize) -> Result<Realization, AutError> {
    let wf = w.field().clone();
    let step = wf.extend(degree / w.degree);
    let f = step.field.clone();
    let extension = Extension { field: f.clone(), embedding: w.extension.embedding.then(&step.embedding) };
    let req = t.required_constants();
    let mut constants = Vec::new();
    let root = if req.root_order > 1 {
        let r = root_of_unity(&f, req.root_order)?;
        debug_assert_eq!(r.degree, 1);
        constants.push((format!("w (order {})", req.root_order), r.root.clone()));
        r.root
    } else {
        f.one()
    };
    let i = if req.need_i {
        let r = root_of_unity(&f, 4)?.root;
        constants.push(("i".to_string(), r.clone()));
        Some(r)
    } else {
        None
    };
    let translations = match ea_linearized(t, w) {
        Some(l) => {
            let roots = l.map(&step.embedding).roots();
            let basis = additive_basis(&f, &roots);
            for (k, a) in basis.iter().enumerate() {
                constants.push((format!("a{}", k + 1), a.clone()));
            }
            basis
        }
        None => Vec::new(),
    };
    let algebra = AutAlgebra { field: f.clone(), genus: curve.genus };
    let d_t = w.d_t.map(&step.embedding);
    let dx = curve.d.map(&extension.embedding);
    let mut raw = Vec::new();
    for g in t.generators(&f, &root, i.as_ref(), &translations) {
        let e = algebra.normalize(g.matrix, g.kappa);
        if !algebra.is_valid(&d_t, &e) {
            return Err(AutError::InvalidGenerator(g.name));
        }
        raw.push(algebra.describe(&g.name, &e));
    }
    // (t, u) -> (x, y) has matrix B; beta cancels under conjugation.
    let b = algebra.normalize(w.matrix.clone().map(|x| step.embedding.apply(&x)), f.one());
    let binv = algebra.inverse(&b);
    let mut transported = Vec::new();
    for g in &raw {
        let e = algebra.compose(&b, &algebra.compose(&algebra.elem(g), &binv));
        if !algebra.is_valid(&dx, &e) {
            return Err(AutError::InvalidGenerator(format!("{} (transported)", g.name)));
        }
        transported.push(algebra.describe(&g.name, &e));
    }
    Ok(Realization {
        template: t.clone(),
        witness: w.clone(),
        extension,
        degree,
        algebra,
        d_t,
        raw,
        transported,
        constants,
    })
}

/// Realizes a type over the smallest extension found in the first solvable
/// case of its templates.
pub fn realize_type(curve: &Curve, g: &GroupType, opts: &AutOptions) -> Result<Realization, AutError> {
    let templates: Vec<_> = enumerate_templates(curve.genus, curve.field().characteristic(), &opts.catalog)
        .into_iter()
        .filter(|t| t.gtype == *g)
        .collect();
    for t in &templates {
        let ws = template_witnesses(curve, t, opts, opts.max_d, true)?;
        if let Some((w, d)) = ws.into_iter().min_by_key(|(_, d)| *d) {
            return realize(curve, t, &w, d);
        }
    }
    Err(AutError::ExceedsMaxDegree { gtype: *g, max_d: opts.max_d })
}

#[derive(Clone, Debug)]
pub struct FieldOfDefinition {
    pub gtype: GroupType,
    pub degree: usize,
    pub template: NormalFormTemplate,
    pub witness: TypeWitness,
}

/// Smallest `d <= max_d` such that some normal form of type `g` has its basis
/// change and generator constants over GF(q^d).
pub fn field_of_definition(
    curve: &Curve,
    g: &GroupType,
    opts: &AutOptions,
    max_d: usize,
) -> Result<FieldOfDefinition, AutError> {
    let mut best: Option<FieldOfDefinition> = None;
    for t in enumerate_templates(curve.genus, curve.field().characteristic(), &opts.catalog) {
        if t.gtype != *g {
            continue;
        }
        for (w, d) in template_witnesses(curve, &t, opts, max_d, false)? {
            if best.as_ref().is_none_or(|b| d < b.degree) {
                best = Some(FieldOfDefinition { gtype: *g, degree: d, template: t.clone(), witness: w });
            }
        }
        if best.as_ref().is_some_and(|b| b.degree == 1) {
            break;
        }
    }
    best.ok_or(AutError::ExceedsMaxDegree { gtype: *g, max_d })
}

// ---------------------------------------------------------------------------
// Concrete groups

/// A finite group of automorphisms, enumerated.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub algebra: AutAlgebra,
    pub elements: Vec<Elem>,
    index: HashMap<Elem, usize>,
    pub generators: Vec<usize>,
}

impl AutGroup {
    /// Breadth-first closure of the generators.
    pub fn generate(algebra: &AutAlgebra, gens: &[AutDescription], cap: usize) -> Result<AutGroup, AutError> {
        let id = algebra.identity();
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let gen_elems: Vec<Elem> = gens.iter().map(|g| algebra.elem(g)).collect();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &gen_elems {
                let e = algebra.compose(&elements[i], g);
                if !index.contains_key(&e) {
                    if elements.len() >= cap {
                        return Err(AutError::GroupTooLarge(cap));
                    }
                    index.insert(e.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(e);
                }
            }
        }
        let generators = gen_elems.iter().map(|g| index[g]).collect();
        Ok(AutGroup { algebra: algebra.clone(), elements, index, generators })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.algebra.compose(&self.elements[a], &self.elements[b])]
    }

    pub fn position(&self, e: &Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Row `a`, column `b`: the index of `a` after `b`.
    pub fn multiplication_table(&self) -> Vec<Vec<usize>> {
        (0..self.order()).map(|a| (0..self.order()).map(|b| self.mul(a, b)).collect()).collect()
    }

    pub fn element_orders(&self) -> Vec<usize> {
        (0..self.order())
            .map(|a| {
                let (mut x, mut k) = (a, 1);
                while x != 0 {
                    x = self.mul(x, a);
                    k += 1;
                }
                k
            })
            .collect()
    }

    /// Subgroup generated by the given elements.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for &g in gens {
                let e = self.mul(i, g);
                if !seen[e] {
                    seen[e] = true;
                    out.push(e);
                    queue.push_back(e);
                }
            }
        }
        out
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order()).filter(|&z| self.generators.iter().all(|&g| self.mul(z, g) == self.mul(g, z))).collect()
    }

    /// Elements whose coefficients lie in the subfield of order `q`.
    pub fn rational_elements(&self, q: &num_bigint::BigUint) -> Vec<usize> {
        let f = &self.algebra.field;
        (0..self.order())
            .filter(|&i| {
                let (m, k) = &self.elements[i];
                m.iter().chain([k]).all(|x| f.pow_big(x, q) == *x)
            })
            .collect()
    }

    pub fn fingerprint(&self) -> String {
        fingerprint(self, &(0..self.order()).collect::<Vec<_>>(), &self.element_orders())
    }
}

fn fingerprint(g: &AutGroup, set: &[usize], orders: &[usize]) -> String {
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &a in set {
        *hist.entry(orders[a]).or_default() += 1;
    }
    let exponent = hist.keys().fold(1, |a, &b| lcm(a, b));
    let abelian = set.iter().all(|&a| set.iter().all(|&b| g.mul(a, b) == g.mul(b, a)));
    let center = set.iter().filter(|&&z| set.iter().all(|&b| g.mul(z, b) == g.mul(b, z))).count();
    let h: Vec<String> = hist.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    format!(
        "order {}, exponent {exponent}, {}, center {center}, element orders {{{}}}",
        set.len(),
        if abelian { "abelian" } else { "non-abelian" },
        h.join(", ")
    )
}

/// Cyclic, dihedral or elementary-abelian name of a subgroup, when it is one.
fn small_name(g: &AutGroup, set: &[usize], orders: &[usize]) -> Option<String> {
    let n = set.len();
    if set.iter().any(|&a| orders[a] == n) {
        return Some(format!("C{n}"));
    }
    if n % 2 == 0 && n >= 4 {
        let half = n / 2;
        for &x in set.iter().filter(|&&x| orders[x] == half) {
            let cyc = g.closure(&[x]);
            let xinv = cyc.iter().copied().find(|&y| g.mul(x, y) == 0).unwrap();
            if set.iter().any(|&y| orders[y] == 2 && !cyc.contains(&y) && g.mul(g.mul(y, x), y) == xinv) {
                return Some(format!("D{half}"));
            }
        }
    }
    let abelian = set.iter().all(|&a| set.iter().all(|&b| g.mul(a, b) == g.mul(b, a)));
    if abelian && n > 1 {
        let p = orders[set[1..].iter().copied().find(|&a| a != 0).unwrap()];
        let mut k = 1;
        let mut m = 0;
        while k < n {
            k *= p;
            m += 1;
        }
        if k == n && set.iter().all(|&a| a == 0 || orders[a] == p) {
            return Some(if m == 1 { format!("E({p})") } else { format!("E({p}^{m})") });
        }
    }
    None
}

/// Structure label of a group containing the hyperelliptic involution `phi`
/// (at generator position 0), with the type `g` of the quotient.
pub fn structure_label(group: &AutGroup, g: &GroupType) -> String {
    let orders = group.element_orders();
    let all: Vec<usize> = (0..group.order()).collect();
    let n = group.order();
    if all.iter().any(|&a| orders[a] == n) {
        return format!("C{n}");
    }
    let phi = group.generators[0];
    let others: Vec<usize> = group.generators[1..].to_vec();
    if group.center().contains(&phi) && others.len() < 12 {
        // complement: lifts of the quotient generators avoiding phi
        for mask in 0..(1u32 << others.len()) {
            let lifts: Vec<usize> = others
                .iter()
                .enumerate()
                .map(|(k, &s)| if mask >> k & 1 == 1 { group.mul(s, phi) } else { s })
                .collect();
            let h = group.closure(&lifts);
            if h.len() * 2 == n && !h.contains(&phi) {
                let name = small_name(group, &h, &orders).unwrap_or_else(|| {
                    if h.len() as u64 == g.order() {
                        g.label()
                    } else {
                        format!("[{}]", fingerprint(group, &h, &orders))
                    }
                });
                return format!("{name} x C2");
            }
        }
    }
    if let Some(name) = small_name(group, &all, &orders) {
        return name;
    }
    if group.center().contains(&phi) && n as u64 == 2 * g.order() {
        // no complement among the lifts: a non-split central extension
        return format!("2.{}", g.label());
    }
    format!("[{}]", fingerprint(group, &all, &orders))
}

// ---------------------------------------------------------------------------
// Orchestration

#[derive(Clone, Debug)]
pub struct AutGroupResult {
    pub curve: Curve,
    pub detection: Detection,
    pub largest: GroupType,
    /// Other detected types of the same order not contained in `largest`.
    pub ties: Vec<GroupType>,
    /// `2 |G|`.
    pub group_order: u64,
    pub realization: Option<Realization>,
    pub enumerated_order: Option<usize>,
    pub structure_label: Option<String>,
    /// Degree over the base field of the field generated by the coefficients
    /// of all automorphisms in `(x, y)` coordinates.
    pub automorphism_field_degree: Option<usize>,
    /// Automorphisms defined over the base field.
    pub rational_order: Option<usize>,
    pub issues: Vec<String>,
}

fn pick_largest(detected: &[GroupType]) -> (GroupType, Vec<GroupType>) {
    let max = detected.iter().map(|g| g.order()).max().unwrap_or(1);
    let top: Vec<GroupType> = detected.iter().copied().filter(|g| g.order() == max).collect();
    let largest = top.iter().copied().find(|g| top.iter().all(|h| is_subgroup(h, g))).unwrap_or(top[0]);
    let ties = top.into_iter().filter(|h| *h != largest && !is_subgroup(h, &largest)).collect();
    (largest, ties)
}

/// Catalog members without templates in this genus are not expected.
fn expected_subtypes(curve: &Curve, g: &GroupType, catalog: &Catalog) -> Vec<GroupType> {
    let mut v: Vec<GroupType> = enumerate_templates(curve.genus, curve.field().characteristic(), catalog)
        .into_iter()
        .map(|t| t.gtype)
        .filter(|h| is_subgroup(h, g))
        .collect();
    sort_types(&mut v);
    v
}

pub fn compute_aut_group(curve: &Curve, opts: &AutOptions) -> Result<AutGroupResult, AutError> {
    let detection = detect_types(curve, opts)?;
    let (largest, ties) = pick_largest(&detection.detected);
    let mut issues = Vec::new();
    if detection.complete {
        for h in expected_subtypes(curve, &largest, &opts.catalog) {
            if !detection.is_detected(&h) {
                issues.push(format!("subgroup type {h} of {largest} not detected"));
            }
        }
    }
    for h in &ties {
        issues.push(format!("{h} has the same order as {largest}"));
    }
    let mut result = AutGroupResult {
        curve: curve.clone(),
        detection,
        largest,
        ties,
        group_order: 2 * largest.order(),
        realization: None,
        enumerated_order: None,
        structure_label: None,
        automorphism_field_degree: None,
        rational_order: None,
        issues,
    };
    match realize_type(curve, &largest, opts) {
        Ok(real) => {
            let group = AutGroup::generate(&real.algebra, &real.transported, opts.group_cap)?;
            if group.order() as u64 != result.group_order {
                result.issues.push(format!(
                    "generators close to {} elements, expected {}",
                    group.order(),
                    result.group_order
                ));
            }
            let f = &real.algebra.field;
            let prime_degree = curve.field().degree();
            let coeff = group
                .generators
                .iter()
                .map(|&i| real.algebra.coefficient_degree(&group.elements[i]))
                .fold(prime_degree, lcm);
            result.automorphism_field_degree = Some(coeff / prime_degree);
            result.rational_order = Some(group.rational_elements(curve.field().order()).len());
            result.structure_label = Some(structure_label(&group, &largest));
            result.enumerated_order = Some(group.order());
            debug_assert!(f.degree() % prime_degree == 0);
            result.realization = Some(real);
        }
        Err(AutError::ExceedsMaxDegree { .. }) => {
            result.issues.push(format!("{largest} not realized within degree {}", opts.max_d));
        }
        Err(e) => return Err(e),
    }
    Ok(result)
}

/// `Aut(k(x,y)/k)` by the normal-form method: the largest detected type whose
/// field of definition is the base field.
#[derive(Clone, Debug)]
pub struct BaseResult {
    pub largest: GroupType,
    pub group_order: u64,
    pub field_of_definition: FieldOfDefinition,
    /// Types examined (from the top) that need a proper extension.
    pub rejected: Vec<GroupType>,
}

pub fn compute_over_base(curve: &Curve, detection: &Detection, opts: &AutOptions) -> Result<BaseResult, AutError> {
    let mut types = detection.detected.clone();
    types.sort_by_key(|g| std::cmp::Reverse((g.order(), *g)));
    let mut rejected = Vec::new();
    for g in types {
        match field_of_definition(curve, &g, opts, 1) {
            Ok(fod) => {
                return Ok(BaseResult { largest: g, group_order: 2 * g.order(), field_of_definition: fod, rejected })
            }
            Err(AutError::ExceedsMaxDegree { .. }) => rejected.push(g),
            Err(e) => return Err(e),
        }
    }
    unreachable!("the trivial type is defined over the base field")
}

impl fmt::Display for AutGroupResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "curve: y^2 = {} over {} (genus {})",
            self.curve.d.display("x"),
            self.curve.field(),
            self.curve.genus
        )?;
        let det: Vec<String> = self.detection.detected.iter().map(|g| g.label()).collect();
        writeln!(f, "detected types: {}", det.join(", "))?;
        writeln!(f, "largest: {}; |Aut| = {}", self.largest, self.group_order)?;
        if let Some(l) = &self.structure_label {
            writeln!(f, "structure: {l}")?;
        }
        if let Some(r) = &self.realization {
            writeln!(f, "normal form: u^2 = {} via {} over {}", r.d_t.display("t"), r.witness, r.extension.field)?;
            for (raw, tr) in r.raw.iter().zip(&r.transported) {
                writeln!(
                    f,
                    "  {}: {}   |   {}",
                    raw.name,
                    r.algebra.format(&r.algebra.elem(raw), "t", "u"),
                    r.algebra.format(&r.algebra.elem(tr), "x", "y")
                )?;
            }
        }
        for i in &self.issues {
            writeln!(f, "note: {i}")?;
        }
        Ok(())
    }
}
