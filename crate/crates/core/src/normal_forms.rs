//! Brandt normal forms for the catalog families: cyclic, elementary abelian,
//! dihedral and `PGL(2, p^m)`.
//!
//! A template is `D_t = F0(t) * prod_j (B(t) - a_j C(t))` with a fixed factor
//! `F0` and a block pair `(B, C)` determined by the type and its integer
//! parameters. The elementary abelian block `B = L(t)` is a linearized
//! polynomial with unknown coefficients.

use std::fmt;
use std::str::FromStr;

use crate::field::{FieldElement, FieldSpec};
use crate::mpoly::{MPoly, PolyRing};
use crate::upoly::UPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Cyclic,
    ElemAbelian,
    Dihedral,
    ProjGL,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Cyclic, Family::ElemAbelian, Family::Dihedral, Family::ProjGL];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cyclic => "cyclic",
            Family::ElemAbelian => "elementary-abelian",
            Family::Dihedral => "dihedral",
            Family::ProjGL => "pgl",
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cyclic" | "c" => Ok(Family::Cyclic),
            "elementary-abelian" | "elemabelian" | "ea" | "e" => Ok(Family::ElemAbelian),
            "dihedral" | "d" => Ok(Family::Dihedral),
            "pgl" | "projgl" => Ok(Family::ProjGL),
            other => Err(format!("unknown catalog family {other:?}")),
        }
    }
}

/// The families consulted during detection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    pub families: Vec<Family>,
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog { families: Family::ALL.to_vec() }
    }
}

impl Catalog {
    /// Comma separated family names, e.g. `cyclic,dihedral`.
    pub fn parse(list: &str) -> Result<Self, String> {
        let mut families: Vec<Family> =
            list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_, _>>()?;
        families.sort();
        families.dedup();
        Ok(Catalog { families })
    }

    pub fn contains(&self, f: Family) -> bool {
        self.families.contains(&f)
    }
}

/// Isomorphism type of `Aut / <hyperelliptic involution>` (or a subgroup of it).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupType {
    Trivial,
    Cyclic(u64),
    /// `(p, m)`: the additive group of order `p^m`.
    ElemAbelian(u64, u32),
    Dihedral(u64),
    /// `(p, m)`: `PGL(2, p^m)`.
    ProjGL(u64, u32),
}

impl GroupType {
    pub fn family(&self) -> Option<Family> {
        match self {
            GroupType::Trivial => None,
            GroupType::Cyclic(_) => Some(Family::Cyclic),
            GroupType::ElemAbelian(..) => Some(Family::ElemAbelian),
            GroupType::Dihedral(_) => Some(Family::Dihedral),
            GroupType::ProjGL(..) => Some(Family::ProjGL),
        }
    }

    pub fn order(&self) -> u64 {
        group_order(self)
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupType::Trivial => write!(f, "C1"),
            GroupType::Cyclic(n) => write!(f, "C{n}"),
            GroupType::ElemAbelian(p, 1) => write!(f, "E({p})"),
            GroupType::ElemAbelian(p, m) => write!(f, "E({p}^{m})"),
            GroupType::Dihedral(n) => write!(f, "D{n}"),
            GroupType::ProjGL(p, 1) => write!(f, "PGL(2,{p})"),
            GroupType::ProjGL(p, m) => write!(f, "PGL(2,{p}^{m})"),
        }
    }
}

pub fn group_order(g: &GroupType) -> u64 {
    match *g {
        GroupType::Trivial => 1,
        GroupType::Cyclic(n) => n,
        GroupType::ElemAbelian(p, m) => p.pow(m),
        GroupType::Dihedral(n) => 2 * n,
        GroupType::ProjGL(p, m) => {
            let r = p.pow(m);
            r * r * r - r
        }
    }
}

/// Whether `h` embeds into `g`, restricted to catalog members.
pub fn is_subgroup(h: &GroupType, g: &GroupType) -> bool {
    use GroupType::*;
    let pm = |p: u64, m: u32| p.pow(m);
    match (*h, *g) {
        (Trivial, _) => true,
        (_, Trivial) => false,
        (Cyclic(d), Cyclic(n)) => n % d == 0,
        (Cyclic(d), Dihedral(n)) => n % d == 0 || d == 2,
        (Dihedral(d), Dihedral(n)) => n % d == 0,
        (ElemAbelian(p, k), ElemAbelian(q, m)) => p == q && k <= m,
        (ElemAbelian(p, k), ProjGL(q, m)) => p == q && k <= m,
        (Cyclic(d), ProjGL(p, m)) | (Dihedral(d), ProjGL(p, m)) => {
            let r = pm(p, m);
            (r - 1) % d == 0 || (r + 1) % d == 0
        }
        (ProjGL(p, k), ProjGL(q, m)) => p == q && m % k == 0,
        _ => false,
    }
}

/// How the template parameters enter the polynomial system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamEncoding {
    /// The block roots `a_j` as variables, with every side condition.
    Roots,
    /// Elementary symmetric functions `e_k` of the `a_j`.
    Symmetric,
    /// No parameter variables: membership in the linear family is expressed
    /// by annihilating functionals. Elementary abelian templates fall back to
    /// [`ParamEncoding::Symmetric`].
    Eliminated,
}

/// One-parameter-group slices that make solution sets finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    None,
    /// `t -> lambda t` preserves the family.
    Torus,
    /// `t -> lambda t + b` preserves the family.
    Affine,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideConditions {
    pub c0: Vec<MPoly>,
    pub c1: Vec<MPoly>,
}

/// `D_t = v0 + sum_k x_k basis[k]` with `x_k = (-1)^k e_k`.
#[derive(Clone, Debug)]
pub struct LinearFamily {
    pub v0: UPoly,
    pub basis: Vec<UPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalFormTemplate {
    pub gtype: GroupType,
    /// `nu[0]` is `nu` for cyclic types, `(nu0, nu1, nu2)` for dihedral,
    /// `(nu0, nu1)` for PGL.
    pub nu: [u8; 3],
    pub s: usize,
    pub degree: usize,
    pub genus: usize,
}

/// Formal description of one generator of the type's automorphism subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorRecipe {
    pub name: String,
    pub t_image: String,
    pub u_image: String,
}

/// Constants the generators need to be written down.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RequiredConstants {
    /// Order of the root of unity `w` (1 when none is needed).
    pub root_order: u64,
    pub need_i: bool,
    /// Elementary abelian: the roots of `L`.
    pub translations: bool,
}

/// A concrete generator `t -> (a t + b)/(c t + d)`, `u -> kappa u / (c t + d)^(g+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoebiusGenerator {
    pub name: String,
    pub matrix: [FieldElement; 4],
    pub kappa: FieldElement,
}

fn pgl_s(f: &FieldSpec, r: usize) -> UPoly {
    UPoly::monomial(f, f.one(), r).sub(&UPoly::x(f))
}

fn pgl_w(f: &FieldSpec, r: usize) -> UPoly {
    pgl_s(f, r).pow(r as u64 - 1).add(&UPoly::one(f))
}

fn t_pow_pm(f: &FieldSpec, n: usize, sign: i64) -> UPoly {
    UPoly::monomial(f, f.one(), n).add(&UPoly::constant(f, f.from_i64(sign)))
}

impl NormalFormTemplate {
    pub fn family(&self) -> Option<Family> {
        self.gtype.family()
    }

    pub fn gauge(&self) -> Gauge {
        match self.gtype {
            GroupType::Cyclic(_) => Gauge::Torus,
            GroupType::ElemAbelian(..) => Gauge::Affine,
            _ => Gauge::None,
        }
    }

    /// `p^m` for the elementary abelian and PGL types.
    fn r(&self) -> usize {
        match self.gtype {
            GroupType::ElemAbelian(p, m) | GroupType::ProjGL(p, m) => p.pow(m) as usize,
            _ => 0,
        }
    }

    fn ea_m(&self) -> usize {
        match self.gtype {
            GroupType::ElemAbelian(_, m) => m as usize,
            _ => 0,
        }
    }

    pub fn fixed_factor(&self, f: &FieldSpec) -> UPoly {
        let [n0, n1, n2] = self.nu.map(|v| v as u64);
        match self.gtype {
            GroupType::Trivial | GroupType::Cyclic(_) => UPoly::monomial(f, f.one(), n0 as usize),
            GroupType::ElemAbelian(..) => UPoly::one(f),
            GroupType::Dihedral(n) => {
                let n = n as usize;
                UPoly::monomial(f, f.one(), n0 as usize)
                    .mul(&t_pow_pm(f, n, -1).pow(n1))
                    .mul(&t_pow_pm(f, n, 1).pow(n2))
            }
            GroupType::ProjGL(..) => {
                let r = self.r();
                pgl_s(f, r).pow(n0).mul(&pgl_w(f, r).pow(n1))
            }
        }
    }

    /// The block pair `(B, C)`; `None` for elementary abelian templates.
    pub fn block(&self, f: &FieldSpec) -> Option<(UPoly, UPoly)> {
        match self.gtype {
            GroupType::Trivial => Some((UPoly::x(f), UPoly::one(f))),
            GroupType::Cyclic(n) => Some((UPoly::monomial(f, f.one(), n as usize), UPoly::one(f))),
            GroupType::Dihedral(n) => {
                let n = n as usize;
                Some((t_pow_pm(f, 2 * n, 1), UPoly::monomial(f, f.one(), n)))
            }
            GroupType::ProjGL(..) => {
                let r = self.r();
                Some((pgl_w(f, r).pow(r as u64 + 1), pgl_s(f, r).pow((r * r - r) as u64)))
            }
            GroupType::ElemAbelian(..) => None,
        }
    }

    /// The affine-linear family of admissible `D_t` (not for elementary abelian).
    pub fn linear_family(&self, f: &FieldSpec) -> Option<LinearFamily> {
        let (b, c) = self.block(f)?;
        let f0 = self.fixed_factor(f);
        let mut bp = vec![UPoly::one(f)];
        let mut cp = vec![UPoly::one(f)];
        for _ in 0..self.s {
            bp.push(bp.last().unwrap().mul(&b));
            cp.push(cp.last().unwrap().mul(&c));
        }
        let v0 = f0.mul(&bp[self.s]);
        let basis = (1..=self.s).map(|k| f0.mul(&bp[self.s - k]).mul(&cp[k])).collect();
        Some(LinearFamily { v0, basis })
    }

    /// Parameter variable names for an encoding. Eliminated templates still
    /// need the linearized-polynomial coefficients and the symmetric
    /// functions in the elementary abelian case.
    pub fn param_names(&self, enc: ParamEncoding) -> Vec<String> {
        let mut names = Vec::new();
        let enc = self.effective_encoding(enc);
        for i in 0..self.ea_m() {
            names.push(format!("c{i}"));
        }
        match enc {
            ParamEncoding::Roots => names.extend((1..=self.s).map(|j| format!("a{j}"))),
            ParamEncoding::Symmetric => names.extend((1..=self.s).map(|j| format!("e{j}"))),
            ParamEncoding::Eliminated => {}
        }
        names
    }

    pub fn effective_encoding(&self, enc: ParamEncoding) -> ParamEncoding {
        if enc == ParamEncoding::Eliminated && matches!(self.gtype, GroupType::ElemAbelian(..)) {
            ParamEncoding::Symmetric
        } else {
            enc
        }
    }

    /// `D_t` as a polynomial in `ring`, with `t` at index `t` and the
    /// parameters (in [`Self::param_names`] order) at `params`.
    pub fn d_t(&self, ring: &PolyRing, t: usize, params: &[usize], enc: ParamEncoding) -> MPoly {
        let f = ring.field();
        let enc = self.effective_encoding(enc);
        assert_ne!(enc, ParamEncoding::Eliminated, "eliminated templates have no symbolic D_t");
        let m = self.ea_m();
        let (b, c) = match self.block(f) {
            Some((b, c)) => (ring.from_upoly(&b, t), ring.from_upoly(&c, t)),
            None => {
                let p = f.characteristic() as u32;
                let mut l = ring.var(t).pow(p.pow(m as u32));
                for (i, &v) in params[..m].iter().enumerate() {
                    l = l.add(&ring.var(v).mul(&ring.var(t).pow(p.pow(i as u32))));
                }
                (l, ring.one())
            }
        };
        let f0 = ring.from_upoly(&self.fixed_factor(f), t);
        let ps = &params[m..];
        let body = match enc {
            ParamEncoding::Roots => ps.iter().fold(ring.one(), |acc, &a| acc.mul(&b.sub(&ring.var(a).mul(&c)))),
            _ => {
                let mut acc = ring.zero();
                for k in 0..=self.s {
                    let mut term = b.pow((self.s - k) as u32).mul(&c.pow(k as u32));
                    if k > 0 {
                        term = term.mul(&ring.var(ps[k - 1]));
                    }
                    acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        };
        f0.mul(&body)
    }

    /// Side conditions on the parameters. Only the roots encoding carries
    /// them: in the other encodings each one is implied by separability of
    /// `D_t`, which the basis change guarantees.
    pub fn side_conditions(&self, ring: &PolyRing, params: &[usize], enc: ParamEncoding) -> SideConditions {
        let mut c1 = Vec::new();
        if self.effective_encoding(enc) == ParamEncoding::Roots {
            let m = self.ea_m();
            if m > 0 {
                c1.push(ring.var(params[0]));
            }
            let a: Vec<MPoly> = params[m..].iter().map(|&v| ring.var(v)).collect();
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    c1.push(a[i].sub(&a[j]));
                }
            }
            for aj in &a {
                match self.gtype {
                    GroupType::Trivial | GroupType::Cyclic(_) | GroupType::ProjGL(..) => c1.push(aj.clone()),
                    GroupType::Dihedral(_) => c1.push(aj.mul(aj).sub(&ring.int(4))),
                    GroupType::ElemAbelian(..) => {}
                }
            }
        }
        SideConditions { c0: Vec::new(), c1 }
    }

    /// Human-readable form in the roots encoding.
    pub fn formula(&self) -> String {
        let t = "t";
        let [n0, n1, n2] = self.nu;
        let mut factors: Vec<String> = Vec::new();
        let powf = |base: String, e: u8| if e == 0 { None } else { Some(base) };
        let block: Box<dyn Fn(usize) -> String> = match self.gtype {
            GroupType::Trivial => {
                factors.extend(powf(t.into(), n0));
                Box::new(|j| format!("t - a{j}"))
            }
            GroupType::Cyclic(n) => {
                factors.extend(powf(t.into(), n0));
                Box::new(move |j| format!("t^{n} - a{j}"))
            }
            GroupType::Dihedral(n) => {
                factors.extend(powf(t.into(), n0));
                factors.extend(powf(format!("t^{n} - 1"), n1));
                factors.extend(powf(format!("t^{n} + 1"), n2));
                Box::new(move |j| format!("t^{} - a{j}*t^{n} + 1", 2 * n))
            }
            GroupType::ElemAbelian(p, m) => {
                let mut l = format!("t^{}", p.pow(m));
                for i in (0..m).rev() {
                    let e = p.pow(i);
                    l += &if e == 1 { format!(" + c{i}*t") } else { format!(" + c{i}*t^{e}") };
                }
                Box::new(move |j| format!("{l} - a{j}"))
            }
            GroupType::ProjGL(..) => {
                let r = self.r();
                let s = format!("t^{r} - t");
                factors.extend(powf(s.clone(), n0));
                factors.extend(powf(format!("({s})^{} + 1", r - 1), n1));
                Box::new(move |j| format!("(({s})^{} + 1)^{} - a{j}*({s})^{}", r - 1, r + 1, r * r - r))
            }
        };
        factors.extend((1..=self.s).map(block));
        match factors.len() {
            0 => "1".into(),
            1 => factors.pop().unwrap(),
            _ => factors
                .iter()
                .map(|f| if f.contains(' ') { format!("({f})") } else { f.clone() })
                .collect::<Vec<_>>()
                .join("*"),
        }
    }

    /// The exponent of `t` in the denominator of the involutive generator's
    /// `u`-image: always `g + 1`.
    pub fn inversion_exponent(&self) -> usize {
        self.genus + 1
    }

    pub fn required_constants(&self) -> RequiredConstants {
        let [n0, n1, _] = self.nu;
        let (root_order, need_i) = match self.gtype {
            GroupType::Trivial | GroupType::ElemAbelian(..) => (1, false),
            GroupType::Cyclic(n) => (n * (1 + n0 as u64), false),
            GroupType::Dihedral(n) => (n * (1 + n0 as u64), n1 == 1),
            GroupType::ProjGL(..) => ((self.r() as u64 - 1) * (1 + n0 as u64), n0 == 1),
        };
        RequiredConstants { root_order, need_i, translations: matches!(self.gtype, GroupType::ElemAbelian(..)) }
    }

    pub fn recipes(&self) -> Vec<GeneratorRecipe> {
        let [n0, n1, _] = self.nu;
        let e = self.inversion_exponent();
        let rec = |name: &str, t: String, u: String| GeneratorRecipe { name: name.into(), t_image: t, u_image: u };
        let eta_u = |nu: u8| if nu == 1 { "eta*u".to_string() } else { "u".to_string() };
        let mut out = vec![rec("phi", "t".into(), "-u".into())];
        match self.gtype {
            GroupType::Trivial => {}
            GroupType::Cyclic(_) => out.push(rec("psi", "eta^2*t".into(), eta_u(n0))),
            GroupType::ElemAbelian(..) => out.push(rec("psi_a", "t + a (a in A)".into(), "u".into())),
            GroupType::Dihedral(_) => {
                out.push(rec("psi", "eta^2*t".into(), eta_u(n0)));
                let k = if n1 == 1 { "i*u" } else { "u" };
                out.push(rec("sigma", "1/t".into(), format!("{k}/t^{e}")));
            }
            GroupType::ProjGL(..) => {
                out.push(rec("psi", "eta^2*t".into(), eta_u(n0)));
                out.push(rec("sigma", "t + 1".into(), "u".into()));
                let k = if n0 == 1 { "i*u" } else { "u" };
                out.push(rec("tau", "1/t".into(), format!("{k}/t^{e}")));
            }
        }
        out
    }

    /// Concrete generators over `f`. `w` has order `root_order`, `i` squares
    /// to -1, and `translations` spans the root group of `L`.
    pub fn generators(
        &self,
        f: &FieldSpec,
        w: &FieldElement,
        i: Option<&FieldElement>,
        translations: &[FieldElement],
    ) -> Vec<MoebiusGenerator> {
        let [n0, n1, _] = self.nu;
        let (z, o) = (f.zero(), f.one());
        let gen = |name: &str, m: [&FieldElement; 4], k: FieldElement| MoebiusGenerator {
            name: name.into(),
            matrix: m.map(Clone::clone),
            kappa: k,
        };
        let ipow = |nu: u8| if nu == 1 { i.expect("i required").clone() } else { f.one() };
        let zeta = |nu: u8| if nu == 1 { f.square(w) } else { w.clone() };
        let etanu = |nu: u8| if nu == 1 { w.clone() } else { f.one() };
        let mut out = vec![gen("phi", [&o, &z, &z, &o], f.neg(&o))];
        let inv = [&z, &o, &o, &z];
        match self.gtype {
            GroupType::Trivial => {}
            GroupType::Cyclic(_) => out.push(gen("psi", [&zeta(n0), &z, &z, &o], etanu(n0))),
            GroupType::ElemAbelian(..) => {
                for (k, a) in translations.iter().enumerate() {
                    out.push(gen(&format!("psi_a{}", k + 1), [&o, a, &z, &o], o.clone()));
                }
            }
            GroupType::Dihedral(_) => {
                out.push(gen("psi", [&zeta(n0), &z, &z, &o], etanu(n0)));
                out.push(gen("sigma", inv, ipow(n1)));
            }
            GroupType::ProjGL(..) => {
                out.push(gen("psi", [&zeta(n0), &z, &z, &o], etanu(n0)));
                out.push(gen("sigma", [&o, &o, &z, &o], o.clone()));
                out.push(gen("tau", inv, ipow(n0)));
            }
        }
        out
    }
}

/// Exact check of `kappa^2 D(t) = (c t + d)^(2g+2) D((a t + b)/(c t + d))`.
pub fn generator_is_valid(d: &UPoly, genus: usize, matrix: &[FieldElement; 4], kappa: &FieldElement) -> bool {
    let f = d.field();
    let num = UPoly::from_coeffs(f, vec![matrix[1].clone(), matrix[0].clone()]);
    let den = UPoly::from_coeffs(f, vec![matrix[3].clone(), matrix[2].clone()]);
    let lhs = d.homogeneous_compose(&num, &den, 2 * genus + 2);
    lhs == d.scale(&f.square(kappa))
}

/// An `F_p`-basis of the additive group spanned by `elems`.
pub fn additive_basis(f: &FieldSpec, elems: &[FieldElement]) -> Vec<FieldElement> {
    let p = f.characteristic();
    let mut span = vec![f.zero()];
    let mut basis = Vec::new();
    for a in elems {
        if span.contains(a) {
            continue;
        }
        let mut next = Vec::with_capacity(span.len() * p as usize);
        for k in 0..p {
            let ka = f.scale_prime(a, k);
            next.extend(span.iter().map(|s| f.add(s, &ka)));
        }
        span = next;
        basis.push(a.clone());
    }
    basis
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// All templates of genus `g` in characteristic `p` for the given catalog,
/// the trivial type first.
pub fn enumerate_templates(g: usize, p: u64, catalog: &Catalog) -> Vec<NormalFormTemplate> {
    let degs = [2 * g + 1, 2 * g + 2];
    let mut out = Vec::new();
    let mut push = |gtype, nu, s, degree| out.push(NormalFormTemplate { gtype, nu, s, degree, genus: g });
    for &d in &degs {
        push(GroupType::Trivial, [0, 0, 0], d, d);
    }
    let max = 2 * g + 2;
    if catalog.contains(Family::Cyclic) {
        for n in 2..=max as u64 {
            if gcd_u64(n, p) != 1 {
                continue;
            }
            for nu in 0..=1u8 {
                for s in 1..=max {
                    let d = nu as usize + n as usize * s;
                    if degs.contains(&d) {
                        push(GroupType::Cyclic(n), [nu, 0, 0], s, d);
                    }
                }
            }
        }
    }
    if catalog.contains(Family::ElemAbelian) {
        let mut m = 1u32;
        while (p.pow(m) as usize) <= max {
            let r = p.pow(m) as usize;
            for s in 1..=max {
                if degs.contains(&(r * s)) {
                    push(GroupType::ElemAbelian(p, m), [0, 0, 0], s, r * s);
                }
            }
            m += 1;
        }
    }
    if catalog.contains(Family::Dihedral) {
        for n in 2..=max as u64 {
            if gcd_u64(n, p) != 1 {
                continue;
            }
            let nn = n as usize;
            for n0 in 0..=1u8 {
                for n1 in 0..=1u8 {
                    for n2 in 0..=1u8 {
                        if (n == 2 || n % 2 == 1) && n1 != n2 {
                            continue;
                        }
                        for s in 0..=max {
                            let d = n0 as usize + nn * (n1 + n2) as usize + 2 * nn * s;
                            if degs.contains(&d) {
                                push(GroupType::Dihedral(n), [n0, n1, n2], s, d);
                            }
                        }
                    }
                }
            }
        }
    }
    if catalog.contains(Family::ProjGL) {
        let mut m = 1u32;
        while (p.pow(m) as usize) <= max {
            let r = p.pow(m) as usize;
            for n0 in 0..=1u8 {
                for n1 in 0..=1u8 {
                    for s in 0..=max {
                        let d = r * n0 as usize + r * (r - 1) * n1 as usize + r * (r * r - 1) * s;
                        if degs.contains(&d) {
                            push(GroupType::ProjGL(p, m), [n0, n1, 0], s, d);
                        }
                    }
                }
            }
            m += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, root_of_unity};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all() -> Catalog {
        Catalog::default()
    }

    #[test]
    fn dihedral_three_genus_two() {
        let ts: Vec<_> =
            enumerate_templates(2, 7, &all()).into_iter().filter(|t| t.gtype == GroupType::Dihedral(3)).collect();
        let mut forms: Vec<String> = ts.iter().map(|t| t.formula()).collect();
        forms.sort();
        assert_eq!(forms, vec!["(t^3 - 1)*(t^3 + 1)", "t^6 - a1*t^3 + 1"]);
    }

    #[test]
    fn pgl3_genus_two() {
        let ts: Vec<_> =
            enumerate_templates(2, 3, &all()).into_iter().filter(|t| t.gtype == GroupType::ProjGL(3, 1)).collect();
        assert_eq!(ts.len(), 1);
        assert_eq!((ts[0].nu, ts[0].s, ts[0].degree), ([0, 1, 0], 0, 6));
        let f = make_field(3, 1).unwrap();
        let expect = UPoly::from_ints(&f, &[0, -1, 0, 1]).pow(2).add(&UPoly::one(&f));
        assert_eq!(ts[0].linear_family(&f).unwrap().v0, expect);
    }

    #[test]
    fn cyclic_five_genus_two() {
        let ts: Vec<_> =
            enumerate_templates(2, 7, &all()).into_iter().filter(|t| t.gtype == GroupType::Cyclic(5)).collect();
        let params: Vec<_> = ts.iter().map(|t| (t.nu[0], t.s, t.degree)).collect();
        assert_eq!(params, vec![(0, 1, 5), (1, 1, 6)]);
    }

    #[test]
    fn degrees_are_admissible() {
        for (g, p) in [(2, 3), (2, 5), (2, 7), (3, 3), (3, 11), (4, 3), (4, 5), (5, 11)] {
            let f = make_field(p, 1).unwrap();
            for t in enumerate_templates(g, p, &all()) {
                assert!(t.degree == 2 * g + 1 || t.degree == 2 * g + 2);
                let names = t.param_names(ParamEncoding::Symmetric);
                let mut vars = vec!["t".to_string()];
                vars.extend(names.iter().cloned());
                let ring = PolyRing::new(&f, &vars);
                let params: Vec<usize> = (1..vars.len()).collect();
                let dt = t.d_t(&ring, 0, &params, ParamEncoding::Symmetric);
                assert_eq!(dt.degree_in(0), Some(t.degree as u32), "{}", t.formula());
                let lead = dt.coefficients_in(0).pop().unwrap();
                assert!(lead.as_constant().is_some_and(|c| f.is_one(&c)));
            }
        }
    }

    #[test]
    fn side_condition_sets() {
        let f = make_field(7, 1).unwrap();
        let t = NormalFormTemplate { gtype: GroupType::Cyclic(3), nu: [0, 0, 0], s: 2, degree: 6, genus: 2 };
        let ring = PolyRing::new(&f, &["t", "a1", "a2"]);
        let sc = t.side_conditions(&ring, &[1, 2], ParamEncoding::Roots);
        let a1 = ring.var(1);
        let a2 = ring.var(2);
        for want in [a1.clone(), a2.clone(), a1.sub(&a2)] {
            assert!(sc.c1.contains(&want));
        }
        let t = NormalFormTemplate { gtype: GroupType::Dihedral(3), nu: [0, 0, 0], s: 1, degree: 6, genus: 2 };
        let ring = PolyRing::new(&f, &["t", "a1"]);
        let sc = t.side_conditions(&ring, &[1], ParamEncoding::Roots);
        assert_eq!(sc.c1, vec![ring.var(1).pow(2).sub(&ring.int(4))]);
        let t = NormalFormTemplate { gtype: GroupType::Dihedral(3), nu: [0, 1, 1], s: 0, degree: 6, genus: 2 };
        assert!(t.side_conditions(&ring, &[], ParamEncoding::Roots).c1.is_empty());
    }

    #[test]
    fn orders() {
        assert_eq!(group_order(&GroupType::Dihedral(6)), 12);
        assert_eq!(group_order(&GroupType::ProjGL(5, 1)), 120);
        assert_eq!(group_order(&GroupType::ElemAbelian(3, 2)), 9);
        assert_eq!(group_order(&GroupType::Trivial), 1);
    }

    #[test]
    fn subgroup_table() {
        use GroupType::*;
        assert!(is_subgroup(&Cyclic(3), &Dihedral(6)));
        assert!(is_subgroup(&Cyclic(2), &Dihedral(3)));
        assert!(is_subgroup(&Dihedral(3), &Dihedral(6)));
        assert!(!is_subgroup(&Dihedral(4), &Dihedral(6)));
        assert!(is_subgroup(&Dihedral(6), &ProjGL(5, 1)));
        assert!(is_subgroup(&Cyclic(4), &ProjGL(3, 1)));
        assert!(!is_subgroup(&Cyclic(3), &ProjGL(3, 1)));
        assert!(is_subgroup(&ElemAbelian(3, 1), &ProjGL(3, 2)));
        assert!(is_subgroup(&ProjGL(3, 1), &ProjGL(3, 2)));
        assert!(!is_subgroup(&ProjGL(3, 2), &ProjGL(3, 3)));
    }

    /// Random parameters, a field holding the needed constants, and the
    /// resulting concrete `D_t` for every catalog template.
    fn check_generators(g: usize, p: u64, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = make_field(p, 1).unwrap();
        for t in enumerate_templates(g, p, &all()) {
            let req = t.required_constants();
            let mut d = root_of_unity(&base, req.root_order).unwrap().degree;
            if req.need_i {
                d = crate::groebner::lcm(d, root_of_unity(&base, 4).unwrap().degree);
            }
            let ext = base.extend(d);
            let f = ext.field.clone();
            let names = t.param_names(ParamEncoding::Roots);
            let mut vars = vec!["t".to_string()];
            vars.extend(names.iter().cloned());
            let ring = PolyRing::new(&f, &vars);
            let params: Vec<usize> = (1..vars.len()).collect();
            let dt = t.d_t(&ring, 0, &params, ParamEncoding::Roots);
            let values: Vec<FieldElement> =
                (0..vars.len()).map(|k| if k == 0 { f.zero() } else { f.random(&mut rng) }).collect();
            let mut conc = dt.clone();
            for k in 1..vars.len() {
                conc = conc.substitute(k, &values[k]);
            }
            let dtu = conc.to_upoly(0).unwrap();
            let w = root_of_unity(&f, req.root_order).unwrap().root;
            let i = root_of_unity(&f, 4).ok().filter(|r| r.degree == 1).map(|r| r.root);
            let trans = if req.translations {
                let m = t.ea_m();
                let mut lin = UPoly::monomial(&f, f.one(), p.pow(m as u32) as usize);
                for k in 0..m {
                    lin = lin.add(&UPoly::monomial(&f, values[1 + k].clone(), p.pow(k as u32) as usize));
                }
                let roots = lin.roots();
                if roots.len() != p.pow(m as u32) as usize {
                    continue;
                }
                additive_basis(&f, &roots)
            } else {
                Vec::new()
            };
            for gen in t.generators(&f, &w, i.as_ref(), &trans) {
                assert!(
                    generator_is_valid(&dtu, g, &gen.matrix, &gen.kappa),
                    "{} {} {}",
                    t.gtype,
                    t.formula(),
                    gen.name
                );
            }
        }
    }

    #[test]
    fn generators_satisfy_curve_identity() {
        check_generators(2, 7, 1);
        check_generators(2, 5, 2);
        check_generators(2, 3, 3);
        check_generators(3, 3, 4);
        check_generators(4, 3, 5);
        check_generators(4, 5, 6);
        check_generators(3, 11, 7);
    }

    #[test]
    fn other_exponents_break_the_identity() {
        // Dihedral(3), s = 1: the exponent 2ns + n(nu1+nu2)/2 + 2nu0 = 6 is not g + 1 = 3.
        let f = make_field(7, 1).unwrap();
        let d = UPoly::from_ints(&f, &[1, 0, 0, -3, 0, 0, 1]);
        let (z, o) = (f.zero(), f.one());
        let inv = [z.clone(), o.clone(), o.clone(), z.clone()];
        assert!(generator_is_valid(&d, 2, &inv, &o));
        let t6 = UPoly::monomial(&f, o.clone(), 6);
        let reversed = d.homogeneous_compose(&UPoly::one(&f), &UPoly::x(&f), 6);
        assert_eq!(reversed, d);
        assert_ne!(reversed.mul(&t6), d);
        // PGL(2,3), nu0 = nu1 = 1: tau without the factor i fails.
        let f = make_field(3, 2).unwrap();
        let t = NormalFormTemplate { gtype: GroupType::ProjGL(3, 1), nu: [1, 1, 0], s: 0, degree: 9, genus: 4 };
        let d = t.fixed_factor(&f);
        let (z, o) = (f.zero(), f.one());
        let inv = [z.clone(), o.clone(), o.clone(), z.clone()];
        assert!(!generator_is_valid(&d, 4, &inv, &o));
        let i = f.sqrt(&f.neg(&o)).unwrap();
        assert!(generator_is_valid(&d, 4, &inv, &i));
    }

    #[test]
    fn eliminated_family_matches_symmetric() {
        let f = make_field(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for t in enumerate_templates(3, 5, &all()) {
            let Some(lf) = t.linear_family(&f) else { continue };
            let mut vars = vec!["t".to_string()];
            vars.extend(t.param_names(ParamEncoding::Symmetric));
            let ring = PolyRing::new(&f, &vars);
            let params: Vec<usize> = (1..vars.len()).collect();
            let dt = t.d_t(&ring, 0, &params, ParamEncoding::Symmetric);
            let e: Vec<FieldElement> = (0..t.s).map(|_| f.from_u64(rng.gen_range(0..5))).collect();
            let mut conc = dt;
            for (k, v) in e.iter().enumerate() {
                conc = conc.substitute(k + 1, v);
            }
            let mut want = lf.v0.clone();
            for (k, b) in lf.basis.iter().enumerate() {
                let x = if k % 2 == 0 { f.neg(&e[k]) } else { e[k].clone() };
                want = want.add(&b.scale(&x));
            }
            assert_eq!(conc.to_upoly(0).unwrap(), want, "{}", t.formula());
        }
    }
}
