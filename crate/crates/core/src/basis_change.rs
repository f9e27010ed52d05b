//! Changes of generators `x = (a0 t + a1)/(a2 t + a3)` between two
//! hyperelliptic models and the polynomial systems deciding their existence.
//!
//! With `y = beta u / (a2 t + a3)^(g+1)`, the model `u^2 = D_t(t)` arises from
//! `y^2 = D_x(x)` iff `beta^2 D_t = D_x^h(a0 t + a1, a2 t + a3)`, where `D_x^h`
//! is `D_x` homogenized to degree `2g+2`. Three normalizations cover every
//! substitution: `a2 = 0, a3 = 1` (linear), and `a2 = 1` split by whether
//! `D_x(a0)` vanishes.

use std::fmt;

use thiserror::Error;

use crate::field::{Extension, FieldElement, FieldSpec};
use crate::groebner::{self, GbError, Ideal};
use crate::mpoly::{MPoly, MonomialOrder, PolyRing};
use crate::normal_forms::{Gauge, LinearFamily, NormalFormTemplate, ParamEncoding};
use crate::upoly::UPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasisError {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("degree {0} does not define a curve of genus at least 2")]
    BadDegree(usize),
    #[error("target degree {target} does not match genus {genus}")]
    DegreeMismatch { target: usize, genus: usize },
    #[error("polynomials live over different fields")]
    FieldMismatch,
    #[error(transparent)]
    Groebner(#[from] GbError),
}

/// Genus of `y^2 = D` for a monic separable `D` of degree at least 5.
pub fn curve_genus(d: &UPoly) -> Result<usize, BasisError> {
    let deg = d.degree().unwrap_or(0);
    if deg < 5 {
        return Err(BasisError::BadDegree(deg));
    }
    if !d.is_monic() {
        return Err(BasisError::NotMonic);
    }
    if !d.is_separable() {
        return Err(BasisError::NotSeparable);
    }
    Ok((deg - 1) / 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseKind {
    /// `x = a0 t + a1`.
    Linear,
    /// `x = (a0 t + a1)/(t + a3)` with `D_x(a0) != 0`.
    MoebiusNonRoot,
    /// `x = (a0 t + a1)/(t + a3)` with `D_x(a0) = 0`.
    MoebiusRoot,
}

impl CaseKind {
    pub const ALL: [CaseKind; 3] = [CaseKind::Linear, CaseKind::MoebiusNonRoot, CaseKind::MoebiusRoot];

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Linear => "linear",
            CaseKind::MoebiusNonRoot => "moebius",
            CaseKind::MoebiusRoot => "moebius-root",
        }
    }

    pub fn is_moebius(self) -> bool {
        self != CaseKind::Linear
    }
}

/// Values pinned for `(a0, a1, a3)`; the rest are unknowns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Slice {
    pub fixed: [Option<FieldElement>; 3],
}

impl Slice {
    pub fn free() -> Self {
        Slice::default()
    }

    fn with(mut self, k: usize, v: FieldElement) -> Self {
        self.fixed[k] = Some(v);
        self
    }

    pub fn describe(&self, f: &FieldSpec) -> String {
        let names = ["alpha0", "alpha1", "alpha3"];
        let parts: Vec<String> = self
            .fixed
            .iter()
            .zip(names)
            .filter_map(|(v, n)| v.as_ref().map(|v| format!("{n}={}", f.format(v))))
            .collect();
        parts.join(",")
    }
}

/// Slices through the orbits of the gauge group meeting every orbit.
pub fn gauge_slices(f: &FieldSpec, kind: CaseKind, gauge: Gauge) -> Vec<Slice> {
    let (z, o) = (f.zero(), f.one());
    match (gauge, kind) {
        (Gauge::None, _) => vec![Slice::free()],
        (Gauge::Torus, CaseKind::Linear) => vec![Slice::free().with(0, o)],
        (Gauge::Torus, _) => vec![Slice::free().with(2, o.clone()), Slice::free().with(2, z).with(1, o)],
        (Gauge::Affine, CaseKind::Linear) => vec![Slice::free().with(0, o).with(1, z)],
        (Gauge::Affine, _) => vec![Slice::free().with(2, z).with(1, o)],
    }
}

/// What the curve is to be transformed into.
#[derive(Clone, Debug)]
pub enum Target {
    Concrete(UPoly),
    Template(NormalFormTemplate, ParamEncoding),
}

impl Target {
    pub fn degree(&self) -> usize {
        match self {
            Target::Concrete(d) => d.degree().unwrap_or(0),
            Target::Template(t, _) => t.degree,
        }
    }

    fn family(&self, f: &FieldSpec) -> Option<LinearFamily> {
        match self {
            Target::Concrete(d) => Some(LinearFamily { v0: d.clone(), basis: Vec::new() }),
            Target::Template(t, enc) if t.effective_encoding(*enc) == ParamEncoding::Eliminated => t.linear_family(f),
            Target::Template(..) => None,
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        match self {
            Target::Concrete(_) => Vec::new(),
            Target::Template(t, enc) => t.param_names(*enc),
        }
    }
}

/// Either an unknown of the system ring or a pinned value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Var(usize),
    Fixed(FieldElement),
}

/// The ideal `< (*), C0, 1 - c T >` for one case and slice.
#[derive(Clone, Debug)]
pub struct PolySystem {
    pub kind: CaseKind,
    pub slice: Slice,
    pub ring: PolyRing,
    /// `a0, a1, a3` (the last is unused in the linear case).
    pub alpha: [Slot; 3],
    pub params: Vec<usize>,
    pub t_var: usize,
    pub equations: Vec<MPoly>,
    pub c0: Vec<MPoly>,
    pub c1: Vec<MPoly>,
    pub saturation: MPoly,
    pub beta_sq: MPoly,
    pub genus: usize,
}

impl PolySystem {
    pub fn generators(&self) -> Vec<MPoly> {
        let mut gens = self.equations.clone();
        gens.extend(self.c0.iter().cloned());
        gens.push(self.ring.one().sub(&self.saturation.mul(&self.ring.var(self.t_var))));
        gens
    }

    /// Lex order with `T` most significant, then the `alpha`s, then parameters.
    pub fn ideal(&self) -> Ideal {
        Ideal::new(&self.ring, self.generators(), MonomialOrder::lex(self.ring.nvars()))
    }

    pub fn label(&self) -> String {
        let s = self.slice.describe(self.ring.field());
        if s.is_empty() {
            self.kind.name().to_string()
        } else {
            format!("{} [{s}]", self.kind.name())
        }
    }
}

/// `D^h(a0 t + a1, a2 t + a3)` with `D` homogenized to degree `2g+2`, over
/// the field of the matrix entries.
pub fn transform(d: &UPoly, matrix: &[FieldElement; 4], genus: usize) -> UPoly {
    let f = d.field();
    let a = UPoly::from_coeffs(f, vec![matrix[1].clone(), matrix[0].clone()]);
    let c = UPoly::from_coeffs(f, vec![matrix[3].clone(), matrix[2].clone()]);
    d.homogeneous_compose(&a, &c, 2 * genus + 2)
}

fn symbolic_transform(d: &UPoly, a: &MPoly, c: &MPoly, n: usize) -> MPoly {
    let ring = a.ring().clone();
    let zero = ring.zero();
    let mut acc = zero.clone();
    let coeffs = d.coeffs();
    let mut apow = vec![ring.one()];
    for _ in 1..coeffs.len() {
        apow.push(apow.last().unwrap().mul(a));
    }
    let mut cpow = vec![ring.one()];
    for _ in 0..n {
        cpow.push(cpow.last().unwrap().mul(c));
    }
    for (i, coef) in coeffs.iter().enumerate() {
        if !d.field().is_zero(coef) {
            acc = acc.add(&apow[i].mul(&cpow[n - i]).scale(coef));
        }
    }
    acc
}

/// Reduced row echelon form; returns the rows and their pivot columns.
fn rref(f: &FieldSpec, mut rows: Vec<Vec<FieldElement>>) -> (Vec<Vec<FieldElement>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in (0..ncols).rev() {
        let Some(k) = (r..rows.len()).find(|&k| !f.is_zero(&rows[k][col])) else { continue };
        rows.swap(r, k);
        let inv = f.inv(&rows[r][col]).unwrap();
        rows[r] = rows[r].iter().map(|x| f.mul(x, &inv)).collect();
        for k in 0..rows.len() {
            if k != r && !f.is_zero(&rows[k][col]) {
                let factor = rows[k][col].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[k].iter_mut().zip(&pivot_row) {
                    f.sub_mul_assign(x, &factor, y);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Solves `sum_k x_k cols[k] = rhs`.
fn solve_linear(f: &FieldSpec, cols: &[UPoly], rhs: &UPoly) -> Option<Vec<FieldElement>> {
    let len = cols.iter().chain([rhs]).map(|c| c.coeffs().len()).max().unwrap_or(0);
    let k = cols.len();
    // augmented rows: one per coefficient position
    let mut rows: Vec<Vec<FieldElement>> =
        (0..len).map(|j| cols.iter().map(|c| c.coeff(j)).chain([rhs.coeff(j)]).collect()).collect();
    let mut x = vec![f.zero(); k];
    let mut r = 0;
    let mut pivot_cols = Vec::new();
    for col in 0..k {
        let Some(p) = (r..len).find(|&i| !f.is_zero(&rows[i][col])) else { continue };
        rows.swap(r, p);
        let inv = f.inv(&rows[r][col]).unwrap();
        rows[r] = rows[r].iter().map(|v| f.mul(v, &inv)).collect();
        for i in 0..len {
            if i != r && !f.is_zero(&rows[i][col]) {
                let factor = rows[i][col].clone();
                let pr = rows[r].clone();
                for (a, b) in rows[i].iter_mut().zip(&pr) {
                    f.sub_mul_assign(a, &factor, b);
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !f.is_zero(&row[k])) {
        return None;
    }
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = rows[i][k].clone();
    }
    Some(x)
}

/// Builds the system for one case and slice.
pub fn assemble_system(dx: &UPoly, target: &Target, kind: CaseKind, slice: &Slice) -> Result<PolySystem, BasisError> {
    let genus = curve_genus(dx)?;
    let f = dx.field().clone();
    let dt_deg = target.degree();
    if dt_deg != 2 * genus + 1 && dt_deg != 2 * genus + 2 {
        return Err(BasisError::DegreeMismatch { target: dt_deg, genus });
    }
    if let Target::Concrete(d) = target {
        if d.field() != &f {
            return Err(BasisError::FieldMismatch);
        }
    }
    // Final ring: T, free alphas, parameters. Work ring: t in front.
    let alpha_names = ["alpha0", "alpha1", "alpha3"];
    let n_alpha = if kind.is_moebius() { 3 } else { 2 };
    let mut names = vec!["T".to_string()];
    let mut alpha = [Slot::Fixed(f.zero()), Slot::Fixed(f.zero()), Slot::Fixed(f.one())];
    for k in 0..n_alpha {
        match &slice.fixed[k] {
            Some(v) => alpha[k] = Slot::Fixed(v.clone()),
            None => {
                alpha[k] = Slot::Var(names.len());
                names.push(alpha_names[k].to_string());
            }
        }
    }
    let pnames = target.param_names();
    let params: Vec<usize> = (names.len()..names.len() + pnames.len()).collect();
    names.extend(pnames);
    let ring = PolyRing::new(&f, &names);
    let mut wnames = vec!["t".to_string()];
    wnames.extend(names.iter().cloned());
    let work = PolyRing::new(&f, &wnames);
    let back: Vec<usize> = (0..wnames.len()).map(|i| i.saturating_sub(1)).collect();
    let to_final = |p: &MPoly| p.rename(&ring, &back);
    let wslot = |s: &Slot| match s {
        Slot::Var(i) => work.var(i + 1),
        Slot::Fixed(v) => work.constant(v.clone()),
    };
    let (a0, a1, a3) = (wslot(&alpha[0]), wslot(&alpha[1]), wslot(&alpha[2]));
    let t = work.var(0);
    let num_a = a0.mul(&t).add(&a1);
    let den_c = if kind.is_moebius() { t.add(&a3) } else { work.one() };
    let n = 2 * genus + 2;
    let nprime = symbolic_transform(dx, &num_a, &den_c, n);

    let eval_at = |p: &MPoly, v: &MPoly| -> MPoly {
        let coeffs = p.to_upoly(1).unwrap();
        let mut acc = work.zero();
        let mut pw = work.one();
        for c in coeffs.coeffs() {
            acc = acc.add(&pw.scale(c));
            pw = pw.mul(v);
        }
        acc
    };
    let dx_at_a0 = eval_at(&work.from_upoly(dx, 1), &a0);
    let det = match kind {
        CaseKind::Linear => a0.clone(),
        _ => a0.mul(&a3).sub(&a1),
    };
    let beta_sq = match kind {
        CaseKind::Linear => a0.pow(dx.degree().unwrap() as u32),
        CaseKind::MoebiusNonRoot => dx_at_a0.clone(),
        CaseKind::MoebiusRoot => a1.sub(&a0.mul(&a3)).mul(&eval_at(&work.from_upoly(&dx.derivative(), 1), &a0)),
    };

    let mut equations = Vec::new();
    let mut c1 = vec![det];
    let mut c0 = Vec::new();
    match target.family(&f) {
        Some(fam) => {
            let cols = nprime.coefficients_in(0);
            let len = cols.len().max(fam.v0.coeffs().len());
            let rows: Vec<Vec<FieldElement>> =
                fam.basis.iter().map(|b| (0..len).map(|j| b.coeff(j)).collect()).collect();
            let (rows, pivots) = rref(&f, rows);
            let coeff = |j: usize| cols.get(j).cloned().unwrap_or_else(|| work.zero());
            for j in 0..len {
                if pivots.contains(&j) {
                    continue;
                }
                // residual_j(v) = v_j - sum_k rows[k][j] v_{pivot_k}
                let mut lhs = coeff(j);
                let mut rhs0 = fam.v0.coeff(j);
                for (row, &pc) in rows.iter().zip(&pivots) {
                    if !f.is_zero(&row[j]) {
                        lhs = lhs.sub(&coeff(pc).scale(&row[j]));
                        f.sub_mul_assign(&mut rhs0, &row[j], &fam.v0.coeff(pc));
                    }
                }
                let eq = lhs.sub(&beta_sq.scale(&rhs0));
                if !eq.is_zero() {
                    equations.push(to_final(&eq));
                }
            }
        }
        None => {
            let Target::Template(tmpl, enc) = target else { unreachable!() };
            let wparams: Vec<usize> = params.iter().map(|&i| i + 1).collect();
            let dt = tmpl.d_t(&work, 0, &wparams, *enc);
            let e = nprime.sub(&beta_sq.mul(&dt));
            equations.extend(e.coefficients_in(0).iter().filter(|p| !p.is_zero()).map(to_final));
            let sc = tmpl.side_conditions(&work, &wparams, *enc);
            c1.extend(sc.c1);
            c0.extend(sc.c0.iter().map(to_final));
        }
    }
    match kind {
        CaseKind::Linear => {}
        CaseKind::MoebiusNonRoot => c1.push(dx_at_a0.clone()),
        CaseKind::MoebiusRoot => {
            if !dx_at_a0.is_zero() {
                c0.push(to_final(&dx_at_a0));
            }
        }
    }
    let saturation = c1.iter().fold(work.one(), |acc, p| acc.mul(p));
    Ok(PolySystem {
        kind,
        slice: slice.clone(),
        ring: ring.clone(),
        alpha,
        params,
        t_var: 0,
        equations,
        c0,
        c1: c1.iter().map(to_final).collect(),
        saturation: to_final(&saturation),
        beta_sq: to_final(&beta_sq),
        genus,
    })
}

/// A concrete change of generators turning `y^2 = D_x` into `u^2 = D_t`.
#[derive(Clone, Debug)]
pub struct TypeWitness {
    pub kind: CaseKind,
    /// Field of the coordinates, with the embedding of the base field.
    pub extension: Extension,
    /// Degree over the base field of the field generated by the coordinates.
    pub degree: usize,
    /// `x = (m0 t + m1)/(m2 t + m3)`.
    pub matrix: [FieldElement; 4],
    pub beta_sq: FieldElement,
    /// A square root of `beta_sq` if one exists in the coordinate field.
    pub beta: Option<FieldElement>,
    pub d_t: UPoly,
    /// Parameter values in the order of [`Target::param_names`] (for the
    /// eliminated encoding: the symmetric functions `e_k`).
    pub params: Vec<FieldElement>,
    pub genus: usize,
}

impl TypeWitness {
    pub fn field(&self) -> &FieldSpec {
        &self.extension.field
    }

    pub fn alpha(&self) -> [FieldElement; 3] {
        [self.matrix[0].clone(), self.matrix[1].clone(), self.matrix[3].clone()]
    }

    /// Degree of the field holding a square root of `beta_sq`.
    pub fn beta_degree(&self) -> usize {
        if self.beta.is_some() {
            self.degree
        } else {
            2 * self.degree
        }
    }

    /// `x` in terms of `t`, e.g. `3*t + 2` or `(t + 1)/(t)`.
    pub fn x_formula(&self) -> String {
        let f = self.field();
        let num = UPoly::from_coeffs(f, vec![self.matrix[1].clone(), self.matrix[0].clone()]);
        match self.kind {
            CaseKind::Linear => num.display("t"),
            _ => {
                let den = UPoly::from_coeffs(f, vec![self.matrix[3].clone(), self.matrix[2].clone()]);
                format!("({})/({})", num.display("t"), den.display("t"))
            }
        }
    }

    /// `t` in terms of `x` (the inverse substitution).
    pub fn t_formula(&self) -> String {
        let f = self.field();
        let [a, b, c, d] = &self.matrix;
        // inverse matrix up to scalar: [d, -b, -c, a]
        let num = UPoly::from_coeffs(f, vec![f.neg(b), d.clone()]);
        let den = UPoly::from_coeffs(f, vec![a.clone(), f.neg(c)]);
        match den.degree() {
            Some(0) => num.scale(&f.inv(&den.lc()).unwrap()).display("x"),
            _ => format!("({})/({})", num.display("x"), den.display("x")),
        }
    }
}

impl fmt::Display for TypeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x = {} ({}, degree {})", self.x_formula(), self.kind.name(), self.degree)
    }
}

/// Checks `beta^2 D_t = D_x^h(m0 t + m1, m2 t + m3)` coefficient by coefficient.
pub fn verify_witness(dx: &UPoly, w: &TypeWitness) -> bool {
    let dxe = dx.map(&w.extension.embedding);
    let lhs = transform(&dxe, &w.matrix, w.genus);
    let rhs = w.d_t.scale(&w.beta_sq);
    let f = w.field();
    let len = lhs.coeffs().len().max(rhs.coeffs().len());
    !f.is_zero(&w.beta_sq) && (0..len).all(|j| lhs.coeff(j) == rhs.coeff(j))
}

/// Turns a solution of a system into a witness; `None` if the point does not
/// yield a valid change of generators (which would indicate a bug).
pub fn witness_from_point(
    dx: &UPoly,
    target: &Target,
    sys: &PolySystem,
    point: &groebner::SolutionPoint,
) -> Option<TypeWitness> {
    let ext = point.extension.clone();
    let f = ext.field.clone();
    let val = |s: &Slot| match s {
        Slot::Var(i) => point.coords[*i].clone(),
        Slot::Fixed(v) => ext.embedding.apply(v),
    };
    let (a0, a1, a3) = (val(&sys.alpha[0]), val(&sys.alpha[1]), val(&sys.alpha[2]));
    let matrix = if sys.kind.is_moebius() { [a0, a1, f.one(), a3] } else { [a0, a1, f.zero(), f.one()] };
    let beta_sq = sys.beta_sq.eval_embedded(&point.coords, &ext.embedding);
    let binv = f.inv(&beta_sq)?;
    let dxe = dx.map(&ext.embedding);
    let d_t = transform(&dxe, &matrix, sys.genus).scale(&binv);
    let params = match target {
        Target::Concrete(_) => Vec::new(),
        Target::Template(tmpl, enc) => match tmpl.effective_encoding(*enc) {
            ParamEncoding::Eliminated => {
                let fam = tmpl.linear_family(dx.field())?;
                let basis: Vec<UPoly> = fam.basis.iter().map(|b| b.map(&ext.embedding)).collect();
                let rhs = d_t.sub(&fam.v0.map(&ext.embedding));
                let x = solve_linear(&f, &basis, &rhs)?;
                x.iter().enumerate().map(|(k, v)| if k % 2 == 0 { f.neg(v) } else { v.clone() }).collect()
            }
            _ => sys.params.iter().map(|&i| point.coords[i].clone()).collect(),
        },
    };
    let beta = f.sqrt(&beta_sq);
    let w = TypeWitness {
        kind: sys.kind,
        extension: ext,
        degree: point.degree,
        matrix,
        beta_sq,
        beta,
        d_t,
        params,
        genus: sys.genus,
    };
    verify_witness(dx, &w).then_some(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    OverBase,
    OverClosure,
}

/// Outcome of one case and slice.
#[derive(Clone, Debug)]
pub struct CaseReport {
    pub label: String,
    pub kind: CaseKind,
    pub solvable: bool,
    pub witnesses: Vec<TypeWitness>,
}

#[derive(Clone, Debug)]
pub struct BasisReport {
    pub cases: Vec<CaseReport>,
}

impl BasisReport {
    pub fn solvable(&self) -> bool {
        self.cases.iter().any(|c| c.solvable)
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &TypeWitness> {
        self.cases.iter().flat_map(|c| c.witnesses.iter())
    }
}

fn gauge_of(target: &Target) -> Gauge {
    match target {
        Target::Concrete(_) => Gauge::None,
        Target::Template(t, _) => t.gauge(),
    }
}

/// Every system to examine for `target`. In base mode the root case is split
/// over the rational roots of `D_x` instead of carrying `D_x(a0) = 0`.
pub fn case_systems(
    dx: &UPoly,
    target: &Target,
    kind: CaseKind,
    enumerate_roots: bool,
) -> Result<Vec<PolySystem>, BasisError> {
    let f = dx.field();
    let mut out = Vec::new();
    for slice in gauge_slices(f, kind, gauge_of(target)) {
        if kind == CaseKind::MoebiusRoot && enumerate_roots {
            for r in dx.roots() {
                out.push(assemble_system(dx, target, kind, &slice.clone().with(0, r))?);
            }
        } else {
            out.push(assemble_system(dx, target, kind, &slice)?);
        }
    }
    Ok(out)
}

/// Solutions of one system with coordinates of degree at most `max_degree`.
pub fn solve_system(
    dx: &UPoly,
    target: &Target,
    sys: &PolySystem,
    max_degree: usize,
) -> Result<Vec<TypeWitness>, BasisError> {
    let points = groebner::solve(&sys.ideal(), max_degree)?;
    Ok(points.iter().filter_map(|p| witness_from_point(dx, target, sys, p)).collect())
}

/// Decides whether `y^2 = D_x` can be written as `u^2 = D_t`: over the base
/// field with explicit witnesses, or over its algebraic closure.
pub fn find_basis(dx: &UPoly, target: &Target, mode: Mode) -> Result<BasisReport, BasisError> {
    curve_genus(dx)?;
    if let Target::Concrete(dt) = target {
        curve_genus(dt)?;
    }
    let mut cases = Vec::new();
    for kind in CaseKind::ALL {
        for sys in case_systems(dx, target, kind, mode == Mode::OverBase)? {
            let label = sys.label();
            let report = match mode {
                Mode::OverClosure => CaseReport {
                    label,
                    kind,
                    solvable: groebner::is_solvable_over_closure(&sys.ideal()),
                    witnesses: Vec::new(),
                },
                Mode::OverBase => {
                    let witnesses = solve_system(dx, target, &sys, 1)?;
                    CaseReport { label, kind, solvable: !witnesses.is_empty(), witnesses }
                }
            };
            cases.push(report);
        }
    }
    Ok(BasisReport { cases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::groebner::{groebner_basis, GbOptions};
    use crate::normal_forms::{enumerate_templates, Catalog, GroupType};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn ex3() -> (FieldSpec, UPoly, UPoly) {
        let f = make_field(11, 1).unwrap();
        let dx = UPoly::from_ints(&f, &[7, 10, 5, 4, 1, 1]);
        let dt = UPoly::from_ints(&f, &[6, 9, 9, 7, 0, 1]);
        (f, dx, dt)
    }

    #[test]
    fn linear_coefficient_of_t4() {
        let (f, dx, dt) = ex3();
        let sys = assemble_system(&dx, &Target::Concrete(dt), CaseKind::Linear, &Slice::free()).unwrap();
        assert_eq!(sys.equations.len(), 5);
        let r = &sys.ring;
        let (a0, a1) = (r.var_named("alpha0"), r.var_named("alpha1"));
        let want = a0.pow(4).mul(&a1).scale(&f.from_u64(5)).add(&a0.pow(4));
        assert_eq!(sys.equations[4], want);
    }

    #[test]
    fn lex_basis_for_linear_change() {
        let (f, dx, dt) = ex3();
        let sys = assemble_system(&dx, &Target::Concrete(dt.clone()), CaseKind::Linear, &Slice::free()).unwrap();
        let gb = groebner_basis(&sys.ideal(), &GbOptions::default()).unwrap();
        let r = &sys.ring;
        assert!(gb.polys.contains(&r.var_named("T").sub(&r.int(4))));
        assert!(gb.polys.contains(&r.var_named("alpha0").sub(&r.int(3))));
        let rep = find_basis(&dx, &Target::Concrete(dt), Mode::OverBase).unwrap();
        let ws: Vec<_> = rep.witnesses().collect();
        assert_eq!(ws.len(), 1);
        let w = ws[0];
        assert_eq!(w.matrix, [f.from_u64(3), f.from_u64(2), f.zero(), f.one()]);
        assert!(f.is_one(&w.beta_sq));
        assert_eq!(w.x_formula(), "3*t + 2");
        assert_eq!(w.t_formula(), "4*x + 3");
    }

    #[test]
    fn identity_substitution() {
        let f = make_field(7, 1).unwrap();
        let dx = UPoly::from_ints(&f, &[1, 0, 1, 0, 1, 1]);
        let sys = assemble_system(&dx, &Target::Concrete(dx.clone()), CaseKind::Linear, &Slice::free()).unwrap();
        let pt = [f.from_u64(1), f.one(), f.zero()];
        for g in sys.generators() {
            assert!(f.is_zero(&g.eval(&pt)));
        }
        let rep = find_basis(&dx, &Target::Concrete(dx.clone()), Mode::OverBase).unwrap();
        assert!(rep.witnesses().any(|w| w.matrix == [f.one(), f.zero(), f.zero(), f.one()] && f.is_one(&w.beta_sq)));
    }

    #[test]
    fn inversion_on_x5_plus_4x() {
        let f = make_field(5, 1).unwrap();
        let dx = UPoly::from_ints(&f, &[0, 4, 0, 0, 0, 1]);
        let m = [f.zero(), f.one(), f.one(), f.zero()];
        let num = dx.homogeneous_compose(&UPoly::constant(&f, f.one()), &UPoly::x(&f), 5);
        assert_eq!(num, UPoly::from_ints(&f, &[1, 0, 0, 0, 4]));
        assert_eq!(transform(&dx, &m, 2), num.mul(&UPoly::x(&f)));
        let rep = find_basis(&dx, &Target::Concrete(dx.clone()), Mode::OverBase).unwrap();
        let w = rep.witnesses().find(|w| w.matrix == m).expect("x = 1/t");
        assert_eq!(w.kind, CaseKind::MoebiusRoot);
        assert_eq!(w.beta_sq, f.from_u64(4));
        assert!(w.beta.as_ref().is_some_and(|b| *b == f.from_u64(2) || *b == f.from_u64(3)));
    }

    /// All substitutions over GF(q) by brute force.
    fn exhaustive(dx: &UPoly, dt: &UPoly) -> BTreeSet<(CaseKind, Vec<u64>)> {
        let f = dx.field();
        let g = curve_genus(dx).unwrap();
        let q = f.order_u64().unwrap();
        let mut out = BTreeSet::new();
        for a0 in 0..q {
            for a1 in 0..q {
                let (e0, e1) = (f.from_u64(a0), f.from_u64(a1));
                if a0 != 0 {
                    let m = [e0.clone(), e1.clone(), f.zero(), f.one()];
                    if transform(dx, &m, g) == dt.scale(&f.pow(&e0, dx.degree().unwrap() as u64)) {
                        out.insert((CaseKind::Linear, vec![a0, a1]));
                    }
                }
                for a3 in 0..q {
                    let e3 = f.from_u64(a3);
                    if f.mul(&e0, &e3) == e1 {
                        continue;
                    }
                    let m = [e0.clone(), e1.clone(), f.one(), e3];
                    let lhs = transform(dx, &m, g);
                    let lc = lhs.lc();
                    if lhs.degree() == dt.degree() && lhs == dt.scale(&lc) {
                        let kind =
                            if f.is_zero(&dx.eval(&e0)) { CaseKind::MoebiusRoot } else { CaseKind::MoebiusNonRoot };
                        out.insert((kind, vec![a0, a1, a3]));
                    }
                }
            }
        }
        out
    }

    fn found(rep: &BasisReport) -> BTreeSet<(CaseKind, Vec<u64>)> {
        rep.witnesses()
            .map(|w| {
                let f = w.field();
                let a: Vec<u64> = w.alpha().iter().map(|v| f.as_prime(v).unwrap()).collect();
                let a = if w.kind == CaseKind::Linear { a[..2].to_vec() } else { a };
                (w.kind, a)
            })
            .collect()
    }

    fn random_curve(f: &FieldSpec, deg: usize, rng: &mut ChaCha8Rng) -> UPoly {
        loop {
            let mut c: Vec<i64> = (0..deg).map(|_| rng.gen_range(0..f.characteristic() as i64)).collect();
            c.push(1);
            let d = UPoly::from_ints(f, &c);
            if d.is_separable() {
                return d;
            }
        }
    }

    #[test]
    fn agrees_with_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for p in [3u64, 5] {
            let f = make_field(p, 1).unwrap();
            for trial in 0..6 {
                let dx = random_curve(&f, 5 + (trial % 2), &mut rng);
                // half the targets are random twists of dx so witnesses exist
                let dt = if trial % 3 == 0 {
                    random_curve(&f, 5 + rng.gen_range(0..2), &mut rng)
                } else {
                    let m = loop {
                        let m: [FieldElement; 4] = std::array::from_fn(|_| f.random(&mut rng));
                        let det = f.sub(&f.mul(&m[0], &m[3]), &f.mul(&m[1], &m[2]));
                        if !f.is_zero(&det) {
                            break m;
                        }
                    };
                    let d = transform(&dx, &m, 2);
                    let d = if d.degree() == Some(6) || d.degree() == Some(5) { d } else { continue };
                    d.monic()
                };
                let rep = find_basis(&dx, &Target::Concrete(dt.clone()), Mode::OverBase).unwrap();
                assert_eq!(found(&rep), exhaustive(&dx, &dt), "{dx:?} -> {dt:?}");
                let back = find_basis(&dt, &Target::Concrete(dx.clone()), Mode::OverBase).unwrap();
                assert_eq!(rep.solvable(), back.solvable());
            }
        }
    }

    #[test]
    fn root_constraint_matches_root_enumeration() {
        let f = make_field(5, 1).unwrap();
        let dx = UPoly::from_ints(&f, &[0, 4, 0, 0, 0, 1]);
        let target = Target::Concrete(dx.clone());
        let by_roots: usize = case_systems(&dx, &target, CaseKind::MoebiusRoot, true)
            .unwrap()
            .iter()
            .map(|s| solve_system(&dx, &target, s, 1).unwrap().len())
            .sum();
        let by_ideal: usize = case_systems(&dx, &target, CaseKind::MoebiusRoot, false)
            .unwrap()
            .iter()
            .map(|s| solve_system(&dx, &target, s, 1).unwrap().len())
            .sum();
        assert_eq!(by_roots, by_ideal);
        assert_eq!(by_roots, 100);
    }

    #[test]
    fn closure_mode_detects_twists() {
        let f = make_field(7, 1).unwrap();
        let dx = UPoly::from_ints(&f, &[0, 1, 0, 1, 0, 1]);
        let dt = UPoly::from_ints(&f, &[1, 0, 0, 0, 0, 0, 1]);
        assert!(find_basis(&dx, &Target::Concrete(dt), Mode::OverClosure).unwrap().solvable());
        let rep = find_basis(&dx, &Target::Concrete(dx.clone()), Mode::OverClosure).unwrap();
        assert!(rep.cases.iter().find(|c| c.kind == CaseKind::Linear).unwrap().solvable);
    }

    /// Encodings agree on templates of genus 2 over GF(7).
    #[test]
    fn encodings_agree() {
        let f = make_field(7, 1).unwrap();
        let dx = UPoly::from_ints(&f, &[0, 1, 0, 1, 0, 1]);
        for t in enumerate_templates(2, 7, &Catalog::default()) {
            if t.gtype == GroupType::Trivial || t.s > 1 {
                continue;
            }
            let mut results = Vec::new();
            for enc in [ParamEncoding::Roots, ParamEncoding::Symmetric, ParamEncoding::Eliminated] {
                let target = Target::Template(t.clone(), enc);
                let rep = find_basis(&dx, &target, Mode::OverClosure).unwrap();
                results.push(rep.cases.iter().map(|c| c.solvable).collect::<Vec<_>>());
            }
            assert_eq!(results[0], results[1], "{}", t.formula());
            assert_eq!(results[1], results[2], "{}", t.formula());
        }
    }

    #[test]
    fn gauge_slices_yield_finite_systems() {
        let f = make_field(7, 1).unwrap();
        let dx = UPoly::from_ints(&f, &[0, 1, 0, 1, 0, 1]);
        for t in enumerate_templates(2, 7, &Catalog::default()) {
            if t.gtype == GroupType::Trivial {
                continue;
            }
            let target = Target::Template(t.clone(), ParamEncoding::Eliminated);
            for kind in CaseKind::ALL {
                for sys in case_systems(&dx, &target, kind, false).unwrap() {
                    let ws = solve_system(&dx, &target, &sys, 4);
                    assert!(ws.is_ok(), "{} {}", t.formula(), sys.label());
                }
            }
        }
    }

    #[test]
    fn rejects_bad_curves() {
        let f = make_field(5, 1).unwrap();
        let sq = UPoly::from_ints(&f, &[1, 2, 1]).mul(&UPoly::from_ints(&f, &[1, 0, 1, 1]));
        assert_eq!(curve_genus(&sq), Err(BasisError::NotSeparable));
        assert_eq!(curve_genus(&UPoly::from_ints(&f, &[1, 0, 1])), Err(BasisError::BadDegree(2)));
        let dx = UPoly::from_ints(&f, &[0, 4, 0, 0, 0, 1]);
        let dt = UPoly::from_ints(&f, &[1, 0, 0, 0, 0, 0, 0, 1]);
        assert!(matches!(
            assemble_system(&dx, &Target::Concrete(dt), CaseKind::Linear, &Slice::free()),
            Err(BasisError::DegreeMismatch { .. })
        ));
    }
}
