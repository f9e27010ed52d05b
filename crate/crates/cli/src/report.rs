//! JSON and text reports.

use std::fmt::Write as _;

use hyperaut::autgroup::{AutGroupResult, BaseResult, Curve, Detection, FieldOfDefinition, Realization};
use hyperaut::basis_change::TypeWitness;
use hyperaut::field::{FieldElement, FieldSpec};
use hyperaut::normal_forms::NormalFormTemplate;
use serde::Serialize;

pub const SCHEMA: &str = "hyperaut-report/1";
pub const SCREEN_SCHEMA: &str = "hyperaut-screen/1";

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct FieldJson {
    pub name: String,
    pub characteristic: u64,
    pub degree: usize,
    /// Coefficients of the defining polynomial in `z`, low to high.
    pub modulus: Vec<u32>,
}

impl FieldJson {
    pub fn new(f: &FieldSpec) -> Self {
        FieldJson {
            name: f.to_string(),
            characteristic: f.characteristic(),
            degree: f.degree(),
            modulus: f.modulus().to_vec(),
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct InputJson {
    pub characteristic: u64,
    pub extension_degree: usize,
    pub modulus: Option<String>,
    pub polynomial: String,
    pub mode: String,
    pub max_d: usize,
    pub catalog: Vec<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct CurveJson {
    pub polynomial: String,
    pub genus: usize,
    pub field: FieldJson,
}

impl CurveJson {
    pub fn new(c: &Curve) -> Self {
        CurveJson { polynomial: c.d.display("x"), genus: c.genus, field: FieldJson::new(c.field()) }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct TemplateJson {
    pub formula: String,
    pub nu: [u8; 3],
    pub s: usize,
    pub degree: usize,
    /// First case of the basis change that is solvable.
    pub case: Option<String>,
}

impl TemplateJson {
    fn new(t: &NormalFormTemplate, case: Option<String>) -> Self {
        TemplateJson { formula: t.formula(), nu: t.nu, s: t.s, degree: t.degree, case }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct TypeJson {
    #[serde(rename = "type")]
    pub gtype: String,
    pub reduced_order: u64,
    pub templates: Vec<TemplateJson>,
}

pub fn detected_json(det: &Detection) -> Vec<TypeJson> {
    det.detected
        .iter()
        .map(|g| TypeJson {
            gtype: g.label(),
            reduced_order: g.order(),
            templates: det
                .outcomes
                .iter()
                .filter(|o| o.solvable && o.template.gtype == *g)
                .map(|o| TemplateJson::new(&o.template, o.case.clone()))
                .collect(),
        })
        .collect()
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct WitnessJson {
    pub case: String,
    pub x: String,
    pub t: String,
    pub degree: usize,
    pub field: FieldJson,
    pub beta_squared: String,
    pub normal_form: String,
}

impl WitnessJson {
    pub fn new(w: &TypeWitness) -> Self {
        WitnessJson {
            case: w.kind.name().into(),
            x: w.x_formula(),
            t: w.t_formula(),
            degree: w.degree,
            field: FieldJson::new(w.field()),
            beta_squared: w.field().format(&w.beta_sq),
            normal_form: w.d_t.display("t"),
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct ConstantJson {
    pub name: String,
    pub value: String,
    pub coordinates: Vec<u32>,
}

fn constant(name: &str, v: &FieldElement, f: &FieldSpec) -> ConstantJson {
    ConstantJson { name: name.into(), value: f.format(v), coordinates: v.coords().to_vec() }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct GeneratorJson {
    pub name: String,
    pub on_tu: String,
    pub on_xy: String,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct RealizationJson {
    pub template: TemplateJson,
    pub witness: WitnessJson,
    pub field: FieldJson,
    pub constants: Vec<ConstantJson>,
    pub generators: Vec<GeneratorJson>,
}

impl RealizationJson {
    pub fn new(r: &Realization) -> Self {
        let f = &r.extension.field;
        let alg = &r.algebra;
        RealizationJson {
            template: TemplateJson::new(&r.template, None),
            witness: WitnessJson::new(&r.witness),
            field: FieldJson::new(f),
            constants: r.constants.iter().map(|(n, v)| constant(n, v, f)).collect(),
            generators: r
                .raw
                .iter()
                .zip(&r.transported)
                .map(|(a, b)| GeneratorJson {
                    name: a.name.clone(),
                    on_tu: alg.format(&alg.elem(a), "t", "u"),
                    on_xy: alg.format(&alg.elem(b), "x", "y"),
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct FodJson {
    #[serde(rename = "type")]
    pub gtype: String,
    pub degree: Option<usize>,
    pub field: Option<FieldJson>,
    pub witness: Option<WitnessJson>,
}

impl FodJson {
    pub fn new(gtype: String, fod: Option<&FieldOfDefinition>, base: &FieldSpec) -> Self {
        FodJson {
            gtype,
            degree: fod.map(|f| f.degree),
            field: fod.map(|f| FieldJson::new(&base.extend(f.degree).field)),
            witness: fod.map(|f| WitnessJson::new(&f.witness)),
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct BaseJson {
    pub largest: String,
    pub group_order: u64,
    pub witness: WitnessJson,
    /// Larger detected types that need a proper extension.
    pub not_over_base: Vec<String>,
}

impl BaseJson {
    pub fn new(b: &BaseResult) -> Self {
        BaseJson {
            largest: b.largest.label(),
            group_order: b.group_order,
            witness: WitnessJson::new(&b.field_of_definition.witness),
            not_over_base: b.rejected.iter().map(|g| g.label()).collect(),
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct TraceJson {
    pub template: String,
    pub system: String,
    pub lines: Vec<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Report {
    pub schema: String,
    pub input: InputJson,
    pub curve: CurveJson,
    pub detected: Vec<TypeJson>,
    pub largest: String,
    /// Order of the automorphism group over the algebraic closure.
    pub group_order: u64,
    pub enumerated_order: Option<usize>,
    pub structure_label: Option<String>,
    pub realization: Option<RealizationJson>,
    /// Automorphisms whose coefficients lie in the base field.
    pub rational_order: Option<usize>,
    pub automorphism_field_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_of_definition: Option<FodJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    pub issues: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub gb_trace: Vec<TraceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(input: InputJson, res: &AutGroupResult) -> Self {
        Report {
            schema: SCHEMA.into(),
            input,
            curve: CurveJson::new(&res.curve),
            detected: detected_json(&res.detection),
            largest: res.largest.label(),
            group_order: res.group_order,
            enumerated_order: res.enumerated_order,
            structure_label: res.structure_label.clone(),
            realization: res.realization.as_ref().map(RealizationJson::new),
            rational_order: res.rational_order,
            automorphism_field_degree: res.automorphism_field_degree,
            base: None,
            field_of_definition: None,
            verdict: None,
            issues: res.issues.clone(),
            gb_trace: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.curve;
        let _ = writeln!(s, "curve: y^2 = {} over {} (genus {})", c.polynomial, c.field.name, c.genus);
        let det: Vec<&str> = self.detected.iter().map(|t| t.gtype.as_str()).collect();
        let _ = writeln!(s, "detected types: {}", det.join(", "));
        let _ = writeln!(s, "largest type: {}", self.largest);
        let _ = writeln!(s, "|Aut| over the closure: {}", self.group_order);
        if let Some(l) = &self.structure_label {
            let _ = writeln!(s, "structure: {l}");
        }
        if let Some(r) = &self.realization {
            let _ = writeln!(s, "normal form: u^2 = {} ({})", r.witness.normal_form, r.template.formula);
            let _ = writeln!(s, "  x = {}, t = {} over {}", r.witness.x, r.witness.t, r.witness.field.name);
            let _ = writeln!(s, "generators over {}:", r.field.name);
            for g in &r.generators {
                let _ = writeln!(s, "  {:<6} {}   |   {}", g.name, g.on_tu, g.on_xy);
            }
            for k in &r.constants {
                let _ = writeln!(s, "  {} = {}", k.name, k.value);
            }
        }
        if let Some(n) = self.rational_order {
            let _ = writeln!(s, "automorphisms over {}: {n}", c.field.name);
        }
        if let Some(b) = &self.base {
            let _ = writeln!(s, "largest type over {}: {} (|Aut| = {})", c.field.name, b.largest, b.group_order);
            let _ = writeln!(s, "  x = {}", b.witness.x);
        }
        if let Some(f) = &self.field_of_definition {
            match (&f.degree, &f.field) {
                (Some(d), Some(fj)) => {
                    let _ = writeln!(s, "field of definition of {}: degree {d} ({})", f.gtype, fj.name);
                }
                _ => {
                    let _ = writeln!(s, "field of definition of {}: beyond max degree", f.gtype);
                }
            }
        }
        if let Some(v) = &self.verdict {
            let _ = writeln!(s, "verdict: {v}");
        }
        for i in &self.issues {
            let _ = writeln!(s, "note: {i}");
        }
        for t in &self.gb_trace {
            let _ = writeln!(s, "trace {} [{}]:", t.template, t.system);
            for l in &t.lines {
                let _ = writeln!(s, "  {l}");
            }
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(s, "time: {ms:.1} ms");
        }
        s
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct ScreenEntry {
    pub line: usize,
    pub input: String,
    pub verdict: Option<String>,
    pub group_order: Option<u64>,
    pub largest: Option<String>,
    pub error: Option<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Default)]
pub struct ScreenSummary {
    pub curves: usize,
    pub candidates: usize,
    pub rejected: usize,
    pub errors: usize,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct ScreenReport {
    pub schema: String,
    pub results: Vec<ScreenEntry>,
    pub summary: ScreenSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl ScreenReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.results {
            let _ = match (&e.verdict, &e.error) {
                (Some(v), _) => writeln!(s, "{:>4}  {}  ->  {v}", e.line, e.input),
                (_, Some(err)) => writeln!(s, "{:>4}  {}  ->  error: {err}", e.line, e.input),
                _ => Ok(()),
            };
        }
        let m = &self.summary;
        let _ = writeln!(
            s,
            "{} curves: {} candidates, {} rejected, {} errors",
            m.curves, m.candidates, m.rejected, m.errors
        );
        s
    }
}

pub fn verdict(group_order: u64) -> String {
    if group_order == 2 {
        "candidate".into()
    } else {
        format!("rejected: |Aut| = {group_order}")
    }
}
