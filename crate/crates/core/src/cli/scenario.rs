//! Scenario files: JSON documents naming the objects of one chart and the
//! checks to run on them. Every literal is parsed and every reference
//! resolved at load time.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::dirac::{DiracFrame, DomainBox, GenSection};
use crate::error::{Error, Result};
use crate::exactalg::{parse_expr, parse_scalar, Poly, Rational, Scalar, Var};
use crate::family::{gauge_family, quantize_family, Generator, QuantizeBounds, TightFamily};
use crate::geom::{HamiltonianFamily, MixedMultivector};
use crate::holonomy::{DiskB, PathB};
use crate::star::{kontsevich2, moyal, PolyDiffOp, StarProduct};
use crate::algebroid::{ChartBox, CrossSection, FoliatedChart};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub dims: Dims,
    #[serde(default = "default_order")]
    pub hbar_order: usize,
    #[serde(default)]
    pub ring: Ring,
    #[serde(default)]
    pub domain: Option<BoxSpec>,
    #[serde(default)]
    pub sections: BTreeMap<String, SectionSpec>,
    #[serde(default)]
    pub frames: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub sigmas: BTreeMap<String, Vec<TermSpec>>,
    #[serde(default)]
    pub families: BTreeMap<String, FamilySpec>,
    #[serde(default)]
    pub paths: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub disks: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub charts: BTreeMap<String, ChartSpec>,
    #[serde(default)]
    pub transversals: BTreeMap<String, Vec<String>>,
    pub checks: Vec<CheckSpec>,
}

fn default_order() -> usize {
    2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub m: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub m0: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ring {
    #[default]
    Polynomial,
    RationalFunction,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    #[serde(default)]
    pub x: Vec<[String; 2]>,
    #[serde(default)]
    pub b: Vec<[String; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub vector: Vec<String>,
    pub covector: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: String,
    #[serde(default)]
    pub tm: Vec<usize>,
    #[serde(default)]
    pub db: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Inner(String),
    VectorField(BTreeMap<String, String>),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Quantize {
        sigma: String,
    },
    Gauge {
        poisson: String,
        generators: Vec<GeneratorSpec>,
        #[serde(default)]
        curvature: Option<BTreeMap<String, String>>,
    },
    Explicit {
        poisson: String,
        #[serde(default)]
        connection: Vec<BTreeMap<String, String>>,
        #[serde(default)]
        curvature: BTreeMap<String, String>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub sigma: String,
    pub y: Vec<[String; 2]>,
    pub b: Vec<[String; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CheckSpec {
    CourantIdentities {
        name: Option<String>,
        #[serde(default)]
        sections: Vec<String>,
        #[serde(default)]
        random: usize,
        frame: Option<String>,
        expect_dirac: Option<bool>,
    },
    Lemma1 {
        name: Option<String>,
        sigma: String,
    },
    Lemma2 {
        name: Option<String>,
        sigma: String,
    },
    Mc {
        name: Option<String>,
        sigma: String,
    },
    Mc4 {
        name: Option<String>,
        family: String,
    },
    Quantize {
        name: Option<String>,
        sigma: String,
    },
    Transport {
        name: Option<String>,
        family: String,
        path: String,
        #[serde(default)]
        expect: BTreeMap<String, String>,
    },
    Holonomy {
        name: Option<String>,
        family: String,
        disk: String,
        expect_lambda: Option<String>,
        expect_unital: Option<String>,
    },
    Relations {
        name: Option<String>,
        family: String,
        disk: String,
    },
    AlgebroidCoherence {
        name: Option<String>,
        chart: String,
        source: String,
        target: String,
        filling: Option<String>,
    },
}

pub const CHECK_KINDS: [&str; 10] = [
    "courant-identities",
    "lemma1",
    "lemma2",
    "mc",
    "mc4",
    "quantize",
    "transport",
    "holonomy",
    "relations",
    "algebroid-coherence",
];

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::CourantIdentities { .. } => CHECK_KINDS[0],
            CheckSpec::Lemma1 { .. } => CHECK_KINDS[1],
            CheckSpec::Lemma2 { .. } => CHECK_KINDS[2],
            CheckSpec::Mc { .. } => CHECK_KINDS[3],
            CheckSpec::Mc4 { .. } => CHECK_KINDS[4],
            CheckSpec::Quantize { .. } => CHECK_KINDS[5],
            CheckSpec::Transport { .. } => CHECK_KINDS[6],
            CheckSpec::Holonomy { .. } => CHECK_KINDS[7],
            CheckSpec::Relations { .. } => CHECK_KINDS[8],
            CheckSpec::AlgebroidCoherence { .. } => CHECK_KINDS[9],
        }
    }

    /// Explicit name, or `kind:target[:target]`.
    pub fn name(&self) -> String {
        use CheckSpec::*;
        let (given, targets): (&Option<String>, Vec<&str>) = match self {
            CourantIdentities { name, frame, .. } => (name, frame.iter().map(String::as_str).collect()),
            Lemma1 { name, sigma } | Lemma2 { name, sigma } | Mc { name, sigma } | Quantize { name, sigma } => {
                (name, vec![sigma])
            }
            Mc4 { name, family } => (name, vec![family]),
            Transport { name, family, path, .. } => (name, vec![family, path]),
            Holonomy { name, family, disk, .. } | Relations { name, family, disk } => (name, vec![family, disk]),
            AlgebroidCoherence { name, chart, source, target, .. } => (name, vec![chart, source, target]),
        };
        given.clone().unwrap_or_else(|| {
            let mut out = self.kind().to_string();
            for t in targets {
                out.push(':');
                out.push_str(t);
            }
            out
        })
    }
}

/// Overrides coming from the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub hbar_order: Option<usize>,
    pub bounds: (Option<u32>, Option<u32>),
    pub grid: Option<usize>,
}

/// A loaded, validated scenario.
pub struct Scenario {
    pub name: String,
    pub m: usize,
    pub k: usize,
    pub m0: usize,
    pub order: usize,
    pub grid: usize,
    pub domain: DomainBox,
    pub sections: BTreeMap<String, GenSection>,
    pub frames: BTreeMap<String, DiracFrame>,
    pub sigmas: BTreeMap<String, MixedMultivector>,
    pub paths: BTreeMap<String, PathB>,
    pub disks: BTreeMap<String, DiskB>,
    pub charts: BTreeMap<String, ChartSpecResolved>,
    pub transversals: BTreeMap<String, CrossSection>,
    pub checks: Vec<CheckSpec>,
    families: BTreeMap<String, (FamilySpec, OnceLock<Result<TightFamily>>)>,
    bounds: (Option<u32>, Option<u32>),
    chart_cache: BTreeMap<String, OnceLock<Result<FoliatedChart>>>,
}

pub struct ChartSpecResolved {
    pub sigma: String,
    pub domain: ChartBox,
}

/// Byte offset → 1-based line and column (in characters).
fn parse_rational(lit: &str) -> Result<Rational> {
    parse_expr(lit)?.as_constant().ok_or_else(|| Error::Invalid(format!("\"{lit}\" is not a rational constant")))
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

struct Loader<'a> {
    src: &'a str,
    order: usize,
    ring: Ring,
}

impl Loader<'_> {
    /// Relocates a literal's parse error to its position in the file.
    fn relocate(&self, lit: &str, e: Error) -> Error {
        match e {
            Error::Parse { column, message, .. } => {
                let quoted = serde_json::to_string(lit).expect("string");
                match self.src.find(&quoted) {
                    Some(at) => {
                        let (line, col) = line_col(self.src, at);
                        Error::Parse { line, column: col + column, message: format!("in \"{lit}\": {message}") }
                    }
                    None => Error::Parse { line: 0, column, message: format!("in \"{lit}\": {message}") },
                }
            }
            other => other,
        }
    }

    fn scalar(&self, lit: &str) -> Result<Scalar> {
        let s = parse_scalar(lit, self.order).map_err(|e| self.relocate(lit, e))?;
        if self.ring == Ring::Polynomial && !s.is_polynomial() {
            return Err(Error::Invalid(format!("\"{lit}\" is a rational function but the scenario ring is polynomial")));
        }
        Ok(s)
    }

    fn poly(&self, lit: &str, what: &str) -> Result<Poly> {
        let e = parse_expr(lit).map_err(|e| self.relocate(lit, e))?;
        e.as_poly().cloned().ok_or_else(|| Error::Invalid(format!("{what} \"{lit}\" must be a polynomial")))
    }

    fn rational(&self, lit: &str) -> Result<Rational> {
        parse_rational(lit).map_err(|e| self.relocate(lit, e))
    }

    fn intervals(&self, ivs: &[[String; 2]]) -> Result<Vec<(Rational, Rational)>> {
        ivs.iter().map(|[lo, hi]| Ok((self.rational(lo)?, self.rational(hi)?))).collect()
    }
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, what: &str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| Error::Unresolved(format!("{what} \"{name}\"")))
}

fn coord_var(name: &str, m: usize) -> Result<Var> {
    let i: usize = name
        .strip_prefix('x')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Error::Invalid(format!("\"{name}\" is not a fiber coordinate x<i>")))?;
    if i == 0 || i > m {
        return Err(Error::DimensionMismatch(format!("{name} outside x1..x{m}")));
    }
    Ok(Var::X(i))
}

fn pair_key(key: &str, k: usize) -> Result<(usize, usize)> {
    let bad = || Error::Invalid(format!("curvature key \"{key}\" must read \"a,b\" with 1 <= a < b <= {k}"));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || a >= b || b > k {
        return Err(bad());
    }
    Ok((a, b))
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn parse(src: &str, ov: &Overrides) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(src)
            .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        let (m, k) = (file.dims.m, file.dims.k);
        if m == 0 {
            return Err(Error::Invalid("dims.m must be positive".into()));
        }
        let m0 = file.dims.m0.unwrap_or(m);
        let order = ov.hbar_order.unwrap_or(file.hbar_order);
        let grid = ov.grid.unwrap_or(4);
        let ld = Loader { src, order, ring: file.ring };

        let mut domain = crate::dirac::unit_box(m, k);
        if let Some(bx) = &file.domain {
            let xs = ld.intervals(&bx.x)?;
            let bs = ld.intervals(&bx.b)?;
            if (!xs.is_empty() && xs.len() != m) || (!bs.is_empty() && bs.len() != k) {
                return Err(Error::DimensionMismatch("domain box does not match dims".into()));
            }
            for (i, (lo, hi)) in xs.into_iter().enumerate() {
                domain[i] = (Var::X(i + 1), lo, hi);
            }
            for (j, (lo, hi)) in bs.into_iter().enumerate() {
                domain[m + j] = (Var::B(j + 1), lo, hi);
            }
        }

        let mut sections = BTreeMap::new();
        for (name, spec) in &file.sections {
            let v = spec.vector.iter().map(|c| ld.scalar(c)).collect::<Result<Vec<_>>>()?;
            let c = spec.covector.iter().map(|c| ld.scalar(c)).collect::<Result<Vec<_>>>()?;
            let sec = GenSection::new(m, k, v, c).map_err(|e| Error::Invalid(format!("section \"{name}\": {e}")))?;
            sections.insert(name.clone(), sec);
        }
        let mut frames = BTreeMap::new();
        for (name, refs) in &file.frames {
            let secs = refs.iter().map(|r| lookup(&sections, "section", r).cloned()).collect::<Result<Vec<_>>>()?;
            frames.insert(name.clone(), DiracFrame::with_domain(m, k, secs, domain.clone())?);
        }
        let mut sigmas = BTreeMap::new();
        for (name, terms) in &file.sigmas {
            let mut sigma = MixedMultivector::zero(m, k, order);
            for t in terms {
                let term = MixedMultivector::term(m, k, ld.scalar(&t.coeff)?, &t.tm, &t.db)
                    .map_err(|e| Error::Invalid(format!("sigma \"{name}\": {e}")))?;
                sigma = sigma.add(&term)?;
            }
            sigmas.insert(name.clone(), sigma);
        }
        for (name, spec) in &file.families {
            match spec {
                FamilySpec::Quantize { sigma } => {
                    lookup(&sigmas, "sigma", sigma)?;
                }
                FamilySpec::Gauge { poisson, generators, curvature } => {
                    lookup(&sigmas, "sigma", poisson)?;
                    if generators.len() != k {
                        return Err(Error::DimensionMismatch(format!("family \"{name}\" needs {k} generators")));
                    }
                    for g in generators {
                        match g {
                            GeneratorSpec::Inner(a) => drop(ld.scalar(a)?),
                            GeneratorSpec::VectorField(vf) => {
                                for (v, c) in vf {
                                    coord_var(v, m)?;
                                    ld.scalar(c)?;
                                }
                            }
                        }
                    }
                    for (key, c) in curvature.iter().flatten() {
                        pair_key(key, k)?;
                        ld.scalar(c)?;
                    }
                }
                FamilySpec::Explicit { poisson, connection, curvature } => {
                    lookup(&sigmas, "sigma", poisson)?;
                    if connection.len() != k {
                        return Err(Error::DimensionMismatch(format!("family \"{name}\" needs {k} connection components")));
                    }
                    for (v, c) in connection.iter().flatten() {
                        coord_var(v, m)?;
                        ld.scalar(c)?;
                    }
                    for (key, c) in curvature {
                        pair_key(key, k)?;
                        ld.scalar(c)?;
                    }
                }
            }
        }
        let mut paths = BTreeMap::new();
        for (name, comps) in &file.paths {
            let polys = comps.iter().map(|c| ld.poly(c, "path component")).collect::<Result<Vec<_>>>()?;
            if polys.len() != k {
                return Err(Error::DimensionMismatch(format!("path \"{name}\" needs {k} components")));
            }
            paths.insert(name.clone(), PathB::new(polys)?);
        }
        let mut disks = BTreeMap::new();
        for (name, comps) in &file.disks {
            let polys = comps.iter().map(|c| ld.poly(c, "disk component")).collect::<Result<Vec<_>>>()?;
            if polys.len() != k {
                return Err(Error::DimensionMismatch(format!("disk \"{name}\" needs {k} components")));
            }
            disks.insert(name.clone(), DiskB::new(polys)?);
        }
        let mut charts = BTreeMap::new();
        for (name, spec) in &file.charts {
            let sigma = lookup(&sigmas, "sigma", &spec.sigma)?;
            if sigma.dims() != (m0, k) {
                return Err(Error::DimensionMismatch(format!("chart \"{name}\" needs a sigma on (m0, k) = ({m0}, {k})")));
            }
            let domain = ChartBox::new(ld.intervals(&spec.y)?, ld.intervals(&spec.b)?)?;
            charts.insert(name.clone(), ChartSpecResolved { sigma: spec.sigma.clone(), domain });
        }
        let mut transversals = BTreeMap::new();
        for (name, comps) in &file.transversals {
            let polys = comps.iter().map(|c| ld.poly(c, "cross-section component")).collect::<Result<Vec<_>>>()?;
            if polys.len() != k {
                return Err(Error::DimensionMismatch(format!("cross-section \"{name}\" needs {k} components")));
            }
            transversals.insert(name.clone(), CrossSection::new(polys)?);
        }

        let mut seen = BTreeMap::new();
        for c in &file.checks {
            use CheckSpec::*;
            match c {
                CourantIdentities { sections: secs, frame, .. } => {
                    for s in secs {
                        lookup(&sections, "section", s)?;
                    }
                    if let Some(f) = frame {
                        lookup(&frames, "frame", f)?;
                    }
                }
                Lemma1 { sigma, .. } | Lemma2 { sigma, .. } | Mc { sigma, .. } | Quantize { sigma, .. } => {
                    lookup(&sigmas, "sigma", sigma)?;
                }
                Mc4 { family, .. } => drop(lookup(&file.families, "family", family)?),
                Transport { family, path, expect, .. } => {
                    lookup(&file.families, "family", family)?;
                    lookup(&paths, "path", path)?;
                    for (f, g) in expect {
                        ld.scalar(f)?;
                        ld.scalar(g)?;
                    }
                }
                Holonomy { family, disk, expect_lambda, expect_unital, .. } => {
                    lookup(&file.families, "family", family)?;
                    lookup(&disks, "disk", disk)?;
                    if let Some(l) = expect_lambda {
                        ld.rational(l)?;
                    }
                    if let Some(u) = expect_unital {
                        ld.scalar(u)?;
                    }
                }
                Relations { family, disk, .. } => {
                    lookup(&file.families, "family", family)?;
                    lookup(&disks, "disk", disk)?;
                }
                AlgebroidCoherence { chart, source, target, filling, .. } => {
                    lookup(&charts, "chart", chart)?;
                    lookup(&transversals, "cross-section", source)?;
                    lookup(&transversals, "cross-section", target)?;
                    if let Some(f) = filling {
                        ld.poly(f, "filling bump")?;
                    }
                }
            }
            let name = c.name();
            if seen.insert(name.clone(), ()).is_some() {
                return Err(Error::Invalid(format!("duplicate check name \"{name}\"")));
            }
        }

        let chart_cache = charts.keys().map(|n| (n.clone(), OnceLock::new())).collect();
        let families = file.families.into_iter().map(|(n, s)| (n, (s, OnceLock::new()))).collect();
        Ok(Scenario {
            name: file.name,
            m,
            k,
            m0,
            order,
            grid,
            domain,
            sections,
            frames,
            sigmas,
            paths,
            disks,
            charts,
            transversals,
            checks: file.checks,
            families,
            bounds: ov.bounds,
            chart_cache,
        })
    }

    /// Quantizer bounds: command-line values over the per-sigma defaults.
    pub fn bounds_for(&self, sigma: &MixedMultivector) -> Option<QuantizeBounds> {
        match self.bounds {
            (None, None) => None,
            (d, r) => {
                let def = QuantizeBounds::default_for(sigma, sigma.order());
                Some(QuantizeBounds { degree: d.unwrap_or(def.degree), order: r.unwrap_or(def.order) })
            }
        }
    }

    /// Literal in the scenario's ring; only used on already-validated text.
    pub fn scalar(&self, lit: &str) -> Scalar {
        parse_scalar(lit, self.order).expect("validated at load")
    }

    pub fn rational(&self, lit: &str) -> Rational {
        parse_rational(lit).expect("validated at load")
    }

    pub fn poly(&self, lit: &str) -> Poly {
        parse_expr(lit).expect("validated at load").as_poly().expect("validated at load").clone()
    }

    fn poisson_star(&self, name: &str) -> Result<StarProduct> {
        let pi = &self.sigmas[name];
        if pi.terms().any(|(l, _)| l.q() != 0 || l.p() != 2) {
            return Err(Error::WrongDegree(format!("sigma \"{name}\" must be a bivector on M")));
        }
        let mut on_m = MixedMultivector::zero(self.m, 0, self.order);
        for (l, c) in pi.terms() {
            on_m = on_m.add(&MixedMultivector::term(self.m, 0, c.clone(), &l.tm_indices(), &[])?)?;
        }
        let pi = on_m;
        let constant = pi.terms().all(|(_, c)| !c.depends_on_any(|v| matches!(v, Var::X(_) | Var::B(_))));
        if constant {
            moyal(&pi)
        } else {
            kontsevich2(&pi)
        }
    }

    fn vector_field(&self, vf: &BTreeMap<String, String>) -> PolyDiffOp {
        let coeffs: Vec<(Var, Scalar)> =
            vf.iter().map(|(v, c)| (coord_var(v, self.m).expect("validated"), self.scalar(c))).collect();
        PolyDiffOp::vector_field(&coeffs, self.order)
    }

    fn curvature(&self, spec: &BTreeMap<String, String>) -> BTreeMap<(usize, usize), Scalar> {
        spec.iter().map(|(key, c)| (pair_key(key, self.k).expect("validated"), self.scalar(c))).collect()
    }

    fn build_family(&self, spec: &FamilySpec) -> Result<TightFamily> {
        match spec {
            FamilySpec::Quantize { sigma } => {
                let sigma = &self.sigmas[sigma];
                let bounds = self.bounds_for(sigma);
                Ok(quantize_family(&HamiltonianFamily::new(sigma.clone())?, bounds)?.family)
            }
            FamilySpec::Gauge { poisson, generators, curvature } => {
                let star = self.poisson_star(poisson)?;
                let gens = generators
                    .iter()
                    .map(|g| match g {
                        GeneratorSpec::Inner(a) => Generator::Inner(self.scalar(a)),
                        GeneratorSpec::VectorField(vf) => Generator::Operator(self.vector_field(vf)),
                    })
                    .collect();
                gauge_family(&star, self.m, self.k, gens, curvature.as_ref().map(|c| self.curvature(c)))
            }
            FamilySpec::Explicit { poisson, connection, curvature } => {
                let star = self.poisson_star(poisson)?;
                let tau1 = connection.iter().map(|vf| self.vector_field(vf)).collect();
                TightFamily::new(self.m, self.k, star.correction().clone(), tau1, self.curvature(curvature))
            }
        }
    }

    /// The named family, built once and shared between checks.
    pub fn family(&self, name: &str) -> Result<&TightFamily> {
        let (spec, cell) = &self.families[name];
        cell.get_or_init(|| self.build_family(spec)).as_ref().map_err(Clone::clone)
    }

    pub fn chart(&self, name: &str) -> Result<&FoliatedChart> {
        let cell = &self.chart_cache[name];
        cell.get_or_init(|| {
            let spec = &self.charts[name];
            let fam = HamiltonianFamily::new(self.sigmas[&spec.sigma].clone())?;
            let mut chart = FoliatedChart::new(fam, spec.domain.clone())?;
            chart.grid = self.grid;
            Ok(chart)
        })
        .as_ref()
        .map_err(Clone::clone)
    }
}
