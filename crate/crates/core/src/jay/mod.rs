//! End-to-end Adams spectral sequence computations for the connective
//! image-of-J spectrum j and its mod p reduction.
//!
//! A scenario holds three short exact sequences. Over the small algebra
//! (A(2) at p = 2, A(1) at p odd) ψ*: B_Z → B_Y gives
//! `E_Z: 0 → K → B_Z → I → 0` and `E_Y: 0 → I → B_Y → C → 0`. Over the
//! large algebra (A(3), resp. A(2)) `E_j: 0 → C' → M_j → Σ^{-1}K' → 0`
//! presents the cohomology of j, where C' and K' are induced from C and K.

mod closed;
mod pages;

pub use closed::{
    closed_form, ext_a1_families, families, homotopy_order, lemma_families, lemma_form, odd_ext_a1_families, ClosedFormError,
    ClosedPage, Family, LemmaTable, OddDegrees, JMOD2_GENERATORS,
};
pub use pages::{abutment_check, d2_page, h0_tower_height, later_pages, lemma_mismatches, lemma_tables, AbutmentReport, AbutmentRow, D2Data, Page};

use crate::chartio::{ChartDoc, ChartMeta};
use crate::connect::{ConnectError, ResolvedSes, Route};
use crate::fplin::FpVector;
use crate::fpmod::{
    bockstein_tensor, bockstein_tensor_map, build_ses, cokernel_module, image_module, kernel_module, map_from_images,
    parse_free_element, parse_mod, parse_ses, realize, verify_ses, FpModError, GradedModule, ModuleMap, Ses,
};
use crate::resolve::Resolution;
use rayon::prelude::*;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    J2,
    Jmod2,
    Jp,
    Jpmodp,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::J2, Variant::Jmod2, Variant::Jp, Variant::Jpmodp];

    pub fn prime(self) -> u32 {
        match self {
            Variant::J2 | Variant::Jmod2 => 2,
            Variant::Jp | Variant::Jpmodp => 3,
        }
    }

    pub fn is_mod_p(self) -> bool {
        matches!(self, Variant::Jmod2 | Variant::Jpmodp)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::J2 => "j2",
            Variant::Jmod2 => "jmod2",
            Variant::Jp => "jp",
            Variant::Jpmodp => "jpmodp",
        }
    }

    /// The variant for a prime and name, if supported.
    pub fn lookup(prime: u32, name: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == name && v.prime() == prime)
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Variant, String> {
        Variant::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| format!("unknown variant {s:?}"))
    }
}

/// The chart window: s ≤ s_max and 0 ≤ t − s ≤ n_max.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Window {
    pub s_max: usize,
    pub n_max: i32,
}

impl Window {
    pub fn default_for(variant: Variant) -> Window {
        match variant.prime() {
            2 => Window { s_max: 24, n_max: 40 },
            _ => Window { s_max: 20, n_max: 48 },
        }
    }

    /// Internal degrees needed: one stem beyond the window for incoming d₂,
    /// and two filtrations above it for the composite δ_Y δ_Z.
    pub fn t_max(&self) -> i32 {
        self.n_max + self.s_max as i32 + 4
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JayError {
    #[error("fixture {name}: {source}")]
    Fixture { name: String, source: FpModError },
    #[error("{which} is not exact in degree {degree}")]
    NotExact { which: &'static str, degree: i32 },
    #[error(transparent)]
    Connect(#[from] ConnectError),
    #[error("long exact sequence disagrees with the direct resolution at ({s},{t}): {direct} vs {assembled}")]
    Les { s: usize, t: i32, direct: usize, assembled: usize },
    #[error("transport inconsistency at ({s},{t}): {detail}")]
    Transport { s: usize, t: i32, detail: String },
    #[error("d{r} pattern exceeds the E{r} dimension at ({s},{t})")]
    Pattern { r: usize, s: usize, t: i32 },
}

/// The fixture texts under `data/`.
pub fn fixture(name: &str) -> Option<&'static str> {
    Some(match name {
        "ko.mod" => include_str!("../../data/ko.mod"),
        "ksp4.mod" => include_str!("../../data/ksp4.mod"),
        "K.mod" => include_str!("../../data/K.mod"),
        "I.mod" => include_str!("../../data/I.mod"),
        "F2.mod" => include_str!("../../data/F2.mod"),
        "C3.mod" => include_str!("../../data/C3.mod"),
        "Mj.mod" => include_str!("../../data/Mj.mod"),
        "Mj_split.mod" => include_str!("../../data/Mj_split.mod"),
        "K3.mod" => include_str!("../../data/K3.mod"),
        "ej.ses" => include_str!("../../data/ej.ses"),
        "ej_split.ses" => include_str!("../../data/ej_split.ses"),
        "ko2.mod" => include_str!("../../data/ko2.mod"),
        "ksp4_2.mod" => include_str!("../../data/ksp4_2.mod"),
        "ell.mod" => include_str!("../../data/ell.mod"),
        "ell4.mod" => include_str!("../../data/ell4.mod"),
        "F3.mod" => include_str!("../../data/F3.mod"),
        "C3p.mod" => include_str!("../../data/C3p.mod"),
        "Mjp.mod" => include_str!("../../data/Mjp.mod"),
        "K3p.mod" => include_str!("../../data/K3p.mod"),
        "ejp.ses" => include_str!("../../data/ejp.ses"),
        _ => return None,
    })
}

fn fixture_err(name: &str, source: FpModError) -> JayError {
    JayError::Fixture { name: name.to_string(), source }
}

/// Realizes a fixture module.
pub fn load_fixture(name: &str) -> Result<GradedModule, JayError> {
    let text = fixture(name).ok_or_else(|| fixture_err(name, FpModError::Io("no such fixture".into())))?;
    let pres = parse_mod(text).map_err(|e| fixture_err(name, e))?;
    realize(&pres).map_err(|e| fixture_err(name, e))
}

fn load_fixture_ses(name: &str) -> Result<Ses, JayError> {
    let text = fixture(name).ok_or_else(|| fixture_err(name, FpModError::Io("no such fixture".into())))?;
    let spec = parse_ses(text).map_err(|e| fixture_err(name, e))?;
    let (sub, mid, quot) = (load_fixture(&spec.sub)?, load_fixture(&spec.mid)?, load_fixture(&spec.quot)?);
    build_ses(sub, mid, quot, &spec.inj, &spec.surj).map_err(|e| fixture_err(name, e))
}

/// The element of a presented module named by `text`, e.g. `Sq4 g0`.
pub fn element(m: &GradedModule, text: &str) -> Result<(i32, FpVector), FpModError> {
    let pres = m.presentation().ok_or_else(|| FpModError::Invalid("module has no presentation".into()))?;
    let (_, elt) = parse_free_element(text, &pres.gens, &pres.profile).map_err(FpModError::Invalid)?;
    m.element_from_free(&elt)?.ok_or_else(|| FpModError::Invalid(format!("{text} is zero")))
}

fn tensor_ses(ses: &Ses) -> Ses {
    let sub = bockstein_tensor(&ses.sub, &format!("{}/p", ses.sub.name()));
    let mid = bockstein_tensor(&ses.mid, &format!("{}/p", ses.mid.name()));
    let quot = bockstein_tensor(&ses.quot, &format!("{}/p", ses.quot.name()));
    let inj = bockstein_tensor_map(&ses.inj, &sub, &mid);
    let surj = bockstein_tensor_map(&ses.surj, &mid, &quot);
    Ses { sub, mid, quot, inj, surj }
}

fn check(ses: &Ses, which: &'static str) -> Result<(), JayError> {
    let report = verify_ses(ses);
    if report.passed() {
        return Ok(());
    }
    Err(JayError::NotExact { which, degree: report.first_failure().unwrap_or(i32::MIN) })
}

/// ψ*: B_Z → B_Y over the small algebra, from its generator images.
pub fn psi_star(variant: Variant) -> Result<ModuleMap, JayError> {
    let build = |src: &str, tgt: &str, images: &[&str]| -> Result<ModuleMap, JayError> {
        let (bz, by) = (load_fixture(src)?, load_fixture(tgt)?);
        let vs = images
            .iter()
            .map(|e| element(&by, e).map(|x| x.1))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| fixture_err(tgt, e))?;
        map_from_images(&bz, &by, &vs, 0).map_err(|e| fixture_err(src, e))
    };
    match variant {
        Variant::J2 => build("ksp4.mod", "ko.mod", &["Sq4 g0"]),
        Variant::Jmod2 => build("ksp4_2.mod", "ko2.mod", &["Sq4 a0", "Sq4 b1"]),
        Variant::Jp => build("ell4.mod", "ell.mod", &["P1 g0"]),
        Variant::Jpmodp => {
            let psi = psi_star(Variant::Jp)?;
            let bz = bockstein_tensor(&psi.source, "ell4/3");
            let by = bockstein_tensor(&psi.target, "ell/3");
            Ok(bockstein_tensor_map(&psi, &bz, &by))
        }
    }
}

/// E_Z and E_Y from the kernel, image and cokernel of ψ*.
pub fn psi_sequences(psi: &ModuleMap) -> Result<(Ses, Ses), JayError> {
    let err = |e| fixture_err("psi", e);
    let (k, inc_k) = kernel_module(psi, "K").map_err(err)?;
    let (i, co, inc_i) = image_module(psi, "I").map_err(err)?;
    let (c, proj) = cokernel_module(psi, "C").map_err(err)?;
    let ez = Ses { sub: k, mid: psi.source.clone(), quot: i.clone(), inj: inc_k, surj: co };
    let ey = Ses { sub: i, mid: psi.target.clone(), quot: c, inj: inc_i, surj: proj };
    check(&ez, "E_Z")?;
    check(&ey, "E_Y")?;
    Ok((ez, ey))
}

/// E_j over the large algebra.
pub fn j_sequence(variant: Variant, split: bool) -> Result<Ses, JayError> {
    let integral = if variant.prime() == 2 { if split { "ej_split.ses" } else { "ej.ses" } } else { "ejp.ses" };
    let ses = load_fixture_ses(integral)?;
    let ses = if variant.is_mod_p() { tensor_ses(&ses) } else { ses };
    check(&ses, "E_j")?;
    Ok(ses)
}

/// A built scenario with all resolutions in place.
#[derive(Clone)]
pub struct Scenario {
    pub variant: Variant,
    pub window: Window,
    pub split: bool,
    pub psi: ModuleMap,
    pub ez: ResolvedSes,
    pub ey: ResolvedSes,
    pub ej: ResolvedSes,
}

impl Scenario {
    pub fn prime(&self) -> u32 {
        self.variant.prime()
    }

    /// Resolution of C over the small algebra.
    pub fn c(&self) -> &Resolution {
        &self.ey.quot
    }

    /// Resolution of K over the small algebra.
    pub fn k(&self) -> &Resolution {
        &self.ez.sub
    }

    /// Resolution of I over the small algebra.
    pub fn i(&self) -> &Resolution {
        &self.ey.sub
    }

    /// Degree shift between K and the quotient of E_j: Ext^{s,t}(Σ^{-1}K') = Ext^{s,t+1}(K).
    pub fn k_shift(&self) -> i32 {
        let bottom = |m: &GradedModule| (m.min_degree()..=m.max_degree()).find(|&t| m.dim(t) > 0).unwrap_or(0);
        bottom(&self.ez.ses.sub) - bottom(&self.ej.ses.quot)
    }
}

pub fn build_scenario(variant: Variant) -> Result<Scenario, JayError> {
    build_scenario_with(variant, Window::default_for(variant), false)
}

/// Builds and resolves every module of a scenario. `split` replaces M_j by
/// the split extension (p = 2 only).
pub fn build_scenario_with(variant: Variant, window: Window, split: bool) -> Result<Scenario, JayError> {
    let psi = psi_star(variant)?;
    let (ez, ey) = psi_sequences(&psi)?;
    let ej = j_sequence(variant, split)?;
    let (s_small, s_large, t_max) = (window.s_max + 2, window.s_max + 1, window.t_max());
    let modules = vec![
        (ez.sub.clone(), s_small),
        (ez.mid.clone(), s_small),
        (ey.sub.clone(), s_small),
        (ey.mid.clone(), s_small),
        (ey.quot.clone(), s_small),
        (ej.sub.clone(), s_large),
        (ej.mid.clone(), s_large),
        (ej.quot.clone(), s_large),
    ];
    let res: Vec<Arc<Resolution>> =
        modules.into_par_iter().map(|(m, s)| Arc::new(Resolution::new(m, s, t_max))).collect();
    let ez = ResolvedSes::with_resolutions(ez, res[0].clone(), res[1].clone(), res[2].clone());
    let ey = ResolvedSes::with_resolutions(ey, res[2].clone(), res[3].clone(), res[4].clone());
    let ej = ResolvedSes::with_resolutions(ej, res[5].clone(), res[6].clone(), res[7].clone());
    Ok(Scenario { variant, window, split, psi, ez, ey, ej })
}

/// The map from a presented module sending each generator to the unique
/// nonzero element of its degree in `target`, when that map is an isomorphism.
pub fn presentation_iso(presented: &GradedModule, target: &GradedModule) -> Option<ModuleMap> {
    let degrees = presented.generator_degrees()?;
    let mut images = Vec::with_capacity(degrees.len());
    for t in degrees {
        if target.dim(t) != 1 {
            return None;
        }
        images.push(FpVector::basis(target.prime(), 1, 0));
    }
    let f = map_from_images(presented, target, &images, 0).ok()?;
    (f.is_module_map() && f.is_isomorphism()).then_some(f)
}

/// A full pipeline run: E₂ with d₂, the later pages and the abutment check.
pub struct Run {
    pub scenario: Scenario,
    pub d2: D2Data,
    /// E₃, E₄, …; the last page is E_∞.
    pub pages: Vec<Page>,
    pub abutment: AbutmentReport,
}

impl Run {
    pub fn e2(&self) -> &Page {
        &self.d2.e2
    }

    pub fn e3(&self) -> &Page {
        &self.pages[0]
    }

    pub fn einf(&self) -> &Page {
        self.pages.last().unwrap()
    }

    /// Charts of E₂ (with d₂), E₃ (with d₃) and E_∞.
    pub fn charts(&self) -> Vec<ChartDoc> {
        let sc = &self.scenario;
        let meta = |page: &str| ChartMeta {
            prime: sc.prime(),
            algebra: sc.ej.mid.algebra().name().to_string(),
            module: sc.variant.name().to_string(),
            page: page.to_string(),
        };
        vec![
            ChartDoc::from_page(meta("E2"), self.e2()),
            ChartDoc::from_page(meta("E3"), self.e3()),
            ChartDoc::from_page(meta("Einf"), self.einf()),
        ]
    }
}

pub fn run(variant: Variant, window: Window, split: bool, route: Route) -> Result<Run, JayError> {
    let scenario = build_scenario_with(variant, window, split)?;
    let d2 = d2_page(&scenario, route)?;
    let e3 = d2.e2.next()?;
    let pages = later_pages(&scenario, e3)?;
    let abutment = abutment_check(variant, pages.last().unwrap(), window.n_max);
    Ok(Run { scenario, d2, pages, abutment })
}
