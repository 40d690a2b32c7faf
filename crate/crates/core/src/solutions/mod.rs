//! Catalog of closed-form solutions.
//!
//! Every entry is built by [`instantiate`] from a parameter map: derived
//! coefficients are computed (exactly, when the inputs are rational), the
//! entry's restrictions are checked, and the result is a
//! [`ClosedFormSolution`] carrying the model it solves, a hand-derived
//! analytic jet, a validity predicate and, where one exists, the `t → +∞`
//! limit.
//!
//! Fields that are not catalog entries (Lie-transformed solutions, ansatz
//! lifts, test fields) share the [`PdeField`] trait so that residual and
//! simulation code is written once.

mod cd;
mod fronts;
mod heat;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{DomainError, SolutionError};
use crate::model::{DlvModel, JetPoint};
use crate::value::{parse_value, Value};

pub use heat::{heat_kernel_family, HeatProfile, HkCoefficients};

/// Default half-width of the excluded band around singular sets, measured in
/// the composite argument (e.g. `μ(x − st)` for coth fronts).
pub const DEFAULT_GUARD: f64 = 1e-6;

/// Anything with a model and an analytic jet.
pub trait PdeField: Send + Sync {
    fn model(&self) -> &DlvModel;

    fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError>;

    fn eval(&self, t: f64, x: f64) -> Result<Vec<f64>, DomainError> {
        self.jet(t, x).map(|j| j.u)
    }

    /// `‖S‖∞ / (1 + term scale)` at `(t, x)`.
    fn relative_residual(&self, t: f64, x: f64) -> Result<f64, DomainError> {
        let jet = self.jet(t, x)?;
        Ok(self.model().relative_residual(&jet))
    }
}

impl<T: PdeField + ?Sized> PdeField for Box<T> {
    fn model(&self) -> &DlvModel {
        (**self).model()
    }
    fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError> {
        (**self).jet(t, x)
    }
}

impl<T: PdeField + ?Sized> PdeField for std::sync::Arc<T> {
    fn model(&self) -> &DlvModel {
        (**self).model()
    }
    fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError> {
        (**self).jet(t, x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(non_camel_case_types)]
pub enum SolutionId {
    RM2000_A,
    RM2000_B,
    FISHER_FRONT,
    FISHER_COTH,
    PREDPREY_FRONT,
    HUNG11_TW,
    CH12_TW,
    CPP_FRONT,
    CD11_EXP,
    CD11_TRIG,
    CD11_TANH2,
    CD11_TANH3,
    CD11_COMP,
    CD21_CASE1,
    CD13_3COMP,
    HK_FAMILY,
    HK_SIN,
}

impl SolutionId {
    pub const ALL: [SolutionId; 17] = [
        SolutionId::RM2000_A,
        SolutionId::RM2000_B,
        SolutionId::FISHER_FRONT,
        SolutionId::FISHER_COTH,
        SolutionId::PREDPREY_FRONT,
        SolutionId::HUNG11_TW,
        SolutionId::CH12_TW,
        SolutionId::CPP_FRONT,
        SolutionId::CD11_EXP,
        SolutionId::CD11_TRIG,
        SolutionId::CD11_TANH2,
        SolutionId::CD11_TANH3,
        SolutionId::CD11_COMP,
        SolutionId::CD21_CASE1,
        SolutionId::CD13_3COMP,
        SolutionId::HK_FAMILY,
        SolutionId::HK_SIN,
    ];

    pub fn as_str(self) -> &'static str {
        info(self).name
    }

    /// Entries whose components are polynomials in `tanh` (or `coth`) of a
    /// single traveling coordinate.
    pub fn is_tanh_type(self) -> bool {
        matches!(
            self,
            SolutionId::RM2000_A
                | SolutionId::RM2000_B
                | SolutionId::FISHER_FRONT
                | SolutionId::FISHER_COTH
                | SolutionId::PREDPREY_FRONT
                | SolutionId::HUNG11_TW
                | SolutionId::CH12_TW
                | SolutionId::CPP_FRONT
        )
    }
}

impl fmt::Display for SolutionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolutionId {
    type Err = SolutionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolutionId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| SolutionError::UnknownId(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct SolutionInfo {
    pub id: SolutionId,
    pub name: &'static str,
    pub m: usize,
    pub params: &'static [ParamSpec],
    pub restrictions: &'static [&'static str],
    pub source: &'static str,
}

impl SolutionInfo {
    pub fn has_param(&self, name: &str) -> bool {
        self.params.iter().any(|p| p.name == name)
    }
}

macro_rules! params {
    ($($name:literal = $def:literal : $doc:literal),* $(,)?) => {
        &[$(ParamSpec { name: $name, default: $def, doc: $doc }),*]
    };
}

const FISHER_PARAMS: &[ParamSpec] = params![
    "a1" = "1": "linear rate of u",
    "a2" = "1": "linear rate of v",
    "b1" = "2": "self-limitation of u",
    "b2" = "1": "effect of u on v",
    "c1" = "1": "effect of v on u",
    "c2" = "2": "self-limitation of v",
    "branch" = "0": "0: beta0 = 0 (needs a1 = a2); 1: beta0 = a2/c2",
];

const CD11_PARAMS_TRIG: &[ParamSpec] = params![
    "a1" = "3": "", "a2" = "4": "", "lambda1" = "2": "", "lambda2" = "1": "",
    "C1" = "1/2": "cos coefficient", "C2" = "1/3": "sin coefficient",
];

const CD11_PARAMS_EXP: &[ParamSpec] = params![
    "a1" = "4": "", "a2" = "3": "", "lambda1" = "2": "", "lambda2" = "1": "",
    "C1" = "1/2": "e^{kx} coefficient", "C2" = "1/3": "e^{-kx} coefficient",
];

static CATALOG: [SolutionInfo; 17] = [
    SolutionInfo {
        id: SolutionId::RM2000_A,
        name: "RM2000_A",
        m: 2,
        params: params!["a" = "3": "rate of v (a2)", "lambda" = "2": "lambda2"],
        restrictions: &["a > 0"],
        source: "two-component competition front, u linear in tanh",

    },
    SolutionInfo {
        id: SolutionId::RM2000_B,
        name: "RM2000_B",
        m: 2,
        params: params!["a" = "2": "rate of v (a2)", "c" = "3": "c1"],
        restrictions: &["1 + a c > 0", "a c != 5", "lambda2 = (1 + a(c-6))/(5 - a c) > 0"],
        source: "two-component competition front, both components quadratic in tanh",
    },
    SolutionInfo {
        id: SolutionId::FISHER_FRONT,
        name: "FISHER_FRONT",
        m: 2,
        params: FISHER_PARAMS,
        restrictions: &[
            "branch 0: a1 = a2, c1 != c2, b1 != b2",
            "branch 1: c2 != 0 and either (c1 != c2, b1 != b2, a1 beta1 c2 = -a2 b1) or (c1 = c2, b1 = b2)",
            "a > 0, b != 0",
        ],
        source: "Fisher-type front with linear component relation",
    },
    SolutionInfo {
        id: SolutionId::FISHER_COTH,
        name: "FISHER_COTH",
        m: 2,
        params: FISHER_PARAMS,
        restrictions: &["as FISHER_FRONT", "blow-up plane sqrt(a/24) x - 5a/12 t = 0 excluded"],
        source: "coth variant of the Fisher-type front",
    },
    SolutionInfo {
        id: SolutionId::PREDPREY_FRONT,
        name: "PREDPREY_FRONT",
        m: 2,
        params: params![
            "a1" = "2": "prey growth rate", "a2" = "1": "predator death rate",
            "b1" = "1": "prey self-limitation", "b2" = "3": "predation gain",
            "c" = "7/10": "predation loss (the predator self-limitation is 3c)",
        ],
        restrictions: &["a1 b2 - a2 b1 > 0", "3 b1 + b2 > 0", "c != 0", "lambda > 0"],
        source: "prey-predator traveling front",
    },
    SolutionInfo {
        id: SolutionId::HUNG11_TW,
        name: "HUNG11_TW",
        m: 3,
        params: params!["a" = "5": "common linear rate", "alpha" = "1": "wave speed"],
        restrictions: &["a != 0", "8 - a + 4 alpha != 0", "2 + alpha - a != 0"],
        source: "three-component tanh front with equal diffusivities",
    },
    SolutionInfo {
        id: SolutionId::CH12_TW,
        name: "CH12_TW",
        m: 3,
        params: params!["a" = "25": "common linear rate", "e" = "2": "interaction parameter"],
        restrictions: &["a != 0", "e != 1"],
        source: "three-component competition front",
    },
    SolutionInfo {
        id: SolutionId::CPP_FRONT,
        name: "CPP_FRONT",
        m: 3,
        params: params![
            "a1" = "11": "", "a2" = "9": "", "a3" = "4": "predator death rate",
            "b1" = "1/2": "", "b2" = "1/6": "", "b3" = "5": "",
            "c1" = "6": "", "c2" = "2": "", "c3" = "7": "",
        ],
        restrictions: &[
            "a3 != 16",
            "lambda1, lambda2 > 0",
            "b3 c2 != b2 c3",
            "(24+a3)(b1c2-b2c1) = (8-a1)(b2c3-b3c2) + (8-a2)(b3c1-b1c3)",
        ],
        source: "competition-prey-predator front",
    },
    SolutionInfo {
        id: SolutionId::CD11_EXP,
        name: "CD11_EXP",
        m: 2,
        params: CD11_PARAMS_EXP,
        restrictions: &["a1 != a2", "lambda1 != lambda2", "beta = (a1-a2)/(lambda1-lambda2) > 0"],
        source: "conditional-symmetry solution, exponential branch",
    },
    SolutionInfo {
        id: SolutionId::CD11_TRIG,
        name: "CD11_TRIG",
        m: 2,
        params: CD11_PARAMS_TRIG,
        restrictions: &["a1 != a2", "lambda1 != lambda2", "beta = (a1-a2)/(lambda1-lambda2) < 0"],
        source: "conditional-symmetry solution, trigonometric branch",
    },
    SolutionInfo {
        id: SolutionId::CD11_TANH2,
        name: "CD11_TANH2",
        m: 2,
        params: params![
            "a1" = "5": "", "a2" = "1": "", "lambda2" = "1": "lambda1 = 9/5 lambda2",
            "C1" = "1": "", "C2" = "0": "must vanish for boundedness on the whole line",
        ],
        restrictions: &["a1 > a2", "lambda1 = 9/5 lambda2"],
        source: "conditional-symmetry solution with cosh^3 profile",
    },
    SolutionInfo {
        id: SolutionId::CD11_TANH3,
        name: "CD11_TANH3",
        m: 2,
        params: params![
            "a1" = "5": "", "a2" = "1": "", "lambda2" = "1": "lambda1 = 4/3 lambda2",
            "C1" = "1": "", "C2" = "1": "coefficient of the quadrature term",
        ],
        restrictions: &["a1 > a2", "lambda1 = 4/3 lambda2", "x > 0"],
        source: "conditional-symmetry solution with sinh cosh^3 profile",
    },
    SolutionInfo {
        id: SolutionId::CD11_COMP,
        name: "CD11_COMP",
        m: 2,
        params: params![
            "a1" = "3": "", "a2" = "4": "", "b" = "1/2": "", "c" = "1/5": "",
            "lambda1" = "2": "", "lambda2" = "1": "", "C2" = "1/3": "",
        ],
        restrictions: &["a1 > 0", "a2 > 0", "b > 0", "c > 0", "beta = (a1-a2)/(lambda1-lambda2) < 0"],
        source: "competition solution of the Dirichlet problem on a bounded interval",
    },
    SolutionInfo {
        id: SolutionId::CD21_CASE1,
        name: "CD21_CASE1",
        m: 2,
        params: params![
            "a1" = "3": "", "a2" = "2": "", "lambda1" = "3/4": "", "lambda2" = "1": "",
            "b" = "3/2": "b = c = -1 gives the unscaled system",
            "c" = "3": "",
            "C1" = "-2": "", "C2" = "5": "",
            "alpha0" = "2": "", "alpha1" = "1": "", "alpha2" = "0": "",
        ],
        restrictions: &[
            "lambda1 != lambda2",
            "kappa^2 = (lambda1 a2 - lambda2 a1)/(lambda1 - lambda2) > 0",
            "a1 a2 != 0",
            "b != 0, c != 0",
        ],
        source: "first-type conditional-symmetry solution with cosine modulation",
    },
    SolutionInfo {
        id: SolutionId::CD13_3COMP,
        name: "CD13_3COMP",
        m: 3,
        params: params![
            "a1" = "9/2": "", "a2" = "2": "a3 = a2", "lambda1" = "1": "",
            "lambda2" = "2": "lambda3 = lambda2",
            "b" = "1/2": "", "c" = "3/4": "", "e" = "1/7": "",
            "alpha" = "-1": "operator parameter", "v0" = "3/2": "",
            "C1" = "0": "", "C2" = "1": "",
        ],
        restrictions: &["a1 != a2 = a3", "lambda2 = lambda3 != lambda1", "delta < 0", "b, c, e != 0"],
        source: "three-component competition solution with Dirichlet data",
    },
    SolutionInfo {
        id: SolutionId::HK_FAMILY,
        name: "HK_FAMILY",
        m: 3,
        params: params![
            "w0" = "1/3": "", "amp" = "1/2": "Gaussian bump amplitude",
            "center" = "0": "", "width" = "1": "",
            "c1" = "1/2": "", "b2" = "1/3": "", "e1" = "2/5": "", "e2" = "3/7": "",
            "c2" = "7/10": "", "e3" = "11/10": "",
        ],
        restrictions: &["c1 b2 != 1", "third linear factor solvable for (b3, c3)"],
        source: "heat-kernel family with linearly dependent reaction factors",
    },
    SolutionInfo {
        id: SolutionId::HK_SIN,
        name: "HK_SIN",
        m: 3,
        params: params![
            "w0" = "1/3": "", "beta" = "1/5": "", "gamma" = "3": "",
            "c1" = "1/2": "", "b2" = "1/3": "", "e1" = "2/5": "", "e2" = "3/7": "",
            "c2" = "7/10": "", "e3" = "11/10": "",
        ],
        restrictions: &["c1 b2 != 1", "beta != 0, gamma != 0"],
        source: "heat-kernel family, sine profile",
    },
];

pub fn info(id: SolutionId) -> &'static SolutionInfo {
    CATALOG.iter().find(|i| i.id == id).expect("every id has an entry")
}

/// All catalog entries with their metadata.
pub fn catalog() -> &'static [SolutionInfo] {
    &CATALOG
}

/// Rectangular sampling window inside the validity domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub t: (f64, f64),
    pub x: (f64, f64),
}

impl Window {
    /// `n × n` tensor grid including the corners.
    pub fn grid(&self, n: usize) -> Vec<(f64, f64)> {
        let lin = |(a, b): (f64, f64), k: usize| if n == 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 };
        let mut pts = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                pts.push((lin(self.t, i), lin(self.x, j)));
            }
        }
        pts
    }
}

/// Public view of a polynomial-in-tanh front: `u_i = Σ_k coeffs[i][k] T^k`,
/// `T = tanh(μ(x − s t))` (or `coth`).
#[derive(Clone, Debug)]
pub struct FrontData {
    pub mu: Value,
    pub speed: Value,
    pub coth: bool,
    pub coeffs: Vec<Vec<Value>>,
}

#[derive(Clone, Debug)]
pub(crate) enum Kind {
    Front(fronts::PolyFront),
    Cd11(cd::Cd11),
    CdTanh(cd::CdTanh),
    Cd21(cd::Cd21),
    Cd13(cd::Cd13),
    Heat(heat::Heat),
}

/// A cataloged exact solution with everything needed to verify it.
#[derive(Clone, Debug)]
pub struct ClosedFormSolution {
    id: SolutionId,
    model: DlvModel,
    params: Vec<(String, Value)>,
    derived: Vec<(String, Value)>,
    window: Window,
    asymptote: Option<Vec<f64>>,
    nonnegative: bool,
    guard: f64,
    pub(crate) kind: Kind,
}

impl ClosedFormSolution {
    pub fn id(&self) -> SolutionId {
        self.id
    }

    pub fn params(&self) -> &[(String, Value)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<Value> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Derived constants (wave speed, `β`, `κ²`, `δ`, `λ_i`, amplitudes, …).
    pub fn derived(&self) -> &[(String, Value)] {
        &self.derived
    }

    pub fn derived_value(&self, name: &str) -> Option<Value> {
        self.derived.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Default sampling window inside the validity domain.
    pub fn window(&self) -> Window {
        self.window
    }

    /// Pointwise limit as `t → +∞`, when one exists.
    pub fn time_asymptote(&self) -> Option<Vec<f64>> {
        self.asymptote.clone()
    }

    /// Whether the parameters satisfy the entry's stated sign conditions, so
    /// that all components are nonnegative on the window.
    pub fn declared_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn front(&self) -> Option<FrontData> {
        match &self.kind {
            Kind::Front(f) => Some(FrontData {
                mu: f.mu_v,
                speed: f.speed_v,
                coth: f.coth,
                coeffs: f.exact.clone(),
            }),
            _ => None,
        }
    }

    /// Whether `(t, x)` is in the validity domain.
    pub fn is_valid(&self, t: f64, x: f64) -> bool {
        self.jet(t, x).is_ok()
    }
}

impl PdeField for ClosedFormSolution {
    fn model(&self) -> &DlvModel {
        &self.model
    }

    fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError> {
        if !t.is_finite() || !x.is_finite() {
            return Err(DomainError::OutOfDomain { t, x, reason: "non-finite coordinate".into() });
        }
        match &self.kind {
            Kind::Front(f) => f.jet(t, x, self.guard),
            Kind::Cd11(c) => Ok(c.jet(t, x)),
            Kind::CdTanh(c) => c.jet(t, x, self.guard),
            Kind::Cd21(c) => c.jet(t, x, self.guard),
            Kind::Cd13(c) => Ok(c.jet(t, x)),
            Kind::Heat(h) => h.jet(t, x),
        }
    }
}

/// Resolved parameters: user values over defaults.
pub(crate) struct Params {
    id: SolutionId,
    map: BTreeMap<String, Value>,
}

impl Params {
    fn resolve(id: SolutionId, raw: &BTreeMap<String, Value>) -> Result<Self, SolutionError> {
        let inf = info(id);
        for k in raw.keys() {
            if !inf.has_param(k) {
                return Err(SolutionError::UnknownParam { id: inf.name.into(), param: k.clone() });
            }
        }
        let mut map = BTreeMap::new();
        for p in inf.params {
            let v = match raw.get(p.name) {
                Some(v) => *v,
                None => parse_value(p.default).ok_or_else(|| SolutionError::MissingParam(p.name.into()))?,
            };
            map.insert(p.name.to_string(), v);
        }
        Ok(Params { id, map })
    }

    pub(crate) fn get(&self, name: &str) -> Value {
        *self.map.get(name).unwrap_or_else(|| panic!("{} has no parameter {name}", self.id))
    }

    pub(crate) fn f(&self, name: &str) -> f64 {
        self.get(name).to_f64()
    }

    fn ordered(&self) -> Vec<(String, Value)> {
        info(self.id).params.iter().map(|p| (p.name.to_string(), self.map[p.name])).collect()
    }
}

pub(crate) fn require(cond: bool, condition: &str, source: &'static str) -> Result<(), SolutionError> {
    if cond {
        Ok(())
    } else {
        Err(SolutionError::Restriction { condition: condition.to_string(), source_eq: source })
    }
}

/// Pieces produced by each family builder.
pub(crate) struct Built {
    pub model: DlvModel,
    pub derived: Vec<(String, Value)>,
    pub window: Window,
    pub asymptote: Option<Vec<f64>>,
    pub nonnegative: bool,
    pub kind: Kind,
}

/// Build a catalog entry from a (possibly partial) parameter map; missing
/// parameters take their reference defaults.
pub fn instantiate(id: SolutionId, raw: &BTreeMap<String, Value>) -> Result<ClosedFormSolution, SolutionError> {
    let p = Params::resolve(id, raw)?;
    let src = info(id).source;
    let built = match id {
        SolutionId::RM2000_A => fronts::rm2000_a(&p, src)?,
        SolutionId::RM2000_B => fronts::rm2000_b(&p, src)?,
        SolutionId::FISHER_FRONT => fronts::fisher(&p, src, false)?,
        SolutionId::FISHER_COTH => fronts::fisher(&p, src, true)?,
        SolutionId::PREDPREY_FRONT => fronts::predprey(&p, src)?,
        SolutionId::HUNG11_TW => fronts::hung11(&p, src)?,
        SolutionId::CH12_TW => fronts::ch12(&p, src)?,
        SolutionId::CPP_FRONT => fronts::cpp(&p, src)?,
        SolutionId::CD11_EXP => cd::cd11(&p, src, cd::Cd11Branch::Exp)?,
        SolutionId::CD11_TRIG => cd::cd11(&p, src, cd::Cd11Branch::Trig)?,
        SolutionId::CD11_COMP => cd::cd11(&p, src, cd::Cd11Branch::Comp)?,
        SolutionId::CD11_TANH2 => cd::cd_tanh(&p, src, false)?,
        SolutionId::CD11_TANH3 => cd::cd_tanh(&p, src, true)?,
        SolutionId::CD21_CASE1 => cd::cd21(&p, src)?,
        SolutionId::CD13_3COMP => cd::cd13(&p, src)?,
        SolutionId::HK_FAMILY => heat::hk_family(&p, src)?,
        SolutionId::HK_SIN => heat::hk_sin(&p, src)?,
    };
    Ok(ClosedFormSolution {
        id,
        model: built.model.with_name(id.as_str()),
        params: p.ordered(),
        derived: built.derived,
        window: built.window,
        asymptote: built.asymptote,
        nonnegative: built.nonnegative,
        guard: DEFAULT_GUARD,
        kind: built.kind,
    })
}

/// The reference instance of `id` (all defaults).
pub fn reference(id: SolutionId) -> ClosedFormSolution {
    instantiate(id, &BTreeMap::new()).expect("reference parameters satisfy the restrictions")
}

/// Convenience: build a parameter map from `(name, value)` pairs.
pub fn param_map<I, K>(pairs: I) -> BTreeMap<String, Value>
where
    I: IntoIterator<Item = (K, Value)>,
    K: Into<String>,
{
    pairs.into_iter().map(|(k, v)| (k.into(), v)).collect()
}

/// Convenience list of all reference instances.
pub fn all_references() -> Vec<ClosedFormSolution> {
    SolutionId::ALL.iter().map(|&id| reference(id)).collect()
}

/// Max relative residual over an `n × n` grid of the window; points in the
/// singular guard band are skipped and counted.
pub fn residual_sweep(field: &dyn PdeField, window: Window, n: usize) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut skipped = 0;
    for (t, x) in window.grid(n) {
        match field.relative_residual(t, x) {
            Ok(r) => worst = worst.max(r),
            Err(_) => skipped += 1,
        }
    }
    (worst, skipped)
}
