//! Figure and simulation presets: each names a catalog entry, the parameters
//! quoted in the figure caption and the sampling window.

use dlv_core::solutions::{instantiate, param_map, ClosedFormSolution, SolutionId};
use dlv_core::Value;

pub struct FigurePreset {
    pub id: &'static str,
    pub solution: SolutionId,
    pub params: &'static [(&'static str, i64, i64)],
    pub description: &'static str,
}

/// Caption parameters as `(name, numerator, denominator)`.
pub const FIGURES: &[FigurePreset] = &[
    FigurePreset {
        id: "4-1",
        solution: SolutionId::CH12_TW,
        params: &[("a", 25, 1), ("e", 2, 1)],
        description: "three-component competition front, a = 25, e = 2 (alpha = 11/2)",
    },
    FigurePreset {
        id: "6-1",
        solution: SolutionId::CD11_COMP,
        params: &[("a1", 3, 1), ("a2", 4, 1), ("b", 1, 2), ("c", 1, 5), ("lambda1", 2, 1), ("lambda2", 1, 1), ("C2", 1, 3)],
        description: "competition Dirichlet problem, beta = -1",
    },
    FigurePreset {
        id: "6-2",
        solution: SolutionId::CD21_CASE1,
        params: &[
            ("a1", 3, 1),
            ("a2", 2, 1),
            ("b", 3, 2),
            ("c", 3, 1),
            ("lambda1", 3, 4),
            ("lambda2", 1, 1),
            ("C1", -2, 1),
            ("C2", 5, 1),
            ("alpha0", 2, 1),
            ("alpha1", 1, 1),
            ("alpha2", 0, 1),
        ],
        description: "first-type conditional-symmetry solution with zero-flux window",
    },
    FigurePreset {
        id: "7-1",
        solution: SolutionId::CD13_3COMP,
        params: &[
            ("a1", 9, 2),
            ("a2", 2, 1),
            ("lambda1", 1, 1),
            ("lambda2", 2, 1),
            ("b", 1, 2),
            ("c", 3, 4),
            ("e", 1, 7),
            ("alpha", -1, 1),
            ("v0", 3, 2),
        ],
        description: "three-species competition, v and w coexist (0 < v0 < a2)",
    },
    FigurePreset {
        id: "7-2",
        solution: SolutionId::CD13_3COMP,
        params: &[
            ("a1", 9, 2),
            ("a2", 2, 1),
            ("lambda1", 1, 1),
            ("lambda2", 2, 1),
            ("b", 1, 2),
            ("c", 3, 4),
            ("e", 1, 7),
            ("alpha", 3, 2),
            ("v0", 2, 1),
        ],
        description: "three-species competition, v dominates (v0 = a2)",
    },
];

pub fn figure(id: &str) -> Option<&'static FigurePreset> {
    FIGURES.iter().find(|f| f.id == id)
}

impl FigurePreset {
    pub fn instantiate(&self) -> ClosedFormSolution {
        let raw = param_map(self.params.iter().map(|&(k, n, d)| (k, Value::ratio(n, d))));
        instantiate(self.solution, &raw).expect("figure presets satisfy their restrictions")
    }
}

/// Named simulation setups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimPreset {
    /// Fisher-type front on a truncated domain with zero-flux ends.
    Front,
    /// Two-species competition with `u = a1/b`, `v = 0` held at both ends.
    Competition,
    /// Three-species competition with constant end values, run to t = 10.
    ThreeComponent,
}

impl SimPreset {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "front" => Some(SimPreset::Front),
            "competition" => Some(SimPreset::Competition),
            "three-component" => Some(SimPreset::ThreeComponent),
            _ => None,
        }
    }

    pub fn solution(self) -> SolutionId {
        match self {
            SimPreset::Front => SolutionId::FISHER_FRONT,
            SimPreset::Competition => SolutionId::CD11_COMP,
            SimPreset::ThreeComponent => SolutionId::CD13_3COMP,
        }
    }

    pub fn nx(self) -> usize {
        match self {
            SimPreset::Front | SimPreset::Competition => 801,
            SimPreset::ThreeComponent => 81,
        }
    }

    pub fn t_final(self) -> f64 {
        match self {
            SimPreset::ThreeComponent => 10.0,
            _ => 1.0,
        }
    }
}
