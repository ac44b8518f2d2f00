//! Serializable analysis reports.

use serde::{Deserialize, Serialize};

use ditop_core::scenefile::SceneDocument;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub scene: String,
    pub budget: BudgetUsed,
    pub tasks: Vec<TaskReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetUsed {
    pub max_paths: usize,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub length: usize,
    /// Step axes of the canonical representative.
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairClasses {
    pub from: String,
    pub to: String,
    pub exact: bool,
    pub classes: Vec<ClassEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub from: String,
    pub to: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentEntry {
    pub point: String,
    pub target: String,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEntry {
    pub direction: String,
    pub objects: Vec<String>,
    pub found: bool,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub piece: u8,
    pub from: String,
    pub to: String,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairComparisonEntry {
    pub from: String,
    pub to: String,
    pub presented: usize,
    pub direct: usize,
    pub exact: bool,
    pub isomorphic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluedModelEntry {
    pub passed: bool,
    pub pieces_passed: [bool; 3],
    pub final_objects: Vec<String>,
    pub missing_extremal: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateEntry {
    pub point: String,
    pub program_counters: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum TaskReport {
    Classes {
        pairs: Vec<PairClasses>,
    },
    Extremal {
        minimal: Vec<String>,
        maximal: Vec<String>,
    },
    Bipartite {
        exact: bool,
        nodes: Vec<String>,
        edges: Vec<EdgeEntry>,
    },
    RetractVerify {
        passed: bool,
        /// `None` when every hom-set was exact, else the grade bound used.
        checked_up_to: Option<usize>,
        adjunction: bool,
        failures: Vec<String>,
    },
    RetractFind {
        found: bool,
        exact: bool,
        assignment: Vec<AssignmentEntry>,
    },
    ModelVerify {
        passed: bool,
        exact: bool,
        steps: Vec<StepEntry>,
        final_objects: Vec<String>,
        missing_extremal: Vec<String>,
        generators: Vec<EdgeEntry>,
    },
    ModelMinimal {
        minimal: bool,
        further: Vec<StepEntry>,
    },
    Vankampen {
        isomorphic: bool,
        exact: bool,
        inclusion_commutes: Option<bool>,
        generators: Vec<GeneratorEntry>,
        quiver: Vec<EdgeEntry>,
        relations: usize,
        pairs: Vec<PairComparisonEntry>,
        glued_model: Option<GluedModelEntry>,
    },
    PvCompile {
        scene: SceneDocument,
    },
    Deadlocks {
        deadlocks: Vec<StateEntry>,
        unreachable: Vec<StateEntry>,
    },
}

impl TaskReport {
    /// False when the task ran but its check failed.
    pub fn succeeded(&self) -> bool {
        match self {
            TaskReport::RetractVerify { passed, adjunction, .. } => *passed && *adjunction,
            TaskReport::RetractFind { found, .. } => *found,
            TaskReport::ModelVerify { passed, .. } => *passed,
            TaskReport::Vankampen { isomorphic, glued_model, .. } => *isomorphic && !matches!(glued_model, Some(m) if !m.passed),
            _ => true,
        }
    }
}
