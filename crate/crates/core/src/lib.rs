//! Directed topology of cubical scenes: dihomotopy classes, fundamental
//! categories, extremal models and their gluing.

pub mod category;
pub mod dipath;
pub mod error;
pub mod fincat;
pub mod grid;
pub mod model;
pub mod pv;
pub mod retract;
pub mod scene;
pub mod scenefile;
pub mod vankampen;
mod union_find;

pub use category::{bipartite_graph, extremal_points, full_subcategory, preorder, Arrow, HomTable, Preorder};
pub use dipath::{classes, enumerate_dipaths, Budget, ClassIndex, ClassList, DihomotopyClass, LatticePath};
pub use error::{Error, Result};
pub use grid::{compactify, EdgeId, GridComplex, VertexId, Window};
pub use scene::{parse_coord, validate_scene, Coord, CubicalScene, OpenBox, Point, SlabIdentification};
pub use retract::{check_adjunction, find_retract, induced_functor, verify_retract, Assignment, Direction, InducedFunctor, RetractData, RetractReport};
pub use model::{check_bipartite_injection, check_bipartite_iso, is_minimal, verify_extremal_model, ChainReport, RetractChain};
pub use fincat::{functors, FiniteCategory, Functor};
pub use vankampen::{pushout_category, restricted_chains, PushoutCategory, decompose_path, hom_from_presentation, pushout_chain, pushout_extremal_model, pushout_presentation, pushout_retract, verify_pushout, CatPresentation, Cover};
pub use pv::{analyze_deadlocks, parse_pv, to_scene, DeadlockReport, PvProgram};
pub use scenefile::{Resolver, SceneDocument};
