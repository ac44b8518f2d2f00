//! Request execution.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::PathBuf;

use serde::Serialize;

use ditop_core::category::{bipartite_graph, extremal_points, extremal_set, full_subcategory, HomTable};
use ditop_core::model::{further_retracts, verify_extremal_model, verify_extremal_model_bounded, RetractChain};
use ditop_core::pv::{analyze_deadlocks, parse_pv, to_scene_with_limit, PvProgram};
use ditop_core::retract::{check_adjunction, find_retract, find_retract_bounded, induced_functor, verify_retract, verify_retract_bounded};
use ditop_core::scenefile::{BudgetSpec, Resolver, RetractSpec, SceneDocument};
use ditop_core::vankampen::{pushout_extremal_model, restricted_chains, verify_pushout};
use ditop_core::{compactify, Budget, CubicalScene, Direction, Error, GridComplex, VertexId};

use crate::render;
use crate::report::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Task {
    Classes,
    Extremal,
    Bipartite,
    RetractVerify,
    RetractFind,
    ModelVerify,
    ModelMinimal,
    Vankampen,
    PvCompile,
    Deadlocks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
    Svg,
}

#[derive(Debug, Clone)]
pub struct Request {
    pub scene: PathBuf,
    pub tasks: Vec<Task>,
    pub max_paths: Option<usize>,
    pub max_steps: Option<usize>,
    /// Defaults from the environment, below the command-line flags.
    pub env_budget: Option<BudgetSpec>,
    pub format: Format,
    pub max_processes: usize,
}

/// A failure reported as JSON with exit status 2 (bad input) or 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip)]
    pub exit_code: i32,
}

impl CliError {
    pub fn input(kind: &str, message: impl Into<String>) -> Self {
        CliError { error: kind.into(), message: message.into(), line: None, column: None, exit_code: 2 }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("errors serialize")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (line, column) = match &e {
            Error::SceneFile { line, column, .. } if *line > 0 => (Some(*line), Some(*column)),
            Error::Pv(ditop_core::pv::PvError::SyntaxError { line, column, .. })
            | Error::Pv(ditop_core::pv::PvError::UnknownResource { line, column, .. })
            | Error::Pv(ditop_core::pv::PvError::ReleaseBeforeAcquire { line, column, .. })
            | Error::Pv(ditop_core::pv::PvError::NestedAcquire { line, column, .. }) => (Some(*line), Some(*column)),
            _ => (None, None),
        };
        let input = !matches!(
            e,
            Error::BudgetExceeded { .. }
                | Error::InexactHomSet { .. }
                | Error::SubsetBudgetExceeded { .. }
                | Error::NotAPospace
                | Error::NotTwoDimensional
                | Error::InclusionNotFunctorial(_)
                | Error::IncompatibleRetracts(_)
        );
        let debug = match &e {
            Error::Pv(inner) => format!("{inner:?}"),
            other => format!("{other:?}"),
        };
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        CliError { error: kind, message: e.to_string(), line, column, exit_code: if input { 2 } else { 1 } }
    }
}

/// Output text and whether every check passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub output: String,
    pub success: bool,
}

struct Context {
    doc: SceneDocument,
    scene: CubicalScene,
    grid: GridComplex,
    budget: Budget,
    program: Option<PvProgram>,
}

impl Context {
    fn resolver(&self) -> Resolver<'_> {
        Resolver { grid: &self.grid, scene: &self.scene }
    }

    fn name(&self, v: VertexId) -> String {
        let p = self.grid.vertex_point(v);
        match self.scene.marked_points.iter().find(|(_, q)| **q == p) {
            Some((n, _)) => n.clone(),
            None => self.grid.vertex_label(v),
        }
    }

    fn names(&self, vs: &[VertexId]) -> Vec<String> {
        vs.iter().map(|v| self.name(*v)).collect()
    }

    fn edges(&self, table: &HomTable) -> Vec<EdgeEntry> {
        table
            .edge_multiset()
            .into_iter()
            .map(|((a, b), count)| EdgeEntry { from: self.name(a), to: self.name(b), count })
            .collect()
    }

    fn irreducible_edges(&self, table: &HomTable) -> Vec<EdgeEntry> {
        let mut counts: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
        for f in table.irreducible_arrows() {
            *counts.entry((f.from, f.to)).or_default() += 1;
        }
        counts.into_iter().map(|((a, b), count)| EdgeEntry { from: self.name(a), to: self.name(b), count }).collect()
    }
}

fn budget_of(req: &Request, doc: &SceneDocument, grid: &GridComplex) -> Budget {
    let mut b = doc.budget(Budget::for_grid(grid));
    if let Some(env) = req.env_budget {
        b = Budget::new(env.max_paths.unwrap_or(b.max_paths), env.max_steps.unwrap_or(b.max_steps));
    }
    Budget::new(req.max_paths.unwrap_or(b.max_paths), req.max_steps.unwrap_or(b.max_steps))
}

fn load(req: &Request) -> Result<Context, CliError> {
    let text = std::fs::read_to_string(&req.scene)
        .map_err(|e| CliError::input("Io", format!("cannot read {}: {e}", req.scene.display())))?;
    let is_pv = req.scene.extension().is_some_and(|e| e == "pv");
    let (doc, program) = if is_pv {
        let program = parse_pv(&text).map_err(Error::from)?;
        let scene = to_scene_with_limit(&program, req.max_processes)?;
        (SceneDocument::from_scene(&scene), Some(program))
    } else {
        (SceneDocument::parse(&text)?, None)
    };
    let scene = doc.scene()?;
    let grid = compactify(&scene)?;
    let budget = budget_of(req, &doc, &grid);
    Ok(Context { doc, scene, grid, budget, program })
}

pub fn run(req: &Request) -> Result<Outcome, CliError> {
    let ctx = load(req)?;
    let mut tasks = req.tasks.clone();
    if tasks.is_empty() {
        tasks.push(Task::Extremal);
    }
    let mut reports = Vec::new();
    for task in &tasks {
        reports.push(run_task(&ctx, *task)?);
    }
    let success = reports.iter().all(TaskReport::succeeded);
    let report = Report {
        scene: req.scene.display().to_string(),
        budget: BudgetUsed { max_paths: ctx.budget.max_paths, max_steps: ctx.budget.max_steps },
        tasks: reports,
    };
    let output = match req.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
        Format::Text => text(&report),
        Format::Dot => dot(&ctx, &report)?,
        Format::Svg => svg(&ctx, &report)?,
    };
    Ok(Outcome { output, success })
}

fn marked_or_extremal(ctx: &Context) -> Result<Vec<VertexId>, CliError> {
    if ctx.scene.marked_points.is_empty() {
        return Ok(extremal_set(&ctx.grid));
    }
    let r = ctx.resolver();
    let mut out = ctx.scene.marked_points.keys().map(|n| r.point(n)).collect::<ditop_core::Result<Vec<_>>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn run_task(ctx: &Context, task: Task) -> Result<TaskReport, CliError> {
    Ok(match task {
        Task::Classes => {
            let objects = marked_or_extremal(ctx)?;
            let table = full_subcategory(&ctx.grid, &objects, ctx.budget)?;
            let mut pairs = Vec::new();
            for &a in &objects {
                for &b in &objects {
                    if table.hom_count(a, b) == usize::from(a == b) {
                        continue;
                    }
                    pairs.push(PairClasses {
                        from: ctx.name(a),
                        to: ctx.name(b),
                        exact: table.is_exact(a, b),
                        classes: table
                            .hom(a, b)
                            .iter()
                            .map(|c| ClassEntry { length: c.len(), path: c.canonical.axes(&ctx.grid) })
                            .collect(),
                    });
                }
            }
            TaskReport::Classes { pairs }
        }
        Task::Extremal => {
            let (mins, maxs) = extremal_points(&ctx.grid);
            TaskReport::Extremal { minimal: ctx.names(&mins), maximal: ctx.names(&maxs) }
        }
        Task::Bipartite => {
            let table = bipartite_graph(&ctx.grid, ctx.budget)?;
            TaskReport::Bipartite { exact: table.all_exact(), nodes: ctx.names(table.objects()), edges: ctx.edges(&table) }
        }
        Task::RetractVerify | Task::RetractFind => retract_task(ctx, task)?,
        Task::ModelVerify | Task::ModelMinimal => model_task(ctx, task)?,
        Task::Vankampen => vankampen_task(ctx)?,
        Task::PvCompile => TaskReport::PvCompile { scene: SceneDocument::from_scene(&ctx.scene) },
        Task::Deadlocks => {
            let report = analyze_deadlocks(&ctx.scene, ctx.program.as_ref())?;
            let entries = |v: &[ditop_core::pv::StatePoint]| {
                v.iter().map(|s| StateEntry { point: s.point.clone(), program_counters: s.program_counters.clone() }).collect()
            };
            TaskReport::Deadlocks { deadlocks: entries(&report.deadlocks), unreachable: entries(&report.unreachable) }
        }
    })
}

fn missing(block: &str) -> CliError {
    CliError::input("MissingBlock", format!("the scene file has no `{block}` block"))
}

fn domain_of(ctx: &Context, spec: &RetractSpec) -> Result<Vec<VertexId>, CliError> {
    Ok(match &spec.domain {
        Some(refs) => ctx.resolver().set(refs)?,
        None => ctx.grid.vertices().collect(),
    })
}

fn retract_task(ctx: &Context, task: Task) -> Result<TaskReport, CliError> {
    let spec = ctx.doc.retract.as_ref().ok_or_else(|| missing("retract"))?;
    let domain = domain_of(ctx, spec)?;
    let table = full_subcategory(&ctx.grid, &domain, ctx.budget)?;
    let r = ctx.resolver();
    if task == Task::RetractVerify {
        let data = r.retract(spec, &domain)?.ok_or_else(|| missing("retract.assignment"))?;
        let report = if table.all_exact() { verify_retract(&table, &data)? } else { verify_retract_bounded(&table, &data)? };
        let adjunction = check_adjunction(&induced_functor(&data, &table), &table);
        return Ok(TaskReport::RetractVerify {
            passed: report.passed(),
            checked_up_to: report.checked_up_to,
            adjunction,
            failures: report
                .failures
                .iter()
                .map(|f| match f.a {
                    Some(a) => format!("{} via {}: {}", ctx.name(f.x), ctx.name(a), f.reason),
                    None => format!("{}: {}", ctx.name(f.x), f.reason),
                })
                .collect(),
        });
    }
    let codomain = r.set(&spec.codomain)?;
    let found = if table.all_exact() {
        find_retract(&table, &codomain, spec.direction)?
    } else {
        find_retract_bounded(&table, &codomain, spec.direction)?
    };
    Ok(TaskReport::RetractFind {
        found: found.is_some(),
        exact: table.all_exact(),
        assignment: found
            .map(|d| {
                d.assignment
                    .iter()
                    .map(|(x, a)| AssignmentEntry { point: ctx.name(*x), target: ctx.name(a.target), witness: a.witness.axes(&ctx.grid) })
                    .collect()
            })
            .unwrap_or_default(),
    })
}

fn model_task(ctx: &Context, task: Task) -> Result<TaskReport, CliError> {
    let specs = ctx.doc.chain.as_ref().ok_or_else(|| missing("chain"))?;
    let base_objects = match specs.first() {
        Some(s) => domain_of(ctx, s)?,
        None => ctx.grid.vertices().collect(),
    };
    let mut chain = RetractChain::new(full_subcategory(&ctx.grid, &base_objects, ctx.budget)?);
    let mut steps = Vec::new();
    let mut complete = true;
    for spec in specs {
        let current = chain.final_objects();
        let codomain = ctx.resolver().set(&spec.codomain)?;
        let found = match ctx.resolver().retract(spec, &current)? {
            Some(data) => {
                chain.steps.push(data);
                true
            }
            None => chain.push_found(spec.direction, &codomain)?.is_some(),
        };
        steps.push(StepEntry { direction: spec.direction.to_string(), objects: ctx.names(&codomain), found, passed: false, failures: Vec::new() });
        if !found {
            complete = false;
            break;
        }
    }
    let exact = chain.base.all_exact();
    if task == Task::ModelMinimal {
        if !complete {
            return Err(CliError { exit_code: 1, ..CliError::input("ChainIncomplete", "a chain step has no retract") });
        }
        let further = further_retracts(&ctx.grid, &chain)?;
        return Ok(TaskReport::ModelMinimal {
            minimal: further.is_empty(),
            further: further
                .into_iter()
                .map(|(d, set)| StepEntry { direction: d.to_string(), objects: ctx.names(&set), found: true, passed: true, failures: Vec::new() })
                .collect(),
        });
    }
    let report = if exact { verify_extremal_model(&ctx.grid, &chain)? } else { verify_extremal_model_bounded(&ctx.grid, &chain)? };
    for (entry, r) in steps.iter_mut().zip(&report.steps) {
        entry.passed = r.passed();
        entry.failures = r.failures.iter().map(|f| format!("{}: {}", ctx.name(f.x), f.reason)).collect();
    }
    let final_table = chain.final_table()?;
    Ok(TaskReport::ModelVerify {
        passed: complete && report.passed(),
        exact,
        steps,
        final_objects: ctx.names(&chain.final_objects()),
        missing_extremal: ctx.names(&report.missing_extremal),
        generators: ctx.irreducible_edges(&final_table),
    })
}

fn vankampen_task(ctx: &Context) -> Result<TaskReport, CliError> {
    let spec = ctx.doc.cover.as_ref().ok_or_else(|| missing("cover"))?;
    let r = ctx.resolver();
    let cover = r.cover(spec)?;
    let report = verify_pushout(&ctx.grid, &cover, ctx.budget)?;
    let pres = &report.presentation;
    let mut quiver: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for g in pres.quiver() {
        *quiver.entry((pres.generators[g].from, pres.generators[g].to)).or_default() += 1;
    }
    let glued_model = match &spec.chain {
        None => None,
        Some(steps) => {
            let steps = steps.iter().map(|s| Ok((s.direction, r.set(&s.codomain)?))).collect::<ditop_core::Result<Vec<(Direction, _)>>>()?;
            match restricted_chains(&ctx.grid, &cover, &steps, ctx.budget)? {
                None => Some(GluedModelEntry { passed: false, pieces_passed: [false; 3], final_objects: Vec::new(), missing_extremal: Vec::new() }),
                Some([c1, c2, c0]) => {
                    let m = pushout_extremal_model(&ctx.grid, &cover, &c1, &c2, &c0, ctx.budget)?;
                    Some(GluedModelEntry {
                        passed: m.passed() && m.piece_reports.iter().all(|p| p.passed()),
                        pieces_passed: [0, 1, 2].map(|k| m.piece_reports[k].passed()),
                        final_objects: ctx.names(&m.chain.final_objects()),
                        missing_extremal: ctx.names(&m.report.missing_extremal),
                    })
                }
            }
        }
    };
    Ok(TaskReport::Vankampen {
        isomorphic: report.isomorphic(),
        exact: report.exact(),
        inclusion_commutes: report.inclusion_commutes,
        generators: pres
            .generators
            .iter()
            .map(|g| GeneratorEntry { piece: g.piece, from: ctx.name(g.from), to: ctx.name(g.to), length: g.path.len() })
            .collect(),
        quiver: quiver.into_iter().map(|((a, b), count)| EdgeEntry { from: ctx.name(a), to: ctx.name(b), count }).collect(),
        relations: pres.relations.len(),
        pairs: report
            .pairs
            .iter()
            .map(|p| PairComparisonEntry {
                from: ctx.name(p.from),
                to: ctx.name(p.to),
                presented: p.presented,
                direct: p.direct,
                exact: p.exact,
                isomorphic: p.isomorphic,
            })
            .collect(),
        glued_model,
    })
}

fn list(v: &[String]) -> String {
    if v.is_empty() {
        "(none)".into()
    } else {
        v.join(", ")
    }
}

fn edge_lines(out: &mut String, edges: &[EdgeEntry]) {
    for e in edges {
        writeln!(out, "  {} -> {} x{}", e.from, e.to, e.count).unwrap();
    }
}

fn text(report: &Report) -> String {
    let mut out = String::new();
    writeln!(out, "scene {} (max_paths {}, max_steps {})", report.scene, report.budget.max_paths, report.budget.max_steps).unwrap();
    for t in &report.tasks {
        match t {
            TaskReport::Classes { pairs } => {
                writeln!(out, "classes:").unwrap();
                for p in pairs {
                    let mark = if p.exact { "" } else { " (truncated)" };
                    writeln!(out, "  {} -> {}: {}{mark}", p.from, p.to, p.classes.len()).unwrap();
                }
            }
            TaskReport::Extremal { minimal, maximal } => {
                writeln!(out, "extremal: minimal {}; maximal {}", list(minimal), list(maximal)).unwrap();
            }
            TaskReport::Bipartite { exact, nodes, edges } => {
                writeln!(out, "bipartite graph: {} nodes{}", nodes.len(), if *exact { "" } else { " (truncated)" }).unwrap();
                edge_lines(&mut out, edges);
            }
            TaskReport::RetractVerify { passed, checked_up_to, adjunction, failures } => {
                let scope = checked_up_to.map(|n| format!(" up to length {n}")).unwrap_or_default();
                writeln!(out, "retract: {}{scope}; adjunction {}", if *passed { "verified" } else { "FAILED" }, adjunction).unwrap();
                for f in failures {
                    writeln!(out, "  {f}").unwrap();
                }
            }
            TaskReport::RetractFind { found, assignment, .. } => {
                writeln!(out, "retract search: {}", if *found { "found" } else { "none" }).unwrap();
                for a in assignment {
                    writeln!(out, "  {} -> {}", a.point, a.target).unwrap();
                }
            }
            TaskReport::ModelVerify { passed, steps, final_objects, missing_extremal, generators, .. } => {
                writeln!(out, "extremal model: {}", if *passed { "verified" } else { "FAILED" }).unwrap();
                for (k, s) in steps.iter().enumerate() {
                    writeln!(out, "  step {k} {} onto {} objects: {}", s.direction, s.objects.len(), if s.passed { "ok" } else { "failed" }).unwrap();
                }
                writeln!(out, "  final objects: {}", list(final_objects)).unwrap();
                if !missing_extremal.is_empty() {
                    writeln!(out, "  missing extremal points: {}", list(missing_extremal)).unwrap();
                }
                writeln!(out, "  generators:").unwrap();
                edge_lines(&mut out, generators);
            }
            TaskReport::ModelMinimal { minimal, further } => {
                writeln!(out, "minimal: {minimal}").unwrap();
                for s in further {
                    writeln!(out, "  further {} retract onto {}", s.direction, list(&s.objects)).unwrap();
                }
            }
            TaskReport::Vankampen { isomorphic, exact, quiver, relations, glued_model, .. } => {
                writeln!(out, "van Kampen pushout: {}{}", if *isomorphic { "isomorphic" } else { "NOT isomorphic" }, if *exact { "" } else { " (graded)" })
                    .unwrap();
                writeln!(out, "  {relations} relations; quiver:").unwrap();
                edge_lines(&mut out, quiver);
                if let Some(m) = glued_model {
                    writeln!(out, "  glued model: {} onto {}", if m.passed { "verified" } else { "FAILED" }, list(&m.final_objects)).unwrap();
                }
            }
            TaskReport::PvCompile { scene } => {
                out.push_str(&scene.to_json());
                out.push('\n');
            }
            TaskReport::Deadlocks { deadlocks, unreachable } => {
                let show = |v: &[StateEntry]| {
                    list(
                        &v.iter()
                            .map(|s| match &s.program_counters {
                                Some(pc) => format!("{} pc {:?}", s.point, pc),
                                None => s.point.clone(),
                            })
                            .collect::<Vec<_>>(),
                    )
                };
                writeln!(out, "deadlocks: {}", show(deadlocks)).unwrap();
                writeln!(out, "unreachable: {}", show(unreachable)).unwrap();
            }
        }
    }
    out
}

fn dot(ctx: &Context, report: &Report) -> Result<String, CliError> {
    let mut out = String::new();
    for t in &report.tasks {
        match t {
            TaskReport::Bipartite { nodes, edges, .. } => out.push_str(&render::dot("bipartite", nodes, edges)),
            TaskReport::ModelVerify { final_objects, generators, .. } => out.push_str(&render::dot("model", final_objects, generators)),
            TaskReport::Vankampen { quiver, .. } => {
                let cover = ctx.doc.cover.as_ref().expect("task ran");
                let mut nodes = ctx.names(&ctx.resolver().set(&cover.a1)?);
                nodes.extend(ctx.names(&ctx.resolver().set(&cover.a2)?));
                nodes.sort();
                nodes.dedup();
                out.push_str(&render::dot("pushout", &nodes, quiver));
            }
            TaskReport::Classes { pairs } => {
                let mut nodes: Vec<String> = pairs.iter().flat_map(|p| [p.from.clone(), p.to.clone()]).collect();
                nodes.sort();
                nodes.dedup();
                let edges: Vec<EdgeEntry> = pairs.iter().map(|p| EdgeEntry { from: p.from.clone(), to: p.to.clone(), count: p.classes.len() }).collect();
                out.push_str(&render::dot("classes", &nodes, &edges));
            }
            _ => {}
        }
    }
    if out.is_empty() {
        return Err(CliError::input("UnsupportedFormat", "dot output needs a classes, bipartite, model-verify or vankampen task"));
    }
    Ok(out)
}

fn svg(ctx: &Context, _report: &Report) -> Result<String, CliError> {
    if ctx.grid.dim() != 2 {
        return Err(CliError::input("UnsupportedFormat", "svg output needs a 2-dimensional scene"));
    }
    let (mins, maxs) = extremal_points(&ctx.grid);
    let mut shown: Vec<VertexId> = mins.iter().chain(&maxs).copied().collect();
    let r = ctx.resolver();
    for n in ctx.scene.marked_points.keys() {
        shown.push(r.point(n)?);
    }
    shown.sort();
    shown.dedup();
    let table = full_subcategory(&ctx.grid, &shown, ctx.budget)?;
    let mut paths = Vec::new();
    for &a in &mins {
        for &b in &maxs {
            paths.extend(table.hom(a, b).iter().filter(|c| !c.is_identity()).map(|c| c.canonical.clone()));
        }
    }
    let labels: Vec<(VertexId, String)> = shown.iter().map(|v| (*v, ctx.name(*v))).collect();
    Ok(render::svg(&ctx.grid, &ctx.scene, &labels, &paths))
}
