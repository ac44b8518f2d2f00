//! PV lock programs: parsing, geometric semantics and deadlock analysis.
//!
//! ```text
//! sem a = 1; sem b = 1;
//! proc { P(a); P(b); V(b); V(a); }
//! proc { P(b); P(a); V(a); V(b); }
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::extremal_points;
use crate::error::{Error, Result};
use crate::grid::compactify;
use crate::scene::{format_point, q, Coord, CubicalScene, OpenBox, Point};

/// Default largest number of processes compiled to a scene.
pub const MAX_PROCESSES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PvError {
    #[error("syntax error at {line}:{column}: {message}")]
    SyntaxError { line: usize, column: usize, message: String },

    #[error("unknown resource `{name}` at {line}:{column}")]
    UnknownResource { name: String, line: usize, column: usize },

    #[error("process {process} ends still holding `{name}`")]
    UnmatchedRelease { name: String, process: usize },

    #[error("V({name}) at {line}:{column} releases a resource the process does not hold")]
    ReleaseBeforeAcquire { name: String, line: usize, column: usize },

    #[error("P({name}) at {line}:{column} acquires a resource the process already holds")]
    NestedAcquire { name: String, line: usize, column: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    P,
    V,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub op: Op,
    pub resource: String,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({})", self.op, self.resource)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvProgram {
    /// Resource name to capacity.
    pub resources: BTreeMap<String, u32>,
    pub processes: Vec<Vec<Action>>,
}

impl PvProgram {
    /// Coordinate of action `k` of process `i`.
    pub fn action_coord(&self, i: usize, k: usize) -> Coord {
        q(k as i64 + 1, self.processes[i].len() as i64 + 1)
    }

    /// Open intervals during which process `i` holds `resource`.
    pub fn holding_intervals(&self, i: usize, resource: &str) -> Vec<(Coord, Coord)> {
        let mut out = Vec::new();
        let mut start = None;
        for (k, a) in self.processes[i].iter().enumerate() {
            if a.resource != resource {
                continue;
            }
            match a.op {
                Op::P => start = Some(self.action_coord(i, k)),
                Op::V => out.push((start.take().expect("validated program"), self.action_coord(i, k))),
            }
        }
        out
    }

    /// Number of actions of each process executed at `point`: those whose
    /// coordinate lies strictly below it.
    pub fn program_counters(&self, point: &[Coord]) -> Vec<usize> {
        point
            .iter()
            .enumerate()
            .map(|(i, c)| (0..self.processes[i].len()).filter(|&k| self.action_coord(i, k) < *c).count())
            .collect()
    }
}

impl fmt::Display for PvProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, k) in &self.resources {
            writeln!(f, "sem {r} = {k};")?;
        }
        for p in &self.processes {
            write!(f, "proc {{")?;
            for a in p {
                write!(f, " {a};")?;
            }
            writeln!(f, " }}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Punct(char),
    End,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn next_token(&mut self) -> std::result::Result<(Tok, usize, usize), PvError> {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while !matches!(self.chars.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let (line, column) = (self.line, self.column);
        let Some(&c) = self.chars.peek() else { return Ok((Tok::End, line, column)) };
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = self.chars.peek().filter(|c| c.is_ascii_alphanumeric() || **c == '_') {
                s.push(c);
                self.bump();
            }
            return Ok((Tok::Ident(s), line, column));
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = self.chars.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                self.bump();
            }
            let n = s.parse().map_err(|_| PvError::SyntaxError { line, column, message: "integer out of range".into() })?;
            return Ok((Tok::Int(n), line, column));
        }
        if "=;{}()".contains(c) {
            self.bump();
            return Ok((Tok::Punct(c), line, column));
        }
        Err(PvError::SyntaxError { line, column, message: format!("unexpected character `{c}`") })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    line: usize,
    column: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> std::result::Result<Self, PvError> {
        let mut lexer = Lexer { chars: text.chars().peekable(), line: 1, column: 1 };
        let (tok, line, column) = lexer.next_token()?;
        Ok(Parser { lexer, tok, line, column })
    }

    fn advance(&mut self) -> std::result::Result<(), PvError> {
        (self.tok, self.line, self.column) = self.lexer.next_token()?;
        Ok(())
    }

    fn error(&self, expected: &str) -> PvError {
        let found = match &self.tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        };
        PvError::SyntaxError { line: self.line, column: self.column, message: format!("expected {expected}, found {found}") }
    }

    fn punct(&mut self, c: char) -> std::result::Result<(), PvError> {
        if self.tok == Tok::Punct(c) {
            self.advance()
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn ident(&mut self) -> std::result::Result<(String, usize, usize), PvError> {
        match &self.tok {
            Tok::Ident(s) => {
                let out = (s.clone(), self.line, self.column);
                self.advance()?;
                Ok(out)
            }
            _ => Err(self.error("a name")),
        }
    }

    fn keyword(&self, word: &str) -> bool {
        matches!(&self.tok, Tok::Ident(s) if s == word)
    }
}

/// Parses and validates a program.
pub fn parse_pv(text: &str) -> std::result::Result<PvProgram, PvError> {
    let mut p = Parser::new(text)?;
    let mut resources = BTreeMap::new();
    while p.keyword("sem") {
        p.advance()?;
        let (name, line, column) = p.ident()?;
        p.punct('=')?;
        let capacity = match p.tok {
            Tok::Int(n) if n >= 1 && n <= u32::MAX as u64 => n as u32,
            Tok::Int(_) => return Err(PvError::SyntaxError { line: p.line, column: p.column, message: "capacity must be a positive integer".into() }),
            _ => return Err(p.error("a capacity")),
        };
        p.advance()?;
        p.punct(';')?;
        if resources.insert(name.clone(), capacity).is_some() {
            return Err(PvError::SyntaxError { line, column, message: format!("resource `{name}` declared twice") });
        }
    }
    let mut processes = Vec::new();
    while p.keyword("proc") {
        p.advance()?;
        p.punct('{')?;
        let mut actions = Vec::new();
        let mut held: BTreeMap<String, ()> = BTreeMap::new();
        while p.tok != Tok::Punct('}') {
            let (op, line, column) = match &p.tok {
                Tok::Ident(s) if s == "P" => (Op::P, p.line, p.column),
                Tok::Ident(s) if s == "V" => (Op::V, p.line, p.column),
                _ => return Err(p.error("`P`, `V` or `}`")),
            };
            p.advance()?;
            p.punct('(')?;
            let (name, _, _) = p.ident()?;
            p.punct(')')?;
            p.punct(';')?;
            match op {
                Op::P => {
                    if !resources.contains_key(&name) {
                        return Err(PvError::UnknownResource { name, line, column });
                    }
                    if held.insert(name.clone(), ()).is_some() {
                        return Err(PvError::NestedAcquire { name, line, column });
                    }
                }
                Op::V => {
                    if held.remove(&name).is_none() {
                        return Err(PvError::ReleaseBeforeAcquire { name, line, column });
                    }
                }
            }
            actions.push(Action { op, resource: name });
        }
        p.advance()?;
        if let Some(name) = held.into_keys().next() {
            return Err(PvError::UnmatchedRelease { name, process: processes.len() });
        }
        processes.push(actions);
    }
    if p.tok != Tok::End {
        return Err(p.error(if processes.is_empty() { "`sem` or `proc`" } else { "`proc`" }));
    }
    Ok(PvProgram { resources, processes })
}

/// [`to_scene_with_limit`] with the default guard.
pub fn to_scene(prog: &PvProgram) -> Result<CubicalScene> {
    to_scene_with_limit(prog, MAX_PROCESSES)
}

/// One axis per process, action `k` of `n` at `(k+1)/(n+1)`. For every
/// resource of capacity `κ` and every `κ+1` processes holding it at once the
/// product of their holding intervals is forbidden, with `(0,1)` on the
/// remaining axes.
pub fn to_scene_with_limit(prog: &PvProgram, max_processes: usize) -> Result<CubicalScene> {
    let n = prog.processes.len();
    if n > max_processes {
        return Err(Error::TooManyProcesses(n, max_processes));
    }
    let mut scene = CubicalScene::new(n);
    for (r, &kappa) in &prog.resources {
        let holders: Vec<(usize, Vec<(Coord, Coord)>)> =
            (0..n).map(|i| (i, prog.holding_intervals(i, r))).filter(|(_, iv)| !iv.is_empty()).collect();
        for subset in subsets(holders.len(), kappa as usize + 1) {
            let mut boxes: Vec<Vec<(Coord, Coord)>> = vec![vec![(q(0, 1), q(1, 1)); n]];
            for &h in &subset {
                let (axis, intervals) = &holders[h];
                boxes = boxes
                    .into_iter()
                    .flat_map(|b| {
                        intervals.iter().map(move |iv| {
                            let mut b = b.clone();
                            b[*axis] = *iv;
                            b
                        })
                    })
                    .collect();
            }
            for b in boxes {
                scene.forbidden.push(OpenBox(b));
            }
        }
    }
    Ok(scene)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] < n - k + i) else { return out };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatePoint {
    pub point: String,
    #[serde(skip)]
    pub coords: Point,
    /// Actions executed per process, when the program is known.
    pub program_counters: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeadlockReport {
    /// Maximal states other than the final one.
    pub deadlocks: Vec<StatePoint>,
    /// Minimal states other than the initial one: no execution reaches them.
    pub unreachable: Vec<StatePoint>,
}

/// Extremal-point analysis of a scene without identifications.
pub fn analyze_deadlocks(scene: &CubicalScene, prog: Option<&PvProgram>) -> Result<DeadlockReport> {
    if !scene.identifications.is_empty() {
        return Err(Error::GluedScene);
    }
    let grid = compactify(scene)?;
    let (mins, maxs) = extremal_points(&grid);
    let state = |v| {
        let coords = grid.vertex_point(v);
        StatePoint { point: format_point(&coords), program_counters: prog.map(|p| p.program_counters(&coords)), coords }
    };
    Ok(DeadlockReport {
        deadlocks: maxs.into_iter().filter(|v| Some(*v) != grid.top()).map(state).collect(),
        unreachable: mins.into_iter().filter(|v| Some(*v) != grid.bottom()).map(state).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIJKSTRA: &str = "sem a=1; sem b=1; proc{P(a);P(b);V(b);V(a);} proc{P(b);P(a);V(a);V(b);}";

    #[test]
    fn parses_the_deadlock_pair() {
        let p = parse_pv(DIJKSTRA).unwrap();
        assert_eq!(p.processes.len(), 2);
        assert_eq!(p.resources.len(), 2);
        assert_eq!(parse_pv(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_pv("proc{V(a);}"), Err(PvError::ReleaseBeforeAcquire { .. })));
        assert!(matches!(parse_pv("sem a=1; proc{P(a)"), Err(PvError::SyntaxError { line: 1, column: 19, .. })));
        assert!(matches!(parse_pv("sem a=1;\nproc{P(b);V(b);}"), Err(PvError::UnknownResource { line: 2, column: 6, .. })));
        assert!(matches!(parse_pv("sem a=1; proc{P(a);P(a);}"), Err(PvError::NestedAcquire { .. })));
        assert!(matches!(parse_pv("sem a=1; proc{P(a);}"), Err(PvError::UnmatchedRelease { process: 0, .. })));
        assert!(matches!(parse_pv("sem a=0;"), Err(PvError::SyntaxError { .. })));
    }

    #[test]
    fn deadlock_pair_is_the_cross() {
        let scene = to_scene(&parse_pv(DIJKSTRA).unwrap()).unwrap();
        let cells: Vec<_> = scene.forbidden.iter().map(|b| b.0.clone()).collect();
        assert_eq!(
            cells,
            vec![vec![(q(1, 5), q(4, 5)), (q(2, 5), q(3, 5))], vec![(q(2, 5), q(3, 5)), (q(1, 5), q(4, 5))]]
        );
    }

    #[test]
    fn single_process_and_capacity_two() {
        assert!(to_scene(&parse_pv("sem a=1; proc{P(a);V(a);}").unwrap()).unwrap().forbidden.is_empty());
        let three = parse_pv("sem a=2; proc{P(a);V(a);} proc{P(a);V(a);} proc{P(a);V(a);}").unwrap();
        let scene = to_scene(&three).unwrap();
        assert_eq!(scene.forbidden.len(), 1);
        assert_eq!(scene.forbidden[0].0, vec![(q(1, 3), q(2, 3)); 3]);
        let four = parse_pv("proc{} proc{} proc{} proc{}").unwrap();
        assert_eq!(to_scene(&four), Err(Error::TooManyProcesses(4, 3)));
        assert_eq!(to_scene_with_limit(&four, 4).unwrap().dim, 4);
    }

    #[test]
    fn deadlock_report() {
        let prog = parse_pv(DIJKSTRA).unwrap();
        let report = analyze_deadlocks(&to_scene(&prog).unwrap(), Some(&prog)).unwrap();
        assert_eq!(report.deadlocks.len(), 1);
        assert_eq!(report.deadlocks[0].coords, vec![q(2, 5), q(2, 5)]);
        assert_eq!(report.deadlocks[0].program_counters, Some(vec![1, 1]));
        assert_eq!(report.unreachable.len(), 1);
        assert_eq!(report.unreachable[0].coords, vec![q(3, 5), q(3, 5)]);
        let annulus = CubicalScene::new(2).with_box(&[(q(1, 3), q(2, 3)), (q(1, 3), q(2, 3))]);
        let quiet = analyze_deadlocks(&annulus, None).unwrap();
        assert!(quiet.deadlocks.is_empty() && quiet.unreachable.is_empty());
    }
}
