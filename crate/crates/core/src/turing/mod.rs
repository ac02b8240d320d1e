//! Nondeterministic single-tape Turing machines: the `.tm` format, option
//! indexing, and a breadth-first acceptance search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rustc_hash::FxHashMap;

use crate::analysis::AnalysisReport;

pub const BLANK: &str = "_";
pub const START: &str = "start";
pub const ACCEPT: &str = "accept";
pub const REJECT: &str = "reject";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    L,
    R,
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::L => "L",
            Dir::R => "R",
        })
    }
}

/// `(i, r, w, d, j)`: in state `i` reading `r`, write `w`, move `d`, go to `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: String,
    pub read: String,
    pub write: String,
    pub dir: Dir,
    pub to: String,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} -> {} {} {}", self.from, self.read, self.write, self.dir, self.to)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    pub symbols: Vec<String>,
    pub states: Vec<String>,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid machine: {0}")]
    Invalid(String),
}

/// Reads the line-based `.tm` format.
pub fn parse_machine(text: &str) -> Result<Machine, MachineError> {
    let mut symbols = None;
    let mut states = None;
    let mut transitions = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| MachineError::Parse { line: no + 1, message };
        if let Some(rest) = line.strip_prefix("symbols:") {
            symbols = Some(rest.split_whitespace().map(str::to_string).collect::<Vec<_>>());
        } else if let Some(rest) = line.strip_prefix("states:") {
            states = Some(rest.split_whitespace().map(str::to_string).collect::<Vec<_>>());
        } else {
            let words: Vec<&str> = line.split_whitespace().collect();
            let [from, read, "->", write, dir, to] = words[..] else {
                return Err(err(format!("expected `i r -> w d j`, found `{line}`")));
            };
            let dir = match dir {
                "L" => Dir::L,
                "R" => Dir::R,
                other => return Err(err(format!("direction must be L or R, found `{other}`"))),
            };
            transitions.push(Transition {
                from: from.into(),
                read: read.into(),
                write: write.into(),
                dir,
                to: to.into(),
            });
        }
    }
    let missing = |what: &str| MachineError::Parse {
        line: 0,
        message: format!("no `{what}:` line"),
    };
    Ok(Machine {
        symbols: symbols.ok_or_else(|| missing("symbols"))?,
        states: states.ok_or_else(|| missing("states"))?,
        transitions,
    })
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "symbols: {}", self.symbols.join(" "))?;
        writeln!(f, "states: {}", self.states.join(" "))?;
        for t in &self.transitions {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Checks the required symbols and states, that transitions only mention
/// declared names, and that no transition leaves a halting state.
/// Violations are numbered by transition.
pub fn validate_machine(m: &Machine) -> AnalysisReport {
    let mut report = AnalysisReport::new("machine");
    for s in ["0", "1", BLANK] {
        if !m.symbols.iter().any(|x| x == s) {
            report.push(0, Vec::new(), format!("symbol `{s}` is not declared"));
        }
    }
    for s in [START, ACCEPT, REJECT] {
        if !m.states.iter().any(|x| x == s) {
            report.push(0, Vec::new(), format!("state `{s}` is not declared"));
        }
    }
    let symbols: BTreeSet<&str> = m.symbols.iter().map(String::as_str).collect();
    let states: BTreeSet<&str> = m.states.iter().map(String::as_str).collect();
    if symbols.len() != m.symbols.len() || states.len() != m.states.len() {
        report.push(0, Vec::new(), "a symbol or state is declared twice");
    }
    for (idx, t) in m.transitions.iter().enumerate() {
        if t.from == ACCEPT || t.from == REJECT {
            report.push(idx, Vec::new(), format!("`{t}` leaves the halting state `{}`", t.from));
        }
        for s in [&t.read, &t.write] {
            if !symbols.contains(s.as_str()) {
                report.push(idx, Vec::new(), format!("`{t}` uses undeclared symbol `{s}`"));
            }
        }
        for s in [&t.from, &t.to] {
            if !states.contains(s.as_str()) {
                report.push(idx, Vec::new(), format!("`{t}` uses undeclared state `{s}`"));
            }
        }
    }
    report
}

/// A transition tagged with its option number `k` (from 1).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndexedRow {
    pub k: usize,
    pub transition: Transition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedMachine {
    pub base: Machine,
    /// Largest number of transitions sharing a state and read symbol.
    pub c: usize,
    pub rows: Vec<IndexedRow>,
}

impl IndexedMachine {
    pub fn row(&self, state: &str, read: &str, k: usize) -> Option<&Transition> {
        self.rows
            .iter()
            .find(|r| r.k == k && r.transition.from == state && r.transition.read == read)
            .map(|r| &r.transition)
    }
}

/// Numbers the transitions of each `(i, r)` group from 1, ordered by the
/// text of `(w, d, j)`.
pub fn index_options(m: &Machine) -> IndexedMachine {
    let mut groups: BTreeMap<(&str, &str), BTreeSet<(String, &Transition)>> = BTreeMap::new();
    for t in &m.transitions {
        let key = format!("{} {} {}", t.write, t.dir, t.to);
        groups.entry((&t.from, &t.read)).or_default().insert((key, t));
    }
    let c = groups.values().map(BTreeSet::len).max().unwrap_or(0).max(1);
    let rows = groups
        .values()
        .flat_map(|g| {
            g.iter().enumerate().map(|(i, (_, t))| IndexedRow {
                k: i + 1,
                transition: (*t).clone(),
            })
        })
        .collect();
    IndexedMachine {
        base: m.clone(),
        c,
        rows,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Config {
    state: usize,
    head: usize,
    /// Without trailing blanks.
    tape: Vec<u16>,
}

/// `(k, write, dir, next state)`.
type Step = (usize, u16, Dir, usize);

struct Compiled {
    blank: u16,
    accept: usize,
    table: FxHashMap<(usize, u16), Vec<Step>>,
}

impl Compiled {
    fn new(m: &IndexedMachine) -> (Compiled, FxHashMap<&str, usize>, FxHashMap<&str, u16>) {
        let states: FxHashMap<&str, usize> = m.base.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let symbols: FxHashMap<&str, u16> =
            m.base.symbols.iter().enumerate().map(|(i, s)| (s.as_str(), i as u16)).collect();
        let mut table: FxHashMap<(usize, u16), Vec<_>> = FxHashMap::default();
        for r in &m.rows {
            let t = &r.transition;
            table
                .entry((states[t.from.as_str()], symbols[t.read.as_str()]))
                .or_default()
                .push((r.k, symbols[t.write.as_str()], t.dir, states[t.to.as_str()]));
        }
        let compiled = Compiled {
            blank: symbols[BLANK],
            accept: states[ACCEPT],
            table,
        };
        (compiled, states, symbols)
    }

    fn initial(&self, start: usize, word: &[bool], symbols: &FxHashMap<&str, u16>) -> Config {
        let mut tape = vec![self.blank];
        tape.extend(word.iter().map(|&b| symbols[if b { "1" } else { "0" }]));
        let mut c = Config { state: start, head: 0, tape };
        self.trim(&mut c);
        c
    }

    fn trim(&self, c: &mut Config) {
        while c.tape.last() == Some(&self.blank) {
            c.tape.pop();
        }
    }

    /// Successors with their option number. A move left from position 0
    /// ends the branch.
    fn step(&self, c: &Config) -> Vec<(usize, Config)> {
        let read = c.tape.get(c.head).copied().unwrap_or(self.blank);
        let Some(options) = self.table.get(&(c.state, read)) else {
            return Vec::new();
        };
        options
            .iter()
            .filter_map(|&(k, write, dir, next)| {
                let head = match dir {
                    Dir::L => c.head.checked_sub(1)?,
                    Dir::R => c.head + 1,
                };
                let mut tape = c.tape.clone();
                if tape.len() <= c.head {
                    tape.resize(c.head + 1, self.blank);
                }
                tape[c.head] = write;
                let mut n = Config { state: next, head, tape };
                self.trim(&mut n);
                Some((k, n))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub accepted: bool,
    /// Option numbers of an accepting run, one per step.
    pub witness: Option<Vec<usize>>,
    /// Distinct configurations visited.
    pub configurations: usize,
}

/// Breadth-first search for a run from `start` on `_ word` (head on the
/// leading blank) that reaches `accept` within `max_steps` steps.
pub fn run_machine(m: &Machine, word: &[bool], max_steps: u64) -> Result<RunOutcome, MachineError> {
    let report = validate_machine(m);
    if !report.passed() {
        return Err(MachineError::Invalid(report.violations[0].reason.clone()));
    }
    let im = index_options(m);
    let (cm, states, symbols) = Compiled::new(&im);
    let start = cm.initial(states[START], word, &symbols);
    let mut seen: FxHashMap<Config, (usize, usize)> = FxHashMap::default();
    let mut nodes: Vec<Config> = vec![start.clone()];
    seen.insert(start, (usize::MAX, 0));
    let mut frontier = vec![0usize];
    let mut step = 0u64;
    loop {
        if let Some(&hit) = frontier.iter().find(|&&i| nodes[i].state == cm.accept) {
            let mut witness = Vec::new();
            let mut cur = hit;
            while let Some(&(parent, k)) = seen.get(&nodes[cur]) {
                if parent == usize::MAX {
                    break;
                }
                witness.push(k);
                cur = parent;
            }
            witness.reverse();
            return Ok(RunOutcome {
                accepted: true,
                witness: Some(witness),
                configurations: nodes.len(),
            });
        }
        if step == max_steps || frontier.is_empty() {
            return Ok(RunOutcome {
                accepted: false,
                witness: None,
                configurations: nodes.len(),
            });
        }
        let mut next = Vec::new();
        for &i in &frontier {
            for (k, c) in cm.step(&nodes[i].clone()) {
                if !seen.contains_key(&c) {
                    seen.insert(c.clone(), (i, k));
                    nodes.push(c);
                    next.push(nodes.len() - 1);
                }
            }
        }
        frontier = next;
        step += 1;
    }
}

/// Follows the option numbers in `witness` from the initial configuration
/// and returns the final state, or `None` if some option is unavailable.
pub fn replay_witness(m: &Machine, word: &[bool], witness: &[usize]) -> Option<String> {
    let im = index_options(m);
    let (cm, states, symbols) = Compiled::new(&im);
    let mut c = cm.initial(states[START], word, &symbols);
    for &k in witness {
        c = cm.step(&c).into_iter().find(|(kk, _)| *kk == k)?.1;
    }
    Some(m.states[c.state].clone())
}

/// Parses a word over `{0, 1}`.
pub fn word_bits(word: &str) -> Option<Vec<bool>> {
    word.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ACCEPT_BLANK: &str = "symbols: 0 1 _\nstates: start accept reject\nstart _ -> _ R accept\n";

    const CONTAINS11: &str = "symbols: 0 1 _\nstates: start scan seen1 accept reject\n\
        start _ -> _ R scan\nscan 0 -> 0 R scan\nscan 1 -> 1 R scan\nscan 1 -> 1 R seen1\nseen1 1 -> 1 R accept\n";

    #[test]
    fn parses_and_validates() {
        let m = parse_machine(CONTAINS11).unwrap();
        assert_eq!(m.transitions.len(), 5);
        assert!(validate_machine(&m).passed());
        let bad = parse_machine("symbols: 0 1\nstates: start accept reject\naccept 0 -> 0 R start\n").unwrap();
        let r = validate_machine(&bad);
        assert!(r.violations.iter().any(|v| v.reason.contains("`_`")));
        assert!(r.violations.iter().any(|v| v.reason.contains("halting")));
        assert!(parse_machine("symbols: 0 1 _\nstates: start\nstart 0 -> 1 X start\n").is_err());
    }

    #[test]
    fn option_indexing() {
        let m = parse_machine(CONTAINS11).unwrap();
        let im = index_options(&m);
        assert_eq!(im.c, 2);
        let scan1: Vec<_> = im.rows.iter().filter(|r| r.transition.from == "scan" && r.transition.read == "1").collect();
        assert_eq!(scan1.len(), 2);
        assert_eq!(scan1[0].transition.to, "scan");
        assert_eq!(scan1[1].k, 2);
        let projected: BTreeSet<_> = im.rows.iter().map(|r| r.transition.clone()).collect();
        assert_eq!(projected, m.transitions.iter().cloned().collect());
        let det = index_options(&parse_machine(ACCEPT_BLANK).unwrap());
        assert_eq!(det.c, 1);
    }

    #[test]
    fn searches_runs() {
        let m = parse_machine(ACCEPT_BLANK).unwrap();
        let out = run_machine(&m, &[true], 1).unwrap();
        assert!(out.accepted);
        assert_eq!(out.witness, Some(vec![1]));
        let m = parse_machine(CONTAINS11).unwrap();
        let yes = run_machine(&m, &word_bits("0110").unwrap(), 20).unwrap();
        assert!(yes.accepted);
        let w = yes.witness.unwrap();
        assert!(w.len() <= 20);
        assert_eq!(replay_witness(&m, &word_bits("0110").unwrap(), &w).as_deref(), Some(ACCEPT));
        assert!(!run_machine(&m, &word_bits("0100").unwrap(), 20).unwrap().accepted);
        assert!(!run_machine(&m, &word_bits("0110").unwrap(), 3).unwrap().accepted);
    }

    #[test]
    fn left_move_at_origin_ends_branch() {
        let m = parse_machine("symbols: 0 1 _\nstates: start accept reject\nstart _ -> _ L accept\n").unwrap();
        assert!(!run_machine(&m, &[], 5).unwrap().accepted);
    }
}
