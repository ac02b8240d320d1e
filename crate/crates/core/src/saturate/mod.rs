//! Result sets by saturation over finite semantic universes, and the
//! restricted variant that only admits a guessed pool of functional values.

mod sem;
mod solver;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::analysis::{check_cons_free, check_immutability, type_order, typecheck, TypedProgram};
use crate::interp::runtime::Compiled;
use crate::interp::{collect_data_universe, with_big_stack};
use crate::syntax::{Program, Type};
use crate::transform::{compose_pushdown, verify_order_collapsed};
use crate::value::Value;

pub use sem::SemValue;
use sem::SemId;
use solver::Solver;

/// Largest number of graphs [`semantic_universe`] materialises by default.
pub const DEFAULT_UNIVERSE_CAP: usize = 1 << 12;
/// Pool size used when `N` exceeds it.
pub const DEFAULT_POOL_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SaturateError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("universe of {ty} has {size} elements, above the cap of {cap}")]
    UniverseTooLarge { ty: String, size: String, cap: usize },
    #[error("bad input: {0}")]
    BadInput(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SaturationStats {
    /// Distinct call statements `f e1 .. ei` that were examined.
    pub calls: usize,
    /// Confirmed statements `f e1 .. ei ↦ o`.
    pub statements: usize,
    /// Clause-body evaluations until the fixpoint was reached.
    pub iterations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub results: BTreeSet<Value>,
    pub stats: SaturationStats,
}

/// Checks everything saturation relies on: the terminating pragma, typing,
/// cons-freeness, order-1 immutability, and order-collapsed types.
pub fn check_preconditions(p: &Program) -> Result<TypedProgram, SaturateError> {
    let bad = SaturateError::PreconditionViolation;
    if !p.terminating {
        return Err(bad("the program is not marked `# terminating`".into()));
    }
    let tp = typecheck(p).map_err(|errs| bad(format!("type error: {}", errs[0].message)))?;
    for report in [
        check_cons_free(p),
        check_immutability(&tp, 1),
        verify_order_collapsed(&tp),
    ] {
        if let Some(v) = report.violations.first() {
            return Err(bad(format!("{} fails in clause {}: {}", report.subject, v.clause, v.reason)));
        }
    }
    Ok(tp)
}

fn check_inputs(p: &Program, inputs: &[Value]) -> Result<(), SaturateError> {
    let params = p.main_type().map(|t| t.uncurry().0.len()).unwrap_or(0);
    if params != inputs.len() {
        return Err(SaturateError::BadInput(format!(
            "main takes {params} arguments, got {}",
            inputs.len()
        )));
    }
    Ok(())
}

fn run_solver<T: Send>(
    p: &Program,
    inputs: &[Value],
    tp: &TypedProgram,
    body: impl FnOnce(&mut Solver, Vec<SemId>, u32) -> Result<T, SaturateError> + Send,
) -> Result<T, SaturateError> {
    let prog = Compiled::new(p);
    let uni = collect_data_universe(p, inputs);
    with_big_stack(|| {
        let mut solver = Solver::new(&prog, tp, &uni).map_err(SaturateError::BadInput)?;
        let args = inputs
            .iter()
            .map(|v| solver.import(v))
            .collect::<Result<Vec<_>, _>>()
            .map_err(SaturateError::BadInput)?;
        let main = prog.fun_index[&p.main];
        body(&mut solver, args, main)
    })
}

fn finish(solver: &mut Solver, args: Vec<SemId>, main: u32, prog_results: &mut BTreeSet<Value>) -> SaturationStats {
    let found = solver.query(main, args);
    for &o in found.iter() {
        if let sem::SemNode::Base(v) = solver.store.node(o) {
            prog_results.insert(solver.export_base(*v));
        }
    }
    let (calls, statements) = solver.counts();
    SaturationStats {
        calls,
        statements,
        iterations: solver.iterations,
    }
}

/// All results of `main` on `inputs`, computed as the least set of
/// confirmed statements closed under the evaluation rules.
pub fn saturate(p: &Program, inputs: &[Value]) -> Result<Saturation, SaturateError> {
    let tp = check_preconditions(p)?;
    check_inputs(p, inputs)?;
    run_solver(p, inputs, &tp, |solver, args, main| {
        let mut results = BTreeSet::new();
        let stats = finish(solver, args, main, &mut results);
        Ok(Saturation { results, stats })
    })
}

/// `⟦t⟧` for a type of order at most 1. Graphs are materialised only when
/// there are at most `cap` of them.
pub fn semantic_universe(p: &Program, inputs: &[Value], t: &Type, cap: usize) -> Result<Vec<SemValue>, SaturateError> {
    if type_order(t) > 1 {
        return Err(SaturateError::PreconditionViolation(format!("type {t} has order above 1")));
    }
    let tp = typecheck(p).map_err(|e| SaturateError::PreconditionViolation(e[0].message.clone()))?;
    let prog = Compiled::new(p);
    let uni = collect_data_universe(p, inputs);
    let mut solver = Solver::new(&prog, &tp, &uni).map_err(SaturateError::BadInput)?;
    let ids = universe_ids(&mut solver, t, cap)?;
    Ok(ids.into_iter().map(|id| solver.export(id)).collect())
}

/// Argument tuples and results of graphs of functional type `t`.
fn graph_space(solver: &mut Solver, t: &Type) -> Vec<(Box<[SemId]>, SemId)> {
    let (args, result) = t.uncurry();
    let results = solver.base_universe(result);
    let mut out = Vec::new();
    for tuple in solver.tuple_space(&args) {
        for &o in results.iter() {
            out.push((tuple.clone().into_boxed_slice(), o));
        }
    }
    out
}

fn universe_ids(solver: &mut Solver, t: &Type, cap: usize) -> Result<Vec<SemId>, SaturateError> {
    match t {
        Type::Arrow(..) => {
            let space = graph_space(solver, t);
            if space.len() >= usize::BITS as usize || (1usize << space.len()) > cap {
                return Err(SaturateError::UniverseTooLarge {
                    ty: t.to_string(),
                    size: (BigUint::from(1u8) << space.len()).to_string(),
                    cap,
                });
            }
            Ok((0..1usize << space.len())
                .map(|mask| {
                    let tuples = (0..space.len()).filter(|i| mask >> i & 1 == 1).map(|i| space[i].clone()).collect();
                    solver.store.graph(tuples)
                })
                .collect())
        }
        Type::Product(a, b) if type_order(t) == 1 => {
            let ua = universe_ids(solver, a, cap)?;
            let ub = universe_ids(solver, b, cap)?;
            if ua.len().saturating_mul(ub.len()) > cap {
                return Err(SaturateError::UniverseTooLarge {
                    ty: t.to_string(),
                    size: (ua.len() as u128 * ub.len() as u128).to_string(),
                    cap,
                });
            }
            let mut out = Vec::new();
            for &x in &ua {
                for &y in &ub {
                    out.push(solver.pair(x, y));
                }
            }
            Ok(out)
        }
        _ => Ok(solver.base_universe(t).to_vec()),
    }
}

/// `T` and `N` of the restricted procedure: `T` is the largest universe
/// among order-0 argument types and `N = #functions · T^(2·a·d + 1)` for
/// the greatest clause arity `a` and greatest body depth `d` after
/// composition pushdown.
pub fn compute_t_n(p: &Program, inputs: &[Value]) -> Result<(BigUint, BigUint), SaturateError> {
    let tp = check_preconditions(p)?;
    let prog = Compiled::new(p);
    let uni = collect_data_universe(p, inputs);
    let mut solver = Solver::new(&prog, &tp, &uni).map_err(SaturateError::BadInput)?;
    let mut t = 0usize;
    for (_, ty) in &p.functions {
        for arg in ty.uncurry().0 {
            if type_order(arg) == 0 {
                t = t.max(solver.base_universe(arg).len());
            }
        }
    }
    let arity = p.functions.iter().map(|(f, _)| tp.arity(f)).max().unwrap_or(0);
    let depth = compose_pushdown(p).after.clauses.iter().map(|c| c.body.depth()).max().unwrap_or(0);
    Ok(n_formula(p.functions.len(), t, arity, depth))
}

/// `(T, functions · T^(2·arity·depth + 1))`.
pub fn n_formula(functions: usize, t: usize, arity: usize, depth: usize) -> (BigUint, BigUint) {
    let t = BigUint::from(t);
    let exp = 2 * arity * depth + 1;
    let n = BigUint::from(functions) * t.pow(exp as u32);
    (t, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoolMode {
    /// Independent random graphs per site and trial.
    Seeded { seed: u64, trials: u32 },
    /// Every graph of each pooled type.
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NpConfig {
    pub mode: PoolMode,
    /// Graphs per site in seeded mode: `min(N, pool_cap)`.
    pub pool_cap: usize,
    /// Largest universe exhaustive mode accepts.
    pub universe_cap: usize,
}

impl Default for NpConfig {
    fn default() -> Self {
        NpConfig {
            mode: PoolMode::Seeded { seed: 0, trials: 1 },
            pool_cap: DEFAULT_POOL_CAP,
            universe_cap: DEFAULT_UNIVERSE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NpSaturation {
    pub results: BTreeSet<Value>,
    pub t: BigUint,
    pub n: BigUint,
    /// Distinct graphs admitted per functional type, summed over trials.
    pub pool_sizes: BTreeMap<String, usize>,
    pub stats: SaturationStats,
}

/// Functional types of non-variable subexpressions in clauses whose body
/// has order-0 type, one entry per site.
fn pool_sites(tp: &TypedProgram) -> Vec<Type> {
    let mut sites = Vec::new();
    for typed in &tp.clauses {
        if type_order(&typed.body.ty) != 0 {
            continue;
        }
        for (_, node) in typed.body.walk() {
            if type_order(&node.ty) >= 1 && !matches!(node.expr, crate::syntax::Expr::Var(_)) {
                sites.push(node.ty.clone());
            }
        }
    }
    sites
}

fn mix(seed: u64, trial: u64, site: u64) -> u64 {
    let mut x = seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ site.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^ (x >> 33)
}

/// The restricted procedure: saturation where every functional value must
/// come from a pool of guessed graphs. Seeded mode returns the union over
/// trials.
pub fn np_saturate(p: &Program, inputs: &[Value], cfg: &NpConfig) -> Result<NpSaturation, SaturateError> {
    let tp = check_preconditions(p)?;
    check_inputs(p, inputs)?;
    let (t, n) = compute_t_n(p, inputs)?;
    let per_site = usize::try_from(&n).unwrap_or(usize::MAX).min(cfg.pool_cap);
    let sites = pool_sites(&tp);
    let trials = match cfg.mode {
        PoolMode::Seeded { trials, .. } => trials.max(1),
        PoolMode::Exhaustive => 1,
    };
    let mut results = BTreeSet::new();
    let mut pool_sizes: BTreeMap<String, usize> = BTreeMap::new();
    let mut stats = SaturationStats::default();
    for trial in 0..trials {
        let (found, sizes, st) = run_solver(p, inputs, &tp, |solver, args, main| {
            let mut pools: FxHashMap<Type, Vec<SemId>> = FxHashMap::default();
            for (site, ty) in sites.iter().enumerate() {
                let graphs = match cfg.mode {
                    PoolMode::Exhaustive => universe_ids(solver, ty, cfg.universe_cap)?,
                    PoolMode::Seeded { seed, .. } => {
                        let space = graph_space(solver, ty);
                        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, trial as u64, site as u64));
                        (0..per_site)
                            .map(|_| {
                                let tuples = space.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
                                solver.store.graph(tuples)
                            })
                            .collect()
                    }
                };
                pools.entry(ty.clone()).or_default().extend(graphs);
            }
            let mut sizes = BTreeMap::new();
            for (ty, pool) in pools.iter_mut() {
                pool.sort_unstable();
                pool.dedup();
                sizes.insert(ty.to_string(), pool.len());
            }
            solver.pools = Some(pools);
            let mut found = BTreeSet::new();
            let st = finish(solver, args, main, &mut found);
            Ok((found, sizes, st))
        })?;
        results.extend(found);
        for (ty, k) in sizes {
            *pool_sizes.entry(ty).or_default() += k;
        }
        stats.calls += st.calls;
        stats.statements += st.statements;
        stats.iterations += st.iterations;
    }
    Ok(NpSaturation {
        results,
        t,
        n,
        pool_sizes,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::enumerate_results;
    use crate::syntax::{parse_input_bits, parse_program};

    fn bits(s: &str) -> Value {
        parse_input_bits(s).unwrap()
    }

    const LAST: &str = "# terminating\nfun last : list => bool\nlast (x :: nil) = x\nlast (x :: y :: zs) = last (y :: zs)\n";

    const HOF: &str = "# terminating\nfun main : list => bool\nfun any : (bool => bool) => list => bool\n\
                       fun neg : bool => bool\nfun k : bool => bool => bool\n\
                       main xs = choose(any neg xs, any (k false) xs)\n\
                       any f nil = false\nany f (x :: xs) = if f x then true else any f xs\n\
                       neg true = false\nneg false = true\nk a b = a\n";

    #[test]
    fn choose_at_top_level() {
        let p = parse_program("# terminating\nfun main : list => bool\nmain xs = choose(true, false)\n").unwrap();
        let r = saturate(&p, &[bits("1")]).unwrap();
        assert_eq!(r.results, [Value::boolean(false), Value::boolean(true)].into());
    }

    #[test]
    fn last_matches_evaluation() {
        let p = parse_program(LAST).unwrap();
        for w in ["1", "10", "0110"] {
            let r = saturate(&p, &[bits(w)]).unwrap();
            let e = enumerate_results(&p, &[bits(w)], 1000).unwrap();
            assert_eq!(r.results, e.results, "{w}");
        }
    }

    #[test]
    fn functional_arguments() {
        let p = parse_program(HOF).unwrap();
        for w in ["", "0", "1", "11", "010"] {
            let r = saturate(&p, &[bits(w)]).unwrap();
            let e = enumerate_results(&p, &[bits(w)], 1000).unwrap();
            assert_eq!(r.results, e.results, "{w}");
        }
    }

    #[test]
    fn requires_pragma() {
        let p = parse_program(&LAST.replace("# terminating\n", "")).unwrap();
        assert!(matches!(saturate(&p, &[bits("1")]), Err(SaturateError::PreconditionViolation(_))));
    }

    #[test]
    fn universes() {
        let p = parse_program(LAST).unwrap();
        let u = semantic_universe(&p, &[bits("10")], &Type::sort("bool"), 16).unwrap();
        assert_eq!(u.len(), 2);
        let f = Type::arrow(Type::sort("bool"), Type::sort("bool"));
        assert_eq!(semantic_universe(&p, &[bits("10")], &f, 16).unwrap().len(), 16);
        assert!(matches!(
            semantic_universe(&p, &[bits("10")], &f, 8),
            Err(SaturateError::UniverseTooLarge { .. })
        ));
        let lists = semantic_universe(&p, &[bits("10")], &Type::sort("list"), 16).unwrap();
        assert_eq!(lists.len(), 3);
    }

    #[test]
    fn n_formula_example() {
        assert_eq!(n_formula(3, 2, 2, 2), (BigUint::from(2u8), BigUint::from(1536u32)));
        let p = parse_program(LAST).unwrap();
        let (t, _) = compute_t_n(&p, &[bits("10")]).unwrap();
        assert_eq!(t, BigUint::from(3u8));
    }

    #[test]
    fn restricted_saturation() {
        let p = parse_program(HOF).unwrap();
        let full = saturate(&p, &[bits("01")]).unwrap().results;
        let ex = NpConfig {
            mode: PoolMode::Exhaustive,
            ..NpConfig::default()
        };
        assert_eq!(np_saturate(&p, &[bits("01")], &ex).unwrap().results, full);
        for seed in 0..10 {
            let cfg = NpConfig {
                mode: PoolMode::Seeded { seed, trials: 2 },
                ..NpConfig::default()
            };
            assert!(np_saturate(&p, &[bits("01")], &cfg).unwrap().results.is_subset(&full));
        }
        let first_order = parse_program(LAST).unwrap();
        let np = np_saturate(&first_order, &[bits("10")], &NpConfig::default()).unwrap();
        assert_eq!(np.results, saturate(&first_order, &[bits("10")]).unwrap().results);
    }
}
