//! Exact solver for 0-1 programs of set-packing shape.
//!
//! Maximize `c·x` over binary `x` subject to packing rows (`Σ x_i ≤ 1` over a
//! subset of variables) and covering rows with real coefficients
//! (`Σ a_i x_i ≥ b`). This is exactly the shape of the winner determination
//! problem, with one packing row per bidder, one per channel, and optional
//! per-bidder minimum-value rows.
//!
//! The search is a depth-first branch and bound over *choice groups*:
//! packing rows that are pairwise disjoint, taken greedily in row order.
//! Each group contributes at most one variable, so a node fixes the choice of
//! one group. A node is pruned when
//!
//! * the current value plus, for every open group, its best variable still
//!   compatible with the packing rows used so far cannot beat the incumbent;
//! * some covering row cannot be reached even if every open group picked its
//!   best compatible coefficient for that row.
//!
//! The value bound is additionally tightened by Lagrangian relaxation of
//! the packing rows that are not groups: for multipliers `λ ≥ 0` the value
//! `Σ λ_r` over free rows plus, per open group, the best positive
//! `c_v - Σ λ_r` over the rows of `v` bounds every completion. The
//! multipliers are tuned once at the root by subgradient steps. Within a
//! group, a variable is dropped when an earlier one uses a subset of its
//! packing rows, has no smaller covering coefficients and no smaller
//! objective.
//!
//! All bounds dominate every completion, so the result is exact. Branching
//! order is fixed by the program: groups in construction order, variables
//! within a group by descending objective then index, the empty choice last.

use crate::error::{Error, Result};

/// Largest program accepted by [`solve`].
pub const MAX_VARIABLES: usize = 3000;
/// Largest program accepted by [`brute_force`].
pub const MAX_BRUTE_FORCE_VARIABLES: usize = 25;
/// Feasibility tolerance for covering rows.
pub const FEASIBILITY_TOL: f64 = 1e-9;
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GeRow {
    pub coefs: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZeroOneProgram {
    pub objective: Vec<f64>,
    /// Packing rows: variable indices with unit coefficients, rhs 1.
    pub le_rows: Vec<Vec<usize>>,
    pub ge_rows: Vec<GeRow>,
}

impl ZeroOneProgram {
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    /// Row-by-row feasibility of a 0/1 vector.
    pub fn is_feasible(&self, x: &[bool]) -> bool {
        self.le_rows
            .iter()
            .all(|row| row.iter().filter(|&&v| x[v]).count() <= 1)
            && self.ge_rows.iter().all(|row| {
                let lhs: f64 = row
                    .coefs
                    .iter()
                    .filter(|(v, _)| x[*v])
                    .map(|(_, a)| a)
                    .sum();
                lhs >= row.rhs - FEASIBILITY_TOL
            })
    }

    pub fn value(&self, x: &[bool]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .filter(|(_, &on)| on)
            .map(|(c, _)| c)
            .sum()
    }

    fn check_indices(&self) -> Result<()> {
        let n = self.n_vars();
        let bad = self
            .le_rows
            .iter()
            .flatten()
            .copied()
            .chain(
                self.ge_rows
                    .iter()
                    .flat_map(|r| r.coefs.iter().map(|(v, _)| *v)),
            )
            .find(|&v| v >= n);
        match bad {
            Some(v) => Err(Error::Lookup {
                kind: "variable",
                id: v,
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub solution: Vec<bool>,
    pub objective_value: f64,
    pub nodes_explored: u64,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.solution
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub node_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

pub fn solve(program: &ZeroOneProgram) -> Result<SolveResult> {
    solve_with(program, &SolverConfig::default())
}

pub fn solve_with(program: &ZeroOneProgram, config: &SolverConfig) -> Result<SolveResult> {
    let n = program.n_vars();
    if n > MAX_VARIABLES {
        return Err(Error::TooManyVariables {
            vars: n,
            limit: MAX_VARIABLES,
        });
    }
    program.check_indices()?;
    let mut search = Search::new(program, config.node_budget);
    search.run()?;
    let Search { best, nodes, .. } = search;
    Ok(match best {
        Some(chosen) => {
            let mut solution = vec![false; n];
            for v in chosen {
                solution[v] = true;
            }
            debug_assert!(program.is_feasible(&solution));
            SolveResult {
                status: SolveStatus::Optimal,
                objective_value: program.value(&solution),
                solution,
                nodes_explored: nodes,
            }
        }
        None => SolveResult {
            status: SolveStatus::Infeasible,
            solution: vec![false; n],
            objective_value: 0.0,
            nodes_explored: nodes,
        },
    })
}

struct Group {
    /// Undominated variables sorted by descending objective, then index.
    vars: Vec<usize>,
    /// The same variables by descending reduced objective.
    by_reduced: Vec<usize>,
    /// Covering rows touched by any variable of the group.
    ge_rows: Vec<usize>,
    /// Set when a covering row local to the group excludes the empty choice.
    mandatory: bool,
}

struct Search<'a> {
    program: &'a ZeroOneProgram,
    words: usize,
    /// Packing-row membership bitset per variable, `words` u64s each.
    row_bits: Vec<u64>,
    ge_of_var: Vec<Vec<(usize, f64)>>,
    /// Covering rows spanning several groups; local ones are folded into
    /// the groups.
    shared_ge: Vec<usize>,
    groups: Vec<Group>,
    /// Packing rows that did not become groups.
    free_rows: Vec<usize>,
    free_of_var: Vec<Vec<usize>>,
    /// Multiplier per packing row, zero on group rows.
    lambda: Vec<f64>,
    /// Objective minus the multipliers of the variable's free rows.
    reduced: Vec<f64>,
    budget: u64,
    nodes: u64,
    best: Option<Vec<usize>>,
    best_value: f64,
    // scratch
    chosen: Vec<usize>,
}

const SUBGRADIENT_ITERATIONS: usize = 120;

impl<'a> Search<'a> {
    fn new(program: &'a ZeroOneProgram, budget: u64) -> Self {
        let n = program.n_vars();
        let n_rows = program.le_rows.len();
        let words = n_rows.div_ceil(64).max(1);
        let mut row_bits = vec![0u64; n * words];
        // A variable listed twice in one packing row can never be set.
        let mut forbidden = vec![false; n];
        for (r, row) in program.le_rows.iter().enumerate() {
            for &v in row {
                let (w, bit) = (v * words + r / 64, 1u64 << (r % 64));
                if row_bits[w] & bit != 0 {
                    forbidden[v] = true;
                }
                row_bits[w] |= bit;
            }
        }
        let mut ge_of_var = vec![Vec::new(); n];
        for (r, row) in program.ge_rows.iter().enumerate() {
            for &(v, a) in &row.coefs {
                match ge_of_var[v]
                    .iter_mut()
                    .find(|(rr, _): &&mut (usize, f64)| *rr == r)
                {
                    Some(slot) => slot.1 += a,
                    None => ge_of_var[v].push((r, a)),
                }
            }
        }

        // Greedy disjoint packing rows become choice groups; leftovers are singletons.
        let mut grouped = vec![false; n];
        let mut is_group_row = vec![false; n_rows];
        let mut raw_groups: Vec<Vec<usize>> = Vec::new();
        for (r, row) in program.le_rows.iter().enumerate() {
            let mut vars = row.clone();
            vars.sort_unstable();
            vars.dedup();
            if vars.is_empty() || vars.iter().any(|&v| grouped[v]) {
                continue;
            }
            for &v in &vars {
                grouped[v] = true;
            }
            is_group_row[r] = true;
            raw_groups.push(vars);
        }
        raw_groups.extend((0..n).filter(|&v| !grouped[v]).map(|v| vec![v]));
        let free_rows: Vec<usize> = (0..n_rows).filter(|&r| !is_group_row[r]).collect();
        let free_of_var: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                free_rows
                    .iter()
                    .copied()
                    .filter(|&r| row_bits[v * words + r / 64] >> (r % 64) & 1 == 1)
                    .collect()
            })
            .collect();

        // A covering row whose variables all sit in one group is satisfied
        // exactly by the members meeting it alone, since a group picks at most one.
        let mut group_of_var = vec![usize::MAX; n];
        for (gi, vars) in raw_groups.iter().enumerate() {
            for &v in vars {
                group_of_var[v] = gi;
            }
        }
        let mut mandatory = vec![false; raw_groups.len()];
        let mut excluded = forbidden.clone();
        let mut shared_ge = Vec::new();
        for (r, row) in program.ge_rows.iter().enumerate() {
            let gi = row.coefs.first().map(|&(v, _)| group_of_var[v]);
            let local = gi.filter(|&gi| row.coefs.iter().all(|&(v, _)| group_of_var[v] == gi));
            let Some(gi) = local else {
                shared_ge.push(r);
                continue;
            };
            for &v in &raw_groups[gi] {
                let a = ge_of_var[v]
                    .iter()
                    .find(|(rr, _)| *rr == r)
                    .map_or(0.0, |x| x.1);
                if a < row.rhs - FEASIBILITY_TOL {
                    excluded[v] = true;
                }
                ge_of_var[v].retain(|(rr, _)| *rr != r);
            }
            if 0.0 < row.rhs - FEASIBILITY_TOL {
                mandatory[gi] = true;
            }
        }

        let coef = |v: usize, r: usize| {
            ge_of_var[v]
                .iter()
                .find(|(rr, _)| *rr == r)
                .map_or(0.0, |x| x.1)
        };
        let dominates = |u: usize, v: usize| {
            let (bu, bv) = (
                &row_bits[u * words..(u + 1) * words],
                &row_bits[v * words..(v + 1) * words],
            );
            bu.iter().zip(bv).all(|(a, b)| a & !b == 0)
                && ge_of_var[v].iter().all(|&(r, av)| coef(u, r) >= av)
                && ge_of_var[u].iter().all(|&(r, au)| au >= coef(v, r))
        };

        let mut groups = Vec::with_capacity(raw_groups.len());
        for (mut vars, mandatory) in raw_groups.into_iter().zip(mandatory) {
            vars.retain(|&v| !excluded[v]);
            vars.sort_by(|&a, &b| {
                program.objective[b]
                    .total_cmp(&program.objective[a])
                    .then(a.cmp(&b))
            });
            let kept: Vec<usize> = (0..vars.len())
                .filter(|&i| !(0..i).any(|j| dominates(vars[j], vars[i])))
                .map(|i| vars[i])
                .collect();
            let mut ge_rows: Vec<usize> = kept
                .iter()
                .flat_map(|&v| ge_of_var[v].iter().map(|(r, _)| *r))
                .collect();
            ge_rows.sort_unstable();
            ge_rows.dedup();
            groups.push(Group {
                by_reduced: kept.clone(),
                vars: kept,
                ge_rows,
                mandatory,
            });
        }

        let mut search = Search {
            program,
            words,
            row_bits,
            ge_of_var,
            shared_ge,
            groups,
            free_rows,
            free_of_var,
            lambda: vec![0.0; n_rows],
            reduced: program.objective.clone(),
            budget,
            nodes: 0,
            best: None,
            best_value: f64::NEG_INFINITY,
            chosen: Vec::new(),
        };
        if !search.root_infeasible() {
            search.tune_multipliers();
        }
        search
    }

    fn root_infeasible(&self) -> bool {
        self.groups.iter().any(|g| g.mandatory && g.vars.is_empty())
    }

    fn reduced_with(&self, lambda: &[f64]) -> Vec<f64> {
        (0..self.program.n_vars())
            .map(|v| {
                self.program.objective[v]
                    - self.free_of_var[v].iter().map(|&r| lambda[r]).sum::<f64>()
            })
            .collect()
    }

    /// Lagrangian value at the root with the packing rows outside the
    /// groups relaxed; returns the bound and each group's maximizer.
    fn lagrangian(&self, lambda: &[f64], reduced: &[f64]) -> (f64, Vec<Option<usize>>) {
        let mut bound: f64 = self.free_rows.iter().map(|&r| lambda[r]).sum();
        let mut picks = Vec::with_capacity(self.groups.len());
        for group in &self.groups {
            let best = group
                .vars
                .iter()
                .copied()
                .max_by(|&a, &b| reduced[a].total_cmp(&reduced[b]).then(b.cmp(&a)));
            match best {
                Some(v) if reduced[v] > 0.0 || group.mandatory => {
                    bound += reduced[v];
                    picks.push(Some(v));
                }
                _ => picks.push(None),
            }
        }
        (bound, picks)
    }

    /// Value of a greedy packing (covering rows ignored), a lower reference
    /// for the subgradient step size.
    fn greedy_value(&self) -> f64 {
        let mut order: Vec<usize> = self
            .groups
            .iter()
            .flat_map(|g| g.vars.iter().copied())
            .collect();
        order.sort_by(|&a, &b| {
            self.program.objective[b]
                .total_cmp(&self.program.objective[a])
                .then(a.cmp(&b))
        });
        let mut used = vec![0u64; self.words];
        let mut value = 0.0;
        for v in order {
            if self.program.objective[v] <= 0.0 {
                break;
            }
            if self.compatible(v, &used) {
                for (u, b) in used
                    .iter_mut()
                    .zip(&self.row_bits[v * self.words..(v + 1) * self.words])
                {
                    *u |= b;
                }
                value += self.program.objective[v];
            }
        }
        value
    }

    /// Subgradient descent on the multipliers of the free rows. Any
    /// nonnegative multipliers give a valid bound; this only tightens it.
    fn tune_multipliers(&mut self) {
        if self.free_rows.is_empty() {
            return;
        }
        let lower = self.greedy_value();
        let mut lambda = vec![0.0; self.program.le_rows.len()];
        let mut reduced = self.program.objective.clone();
        let (mut best_bound, _) = self.lagrangian(&lambda, &reduced);
        let mut best_lambda = lambda.clone();
        let mut theta = 1.0;
        let mut stall = 0;
        for _ in 0..SUBGRADIENT_ITERATIONS {
            let (bound, picks) = self.lagrangian(&lambda, &reduced);
            if bound < best_bound - 1e-12 {
                best_bound = bound;
                best_lambda.clone_from(&lambda);
                stall = 0;
            } else {
                stall += 1;
                if stall >= 5 {
                    theta *= 0.5;
                    stall = 0;
                }
            }
            let gap = best_bound - lower;
            if gap <= 1e-9 * best_bound.abs().max(1.0) || theta < 1e-4 {
                break;
            }
            let mut hits = vec![0.0; lambda.len()];
            for &v in picks.iter().flatten() {
                for &r in &self.free_of_var[v] {
                    hits[r] += 1.0;
                }
            }
            let mut grad = Vec::with_capacity(self.free_rows.len());
            let mut norm = 0.0;
            for &r in &self.free_rows {
                let mut d = 1.0 - hits[r];
                if d > 0.0 && lambda[r] <= 0.0 {
                    d = 0.0;
                }
                norm += d * d;
                grad.push(d);
            }
            if norm == 0.0 {
                break;
            }
            let step = theta * gap / norm;
            for (&r, d) in self.free_rows.iter().zip(grad) {
                lambda[r] = (lambda[r] - step * d).max(0.0);
            }
            reduced = self.reduced_with(&lambda);
        }
        self.reduced = self.reduced_with(&best_lambda);
        self.lambda = best_lambda;
        let reduced = &self.reduced;
        for group in &mut self.groups {
            group
                .by_reduced
                .sort_by(|&a, &b| reduced[b].total_cmp(&reduced[a]).then(a.cmp(&b)));
        }
    }

    fn compatible(&self, v: usize, used: &[u64]) -> bool {
        let bits = &self.row_bits[v * self.words..(v + 1) * self.words];
        bits.iter().zip(used).all(|(a, b)| a & b == 0)
    }

    fn run(&mut self) -> Result<()> {
        if self.root_infeasible() {
            return Ok(());
        }
        let used = vec![0u64; self.words];
        let lhs = vec![0.0; self.program.ge_rows.len()];
        self.dfs(0, &used, 0.0, &lhs)
    }

    fn improves(&self, value: f64) -> bool {
        match self.best {
            None => true,
            Some(_) => value > self.best_value + 1e-12 * self.best_value.abs().max(1.0),
        }
    }

    /// Lagrangian bound at a node, with slack for rounding; `None` when a
    /// mandatory group has nothing left.
    fn lagrangian_bound(&self, g: usize, used: &[u64], value: f64) -> Option<f64> {
        let mut bound = value;
        for &r in &self.free_rows {
            if used[r / 64] >> (r % 64) & 1 == 0 {
                bound += self.lambda[r];
            }
        }
        for group in &self.groups[g..] {
            match group.by_reduced.iter().find(|&&v| self.compatible(v, used)) {
                Some(&v) if group.mandatory => bound += self.reduced[v],
                Some(&v) => bound += self.reduced[v].max(0.0),
                None if group.mandatory => return None,
                None => {}
            }
        }
        Some(bound + 1e-9 * bound.abs().max(1.0))
    }

    fn dfs(&mut self, g: usize, used: &[u64], value: f64, lhs: &[f64]) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::NodeBudget {
                budget: self.budget,
            });
        }
        let ge_rows = &self.program.ge_rows;

        if g == self.groups.len() {
            let feasible = self
                .shared_ge
                .iter()
                .all(|&r| lhs[r] >= ge_rows[r].rhs - FEASIBILITY_TOL);
            if feasible && self.improves(value) {
                self.best = Some(self.chosen.clone());
                self.best_value = value;
            }
            return Ok(());
        }

        // Bounds over the open groups.
        let mut optimistic = lhs.to_vec();
        let mut bound = value;
        for group in &self.groups[g..] {
            if group.ge_rows.is_empty() {
                match group.vars.iter().find(|&&v| self.compatible(v, used)) {
                    Some(&v) if group.mandatory => bound += self.program.objective[v],
                    Some(&v) => bound += self.program.objective[v].max(0.0),
                    None if group.mandatory => return Ok(()),
                    None => {}
                }
                continue;
            }
            let mut best_obj = if group.mandatory {
                f64::NEG_INFINITY
            } else {
                0.0
            };
            let mut best_cov: Vec<f64> = vec![0.0; group.ge_rows.len()];
            for &v in &group.vars {
                if !self.compatible(v, used) {
                    continue;
                }
                best_obj = best_obj.max(self.program.objective[v]);
                for &(r, a) in &self.ge_of_var[v] {
                    let slot = group.ge_rows.binary_search(&r).expect("row listed");
                    best_cov[slot] = best_cov[slot].max(a);
                }
            }
            if best_obj == f64::NEG_INFINITY {
                return Ok(());
            }
            bound += best_obj;
            for (slot, &r) in group.ge_rows.iter().enumerate() {
                optimistic[r] += best_cov[slot];
            }
        }
        if self.best.is_some() && !self.improves(bound) {
            return Ok(());
        }
        if self
            .shared_ge
            .iter()
            .any(|&r| optimistic[r] < ge_rows[r].rhs - FEASIBILITY_TOL)
        {
            return Ok(());
        }
        match self.lagrangian_bound(g, used, value) {
            None => return Ok(()),
            Some(b) if self.best.is_some() && !self.improves(b) => return Ok(()),
            Some(_) => {}
        }

        let n_vars = self.groups[g].vars.len();
        let mut next_used = used.to_vec();
        let mut next_lhs = lhs.to_vec();
        for i in 0..n_vars {
            let v = self.groups[g].vars[i];
            if !self.compatible(v, used) {
                continue;
            }
            let bits = &self.row_bits[v * self.words..(v + 1) * self.words];
            for (dst, (a, b)) in next_used.iter_mut().zip(used.iter().zip(bits)) {
                *dst = a | b;
            }
            next_lhs.copy_from_slice(lhs);
            for &(r, a) in &self.ge_of_var[v] {
                next_lhs[r] += a;
            }
            self.chosen.push(v);
            let res = self.dfs(
                g + 1,
                &next_used,
                value + self.program.objective[v],
                &next_lhs,
            );
            self.chosen.pop();
            res?;
        }
        if self.groups[g].mandatory {
            return Ok(());
        }
        self.dfs(g + 1, used, value, lhs)
    }
}

/// Exhaustive enumeration of all `2^n` vectors; the reference for [`solve`].
pub fn brute_force(program: &ZeroOneProgram) -> Result<SolveResult> {
    let n = program.n_vars();
    if n > MAX_BRUTE_FORCE_VARIABLES {
        return Err(Error::TooManyVariables {
            vars: n,
            limit: MAX_BRUTE_FORCE_VARIABLES,
        });
    }
    program.check_indices()?;
    let mut best: Option<(f64, u64)> = None;
    let mut x = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        for (i, slot) in x.iter_mut().enumerate() {
            *slot = mask >> i & 1 == 1;
        }
        if !program.is_feasible(&x) {
            continue;
        }
        let value = program.value(&x);
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, mask));
        }
    }
    let nodes = 1u64 << n;
    Ok(match best {
        Some((value, mask)) => SolveResult {
            status: SolveStatus::Optimal,
            solution: (0..n).map(|i| mask >> i & 1 == 1).collect(),
            objective_value: value,
            nodes_explored: nodes,
        },
        None => SolveResult {
            status: SolveStatus::Infeasible,
            solution: vec![false; n],
            objective_value: 0.0,
            nodes_explored: nodes,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The four-channel, two-bidder example bid matrix, bids in row order.
    pub(crate) fn example_program() -> ZeroOneProgram {
        ZeroOneProgram {
            objective: vec![15.0, 13.0, 14.0, 42.0, 9.0, 17.0, 18.0, 31.0],
            le_rows: vec![
                vec![0, 1, 2, 3],
                vec![4, 5, 6, 7],
                vec![0, 1, 3, 4, 5, 7],
                vec![0, 2, 3, 4, 6, 7],
                vec![5, 6, 7],
                vec![1, 2, 3],
            ],
            ge_rows: vec![],
        }
    }

    #[test]
    fn example_optimum_is_bid_four() {
        for res in [
            solve(&example_program()).unwrap(),
            brute_force(&example_program()).unwrap(),
        ] {
            assert!(res.is_optimal());
            assert_eq!(res.objective_value, 42.0);
            assert_eq!(res.selected().collect::<Vec<_>>(), vec![3]);
        }
    }

    #[test]
    fn unreachable_covering_row_is_infeasible() {
        let p = ZeroOneProgram {
            objective: vec![1.0],
            le_rows: vec![],
            ge_rows: vec![GeRow {
                coefs: vec![(0, 1.0)],
                rhs: 2.0,
            }],
        };
        assert_eq!(solve(&p).unwrap().status, SolveStatus::Infeasible);
        assert_eq!(brute_force(&p).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn empty_program() {
        let p = ZeroOneProgram::default();
        let r = solve(&p).unwrap();
        assert!(r.is_optimal());
        assert_eq!(r.objective_value, 0.0);
        assert!(brute_force(&p).unwrap().is_optimal());
    }

    #[test]
    fn covering_row_forces_smaller_bid() {
        // bidder A: x0 (10, covers 1), bidder B: x1 (8) conflicts with x0, x2 (1) conflicts with nothing
        // B needs at least 5 -> must take x1, A cannot take x0.
        let p = ZeroOneProgram {
            objective: vec![10.0, 8.0, 1.0],
            le_rows: vec![vec![0], vec![1, 2], vec![0, 1]],
            ge_rows: vec![GeRow {
                coefs: vec![(1, 8.0), (2, 1.0)],
                rhs: 5.0,
            }],
        };
        let r = solve(&p).unwrap();
        assert_eq!(r.objective_value, 8.0);
        assert_eq!(
            r,
            SolveResult {
                nodes_explored: r.nodes_explored,
                ..brute_force(&p).unwrap()
            }
        );
    }

    #[test]
    fn node_budget_is_a_fault() {
        let p = example_program();
        let err = solve_with(&p, &SolverConfig { node_budget: 2 }).unwrap_err();
        assert!(matches!(err, Error::NodeBudget { budget: 2 }));
    }

    #[test]
    fn oversized_programs_are_rejected() {
        let p = ZeroOneProgram {
            objective: vec![1.0; 26],
            ..Default::default()
        };
        assert!(matches!(
            brute_force(&p),
            Err(Error::TooManyVariables { .. })
        ));
        let p = ZeroOneProgram {
            objective: vec![1.0; MAX_VARIABLES + 1],
            ..Default::default()
        };
        assert!(matches!(solve(&p), Err(Error::TooManyVariables { .. })));
    }

    #[test]
    fn negative_objective_taken_only_when_required() {
        let p = ZeroOneProgram {
            objective: vec![-1.0, 3.0],
            le_rows: vec![],
            ge_rows: vec![GeRow {
                coefs: vec![(0, 1.0)],
                rhs: 1.0,
            }],
        };
        let r = solve(&p).unwrap();
        assert_eq!(r.solution, vec![true, true]);
        assert_eq!(r.objective_value, 2.0);
    }
}
