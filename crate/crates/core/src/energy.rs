//! Clique energy of a colouring, computed exactly and incrementally.
//!
//! Cliques are enumerated in increasing vertex order. The first two vertices
//! `p1 < p2` fix the only colour a monochromatic clique through them can
//! have, and each later vertex is drawn from the running intersection of
//! colour neighbourhoods, so a branch is abandoned at the first edge of the
//! wrong colour. Flipping one edge only changes cliques containing both of
//! its endpoints, which is all [`delta_energy`] looks at.

use std::collections::BTreeSet;

use crate::colouring::{above, Colouring, Edge};
use crate::error::{RamseyError, Result};
use crate::problem::Problem;

/// Energy of a colouring together with where it comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub total: f64,
    /// Monochromatic `x_i`-cliques of colour `i`, per colour.
    pub mono_counts: Vec<u64>,
    /// Edges lying in at least one counted clique.
    pub hot_edges: BTreeSet<Edge>,
}

impl EnergyReport {
    pub fn is_zero(&self) -> bool {
        self.mono_counts.iter().all(|&c| c == 0)
    }
}

pub(crate) fn check_compatible(c: &Colouring, prob: &Problem) -> Result<()> {
    if c.n_colours() != prob.n_colours() {
        return Err(RamseyError::config(format!(
            "colouring uses {} colours but {prob} has {}",
            c.n_colours(),
            prob.n_colours()
        )));
    }
    Ok(())
}

fn check_flip(c: &Colouring, e: Edge, new_colour: usize) -> Result<()> {
    if e.q() >= c.n_vertices() {
        return Err(RamseyError::precondition(format!(
            "edge {e} outside K_{}",
            c.n_vertices()
        )));
    }
    if new_colour >= c.n_colours() {
        return Err(RamseyError::precondition(format!(
            "colour {new_colour} out of range for {} colours",
            c.n_colours()
        )));
    }
    Ok(())
}

/// Number of `k`-cliques of `colour` inside the vertex set `cand`.
pub(crate) fn count_cliques_in(c: &Colouring, colour: usize, mut cand: u64, k: usize) -> u64 {
    match k {
        0 => 1,
        1 => cand.count_ones() as u64,
        _ => {
            let mut total = 0;
            while cand != 0 {
                if (cand.count_ones() as usize) < k {
                    break;
                }
                let v = cand.trailing_zeros() as usize;
                cand &= cand - 1;
                total += count_cliques_in(c, colour, cand & c.neighbours(colour, v), k - 1);
            }
            total
        }
    }
}

/// Calls `f` with `stack` extended by every `k`-clique of `colour` inside `cand`.
fn for_each_clique_in(
    c: &Colouring,
    colour: usize,
    mut cand: u64,
    k: usize,
    stack: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if k == 0 {
        f(stack);
        return;
    }
    while cand != 0 {
        if (cand.count_ones() as usize) < k {
            break;
        }
        let v = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        stack.push(v);
        for_each_clique_in(c, colour, cand & c.neighbours(colour, v), k - 1, stack, f);
        stack.pop();
    }
}

/// 1 if every pair of `vertices` has colour `colour`, else 0.
pub fn clique_energy(c: &Colouring, vertices: &[usize], colour: usize) -> Result<u8> {
    if vertices.len() < 2 {
        return Err(RamseyError::precondition(
            "a clique needs at least two vertices",
        ));
    }
    if colour >= c.n_colours() {
        return Err(RamseyError::precondition(format!(
            "colour {colour} out of range"
        )));
    }
    let mut seen = 0u64;
    for &v in vertices {
        if v >= c.n_vertices() {
            return Err(RamseyError::precondition(format!(
                "vertex {v} out of range"
            )));
        }
        if seen & (1 << v) != 0 {
            return Err(RamseyError::precondition(format!("vertex {v} repeated")));
        }
        seen |= 1 << v;
    }
    let mono = vertices
        .iter()
        .all(|&v| c.neighbours(colour, v) & seen == seen & !(1 << v));
    Ok(mono as u8)
}

/// Per-colour counts of monochromatic target cliques.
pub fn mono_counts(c: &Colouring, prob: &Problem) -> Result<Vec<u64>> {
    check_compatible(c, prob)?;
    let n = c.n_vertices();
    let mut counts = vec![0u64; prob.n_colours()];
    for p1 in 0..n {
        for p2 in p1 + 1..n {
            let colour = c.colour(Edge::ordered(p1, p2));
            let x = prob.clique_size(colour);
            if x > n {
                continue;
            }
            let cand = c.neighbours(colour, p1) & c.neighbours(colour, p2) & above(p2);
            counts[colour] += count_cliques_in(c, colour, cand, x - 2);
        }
    }
    Ok(counts)
}

/// Full energy of `c`, with monochromatic clique counts and hot edges.
pub fn total_energy(c: &Colouring, prob: &Problem) -> Result<EnergyReport> {
    check_compatible(c, prob)?;
    let n = c.n_vertices();
    let mut counts = vec![0u64; prob.n_colours()];
    let mut hot = vec![false; c.n_edges()];
    let mut stack = Vec::with_capacity(n);
    for p1 in 0..n {
        for p2 in p1 + 1..n {
            let colour = c.colour(Edge::ordered(p1, p2));
            let x = prob.clique_size(colour);
            if x > n {
                continue;
            }
            let cand = c.neighbours(colour, p1) & c.neighbours(colour, p2) & above(p2);
            stack.clear();
            stack.extend([p1, p2]);
            for_each_clique_in(c, colour, cand, x - 2, &mut stack, &mut |clique| {
                counts[colour] += 1;
                for (i, &a) in clique.iter().enumerate() {
                    for &b in &clique[i + 1..] {
                        hot[c.edge_index(Edge::ordered(a.min(b), a.max(b)))] = true;
                    }
                }
            });
        }
    }
    let hot_edges = c
        .edges()
        .zip(hot)
        .filter_map(|(e, h)| h.then_some(e))
        .collect();
    Ok(EnergyReport {
        total: prob.energy_from_counts(&counts),
        mono_counts: counts,
        hot_edges,
    })
}

/// Monochromatic cliques of `colour` and size `x` that contain both ends of `e`.
#[inline]
fn cliques_through(c: &Colouring, colour: usize, e: Edge, x: usize) -> u64 {
    if x > c.n_vertices() {
        return 0;
    }
    let cand = c.neighbours(colour, e.p()) & c.neighbours(colour, e.q());
    count_cliques_in(c, colour, cand, x - 2)
}

/// `(destroyed, created)` clique counts for recolouring `e` to `new_colour`.
pub fn flip_counts(
    c: &Colouring,
    prob: &Problem,
    e: Edge,
    new_colour: usize,
) -> Result<(u64, u64)> {
    check_compatible(c, prob)?;
    check_flip(c, e, new_colour)?;
    Ok(flip_counts_unchecked(c, prob, e, new_colour))
}

#[inline]
fn flip_counts_unchecked(c: &Colouring, prob: &Problem, e: Edge, new_colour: usize) -> (u64, u64) {
    let old = c.colour(e);
    if old == new_colour {
        return (0, 0);
    }
    (
        cliques_through(c, old, e, prob.clique_size(old)),
        cliques_through(c, new_colour, e, prob.clique_size(new_colour)),
    )
}

/// `E(after) - E(before)` for recolouring `e` to `new_colour`.
pub fn delta_energy(c: &Colouring, prob: &Problem, e: Edge, new_colour: usize) -> Result<f64> {
    let (destroyed, created) = flip_counts(c, prob, e, new_colour)?;
    if destroyed == 0 && created == 0 {
        return Ok(0.0);
    }
    Ok(prob.energy_delta(c.colour(e), destroyed, new_colour, created))
}

/// A copy of `c` with `e` recoloured.
pub fn apply_flip(c: &Colouring, e: Edge, new_colour: usize) -> Result<Colouring> {
    check_flip(c, e, new_colour)?;
    let mut out = c.clone();
    out.set(e, new_colour);
    Ok(out)
}

/// Edges contained in at least one monochromatic target clique.
pub fn hot_edges(c: &Colouring, prob: &Problem) -> Result<BTreeSet<Edge>> {
    Ok(total_energy(c, prob)?.hot_edges)
}

/// A colouring with its energy, clique counts and per-edge clique
/// membership kept current under single-edge flips.
#[derive(Clone, Debug)]
pub struct EnergyTracker {
    colouring: Colouring,
    problem: Problem,
    counts: Vec<u64>,
    // heat[i]: monochromatic target cliques containing edge i
    heat: Vec<u32>,
    hot: usize,
    energy: f64,
}

impl EnergyTracker {
    pub fn new(colouring: Colouring, problem: Problem) -> Result<Self> {
        check_compatible(&colouring, &problem)?;
        let mut tracker = Self {
            counts: vec![0; problem.n_colours()],
            heat: vec![0; colouring.n_edges()],
            hot: 0,
            energy: 0.0,
            colouring,
            problem,
        };
        tracker.recompute();
        Ok(tracker)
    }

    /// Rebuilds every cached quantity from the colouring.
    pub fn recompute(&mut self) {
        let Self {
            colouring: c,
            problem,
            counts,
            heat,
            hot,
            energy,
        } = self;
        counts.iter_mut().for_each(|x| *x = 0);
        heat.iter_mut().for_each(|h| *h = 0);
        let n = c.n_vertices();
        let mut stack = Vec::with_capacity(n);
        for p1 in 0..n {
            for p2 in p1 + 1..n {
                let colour = c.colour(Edge::ordered(p1, p2));
                let x = problem.clique_size(colour);
                if x > n {
                    continue;
                }
                let cand = c.neighbours(colour, p1) & c.neighbours(colour, p2) & above(p2);
                stack.clear();
                stack.extend([p1, p2]);
                for_each_clique_in(c, colour, cand, x - 2, &mut stack, &mut |clique| {
                    counts[colour] += 1;
                    bump(c, heat, clique, 1);
                });
            }
        }
        *hot = heat.iter().filter(|&&h| h > 0).count();
        *energy = problem.energy_from_counts(counts);
    }

    #[inline]
    pub fn colouring(&self) -> &Colouring {
        &self.colouring
    }

    pub fn into_colouring(self) -> Colouring {
        self.colouring
    }

    #[inline]
    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    #[inline]
    pub fn energy(&self) -> f64 {
        self.energy
    }

    #[inline]
    pub fn mono_counts(&self) -> &[u64] {
        &self.counts
    }

    /// True iff there are no monochromatic target cliques.
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.hot == 0 && self.counts.iter().all(|&c| c == 0)
    }

    #[inline]
    pub fn hot_edge_count(&self) -> usize {
        self.hot
    }

    #[inline]
    pub fn is_hot(&self, e: Edge) -> bool {
        self.heat[self.colouring.edge_index(e)] > 0
    }

    pub fn hot_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.colouring
            .edges()
            .zip(&self.heat)
            .filter_map(|(e, &h)| (h > 0).then_some(e))
    }

    /// Energy change of recolouring `e`, without applying it.
    #[inline]
    pub fn delta(&self, e: Edge, new_colour: usize) -> f64 {
        let old = self.colouring.colour(e);
        let (destroyed, created) =
            flip_counts_unchecked(&self.colouring, &self.problem, e, new_colour);
        if destroyed == 0 && created == 0 {
            return 0.0;
        }
        self.problem
            .energy_delta(old, destroyed, new_colour, created)
    }

    /// Recolours `e` and updates every cache.
    pub fn apply(&mut self, e: Edge, new_colour: usize) {
        let Self {
            colouring: c,
            problem,
            counts,
            heat,
            hot,
            energy,
        } = self;
        let old = c.colour(e);
        if old == new_colour {
            return;
        }
        let n = c.n_vertices();
        let mut stack = Vec::with_capacity(n);
        let (p, q) = (e.p(), e.q());

        let x_old = problem.clique_size(old);
        if x_old <= n {
            let cand = c.neighbours(old, p) & c.neighbours(old, q);
            stack.extend([p, q]);
            for_each_clique_in(c, old, cand, x_old - 2, &mut stack, &mut |clique| {
                counts[old] -= 1;
                *hot -= bump(c, heat, clique, -1);
            });
        }

        c.set(e, new_colour);

        let x_new = problem.clique_size(new_colour);
        if x_new <= n {
            let cand = c.neighbours(new_colour, p) & c.neighbours(new_colour, q);
            stack.clear();
            stack.extend([p, q]);
            for_each_clique_in(c, new_colour, cand, x_new - 2, &mut stack, &mut |clique| {
                counts[new_colour] += 1;
                *hot += bump(c, heat, clique, 1);
            });
        }
        *energy = problem.energy_from_counts(counts);
    }
}

/// Adds `by` to the heat of every edge in `clique`; returns how many edges
/// crossed zero in the direction of the change.
#[inline]
fn bump(c: &Colouring, heat: &mut [u32], clique: &[usize], by: i32) -> usize {
    let mut crossed = 0;
    for (i, &a) in clique.iter().enumerate() {
        for &b in &clique[i + 1..] {
            let h = &mut heat[c.edge_index(Edge::ordered(a.min(b), a.max(b)))];
            if by > 0 {
                crossed += (*h == 0) as usize;
                *h += 1;
            } else {
                *h -= 1;
                crossed += (*h == 0) as usize;
            }
        }
    }
    crossed
}
