//! Polynomial-time list colouring when every list has at most two colours,
//! via 2-SAT.
//!
//! Each vertex with a non-empty list gets one boolean variable. For a list
//! `{a, b}` the variable selects `a` (true) or `b` (false); a singleton list
//! `{a}` becomes the unit clause "variable is true". Every edge and every
//! colour shared by both endpoint lists contributes the clause forbidding
//! both endpoints from taking that colour. Satisfiability and a model come
//! from the strongly connected components of the implication graph.

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::instance::{Colour, Coloring, Instance};

/// Meaning of one implication-graph node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    pub vertex: Vertex,
    pub colour: Colour,
    /// `true`: "vertex has colour"; `false`: "vertex does not have colour".
    pub holds: bool,
}

/// Directed implication graph over `2 * vars` literal nodes. Node `2i` is
/// variable `i` true, node `2i + 1` is variable `i` false.
#[derive(Clone, Debug)]
pub struct ImplicationGraph {
    succ: Vec<Vec<usize>>,
    meaning: Vec<Literal>,
    var_of_vertex: Vec<Option<usize>>,
}

impl ImplicationGraph {
    /// Encodes `inst`. Fails if some list has three colours; returns
    /// `Ok(None)` if some list is empty (trivially unsatisfiable).
    pub fn build(inst: &Instance) -> Result<Option<Self>> {
        let n = inst.vertex_count();
        let mut var_of_vertex = vec![None; n];
        let mut meaning = Vec::new();
        for v in 0..n {
            let list = inst.list(v);
            match list.len() {
                0 => return Ok(None),
                1 | 2 => {
                    let mut cs = list.iter();
                    let a = cs.next().unwrap();
                    var_of_vertex[v] = Some(meaning.len() / 2);
                    meaning.push(Literal { vertex: v, colour: a, holds: true });
                    meaning.push(match cs.next() {
                        Some(b) => Literal { vertex: v, colour: b, holds: true },
                        None => Literal { vertex: v, colour: a, holds: false },
                    });
                }
                size => return Err(Error::ListTooLarge { vertex: v, size, max: 2 }),
            }
        }
        let mut ig = ImplicationGraph {
            succ: vec![Vec::new(); meaning.len()],
            meaning,
            var_of_vertex,
        };
        for v in 0..n {
            if inst.list(v).len() == 1 {
                let x = 2 * ig.var_of_vertex[v].unwrap();
                ig.succ[x + 1].push(x);
            }
        }
        for (u, v) in inst.graph().edges() {
            for c in inst.list(u).intersection(inst.list(v)).iter() {
                let a = ig.node_for(u, c);
                let b = ig.node_for(v, c);
                // not (a and b)
                ig.succ[a].push(b ^ 1);
                ig.succ[b].push(a ^ 1);
            }
        }
        Ok(Some(ig))
    }

    /// Node asserting "vertex `v` has colour `c`".
    fn node_for(&self, v: Vertex, c: Colour) -> usize {
        let x = 2 * self.var_of_vertex[v].expect("vertex has a variable");
        if self.meaning[x].colour == c {
            x
        } else {
            debug_assert!(self.meaning[x + 1].holds && self.meaning[x + 1].colour == c);
            x + 1
        }
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn meaning(&self, node: usize) -> Literal {
        self.meaning[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    /// Strongly connected components, numbered in reverse topological
    /// order (iterative Tarjan).
    pub fn components(&self) -> Vec<usize> {
        const UNSET: usize = usize::MAX;
        let n = self.succ.len();
        let mut index = vec![UNSET; n];
        let mut low = vec![0; n];
        let mut comp = vec![UNSET; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut call: Vec<(usize, usize)> = Vec::new();
        let mut next_index = 0;
        let mut next_comp = 0;
        for root in 0..n {
            if index[root] != UNSET {
                continue;
            }
            call.push((root, 0));
            while let Some(&mut (u, ref mut edge)) = call.last_mut() {
                if *edge == 0 {
                    index[u] = next_index;
                    low[u] = next_index;
                    next_index += 1;
                    stack.push(u);
                    on_stack[u] = true;
                }
                if let Some(&w) = self.succ[u].get(*edge) {
                    *edge += 1;
                    if index[w] == UNSET {
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[u] = low[u].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if low[u] == index[u] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == u {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[u]);
                }
            }
        }
        comp
    }
}

/// Decides an instance whose lists all have at most two colours, returning a
/// colouring when one exists.
pub fn solve_two_list(inst: &Instance) -> Result<Option<Coloring>> {
    let Some(ig) = ImplicationGraph::build(inst)? else {
        return Ok(None);
    };
    let comp = ig.components();
    let mut colours = Vec::with_capacity(inst.vertex_count());
    for v in 0..inst.vertex_count() {
        let x = 2 * ig.var_of_vertex[v].unwrap();
        if comp[x] == comp[x + 1] {
            return Ok(None);
        }
        // Tarjan numbers sinks first, so the literal with the smaller
        // component id comes later in topological order.
        let node = if comp[x] < comp[x + 1] { x } else { x + 1 };
        let lit = ig.meaning(node);
        colours.push(if lit.holds { lit.colour } else { ig.meaning(x).colour });
    }
    Ok(Some(Coloring(colours)))
}
