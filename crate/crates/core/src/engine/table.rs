//! Proposal/rotation tables over a strict multigraph.
//!
//! Phase 1 runs proposals: every vertex proposes along the best edge still
//! in its list and the recipient deletes every edge it ranks below the
//! proposal it now holds. Afterwards `first(x) = e` exactly when `e` is the
//! last entry of the other endpoint's list.
//!
//! Phase 2 eliminates rotations until every list has at most two entries.
//! A rotation is traced by following `second(x_i)` to `y_{i+1}` and then
//! `last(y_{i+1})` back to `x_{i+1}`; eliminating it makes each `y_{i+1}`
//! drop the entries ranked below `second(x_i)`. Rotations whose elimination
//! would empty a list or break the first/last pairing are skipped.
//!
//! The final table pairs `first` and `last` entries into a permutation.
//! Its fixed pairs and even cycles become integral edges and its odd cycles
//! become cycles of 1/2-edges. Every deleted edge is ranked below the last
//! entry of one of its endpoints, so nothing blocks the result.

use super::EngineError;

pub(crate) struct Table {
    ends: Vec<[usize; 2]>,
    /// Per vertex, incident edges best first.
    lists: Vec<Vec<usize>>,
    /// `pos[e][k]`: position of `e` in the list of `ends[e][k]`.
    pos: Vec<[usize; 2]>,
    deleted: Vec<bool>,
    head: Vec<usize>,
    tail: Vec<usize>,
    len: Vec<usize>,
}

impl Table {
    pub(crate) fn new(n: usize, ends: Vec<[usize; 2]>, lists: Vec<Vec<usize>>) -> Table {
        debug_assert_eq!(lists.len(), n);
        let mut pos = vec![[usize::MAX; 2]; ends.len()];
        for (v, list) in lists.iter().enumerate() {
            for (i, &e) in list.iter().enumerate() {
                let side = if ends[e][0] == v { 0 } else { 1 };
                pos[e][side] = i;
            }
        }
        let len: Vec<usize> = lists.iter().map(Vec::len).collect();
        let tail = lists.iter().map(|l| l.len()).collect();
        Table { deleted: vec![false; ends.len()], head: vec![0; n], tail, len, ends, lists, pos }
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    fn position(&self, e: usize, v: usize) -> usize {
        if self.ends[e][0] == v {
            self.pos[e][0]
        } else {
            self.pos[e][1]
        }
    }

    fn delete(&mut self, e: usize) {
        if !self.deleted[e] {
            self.deleted[e] = true;
            for v in self.ends[e] {
                self.len[v] -= 1;
            }
        }
    }

    fn first(&mut self, v: usize) -> Option<usize> {
        while self.head[v] < self.tail[v] && self.deleted[self.lists[v][self.head[v]]] {
            self.head[v] += 1;
        }
        (self.head[v] < self.tail[v]).then(|| self.lists[v][self.head[v]])
    }

    fn last(&mut self, v: usize) -> Option<usize> {
        while self.tail[v] > self.head[v] && self.deleted[self.lists[v][self.tail[v] - 1]] {
            self.tail[v] -= 1;
        }
        (self.tail[v] > self.head[v]).then(|| self.lists[v][self.tail[v] - 1])
    }

    fn second(&mut self, v: usize) -> Option<usize> {
        self.first(v)?;
        let list = &self.lists[v];
        (self.head[v] + 1..self.tail[v]).map(|i| list[i]).find(|e| !self.deleted[*e])
    }

    /// Deletes every entry of `v`'s list ranked strictly below `e`.
    fn truncate_below(&mut self, v: usize, e: usize) {
        let from = self.position(e, v) + 1;
        for i in from..self.lists[v].len() {
            let f = self.lists[v][i];
            self.delete(f);
        }
    }

    fn phase_one(&mut self) {
        let n = self.lists.len();
        let mut held: Vec<Option<usize>> = vec![None; n];
        let mut free: Vec<usize> = (0..n).rev().collect();
        while let Some(x) = free.pop() {
            let Some(e) = self.first(x) else { continue };
            let y = self.other(e, x);
            if let Some(h) = held[y] {
                debug_assert!(self.position(e, y) < self.position(h, y));
                let z = self.other(h, y);
                free.push(z);
            }
            held[y] = Some(e);
            self.truncate_below(y, e);
            // a vertex rejected along one edge proposes again at once
            free.sort_unstable_by(|a, b| b.cmp(a));
        }
    }

    /// Traces the rotation reached from `x0`, returning the cycle of
    /// `(x_i, second(x_i))` pairs.
    fn rotation(&mut self, x0: usize) -> Vec<(usize, usize)> {
        let mut seen: Vec<Option<usize>> = vec![None; self.lists.len()];
        let mut trail: Vec<(usize, usize)> = Vec::new();
        let mut x = x0;
        loop {
            if let Some(i) = seen[x] {
                return trail.split_off(i);
            }
            seen[x] = Some(trail.len());
            let s = self.second(x).expect("rotation vertex has two entries");
            let y = self.other(s, x);
            let l = self.last(y).expect("rotation target has a list");
            trail.push((x, s));
            x = self.other(l, y);
        }
    }

    /// Deletions performed by eliminating `rot`, or `None` if they would
    /// empty a list or break the first/last pairing.
    fn elimination(&mut self, rot: &[(usize, usize)]) -> Option<Vec<usize>> {
        let mut dels = Vec::new();
        for &(x, s) in rot {
            let y = self.other(s, x);
            let from = self.position(s, y) + 1;
            for i in from..self.lists[y].len() {
                let f = self.lists[y][i];
                if !self.deleted[f] {
                    dels.push(f);
                }
            }
        }
        dels.sort_unstable();
        dels.dedup();
        let mut trial = Table {
            ends: self.ends.clone(),
            lists: self.lists.clone(),
            pos: self.pos.clone(),
            deleted: self.deleted.clone(),
            head: self.head.clone(),
            tail: self.tail.clone(),
            len: self.len.clone(),
        };
        let before: Vec<bool> = (0..self.lists.len()).map(|v| self.len[v] > 0).collect();
        for &e in &dels {
            trial.delete(e);
        }
        for (v, nonempty) in before.iter().enumerate() {
            if *nonempty && trial.len[v] == 0 {
                return None;
            }
        }
        trial.consistent().then_some(dels)
    }

    /// `first(x) = e` iff `last(other) = e`, for every vertex with a list.
    fn consistent(&mut self) -> bool {
        for v in 0..self.lists.len() {
            if let Some(e) = self.first(v) {
                let y = self.other(e, v);
                if self.last(y) != Some(e) {
                    return false;
                }
            }
            if let Some(e) = self.last(v) {
                let y = self.other(e, v);
                if self.first(y) != Some(e) {
                    return false;
                }
            }
        }
        true
    }

    fn phase_two(&mut self) -> Result<(), EngineError> {
        loop {
            let n = self.lists.len();
            if (0..n).all(|v| self.len[v] <= 2) {
                return Ok(());
            }
            let mut progressed = false;
            for x in 0..n {
                if self.len[x] < 2 {
                    continue;
                }
                let rot = self.rotation(x);
                if let Some(dels) = self.elimination(&rot) {
                    for e in dels {
                        self.delete(e);
                    }
                    progressed = true;
                    break;
                }
            }
            if !progressed {
                return Err(EngineError::Stuck);
            }
        }
    }

    /// Half-units per edge (0, 1 or 2) of the partition read off a table
    /// whose lists have at most two entries.
    fn read_off(&mut self) -> Vec<u8> {
        let n = self.lists.len();
        let mut units = vec![0u8; self.ends.len()];
        let mut done = vec![false; n];
        for start in 0..n {
            if done[start] || self.len[start] == 0 {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !done[x] {
                done[x] = true;
                let e = self.first(x).expect("nonempty list");
                cycle.push(e);
                x = self.other(e, x);
            }
            debug_assert_eq!(x, start);
            if cycle.len() == 2 && cycle[0] == cycle[1] {
                units[cycle[0]] = 2;
            } else if cycle.len() % 2 == 1 {
                for e in cycle {
                    units[e] = 1;
                }
            } else {
                for e in cycle.into_iter().step_by(2) {
                    units[e] = 2;
                }
            }
        }
        units
    }
}

/// Stable partition of a strict multigraph given as ranked incidence lists.
pub(crate) fn solve(n: usize, ends: Vec<[usize; 2]>, lists: Vec<Vec<usize>>) -> Result<Vec<u8>, EngineError> {
    let mut t = Table::new(n, ends, lists);
    t.phase_one();
    debug_assert!(t.consistent());
    t.phase_two()?;
    Ok(t.read_off())
}
