use super::InSets;

/// Where a vertex currently sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Unused,
    Path(usize),
    Cycle(usize),
}

/// The path P (from `s_P` to `f_P`), the cycle C (empty when Λ), the unused
/// set U, and Ū* = {v ∉ U : v ∈ IN(u) for some u ∈ U}, kept incrementally.
#[derive(Clone, Debug)]
pub struct PathCycleState {
    n: usize,
    two_alpha_n: f64,
    path: Vec<u32>,
    cycle: Vec<u32>,
    loc: Vec<Location>,
    unused: usize,
    // number of u ∈ U with v ∈ IN(u)
    cover: Vec<u32>,
    ubar: usize,
}

impl PathCycleState {
    /// P = (start), C = Λ, U = everything else.
    pub fn new(n: usize, alpha: f64, start: usize, ins: &InSets) -> Self {
        let mut loc = vec![Location::Unused; n];
        loc[start] = Location::Path(0);
        let mut cover = vec![0u32; n];
        for u in (0..n).filter(|&u| u != start) {
            for &v in ins.get(u) {
                cover[v as usize] += 1;
            }
        }
        let ubar = usize::from(cover[start] > 0);
        PathCycleState {
            n,
            two_alpha_n: 2.0 * alpha * n as f64,
            path: vec![start as u32],
            cycle: Vec::new(),
            loc,
            unused: n - 1,
            cover,
            ubar,
        }
    }

    /// Arbitrary layout, for fixtures. `path` and `cycle` must be disjoint.
    pub fn from_parts(n: usize, alpha: f64, path: Vec<u32>, cycle: Vec<u32>, ins: &InSets) -> Self {
        assert!(!path.is_empty(), "path needs a start vertex");
        let mut loc = vec![Location::Unused; n];
        for (i, &v) in path.iter().enumerate() {
            assert_eq!(loc[v as usize], Location::Unused, "vertex {v} placed twice");
            loc[v as usize] = Location::Path(i);
        }
        for (i, &v) in cycle.iter().enumerate() {
            assert_eq!(loc[v as usize], Location::Unused, "vertex {v} placed twice");
            loc[v as usize] = Location::Cycle(i);
        }
        let mut cover = vec![0u32; n];
        for u in (0..n).filter(|&u| loc[u] == Location::Unused) {
            for &v in ins.get(u) {
                cover[v as usize] += 1;
            }
        }
        let ubar = (0..n)
            .filter(|&v| loc[v] != Location::Unused && cover[v] > 0)
            .count();
        let unused = n - path.len() - cycle.len();
        PathCycleState {
            n,
            two_alpha_n: 2.0 * alpha * n as f64,
            path,
            cycle,
            loc,
            unused,
            cover,
            ubar,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 2αn as a real number; every guard compares against it directly.
    pub fn two_alpha_n(&self) -> f64 {
        self.two_alpha_n
    }

    pub fn path(&self) -> &[u32] {
        &self.path
    }

    pub fn cycle(&self) -> &[u32] {
        &self.cycle
    }

    pub fn start(&self) -> usize {
        self.path[0] as usize
    }

    pub fn finish(&self) -> usize {
        *self.path.last().expect("path is never empty") as usize
    }

    pub fn location(&self, v: usize) -> Location {
        self.loc[v]
    }

    pub fn in_unused(&self, v: usize) -> bool {
        self.loc[v] == Location::Unused
    }

    pub fn unused_count(&self) -> usize {
        self.unused
    }

    pub fn unused(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&v| self.in_unused(v))
    }

    pub fn ubar_size(&self) -> usize {
        self.ubar
    }

    pub fn in_ubar(&self, v: usize) -> bool {
        !self.in_unused(v) && self.cover[v] > 0
    }

    pub fn ubar_star(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.in_ubar(v)).collect()
    }

    /// Predecessor on P or C; `None` for `s_P` and for unused vertices.
    pub fn pi(&self, v: usize) -> Option<usize> {
        match self.loc[v] {
            Location::Unused | Location::Path(0) => None,
            Location::Path(i) => Some(self.path[i - 1] as usize),
            Location::Cycle(i) => {
                let len = self.cycle.len();
                Some(self.cycle[(i + len - 1) % len] as usize)
            }
        }
    }

    /// Edges along P from a path vertex `y` forward to `f_P`.
    pub fn distance_to_finish(&self, y: usize) -> Option<usize> {
        match self.loc[y] {
            Location::Path(i) => Some(self.path.len() - 1 - i),
            _ => None,
        }
    }

    /// |P| + |C|.
    pub fn progress(&self) -> usize {
        self.n - self.unused
    }

    fn take_from_unused(&mut self, u: usize, ins: &InSets) {
        debug_assert!(self.in_unused(u));
        self.unused -= 1;
        if self.cover[u] > 0 {
            self.ubar += 1;
        }
        for &v in ins.get(u) {
            let v = v as usize;
            self.cover[v] -= 1;
            if self.cover[v] == 0 && !self.in_unused(v) {
                self.ubar -= 1;
            }
        }
    }

    fn push_path(&mut self, v: usize) {
        self.loc[v] = Location::Path(self.path.len());
        self.path.push(v as u32);
    }

    /// P ← P + (f_P, y) for an unused `y`.
    pub fn extend(&mut self, y: usize, ins: &InSets) {
        assert!(self.in_unused(y), "{y} is not unused");
        self.take_from_unused(y, ins);
        self.push_path(y);
    }

    /// With `y` on P and `x = π(y)`: P ← P[s_P, x] (+ (x, u) if `absorb`),
    /// C ← P[y, f_P] + (f_P, y).
    pub fn rotate(&mut self, y: usize, absorb: Option<usize>, ins: &InSets) {
        assert!(self.cycle.is_empty(), "rotation needs C = Λ");
        let Location::Path(j) = self.loc[y] else {
            panic!("{y} is not on the path");
        };
        assert!(j > 0, "cannot rotate at s_P");
        self.cycle = self.path.split_off(j);
        for (i, &v) in self.cycle.iter().enumerate() {
            self.loc[v as usize] = Location::Cycle(i);
        }
        if let Some(u) = absorb {
            assert!(self.in_unused(u), "{u} is not unused");
            self.take_from_unused(u, ins);
            self.push_path(u);
        }
    }

    /// P ← P + (f_P, y) + the arc of C from `y` round to π(y); C ← Λ.
    pub fn merge(&mut self, y: usize) {
        let Location::Cycle(j) = self.loc[y] else {
            panic!("{y} is not on the cycle");
        };
        let cycle = std::mem::take(&mut self.cycle);
        for &v in cycle[j..].iter().chain(&cycle[..j]) {
            self.push_path(v as usize);
        }
    }

    /// Closes the path into a Hamilton cycle when P covers every vertex.
    pub fn hamilton_cycle(&self) -> Option<Vec<usize>> {
        (self.path.len() == self.n).then(|| self.path.iter().map(|&v| v as usize).collect())
    }

    /// Every invariant, including Ū* against its definition.
    pub fn check_invariants(&self, ins: &InSets, cycle_floor: bool) -> Result<(), String> {
        self.check_structure(cycle_floor)?;
        let mut expect = vec![false; self.n];
        for u in self.unused() {
            for &v in ins.get(u) {
                if !self.in_unused(v as usize) {
                    expect[v as usize] = true;
                }
            }
        }
        let ubar: Vec<usize> = (0..self.n).filter(|&v| expect[v]).collect();
        if ubar != self.ubar_star() || ubar.len() != self.ubar {
            return Err("Ū* out of sync with its definition".into());
        }
        Ok(())
    }

    /// P, C, U partition the vertices and locations are current; with
    /// `cycle_floor`, also |C| = 0 or |C| ≥ 2αn. O(n).
    pub fn check_structure(&self, cycle_floor: bool) -> Result<(), String> {
        let mut seen = vec![false; self.n];
        for (i, &v) in self.path.iter().enumerate() {
            let v = v as usize;
            if std::mem::replace(&mut seen[v], true) {
                return Err(format!("vertex {v} repeated"));
            }
            if self.loc[v] != Location::Path(i) {
                return Err(format!("location of path vertex {v} is stale"));
            }
        }
        for (i, &v) in self.cycle.iter().enumerate() {
            let v = v as usize;
            if std::mem::replace(&mut seen[v], true) {
                return Err(format!("vertex {v} on both P and C or repeated"));
            }
            if self.loc[v] != Location::Cycle(i) {
                return Err(format!("location of cycle vertex {v} is stale"));
            }
        }
        let unused = (0..self.n).filter(|&v| !seen[v]).count();
        if unused != self.unused || (0..self.n).any(|v| !seen[v] && self.loc[v] != Location::Unused)
        {
            return Err("U does not complement P and C".into());
        }
        if cycle_floor && !self.cycle.is_empty() && (self.cycle.len() as f64) < self.two_alpha_n {
            return Err(format!(
                "cycle of length {} below 2αn = {}",
                self.cycle.len(),
                self.two_alpha_n
            ));
        }
        Ok(())
    }
}
