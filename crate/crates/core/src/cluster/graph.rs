use std::collections::BTreeSet;
use std::fmt;

use crate::qsim::{Gate, Pauli, PauliString, StateVector, MAX_QUBITS};
use crate::{Error, Result};

/// Simple undirected graph on `usize` labels. Qubit `i` of the associated
/// cluster state is the `i`-th smallest label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    vertices: BTreeSet<usize>,
    edges: BTreeSet<(usize, usize)>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

impl Graph {
    pub fn new(
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut g = Graph {
            vertices: vertices.into_iter().collect(),
            edges: BTreeSet::new(),
        };
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// `0 - 1 - ... - (k-1)`.
    pub fn line(k: usize) -> Self {
        Graph::new(0..k, (1..k).map(|i| (i - 1, i))).expect("valid line")
    }

    /// Centre `0` joined to leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        Graph::new(0..=leaves, (1..=leaves).map(|i| (0, i))).expect("valid star")
    }

    /// Complete tree with the given branching factor and depth (root has
    /// depth 0), labelled breadth-first.
    pub fn tree(branching: usize, depth: usize) -> Self {
        let mut edges = Vec::new();
        let mut level = vec![0usize];
        let mut next_label = 1;
        for _ in 0..depth {
            let mut next = Vec::new();
            for &p in &level {
                for _ in 0..branching {
                    edges.push((p, next_label));
                    next.push(next_label);
                    next_label += 1;
                }
            }
            level = next;
        }
        Graph::new(0..next_label, edges).expect("valid tree")
    }

    fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::RulePrecondition(format!("self-loop on {u}")));
        }
        for w in [u, v] {
            if !self.vertices.contains(&w) {
                return Err(Error::MissingVertex(w));
            }
        }
        self.edges.insert(key(u, v));
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&key(u, v))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (a == v, b == v) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Qubit index of a label.
    pub fn index_of(&self, v: usize) -> Result<usize> {
        self.vertices
            .iter()
            .position(|&w| w == v)
            .ok_or(Error::MissingVertex(v))
    }

    fn require(&self, v: usize) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::MissingVertex(v))
        }
    }

    /// `K_v = X_v prod_{w~v} Z_w` on the cluster-state register.
    pub fn stabilizer(&self, v: usize) -> Result<PauliString> {
        let mut sites = vec![(self.index_of(v)?, Pauli::X)];
        for w in self.neighbors(v) {
            sites.push((self.index_of(w)?, Pauli::Z));
        }
        Ok(PauliString::on(self.n_vertices(), &sites))
    }

    fn without(&self, gone: &[usize]) -> Graph {
        Graph {
            vertices: self.vertices.iter().copied().filter(|v| !gone.contains(v)).collect(),
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|(a, b)| !gone.contains(a) && !gone.contains(b))
                .collect(),
        }
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        let e: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "V={{{}}} E={{{}}}", v.join(","), e.join(","))
    }
}

/// `prod CZ_e |+>^n`.
pub fn graph_cluster_state(g: &Graph) -> Result<StateVector> {
    let n = g.n_vertices();
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::SizeOverflow(n));
    }
    let mut psi = StateVector::zero(n)?;
    for q in 0..n {
        psi = psi.apply(Gate::H, &[q])?;
    }
    for (a, b) in g.edges() {
        psi = psi.apply(Gate::Cz, &[g.index_of(a)?, g.index_of(b)?])?;
    }
    Ok(psi)
}

/// Z measurement: drop `v` and its bonds. Outcome `s` leaves `Z^s` on every
/// former neighbour (see [`z_remove_byproduct`]).
pub fn graph_z_remove(g: &Graph, v: usize) -> Result<Graph> {
    g.require(v)?;
    Ok(g.without(&[v]))
}

/// Labels receiving `Z^s` after Z-measuring `v` with outcome `s`.
pub fn z_remove_byproduct(g: &Graph, v: usize) -> Result<Vec<usize>> {
    g.require(v)?;
    Ok(g.neighbors(v))
}

/// Outer neighbour of `u` on the segment `.. - u - v - ..`.
fn outer(g: &Graph, u: usize, v: usize) -> Option<usize> {
    g.neighbors(u).into_iter().find(|&w| w != v)
}

fn check_segment(g: &Graph, u: usize, v: usize) -> Result<(Option<usize>, Option<usize>)> {
    g.require(u)?;
    g.require(v)?;
    if !g.has_edge(u, v) {
        return Err(Error::RulePrecondition(format!("{u} and {v} are not adjacent")));
    }
    for w in [u, v] {
        if g.degree(w) > 2 {
            return Err(Error::RulePrecondition(format!("vertex {w} is not on a linear segment")));
        }
    }
    let (a, b) = (outer(g, u, v), outer(g, v, u));
    if a.is_some() && a == b {
        return Err(Error::RulePrecondition(format!("{u} and {v} lie on a triangle")));
    }
    Ok((a, b))
}

/// Two adjacent X measurements on a linear segment `a - u - v - b`: drop `u`
/// and `v` and bond `a` with `b` (an existing `a - b` bond is toggled).
pub fn graph_xx_contract(g: &Graph, u: usize, v: usize) -> Result<Graph> {
    let (a, b) = check_segment(g, u, v)?;
    let mut out = g.without(&[u, v]);
    if let (Some(a), Some(b)) = (a, b) {
        let e = key(a, b);
        if !out.edges.remove(&e) {
            out.edges.insert(e);
        }
    }
    Ok(out)
}

/// Byproduct of [`graph_xx_contract`]: X-measuring `u` then `v` with outcomes
/// `(s_u, s_v)` leaves `Z^{s_v}` on `a` and `Z^{s_u}` on `b`. Returned as
/// `(label, which outcome)` with `0` for `s_u` and `1` for `s_v`.
pub fn xx_contract_byproduct(g: &Graph, u: usize, v: usize) -> Result<Vec<(usize, usize)>> {
    let (a, b) = check_segment(g, u, v)?;
    Ok(a.map(|a| (a, 1)).into_iter().chain(b.map(|b| (b, 0))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::c;

    #[test]
    fn two_vertex_line() {
        let g = Graph::line(2);
        let psi = graph_cluster_state(&g).unwrap();
        let expect = StateVector::from_terms([
            ("00", c(1.0, 0.0)),
            ("01", c(1.0, 0.0)),
            ("10", c(1.0, 0.0)),
            ("11", c(-1.0, 0.0)),
        ])
        .unwrap();
        assert!(psi.equal_up_to_phase(&expect));
        let xz: PauliString = "XZ".parse().unwrap();
        assert!((psi.expectation(&xz).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_vertex_is_plus() {
        let psi = graph_cluster_state(&Graph::line(1)).unwrap();
        assert!((psi[0].re - psi[1].re).abs() < 1e-12);
    }

    #[test]
    fn stabilizers_of_graphs() {
        for g in [Graph::line(5), Graph::star(4), Graph::tree(2, 2)] {
            let psi = graph_cluster_state(&g).unwrap();
            for v in g.vertices() {
                let k = g.stabilizer(v).unwrap();
                assert!((psi.expectation(&k).unwrap().re - 1.0).abs() < 1e-10, "{g} K_{v}");
            }
        }
    }

    #[test]
    fn z_removal_examples() {
        let g = Graph::new([1, 2, 3], [(1, 2), (2, 3)]).unwrap();
        let out = graph_z_remove(&g, 2).unwrap();
        assert_eq!(out, Graph::new([1, 3], []).unwrap());

        let iso = Graph::new([1, 2], []).unwrap();
        assert_eq!(graph_z_remove(&iso, 2).unwrap(), Graph::new([1], []).unwrap());

        let star = graph_z_remove(&Graph::star(3), 0).unwrap();
        assert_eq!(star.edges().count(), 0);
        assert_eq!(star.n_vertices(), 3);
        assert_eq!(graph_z_remove(&star, 0), Err(Error::MissingVertex(0)));
    }

    #[test]
    fn xx_contraction_examples() {
        let g = Graph::new([1, 2, 3, 4], [(1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(graph_xx_contract(&g, 2, 3).unwrap(), Graph::new([1, 4], [(1, 4)]).unwrap());

        let g = Graph::new([1, 2, 3], [(1, 2), (2, 3)]).unwrap();
        assert_eq!(graph_xx_contract(&g, 2, 3).unwrap(), Graph::new([1], []).unwrap());

        let seven = Graph::line(7);
        let five = graph_xx_contract(&seven, 2, 3).unwrap();
        assert_eq!(five.n_vertices(), 5);
        assert_eq!(five.edges().count(), 4);
        assert!(five.has_edge(1, 4));
    }

    #[test]
    fn xx_contraction_preconditions() {
        assert!(matches!(graph_xx_contract(&Graph::star(3), 0, 1), Err(Error::RulePrecondition(_))));
        assert!(matches!(graph_xx_contract(&Graph::line(4), 0, 2), Err(Error::RulePrecondition(_))));
        let tri = Graph::new([0, 1, 2], [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(matches!(graph_xx_contract(&tri, 0, 1), Err(Error::RulePrecondition(_))));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::new([0, 1], [(0, 0)]).is_err());
        assert_eq!(Graph::new([0, 1], [(0, 5)]), Err(Error::MissingVertex(5)));
    }
}
