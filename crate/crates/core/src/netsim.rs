//! Acyclic linearly coded networks with unit-capacity edges.
//!
//! Each edge carries one packet (a row over GF(q)). With `K` the
//! edge-to-edge local coding matrix and `M` the injection of source packets,
//! packets satisfy `P = K·P + M·X + Z`, so `P = F·(M·X + Z)` with
//! `F = (I − K)⁻¹` and global coding matrix `C = F·M`. A receiver observing
//! edges `R` gets `Y = C_R·X + F_R·Z`; a wiretapper on `I` gets `C_I·X`.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldTower};
use crate::linalg::{FMatrix, Layer};

pub const MAX_NODES: usize = 4096;
/// Realization works with dense |E| × |E| matrices.
pub const MAX_EDGES: usize = 4096;

/// Directed multigraph with a single source and a list of destinations.
/// Each destination's receiver observes all of its incoming edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub source: usize,
    pub destinations: Vec<usize>,
}

impl Topology {
    pub fn new(
        nodes: usize,
        edges: Vec<(usize, usize)>,
        source: usize,
        destinations: Vec<usize>,
    ) -> Result<Self> {
        let topo = Topology {
            nodes,
            edges,
            source,
            destinations,
        };
        topo.validate()?;
        Ok(topo)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidTopology(msg));
        if self.nodes > MAX_NODES || self.edges.len() > MAX_EDGES {
            return bad(format!(
                "{} nodes and {} edges exceed the {MAX_NODES} / {MAX_EDGES} limits",
                self.nodes,
                self.edges.len()
            ));
        }
        if self.source >= self.nodes {
            return bad(format!("source {} out of range", self.source));
        }
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if a >= self.nodes || b >= self.nodes {
                return bad(format!("edge {i} ({a}, {b}) references a missing node"));
            }
            if a == b {
                return bad(format!("edge {i} is a self loop"));
            }
        }
        if self.destinations.is_empty() {
            return Err(Error::NoReceivers);
        }
        let order = self.node_order()?;
        let mut reach = vec![false; self.nodes];
        reach[self.source] = true;
        for &v in &order {
            if reach[v] {
                for &(a, b) in &self.edges {
                    if a == v {
                        reach[b] = true;
                    }
                }
            }
        }
        for &d in &self.destinations {
            if d >= self.nodes {
                return bad(format!("destination {d} out of range"));
            }
            if d == self.source || !reach[d] {
                return bad(format!("destination {d} is not reachable from the source"));
            }
        }
        Ok(())
    }

    /// Kahn ordering of the nodes.
    pub fn node_order(&self) -> Result<Vec<usize>> {
        let mut indeg = vec![0usize; self.nodes];
        for &(_, b) in &self.edges {
            indeg[b] += 1;
        }
        let mut queue: VecDeque<usize> = (0..self.nodes).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(a, b) in &self.edges {
                if a == v {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        queue.push_back(b);
                    }
                }
            }
        }
        if order.len() != self.nodes {
            return Err(Error::CyclicTopology);
        }
        Ok(order)
    }

    /// Edge indices sorted by the position of their tail node.
    pub fn edge_order(&self) -> Result<Vec<usize>> {
        let order = self.node_order()?;
        let mut pos = vec![0usize; self.nodes];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut idx: Vec<usize> = (0..self.edges.len()).collect();
        idx.sort_by_key(|&e| (pos[self.edges[e].0], e));
        Ok(idx)
    }

    pub fn incoming(&self, node: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].1 == node)
            .collect()
    }

    /// Source connected to a sink by `n` parallel edges.
    pub fn parallel(n: usize) -> Self {
        Topology {
            nodes: 2,
            edges: vec![(0, 1); n],
            source: 0,
            destinations: vec![1],
        }
    }

    /// The classic butterfly: source `0`, relays `1..=4` with bottleneck
    /// edge `3 → 4`, sinks `5` and `6`; min-cut 2 to each sink.
    pub fn butterfly() -> Self {
        Topology {
            nodes: 7,
            edges: vec![
                (0, 1),
                (0, 2),
                (1, 3),
                (2, 3),
                (3, 4),
                (1, 5),
                (2, 6),
                (4, 5),
                (4, 6),
            ],
            source: 0,
            destinations: vec![5, 6],
        }
    }

    /// Butterfly plus a direct source edge into each sink, raising the
    /// min-cut to 3.
    pub fn butterfly_with_direct_links() -> Self {
        let mut topo = Self::butterfly();
        topo.edges.push((0, 5));
        topo.edges.push((0, 6));
        topo
    }
}

/// A realized network: global coding matrix `C` (|E| × n) and error
/// transfer matrix `F` (|E| × |E|), both over GF(q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkInstance {
    topology: Topology,
    tower: Arc<FieldTower>,
    n: usize,
    local: FMatrix,
    coding: FMatrix,
    transfer: FMatrix,
    receivers: Vec<Vec<usize>>,
}

impl NetworkInstance {
    /// Draws every local coefficient uniformly from GF(q) with a ChaCha8
    /// stream seeded by `seed`.
    pub fn realize(
        topology: &Topology,
        tower: &Arc<FieldTower>,
        n: usize,
        seed: u64,
    ) -> Result<Self> {
        topology.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = tower.q();
        let e = topology.edges.len();
        let mut inject = FMatrix::zeros(tower.clone(), Layer::Base, e, n);
        let mut local = FMatrix::zeros(tower.clone(), Layer::Base, e, e);
        for (i, &(tail, _)) in topology.edges.iter().enumerate() {
            if tail == topology.source {
                for j in 0..n {
                    inject.set(i, j, Elem::from_index(rng.gen_range(0..q)));
                }
            }
            for (j, &(_, head)) in topology.edges.iter().enumerate() {
                if head == tail {
                    local.set(i, j, Elem::from_index(rng.gen_range(0..q)));
                }
            }
        }
        Self::from_local_coding(topology, inject, local)
    }

    /// Network with explicit injection `M` (|E| × n) and local coding `K`
    /// (|E| × |E|, `K[i][j]` nonzero only when edge `j` enters the tail of
    /// edge `i`).
    pub fn from_local_coding(topology: &Topology, inject: FMatrix, local: FMatrix) -> Result<Self> {
        topology.validate()?;
        let e = topology.edges.len();
        let tower = inject.tower().clone();
        if local.tower() != &tower {
            return Err(Error::TowerMismatch);
        }
        if inject.layer() != Layer::Base || local.layer() != Layer::Base {
            return Err(Error::LayerMismatch {
                expected: Layer::Base,
                got: Layer::Ext,
            });
        }
        if inject.rows() != e || local.shape() != (e, e) {
            return Err(Error::dim(format!(
                "injection {}x{} and local coding {}x{} for {e} edges",
                inject.rows(),
                inject.cols(),
                local.rows(),
                local.cols()
            )));
        }
        for (i, &(tail, _)) in topology.edges.iter().enumerate() {
            if tail != topology.source && inject.row(i).iter().any(|c| !c.is_zero()) {
                return Err(Error::InvalidTopology(format!(
                    "edge {i} does not leave the source but receives source packets"
                )));
            }
            for (j, &(_, head)) in topology.edges.iter().enumerate() {
                if head != tail && !local.get(i, j).is_zero() {
                    return Err(Error::InvalidTopology(format!(
                        "edge {j} does not feed edge {i}"
                    )));
                }
            }
        }
        let id = FMatrix::identity(tower.clone(), Layer::Base, e);
        let transfer = id.sub(&local)?.invert().map_err(|_| Error::CyclicTopology)?;
        let coding = transfer.mul(&inject)?;
        let receivers = topology
            .destinations
            .iter()
            .map(|&d| topology.incoming(d))
            .collect();
        Ok(NetworkInstance {
            topology: topology.clone(),
            tower,
            n: inject.cols(),
            local,
            coding,
            transfer,
            receivers,
        })
    }

    /// `n` parallel edges with identity coding: `C = I`, `F = I`.
    pub fn wiretap_ii(tower: &Arc<FieldTower>, n: usize) -> Result<Self> {
        let topo = Topology::parallel(n);
        let inject = FMatrix::identity(tower.clone(), Layer::Base, n);
        let local = FMatrix::zeros(tower.clone(), Layer::Base, n, n);
        Self::from_local_coding(&topo, inject, local)
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.topology.edges.len()
    }

    pub fn local_coding(&self) -> &FMatrix {
        &self.local
    }

    pub fn coding_matrix(&self) -> &FMatrix {
        &self.coding
    }

    pub fn transfer_matrix(&self) -> &FMatrix {
        &self.transfer
    }

    pub fn receivers(&self) -> &[Vec<usize>] {
        &self.receivers
    }

    fn check_edges(&self, edges: &[usize]) -> Result<()> {
        match edges.iter().find(|&&e| e >= self.edge_count()) {
            Some(&e) => Err(Error::UnknownEdge(e)),
            None => Ok(()),
        }
    }

    fn receiver(&self, r: usize) -> Result<&[usize]> {
        self.receivers
            .get(r)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidParameters(format!("no receiver {r}")))
    }

    /// `C_R` for receiver `r`.
    pub fn receiver_coding(&self, r: usize) -> Result<FMatrix> {
        self.coding.select_rows(self.receiver(r)?)
    }

    /// `F_R` for receiver `r`.
    pub fn receiver_transfer(&self, r: usize) -> Result<FMatrix> {
        self.transfer.select_rows(self.receiver(r)?)
    }

    /// `C_I` for a set of edges.
    pub fn wiretap_coding(&self, edges: &[usize]) -> Result<FMatrix> {
        self.check_edges(edges)?;
        self.coding.select_rows(edges)
    }

    /// `ρ = n − min_R rank C_R`.
    pub fn rank_deficiency(&self) -> Result<usize> {
        if self.receivers.is_empty() {
            return Err(Error::NoReceivers);
        }
        let min_rank = (0..self.receivers.len())
            .map(|r| self.receiver_coding(r).map(|c| c.rank()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .unwrap_or(0);
        Ok(self.n - min_rank)
    }

    /// `Y = C_R·X + F_R·Z` for a GF(q) packet matrix `X` (n rows).
    pub fn transmit(&self, x: &FMatrix, action: &AdversaryAction, r: usize) -> Result<FMatrix> {
        if x.rows() != self.n {
            return Err(Error::dim(format!("{} source packets, expected {}", x.rows(), self.n)));
        }
        let z = &action.injection;
        if z.shape() != (self.edge_count(), x.cols()) {
            return Err(Error::dim(format!(
                "injection {}x{} for {} edges of width {}",
                z.rows(),
                z.cols(),
                self.edge_count(),
                x.cols()
            )));
        }
        let clean = self.receiver_coding(r)?.mul(x)?;
        clean.add(&self.receiver_transfer(r)?.mul(z)?)
    }

    /// `W = C_I·X`.
    pub fn eavesdrop(&self, x: &FMatrix, edges: &[usize]) -> Result<FMatrix> {
        self.wiretap_coding(edges)?.mul(x)
    }
}

/// Wiretap set and per-edge injected error packets (|E| × width over GF(q)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryAction {
    pub wiretap: Vec<usize>,
    pub injection: FMatrix,
}

impl AdversaryAction {
    /// Checks `|I| ≤ μ` and that at most `t` edges carry a nonzero error.
    pub fn new(wiretap: Vec<usize>, injection: FMatrix, mu: usize, t: usize) -> Result<Self> {
        if wiretap.len() > mu {
            return Err(Error::BudgetExceeded(format!(
                "{} wiretapped edges for μ = {mu}",
                wiretap.len()
            )));
        }
        let action = AdversaryAction { wiretap, injection };
        if action.weight() > t {
            return Err(Error::BudgetExceeded(format!(
                "{} corrupted edges for t = {t}",
                action.weight()
            )));
        }
        Ok(action)
    }

    /// No wiretap and no injection.
    pub fn passive(tower: &Arc<FieldTower>, edges: usize, width: usize) -> Self {
        AdversaryAction {
            wiretap: Vec::new(),
            injection: FMatrix::zeros(tower.clone(), Layer::Base, edges, width),
        }
    }

    /// Number of nonzero rows of `Z`.
    pub fn weight(&self) -> usize {
        (0..self.injection.rows())
            .filter(|&i| self.injection.row(i).iter().any(|e| !e.is_zero()))
            .count()
    }
}

/// Keeps a maximal independent set of rows of `C_R` (first pivots of a row
/// reduction) and the matching rows of `Y`, padded with zero rows to `n`.
pub fn receiver_reduce(c_r: &FMatrix, y: &FMatrix) -> Result<(FMatrix, FMatrix)> {
    if c_r.rows() != y.rows() {
        return Err(Error::dim(format!(
            "{} coding rows against {} received rows",
            c_r.rows(),
            y.rows()
        )));
    }
    let n = c_r.cols();
    let (_, pivots) = c_r.transpose().rref();
    let a = c_r.select_rows(&pivots)?;
    let ys = y.select_rows(&pivots)?;
    let pad = n - pivots.len();
    let a = a.vstack(&FMatrix::zeros(c_r.tower().clone(), c_r.layer(), pad, n))?;
    let ys = ys.vstack(&FMatrix::zeros(y.tower().clone(), y.layer(), pad, y.cols()))?;
    Ok((a, ys))
}

/// `[I X]`: prepends an identity header so receivers learn `C_R`.
pub fn lift_headers(x: &FMatrix) -> Result<FMatrix> {
    FMatrix::identity(x.tower().clone(), x.layer(), x.rows()).hstack(x)
}
