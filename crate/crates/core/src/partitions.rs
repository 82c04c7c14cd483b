//! Partitions, Maya diagrams, the charge/core/quotient machinery, node
//! statistics, and the column/row strip orders.
//!
//! Conventions. A node of a partition is a pair (a, b) with 1 <= a <=
//! lambda_b, so b indexes parts ("rows" in the French picture) and a runs
//! along a part. The content of (a, b) is b - a and its color is the
//! content mod ell. This is the transpose of the more common convention;
//! it is forced by the character chi(node) = q^(a-1) t^(b-1) used in the
//! Fock-space matrix elements, so it is adopted throughout.
//!
//! A Maya diagram is a two-coloring of Z with black beads far right
//! (negative indices) and white beads far left; it is stored as the two
//! finite exception sets relative to the vacuum. The black positions of
//! m(lambda) are exactly the beta numbers of the transposed partition,
//! { tlambda_k - k : k >= 1 }, which is the reading consistent with the
//! slope construction.

use crate::scalars::Scalar;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Errors from the combinatorial layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionError {
    /// from_maya on a diagram whose charge is not zero.
    NonzeroCharge(i64),
    /// combine() given a core that still contains an ell-strip.
    NotACore,
    /// column_order/row_order found a tie, which the strict content
    /// inequalities rule out; indicates corrupted input.
    AmbiguousOrder,
}

impl fmt::Display for PartitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionError::NonzeroCharge(c) => {
                write!(f, "not a charge-zero diagram (charge {})", c)
            }
            PartitionError::NotACore => write!(f, "not a core"),
            PartitionError::AmbiguousOrder => write!(f, "ambiguous strip order"),
        }
    }
}

impl std::error::Error for PartitionError {}

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

/// A partition stored as weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    pub fn new(mut parts: Vec<u64>) -> Partition {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Partition {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Part b (1-based); zero beyond the length.
    pub fn part(&self, b: usize) -> u64 {
        if b == 0 || b > self.parts.len() {
            0
        } else {
            self.parts[b - 1]
        }
    }

    pub fn transpose(&self) -> Partition {
        if self.parts.is_empty() {
            return Partition::empty();
        }
        let cols = self.parts[0] as usize;
        let mut t = Vec::with_capacity(cols);
        for a in 1..=cols {
            t.push(self.parts.iter().filter(|&&p| p >= a as u64).count() as u64);
        }
        Partition { parts: t }
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other
            .parts
            .iter()
            .enumerate()
            .all(|(i, &p)| self.part(i + 1) >= p)
    }

    /// All nodes (a, b) of the Young diagram.
    pub fn nodes(&self) -> Vec<Node> {
        let mut out = Vec::new();
        for (i, &p) in self.parts.iter().enumerate() {
            let b = (i + 1) as i64;
            for a in 1..=p as i64 {
                out.push(Node { a, b });
            }
        }
        out
    }

    /// Arm length of a node: lambda_b - a.
    pub fn arm(&self, n: Node) -> i64 {
        self.part(n.b as usize) as i64 - n.a
    }

    /// Leg length of a node: tlambda_a - b.
    pub fn leg(&self, n: Node) -> i64 {
        self.parts.iter().filter(|&&p| p >= n.a as u64).count() as i64 - n.b
    }

    pub fn hook(&self, n: Node) -> i64 {
        self.arm(n) + self.leg(n) + 1
    }

    /// True when no hook length is divisible by ell.
    pub fn is_core(&self, ell: u64) -> bool {
        self.nodes().iter().all(|&n| self.hook(n) % ell as i64 != 0)
    }

    /// Addable nodes, sorted by content.
    pub fn addable_nodes(&self) -> Vec<Node> {
        let mut out = Vec::new();
        let rows = self.parts.len();
        for b in 1..=rows + 1 {
            let cur = self.part(b);
            let above = if b == 1 { u64::MAX } else { self.part(b - 1) };
            if cur < above {
                out.push(Node {
                    a: cur as i64 + 1,
                    b: b as i64,
                });
            }
        }
        out.sort_by_key(|n| n.content());
        out
    }

    /// Removable nodes, sorted by content.
    pub fn removable_nodes(&self) -> Vec<Node> {
        let mut out = Vec::new();
        for b in 1..=self.parts.len() {
            let cur = self.part(b);
            let below = self.part(b + 1);
            if cur > below {
                out.push(Node {
                    a: cur as i64,
                    b: b as i64,
                });
            }
        }
        out.sort_by_key(|n| n.content());
        out
    }

    /// Result of adding a node (must be addable).
    pub fn with_node(&self, n: Node) -> Partition {
        let mut parts = self.parts.clone();
        let b = n.b as usize;
        if b == parts.len() + 1 {
            parts.push(1);
            assert_eq!(n.a, 1, "node not addable");
        } else {
            assert_eq!(parts[b - 1] + 1, n.a as u64, "node not addable");
            parts[b - 1] += 1;
        }
        Partition { parts }
    }

    pub fn to_display_string(&self) -> String {
        if self.parts.is_empty() {
            "-".to_string()
        } else {
            self.parts
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// Parse a comma-separated part list; empty or "-" is the empty partition.
    pub fn parse(s: &str) -> Option<Partition> {
        let s = s.trim();
        if s.is_empty() || s == "-" || s == "0" {
            return Some(Partition::empty());
        }
        let mut parts = Vec::new();
        for tok in s.split(',') {
            parts.push(tok.trim().parse::<u64>().ok()?);
        }
        Some(Partition::new(parts))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_display_string())
    }
}

/// A node (a, b): column a within row b, 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Node {
    pub a: i64,
    pub b: i64,
}

impl Node {
    /// Content b - a; increases to the northwest.
    pub fn content(&self) -> i64 {
        self.b - self.a
    }

    /// Color: content mod ell, in 0..ell.
    pub fn color(&self, ell: u64) -> u64 {
        self.content().rem_euclid(ell as i64) as u64
    }

    /// Character chi = q^(a-1) t^(b-1).
    pub fn chi(&self) -> Scalar {
        &Scalar::q_pow(self.a - 1) * &Scalar::t_pow(self.b - 1)
    }
}

/// Dominance order: all partial sums of mu bounded by those of lambda.
/// False when the sizes differ.
pub fn dominance_leq(mu: &Partition, lam: &Partition) -> bool {
    if mu.size() != lam.size() {
        return false;
    }
    let mut sm = 0i64;
    let mut sl = 0i64;
    for i in 0..mu.len().max(lam.len()) {
        sm += mu.part(i + 1) as i64;
        sl += lam.part(i + 1) as i64;
        if sm > sl {
            return false;
        }
    }
    true
}

/// mu <=_ell lambda: same size, same ell-core, and dominance mu <= lambda.
pub fn leq_ell(mu: &Partition, lam: &Partition, ell: u64) -> bool {
    if mu.size() != lam.size() {
        return false;
    }
    if !dominance_leq(mu, lam) {
        return false;
    }
    let (_, cm, _) = core_quotient(mu, ell);
    let (_, cl, _) = core_quotient(lam, ell);
    cm == cl
}

/// All partitions of n, in lexicographically decreasing part order.
pub fn partitions_of(n: u64) -> Vec<Partition> {
    fn rec(n: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition {
                parts: cur.clone(),
            });
            return;
        }
        let top = max.min(n);
        for p in (1..=top).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Maya diagrams
// ---------------------------------------------------------------------------

/// Maya diagram stored as exception sets relative to the vacuum:
/// black beads at j >= 0 and white beads at j < 0.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MayaDiagram {
    pub black_exceptions: BTreeSet<i64>,
    pub white_exceptions: BTreeSet<i64>,
}

impl MayaDiagram {
    pub fn vacuum() -> MayaDiagram {
        MayaDiagram::default()
    }

    /// The bead at j: true = black (m(j) = 1), false = white.
    pub fn is_black(&self, j: i64) -> bool {
        if j >= 0 {
            self.black_exceptions.contains(&j)
        } else {
            !self.white_exceptions.contains(&j)
        }
    }

    pub fn set(&mut self, j: i64, black: bool) {
        if j >= 0 {
            if black {
                self.black_exceptions.insert(j);
            } else {
                self.black_exceptions.remove(&j);
            }
        } else if black {
            self.white_exceptions.remove(&j);
        } else {
            self.white_exceptions.insert(j);
        }
    }

    /// Charge: #white exceptions minus #black exceptions.
    pub fn charge(&self) -> i64 {
        self.white_exceptions.len() as i64 - self.black_exceptions.len() as i64
    }

}

/// Maya diagram of a partition: black positions are the beta numbers of
/// the transpose, { tlambda_k - k }.
pub fn to_maya(lam: &Partition) -> MayaDiagram {
    let t = lam.transpose();
    let mut m = MayaDiagram::vacuum();
    for (k, &tp) in t.parts().iter().enumerate() {
        let beta = tp as i64 - (k as i64 + 1);
        // vacuum has black at -1, -2, ...; record the deviations
        if beta >= 0 {
            m.set(beta, true);
        }
    }
    // positions -1..-len(t) not hit by a beta number become white
    let betas: BTreeSet<i64> = t
        .parts()
        .iter()
        .enumerate()
        .map(|(k, &tp)| tp as i64 - (k as i64 + 1))
        .collect();
    for j in 1..=t.len() as i64 {
        if !betas.contains(&-j) {
            m.set(-j, false);
        }
    }
    m
}

/// Inverse of [`to_maya`]; requires charge zero.
pub fn from_maya(m: &MayaDiagram) -> Result<Partition, PartitionError> {
    let c = m.charge();
    if c != 0 {
        return Err(PartitionError::NonzeroCharge(c));
    }
    // Below the deepest white exception the diagram is the black sea and
    // alignment with the vacuum is automatic (charge zero), so collecting
    // black positions down to that point suffices.
    let j_min = m
        .white_exceptions
        .iter()
        .next()
        .cloned()
        .unwrap_or(0)
        .min(0);
    let mut positions: Vec<i64> = m.black_exceptions.iter().rev().cloned().collect();
    for j in (j_min..=-1).rev() {
        if m.is_black(j) {
            positions.push(j);
        }
    }
    let mut tparts = Vec::new();
    for (k, beta) in positions.iter().enumerate() {
        let v = beta + (k as i64 + 1);
        debug_assert!(v >= 0, "charge-zero diagram yields nonnegative parts");
        if v > 0 {
            tparts.push(v as u64);
        }
    }
    Ok(Partition::new(tparts).transpose())
}

// ---------------------------------------------------------------------------
// Core-quotient decomposition
// ---------------------------------------------------------------------------

/// Maya subdiagram i of a total diagram: j -> m(i + j*ell), stored again
/// as a Maya diagram in the subdiagram indexing.
fn subdiagram(m: &MayaDiagram, i: u64, ell: u64) -> MayaDiagram {
    let ell = ell as i64;
    let i = i as i64;
    let mut out = MayaDiagram::vacuum();
    // Only finitely many total positions deviate from the vacuum.
    let lo = m
        .white_exceptions
        .iter()
        .next()
        .cloned()
        .unwrap_or(0)
        .min(0);
    let hi = m
        .black_exceptions
        .iter()
        .next_back()
        .cloned()
        .unwrap_or(-1)
        .max(-1);
    let jlo = (lo - i).div_euclid(ell) - 1;
    let jhi = (hi - i).div_euclid(ell) + 1;
    for j in jlo..=jhi {
        out.set(j, m.is_black(i + j * ell));
    }
    out
}

/// Shift the index of a Maya diagram by c: new(j) = old(j - c).
fn shift(m: &MayaDiagram, c: i64) -> MayaDiagram {
    let mut out = MayaDiagram::vacuum();
    let lo = m
        .white_exceptions
        .iter()
        .next()
        .cloned()
        .unwrap_or(0)
        .min(0)
        - c.abs()
        - 1;
    let hi = m
        .black_exceptions
        .iter()
        .next_back()
        .cloned()
        .unwrap_or(-1)
        .max(-1)
        + c.abs()
        + 1;
    for j in lo..=hi {
        out.set(j + c, m.is_black(j));
    }
    out
}

/// Core-quotient decomposition: the ell-core, the charge vector of the
/// subdiagrams, and the ell-quotient.
pub fn core_quotient(lam: &Partition, ell: u64) -> (Partition, Vec<i64>, Vec<Partition>) {
    assert!(ell >= 1);
    let m = to_maya(lam);
    let mut charges = Vec::with_capacity(ell as usize);
    let mut quot = Vec::with_capacity(ell as usize);
    for i in 0..ell {
        let mi = subdiagram(&m, i, ell);
        let ci = mi.charge();
        charges.push(ci);
        let shifted = shift(&mi, ci);
        quot.push(from_maya(&shifted).expect("shifted subdiagram has charge zero"));
    }
    // The core reverts each subdiagram to its shifted vacuum: in the
    // original subdiagram indexing, white for j >= -c_i.
    let mut core_m = MayaDiagram::vacuum();
    let max_charge = charges.iter().map(|c| c.abs()).max().unwrap_or(0);
    let bound = lam.size() as i64 + ell as i64 * (max_charge + 2) + 2;
    for i in 0..ell as i64 {
        let ci = charges[i as usize];
        let ell = ell as i64;
        let mut j = (-bound - i).div_euclid(ell);
        while i + j * ell <= bound {
            core_m.set(i + j * ell, j < -ci);
            j += 1;
        }
    }
    let core = from_maya(&core_m).expect("total charge is zero");
    (core, charges, quot)
}

/// The ell-core determined by a charge vector (must sum to zero): each
/// subdiagram is the vacuum shifted by its charge.
pub fn core_from_charges(charges: &[i64], ell: u64) -> Partition {
    assert_eq!(charges.len(), ell as usize);
    assert_eq!(charges.iter().sum::<i64>(), 0, "charges must sum to zero");
    let max_charge = charges.iter().map(|c| c.abs()).max().unwrap_or(0);
    let bound = ell as i64 * (max_charge + 2) + 2;
    let mut m = MayaDiagram::vacuum();
    for (i, &ci) in charges.iter().enumerate() {
        let ell = ell as i64;
        let i = i as i64;
        let mut j = (-bound - i).div_euclid(ell);
        while i + j * ell <= bound {
            m.set(i + j * ell, j < -ci);
            j += 1;
        }
    }
    from_maya(&m).expect("zero-sum charges give a charge-zero diagram")
}

/// Inverse of [`core_quotient`].
pub fn combine(
    core: &Partition,
    quot: &[Partition],
    ell: u64,
) -> Result<Partition, PartitionError> {
    if !core.is_core(ell) {
        return Err(PartitionError::NotACore);
    }
    let (_, charges, _) = core_quotient(core, ell);
    let mut m = to_maya(core);
    for (i, q) in quot.iter().enumerate() {
        let ci = charges[i];
        let qm = to_maya(q);
        // Un-shift the quotient diagram by c_i and splice it in at stride ell.
        let lo = qm
            .white_exceptions
            .iter()
            .next()
            .cloned()
            .unwrap_or(0)
            .min(0)
            - 1;
        let hi = qm
            .black_exceptions
            .iter()
            .next_back()
            .cloned()
            .unwrap_or(-1)
            .max(-1)
            + 1;
        for j in lo..=hi {
            let total_index = i as i64 + (j - ci) * ell as i64;
            m.set(total_index, qm.is_black(j));
        }
    }
    from_maya(&m)
}

/// Addable and removable nodes of color i, each sorted by content.
pub fn corners(lam: &Partition, ell: u64, color: u64) -> (Vec<Node>, Vec<Node>) {
    let addable = lam
        .addable_nodes()
        .into_iter()
        .filter(|n| n.color(ell) == color)
        .collect();
    let removable = lam
        .removable_nodes()
        .into_iter()
        .filter(|n| n.color(ell) == color)
        .collect();
    (addable, removable)
}

// ---------------------------------------------------------------------------
// MultiPartition
// ---------------------------------------------------------------------------

/// An ell-tuple of partitions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct MultiPartition {
    pub components: Vec<Partition>,
}

impl MultiPartition {
    pub fn new(components: Vec<Partition>) -> MultiPartition {
        MultiPartition { components }
    }

    pub fn empty(ell: u64) -> MultiPartition {
        MultiPartition {
            components: vec![Partition::empty(); ell as usize],
        }
    }

    pub fn ell(&self) -> u64 {
        self.components.len() as u64
    }

    pub fn size(&self) -> u64 {
        self.components.iter().map(|p| p.size()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.iter().all(|p| p.is_empty())
    }

    pub fn to_display_string(&self) -> String {
        format!(
            "[{}]",
            self.components
                .iter()
                .map(|p| p.to_display_string())
                .collect::<Vec<_>>()
                .join(" | ")
        )
    }
}

/// All ell-multipartitions of n.
pub fn multipartitions_of(n: u64, ell: u64) -> Vec<MultiPartition> {
    fn rec(n: u64, comps_left: u64, cur: &mut Vec<Partition>, out: &mut Vec<MultiPartition>) {
        if comps_left == 0 {
            if n == 0 {
                out.push(MultiPartition {
                    components: cur.clone(),
                });
            }
            return;
        }
        for k in 0..=n {
            for p in partitions_of(k) {
                cur.push(p);
                rec(n - k, comps_left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, ell, &mut Vec::new(), &mut out);
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Column and row strip orders
// ---------------------------------------------------------------------------

/// One strip addition in the replay of a partition from its core:
/// the quotient component, the column/row length in the quotient, and the
/// contents of the strip's initial and final nodes in the total partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StripStep {
    pub component: u64,
    pub length: u64,
    pub initial_content: i64,
    pub final_content: i64,
}

/// The left-to-right order on columns of quot(lambda).
///
/// In the Maya picture the k-th column (length n_k, decreasing) of
/// component i moves the black bead at subdiagram index -c_i - k to
/// -c_i - k + n_k; the strip's initial node content is the landing spot
/// in the total diagram and the order sorts landing spots in decreasing
/// order. Initial contents are then strictly decreasing, which implies
/// the defining property that the initial node of an earlier strip has
/// content strictly greater than the final node of any later strip.
pub fn column_order(lam: &Partition, ell: u64) -> Result<Vec<StripStep>, PartitionError> {
    let (_, charges, quot) = core_quotient(lam, ell);
    let mut steps = Vec::new();
    for (i, q) in quot.iter().enumerate() {
        let ci = charges[i];
        let cols = q.transpose();
        for (k0, &len) in cols.parts().iter().enumerate() {
            let k = k0 as i64 + 1;
            let j_start = i as i64 + (-ci - k) * ell as i64;
            let j_land = j_start + len as i64 * ell as i64;
            steps.push(StripStep {
                component: i as u64,
                length: len,
                initial_content: j_land,
                final_content: j_start + 1,
            });
        }
    }
    steps.sort_by_key(|s| std::cmp::Reverse(s.initial_content));
    for pair in steps.windows(2) {
        if pair[0].initial_content == pair[1].initial_content {
            return Err(PartitionError::AmbiguousOrder);
        }
    }
    // The sorted order must satisfy the content chain on every pair.
    for r in 0..steps.len() {
        for s in r + 1..steps.len() {
            if steps[r].initial_content <= steps[s].final_content {
                return Err(PartitionError::AmbiguousOrder);
            }
        }
    }
    Ok(steps)
}

/// The right-to-left order on rows of quot(lambda).
///
/// The k-th row (length m_k, decreasing) of component i moves the white
/// bead at subdiagram index -c_i + k - 1 down by m_k steps; final node
/// contents are strictly increasing along the order.
pub fn row_order(lam: &Partition, ell: u64) -> Result<Vec<StripStep>, PartitionError> {
    let (_, charges, quot) = core_quotient(lam, ell);
    let mut steps = Vec::new();
    for (i, q) in quot.iter().enumerate() {
        let ci = charges[i];
        for (k0, &len) in q.parts().iter().enumerate() {
            let k = k0 as i64 + 1;
            let j_top = i as i64 + (-ci + k - 1) * ell as i64;
            let j_land = j_top - len as i64 * ell as i64;
            steps.push(StripStep {
                component: i as u64,
                length: len,
                initial_content: j_top,
                final_content: j_land + 1,
            });
        }
    }
    steps.sort_by_key(|s| s.final_content);
    for pair in steps.windows(2) {
        if pair[0].final_content == pair[1].final_content {
            return Err(PartitionError::AmbiguousOrder);
        }
    }
    for r in 0..steps.len() {
        for s in r + 1..steps.len() {
            if steps[r].final_content >= steps[s].final_content {
                return Err(PartitionError::AmbiguousOrder);
            }
        }
    }
    Ok(steps)
}

/// Replay a column order by repeatedly adding one column to the stated
/// quotient component; yields the partial partitions after each step.
pub fn replay_column_order(
    lam: &Partition,
    ell: u64,
    steps: &[StripStep],
) -> Result<Vec<Partition>, PartitionError> {
    let (core, _, _) = core_quotient(lam, ell);
    let mut quots: Vec<BTreeMap<u64, u64>> = vec![BTreeMap::new(); ell as usize];
    let mut out = Vec::new();
    for st in steps {
        // add a column of length st.length to component st.component
        let q = &mut quots[st.component as usize];
        *q.entry(st.length).or_insert(0) += 1;
        let quot: Vec<Partition> = quots
            .iter()
            .map(|cols| {
                // columns-with-multiplicity back to a partition
                let mut col_list: Vec<u64> = Vec::new();
                for (&len, &mult) in cols.iter() {
                    for _ in 0..mult {
                        col_list.push(len);
                    }
                }
                Partition::new(col_list).transpose()
            })
            .collect();
        out.push(combine(&core, &quot, ell)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u64]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn dominance_basics() {
        assert!(dominance_leq(&p(&[2, 2]), &p(&[3, 1])));
        assert!(!dominance_leq(&p(&[3, 1]), &p(&[2, 2])));
        let l = p(&[4, 2, 1]);
        assert!(dominance_leq(&l, &l));
        // different sizes are incomparable
        assert!(!dominance_leq(&p(&[1]), &p(&[2])));
    }

    #[test]
    fn maya_anchor_442() {
        // Fig. 2 of the Young-Maya correspondence
        let m = to_maya(&p(&[4, 4, 2]));
        assert_eq!(
            m.black_exceptions.iter().cloned().collect::<Vec<_>>(),
            vec![1, 2]
        );
        assert_eq!(
            m.white_exceptions.iter().cloned().collect::<Vec<_>>(),
            vec![-4, -3]
        );
        assert_eq!(m.charge(), 0);
    }

    #[test]
    fn maya_single_box() {
        let m = to_maya(&p(&[1]));
        assert!(m.is_black(0));
        assert!(!m.is_black(-1));
        assert_eq!(m.black_exceptions.len(), 1);
        assert_eq!(m.white_exceptions.len(), 1);
    }

    /// Oracle: slope reading of the boundary via node counts per content.
    /// For j >= 0 the bead is black exactly when n_{j+1} - n_j = -1, and
    /// for j < 0 white exactly when n_{j+1} - n_j = 1.
    fn maya_by_slopes(lam: &Partition) -> MayaDiagram {
        let mut counts: BTreeMap<i64, i64> = BTreeMap::new();
        for n in lam.nodes() {
            *counts.entry(n.content()).or_insert(0) += 1;
        }
        let nj = |j: i64| counts.get(&j).cloned().unwrap_or(0);
        let bound = lam.size() as i64 + 2;
        let mut m = MayaDiagram::vacuum();
        for j in -bound..=bound {
            let diff = nj(j + 1) - nj(j);
            let black = if j >= 0 { diff == -1 } else { diff != 1 };
            m.set(j, black);
        }
        m
    }

    #[test]
    fn maya_matches_slope_oracle() {
        for n in 0..=8u64 {
            for lam in partitions_of(n) {
                assert_eq!(to_maya(&lam), maya_by_slopes(&lam), "lam={:?}", lam);
            }
        }
    }

    #[test]
    fn maya_round_trip() {
        for n in 0..=10u64 {
            for lam in partitions_of(n) {
                assert_eq!(from_maya(&to_maya(&lam)).unwrap(), lam);
            }
        }
        // explicit anchors
        assert_eq!(from_maya(&to_maya(&p(&[4, 4, 2]))).unwrap(), p(&[4, 4, 2]));
        assert_eq!(
            from_maya(&to_maya(&p(&[5, 3, 3, 1]))).unwrap(),
            p(&[5, 3, 3, 1])
        );
        assert_eq!(from_maya(&MayaDiagram::vacuum()).unwrap(), Partition::empty());
    }

    #[test]
    fn from_maya_rejects_nonzero_charge() {
        let mut m = MayaDiagram::vacuum();
        m.set(0, true);
        assert!(matches!(
            from_maya(&m),
            Err(PartitionError::NonzeroCharge(-1))
        ));
    }

    #[test]
    fn core_quotient_anchor_442() {
        // Figs. 1 and 3: core (3,1); quotient components (empty, empty, (2)).
        let (core, charges, quot) = core_quotient(&p(&[4, 4, 2]), 3);
        assert_eq!(core, p(&[3, 1]));
        assert_eq!(charges, vec![1, -1, 0]);
        assert_eq!(quot.iter().map(|q| q.size()).sum::<u64>(), 2);
        assert_eq!(quot[0], Partition::empty());
        assert_eq!(quot[1], Partition::empty());
        // round trip fixes the nonempty component
        assert_eq!(combine(&core, &quot, 3).unwrap(), p(&[4, 4, 2]));
    }

    #[test]
    fn core_quotient_anchor_442222() {
        // Fig. 6: quot = (empty, (1), (2,1)), core (3,1)
        let (core, _, quot) = core_quotient(&p(&[4, 4, 2, 2, 2, 2]), 3);
        assert_eq!(core, p(&[3, 1]));
        assert_eq!(
            quot,
            vec![Partition::empty(), p(&[1]), p(&[2, 1])]
        );
        assert_eq!(
            combine(&core, &[Partition::empty(), p(&[1]), p(&[2, 1])], 3).unwrap(),
            p(&[4, 4, 2, 2, 2, 2])
        );
    }

    #[test]
    fn core_of_31_is_itself() {
        let (core, _, quot) = core_quotient(&p(&[3, 1]), 3);
        assert_eq!(core, p(&[3, 1]));
        assert!(quot.iter().all(|q| q.is_empty()));
        assert!(p(&[3, 1]).is_core(3));
        // hooks of (3,1) are {4,2,1,1}
        let hooks: Vec<i64> = p(&[3, 1]).nodes().iter().map(|&n| p(&[3, 1]).hook(n)).collect();
        let mut sorted = hooks.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 1, 2, 4]);
    }

    #[test]
    fn combine_rejects_non_core() {
        let res = combine(&p(&[3]), &[Partition::empty()], 3);
        assert!(matches!(res, Err(PartitionError::NotACore)));
        assert_eq!(
            combine(&Partition::empty(), &vec![Partition::empty(); 3], 3).unwrap(),
            Partition::empty()
        );
    }

    #[test]
    fn round_trips_to_size_20() {
        for ell in 1..=5u64 {
            for n in 0..=20u64 {
                for lam in partitions_of(n) {
                    let (core, _, quot) = core_quotient(&lam, ell);
                    assert_eq!(
                        lam.size(),
                        core.size() + ell * quot.iter().map(|q| q.size()).sum::<u64>()
                    );
                    assert!(core.is_core(ell));
                    assert_eq!(combine(&core, &quot, ell).unwrap(), lam);
                }
            }
        }
    }

    #[test]
    fn corners_examples() {
        let (add, rem) = corners(&Partition::empty(), 3, 0);
        assert_eq!(add, vec![Node { a: 1, b: 1 }]);
        assert!(rem.is_empty());

        let (add, rem) = corners(&p(&[1]), 3, 1);
        assert_eq!(add, vec![Node { a: 1, b: 2 }]);
        assert!(rem.is_empty());

        // full corner table of (4,4,2) against a boundary scan
        let lam = p(&[4, 4, 2]);
        for color in 0..3u64 {
            let (add, rem) = corners(&lam, 3, color);
            let mut add2: Vec<Node> = Vec::new();
            let mut rem2: Vec<Node> = Vec::new();
            for b in 1..=(lam.len() as i64 + 1) {
                for a in 1..=(lam.part(1) as i64 + 1) {
                    let n = Node { a, b };
                    if n.color(3) != color {
                        continue;
                    }
                    let inside = a <= lam.part(b as usize) as i64;
                    if !inside {
                        let mut bigger = lam.clone();
                        let addable = b as usize <= lam.len() + 1
                            && a == lam.part(b as usize) as i64 + 1
                            && (b == 1 || lam.part(b as usize - 1) as i64 >= a);
                        if addable {
                            bigger = bigger.with_node(n);
                            assert!(bigger.size() == lam.size() + 1);
                            add2.push(n);
                        }
                    } else {
                        let removable = a == lam.part(b as usize) as i64
                            && lam.part(b as usize + 1) < a as u64;
                        if removable {
                            rem2.push(n);
                        }
                    }
                }
            }
            add2.sort_by_key(|n| n.content());
            rem2.sort_by_key(|n| n.content());
            assert_eq!(add, add2, "addable color {}", color);
            assert_eq!(rem, rem2, "removable color {}", color);
        }
    }

    #[test]
    fn leq_ell_examples() {
        // (2,1) and (3) both have empty 3-core
        assert!(leq_ell(&p(&[2, 1]), &p(&[3]), 3));
        let l = p(&[4, 2]);
        assert!(leq_ell(&l, &l, 3));
        assert!(leq_ell(&p(&[1, 1, 1]), &p(&[3]), 1));
    }

    #[test]
    fn column_order_anchor() {
        // Fig. 6: (4,4,2,2,2,2) at ell=3 adds columns in the order
        // (component 2, length 2), (component 1, length 1), (component 2, length 1)
        let lam = p(&[4, 4, 2, 2, 2, 2]);
        let steps = column_order(&lam, 3).unwrap();
        let summary: Vec<(u64, u64)> = steps.iter().map(|s| (s.component, s.length)).collect();
        assert_eq!(summary, vec![(2, 2), (1, 1), (2, 1)]);
        // replay reproduces the Fig. 6 intermediate shapes
        let partials = replay_column_order(&lam, 3, &steps).unwrap();
        assert_eq!(
            partials,
            vec![p(&[3, 2, 2, 1, 1, 1]), p(&[3, 2, 2, 2, 2, 2]), lam.clone()]
        );
    }

    #[test]
    fn column_order_replay_strip_shapes() {
        // Each replay step must add a strip of length * ell contiguous
        // nodes whose initial node has the component's color.
        for n in 0..=9u64 {
            for lam in partitions_of(n) {
                let steps = column_order(&lam, 3).unwrap();
                let partials = replay_column_order(&lam, 3, &steps).unwrap();
                let mut prev = core_quotient(&lam, 3).0;
                for (st, cur) in steps.iter().zip(partials.iter()) {
                    assert_eq!(cur.size(), prev.size() + 3 * st.length);
                    // the added nodes span consecutive contents
                    let mut contents: Vec<i64> = cur
                        .nodes()
                        .into_iter()
                        .filter(|nd| {
                            nd.a > prev.part(nd.b as usize) as i64
                        })
                        .map(|nd| nd.content())
                        .collect();
                    contents.sort_unstable();
                    let lo = st.final_content;
                    let hi = st.initial_content;
                    assert_eq!(contents, (lo..=hi).collect::<Vec<_>>());
                    assert_eq!(
                        hi.rem_euclid(3) as u64,
                        st.component,
                        "initial node color is the component"
                    );
                    prev = cur.clone();
                }
                assert_eq!(prev, lam);
            }
        }
    }

    #[test]
    fn column_order_core_and_ell1() {
        assert!(column_order(&p(&[3, 1]), 3).unwrap().is_empty());
        // ell = 1: columns of lambda itself, longest first
        let steps = column_order(&p(&[2, 2]), 1).unwrap();
        let lens: Vec<u64> = steps.iter().map(|s| s.length).collect();
        assert_eq!(lens, vec![2, 2]);
        assert!(steps.iter().all(|s| s.component == 0));
    }

    #[test]
    fn row_order_basics() {
        assert!(row_order(&p(&[3, 1]), 3).unwrap().is_empty());
        let steps = row_order(&p(&[2, 2]), 1).unwrap();
        let lens: Vec<u64> = steps.iter().map(|s| s.length).collect();
        assert_eq!(lens, vec![2, 2]);
        // (4,4,2,2,2,2) at ell 3: replay through transposes must land on lam
        let lam = p(&[4, 4, 2, 2, 2, 2]);
        let steps = row_order(&lam, 3).unwrap();
        assert_eq!(steps.len(), 3);
        // final contents strictly increase by construction; strips valid:
        let (core, _, _) = core_quotient(&lam, 3);
        let mut rows: Vec<BTreeMap<u64, u64>> = vec![BTreeMap::new(); 3];
        let mut prev = core;
        for st in &steps {
            *rows[st.component as usize].entry(st.length).or_insert(0) += 1;
            let quot: Vec<Partition> = rows
                .iter()
                .map(|r| {
                    let mut list = Vec::new();
                    for (&len, &mult) in r.iter() {
                        for _ in 0..mult {
                            list.push(len);
                        }
                    }
                    Partition::new(list)
                })
                .collect();
            let cur = combine(&core_quotient(&lam, 3).0, &quot, 3).unwrap();
            assert_eq!(cur.size(), prev.size() + 3 * st.length);
            // strip spans consecutive contents ending at final_content
            let mut contents: Vec<i64> = cur
                .nodes()
                .into_iter()
                .filter(|nd| nd.a > prev.part(nd.b as usize) as i64)
                .map(|nd| nd.content())
                .collect();
            contents.sort_unstable();
            assert_eq!(
                contents,
                (st.final_content..=st.initial_content).collect::<Vec<_>>()
            );
            prev = cur;
        }
        assert_eq!(prev, lam);
    }

    #[test]
    fn rem12_iii_componentwise_dominance() {
        // same core, componentwise dominance of quotients implies dominance
        for ell in 2..=3u64 {
            for total in 0..=3u64 {
                let mps = multipartitions_of(total, ell);
                for a in &mps {
                    for b in &mps {
                        let cw = a
                            .components
                            .iter()
                            .zip(&b.components)
                            .all(|(x, y)| x.size() == y.size() && dominance_leq(y, x));
                        if !cw {
                            continue;
                        }
                        // embed over every small core
                        for core in [Partition::empty(), p(&[1])] {
                            if !core.is_core(ell) {
                                continue;
                            }
                            let la = combine(&core, &a.components, ell).unwrap();
                            let mu = combine(&core, &b.components, ell).unwrap();
                            assert!(
                                dominance_leq(&mu, &la),
                                "quot dominance must imply dominance: {:?} {:?}",
                                la,
                                mu
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rem12_ii_balanced_additions_keep_core() {
        // adding one node of each color never changes the core
        let ell = 3u64;
        for n in 0..=6u64 {
            for lam in partitions_of(n) {
                let (core, _, _) = core_quotient(&lam, ell);
                for mu in partitions_of(n + ell) {
                    if !mu.contains(&lam) {
                        continue;
                    }
                    let mut counts = vec![0i64; ell as usize];
                    for nd in mu.nodes() {
                        if nd.a > lam.part(nd.b as usize) as i64 {
                            counts[nd.color(ell) as usize] += 1;
                        }
                    }
                    if counts.iter().all(|&c| c == 1) {
                        let (core2, _, _) = core_quotient(&mu, ell);
                        assert_eq!(core, core2);
                    }
                }
            }
        }
    }

    #[test]
    fn partitions_count() {
        assert_eq!(partitions_of(0).len(), 1);
        assert_eq!(partitions_of(5).len(), 7);
        assert_eq!(partitions_of(9).len(), 30);
        assert_eq!(multipartitions_of(2, 3).len(), 9);
    }
}
