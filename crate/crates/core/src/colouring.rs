//! Edge colourings of complete graphs and their canonical text encoding.
//!
//! Only the upper triangle `p < q` of the adjacency matrix is stored, as a
//! flat row-major array. Alongside it every colouring keeps one neighbour
//! bitset per (colour, vertex), which is what the clique enumeration in
//! [`crate::energy`] works on. Both views are kept in sync by [`Colouring::set`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{ParseError, RamseyError, Result};

/// Largest supported vertex count; neighbour sets are single `u64` words.
pub const MAX_VERTICES: usize = 64;

/// Largest supported palette.
pub const MAX_COLOURS: usize = u8::MAX as usize;

const HEADER: &str = "ramsey-colouring v1";

/// An unordered vertex pair `{p, q}` stored with `p < q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    p: u8,
    q: u8,
}

impl Edge {
    /// Builds the edge between two distinct vertices, in either order.
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(RamseyError::precondition(format!("self-edge ({a},{a})")));
        }
        if a.max(b) >= MAX_VERTICES {
            return Err(RamseyError::precondition(format!(
                "vertex {} exceeds the {MAX_VERTICES}-vertex limit",
                a.max(b)
            )));
        }
        Ok(Self::ordered(a.min(b), a.max(b)))
    }

    #[inline]
    pub(crate) fn ordered(p: usize, q: usize) -> Self {
        debug_assert!(p < q && q < MAX_VERTICES);
        Self {
            p: p as u8,
            q: q as u8,
        }
    }

    #[inline]
    pub fn p(self) -> usize {
        self.p as usize
    }

    #[inline]
    pub fn q(self) -> usize {
        self.q as usize
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Number of edges of the complete graph on `n` vertices.
#[inline]
pub const fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Bitset of the vertices strictly greater than `v`.
#[inline]
pub(crate) const fn above(v: usize) -> u64 {
    if v >= 63 {
        0
    } else {
        !0u64 << (v + 1)
    }
}

/// An assignment of one of `l` colours to each edge of `K_N`.
#[derive(Clone)]
pub struct Colouring {
    n: usize,
    l: usize,
    edges: Vec<u8>,
    // masks[c * n + v]: vertices joined to v by an edge of colour c
    masks: Vec<u64>,
}

impl Colouring {
    fn check_shape(n: usize, l: usize) -> Result<()> {
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(RamseyError::precondition(format!(
                "vertex count must lie in 2..={MAX_VERTICES}, got {n}"
            )));
        }
        if !(2..=MAX_COLOURS).contains(&l) {
            return Err(RamseyError::precondition(format!(
                "colour count must lie in 2..={MAX_COLOURS}, got {l}"
            )));
        }
        Ok(())
    }

    /// Builds a colouring from the flat upper-triangle array.
    pub fn from_edges(n: usize, l: usize, edges: Vec<u8>) -> Result<Self> {
        Self::check_shape(n, l)?;
        if edges.len() != edge_count(n) {
            return Err(RamseyError::precondition(format!(
                "expected {} edge colours for n={n}, got {}",
                edge_count(n),
                edges.len()
            )));
        }
        if let Some(bad) = edges.iter().find(|&&c| c as usize >= l) {
            return Err(RamseyError::precondition(format!(
                "colour {bad} out of range for {l} colours"
            )));
        }
        let mut colouring = Self {
            n,
            l,
            edges,
            masks: vec![0; n * l],
        };
        colouring.rebuild_masks();
        Ok(colouring)
    }

    /// Builds a colouring by evaluating `colour(p, q)` for every `p < q`.
    pub fn from_fn(
        n: usize,
        l: usize,
        mut colour: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self> {
        Self::check_shape(n, l)?;
        let mut edges = Vec::with_capacity(edge_count(n));
        for p in 0..n {
            for q in p + 1..n {
                edges.push(colour(p, q).min(u8::MAX as usize) as u8);
            }
        }
        Self::from_edges(n, l, edges)
    }

    pub fn uniform(n: usize, l: usize, colour: usize) -> Result<Self> {
        Self::from_fn(n, l, |_, _| colour)
    }

    /// Independent uniform colour per edge.
    pub fn random<R: Rng + ?Sized>(n: usize, l: usize, rng: &mut R) -> Result<Self> {
        Self::from_fn(n, l, |_, _| rng.random_range(0..l))
    }

    fn rebuild_masks(&mut self) {
        self.masks.iter_mut().for_each(|m| *m = 0);
        let n = self.n;
        let mut idx = 0;
        for p in 0..n {
            for q in p + 1..n {
                let c = self.edges[idx] as usize;
                self.masks[c * n + p] |= 1 << q;
                self.masks[c * n + q] |= 1 << p;
                idx += 1;
            }
        }
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn n_colours(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Flat array index of the pair `p < q`.
    #[inline]
    pub fn edge_index(&self, e: Edge) -> usize {
        let (p, q, n) = (e.p(), e.q(), self.n);
        p * (2 * n - p - 1) / 2 + (q - p - 1)
    }

    /// The colour of `e`. Panics if `e` does not belong to this graph.
    #[inline]
    pub fn colour(&self, e: Edge) -> usize {
        assert!(e.q() < self.n, "edge {e} outside K_{}", self.n);
        self.edges[self.edge_index(e)] as usize
    }

    /// The colour between two distinct vertices given in any order.
    #[inline]
    pub fn colour_between(&self, a: usize, b: usize) -> usize {
        self.colour(Edge::ordered(a.min(b), a.max(b)))
    }

    /// Raw upper-triangle colour array.
    pub fn as_slice(&self) -> &[u8] {
        &self.edges
    }

    /// Colour-`c` neighbourhood of `v` as a bitset.
    #[inline]
    pub fn neighbours(&self, colour: usize, v: usize) -> u64 {
        self.masks[colour * self.n + v]
    }

    /// All edges in flat-array order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.n;
        (0..n).flat_map(move |p| (p + 1..n).map(move |q| Edge::ordered(p, q)))
    }

    /// Recolours `e` in place.
    pub fn set(&mut self, e: Edge, colour: usize) {
        assert!(colour < self.l, "colour {colour} out of range");
        let idx = self.edge_index(e);
        let old = self.edges[idx] as usize;
        if old == colour {
            return;
        }
        let (p, q, n) = (e.p(), e.q(), self.n);
        self.masks[old * n + p] &= !(1 << q);
        self.masks[old * n + q] &= !(1 << p);
        self.masks[colour * n + p] |= 1 << q;
        self.masks[colour * n + q] |= 1 << p;
        self.edges[idx] = colour as u8;
    }

    /// Number of edges at `v` carrying each colour.
    pub fn incident_counts(&self, v: usize) -> Vec<usize> {
        (0..self.l)
            .map(|c| self.neighbours(c, v).count_ones() as usize)
            .collect()
    }

    /// The colouring with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n
            || perm
                .iter()
                .any(|&v| v >= self.n || std::mem::replace(&mut seen[v], true))
        {
            return Err(RamseyError::precondition(
                "relabelling is not a permutation",
            ));
        }
        let mut out = self.clone();
        for e in self.edges() {
            let image = Edge::ordered(perm[e.p()].min(perm[e.q()]), perm[e.p()].max(perm[e.q()]));
            let idx = out.edge_index(image);
            out.edges[idx] = self.colour(e) as u8;
        }
        out.rebuild_masks();
        Ok(out)
    }

    /// The colouring with colour `c` renamed to `map[c]`.
    pub fn recolour(&self, map: &[usize]) -> Result<Self> {
        if map.len() != self.l || map.iter().any(|&c| c >= self.l) {
            return Err(RamseyError::precondition(
                "colour map does not fit the palette",
            ));
        }
        let edges = self.edges.iter().map(|&c| map[c as usize] as u8).collect();
        Self::from_edges(self.n, self.l, edges)
    }

    /// The sub-colouring induced on `vertices` (relabelled `0..len` in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        if vertices.iter().any(|&v| v >= self.n) {
            return Err(RamseyError::precondition("induced vertex out of range"));
        }
        Self::from_fn(vertices.len(), self.l, |i, j| {
            self.colour_between(vertices[i], vertices[j])
        })
    }

    /// Canonical `ramsey-colouring v1` text.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::with_capacity(HEADER.len() + 2 * self.edges.len() + 32);
        out.push_str(HEADER);
        out.push('\n');
        out.push_str(&format!("n={} colours={}\n", self.n, self.l));
        let mut idx = 0;
        for p in 0..self.n - 1 {
            let row = &self.edges[idx..idx + (self.n - 1 - p)];
            idx += row.len();
            let mut first = true;
            for c in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&c.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the canonical text format.
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

        match lines.next() {
            Some((_, HEADER)) => {}
            Some((ln, other)) if other.starts_with("ramsey-colouring ") => {
                return Err(ParseError::new(
                    ln,
                    format!("unsupported version `{other}`"),
                ));
            }
            Some((ln, other)) => {
                return Err(ParseError::new(
                    ln,
                    format!("expected `{HEADER}`, found `{other}`"),
                ));
            }
            None => return Err(ParseError::new(1, "empty input")),
        }

        let (ln, dims) = lines
            .next()
            .ok_or_else(|| ParseError::new(2, "missing `n=<N> colours=<l>` line"))?;
        let (n, l) = parse_dims(dims).map_err(|m| ParseError::new(ln, m))?;
        if !(2..=MAX_VERTICES).contains(&n) {
            return Err(ParseError::new(
                ln,
                format!("n must lie in 2..={MAX_VERTICES}"),
            ));
        }
        if !(2..=MAX_COLOURS).contains(&l) {
            return Err(ParseError::new(
                ln,
                format!("colours must lie in 2..={MAX_COLOURS}"),
            ));
        }

        let mut edges = Vec::with_capacity(edge_count(n));
        for p in 0..n - 1 {
            let (ln, row) = lines.next().ok_or_else(|| {
                ParseError::new(ln + p + 1, format!("truncated: missing row {p}"))
            })?;
            let before = edges.len();
            for tok in row.split_whitespace() {
                let c: usize = tok
                    .parse()
                    .map_err(|_| ParseError::new(ln, format!("invalid colour `{tok}`")))?;
                if c >= l {
                    return Err(ParseError::new(
                        ln,
                        format!("colour {c} out of range for {l} colours"),
                    ));
                }
                edges.push(c as u8);
            }
            let want = n - 1 - p;
            if edges.len() - before != want {
                return Err(ParseError::new(
                    ln,
                    format!(
                        "row {p} has {} entries, expected {want}",
                        edges.len() - before
                    ),
                ));
            }
        }
        if let Some((ln, extra)) = lines.find(|(_, l)| !l.is_empty()) {
            return Err(ParseError::new(
                ln,
                format!("unexpected trailing content `{extra}`"),
            ));
        }
        Ok(Self::from_edges(n, l, edges).expect("validated above"))
    }
}

fn parse_dims(line: &str) -> std::result::Result<(usize, usize), String> {
    let mut n = None;
    let mut l = None;
    for tok in line.split_whitespace() {
        match tok.split_once('=') {
            Some(("n", v)) => n = v.parse().ok(),
            Some(("colours", v)) => l = v.parse().ok(),
            _ => return Err(format!("unexpected token `{tok}` in dimension line")),
        }
    }
    match (n, l) {
        (Some(n), Some(l)) => Ok((n, l)),
        _ => Err(format!("expected `n=<N> colours=<l>`, found `{line}`")),
    }
}

impl FromStr for Colouring {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for Colouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

impl fmt::Debug for Colouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Colouring")
            .field("n", &self.n)
            .field("l", &self.l)
            .field("edges", &self.edges)
            .finish()
    }
}

impl PartialEq for Colouring {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.l == other.l && self.edges == other.edges
    }
}

impl Eq for Colouring {}

impl std::hash::Hash for Colouring {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.l.hash(state);
        self.edges.hash(state);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const PENTAGON: &str =
        "ramsey-colouring v1\nn=5 colours=2\n0 0 1 1\n1 1 0\n0 1\n0\n";

    #[test]
    fn canonical_text_round_trips() {
        let c = Colouring::parse(PENTAGON).unwrap();
        assert_eq!(c.n_vertices(), 5);
        assert_eq!(c.to_canonical_string(), PENTAGON);
    }

    #[test]
    fn edge_index_matches_row_major_layout() {
        let c = Colouring::uniform(7, 2, 0).unwrap();
        for (i, e) in c.edges().enumerate() {
            assert_eq!(c.edge_index(e), i);
        }
    }

    #[test]
    fn masks_follow_set() {
        let mut c = Colouring::uniform(4, 3, 0).unwrap();
        let e = Edge::new(3, 1).unwrap();
        c.set(e, 2);
        assert_eq!(c.colour(e), 2);
        assert_eq!(c.neighbours(2, 1), 1 << 3);
        assert_eq!(c.neighbours(0, 1), (1 << 0) | (1 << 2));
    }

    #[test]
    fn rejects_malformed_files() {
        let cases = [
            (
                "ramsey-colouring v2\nn=2 colours=2\n0\n",
                "unsupported version",
            ),
            (
                "ramsey-colouring v1\nn=3 colours=2\n0\n0\n",
                "row 0 has 1 entries",
            ),
            (
                "ramsey-colouring v1\nn=3 colours=2\n0 2\n0\n",
                "out of range",
            ),
            (
                "ramsey-colouring v1\nn=4 colours=2\n0 0 0\n0 0\n",
                "truncated",
            ),
            ("ramsey-colouring v1\nn=2 colours=2\n0\n1\n", "trailing"),
            ("hello\n", "expected `ramsey-colouring v1`"),
        ];
        for (text, needle) in cases {
            let err = Colouring::parse(text).unwrap_err();
            assert!(err.to_string().contains(needle), "{err} lacks `{needle}`");
        }
    }

    #[test]
    fn edge_rejects_self_loop() {
        assert!(Edge::new(2, 2).is_err());
        assert_eq!(Edge::new(4, 1).unwrap(), Edge::ordered(1, 4));
    }

    #[test]
    fn relabel_rejects_non_permutation() {
        let c = Colouring::uniform(3, 2, 0).unwrap();
        assert!(c.relabel(&[0, 0, 1]).is_err());
    }
}
