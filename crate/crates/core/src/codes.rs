//! Binary linear codes, GF(2) elimination and Tanner graphs.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use crate::error::{BpqmError, Result};

/// Largest supported block length (codewords are packed into `u64`).
pub const MAX_N: usize = 64;
/// Largest dimension for which [`BinaryLinearCode::codewords`] enumerates.
pub const MAX_ENUM_K: usize = 24;

/// An (n, k) binary linear code given by a full-rank parity-check matrix.
///
/// Bit positions are 0-based internally; user-facing bit indices (`r`) are
/// 1-based. A packed word stores `x_{i+1}` in bit `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryLinearCode {
    n: usize,
    k: usize,
    h: Vec<Vec<u8>>,
    g: Vec<Vec<u8>>,
    h_masks: Vec<u64>,
    g_masks: Vec<u64>,
    info_set: Vec<usize>,
    aux: Option<TannerGraph>,
}

/// Bipartite variable/check adjacency read off the rows of H.
///
/// Variables `0..n` are code bits. A factor graph may add `hidden` auxiliary
/// variables `n..n+hidden` that carry no channel output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    /// Number of code-bit variable nodes.
    pub n: usize,
    /// Number of auxiliary variable nodes.
    pub hidden: usize,
    /// `checks[j]` lists the (0-based) variables in check `j`.
    pub checks: Vec<Vec<usize>>,
    /// `var_checks[i]` lists the (0-based) checks touching variable `i`.
    pub var_checks: Vec<Vec<usize>>,
}

fn row_mask(row: &[u8]) -> u64 {
    row.iter().enumerate().filter(|(_, &b)| b != 0).fold(0u64, |m, (i, _)| m | (1u64 << i))
}

fn mask_row(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((mask >> i) & 1) as u8).collect()
}

/// Rank of a set of packed GF(2) rows.
pub fn gf2_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Reduced row echelon form with pivots searched from the last column down.
/// Returns the reduced rows and, per row, its pivot column.
fn rref_from_right(rows: &[u64], n: usize) -> (Vec<u64>, Vec<usize>) {
    let mut m = rows.to_vec();
    let mut pivots = Vec::new();
    let mut next = 0usize;
    for col in (0..n).rev() {
        let bit = 1u64 << col;
        let Some(p) = (next..m.len()).find(|&r| m[r] & bit != 0) else {
            continue;
        };
        m.swap(next, p);
        for r in 0..m.len() {
            if r != next && m[r] & bit != 0 {
                m[r] ^= m[next];
            }
        }
        pivots.push(col);
        next += 1;
        if next == m.len() {
            break;
        }
    }
    (m, pivots)
}

impl BinaryLinearCode {
    /// Build a code from a full-row-rank parity-check matrix given as 0/1 rows.
    ///
    /// The generator matrix is derived by eliminating H from the right, so the
    /// information positions are the leftmost columns wherever that is
    /// possible, and G carries an identity on them.
    pub fn from_parity_check(h: &[Vec<u8>]) -> Result<Self> {
        let n = match h.first() {
            Some(r) => r.len(),
            None => return Err(BpqmError::Malformed("empty parity-check matrix; use from_parity_check_with_n".into())),
        };
        Self::from_parity_check_with_n(h, n)
    }

    /// Like [`from_parity_check`](Self::from_parity_check) but allows zero rows (k = n).
    pub fn from_parity_check_with_n(h: &[Vec<u8>], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(BpqmError::Malformed("code length must be positive".into()));
        }
        if n > MAX_N {
            return Err(BpqmError::Guard { what: "n", value: n, limit: MAX_N });
        }
        for (j, row) in h.iter().enumerate() {
            if row.len() != n {
                return Err(BpqmError::Malformed(format!("row {} has length {}, expected {}", j + 1, row.len(), n)));
            }
            if row.iter().any(|&b| b > 1) {
                return Err(BpqmError::Malformed(format!("row {} has a non-binary entry", j + 1)));
            }
        }
        let h_masks: Vec<u64> = h.iter().map(|r| row_mask(r)).collect();
        let rank = gf2_rank(&h_masks);
        if rank < h.len() {
            return Err(BpqmError::RankDeficient { rank, rows: h.len() });
        }
        let k = n - h.len();
        let (reduced, pivots) = rref_from_right(&h_masks, n);
        let pivot_mask = pivots.iter().fold(0u64, |m, &c| m | (1u64 << c));
        let info_set: Vec<usize> = (0..n).filter(|&c| pivot_mask & (1u64 << c) == 0).collect();
        let g_masks: Vec<u64> = info_set
            .iter()
            .map(|&f| {
                let mut word = 1u64 << f;
                for (row, &p) in reduced.iter().zip(&pivots) {
                    if row & (1u64 << f) != 0 {
                        word |= 1u64 << p;
                    }
                }
                word
            })
            .collect();
        Ok(Self {
            n,
            k,
            h: h.iter().map(|r| r.to_vec()).collect(),
            g: g_masks.iter().map(|&m| mask_row(m, n)).collect(),
            h_masks,
            g_masks,
            info_set,
            aux: None,
        })
    }

    /// Parse the plain-text format: first line `n k`, then n−k rows of 0/1.
    ///
    /// An optional trailing section `aux s` followed by rows of length n+s
    /// gives a tree factor graph with `s` auxiliary variables.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| BpqmError::Malformed("missing `n k` header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| BpqmError::Malformed(format!("bad header `{header}`: {e}")))?;
        let [n, k] = dims[..] else {
            return Err(BpqmError::Malformed(format!("header must be `n k`, got `{header}`")));
        };
        if k > n {
            return Err(BpqmError::Malformed(format!("k = {k} exceeds n = {n}")));
        }
        let parse_row = |line: &str| -> Result<Vec<u8>> {
            line.split_whitespace()
                .map(|t| match t {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(BpqmError::Malformed(format!("entry `{other}` is not 0 or 1"))),
                })
                .collect()
        };
        let mut rows = Vec::new();
        let mut aux: Option<(usize, Vec<Vec<u8>>)> = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix("aux") {
                let s = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| BpqmError::Malformed(format!("bad `aux` line `{line}`: {e}")))?;
                aux = Some((s, Vec::new()));
                continue;
            }
            match aux.as_mut() {
                Some((_, aux_rows)) => aux_rows.push(parse_row(line)?),
                None => rows.push(parse_row(line)?),
            }
        }
        if rows.len() != n - k {
            return Err(BpqmError::Malformed(format!("expected {} parity rows, found {}", n - k, rows.len())));
        }
        let code = Self::from_parity_check_with_n(&rows, n)?;
        match aux {
            Some((s, aux_rows)) => code.with_factor_graph(s, &aux_rows),
            None => Ok(code),
        }
    }

    /// Read a code file (see [`parse`](Self::parse)).
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Serialize to the plain-text code format.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.k);
        for row in &self.h {
            let cells: Vec<&str> = row.iter().map(|&b| if b == 1 { "1" } else { "0" }).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        if let Some(aux) = &self.aux {
            s.push_str(&format!("aux {}\n", aux.hidden));
            for check in &aux.checks {
                let mut row = vec!["0"; aux.num_vars()];
                for &v in check {
                    row[v] = "1";
                }
                s.push_str(&row.join(" "));
                s.push('\n');
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Parity-check matrix rows.
    pub fn h(&self) -> &[Vec<u8>] {
        &self.h
    }

    /// Generator matrix rows.
    pub fn g(&self) -> &[Vec<u8>] {
        &self.g
    }

    pub fn h_masks(&self) -> &[u64] {
        &self.h_masks
    }

    pub fn g_masks(&self) -> &[u64] {
        &self.g_masks
    }

    /// 0-based positions where G restricts to the identity.
    pub fn information_set(&self) -> &[usize] {
        &self.info_set
    }

    /// Packed codeword `m·G` for a packed message; message bit `j` is bit
    /// `k−1−j` of `msg`, so increasing `msg` walks messages lexicographically.
    pub fn encode_index(&self, msg: u64) -> u64 {
        self.g_masks
            .iter()
            .enumerate()
            .filter(|(j, _)| (msg >> (self.k - 1 - j)) & 1 == 1)
            .fold(0u64, |w, (_, &g)| w ^ g)
    }

    /// Encode a message given as bits.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(BpqmError::InvalidArgument(format!("message has {} bits, expected {}", message.len(), self.k)));
        }
        let word = message.iter().zip(&self.g_masks).filter(|(&b, _)| b & 1 == 1).fold(0u64, |w, (_, &g)| w ^ g);
        Ok(mask_row(word, self.n))
    }

    /// True when the packed word satisfies every parity check.
    pub fn is_codeword(&self, word: u64) -> bool {
        self.h_masks.iter().all(|&h| (h & word).count_ones().is_multiple_of(2))
    }

    /// All codewords as packed words, in lexicographic message order.
    pub fn codeword_masks(&self) -> Result<Vec<u64>> {
        if self.k > MAX_ENUM_K {
            return Err(BpqmError::Guard { what: "k", value: self.k, limit: MAX_ENUM_K });
        }
        Ok((0..1u64 << self.k).map(|m| self.encode_index(m)).collect())
    }

    /// All codewords as bit vectors, in lexicographic message order.
    pub fn codewords(&self) -> Result<Vec<Vec<u8>>> {
        Ok(self.codeword_masks()?.into_iter().map(|w| mask_row(w, self.n)).collect())
    }

    pub fn tanner_graph(&self) -> TannerGraph {
        let checks: Vec<Vec<usize>> = self.h.iter().map(|row| (0..self.n).filter(|&i| row[i] == 1).collect()).collect();
        let mut var_checks = vec![Vec::new(); self.n];
        for (j, c) in checks.iter().enumerate() {
            for &i in c {
                var_checks[i].push(j);
            }
        }
        TannerGraph { n: self.n, hidden: 0, checks, var_checks }
    }

    /// Attach a tree-shaped factor graph over the code bits plus `hidden`
    /// auxiliary variables. `checks` are rows of length `n + hidden`.
    ///
    /// The auxiliary code must project onto exactly this code, with the
    /// auxiliary bits determined by the code bits.
    pub fn with_factor_graph(mut self, hidden: usize, checks: &[Vec<u8>]) -> Result<Self> {
        let width = self.n + hidden;
        let ext = BinaryLinearCode::from_parity_check_with_n(checks, width)?;
        let mask = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let projected: Vec<u64> = ext.g_masks.iter().map(|&g| g & mask).collect();
        if projected.iter().any(|&w| !self.is_codeword(w)) || gf2_rank(&projected) != self.k {
            return Err(BpqmError::Malformed("factor graph does not describe the same code".into()));
        }
        let mut graph = ext.tanner_graph();
        graph.n = self.n;
        graph.hidden = hidden;
        graph.var_checks.truncate(width);
        if !graph.is_tree() {
            return Err(BpqmError::NotTree);
        }
        self.aux = Some(graph);
        Ok(self)
    }

    /// The graph message passing runs on: the attached factor graph if any,
    /// otherwise the Tanner graph of H.
    pub fn factor_graph(&self) -> TannerGraph {
        self.aux.clone().unwrap_or_else(|| self.tanner_graph())
    }

    /// True when [`factor_graph`](Self::factor_graph) is a connected tree.
    pub fn is_tree_code(&self) -> bool {
        self.factor_graph().is_tree()
    }

    /// True when the 0-based positions are linearly independent coordinates,
    /// i.e. every codeword is determined by its values there.
    pub fn is_information_set(&self, positions: &[usize]) -> bool {
        if positions.len() != self.k || positions.iter().any(|&p| p >= self.n) {
            return false;
        }
        // Project G onto the positions and check full rank.
        let cols: Vec<u64> = self
            .g_masks
            .iter()
            .map(|&g| positions.iter().enumerate().fold(0u64, |m, (t, &p)| m | (((g >> p) & 1) << t)))
            .collect();
        gf2_rank(&cols) == self.k
    }
}

impl fmt::Display for BinaryLinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "({}, {}) code", self.n, self.k)?;
        writeln!(f, "H =")?;
        for row in &self.h {
            writeln!(f, "  {}", row.iter().map(|b| b.to_string()).collect::<String>())?;
        }
        writeln!(f, "G =")?;
        for row in &self.g {
            writeln!(f, "  {}", row.iter().map(|b| b.to_string()).collect::<String>())?;
        }
        Ok(())
    }
}

impl TannerGraph {
    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn num_edges(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    /// Number of connected components of the bipartite graph.
    pub fn components(&self) -> usize {
        let total = self.num_vars() + self.checks.len();
        let mut seen = vec![false; total];
        let mut count = 0;
        for start in 0..total {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbours(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    /// Code bits plus auxiliary variables.
    pub fn num_vars(&self) -> usize {
        self.n + self.hidden
    }

    // Vertices 0..num_vars are variables, the rest are checks.
    fn neighbours(&self, v: usize) -> Vec<usize> {
        let nv = self.num_vars();
        if v < nv {
            self.var_checks[v].iter().map(|&c| nv + c).collect()
        } else {
            self.checks[v - nv].clone()
        }
    }

    /// Connected and acyclic, checked by a union-find pass over the edges.
    pub fn is_tree(&self) -> bool {
        let nv = self.num_vars();
        let total = nv + self.checks.len();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        let mut merges = 0;
        for (j, vars) in self.checks.iter().enumerate() {
            for &i in vars {
                let a = find(&mut parent, i);
                let b = find(&mut parent, nv + j);
                if a == b {
                    return false;
                }
                parent[a] = b;
                merges += 1;
            }
        }
        merges + 1 == total
    }
}

/// Tree test on a code's Tanner graph.
pub fn is_tree(tg: &TannerGraph) -> bool {
    tg.is_tree()
}

fn rows_from_checks(n: usize, checks: &[&[usize]]) -> Vec<Vec<u8>> {
    checks
        .iter()
        .map(|c| {
            let mut row = vec![0u8; n];
            for &v in c.iter() {
                row[v - 1] = 1;
            }
            row
        })
        .collect()
}

fn rows_from_strings(rows: &[&str]) -> Vec<Vec<u8>> {
    rows.iter().map(|r| r.bytes().map(|b| b - b'0').collect()).collect()
}

/// Names accepted by [`builtin_code`].
pub const BUILTIN_NAMES: [&str; 4] = ["code5", "code6", "code8", "code17"];

/// The benchmark codes: a (5,3) tree code, a (6,3) code with a 6-cycle, an
/// (8,4) code with an 8-cycle, and a (17,11) tree code.
pub fn builtin_code(name: &str) -> Result<BinaryLinearCode> {
    let h = match name {
        "code5" => rows_from_strings(&["11010", "10101"]),
        "code6" => rows_from_checks(6, &[&[1, 3, 5], &[1, 2, 4], &[3, 4, 6]]),
        "code8" => rows_from_checks(8, &[&[1, 2, 5], &[1, 4, 8], &[3, 4, 7], &[2, 3, 6]]),
        "code17" => {
            let h = rows_from_strings(&[
                "01111000000000000",
                "00000111100000000",
                "00000000011110000",
                "00000000000001111",
                "01100110011001100",
                "11100110000000000",
            ]);
            // The Tanner graph of this H has cycles (rows 1, 5 and 6 share
            // x2 and x3). Message passing uses an equivalent tree with four
            // auxiliary bits u1..u4 (variables 18..21): u1 = x2+x3 = x4+x5,
            // u2 = x6+x7 = x8+x9, u3 = x10+x11 = x12+x13,
            // u4 = x14+x15 = x16+x17, and x1 = u1+u2 = u3+u4.
            let aux = rows_from_checks(
                21,
                &[
                    &[2, 3, 18],
                    &[4, 5, 18],
                    &[6, 7, 19],
                    &[8, 9, 19],
                    &[10, 11, 20],
                    &[12, 13, 20],
                    &[14, 15, 21],
                    &[16, 17, 21],
                    &[1, 18, 19],
                    &[1, 20, 21],
                ],
            );
            return BinaryLinearCode::from_parity_check(&h)?.with_factor_graph(4, &aux);
        }
        other => return Err(BpqmError::UnknownCode(other.to_string())),
    };
    BinaryLinearCode::from_parity_check(&h)
}

/// Resolve `builtin:<name>` or a path to a code file.
pub fn load_code(source: &str) -> Result<BinaryLinearCode> {
    match source.strip_prefix("builtin:") {
        Some(name) => builtin_code(name),
        None if BUILTIN_NAMES.contains(&source) => builtin_code(source),
        None => BinaryLinearCode::from_file(source),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn code5_generator_is_systematic_on_leading_bits() {
        let c = builtin_code("code5").unwrap();
        assert_eq!((c.n(), c.k()), (5, 3));
        assert_eq!(c.g(), &[bits("10011"), bits("01010"), bits("00101")]);
        assert_eq!(c.information_set(), &[0, 1, 2]);
    }

    #[test]
    fn code17_generator_matches_standard_form() {
        let c = builtin_code("code17").unwrap();
        assert_eq!((c.n(), c.k()), (17, 11));
        let expected = [
            "10000010100000101",
            "01001010100000000",
            "00101010100000000",
            "00011000000000000",
            "00000110000000000",
            "00000001100000000",
            "00000000010010101",
            "00000000001010101",
            "00000000000110000",
            "00000000000001100",
            "00000000000000011",
        ];
        let expected: Vec<Vec<u8>> = expected.iter().map(|s| bits(s)).collect();
        assert_eq!(c.g(), expected.as_slice());
    }

    #[test]
    fn repetition_code() {
        let c = BinaryLinearCode::from_parity_check(&[vec![1, 1]]).unwrap();
        assert_eq!((c.n(), c.k()), (2, 1));
        assert_eq!(c.codewords().unwrap(), vec![bits("00"), bits("11")]);
    }

    #[test]
    fn rank_deficient_rejected() {
        let err = BinaryLinearCode::from_parity_check(&[bits("110"), bits("011"), bits("101")]);
        assert!(matches!(err, Err(BpqmError::RankDeficient { rank: 2, rows: 3 })));
    }

    #[test]
    fn code5_codewords_include_examples() {
        let c = builtin_code("code5").unwrap();
        let words = c.codewords().unwrap();
        assert_eq!(words.len(), 8);
        assert_eq!(words[0], bits("00000"));
        assert!(words.contains(&bits("10011")));
    }

    #[test]
    fn tree_detection() {
        assert!(builtin_code("code5").unwrap().tanner_graph().is_tree());
        let c17 = builtin_code("code17").unwrap();
        assert!(!c17.tanner_graph().is_tree());
        assert!(c17.is_tree_code());
        assert!(!builtin_code("code8").unwrap().tanner_graph().is_tree());
        assert!(!builtin_code("code6").unwrap().tanner_graph().is_tree());
        let single = BinaryLinearCode::from_parity_check_with_n(&[], 1).unwrap();
        assert!(single.tanner_graph().is_tree());
        let two = BinaryLinearCode::from_parity_check_with_n(&[], 2).unwrap();
        assert!(!two.tanner_graph().is_tree());
    }

    #[test]
    fn text_round_trip() {
        let c = builtin_code("code8").unwrap();
        let back = BinaryLinearCode::parse(&c.to_text()).unwrap();
        assert_eq!(c, back);
        let c17 = builtin_code("code17").unwrap();
        assert_eq!(BinaryLinearCode::parse(&c17.to_text()).unwrap(), c17);
        assert!(BinaryLinearCode::parse("3 1\n1 1 0\n").is_err());
        assert!(BinaryLinearCode::parse("3 2\n1 2 0\n").is_err());
    }

    #[test]
    fn mismatched_factor_graph_rejected() {
        let c = builtin_code("code5").unwrap();
        // A tree, but for the repetition-style code x1 = x2 = ... instead.
        let wrong = vec![vec![1, 1, 0, 0, 0], vec![0, 1, 1, 0, 0], vec![0, 0, 1, 1, 0], vec![0, 0, 0, 1, 1]];
        assert!(c.with_factor_graph(0, &wrong).is_err());
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(builtin_code("code9"), Err(BpqmError::UnknownCode(_))));
    }

    #[test]
    fn information_sets() {
        let c = builtin_code("code5").unwrap();
        assert!(c.is_information_set(&[0, 1, 2]));
        assert!(c.is_information_set(&[4, 3, 0]));
        // x2 = x4 on every codeword, so {2,4,x} cannot be an information set.
        assert!(!c.is_information_set(&[1, 3, 0]));
    }
}
