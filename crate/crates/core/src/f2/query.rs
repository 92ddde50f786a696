use serde::{Deserialize, Serialize};

/// Coefficients (α_i, β_i) of one query q_i = A·α_i + B·β_i; bit j−1 of
/// `alpha` selects column a_j of A, bit j−1 of `beta` selects column b_j of B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearCoeff {
    pub alpha: u64,
    pub beta: u64,
}

/// A linear query pattern: k uniformly random columns A, fixed columns B.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearPattern {
    pub n: usize,
    pub k: usize,
    pub b_columns: Vec<u64>,
    pub coeffs: Vec<LinearCoeff>,
}

impl LinearPattern {
    #[inline]
    pub fn combine(columns: &[u64], coeff: u64) -> u64 {
        let mut acc = 0;
        let mut c = coeff;
        while c != 0 {
            acc ^= columns[c.trailing_zeros() as usize];
            c &= c - 1;
        }
        acc
    }

    pub fn point(&self, a_columns: &[u64], c: LinearCoeff) -> u64 {
        Self::combine(a_columns, c.alpha) ^ Self::combine(&self.b_columns, c.beta)
    }
}

/// An axis-aligned subcube of {0,1}^n: coordinates in `fixed_mask` take the
/// values in `fixed_values`, the `free` coordinates range over all
/// assignments in lexicographic order (first free coordinate most significant).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcubeDescriptor {
    pub n: usize,
    pub fixed_mask: u64,
    pub fixed_values: u64,
    pub free: Vec<usize>,
    /// Design block (u, v) that produced the subcube, both 0-based.
    pub source: (usize, usize),
}

impl SubcubeDescriptor {
    pub fn size(&self) -> usize {
        1 << self.free.len()
    }

    /// The `rank`-th point in lexicographic order.
    pub fn point(&self, rank: usize) -> u64 {
        let f = self.free.len();
        self.free.iter().enumerate().fold(self.fixed_values, |x, (j, &c)| {
            x | (((rank >> (f - 1 - j)) & 1) as u64) << c
        })
    }

    /// Lexicographic rank of x among the points, if x lies in the subcube.
    pub fn rank_of(&self, x: u64) -> Option<usize> {
        if x & self.fixed_mask != self.fixed_values {
            return None;
        }
        let f = self.free.len();
        Some(self.free.iter().enumerate().fold(0usize, |r, (j, &c)| r | (((x >> c) & 1) as usize) << (f - 1 - j)))
    }

    pub fn points(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.size()).map(move |r| self.point(r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
    pub pattern: QueryPattern,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueryPattern {
    Plain,
    Linear { pattern: LinearPattern, a_columns: Vec<u64> },
    Nae,
    NwSubcubes { blocks: Vec<SubcubeDescriptor> },
    Union { segments: Vec<Segment> },
}

impl QueryPattern {
    pub fn tag(&self) -> &'static str {
        match self {
            QueryPattern::Plain => "plain",
            QueryPattern::Linear { .. } => "linear",
            QueryPattern::Nae => "nae",
            QueryPattern::NwSubcubes { .. } => "nw_subcubes",
            QueryPattern::Union { .. } => "union",
        }
    }
}

/// An ordered query list with the verifier's view of how it was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySet {
    pub n: usize,
    #[serde(with = "hex_points")]
    pub points: Vec<u64>,
    pub pattern: QueryPattern,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedded_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<i8>>,
}

/// What the prover is shown: the points and the pattern tag only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverView {
    pub n: usize,
    #[serde(with = "hex_points")]
    pub points: Vec<u64>,
    pub pattern: String,
}

impl QuerySet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn prover_view(&self) -> ProverView {
        ProverView { n: self.n, points: self.points.clone(), pattern: self.pattern.tag().to_string() }
    }

    /// Re-derives the structural constraints of the pattern.
    pub fn is_consistent(&self) -> bool {
        check_pattern(&self.pattern, &self.points, self.n)
            && self.embedded_index.map_or(true, |j| j < self.points.len())
    }
}

fn check_pattern(pattern: &QueryPattern, points: &[u64], n: usize) -> bool {
    match pattern {
        QueryPattern::Plain => true,
        QueryPattern::Linear { pattern, a_columns } => {
            a_columns.len() == pattern.k
                && pattern.coeffs.len() == points.len()
                && pattern
                    .coeffs
                    .iter()
                    .zip(points)
                    .all(|(&c, &q)| c.alpha != 0 && pattern.point(a_columns, c) == q)
        }
        QueryPattern::Nae => {
            points.len() == 3 && {
                let (x, y, z) = (points[0], points[1], points[2]);
                (!(x ^ y) & !(y ^ z)) & crate::boolfn::mask(n) == 0
            }
        }
        QueryPattern::NwSubcubes { blocks } => {
            let mut offset = 0;
            for b in blocks {
                for (r, p) in b.points().enumerate() {
                    if points.get(offset + r) != Some(&p) {
                        return false;
                    }
                }
                offset += b.size();
            }
            offset == points.len()
        }
        QueryPattern::Union { segments } => {
            let mut next = 0;
            for s in segments {
                if s.start != next || s.start + s.len > points.len() {
                    return false;
                }
                if !check_pattern(&s.pattern, &points[s.start..s.start + s.len], n) {
                    return false;
                }
                next += s.len;
            }
            next == points.len()
        }
    }
}

#[doc(hidden)]
pub mod hex_points {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(points: &[u64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(points.iter().map(|p| format!("{p:x}")))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|h| u64::from_str_radix(h, 16).map_err(serde::de::Error::custom))
            .collect()
    }
}
