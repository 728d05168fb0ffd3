//! Piecewise linear approximation codecs.
//!
//! All three compressors draw their segment end points from the input
//! samples, so a segment is fully described by two `(index, value)` pairs and
//! the decoder interpolates linearly between them. LTC and E-PLAMLiS emit a
//! chained vertex list (consecutive segments share an end point); PLAMLiS
//! emits independent, possibly overlapping segments chosen by a greedy set
//! cover.
//!
//! Feasibility is exact: every decoded sample is within `epsilon` of the
//! input. The cone tests of LTC and PLAMLiS are carried out on slopes, which
//! can disagree with the decoder's interpolation by an ulp when a sample sits
//! exactly on the tolerance boundary; each emitted segment is therefore
//! re-evaluated with the decoder's formula before it is accepted. That guard
//! is not charged to the op count.

use crate::error::{invalid, Result};
use crate::ops::OpCount;
use crate::series::{TimeSeries, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub index: usize,
    pub value: f64,
}

impl Vertex {
    pub fn new(index: usize, value: f64) -> Self {
        Self { index, value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SharingMode {
    /// Consecutive segments share their common vertex.
    Chained,
    /// Vertices come in `(start, end)` pairs, one pair per segment.
    Disjoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentList {
    mode: SharingMode,
    vertices: Vec<Vertex>,
}

impl SegmentList {
    pub fn chained(vertices: Vec<Vertex>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(invalid("segment list needs at least one vertex"));
        }
        if vertices.windows(2).any(|w| w[0].index >= w[1].index) {
            return Err(invalid("chained vertex indices must be strictly increasing"));
        }
        Ok(Self {
            mode: SharingMode::Chained,
            vertices,
        })
    }

    pub fn disjoint(segments: Vec<(Vertex, Vertex)>) -> Result<Self> {
        if segments.iter().any(|(a, b)| a.index >= b.index) {
            return Err(invalid("segment start must precede its end"));
        }
        Ok(Self {
            mode: SharingMode::Disjoint,
            vertices: segments.into_iter().flat_map(|(a, b)| [a, b]).collect(),
        })
    }

    pub fn mode(&self) -> SharingMode {
        self.mode
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Segments as `(start, end)` vertex pairs.
    pub fn segments(&self) -> Vec<(Vertex, Vertex)> {
        match self.mode {
            SharingMode::Chained => self.vertices.windows(2).map(|w| (w[0], w[1])).collect(),
            SharingMode::Disjoint => self.vertices.chunks(2).map(|c| (c[0], c[1])).collect(),
        }
    }

    pub fn segment_count(&self) -> usize {
        match self.mode {
            SharingMode::Chained => self.vertices.len().saturating_sub(1),
            SharingMode::Disjoint => self.vertices.len() / 2,
        }
    }
}

/// Value of the line through `a` and `b` at `index`, as the decoder computes it.
#[inline]
pub fn interpolate(a: Vertex, b: Vertex, index: usize) -> f64 {
    if index == a.index {
        return a.value;
    }
    if index == b.index {
        return b.value;
    }
    let slope = (b.value - a.value) / (b.index - a.index) as f64;
    a.value + slope * (index - a.index) as f64
}

/// First interior index of segment `(a, b)` whose decoded value misses the tolerance.
fn first_violation(x: &[f64], a: usize, b: usize, eps: f64) -> Option<usize> {
    let (va, vb) = (Vertex::new(a, x[a]), Vertex::new(b, x[b]));
    (a + 1..b).find(|&k| (interpolate(va, vb, k) - x[k]).abs() > eps)
}

/// Largest `e` in `a+1..=end` such that `(a, e)` decodes within tolerance.
fn largest_feasible_end(x: &[f64], a: usize, mut end: usize, eps: f64) -> usize {
    while end > a + 1 && first_violation(x, a, end, eps).is_some() {
        end -= 1;
    }
    end
}

fn check_len(ts: &TimeSeries) -> Result<()> {
    if ts.len() < 2 {
        return Err(invalid(format!("need at least 2 samples, got {}", ts.len())));
    }
    Ok(())
}

/// Slope interval of lines from an anchor that pass within `eps` of every point added so far.
#[derive(Debug, Clone, Copy)]
struct Cone {
    low: f64,
    high: f64,
}

impl Cone {
    const OPEN: Cone = Cone {
        low: f64::NEG_INFINITY,
        high: f64::INFINITY,
    };

    /// Narrows the cone with the point at offset `dt` whose value differs from
    /// the anchor by `diff`.
    fn narrow(&mut self, diff: f64, dt: f64, eps: f64, ops: &mut OpCount) {
        let high = (diff + eps) / dt;
        let low = (diff - eps) / dt;
        ops.add(1);
        ops.sub(1);
        ops.div(2);
        ops.cmp(2);
        self.high = self.high.min(high);
        self.low = self.low.max(low);
    }

    fn contains(&self, slope: f64, ops: &mut OpCount) -> bool {
        ops.cmp(2);
        self.low <= slope && slope <= self.high
    }
}

/// Lightweight Temporal Compression.
///
/// From the current anchor, each new sample is accepted while the line to its
/// actual value lies inside the cone of lines acceptable for every sample in
/// between; the cone is then narrowed by the new sample's `±eps` band. The
/// first rejected sample `s` closes the segment at `s - 1`, which becomes
/// the next anchor.
pub fn ltc_compress(ts: &TimeSeries, tol: Tolerance) -> Result<(SegmentList, OpCount)> {
    check_len(ts)?;
    let x = ts.samples();
    let eps = tol.epsilon();
    let n = x.len();
    let mut ops = OpCount::ZERO;
    let mut vertices = vec![Vertex::new(0, x[0])];

    let mut anchor = 0;
    let mut cone = Cone::OPEN;
    let mut s = 1;
    while s < n {
        let dt = (s - anchor) as f64;
        let diff = x[s] - x[anchor];
        ops.sub(1);
        if s > anchor + 1 {
            let slope = diff / dt;
            ops.div(1);
            if !cone.contains(slope, &mut ops) {
                let end = largest_feasible_end(x, anchor, s - 1, eps);
                vertices.push(Vertex::new(end, x[end]));
                anchor = end;
                cone = Cone::OPEN;
                s = end + 1;
                continue;
            }
        }
        cone.narrow(diff, dt, eps, &mut ops);
        s += 1;
    }
    let end = largest_feasible_end(x, anchor, n - 1, eps);
    if end != n - 1 {
        // Guard path: finish with the feasible prefix and chain the remainder.
        let rest = ts.window(end, n - end)?;
        let (tail, tail_ops) = ltc_compress(&rest, tol)?;
        ops += tail_ops;
        vertices.extend(
            tail.vertices
                .into_iter()
                .map(|v| Vertex::new(v.index + end, v.value)),
        );
    } else if vertices.last().map(|v| v.index) != Some(n - 1) {
        vertices.push(Vertex::new(n - 1, x[n - 1]));
    }
    Ok((SegmentList::chained(vertices)?, ops))
}

/// For each start `i`, the farthest `j > i` whose segment `(i, j)` is feasible.
fn longest_feasible_segments(x: &[f64], eps: f64, ops: &mut OpCount) -> Vec<usize> {
    let n = x.len();
    (0..n - 1)
        .map(|i| {
            let mut cone = Cone::OPEN;
            let mut best = i + 1;
            for j in i + 1..n {
                let dt = (j - i) as f64;
                let diff = x[j] - x[i];
                ops.sub(1);
                if j > i + 1 {
                    ops.div(1);
                    if cone.contains(diff / dt, ops) {
                        best = j;
                    }
                }
                cone.narrow(diff, dt, eps, ops);
                ops.cmp(1);
                if cone.low > cone.high {
                    break;
                }
            }
            largest_feasible_end(x, i, best, eps)
        })
        .collect()
}

/// PLAMLiS: longest feasible segment from every sample, then a greedy set
/// cover picking at each round the segment covering the most still-uncovered
/// samples (ties go to the smallest start index).
pub fn plamlis_compress(ts: &TimeSeries, tol: Tolerance) -> Result<(SegmentList, OpCount)> {
    check_len(ts)?;
    let x = ts.samples();
    let n = x.len();
    let mut ops = OpCount::ZERO;
    let ends = longest_feasible_segments(x, tol.epsilon(), &mut ops);
    let chosen = greedy_cover(n, &ends, &mut ops);

    let mut segments: Vec<(Vertex, Vertex)> = chosen
        .into_iter()
        .map(|i| (Vertex::new(i, x[i]), Vertex::new(ends[i], x[ends[i]])))
        .collect();
    segments.sort_by_key(|(a, _)| a.index);
    Ok((SegmentList::disjoint(segments)?, ops))
}

/// Greedy cover of `0..n` by the intervals `[i, ends[i]]`; returns chosen start indices in pick order.
pub(crate) fn greedy_cover(n: usize, ends: &[usize], ops: &mut OpCount) -> Vec<usize> {
    let mut covered = vec![false; n];
    let mut remaining = n;
    let mut available = vec![true; ends.len()];
    let mut chosen = Vec::new();
    while remaining > 0 {
        let mut best: Option<(usize, usize)> = None;
        for (i, &end) in ends.iter().enumerate() {
            if !available[i] {
                continue;
            }
            let gain = covered[i..=end].iter().filter(|c| !**c).count();
            ops.cmp((end - i + 1) as u64 + 1);
            if gain > best.map_or(0, |(_, g)| g) {
                best = Some((i, gain));
            }
        }
        let (i, gain) = best.expect("intervals cover every sample");
        available[i] = false;
        covered[i..=ends[i]].iter_mut().for_each(|c| *c = true);
        remaining -= gain;
        chosen.push(i);
    }
    chosen
}

/// Enhanced PLAMLiS: top-down splitting of `(first, last)` at the
/// maximum-error sample until every segment meets the tolerance.
pub fn eplamlis_compress(ts: &TimeSeries, tol: Tolerance) -> Result<(SegmentList, OpCount)> {
    let (list, ops, _) = eplamlis_traced(ts, tol)?;
    Ok((list, ops))
}

/// Same as [`eplamlis_compress`], also returning split indices in the order they happened.
pub fn eplamlis_traced(ts: &TimeSeries, tol: Tolerance) -> Result<(SegmentList, OpCount, Vec<usize>)> {
    check_len(ts)?;
    let x = ts.samples();
    let eps = tol.epsilon();
    let n = x.len();
    let mut ops = OpCount::ZERO;
    let mut splits = Vec::new();
    let mut breakpoints = vec![0, n - 1];
    let mut stack = vec![(0, n - 1)];

    while let Some((a, b)) = stack.pop() {
        if b <= a + 1 {
            continue;
        }
        let (va, vb) = (Vertex::new(a, x[a]), Vertex::new(b, x[b]));
        ops.sub(1);
        ops.div(1);
        let mut worst = (a, -1.0_f64);
        for k in a + 1..b {
            let err = (interpolate(va, vb, k) - x[k]).abs();
            ops.mul(1);
            ops.add(1);
            ops.sub(1);
            ops.cmp(1);
            if err > worst.1 {
                worst = (k, err);
            }
        }
        ops.cmp(1);
        if worst.1 > eps {
            let k = worst.0;
            splits.push(k);
            breakpoints.push(k);
            // Right half first so the left half is processed next.
            stack.push((k, b));
            stack.push((a, k));
        }
    }
    breakpoints.sort_unstable();
    let vertices = breakpoints.into_iter().map(|i| Vertex::new(i, x[i])).collect();
    Ok((SegmentList::chained(vertices)?, ops, splits))
}

/// Reconstructs `length` samples by linear interpolation of the covering segment.
///
/// In disjoint mode a sample covered by several segments takes its value
/// from the first one in list order.
pub fn pla_decompress(seg: &SegmentList, length: usize) -> Result<TimeSeries> {
    if length == 0 {
        return Err(invalid("length must be positive"));
    }
    let mut out = vec![f64::NAN; length];
    let mut filled = vec![false; length];
    let mut fill = |a: Vertex, b: Vertex| -> Result<()> {
        if b.index >= length {
            return Err(invalid(format!("vertex index {} beyond length {length}", b.index)));
        }
        for k in a.index..=b.index {
            if !filled[k] {
                out[k] = interpolate(a, b, k);
                filled[k] = true;
            }
        }
        Ok(())
    };
    match seg.mode {
        SharingMode::Chained => {
            let v = &seg.vertices;
            if v.len() == 1 {
                fill(v[0], v[0])?;
            }
            for w in v.windows(2) {
                fill(w[0], w[1])?;
            }
        }
        SharingMode::Disjoint => {
            for c in seg.vertices.chunks(2) {
                fill(c[0], c[1])?;
            }
        }
    }
    if let Some(gap) = filled.iter().position(|f| !f) {
        return Err(invalid(format!("no segment covers sample {gap}")));
    }
    TimeSeries::new(out)
}
