//! Random ternary connection matrices.
//!
//! Row `i` of the matrix lists the incoming links of neuron `i`, so the
//! recurrent field is `S_i = sum_j W_ij x_j`. Each ordered pair `(i, j)`,
//! diagonal included, independently carries a link with probability
//! `mean_degree / n_neurons`. A link is `+1` with probability
//! `asymmetry + 1/2` and `-1` otherwise.

use rand_distr::{Bernoulli, Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::dynamics::state::{words_for, State};
use crate::error::{Error, Result};
use crate::rng::{self, streams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirParams {
    pub n_neurons: usize,
    pub mean_degree: f64,
    pub asymmetry: f64,
    pub seed: u64,
}

impl ReservoirParams {
    pub fn new(n_neurons: usize, mean_degree: f64, asymmetry: f64, seed: u64) -> Self {
        ReservoirParams {
            n_neurons,
            mean_degree,
            asymmetry,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_neurons == 0 {
            return Err(Error::domain("n_neurons", "must be positive"));
        }
        if self.n_neurons > u32::MAX as usize {
            return Err(Error::domain("n_neurons", "exceeds u32 index range"));
        }
        let k = self.mean_degree;
        if !k.is_finite() || k < 0.0 || k > self.n_neurons as f64 {
            return Err(Error::domain(
                "mean_degree",
                format!("{k} not in [0, {}]", self.n_neurons),
            ));
        }
        let d = self.asymmetry;
        if !d.is_finite() || d <= -0.5 || d >= 0.5 {
            return Err(Error::domain(
                "asymmetry",
                format!("{d} not in open interval (-0.5, 0.5)"),
            ));
        }
        Ok(())
    }

    /// Link probability `alpha = <k> / N`.
    pub fn link_probability(&self) -> f64 {
        (self.mean_degree / self.n_neurons as f64).clamp(0.0, 1.0)
    }

    /// Probability `p = d + 1/2` that a link is `+1`.
    pub fn positive_probability(&self) -> f64 {
        self.asymmetry + 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub col: u32,
    pub sign: i8,
}

/// Strategy used to evaluate `sum_j W_ij x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKernel {
    /// Walk each row's link list and gather state bits.
    Sparse,
    /// Per-row bitmasks of positive and negative links, evaluated with popcounts.
    Packed,
}

// Above this link probability one Bernoulli draw per pair beats geometric skips.
const DENSE_ALPHA: f64 = 0.05;

// Row masks are only built when they fit in this budget.
const PACKED_BYTES_LIMIT: usize = 512 << 20;

#[derive(Debug, Clone)]
struct PackedRows {
    words_per_row: usize,
    positive: Vec<u64>,
    negative: Vec<u64>,
    // (#positive links, #negative links) per row
    degrees: Vec<(i32, i32)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ReservoirJson", into = "ReservoirJson")]
pub struct Reservoir {
    params: ReservoirParams,
    row_offsets: Vec<usize>,
    links: Vec<Link>,
    packed: Option<PackedRows>,
}

impl PartialEq for Reservoir {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.row_offsets == other.row_offsets
            && self.links == other.links
    }
}

/// Generates the reservoir described by `params`; deterministic in `params.seed`.
pub fn generate_reservoir(params: ReservoirParams) -> Result<Reservoir> {
    params.validate()?;
    let n = params.n_neurons;
    let alpha = params.link_probability();
    let p = params.positive_probability();
    let mut rng = rng::stream(params.seed, streams::WEIGHTS);

    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut links = Vec::with_capacity((params.mean_degree * n as f64 * 1.1) as usize + 16);
    row_offsets.push(0);

    let positive = Bernoulli::new(p).expect("p in (0, 1)");
    if alpha >= DENSE_ALPHA {
        let link = Bernoulli::new(alpha).expect("alpha in [0, 1]");
        for _ in 0..n {
            for j in 0..n as u32 {
                if link.sample(&mut rng) {
                    let sign = if positive.sample(&mut rng) { 1 } else { -1 };
                    links.push(Link { col: j, sign });
                }
            }
            row_offsets.push(links.len());
        }
    } else if alpha > 0.0 {
        // Geometric gaps between successive links in row-major order give the
        // same law as one Bernoulli(alpha) draw per ordered pair.
        let gaps = Geometric::new(alpha).expect("alpha in (0, 1)");
        let total = (n as u64) * (n as u64);
        let mut flat = gaps.sample(&mut rng);
        let mut row = 0usize;
        while flat < total {
            let i = (flat / n as u64) as usize;
            let j = (flat % n as u64) as u32;
            while row < i {
                row_offsets.push(links.len());
                row += 1;
            }
            let sign = if positive.sample(&mut rng) { 1 } else { -1 };
            links.push(Link { col: j, sign });
            flat = flat.saturating_add(1).saturating_add(gaps.sample(&mut rng));
        }
    }
    while row_offsets.len() <= n {
        row_offsets.push(links.len());
    }
    Ok(Reservoir::assemble(params, row_offsets, links))
}

impl Reservoir {
    fn assemble(params: ReservoirParams, row_offsets: Vec<usize>, links: Vec<Link>) -> Self {
        let mut r = Reservoir {
            params,
            row_offsets,
            links,
            packed: None,
        };
        let words = words_for(r.n_neurons());
        let bytes = 2 * r.n_neurons() * words * std::mem::size_of::<u64>();
        let mean_links = r.links.len() as f64 / r.n_neurons() as f64;
        if bytes <= PACKED_BYTES_LIMIT && mean_links > words as f64 {
            r.packed = Some(r.build_packed());
        }
        r
    }

    fn build_packed(&self) -> PackedRows {
        let n = self.n_neurons();
        let words_per_row = words_for(n);
        let mut positive = vec![0u64; n * words_per_row];
        let mut negative = vec![0u64; n * words_per_row];
        let mut degrees = Vec::with_capacity(n);
        for i in 0..n {
            let (mut pos, mut neg) = (0, 0);
            for link in self.row(i) {
                let j = link.col as usize;
                let target = if link.sign > 0 {
                    pos += 1;
                    &mut positive
                } else {
                    neg += 1;
                    &mut negative
                };
                target[i * words_per_row + (j >> 6)] |= 1u64 << (j & 63);
            }
            degrees.push((pos, neg));
        }
        PackedRows {
            words_per_row,
            positive,
            negative,
            degrees,
        }
    }

    /// Returns a copy that evaluates fields with the given kernel.
    pub fn with_field_kernel(mut self, kernel: FieldKernel) -> Self {
        match kernel {
            FieldKernel::Sparse => self.packed = None,
            FieldKernel::Packed => {
                if self.packed.is_none() {
                    self.packed = Some(self.build_packed());
                }
            }
        }
        self
    }

    pub fn field_kernel(&self) -> FieldKernel {
        if self.packed.is_some() {
            FieldKernel::Packed
        } else {
            FieldKernel::Sparse
        }
    }

    pub fn params(&self) -> &ReservoirParams {
        &self.params
    }

    pub fn n_neurons(&self) -> usize {
        self.params.n_neurons
    }

    /// Incoming links of neuron `i`, sorted by source column.
    pub fn row(&self, i: usize) -> &[Link] {
        &self.links[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn positive_link_count(&self) -> usize {
        self.links.iter().filter(|l| l.sign > 0).count()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    /// All links as `(row, col, sign)` triples in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        (0..self.n_neurons())
            .flat_map(move |i| self.row(i).iter().map(move |l| (i, l.col as usize, l.sign)))
    }

    /// Dense row-major copy of the weight matrix.
    pub fn to_dense(&self) -> Vec<Vec<i8>> {
        let n = self.n_neurons();
        let mut dense = vec![vec![0i8; n]; n];
        for (i, j, s) in self.triples() {
            dense[i][j] = s;
        }
        dense
    }

    /// Builds a reservoir from explicit links. `params.seed` is kept as a label.
    pub fn from_links(
        params: ReservoirParams,
        triples: impl IntoIterator<Item = (usize, usize, i8)>,
    ) -> Result<Self> {
        if params.n_neurons == 0 {
            return Err(Error::domain("n_neurons", "must be positive"));
        }
        let n = params.n_neurons;
        let mut all: Vec<(usize, usize, i8)> = Vec::new();
        for (i, j, s) in triples {
            if i >= n || j >= n {
                return Err(Error::InvalidLink {
                    row: i,
                    col: j,
                    sign: s as i64,
                    reason: "index out of range",
                });
            }
            if s != 1 && s != -1 {
                return Err(Error::InvalidLink {
                    row: i,
                    col: j,
                    sign: s as i64,
                    reason: "sign must be +1 or -1",
                });
            }
            all.push((i, j, s));
        }
        all.sort_unstable_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = all
            .windows(2)
            .find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1)
        {
            return Err(Error::InvalidLink {
                row: w[1].0,
                col: w[1].1,
                sign: w[1].2 as i64,
                reason: "duplicate link",
            });
        }
        let mut row_offsets = vec![0usize; n + 1];
        for &(i, _, _) in &all {
            row_offsets[i + 1] += 1;
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        let links = all
            .into_iter()
            .map(|(_, j, s)| Link {
                col: j as u32,
                sign: s,
            })
            .collect();
        Ok(Reservoir::assemble(params, row_offsets, links))
    }

    /// Writes the exact integer recurrent field `sum_j W_ij x_j` of every neuron into `out`.
    pub(crate) fn recurrent_field_into(&self, state: &State, out: &mut [i32]) {
        debug_assert_eq!(state.len(), self.n_neurons());
        debug_assert_eq!(out.len(), self.n_neurons());
        let x = state.words();
        match &self.packed {
            Some(p) => {
                #[cfg(target_arch = "x86_64")]
                if std::arch::is_x86_feature_detected!("popcnt") {
                    // SAFETY: the CPU supports popcnt, checked just above.
                    unsafe { packed_fields_popcnt(p, x, out) };
                    return;
                }
                packed_fields(p, x, out);
            }
            None => {
                for (i, slot) in out.iter_mut().enumerate() {
                    let mut acc = 0i32;
                    for link in self.row(i) {
                        let j = link.col as usize;
                        let on = ((x[j >> 6] >> (j & 63)) & 1) as i32;
                        acc += link.sign as i32 * (2 * on - 1);
                    }
                    *slot = acc;
                }
            }
        }
    }
}

#[inline(always)]
fn packed_fields(p: &PackedRows, x: &[u64], out: &mut [i32]) {
    let w = p.words_per_row;
    for (i, slot) in out.iter_mut().enumerate() {
        let pos = &p.positive[i * w..(i + 1) * w];
        let neg = &p.negative[i * w..(i + 1) * w];
        let mut pos_on = 0u32;
        let mut neg_on = 0u32;
        for k in 0..w {
            pos_on += (pos[k] & x[k]).count_ones();
            neg_on += (neg[k] & x[k]).count_ones();
        }
        let (pd, nd) = p.degrees[i];
        // each link contributes its sign if the source is on, minus it if off
        *slot = (2 * pos_on as i32 - pd) - (2 * neg_on as i32 - nd);
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn packed_fields_popcnt(p: &PackedRows, x: &[u64], out: &mut [i32]) {
    packed_fields(p, x, out)
}

/// Documented JSON form of a reservoir.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReservoirJson {
    pub n_neurons: usize,
    pub mean_degree: f64,
    pub asymmetry: f64,
    pub seed: u64,
    pub links: Vec<(usize, usize, i8)>,
}

impl From<Reservoir> for ReservoirJson {
    fn from(r: Reservoir) -> Self {
        ReservoirJson {
            n_neurons: r.params.n_neurons,
            mean_degree: r.params.mean_degree,
            asymmetry: r.params.asymmetry,
            seed: r.params.seed,
            links: r.triples().collect(),
        }
    }
}

impl TryFrom<ReservoirJson> for Reservoir {
    type Error = Error;

    fn try_from(j: ReservoirJson) -> Result<Self> {
        let params = ReservoirParams::new(j.n_neurons, j.mean_degree, j.asymmetry, j.seed);
        params.validate()?;
        Reservoir::from_links(params, j.links)
    }
}
