use std::ops::Range;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::features::{FeaturePlanes, INPUT_PLANES, SPATIAL_PLANES};
use super::NetError;

/// Network shape: residual blocks, trunk channels, board size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arch {
    pub blocks: usize,
    pub channels: usize,
    pub board_size: usize,
}

impl Arch {
    pub fn new(blocks: usize, channels: usize, board_size: usize) -> Arch {
        Arch { blocks, channels, board_size }
    }

    pub fn points(&self) -> usize {
        self.board_size * self.board_size
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.channels == 0 || !(2..=19).contains(&self.board_size) || self.blocks > 64 {
            return Err(NetError::Arch(format!("unsupported architecture {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct BlockLayout {
    w1: Range<usize>,
    b1: Range<usize>,
    w2: Range<usize>,
    b2: Range<usize>,
}

/// A move head: 1x1 convolution to one logit per point plus a pass logit
/// read from the pooled trunk.
#[derive(Clone, Debug)]
struct MoveHeadLayout {
    w: Range<usize>,
    b: Range<usize>,
    pass_w: Range<usize>,
    pass_b: Range<usize>,
}

/// Offsets of every tensor in the flat parameter vector. The order here is
/// the order tensors appear in the weights file.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    stem_w: Range<usize>,
    stem_b: Range<usize>,
    blocks: Vec<BlockLayout>,
    policy: MoveHeadLayout,
    opponent: MoveHeadLayout,
    value_w1: Range<usize>,
    value_b1: Range<usize>,
    value_w2: Range<usize>,
    value_b2: Range<usize>,
    own_w: Range<usize>,
    own_b: Range<usize>,
    pub total: usize,
}

impl Layout {
    pub fn new(arch: &Arch) -> Layout {
        let c = arch.channels;
        let mut at = 0;
        let mut take = |len: usize| {
            let r = at..at + len;
            at += len;
            r
        };
        let stem_w = take(c * INPUT_PLANES * 9);
        let stem_b = take(c);
        let blocks = (0..arch.blocks)
            .map(|_| BlockLayout { w1: take(c * c * 9), b1: take(c), w2: take(c * c * 9), b2: take(c) })
            .collect();
        let mut head = || MoveHeadLayout { w: take(c), b: take(1), pass_w: take(c), pass_b: take(1) };
        let policy = head();
        let opponent = head();
        let value_w1 = take(c * c);
        let value_b1 = take(c);
        let value_w2 = take(c);
        let value_b2 = take(1);
        let own_w = take(c);
        let own_b = take(1);
        Layout {
            stem_w,
            stem_b,
            blocks,
            policy,
            opponent,
            value_w1,
            value_b1,
            value_w2,
            value_b2,
            own_w,
            own_b,
            total: at,
        }
    }

    /// Ranges of the final layer of each head, grouped by head name.
    pub fn head_outputs(&self) -> Vec<(&'static str, Vec<Range<usize>>)> {
        vec![
            ("policy", vec![self.policy.w.clone(), self.policy.b.clone(), self.policy.pass_w.clone(), self.policy.pass_b.clone()]),
            ("opponent", vec![self.opponent.w.clone(), self.opponent.b.clone(), self.opponent.pass_w.clone(), self.opponent.pass_b.clone()]),
            ("value", vec![self.value_w2.clone(), self.value_b2.clone()]),
            ("ownership", vec![self.own_w.clone(), self.own_b.clone()]),
        ]
    }

    /// Parameter tensors and their fan-in, for initialization.
    fn weights_with_fan_in(&self, arch: &Arch) -> Vec<(Range<usize>, usize)> {
        let c = arch.channels;
        let mut out = vec![(self.stem_w.clone(), INPUT_PLANES * 9)];
        for b in &self.blocks {
            out.push((b.w1.clone(), c * 9));
            out.push((b.w2.clone(), c * 9));
        }
        out.push((self.value_w1.clone(), c));
        out
    }
}

/// One evaluated position.
#[derive(Clone, Debug, PartialEq)]
pub struct NetOutput {
    /// Move distribution over `points + 1` entries (pass last); exactly zero
    /// on illegal moves.
    pub policy: Vec<f64>,
    pub value: f64,
    /// Ownership in (-1, 1) per point, side to move's perspective.
    pub ownership: Vec<f64>,
    /// Predicted opponent reply, over `points + 1` entries.
    pub opponent: Vec<f64>,
}

/// Activations kept for the backward pass.
pub(crate) struct Cache {
    batch: usize,
    x_col: Vec<f64>,
    stem_out: Vec<f64>,
    /// Per block: input, im2col of input, inner activation, im2col of it, output.
    blocks: Vec<BlockCache>,
    pooled: Vec<f64>,
    value_hidden: Vec<f64>,
    pub outputs: Vec<NetOutput>,
}

struct BlockCache {
    col_in: Vec<f64>,
    inner: Vec<f64>,
    col_inner: Vec<f64>,
    out: Vec<f64>,
}

/// Gradient of the loss with respect to the raw head outputs.
pub(crate) struct HeadGrads {
    /// d/d policy logits, `batch × (points + 1)`.
    pub policy: Vec<f64>,
    /// d/d opponent logits, `batch × (points + 1)`.
    pub opponent: Vec<f64>,
    /// d/d value pre-activation, `batch`.
    pub value: Vec<f64>,
    /// d/d ownership pre-activation, `batch × points`.
    pub ownership: Vec<f64>,
}

/// Small residual convolutional policy/value network. Parameters are kept
/// exactly representable as `f32` so checkpoints round-trip bit-exactly;
/// arithmetic is done in `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    arch: Arch,
    pub(crate) params: Vec<f64>,
}

/// `c = beta * c + op(a) * op(b)` with `op(a)` of shape m×k and `op(b)` k×n,
/// all row-major.
#[allow(clippy::too_many_arguments)]
fn gemm(m: usize, k: usize, n: usize, a: &[f64], ta: bool, b: &[f64], tb: bool, c: &mut [f64], beta: f64) {
    let (rsa, csa) = if ta { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if tb { (1, k as isize) } else { (n as isize, 1) };
    debug_assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    // SAFETY: the slices hold at least m·k, k·n and m·n elements and the
    // strides above address exactly those row-major layouts.
    unsafe {
        matrixmultiply::dgemm(
            m, k, n, 1.0, a.as_ptr(), rsa, csa, b.as_ptr(), rsb, csb, beta, c.as_mut_ptr(), n as isize, 1,
        );
    }
}

/// 3x3 same-padding patches: `(channels·9) × (batch·n²)`.
fn im2col(x: &[f64], channels: usize, batch: usize, n: usize) -> Vec<f64> {
    let p = n * n;
    let cols = batch * p;
    let mut out = vec![0.0; channels * 9 * cols];
    for ci in 0..channels {
        for k in 0..9 {
            let (dy, dx) = (k as isize / 3 - 1, k as isize % 3 - 1);
            let row = &mut out[(ci * 9 + k) * cols..(ci * 9 + k + 1) * cols];
            let src = &x[ci * cols..(ci + 1) * cols];
            for b in 0..batch {
                for y in 0..n {
                    let sy = y as isize + dy;
                    if sy < 0 || sy >= n as isize {
                        continue;
                    }
                    for xx in 0..n {
                        let sx = xx as isize + dx;
                        if sx < 0 || sx >= n as isize {
                            continue;
                        }
                        row[b * p + y * n + xx] = src[b * p + sy as usize * n + sx as usize];
                    }
                }
            }
        }
    }
    out
}

/// Adjoint of [`im2col`]: scatter-add patch gradients back onto the input.
fn col2im(col: &[f64], channels: usize, batch: usize, n: usize, dx_out: &mut [f64]) {
    let p = n * n;
    let cols = batch * p;
    for ci in 0..channels {
        for k in 0..9 {
            let (dy, dx) = (k as isize / 3 - 1, k as isize % 3 - 1);
            let row = &col[(ci * 9 + k) * cols..(ci * 9 + k + 1) * cols];
            let dst = &mut dx_out[ci * cols..(ci + 1) * cols];
            for b in 0..batch {
                for y in 0..n {
                    let sy = y as isize + dy;
                    if sy < 0 || sy >= n as isize {
                        continue;
                    }
                    for xx in 0..n {
                        let sx = xx as isize + dx;
                        if sx < 0 || sx >= n as isize {
                            continue;
                        }
                        dst[b * p + sy as usize * n + sx as usize] += row[b * p + y * n + xx];
                    }
                }
            }
        }
    }
}

/// `out[c][j] += bias[c]` over rows of length `cols`.
fn add_bias(out: &mut [f64], bias: &[f64], cols: usize) {
    for (row, &b) in out.chunks_mut(cols).zip(bias) {
        row.iter_mut().for_each(|v| *v += b);
    }
}

fn relu(v: &mut [f64]) {
    v.iter_mut().for_each(|x| {
        if *x < 0.0 {
            *x = 0.0
        }
    });
}

fn row_sums(m: &[f64], cols: usize, out: &mut [f64]) {
    for (row, o) in m.chunks(cols).zip(out.iter_mut()) {
        *o += row.iter().sum::<f64>();
    }
}

/// Softmax over entries with `mask` true (all entries when `mask` is None).
fn softmax(logits: &[f64], mask: Option<&[bool]>) -> Vec<f64> {
    let on = |i: usize| mask.is_none_or(|m| m[i]);
    let max = (0..logits.len()).filter(|&i| on(i)).map(|i| logits[i]).fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = (0..logits.len()).map(|i| if on(i) { (logits[i] - max).exp() } else { 0.0 }).collect();
    let total: f64 = out.iter().sum();
    if total > 0.0 && total.is_finite() {
        out.iter_mut().for_each(|x| *x /= total);
    }
    out
}

impl Network {
    /// Training initialization: He-normal trunk and value hidden layer,
    /// zero biases, zero final layers in every head (so the fresh network
    /// outputs a uniform policy and value 0).
    pub fn new<R: Rng + ?Sized>(arch: Arch, rng: &mut R) -> Result<Network, NetError> {
        arch.validate()?;
        let layout = Layout::new(&arch);
        let mut params = vec![0.0; layout.total];
        for (range, fan_in) in layout.weights_with_fan_in(&arch) {
            let std = (2.0 / fan_in as f64).sqrt();
            for p in &mut params[range] {
                let z: f64 = StandardNormal.sample(rng);
                *p = z * std;
            }
        }
        let mut net = Network { arch, params };
        net.round_to_f32();
        Ok(net)
    }

    /// Every parameter (biases and head outputs included) drawn from
    /// N(0, scale²/fan-in-ish); for tests that must exercise every path.
    pub fn random<R: Rng + ?Sized>(arch: Arch, scale: f64, rng: &mut R) -> Result<Network, NetError> {
        arch.validate()?;
        let layout = Layout::new(&arch);
        let params = (0..layout.total)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                ((z * scale) as f32) as f64
            })
            .collect();
        Ok(Network { arch, params })
    }

    pub fn from_params(arch: Arch, params: Vec<f64>) -> Result<Network, NetError> {
        arch.validate()?;
        let expect = Layout::new(&arch).total;
        if params.len() != expect {
            return Err(NetError::Arch(format!("expected {expect} parameters, got {}", params.len())));
        }
        Ok(Network { arch, params })
    }

    pub fn arch(&self) -> Arch {
        self.arch
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub(crate) fn layout(&self) -> Layout {
        Layout::new(&self.arch)
    }

    pub(crate) fn round_to_f32(&mut self) {
        self.params.iter_mut().for_each(|p| *p = (*p as f32) as f64);
    }

    /// Set the final layer of every head to zero.
    pub fn zero_head_outputs(&mut self) {
        for (_, ranges) in self.layout().head_outputs() {
            for r in ranges {
                self.params[r].iter_mut().for_each(|p| *p = 0.0);
            }
        }
    }

    fn check_input(&self, f: &FeaturePlanes, legal: &[bool]) -> Result<(), NetError> {
        let p = self.arch.points();
        if f.size != self.arch.board_size || f.planes.len() != SPATIAL_PLANES * p {
            return Err(NetError::Shape(format!(
                "features for a {}x{} board, network expects {}x{}",
                f.size, f.size, self.arch.board_size, self.arch.board_size
            )));
        }
        if legal.len() != p + 1 {
            return Err(NetError::Shape(format!("legal mask has {} entries, expected {}", legal.len(), p + 1)));
        }
        Ok(())
    }

    /// Evaluate a batch of positions.
    pub fn forward(&self, inputs: &[(&FeaturePlanes, &[bool])]) -> Result<Vec<NetOutput>, NetError> {
        Ok(self.forward_cached(inputs)?.outputs)
    }

    pub fn forward_one(&self, f: &FeaturePlanes, legal: &[bool]) -> Result<NetOutput, NetError> {
        Ok(self.forward(&[(f, legal)])?.pop().expect("one output"))
    }

    pub(crate) fn forward_cached(&self, inputs: &[(&FeaturePlanes, &[bool])]) -> Result<Cache, NetError> {
        for (f, l) in inputs {
            self.check_input(f, l)?;
        }
        let lay = self.layout();
        let w = &self.params;
        let c = self.arch.channels;
        let n = self.arch.board_size;
        let p = n * n;
        let batch = inputs.len();
        let cols = batch * p;

        let mut x = vec![0.0; INPUT_PLANES * cols];
        for (b, (f, _)) in inputs.iter().enumerate() {
            for k in 0..SPATIAL_PLANES {
                for i in 0..p {
                    x[k * cols + b * p + i] = f.planes[k * p + i] as f64;
                }
            }
            for i in 0..p {
                x[SPATIAL_PLANES * cols + b * p + i] = f.komi as f64;
                x[(SPATIAL_PLANES + 1) * cols + b * p + i] = f.passes as f64;
            }
        }

        let x_col = im2col(&x, INPUT_PLANES, batch, n);
        let mut h = vec![0.0; c * cols];
        gemm(c, INPUT_PLANES * 9, cols, &w[lay.stem_w.clone()], false, &x_col, false, &mut h, 0.0);
        add_bias(&mut h, &w[lay.stem_b.clone()], cols);
        relu(&mut h);
        let stem_out = h.clone();

        let mut blocks = Vec::with_capacity(lay.blocks.len());
        for bl in &lay.blocks {
            let col_in = im2col(&h, c, batch, n);
            let mut inner = vec![0.0; c * cols];
            gemm(c, c * 9, cols, &w[bl.w1.clone()], false, &col_in, false, &mut inner, 0.0);
            add_bias(&mut inner, &w[bl.b1.clone()], cols);
            relu(&mut inner);
            let col_inner = im2col(&inner, c, batch, n);
            let mut out = h.clone();
            gemm(c, c * 9, cols, &w[bl.w2.clone()], false, &col_inner, false, &mut out, 1.0);
            add_bias(&mut out, &w[bl.b2.clone()], cols);
            relu(&mut out);
            h = out.clone();
            blocks.push(BlockCache { col_in, inner, col_inner, out });
        }
        let trunk = &h;

        // Global average pool: c × batch.
        let mut pooled = vec![0.0; c * batch];
        for ch in 0..c {
            for b in 0..batch {
                pooled[ch * batch + b] = trunk[ch * cols + b * p..ch * cols + (b + 1) * p].iter().sum::<f64>() / p as f64;
            }
        }

        let move_logits = |head: &MoveHeadLayout| -> Vec<f64> {
            let mut logits = vec![0.0; batch * (p + 1)];
            let hw = &w[head.w.clone()];
            let pw = &w[head.pass_w.clone()];
            for b in 0..batch {
                let row = &mut logits[b * (p + 1)..(b + 1) * (p + 1)];
                for i in 0..p {
                    row[i] = w[head.b.start] + (0..c).map(|ch| hw[ch] * trunk[ch * cols + b * p + i]).sum::<f64>();
                }
                row[p] = w[head.pass_b.start] + (0..c).map(|ch| pw[ch] * pooled[ch * batch + b]).sum::<f64>();
            }
            logits
        };
        let policy_logits = move_logits(&lay.policy);
        let opponent_logits = move_logits(&lay.opponent);

        let mut value_hidden = vec![0.0; c * batch];
        gemm(c, c, batch, &w[lay.value_w1.clone()], false, &pooled, false, &mut value_hidden, 0.0);
        add_bias(&mut value_hidden, &w[lay.value_b1.clone()], batch);
        relu(&mut value_hidden);

        let mut outputs = Vec::with_capacity(batch);
        for (b, (_, legal)) in inputs.iter().enumerate() {
            let vw2 = &w[lay.value_w2.clone()];
            let v_pre = w[lay.value_b2.start] + (0..c).map(|j| vw2[j] * value_hidden[j * batch + b]).sum::<f64>();
            let ow = &w[lay.own_w.clone()];
            let ownership = (0..p)
                .map(|i| (w[lay.own_b.start] + (0..c).map(|ch| ow[ch] * trunk[ch * cols + b * p + i]).sum::<f64>()).tanh())
                .collect();
            outputs.push(NetOutput {
                policy: softmax(&policy_logits[b * (p + 1)..(b + 1) * (p + 1)], Some(legal)),
                value: v_pre.tanh(),
                ownership,
                opponent: softmax(&opponent_logits[b * (p + 1)..(b + 1) * (p + 1)], None),
            });
        }
        Ok(Cache { batch, x_col, stem_out, blocks, pooled, value_hidden, outputs })
    }

    /// Parameter gradient given gradients at the head outputs.
    pub(crate) fn backward(&self, cache: &Cache, d: &HeadGrads) -> Vec<f64> {
        let lay = self.layout();
        let w = &self.params;
        let c = self.arch.channels;
        let n = self.arch.board_size;
        let p = n * n;
        let batch = cache.batch;
        let cols = batch * p;
        let mut g = vec![0.0; w.len()];
        let trunk: &[f64] = cache.blocks.last().map(|b| b.out.as_slice()).unwrap_or(&cache.stem_out);

        let mut d_trunk = vec![0.0; c * cols];
        let mut d_pooled = vec![0.0; c * batch];

        for (head, dl) in [(&lay.policy, &d.policy), (&lay.opponent, &d.opponent)] {
            for b in 0..batch {
                let row = &dl[b * (p + 1)..(b + 1) * (p + 1)];
                for ch in 0..c {
                    let t = &trunk[ch * cols + b * p..ch * cols + (b + 1) * p];
                    let mut acc = 0.0;
                    for i in 0..p {
                        acc += row[i] * t[i];
                        d_trunk[ch * cols + b * p + i] += w[head.w.start + ch] * row[i];
                    }
                    g[head.w.start + ch] += acc;
                    g[head.pass_w.start + ch] += row[p] * cache.pooled[ch * batch + b];
                    d_pooled[ch * batch + b] += w[head.pass_w.start + ch] * row[p];
                }
                g[head.b.start] += row[..p].iter().sum::<f64>();
                g[head.pass_b.start] += row[p];
            }
        }

        // Value head.
        let mut d_hidden = vec![0.0; c * batch];
        for b in 0..batch {
            let dv = d.value[b];
            g[lay.value_b2.start] += dv;
            for j in 0..c {
                let hj = cache.value_hidden[j * batch + b];
                g[lay.value_w2.start + j] += dv * hj;
                if hj > 0.0 {
                    d_hidden[j * batch + b] = w[lay.value_w2.start + j] * dv;
                }
            }
        }
        gemm(c, batch, c, &d_hidden, false, &cache.pooled, true, &mut g[lay.value_w1.clone()], 1.0);
        row_sums(&d_hidden, batch, &mut g[lay.value_b1.clone()]);
        gemm(c, c, batch, &w[lay.value_w1.clone()], true, &d_hidden, false, &mut d_pooled, 1.0);

        // Ownership head.
        for b in 0..batch {
            let row = &d.ownership[b * p..(b + 1) * p];
            g[lay.own_b.start] += row.iter().sum::<f64>();
            for ch in 0..c {
                let t = &trunk[ch * cols + b * p..ch * cols + (b + 1) * p];
                g[lay.own_w.start + ch] += row.iter().zip(t).map(|(a, b)| a * b).sum::<f64>();
                let wo = w[lay.own_w.start + ch];
                for i in 0..p {
                    d_trunk[ch * cols + b * p + i] += wo * row[i];
                }
            }
        }

        // Pooling.
        for ch in 0..c {
            for b in 0..batch {
                let dg = d_pooled[ch * batch + b] / p as f64;
                d_trunk[ch * cols + b * p..ch * cols + (b + 1) * p].iter_mut().for_each(|x| *x += dg);
            }
        }

        // Residual blocks, last to first.
        let mut dh = d_trunk;
        for (k, bl) in lay.blocks.iter().enumerate().rev() {
            let bc = &cache.blocks[k];
            for (dz, &o) in dh.iter_mut().zip(&bc.out) {
                if o <= 0.0 {
                    *dz = 0.0;
                }
            }
            let dz = dh;
            gemm(c, cols, c * 9, &dz, false, &bc.col_inner, true, &mut g[bl.w2.clone()], 1.0);
            row_sums(&dz, cols, &mut g[bl.b2.clone()]);
            let mut dcol = vec![0.0; c * 9 * cols];
            gemm(c * 9, c, cols, &w[bl.w2.clone()], true, &dz, false, &mut dcol, 0.0);
            let mut d_inner = vec![0.0; c * cols];
            col2im(&dcol, c, batch, n, &mut d_inner);
            for (di, &a) in d_inner.iter_mut().zip(&bc.inner) {
                if a <= 0.0 {
                    *di = 0.0;
                }
            }
            gemm(c, cols, c * 9, &d_inner, false, &bc.col_in, true, &mut g[bl.w1.clone()], 1.0);
            row_sums(&d_inner, cols, &mut g[bl.b1.clone()]);
            gemm(c * 9, c, cols, &w[bl.w1.clone()], true, &d_inner, false, &mut dcol, 0.0);
            // Skip connection carries dz straight through.
            let mut d_in = dz;
            col2im(&dcol, c, batch, n, &mut d_in);
            dh = d_in;
        }

        // Stem.
        for (dz, &o) in dh.iter_mut().zip(&cache.stem_out) {
            if o <= 0.0 {
                *dz = 0.0;
            }
        }
        gemm(c, cols, INPUT_PLANES * 9, &dh, false, &cache.x_col, true, &mut g[lay.stem_w.clone()], 1.0);
        row_sums(&dh, cols, &mut g[lay.stem_b.clone()]);
        g
    }
}
