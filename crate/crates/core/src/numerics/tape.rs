//! Reverse-mode gradient tape over [`Dense2D`] values.
//!
//! The tape records a fixed repertoire of operations (products, elementwise
//! maps, row gathers and scatters, segment softmax, block reductions) which is
//! enough to express the three encoders, the DistMult decoder and the loss.
//! Shape errors inside the tape are programming errors and panic; encoders
//! validate their inputs before recording anything.

use std::collections::HashMap;

use super::dense::{gemm, softmax_rows, Dense2D};
use super::params::ParameterStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    AddRow(Var, Var),
    Affine(Var, f64),
    Relu(Var),
    LeakyRelu(Var, f64),
    Sigmoid(Var),
    Tanh(Var),
    Softplus(Var),
    GatherRows(Var, Vec<usize>),
    ScatterAddRows(Var, Vec<usize>),
    OverwriteRows(Var, Vec<usize>, Var),
    ScaleBlocks(Var, Var),
    BlockDot(Var, Var),
    SegmentSoftmax(Var, Vec<usize>, usize),
    SoftmaxRows(Var),
    ConcatCols(Vec<Var>),
    ConcatRows(Vec<Var>),
    SliceRows(Var, usize),
    SliceCols(Var, usize),
    Sum(Var),
    Mean(Var),
}

#[derive(Debug)]
struct Node {
    value: Dense2D,
    op: Op,
    needs_grad: bool,
}

#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
    params: Vec<(String, Var)>,
    param_lookup: HashMap<String, Var>,
}

/// Gradients of one scalar root with respect to every recorded value.
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Dense2D>>,
}

impl Gradients {
    pub fn wrt(&self, v: Var) -> Option<&Dense2D> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Dense2D, op: Op) -> Var {
        let needs_grad = match &op {
            Op::Leaf => false,
            _ => op_inputs(&op).iter().any(|v| self.nodes[v.0].needs_grad),
        };
        self.nodes.push(Node {
            value,
            op,
            needs_grad,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Dense2D {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes[v.0].value.shape()
    }

    pub fn constant(&mut self, value: Dense2D) -> Var {
        self.push(value, Op::Leaf)
    }

    /// A leaf whose gradient is tracked, without a backing parameter.
    pub fn variable(&mut self, value: Dense2D) -> Var {
        let v = self.push(value, Op::Leaf);
        self.nodes[v.0].needs_grad = true;
        v
    }

    /// Leaf bound to a named parameter; repeated calls return the same leaf.
    ///
    /// Panics if the parameter does not exist.
    pub fn param(&mut self, store: &ParameterStore, name: &str) -> Var {
        if let Some(&v) = self.param_lookup.get(name) {
            return v;
        }
        let value = store
            .value(name)
            .unwrap_or_else(|| panic!("unknown parameter `{name}`"))
            .clone();
        let v = self.variable(value);
        self.params.push((name.to_string(), v));
        self.param_lookup.insert(name.to_string(), v);
        v
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let out = gemm(self.value(a), false, self.value(b), false);
        self.push(out, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.shape(a), self.shape(b), "add");
        let out = self.value(a).zip_map(self.value(b), |x, y| x + y);
        self.push(out, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.shape(a), self.shape(b), "sub");
        let out = self.value(a).zip_map(self.value(b), |x, y| x - y);
        self.push(out, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.shape(a), self.shape(b), "mul");
        let out = self.value(a).zip_map(self.value(b), |x, y| x * y);
        self.push(out, Op::Mul(a, b))
    }

    /// `a + 1·row` where `row` is `1 × cols(a)`.
    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        let (n, c) = self.shape(a);
        assert_eq!(self.shape(row), (1, c), "add_row");
        let mut out = self.value(a).clone();
        let r = self.value(row).data().to_vec();
        for i in 0..n {
            for (x, b) in out.row_mut(i).iter_mut().zip(&r) {
                *x += b;
            }
        }
        self.push(out, Op::AddRow(a, row))
    }

    /// `scale · a + shift`.
    pub fn affine(&mut self, a: Var, scale: f64, shift: f64) -> Var {
        let out = self.value(a).map(|x| scale * x + shift);
        self.push(out, Op::Affine(a, scale))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let out = self.value(a).map(|x| x.max(0.0));
        self.push(out, Op::Relu(a))
    }

    pub fn leaky_relu(&mut self, a: Var, slope: f64) -> Var {
        let out = self.value(a).map(|x| if x > 0.0 { x } else { slope * x });
        self.push(out, Op::LeakyRelu(a, slope))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let out = self.value(a).map(sigmoid);
        self.push(out, Op::Sigmoid(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let out = self.value(a).map(f64::tanh);
        self.push(out, Op::Tanh(a))
    }

    pub fn softplus(&mut self, a: Var) -> Var {
        let out = self.value(a).map(softplus);
        self.push(out, Op::Softplus(a))
    }

    /// Row `i` of the output is row `idx[i]` of `a`.
    pub fn gather_rows(&mut self, a: Var, idx: &[usize]) -> Var {
        let src = self.value(a);
        let cols = src.cols();
        let mut out = Dense2D::zeros(idx.len(), cols);
        for (i, &j) in idx.iter().enumerate() {
            out.row_mut(i).copy_from_slice(src.row(j));
        }
        self.push(out, Op::GatherRows(a, idx.to_vec()))
    }

    /// Output has `n_out` rows; row `i` of `a` is added into row `idx[i]`.
    pub fn scatter_add_rows(&mut self, a: Var, idx: &[usize], n_out: usize) -> Var {
        let src = self.value(a);
        assert_eq!(src.rows(), idx.len(), "scatter_add_rows");
        let mut out = Dense2D::zeros(n_out, src.cols());
        for (i, &j) in idx.iter().enumerate() {
            for (o, x) in out.row_mut(j).iter_mut().zip(src.row(i)) {
                *o += x;
            }
        }
        self.push(out, Op::ScatterAddRows(a, idx.to_vec()))
    }

    /// Copy of `base` with row `idx[i]` replaced by row `i` of `rows`.
    /// `idx` must not repeat.
    pub fn overwrite_rows(&mut self, base: Var, idx: &[usize], rows: Var) -> Var {
        let mut out = self.value(base).clone();
        let src = self.value(rows);
        assert_eq!(src.rows(), idx.len(), "overwrite_rows");
        for (i, &j) in idx.iter().enumerate() {
            out.row_mut(j).copy_from_slice(src.row(i));
        }
        self.push(out, Op::OverwriteRows(base, idx.to_vec(), rows))
    }

    /// Splits each row of `x` (`n × d`) into `B = cols(w)` equal blocks and
    /// multiplies block `b` of row `i` by `w[i, b]`.
    pub fn scale_blocks(&mut self, x: Var, w: Var) -> Var {
        let (n, d) = self.shape(x);
        let (wn, blocks) = self.shape(w);
        assert!(wn == n && blocks > 0 && d % blocks == 0, "scale_blocks");
        let width = d / blocks;
        let mut out = self.value(x).clone();
        let wv = self.value(w);
        for i in 0..n {
            let row = out.row_mut(i);
            for b in 0..blocks {
                let s = wv.get(i, b);
                row[b * width..(b + 1) * width]
                    .iter_mut()
                    .for_each(|v| *v *= s);
            }
        }
        self.push(out, Op::ScaleBlocks(x, w))
    }

    /// Blockwise row dot product: `out[i, b] = <a_i block b, c_i block b>`.
    pub fn block_dot(&mut self, a: Var, c: Var, blocks: usize) -> Var {
        let (n, d) = self.shape(a);
        assert_eq!(self.shape(c), (n, d), "block_dot");
        assert!(blocks > 0 && d % blocks == 0, "block_dot blocks");
        let width = d / blocks;
        let mut out = Dense2D::zeros(n, blocks);
        let (av, cv) = (self.value(a), self.value(c));
        for i in 0..n {
            let (ar, cr) = (av.row(i), cv.row(i));
            for b in 0..blocks {
                let s: f64 = ar[b * width..(b + 1) * width]
                    .iter()
                    .zip(&cr[b * width..(b + 1) * width])
                    .map(|(x, y)| x * y)
                    .sum();
                out.set(i, b, s);
            }
        }
        self.push(out, Op::BlockDot(a, c))
    }

    /// Softmax over the rows sharing a segment id, independently per column.
    pub fn segment_softmax(&mut self, x: Var, segments: &[usize], n_segments: usize) -> Var {
        let out = segment_softmax(self.value(x), segments, n_segments);
        self.push(out, Op::SegmentSoftmax(x, segments.to_vec(), n_segments))
    }

    pub fn softmax_rows(&mut self, x: Var) -> Var {
        let out = softmax_rows(self.value(x));
        self.push(out, Op::SoftmaxRows(x))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        let n = self.shape(parts[0]).0;
        let total: usize = parts.iter().map(|&p| self.shape(p).1).sum();
        let mut out = Dense2D::zeros(n, total);
        let mut off = 0;
        for &p in parts {
            let v = self.value(p);
            assert_eq!(v.rows(), n, "concat_cols");
            let c = v.cols();
            for i in 0..n {
                out.row_mut(i)[off..off + c].copy_from_slice(v.row(i));
            }
            off += c;
        }
        self.push(out, Op::ConcatCols(parts.to_vec()))
    }

    pub fn concat_rows(&mut self, parts: &[Var]) -> Var {
        let c = self.shape(parts[0]).1;
        let mut data = Vec::new();
        let mut rows = 0;
        for &p in parts {
            let v = self.value(p);
            assert_eq!(v.cols(), c, "concat_rows");
            data.extend_from_slice(v.data());
            rows += v.rows();
        }
        let out = Dense2D::from_vec(rows, c, data).expect("consistent shape");
        self.push(out, Op::ConcatRows(parts.to_vec()))
    }

    pub fn slice_rows(&mut self, a: Var, start: usize, len: usize) -> Var {
        let v = self.value(a);
        let c = v.cols();
        let out = Dense2D::from_vec(len, c, v.data()[start * c..(start + len) * c].to_vec())
            .expect("consistent shape");
        self.push(out, Op::SliceRows(a, start))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, len: usize) -> Var {
        let v = self.value(a);
        let mut out = Dense2D::zeros(v.rows(), len);
        for i in 0..v.rows() {
            out.row_mut(i).copy_from_slice(&v.row(i)[start..start + len]);
        }
        self.push(out, Op::SliceCols(a, start))
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let s = self.value(a).sum();
        self.push(Dense2D::filled(1, 1, s), Op::Sum(a))
    }

    pub fn mean(&mut self, a: Var) -> Var {
        let v = self.value(a);
        let n = v.len().max(1) as f64;
        let s = v.sum() / n;
        self.push(Dense2D::filled(1, 1, s), Op::Mean(a))
    }

    /// Reverse sweep from a `1 × 1` root.
    pub fn backward(&self, root: Var) -> Gradients {
        assert_eq!(self.shape(root), (1, 1), "backward root must be scalar");
        let mut grads: Vec<Option<Dense2D>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[root.0] = Some(Dense2D::filled(1, 1, 1.0));
        for idx in (0..=root.0).rev() {
            let node = &self.nodes[idx];
            if !node.needs_grad {
                continue;
            }
            let Some(g) = grads[idx].take() else { continue };
            self.propagate(idx, &g, &mut grads);
            grads[idx] = Some(g);
        }
        Gradients { grads }
    }

    /// Adds this tape's parameter gradients into the store's accumulators.
    pub fn accumulate_param_grads(&self, grads: &Gradients, store: &mut ParameterStore) {
        for (name, v) in &self.params {
            if let Some(g) = grads.wrt(*v) {
                store.accumulate_grad(name, g);
            }
        }
    }

    fn slot<'a>(&self, grads: &'a mut [Option<Dense2D>], v: Var) -> Option<&'a mut Dense2D> {
        if !self.nodes[v.0].needs_grad {
            return None;
        }
        let (r, c) = self.shape(v);
        Some(grads[v.0].get_or_insert_with(|| Dense2D::zeros(r, c)))
    }

    fn acc(&self, grads: &mut [Option<Dense2D>], v: Var, g: Dense2D) {
        if !self.nodes[v.0].needs_grad {
            return;
        }
        match &mut grads[v.0] {
            Some(existing) => existing.add_assign(&g),
            slot @ None => *slot = Some(g),
        }
    }

    fn propagate(&self, idx: usize, g: &Dense2D, grads: &mut [Option<Dense2D>]) {
        let out = &self.nodes[idx].value;
        match &self.nodes[idx].op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                if self.nodes[a.0].needs_grad {
                    self.acc(grads, *a, gemm(g, false, self.value(*b), true));
                }
                if self.nodes[b.0].needs_grad {
                    self.acc(grads, *b, gemm(self.value(*a), true, g, false));
                }
            }
            Op::Add(a, b) => {
                self.acc(grads, *a, g.clone());
                self.acc(grads, *b, g.clone());
            }
            Op::Sub(a, b) => {
                self.acc(grads, *a, g.clone());
                self.acc(grads, *b, g.map(|x| -x));
            }
            Op::Mul(a, b) => {
                self.acc(grads, *a, g.zip_map(self.value(*b), |x, y| x * y));
                self.acc(grads, *b, g.zip_map(self.value(*a), |x, y| x * y));
            }
            Op::AddRow(a, row) => {
                self.acc(grads, *a, g.clone());
                if let Some(s) = self.slot(grads, *row) {
                    for i in 0..g.rows() {
                        for (o, x) in s.data_mut().iter_mut().zip(g.row(i)) {
                            *o += x;
                        }
                    }
                }
            }
            Op::Affine(a, scale) => self.acc(grads, *a, g.map(|x| scale * x)),
            Op::Relu(a) => {
                let x = self.value(*a);
                self.acc(grads, *a, g.zip_map(x, |gi, xi| if xi > 0.0 { gi } else { 0.0 }));
            }
            Op::LeakyRelu(a, slope) => {
                let x = self.value(*a);
                self.acc(
                    grads,
                    *a,
                    g.zip_map(x, |gi, xi| if xi > 0.0 { gi } else { slope * gi }),
                );
            }
            Op::Sigmoid(a) => self.acc(grads, *a, g.zip_map(out, |gi, y| gi * y * (1.0 - y))),
            Op::Tanh(a) => self.acc(grads, *a, g.zip_map(out, |gi, y| gi * (1.0 - y * y))),
            Op::Softplus(a) => {
                let x = self.value(*a);
                self.acc(grads, *a, g.zip_map(x, |gi, xi| gi * sigmoid(xi)));
            }
            Op::GatherRows(a, ix) => {
                if let Some(s) = self.slot(grads, *a) {
                    for (i, &j) in ix.iter().enumerate() {
                        for (o, x) in s.row_mut(j).iter_mut().zip(g.row(i)) {
                            *o += x;
                        }
                    }
                }
            }
            Op::ScatterAddRows(a, ix) => {
                if let Some(s) = self.slot(grads, *a) {
                    for (i, &j) in ix.iter().enumerate() {
                        for (o, x) in s.row_mut(i).iter_mut().zip(g.row(j)) {
                            *o += x;
                        }
                    }
                }
            }
            Op::OverwriteRows(base, ix, rows) => {
                if let Some(s) = self.slot(grads, *rows) {
                    for (i, &j) in ix.iter().enumerate() {
                        for (o, x) in s.row_mut(i).iter_mut().zip(g.row(j)) {
                            *o += x;
                        }
                    }
                }
                if self.nodes[base.0].needs_grad {
                    let mut gb = g.clone();
                    for &j in ix {
                        gb.row_mut(j).fill(0.0);
                    }
                    self.acc(grads, *base, gb);
                }
            }
            Op::ScaleBlocks(x, w) => {
                let (xv, wv) = (self.value(*x), self.value(*w));
                let blocks = wv.cols();
                let width = xv.cols() / blocks;
                if self.nodes[x.0].needs_grad {
                    let mut gx = g.clone();
                    for i in 0..gx.rows() {
                        let row = gx.row_mut(i);
                        for b in 0..blocks {
                            let s = wv.get(i, b);
                            row[b * width..(b + 1) * width]
                                .iter_mut()
                                .for_each(|v| *v *= s);
                        }
                    }
                    self.acc(grads, *x, gx);
                }
                if self.nodes[w.0].needs_grad {
                    let mut gw = Dense2D::zeros(wv.rows(), blocks);
                    for i in 0..wv.rows() {
                        let (gr, xr) = (g.row(i), xv.row(i));
                        for b in 0..blocks {
                            let s: f64 = gr[b * width..(b + 1) * width]
                                .iter()
                                .zip(&xr[b * width..(b + 1) * width])
                                .map(|(p, q)| p * q)
                                .sum();
                            gw.set(i, b, s);
                        }
                    }
                    self.acc(grads, *w, gw);
                }
            }
            Op::BlockDot(a, c) => {
                let blocks = g.cols();
                let (av, cv) = (self.value(*a), self.value(*c));
                let width = av.cols() / blocks;
                let spread = |other: &Dense2D| {
                    let mut out = other.clone();
                    for i in 0..out.rows() {
                        let row = out.row_mut(i);
                        for b in 0..blocks {
                            let s = g.get(i, b);
                            row[b * width..(b + 1) * width]
                                .iter_mut()
                                .for_each(|v| *v *= s);
                        }
                    }
                    out
                };
                if self.nodes[a.0].needs_grad {
                    self.acc(grads, *a, spread(cv));
                }
                if self.nodes[c.0].needs_grad {
                    self.acc(grads, *c, spread(av));
                }
            }
            Op::SegmentSoftmax(x, seg, n_seg) => {
                let cols = out.cols();
                let mut dots = vec![0.0; n_seg * cols];
                for (i, &s) in seg.iter().enumerate() {
                    for c in 0..cols {
                        dots[s * cols + c] += out.get(i, c) * g.get(i, c);
                    }
                }
                let mut gx = Dense2D::zeros(out.rows(), cols);
                for (i, &s) in seg.iter().enumerate() {
                    for c in 0..cols {
                        gx.set(i, c, out.get(i, c) * (g.get(i, c) - dots[s * cols + c]));
                    }
                }
                self.acc(grads, *x, gx);
            }
            Op::SoftmaxRows(x) => {
                let mut gx = Dense2D::zeros(out.rows(), out.cols());
                for i in 0..out.rows() {
                    let dot: f64 = out.row(i).iter().zip(g.row(i)).map(|(y, gi)| y * gi).sum();
                    for c in 0..out.cols() {
                        gx.set(i, c, out.get(i, c) * (g.get(i, c) - dot));
                    }
                }
                self.acc(grads, *x, gx);
            }
            Op::ConcatCols(parts) => {
                let mut off = 0;
                for &p in parts {
                    let c = self.shape(p).1;
                    if self.nodes[p.0].needs_grad {
                        let mut gp = Dense2D::zeros(g.rows(), c);
                        for i in 0..g.rows() {
                            gp.row_mut(i).copy_from_slice(&g.row(i)[off..off + c]);
                        }
                        self.acc(grads, p, gp);
                    }
                    off += c;
                }
            }
            Op::ConcatRows(parts) => {
                let cols = g.cols();
                let mut off = 0;
                for &p in parts {
                    let r = self.shape(p).0;
                    if self.nodes[p.0].needs_grad {
                        let gp = Dense2D::from_vec(
                            r,
                            cols,
                            g.data()[off * cols..(off + r) * cols].to_vec(),
                        )
                        .expect("consistent shape");
                        self.acc(grads, p, gp);
                    }
                    off += r;
                }
            }
            Op::SliceRows(a, start) => {
                if let Some(s) = self.slot(grads, *a) {
                    let c = g.cols();
                    for (o, x) in s.data_mut()[start * c..(start + g.rows()) * c]
                        .iter_mut()
                        .zip(g.data())
                    {
                        *o += x;
                    }
                }
            }
            Op::SliceCols(a, start) => {
                if let Some(s) = self.slot(grads, *a) {
                    for i in 0..g.rows() {
                        for (o, x) in s.row_mut(i)[*start..start + g.cols()]
                            .iter_mut()
                            .zip(g.row(i))
                        {
                            *o += x;
                        }
                    }
                }
            }
            Op::Sum(a) => {
                let (r, c) = self.shape(*a);
                self.acc(grads, *a, Dense2D::filled(r, c, g.get(0, 0)));
            }
            Op::Mean(a) => {
                let (r, c) = self.shape(*a);
                let n = (r * c).max(1) as f64;
                self.acc(grads, *a, Dense2D::filled(r, c, g.get(0, 0) / n));
            }
        }
    }
}

fn op_inputs(op: &Op) -> Vec<Var> {
    match op {
        Op::Leaf => vec![],
        Op::MatMul(a, b)
        | Op::Add(a, b)
        | Op::Sub(a, b)
        | Op::Mul(a, b)
        | Op::AddRow(a, b)
        | Op::ScaleBlocks(a, b)
        | Op::BlockDot(a, b)
        | Op::OverwriteRows(a, _, b) => vec![*a, *b],
        Op::Affine(a, _)
        | Op::Relu(a)
        | Op::LeakyRelu(a, _)
        | Op::Sigmoid(a)
        | Op::Tanh(a)
        | Op::Softplus(a)
        | Op::GatherRows(a, _)
        | Op::ScatterAddRows(a, _)
        | Op::SegmentSoftmax(a, _, _)
        | Op::SoftmaxRows(a)
        | Op::SliceRows(a, _)
        | Op::SliceCols(a, _)
        | Op::Sum(a)
        | Op::Mean(a) => vec![*a],
        Op::ConcatCols(parts) | Op::ConcatRows(parts) => parts.clone(),
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub fn segment_softmax(x: &Dense2D, segments: &[usize], n_segments: usize) -> Dense2D {
    assert_eq!(x.rows(), segments.len(), "segment_softmax");
    let cols = x.cols();
    let mut max = vec![f64::NEG_INFINITY; n_segments * cols];
    for (i, &s) in segments.iter().enumerate() {
        for c in 0..cols {
            let m = &mut max[s * cols + c];
            *m = m.max(x.get(i, c));
        }
    }
    let mut out = Dense2D::zeros(x.rows(), cols);
    let mut total = vec![0.0; n_segments * cols];
    for (i, &s) in segments.iter().enumerate() {
        for c in 0..cols {
            let e = (x.get(i, c) - max[s * cols + c]).exp();
            out.set(i, c, e);
            total[s * cols + c] += e;
        }
    }
    for (i, &s) in segments.iter().enumerate() {
        for c in 0..cols {
            let v = out.get(i, c) / total[s * cols + c];
            out.set(i, c, v);
        }
    }
    out
}
