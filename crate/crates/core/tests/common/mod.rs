//! Test-only oracles, independent of the library's solver code paths.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// A tiny binary instance: `cells[i][j]` is worker j's label on item i, if any.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TinyInstance {
    pub cells: Vec<Vec<Option<u8>>>,
}

impl TinyInstance {
    pub fn num_items(&self) -> usize {
        self.cells.len()
    }

    pub fn num_workers(&self) -> usize {
        self.cells.first().map_or(0, |r| r.len())
    }

    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if let Some(y) = c {
                    out.push((i, j, *y as usize));
                }
            }
        }
        out
    }

    fn encode(&self) -> Vec<u8> {
        self.cells.iter().flat_map(|r| r.iter().map(|c| c.map_or(0, |y| y + 1))).collect()
    }

    /// Smallest encoding over item permutations, worker permutations and
    /// label complement.
    fn canonical(&self) -> Vec<u8> {
        let n = self.num_items();
        let w = self.num_workers();
        let mut best: Option<Vec<u8>> = None;
        for ip in permutations(n) {
            for wp in permutations(w) {
                for flip in [false, true] {
                    let cells = ip
                        .iter()
                        .map(|&i| {
                            wp.iter()
                                .map(|&j| self.cells[i][j].map(|y| if flip { 1 - y } else { y }))
                                .collect()
                        })
                        .collect();
                    let code = TinyInstance { cells }.encode();
                    if best.as_ref().is_none_or(|b| code < *b) {
                        best = Some(code);
                    }
                }
            }
        }
        best.unwrap()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every binary instance with 1..=max_items items and 1..=max_workers workers,
/// each cell unobserved, 0 or 1, with at least one label, up to relabelling of
/// items and workers and complementing the labels.
pub fn tiny_family(max_items: usize, max_workers: usize) -> Vec<TinyInstance> {
    let mut out = Vec::new();
    for n in 1..=max_items {
        for w in 1..=max_workers {
            let mut seen = BTreeSet::new();
            let cells = n * w;
            for code in 0..3usize.pow(cells as u32) {
                let mut c = code;
                let mut grid = vec![vec![None; w]; n];
                for i in 0..n {
                    for j in 0..w {
                        grid[i][j] = match c % 3 {
                            0 => None,
                            1 => Some(0),
                            _ => Some(1),
                        };
                        c /= 3;
                    }
                }
                let inst = TinyInstance { cells: grid };
                if inst.triples().is_empty() {
                    continue;
                }
                if seen.insert(inst.canonical()) {
                    out.push(inst);
                }
            }
        }
    }
    out
}

/// The BWA objective written out directly from its definition, with the prior
/// mean set to the mean of `z`.
pub fn objective(inst: &TinyInstance, z: &[f64], lambda: f64, a_v: f64, b_v: f64) -> f64 {
    let n = z.len() as f64;
    let mu = z.iter().sum::<f64>() / n;
    let mut total: f64 = z.iter().map(|zi| 0.5 * lambda * (zi - mu) * (zi - mu)).sum();
    for j in 0..inst.num_workers() {
        let mut count = 0.0;
        let mut sse = 0.0;
        for (i, row) in inst.cells.iter().enumerate() {
            if let Some(y) = row[j] {
                count += 1.0;
                sse += (z[i] - y as f64).powi(2);
            }
        }
        total += 0.5 * (a_v + count) * (b_v + sse).ln();
    }
    total
}

/// Grid minimum of [`objective`] over z in [0, 1]^N at step `1 / fine`.
///
/// Exhaustive search on the fine grid is too slow at N = 3, so the search
/// runs in two passes: every discrete local minimum of a coarse grid (step
/// `1 / coarse`) is refined by an exhaustive fine-grid search over the
/// surrounding coarse cells. Returns (minimum value, minimiser).
pub fn grid_minimum(
    inst: &TinyInstance,
    lambda: f64,
    a_v: f64,
    b_v: f64,
    coarse: usize,
    fine: usize,
) -> (f64, Vec<f64>) {
    assert_eq!(fine % coarse, 0);
    let n = inst.num_items();
    let ratio = fine / coarse;
    let eval = |idx: &[usize], step: usize| {
        let z: Vec<f64> = idx.iter().map(|&k| k as f64 / step as f64).collect();
        objective(inst, &z, lambda, a_v, b_v)
    };

    // Coarse pass.
    let size = coarse + 1;
    let total = size.pow(n as u32);
    let unflatten = |mut f: usize| {
        let mut idx = vec![0usize; n];
        for slot in idx.iter_mut() {
            *slot = f % size;
            f /= size;
        }
        idx
    };
    let values: Vec<f64> = (0..total).map(|f| eval(&unflatten(f), coarse)).collect();

    let mut seeds = Vec::new();
    for f in 0..total {
        let idx = unflatten(f);
        let v = values[f];
        let mut is_min = true;
        for delta in 0..3usize.pow(n as u32) {
            let mut d = delta;
            let mut flat = 0;
            let mut mul = 1;
            let mut inside = true;
            let mut centre = true;
            for &k in &idx {
                let step = (d % 3) as isize - 1;
                d /= 3;
                centre &= step == 0;
                let nk = k as isize + step;
                if nk < 0 || nk >= size as isize {
                    inside = false;
                    break;
                }
                flat += nk as usize * mul;
                mul *= size;
            }
            if inside && !centre && values[flat] < v {
                is_min = false;
                break;
            }
        }
        if is_min {
            seeds.push(idx);
        }
    }

    // Fine pass around every coarse local minimum.
    let mut best = (f64::INFINITY, Vec::new());
    for seed in seeds {
        let lo: Vec<usize> = seed.iter().map(|&k| k.saturating_sub(1) * ratio).collect();
        let hi: Vec<usize> = seed.iter().map(|&k| (k + 1).min(coarse) * ratio).collect();
        let mut idx = lo.clone();
        loop {
            let v = eval(&idx, fine);
            if v < best.0 {
                best = (v, idx.iter().map(|&k| k as f64 / fine as f64).collect());
            }
            // Odometer increment.
            let mut d = 0;
            while d < n {
                if idx[d] < hi[d] {
                    idx[d] += 1;
                    break;
                }
                idx[d] = lo[d];
                d += 1;
            }
            if d == n {
                break;
            }
        }
    }
    best
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let ra = ranks(a);
    let rb = ranks(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&x, &y| v[x].total_cmp(&v[y]));
    let mut r = vec![0.0; v.len()];
    let mut s = 0;
    while s < order.len() {
        let mut e = s;
        while e + 1 < order.len() && v[order[e + 1]] == v[order[s]] {
            e += 1;
        }
        let avg = (s + e) as f64 / 2.0 + 1.0;
        for &o in &order[s..=e] {
            r[o] = avg;
        }
        s = e + 1;
    }
    r
}

/// Brute-force one-sided Wilcoxon p-value: enumerate all 2^n sign patterns of
/// the given (average) ranks and count those with W- at most `w_minus`.
pub fn brute_force_wilcoxon_p(ranks: &[f64], w_minus: f64) -> f64 {
    let n = ranks.len();
    let mut hits = 0u64;
    for mask in 0..(1u64 << n) {
        let w: f64 = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| ranks[b]).sum();
        if w <= w_minus + 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << n) as f64
}
