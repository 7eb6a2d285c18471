#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use riov::numeric::{int, Rational};
use riov::subproblem::InverseInstance;

pub fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| int(x)).collect()
}

/// Shortest-path instance with four intermediate nodes and an s-t path
/// through the `a → b` corridor.
pub fn example_shortest_path() -> InverseInstance {
    let ends = [(4, 6), (0, 1), (4, 3), (5, 6), (0, 5), (1, 2), (1, 6), (6, 2), (0, 4), (2, 3)];
    let costs = [2, 3, 7, 8, 5, 6, 4, 9, 1, 10];
    let arcs = ends.iter().zip(costs).map(|(&(t, h), c)| (t, h, int(c))).collect();
    InverseInstance::shortest_path(7, arcs, 0, 3, vec![1, 5, 9], ints(&[10, 3, 8, 2, 5, 1, 4, 9, 7, 6]), int(18))
        .unwrap()
}

/// 2 × 3 transportation instance.
pub fn example_hitchcock() -> InverseInstance {
    InverseInstance::hitchcock(
        ints(&[8, 12]),
        ints(&[5, 4, 11]),
        ints(&[5, 4, -1, 5, 3, 1]),
        ints(&[6, 4, 2, 5, 4, 3]),
        ints(&[3, 2, 3, 2, 2, 8]),
        int(50),
    )
    .unwrap()
}

/// Random transportation instance with at most `max_vars` cells and a
/// north-west-corner starting solution.
pub fn random_hitchcock(rng: &mut StdRng, max_vars: usize) -> InverseInstance {
    let (m, k) = loop {
        let m = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        if m * k <= max_vars {
            break (m, k);
        }
    };
    let total: i64 = rng.gen_range(k.max(m) as i64..=12);
    let a = split(rng, total, m);
    let b = split(rng, total, k);
    let mut x = vec![0i64; m * k];
    let (mut ra, mut rb) = (a.clone(), b.clone());
    let (mut i, mut j) = (0, 0);
    while i < m && j < k {
        let q = ra[i].min(rb[j]);
        x[i * k + j] = q;
        ra[i] -= q;
        rb[j] -= q;
        if ra[i] == 0 {
            i += 1;
        } else {
            j += 1;
        }
    }
    let c: Vec<i64> = (0..m * k).map(|_| rng.gen_range(-3..=9)).collect();
    let d: Vec<i64> = (0..m * k).map(|_| rng.gen_range(1..=5)).collect();
    let cx: i64 = c.iter().zip(&x).map(|(c, x)| c * x).sum();
    let target = cx + rng.gen_range(-15..=15);
    InverseInstance::hitchcock(ints(&a), ints(&b), ints(&c), ints(&d), ints(&x), int(target)).unwrap()
}

/// Random simple-path instance on a small node set with at most
/// `max_vars` arcs.
pub fn random_shortest_path(rng: &mut StdRng, max_vars: usize) -> InverseInstance {
    loop {
        let nodes = rng.gen_range(3..=5);
        let (s, t) = (0, nodes - 1);
        let mut inner: Vec<usize> = (1..nodes - 1).collect();
        inner.shuffle(rng);
        let hops = rng.gen_range(0..=inner.len());
        let mut walk = vec![s];
        walk.extend_from_slice(&inner[..hops]);
        walk.push(t);
        let mut ends: Vec<(usize, usize)> = walk.windows(2).map(|w| (w[0], w[1])).collect();
        let extra = rng.gen_range(0..=max_vars.saturating_sub(ends.len()));
        for _ in 0..extra {
            let u = rng.gen_range(0..nodes);
            let v = rng.gen_range(0..nodes);
            if u != v {
                ends.push((u, v));
            }
        }
        if ends.len() > max_vars {
            continue;
        }
        let mut order: Vec<usize> = (0..ends.len()).collect();
        order.shuffle(rng);
        let shuffled: Vec<(usize, usize)> = order.iter().map(|&i| ends[i]).collect();
        let path: Vec<usize> = (0..walk.len() - 1).map(|p| order.iter().position(|&i| i == p).unwrap()).collect();
        let costs: Vec<i64> = (0..shuffled.len()).map(|_| rng.gen_range(0..=9)).collect();
        let arcs = shuffled.iter().zip(&costs).map(|(&(u, v), &c)| (u, v, int(c))).collect();
        let d: Vec<i64> = (0..shuffled.len()).map(|_| rng.gen_range(1..=5)).collect();
        let cx: i64 = path.iter().map(|&j| costs[j]).sum();
        let target = cx + rng.gen_range(-12..=12);
        return InverseInstance::shortest_path(nodes, arcs, s, t, path, ints(&d), int(target)).unwrap();
    }
}

fn split(rng: &mut StdRng, total: i64, parts: usize) -> Vec<i64> {
    let mut v = vec![1i64; parts];
    for _ in 0..total - parts as i64 {
        let i = rng.gen_range(0..parts);
        v[i] += 1;
    }
    v
}

/// Random network with supplies read off a random integral flow. Pure
/// circulations come up often, and for those only `K = 0` is reachable.
pub fn random_general(rng: &mut StdRng, max_vars: usize) -> InverseInstance {
    let nodes = rng.gen_range(2..=4);
    let count = rng.gen_range(2..=max_vars);
    let mut ends = Vec::new();
    while ends.len() < count {
        let u = rng.gen_range(0..nodes);
        let v = rng.gen_range(0..nodes);
        if u != v {
            ends.push((u, v));
        }
    }
    let costs: Vec<i64> = (0..count).map(|_| rng.gen_range(-2..=6)).collect();
    let mut x = vec![0i64; ends.len()];
    // push flow around a cycle when one exists, then sprinkle single arcs
    for (j, &(u, v)) in ends.iter().enumerate() {
        if let Some(k) = ends.iter().position(|&(a, b)| a == v && b == u) {
            if rng.gen_bool(0.5) {
                let q = rng.gen_range(1..=3);
                x[j] += q;
                x[k] += q;
            }
        }
    }
    if rng.gen_bool(0.4) {
        let j = rng.gen_range(0..ends.len());
        x[j] += rng.gen_range(1..=2);
    }
    if x.iter().all(|&v| v == 0) {
        x[0] = 1;
    }
    let mut b = vec![0i64; nodes];
    for (j, &(u, v)) in ends.iter().enumerate() {
        b[u] += x[j];
        b[v] -= x[j];
    }
    let d: Vec<i64> = (0..ends.len()).map(|_| rng.gen_range(1..=5)).collect();
    let cx: i64 = costs.iter().zip(&x).map(|(c, x)| c * x).sum();
    let target = if rng.gen_bool(0.3) { 0 } else { cx + rng.gen_range(-8..=8) };
    let arcs = ends.iter().zip(&costs).map(|(&(u, v), &c)| (u, v, int(c))).collect();
    InverseInstance::general(ints(&b), arcs, ints(&d), ints(&x), int(target)).unwrap()
}
