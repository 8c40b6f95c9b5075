//! Brute-force reference implementations compared against the library.
//!
//! Each check draws `cases` random instances from `seed` and returns the
//! first disagreement.

#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use newsseg_core::articles::{order_sections, LeafBox, SectionNode, SectionTree, Continuation};
use newsseg_core::eval::{match_articles, ArticleRecord, PageRect};
use newsseg_core::grid::{connect_collinear, extract_grid_boxes, Separator, SeparatorGrid};
use newsseg_core::labels::InformativeLabel;
use newsseg_core::smoothing::{majority_vote_smooth, Connectivity, LabelPriority};
use newsseg_core::{LabelImage, Orientation, Rect, Span};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn informative(code: u8) -> InformativeLabel {
    match code {
        0 => InformativeLabel::Background,
        1..=3 => InformativeLabel::TextLine,
        4..=6 => InformativeLabel::Title,
        7 => InformativeLabel::VerticalSeparator,
        8 => InformativeLabel::HorizontalSeparator,
        _ => InformativeLabel::Noise,
    }
}

/// Flood fill over non-background pixels, then a vote per component.
pub fn vote_reference(w: usize, h: usize, codes: &[u8], conn: Connectivity) -> Vec<InformativeLabel> {
    let priority = [
        InformativeLabel::VerticalSeparator,
        InformativeLabel::HorizontalSeparator,
        InformativeLabel::Title,
        InformativeLabel::TextLine,
        InformativeLabel::Noise,
    ];
    let mut out = vec![InformativeLabel::Background; w * h];
    let mut seen = vec![false; w * h];
    let offsets: &[(i64, i64)] = match conn {
        Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Connectivity::Eight => &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
    };
    for start in 0..w * h {
        if seen[start] || codes[start] == 0 {
            continue;
        }
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            members.push(i);
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for (dx, dy) in offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !seen[j] && codes[j] != 0 {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        let mut counts: BTreeMap<InformativeLabel, usize> = BTreeMap::new();
        for &i in &members {
            *counts.entry(informative(codes[i])).or_default() += 1;
        }
        let mut winner = priority[0];
        for &l in &priority {
            if counts.get(&l).copied().unwrap_or(0) > counts.get(&winner).copied().unwrap_or(0) {
                winner = l;
            }
        }
        for &i in &members {
            out[i] = winner;
        }
    }
    out
}

pub fn check_majority_vote(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let (w, h) = (12usize, 12usize);
        let bg = rng.random_range(0.2..0.7);
        let codes: Vec<u8> = (0..w * h)
            .map(|_| if rng.random_bool(bg) { 0 } else { rng.random_range(1..10) })
            .collect();
        let img = LabelImage::from_codes(w as u32, h as u32, &codes).map_err(|e| e.to_string())?;
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let got = majority_vote_smooth(&img, conn, &LabelPriority::default());
            let want = vote_reference(w, h, &codes, conn);
            if got.labels() != want.as_slice() {
                return Err(format!("case {case} ({conn:?}): vote differs on {codes:?}"));
            }
        }
    }
    Ok(())
}

fn distinct_positions(rng: &mut ChaCha8Rng, n: usize, lo: i32, hi: i32, spacing: i32) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    while out.len() < n {
        let p = rng.random_range(lo..hi);
        if out.iter().all(|q| (q - p).abs() >= spacing) {
            out.push(p);
        }
    }
    out.sort_unstable();
    out
}

/// `k` full-height verticals and `m` full-width horizontals cut the page
/// into `(k + 1)(m + 1)` boxes that tile it.
pub fn check_grid_box_count(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let (w, h) = (rng.random_range(200..600), rng.random_range(200..600));
        let k = rng.random_range(0..8usize);
        let m = rng.random_range(0..8usize);
        let xs = distinct_positions(&mut rng, k, 5, w - 5, 8);
        let ys = distinct_positions(&mut rng, m, 5, h - 5, 8);
        let page = Rect::new(0, 0, w, h);
        let grid = SeparatorGrid {
            verticals: xs
                .iter()
                .enumerate()
                .map(|(i, &x)| Separator::new(i, Orientation::Vertical, Span::new(0, h), x, 3))
                .collect(),
            horizontals: ys
                .iter()
                .enumerate()
                .map(|(i, &y)| Separator::new(i, Orientation::Horizontal, Span::new(0, w), y, 3))
                .collect(),
            titles: Vec::new(),
            page,
        };
        let boxes = extract_grid_boxes(&grid);
        if boxes.len() != (k + 1) * (m + 1) {
            return Err(format!("case {case}: {k} verticals, {m} horizontals gave {} boxes", boxes.len()));
        }
        let area: i64 = boxes.iter().map(|b| b.bbox.area()).sum();
        if area != page.area() {
            return Err(format!("case {case}: boxes cover {area} of {}", page.area()));
        }
    }
    Ok(())
}

/// Siblings sorted by insertion with the reading comparison, visited depth
/// first.
pub fn order_reference(tree: &SectionTree) -> Vec<usize> {
    fn before(a: Rect, b: Rect) -> bool {
        a.x0 < b.x0 || (a.x0 == b.x0 && a.y0 < b.y0)
    }
    fn walk(tree: &SectionTree, n: usize, out: &mut Vec<usize>) {
        // (bbox, is_node, id)
        let mut items: Vec<(Rect, bool, usize)> = Vec::new();
        for &c in &tree.nodes[n].children {
            items.push((tree.nodes[c].bbox, true, c));
        }
        for &b in &tree.nodes[n].boxes {
            let leaf = tree.leaves.iter().find(|l| l.id == b).unwrap();
            items.push((leaf.bbox, false, b));
        }
        let mut sorted: Vec<(Rect, bool, usize)> = Vec::new();
        for item in items {
            let at = sorted.iter().position(|s| before(item.0, s.0)).unwrap_or(sorted.len());
            sorted.insert(at, item);
        }
        for (_, is_node, id) in sorted {
            if is_node {
                walk(tree, id, out);
            } else {
                out.push(id);
            }
        }
    }
    let mut out = Vec::new();
    walk(tree, 0, &mut out);
    out
}

fn random_corner(rng: &mut ChaCha8Rng, used: &mut Vec<(i32, i32)>) -> Rect {
    loop {
        let (x, y) = (rng.random_range(0..6) * 50, rng.random_range(0..6) * 50);
        if !used.contains(&(x, y)) {
            used.push((x, y));
            return Rect::new(x, y, x + 40, y + 40);
        }
    }
}

pub fn check_reading_order(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let mut nodes = vec![SectionNode {
            id: 0,
            bbox: Rect::new(0, 0, 400, 400),
            parent: None,
            children: Vec::new(),
            boxes: Vec::new(),
            delimiter: None,
        }];
        let mut leaves = Vec::new();
        let mut used_root = Vec::new();
        for _ in 0..rng.random_range(0..4) {
            let id = nodes.len();
            let bbox = random_corner(&mut rng, &mut used_root);
            nodes.push(SectionNode { id, bbox, parent: Some(0), children: Vec::new(), boxes: Vec::new(), delimiter: None });
            nodes[0].children.push(id);
        }
        let parents = nodes.len();
        let mut used: Vec<Vec<(i32, i32)>> = vec![Vec::new(); parents];
        used[0] = used_root;
        for _ in 0..rng.random_range(1..12) {
            let parent = rng.random_range(0..parents);
            let id = leaves.len();
            let bbox = random_corner(&mut rng, &mut used[parent]);
            leaves.push(LeafBox { id, bbox });
            nodes[parent].boxes.push(id);
        }
        let tree = SectionTree { nodes, leaves };
        let got = order_sections(&tree);
        let want = order_reference(&tree);
        if got != want {
            return Err(format!("case {case}: order {got:?}, reference {want:?}"));
        }
    }
    Ok(())
}

/// Per line, sorts the pieces and sweeps, joining while the gap is within
/// tolerance.
pub fn connect_reference(pieces: &[(i32, Span)], gap_tol: i32) -> Vec<(i32, Span)> {
    let mut by_pos: BTreeMap<i32, Vec<Span>> = BTreeMap::new();
    for &(p, s) in pieces {
        by_pos.entry(p).or_default().push(s);
    }
    let mut out = Vec::new();
    for (p, mut spans) in by_pos {
        spans.sort();
        let mut cur = spans[0];
        for s in spans.into_iter().skip(1) {
            if s.start - cur.end <= gap_tol {
                cur.end = cur.end.max(s.end);
            } else {
                out.push((p, cur));
                cur = s;
            }
        }
        out.push((p, cur));
    }
    out.sort();
    out
}

pub fn check_connect(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let n = rng.random_range(1..=50usize);
        let rows = rng.random_range(1..=4);
        let gap = rng.random_range(0..20);
        let orientation = if rng.random_bool(0.5) { Orientation::Horizontal } else { Orientation::Vertical };
        let pieces: Vec<(i32, Span)> = (0..n)
            .map(|_| {
                let pos = 100 + 60 * rng.random_range(0..rows);
                let start = rng.random_range(0..900);
                (pos, Span::new(start, start + rng.random_range(1..80)))
            })
            .collect();
        let seps: Vec<Separator> = pieces
            .iter()
            .enumerate()
            .map(|(i, &(p, s))| Separator::new(i, orientation, s, p, 3))
            .collect();
        let mut got: Vec<(i32, Span)> =
            connect_collinear(&seps, gap as f64, 2.0).iter().map(|s| (s.position, s.span)).collect();
        got.sort();
        let want = connect_reference(&pieces, gap);
        if got != want {
            return Err(format!("case {case}: connect gave {got:?}, reference {want:?}"));
        }
    }
    Ok(())
}

fn raster(rects: &[Rect], w: usize, h: usize) -> Vec<bool> {
    let mut m = vec![false; w * h];
    for r in rects {
        for y in r.y0..r.y1 {
            for x in r.x0..r.x1 {
                m[y as usize * w + x as usize] = true;
            }
        }
    }
    m
}

fn pixel_iou(a: &[Rect], b: &[Rect]) -> f64 {
    let (w, h) = (80, 60);
    let (ma, mb) = (raster(a, w, h), raster(b, w, h));
    let inter = ma.iter().zip(&mb).filter(|(x, y)| **x && **y).count();
    let union = ma.iter().zip(&mb).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn best_matching(iou: &[Vec<f64>], thr: f64, g: usize, used: &mut Vec<bool>) -> usize {
    if g == iou.len() {
        return 0;
    }
    let mut best = best_matching(iou, thr, g + 1, used);
    for p in 0..used.len() {
        if !used[p] && iou[g][p] > 0.0 && iou[g][p] >= thr {
            used[p] = true;
            best = best.max(1 + best_matching(iou, thr, g + 1, used));
            used[p] = false;
        }
    }
    best
}

fn record(id: usize, rects: &[Rect]) -> ArticleRecord {
    ArticleRecord {
        id,
        title: None,
        lines: rects.iter().map(|&r| PageRect::new(0, r)).collect(),
        segments: Vec::new(),
        continuation: Continuation::None,
    }
}

fn jitter(rng: &mut ChaCha8Rng, r: Rect) -> Rect {
    let mut d = || rng.random_range(-2..=2);
    let x0 = (r.x0 + d()).clamp(0, 78);
    let y0 = (r.y0 + d()).clamp(0, 58);
    Rect::new(x0, y0, (r.x1 + d()).clamp(x0 + 1, 80), (r.y1 + d()).clamp(y0 + 1, 60))
}

/// With disjoint ground-truth regions and a threshold above one half, the
/// greedy matching is a maximum matching; compared against exhaustive
/// search, with every IoU recomputed by pixel counting.
pub fn check_matching(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let n_gt = rng.random_range(0..=6usize);
        let gt_rects: Vec<Vec<Rect>> = (0..n_gt)
            .map(|i| {
                let (cx, cy) = ((i % 3) as i32 * 26, (i / 3) as i32 * 30);
                let mut rects = vec![Rect::new(cx + 1, cy + 1, cx + rng.random_range(8..25), cy + rng.random_range(5..14))];
                if rng.random_bool(0.5) {
                    rects.push(Rect::new(cx + 1, cy + 15, cx + rng.random_range(8..25), cy + rng.random_range(18..29)));
                }
                rects
            })
            .collect();
        let n_pred = rng.random_range(0..=6usize);
        let pred_rects: Vec<Vec<Rect>> = (0..n_pred)
            .map(|_| {
                if n_gt > 0 && rng.random_bool(0.7) {
                    let g = &gt_rects[rng.random_range(0..n_gt)];
                    g.iter().map(|&r| jitter(&mut rng, r)).collect()
                } else {
                    let x0 = rng.random_range(0..70);
                    let y0 = rng.random_range(0..50);
                    vec![Rect::new(x0, y0, x0 + rng.random_range(1..10), y0 + rng.random_range(1..10))]
                }
            })
            .collect();
        let thr = rng.random_range(0.55..0.95);
        let gt: Vec<ArticleRecord> = gt_rects.iter().enumerate().map(|(i, r)| record(i, r)).collect();
        let pred: Vec<ArticleRecord> = pred_rects.iter().enumerate().map(|(i, r)| record(i, r)).collect();
        let iou: Vec<Vec<f64>> =
            gt_rects.iter().map(|g| pred_rects.iter().map(|p| pixel_iou(p, g)).collect()).collect();
        let m = match_articles(&pred, &gt, thr);
        for pair in &m.pairs {
            if (pair.iou - iou[pair.gt][pair.predicted]).abs() > 1e-9 || pair.iou < thr {
                return Err(format!("case {case}: pair {pair:?}, pixel IoU {}", iou[pair.gt][pair.predicted]));
            }
        }
        let want = best_matching(&iou, thr, 0, &mut vec![false; n_pred]);
        if m.pairs.len() != want {
            return Err(format!("case {case}: greedy matched {}, maximum is {want}", m.pairs.len()));
        }
    }
    Ok(())
}
