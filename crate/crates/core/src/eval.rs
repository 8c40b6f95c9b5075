//! Scoring of predicted articles against ground truth.
//!
//! An article's region is the union of its text-line and title boxes.
//! Predictions are matched one-to-one to ground-truth articles by greedy
//! descending intersection-over-union; a ground-truth article is correct
//! when matched at or above the threshold.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::articles::Continuation;
use crate::error::EvalError;
use crate::geometry::{intersection_area, union_area, Rect};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PageRect {
    pub page: usize,
    pub rect: Rect,
}

impl PageRect {
    pub fn new(page: usize, rect: Rect) -> Self {
        PageRect { page, rect }
    }
}

/// Geometry of one article, as written by the segmenter and the generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub id: usize,
    pub title: Option<PageRect>,
    pub lines: Vec<PageRect>,
    /// Bounding boxes of the article's pieces (grid boxes or column pieces).
    #[serde(default)]
    pub segments: Vec<PageRect>,
    pub continuation: Continuation,
}

impl ArticleRecord {
    pub fn region(&self) -> impl Iterator<Item = PageRect> + '_ {
        self.lines.iter().copied().chain(self.title)
    }

    pub fn pages(&self) -> BTreeSet<usize> {
        self.region().map(|r| r.page).collect()
    }

    pub fn first_page(&self) -> usize {
        self.pages().into_iter().next().unwrap_or(0)
    }

    fn rects_by_page(&self) -> BTreeMap<usize, Vec<Rect>> {
        let mut m: BTreeMap<usize, Vec<Rect>> = BTreeMap::new();
        for r in self.region() {
            m.entry(r.page).or_default().push(r.rect);
        }
        m
    }
}

/// Article list in reading order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ArticleSet {
    pub articles: Vec<ArticleRecord>,
}

/// Intersection over union of two article regions.
pub fn article_iou(a: &ArticleRecord, b: &ArticleRecord) -> f64 {
    let (ra, rb) = (a.rects_by_page(), b.rects_by_page());
    let mut inter = 0i64;
    let mut area_a = 0i64;
    let mut area_b = 0i64;
    for (page, rects) in &ra {
        area_a += union_area(rects);
        if let Some(other) = rb.get(page) {
            inter += intersection_area(rects, other);
        }
    }
    for rects in rb.values() {
        area_b += union_area(rects);
    }
    let union = area_a + area_b - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub gt: usize,
    pub predicted: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Matching {
    /// Accepted pairs, by descending IoU.
    pub pairs: Vec<MatchPair>,
}

/// Greedy one-to-one matching by descending IoU, ties broken by index.
pub fn match_articles(predicted: &[ArticleRecord], gt: &[ArticleRecord], iou_threshold: f64) -> Matching {
    let mut candidates = Vec::new();
    for (g, ga) in gt.iter().enumerate() {
        let gpages = ga.pages();
        for (p, pa) in predicted.iter().enumerate() {
            if gpages.is_disjoint(&pa.pages()) {
                continue;
            }
            let iou = article_iou(pa, ga);
            if iou > 0.0 && iou >= iou_threshold {
                candidates.push(MatchPair { gt: g, predicted: p, iou });
            }
        }
    }
    candidates.sort_by(|a, b| b.iou.total_cmp(&a.iou).then(a.gt.cmp(&b.gt)).then(a.predicted.cmp(&b.predicted)));
    let mut used_gt = BTreeSet::new();
    let mut used_pred = BTreeSet::new();
    let mut pairs = Vec::new();
    for c in candidates {
        if used_gt.contains(&c.gt) || used_pred.contains(&c.predicted) {
            continue;
        }
        used_gt.insert(c.gt);
        used_pred.insert(c.predicted);
        pairs.push(c);
    }
    Matching { pairs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub n_articles_gt: usize,
    pub n_detected: usize,
    pub n_correct: usize,
}

/// `100 * num / den` rounded half away from zero to hundredths.
pub fn percent(num: i64, den: i64) -> Result<f64, EvalError> {
    if den == 0 {
        return Err(EvalError::DivisionByZero);
    }
    let scaled = 20_000 * num.abs() as i128 + den.abs() as i128;
    let hundredths = scaled / (2 * den.abs() as i128);
    let negative = (num < 0) != (den < 0);
    let h = if negative { -hundredths } else { hundredths };
    Ok(h as f64 / 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageReport {
    pub page: usize,
    pub n_articles_gt: usize,
    pub n_detected: usize,
    pub n_correct: usize,
    /// `None` when the page starts no ground-truth article.
    pub pct_correct: Option<f64>,
    pub pct_over_seg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_articles_gt: usize,
    pub n_detected: usize,
    pub n_correct: usize,
    pub pct_correct: f64,
    pub pct_over_seg: f64,
    /// Consecutive matched predictions whose ground-truth order agrees.
    pub order_pairs_correct: usize,
    pub order_pairs_total: usize,
    pub per_page: Vec<PageReport>,
}

/// Correct and over-segmentation rates from raw counts.
pub fn compute_rates(counts: Counts) -> Result<(f64, f64), EvalError> {
    let n = counts.n_articles_gt as i64;
    let correct = percent(counts.n_correct as i64, n)?;
    let over = percent(counts.n_detected as i64 - n, n)?;
    Ok((correct, over))
}

impl EvalReport {
    pub fn from_counts(counts: Counts) -> Result<Self, EvalError> {
        let (pct_correct, pct_over_seg) = compute_rates(counts)?;
        Ok(EvalReport {
            n_articles_gt: counts.n_articles_gt,
            n_detected: counts.n_detected,
            n_correct: counts.n_correct,
            pct_correct,
            pct_over_seg,
            order_pairs_correct: 0,
            order_pairs_total: 0,
            per_page: Vec::new(),
        })
    }

    pub fn counts(&self) -> Counts {
        Counts { n_articles_gt: self.n_articles_gt, n_detected: self.n_detected, n_correct: self.n_correct }
    }

    pub fn reading_order_exact(&self) -> bool {
        self.order_pairs_correct == self.order_pairs_total
    }

    /// Aligned text table; the first row carries the totals.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let header = ["#articles", "#detected", "#correct", "%correct", "%over-seg"];
        let _ = writeln!(s, "{}", header.join(" "));
        let row = |s: &mut String, a: usize, d: usize, c: usize, pc: Option<f64>, po: Option<f64>| {
            let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
            let _ = writeln!(
                s,
                "{:>9} {:>9} {:>8} {:>8} {:>9}",
                a,
                d,
                c,
                fmt(pc),
                fmt(po)
            );
        };
        row(&mut s, self.n_articles_gt, self.n_detected, self.n_correct, Some(self.pct_correct), Some(self.pct_over_seg));
        if self.per_page.len() > 1 {
            let _ = writeln!(s);
            let _ = writeln!(s, "{:>5} {}", "page", header.join(" "));
            for p in &self.per_page {
                let _ = write!(s, "{:>5} ", p.page + 1);
                row(&mut s, p.n_articles_gt, p.n_detected, p.n_correct, p.pct_correct, p.pct_over_seg);
            }
        }
        let _ = writeln!(s, "reading order: {}/{} consecutive pairs", self.order_pairs_correct, self.order_pairs_total);
        s
    }
}

/// Matches and scores one issue (or a whole corpus when article ids are
/// unique across it).
pub fn evaluate(predicted: &[ArticleRecord], gt: &[ArticleRecord], iou_threshold: f64) -> Result<EvalReport, EvalError> {
    let matching = match_articles(predicted, gt, iou_threshold);
    let mut report = EvalReport::from_counts(Counts {
        n_articles_gt: gt.len(),
        n_detected: predicted.len(),
        n_correct: matching.pairs.len(),
    })?;
    let (ok, total) = order_agreement(&matching);
    report.order_pairs_correct = ok;
    report.order_pairs_total = total;
    report.per_page = per_page(predicted, gt, &matching);
    Ok(report)
}

/// Sums several evaluations, e.g. the issues of a corpus.
pub fn combine(reports: &[EvalReport]) -> Result<EvalReport, EvalError> {
    let counts = reports.iter().fold(Counts::default(), |acc, r| Counts {
        n_articles_gt: acc.n_articles_gt + r.n_articles_gt,
        n_detected: acc.n_detected + r.n_detected,
        n_correct: acc.n_correct + r.n_correct,
    });
    let mut out = EvalReport::from_counts(counts)?;
    out.order_pairs_correct = reports.iter().map(|r| r.order_pairs_correct).sum();
    out.order_pairs_total = reports.iter().map(|r| r.order_pairs_total).sum();
    Ok(out)
}

fn order_agreement(matching: &Matching) -> (usize, usize) {
    let mut by_pred: Vec<(usize, usize)> = matching.pairs.iter().map(|p| (p.predicted, p.gt)).collect();
    by_pred.sort_unstable();
    let total = by_pred.len().saturating_sub(1);
    let ok = by_pred.windows(2).filter(|w| w[0].1 < w[1].1).count();
    (ok, total)
}

fn per_page(predicted: &[ArticleRecord], gt: &[ArticleRecord], matching: &Matching) -> Vec<PageReport> {
    let mut pages: BTreeMap<usize, Counts> = BTreeMap::new();
    for g in gt {
        pages.entry(g.first_page()).or_default().n_articles_gt += 1;
    }
    for p in predicted {
        pages.entry(p.first_page()).or_default().n_detected += 1;
    }
    for m in &matching.pairs {
        pages.entry(gt[m.gt].first_page()).or_default().n_correct += 1;
    }
    pages
        .into_iter()
        .map(|(page, c)| {
            let rates = compute_rates(c).ok();
            PageReport {
                page,
                n_articles_gt: c.n_articles_gt,
                n_detected: c.n_detected,
                n_correct: c.n_correct,
                pct_correct: rates.map(|r| r.0),
                pct_over_seg: rates.map(|r| r.1),
            }
        })
        .collect()
}
