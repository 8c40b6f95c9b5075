//! End-to-end segmentation of an issue.
//!
//! Pages are first analysed independently (vote, line extraction,
//! separator fitting). Issue-wide statistics then fix the split threshold
//! and the gridding tolerances, after which each page is gridded and
//! ordered on its own. Articles are finally linked across pages.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::articles::{
    build_section_tree, extract_articles, link_cross_page, order_sections, Article, ArticleWarning,
    SectionTree,
};
use crate::config::PipelineConfig;
use crate::eval::{ArticleRecord, PageRect};
use crate::geometry::Rect;
use crate::grid::{
    assign_content, build_separator_mask, extract_grid_boxes, generate_grid, GridBox, MaskIssue,
    SeparatorGrid, SeparatorMask,
};
use crate::labels::LabelImage;
use crate::metsalto::{BlockLayout, IssueDocument, LineLayout, PageLayout};
use crate::smoothing::{majority_vote_smooth, EntityImage};
use crate::textlines::{compute_line_stats, extract_text_lines, split_merged_lines, TextLine};

/// Gap tolerance used when an issue has no text line to measure.
pub const FALLBACK_GAP_PX: f64 = 6.0;
/// Separator thickness assumed when an issue has no separator.
pub const FALLBACK_THICKNESS_PX: f64 = 3.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub smoothing_ms: f64,
    pub lines_ms: f64,
    pub mask_ms: f64,
    pub split_ms: f64,
    pub grid_ms: f64,
    pub articles_ms: f64,
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PageWarning {
    Mask(MaskIssue),
    Article(ArticleWarning),
    /// A text line that stayed above the split threshold.
    OversizedLine { id: usize, bbox: Rect },
}

/// Result of the per-page analysis that precedes issue statistics.
#[derive(Debug, Clone)]
pub struct PageAnalysis {
    pub entity: EntityImage,
    pub lines: Vec<TextLine>,
    pub mask: SeparatorMask,
    pub timings: StageTimings,
}

pub fn analyze_page(img: &LabelImage, cfg: &PipelineConfig) -> PageAnalysis {
    let mut timings = StageTimings::default();
    let t = Instant::now();
    let entity = majority_vote_smooth(img, cfg.connectivity, &cfg.tie_break);
    timings.smoothing_ms = elapsed_ms(t);
    let t = Instant::now();
    let lines = extract_text_lines(&entity, cfg.connectivity);
    timings.lines_ms = elapsed_ms(t);
    let t = Instant::now();
    let mask = build_separator_mask(&entity, cfg.connectivity, cfg.max_separator_thickness);
    timings.mask_ms = elapsed_ms(t);
    PageAnalysis { entity, lines, mask, timings }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IssueStats {
    pub mean_hull_area: f64,
    pub line_count: usize,
    pub median_line_height: f64,
    pub median_separator_thickness: f64,
    pub gap_tolerance: f64,
    pub offset_tolerance: f64,
}

fn median(mut v: Vec<i32>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_unstable();
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] as f64 } else { (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0 })
}

pub fn issue_stats(pages: &[PageAnalysis], cfg: &PipelineConfig) -> IssueStats {
    let line_stats = compute_line_stats(pages.iter().flat_map(|p| p.lines.iter()));
    let heights: Vec<i32> = pages.iter().flat_map(|p| p.lines.iter().map(|l| l.bbox.height())).collect();
    let thicknesses: Vec<i32> = pages
        .iter()
        .flat_map(|p| p.mask.verticals.iter().chain(&p.mask.horizontals).map(|s| s.thickness))
        .collect();
    let median_line_height = median(heights);
    let median_separator_thickness = median(thicknesses).unwrap_or(FALLBACK_THICKNESS_PX);
    let gap_tolerance = match median_line_height {
        Some(h) => cfg.gap_tolerance.resolve(h),
        None => cfg.gap_tolerance.resolve(FALLBACK_GAP_PX / 0.33),
    };
    IssueStats {
        mean_hull_area: line_stats.mean_hull_area,
        line_count: line_stats.count,
        median_line_height: median_line_height.unwrap_or(0.0),
        median_separator_thickness,
        gap_tolerance,
        offset_tolerance: cfg.offset_tolerance.resolve(median_separator_thickness),
    }
}

#[derive(Debug, Clone)]
pub struct PageResult {
    pub index: usize,
    pub width: u32,
    pub height: u32,
    pub entity: EntityImage,
    pub lines: Vec<TextLine>,
    pub grid: SeparatorGrid,
    /// All boxes of the arrangement.
    pub all_boxes: Vec<GridBox>,
    /// Boxes holding text lines, with their content.
    pub boxes: Vec<GridBox>,
    pub tree: SectionTree,
    /// Box ids in reading order.
    pub order: Vec<usize>,
    pub articles: Vec<Article>,
    pub warnings: Vec<PageWarning>,
    pub timings: StageTimings,
}

impl PageResult {
    pub fn line(&self, id: usize) -> Option<&TextLine> {
        self.lines.iter().find(|l| l.id == id)
    }

    pub fn layout(&self, image_ref: &str) -> PageLayout {
        let lines: BTreeMap<usize, &TextLine> = self.lines.iter().map(|l| (l.id, l)).collect();
        PageLayout {
            width: self.width,
            height: self.height,
            image_ref: image_ref.to_string(),
            blocks: self
                .boxes
                .iter()
                .map(|b| BlockLayout {
                    id: b.id,
                    bbox: b.bbox,
                    lines: b.text_lines.iter().map(|id| LineLayout { id: *id, bbox: lines[id].bbox }).collect(),
                })
                .collect(),
            headings: self.grid.titles.iter().map(|t| LineLayout { id: t.id, bbox: t.bbox }).collect(),
        }
    }
}

/// Grids, orders and assembles one analysed page.
pub fn finish_page(index: usize, analysis: PageAnalysis, stats: &IssueStats, cfg: &PipelineConfig) -> PageResult {
    let PageAnalysis { entity, lines, mask, mut timings } = analysis;
    let mut warnings: Vec<PageWarning> = mask.issues.iter().cloned().map(PageWarning::Mask).collect();

    let t = Instant::now();
    let line_stats = crate::textlines::LineStats { mean_hull_area: stats.mean_hull_area, count: stats.line_count };
    let lines = split_merged_lines(lines, &line_stats, &cfg.split);
    warnings.extend(
        lines.iter().filter(|l| l.oversized).map(|l| PageWarning::OversizedLine { id: l.id, bbox: l.bbox }),
    );
    timings.split_ms = elapsed_ms(t);

    let t = Instant::now();
    let page = entity.page_rect();
    let grid = generate_grid(mask.verticals, mask.horizontals, mask.titles, page, stats.gap_tolerance, stats.offset_tolerance);
    let all_boxes = extract_grid_boxes(&grid);
    let boxes = assign_content(&all_boxes, &lines, &grid.titles);
    timings.grid_ms = elapsed_ms(t);

    let t = Instant::now();
    let tree = build_section_tree(&boxes, &grid);
    let order = order_sections(&tree);
    let by_id: BTreeMap<usize, &GridBox> = boxes.iter().map(|b| (b.id, b)).collect();
    let ordered: Vec<&GridBox> = order.iter().map(|id| by_id[id]).collect();
    let (articles, article_warnings) = extract_articles(&ordered, &grid, index);
    warnings.extend(article_warnings.into_iter().map(PageWarning::Article));
    timings.articles_ms = elapsed_ms(t);

    PageResult {
        index,
        width: entity.width(),
        height: entity.height(),
        entity,
        lines,
        grid,
        all_boxes,
        boxes,
        tree,
        order,
        articles,
        warnings,
        timings,
    }
}

#[derive(Debug, Clone)]
pub struct IssueResult {
    pub stats: IssueStats,
    pub pages: Vec<PageResult>,
    /// Issue articles in reading order.
    pub articles: Vec<Article>,
}

/// Links the finished pages of an issue.
pub fn link_issue(stats: IssueStats, pages: Vec<PageResult>) -> IssueResult {
    let per_page: Vec<Vec<Article>> = pages.iter().map(|p| p.articles.clone()).collect();
    let articles = link_cross_page(per_page);
    IssueResult { stats, pages, articles }
}

/// Segments an issue on the calling thread.
pub fn segment_issue(images: &[LabelImage], cfg: &PipelineConfig) -> IssueResult {
    let analyses: Vec<PageAnalysis> = images.iter().map(|img| analyze_page(img, cfg)).collect();
    let stats = issue_stats(&analyses, cfg);
    let pages = analyses.into_iter().enumerate().map(|(i, a)| finish_page(i, a, &stats, cfg)).collect();
    link_issue(stats, pages)
}

impl IssueResult {
    /// Article geometry in reading order.
    pub fn article_records(&self) -> Vec<ArticleRecord> {
        self.articles
            .iter()
            .map(|a| {
                let title = a.title.map(|t| {
                    let page = &self.pages[t.page];
                    let bbox = page.grid.titles.iter().find(|x| x.id == t.id).map(|x| x.bbox).unwrap_or_default();
                    PageRect::new(t.page, bbox)
                });
                let lines = a
                    .text_lines
                    .iter()
                    .map(|l| PageRect::new(l.page, self.pages[l.page].line(l.id).map(|x| x.bbox).unwrap_or_default()))
                    .collect();
                let segments = a
                    .boxes
                    .iter()
                    .map(|b| {
                        let bbox = self.pages[b.page].boxes.iter().find(|x| x.id == b.id).map(|x| x.bbox);
                        PageRect::new(b.page, bbox.unwrap_or_default())
                    })
                    .collect();
                ArticleRecord { id: a.id, title, lines, segments, continuation: a.continuation }
            })
            .collect()
    }

    pub fn document(&self, issue_id: &str, date: Option<String>, image_refs: &[String]) -> IssueDocument {
        IssueDocument {
            issue_id: issue_id.to_string(),
            date,
            pages: self
                .pages
                .iter()
                .map(|p| p.layout(image_refs.get(p.index).map_or("", |s| s.as_str())))
                .collect(),
            articles: self.articles.clone(),
        }
    }
}
