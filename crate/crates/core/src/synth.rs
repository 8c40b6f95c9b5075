//! Synthetic newspaper pages with ground truth.
//!
//! Pages are stacks of sections separated by full-width rules. Each section
//! has its own column count; its articles flow column-major, a title band
//! followed by text lines, optionally separated by short rules inside a
//! column. An article that does not fit continues, without title, at the top
//! of the next column. Raw label maps use the canonical code table.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::articles::Continuation;
use crate::error::SynthError;
use crate::eval::{ArticleRecord, PageRect};
use crate::geometry::{Orientation, Rect};
use crate::labels::{LabelImage, RawLabel};

pub const MARGIN: i32 = 24;
pub const RULE_THICKNESS: i32 = 3;
pub const LINE_HEIGHT: i32 = 20;
pub const LINE_GAP: i32 = 20;
pub const TITLE_GAP: i32 = 12;
pub const ARTICLE_GAP: i32 = 28;
pub const RULE_CLEARANCE: i32 = 12;
pub const COLUMN_PADDING: i32 = 12;
pub const SECTION_PADDING: i32 = 12;
pub const MASTHEAD_HEIGHT: i32 = 60;
pub const MAX_PAGE_HEIGHT: i32 = 20_000;
pub const DPI: u32 = 300;
/// Breaks are kept this far from crossing rulings.
const BREAK_CLEARANCE: i32 = 16;
const GT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Degradations {
    pub separator_break_prob: f64,
    pub line_fuse_prob: f64,
    pub title_mislabel_prob: f64,
}

impl Default for Degradations {
    fn default() -> Self {
        Degradations { separator_break_prob: 0.3, line_fuse_prob: 0.05, title_mislabel_prob: 0.0 }
    }
}

impl Degradations {
    pub fn none() -> Self {
        Degradations { separator_break_prob: 0.0, line_fuse_prob: 0.0, title_mislabel_prob: 0.0 }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        for (name, p) in [
            ("separator_break_prob", self.separator_break_prob),
            ("line_fuse_prob", self.line_fuse_prob),
            ("title_mislabel_prob", self.title_mislabel_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SynthError::InfeasibleRecipe(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArticleSpec {
    pub lines: u32,
    /// Height of the title band; `None` for a headless continuation.
    pub title_height: Option<u32>,
}

impl ArticleSpec {
    pub fn titled(lines: u32) -> Self {
        ArticleSpec { lines, title_height: Some(36) }
    }

    pub fn headless(lines: u32) -> Self {
        ArticleSpec { lines, title_height: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub columns: u32,
    pub articles: Vec<ArticleSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageRecipe {
    pub width: u32,
    pub sections: Vec<SectionSpec>,
    /// Empty masthead band closed by a full-width rule.
    pub header_rule: bool,
    pub article_rule_prob: f64,
    pub degradations: Degradations,
    pub seed: u64,
}

impl PageRecipe {
    /// One section of `columns` columns holding titled articles with the
    /// given line counts.
    pub fn simple(columns: u32, lines: &[u32], seed: u64) -> Self {
        PageRecipe {
            width: 1200,
            sections: vec![SectionSpec {
                columns,
                articles: lines.iter().map(|&l| ArticleSpec::titled(l)).collect(),
            }],
            header_rule: false,
            article_rule_prob: 0.5,
            degradations: Degradations::none(),
            seed,
        }
    }

    pub fn article_count(&self) -> usize {
        self.sections.iter().map(|s| s.articles.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegradationLog {
    pub broken_separators: usize,
    pub fused_line_pairs: usize,
    pub mislabeled_lines: usize,
}

impl DegradationLog {
    fn add(&mut self, other: &DegradationLog) {
        self.broken_separators += other.broken_separators;
        self.fused_line_pairs += other.fused_line_pairs;
        self.mislabeled_lines += other.mislabeled_lines;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtSeparator {
    pub page: usize,
    pub orientation: Orientation,
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtSection {
    pub page: usize,
    pub bbox: Rect,
    pub columns: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub version: u32,
    pub articles: Vec<ArticleRecord>,
    pub separators: Vec<GtSeparator>,
    pub sections: Vec<GtSection>,
    /// Ground-truth article ids in reading order.
    pub reading_order: Vec<usize>,
    pub degradations: DegradationLog,
}

impl GroundTruth {
    pub fn pages(&self) -> usize {
        self.sections.iter().map(|s| s.page + 1).max().unwrap_or(0)
    }

    /// The articles and rulings of one page, with page-level continuation
    /// flags, renumbered from zero.
    pub fn page_view(&self, page: usize) -> GroundTruth {
        let mut articles = Vec::new();
        for a in &self.articles {
            let pages: Vec<usize> = a.pages().into_iter().collect();
            if !pages.contains(&page) {
                continue;
            }
            let previous = a.continuation.previous() || pages[0] < page;
            let next = pages[pages.len() - 1] > page;
            articles.push(ArticleRecord {
                id: articles.len(),
                title: a.title.filter(|t| t.page == page),
                lines: a.lines.iter().copied().filter(|l| l.page == page).collect(),
                segments: a.segments.iter().copied().filter(|s| s.page == page).collect(),
                continuation: Continuation::from_flags(previous, next),
            });
        }
        GroundTruth {
            version: self.version,
            reading_order: (0..articles.len()).collect(),
            articles,
            separators: self.separators.iter().filter(|s| s.page == page).cloned().collect(),
            sections: self.sections.iter().filter(|s| s.page == page).cloned().collect(),
            degradations: DegradationLog::default(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ground truth serializes");
        s.push('\n');
        s
    }
}

/// Generates one page and its ground truth.
pub fn generate_page(recipe: &PageRecipe) -> Result<(LabelImage, GroundTruth), SynthError> {
    let (mut images, gt) = generate_issue(std::slice::from_ref(recipe), 0)?;
    Ok((images.remove(0), gt))
}

/// Generates an issue. `spanning` page boundaries are chosen at random; at
/// each, the last article of the page continues, without title, at the top
/// of the next page.
pub fn generate_issue(
    recipes: &[PageRecipe],
    spanning: usize,
) -> Result<(Vec<LabelImage>, GroundTruth), SynthError> {
    if recipes.is_empty() {
        return Err(SynthError::InfeasibleRecipe("an issue needs at least one page".into()));
    }
    if spanning > recipes.len() - 1 {
        return Err(SynthError::InfeasibleRecipe(format!(
            "{spanning} spanning articles need at least {} pages",
            spanning + 1
        )));
    }
    let mut recipes: Vec<PageRecipe> = recipes.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(recipes[0].seed ^ 0x5eed_5a11_u64);
    let mut boundaries: Vec<usize> = (0..recipes.len() - 1).collect();
    for i in 0..spanning {
        let j = rng.random_range(i..boundaries.len());
        boundaries.swap(i, j);
    }
    boundaries.truncate(spanning);
    boundaries.sort_unstable();
    let mut continued_from_previous = vec![false; recipes.len()];
    for &p in &boundaries {
        let last = recipes[p]
            .sections
            .iter_mut()
            .rev()
            .find_map(|s| s.articles.last_mut())
            .ok_or_else(|| SynthError::InfeasibleRecipe(format!("page {p} has no article to continue")))?;
        last.lines = last.lines.max(2);
        let rest = last.lines / 2;
        last.lines -= rest;
        let next = recipes[p + 1]
            .sections
            .first_mut()
            .ok_or_else(|| SynthError::InfeasibleRecipe(format!("page {} has no section", p + 1)))?;
        next.articles.insert(0, ArticleSpec::headless(rest));
        continued_from_previous[p + 1] = true;
    }

    let mut images = Vec::with_capacity(recipes.len());
    let mut gt = GroundTruth {
        version: GT_VERSION,
        articles: Vec::new(),
        separators: Vec::new(),
        sections: Vec::new(),
        reading_order: Vec::new(),
        degradations: DegradationLog::default(),
    };
    for (p, recipe) in recipes.iter().enumerate() {
        let page = render_page(recipe, p, continued_from_previous[p])?;
        for (i, art) in page.articles.into_iter().enumerate() {
            if i == 0 && art.title.is_none() && continued_from_previous[p] {
                if let Some(prev) = gt.articles.last_mut() {
                    prev.lines.extend(art.lines);
                    prev.segments.extend(art.segments);
                    continue;
                }
            }
            let id = gt.articles.len();
            gt.articles.push(ArticleRecord { id, ..art });
        }
        gt.separators.extend(page.separators);
        gt.sections.extend(page.sections);
        gt.degradations.add(&page.log);
        images.push(page.image);
    }
    for a in &mut gt.articles {
        a.continuation = Continuation::from_flags(a.title.is_none(), a.pages().len() > 1);
    }
    gt.reading_order = (0..gt.articles.len()).collect();
    Ok((images, gt))
}

struct RenderedPage {
    image: LabelImage,
    articles: Vec<ArticleRecord>,
    separators: Vec<GtSeparator>,
    sections: Vec<GtSection>,
    log: DegradationLog,
}

#[derive(Debug, Clone)]
struct PlacedLine {
    rect: Rect,
    article: usize,
    segment: usize,
    /// Last line of its article, drawn ragged.
    last: bool,
}

#[derive(Debug, Clone)]
struct Rule {
    rect: Rect,
    orientation: Orientation,
    /// Coordinates along the rule where perpendicular rulings meet it.
    crossings: Vec<i32>,
}

/// Relative placement of one section's content.
#[derive(Debug, Default)]
struct Flow {
    /// (article, column, y) of each title.
    titles: Vec<(usize, usize, i32)>,
    /// (article, column, y) of each line.
    lines: Vec<(usize, usize, i32)>,
    /// (column, y) of each in-column rule.
    rules: Vec<(usize, i32)>,
}

fn title_height(a: &ArticleSpec) -> Option<i32> {
    a.title_height.map(|h| h as i32)
}

fn first_unit(a: &ArticleSpec) -> i32 {
    title_height(a).map_or(0, |h| h + TITLE_GAP) + LINE_HEIGHT
}

fn flow(articles: &[ArticleSpec], columns: usize, height: i32, rules: &[bool]) -> Option<Flow> {
    let mut out = Flow::default();
    let mut col = 0usize;
    let mut y = 0i32;
    for (i, a) in articles.iter().enumerate() {
        if i > 0 && y > 0 {
            let spacing = if rules[i] { 2 * RULE_CLEARANCE + RULE_THICKNESS } else { ARTICLE_GAP };
            if y + spacing + first_unit(a) <= height {
                if rules[i] {
                    out.rules.push((col, y + RULE_CLEARANCE));
                }
                y += spacing;
            } else {
                col += 1;
                y = 0;
            }
        }
        let mut fresh = true;
        if let Some(th) = title_height(a) {
            if y + th + TITLE_GAP + LINE_HEIGHT > height {
                col += 1;
                y = 0;
            }
            if col >= columns || th + TITLE_GAP + LINE_HEIGHT > height {
                return None;
            }
            out.titles.push((i, col, y));
            y += th + TITLE_GAP;
            fresh = true;
        }
        for _ in 0..a.lines {
            let mut gap = if fresh || y == 0 { 0 } else { LINE_GAP };
            if y + gap + LINE_HEIGHT > height {
                col += 1;
                y = 0;
                gap = 0;
            }
            if col >= columns {
                return None;
            }
            out.lines.push((i, col, y + gap));
            y += gap + LINE_HEIGHT;
            fresh = false;
        }
    }
    Some(out)
}

fn infeasible(msg: impl Into<String>) -> SynthError {
    SynthError::InfeasibleRecipe(msg.into())
}

fn validate(recipe: &PageRecipe, page: usize, continued: bool) -> Result<(), SynthError> {
    recipe.degradations.validate()?;
    if !(0.0..=1.0).contains(&recipe.article_rule_prob) {
        return Err(infeasible("article_rule_prob is not a probability"));
    }
    if recipe.sections.is_empty() {
        return Err(infeasible(format!("page {page} has no section")));
    }
    let width = recipe.width as i32;
    for (s, sec) in recipe.sections.iter().enumerate() {
        if sec.columns == 0 {
            return Err(infeasible("a section needs at least one column"));
        }
        let text = (width - 2 * MARGIN) / sec.columns as i32 - 2 * COLUMN_PADDING;
        if text < 40 {
            return Err(infeasible(format!("{} columns do not fit in width {width}", sec.columns)));
        }
        for (i, a) in sec.articles.iter().enumerate() {
            if a.lines == 0 {
                return Err(infeasible("an article needs at least one text line"));
            }
            match a.title_height {
                Some(h) if !(16..=120).contains(&h) => {
                    return Err(infeasible(format!("title height {h} outside 16..=120")));
                }
                None if !(continued && s == 0 && i == 0) => {
                    return Err(infeasible("only the first article of a continued page may be headless"));
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn render_page(recipe: &PageRecipe, page: usize, continued: bool) -> Result<RenderedPage, SynthError> {
    validate(recipe, page, continued)?;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let width = recipe.width as i32;
    let deg = recipe.degradations;

    let mut rules: Vec<Rule> = Vec::new();
    let mut titles: Vec<(usize, Rect)> = Vec::new();
    let mut lines: Vec<PlacedLine> = Vec::new();
    let mut sections: Vec<GtSection> = Vec::new();
    let mut article_base = 0usize;
    let mut segment_base = 0usize;

    let mut top = MARGIN;
    if recipe.header_rule {
        let y = MARGIN + MASTHEAD_HEIGHT;
        rules.push(Rule {
            rect: Rect::new(MARGIN, y, width - MARGIN, y + RULE_THICKNESS),
            orientation: Orientation::Horizontal,
            crossings: Vec::new(),
        });
        top = y + RULE_THICKNESS;
    }
    let mut section_rule_indices: Vec<usize> = rules.iter().enumerate().map(|(i, _)| i).collect();

    for (s, sec) in recipe.sections.iter().enumerate() {
        let cols = sec.columns as usize;
        let col_width = (width - 2 * MARGIN) / cols as i32;
        let xb = |k: usize| MARGIN + k as i32 * col_width;
        let rule_flags: Vec<bool> =
            (0..sec.articles.len()).map(|_| rng.random_bool(recipe.article_rule_prob)).collect();
        let total: i32 = sec
            .articles
            .iter()
            .map(|a| first_unit(a) + (a.lines as i32 - 1) * (LINE_HEIGHT + LINE_GAP) + ARTICLE_GAP)
            .sum();
        let lower = sec.articles.iter().map(first_unit).max().unwrap_or(LINE_HEIGHT);
        let mut height = lower.max(total / cols as i32);
        let placed = loop {
            if let Some(f) = flow(&sec.articles, cols, height, &rule_flags) {
                break f;
            }
            height += 4;
            if height > MAX_PAGE_HEIGHT {
                return Err(infeasible(format!("section {s} of page {page} does not fit")));
            }
        };
        let content_top = top + SECTION_PADDING;
        let bottom = content_top + height + SECTION_PADDING;

        // content
        let text_x = |k: usize| (xb(k) + COLUMN_PADDING, xb(k + 1) - COLUMN_PADDING);
        let mut segment_of: Vec<(usize, usize)> = Vec::new();
        let mut segment_id = |article: usize, col: usize| -> usize {
            if let Some(i) = segment_of.iter().position(|&k| k == (article, col)) {
                return segment_base + i;
            }
            segment_of.push((article, col));
            segment_base + segment_of.len() - 1
        };
        for &(a, col, y) in &placed.titles {
            let (x0, x1) = text_x(col);
            let th = title_height(&sec.articles[a]).unwrap_or(0);
            let w = rng.random_range(((x1 - x0) * 2 / 5).max(20)..=x1 - x0);
            titles.push((article_base + a, Rect::new(x0, content_top + y, x0 + w, content_top + y + th)));
        }
        for (n, &(a, col, y)) in placed.lines.iter().enumerate() {
            let (x0, x1) = text_x(col);
            let last = placed.lines.get(n + 1).is_none_or(|next| next.0 != a);
            let x1 = if last { x0 + rng.random_range(((x1 - x0) * 2 / 5).max(20)..=x1 - x0) } else { x1 };
            lines.push(PlacedLine {
                rect: Rect::new(x0, content_top + y, x1, content_top + y + LINE_HEIGHT),
                article: article_base + a,
                segment: segment_id(article_base + a, col),
                last,
            });
        }
        segment_base += segment_of.len();
        for &(col, y) in &placed.rules {
            let y = content_top + y;
            rules.push(Rule {
                rect: Rect::new(xb(col) + 8, y, xb(col + 1) - 7, y + RULE_THICKNESS),
                orientation: Orientation::Horizontal,
                crossings: Vec::new(),
            });
        }
        for k in 1..cols {
            let x = xb(k);
            rules.push(Rule {
                rect: Rect::new(x - 1, top + 5, x + 2, bottom - 5),
                orientation: Orientation::Vertical,
                crossings: Vec::new(),
            });
        }
        let crossings: Vec<i32> = (1..cols).map(xb).collect();
        if let Some(&above) = section_rule_indices.last() {
            rules[above].crossings.extend(&crossings);
        }
        sections.push(GtSection { page, bbox: Rect::new(0, top, width, bottom), columns: sec.columns });
        article_base += sec.articles.len();
        top = bottom;
        if s + 1 < recipe.sections.len() {
            rules.push(Rule {
                rect: Rect::new(MARGIN, bottom, width - MARGIN, bottom + RULE_THICKNESS),
                orientation: Orientation::Horizontal,
                crossings,
            });
            section_rule_indices.push(rules.len() - 1);
            top = bottom + RULE_THICKNESS;
        }
    }
    let height = top + MARGIN;
    if height > MAX_PAGE_HEIGHT {
        return Err(infeasible(format!("page {page} is {height} px tall")));
    }

    // degradations: mislabels first, then fusions among the remaining lines
    let mut log = DegradationLog::default();
    let mut mislabeled = vec![false; lines.len()];
    for a in 0..article_base {
        if !rng.random_bool(deg.title_mislabel_prob) {
            continue;
        }
        let eligible: Vec<usize> = (0..lines.len())
            .filter(|&i| lines[i].article == a && mislabel_eligible(&lines, &titles, i))
            .collect();
        if eligible.is_empty() {
            continue;
        }
        mislabeled[eligible[rng.random_range(0..eligible.len())]] = true;
        log.mislabeled_lines += 1;
    }
    let mut fused: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i + 1 < lines.len() {
        let (a, b) = (&lines[i], &lines[i + 1]);
        let candidate = a.segment == b.segment && !a.last && !b.last && !mislabeled[i] && !mislabeled[i + 1];
        if candidate && rng.random_bool(deg.line_fuse_prob) {
            fused.push((i, i + 1));
            i += 2;
        } else {
            i += 1;
        }
    }
    log.fused_line_pairs = fused.len();

    // painting
    let mut img = LabelImage::new(width as u32, height as u32).with_dpi(Some(DPI));
    let text_family = [RawLabel::CHARACTER, RawLabel::INTER_CHARACTER, RawLabel::INTER_WORD];
    let title_family = [RawLabel::TITLE_CHARACTER, RawLabel::TITLE_INTER_CHARACTER, RawLabel::TITLE_INTER_WORD];
    for (_, r) in &titles {
        paint_band(&mut img, *r, title_family, RawLabel::CHARACTER, &mut rng);
    }
    for (i, l) in lines.iter().enumerate() {
        if mislabeled[i] {
            paint_band(&mut img, l.rect, title_family, RawLabel::CHARACTER, &mut rng);
        } else {
            paint_band(&mut img, l.rect, text_family, RawLabel::TITLE_CHARACTER, &mut rng);
        }
    }
    for &(a, b) in &fused {
        let (ra, rb) = (lines[a].rect, lines[b].rect);
        let x = rng.random_range(ra.x0 + 4..ra.x1.min(rb.x1) - 6);
        img.fill_rect(Rect::new(x, ra.y1, x + 2, rb.y0), RawLabel::CHARACTER);
    }
    let mut separators = Vec::new();
    for rule in &rules {
        let code = match rule.orientation {
            Orientation::Vertical => RawLabel::VERTICAL_SEPARATOR,
            Orientation::Horizontal => RawLabel::HORIZONTAL_SEPARATOR,
        };
        img.fill_rect(rule.rect, code);
        separators.push(GtSeparator { page, orientation: rule.orientation, rect: rule.rect });
        if rng.random_bool(deg.separator_break_prob) && break_rule(&mut img, rule, &mut rng) {
            log.broken_separators += 1;
        }
    }
    for _ in 0..rng.random_range(0..6) {
        let left = rng.random_bool(0.5);
        let x = if left { rng.random_range(4..MARGIN - 8) } else { rng.random_range(width - MARGIN + 6..width - 6) };
        let y = rng.random_range(4..height - 6);
        img.fill_rect(Rect::new(x, y, x + 2, y + 2), RawLabel::NOISE);
    }

    // ground truth, in page reading order
    let mut articles: Vec<ArticleRecord> = (0..article_base)
        .map(|a| ArticleRecord {
            id: a,
            title: titles.iter().find(|t| t.0 == a).map(|t| PageRect::new(page, t.1)),
            lines: Vec::new(),
            segments: Vec::new(),
            continuation: Continuation::None,
        })
        .collect();
    let mut seg_rects: Vec<Option<(usize, Rect)>> = vec![None; segment_base];
    for l in &lines {
        articles[l.article].lines.push(PageRect::new(page, l.rect));
        let slot = &mut seg_rects[l.segment];
        *slot = Some(match slot {
            Some((a, r)) => (*a, r.hull(&l.rect)),
            None => (l.article, l.rect),
        });
    }
    for (a, t) in &titles {
        if let Some(Some((_, r))) = seg_rects.iter_mut().find(|s| s.is_some_and(|(art, r)| art == *a && r.x0 == t.x0 && r.y0 >= t.y0)) {
            *r = r.hull(t);
        }
    }
    for (a, r) in seg_rects.into_iter().flatten() {
        articles[a].segments.push(PageRect::new(page, r));
    }
    for a in &mut articles {
        if a.title.is_none() {
            a.continuation = Continuation::ContinuesPrevious;
        }
    }
    Ok(RenderedPage { image: img, articles, separators, sections, log })
}

/// A line may be relabelled as a title when it leaves text lines on both
/// sides of the new boundary: one after it in its column piece, and one
/// before it unless the piece has no title of its own.
fn mislabel_eligible(lines: &[PlacedLine], titles: &[(usize, Rect)], i: usize) -> bool {
    let seg = lines[i].segment;
    let before = lines[..i].iter().any(|l| l.segment == seg);
    let after = lines[i + 1..].iter().any(|l| l.segment == seg);
    let first = lines.iter().position(|l| l.segment == seg).unwrap_or(i);
    let titled = titles
        .iter()
        .any(|(a, t)| *a == lines[i].article && t.y1 <= lines[first].rect.y0 && t.x0 == lines[first].rect.x0 && lines[first].rect.y0 - t.y1 == TITLE_GAP);
    after && (before || !titled)
}

fn paint_band(img: &mut LabelImage, r: Rect, family: [RawLabel; 3], minority: RawLabel, rng: &mut ChaCha8Rng) {
    let mut x = r.x0;
    let mut word_left = rng.random_range(20..80);
    while x < r.x1 {
        let (code, run) = if word_left <= 0 {
            word_left = rng.random_range(20..80);
            (family[2], rng.random_range(5..9))
        } else {
            let glyph = rng.random_range(5..9);
            word_left -= glyph + 1;
            img.fill_rect(Rect::new(x, r.y0, (x + glyph).min(r.x1), r.y1), family[0]);
            x = (x + glyph).min(r.x1);
            (family[1], 1)
        };
        let end = (x + run).min(r.x1);
        img.fill_rect(Rect::new(x, r.y0, end, r.y1), code);
        x = end;
    }
    for y in r.y0..r.y1 {
        for x in r.x0..r.x1 {
            if rng.random_bool(0.01) {
                img.set(x as u32, y as u32, minority);
            }
        }
    }
}

/// Cuts one or two short gaps into a ruling, away from its ends and from
/// crossing rulings.
fn break_rule(img: &mut LabelImage, rule: &Rule, rng: &mut ChaCha8Rng) -> bool {
    let r = rule.rect;
    let (start, end) = match rule.orientation {
        Orientation::Horizontal => (r.x0, r.x1),
        Orientation::Vertical => (r.y0, r.y1),
    };
    let mut done = false;
    for _ in 0..rng.random_range(1..=2) {
        let gap = rng.random_range(2..=5);
        if end - start < 2 * 12 + gap + 1 {
            break;
        }
        let at = rng.random_range(start + 12..end - 12 - gap);
        if rule.crossings.iter().any(|&c| c >= at - BREAK_CLEARANCE && c < at + gap + BREAK_CLEARANCE) {
            continue;
        }
        let cut = match rule.orientation {
            Orientation::Horizontal => Rect::new(at, r.y0, at + gap, r.y1),
            Orientation::Vertical => Rect::new(r.x0, at, r.x1, at + gap),
        };
        img.fill_rect(cut, RawLabel::BACKGROUND);
        done = true;
    }
    done
}

/// Inclusive integer range in recipe files.
pub type Range = [u32; 2];

/// Distribution over page recipes, used to draw seeded corpora.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayoutFamily {
    pub pages: Range,
    pub columns: Range,
    pub sections: Range,
    pub articles_per_page: Range,
    pub lines_per_article: Range,
    pub width: Range,
    pub title_heights: Vec<u32>,
    pub max_spanning: u32,
    pub header_rule_prob: f64,
    pub article_rule_prob: f64,
    /// All sections of a page share one column count.
    pub uniform_columns: bool,
    pub degradations: Degradations,
}

impl Default for LayoutFamily {
    fn default() -> Self {
        LayoutFamily {
            pages: [1, 4],
            columns: [1, 4],
            sections: [1, 3],
            articles_per_page: [1, 12],
            lines_per_article: [2, 10],
            width: [900, 1500],
            title_heights: vec![28, 36, 48],
            max_spanning: 2,
            header_rule_prob: 0.5,
            article_rule_prob: 0.5,
            uniform_columns: false,
            degradations: Degradations::none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueRecipe {
    pub pages: Vec<PageRecipe>,
    pub spanning: usize,
}

impl IssueRecipe {
    pub fn generate(&self) -> Result<(Vec<LabelImage>, GroundTruth), SynthError> {
        generate_issue(&self.pages, self.spanning)
    }
}

fn draw(rng: &mut ChaCha8Rng, r: Range) -> u32 {
    rng.random_range(r[0]..=r[1].max(r[0]))
}

impl LayoutFamily {
    pub fn validate(&self) -> Result<(), SynthError> {
        self.degradations.validate()?;
        for (name, r, min) in [
            ("pages", self.pages, 1),
            ("columns", self.columns, 1),
            ("sections", self.sections, 1),
            ("articles_per_page", self.articles_per_page, 1),
            ("lines_per_article", self.lines_per_article, 1),
            ("width", self.width, 200),
        ] {
            if r[0] < min || r[0] > r[1] {
                return Err(infeasible(format!("{name} range {r:?} is invalid")));
            }
        }
        if self.title_heights.is_empty() {
            return Err(infeasible("title_heights is empty"));
        }
        for p in [self.header_rule_prob, self.article_rule_prob] {
            if !(0.0..=1.0).contains(&p) {
                return Err(infeasible(format!("{p} is not a probability")));
            }
        }
        Ok(())
    }

    /// Draws the recipe of one issue.
    pub fn sample_issue(&self, seed: u64) -> IssueRecipe {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_pages = draw(&mut rng, self.pages) as usize;
        let pages = (0..n_pages).map(|_| self.sample_page(&mut rng)).collect();
        let spanning = rng.random_range(0..=(self.max_spanning as usize).min(n_pages - 1));
        IssueRecipe { pages, spanning }
    }

    pub fn sample_page(&self, rng: &mut ChaCha8Rng) -> PageRecipe {
        let n_articles = draw(rng, self.articles_per_page) as usize;
        let n_sections = (draw(rng, self.sections) as usize).min(n_articles);
        let page_columns = draw(rng, self.columns);
        let mut counts = vec![1usize; n_sections];
        for _ in n_sections..n_articles {
            let s = rng.random_range(0..n_sections);
            counts[s] += 1;
        }
        let sections = counts
            .into_iter()
            .map(|n| SectionSpec {
                columns: if self.uniform_columns { page_columns } else { draw(rng, self.columns) },
                articles: (0..n)
                    .map(|_| ArticleSpec {
                        lines: draw(rng, self.lines_per_article),
                        title_height: Some(self.title_heights[rng.random_range(0..self.title_heights.len())]),
                    })
                    .collect(),
            })
            .collect();
        PageRecipe {
            width: draw(rng, self.width),
            sections,
            header_rule: rng.random_bool(self.header_rule_prob),
            article_rule_prob: self.article_rule_prob,
            degradations: self.degradations,
            seed: rng.random(),
        }
    }
}

/// Seed of the `index`-th issue of a corpus drawn with `seed`.
pub fn issue_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
