//! Section tree, reading order and article assembly.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::Rect;
use crate::grid::{GridBox, Separator, SeparatorGrid, TopEdge};

/// Tolerance in pixels for "strictly longer" comparisons.
pub const LENGTH_EPSILON: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionNode {
    pub id: usize,
    pub bbox: Rect,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Grid boxes held directly by this node.
    pub boxes: Vec<usize>,
    /// Horizontal ruling whose band defines this node.
    pub delimiter: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafBox {
    pub id: usize,
    pub bbox: Rect,
}

/// Hierarchical page model. Node 0 is the root and covers the page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionTree {
    pub nodes: Vec<SectionNode>,
    pub leaves: Vec<LeafBox>,
}

impl SectionTree {
    pub fn root(&self) -> &SectionNode {
        &self.nodes[0]
    }

    fn leaf(&self, id: usize) -> &LeafBox {
        self.leaves.iter().find(|l| l.id == id).expect("leaf box registered in tree")
    }

    pub fn depth(&self) -> usize {
        fn go(t: &SectionTree, n: usize) -> usize {
            1 + t.nodes[n].children.iter().map(|&c| go(t, c)).max().unwrap_or(0)
        }
        go(self, 0)
    }
}

struct Candidate {
    bbox: Rect,
    delimiter: usize,
}

/// Builds the section tree from the horizontal rulings of the grid.
///
/// Every ruling delimits two bands, one below it down to the next ruling
/// that covers it, one above it up to the previous such ruling. A box or
/// band is nested in the smallest band containing it that is strictly
/// wider than itself; otherwise it hangs off the root.
pub fn build_section_tree(boxes: &[GridBox], grid: &SeparatorGrid) -> SectionTree {
    let page = grid.page;
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut seen: BTreeSet<Rect> = BTreeSet::new();
    for h in &grid.horizontals {
        let covers = |o: &Separator| {
            o.id != h.id
                && o.span.start <= h.span.start + LENGTH_EPSILON
                && o.span.end >= h.span.end - LENGTH_EPSILON
        };
        let below = grid
            .horizontals
            .iter()
            .filter(|o| covers(o) && o.position > h.position)
            .map(|o| o.position)
            .min()
            .unwrap_or(page.y1);
        let above = grid
            .horizontals
            .iter()
            .filter(|o| covers(o) && o.position < h.position)
            .map(|o| o.position)
            .max()
            .unwrap_or(page.y0);
        for bbox in [
            Rect::new(h.span.start, h.position, h.span.end, below),
            Rect::new(h.span.start, above, h.span.end, h.position),
        ] {
            let bbox = bbox.intersection(&page).unwrap_or_default();
            if !bbox.is_empty() && bbox != page && seen.insert(bbox) {
                candidates.push(Candidate { bbox, delimiter: h.id });
            }
        }
    }
    candidates.sort_by_key(|c| (c.bbox.area(), c.bbox.y0, c.bbox.x0, c.delimiter));

    let parent_of = |r: &Rect, skip: Option<usize>| -> Option<usize> {
        candidates
            .iter()
            .enumerate()
            .filter(|(i, c)| Some(*i) != skip && c.bbox.contains(r) && c.bbox.width() > r.width() + LENGTH_EPSILON)
            .map(|(i, _)| i)
            .next()
    };

    // Resolve parents and keep only candidates that end up holding boxes.
    let cand_parent: Vec<Option<usize>> =
        candidates.iter().enumerate().map(|(i, c)| parent_of(&c.bbox, Some(i))).collect();
    let box_parent: Vec<Option<usize>> = boxes.iter().map(|b| parent_of(&b.bbox, None)).collect();
    let mut used = vec![false; candidates.len()];
    for p in &box_parent {
        let mut cur = *p;
        while let Some(c) = cur {
            if used[c] {
                break;
            }
            used[c] = true;
            cur = cand_parent[c];
        }
    }

    let mut nodes = vec![SectionNode {
        id: 0,
        bbox: page,
        parent: None,
        children: Vec::new(),
        boxes: Vec::new(),
        delimiter: None,
    }];
    let mut node_of = vec![usize::MAX; candidates.len()];
    // candidates are sorted by area, so walk from large to small to create parents first
    for i in (0..candidates.len()).rev() {
        if !used[i] {
            continue;
        }
        let parent = cand_parent[i].map(|p| node_of[p]).unwrap_or(0);
        let id = nodes.len();
        node_of[i] = id;
        nodes.push(SectionNode {
            id,
            bbox: candidates[i].bbox,
            parent: Some(parent),
            children: Vec::new(),
            boxes: Vec::new(),
            delimiter: Some(candidates[i].delimiter),
        });
        nodes[parent].children.push(id);
    }
    for (b, p) in boxes.iter().zip(&box_parent) {
        let n = p.map(|p| node_of[p]).unwrap_or(0);
        nodes[n].boxes.push(b.id);
    }
    let leaves = boxes.iter().map(|b| LeafBox { id: b.id, bbox: b.bbox }).collect();
    let mut tree = SectionTree { nodes, leaves };
    sort_children(&mut tree);
    tree
}

/// Reading precedence between two regions: strictly further left, or at
/// the same left edge and higher.
pub fn precedes(a: &Rect, b: &Rect) -> bool {
    a.x0 < b.x0 || (a.x0 == b.x0 && a.y0 < b.y0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    Node(usize),
    Leaf(usize),
}

fn items_of(tree: &SectionTree, n: usize) -> Vec<Item> {
    let node = &tree.nodes[n];
    let mut items: Vec<(i32, i32, Item)> = node
        .children
        .iter()
        .map(|&c| (tree.nodes[c].bbox.x0, tree.nodes[c].bbox.y0, Item::Node(c)))
        .chain(node.boxes.iter().map(|&b| {
            let r = tree.leaf(b).bbox;
            (r.x0, r.y0, Item::Leaf(b))
        }))
        .collect();
    items.sort();
    items.into_iter().map(|(_, _, i)| i).collect()
}

fn sort_children(tree: &mut SectionTree) {
    for n in 0..tree.nodes.len() {
        let items = items_of(tree, n);
        let node = &mut tree.nodes[n];
        node.children = items.iter().filter_map(|i| if let Item::Node(c) = i { Some(*c) } else { None }).collect();
        node.boxes = items.iter().filter_map(|i| if let Item::Leaf(b) = i { Some(*b) } else { None }).collect();
    }
}

/// Leaf boxes in reading order: depth-first over the tree, siblings (both
/// sub-sections and boxes) sorted by [`precedes`].
pub fn order_sections(tree: &SectionTree) -> Vec<usize> {
    fn walk(tree: &SectionTree, n: usize, out: &mut Vec<usize>) {
        for item in items_of(tree, n) {
            match item {
                Item::Node(c) => walk(tree, c, out),
                Item::Leaf(b) => out.push(b),
            }
        }
    }
    let mut out = Vec::with_capacity(tree.leaves.len());
    walk(tree, 0, &mut out);
    out
}

/// A per-page element reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PageRef {
    pub page: usize,
    pub id: usize,
}

impl PageRef {
    pub fn new(page: usize, id: usize) -> Self {
        PageRef { page, id }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Continuation {
    #[default]
    None,
    ContinuesPrevious,
    ContinuesNext,
    Both,
}

impl Continuation {
    pub fn from_flags(previous: bool, next: bool) -> Self {
        match (previous, next) {
            (false, false) => Continuation::None,
            (true, false) => Continuation::ContinuesPrevious,
            (false, true) => Continuation::ContinuesNext,
            (true, true) => Continuation::Both,
        }
    }

    pub fn previous(self) -> bool {
        matches!(self, Continuation::ContinuesPrevious | Continuation::Both)
    }

    pub fn next(self) -> bool {
        matches!(self, Continuation::ContinuesNext | Continuation::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: usize,
    pub boxes: Vec<PageRef>,
    pub title: Option<PageRef>,
    pub text_lines: Vec<PageRef>,
    pub continuation: Continuation,
    pub reading_index: usize,
    /// Headless article with no predecessor to attach to.
    pub orphan: bool,
}

impl Article {
    pub fn pages(&self) -> BTreeSet<usize> {
        self.boxes.iter().map(|b| b.page).collect()
    }

    pub fn first_page(&self) -> usize {
        self.boxes.first().map(|b| b.page).unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArticleWarning {
    /// A fragment box with no preceding article on the first page.
    OrphanFragment { page: usize, box_id: usize },
}

/// Length of the element forming a box's top edge.
pub fn delimiter_length(b: &GridBox, grid: &SeparatorGrid) -> i32 {
    match b.top_edge {
        TopEdge::Page => grid.page.width(),
        TopEdge::Rule(id) => grid.horizontals.iter().find(|h| h.id == id).map_or(0, |h| h.length()),
        TopEdge::Title(id) => grid.titles.iter().find(|t| t.id == id).map_or(0, |t| t.segment.len()),
        TopEdge::Open => 0,
    }
}

/// Fragment test: a title-less box under a ruling longer than itself is the
/// next part of the article of the box before it. Returns whether the box
/// was merged.
pub fn merge_fragment(current: Option<&mut Article>, b: &GridBox, grid: &SeparatorGrid, page: usize) -> bool {
    if b.has_title || delimiter_length(b, grid) <= b.bbox.width() + LENGTH_EPSILON {
        return false;
    }
    match current {
        Some(article) => {
            append_box(article, b, page);
            true
        }
        None => false,
    }
}

fn append_box(article: &mut Article, b: &GridBox, page: usize) {
    article.boxes.push(PageRef::new(page, b.id));
    article.text_lines.extend(b.text_lines.iter().map(|&l| PageRef::new(page, l)));
}

fn new_article(id: usize, b: &GridBox, page: usize) -> Article {
    let mut a = Article {
        id,
        boxes: Vec::new(),
        title: b.titles.first().map(|&t| PageRef::new(page, t)),
        text_lines: Vec::new(),
        continuation: if b.has_title { Continuation::None } else { Continuation::ContinuesPrevious },
        reading_index: id,
        orphan: false,
    };
    append_box(&mut a, b, page);
    a
}

/// Scans boxes in reading order. Titled boxes open articles; title-less
/// boxes join the current article, and open a headless article when there
/// is none.
pub fn extract_articles(
    ordered: &[&GridBox],
    grid: &SeparatorGrid,
    page: usize,
) -> (Vec<Article>, Vec<ArticleWarning>) {
    let mut articles: Vec<Article> = Vec::new();
    let mut warnings = Vec::new();
    for &b in ordered {
        if b.has_title {
            articles.push(new_article(articles.len(), b, page));
            continue;
        }
        if merge_fragment(articles.last_mut(), b, grid, page) {
            continue;
        }
        match articles.last_mut() {
            Some(current) => append_box(current, b, page),
            None => {
                let mut a = new_article(0, b, page);
                if page == 0 {
                    if delimiter_length(b, grid) > b.bbox.width() + LENGTH_EPSILON {
                        warnings.push(ArticleWarning::OrphanFragment { page, box_id: b.id });
                    }
                    a.orphan = true;
                }
                articles.push(a);
            }
        }
    }
    (articles, warnings)
}

/// Joins headless page openings to the last article of the page before and
/// renumbers the issue.
pub fn link_cross_page(pages: Vec<Vec<Article>>) -> Vec<Article> {
    let mut out: Vec<Article> = Vec::new();
    for (p, page_articles) in pages.into_iter().enumerate() {
        for (i, a) in page_articles.into_iter().enumerate() {
            let headless = a.title.is_none();
            let linkable = i == 0 && headless && p > 0;
            match out.last_mut() {
                Some(prev) if linkable && prev.pages().contains(&(p - 1)) => {
                    prev.boxes.extend(a.boxes);
                    prev.text_lines.extend(a.text_lines);
                }
                _ => {
                    let mut a = a;
                    a.orphan = headless;
                    out.push(a);
                }
            }
        }
    }
    for (i, a) in out.iter_mut().enumerate() {
        a.id = i;
        a.reading_index = i;
        a.continuation = Continuation::from_flags(a.title.is_none(), a.pages().len() > 1);
    }
    out
}
