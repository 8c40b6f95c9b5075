#![allow(dead_code)]

use newsseg_core::articles::Continuation;
use newsseg_core::eval::{ArticleRecord, ArticleSet, PageRect};
use newsseg_core::Rect;

fn square(i: usize) -> Rect {
    let (x, y) = ((i % 20) as i32 * 50, (i / 20) as i32 * 50);
    Rect::new(x, y, x + 40, y + 40)
}

fn article(id: usize, rects: &[Rect]) -> ArticleRecord {
    ArticleRecord {
        id,
        title: None,
        lines: rects.iter().map(|&r| PageRect::new(0, r)).collect(),
        segments: Vec::new(),
        continuation: Continuation::None,
    }
}

/// 226 ground-truth articles; 194 predicted exactly, 19 split in two halves,
/// 13 predicted as one half. 245 predictions in all.
pub fn fixture_226_245_194() -> (ArticleSet, ArticleSet) {
    let gt: Vec<ArticleRecord> = (0..226).map(|i| article(i, &[square(i)])).collect();
    let mut pred = Vec::new();
    for i in 0..226 {
        let r = square(i);
        let left = Rect::new(r.x0, r.y0, r.x0 + 20, r.y1);
        let right = Rect::new(r.x0 + 20, r.y0, r.x1, r.y1);
        match i {
            0..=193 => pred.push(vec![r]),
            194..=212 => {
                pred.push(vec![left]);
                pred.push(vec![right]);
            }
            _ => pred.push(vec![left]),
        }
    }
    let pred = pred.iter().enumerate().map(|(i, r)| article(i, r)).collect();
    (ArticleSet { articles: pred }, ArticleSet { articles: gt })
}
