//! Fixed inputs shared by the benchmarks.

use newsseg_core::synth::{generate_page, Degradations, PageRecipe};
use newsseg_core::LabelImage;

/// A degraded page with `columns` columns of `articles` eight-line articles.
pub fn page(columns: u32, articles: usize, seed: u64) -> LabelImage {
    let mut recipe = PageRecipe::simple(columns, &vec![8; articles], seed);
    recipe.degradations = Degradations::default();
    generate_page(&recipe).expect("benchmark recipe is feasible").0
}
