//! tf-idf cosine distance over a column's document statistics.

use std::collections::HashMap;

/// Document frequencies of the texts stored in one string attribute.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TextCorpus {
    documents: usize,
    document_frequency: HashMap<String, usize>,
}

impl TextCorpus {
    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a str>) -> Self {
        let mut c = TextCorpus::default();
        for d in docs {
            c.add_document(d);
        }
        c
    }

    pub fn add_document(&mut self, text: &str) {
        self.documents += 1;
        let mut terms = tokenize(text);
        terms.sort();
        terms.dedup();
        for t in terms {
            *self.document_frequency.entry(t).or_insert(0) += 1;
        }
    }

    pub fn documents(&self) -> usize {
        self.documents
    }

    pub fn document_frequency(&self, term: &str) -> usize {
        self.document_frequency.get(term).copied().unwrap_or(0)
    }

    /// `ln(N / (1 + df))`; with no documents every term weighs 1.
    pub fn idf(&self, term: &str) -> f64 {
        if self.documents == 0 {
            return 1.0;
        }
        (self.documents as f64 / (1 + self.document_frequency(term)) as f64).ln()
    }
}

/// Lowercased alphanumeric runs.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

fn term_frequencies(text: &str) -> HashMap<String, f64> {
    let mut tf = HashMap::new();
    for t in tokenize(text) {
        *tf.entry(t).or_insert(0.0) += 1.0;
    }
    tf
}

/// `1 - cos(tfidf(x), tfidf(y))` clamped to `[0, 1]`. Texts with the same
/// terms are at distance 0; texts sharing no weighted terms at distance 1.
pub fn tf_idf_distance(x: &str, y: &str, corpus: &TextCorpus) -> f64 {
    let tx = term_frequencies(x);
    let ty = term_frequencies(y);
    if tx == ty {
        return 0.0;
    }
    let weights = |tf: &HashMap<String, f64>| -> HashMap<String, f64> {
        tf.iter()
            .map(|(t, f)| (t.clone(), f * corpus.idf(t)))
            .collect()
    };
    let wx = weights(&tx);
    let wy = weights(&ty);
    let norm = |w: &HashMap<String, f64>| w.values().map(|v| v * v).sum::<f64>().sqrt();
    let (nx, ny) = (norm(&wx), norm(&wy));
    if nx == 0.0 || ny == 0.0 {
        return 1.0;
    }
    let dot: f64 = wx
        .iter()
        .filter_map(|(t, a)| wy.get(t).map(|b| a * b))
        .sum();
    (1.0 - dot / (nx * ny)).clamp(0.0, 1.0)
}
