//! Seeded synthetic corpora with controllable venue separability.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Corpus, CorpusError, PaperRecord, VenueCatalog};

/// Parameters of a synthetic corpus.
///
/// Every venue owns `topics_per_venue` private word blocks. Each abstract
/// token is drawn from the paper's venue blocks with probability
/// `separation` and from a pool shared by all venues otherwise, so
/// `separation = 1` yields pairwise disjoint venue vocabularies and
/// `separation = 0` yields identical word distributions. Authors follow the
/// same rule: a venue-bound community with probability `separation`, any
/// author otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_venues: usize,
    pub topics_per_venue: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub separation: f64,
    pub seed: u64,
    pub venues_per_sig: usize,
    pub words_per_topic: usize,
    pub shared_words: usize,
    pub abstract_len: usize,
    pub authors_per_venue: usize,
    pub max_authors: usize,
    pub train_years: Vec<i32>,
    pub test_year: i32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_venues: 16,
            topics_per_venue: 3,
            n_train: 800,
            n_test: 200,
            separation: 1.0,
            seed: 42,
            venues_per_sig: 4,
            words_per_topic: 12,
            shared_words: 60,
            abstract_len: 40,
            authors_per_venue: 12,
            max_authors: 3,
            train_years: vec![2008, 2009],
            test_year: 2010,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<(), CorpusError> {
        let positive = [
            ("n_venues", self.n_venues),
            ("topics_per_venue", self.topics_per_venue),
            ("n_train", self.n_train),
            ("n_test", self.n_test),
            ("venues_per_sig", self.venues_per_sig),
            ("words_per_topic", self.words_per_topic),
            ("shared_words", self.shared_words),
            ("abstract_len", self.abstract_len),
            ("authors_per_venue", self.authors_per_venue),
            ("max_authors", self.max_authors),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CorpusError::InvalidParam(format!("{name} must be positive")));
        }
        if !(0.0..=1.0).contains(&self.separation) {
            return Err(CorpusError::InvalidParam(format!(
                "separation {} outside [0, 1]",
                self.separation
            )));
        }
        if self.train_years.is_empty() || self.train_years.iter().any(|&y| y <= 0 || y >= self.test_year) {
            return Err(CorpusError::InvalidParam(
                "train years must be positive and precede the test year".into(),
            ));
        }
        Ok(())
    }

    pub fn venue_id(v: usize) -> String {
        format!("venue{v:02}")
    }

    /// Private word `w` of topic `t` of venue `v`.
    pub fn venue_word(v: usize, t: usize, w: usize) -> String {
        format!("v{v}t{t}w{w}")
    }

    pub fn shared_word(k: usize) -> String {
        format!("shared{k}")
    }
}

/// Generates a corpus with `n_train` papers spread over the training years and
/// `n_test` papers in the test year. Venues are assigned round-robin.
pub fn generate_synthetic_corpus(config: &SynthConfig) -> Result<Corpus, CorpusError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let catalog = VenueCatalog::new((0..config.n_venues).map(|v| {
        (
            SynthConfig::venue_id(v),
            format!("sig{}", v / config.venues_per_sig),
        )
    }))?;

    let total = config.n_train + config.n_test;
    let mut papers = Vec::with_capacity(total);
    for i in 0..total {
        let venue = i % config.n_venues;
        let year = if i < config.n_train {
            config.train_years[(i / config.n_venues) % config.train_years.len()]
        } else {
            config.test_year
        };
        let primary = rng.random_range(0..config.topics_per_venue);
        let mut words = Vec::with_capacity(config.abstract_len);
        for _ in 0..config.abstract_len {
            if rng.random::<f64>() < config.separation {
                let topic = if config.topics_per_venue == 1 || rng.random::<f64>() < 0.7 {
                    primary
                } else {
                    rng.random_range(0..config.topics_per_venue)
                };
                let w = rng.random_range(0..config.words_per_topic);
                words.push(SynthConfig::venue_word(venue, topic, w));
            } else {
                words.push(SynthConfig::shared_word(
                    rng.random_range(0..config.shared_words),
                ));
            }
        }

        let n_authors = rng.random_range(1..=config.max_authors);
        let mut authors: Vec<String> = Vec::with_capacity(n_authors);
        while authors.len() < n_authors {
            let community = if rng.random::<f64>() < config.separation {
                venue
            } else {
                rng.random_range(0..config.n_venues)
            };
            let k = rng.random_range(0..config.authors_per_venue);
            let id = format!("a{community:02}_{k:03}");
            if !authors.contains(&id) {
                authors.push(id);
            }
        }

        papers.push(PaperRecord {
            paper_id: format!("p{i:06}"),
            title: format!("Synthetic paper {i} on {}", words.choose(&mut rng).map_or("", |w| w.as_str())),
            author_ids: authors,
            venue_id: SynthConfig::venue_id(venue),
            year,
            abstract_text: words.join(" "),
        });
    }
    Corpus::new(papers, catalog)
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeSet, HashMap};

    use super::*;
    use crate::text_features::tokenize;

    #[test]
    fn disjoint_vocabularies_at_full_separation() {
        let cfg = SynthConfig {
            n_venues: 4,
            n_train: 40,
            n_test: 8,
            ..Default::default()
        };
        let c = generate_synthetic_corpus(&cfg).unwrap();
        let mut vocab: HashMap<&str, BTreeSet<String>> = HashMap::new();
        for p in c.papers() {
            vocab
                .entry(p.venue_id.as_str())
                .or_default()
                .extend(tokenize(&p.abstract_text));
        }
        let sets: Vec<_> = vocab.values().collect();
        assert_eq!(sets.len(), 4);
        for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                assert!(sets[a].is_disjoint(sets[b]));
            }
        }
    }

    #[test]
    fn zero_separation_uses_only_shared_words() {
        let cfg = SynthConfig {
            n_venues: 4,
            n_train: 20,
            n_test: 4,
            separation: 0.0,
            ..Default::default()
        };
        let c = generate_synthetic_corpus(&cfg).unwrap();
        assert!(c
            .papers()
            .iter()
            .all(|p| p.abstract_text.split(' ').all(|w| w.starts_with("shared"))));
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SynthConfig {
            n_train: 50,
            n_test: 10,
            separation: 0.5,
            ..Default::default()
        };
        let a = generate_synthetic_corpus(&cfg).unwrap();
        let b = generate_synthetic_corpus(&cfg).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_corpus(&SynthConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn split_sizes_and_sigs() {
        let cfg = SynthConfig {
            n_train: 64,
            n_test: 32,
            ..Default::default()
        };
        let c = generate_synthetic_corpus(&cfg).unwrap();
        assert_eq!(c.catalog().sigs().len(), 4);
        let (train, test) = c.split_by_year(2010).unwrap();
        assert_eq!((train.len(), test.len()), (64, 32));
    }

    #[test]
    fn rejects_bad_params() {
        for cfg in [
            SynthConfig { n_venues: 0, ..Default::default() },
            SynthConfig { separation: 1.5, ..Default::default() },
            SynthConfig { n_test: 0, ..Default::default() },
        ] {
            assert!(matches!(
                generate_synthetic_corpus(&cfg),
                Err(CorpusError::InvalidParam(_))
            ));
        }
    }
}
