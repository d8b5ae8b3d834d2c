//! Corpus construction: uniform sampling, proof generation, word-length
//! statistics, and quantile-based train/test splitting.
//!
//! Every record is deterministic in the corpus seed and the theorem id, so a
//! corpus can be rebuilt byte-identically and records can be computed in any
//! order (the file-format and parallel drivers live in the companion crate).

use crate::codec::{Codec, CodecParams, PropositionId};
use crate::fps::{
    fps_search, generate_diverse, script_text, strip, trace_to_text, word_count, FpsConfig,
    SearchResult,
};
use crate::kernel::{check_script, parse_tactic, ScriptOutcome, Tactic};
use crate::prop::Proposition;
use crate::rng;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

/// One corpus entry. `id` is the decimal proposition id under `(n, p)`;
/// `traces` hold `k` trial-and-error transcripts in the canonical text
/// format; `stripped_proof` is the deterministic clean proof as surface
/// tactic lines. `len_no_tae` is the word length of the stripped proof
/// rendered in the same state/tactic format; `len_tae_avg` the mean word
/// length of the traces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremRecord {
    pub id: String,
    pub n: usize,
    pub p: u32,
    pub statement: String,
    pub provable: bool,
    pub traces: Vec<String>,
    pub stripped_proof: Vec<String>,
    pub len_no_tae: u64,
    pub len_tae_avg: f64,
    /// Set when a search aborted on the state budget; such records are kept
    /// but never treated as decided.
    pub resource_limited: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub count: usize,
    pub n: usize,
    pub p: u32,
    /// Trial-and-error traces per provable theorem.
    pub k: usize,
    pub seed: u64,
    pub max_states: usize,
}

impl CorpusConfig {
    pub fn new(count: usize, n: usize, p: u32, k: usize, seed: u64) -> Self {
        CorpusConfig {
            count,
            n,
            p,
            k,
            seed,
            max_states: FpsConfig::default().max_states,
        }
    }

    pub fn params(&self) -> CodecParams {
        CodecParams::new(self.n, self.p)
    }

    fn fps_config(&self) -> FpsConfig {
        FpsConfig {
            max_states: self.max_states,
        }
    }
}

/// The corpus id sample: `count` uniform draws (duplicates possible, as in
/// sampling with replacement).
pub fn sample_corpus_ids(codec: &Codec, config: &CorpusConfig) -> Vec<PropositionId> {
    codec.sample_ids(rng::derive_seed(config.seed, 0xC0DE), config.count)
}

/// Builds the record for one theorem id. Pure and independent of every other
/// record, keyed on `(config.seed, id)`.
pub fn build_record(codec: &Codec, id: &PropositionId, config: &CorpusConfig) -> TheoremRecord {
    let theorem = codec.decode(id).expect("corpus id in range");
    let id_text = format!("{id}");
    let id_seed = rng::seed_from_bytes(rng::derive_seed(config.seed, 0x9E0F), id_text.as_bytes());
    let fps_config = config.fps_config();

    let mut record = TheoremRecord {
        id: id_text,
        n: config.n,
        p: config.p,
        statement: theorem.render(),
        provable: false,
        traces: Vec::new(),
        stripped_proof: Vec::new(),
        len_no_tae: 0,
        len_tae_avg: 0.0,
        resource_limited: false,
    };

    // The deterministic proof (trace seed 0) supplies the clean script and
    // len_no_tae; the k randomized searches supply the trial-and-error side.
    match fps_search(&theorem, rng::derive_seed(id_seed, 0), &fps_config) {
        SearchResult::Unprovable => return record,
        SearchResult::LimitExceeded => {
            record.resource_limited = true;
            return record;
        }
        SearchResult::Proved(trace) => {
            let clean = strip(&trace).expect("successful trace strips");
            let clean_text = script_text(&theorem, &clean).expect("stripped proof checks");
            record.provable = true;
            record.len_no_tae = word_count(&clean_text) as u64;
            record.stripped_proof = clean.iter().map(|t| format!("{t}")).collect();
        }
    }

    match generate_diverse(&theorem, config.k, rng::derive_seed(id_seed, 1), &fps_config) {
        Ok(traces) => {
            record.traces = traces.iter().map(trace_to_text).collect();
            let total: u64 = record.traces.iter().map(|t| word_count(t) as u64).sum();
            record.len_tae_avg = total as f64 / record.traces.len().max(1) as f64;
        }
        Err(_) => {
            // The deterministic search proved it but a randomized one blew
            // the budget: flag rather than drop.
            record.resource_limited = true;
        }
    }
    record
}

/// Samples `config.count` theorems and builds all records sequentially.
pub fn build_corpus(config: &CorpusConfig) -> Vec<TheoremRecord> {
    let codec = Codec::new(config.params());
    sample_corpus_ids(&codec, config)
        .iter()
        .map(|id| build_record(&codec, id, config))
        .collect()
}

/// Integrity check used after import: the statement must parse to the id
/// under (n, p) and the stored clean proof must still check.
pub fn verify_record(record: &TheoremRecord) -> Result<(), RecordError> {
    let err = |message: String| RecordError {
        id: record.id.clone(),
        message,
    };
    let theorem = Proposition::parse_bounded(&record.statement, record.p)
        .map_err(|e| err(format!("statement does not parse: {e}")))?;
    if theorem.internal_nodes() != record.n {
        return Err(err(format!(
            "statement has {} internal nodes, record says {}",
            theorem.internal_nodes(),
            record.n
        )));
    }
    let codec = Codec::new(CodecParams::new(record.n, record.p));
    let id: PropositionId = record
        .id
        .parse()
        .map_err(|e| err(format!("id is not a decimal natural: {e}")))?;
    let decoded = codec
        .decode(&id)
        .map_err(|e| err(format!("id out of range: {e}")))?;
    if decoded != theorem {
        return Err(err("id does not decode to the statement".to_string()));
    }
    if record.provable != !record.traces.is_empty() {
        return Err(err("provable flag disagrees with traces".to_string()));
    }
    if record.provable {
        let script: Vec<Tactic> = record
            .stripped_proof
            .iter()
            .map(|line| parse_tactic(line))
            .collect::<Result<_, _>>()
            .map_err(|e| err(format!("stripped proof does not parse: {e}")))?;
        match check_script(&theorem, &script) {
            Ok(ScriptOutcome::Proved) => {}
            other => return Err(err(format!("stripped proof does not check: {other:?}"))),
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordError {
    pub id: String,
    pub message: String,
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "record {}: {}", self.id, self.message)
    }
}

impl core::error::Error for RecordError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitSizes {
    pub train: usize,
    pub in_dist_test: usize,
    pub ood_test: usize,
}

/// Quantile split parameters. Records whose both length measures fall at or
/// below the `train_quantile` thresholds form the train region; records with
/// both strictly above the `ood_quantile` thresholds form the OOD region;
/// the band in between is excluded from all splits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitSpec {
    pub train_quantile: f64,
    pub ood_quantile: f64,
    pub sizes: SplitSizes,
    /// Drives the uniform without-replacement draws.
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(sizes: SplitSizes, seed: u64) -> Self {
        SplitSpec {
            train_quantile: 0.66,
            ood_quantile: 0.8,
            sizes,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train: Vec<TheoremRecord>,
    pub in_dist_test: Vec<TheoremRecord>,
    pub ood_test: Vec<TheoremRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SplitError {
    InvalidQuantiles {
        train: f64,
        ood: f64,
    },
    EmptyPool,
    RegionTooSmall {
        region: &'static str,
        available: usize,
        requested: usize,
    },
}

impl fmt::Display for SplitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitError::InvalidQuantiles { train, ood } => write!(
                f,
                "quantiles must satisfy 0 < train ({train}) < ood ({ood}) < 1"
            ),
            SplitError::EmptyPool => f.write_str("no provable records to split"),
            SplitError::RegionTooSmall {
                region,
                available,
                requested,
            } => write!(
                f,
                "{region} region holds {available} records, {requested} requested"
            ),
        }
    }
}

impl core::error::Error for SplitError {}

/// Nearest-rank empirical quantile over a sorted slice: the ⌈q·N⌉-th
/// smallest value. Quantile fractions are interpreted at 10⁻⁴ resolution so
/// the rank is computed in exact integer arithmetic (0.8·10 is rank 8, not a
/// float-rounding casualty).
pub fn nearest_rank<T: Copy>(sorted: &[T], q: f64) -> T {
    assert!(!sorted.is_empty(), "nearest_rank: empty sample");
    let n = sorted.len();
    let q_ten_thousandths = round_half_up(q * 10_000.0);
    let rank = (q_ten_thousandths * n as u64).div_ceil(10_000).max(1) as usize;
    sorted[rank.min(n) - 1]
}

fn round_half_up(x: f64) -> u64 {
    let floor = x as u64;
    if x - floor as f64 >= 0.5 {
        floor + 1
    } else {
        floor
    }
}

fn split_pools(
    records: &[TheoremRecord],
    train_quantile: f64,
    ood_quantile: f64,
) -> Result<(Vec<&TheoremRecord>, Vec<&TheoremRecord>), SplitError> {
    if !(train_quantile > 0.0 && train_quantile < ood_quantile && ood_quantile < 1.0) {
        return Err(SplitError::InvalidQuantiles {
            train: train_quantile,
            ood: ood_quantile,
        });
    }
    let provable: Vec<&TheoremRecord> = records
        .iter()
        .filter(|r| r.provable && !r.resource_limited)
        .collect();
    if provable.is_empty() {
        return Err(SplitError::EmptyPool);
    }

    let mut clean_lengths: Vec<u64> = provable.iter().map(|r| r.len_no_tae).collect();
    clean_lengths.sort_unstable();
    let mut tae_lengths: Vec<f64> = provable.iter().map(|r| r.len_tae_avg).collect();
    tae_lengths.sort_unstable_by(f64::total_cmp);

    let clean_train_max = nearest_rank(&clean_lengths, train_quantile);
    let tae_train_max = nearest_rank(&tae_lengths, train_quantile);
    let clean_ood_min = nearest_rank(&clean_lengths, ood_quantile);
    let tae_ood_min = nearest_rank(&tae_lengths, ood_quantile);

    let train_pool: Vec<&TheoremRecord> = provable
        .iter()
        .copied()
        .filter(|r| r.len_no_tae <= clean_train_max && r.len_tae_avg <= tae_train_max)
        .collect();
    let ood_pool: Vec<&TheoremRecord> = provable
        .iter()
        .copied()
        .filter(|r| r.len_no_tae > clean_ood_min && r.len_tae_avg > tae_ood_min)
        .collect();
    Ok((train_pool, ood_pool))
}

/// Sizes of the two split regions under the given quantiles; lets callers
/// choose feasible `SplitSizes` before committing.
pub fn region_capacities(
    records: &[TheoremRecord],
    train_quantile: f64,
    ood_quantile: f64,
) -> Result<(usize, usize), SplitError> {
    let (train_pool, ood_pool) = split_pools(records, train_quantile, ood_quantile)?;
    Ok((train_pool.len(), ood_pool.len()))
}

/// Splits provable records into train / in-distribution test / OOD test by
/// the two word-length distributions. Unprovable and resource-limited
/// records are excluded. The in-distribution test set is drawn uniformly
/// without replacement from the train region first; the train set comes from
/// the remainder. Output sets are sorted by id.
pub fn quantile_split(records: &[TheoremRecord], spec: &SplitSpec) -> Result<Split, SplitError> {
    let (mut train_pool, mut ood_pool) =
        split_pools(records, spec.train_quantile, spec.ood_quantile)?;

    let sizes = spec.sizes;
    if train_pool.len() < sizes.train + sizes.in_dist_test {
        return Err(SplitError::RegionTooSmall {
            region: "train",
            available: train_pool.len(),
            requested: sizes.train + sizes.in_dist_test,
        });
    }
    if ood_pool.len() < sizes.ood_test {
        return Err(SplitError::RegionTooSmall {
            region: "out-of-distribution",
            available: ood_pool.len(),
            requested: sizes.ood_test,
        });
    }

    let mut train_rng = rng::chacha(rng::derive_seed(spec.seed, 1));
    rng::shuffle(&mut train_rng, &mut train_pool);
    let in_dist_test: Vec<TheoremRecord> = train_pool[..sizes.in_dist_test]
        .iter()
        .map(|r| (*r).clone())
        .collect();
    let train: Vec<TheoremRecord> = train_pool
        [sizes.in_dist_test..sizes.in_dist_test + sizes.train]
        .iter()
        .map(|r| (*r).clone())
        .collect();

    let mut ood_rng = rng::chacha(rng::derive_seed(spec.seed, 2));
    rng::shuffle(&mut ood_rng, &mut ood_pool);
    let ood_test: Vec<TheoremRecord> = ood_pool[..sizes.ood_test]
        .iter()
        .map(|r| (*r).clone())
        .collect();

    let by_id = |a: &TheoremRecord, b: &TheoremRecord| {
        let ia: PropositionId = a.id.parse().expect("verified id");
        let ib: PropositionId = b.id.parse().expect("verified id");
        ia.cmp(&ib)
    };
    let mut split = Split {
        train,
        in_dist_test,
        ood_test,
    };
    split.train.sort_by(by_id);
    split.in_dist_test.sort_by(by_id);
    split.ood_test.sort_by(by_id);
    Ok(split)
}

/// Which traces qualify as training proofs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SelectionMode {
    /// Two of the shortest five (the standard recipe).
    #[default]
    ShortestFive,
    /// Two of the shortest four (the short-proof study variant).
    ShortestFour,
    /// Two of all traces irrespective of length (the long-proof variant).
    AllTraces,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectError {
    pub available: usize,
    pub required: usize,
}

impl fmt::Display for SelectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "record has {} traces, selection needs at least {}",
            self.available, self.required
        )
    }
}

impl core::error::Error for SelectError {}

/// Picks two training proofs from a record's traces: traces are ordered by
/// word length (ties by text), the selection pool is the shortest five/four
/// or all of them, and two distinct ones are drawn uniformly.
pub fn select_training_proofs(
    record: &TheoremRecord,
    seed: u64,
    mode: SelectionMode,
) -> Result<[String; 2], SelectError> {
    let required = match mode {
        SelectionMode::ShortestFive => 5,
        SelectionMode::ShortestFour => 4,
        SelectionMode::AllTraces => 2,
    };
    if record.traces.len() < required {
        return Err(SelectError {
            available: record.traces.len(),
            required,
        });
    }
    let mut ordered: Vec<&String> = record.traces.iter().collect();
    ordered.sort_by(|a, b| word_count(a).cmp(&word_count(b)).then_with(|| a.cmp(b)));
    let pool = match mode {
        SelectionMode::ShortestFive => &ordered[..5],
        SelectionMode::ShortestFour => &ordered[..4],
        SelectionMode::AllTraces => &ordered[..],
    };
    let mut rng = rng::chacha(seed);
    let picks = rng::sample_indices(&mut rng, pool.len(), 2);
    Ok([pool[picks[0]].clone(), pool[picks[1]].clone()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: u64, len_no_tae: u64, len_tae_avg: f64) -> TheoremRecord {
        TheoremRecord {
            id: format!("{id}"),
            n: 0,
            p: 2,
            statement: "True".to_string(),
            provable: true,
            traces: alloc::vec!["t".to_string()],
            stripped_proof: Vec::new(),
            len_no_tae,
            len_tae_avg,
            resource_limited: false,
        }
    }

    #[test]
    fn nearest_rank_examples() {
        let v: Vec<u64> = (1..=10).collect();
        assert_eq!(nearest_rank(&v, 0.66), 7);
        assert_eq!(nearest_rank(&v, 0.8), 8);
        assert_eq!(nearest_rank(&v, 0.05), 1);
        assert_eq!(nearest_rank(&v, 0.999), 10);
        assert_eq!(nearest_rank(&[42u64], 0.5), 42);
    }

    #[test]
    fn small_corpus_builds_and_verifies() {
        let config = CorpusConfig::new(30, 4, 3, 4, 99);
        let corpus = build_corpus(&config);
        assert_eq!(corpus.len(), 30);
        let provable = corpus.iter().filter(|r| r.provable).count();
        assert!(provable > 0, "sample should contain provable theorems");
        for record in &corpus {
            verify_record(record).unwrap();
            if record.provable {
                assert_eq!(record.traces.len(), 4);
                assert!(record.len_no_tae > 0);
                assert!(record.len_tae_avg > 0.0);
            } else {
                assert!(record.traces.is_empty());
                assert!(record.stripped_proof.is_empty());
            }
        }
        // Determinism: an independent rebuild is identical.
        assert_eq!(build_corpus(&config), corpus);
    }

    #[test]
    fn unprovable_theorem_record() {
        let config = CorpusConfig::new(1, 2, 2, 3, 0);
        let codec = Codec::new(config.params());
        let theorem = Proposition::parse("p1 → p1 ∧ p2").unwrap();
        let id = codec.encode(&theorem).unwrap();
        let record = build_record(&codec, &id, &config);
        assert!(!record.provable);
        assert!(record.traces.is_empty());
        assert!(!record.resource_limited);
        verify_record(&record).unwrap();
    }

    #[test]
    fn quantile_split_honors_regions() {
        // Both length measures equal 1..=10.
        let records: Vec<TheoremRecord> = (1..=10).map(|i| record(i, i, i as f64)).collect();
        let spec = SplitSpec::new(
            SplitSizes {
                train: 5,
                in_dist_test: 2,
                ood_test: 2,
            },
            7,
        );
        let split = quantile_split(&records, &spec).unwrap();
        assert_eq!(split.train.len(), 5);
        assert_eq!(split.in_dist_test.len(), 2);
        assert_eq!(split.ood_test.len(), 2);
        // Train region is lengths ≤ 7; OOD region is lengths > 8.
        for r in split.train.iter().chain(&split.in_dist_test) {
            assert!(r.len_no_tae <= 7);
        }
        for r in &split.ood_test {
            assert!(r.len_no_tae > 8);
        }
        // Pairwise disjoint by id.
        let mut ids: Vec<&str> = split
            .train
            .iter()
            .chain(&split.in_dist_test)
            .chain(&split.ood_test)
            .map(|r| r.id.as_str())
            .collect();
        let before = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), before);
        // Deterministic under the seed.
        assert_eq!(quantile_split(&records, &spec).unwrap(), split);
    }

    #[test]
    fn quantile_split_errors() {
        let records: Vec<TheoremRecord> = (1..=10).map(|i| record(i, i, i as f64)).collect();
        let mut spec = SplitSpec::new(
            SplitSizes {
                train: 5,
                in_dist_test: 2,
                ood_test: 2,
            },
            7,
        );
        spec.train_quantile = 0.9;
        assert!(matches!(
            quantile_split(&records, &spec),
            Err(SplitError::InvalidQuantiles { .. })
        ));

        let spec = SplitSpec::new(
            SplitSizes {
                train: 9,
                in_dist_test: 2,
                ood_test: 2,
            },
            7,
        );
        assert!(matches!(
            quantile_split(&records, &spec),
            Err(SplitError::RegionTooSmall {
                region: "train",
                ..
            })
        ));
    }

    #[test]
    fn training_proof_selection() {
        let mut r = record(1, 5, 5.0);
        r.traces = (0..10)
            .map(|i| (0..=i).map(|_| "w").collect::<Vec<_>>().join(" "))
            .collect();
        let [a, b] = select_training_proofs(&r, 3, SelectionMode::ShortestFive).unwrap();
        assert_ne!(a, b);
        assert!(word_count(&a) <= 5 && word_count(&b) <= 5);
        assert_eq!(
            select_training_proofs(&r, 3, SelectionMode::ShortestFive).unwrap(),
            [a, b]
        );
        let [c, d] = select_training_proofs(&r, 4, SelectionMode::AllTraces).unwrap();
        assert_ne!(c, d);

        r.traces.truncate(4);
        assert!(select_training_proofs(&r, 3, SelectionMode::ShortestFive).is_err());
        assert!(select_training_proofs(&r, 3, SelectionMode::ShortestFour).is_ok());

        // Equal-length traces: ties broken by text, picks deterministic.
        let mut eq = record(2, 5, 5.0);
        eq.traces = (0..6).map(|i| format!("w{i}")).collect();
        let picks = select_training_proofs(&eq, 9, SelectionMode::ShortestFive).unwrap();
        assert_eq!(
            select_training_proofs(&eq, 9, SelectionMode::ShortestFive).unwrap(),
            picks
        );
    }
}
