//! Cross-checks the focused search against the independent decision
//! procedure on uniformly sampled theorems at the corpus scale.

use ipl_core::codec::{Codec, CodecParams};
use ipl_core::fps::{fps_search, strip, FpsConfig, SearchResult};
use ipl_core::kernel::script_proves;
use ipl_core::oracle::decide_oracle;

#[test]
fn fps_agrees_with_the_oracle_at_corpus_scale() {
    let codec = Codec::new(CodecParams::new(16, 5));
    let theorems = codec.sample_uniform(1_777, 400);
    let config = FpsConfig::default();

    let mut provable = 0usize;
    let mut fps_proved = 0usize;
    let mut fps_missed = 0usize;
    let mut limit_hit = 0usize;
    for (i, theorem) in theorems.iter().enumerate() {
        let oracle_says = decide_oracle(theorem);
        provable += usize::from(oracle_says);
        match fps_search(theorem, i as u64, &config) {
            SearchResult::Proved(trace) => {
                fps_proved += 1;
                assert!(oracle_says, "fps proved a non-theorem: {theorem}");
                let clean = strip(&trace).unwrap();
                assert!(
                    script_proves(theorem, &clean),
                    "stripped proof fails to check: {theorem}"
                );
            }
            SearchResult::Unprovable => {
                if oracle_says {
                    fps_missed += 1;
                }
            }
            SearchResult::LimitExceeded => limit_hit += 1,
        }
    }

    println!(
        "sampled 400 at n=16,p=5: provable {provable}, fps proved {fps_proved}, \
         missed {fps_missed}, limit {limit_hit}"
    );
    assert!(provable > 50, "sample unexpectedly sparse: {provable}");
    // The premise-reuse restriction may cost around one provable theorem per
    // thousand; anything past a couple in 400 indicates a bug.
    assert!(fps_missed <= 2, "fps missed {fps_missed} provable theorems");
    assert_eq!(limit_hit, 0, "state budget exhausted {limit_hit} times");
}
