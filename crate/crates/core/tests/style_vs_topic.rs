use topicconf_core::features::{StyloConfig, StyloExtractor};
use topicconf_core::harness::{
    aggregate, build_confusion_split, make_confusion_config, run_experiment, ExperimentSettings,
    GridSpec, PipelineSpec, Resources,
};
use topicconf_core::synthetic::{style_topic_corpus, SyntheticSpec};

fn confusion(pipeline: &str, grid: &GridSpec, configs: u64) -> topicconf_core::harness::Aggregate {
    let corpus = style_topic_corpus(&SyntheticSpec::default()).unwrap();
    let stylo = StyloExtractor::new(StyloConfig::default()).unwrap();
    let res = Resources {
        stylo: &stylo,
        frequency_list: None,
        settings: ExperimentSettings::default(),
    };
    let pipeline = PipelineSpec::preset(pipeline).unwrap();
    let reports: Vec<_> = (0..configs)
        .map(|seed| {
            let config = make_confusion_config(&corpus, seed).unwrap();
            let split = build_confusion_split(&config, &corpus).unwrap();
            run_experiment(
                &corpus,
                &split,
                &pipeline,
                grid,
                res,
                seed,
                Some(&config.group_of),
            )
            .unwrap()
            .report
        })
        .collect();
    aggregate(&reports).unwrap()
}

#[test]
fn style_features_resist_topic_swap() {
    let agg = confusion("stylo", &GridSpec::default(), 3);
    assert!(agg.correct_pct.mean >= 85.0, "{agg:?}");
    assert!(agg.cross_group_err_pct.unwrap().mean <= 10.0, "{agg:?}");
}

#[test]
fn content_words_follow_the_topic() {
    let grid = GridSpec {
        min_freq: vec![1],
        word_n: vec![1],
        ..GridSpec::default()
    };
    let agg = confusion("content-word", &grid, 3);
    assert!(agg.cross_group_err_pct.unwrap().mean >= 70.0, "{agg:?}");
}
