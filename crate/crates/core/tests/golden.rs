use graphlin::linearize::linearize_with_emission_order;
use graphlin::prompt::render_question;
use graphlin::{
    render_prompt, Answer, EdgeOrdering, Exemplar, Graph, Labeling, LinearizationSpec, Method, MotifKind, Shots,
    TaskInstance, TaskKind, TaskParams,
};

fn path4() -> graphlin::LinearizedGraph {
    let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let spec = LinearizationSpec::new(Method::new(EdgeOrdering::DefaultOrder, false), Labeling::DefaultLabels, 0);
    linearize_with_emission_order(&g, Some(&[(0, 1), (1, 2), (2, 3)]), &spec).unwrap()
}

fn instance(kind: TaskKind) -> TaskInstance {
    let (params, truth) = match kind {
        TaskKind::NodeCounting => (TaskParams::None, Answer::Count(4)),
        TaskKind::MaxDegree => (TaskParams::None, Answer::Count(2)),
        TaskKind::NodeDegree => (TaskParams::Node { node: 2 }, Answer::Count(2)),
        TaskKind::EdgeExistence => (TaskParams::Pair { source: 0, target: 3 }, Answer::YesNo(false)),
        TaskKind::Diameter => (TaskParams::None, Answer::Count(3)),
        TaskKind::ShortestPath => (TaskParams::Pair { source: 0, target: 3 }, Answer::Count(3)),
        TaskKind::PathExistence => (TaskParams::Pair { source: 1, target: 3 }, Answer::YesNo(true)),
        TaskKind::MotifShape => (TaskParams::None, Answer::Shapes(vec![MotifKind::Star])),
    };
    TaskInstance {
        record_id: "golden".into(),
        kind,
        params,
        truth,
        forced: false,
    }
}

#[test]
fn zero_shot_prompts_match_golden_files() {
    let lg = path4();
    for kind in TaskKind::ALL {
        let path = format!("{}/tests/golden/{}.txt", env!("CARGO_MANIFEST_DIR"), kind.tag());
        let want = std::fs::read_to_string(&path).unwrap();
        let got = render_prompt(&instance(kind), &lg, Shots::Zero, None).unwrap();
        assert_eq!(got.text, want, "{path}");
        assert!(!got.text.contains(&format!("Answer: {}", got.answer)));
    }
}

#[test]
fn one_shot_prompt_shows_exemplar_then_query() {
    let lg = path4();
    let mut ex = instance(TaskKind::Diameter);
    ex.record_id = "exemplar".into();
    let query = instance(TaskKind::Diameter);
    let p = render_prompt(
        &query,
        &lg,
        Shots::One,
        Some(Exemplar {
            instance: &ex,
            linearized: &lg,
        }),
    )
    .unwrap();
    let q = render_question(&query, &lg).unwrap();
    assert_eq!(p.text, format!("Example:\n{q}\nAnswer: 3\n\n{q}"));
    assert_eq!(p.exemplar_ref.as_deref(), Some("exemplar"));
    assert_eq!(p.token_estimate, 2 * (100 + 5 * 3));
}
