use actsched::experiments::{run_pipeline, section5_model, PipelineConfig};
use actsched::lqg::cost_of_schedule;
use actsched::relaxation::solve_relaxation;
use actsched::scheduling::track_reference;
use actsched::SolverSettings;

#[test]
fn tracking_uses_actuator_one_at_about_a_sixth_of_stages() {
    let model = section5_model();
    let relaxed = solve_relaxation(&model, &SolverSettings::default()).unwrap();
    let sched = track_reference(&model, &relaxed.k_ref).unwrap();
    let uses = (0..model.horizon()).filter(|&t| sched.stage(t).contains(&0)).count();
    assert!((4..=6).contains(&uses), "actuator 1 active at {uses} of {} stages", model.horizon());

    // the pipeline reaches the same schedule and cost on its own
    let config = PipelineConfig { greedy: false, max_theta: false, ..PipelineConfig::default() };
    let out = run_pipeline(&model, "network", &config).unwrap();
    let track = out.report.method("track").unwrap();
    assert_eq!(track.schedule, sched);
    let direct = cost_of_schedule(&model, &sched).unwrap();
    assert!((track.j - direct.j).abs() <= 1e-12 * direct.j);
}
