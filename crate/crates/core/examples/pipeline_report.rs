use kslab::pipeline::{default_search, emit_report, run_pipeline, Format, PhiSelection, PipelineConfig};

fn main() {
    let searched = std::env::args().any(|a| a == "--searched");
    let mut config = PipelineConfig::default();
    if searched {
        config.phi = PhiSelection::Searched(default_search());
    }
    let report = run_pipeline(&config);
    print!("{}", emit_report(&report, Format::Text));
    println!("all verified: {}", report.all_verified());
}
