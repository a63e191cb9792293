//! An interactive session driven by a scripted timeline: the geo-force is
//! switched on mid-run and low-degree nodes are hidden, without any server.
//! Replaying the same script gives the same frames.
//!
//!     cargo run --example live_session

use geolayout::service::protocol::{Control, ServerMessage};
use geolayout::service::Session;
use geolayout::simgen::gen_expert_network;
use geolayout::LayoutParams;

fn run() -> geolayout::Result<(Vec<geolayout::service::FrameMessage>, ServerMessage)> {
    let graph = gen_expert_network(1)?;
    let mut params = LayoutParams::for_graph(&graph);
    params.geo_weight = 0.0;
    let mut session = Session::new("demo", graph, params)?;
    session.submit(Control::Start.into())?;
    session.submit(Control::SetGeoWeight { geo_weight: 5.0 }.at(100))?;
    session.submit(Control::SetMinDegree { min_degree: 18 }.at(150))?;
    session.submit(Control::Pause.at(200))?;
    let frames = session.run_to_stop()?;
    Ok((frames, session.submit(Control::RequestMetrics.into())?))
}

fn main() -> geolayout::Result<()> {
    let (frames, metrics) = run()?;
    for f in frames.iter().filter(|f| f.iteration % 25 == 0) {
        println!(
            "iteration {:>3}  T = {:>7.4}  K = {:>3}  visible {:>2}",
            f.iteration,
            f.temperature,
            f.geo_weight,
            f.positions.len()
        );
    }
    if let ServerMessage::Metrics { iteration, metrics, .. } = metrics {
        println!("paused at {iteration}: {metrics:?}");
    }
    println!("replay identical: {}", frames == run()?.0);
    Ok(())
}
