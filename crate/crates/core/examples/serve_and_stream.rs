//! Starts the layout server in-process, uploads a graph, opens a frame
//! stream over WebSocket and steers the run from the same socket.
//!
//!     cargo run --example serve_and_stream
//!
//! The same server runs standalone with `geolayout serve --port 8080`.


use futures::{SinkExt, StreamExt};
use geolayout::io::GraphDocument;
use geolayout::service::{serve, Registry, ServerConfig, ServerMessage};
use geolayout::simgen::gen_expert_network;
use serde_json::json;
use tokio_tungstenite::tungstenite::Message;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    tokio::spawn(serve(listener, Registry::new(ServerConfig::default())));
    println!("serving on {addr}");

    let body = json!({
        "graph": GraphDocument::from_graph(&gen_expert_network(1)?),
        "params": { "n_iterations": 60, "geo_weight": 0.0 },
    });
    let created: ServerMessage = reqwest::Client::new()
        .post(format!("http://{addr}/sessions"))
        .json(&body)
        .send()
        .await?
        .json()
        .await?;
    let ServerMessage::Created { session_id } = created else {
        return Err(format!("unexpected reply {created:?}").into());
    };
    println!("session {session_id}");

    let url = format!("ws://{addr}/sessions/{session_id}/stream?every_n=10");
    let (mut ws, _) = tokio_tungstenite::connect_async(url).await?;
    ws.send(Message::Text(r#"{"type":"set_geo_weight","geo_weight":5,"at_iteration":30}"#.into())).await?;
    ws.send(Message::Text(r#"{"type":"start"}"#.into())).await?;

    while let Some(msg) = ws.next().await {
        let Message::Text(text) = msg? else { continue };
        match serde_json::from_str::<ServerMessage>(&text)? {
            ServerMessage::Frame(f) => {
                println!(
                    "{} iteration {:>2}  K = {}  {} positions",
                    if f.snapshot { "snapshot" } else { "frame   " },
                    f.iteration,
                    f.geo_weight,
                    f.positions.len()
                );
                if f.iteration == 60 {
                    break;
                }
            }
            ServerMessage::Ack { control, iteration, applied, .. } => {
                println!("ack {control} at {iteration} (applied now: {applied})")
            }
            other => println!("{other:?}"),
        }
    }
    Ok(())
}
