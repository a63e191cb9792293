//! A single interactive layout run.
//!
//! `Session` is synchronous and deterministic: frames depend only on the
//! graph, the parameters and the sequence of controls keyed to iteration
//! numbers. The server wraps it with threads and sockets.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::LayoutDocument;
use crate::layout::{step_in_place, update_geo_weight, LayoutParams, LayoutState};
use crate::metrics::{self, MetricsReport};

use super::protocol::{Control, ControlMessage, FrameMessage, FramePosition, RunStatus, ServerMessage, SessionInfo};

#[derive(Debug, Clone)]
struct Pending {
    at_iteration: usize,
    seq: u64,
    control: Control,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    graph: Graph,
    params: LayoutParams,
    state: LayoutState,
    status: RunStatus,
    /// Iteration at which the current run budget ends.
    budget_end: usize,
    min_degree: usize,
    visible: Vec<bool>,
    pending: Vec<Pending>,
    next_seq: u64,
}

impl Session {
    /// Paused at iteration 0 with seeded initial positions.
    pub fn new(id: impl Into<String>, graph: Graph, params: LayoutParams) -> Result<Self> {
        let state = LayoutState::initialize(&graph, &params)?;
        let visible = graph.visibility_mask(0);
        Ok(Session {
            id: id.into(),
            budget_end: params.n_iterations,
            graph,
            params,
            state,
            status: RunStatus::Paused,
            min_degree: 0,
            visible,
            pending: Vec::new(),
            next_seq: 0,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn status(&self) -> RunStatus {
        self.status
    }

    pub fn is_running(&self) -> bool {
        self.status == RunStatus::Running
    }

    pub fn iteration(&self) -> usize {
        self.state.iteration
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn params(&self) -> &LayoutParams {
        &self.params
    }

    pub fn state(&self) -> &LayoutState {
        &self.state
    }

    pub fn info(&self) -> SessionInfo {
        SessionInfo {
            session_id: self.id.clone(),
            status: self.status,
            iteration: self.state.iteration,
            temperature: self.state.temperature,
            geo_weight: self.params.geo_weight,
            min_degree: self.min_degree,
            node_count: self.graph.node_count(),
            edge_count: self.graph.edge_count(),
            pending_controls: self.pending.len(),
        }
    }

    /// Applies the control now if its iteration has been reached, otherwise
    /// queues it. Controls queued for the same iteration apply in submission
    /// order.
    pub fn submit(&mut self, msg: ControlMessage) -> Result<ServerMessage> {
        validate_control(&msg.control)?;
        match msg.at_iteration {
            Some(at) if at > self.state.iteration => {
                let name = msg.control.name().to_string();
                let seq = self.next_seq;
                self.next_seq += 1;
                self.pending.push(Pending {
                    at_iteration: at,
                    seq,
                    control: msg.control,
                });
                self.pending.sort_by_key(|p| (p.at_iteration, p.seq));
                Ok(ServerMessage::Ack {
                    session_id: self.id.clone(),
                    control: name,
                    iteration: at,
                    applied: false,
                    status: self.status,
                })
            }
            _ => self.apply(msg.control),
        }
    }

    fn apply(&mut self, control: Control) -> Result<ServerMessage> {
        let name = control.name().to_string();
        match control {
            Control::Start => {
                if self.state.iteration >= self.budget_end {
                    self.budget_end = self.state.iteration + self.params.n_iterations;
                }
                self.status = RunStatus::Running;
            }
            Control::Pause => {
                if self.status == RunStatus::Running {
                    self.status = RunStatus::Paused;
                }
            }
            Control::SetGeoWeight { geo_weight } => {
                self.params = update_geo_weight(&self.params, geo_weight)?;
            }
            Control::SetMinDegree { min_degree } => {
                self.min_degree = min_degree;
                self.visible = self.graph.visibility_mask(min_degree);
            }
            Control::Reheat { temperature } => self.state.reheat(temperature)?,
            Control::RequestMetrics => {
                return Ok(ServerMessage::Metrics {
                    session_id: self.id.clone(),
                    iteration: self.state.iteration,
                    metrics: self.metrics()?,
                })
            }
            Control::ExportLayout => {
                return Ok(ServerMessage::Layout {
                    session_id: self.id.clone(),
                    document: self.export()?,
                })
            }
        }
        Ok(ServerMessage::Ack {
            session_id: self.id.clone(),
            control: name,
            iteration: self.state.iteration,
            applied: true,
            status: self.status,
        })
    }

    fn apply_due(&mut self) -> Result<()> {
        while self
            .pending
            .first()
            .is_some_and(|p| p.at_iteration <= self.state.iteration)
        {
            let p = self.pending.remove(0);
            self.apply(p.control)?;
        }
        Ok(())
    }

    /// Applies due controls, then advances one iteration if running.
    /// Returns the frame for the new iteration, or `None` if nothing ran.
    pub fn tick(&mut self) -> Result<Option<FrameMessage>> {
        self.apply_due()?;
        if self.status != RunStatus::Running {
            return Ok(None);
        }
        if self.state.iteration >= self.budget_end {
            self.status = RunStatus::BudgetExhausted;
            return Ok(None);
        }
        step_in_place(&self.graph, &mut self.state, &self.params)?;
        let frame = self.frame(false);
        if self.state.iteration >= self.budget_end {
            // controls due exactly at the budget end (e.g. a pause) still apply
            self.apply_due()?;
            if self.status == RunStatus::Running {
                self.status = RunStatus::BudgetExhausted;
            }
        }
        Ok(Some(frame))
    }

    /// Ticks until the session stops running; returns all frames produced.
    pub fn run_to_stop(&mut self) -> Result<Vec<FrameMessage>> {
        let mut frames = Vec::new();
        while let Some(f) = self.tick()? {
            frames.push(f);
        }
        Ok(frames)
    }

    fn frame(&self, snapshot: bool) -> FrameMessage {
        let positions = self
            .state
            .node_ids
            .iter()
            .zip(&self.state.positions)
            .zip(&self.visible)
            .filter(|(_, &v)| v)
            .map(|((id, p), _)| FramePosition {
                id: id.clone(),
                x: p.x as f32,
                y: p.y as f32,
                z: p.z as f32,
            })
            .collect();
        FrameMessage {
            session_id: self.id.clone(),
            iteration: self.state.iteration,
            temperature: self.state.temperature,
            geo_weight: self.params.geo_weight,
            min_degree: self.min_degree,
            snapshot,
            positions,
        }
    }

    /// Current positions as a catch-up frame.
    pub fn snapshot(&self) -> FrameMessage {
        self.frame(true)
    }

    pub fn metrics(&self) -> Result<MetricsReport> {
        metrics::report(&self.graph, &self.state, &self.params.projection)
    }

    pub fn export(&self) -> Result<LayoutDocument> {
        let m = self.metrics().ok();
        Ok(LayoutDocument::new(&self.state, &self.params, m.as_ref()))
    }
}

fn validate_control(control: &Control) -> Result<()> {
    match *control {
        Control::SetGeoWeight { geo_weight } if !(geo_weight.is_finite() && geo_weight >= 0.0) => Err(
            Error::invalid(format!("geo weight K must be >= 0, got {geo_weight}")),
        ),
        Control::Reheat { temperature } if !(temperature.is_finite() && temperature > 0.0) => Err(
            Error::invalid(format!("temperature must be > 0, got {temperature}")),
        ),
        _ => Ok(()),
    }
}
