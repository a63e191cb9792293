//! Message types exchanged with layout-service clients. Every message is a
//! JSON object with a `type` discriminator; `docs/protocol.md` lists them.

use serde::{Deserialize, Serialize};

use crate::config::ParamOverrides;
use crate::io::{GraphDocument, LayoutDocument};
use crate::metrics::MetricsReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Control {
    Start,
    Pause,
    SetGeoWeight { geo_weight: f64 },
    SetMinDegree { min_degree: usize },
    Reheat { temperature: f64 },
    RequestMetrics,
    ExportLayout,
}

impl Control {
    pub fn name(&self) -> &'static str {
        match self {
            Control::Start => "start",
            Control::Pause => "pause",
            Control::SetGeoWeight { .. } => "set_geo_weight",
            Control::SetMinDegree { .. } => "set_min_degree",
            Control::Reheat { .. } => "reheat",
            Control::RequestMetrics => "request_metrics",
            Control::ExportLayout => "export_layout",
        }
    }
}

/// A control plus an optional iteration at which to apply it. Without
/// `at_iteration` (or when it is already reached) the control applies at the
/// next iteration boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlMessage {
    #[serde(flatten)]
    pub control: Control,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_iteration: Option<usize>,
}

impl From<Control> for ControlMessage {
    fn from(control: Control) -> Self {
        ControlMessage {
            control,
            at_iteration: None,
        }
    }
}

impl Control {
    pub fn at(self, iteration: usize) -> ControlMessage {
        ControlMessage {
            control: self,
            at_iteration: Some(iteration),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Paused,
    /// The iteration budget is used up; `start` grants another budget.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePosition {
    pub id: String,
    pub x: f32,
    pub y: f32,
    pub z: f32,
}

/// Node positions after one iteration, restricted to the visible nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMessage {
    pub session_id: String,
    pub iteration: usize,
    pub temperature: f64,
    pub geo_weight: f64,
    pub min_degree: usize,
    /// True for the catch-up frame sent on join or after falling behind.
    pub snapshot: bool,
    pub positions: Vec<FramePosition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub status: RunStatus,
    pub iteration: usize,
    pub temperature: f64,
    pub geo_weight: f64,
    pub min_degree: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub pending_controls: usize,
}

/// Everything the server sends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Frame(FrameMessage),
    Ack {
        session_id: String,
        control: String,
        /// Iteration boundary at which the control applied, or will apply.
        iteration: usize,
        /// False when the control was queued for a later iteration.
        applied: bool,
        status: RunStatus,
    },
    Metrics {
        session_id: String,
        iteration: usize,
        metrics: MetricsReport,
    },
    Layout {
        session_id: String,
        document: LayoutDocument,
    },
    Session(SessionInfo),
    Created {
        session_id: String,
    },
    Error {
        code: ErrorCode,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    NotFound,
    InvalidGraph,
    InvalidMessage,
    Validation,
    Internal,
}

/// Body of the create-session request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub graph: GraphDocument,
    #[serde(default)]
    pub params: ParamOverrides,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_wire_format() {
        let msg = Control::SetGeoWeight { geo_weight: 5.0 }.at(50);
        let text = serde_json::to_string(&msg).unwrap();
        assert_eq!(text, r#"{"type":"set_geo_weight","geo_weight":5.0,"at_iteration":50}"#);
        let back: ControlMessage = serde_json::from_str(&text).unwrap();
        assert_eq!(back, msg);
        let start: ControlMessage = serde_json::from_str(r#"{"type":"start"}"#).unwrap();
        assert_eq!(start, Control::Start.into());
    }

    #[test]
    fn malformed_controls_rejected() {
        assert!(serde_json::from_str::<ControlMessage>(r#"{"type":"explode"}"#).is_err());
        assert!(serde_json::from_str::<ControlMessage>(r#"{"type":"set_geo_weight"}"#).is_err());
    }

    #[test]
    fn error_wire_format() {
        let e = ServerMessage::Error {
            code: ErrorCode::NotFound,
            message: "no session x".into(),
        };
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"type":"error","code":"not_found","message":"no session x"}"#
        );
    }
}
