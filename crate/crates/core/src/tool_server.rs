//! Newline-delimited JSON session protocol over the simulators.
//!
//! Requests are `{"id": <number>, "method": <name>, "params": {...}}`;
//! responses echo the id with either `result` or
//! `error: {code, message, data}`. A failed request never changes a session.
//! No method reveals a solution.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde_json::{json, Map, Value};

use crate::adjudicator::{adjudicate_text, AdjudicationResult};
use crate::puzzle::{format_move, parse_move, PuzzleInstance, State};

pub const METHODS: [&str; 10] = [
    "init",
    "state",
    "legal_moves",
    "apply",
    "reset",
    "is_solved",
    "scratchpad_get",
    "scratchpad_set",
    "adjudicate",
    "close",
];

pub const DEFAULT_TOOL_CALL_BUDGET: u64 = 200;
pub const DEFAULT_SCRATCHPAD_CAP: usize = 64 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    UnknownMethod,
    UnknownSession,
    IllegalMove,
    Budget,
    Malformed,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::UnknownMethod => "UNKNOWN_METHOD",
            ErrorCode::UnknownSession => "UNKNOWN_SESSION",
            ErrorCode::IllegalMove => "ILLEGAL_MOVE",
            ErrorCode::Budget => "BUDGET",
            ErrorCode::Malformed => "MALFORMED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServerConfig {
    /// Successful calls allowed per session, `init` excluded.
    pub tool_call_budget: u64,
    /// Scratchpad size limit in bytes.
    pub scratchpad_cap: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig { tool_call_budget: DEFAULT_TOOL_CALL_BUDGET, scratchpad_cap: DEFAULT_SCRATCHPAD_CAP }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub instance: PuzzleInstance,
    pub state: State,
    pub move_count: u64,
    pub tool_call_count: u64,
    pub scratchpad: String,
}

struct Failure {
    code: ErrorCode,
    message: String,
    data: Value,
}

fn fail(code: ErrorCode, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into(), data: Value::Null }
}

/// All open sessions. Handling a request is a pure function of the table
/// and the request.
#[derive(Debug, Clone, Default)]
pub struct SessionTable {
    config: ServerConfig,
    sessions: BTreeMap<String, Session>,
    next_id: u64,
}

impl SessionTable {
    pub fn new(config: ServerConfig) -> Self {
        SessionTable { config, sessions: BTreeMap::new(), next_id: 0 }
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    pub fn session(&self, id: &str) -> Option<&Session> {
        self.sessions.get(id)
    }

    /// Handles one raw request line and returns the response line (no newline).
    pub fn handle_line(&mut self, line: &str) -> String {
        let response = match serde_json::from_str::<Value>(line) {
            Ok(request) => self.handle_request(&request),
            Err(e) => error_response(Value::Null, fail(ErrorCode::Malformed, format!("invalid JSON: {e}"))),
        };
        serde_json::to_string(&response).expect("values serialize")
    }

    pub fn handle_request(&mut self, request: &Value) -> Value {
        let id = request.get("id").cloned().unwrap_or(Value::Null);
        match self.dispatch(request) {
            Ok(result) => json!({"id": id, "result": result}),
            Err(failure) => error_response(id, failure),
        }
    }

    fn dispatch(&mut self, request: &Value) -> Result<Value, Failure> {
        let Some(obj) = request.as_object() else {
            return Err(fail(ErrorCode::Malformed, "request must be an object"));
        };
        if !obj.get("id").is_some_and(Value::is_number) {
            return Err(fail(ErrorCode::Malformed, "request id must be a number"));
        }
        let Some(method) = obj.get("method").and_then(Value::as_str) else {
            return Err(fail(ErrorCode::Malformed, "method must be a string"));
        };
        let empty = Map::new();
        let params = match obj.get("params") {
            None | Some(Value::Null) => &empty,
            Some(Value::Object(p)) => p,
            Some(_) => return Err(fail(ErrorCode::Malformed, "params must be an object")),
        };
        if !METHODS.contains(&method) {
            return Err(fail(ErrorCode::UnknownMethod, format!("unknown method `{method}`")));
        }
        if method == "init" {
            return self.init(params);
        }

        let sid = params
            .get("session_id")
            .and_then(Value::as_str)
            .ok_or_else(|| fail(ErrorCode::Malformed, "session_id must be a string"))?;
        let cap = self.config.scratchpad_cap;
        let budget = self.config.tool_call_budget;
        let session = self
            .sessions
            .get_mut(sid)
            .ok_or_else(|| fail(ErrorCode::UnknownSession, format!("no session `{sid}`")))?;
        if session.tool_call_count >= budget {
            return Err(Failure {
                code: ErrorCode::Budget,
                message: format!("tool call budget of {budget} exhausted"),
                data: json!({"remaining": 0}),
            });
        }

        // Validate and compute first; only touch the session once nothing can fail.
        let result = match method {
            "state" => json!({"state": session.state.to_json(), "move_count": session.move_count}),
            "legal_moves" => {
                let moves: Vec<Value> =
                    session.instance.legal_moves(&session.state).iter().map(move_json).collect();
                json!({"moves": moves})
            }
            "apply" => {
                let raw = params.get("move").ok_or_else(|| fail(ErrorCode::Malformed, "missing move"))?;
                let text = match raw {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let mv = parse_move(session.instance.kind(), &text)
                    .map_err(|e| fail(ErrorCode::Malformed, format!("bad move: {e}")))?;
                let next = session.instance.apply_move(&session.state, &mv).map_err(|illegal| Failure {
                    code: ErrorCode::IllegalMove,
                    message: illegal.detail.clone(),
                    data: json!({"reason": illegal.reason.as_str(), "move_index": session.move_count}),
                })?;
                session.state = next;
                session.move_count += 1;
                json!({"ok": true, "solved": session.instance.is_goal(&session.state), "move_count": session.move_count})
            }
            "reset" => {
                session.state = session.instance.initial_state();
                session.move_count = 0;
                json!({"ok": true, "state": session.state.to_json()})
            }
            "is_solved" => json!({"solved": session.instance.is_goal(&session.state)}),
            "scratchpad_get" => json!({"text": session.scratchpad}),
            "scratchpad_set" => {
                let text = params
                    .get("text")
                    .and_then(Value::as_str)
                    .ok_or_else(|| fail(ErrorCode::Malformed, "text must be a string"))?;
                if text.len() > cap {
                    return Err(Failure {
                        code: ErrorCode::Budget,
                        message: format!("scratchpad holds at most {cap} bytes"),
                        data: json!({"cap": cap, "requested": text.len()}),
                    });
                }
                session.scratchpad = text.to_string();
                json!({"ok": true, "length": text.len()})
            }
            "adjudicate" => {
                let trace = match params.get("trace") {
                    Some(Value::String(s)) => s.clone(),
                    Some(v @ Value::Array(_)) => v.to_string(),
                    _ => return Err(fail(ErrorCode::Malformed, "trace must be a string or an array")),
                };
                adjudication_json(&adjudicate_text(&session.instance, &trace))
            }
            "close" => {
                self.sessions.remove(sid);
                return Ok(json!({"ok": true}));
            }
            _ => unreachable!("method table checked above"),
        };
        session.tool_call_count += 1;
        Ok(result)
    }

    fn init(&mut self, params: &Map<String, Value>) -> Result<Value, Failure> {
        let instance: PuzzleInstance = serde_json::from_value(Value::Object(params.clone()))
            .map_err(|e| fail(ErrorCode::Malformed, format!("bad instance: {e}")))?;
        self.next_id += 1;
        let id = format!("s{}", self.next_id);
        let state = instance.initial_state();
        let result = json!({"session_id": id, "state": state.to_json()});
        self.sessions.insert(
            id.clone(),
            Session { id, instance, state, move_count: 0, tool_call_count: 0, scratchpad: String::new() },
        );
        Ok(result)
    }
}

fn error_response(id: Value, failure: Failure) -> Value {
    let mut error = json!({"code": failure.code.as_str(), "message": failure.message});
    if !failure.data.is_null() {
        error["data"] = failure.data;
    }
    json!({"id": id, "error": error})
}

fn move_json(mv: &crate::puzzle::Move) -> Value {
    serde_json::from_str(&format_move(mv)).expect("moves format as JSON")
}

fn adjudication_json(r: &AdjudicationResult) -> Value {
    json!({
        "status": r.status.as_str(),
        "first_failure_index": r.first_failure_index,
        "failure_reason": r.failure_reason.map(|x| x.as_str()),
        "valid_prefix_len": r.valid_prefix_len,
        "moves_total": r.moves_total,
    })
}

/// Answers each non-blank request line on `reader` with one line on
/// `writer` until end of input. Returns the number of requests handled.
pub fn serve_stream<R: BufRead, W: Write>(table: &mut SessionTable, reader: R, mut writer: W) -> io::Result<u64> {
    let mut handled = 0;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(writer, "{}", table.handle_line(&line))?;
        writer.flush()?;
        handled += 1;
    }
    Ok(handled)
}

#[cfg(not(target_arch = "wasm32"))]
pub use tcp::{serve_tcp, ServerHandle};

#[cfg(not(target_arch = "wasm32"))]
mod tcp {
    use std::io::{self, BufReader, BufWriter};
    use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
    use std::sync::atomic::{AtomicBool, Ordering};
    use std::sync::{Arc, Mutex};
    use std::thread::JoinHandle;

    use super::{ServerConfig, SessionTable};

    /// A running TCP listener; sessions are shared by all connections.
    pub struct ServerHandle {
        addr: SocketAddr,
        stop: Arc<AtomicBool>,
        thread: Option<JoinHandle<()>>,
    }

    impl ServerHandle {
        pub fn local_addr(&self) -> SocketAddr {
            self.addr
        }

        /// Stops accepting connections and waits for the listener to exit.
        pub fn shutdown(mut self) {
            self.stop_listener();
        }

        /// Blocks until the listener exits.
        pub fn wait(mut self) {
            if let Some(t) = self.thread.take() {
                let _ = t.join();
            }
        }

        fn stop_listener(&mut self) {
            self.stop.store(true, Ordering::SeqCst);
            let _ = TcpStream::connect(self.addr);
            if let Some(t) = self.thread.take() {
                let _ = t.join();
            }
        }
    }

    impl Drop for ServerHandle {
        fn drop(&mut self) {
            if self.thread.is_some() {
                self.stop_listener();
            }
        }
    }

    pub fn serve_tcp(addr: impl ToSocketAddrs, config: ServerConfig) -> io::Result<ServerHandle> {
        let listener = TcpListener::bind(addr)?;
        let local = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let table = Arc::new(Mutex::new(SessionTable::new(config)));
        let flag = Arc::clone(&stop);
        let thread = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if flag.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let table = Arc::clone(&table);
                std::thread::spawn(move || {
                    let _ = handle_connection(stream, &table);
                });
            }
        });
        Ok(ServerHandle { addr: local, stop, thread: Some(thread) })
    }

    fn handle_connection(stream: TcpStream, table: &Mutex<SessionTable>) -> io::Result<()> {
        use std::io::{BufRead, Write};
        let reader = BufReader::new(stream.try_clone()?);
        let mut writer = BufWriter::new(stream);
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let response = table.lock().unwrap_or_else(|e| e.into_inner()).handle_line(&line);
            writeln!(writer, "{response}")?;
            writer.flush()?;
        }
        Ok(())
    }
}
