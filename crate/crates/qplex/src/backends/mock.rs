//! In-process mock provider: serves the remote wire protocol over a
//! local HTTP port, executing gate payloads by parsing the submitted
//! OpenQASM 3 text into the statevector simulator and annealer payloads
//! through the Metropolis sampler.
//!
//! Used by tests and by the CLI against `--provider-url`; it is also the
//! reference implementation a real provider adapter must match.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use serde_json::json;

use crate::circuits::parse_qasm3;
use crate::qubo::QuboDoc;

use super::annealer::{sample_qubo, AnnealerParams};
use super::remote::{JobCreated, JobRequest, JobResultDoc, JobStatusDoc, PayloadKind};
use super::{sim, DeviceInfo, DeviceKind, SampleSet};

/// Default devices advertised when the builder does not override them.
fn default_devices() -> Vec<DeviceInfo> {
    vec![
        DeviceInfo {
            name: "mock-gate-a".to_string(),
            num_qubits: 12,
            queue_length: 2,
            kind: DeviceKind::Gate,
        },
        DeviceInfo {
            name: "mock-gate-b".to_string(),
            num_qubits: 24,
            queue_length: 5,
            kind: DeviceKind::Gate,
        },
        DeviceInfo {
            name: "mock-annealer".to_string(),
            num_qubits: 64,
            queue_length: 0,
            kind: DeviceKind::Annealer,
        },
    ]
}

pub struct MockProviderBuilder {
    devices: Vec<DeviceInfo>,
    token: String,
    pending_polls: usize,
    seed: u64,
    fail_jobs: bool,
    anneal_sweeps: usize,
}

impl Default for MockProviderBuilder {
    fn default() -> Self {
        MockProviderBuilder {
            devices: default_devices(),
            token: "mock-token".to_string(),
            pending_polls: 2,
            seed: 0,
            fail_jobs: false,
            anneal_sweeps: 200,
        }
    }
}

impl MockProviderBuilder {
    pub fn devices(mut self, devices: Vec<DeviceInfo>) -> Self {
        self.devices = devices;
        self
    }

    pub fn token(mut self, token: &str) -> Self {
        self.token = token.to_string();
        self
    }

    /// How many polls a job reports queued/running before `done`.
    pub fn pending_polls(mut self, polls: usize) -> Self {
        self.pending_polls = polls;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Every submitted job ends in the `failed` state.
    pub fn fail_jobs(mut self) -> Self {
        self.fail_jobs = true;
        self
    }

    pub fn start(self) -> MockProvider {
        MockProvider::start(self)
    }
}

struct JobRecord {
    polls_remaining: usize,
    outcome: Result<SampleSet, String>,
}

struct ProviderState {
    devices: Vec<DeviceInfo>,
    token: String,
    pending_polls: usize,
    seed: u64,
    fail_jobs: bool,
    anneal_sweeps: usize,
    jobs: Mutex<HashMap<u64, JobRecord>>,
    next_id: Mutex<u64>,
}

/// Handle to a running mock provider; shuts down on drop.
pub struct MockProvider {
    url: String,
    token: String,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl MockProvider {
    pub fn builder() -> MockProviderBuilder {
        MockProviderBuilder::default()
    }

    /// URL clients should use as the provider base.
    pub fn url(&self) -> &str {
        &self.url
    }

    /// Token the provider expects (export it as the backend's
    /// `QPLEX_<PROVIDER>_TOKEN` to authenticate).
    pub fn token(&self) -> &str {
        &self.token
    }

    fn start(builder: MockProviderBuilder) -> MockProvider {
        let server = tiny_http::Server::http("127.0.0.1:0").expect("bind mock provider");
        let port = server
            .server_addr()
            .to_ip()
            .expect("tcp listener")
            .port();
        let url = format!("http://127.0.0.1:{port}");
        let token = builder.token.clone();

        let state = Arc::new(ProviderState {
            devices: builder.devices,
            token: builder.token,
            pending_polls: builder.pending_polls,
            seed: builder.seed,
            fail_jobs: builder.fail_jobs,
            anneal_sweeps: builder.anneal_sweeps,
            jobs: Mutex::new(HashMap::new()),
            next_id: Mutex::new(0),
        });

        let shutdown = Arc::new(AtomicBool::new(false));
        let stop = Arc::clone(&shutdown);
        let handle = std::thread::spawn(move || {
            while !stop.load(Ordering::Relaxed) {
                match server.recv_timeout(Duration::from_millis(20)) {
                    Ok(Some(request)) => handle_request(&state, request),
                    Ok(None) => continue,
                    Err(_) => break,
                }
            }
        });

        MockProvider {
            url,
            token,
            shutdown,
            handle: Some(handle),
        }
    }
}

impl Drop for MockProvider {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::Relaxed);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn respond_json(request: tiny_http::Request, code: u16, body: String) {
    let header = tiny_http::Header::from_bytes(&b"Content-Type"[..], &b"application/json"[..])
        .expect("static header");
    let response = tiny_http::Response::from_string(body)
        .with_status_code(code)
        .with_header(header);
    let _ = request.respond(response);
}

fn error_body(message: &str) -> String {
    json!({ "error": message }).to_string()
}

fn handle_request(state: &ProviderState, mut request: tiny_http::Request) {
    let authorized = request
        .headers()
        .iter()
        .find(|h| h.field.equiv("Authorization"))
        .map(|h| h.value.as_str() == format!("Bearer {}", state.token))
        .unwrap_or(false);
    if !authorized {
        respond_json(request, 401, error_body("invalid token"));
        return;
    }

    let method = request.method().clone();
    let url = request.url().to_string();
    let segments: Vec<&str> = url.trim_matches('/').split('/').collect();

    match (method, segments.as_slice()) {
        (tiny_http::Method::Get, ["devices"]) => {
            let body = serde_json::to_string(&state.devices).expect("serializable devices");
            respond_json(request, 200, body);
        }
        (tiny_http::Method::Post, ["jobs"]) => {
            let mut body = String::new();
            if request.as_reader().read_to_string(&mut body).is_err() {
                respond_json(request, 400, error_body("unreadable body"));
                return;
            }
            match submit_job(state, &body) {
                Ok(job_id) => respond_json(
                    request,
                    200,
                    serde_json::to_string(&JobCreated { job_id }).expect("serializable"),
                ),
                Err(message) => respond_json(request, 400, error_body(&message)),
            }
        }
        (tiny_http::Method::Get, ["jobs", id]) => match id.parse::<u64>() {
            Ok(id) => {
                let mut jobs = state.jobs.lock().expect("jobs lock");
                match jobs.get_mut(&id) {
                    Some(job) => {
                        let status = if job.polls_remaining > 1 {
                            job.polls_remaining -= 1;
                            "queued"
                        } else if job.polls_remaining == 1 {
                            job.polls_remaining -= 1;
                            "running"
                        } else if job.outcome.is_ok() {
                            "done"
                        } else {
                            "failed"
                        };
                        let body = serde_json::to_string(&JobStatusDoc {
                            status: status.to_string(),
                        })
                        .expect("serializable");
                        drop(jobs);
                        respond_json(request, 200, body);
                    }
                    None => respond_json(request, 404, error_body("unknown job")),
                }
            }
            Err(_) => respond_json(request, 404, error_body("unknown job")),
        },
        (tiny_http::Method::Get, ["jobs", id, "result"]) => match id.parse::<u64>() {
            Ok(id) => {
                let jobs = state.jobs.lock().expect("jobs lock");
                match jobs.get(&id) {
                    Some(job) if job.polls_remaining > 0 => {
                        drop(jobs);
                        respond_json(request, 400, error_body("job not finished"));
                    }
                    Some(job) => match &job.outcome {
                        Ok(samples) => {
                            let body = serde_json::to_string(&JobResultDoc {
                                counts: samples.counts().clone(),
                                shots: samples.shots(),
                            })
                            .expect("serializable");
                            drop(jobs);
                            respond_json(request, 200, body);
                        }
                        Err(message) => {
                            let body = error_body(message);
                            drop(jobs);
                            respond_json(request, 400, body);
                        }
                    },
                    None => {
                        drop(jobs);
                        respond_json(request, 404, error_body("unknown job"));
                    }
                }
            }
            Err(_) => respond_json(request, 404, error_body("unknown job")),
        },
        _ => respond_json(request, 404, error_body("no such route")),
    }
}

fn submit_job(state: &ProviderState, body: &str) -> Result<String, String> {
    let job: JobRequest = serde_json::from_str(body).map_err(|e| format!("bad job request: {e}"))?;
    let device = state
        .devices
        .iter()
        .find(|d| d.name == job.device)
        .ok_or_else(|| format!("unknown device \"{}\"", job.device))?;

    let expected_kind = match job.kind {
        PayloadKind::Gate => DeviceKind::Gate,
        PayloadKind::Annealer => DeviceKind::Annealer,
    };
    if device.kind != expected_kind {
        return Err("payload/device mismatch".to_string());
    }
    if job.shots == 0 {
        return Err("shots must be >= 1".to_string());
    }

    let job_id = {
        let mut next = state.next_id.lock().expect("id lock");
        let id = *next;
        *next += 1;
        id
    };
    let job_seed = state.seed.wrapping_add(job_id);

    let outcome = if state.fail_jobs {
        Err("job failed by configuration".to_string())
    } else {
        run_payload(&job, device, job_seed, state.anneal_sweeps)
    };

    state.jobs.lock().expect("jobs lock").insert(
        job_id,
        JobRecord {
            polls_remaining: state.pending_polls,
            outcome,
        },
    );
    Ok(job_id.to_string())
}

fn run_payload(
    job: &JobRequest,
    device: &DeviceInfo,
    seed: u64,
    anneal_sweeps: usize,
) -> Result<SampleSet, String> {
    match job.kind {
        PayloadKind::Gate => {
            let circuit = parse_qasm3(&job.payload).map_err(|e| e.to_string())?;
            if circuit.num_qubits > device.num_qubits {
                return Err(format!(
                    "circuit needs {} qubits but device \"{}\" has {}",
                    circuit.num_qubits, device.name, device.num_qubits
                ));
            }
            sim::sample(&circuit, job.shots, seed).map_err(|e| e.to_string())
        }
        PayloadKind::Annealer => {
            let doc: QuboDoc =
                serde_json::from_str(&job.payload).map_err(|e| format!("bad QUBO payload: {e}"))?;
            let qubo = doc.to_qubo();
            if qubo.n > device.num_qubits {
                return Err(format!(
                    "problem needs {} qubits but device \"{}\" has {}",
                    qubo.n, device.name, device.num_qubits
                ));
            }
            let params = AnnealerParams {
                num_reads: job.shots as usize,
                sweeps: anneal_sweeps,
                seed,
                ..Default::default()
            };
            Ok(sample_qubo(&qubo, &params).samples)
        }
    }
}
