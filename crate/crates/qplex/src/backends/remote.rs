//! Generic remote-provider client: JSON over HTTP with synchronous
//! polling.
//!
//! Wire protocol:
//! - `POST /jobs` with `{"kind":"gate"|"annealer","payload":...,"shots":N,"device":name}`
//!   returns `{"job_id":...}`
//! - `GET /jobs/{id}` returns `{"status":"queued"|"running"|"done"|"failed"}`
//! - `GET /jobs/{id}/result` returns `{"counts":{"0101":n,...},"shots":N}`
//! - `GET /devices` returns a JSON list of devices
//!
//! Credentials come from `QPLEX_<PROVIDER>_TOKEN` environment variables
//! and are sent as a bearer token.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::circuits::{emit_qasm3, CircuitIR};

use super::{token_variable, BackendError, DeviceInfo, ExecutionOutput, GateExecutor, SampleSet};

/// Payload kinds accepted by providers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    Gate,
    Annealer,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobRequest {
    pub kind: PayloadKind,
    /// OpenQASM 3 text for gate jobs, QUBO JSON for annealer jobs.
    pub payload: String,
    pub shots: u64,
    pub device: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JobCreated {
    pub job_id: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JobStatusDoc {
    pub status: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JobResultDoc {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

/// Synchronous HTTP client for the wire protocol.
#[derive(Clone)]
pub struct RemoteClient {
    base_url: String,
    token: String,
    agent: ureq::Agent,
    poll_interval: Duration,
    max_polls: usize,
}

impl RemoteClient {
    pub fn new(base_url: &str, token: &str) -> Self {
        RemoteClient {
            base_url: base_url.trim_end_matches('/').to_string(),
            token: token.to_string(),
            agent: ureq::AgentBuilder::new()
                .timeout(Duration::from_secs(30))
                .build(),
            poll_interval: Duration::from_millis(10),
            max_polls: 1000,
        }
    }

    /// Build a client whose token comes from `QPLEX_<PROVIDER>_TOKEN`.
    pub fn from_env(provider: &str, base_url: &str) -> Result<Self, BackendError> {
        let var = token_variable(provider);
        let token = std::env::var(&var).map_err(|_| BackendError::MissingToken { var })?;
        Ok(RemoteClient::new(base_url, &token))
    }

    pub fn with_poll_interval(mut self, interval: Duration) -> Self {
        self.poll_interval = interval;
        self
    }

    fn bearer(&self) -> String {
        format!("Bearer {}", self.token)
    }

    fn read_body(response: ureq::Response) -> Result<String, BackendError> {
        response
            .into_string()
            .map_err(|e| BackendError::Http(e.to_string()))
    }

    fn map_error(error: ureq::Error) -> BackendError {
        match error {
            ureq::Error::Status(401, response) | ureq::Error::Status(403, response) => {
                let body = response.into_string().unwrap_or_default();
                BackendError::Auth(body)
            }
            ureq::Error::Status(code, response) => {
                let body = response.into_string().unwrap_or_default();
                BackendError::Protocol(format!("HTTP {code}: {body}"))
            }
            transport => BackendError::Http(transport.to_string()),
        }
    }

    fn get(&self, path: &str) -> Result<String, BackendError> {
        self.agent
            .get(&format!("{}{path}", self.base_url))
            .set("Authorization", &self.bearer())
            .call()
            .map_err(Self::map_error)
            .and_then(Self::read_body)
    }

    fn post(&self, path: &str, body: &str) -> Result<String, BackendError> {
        self.agent
            .post(&format!("{}{path}", self.base_url))
            .set("Authorization", &self.bearer())
            .set("Content-Type", "application/json")
            .send_string(body)
            .map_err(Self::map_error)
            .and_then(Self::read_body)
    }

    fn decode<T: for<'de> Deserialize<'de>>(body: &str) -> Result<T, BackendError> {
        serde_json::from_str(body)
            .map_err(|e| BackendError::Protocol(format!("bad response body: {e}")))
    }

    pub fn devices(&self) -> Result<Vec<DeviceInfo>, BackendError> {
        Self::decode(&self.get("/devices")?)
    }

    pub fn submit(&self, request: &JobRequest) -> Result<String, BackendError> {
        let body = serde_json::to_string(request)
            .map_err(|e| BackendError::Protocol(e.to_string()))?;
        let created: JobCreated = Self::decode(&self.post("/jobs", &body)?)?;
        Ok(created.job_id)
    }

    pub fn poll(&self, job_id: &str) -> Result<JobState, BackendError> {
        let doc: JobStatusDoc = Self::decode(&self.get(&format!("/jobs/{job_id}"))?)?;
        match doc.status.as_str() {
            "queued" => Ok(JobState::Queued),
            "running" => Ok(JobState::Running),
            "done" => Ok(JobState::Done),
            "failed" => Ok(JobState::Failed),
            other => Err(BackendError::Protocol(format!(
                "unknown job status \"{other}\""
            ))),
        }
    }

    pub fn fetch_result(&self, job_id: &str) -> Result<SampleSet, BackendError> {
        let doc: JobResultDoc = Self::decode(&self.get(&format!("/jobs/{job_id}/result"))?)?;
        SampleSet::from_wire(doc.counts, doc.shots)
    }

    /// Submit, poll until the job leaves the queue, and fetch the
    /// samples. Polling is synchronous with the configured interval.
    pub fn run_job(&self, request: &JobRequest) -> Result<SampleSet, BackendError> {
        let job_id = self.submit(request)?;
        for _ in 0..self.max_polls {
            match self.poll(&job_id)? {
                JobState::Done => {
                    let samples = self.fetch_result(&job_id)?;
                    samples.validate()?;
                    return Ok(samples);
                }
                JobState::Failed => return Err(BackendError::JobFailed(job_id)),
                JobState::Queued | JobState::Running => {
                    std::thread::sleep(self.poll_interval)
                }
            }
        }
        Err(BackendError::Http(format!(
            "job {job_id} did not finish within the polling budget"
        )))
    }
}

/// Gate executor that ships circuits to a remote device as OpenQASM 3.
pub struct RemoteExecutor {
    backend_name: String,
    client: RemoteClient,
    device: DeviceInfo,
}

impl RemoteExecutor {
    pub fn new(backend_name: &str, client: RemoteClient, device: DeviceInfo) -> Self {
        RemoteExecutor {
            backend_name: backend_name.to_string(),
            client,
            device,
        }
    }
}

impl GateExecutor for RemoteExecutor {
    fn backend_name(&self) -> &str {
        &self.backend_name
    }

    fn max_qubits(&self) -> usize {
        self.device.num_qubits
    }

    // The seed stays local: the wire protocol carries no RNG state, so
    // remote sampling is deterministic only as far as the provider is.
    fn execute(
        &mut self,
        circuit: &CircuitIR,
        shots: u64,
        _seed: u64,
    ) -> Result<ExecutionOutput, BackendError> {
        if shots == 0 {
            return Err(BackendError::ShotsRequired);
        }
        let request = JobRequest {
            kind: PayloadKind::Gate,
            payload: emit_qasm3(circuit),
            shots,
            device: self.device.name.clone(),
        };
        Ok(ExecutionOutput::Counts(self.client.run_job(&request)?))
    }
}
