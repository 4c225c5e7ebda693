//! OpenQASM 3 emission and parsing for the gate subset used by the
//! circuit builders: `h`, `rx`, `ry`, `rz`, `cx` plus full-register
//! measurement. RZZ gates are emitted as their CX-RZ-CX decomposition and
//! are not reconstructed when parsing.

use thiserror::Error;

use super::{CircuitIR, Gate};

#[derive(Debug, Error)]
pub enum QasmError {
    #[error("line {line}: unsupported gate \"{gate}\"")]
    UnsupportedGate { line: usize, gate: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: qubit index {qubit} out of range for width {width}")]
    QubitOutOfRange {
        line: usize,
        qubit: usize,
        width: usize,
    },
    #[error("missing qubit register declaration")]
    MissingRegister,
}

/// Print an angle with 17 significant digits so emission is
/// byte-deterministic and parsing recovers the exact f64.
fn format_angle(angle: f64) -> String {
    format!("{angle:.16e}")
}

/// Emit a circuit as OpenQASM 3 text.
pub fn emit_qasm3(circuit: &CircuitIR) -> String {
    let n = circuit.num_qubits;
    let mut out = String::new();
    out.push_str("OPENQASM 3.0;\n");
    out.push_str("include \"stdgates.inc\";\n");
    out.push_str(&format!("qubit[{n}] q;\n"));
    out.push_str(&format!("bit[{n}] c;\n"));
    for gate in &circuit.gates {
        match *gate {
            Gate::H { qubit } => out.push_str(&format!("h q[{qubit}];\n")),
            Gate::Rx { qubit, angle } => {
                out.push_str(&format!("rx({}) q[{qubit}];\n", format_angle(angle)))
            }
            Gate::Ry { qubit, angle } => {
                out.push_str(&format!("ry({}) q[{qubit}];\n", format_angle(angle)))
            }
            Gate::Rz { qubit, angle } => {
                out.push_str(&format!("rz({}) q[{qubit}];\n", format_angle(angle)))
            }
            Gate::Cx { control, target } => {
                out.push_str(&format!("cx q[{control}], q[{target}];\n"))
            }
            Gate::Rzz { a, b, angle } => {
                out.push_str(&format!("cx q[{a}], q[{b}];\n"));
                out.push_str(&format!("rz({}) q[{b}];\n", format_angle(angle)));
                out.push_str(&format!("cx q[{a}], q[{b}];\n"));
            }
        }
    }
    if circuit.measure_all {
        out.push_str("c = measure q;\n");
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> QasmError {
    QasmError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_qubit_operand(token: &str, line: usize) -> Result<usize, QasmError> {
    let inner = token
        .strip_prefix("q[")
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(|| syntax(line, format!("expected qubit operand like q[0], got \"{token}\"")))?;
    inner
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("invalid qubit index \"{inner}\"")))
}

fn parse_register_width(decl: &str, keyword: &str, line: usize) -> Result<usize, QasmError> {
    // e.g. "qubit[5] q" -> 5
    let rest = decl.strip_prefix(keyword).unwrap_or(decl);
    let open = rest.find('[').ok_or_else(|| syntax(line, "expected register size"))?;
    let close = rest.find(']').ok_or_else(|| syntax(line, "expected register size"))?;
    rest[open + 1..close]
        .trim()
        .parse::<usize>()
        .map_err(|_| syntax(line, "invalid register size"))
}

/// Parse OpenQASM 3 text written in the emitted subset back into a
/// circuit. Anything outside the subset is rejected with a line number.
pub fn parse_qasm3(text: &str) -> Result<CircuitIR, QasmError> {
    let mut num_qubits: Option<usize> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut measure_all = false;
    let mut saw_version = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stmt = match raw.find("//") {
            Some(pos) => raw[..pos].trim(),
            None => raw.trim(),
        };
        if stmt.is_empty() {
            continue;
        }
        let stmt = stmt
            .strip_suffix(';')
            .ok_or_else(|| syntax(line, "statement must end with ';'"))?
            .trim();

        if !saw_version {
            if stmt == "OPENQASM 3.0" || stmt == "OPENQASM 3" {
                saw_version = true;
                continue;
            }
            return Err(syntax(line, "expected OPENQASM 3.0 header"));
        }
        if stmt.starts_with("include") {
            continue;
        }
        if stmt.starts_with("qubit") {
            num_qubits = Some(parse_register_width(stmt, "qubit", line)?);
            continue;
        }
        if stmt.starts_with("bit") {
            parse_register_width(stmt, "bit", line)?;
            continue;
        }
        if stmt == "c = measure q" {
            measure_all = true;
            continue;
        }

        let width = num_qubits.ok_or(QasmError::MissingRegister)?;
        let name_end = stmt
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(stmt.len());
        let name = &stmt[..name_end];
        if name.is_empty() {
            return Err(syntax(line, format!("cannot parse statement \"{stmt}\"")));
        }
        if !matches!(name, "h" | "rx" | "ry" | "rz" | "cx") {
            return Err(QasmError::UnsupportedGate {
                line,
                gate: name.to_string(),
            });
        }
        let rest = stmt[name_end..].trim_start();
        let (angle, operands) = if let Some(after_open) = rest.strip_prefix('(') {
            let close = after_open
                .find(')')
                .ok_or_else(|| syntax(line, "missing ')' in gate parameter"))?;
            let value: f64 = after_open[..close]
                .trim()
                .parse()
                .map_err(|_| syntax(line, "invalid gate angle"))?;
            (Some(value), after_open[close + 1..].trim())
        } else {
            (None, rest)
        };
        if operands.is_empty() {
            return Err(syntax(line, format!("gate {name} is missing qubit operands")));
        }

        let qubits: Vec<usize> = operands
            .split(',')
            .map(|tok| parse_qubit_operand(tok.trim(), line))
            .collect::<Result<_, _>>()?;
        for &q in &qubits {
            if q >= width {
                return Err(QasmError::QubitOutOfRange {
                    line,
                    qubit: q,
                    width,
                });
            }
        }

        let expect_arity = |arity: usize| -> Result<(), QasmError> {
            if qubits.len() == arity {
                Ok(())
            } else {
                Err(syntax(
                    line,
                    format!("gate {name} expects {arity} qubit operand(s), got {}", qubits.len()),
                ))
            }
        };
        let expect_angle = || -> Result<f64, QasmError> {
            angle.ok_or_else(|| syntax(line, format!("gate {name} requires an angle")))
        };

        let gate = match name {
            "h" => {
                expect_arity(1)?;
                if angle.is_some() {
                    return Err(syntax(line, "gate h takes no parameter"));
                }
                Gate::H { qubit: qubits[0] }
            }
            "rx" => {
                expect_arity(1)?;
                Gate::Rx { qubit: qubits[0], angle: expect_angle()? }
            }
            "ry" => {
                expect_arity(1)?;
                Gate::Ry { qubit: qubits[0], angle: expect_angle()? }
            }
            "rz" => {
                expect_arity(1)?;
                Gate::Rz { qubit: qubits[0], angle: expect_angle()? }
            }
            "cx" => {
                expect_arity(2)?;
                if angle.is_some() {
                    return Err(syntax(line, "gate cx takes no parameter"));
                }
                Gate::Cx { control: qubits[0], target: qubits[1] }
            }
            _ => unreachable!("gate names validated above"),
        };
        gates.push(gate);
    }

    let num_qubits = num_qubits.ok_or(QasmError::MissingRegister)?;
    Ok(CircuitIR {
        num_qubits,
        gates,
        measure_all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_qaoa, build_vqe};
    use crate::qubo::IsingModel;

    #[test]
    fn emits_single_hadamard() {
        let mut c = CircuitIR::new(1);
        c.push(Gate::H { qubit: 0 }).unwrap();
        c.measure_all = true;
        let text = emit_qasm3(&c);
        assert_eq!(
            text,
            "OPENQASM 3.0;\ninclude \"stdgates.inc\";\nqubit[1] q;\nbit[1] c;\nh q[0];\nc = measure q;\n"
        );
    }

    #[test]
    fn emits_empty_circuit() {
        let mut c = CircuitIR::new(2);
        c.measure_all = true;
        let text = emit_qasm3(&c);
        assert_eq!(
            text,
            "OPENQASM 3.0;\ninclude \"stdgates.inc\";\nqubit[2] q;\nbit[2] c;\nc = measure q;\n"
        );
    }

    #[test]
    fn rzz_decomposes_to_three_lines() {
        let mut c = CircuitIR::new(2);
        c.push(Gate::Rzz { a: 0, b: 1, angle: 1.4 }).unwrap();
        let text = emit_qasm3(&c);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[4], "cx q[0], q[1];");
        assert!(lines[5].starts_with("rz(1.399999999999999") && lines[5].ends_with(") q[1];"));
        assert_eq!(lines[6], "cx q[0], q[1];");
    }

    #[test]
    fn angle_format_has_17_significant_digits() {
        assert_eq!(format_angle(1.4), "1.3999999999999999e0");
        assert_eq!(format_angle(0.0), "0.0000000000000000e0");
        assert_eq!(format_angle(-0.6), "-5.9999999999999998e-1");
        // 17 significant decimal digits round-trip f64 exactly.
        for &x in &[std::f64::consts::PI, 1e-300, -2.5e17, 0.1] {
            let parsed: f64 = format_angle(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn parse_rejects_unsupported_gate() {
        let text = "OPENQASM 3.0;\nqubit[1] q;\nu3(0.1, 0.2, 0.3) q[0];\n";
        let err = parse_qasm3(text).unwrap_err();
        assert!(matches!(
            err,
            QasmError::UnsupportedGate { line: 3, ref gate } if gate == "u3"
        ));
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "OPENQASM 3.0;\nqubit[1] q;\nh q[0]\n";
        let err = parse_qasm3(text).unwrap_err();
        assert!(matches!(err, QasmError::Syntax { line: 3, .. }));
    }

    #[test]
    fn parse_rejects_out_of_range_qubit() {
        let text = "OPENQASM 3.0;\nqubit[1] q;\nh q[1];\n";
        let err = parse_qasm3(text).unwrap_err();
        assert!(matches!(err, QasmError::QubitOutOfRange { qubit: 1, .. }));
    }

    #[test]
    fn qaoa_emission_round_trips() {
        let ising = IsingModel {
            n: 3,
            h: vec![0.25, 0.0, -1.5],
            j: [((0, 1), 0.5), ((1, 2), -2.0)].into_iter().collect(),
            offset: 0.0,
        };
        let c = build_qaoa(&ising, 2, &[0.3, 0.9], &[0.1, 0.4]).unwrap();
        let text = emit_qasm3(&c);
        let parsed = parse_qasm3(&text).unwrap();
        assert_eq!(emit_qasm3(&parsed), text);
    }

    #[test]
    fn vqe_round_trip_preserves_gate_sequence() {
        let c = build_vqe(2, 1, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let parsed = parse_qasm3(&emit_qasm3(&c)).unwrap();
        // No RZZ in the VQE ansatz, so the IR round-trips exactly.
        assert_eq!(parsed, c);
    }

    #[test]
    fn emission_is_deterministic() {
        let c = build_vqe(3, 2, &[0.9; 9]).unwrap();
        assert_eq!(emit_qasm3(&c), emit_qasm3(&c));
    }
}
