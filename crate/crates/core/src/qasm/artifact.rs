//! Canonical artifact serialization.
//!
//! Grammar (bit-exact, LF endings, file ends with LF):
//!
//! ```text
//! QRBART 1
//! backend <sha256hex>
//! layout <p0> <p1> ... <p_{n-1}>
//! <kind> q<i>[,q<j>...] [@<hex16>] t=<start_dt> d=<duration_dt>[ -> c<k>]
//! ```
//!
//! Angles are the 16 lowercase hex digits of the big-endian binary64 bit
//! pattern, never decimal, so re-serializing a parsed artifact reproduces
//! the input bytes exactly.

use thiserror::Error;

use crate::backend::BackendModel;
use crate::circuit::{Circuit, Instruction, Kind};
use crate::layout::Layout;

pub const ARTIFACT_HEADER: &str = "QRBART 1";

/// A serialized transpiled circuit together with its parsed sections.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// Canonical UTF-8 text.
    pub bytes: String,
    pub backend_sha256: String,
    pub layout: Layout,
    pub circuit: Circuit,
}

#[derive(Debug, Error, PartialEq)]
pub enum ArtifactError {
    #[error("circuit is not scheduled: instruction {0} has no start time")]
    Unscheduled(usize),
    #[error("artifact requires a physical circuit")]
    NotPhysical,
    #[error("byte {offset}: {message}")]
    Format { offset: usize, message: String },
}

fn instruction_line(instr: &Instruction) -> Result<String, ArtifactError> {
    let mut line = String::new();
    line.push_str(instr.kind.mnemonic());
    line.push(' ');
    let qs: Vec<String> = instr.qubits.iter().map(|q| format!("q{q}")).collect();
    line.push_str(&qs.join(","));
    if instr.kind == Kind::Rz {
        line.push_str(&format!(" @{:016x}", instr.angle().to_bits()));
    }
    let start = instr.start_dt.ok_or(ArtifactError::Unscheduled(0))?;
    let duration = instr.duration_dt.ok_or(ArtifactError::Unscheduled(0))?;
    line.push_str(&format!(" t={start} d={duration}"));
    if instr.kind == Kind::Measure {
        line.push_str(&format!(" -> c{}", instr.clbits[0]));
    }
    Ok(line)
}

/// Serializes a scheduled physical circuit into its canonical byte form.
pub fn serialize_artifact(
    circuit: &Circuit,
    layout: &Layout,
    backend: &BackendModel,
) -> Result<Artifact, ArtifactError> {
    if !circuit.is_physical {
        return Err(ArtifactError::NotPhysical);
    }
    for (position, instr) in circuit.instructions.iter().enumerate() {
        if instr.start_dt.is_none() || instr.duration_dt.is_none() {
            return Err(ArtifactError::Unscheduled(position));
        }
    }
    let mut text = String::new();
    text.push_str(ARTIFACT_HEADER);
    text.push('\n');
    text.push_str(&format!("backend {}\n", backend.sha256));
    let positions: Vec<String> = layout.as_slice().iter().map(|p| p.to_string()).collect();
    text.push_str(&format!("layout {}\n", positions.join(" ")));
    for instr in &circuit.instructions {
        text.push_str(&instruction_line(instr)?);
        text.push('\n');
    }
    Ok(Artifact {
        bytes: text,
        backend_sha256: backend.sha256.clone(),
        layout: layout.clone(),
        circuit: circuit.clone(),
    })
}

struct LineReader<'a> {
    text: &'a str,
    offset: usize,
}

impl<'a> LineReader<'a> {
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        if self.offset >= self.text.len() {
            return None;
        }
        let start = self.offset;
        let rest = &self.text[start..];
        match rest.find('\n') {
            Some(end) => {
                self.offset = start + end + 1;
                Some((start, &rest[..end]))
            }
            None => {
                // Missing trailing LF is reported by the caller.
                self.offset = self.text.len();
                Some((start, rest))
            }
        }
    }
}

fn format_error(offset: usize, message: &str) -> ArtifactError {
    ArtifactError::Format {
        offset,
        message: message.to_string(),
    }
}

fn parse_qubit(token: &str, offset: usize) -> Result<usize, ArtifactError> {
    token
        .strip_prefix('q')
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format_error(offset, "expected qubit operand `q<i>`"))
}

fn parse_instruction(line: &str, offset: usize) -> Result<Instruction, ArtifactError> {
    let mut fields = line.split(' ');
    let kind = fields
        .next()
        .and_then(Kind::from_mnemonic)
        .ok_or_else(|| format_error(offset, "unknown instruction kind"))?;
    let operands = fields
        .next()
        .ok_or_else(|| format_error(offset, "missing qubit operands"))?;
    let mut qubits = Vec::new();
    for token in operands.split(',') {
        qubits.push(parse_qubit(token, offset)?);
    }
    let mut params = Vec::new();
    let mut rest = fields.next();
    if kind == Kind::Rz {
        let hex = rest
            .and_then(|f| f.strip_prefix('@'))
            .ok_or_else(|| format_error(offset, "rz requires an @<hex16> angle"))?;
        if hex.len() != 16 || !hex.chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase())
        {
            return Err(format_error(offset, "angle must be 16 lowercase hex digits"));
        }
        let bits = u64::from_str_radix(hex, 16)
            .map_err(|_| format_error(offset, "malformed angle hex"))?;
        params.push(f64::from_bits(bits));
        rest = fields.next();
    }
    let start = rest
        .and_then(|f| f.strip_prefix("t="))
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| format_error(offset, "expected `t=<start>`"))?;
    let duration = fields
        .next()
        .and_then(|f| f.strip_prefix("d="))
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| format_error(offset, "expected `d=<duration>`"))?;
    let mut clbits = Vec::new();
    if kind == Kind::Measure {
        if fields.next() != Some("->") {
            return Err(format_error(offset, "measure requires `-> c<k>`"));
        }
        let clbit = fields
            .next()
            .and_then(|f| f.strip_prefix('c'))
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| format_error(offset, "measure requires `-> c<k>`"))?;
        clbits.push(clbit);
    }
    if fields.next().is_some() {
        return Err(format_error(offset, "trailing fields on instruction line"));
    }
    Ok(Instruction {
        kind,
        qubits,
        params,
        clbits,
        duration_dt: Some(duration),
        start_dt: Some(start),
    })
}

/// Parses artifact bytes; inverse of [`serialize_artifact`].
pub fn parse_artifact(text: &str) -> Result<Artifact, ArtifactError> {
    if !text.ends_with('\n') {
        return Err(format_error(text.len(), "artifact must end with LF"));
    }
    let mut reader = LineReader { text, offset: 0 };

    let (offset, header) = reader
        .next_line()
        .ok_or_else(|| format_error(0, "empty artifact"))?;
    if header != ARTIFACT_HEADER {
        return Err(format_error(offset, "missing `QRBART 1` header"));
    }

    let (offset, backend_line) = reader
        .next_line()
        .ok_or_else(|| format_error(text.len(), "missing backend line"))?;
    let backend_sha256 = backend_line
        .strip_prefix("backend ")
        .ok_or_else(|| format_error(offset, "expected `backend <sha256>`"))?;
    if backend_sha256.len() != 64
        || !backend_sha256
            .chars()
            .all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase())
    {
        return Err(format_error(offset, "backend hash must be 64 lowercase hex digits"));
    }

    let (offset, layout_line) = reader
        .next_line()
        .ok_or_else(|| format_error(text.len(), "missing layout line"))?;
    let layout_body = layout_line
        .strip_prefix("layout ")
        .ok_or_else(|| format_error(offset, "expected `layout <p0> <p1> ...`"))?;
    let mut positions = Vec::new();
    for token in layout_body.split(' ') {
        positions.push(
            token
                .parse()
                .map_err(|_| format_error(offset, "malformed layout entry"))?,
        );
    }
    let layout = Layout::new(positions)
        .map_err(|e| format_error(offset, &format!("layout is not a permutation: {e}")))?;

    let mut instructions = Vec::new();
    while let Some((offset, line)) = reader.next_line() {
        if line.is_empty() {
            return Err(format_error(offset, "blank line in instruction section"));
        }
        instructions.push(parse_instruction(line, offset)?);
    }

    let num_clbits = instructions
        .iter()
        .flat_map(|i| i.clbits.iter())
        .max()
        .map(|&c| c + 1)
        .unwrap_or(0);
    let mut circuit = Circuit::new("", layout.len(), num_clbits);
    circuit.is_physical = true;
    circuit.instructions = instructions;
    crate::circuit::validate_circuit(&circuit)
        .map_err(|e| format_error(0, &format!("invalid circuit: {e}")))?;

    Ok(Artifact {
        bytes: text.to_string(),
        backend_sha256: backend_sha256.to_string(),
        layout,
        circuit,
    })
}
