//! File formats: histories as JSON lines, tensors as JSON, tables as CSV.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::continuum::ContinuumRow;
use crate::engine::CAHistory;
use crate::error::{Error, Result};
use crate::exact::{GaussMatrix, GaussVector, GaussianInt, HamiltonianSpec};
use crate::multipartite::{MultiHistory, ResidualEntry};
use crate::uncertainty::UncertaintyReport;

#[derive(Serialize, Deserialize)]
struct HistoryHeader {
    dim: usize,
    l: f64,
    #[serde(rename = "H")]
    h: HamiltonianSpec,
}

#[derive(Serialize, Deserialize)]
struct HistoryLine {
    n: usize,
    psi: GaussVector,
}

/// Header line `{"dim", "l", "H"}` followed by one `{"n", "psi"}` line per slice.
pub fn write_history_jsonl<W: Write>(hist: &CAHistory, mut out: W) -> Result<()> {
    let header = HistoryHeader {
        dim: hist.dim(),
        l: hist.scale(),
        h: hist.hamiltonian().clone(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for (n, psi) in hist.states().iter().enumerate() {
        serde_json::to_writer(&mut out, &HistoryLine { n, psi: psi.clone() })?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a history written by [`write_history_jsonl`]. The `solution` flag is
/// set only if every interior slice satisfies the equation of motion.
pub fn read_history_jsonl<R: BufRead>(input: R) -> Result<CAHistory> {
    let mut lines = input.lines().filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let header: HistoryHeader = match lines.next() {
        Some(line) => serde_json::from_str(&line?)?,
        None => return Err(Error::Parse("history file is empty".into())),
    };
    if header.h.dim() != header.dim {
        return Err(Error::DimensionMismatch {
            expected: header.dim,
            found: header.h.dim(),
        });
    }
    let mut states = Vec::new();
    for line in lines {
        let rec: HistoryLine = serde_json::from_str(&line?)?;
        if rec.n != states.len() {
            return Err(Error::Parse(format!(
                "slice {} out of order (expected {})",
                rec.n,
                states.len()
            )));
        }
        states.push(rec.psi);
    }
    CAHistory::new_checked(states, header.h, header.l)
}

/// Tensor file: header fields plus the flat entries in storage order.
#[derive(Serialize, Deserialize)]
pub struct TensorFile {
    pub m: usize,
    pub dims: Vec<usize>,
    pub clocks: Vec<usize>,
    pub l: f64,
    #[serde(rename = "H")]
    pub hams: Vec<HamiltonianSpec>,
    pub interaction: Option<GaussMatrix>,
    pub entries: Vec<GaussianInt>,
}

impl TensorFile {
    pub fn from_history(psi: &MultiHistory) -> Self {
        TensorFile {
            m: psi.m(),
            dims: psi.dims().to_vec(),
            clocks: psi.clocks().to_vec(),
            l: psi.scale(),
            hams: psi.hamiltonians().to_vec(),
            interaction: psi.interaction().cloned(),
            entries: psi.values().to_vec(),
        }
    }

    pub fn into_history(self) -> Result<MultiHistory> {
        if self.m != self.dims.len() || self.m != self.hams.len() {
            return Err(Error::Parse(format!(
                "tensor header lists m = {} but {} dims and {} Hamiltonians",
                self.m,
                self.dims.len(),
                self.hams.len()
            )));
        }
        for (h, &d) in self.hams.iter().zip(&self.dims) {
            if h.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: h.dim() });
            }
        }
        MultiHistory::new(self.clocks, self.entries, self.hams, self.interaction, self.l)
    }
}

pub fn write_tensor_json<W: Write>(psi: &MultiHistory, mut out: W) -> Result<()> {
    serde_json::to_writer(&mut out, &TensorFile::from_history(psi))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_tensor_json<R: std::io::Read>(input: R) -> Result<MultiHistory> {
    let file: TensorFile = serde_json::from_reader(input)?;
    file.into_history()
}

/// Columns `n_1 … n_m, alpha_1 … alpha_m, re, im`.
pub fn write_residual_csv<W: Write>(entries: &[ResidualEntry], m: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=m).map(|k| format!("n_{k}")).collect();
    header.extend((1..=m).map(|k| format!("alpha_{k}")));
    header.push("re".into());
    header.push("im".into());
    w.write_record(&header)?;
    for e in entries {
        let mut rec: Vec<String> = e.clock.iter().chain(&e.alpha).map(usize::to_string).collect();
        rec.push(e.value.re.to_string());
        rec.push(e.value.im.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

/// Columns `t, re_psi_α, im_psi_α …, psi_error, residual_norm, q`.
pub fn write_continuum_csv<W: Write>(rows: &[ContinuumRow], dim: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for a in 0..dim {
        header.push(format!("re_psi_{a}"));
        header.push(format!("im_psi_{a}"));
    }
    header.extend(["psi_error", "residual_norm", "q"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.t.to_string()];
        for z in &r.psi {
            rec.push(z.re.to_string());
            rec.push(z.im.to_string());
        }
        rec.push(r.psi_error.to_string());
        rec.push(opt(r.residual_norm));
        rec.push(opt(r.q));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per state: `id, delta_x, delta_p, robertson_rhs, paper_rhs,
/// paper_rhs_half, derived_rhs` and the four satisfaction flags.
pub fn write_uncertainty_csv<W: Write>(rows: &[(String, UncertaintyReport)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "id",
        "delta_x",
        "delta_p",
        "robertson_rhs",
        "paper_rhs",
        "paper_rhs_half",
        "derived_rhs",
        "satisfied_robertson",
        "satisfied_paper",
        "satisfied_paper_half",
        "satisfied_derived",
    ])?;
    for (id, r) in rows {
        w.write_record([
            id.clone(),
            r.delta_x.to_string(),
            r.delta_p.to_string(),
            r.robertson_rhs.to_string(),
            r.paper_rhs.to_string(),
            r.paper_rhs_half.to_string(),
            r.derived_rhs.to_string(),
            r.satisfied_robertson.to_string(),
            r.satisfied_paper.to_string(),
            r.satisfied_paper_half.to_string(),
            r.satisfied_derived.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
