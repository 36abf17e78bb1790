use std::fmt::Write as _;
use std::io::Write;

use super::{IterationTrace, SolveReport, Status};
use crate::repr::Repr;

/// One row per orbit point: `index,point,consec,flags`. `consec` is `d(x_k, x_{k+1})`;
/// flags read `name=ok` or `name=fail`, separated by `;`.
pub fn write_trace_csv<X: Repr, E: Repr, W: Write>(trace: &IterationTrace<X, E>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "point", "consec", "flags"])?;
    for (k, x) in trace.points.iter().enumerate() {
        let consec = trace.consec.elements.get(k).map(Repr::repr).unwrap_or_default();
        let flags = trace
            .flags
            .get(k)
            .map(|fs| fs.iter().map(|f| format!("{}={}", f.name, if f.ok { "ok" } else { "fail" })).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        w.write_record([k.to_string(), x.repr(), consec, flags])?;
    }
    w.flush()?;
    Ok(())
}

impl<X: Repr, E: Repr> SolveReport<X, E> {
    /// `key: value` lines; violations carry their step, hypothesis, and witness.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "driver: {}", self.driver);
        match &self.status {
            Status::Certified => {
                let _ = writeln!(s, "status: Certified (sampled hypotheses)");
            }
            Status::HypothesisViolated { step, which, witness } => {
                let _ = writeln!(s, "status: HypothesisViolated");
                let _ = writeln!(s, "kind: hypothesis_violation");
                let _ = writeln!(s, "step: {step}");
                let _ = writeln!(s, "hypothesis: {which}");
                let _ = writeln!(s, "witness: {witness}");
            }
            Status::BudgetExhausted { detail } => {
                let _ = writeln!(s, "status: BudgetExhausted");
                let _ = writeln!(s, "detail: {detail}");
            }
        }
        let _ = writeln!(s, "iterations: {}", self.iterations);
        let _ = writeln!(s, "stop: {}", self.trace.stop.name());
        if let Some(x) = &self.fixed_point {
            let _ = writeln!(s, "fixed_point: {}", x.repr());
        }
        let _ = writeln!(s, "residual: {}", self.residual.repr());
        for d in &self.diagnostics {
            let _ = writeln!(s, "diagnostic: {d}");
        }
        s
    }
}
