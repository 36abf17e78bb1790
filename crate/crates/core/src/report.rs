//! Axiom-by-axiom validation reports.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// The axiom held on every checked instance.
    Pass { checked: usize },
    /// A concrete violating instance.
    Fail { witness: String },
    /// Informational entry that does not affect the verdict.
    Note { text: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomResult {
    pub axiom: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub subject: String,
    pub entries: Vec<AxiomResult>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self { subject: subject.into(), entries: Vec::new() }
    }

    pub fn pass(&mut self, axiom: impl Into<String>, checked: usize) {
        self.entries.push(AxiomResult { axiom: axiom.into(), outcome: Outcome::Pass { checked } });
    }

    pub fn fail(&mut self, axiom: impl Into<String>, witness: impl Into<String>) {
        self.entries.push(AxiomResult { axiom: axiom.into(), outcome: Outcome::Fail { witness: witness.into() } });
    }

    pub fn note(&mut self, axiom: impl Into<String>, text: impl Into<String>) {
        self.entries.push(AxiomResult { axiom: axiom.into(), outcome: Outcome::Note { text: text.into() } });
    }

    /// Records `Pass` or the first witness for one axiom.
    pub fn record(&mut self, axiom: impl Into<String>, checked: usize, witness: Option<String>) {
        match witness {
            Some(w) => self.fail(axiom, w),
            None => self.pass(axiom, checked),
        }
    }

    pub fn is_pass(&self) -> bool {
        self.entries.iter().all(|e| !matches!(e.outcome, Outcome::Fail { .. }))
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomResult> {
        self.entries.iter().filter(|e| matches!(e.outcome, Outcome::Fail { .. }))
    }

    pub fn get(&self, axiom: &str) -> Option<&Outcome> {
        self.entries.iter().find(|e| e.axiom == axiom).map(|e| &e.outcome)
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.entries.extend(other.entries);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "subject: {}", self.subject)?;
        for e in &self.entries {
            match &e.outcome {
                Outcome::Pass { checked } => writeln!(f, "  PASS  {} ({checked})", e.axiom)?,
                Outcome::Fail { witness } => writeln!(f, "  FAIL  {}: {witness}", e.axiom)?,
                Outcome::Note { text } => writeln!(f, "  NOTE  {}: {text}", e.axiom)?,
            }
        }
        write!(f, "verdict: {}", if self.is_pass() { "PASS" } else { "FAIL" })
    }
}
