//! The four litmus programs and their expected outcomes under each
//! semantics.

use std::fmt;

use serde::Serialize;

use crate::kafka::KafkaProgram;
use crate::surface::{parse_program, SurfaceProgram};
use crate::translate::{translate_program, Semantics};
use crate::vm::{Machine, Outcome, StuckKind, VmError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseId {
    L1,
    L2,
    L3,
    L4,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::L1, CaseId::L2, CaseId::L3, CaseId::L4];

    pub fn source(self) -> &'static str {
        match self {
            CaseId::L1 => include_str!("../litmus/L1.gt"),
            CaseId::L2 => include_str!("../litmus/L2.gt"),
            CaseId::L3 => include_str!("../litmus/L3.gt"),
            CaseId::L4 => include_str!("../litmus/L4.gt"),
        }
    }

    pub fn program(self) -> SurfaceProgram {
        parse_program(self.source()).expect("litmus sources parse")
    }

    pub fn translate(self, s: Semantics) -> KafkaProgram {
        translate_program(s, &self.program()).expect("litmus sources are well typed")
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "Pass",
            Verdict::Fail => "Fail",
        })
    }
}

/// The reference expectations.
pub struct ExpectedMatrix;

impl ExpectedMatrix {
    pub fn get(case: CaseId, s: Semantics) -> Verdict {
        use CaseId::*;
        use Verdict::*;
        match (s, case) {
            (Semantics::Optional, _) => Pass,
            (Semantics::Transient, L1) => Fail,
            (Semantics::Transient, _) => Pass,
            (Semantics::Behavioral, L1 | L3) => Fail,
            (Semantics::Behavioral, L2 | L4) => Pass,
            (Semantics::Concrete, L4) => Pass,
            (Semantics::Concrete, _) => Fail,
        }
    }

    /// Documented only; the monotonic semantics is not executed.
    pub fn monotonic(case: CaseId) -> Verdict {
        match case {
            CaseId::L2 => Verdict::Pass,
            _ => Verdict::Fail,
        }
    }

    /// Cells where the formal rules are known to disagree with the reference
    /// expectation. A mismatch here is reported but not treated as a failure.
    pub fn known_discrepancy(case: CaseId, s: Semantics) -> bool {
        (case, s) == (CaseId::L4, Semantics::Concrete)
    }
}

pub fn run_cell(case: CaseId, s: Semantics, fuel: u64) -> Result<Outcome, VmError> {
    let program = case.translate(s);
    Machine::new(program.table, program.main).run(fuel, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixRow {
    pub case: CaseId,
    pub semantics: &'static str,
    pub expected: Verdict,
    /// `pass`, `fail`, `fuel`, `error` or `unimplemented`.
    pub actual: String,
    #[serde(rename = "stuckKind", skip_serializing_if = "Option::is_none")]
    pub stuck_kind: Option<StuckKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
    pub discrepancy: bool,
}

impl MatrixRow {
    fn cell(&self) -> String {
        let mut s = match self.actual.as_str() {
            "pass" => "Pass".to_string(),
            "fail" => match self.stuck_kind {
                Some(k) => format!("Fail ({k})"),
                None => "Fail".to_string(),
            },
            "unimplemented" => format!("({})", self.expected),
            other => other.to_string(),
        };
        if self.discrepancy {
            s.push_str(" !");
        }
        s
    }

    fn known(&self) -> bool {
        Semantics::ALL
            .into_iter()
            .any(|s| s.name() == self.semantics && ExpectedMatrix::known_discrepancy(self.case, s))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixReport {
    pub rows: Vec<MatrixRow>,
}

pub const MONOTONIC: &str = "monotonic";

pub fn run_matrix(fuel: u64) -> MatrixReport {
    let mut rows = Vec::new();
    for case in CaseId::ALL {
        for s in Semantics::ALL {
            let expected = ExpectedMatrix::get(case, s);
            let (actual, stuck_kind, at) = match run_cell(case, s, fuel) {
                Ok(Outcome::Value(_)) => ("pass".to_string(), None, None),
                Ok(Outcome::Stuck { kind, location }) => ("fail".to_string(), Some(kind), Some(location)),
                Ok(Outcome::FuelExhausted) => ("fuel".to_string(), None, None),
                Err(e) => ("error".to_string(), None, Some(e.to_string())),
            };
            let agrees = matches!(
                (expected, actual.as_str()),
                (Verdict::Pass, "pass") | (Verdict::Fail, "fail")
            );
            rows.push(MatrixRow { case, semantics: s.name(), expected, actual, stuck_kind, at, discrepancy: !agrees });
        }
        rows.push(MatrixRow {
            case,
            semantics: MONOTONIC,
            expected: ExpectedMatrix::monotonic(case),
            actual: "unimplemented".to_string(),
            stuck_kind: None,
            at: None,
            discrepancy: false,
        });
    }
    MatrixReport { rows }
}

impl MatrixReport {
    pub fn row(&self, case: CaseId, semantics: &str) -> Option<&MatrixRow> {
        self.rows.iter().find(|r| r.case == case && r.semantics == semantics)
    }

    /// Disagreements outside the known-discrepancy cells.
    pub fn mismatches(&self) -> Vec<&MatrixRow> {
        self.rows.iter().filter(|r| r.discrepancy && !r.known()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("report serialises")
    }

    pub fn to_text(&self) -> String {
        let columns: Vec<&str> = Semantics::ALL.iter().map(|s| s.name()).chain([MONOTONIC]).collect();
        let mut grid = vec![std::iter::once("case".to_string()).chain(columns.iter().map(|c| c.to_string())).collect::<Vec<_>>()];
        for case in CaseId::ALL {
            let mut line = vec![case.to_string()];
            for c in &columns {
                line.push(self.row(case, c).map(MatrixRow::cell).unwrap_or_default());
            }
            grid.push(line);
        }
        let widths: Vec<usize> =
            (0..grid[0].len()).map(|i| grid.iter().map(|l| l[i].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for line in &grid {
            let cells: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out.push_str("monotonic cells show the documented expectation; that semantics is not executed\n");
        for r in self.rows.iter().filter(|r| r.discrepancy) {
            let tag = if r.known() { "DISCREPANCY (known)" } else { "MISMATCH" };
            out.push_str(&format!("{tag} {} {}: expected {}, got {}", r.case, r.semantics, r.expected, r.actual));
            if let Some(at) = &r.at {
                out.push_str(&format!(" at `{at}`"));
            }
            out.push('\n');
        }
        out
    }
}
