use std::fmt::Write as _;

/// Which way the inequality between `lhs` and `rhs` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `lhs ≥ rhs − tolerance`.
    AtLeast,
    /// `lhs ≤ rhs + tolerance`.
    AtMost,
}

/// Outcome of checking one inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub d: Option<usize>,
    pub m: Option<usize>,
    pub epsilon: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub direction: Direction,
    pub tolerance: f64,
    pub holds: bool,
    /// Signed margin in the direction of the inequality; negative means violated.
    pub slack: f64,
    pub trials: u64,
    pub ci_halfwidth: f64,
    pub seed: u64,
    /// False when an input violated a hypothesis of the inequality being checked.
    pub hypothesis_ok: bool,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, direction: Direction, tolerance: f64) -> Self {
        let slack = match direction {
            Direction::AtLeast => lhs - rhs,
            Direction::AtMost => rhs - lhs,
        };
        let holds = slack >= -tolerance;
        BoundReport {
            name: name.into(),
            d: None,
            m: None,
            epsilon: None,
            lhs,
            rhs,
            direction,
            tolerance,
            holds,
            slack,
            trials: 0,
            ci_halfwidth: 0.0,
            seed: 0,
            hypothesis_ok: true,
            notes: Vec::new(),
        }
    }

    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(name, lhs, rhs, Direction::AtLeast, tolerance)
    }

    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(name, lhs, rhs, Direction::AtMost, tolerance)
    }

    /// A check that is either satisfied or not, recorded as `lhs = 1` against `rhs = 1`.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    pub fn with_dims(mut self, d: usize, m: usize) -> Self {
        self.d = Some(d);
        self.m = Some(m);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn with_trials(mut self, trials: u64, ci_halfwidth: f64) -> Self {
        self.trials = trials;
        self.ci_halfwidth = ci_halfwidth;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Mark a hypothesis violation; the report no longer certifies anything.
    pub fn hypothesis_violated(mut self, note: impl Into<String>) -> Self {
        self.hypothesis_ok = false;
        self.notes.push(note.into());
        self
    }

    /// Require an additional condition on top of the inequality.
    pub fn require(mut self, ok: bool, note: impl Into<String>) -> Self {
        if !ok {
            self.holds = false;
            self.notes.push(note.into());
        }
        self
    }

    pub const CSV_HEADER: &'static str = "name,d,m,epsilon,lhs,rhs,holds,slack,trials,ci_halfwidth,seed";

    pub fn csv_row(&self) -> String {
        let opt_usize = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let eps = self.epsilon.map(fmt_float).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&self.name),
            opt_usize(self.d),
            opt_usize(self.m),
            eps,
            fmt_float(self.lhs),
            fmt_float(self.rhs),
            self.holds,
            fmt_float(self.slack),
            self.trials,
            fmt_float(self.ci_halfwidth),
            self.seed
        )
    }
}

/// Seventeen significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn reports_to_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from(BoundReport::CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}
