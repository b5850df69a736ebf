use std::fmt;

/// Outcome of one named law or condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Labels of the first counterexample, when the check failed.
    pub witness: Option<Vec<String>>,
}

/// A list of checks; passes iff every check passes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed: true,
            witness: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: Vec<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed: false,
            witness: Some(witness),
        });
    }

    /// Records `name` as passed when `witness` is `None`.
    pub fn record(&mut self, name: impl Into<String>, witness: Option<Vec<String>>) {
        match witness {
            None => self.pass(name),
            Some(w) => self.fail(name, w),
        }
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Appends another report's checks, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.title, if self.ok() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            match &c.witness {
                None => writeln!(f, "  [pass] {}", c.name)?,
                Some(w) => writeln!(f, "  [FAIL] {} at ({})", c.name, w.join(", "))?,
            }
        }
        Ok(())
    }
}
