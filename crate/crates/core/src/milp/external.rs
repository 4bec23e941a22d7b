use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use num_rational::BigRational;

use super::simplex::rational;
use super::{emit_lp, MilpError, MilpModel, Solution, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionFormat {
    /// `solu` output of CBC: a status line, then `index name value reduced-cost`.
    Cbc,
    /// HiGHS `writeSolution` text.
    Highs,
}

/// A solver run as a child process. `{input}` and `{output}` in the command template
/// are replaced by the LP file and the solution file.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub command: String,
    pub format: SolutionFormat,
    pub timeout: Duration,
    /// Directory receiving `model.lp`, the solution file and solver logs; a temporary
    /// directory is used when unset.
    pub workdir: Option<PathBuf>,
}

impl ExternalSolver {
    pub fn cbc(binary: &str, timeout: Duration) -> Self {
        ExternalSolver {
            command: format!("{binary} {{input}} preprocess off solve solu {{output}}"),
            format: SolutionFormat::Cbc,
            timeout,
            workdir: None,
        }
    }

    pub fn solve(&self, m: &MilpModel) -> Result<Solution, MilpError> {
        let tmp;
        let dir: &Path = match &self.workdir {
            Some(d) => {
                fs::create_dir_all(d)?;
                d
            }
            None => {
                tmp = tempfile::tempdir()?;
                tmp.path()
            }
        };
        let input = dir.join("model.lp");
        let output = dir.join("model.sol");
        fs::write(&input, emit_lp(m)?)?;
        let _ = fs::remove_file(&output);
        let args: Vec<String> = self
            .command
            .split_whitespace()
            .map(|t| t.replace("{input}", &input.to_string_lossy()).replace("{output}", &output.to_string_lossy()))
            .collect();
        let (prog, rest) = args.split_first().ok_or_else(|| MilpError::Solver("empty command template".into()))?;
        let log = fs::File::create(dir.join("solver.log"))?;
        let start = Instant::now();
        let mut child = Command::new(prog)
            .args(rest)
            .stdin(Stdio::null())
            .stdout(log.try_clone()?)
            .stderr(log)
            .spawn()
            .map_err(|e| MilpError::Solver(format!("cannot start {prog}: {e}")))?;
        let status = loop {
            if let Some(s) = child.try_wait()? {
                break s;
            }
            if start.elapsed() > self.timeout {
                let _ = child.kill();
                let _ = child.wait();
                return Err(MilpError::Timeout(start.elapsed().as_secs_f64()));
            }
            std::thread::sleep(Duration::from_millis(20));
        };
        let text = fs::read_to_string(&output).map_err(|e| {
            MilpError::Solver(format!("{prog} exited with {status} and left no readable solution file: {e}"))
        })?;
        match self.format {
            SolutionFormat::Cbc => parse_cbc_solution(&text),
            SolutionFormat::Highs => parse_highs_solution(&text),
        }
    }
}

fn value(tok: &str) -> Result<BigRational, MilpError> {
    let v: f64 = tok.parse().map_err(|_| MilpError::Solver(format!("bad number {tok:?} in solution file")))?;
    if !v.is_finite() {
        return Err(MilpError::Solver(format!("non-finite value {tok} in solution file")));
    }
    Ok(rational(v))
}

pub fn parse_cbc_solution(text: &str) -> Result<Solution, MilpError> {
    let mut lines = text.lines();
    let head = lines.next().unwrap_or("").trim().to_ascii_lowercase();
    let status = if head.starts_with("optimal") {
        SolveStatus::Optimal
    } else if head.contains("infeasible") {
        return Ok(Solution::empty(SolveStatus::Infeasible));
    } else if head.contains("unbounded") {
        return Ok(Solution::empty(SolveStatus::Unbounded));
    } else if head.starts_with("stopped") {
        SolveStatus::Feasible
    } else {
        return Err(MilpError::Solver(format!("unrecognised CBC status line {head:?}")));
    };
    let mut sol = Solution::empty(status);
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().filter(|t| *t != "**").collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() < 3 {
            return Err(MilpError::Solver(format!("bad CBC solution line {line:?}")));
        }
        sol.values.insert(toks[1].to_string(), value(toks[2])?);
    }
    if status == SolveStatus::Feasible && sol.values.is_empty() {
        return Err(MilpError::Solver("CBC stopped without a solution".into()));
    }
    Ok(sol)
}

pub fn parse_highs_solution(text: &str) -> Result<Solution, MilpError> {
    let lines: Vec<&str> = text.lines().map(str::trim).collect();
    let at = lines
        .iter()
        .position(|l| *l == "Model status")
        .ok_or_else(|| MilpError::Solver("HiGHS solution file lacks a model status".into()))?;
    let st = lines.get(at + 1).copied().unwrap_or("").to_ascii_lowercase();
    let status = if st == "optimal" {
        SolveStatus::Optimal
    } else if st.contains("infeasible") {
        return Ok(Solution::empty(SolveStatus::Infeasible));
    } else if st.contains("unbounded") {
        return Ok(Solution::empty(SolveStatus::Unbounded));
    } else if st.contains("limit") {
        SolveStatus::Feasible
    } else {
        return Err(MilpError::Solver(format!("unrecognised HiGHS model status {st:?}")));
    };
    let mut sol = Solution::empty(status);
    let Some(cols) = lines.iter().position(|l| l.starts_with("# Columns")) else {
        if status == SolveStatus::Feasible {
            return Err(MilpError::Solver("HiGHS stopped without a solution".into()));
        }
        return Err(MilpError::Solver("HiGHS solution file lacks column values".into()));
    };
    let n: usize = lines[cols]["# Columns".len()..]
        .trim()
        .parse()
        .map_err(|_| MilpError::Solver(format!("bad column header {:?}", lines[cols])))?;
    for l in lines.iter().skip(cols + 1).take(n) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(MilpError::Solver(format!("bad HiGHS column line {l:?}")));
        }
        sol.values.insert(toks[0].to_string(), value(toks[1])?);
    }
    Ok(sol)
}
