use super::{CnfError, CnfFormula};

/// Strict DIMACS CNF reader.
///
/// Comment lines start with `c`. A line starting with `%` ends the input
/// (SATLIB convention). Clauses may span lines and must end with `0`.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut clause_start = 0usize;
    let mut last_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        last_line = line_no;
        if line.starts_with('p') {
            if header.is_some() {
                return Err(CnfError::Header {
                    line: line_no,
                    message: "second problem line".into(),
                });
            }
            header = Some(parse_header(line, line_no)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(CnfError::Header {
                line: line_no,
                message: "clause data before the `p cnf` line".into(),
            });
        };
        for token in line.split_whitespace() {
            let lit: i64 = token.parse().map_err(|_| CnfError::Syntax {
                line: line_no,
                message: format!("{token:?} is not an integer literal"),
            })?;
            if lit == 0 {
                super::validate_clause(&current, num_vars, clause_start)?;
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if current.is_empty() {
                clause_start = line_no;
            }
            if lit.unsigned_abs() as usize > num_vars {
                return Err(CnfError::LiteralOutOfRange {
                    line: line_no,
                    literal: lit,
                    num_vars,
                });
            }
            current.push(lit);
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(CnfError::Header {
            line: last_line.max(1),
            message: "missing `p cnf` line".into(),
        });
    };
    if !current.is_empty() {
        return Err(CnfError::Unterminated { line: clause_start });
    }
    if clauses.len() != num_clauses {
        return Err(CnfError::ClauseCount {
            expected: num_clauses,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula { num_vars, clauses })
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize), CnfError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let err = |message: &str| CnfError::Header {
        line: line_no,
        message: message.into(),
    };
    if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
        return Err(err("expected `p cnf <variables> <clauses>`"));
    }
    let n = fields[2]
        .parse()
        .map_err(|_| err("variable count is not a non-negative integer"))?;
    let m = fields[3]
        .parse()
        .map_err(|_| err("clause count is not a non-negative integer"))?;
    Ok((n, m))
}

pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars, formula.clauses.len());
    for clause in &formula.clauses {
        for lit in clause {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}
