//! The polytope/fan text format and dataset files.
//!
//! One entry is
//!
//! ```text
//! # optional comments
//! n k
//! x_1 ... x_n        (k ray lines)
//! C i1 ... in        (optional top-cone lines, 0-based ray indices)
//! ```
//!
//! Without cone lines the entry must have `k = n + 1` rays and denotes the
//! spanning fan of the simplex.  Dataset files hold several entries
//! separated by blank lines.

use crate::error::Error;
use crate::fan::{Cone, Fan, SimplexVariety};
use crate::lattice::IntVec;
use crate::Result;

#[derive(Clone, Debug)]
pub struct FanFile {
    pub rays: Vec<IntVec>,
    pub cones: Option<Vec<Cone>>,
    /// 1-based line number of the entry header.
    pub line: usize,
}

impl FanFile {
    pub fn into_fan(self) -> Result<Fan> {
        match self.cones {
            Some(cones) => Fan::new(self.rays, cones),
            None => Fan::simplex(self.rays),
        }
    }

    pub fn into_simplex(self) -> Result<SimplexVariety> {
        if self.cones.is_some() {
            return Err(Error::parse(
                self.line,
                "expected a simplex entry without cone lines",
            ));
        }
        SimplexVariety::from_rays(self.rays)
    }
}

fn is_comment(line: &str) -> bool {
    line.trim_start().starts_with('#')
}

/// Parses one entry; the input must contain exactly one.
pub fn parse_fan_str(input: &str) -> Result<FanFile> {
    let mut entries = parse_dataset_str(input)?;
    match entries.len() {
        0 => Err(Error::parse(1, "empty input")),
        1 => Ok(entries.pop().unwrap()),
        n => Err(Error::parse(1, format!("expected one entry, found {n}"))),
    }
}

/// Parses a dataset: entries separated by blank lines.
pub fn parse_dataset_str(input: &str) -> Result<Vec<FanFile>> {
    let mut out = Vec::new();
    let mut lines = input.lines().enumerate().peekable();
    while let Some(&(idx, line)) = lines.peek() {
        if line.trim().is_empty() || is_comment(line) {
            lines.next();
            continue;
        }
        let lineno = idx + 1;
        let header: Vec<&str> = line.split_whitespace().collect();
        lines.next();
        if header.len() != 2 {
            return Err(Error::parse(lineno, "entry header must be `n k`"));
        }
        let n: usize = header[0]
            .parse()
            .map_err(|_| Error::parse(lineno, "bad dimension in header"))?;
        let k: usize = header[1]
            .parse()
            .map_err(|_| Error::parse(lineno, "bad ray count in header"))?;
        if n == 0 || n > 5 {
            return Err(Error::parse(lineno, "dimension must be between 1 and 5"));
        }
        let mut rays = Vec::with_capacity(k);
        while rays.len() < k {
            let Some((ridx, rline)) = lines.next() else {
                return Err(Error::parse(lineno, format!("expected {k} ray lines")));
            };
            if rline.trim().is_empty() {
                return Err(Error::parse(
                    ridx + 1,
                    "unexpected blank line inside an entry",
                ));
            }
            if is_comment(rline) {
                continue;
            }
            let coords: Vec<i64> = rline
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| Error::parse(ridx + 1, format!("bad integer `{t}`")))
                })
                .collect::<Result<_>>()?;
            if coords.len() != n {
                return Err(Error::parse(ridx + 1, format!("expected {n} coordinates")));
            }
            rays.push(IntVec(coords));
        }
        let mut cones = Vec::new();
        while let Some(&(cidx, cline)) = lines.peek() {
            let trimmed = cline.trim();
            if trimmed.is_empty() {
                break;
            }
            if is_comment(cline) {
                lines.next();
                continue;
            }
            if !trimmed.starts_with('C') {
                break;
            }
            lines.next();
            let idxs: Vec<usize> = trimmed[1..]
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(cidx + 1, format!("bad ray index `{t}`")))
                })
                .collect::<Result<_>>()?;
            for &i in &idxs {
                if i >= k {
                    return Err(Error::parse(
                        cidx + 1,
                        format!("ray index {i} out of range"),
                    ));
                }
            }
            cones.push(Cone::new(idxs));
        }
        if cones.is_empty() && k != n + 1 {
            return Err(Error::parse(
                lineno,
                format!(
                    "an entry without cone lines must be a simplex ({} rays), got {k}",
                    n + 1
                ),
            ));
        }
        out.push(FanFile {
            rays,
            cones: (!cones.is_empty()).then_some(cones),
            line: lineno,
        });
    }
    Ok(out)
}

pub fn fan_to_string(fan: &Fan) -> String {
    let n = fan.dim();
    let k = fan.rays().len();
    let mut s = format!("{n} {k}\n");
    for r in fan.rays() {
        let coords: Vec<String> = r.0.iter().map(|c| c.to_string()).collect();
        s.push_str(&coords.join(" "));
        s.push('\n');
    }
    // simplex spanning fans are implied by the ray count
    if k != n + 1 {
        for c in fan.cones() {
            let idxs: Vec<String> = c.rays.iter().map(|i| i.to_string()).collect();
            s.push_str(&format!("C {}\n", idxs.join(" ")));
        }
    }
    s
}

pub fn variety_to_string(x: &SimplexVariety) -> String {
    fan_to_string(x.fan())
}

/// Converter for vertex-matrix exports in bracket notation, e.g.
/// `[[0,1,1],[-1,0,-2],[-1,-2,1],[2,1,0]]`, one configuration per line.
pub fn parse_vertex_matrices(input: &str) -> Result<Vec<Vec<IntVec>>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut rays = Vec::new();
        let mut depth = 0usize;
        let mut current = String::new();
        for ch in line.chars() {
            match ch {
                '[' | '(' => {
                    depth += 1;
                    if depth == 2 {
                        current.clear();
                    }
                }
                ']' | ')' => {
                    if depth == 2 {
                        let coords: Vec<i64> = current
                            .split(',')
                            .map(|t| {
                                t.trim().parse::<i64>().map_err(|_| {
                                    Error::parse(idx + 1, format!("bad integer `{}`", t.trim()))
                                })
                            })
                            .collect::<Result<_>>()?;
                        rays.push(IntVec(coords));
                    }
                    depth = depth.saturating_sub(1);
                }
                _ if depth == 2 => current.push(ch),
                _ => {}
            }
        }
        if rays.is_empty() {
            return Err(Error::parse(idx + 1, "no vertex matrix on line"));
        }
        let n = rays[0].dim();
        if rays.iter().any(|r| r.dim() != n) {
            return Err(Error::parse(idx + 1, "ragged vertex matrix"));
        }
        out.push(rays);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_entry_round_trip() {
        let text = "3 4\n0 1 1\n-1 0 -2\n-1 -2 1\n2 1 0\n";
        let entry = parse_fan_str(text).unwrap();
        let x = entry.into_simplex().unwrap();
        assert_eq!(x.weights_sorted(), vec![1, 1, 1, 1]);
        assert_eq!(x.discriminant(), &[5]);
        assert_eq!(variety_to_string(&x), text);
    }

    #[test]
    fn fan_entry_with_cones() {
        let text = "2 4\n1 0\n0 1\n-1 0\n0 -1\nC 0 1\nC 1 2\nC 2 3\nC 0 3\n";
        let fan = parse_fan_str(text).unwrap().into_fan().unwrap();
        assert_eq!(fan.cones().len(), 4);
        assert_eq!(fan_to_string(&fan), text);
    }

    #[test]
    fn dataset_with_blank_separators() {
        let text = "# two simplices\n2 3\n1 0\n0 1\n-1 -1\n\n3 4\n1 0 0\n0 1 0\n0 0 1\n-1 -1 -1\n";
        let entries = parse_dataset_str(text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].line, 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_fan_str("3 4\n1 0 0\n0 1 zz 0\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "got: {err}");
        assert!(parse_fan_str("").is_err());
        let err = parse_fan_str("3 3\n1 0 0\n0 1 0\n0 0 1\n").unwrap_err();
        assert!(err.to_string().contains("simplex"), "got: {err}");
    }

    #[test]
    fn vertex_matrix_converter() {
        let text = "[[0,1,1],[-1,0,-2],[-1,-2,1],[2,1,0]]\n[(1,0),(0,1),(-1,-1)]\n";
        let ms = parse_vertex_matrices(text).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].len(), 4);
        assert_eq!(ms[1][2], IntVec(vec![-1, -1]));
    }
}
