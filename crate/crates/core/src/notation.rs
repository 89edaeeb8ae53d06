//! Display strings for blowups, wall relations and link endpoints.
//!
//! Threefold maps use the table abbreviation `1/r(a,b,c)` (the fraction
//! omitted when `r = 1`, zeros padding a low-dimensional centre); fourfolds
//! and above use the centre-prefix form `[a_0,...,a_d](-r,b_1,...,b_k)`.

use crate::extraction::ExtractionSite;
use crate::fan::VarietyInfo;
use crate::lattice::IntVec;

/// Blowup notation for an extraction (or, read backwards, a blowdown).
pub fn blowup_notation(dim: usize, site: &ExtractionSite) -> String {
    let mut coeffs = site.coeffs.clone();
    coeffs.sort_unstable();
    if dim == 3 {
        while coeffs.len() < 3 {
            coeffs.push(0);
        }
        let body: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
        if site.r == 1 {
            format!("({})", body.join(","))
        } else {
            format!("1/{}({})", site.r, body.join(","))
        }
    } else {
        let prefix: Vec<String> = site.centre_weights.iter().map(|c| c.to_string()).collect();
        let mut rel = vec![(-site.r).to_string()];
        rel.extend(coeffs.iter().map(|c| c.to_string()));
        format!("[{}]({})", prefix.join(","), rel.join(","))
    }
}

/// Wall relation written over the `n + 1` rays of its amalgam: positive
/// entries descending, zeros for the spectators inside the amalgam, then
/// negative entries by increasing magnitude.
pub fn relation_notation(relation: &IntVec, dim: usize) -> String {
    let mut entries: Vec<i64> = relation.0.iter().copied().filter(|&x| x != 0).collect();
    while entries.len() < dim + 1 {
        entries.push(0);
    }
    entries.sort_by_key(|&x| {
        if x > 0 {
            (0, -x)
        } else if x == 0 {
            (1, 0)
        } else {
            (2, -x)
        }
    });
    let body: Vec<String> = entries.iter().map(|c| c.to_string()).collect();
    format!("({})", body.join(","))
}

/// `fibre / base` for a Mori fibre space ending.
pub fn mfs_notation(fibre: &VarietyInfo, base: &VarietyInfo) -> String {
    format!("{} / {}", fibre.name(), base.name())
}

/// One-line human-readable form of a link record.
pub fn pretty_record(record: &crate::link::LinkRecord) -> String {
    use crate::link::{EndRecord, LinkStatus};
    let mut s = format!("{} --{}-->", record.start_name, record.extraction.notation);
    for step in &record.steps {
        let kind = match step.kind {
            crate::link::StepKind::Flip => "flip",
            crate::link::StepKind::Flop => "flop",
            crate::link::StepKind::Antiflip => "antiflip",
        };
        s.push_str(&format!(" {kind} {} -->", step.display));
    }
    match (&record.end, record.status) {
        (
            Some(EndRecord::Divisorial {
                target, notation, ..
            }),
            _,
        ) => {
            s.push_str(&format!(" blowdown {notation} --> {}", target.name()));
        }
        (Some(EndRecord::Mfs { display, .. }), _) => {
            s.push_str(&format!(" Mfs {display}"));
        }
        (None, _) => s.push_str(" (no end)"),
    }
    match record.status {
        LinkStatus::Complete => {}
        LinkStatus::BadAntiflip => s.push_str("   [bad: non-terminal after antiflip]"),
        LinkStatus::BadEndpoint => s.push_str("   [bad: non-terminal endpoint]"),
    }
    if let Some(inv) = record.inverse_of {
        s.push_str(&format!("   [inverse of #{inv}]"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::extraction_site;
    use crate::fan::SimplexVariety;
    use crate::rat::Rat;

    #[test]
    fn threefold_blowups() {
        let x = SimplexVariety::wps(&[1, 1, 1, 1]).unwrap();
        let rays = x.fan().rays().to_vec();
        let line = rays[0].add(&rays[1]);
        let site = extraction_site(&x, &line).unwrap();
        assert_eq!(blowup_notation(3, &site), "(1,1,0)");

        let weighted = rays[0].add(&rays[1].scaled(2)).add(&rays[2].scaled(3));
        let site = extraction_site(&x, &weighted).unwrap();
        assert_eq!(blowup_notation(3, &site), "(1,2,3)");

        let q = SimplexVariety::wps(&[1, 2, 3, 5]).unwrap();
        let kawamata = crate::extraction::candidate_points(&q, Rat::new(1, 5), false)
            .into_iter()
            .next()
            .unwrap();
        assert_eq!(blowup_notation(3, &kawamata), "1/5(1,2,3)");
    }

    #[test]
    fn fourfold_blowups() {
        let x = SimplexVariety::wps(&[1, 1, 1, 1, 1]).unwrap();
        let rays = x.fan().rays().to_vec();
        let pt = rays[0].add(&rays[1]).add(&rays[2]).add(&rays[3].scaled(2));
        let site = extraction_site(&x, &pt).unwrap();
        assert_eq!(blowup_notation(4, &site), "[1](-1,1,1,1,2)");

        let x = SimplexVariety::wps(&[1, 1, 1, 2, 2]).unwrap();
        let rays = x.fan().rays().to_vec();
        let (half, _) = rays[0]
            .add(&rays[1])
            .add(&rays[2])
            .primitive_part()
            .unwrap();
        let site = extraction_site(&x, &half).unwrap();
        assert_eq!(blowup_notation(4, &site), "[2,2](-2,1,1,1)");
    }

    #[test]
    fn relation_ordering() {
        assert_eq!(
            relation_notation(&IntVec(vec![-1, 0, 1, -2, 5]), 3),
            "(5,1,-1,-2)"
        );
        assert_eq!(
            relation_notation(&IntVec(vec![2, 1, 0, -1, -1, 0]), 4),
            "(2,1,0,-1,-1)"
        );
        assert_eq!(
            relation_notation(&IntVec(vec![6, -34, 1, -7, 65, 0]), 4),
            "(65,6,1,-7,-34)"
        );
    }
}
