//! Classification data: the eight toric Mori--Fano 3-folds from scratch,
//! verification of external simplex datasets, and the Diophantine search
//! for weighted point blowups of four-space.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Error;
use crate::extraction::{extraction_site, is_terminal_extraction};
use crate::fan::SimplexVariety;
use crate::format::parse_dataset_str;
use crate::lattice::{gcd, IntMat, IntVec};
use crate::link::{run_link, LinkRecord, LinkStatus, StepKind};
use crate::rat::Rat;
use crate::Result;

/// All terminal weighted projective spaces of the given dimension with
/// weight sum at most `max_sum`, ordered by (sum, weights).
pub fn terminal_wps(dim: usize, max_sum: i64) -> Vec<SimplexVariety> {
    let mut out = Vec::new();
    let mut weights = vec![1i64; dim + 1];
    search_weights(&mut weights, 0, max_sum, &mut |w| {
        if let Ok(x) = SimplexVariety::wps(w) {
            if x.is_terminal() {
                out.push(x);
            }
        }
    });
    out.sort_by_key(|x| (x.weights_sorted().iter().sum::<i64>(), x.weights_sorted()));
    out
}

fn search_weights(weights: &mut Vec<i64>, pos: usize, max_sum: i64, f: &mut impl FnMut(&[i64])) {
    if pos == weights.len() {
        f(weights);
        return;
    }
    let lo = if pos == 0 { 1 } else { weights[pos - 1] };
    let used: i64 = weights[..pos].iter().sum();
    let remaining_slots = (weights.len() - pos) as i64;
    let mut w = lo;
    while used + w * remaining_slots <= max_sum {
        weights[pos] = w;
        search_weights(weights, pos + 1, max_sum, f);
        w += 1;
    }
}

/// Upper-triangular Hermite bases of the sublattices of `Z^dim` of index
/// `m`; the duals of these are the degree-`m` superlattices.
fn hermite_sublattices(dim: usize, m: i64) -> Vec<IntMat> {
    let mut out = Vec::new();
    let mut diag = vec![1i64; dim];
    fn rec_diag(diag: &mut Vec<i64>, pos: usize, rest: i64, out: &mut Vec<Vec<i64>>) {
        if pos == diag.len() {
            if rest == 1 {
                out.push(diag.clone());
            }
            return;
        }
        let mut d = 1;
        while d <= rest {
            if rest % d == 0 {
                diag[pos] = d;
                rec_diag(diag, pos + 1, rest / d, out);
            }
            d += 1;
        }
    }
    let mut diags = Vec::new();
    rec_diag(&mut diag, 0, m, &mut diags);
    for d in diags {
        // entries above the diagonal range over residues mod the column pivot
        let mut offsets: Vec<(usize, usize)> = Vec::new();
        for j in 0..dim {
            for i in 0..j {
                offsets.push((i, j));
            }
        }
        let mut values = vec![0i64; offsets.len()];
        loop {
            let mut h = IntMat::zero(dim, dim);
            for i in 0..dim {
                h[(i, i)] = d[i];
            }
            for (k, &(i, j)) in offsets.iter().enumerate() {
                h[(i, j)] = values[k];
            }
            out.push(h);
            // advance mixed-radix counter, digit k ranging over 0..d[col]
            let mut k = 0;
            loop {
                if k == offsets.len() {
                    break;
                }
                values[k] += 1;
                if values[k] < d[offsets[k].1] {
                    break;
                }
                values[k] = 0;
                k += 1;
            }
            if k == offsets.len() {
                break;
            }
        }
    }
    out
}

/// Terminal fake quotients of a terminal weighted projective space, one per
/// normal-form class, for quotient orders `2..=max_order`.
fn terminal_quotients(x: &SimplexVariety, max_order: i64) -> Vec<SimplexVariety> {
    let dim = x.dim();
    let mut seen = BTreeMap::new();
    for m in 2..=max_order {
        for h in hermite_sublattices(dim, m) {
            // the sublattice is the row span of H, so its dual superlattice
            // has basis H^-1 and coordinate map y = H x
            let rays: Vec<IntVec> = x.fan().rays().iter().map(|r| h.mul_vec(r)).collect();
            if rays.iter().any(|r| !r.is_primitive()) {
                continue;
            }
            let Ok(q) = SimplexVariety::from_rays(rays) else {
                continue;
            };
            if !q.is_terminal() {
                continue;
            }
            seen.entry(q.key().clone()).or_insert(q);
        }
    }
    seen.into_values().collect()
}

/// Re-derivation of the toric Mori--Fano 3-folds: terminal weighted
/// projective 3-spaces plus their terminal finite quotients, deduped up to
/// lattice automorphism.  The weight-sum and quotient-order bounds are
/// generous for the known volume of terminal simplicial 3-topes.
pub fn classify_dim3() -> Vec<SimplexVariety> {
    let mut seen: BTreeMap<_, SimplexVariety> = BTreeMap::new();
    for x in terminal_wps(3, 25) {
        let sum: i64 = x.weights_sorted().iter().sum();
        for q in terminal_quotients(&x, 30 / sum) {
            seen.entry(q.key().clone()).or_insert(q);
        }
        seen.entry(x.key().clone()).or_insert(x);
    }
    let mut out: Vec<SimplexVariety> = seen.into_values().collect();
    out.sort_by_key(|x| (x.index(), x.weights_sorted()));
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DatasetReport {
    pub total: usize,
    pub valid: usize,
    pub wps: usize,
    pub fake: usize,
    /// Pairs of entry ordinals with equal normal forms.
    pub duplicates: Vec<(usize, usize)>,
    /// Per-entry failures: ordinal, message, optional witness point.
    pub failures: Vec<(usize, String, Option<IntVec>)>,
}

impl DatasetReport {
    pub fn ok(&self) -> bool {
        self.duplicates.is_empty() && self.failures.is_empty()
    }
}

/// Checks every entry of a dataset file: simplex, terminal, Fano, pairwise
/// distinct up to lattice automorphism.
pub fn verify_dataset(input: &str) -> Result<DatasetReport> {
    let entries = parse_dataset_str(input)?;
    let mut report = DatasetReport {
        total: entries.len(),
        ..DatasetReport::default()
    };
    let mut keys: BTreeMap<String, usize> = BTreeMap::new();
    for (ordinal, entry) in entries.into_iter().enumerate() {
        let line = entry.line;
        match entry.into_simplex() {
            Err(e) => report
                .failures
                .push((ordinal, format!("line {line}: {e}"), None)),
            Ok(x) => {
                if let Some((witness, _)) = x.fan().terminal_witness() {
                    report.failures.push((
                        ordinal,
                        format!("line {line}: not terminal"),
                        Some(witness),
                    ));
                    continue;
                }
                if !x.fan().is_fano() {
                    report
                        .failures
                        .push((ordinal, format!("line {line}: not Fano"), None));
                    continue;
                }
                report.valid += 1;
                if x.discriminant().is_empty() {
                    report.wps += 1;
                } else {
                    report.fake += 1;
                }
                if let Some(&first) = keys.get(&x.key().0) {
                    report.duplicates.push((first, ordinal));
                } else {
                    keys.insert(x.key().0.clone(), ordinal);
                }
            }
        }
    }
    Ok(report)
}

/// Loads a dataset strictly: every entry must be a terminal Fano simplex.
pub fn load_dataset(input: &str) -> Result<Vec<SimplexVariety>> {
    let entries = parse_dataset_str(input)?;
    entries
        .into_iter()
        .map(|e| {
            let line = e.line;
            let x = e.into_simplex()?;
            if !x.is_terminal() {
                return Err(Error::parse(line, "entry is not terminal"));
            }
            Ok(x)
        })
        .collect()
}

/// Outcome of one weighted point blowup of four-space.
#[derive(Clone, Debug, Serialize)]
pub struct P4SearchHit {
    /// `(d, a, b, c)` as in the search equations.
    pub tuple: [i64; 4],
    /// Sorted endpoint weights of the completed link.
    pub endpoint: Vec<i64>,
}

/// Solutions `(d, a, b, c)` of `a + b + c = 4d + 1` (first list) and
/// `a + b + c < 4d + 1` (second list) with `a, b, c >= d >= 1`, every three
/// of the four weights coprime, the `(a, b, c, d)`-blowup of four-space
/// terminal, and the resulting link genuinely starting with a flop
/// respectively a flip.  Blowups with every weight at most 5 fall inside
/// the standard enumeration bound and are excluded here: the search reports
/// the cases beyond it.
pub fn p4_weight_search(bound_abc: i64, bound_d: i64) -> (Vec<P4SearchHit>, Vec<P4SearchHit>) {
    let p4 = SimplexVariety::wps(&[1, 1, 1, 1, 1]).unwrap();
    let rays = p4.fan().rays().to_vec();
    let mut flops = Vec::new();
    let mut flips = Vec::new();
    for d in 1..=bound_d {
        for a in d..=bound_abc {
            for b in a..=bound_abc {
                for c in b..=bound_abc.min(4 * d + 1 - a - b) {
                    let sum = a + b + c;
                    let is_flop = sum == 4 * d + 1;
                    if sum > 4 * d + 1 {
                        continue;
                    }
                    let tuple = [d, a, b, c];
                    if a.max(b).max(c).max(d) <= 5 {
                        continue;
                    }
                    if !three_subsets_coprime(tuple) {
                        continue;
                    }
                    let point = rays[0]
                        .scaled(a)
                        .add(&rays[1].scaled(b))
                        .add(&rays[2].scaled(c))
                        .add(&rays[3].scaled(d));
                    if !point.is_primitive() || !is_terminal_extraction(&p4, &point) {
                        continue;
                    }
                    let site = extraction_site(&p4, &point).unwrap();
                    let record = run_link(&p4, &site);
                    if record.status != LinkStatus::Complete || record.steps.is_empty() {
                        continue;
                    }
                    let first = record.steps[0].kind;
                    let endpoint = endpoint_weights(&record);
                    if is_flop && first == StepKind::Flop {
                        flops.push(P4SearchHit { tuple, endpoint });
                    } else if !is_flop && first == StepKind::Flip {
                        flips.push(P4SearchHit { tuple, endpoint });
                    }
                }
            }
        }
    }
    (flops, flips)
}

fn endpoint_weights(record: &LinkRecord) -> Vec<i64> {
    match record.end_key() {
        Some(info) => info.weights.clone(),
        None => Vec::new(),
    }
}

fn three_subsets_coprime(t: [i64; 4]) -> bool {
    for omit in 0..4 {
        let g = (0..4)
            .filter(|&i| i != omit)
            .fold(0i64, |g, i| gcd(g, t[i]));
        if g != 1 {
            return false;
        }
    }
    true
}

/// Deterministic members of the terminal Mori--Fano 4-fold classification:
/// terminal weighted projective 4-spaces by increasing weight sum.
pub fn sample_terminal_4folds(count: usize) -> Vec<SimplexVariety> {
    let mut out = Vec::new();
    let mut bound = 10;
    while out.len() < count && bound <= 80 {
        out = terminal_wps(4, bound);
        bound += 10;
    }
    out.truncate(count);
    out
}

/// Link enumeration compatible wrapper used by the acceptance suite: all
/// extractions of `x` at the given bound, one record each.
pub fn links_with_dmax(x: &SimplexVariety, dmax: Rat, dedup: bool) -> Vec<LinkRecord> {
    crate::link::enumerate_links(
        x,
        &crate::link::WebConfig {
            dmax,
            symmetry_dedup: dedup,
            ..Default::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::variety_to_string;

    #[test]
    fn eight_threefolds() {
        let list = classify_dim3();
        assert_eq!(list.len(), 8);
        let profiles: Vec<(Vec<i64>, Vec<i64>)> = list
            .iter()
            .map(|x| (x.weights_sorted(), x.discriminant().to_vec()))
            .collect();
        let expected: Vec<(Vec<i64>, Vec<i64>)> = vec![
            (vec![1, 1, 1, 1], vec![]),
            (vec![1, 1, 1, 2], vec![]),
            (vec![1, 1, 2, 3], vec![]),
            (vec![1, 2, 3, 5], vec![]),
            (vec![1, 3, 4, 5], vec![]),
            (vec![2, 3, 5, 7], vec![]),
            (vec![3, 4, 5, 7], vec![]),
            (vec![1, 1, 1, 1], vec![5]),
        ];
        for want in &expected {
            assert!(profiles.contains(want), "missing profile {want:?}");
        }
        assert!(list.iter().all(|x| x.is_terminal()));
    }

    #[test]
    fn dataset_verification_flags_problems() {
        let mut text = String::new();
        let eight = classify_dim3();
        for x in &eight {
            text.push_str(&variety_to_string(x));
            text.push('\n');
        }
        let report = verify_dataset(&text).unwrap();
        assert_eq!(report.total, 8);
        assert!(report.ok());
        assert_eq!(report.wps, 7);
        assert_eq!(report.fake, 1);

        // duplicate one entry
        let mut dup = text.clone();
        dup.push_str(&variety_to_string(&eight[0]));
        let report = verify_dataset(&dup).unwrap();
        assert_eq!(report.duplicates, vec![(0, 8)]);

        // append a non-terminal simplex
        let mut bad = text;
        bad.push_str(&variety_to_string(
            &SimplexVariety::wps(&[1, 1, 4, 6]).unwrap(),
        ));
        let report = verify_dataset(&bad).unwrap();
        assert_eq!(report.failures.len(), 1);
        assert!(report.failures[0].2.is_some(), "witness box point recorded");
    }

    #[test]
    fn p4_search_reproduces_published_tuples() {
        let (flops, flips) = p4_weight_search(100, 100);
        let flop_tuples: Vec<[i64; 4]> = flops.iter().map(|h| h.tuple).collect();
        assert_eq!(
            flop_tuples,
            vec![
                [7, 8, 9, 12],
                [10, 11, 13, 17],
                [11, 12, 14, 19],
                [13, 14, 17, 22]
            ]
        );
        let (_, flips_small) = p4_weight_search(100, 50);
        let flip_tuples: Vec<[i64; 4]> = flips_small.iter().map(|h| h.tuple).collect();
        assert_eq!(
            flip_tuples,
            vec![[4, 4, 5, 7], [5, 5, 6, 8], [12, 13, 15, 20]]
        );
        let _ = flips;
    }

    #[test]
    fn p4_search_endpoints() {
        let (flops, flips) = p4_weight_search(100, 50);
        let endpoints: Vec<Vec<i64>> = flops.iter().map(|h| h.endpoint.clone()).collect();
        assert_eq!(
            endpoints,
            vec![
                vec![1, 3, 4, 5, 12],
                vec![1, 4, 6, 7, 17],
                vec![1, 5, 7, 8, 19],
                vec![1, 5, 8, 9, 22]
            ]
        );
        let endpoints: Vec<Vec<i64>> = flips.iter().map(|h| h.endpoint.clone()).collect();
        assert_eq!(
            endpoints,
            vec![
                vec![1, 2, 3, 3, 7],
                vec![1, 2, 3, 3, 8],
                vec![1, 5, 7, 8, 20]
            ]
        );
    }

    #[test]
    fn four_fold_samples_are_terminal() {
        let sample = sample_terminal_4folds(25);
        assert_eq!(sample.len(), 25);
        assert!(sample.iter().all(|x| x.is_terminal() && x.dim() == 4));
        // deterministic
        let again = sample_terminal_4folds(25);
        let keys: Vec<_> = sample.iter().map(|x| x.key().clone()).collect();
        let keys2: Vec<_> = again.iter().map(|x| x.key().clone()).collect();
        assert_eq!(keys, keys2);
    }
}
