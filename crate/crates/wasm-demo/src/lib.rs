//! Browser bindings: paste a fan, inspect it, enumerate its Sarkisov links,
//! and watch a link deform the shed step by step.
//!
//! Build with `wasm-pack build crates/wasm-demo --target web` and open
//! `crates/wasm-demo/www/index.html`.

use wasm_bindgen::prelude::*;

use toric_sarkisov::extraction::{extraction_site, is_terminal_extraction};
use toric_sarkisov::fan::{Fan, SimplexVariety};
use toric_sarkisov::format::parse_fan_str;
use toric_sarkisov::lattice::IntVec;
use toric_sarkisov::link::{enumerate_links, pair_inverses, WebConfig};
use toric_sarkisov::notation::{blowup_notation, pretty_record};
use toric_sarkisov::rat::Rat;
use toric_sarkisov::svg::shed_svg;
use toric_sarkisov::two_ray::{CrossingKind, RankTwoModel};

fn simplex_of(input: &str) -> Result<SimplexVariety, String> {
    parse_fan_str(input)
        .and_then(|f| f.into_simplex())
        .map_err(|e| e.to_string())
}

fn check_inner(input: &str) -> Result<String, String> {
    let x = simplex_of(input)?;
    let mut out = format!("{}\n", x.info().name());
    out.push_str(&format!("terminal: {}\n", x.is_terminal()));
    out.push_str(&format!("canonical: {}\n", x.fan().is_canonical()));
    out.push_str(&format!("Fano: {}\n", x.fan().is_fano()));
    out.push_str(&format!("normal form: {}\n", x.key()));
    if let Ok(g) = toric_sarkisov::fan::gorenstein_data(x.fan().rays()) {
        out.push_str(&format!(
            "anticanonical degree: {}   h0(-K): {}\n",
            g.degree, g.h0
        ));
    }
    Ok(out)
}

fn links_inner(input: &str, dmax: &str) -> Result<String, String> {
    let x = simplex_of(input)?;
    if !x.is_terminal() {
        return Err("variety is not terminal".into());
    }
    let dmax: Rat = dmax.parse()?;
    let config = WebConfig {
        dmax,
        symmetry_dedup: true,
        ..WebConfig::default()
    };
    let mut records = enumerate_links(&x, &config);
    for (i, r) in records.iter_mut().enumerate() {
        r.id = Some(i as u64);
    }
    pair_inverses(&mut records);
    let mut out = String::new();
    for r in &records {
        out.push_str(&pretty_record(r));
        out.push('\n');
    }
    out.push_str(&format!(
        "\n{} records, {} complete\n",
        records.len(),
        records.iter().filter(|r| r.is_complete()).count()
    ));
    Ok(out)
}

fn parse_point(s: &str, dim: usize) -> Result<IntVec, String> {
    let coords: Vec<i64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad point `{s}`"))
        })
        .collect::<Result<_, _>>()?;
    if coords.len() != dim {
        return Err(format!("point must have {dim} coordinates"));
    }
    Ok(IntVec(coords))
}

/// The fans a link passes through: the start, each model of the two-ray
/// game, and the endpoint when the link closes with a contraction.
fn link_fans(x: &SimplexVariety, point: &IntVec) -> Result<(Vec<String>, Vec<Fan>), String> {
    if !is_terminal_extraction(x, point) {
        return Err(format!("{point} is not a terminal extraction"));
    }
    let site = extraction_site(x, point).map_err(|e| e.to_string())?;
    let mut labels = vec![format!("X = {}", x.info().name())];
    let mut fans = vec![x.fan().clone()];
    let fan = x.fan().star_subdivide(point).map_err(|e| e.to_string())?;
    let mut model = RankTwoModel::new(fan, &site.model_relation(x.fan().rays().len()))
        .map_err(|e| e.to_string())?;
    labels.push(format!("Y1: blowup {}", blowup_notation(x.dim(), &site)));
    fans.push(model.fan().clone());
    let mut stage = 1;
    loop {
        let out = model.outgoing().clone();
        match out.kind {
            CrossingKind::Flip | CrossingKind::Flop | CrossingKind::Antiflip => {
                let next = model.cross_small(&out).map_err(|e| e.to_string())?;
                stage += 1;
                labels.push(format!("Y{stage}: after {}", out.kind));
                fans.push(next.fan().clone());
                if !next.fan().is_terminal() {
                    labels
                        .last_mut()
                        .unwrap()
                        .push_str(" (not terminal: bad link)");
                    return Ok((labels, fans));
                }
                model = next;
            }
            CrossingKind::Divisorial => {
                let (target, _) = model.contract_divisor(&out).map_err(|e| e.to_string())?;
                labels.push(format!("X' = {}", target.info().name()));
                fans.push(target.fan().clone());
                return Ok((labels, fans));
            }
            CrossingKind::Fibration => {
                let (fibre, base) = model.fibration_data(&out).map_err(|e| e.to_string())?;
                labels.push(format!(
                    "Mori fibre space {} / {}",
                    fibre.info().name(),
                    base.info().name()
                ));
                return Ok((labels, fans));
            }
        }
    }
}

fn sheds_inner(input: &str, point: &str) -> Result<Vec<String>, String> {
    let x = simplex_of(input)?;
    if x.dim() != 3 {
        return Err("shed pictures need a 3-dimensional fan".into());
    }
    let v = parse_point(point, x.dim())?;
    let (labels, fans) = link_fans(&x, &v)?;
    let mut out = Vec::with_capacity(fans.len());
    for (label, fan) in labels.iter().zip(&fans) {
        let svg = shed_svg(fan).map_err(|e| e.to_string())?;
        out.push(format!(
            "<figure><figcaption>{label}</figcaption>{svg}</figure>"
        ));
    }
    if labels.len() > fans.len() {
        out.push(format!(
            "<figure><figcaption>{}</figcaption></figure>",
            labels.last().unwrap()
        ));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn check(input: &str) -> Result<String, String> {
    check_inner(input)
}

#[wasm_bindgen]
pub fn links(input: &str, dmax: &str) -> Result<String, String> {
    links_inner(input, dmax)
}

/// HTML figures (caption + inline SVG), one per stage of the link.
#[wasm_bindgen]
pub fn link_sheds(input: &str, point: &str) -> Result<Vec<String>, String> {
    sheds_inner(input, point)
}
