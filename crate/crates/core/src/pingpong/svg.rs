//! Deterministic SVG rendering of a certified configuration.
//!
//! The picture is diagnostic, not part of any certificate: angles are
//! evaluated at a fixed precision with a couple of refinement attempts and
//! an element whose position stays unresolved is skipped rather than
//! guessed. Equal inputs render byte for byte equal documents.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::words::{enumerate_words, SKind};

use super::geometry::Geometry;
use super::points::AnglePos;
use super::PingPongConfig;

const SIZE: f64 = 1024.0;
const CX: f64 = 512.0;
const CY: f64 = 512.0;
const R_CIRCLE: f64 = 400.0;
const R_CHAIN: f64 = 372.0;

const COLOR_CONJ_FWD: &str = "#1f6fb4";
const COLOR_CONJ_INV: &str = "#17becf";
const COLOR_HCONJ_FWD: &str = "#d62728";
const COLOR_HCONJ_INV: &str = "#ff9896";
const COLOR_CHAIN: &str = "#b8b8b8";
const COLOR_COSET: &str = "#2ca02c";
const COLOR_ORBIT: &str = "#6b6b6b";
const COLOR_FIXED: &str = "#000000";

fn angle_f64(geom: &Geometry, pos: &AnglePos, prec: u32) -> Option<f64> {
    for p in [prec, 2 * prec, 4 * prec] {
        if let Ok(ball) = geom.eval(pos, p) {
            return ball.midpoint().to_f64();
        }
    }
    None
}

fn xy(theta: f64, r: f64) -> (f64, f64) {
    let t = std::f64::consts::TAU * theta;
    (CX + r * t.cos(), CY - r * t.sin())
}

/// Circular arc from `a` to `b` counterclockwise at radius `r`. The screen
/// y axis points down, so counterclockwise on the circle is sweep 0.
fn arc_path(a: f64, b: f64, r: f64) -> String {
    let span = (b - a).rem_euclid(1.0);
    let large = if span > 0.5 { 1 } else { 0 };
    let (x1, y1) = xy(a, r);
    let (x2, y2) = xy(b, r);
    format!("M {x1:.4} {y1:.4} A {r:.4} {r:.4} 0 {large} 0 {x2:.4} {y2:.4}")
}

fn dot(out: &mut String, theta: f64, r: f64, radius: f64, fill: &str, title: &str) {
    let (x, y) = xy(theta, r);
    let _ = writeln!(
        out,
        "  <circle cx=\"{x:.4}\" cy=\"{y:.4}\" r=\"{radius:.4}\" fill=\"{fill}\"><title>{title}</title></circle>"
    );
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(cfg: &PingPongConfig, orbit_count: usize) -> String {
    let geom = cfg.geometry();
    let prec = geom.ladder().start.max(64);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(out, "  <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        out,
        "  <circle cx=\"{CX}\" cy=\"{CY}\" r=\"{R_CIRCLE}\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\"/>"
    );

    for arc in super::chain::chain_arcs(geom) {
        let (Some(a), Some(b)) = (
            angle_f64(geom, &arc.arc.lo, prec),
            angle_f64(geom, &arc.arc.hi, prec),
        ) else {
            continue;
        };
        let _ = writeln!(
            out,
            "  <path d=\"{}\" fill=\"none\" stroke=\"{COLOR_CHAIN}\" stroke-width=\"10\" stroke-linecap=\"butt\"><title>chain {}</title></path>",
            arc_path(a, b, R_CHAIN),
            esc(&arc.name),
        );
    }

    for d in &cfg.family().domains {
        let color = match (&cfg.sgens()[d.sgen].kind, d.inverse) {
            (SKind::Conj { .. }, false) => COLOR_CONJ_FWD,
            (SKind::Conj { .. }, true) => COLOR_CONJ_INV,
            (SKind::HConj { .. }, false) => COLOR_HCONJ_FWD,
            (SKind::HConj { .. }, true) => COLOR_HCONJ_INV,
        };
        let (Some(a), Some(b)) = (
            angle_f64(geom, &d.arc.lo, prec),
            angle_f64(geom, &d.arc.hi, prec),
        ) else {
            continue;
        };
        let label = format!(
            "D(s{}{}) = {}",
            d.sgen,
            if d.inverse { "^-1" } else { "" },
            cfg.sgens()[d.sgen].word,
        );
        let _ = writeln!(
            out,
            "  <path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"14\" stroke-linecap=\"butt\" stroke-opacity=\"0.9\"><title>{}</title></path>",
            arc_path(a, b, R_CIRCLE),
            esc(&label),
        );
    }

    for (att, name) in [(true, "attracting"), (false, "repelling")] {
        if let Some(t) = angle_f64(geom, &AnglePos::alpha_end(att), prec) {
            let (x1, y1) = xy(t, R_CIRCLE - 14.0);
            let (x2, y2) = xy(t, R_CIRCLE + 14.0);
            let _ = writeln!(
                out,
                "  <line x1=\"{x1:.4}\" y1=\"{y1:.4}\" x2=\"{x2:.4}\" y2=\"{y2:.4}\" stroke=\"{COLOR_FIXED}\" stroke-width=\"2\"><title>{name} fixed point</title></line>"
            );
        }
    }

    for (ci, w) in cfg.coset_words().iter().enumerate() {
        let p = AnglePos::image(w, cfg.basepoint().clone());
        if let Some(t) = angle_f64(geom, &p, prec) {
            let label = if ci == cfg.identity_coset() {
                "basepoint".to_string()
            } else {
                format!("coset {w}")
            };
            dot(&mut out, t, R_CIRCLE, 5.0, COLOR_COSET, &esc(&label));
        }
    }

    for w in enumerate_words(cfg.spec(), orbit_count) {
        if w.is_identity() {
            continue;
        }
        let p = AnglePos::image(&w, cfg.basepoint().clone());
        if let Some(t) = angle_f64(geom, &p, prec) {
            dot(&mut out, t, R_CIRCLE, 2.5, COLOR_ORBIT, &esc(&format!("{w}")));
        }
    }

    out.push_str("</svg>\n");
    out
}
