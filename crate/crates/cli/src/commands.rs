//! Subcommand bodies. Each returns a `Report`; check failures become FAIL
//! claims inside the report (exit 1 at the top level), while malformed
//! input surfaces as `CliError` before any report exists.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use cyclorder::sampling::{random_hat_words, random_quadruples};
use cyclorder::words::{Word, WordError};
use cyclorder::{
    build_configuration, search_valid_d, CertError, CoverDatum, HatWord, LeftOrderHandle,
    OrderHandle, PingPongConfig, PingPongError,
};

use crate::report::{Report, Status};
use crate::{CliError, Ctx};

fn build(ctx: &Ctx) -> Result<Arc<PingPongConfig>, CliError> {
    build_configuration(&ctx.spec, ctx.params.clone())
        .map(Arc::new)
        .map_err(|e| CliError::Check(format!("configuration failed to certify: {e}")))
}

/// The cover datum for degree `d`, which must be `M a + 1` and coprime to
/// its winding count.
fn datum_for(ctx: &Ctx, d: u64) -> Result<CoverDatum, CliError> {
    let m: u64 = ctx.spec.m_slice().iter().map(|&v| v as u64).product();
    if d == 0 || (d - 1) % m != 0 {
        return Err(CliError::Input(format!("degree {d} is not of the form M*a + 1 with M = {m}")));
    }
    CoverDatum::new(&ctx.spec, (d - 1) / m).map_err(|e| CliError::Input(e.to_string()))
}

fn handle(ctx: &Ctx, cfg: Arc<PingPongConfig>) -> Result<OrderHandle, CliError> {
    let datum = datum_for(ctx, ctx.d.unwrap_or(1))?;
    OrderHandle::new(cfg, datum).map_err(|e| CliError::Check(e.to_string()))
}

/// Joins the argument tokens back together and splits on ';', so both
/// quoted and bare invocations yield the same word texts.
fn split_words(tokens: &[String], expect: usize) -> Result<Vec<String>, CliError> {
    let joined = tokens.join(" ");
    let parts: Vec<String> =
        joined.split(';').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect();
    if parts.len() != expect {
        return Err(CliError::Input(format!(
            "expected {expect} words separated by ';', got {}",
            parts.len()
        )));
    }
    Ok(parts)
}

fn value_str(v: i8) -> &'static str {
    match v {
        1 => "+1",
        -1 => "-1",
        _ => "0",
    }
}

fn degree_line(rep: &mut Report, ctx: &Ctx) {
    rep.push("degree", format!("d = {}", ctx.d.unwrap_or(1)), Status::Symbolic);
}

pub fn verify(ctx: &Ctx) -> Result<Report, CliError> {
    let mut rep = Report::new("verify");
    rep.push("group", ctx.spec.to_string(), Status::Symbolic);
    let cfg = match build_configuration(&ctx.spec, ctx.params.clone()) {
        Ok(cfg) => Arc::new(cfg),
        Err(e) => {
            let status = match e {
                PingPongError::CheckFailed { .. } => Status::Certified,
                _ => Status::Inconclusive,
            };
            rep.fail("certification", e.to_string(), status);
            return Ok(rep);
        }
    };
    let cert = cfg.cert();
    let ok = |rep: &mut Report, name, value: String, status, pass| {
        if pass {
            rep.push(name, value, status);
        } else {
            rep.fail(name, value, status);
        }
    };
    ok(
        &mut rep,
        "transitions",
        format!(
            "{} word identities, boundary chain closes through the monodromy",
            cert.transitions.entries.len()
        ),
        Status::Symbolic,
        cert.transitions.pass(),
    );
    ok(
        &mut rep,
        "chain",
        format!("{} arcs monotone, monodromy hyperbolic", cert.chain.arc_count),
        Status::Certified,
        cert.chain.pass(),
    );
    ok(
        &mut rep,
        "intersections",
        format!("{} arc pairs disjoint", cert.intersections.total_pairs()),
        Status::Certified,
        cert.intersections.pass(),
    );
    ok(
        &mut rep,
        "domains",
        format!(
            "{} attracting arcs at margin {}, inclusions exact",
            cert.domain_count, cert.epsilon
        ),
        Status::Certified,
        cert.formal_ok && cert.containments_ok,
    );
    rep.push(
        "precision",
        format!("ladder {}..{} bits", cert.params.ladder.start, cert.params.ladder.cap),
        Status::Symbolic,
    );

    if let Some(d) = ctx.d {
        let datum = datum_for(ctx, d)?;
        rep.push(
            "cover",
            format!("d = {}, indices {}, rotAlpha = {}", d, indices_str(&datum), datum.rot_alpha()),
            Status::Symbolic,
        );
        match OrderHandle::new(cfg, datum) {
            Ok(h) => {
                let lp = h.linear_part().map_err(|e| CliError::Check(e.to_string()))?;
                ok(
                    &mut rep,
                    "gap orbit",
                    format!(
                        "step {} generates Z_{}, {} copies displaced",
                        lp.orbit.step,
                        d,
                        d - 1
                    ),
                    Status::Certified,
                    lp.pass(),
                );
                let rot = h
                    .lift()
                    .alpha_rotation_certificate(50)
                    .map_err(|e| CliError::Check(e.to_string()))?;
                ok(
                    &mut rep,
                    "rotation",
                    format!(
                        "translation {} over {} iterates, cover rotation {}",
                        rot.translation, rot.iterates, rot.cover_rotation
                    ),
                    Status::Certified,
                    rot.translation == BigRational::from(BigInt::from(h.datum().winding())),
                );
            }
            Err(e) => rep.fail("cover lift", e.to_string(), Status::Certified),
        }
    }
    Ok(rep)
}

fn indices_str(datum: &CoverDatum) -> String {
    if datum.a() == 0 {
        return "()".into();
    }
    let parts: Vec<String> = datum.lift_indices().iter().map(|i| i.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn eval(ctx: &Ctx, tokens: &[String]) -> Result<Report, CliError> {
    let texts = split_words(tokens, 3)?;
    let words: Vec<Word> =
        texts.iter().map(|t| Word::parse(&ctx.spec, t)).collect::<Result<_, WordError>>()?;
    let mut rep = Report::new("eval");
    rep.push("group", ctx.spec.to_string(), Status::Symbolic);
    degree_line(&mut rep, ctx);
    let h = handle(ctx, build(ctx)?)?;
    let name = format!("c({}, {}, {})", words[0], words[1], words[2]);
    match h.eval_c(&words[0], &words[1], &words[2]) {
        Ok(v) => {
            // zero is decided by word equality alone, never by arithmetic
            let status = if v == 0 { Status::Symbolic } else { Status::Certified };
            rep.push(&name, format!("= {}", value_str(v)), status);
        }
        Err(e @ CertError::Inconclusive { .. }) => {
            rep.fail(&name, e.to_string(), Status::Inconclusive);
        }
    }
    Ok(rep)
}

pub fn axioms(ctx: &Ctx, samples: usize) -> Result<Report, CliError> {
    let mut rep = Report::new("axioms");
    rep.push("group", ctx.spec.to_string(), Status::Symbolic);
    degree_line(&mut rep, ctx);
    rep.push(
        "samples",
        format!("{samples} quadruples, words <= 12 syllables, seed {}", ctx.seed),
        Status::Symbolic,
    );
    let h = handle(ctx, build(ctx)?)?;
    let quads = random_quadruples(&ctx.spec, samples, 12, ctx.seed);
    let report = h.check_axioms(&quads);
    if report.inconclusive.is_empty() {
        rep.push("conclusive", format!("{} of {samples}", report.conclusive), Status::Certified);
    } else {
        rep.fail(
            "conclusive",
            format!("{} of {samples} stuck at the precision cap", report.inconclusive.len()),
            Status::Inconclusive,
        );
    }
    for v in report.violations.iter().take(5) {
        rep.fail("violation", v.clone(), Status::Certified);
    }
    let line = format!("{} violations", report.violations.len());
    if report.violations.is_empty() {
        rep.push("summary", line, Status::Certified);
    } else {
        rep.fail("summary", line, Status::Certified);
    }
    Ok(rep)
}

pub fn search_d(ctx: &Ctx, count: usize, a_cap: u64) -> Result<Report, CliError> {
    let mut rep = Report::new("search-d");
    rep.push("group", ctx.spec.to_string(), Status::Symbolic);
    match search_valid_d(&ctx.spec, count, a_cap) {
        Ok(data) => {
            for datum in &data {
                rep.push(
                    &format!("d = {}", datum.degree()),
                    format!(
                        "a = {}, indices {}, rotAlpha = {}",
                        datum.a(),
                        indices_str(datum),
                        datum.rot_alpha()
                    ),
                    Status::Symbolic,
                );
            }
        }
        Err(e) => rep.fail("search", e.to_string(), Status::Symbolic),
    }
    Ok(rep)
}

pub fn realize(ctx: &Ctx, depth: usize) -> Result<Report, CliError> {
    let mut rep = Report::new("realize");
    rep.push("group", ctx.spec.to_string(), Status::Symbolic);
    degree_line(&mut rep, ctx);
    let h = handle(ctx, build(ctx)?)?;
    match cyclorder::roundtrip(&h, depth) {
        Ok(report) => {
            for (w, x) in report.elements.iter().zip(&report.angles) {
                rep.push(&format!("iota({w})"), format!("= {x}"), Status::Symbolic);
            }
            let triples = format!("{} re-extracted, {} mismatches", report.checked, report.mismatches.len());
            if report.pass() {
                rep.push("triples", triples, Status::Certified);
            } else {
                rep.fail("triples", triples, Status::Certified);
            }
            let dyadic = report.angles_dyadic();
            if dyadic {
                rep.push("angles", "all exact dyadics", Status::Symbolic);
            } else {
                rep.fail("angles", "non-dyadic angle appeared", Status::Symbolic);
            }
        }
        Err(e) => rep.fail("embedding", e.to_string(), Status::Inconclusive),
    }
    Ok(rep)
}

pub fn compare(ctx: &Ctx, tokens: &[String]) -> Result<Report, CliError> {
    let texts = split_words(tokens, 2)?;
    let g1 = cyclorder::parse_hat(&ctx.spec, &texts[0])?;
    let g2 = cyclorder::parse_hat(&ctx.spec, &texts[1])?;
    let mut rep = Report::new("leftorder compare");
    rep.push("group", ctx.spec.to_string(), Status::Symbolic);
    degree_line(&mut rep, ctx);
    let lo = LeftOrderHandle::new(handle(ctx, build(ctx)?)?);
    match lo.hat_compare(&g1, &g2) {
        Ok(ord) => {
            let (sign, status) = match ord {
                Ordering::Less => ("<", Status::Certified),
                Ordering::Greater => (">", Status::Certified),
                Ordering::Equal => ("=", Status::Symbolic),
            };
            rep.push("order", format!("{g1} {sign} {g2}"), status);
        }
        Err(e) => rep.fail("order", e.to_string(), Status::Inconclusive),
    }
    for g in [&g1, &g2] {
        match lo.cofinal_bounds(g) {
            Ok((lo_exp, hi_exp)) => rep.push(
                "bounds",
                format!("z^{lo_exp} < {g} < z^{hi_exp}"),
                Status::Certified,
            ),
            Err(e) => rep.fail("bounds", e.to_string(), Status::Inconclusive),
        }
    }
    Ok(rep)
}

pub fn project(ctx: &Ctx, tokens: &[String]) -> Result<Report, CliError> {
    let texts = split_words(tokens, 3)?;
    let words: Vec<Word> =
        texts.iter().map(|t| Word::parse(&ctx.spec, t)).collect::<Result<_, WordError>>()?;
    let mut rep = Report::new("leftorder project");
    rep.push("group", ctx.spec.to_string(), Status::Symbolic);
    degree_line(&mut rep, ctx);
    let lo = LeftOrderHandle::new(handle(ctx, build(ctx)?)?);
    let projected = lo
        .project_order(&words[0], &words[1], &words[2])
        .map_err(|e| CliError::Check(e.to_string()))?;
    let direct = lo
        .order()
        .eval_c(&words[0], &words[1], &words[2])
        .map_err(|e| CliError::Check(e.to_string()))?;
    rep.push("projected", format!("= {}", value_str(projected)), Status::Certified);
    rep.push("direct", format!("= {}", value_str(direct)), Status::Certified);
    if projected == direct {
        rep.push("agreement", "projection matches the circular order", Status::Certified);
    } else {
        rep.fail("agreement", "projection disagrees with the circular order", Status::Certified);
    }
    Ok(rep)
}

pub fn left_axioms(ctx: &Ctx, samples: usize) -> Result<Report, CliError> {
    let mut rep = Report::new("leftorder axioms");
    rep.push("group", ctx.spec.to_string(), Status::Symbolic);
    degree_line(&mut rep, ctx);
    rep.push(
        "samples",
        format!("{samples} words, <= 6 syllables, |z exponent| <= 3, seed {}", ctx.seed),
        Status::Symbolic,
    );
    let lo = LeftOrderHandle::new(handle(ctx, build(ctx)?)?);
    let pool = random_hat_words(&ctx.spec, samples.max(3), 6, 3, ctx.seed);
    let n = pool.len();
    let mut violations = Vec::new();
    let mut stuck = 0usize;
    let mut run = |outcome: Result<bool, CertError>, idx: usize, what: &str| match outcome {
        Ok(true) => {}
        Ok(false) => violations.push(format!("sample {idx}: {what}")),
        Err(_) => stuck += 1,
    };
    for i in 0..n {
        let (a, b, c) = (&pool[i], &pool[(i + 1) % n], &pool[(i + 2) % n]);
        let g = &pool[(i + 7) % n];
        let ab = lo.hat_compare(a, b);
        run(
            ab.clone().and_then(|ab| Ok(ab == lo.hat_compare(b, a)?.reverse())),
            i,
            "antisymmetry",
        );
        run(ab.clone().map(|ab| (ab == Ordering::Equal) == (a == b)), i, "totality");
        run(
            lo.hat_compare(b, c).and_then(|bc| {
                let ab = ab.clone()?;
                if ab != Ordering::Greater && bc != Ordering::Greater {
                    Ok(lo.hat_compare(a, c)? != Ordering::Greater)
                } else {
                    Ok(true)
                }
            }),
            i,
            "transitivity",
        );
        let shifted = (|| -> Result<bool, CertError> {
            let ga = g.multiply(a).map_err(|_| inconclusive("product overflow"))?;
            let gb = g.multiply(b).map_err(|_| inconclusive("product overflow"))?;
            Ok(lo.hat_compare(&ga, &gb)? == ab.clone()?)
        })();
        run(shifted, i, "left invariance");
        run(lo.cofinal_bounds(a).map(|(below, above)| below < above), i, "cofinal bounds");
    }
    let checks = 5 * n;
    if stuck == 0 {
        rep.push("conclusive", format!("{checks} of {checks} checks"), Status::Certified);
    } else {
        rep.fail("conclusive", format!("{stuck} checks stuck at the precision cap"), Status::Inconclusive);
    }
    for v in violations.iter().take(5) {
        rep.fail("violation", v.clone(), Status::Certified);
    }
    let line = format!("{} violations", violations.len());
    if violations.is_empty() {
        rep.push("summary", line, Status::Certified);
    } else {
        rep.fail("summary", line, Status::Certified);
    }
    Ok(rep)
}

fn inconclusive(detail: &str) -> CertError {
    CertError::Inconclusive { cap: 0, detail: detail.into() }
}

pub fn export_svg(ctx: &Ctx, count: usize) -> Result<Report, CliError> {
    let path = ctx
        .svg
        .clone()
        .ok_or_else(|| CliError::Input("export-svg needs --svg PATH".into()))?;
    let mut rep = Report::new("export-svg");
    rep.push("group", ctx.spec.to_string(), Status::Symbolic);
    let cfg = build(ctx)?;
    let svg = cfg.export_svg(count);
    std::fs::write(&path, &svg).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    rep.push(
        "svg",
        format!("{} ({} bytes, {count} orbit points)", path.display(), svg.len()),
        Status::Symbolic,
    );
    Ok(rep)
}
