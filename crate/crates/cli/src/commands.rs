use std::fmt::Write as _;

use confuse_core::blockcode::{
    block_security_check, entropy_of_u, monte_carlo, BlockCodeSpec, BlockDecoder,
};
use confuse_core::expansion::{
    all_expansions, converse_report, search_expansions, CarrierKind, FeasibleExpansion,
    FunctionTable, SearchBounds,
};
use confuse_core::protocol::{
    optimize_additive_randomness, tabulate, CrtEqualScheme, FknScheme, LinearScheme, Scheme,
};
use confuse_core::structures::{
    catalog_fields_bounded, catalog_rings_bounded, diff_against_reference,
};
use confuse_core::verify::{
    display_bits, verify as verify_scheme, verify_correct, verify_secure, InputDistribution,
    VerificationReport,
};
use confuse_core::{Limits, Rate};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::{
    load, BaselineArgs, BlockcodeArgs, CatalogArgs, CatalogKind, CrtArgs, Kind, SolveArgs,
    VerifyArgs,
};

/// Work allowed for the exact security check of `crt-equal`.
const CRT_SECURITY_BUDGET: u64 = 1 << 26;

fn emit(json: bool, manifest: &RunManifest, mut body: Value, human: String) {
    if json {
        body["manifest"] = serde_json::to_value(manifest).expect("serializable");
        println!(
            "{}",
            serde_json::to_string_pretty(&body).expect("serializable")
        );
    } else {
        print!("{human}");
    }
}

fn rate_pair(r: (Rate, Rate)) -> String {
    format!(
        "({}, {}) bits = ({}, {})",
        r.0.symbolic(),
        r.1.symbolic(),
        r.0,
        r.1
    )
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn report_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scheme: {}", r.scheme);
    let _ = writeln!(s, "rates: {}", rate_pair((r.rate1, r.rate2)));
    let _ = writeln!(s, "correct: {}", pass(r.correct.pass));
    if let Some(w) = &r.correct.witness {
        let _ = writeln!(
            s,
            "  witness: W1={} W2={} atom {} ({}) expected {} decoded {:?}",
            w.w1, w.w2, w.atom, w.atom_label, w.expected, w.decoded
        );
    }
    let _ = writeln!(s, "secure: {}", pass(r.secure.pass));
    if let Some(w) = &r.secure.witness {
        let _ = writeln!(
            s,
            "  witness: f={} inputs {:?} vs {:?} differ on outcome {:?}: {} vs {}",
            w.label, w.first, w.second, w.outcome, w.p_first, w.p_second
        );
    }
    if let Some(l) = &r.leakage {
        let _ = writeln!(
            s,
            "leakage: {} bits{}",
            display_bits(l.bits),
            if l.exact_zero { " (exactly zero)" } else { "" }
        );
    }
    s
}

fn input_dist(
    manifest: &mut RunManifest,
    source: Option<&str>,
    f: &FunctionTable,
) -> Result<Option<InputDistribution>, CliError> {
    source
        .map(|s| {
            let d = load::distribution(manifest, s)?;
            d.validate(f.m1(), f.m2())?;
            Ok(d)
        })
        .transpose()
}

pub fn catalog(a: CatalogArgs, json: bool) -> Result<bool, CliError> {
    let mut manifest = RunManifest::new("catalog");
    let limits = Limits::from_env();
    let field = matches!(a.kind, CatalogKind::Field);
    let entries = if field {
        catalog_fields_bounded(a.max, limits)?
    } else {
        catalog_rings_bounded(a.max, limits)?
    };
    let diff = match &a.reference {
        Some(source) => {
            let table = load::reference(&mut manifest, source.as_deref(), field)?;
            Some(diff_against_reference(&entries, &table, a.max)?)
        }
        None => None,
    };
    let mut text = String::new();
    for e in &entries {
        let _ = writeln!(
            text,
            "{}{}",
            e.structure.describe(),
            if e.trivial { "  (trivial)" } else { "" }
        );
    }
    if let Some(d) = &diff {
        if d.is_clean() {
            let _ = writeln!(text, "reference: clean, {} rows compared", d.compared_rows);
        } else {
            let _ = writeln!(text, "reference: MISMATCH after {} rows", d.compared_rows);
            for (tag, rows) in [
                ("extra", &d.extra),
                ("missing", &d.missing),
                ("metadata", &d.metadata),
            ] {
                for r in rows {
                    let _ = writeln!(text, "  {tag}: {r}");
                }
            }
        }
    }
    let rendered: Vec<_> = entries.iter().map(|e| e.render()).collect();
    let body = json!({
        "kind": if field { "field" } else { "ring" },
        "max": a.max,
        "entries": rendered,
        "reference_diff": diff,
    });
    emit(json, &manifest, body, text);
    Ok(diff.is_none_or(|d| d.is_clean()))
}

fn expansion_text(e: &FeasibleExpansion) -> String {
    let s = &e.structure;
    let c = s.carrier();
    let fmt = |v: &[u32]| {
        v.iter()
            .map(|&a| c.format(a))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut t = String::new();
    let _ = writeln!(t, "structure: {}", s.describe());
    let _ = writeln!(t, "map1: [{}]  map2: [{}]", fmt(&e.map1), fmt(&e.map2));
    for (set, label) in s.sets().iter().zip(&e.out_map) {
        if let Some(l) = label {
            let _ = writeln!(t, "  {{{}}} -> {l}", fmt(set));
        }
    }
    t
}

pub fn solve(a: SolveArgs, json: bool) -> Result<bool, CliError> {
    let mut manifest = RunManifest::new("solve");
    let f = load::table(&mut manifest, &a.table)?;
    let dist = input_dist(&mut manifest, a.input_dist.as_deref(), &f)?;
    let kind = match a.kind {
        Kind::Any => CarrierKind::Any,
        Kind::Field => CarrierKind::Field,
        Kind::Ring => CarrierKind::Ring,
    };
    let limit = if a.map1.is_some() {
        usize::MAX
    } else {
        a.limit.max(1)
    };
    let mut hits = search_expansions(
        &f,
        SearchBounds {
            max_carrier: a.max_carrier,
            kind,
            limit,
        },
    )?;
    if let (Some(m1), Some(m2)) = (&a.map1, &a.map2) {
        let mut pinned = Vec::new();
        for h in &hits {
            let all = all_expansions(&f, &h.structure, usize::MAX)?;
            pinned.extend(all.into_iter().filter(|e| &e.map1 == m1 && &e.map2 == m2));
            if pinned.len() >= a.limit.max(1) {
                break;
            }
        }
        hits = pinned;
    }
    let Some(exp) = hits.first() else {
        return Err(CliError::NotFound(format!(
            "no feasible expansion over carriers of size ≤ {}",
            a.max_carrier
        )));
    };
    let scheme = if a.optimize_z {
        optimize_additive_randomness(exp, &f, a.subsets)
    } else {
        LinearScheme::new(exp.clone())
    };
    let report = verify_scheme(&scheme, &f, dist.as_ref())?;
    let converse = converse_report(&f, Some(exp));
    let tab = tabulate(&scheme).ok();
    if let Some(path) = &a.emit_scheme {
        let t = tab
            .as_ref()
            .ok_or_else(|| CliError::Input("scheme too large to tabulate".into()))?;
        std::fs::write(path, t.to_json())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }

    let c = scheme.carrier();
    let fmt = |v: &[u32]| {
        v.iter()
            .map(|&a| c.format(a))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut text = format!(
        "table: {}x{}, {} outputs\n",
        f.m1(),
        f.m2(),
        f.output_count()
    );
    text += &expansion_text(exp);
    let _ = writeln!(
        text,
        "randomness: γ ∈ {{{}}}, z ∈ {{{}}}",
        fmt(scheme.gamma_support()),
        fmt(scheme.z_support())
    );
    text += &report_text(&report);
    if let Some(conv) = converse.converse {
        let _ = writeln!(
            text,
            "converse bound: {}{}",
            rate_pair(conv),
            match converse.optimal {
                Some(true) => ", carrier size meets it",
                _ => "",
            }
        );
    }
    for other in hits.iter().skip(1) {
        let _ = writeln!(text, "also: {}", other.structure.describe());
    }
    let body = json!({
        "table": f,
        "expansion": exp,
        "alternatives": &hits[1..],
        "gamma_support": scheme.gamma_support(),
        "z_support": scheme.z_support(),
        "verification": report,
        "converse": converse,
        "scheme": tab.as_ref().map(|t| t.file()),
    });
    emit(json, &manifest, body, text);
    Ok(report.pass())
}

pub fn verify(a: VerifyArgs, json: bool) -> Result<bool, CliError> {
    let mut manifest = RunManifest::new("verify");
    let s = load::scheme(&mut manifest, &a.scheme)?;
    let f = load::table(&mut manifest, &a.table)?;
    let dist = input_dist(&mut manifest, a.input_dist.as_deref(), &f)?;
    let report = verify_scheme(&s, &f, dist.as_ref())?;
    let text = report_text(&report);
    let ok = report.pass();
    emit(json, &manifest, json!({ "report": report }), text);
    Ok(ok)
}

pub fn blockcode(a: BlockcodeArgs, json: bool) -> Result<bool, CliError> {
    let mut manifest = RunManifest::new("blockcode");
    manifest.seed = Some(a.seed);
    let f = load::table(&mut manifest, &a.table)?;
    let dist = input_dist(&mut manifest, a.input_dist.as_deref(), &f)?
        .unwrap_or_else(|| InputDistribution::uniform(f.m1(), f.m2()));
    let bounds = SearchBounds {
        max_carrier: a.max_carrier,
        kind: CarrierKind::Field,
        limit: 1,
    };
    let exp = search_expansions(&f, bounds)?
        .into_iter()
        .next()
        .ok_or_else(|| CliError::NotFound("no field expansion within bounds".into()))?;
    let base = LinearScheme::new(exp);
    let entropy = entropy_of_u(&base, &dist)?;
    let make = |l: usize| match a.rows {
        Some(rows) => BlockCodeSpec::random_with_rows(base.clone(), l, rows.min(l), a.seed),
        None => BlockCodeSpec::random(base.clone(), l, a.epsilon, &dist, a.seed),
    };
    let spec = make(a.l)?;
    let decoder = BlockDecoder::new(&spec, &entropy.exact)?;
    let mc = monte_carlo(&spec, &decoder, &dist, a.trials, a.seed)?;
    let security = match a.security_l {
        Some(l) => Some(block_security_check(&make(l)?, &f)?),
        None => None,
    };
    let summary = spec.summary();

    let mut text = format!("carrier: {}\n", base.carrier().label());
    for u in &entropy.dist_u {
        let _ = writeln!(text, "  P(U = {}) = {}", u.value, u.p);
    }
    let _ = writeln!(
        text,
        "H(U) = {:.6} bits = {:.6} {}-ary symbols",
        entropy.h_bits,
        entropy.h_qary,
        base.carrier().size()
    );
    let _ = writeln!(
        text,
        "L = {}, rows = {}, rate = {:.6} bits per input symbol",
        summary.l, summary.rows, summary.rate_bits_per_input
    );
    let _ = writeln!(
        text,
        "trials = {}, block errors = {} ({:.4}), greedy decodes = {}, seed = {} ({})",
        mc.trials, mc.block_errors, mc.empirical_error, mc.greedy_trials, mc.seed, mc.rng
    );
    if let Some(s) = &security {
        let _ = writeln!(
            text,
            "exact security at L = {}: {}",
            a.security_l.unwrap_or(0),
            pass(s.pass)
        );
    }
    let ok = security.as_ref().is_none_or(|s| s.pass);
    let body = json!({
        "carrier": base.carrier().label(),
        "rate_bits_per_input": summary.rate_bits_per_input,
        "empirical_error": mc.empirical_error,
        "H_bits": entropy.h_bits,
        "H_qary": entropy.h_qary,
        "dist_u": entropy.dist_u,
        "code": summary,
        "monte_carlo": mc,
        "security": security,
    });
    emit(json, &manifest, body, text);
    Ok(ok)
}

pub fn crt_equal(a: CrtArgs, json: bool) -> Result<bool, CliError> {
    let mut manifest = RunManifest::new("crt-equal");
    let s = match a.samples {
        Some(n) => {
            manifest.seed = Some(a.seed);
            CrtEqualScheme::sampled(a.m, n, a.seed)?
        }
        None => CrtEqualScheme::new(a.m)?,
    };
    let f = s.table();
    let correct = verify_correct(&s, &f)?;
    let work = s.atom_count().saturating_mul((a.m * a.m) as u64);
    let secure = (work <= CRT_SECURITY_BUDGET)
        .then(|| verify_secure(&s, &f))
        .transpose()?;
    let fields: Vec<String> = s
        .fields()
        .iter()
        .map(|q| format!("F_{}", q.order()))
        .collect();
    let collisions = s.residue_collisions(0, 1);
    let difference = s.difference_distribution(0, 1);
    let rates = s.rates();

    let mut text = format!(
        "m = {}, residue fields: {}, permutations: {}{}\n",
        a.m,
        fields.join(" × "),
        s.permutation_count(),
        if s.is_exhaustive() {
            " (all)"
        } else {
            " (sampled)"
        }
    );
    let _ = writeln!(text, "rates: {}", rate_pair(rates));
    let _ = writeln!(text, "correct: {}", pass(correct.pass));
    match &secure {
        Some(r) => {
            let _ = writeln!(text, "secure: {}", pass(r.pass));
        }
        None => {
            let _ = writeln!(text, "secure: not checked (enumeration too large)");
        }
    }
    let _ = writeln!(text, "inputs 0 vs 1, per-residue equality:");
    for pattern in collisions.counts.keys() {
        let _ = writeln!(text, "  {:?}: {}", pattern, collisions.probability(pattern));
    }
    let _ = writeln!(
        text,
        "difference tuples: {} values, uniform: {}",
        difference.len(),
        difference.is_uniform()
    );
    let collision_json: Vec<Value> = collisions
        .counts
        .keys()
        .map(|k| json!({ "equal": k, "p": collisions.probability(k).to_string() }))
        .collect();
    let body = json!({
        "m": a.m,
        "fields": fields,
        "permutations": s.permutation_count(),
        "exhaustive": s.is_exhaustive(),
        "rate1": rates.0,
        "rate2": rates.1,
        "correct": correct,
        "secure": secure,
        "residue_collisions": collision_json,
        "difference_support": difference.len(),
        "difference_uniform": difference.is_uniform(),
    });
    emit(json, &manifest, body, text);
    // Sampled permutations only approximate security, so only correctness counts there.
    Ok(correct.pass && (!s.is_exhaustive() || secure.is_none_or(|r| r.pass)))
}

pub fn baseline(a: BaselineArgs, json: bool) -> Result<bool, CliError> {
    let mut manifest = RunManifest::new("baseline");
    let f = load::table(&mut manifest, &a.table)?;
    let dist = input_dist(&mut manifest, a.input_dist.as_deref(), &f)?;
    let tab = tabulate(&FknScheme::new(f.clone())?)?;
    let report = verify_scheme(&tab, &f, dist.as_ref())?;
    if let Some(path) = &a.emit_scheme {
        std::fs::write(path, tab.to_json())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    let text = report_text(&report);
    let ok = report.pass();
    let body = json!({ "table": f, "scheme": tab.file(), "verification": report });
    emit(json, &manifest, body, text);
    Ok(ok)
}
