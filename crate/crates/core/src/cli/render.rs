//! Report output in human, JSON and CSV form. Rationals are always printed
//! exactly; human output adds a decimal approximation.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::json;

use super::Format;
use crate::audit::{AuditReport, ProbeReport, SweepResult};
use crate::greedy::FractionalGreedySolution;
use crate::mechanisms::{Mechanism, OutcomeDistribution};
use crate::model::{Instance, ItemId, Outcome};
use crate::rational::Rational;

pub const AUDIT_HEADER: [&str; 11] = [
    "instance_id",
    "mechanism",
    "beta",
    "sp_mode",
    "sp_semantics",
    "violations",
    "worst_gain",
    "mech_value",
    "opt_value",
    "ratio",
    "degenerate_flag",
];

fn approx(q: &Rational) -> String {
    if q.is_integer() {
        q.to_string()
    } else {
        format!("{q} (~{})", q.to_decimal_string(6))
    }
}

fn ids(packed: &[ItemId]) -> String {
    packed.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn json_out<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::other)?;
    writeln!(out)
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub fn solve(
    out: &mut dyn Write,
    format: Format,
    id: &str,
    inst: &Instance,
    opt: &Outcome,
    frac: &FractionalGreedySolution,
) -> io::Result<()> {
    match format {
        Format::Json => json_out(
            out,
            &json!({
                "instance_id": id,
                "capacity": inst.capacity(),
                "opt": opt,
                "fractional": {
                    "order": frac.order,
                    "ell": frac.ell,
                    "fractions": frac.fractions,
                    "fractional_item": frac.fractional_item,
                    "value": frac.value(inst),
                },
            }),
        ),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["item_id", "owner", "value", "size", "in_opt", "greedy_fraction"])
                .map_err(csv_err)?;
            for (pos, item_id) in frac.order.iter().enumerate() {
                let it = inst.item(*item_id).expect("order lists instance items");
                w.write_record([
                    it.id.to_string(),
                    it.owner.to_string(),
                    it.value.to_string(),
                    it.size.to_string(),
                    opt.contains(it.id).to_string(),
                    frac.fractions[pos].to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()
        }
        Format::Human => {
            writeln!(
                out,
                "instance {id}: {} items, {} agents, capacity {}",
                inst.len(),
                inst.agent_count(),
                approx(inst.capacity())
            )?;
            let mut values: Vec<&Rational> = opt
                .packed
                .iter()
                .filter_map(|i| inst.item(*i).map(|it| &it.value))
                .collect();
            values.sort_by(|a, b| b.cmp(a));
            let values: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            writeln!(out, "opt value {} size {}", approx(&opt.value), approx(&opt.size))?;
            writeln!(out, "opt items {} (values {})", ids(&opt.packed), values.join(","))?;
            writeln!(
                out,
                "fractional greedy: {} whole items, value {}",
                frac.ell,
                approx(&frac.value(inst))
            )?;
            writeln!(
                out,
                "  {:>4} {:>6} {:>12} {:>12} {:>8}",
                "rank", "item", "value", "size", "x"
            )?;
            for (pos, item_id) in frac.order.iter().enumerate() {
                let it = inst.item(*item_id).expect("order lists instance items");
                writeln!(
                    out,
                    "  {:>4} {:>6} {:>12} {:>12} {:>8}",
                    pos + 1,
                    it.id,
                    it.value.to_string(),
                    it.size.to_string(),
                    frac.fractions[pos].to_string()
                )?;
            }
            Ok(())
        }
    }
}

fn ratio(value: &Rational, opt: &Rational) -> Rational {
    if opt.is_zero() {
        Rational::one()
    } else {
        value / opt
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    out: &mut dyn Write,
    format: Format,
    id: &str,
    inst: &Instance,
    mech: &Mechanism,
    dist: &OutcomeDistribution,
    opt_value: &Rational,
    samples: &[usize],
) -> io::Result<()> {
    let expected = dist.expected_value();
    let agents: Vec<Rational> = (0..inst.agent_count())
        .map(|a| dist.agent_expected_value(inst, a))
        .collect();
    let counts: Vec<usize> = (0..dist.branches.len())
        .map(|i| samples.iter().filter(|&&s| s == i).count())
        .collect();
    match format {
        Format::Json => {
            let branches: Vec<_> = dist
                .branches
                .iter()
                .map(|b| {
                    json!({
                        "label": b.label,
                        "probability": b.probability,
                        "packed": b.outcome.packed,
                        "value": b.outcome.value,
                        "size": b.outcome.size,
                    })
                })
                .collect();
            let drawn: Vec<&str> = samples.iter().map(|&i| dist.branches[i].label).collect();
            json_out(
                out,
                &json!({
                    "instance_id": id,
                    "mechanism": mech.to_string(),
                    "branches": branches,
                    "expected_value": expected,
                    "agent_expected_values": agents,
                    "opt_value": opt_value,
                    "ratio": ratio(&expected, opt_value),
                    "samples": drawn,
                }),
            )
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["label", "probability", "packed", "value", "size", "samples"])
                .map_err(csv_err)?;
            for (b, n) in dist.branches.iter().zip(&counts) {
                w.write_record([
                    b.label.to_string(),
                    b.probability.to_string(),
                    ids(&b.outcome.packed),
                    b.outcome.value.to_string(),
                    b.outcome.size.to_string(),
                    n.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()
        }
        Format::Human => {
            writeln!(out, "{mech} on {id}")?;
            for b in &dist.branches {
                writeln!(
                    out,
                    "  {} with probability {}: value {} items [{}]",
                    b.label,
                    b.probability,
                    approx(&b.outcome.value),
                    ids(&b.outcome.packed)
                )?;
            }
            writeln!(out, "expected value {}", approx(&expected))?;
            for (a, v) in agents.iter().enumerate() {
                writeln!(out, "  agent {a}: {}", approx(v))?;
            }
            writeln!(
                out,
                "opt {} ratio {}",
                approx(opt_value),
                approx(&ratio(&expected, opt_value))
            )?;
            if !samples.is_empty() {
                writeln!(out, "{} samples:", samples.len())?;
                for (b, n) in dist.branches.iter().zip(&counts) {
                    writeln!(out, "  {}: {n}", b.label)?;
                }
            }
            Ok(())
        }
    }
}

fn audit_row(r: &AuditReport) -> [String; 11] {
    let failed = r.error.is_some();
    let blank_if = |s: String| if failed { String::new() } else { s };
    [
        r.instance_id.clone(),
        r.mechanism.split(':').next().unwrap_or_default().to_string(),
        r.beta.as_ref().map(Rational::to_string).unwrap_or_default(),
        r.sp_mode.to_string(),
        r.sp_semantics.to_string(),
        blank_if(r.finding_count().to_string()),
        blank_if(r.worst().map_or_else(|| "0".to_string(), |w| w.gain.to_string())),
        blank_if(r.mechanism_value.to_string()),
        blank_if(r.opt_value.to_string()),
        blank_if(r.ratio.to_string()),
        r.degenerate.to_string(),
    ]
}

fn audit_human(out: &mut dyn Write, r: &AuditReport) -> io::Result<()> {
    writeln!(
        out,
        "{} on {} ({}, {})",
        r.mechanism, r.instance_id, r.sp_mode, r.sp_semantics
    )?;
    if let Some(e) = &r.error {
        return writeln!(out, "  error: {e}");
    }
    writeln!(
        out,
        "  value {} opt {} ratio {} floor {}{}",
        approx(&r.mechanism_value),
        approx(&r.opt_value),
        approx(&r.ratio),
        approx(&r.floor),
        if r.below_floor() { "  BELOW FLOOR" } else { "" }
    )?;
    let buckets = [
        ("violation", &r.violations),
        ("degenerate finding", &r.degenerate_findings),
    ];
    for (what, list) in buckets {
        for v in list {
            let hidden: Vec<ItemId> = v.deviation.hidden.iter().copied().collect();
            let base: Vec<ItemId> = v.deviation.base_hidden.iter().copied().collect();
            write!(out, "  {what}: agent {} hides [{}]", v.deviation.agent, ids(&hidden))?;
            if !base.is_empty() {
                write!(out, " instead of [{}]", ids(&base))?;
            }
            if let Some(b) = v.branch {
                write!(out, " in {b}")?;
            }
            writeln!(
                out,
                ": {} -> {} (gain {})",
                approx(&v.truthful_value),
                approx(&v.deviant_value),
                approx(&v.gain)
            )?;
        }
    }
    if r.finding_count() == 0 {
        writeln!(out, "  no profitable deviation")?;
    }
    Ok(())
}

pub fn audit(out: &mut dyn Write, format: Format, r: &AuditReport) -> io::Result<()> {
    match format {
        Format::Json => json_out(out, r),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(AUDIT_HEADER).map_err(csv_err)?;
            w.write_record(audit_row(r)).map_err(csv_err)?;
            w.flush()
        }
        Format::Human => audit_human(out, r),
    }
}

pub fn sweep(out: &mut dyn Write, format: Format, res: &SweepResult) -> io::Result<()> {
    match format {
        Format::Json => json_out(out, res),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(AUDIT_HEADER).map_err(csv_err)?;
            for r in &res.reports {
                w.write_record(audit_row(r)).map_err(csv_err)?;
            }
            w.flush()
        }
        Format::Human => {
            for s in &res.summaries {
                writeln!(out, "{}: {} instances", s.mechanism, s.instances)?;
                writeln!(
                    out,
                    "  violations {} degenerate findings {} floor breaches {} errors {}",
                    s.violations, s.degenerate_findings, s.floor_breaches, s.errors
                )?;
                if let (Some(m), Some(at)) = (&s.min_ratio, &s.min_ratio_instance) {
                    writeln!(out, "  min ratio {} at {at}", approx(m))?;
                }
                if let Some(w) = &s.worst_violation {
                    let hidden: Vec<ItemId> = w.hidden.iter().copied().collect();
                    writeln!(
                        out,
                        "  worst gain {} at {} (agent {} hides [{}]{})",
                        approx(&w.gain),
                        w.instance_id,
                        w.agent,
                        ids(&hidden),
                        if w.degenerate { ", tied instance" } else { "" }
                    )?;
                }
            }
            Ok(())
        }
    }
}

pub fn probe(out: &mut dyn Write, format: Format, p: &ProbeReport) -> io::Result<()> {
    match format {
        Format::Json => json_out(out, p),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "family",
                "k",
                "epsilon",
                "mechanism",
                "ratio_truthful",
                "ratio_deviant",
                "min_ratio",
                "ceiling",
                "floor",
                "sp_consistent",
                "degenerate_flag",
            ])
            .map_err(csv_err)?;
            w.write_record([
                p.family.to_string(),
                p.k.to_string(),
                p.epsilon.as_ref().map(Rational::to_string).unwrap_or_default(),
                p.mechanism.clone(),
                p.ratio_truthful.to_string(),
                p.ratio_deviant.to_string(),
                p.min_ratio.to_string(),
                p.ceiling.to_string(),
                p.floor.to_string(),
                p.sp_consistent.to_string(),
                p.degenerate.to_string(),
            ])
            .map_err(csv_err)?;
            w.flush()
        }
        Format::Human => {
            write!(out, "{} family, k = {}, phi_k = {}", p.family, p.k, approx(&p.phi_k))?;
            if let Some(e) = &p.epsilon {
                write!(out, ", epsilon {e}")?;
            }
            writeln!(out)?;
            writeln!(out, "{}", p.mechanism)?;
            writeln!(out, "  ratio on truthful instance {}", approx(&p.ratio_truthful))?;
            writeln!(out, "  ratio on deviant instance  {}", approx(&p.ratio_deviant))?;
            writeln!(out, "  min ratio {}", approx(&p.min_ratio))?;
            writeln!(out, "  ceiling {} floor {}", approx(&p.ceiling), approx(&p.floor))?;
            writeln!(
                out,
                "  hiding agent: {} truthful, {} deviant{}",
                approx(&p.agent_value_truthful),
                approx(&p.agent_value_deviant),
                if p.sp_consistent { "" } else { "  GAINS BY HIDING" }
            )?;
            Ok(())
        }
    }
}
