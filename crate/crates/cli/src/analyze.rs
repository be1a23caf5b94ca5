//! The `analyze` report.

use std::collections::BTreeMap;

use anyhow::Context;
use fullerlab_core::liecone::{
    delta_basis, delta_basis_to_depth, delta_membership, delta_membership_exact, delta_rank, fuller_certificate_at, glc_check, Certificate, CertificateReport, ConeAtPoint, Decidability,
    EntryTag, FailedHypothesis, GlcVerdict, DEFAULT_RANK_TOL,
};
use fullerlab_core::polyalg::{rational_from_f64, rational_to_f64, render_poly_with_names, Rational};
use fullerlab_core::system::AffineSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::format::{parse_floats, FieldError};

/// Number of seeded perturbations of the candidate used as cone samples.
pub const PERTURBATIONS: usize = 8;
/// Euclidean size of each perturbation.
pub const PERTURBATION_SIZE: f64 = 1e-2;

#[derive(Serialize)]
pub struct AnalysisReport {
    pub config: RunConfig,
    pub system: SystemSummary,
    pub ladder: Option<LadderJson>,
    pub ladder_note: Option<String>,
    pub glc: Vec<GlcJson>,
    pub glc_note: Option<String>,
    pub delta: DeltaJson,
    pub decidability: Option<DecidabilityJson>,
    pub certificate: CertificateJson,
}

#[derive(Serialize)]
pub struct SystemSummary {
    pub state_dim: usize,
    pub inputs: usize,
    pub augmented_dim: usize,
    pub variables: Vec<String>,
}

#[derive(Serialize)]
pub struct LadderJson {
    pub k: usize,
    pub q: Option<usize>,
    pub odd_order: bool,
    pub a_identically_zero: bool,
    pub a_fields: Vec<String>,
    pub a: Vec<String>,
    pub b_fields: Vec<Vec<String>>,
    pub b: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct GlcJson {
    pub z: Vec<f64>,
    pub p: Vec<f64>,
    pub b: Vec<Vec<f64>>,
    pub verdict: &'static str,
}

#[derive(Serialize)]
pub struct ConePointJson {
    pub z: Vec<f64>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub annihilator: Option<Vec<f64>>,
}

#[derive(Serialize)]
pub struct MembershipJson {
    /// Exact membership at the candidate.
    pub exact: bool,
    /// Numerical membership at every sample point.
    pub sampled: bool,
}

#[derive(Serialize)]
pub struct DeltaJson {
    pub basis: Vec<String>,
    pub rank_tol: f64,
    pub points: Vec<ConePointJson>,
    pub rank: usize,
    pub exact_rank: usize,
    pub exact_annihilator: Option<Vec<String>>,
    pub candidate: Vec<String>,
    pub no_singular_arc: bool,
    pub membership: BTreeMap<String, MembershipJson>,
}

#[derive(Serialize)]
pub struct DecidabilityJson {
    pub tags: Vec<Vec<String>>,
    pub determinant: String,
    pub verdict: &'static str,
}

#[derive(Serialize)]
pub struct CertificateJson {
    pub verdict: &'static str,
    pub failed_hypothesis: Option<String>,
}

fn verdict_name(c: Certificate) -> &'static str {
    match c {
        Certificate::Fuller => "fuller",
        Certificate::Inconclusive => "inconclusive",
        Certificate::NoSingularArc => "no-singular-arc",
    }
}

fn decidability_name(d: Decidability) -> &'static str {
    match d {
        Decidability::Invertible => "invertible",
        Decidability::Singular => "singular",
        Decidability::Undecidable => "undecidable",
    }
}

fn glc_name(v: GlcVerdict) -> &'static str {
    match v {
        GlcVerdict::Strict => "strict",
        GlcVerdict::Semidefinite => "semidefinite",
        GlcVerdict::Violated => "violated",
    }
}

fn hypothesis_text(h: FailedHypothesis) -> String {
    match h {
        FailedHypothesis::OddLadderIndex { k } => format!("odd ladder index k = {k}"),
        FailedHypothesis::OddProblemOrder { q } => format!("odd problem order q = {q}"),
        FailedHypothesis::RungOutsideCone { input } => format!("ad_f^k g{input} is not in the cone at the candidate"),
        FailedHypothesis::NotInvertible(d) => format!("B is not cone-inverse-decidable ({})", decidability_name(d)),
    }
}

fn tag_text(t: &EntryTag) -> String {
    match t {
        EntryTag::Zero => "zero".into(),
        EntryTag::Constant(c) => format!("constant {c}"),
        EntryTag::Unknown => "unknown".into(),
    }
}

/// Variable names of `(z, p)` over the augmented space.
pub fn variable_names(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("z{i}")).chain((0..dim).map(|i| format!("p{i}"))).collect()
}

/// The candidate followed by seeded perturbations of it.
pub fn sample_points(candidate: &[f64], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![candidate.to_vec()];
    for _ in 0..PERTURBATIONS {
        let dir: Vec<f64> = loop {
            let d: Vec<f64> = candidate.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-3 {
                break d.iter().map(|x| x / norm).collect();
            }
        };
        out.push(candidate.iter().zip(&dir).map(|(c, d)| c + PERTURBATION_SIZE * d).collect());
    }
    out
}

fn cone_point(c: &ConeAtPoint) -> ConePointJson {
    ConePointJson { z: c.z.clone(), rank: c.rank, singular_values: c.singular_values.clone(), annihilator: c.annihilator.clone() }
}

/// Parses `z0,..;p0,..`.
fn parse_point(s: &str, dim: usize) -> Result<(Vec<f64>, Vec<f64>), FieldError> {
    let (z, p) = s.split_once(';').ok_or_else(|| FieldError::new("--point", "expected `z0,..,zN-1;p0,..,pN-1`"))?;
    let z = parse_floats(z, "--point")?;
    let p = parse_floats(p, "--point")?;
    if z.len() != dim || p.len() != dim {
        return Err(FieldError::new("--point", format!("expected {dim} components in z and in p, got {} and {}", z.len(), p.len())));
    }
    Ok((z, p))
}

pub fn analyze(config: RunConfig, sys: &AffineSystem) -> anyhow::Result<AnalysisReport> {
    let aug = sys.augment();
    let dim = aug.dim();
    let candidate_f64 = config.candidate.clone().unwrap_or_else(|| vec![0.0; dim]);
    let candidate: Vec<Rational> = candidate_f64
        .iter()
        .map(|x| rational_from_f64(*x).ok_or_else(|| FieldError::new("--candidate", "components must be finite")))
        .collect::<Result<_, _>>()?;
    let max_depth = config.numeric.max_depth;
    let cert: CertificateReport = fuller_certificate_at(&aug, &candidate, max_depth).context("chattering certificate")?;

    let basis = match &cert.ladder {
        Some(l) => delta_basis(&aug, l),
        None => delta_basis_to_depth(&aug, max_depth)?,
    };
    let sampled = delta_rank(&basis, &sample_points(&candidate_f64, config.seed), DEFAULT_RANK_TOL)?;
    let exact = cert.delta.exact.as_ref().expect("the certificate computes the exact cone");

    let names = variable_names(dim);
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let render = |p| render_poly_with_names(p, &name_refs);

    let mut membership = BTreeMap::new();
    let (ladder, ladder_note) = match &cert.ladder {
        Some(l) => {
            for a in &l.a_fields {
                let at_candidate = delta_membership_exact(&a.field, exact)?;
                membership.insert(a.word.to_string(), MembershipJson { exact: at_candidate, sampled: delta_membership(&a.field, &sampled)? });
            }
            let ladder = LadderJson {
                k: l.k,
                q: l.q,
                odd_order: l.odd_order,
                a_identically_zero: l.a_identically_zero(),
                a_fields: l.a_fields.iter().map(|f| f.word.to_string()).collect(),
                a: l.a_polys()?.iter().map(render).collect(),
                b_fields: l.b_fields.iter().map(|r| r.iter().map(|f| f.word.to_string()).collect()).collect(),
                b: l.b_polys()?.iter().map(|r| r.iter().map(render).collect()).collect(),
            };
            (Some(ladder), None)
        }
        None => (None, Some(format!("no input appears in the switching-function derivatives up to depth {max_depth}; the cone fills the space"))),
    };

    let mut glc = Vec::new();
    let mut glc_note = None;
    match cert.ladder.as_ref() {
        Some(l) if l.q.is_some() => {
            let points: Vec<(Vec<f64>, Vec<f64>)> = if config.points.is_empty() {
                let p = exact.annihilator.as_ref().map(|a| a.iter().map(rational_to_f64).collect()).or_else(|| sampled.annihilator.clone());
                match p {
                    Some(p) => sampled.points.iter().map(|c| (c.z.clone(), p.clone())).collect(),
                    None => {
                        glc_note = Some("no default adjoint: the cone at the candidate has no unique annihilator".into());
                        Vec::new()
                    }
                }
            } else {
                config.points.iter().map(|s| parse_point(s, dim)).collect::<Result<_, _>>()?
            };
            for (z, p) in points {
                let verdict = glc_check(l, &z, &p)?;
                glc.push(GlcJson { b: l.b_at(&z, &p)?, z, p, verdict: glc_name(verdict) });
            }
        }
        Some(_) => glc_note = Some("odd ladder index: the Legendre–Clebsch test does not apply".into()),
        None => glc_note = Some("no ladder".into()),
    }

    let delta = DeltaJson {
        basis: basis.iter().map(|b| b.word.to_string()).collect(),
        rank_tol: DEFAULT_RANK_TOL,
        points: sampled.points.iter().map(cone_point).collect(),
        rank: sampled.rank,
        exact_rank: exact.rank,
        exact_annihilator: exact.annihilator.as_ref().map(|a| a.iter().map(|r| r.to_string()).collect()),
        candidate: candidate.iter().map(|r| r.to_string()).collect(),
        no_singular_arc: exact.rank == dim,
        membership,
    };
    let decidability = cert.decidability.as_ref().map(|d| DecidabilityJson {
        tags: d.tags.iter().map(|r| r.iter().map(tag_text).collect()).collect(),
        determinant: d.determinant.to_string(),
        verdict: decidability_name(d.verdict),
    });
    Ok(AnalysisReport {
        system: SystemSummary { state_dim: sys.state_dim(), inputs: sys.inputs(), augmented_dim: dim, variables: names },
        config,
        ladder,
        ladder_note,
        glc,
        glc_note,
        delta,
        decidability,
        certificate: CertificateJson { verdict: verdict_name(cert.verdict), failed_hypothesis: cert.failed.map(hypothesis_text) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbations_have_the_stated_size() {
        let pts = sample_points(&[0.0, 0.5, -1.0], 7);
        assert_eq!(pts.len(), 1 + PERTURBATIONS);
        for p in &pts[1..] {
            let d = ((p[0]).powi(2) + (p[1] - 0.5).powi(2) + (p[2] + 1.0).powi(2)).sqrt();
            assert!((d - PERTURBATION_SIZE).abs() < 1e-15);
        }
        assert_eq!(pts, sample_points(&[0.0, 0.5, -1.0], 7));
        assert_ne!(pts, sample_points(&[0.0, 0.5, -1.0], 8));
    }

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("0,1;-1,2", 2).unwrap(), (vec![0.0, 1.0], vec![-1.0, 2.0]));
        assert!(parse_point("0,1,2;1,2", 2).is_err());
        assert!(parse_point("0,1", 2).is_err());
    }
}
