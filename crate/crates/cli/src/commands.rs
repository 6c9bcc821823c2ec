use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use squeeze_core::kobayashi::{dist_to_set, distance};
use squeeze_core::phjts::{
    jordan_identity_residual, odd_power, orthogonality_defect, random_element, spectral_decompose, spectral_norm,
    system_rank, tripotent_rank, SpectralSummary,
};
use squeeze_core::scalar::complex_to_interleaved;
use squeeze_core::squeezing::{
    aux_conversion, exact_constant, hardy_certificate, product_exclusion, product_lower_bound, removed_set_bounds,
    AuxDirection, ExclusionHypotheses, DEFAULT_RHO_SCHEDULE,
};
use squeeze_core::symdomain::{
    boundary_stratum, maximal_polydisk, normalize_realization, sample_boundary, shilov_membership,
};
use squeeze_core::wlc::{build_frame, hhr_scan, koebe_bound};
use squeeze_core::{Complex, DomainSpec, Element};

use crate::input::{interleaved, Input};
use crate::CliError;

/// Global settings shared by every command.
pub struct Settings {
    pub tol: f64,
    pub seed: u64,
    pub samples: Option<usize>,
}

pub struct Output {
    pub result: Value,
    pub provenance: Vec<Value>,
    /// Rows for `--format csv`; only scan-style commands have one.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
    /// Set when a self-check in the report failed; the report is still printed.
    pub inconsistent: Option<String>,
}

impl Output {
    fn new(result: Value, provenance: Vec<Value>) -> Self {
        Output { result, provenance, table: None, inconsistent: None }
    }
}

fn prov(result: &str, detail: impl Into<String>) -> Value {
    json!({ "result": result, "detail": detail.into() })
}

fn il(z: &[Complex<f64>]) -> Vec<f64> {
    complex_to_interleaved(z)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn jts_check(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let domain = input.domain()?;
    let quintuples = s.samples.unwrap_or(100);
    let mut rng = rng(s.seed);
    let mut factors = Vec::new();
    let mut pass = true;
    for f in domain.factors() {
        let mut worst = 0.0f64;
        for _ in 0..quintuples {
            let v: Vec<Element> = (0..5).map(|_| random_element(*f, &mut rng)).collect();
            worst = worst.max(jordan_identity_residual(&v[0], &v[1], &v[2], &v[3], &v[4])?);
        }
        pass &= worst < s.tol;
        factors.push(json!({ "factor": f, "quintuples": quintuples, "max_residual": worst }));
    }
    let mut out = Output::new(
        json!({ "factors": factors, "pass": pass }),
        vec![prov("Jordan identity", "max over Gaussian quintuples of the identity residual; pass iff < tol")],
    );
    if !pass {
        out.inconsistent = Some(format!("Jordan identity residual not below tol = {:e}", s.tol));
    }
    Ok(out)
}

pub fn spectral(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let domain = input.domain()?;
    if !domain.is_irreducible() {
        return Err(CliError::Input("spectral needs a single factor".into()));
    }
    let factor = domain.factors()[0];
    let x: Element = if input.has("x") {
        Element::new(factor, input.point("x")?)?
    } else {
        random_element(factor, &mut rng(s.seed))
    };
    let dec = spectral_decompose(&x, s.tol)?;
    let ranks = dec.tripotents.iter().map(|e| tripotent_rank(e, s.tol.max(1e-8))).collect::<Result<Vec<_>, _>>()?;
    let mut orth = 0.0f64;
    for i in 0..dec.len() {
        for j in i + 1..dec.len() {
            orth = orth.max(orthogonality_defect(&dec.tripotents[i], &dec.tripotents[j])?);
        }
    }
    let mut result = json!({
        "factor": factor,
        "x": il(x.coords()),
        "decomposition": SpectralSummary::from(&dec),
        "spectral_norm": spectral_norm(&x),
        "tripotent_ranks": ranks,
        "orthogonality_defect": orth,
    });
    let mut provenance = vec![prov("spectral decomposition", "lambda_1 > ... > lambda_s > tol * lambda_1; tripotents pairwise orthogonal")];
    if let Some(p) = input.opt::<u32>("odd_power")? {
        let k = 2 * p as i64 + 1;
        let xp = odd_power(&x, k)?;
        result["odd_power"] = json!({ "p": p, "estimate": xp.norm().powf(1.0 / k as f64) });
        provenance.push(prov("odd-power spectral norm estimate", format!("||x^({k})||^(1/{k})")));
    }
    Ok(Output::new(result, provenance))
}

pub fn rank(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let domain = input.domain()?;
    let trials = s.samples.unwrap_or(64);
    let factors: Vec<Value> = domain
        .factors()
        .iter()
        .map(|f| json!({ "factor": f, "rank": f.rank(), "sampled_rank": system_rank(f, trials, s.seed) }))
        .collect();
    let consistent = domain.factors().iter().all(|f| system_rank(f, trials, s.seed) == f.rank());
    if !consistent {
        return Err(CliError::Core(squeeze_core::Error::Consistency("sampled rank disagrees with the rank formula".into())));
    }
    Ok(Output::new(
        json!({ "rank": domain.rank(), "factors": factors }),
        vec![
            prov("rank formula for Cartan factors", "I(p,q): p, II(n): floor(n/2), III(n): n, IV(n): 2; ranks add over products"),
            prov("system rank", format!("max spectral length over {trials} Gaussian elements")),
        ],
    ))
}

fn stratum_value(domain: &DomainSpec, x: &[Complex<f64>], tol: f64) -> Result<Value, CliError> {
    let st = boundary_stratum(domain, x, tol)?;
    Ok(json!({
        "j": st.j,
        "rank": domain.rank(),
        "e": il(st.e.coords()),
        "v": il(st.v.coords()),
        "v_norm": st.v_norm,
        "reconstruction_residual": st.reconstruction_residual,
        "peirce_residual": st.peirce_residual,
    }))
}

pub fn stratum(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let domain = input.domain()?;
    let x = input.point("point")?;
    Ok(Output::new(
        stratum_value(&domain, &x, s.tol)?,
        vec![prov("boundary strata", "x = e + v with e a rank-j tripotent and v in V_0(e), |v| < 1")],
    ))
}

pub fn shilov(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let domain = input.domain()?;
    let x = input.point("point")?;
    let mut result = stratum_value(&domain, &x, s.tol)?;
    result["shilov"] = json!(shilov_membership(&domain, &x, s.tol)?);
    Ok(Output::new(result, vec![prov("Shilov boundary", "the stratum of maximal tripotents (j = rank)")]))
}

pub fn normalize(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let domain = input.domain()?;
    let samples = s.samples.unwrap_or(10_000);
    let mut rng = rng(s.seed);
    let mut factors = Vec::new();
    for f in domain.factors() {
        let lam = normalize_realization(*f);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let mut shilov_dev = 0.0f64;
        let d1 = DomainSpec::single(*f);
        for _ in 0..samples {
            let x: Element = sample_boundary(*f, &mut rng);
            let d = lam.apply(&x).norm();
            lo = lo.min(d);
            hi = hi.max(d);
            if shilov_membership(&d1, x.coords(), s.tol)? {
                shilov_dev = shilov_dev.max((d - 1.0).abs());
            }
        }
        factors.push(json!({
            "factor": f,
            "rank": f.rank(),
            "scale": lam.scale,
            "boundary_distance": 1.0 / (f.rank() as f64).sqrt(),
            "sampled_min_distance": lo,
            "sampled_max_distance": hi,
            "shilov_max_deviation": shilov_dev,
        }));
    }
    Ok(Output::new(
        json!({ "normalized": domain.normalized(), "samples": samples, "factors": factors }),
        vec![prov(
            "normalized realization",
            "scale 1/sqrt(rank): Shilov boundary at Euclidean distance 1, dist(0, boundary) = 1/sqrt(rank)",
        )],
    ))
}

pub fn kobayashi(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let domain = input.domain()?;
    let z = input.point("z")?;
    if input.has("set") {
        let set = input.removed_set()?;
        let levels = input.opt::<usize>("levels")?.unwrap_or(4);
        let env = dist_to_set(&domain, &z, &set, levels, s.seed, s.tol)?;
        return Ok(Output::new(
            json!({ "value": env.value(), "degenerate": env.degenerate, "levels": env.levels }),
            vec![prov("distance to a set", "inf over S of K(z, w), sampled upper envelope, nonincreasing across levels")],
        ));
    }
    let w = if input.has("w") { input.point("w")? } else { vec![Complex::new(0.0, 0.0); z.len()] };
    let d = distance(&domain, &z, &w)?;
    Ok(Output::new(
        json!({ "value": d }),
        vec![prov("Kobayashi distance", "atanh |w|_D from the origin; Mobius distance on balls; max over product factors")],
    ))
}

pub fn squeeze_exact(input: &Input, _s: &Settings) -> Result<Output, CliError> {
    let b = exact_constant::<f64>(&input.domain()?);
    Ok(Output::new(serde_json::to_value(b).expect("serialisable"), vec![]))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AuxRequest {
    value: f64,
    rank: usize,
    direction: AuxDirection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExclusionRequest {
    s: f64,
    contractible: bool,
    pseudoconvex: bool,
    dim: usize,
}

pub fn squeeze_product(input: &Input, _s: &Settings) -> Result<Output, CliError> {
    let mut result = json!({});
    let mut provenance = Vec::new();
    let values: Option<Vec<f64>> = if input.has("values") {
        Some(input.get("values")?)
    } else if input.has("domain") || input.has("factors") {
        let d = input.domain()?;
        Some(d.factors().iter().map(|f| exact_constant::<f64>(&DomainSpec::single(*f)).lower).collect())
    } else {
        None
    };
    if let Some(values) = values {
        result["values"] = json!(values);
        result["lower"] = json!(product_lower_bound(&values)?);
        provenance.push(prov("product lower bound", "(sum 1/s_i^2)^(-1/2)"));
    }
    if let Some(a) = input.opt::<AuxRequest>("aux")? {
        let [lo, hi] = aux_conversion(a.value, a.rank, a.direction)?;
        result["aux"] = json!({ "value": a.value, "rank": a.rank, "direction": a.direction, "interval": [lo, hi] });
        provenance.push(prov("standard/auxiliary comparison", "s/sqrt(r) <= s_aux <= sqrt(r) s, capped at 1"));
    }
    if let Some(e) = input.opt::<ExclusionRequest>("exclusion")? {
        let hyp = ExclusionHypotheses { contractible: e.contractible, pseudoconvex: e.pseudoconvex, dim: e.dim };
        result["exclusion"] = json!({ "s": e.s, "diagnostics": product_exclusion(e.s, hyp)? });
        provenance.push(prov("product exclusion", "s > 1/sqrt(m) rules out m-factor products; hypotheses asserted, not verified"));
    }
    if provenance.is_empty() {
        return Err(CliError::Input("squeeze-product needs `values`, a domain, `aux` or `exclusion`".into()));
    }
    Ok(Output::new(result, provenance))
}

pub fn squeeze_removed(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let domain = input.domain()?;
    let z = input.point("z")?;
    let set = input.removed_set()?;
    let levels = input.opt::<usize>("levels")?.unwrap_or(4);
    let r = removed_set_bounds(&domain, &z, &set, levels, s.seed, s.tol)?;
    let mut result = serde_json::to_value(&r.bound).expect("serialisable");
    result["distance"] = serde_json::to_value(&r.distance).expect("serialisable");
    Ok(Output::new(result, vec![]))
}

pub fn squeeze_certify(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let domain = input.domain()?;
    let samples = s.samples.unwrap_or(4096);
    let poly = maximal_polydisk::<f64>(&domain);
    // F(x) = x / sqrt(sum_k s_k^2 r_k) maps D into the unit ball, and F(D)
    // contains the ball of radius min_k s_k / sqrt(sum_k s_k^2 r_k).
    let weight: f64 = domain.factors().iter().zip(domain.scales()).map(|(f, sc)| sc * sc * f.rank() as f64).sum();
    let norm = weight.sqrt();
    let min_scale = domain.scales().iter().copied().fold(f64::INFINITY, f64::min);
    let r = match input.opt::<f64>("R")? {
        Some(r) => r,
        None => min_scale / norm,
    };
    let schedule: Vec<f64> = input.opt("rho_schedule")?.unwrap_or_else(|| DEFAULT_RHO_SCHEDULE.to_vec());
    let cert = hardy_certificate(
        |x: &[Complex<f64>]| x.iter().map(|v| v / norm).collect(),
        |z: &[Complex<f64>]| poly.eval(z).expect("polydisc point has the domain rank"),
        poly.rank(),
        r,
        samples,
        &schedule,
    )?;
    let exact = exact_constant::<f64>(&domain);
    let mut result = serde_json::to_value(&cert).expect("serialisable");
    result["exact_constant"] = json!(exact.upper);
    result["matches_exact"] = json!((cert.conclusion - exact.upper).abs() <= s.tol);
    Ok(Output::new(
        result,
        vec![
            prov("Hardy-coefficient upper bound", "p R^2 <= sum of axis masses <= total mass <= 1 implies s_D(z) <= 1/sqrt(p)"),
            prov("maximal polydisc", format!("{} axis discs from the factor frames; F = x / {norm}", poly.rank())),
        ],
    ))
}

fn base_point(input: &Input) -> Result<(squeeze_core::Body, Vec<Complex<f64>>), CliError> {
    let (body, z0) = input.body()?;
    let z0 = z0.unwrap_or_else(|| body.interior_point().to_vec());
    Ok((body, z0))
}

pub fn wlc_frame(input: &Input, _s: &Settings) -> Result<Output, CliError> {
    let (body, z0) = base_point(input)?;
    let f = build_frame(&body, &z0)?;
    Ok(Output::new(
        serde_json::to_value(f.report()).expect("serialisable"),
        vec![prov("special coordinates", "Z = A Dscale U (x - z0), A lower triangular with unit diagonal")],
    ))
}

pub fn wlc_bound(input: &Input, _s: &Settings) -> Result<Output, CliError> {
    let (body, z0) = base_point(input)?;
    let f = build_frame(&body, &z0)?;
    let mut result = serde_json::to_value(koebe_bound(&f)).expect("serialisable");
    result["c"] = json!(f.c);
    result["z0"] = json!(il(&z0));
    result["residuals"] = serde_json::to_value(f.residuals).expect("serialisable");
    Ok(Output::new(result, vec![]))
}

pub fn scan(input: &Input, s: &Settings) -> Result<Output, CliError> {
    let (body, _) = input.body()?;
    let grid: Vec<Vec<Complex<f64>>> = match input.opt::<Vec<Vec<f64>>>("grid")? {
        Some(rows) => rows
            .iter()
            .map(|r| interleaved(r).ok_or_else(|| CliError::Input("grid points need [re, im, ...] pairs".into())))
            .collect::<Result<_, _>>()?,
        None => {
            let margin = input.opt::<f64>("margin")?.unwrap_or(1e-3);
            body.sample_interior(s.samples.unwrap_or(100), s.seed, margin)?
        }
    };
    let sc = hhr_scan(&body, &grid)?;
    let rows = grid
        .iter()
        .zip(&sc.bounds)
        .enumerate()
        .map(|(i, (z, b))| {
            let mut row = vec![i.to_string()];
            row.extend(il(z).iter().map(|v| v.to_string()));
            row.push(b.to_string());
            row
        })
        .collect();
    let mut header = vec!["index".to_string()];
    for i in 1..=body.dim() {
        header.push(format!("re_z{i}"));
        header.push(format!("im_z{i}"));
    }
    header.push("bound".to_string());
    let result = json!({
        "min_bound": sc.min_bound,
        "argmin": sc.argmin,
        "argmin_point": il(&grid[sc.argmin]),
        "points": grid.len(),
        "bounds": sc.bounds,
    });
    Ok(Output {
        result,
        provenance: vec![prov(
            "holomorphic homogeneous regularity scan",
            "min over the grid of c/(16 sqrt n); a sampled infimum only",
        )],
        table: Some((header, rows)),
        inconsistent: None,
    })
}
