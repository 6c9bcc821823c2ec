//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every tolerance below is pinned.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeeze_core::kobayashi::{RemovedSet, SliceCoord};
use squeeze_core::phjts::{
    jordan_identity_residual, odd_power, orthogonality_defect, pierce_decompose, random_element,
    spectral_decompose, spectral_norm, CartanFactor,
};
use squeeze_core::squeezing::{
    aux_conversion, exact_constant, hardy_certificate, product_lower_bound, removed_set_bounds, AuxDirection,
};
use squeeze_core::symdomain::{frame, normalize_realization, sample_boundary, shilov_membership};
use squeeze_core::wlc::{ball_polytope, build_frame, hhr_scan, koebe_lower_bound, polydisk_polygon};
use squeeze_core::{Complex, DomainSpec, Element};

type C = Complex<f64>;

const SEED: u64 = 20240611;

const JORDAN_TOL: f64 = 1e-10;
const JORDAN_SAMPLES: usize = 1000;
const JORDAN_SECONDS: f64 = 10.0;

const SPECTRAL_TOL: f64 = 1e-9;
const SPECTRAL_SAMPLES: usize = 1000;
const ODD_POWER_P: i64 = 64;
const ODD_POWER_TOL: f64 = 1e-6;

const PIERCE_TOL: f64 = 1e-9;
const PIERCE_RANDOM: usize = 200;

const EXACT_TOL: f64 = 1e-12;

const BALL_EQUALITY_TOL: f64 = 1e-9;
const BALL_POINTS: usize = 50;
const SLICE_LEVELS: usize = 4;
const SLICE_BASE_SAMPLES: usize = 256;
const SLICE_TOL: f64 = 1e-3;

const HARDY_SAMPLES: usize = 4096;
const HARDY_RHO: f64 = 0.999;
const HARDY_MASS: [f64; 2] = [0.499, 0.5];
const HARDY_TOTAL: [f64; 2] = [0.998, 1.0];
const HARDY_SECONDS: f64 = 5.0;

const NORMALIZED_SAMPLES: usize = 10_000;
const NORMALIZED_TOL: f64 = 2e-3;
const SHILOV_TOL: f64 = 1e-8;

const WLC_RESIDUAL: f64 = 5e-3;
const WLC_C_RANGE: [f64; 2] = [0.995, 1.0];
const WLC_BOUND_TOL: f64 = 1e-3;
const WLC_BALL_C_TOL: f64 = 5e-3;
const WLC_SCAN_POINTS: usize = 100;
const WLC_SECONDS: f64 = 30.0;

const COMBINATOR_TOL: f64 = 1e-12;
const COMBINATOR_LISTS: usize = 20;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn suite_factors() -> Vec<CartanFactor> {
    vec![
        CartanFactor::type_i(2, 3).unwrap(),
        CartanFactor::type_ii(4).unwrap(),
        CartanFactor::type_iii(3).unwrap(),
        CartanFactor::type_iv(5).unwrap(),
    ]
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn jordan_identity() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for f in suite_factors() {
        for _ in 0..JORDAN_SAMPLES {
            let v: Vec<Element> = (0..5).map(|_| random_element(f, &mut rng)).collect();
            worst = worst.max(jordan_identity_residual(&v[0], &v[1], &v[2], &v[3], &v[4]).unwrap());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst < JORDAN_TOL && secs < JORDAN_SECONDS,
        format!("max residual {worst:.2e} (< {JORDAN_TOL:.0e}), {secs:.2} s (< {JORDAN_SECONDS} s)"),
    )
}

fn spectral() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut resid, mut orth, mut odd) = (0.0f64, 0.0f64, 0.0f64);
    let mut ordered = true;
    let k = 2 * ODD_POWER_P + 1;
    for f in suite_factors() {
        for _ in 0..SPECTRAL_SAMPLES {
            let x: Element = random_element(f, &mut rng);
            let d = spectral_decompose(&x, SPECTRAL_TOL).unwrap();
            resid = resid.max(d.residual);
            ordered &= d.lambdas.windows(2).all(|w| w[0] > w[1]) && d.lambdas.iter().all(|l| *l > 0.0);
            for i in 0..d.len() {
                for j in i + 1..d.len() {
                    orth = orth.max(orthogonality_defect(&d.tripotents[i], &d.tripotents[j]).unwrap());
                }
            }
            let estimate = odd_power(&x, k).unwrap().norm().powf(1.0 / k as f64);
            odd = odd.max((estimate - spectral_norm(&x)).abs());
        }
    }
    verdict(
        resid < SPECTRAL_TOL && ordered && orth < SPECTRAL_TOL && odd < ODD_POWER_TOL,
        format!(
            "residual {resid:.2e}, strict order {ordered}, orthogonality {orth:.2e} (< {SPECTRAL_TOL:.0e}); \
             odd power p = {ODD_POWER_P} max deviation {odd:.2e} (< {ODD_POWER_TOL:.0e})"
        ),
    )
}

fn pierce() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst = 0.0f64;
    let mut dims_ok = true;
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let mut check = |e: &Element, worst: &mut f64, dims_ok: &mut bool| match pierce_decompose(e, PIERCE_TOL) {
        Ok(p) => {
            for l in &p.eigenvalues {
                *worst = worst.max((l - l.round()).abs());
            }
            *dims_ok &= p.dims.iter().sum::<usize>() == e.factor().ambient_dim();
        }
        Err(err) => failures.push(format!("{}: {err}", e.factor())),
    };
    for f in suite_factors() {
        let fr: Vec<Element> = frame(f);
        let mut partial = Element::zero(f);
        for e in &fr {
            check(e, &mut worst, &mut dims_ok);
            partial = &partial + e;
            check(&partial, &mut worst, &mut dims_ok);
            checked += 2;
        }
        for _ in 0..PIERCE_RANDOM {
            let x: Element = random_element(f, &mut rng);
            for e in spectral_decompose(&x, SPECTRAL_TOL).unwrap().tripotents {
                check(&e, &mut worst, &mut dims_ok);
                checked += 1;
            }
        }
    }
    let ok = failures.is_empty() && worst < PIERCE_TOL && dims_ok;
    verdict(
        ok,
        format!(
            "{checked} tripotents, eigenvalue deviation {worst:.2e} (< {PIERCE_TOL:.0e}), dimension sums exact {dims_ok}{}",
            if failures.is_empty() { String::new() } else { format!(", errors: {}", failures.join("; ")) }
        ),
    )
}

fn exact_values() -> Verdict {
    let h = 1.0 / 2f64.sqrt();
    let mut cases: Vec<(String, DomainSpec, f64)> =
        (1..=4).map(|n| (format!("B^{n}"), DomainSpec::ball(n).unwrap(), 1.0)).collect();
    cases.push(("D^2".into(), DomainSpec::polydisc(2).unwrap(), h));
    cases.push(("I(2,2)".into(), DomainSpec::single(CartanFactor::type_i(2, 2).unwrap()), h));
    cases.push((
        "I(2,2)xIV(5)".into(),
        DomainSpec::new(vec![CartanFactor::type_i(2, 2).unwrap(), CartanFactor::type_iv(5).unwrap()]).unwrap(),
        0.5,
    ));
    let mut worst = 0.0f64;
    let mut all_exact = true;
    for (_, d, v) in &cases {
        let b = exact_constant::<f64>(d);
        all_exact &= b.exact;
        worst = worst.max((b.lower - v).abs()).max((b.upper - v).abs());
    }
    let d2 = exact_constant::<f64>(&DomainSpec::polydisc(2).unwrap()).lower;
    verdict(
        worst < EXACT_TOL && all_exact && (d2 - 0.707_106_78).abs() < 1e-8,
        format!("{} domains, max deviation {worst:.1e} (< {EXACT_TOL:.0e}), D^2 -> {d2:.8}", cases.len()),
    )
}

fn ball_equality() -> Verdict {
    let ball = DomainSpec::ball(2).unwrap();
    let origin = RemovedSet::<f64>::Points(vec![vec![c(0.0, 0.0); 2]]);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst = 0.0f64;
    let mut exact = true;
    for _ in 0..BALL_POINTS {
        let z: Vec<C> = loop {
            let z = vec![c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))];
            let n: f64 = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if n > 1e-3 && n < 0.99 {
                break z;
            }
        };
        let norm: f64 = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let b = removed_set_bounds(&ball, &z, &origin, 1, SEED, 1e-12).unwrap().bound;
        exact &= b.exact;
        worst = worst.max((b.lower - norm).abs()).max((b.upper - norm).abs());
    }
    let slice = RemovedSet::<f64>::Slice { coord: SliceCoord::Last, samples: SLICE_BASE_SAMPLES };
    let mut monotone = true;
    let mut slice_err = 0.0f64;
    for z in [[c(0.3, 0.1), c(0.2, -0.4)], [c(-0.5, 0.0), c(0.0, 0.3)], [c(0.1, 0.6), c(0.35, 0.2)]] {
        let r = removed_set_bounds(&ball, &z, &slice, SLICE_LEVELS, SEED, 1e-12).unwrap();
        let levels = &r.distance.levels;
        monotone &= levels.len() == SLICE_LEVELS && levels.windows(2).all(|w| w[1].value <= w[0].value);
        let closed = (z[1].norm() / (1.0 - z[0].norm_sqr()).sqrt()).atanh();
        slice_err = slice_err.max((r.distance.value() - closed).abs());
    }
    verdict(
        worst < BALL_EQUALITY_TOL && exact && monotone && slice_err < SLICE_TOL,
        format!(
            "S = {{0}}: max |s - |z|| {worst:.1e} (< {BALL_EQUALITY_TOL:.0e}), exact {exact}; \
             slice: monotone over {SLICE_LEVELS} levels {monotone}, finest error {slice_err:.2e} (< {SLICE_TOL:.0e})"
        ),
    )
}

fn hardy() -> Verdict {
    let start = Instant::now();
    let h = 1.0 / 2f64.sqrt();
    let cert = hardy_certificate(
        |x: &[C]| x.iter().map(|v| v * h).collect(),
        |z: &[C]| z.to_vec(),
        2,
        h,
        HARDY_SAMPLES,
        &[HARDY_RHO],
    )
    .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let masses_ok = cert.per_disc_mass.iter().all(|m| *m >= HARDY_MASS[0] && *m <= HARDY_MASS[1]);
    let total_ok = cert.total_mass >= HARDY_TOTAL[0] && cert.total_mass <= HARDY_TOTAL[1];
    let exact = exact_constant::<f64>(&DomainSpec::polydisc(2).unwrap()).upper;
    let conclusion_ok = (cert.conclusion - exact).abs() < EXACT_TOL;
    verdict(
        masses_ok && total_ok && cert.is_certified() && conclusion_ok && secs < HARDY_SECONDS,
        format!(
            "masses {:?}, total {:.6}, chain (with slack {:.2e}) {}, conclusion {:.8} vs exact {:.8}, {secs:.2} s",
            cert.per_disc_mass.iter().map(|m| format!("{m:.6}")).collect::<Vec<_>>(),
            cert.total_mass,
            cert.slack,
            cert.is_certified(),
            cert.conclusion,
            exact
        ),
    )
}

fn normalized_distances() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut ok = true;
    let mut parts = Vec::new();
    for f in [CartanFactor::type_i(2, 2).unwrap(), CartanFactor::type_iii(3).unwrap()] {
        let lam = normalize_realization(f);
        let d = DomainSpec::single(f);
        let target = 1.0 / (f.rank() as f64).sqrt();
        let (mut lo, mut hi, mut shilov_dev, mut shilov_count) = (f64::INFINITY, 0.0f64, 0.0f64, 0usize);
        for _ in 0..NORMALIZED_SAMPLES {
            let x: Element = sample_boundary(f, &mut rng);
            let dist = lam.apply(&x).norm();
            lo = lo.min(dist);
            hi = hi.max(dist);
            if shilov_membership(&d, x.coords(), 1e-9).unwrap() {
                shilov_count += 1;
                shilov_dev = shilov_dev.max((dist - 1.0).abs());
            }
        }
        ok &= (lo - target).abs() < NORMALIZED_TOL && (hi - 1.0).abs() < NORMALIZED_TOL;
        ok &= shilov_count > 0 && shilov_dev < SHILOV_TOL;
        parts.push(format!(
            "{f}: min {lo:.5} vs {target:.5}, sup {hi:.5}, {shilov_count} Shilov samples within {shilov_dev:.1e}"
        ));
    }
    verdict(ok, parts.join("; "))
}

fn wlc_pipeline() -> Verdict {
    let start = Instant::now();
    let poly = polydisk_polygon::<f64>(2, 64).unwrap();
    let ball = ball_polytope::<f64>(8, 32).unwrap();
    let zero = vec![c(0.0, 0.0); 2];
    let fp = build_frame(&poly, &zero).unwrap();
    let fb = build_frame(&ball, &zero).unwrap();
    let target = 1.0 / (16.0 * 2f64.sqrt());
    let s_poly = exact_constant::<f64>(&DomainSpec::polydisc(2).unwrap()).upper;
    let s_ball = exact_constant::<f64>(&DomainSpec::ball(2).unwrap()).upper;
    let grid = ball.sample_interior(WLC_SCAN_POINTS, SEED, 1e-3).unwrap();
    let scan = hhr_scan(&ball, &grid).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = fp.residuals.max() < WLC_RESIDUAL
        && fp.c >= WLC_C_RANGE[0]
        && fp.c <= WLC_C_RANGE[1]
        && (koebe_lower_bound(&fp) - target).abs() < WLC_BOUND_TOL
        && (fb.c - 1.0 / 2f64.sqrt()).abs() < WLC_BALL_C_TOL
        && koebe_lower_bound(&fp) <= s_poly
        && koebe_lower_bound(&fb) <= s_ball
        && scan.min_bound > 0.0
        && secs < WLC_SECONDS;
    verdict(
        pass,
        format!(
            "polydisk residual {:.1e}, c {:.6}, bound {:.6} vs {target:.6}; ball c {:.6}; scan min {:.4e} over {} points; {secs:.2} s",
            fp.residuals.max(),
            fp.c,
            koebe_lower_bound(&fp),
            fb.c,
            scan.min_bound,
            grid.len()
        ),
    )
}

fn combinators() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut worst = 0.0f64;
    for _ in 0..COMBINATOR_LISTS {
        let factors: Vec<CartanFactor> = (0..rng.gen_range(1..6))
            .map(|_| {
                let a = rng.gen_range(1..5);
                let b = rng.gen_range(a..6);
                match rng.gen_range(0..4) {
                    0 => CartanFactor::type_i(a, b).unwrap(),
                    1 => CartanFactor::type_ii(a + 1).unwrap(),
                    2 => CartanFactor::type_iii(a).unwrap(),
                    _ => CartanFactor::type_iv(a + 2).unwrap(),
                }
            })
            .collect();
        let parts: Vec<f64> = factors.iter().map(|f| exact_constant::<f64>(&DomainSpec::single(*f)).lower).collect();
        let combined = product_lower_bound(&parts).unwrap();
        let exact = exact_constant::<f64>(&DomainSpec::new(factors).unwrap()).lower;
        worst = worst.max((combined - exact).abs());
    }
    let mut round_trips = true;
    for _ in 0..1000 {
        let s: f64 = rng.gen_range(1e-6..=1.0);
        let r = rng.gen_range(1..16);
        for dir in [AuxDirection::StdToAux, AuxDirection::AuxToStd] {
            let back = match dir {
                AuxDirection::StdToAux => AuxDirection::AuxToStd,
                AuxDirection::AuxToStd => AuxDirection::StdToAux,
            };
            let [lo, hi] = aux_conversion(s, r, dir).unwrap();
            let [a, _] = aux_conversion(lo, r, back).unwrap();
            let [_, b] = aux_conversion(hi, r, back).unwrap();
            round_trips &= a <= s && s <= b;
        }
    }
    verdict(
        worst < COMBINATOR_TOL && round_trips,
        format!("{COMBINATOR_LISTS} factor lists, max deviation {worst:.1e} (< {COMBINATOR_TOL:.0e}); round trips contain value {round_trips}"),
    )
}

fn determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_sqz");
    let runs: Vec<(&str, &str, Vec<&str>)> = vec![
        ("jts-check", r#"{"factors":[{"kind":"I","p":2,"q":3},{"kind":"IV","n":5}]}"#, vec!["--samples", "50"]),
        ("spectral", r#"{"factor":{"kind":"II","n":5},"odd_power":8}"#, vec![]),
        ("rank", r#"{"kind":"IV","n":7}"#, vec![]),
        ("stratum", r#"{"domain":{"kind":"I","p":2,"q":2},"point":[1,0,0,0,0,0,0.5,0]}"#, vec![]),
        ("shilov", r#"{"domain":{"kind":"III","n":2},"point":[1,0,0,0,0,1]}"#, vec![]),
        ("normalize", r#"{"factors":[{"kind":"I","p":2,"q":2},{"kind":"III","n":3}]}"#, vec!["--samples", "2000"]),
        (
            "kobayashi",
            r#"{"domain":{"kind":"I","p":1,"q":2},"z":[0.3,0.1,0.2,-0.4],"set":{"kind":"slice","equation":"z_n=0","samples":64}}"#,
            vec![],
        ),
        ("squeeze-exact", r#"{"factors":[{"kind":"I","p":1,"q":1},{"kind":"I","p":1,"q":1}]}"#, vec![]),
        ("squeeze-product", r#"{"values":[1,0.5],"aux":{"value":0.5,"rank":4,"direction":"aux_to_std"}}"#, vec![]),
        (
            "squeeze-removed",
            r#"{"domain":{"kind":"I","p":1,"q":2},"z":[0.3,0,0,0],"set":{"kind":"ball","center":[0,0,0.1,0],"radius":0.05,"samples":32}}"#,
            vec![],
        ),
        ("squeeze-certify", r#"{"kind":"I","p":2,"q":2}"#, vec!["--samples", "1024"]),
        ("wlc-frame", r#"{"preset":"polydisk","n":2,"m":64}"#, vec![]),
        ("wlc-bound", r#"{"body":{"preset":"ball"},"z0":[0.2,0.1,-0.3,0]}"#, vec![]),
        ("hhr-scan", r#"{"preset":"ball","half_alpha":4,"phases":16}"#, vec!["--samples", "40"]),
    ];
    let mut bad = Vec::new();
    for (cmd, input, extra) in &runs {
        let run = || {
            Command::new(bin).arg(cmd).arg(input).args(["--seed", "7"]).args(extra).output().expect("sqz runs")
        };
        let (a, b) = (run(), run());
        if !(a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty()) {
            bad.push(format!("{cmd} ({:?})", a.status.code()));
        }
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} commands byte-identical across repeated runs", runs.len())
        } else {
            format!("differing or failing: {}", bad.join(", "))
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("Jordan identity", jordan_identity),
        ("spectral decomposition", spectral),
        ("Pierce decomposition", pierce),
        ("exact squeezing constants", exact_values),
        ("removed-set ball equality and slice envelope", ball_equality),
        ("Hardy certificate, polydisk reference", hardy),
        ("normalized boundary distances", normalized_distances),
        ("wlc pipeline", wlc_pipeline),
        ("bound combinators", combinators),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!("criterion {:>2} {}: {} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, name, v.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
