//! The ten acceptance criteria, one PASS/FAIL line each. Runs as a plain
//! binary so the lines show up in `cargo test` output.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng as _;

use nibble::applications::latin::{latin_square, LatinKind};
use nibble::applications::patterns::{count_injections, is_t_avoiding, mad, Pattern};
use nibble::applications::rainbow::{is_rainbow_matching, RainbowInstance};
use nibble::applications::runs::{admit_pattern, rainbow_run, steiner_run, RunSettings};
use nibble::applications::steiner::{is_partial_steiner, SteinerInstance};
use nibble::coloring::decompose;
use nibble::generators::{near_regular, random_r_graph};
use nibble::matcher::{derive_params, run_pipeline, MatchReport, Overrides, PipelineState};
use nibble::oracle::lab::{
    concentration_lab, exact_expectation, expectation_by_enumeration, shipped_configs,
};
use nibble::oracle::{chromatic_index, enumerate_matchings};
use nibble::weights::vertex_cover_weight;
use nibble::{rng, ExactWeights, Hypergraph, Weights};

/// Calibrated regression constants.
const WEIGHT_TOLERANCE: f64 = 0.15;
const CHERRY_RATIO_CENTER: f64 = 0.78;
const CHERRY_BAND: f64 = 0.35;

const BIN: &str = env!("CARGO_BIN_EXE_nibble");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn single(seed: u64) -> Overrides {
    Overrides {
        seed: Some(seed),
        ..Overrides::single_slice()
    }
}

fn nibble(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn verify_with_cli(
    dir: &Path,
    id: usize,
    report_json: &str,
    instance: Option<&Hypergraph>,
) -> bool {
    let report = dir.join(format!("report-{id}.json"));
    std::fs::write(&report, report_json).unwrap();
    let mut args = vec![
        "verify".to_string(),
        "-r".into(),
        report.display().to_string(),
    ];
    if let Some(h) = instance {
        let path = dir.join(format!("instance-{id}.hgr"));
        std::fs::write(&path, h.to_hgr()).unwrap();
        args.extend(["-i".into(), path.display().to_string()]);
    }
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    nibble(&argv).status.success()
}

/// One finished run of the grid: Δ(H), Δ^c(H), r and the class count when
/// the whole instance was decomposed as a single slice.
struct GridRun {
    name: String,
    max_degree: usize,
    max_codegree: usize,
    r: usize,
    classes: Option<usize>,
}

fn criterion_1_and_3() -> (Outcome, Outcome) {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let mut runs: Vec<GridRun> = Vec::new();
    let mut invalid = Vec::new();
    let mut exhausted = 0usize;
    let mut id = 0usize;
    let mut record =
        |h: &Hypergraph, name: String, report: &MatchReport, valid: bool, single_slice: bool| {
            if !valid {
                invalid.push(name.clone());
            }
            let st = h.stats();
            runs.push(GridRun {
                name,
                max_degree: st.max_degree,
                max_codegree: st.max_codegree,
                r: h.r(),
                classes: single_slice.then_some(report.m),
            });
        };

    // random r-graphs; every third run uses two parts and two slices
    for (r, n, m, cap) in [(2, 120, 1000, 1), (3, 150, 1000, 2), (4, 200, 1000, 2)] {
        for i in 0..100u64 {
            let h = random_r_graph(r, n, m, cap, 1000 * r as u64 + i).unwrap();
            let ones = Weights::uniform(h.num_edges(), 1.0).unwrap();
            let split = i % 3 == 2;
            let overrides = if split {
                Overrides {
                    p: Some(2),
                    q: Some(2),
                    slack: Some(1.0),
                    seed: Some(i),
                    ..Overrides::default()
                }
            } else {
                single(i)
            };
            let params = derive_params(&h, 0.5, 1, &overrides).unwrap();
            match run_pipeline(&h, &[ones], &params) {
                Ok(report) => {
                    id += 1;
                    let valid = h.is_matching(&report.matching).unwrap()
                        && verify_with_cli(dir.path(), id, &report.to_json(), Some(&h));
                    record(&h, format!("random r={r} seed={i}"), &report, valid, !split);
                }
                Err(nibble::Error::RetriesExhausted { .. }) => exhausted += 1,
                Err(e) => panic!("random r={r} seed={i}: {e}"),
            }
        }
    }

    let steiner_grid = [
        (7, 15),
        (9, 15),
        (13, 15),
        (15, 10),
        (19, 10),
        (21, 10),
        (25, 8),
        (31, 5),
        (37, 4),
        (45, 4),
        (50, 4),
    ];
    let cherry = Pattern::new(3, vec![vec![0, 1, 2], vec![0, 3, 4]]).unwrap();
    for (n, count) in steiner_grid {
        let inst = SteinerInstance::new(n, 3, 2).unwrap();
        for seed in 0..count as u64 {
            let samples = (inst.hypergraph.num_edges() / 2).min(2000);
            let report = steiner_run(
                n,
                3,
                2,
                std::slice::from_ref(&cherry),
                samples,
                &RunSettings::new(single(seed)),
            )
            .unwrap();
            id += 1;
            let valid = inst
                .hypergraph
                .is_matching(&report.pipeline.matching)
                .unwrap()
                && is_partial_steiner(n, 2, &report.blocks)
                && verify_with_cli(
                    dir.path(),
                    id,
                    &serde_json::to_string(&report).unwrap(),
                    None,
                );
            record(
                &inst.hypergraph,
                format!("steiner n={n} seed={seed}"),
                &report.pipeline,
                valid,
                true,
            );
        }
    }

    let latin_grid = [(8, 25), (16, 25), (32, 25), (64, 15), (128, 10)];
    for (n, count) in latin_grid {
        for seed in 0..count as u64 {
            let kind = if seed % 2 == 0 {
                LatinKind::Cyclic
            } else {
                LatinKind::Random { seed }
            };
            let inst = RainbowInstance::from_latin(&latin_square(n, kind)).unwrap();
            let report = rainbow_run(&inst, &RunSettings::new(single(seed))).unwrap();
            id += 1;
            let valid = inst
                .hypergraph
                .is_matching(&report.pipeline.matching)
                .unwrap()
                && is_rainbow_matching(&report.matching)
                && verify_with_cli(
                    dir.path(),
                    id,
                    &serde_json::to_string(&report).unwrap(),
                    None,
                );
            record(
                &inst.hypergraph,
                format!("latin n={n} seed={seed}"),
                &report.pipeline,
                valid,
                true,
            );
        }
    }
    let elapsed = start.elapsed();

    let c1 = outcome(
        runs.len() >= 500 && invalid.is_empty() && elapsed <= Duration::from_secs(600),
        format!(
            "{} runs ({} more exhausted retries), {} invalid {:?}, {:.0?}",
            runs.len(),
            exhausted,
            invalid.len(),
            invalid.iter().take(3).collect::<Vec<_>>(),
            elapsed
        ),
    );

    // colouring quality on the single-slice runs, plus the certified optimum
    let mut eligible = 0usize;
    let mut bad = Vec::new();
    for run in &runs {
        let Some(k) = run.classes else { continue };
        let d = run.max_degree;
        if k > run.r * (d.max(1) - 1) + 1 {
            bad.push(format!("{}: {k} > r(Δ−1)+1", run.name));
        }
        if d >= 16 && (run.max_codegree as f64) <= (d as f64).sqrt() {
            eligible += 1;
            let cap = (1.2 * d as f64).ceil() as usize;
            if k > cap {
                bad.push(format!("{}: {k} > ⌈1.2·{d}⌉", run.name));
            }
        }
    }
    let fano = SteinerInstance::new(7, 3, 2).unwrap();
    let (optimum, _) = chromatic_index(&fano.hypergraph).unwrap();
    let achieved =
        decompose(&fano.hypergraph, 5, nibble::coloring::DEFAULT_EFFORT, 1).num_classes();
    let c3 = outcome(
        bad.is_empty() && achieved == optimum,
        format!(
            "{eligible} instances under the 1.2Δ cap, {} violations {:?}; (7,3,2): decompose {achieved}, optimum {optimum}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    );
    (c1, c3)
}

fn subset_filter(h: &Hypergraph) -> BTreeSet<Vec<usize>> {
    let m = h.num_edges();
    (0u32..1 << m)
        .map(|mask| (0..m).filter(|&e| mask >> e & 1 == 1).collect::<Vec<_>>())
        .filter(|s| h.is_matching(s).unwrap())
        .collect()
}

fn naive_injections(f: &Pattern, g_vertices: usize, g_edges: &[Vec<u32>]) -> u64 {
    let edges: HashSet<Vec<u32>> = g_edges
        .iter()
        .map(|e| {
            let mut e = e.clone();
            e.sort_unstable();
            e
        })
        .collect();
    let mut count = 0;
    let mut image = vec![0u32; f.num_vertices];
    fn go(
        f: &Pattern,
        at: usize,
        n: usize,
        image: &mut [u32],
        used: &mut Vec<bool>,
        edges: &HashSet<Vec<u32>>,
        count: &mut u64,
    ) {
        if at == f.num_vertices {
            let ok = f.edges.iter().all(|e| {
                let mut mapped: Vec<u32> = e.iter().map(|&v| image[v as usize]).collect();
                mapped.sort_unstable();
                edges.contains(&mapped)
            });
            *count += u64::from(ok);
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                image[at] = x as u32;
                go(f, at + 1, n, image, used, edges, count);
                used[x] = false;
            }
        }
    }
    go(
        f,
        0,
        g_vertices,
        &mut image,
        &mut vec![false; g_vertices],
        &edges,
        &mut count,
    );
    count
}

fn criterion_2() -> Outcome {
    let mut rng = rng::stream(2, "acceptance", &[]);
    let mut instances = Vec::new();
    let fano = SteinerInstance::new(7, 3, 2).unwrap();
    for start in [0, 11, 23] {
        let ids: Vec<usize> = (start..start + 12).collect();
        instances.push(fano.hypergraph.edge_subgraph(&ids).unwrap().graph);
    }
    for i in 0..200 {
        let r = 2 + i % 2;
        let n = rng.gen_range(r..=9);
        let cap = rng.gen_range(1..=3);
        let m = rng.gen_range(0..=12);
        if let Ok(h) = random_r_graph(r, n, m, cap, rng.gen()) {
            instances.push(h);
        }
    }
    let mut mismatches = 0;
    for h in &instances {
        let got: BTreeSet<Vec<usize>> = enumerate_matchings(h).unwrap().into_iter().collect();
        if got != subset_filter(h) {
            mismatches += 1;
        }
    }

    let mut inj_mismatches = 0;
    for _ in 0..100 {
        let k = 3;
        let fv = rng.gen_range(3..=5);
        let fe = rng.gen_range(1..=3);
        let f_edges: Vec<Vec<u32>> = (0..fe)
            .map(|_| {
                rand::seq::index::sample(&mut rng, fv, k)
                    .into_iter()
                    .map(|v| v as u32)
                    .collect()
            })
            .collect();
        let f = Pattern::new(k, f_edges).unwrap();
        let gv = rng.gen_range(k..=9);
        let ge = rng.gen_range(0..=14);
        let mut g_edges: Vec<Vec<u32>> = (0..ge)
            .map(|_| {
                let mut e: Vec<u32> = rand::seq::index::sample(&mut rng, gv, k)
                    .into_iter()
                    .map(|v| v as u32)
                    .collect();
                e.sort_unstable();
                e
            })
            .collect();
        g_edges.sort();
        g_edges.dedup();
        if count_injections(&f, gv, &g_edges).unwrap() != naive_injections(&f, gv, &g_edges) {
            inj_mismatches += 1;
        }
    }
    outcome(
        mismatches == 0 && inj_mismatches == 0,
        format!(
            "{} instances with m ≤ 12: {mismatches} mismatches; 100 injection cases: {inj_mismatches} mismatches",
            instances.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let h = near_regular(3, 3000, 60, 2, 4).unwrap();
    let v = h.num_vertices();
    let mut rng = rng::stream(4, "acceptance-cover", &[]);
    let mut weights = vec![Weights::uniform(h.num_edges(), 1.0).unwrap()];
    let mut covers: Vec<HashSet<u32>> = Vec::new();
    for _ in 0..10 {
        let size = rng.gen_range(v / 5..=v / 2);
        let mut u: Vec<usize> = (0..v).collect();
        u.shuffle(&mut rng);
        u.truncate(size);
        u.sort_unstable();
        weights.push(vertex_cover_weight(&h, &u).unwrap());
        covers.push(u.iter().map(|&x| x as u32).collect());
    }
    let seeds = 50;
    let mut passes = vec![0usize; weights.len()];
    let mut identity_ok = true;
    for seed in 0..seeds {
        let o = Overrides {
            tolerance: Some(WEIGHT_TOLERANCE),
            ..single(seed)
        };
        let params = derive_params(&h, 0.5, 1, &o).unwrap();
        let report = run_pipeline(&h, &weights, &params).unwrap();
        for (count, w) in passes.iter_mut().zip(&report.weights) {
            *count += usize::from(w.pass);
        }
        // ω_U(M) = |U ∩ V(M)| on every run
        let covered: HashSet<u32> = report
            .matching
            .iter()
            .flat_map(|&e| h.edge(e).iter().copied())
            .collect();
        identity_ok &= covers
            .iter()
            .zip(&report.weights[1..])
            .all(|(u, out)| u.intersection(&covered).count() as f64 == out.achieved);
    }
    let worst = passes.iter().copied().min().unwrap_or(0);
    outcome(
        worst * 10 >= seeds as usize * 9 && identity_ok,
        format!(
            "Δ={}, v={}, e={}: per-weight pass counts {:?} of {seeds}",
            h.max_degree(),
            v,
            h.num_edges(),
            passes
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut good = 0;
    let mut all_partial = true;
    let mut coverages = Vec::new();
    for seed in 0..20 {
        let report = steiner_run(45, 3, 2, &[], 2000, &RunSettings::new(single(seed))).unwrap();
        all_partial &= report.partial_steiner && is_partial_steiner(45, 2, &report.blocks);
        good += usize::from(report.blocks.len() as f64 >= 0.85 * 990.0 / 3.0);
        coverages.push(report.coverage);
    }
    let min = coverages.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        good >= 18 && all_partial,
        format!(
            "{good}/20 seeds cover ≥ 85% (lowest {min:.3}), all partial Steiner: {all_partial}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let cherry = Pattern::new(3, vec![vec![0, 1, 2], vec![0, 3, 4]]).unwrap();
    let filters_exact = is_t_avoiding(&cherry, 2)
        && mad(&cherry).unwrap() == num_rational::Ratio::new(6, 5)
        && admit_pattern(&cherry, 3, 2).is_ok()
        && admit_pattern(
            &Pattern::new(3, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap(),
            3,
            2,
        )
        .is_err()
        && admit_pattern(
            &Pattern::new(
                3,
                vec![
                    vec![0, 1, 2],
                    vec![0, 3, 4],
                    vec![0, 5, 6],
                    vec![1, 3, 5],
                    vec![1, 4, 6],
                    vec![2, 3, 6],
                    vec![2, 4, 5],
                ],
            )
            .unwrap(),
            3,
            2,
        )
        .is_err();
    let (lo, hi) = (
        CHERRY_RATIO_CENTER - CHERRY_BAND,
        CHERRY_RATIO_CENTER + CHERRY_BAND,
    );
    let mut inside = 0;
    let mut ratios = Vec::new();
    for seed in 0..20 {
        let report = steiner_run(
            50,
            3,
            2,
            std::slice::from_ref(&cherry),
            2000,
            &RunSettings::new(single(seed)),
        )
        .unwrap();
        let ratio = report.patterns[0].ratio;
        inside += usize::from((lo..=hi).contains(&ratio));
        ratios.push(ratio);
    }
    let (min, max) = ratios
        .iter()
        .fold((f64::INFINITY, 0f64), |(a, b), &x| (a.min(x), b.max(x)));
    outcome(
        inside >= 18 && filters_exact,
        format!("{inside}/20 ratios in [{lo:.2}, {hi:.2}] (observed {min:.3}..{max:.3}); filters exact: {filters_exact}"),
    )
}

fn criterion_7() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [32usize, 64, 128] {
        let inst = RainbowInstance::from_latin(&latin_square(n, LatinKind::Cyclic)).unwrap();
        let mut good = 0;
        let mut all_rainbow = true;
        let mut sizes = Vec::new();
        for seed in 0..20 {
            let report = rainbow_run(&inst, &RunSettings::new(single(seed))).unwrap();
            all_rainbow &= is_rainbow_matching(&report.matching) && report.rainbow;
            good += usize::from(report.size as f64 >= 0.9 * n as f64);
            sizes.push(report.size);
        }
        pass &= good >= 18 && all_rainbow;
        lines.push(format!(
            "n={n}: {good}/20 (sizes {}..{})",
            sizes.iter().min().unwrap(),
            sizes.iter().max().unwrap()
        ));
    }
    outcome(pass, lines.join("; "))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut lines = Vec::new();
    for config in shipped_configs() {
        let result = concentration_lab(&config).unwrap();
        let asserted = result.tails.iter().filter(|t| t.asserted).count();
        let mut exact = "n/a".to_string();
        if config.num_vertices <= 12 {
            let omega: ExactWeights = config.weight_function().unwrap();
            let same =
                expectation_by_enumeration(&omega, config.num_vertices, config.q, &config.alpha)
                    .unwrap()
                    == exact_expectation(&omega, config.q);
            pass &= same;
            exact = same.to_string();
        }
        pass &= result.mean_ok() && result.tails_ok() && result.trials >= 10_000;
        lines.push(format!(
            "{}: z={:.2}, {asserted} tail points asserted, ok={}, exact={exact}",
            result.name,
            result.mean_z,
            result.tails_ok()
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed <= Duration::from_secs(300);
    outcome(pass, format!("{} ({elapsed:.0?})", lines.join("; ")))
}

fn criterion_9() -> Outcome {
    // parts {0..3} and {4..7}; each slice holds two intersecting edges
    let edges = vec![
        vec![0, 1],
        vec![0, 2],
        vec![2, 3],
        vec![1, 3],
        vec![4, 5],
        vec![4, 6],
        vec![6, 7],
        vec![5, 7],
        vec![3, 4],
    ];
    let h = Hypergraph::new(2, 8, edges).unwrap();
    let vertex_part = vec![0, 0, 0, 0, 1, 1, 1, 1];
    let edge_part = vec![
        Some(0),
        Some(0),
        Some(0),
        Some(0),
        Some(1),
        Some(1),
        Some(1),
        Some(1),
        None,
    ];
    let edge_slice = vec![
        Some(0),
        Some(0),
        Some(1),
        Some(1),
        Some(0),
        Some(0),
        Some(1),
        Some(1),
        None,
    ];
    let classes = vec![
        vec![vec![vec![0], vec![1]], vec![vec![2], vec![3]]],
        vec![vec![vec![4], vec![5]], vec![vec![6], vec![7]]],
    ];
    let state = PipelineState::new(vertex_part, edge_part, edge_slice, classes).unwrap();
    let (q, m) = (state.q(), state.m());

    let draws = 100_000;
    let mut hits = vec![0usize; h.num_edges()];
    let mut rng = rng::stream(9, "acceptance-select", &[]);
    let mut all_valid = true;
    for _ in 0..draws {
        let (_, matching) = state.select(&mut rng);
        all_valid &= h.is_matching(&matching).unwrap();
        for e in matching {
            hits[e] += 1;
        }
    }
    let target = 1.0 / (q * m) as f64;
    let sigma = (target * (1.0 - target) / draws as f64).sqrt();
    let freqs: Vec<f64> = hits.iter().map(|&c| c as f64 / draws as f64).collect();
    let in_band = freqs[..8].iter().all(|f| (f - target).abs() <= 3.0 * sigma) && hits[8] == 0;

    // exhaustive over s-vectors: each edge in exactly qM^{p-1} of (qM)^p
    let mut exact = vec![0usize; h.num_edges()];
    for s0 in 0..q * m {
        for s1 in 0..q * m {
            for e in state.matching_for(&[s0, s1]) {
                exact[e] += 1;
            }
        }
    }
    let exact_ok = exact[..8].iter().all(|&c| c == q * m) && exact[8] == 0;
    outcome(
        (q, m) == (2, 2) && in_band && exact_ok && all_valid,
        format!(
            "q={q}, M={m}: frequencies {:.4}..{:.4} vs {target} ± {:.4}; enumeration exact: {exact_ok}",
            freqs[..8].iter().copied().fold(1.0, f64::min),
            freqs[..8].iter().copied().fold(0.0, f64::max),
            3.0 * sigma
        ),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let path = |name: &str| d.join(name).display().to_string();
    assert!(nibble(&[
        "gen",
        "random-r-graph",
        "--r",
        "3",
        "--n",
        "300",
        "--m",
        "3000",
        "--codegree",
        "2",
        "--seed",
        "7",
        "-o",
        &path("h.hgr")
    ])
    .status
    .success());
    let jobs: Vec<(&str, Vec<String>)> = vec![
        (
            "match single",
            vec![
                "match".into(),
                "-i".into(),
                path("h.hgr"),
                "--p".into(),
                "1".into(),
                "--q".into(),
                "1".into(),
            ],
        ),
        (
            "match split",
            [
                "match",
                "-i",
                &path("h.hgr"),
                "--p",
                "2",
                "--q",
                "3",
                "--slack",
                "1.5",
                "--seed",
                "3",
            ]
            .map(String::from)
            .to_vec(),
        ),
        (
            "steiner",
            [
                "steiner",
                "--n",
                "19",
                "--p",
                "1",
                "--q",
                "1",
                "--pair-samples",
                "500",
            ]
            .map(String::from)
            .to_vec(),
        ),
        (
            "rainbow",
            [
                "rainbow", "--n", "24", "--kind", "random", "--p", "1", "--q", "1",
            ]
            .map(String::from)
            .to_vec(),
        ),
        ("lab", vec!["lab".into()]),
    ];
    let mut differing = Vec::new();
    for (name, args) in &jobs {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "1"] {
            let out = path(&format!(
                "{}-{threads}-{}.json",
                name.replace(' ', "-"),
                outputs.len()
            ));
            let mut argv: Vec<&str> = args.iter().map(String::as_str).collect();
            argv.extend(["--threads", threads, "-o", &out]);
            let status = nibble(&argv).status;
            assert!(status.success(), "{name} with {threads} threads failed");
            outputs.push(std::fs::read(&out).unwrap());
        }
        // the environment variable caps threads the same way
        let out = path(&format!("{}-env.json", name.replace(' ', "-")));
        let mut argv: Vec<&str> = args.iter().map(String::as_str).collect();
        argv.extend(["-o", &out]);
        assert!(Command::new(BIN)
            .args(&argv)
            .env("NIBBLE_THREADS", "3")
            .status()
            .unwrap()
            .success());
        outputs.push(std::fs::read(&out).unwrap());
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            differing.push(*name);
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} jobs × 4 thread settings, differing: {differing:?}",
            jobs.len()
        ),
    )
}

fn main() {
    // `cargo test` passes harness flags such as --nocapture; a name
    // filter that matches nothing here skips the suite.
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    if !filter.is_empty() && !filter.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }
    let mut results: Vec<(usize, Outcome, Duration)> = Vec::new();
    let mut timed = |n: usize, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let d = t.elapsed();
        println!(
            "criterion {n:>2}: {}  {} [{d:.1?}]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((n, o, d));
    };
    let t = Instant::now();
    let (c1, c3) = criterion_1_and_3();
    let grid_time = t.elapsed();
    println!(
        "criterion  1: {}  {} [{grid_time:.1?}]",
        if c1.pass { "PASS" } else { "FAIL" },
        c1.detail
    );
    timed(2, &criterion_2);
    println!(
        "criterion  3: {}  {}",
        if c3.pass { "PASS" } else { "FAIL" },
        c3.detail
    );
    timed(4, &criterion_4);
    timed(5, &criterion_5);
    timed(6, &criterion_6);
    timed(7, &criterion_7);
    timed(8, &criterion_8);
    timed(9, &criterion_9);
    timed(10, &criterion_10);
    let failed: Vec<usize> = [(1, c1.pass), (3, c3.pass)]
        .into_iter()
        .chain(results.iter().map(|(n, o, _)| (*n, o.pass)))
        .filter(|&(_, p)| !p)
        .map(|(n, _)| n)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
