//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.
//!
//! The archived-study criterion runs only when `LEXISCREEN_ARCHIVED_DATA`
//! names a full-layout CSV; otherwise it is reported as skipped.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use lexiscreen_core::eval::{
    self, calibrate_threshold, confusion_at, cross_validate, cross_validate_scores,
    cross_validate_scores_with, evaluate_pooled, info_gain_values, question_importance, roc_auc,
    sweep, synth_generate, type_importance, ImportanceGroup, ThresholdChoice,
};
use lexiscreen_core::features::session_measures;
use lexiscreen_core::forest::{best_split, build_tree, train_with, Execution, TreeParams};
use lexiscreen_core::{
    read_dataset_csv, AgeVariant, FeatureMatrix, Measure, QuestionManifest, TrainConfig,
};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Ratio<i128>;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q(x: i64) -> Q {
    Q::from_integer(i128::from(x))
}

// ---------------------------------------------------------------- 1

fn feature_layout() -> Outcome {
    // 1-based feature ranges per question group, from the study's table of
    // feature blocks
    let groups: [(&[u8], (usize, usize)); 16] = [
        (&[1, 2, 3, 4], (5, 28)),
        (&[5, 6, 7, 8, 9], (29, 58)),
        (&[10, 11, 12, 13], (59, 82)),
        (&[14, 15, 16, 17], (83, 106)),
        (&[18, 19, 20, 21], (107, 130)),
        (&[22, 23], (131, 142)),
        (&[22], (131, 136)),
        (&[23], (137, 142)),
        (&[24], (143, 148)),
        (&[25], (149, 154)),
        (&[26], (155, 160)),
        (&[27, 28], (161, 172)),
        (&[27], (161, 166)),
        (&[28], (167, 172)),
        (&[29], (173, 178)),
        (&[30], (179, 184)),
    ];
    let v = AgeVariant::Full;
    let range_of = |qids: &[u8]| -> Option<(usize, usize)> {
        let first = v.feature_index(qids[0], Measure::Clicks)? + 1;
        let last = v.feature_index(*qids.last()?, Measure::Missrate)? + 1;
        Some((first, last))
    };
    for (qids, expected) in groups.iter().chain([(&[31u8, 32][..], (185, 196))].iter()) {
        let got = range_of(qids).ok_or("question missing from full layout")?;
        check(
            got == *expected,
            format!("{qids:?}: {got:?} != {expected:?}"),
        )?;
    }
    check(
        (1..=4).all(|i| {
            matches!(
                v.describe(i - 1),
                Some(lexiscreen_core::variant::FeatureSlot::Demographic(_))
            )
        }),
        "features 1-4 are not demographic",
    )?;
    let counts: Vec<usize> = [
        AgeVariant::Full,
        AgeVariant::Young7_8,
        AgeVariant::Mid9_11,
        AgeVariant::Teen12_17,
    ]
    .iter()
    .map(|v| v.feature_count())
    .collect();
    check(
        counts == [196, 118, 166, 190],
        format!("variant widths {counts:?}"),
    )?;
    let young: Vec<u8> = AgeVariant::Young7_8.qids().to_vec();
    check(
        young
            == [
                1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 14, 15, 16, 17, 22, 23, 30,
            ],
        format!("young qids {young:?}"),
    )?;
    Ok("17 feature ranges and 4 variant widths".into())
}

// ---------------------------------------------------------------- 2

fn measure_identities() -> Outcome {
    let manifest = QuestionManifest::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let variants = AgeVariant::ALL;
    let mut questions = 0usize;
    for s in 0..1000 {
        let variant = variants[s % variants.len()];
        let (log, intended) = common::random_session(&mut rng, variant, &manifest);
        let measures = session_measures(&log, &manifest).map_err(|e| e.to_string())?;
        for (m, want) in measures.iter().zip(&intended) {
            questions += 1;
            let c = f64::from(m.clicks);
            check(
                (m.clicks, m.hits, m.misses) == (want.clicks, want.hits, want.misses),
                format!("session {s} Q{}: {m:?} vs scripted {want:?}", m.qid),
            )?;
            check(
                m.hits + m.misses <= m.clicks,
                format!("Q{}: hits+misses > clicks", m.qid),
            )?;
            check(m.score == m.hits, format!("Q{}: score != hits", m.qid))?;
            check(
                (m.accuracy * c - f64::from(m.hits)).abs() <= 1e-12,
                format!("Q{}: accuracy*clicks != hits", m.qid),
            )?;
            check(
                (m.missrate * c - f64::from(m.misses)).abs() <= 1e-12,
                format!("Q{}: missrate*clicks != misses", m.qid),
            )?;
        }
    }
    Ok(format!("1000 sessions, {questions} questions"))
}

// ---------------------------------------------------------------- 3

fn weighted_vs_duplication() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..200 {
        let n_rows = rng.gen_range(2..=12);
        let n_cols = rng.gen_range(1..=4);
        let rows: Vec<Vec<f64>> = (0..n_rows)
            .map(|_| {
                (0..n_cols)
                    .map(|_| f64::from(rng.gen_range(0..5)))
                    .collect()
            })
            .collect();
        let labels: Vec<bool> = (0..n_rows).map(|_| rng.gen_bool(0.5)).collect();
        let weights: Vec<u32> = (0..n_rows).map(|_| rng.gen_range(1..=4)).collect();

        let matrix = FeatureMatrix::from_rows(n_cols, &rows).map_err(|e| e.to_string())?;
        let idx: Vec<usize> = (0..n_rows).collect();
        let w: Vec<f64> = weights.iter().map(|&k| f64::from(k)).collect();

        let mut dup_rows = Vec::new();
        let mut dup_labels = Vec::new();
        for (i, &k) in weights.iter().enumerate() {
            for _ in 0..k {
                dup_rows.push(rows[i].clone());
                dup_labels.push(labels[i]);
            }
        }
        let dup_matrix = FeatureMatrix::from_rows(n_cols, &dup_rows).map_err(|e| e.to_string())?;
        let dup_idx: Vec<usize> = (0..dup_rows.len()).collect();
        let ones = vec![1.0; dup_rows.len()];

        let params = TreeParams {
            max_depth: if case % 3 == 0 { Some(2) } else { None },
            mtry: rng.gen_range(1..=n_cols),
            min_node_weight: 1.0,
        };
        let seed = rng.gen::<u64>();
        let a = build_tree(
            &matrix,
            &labels,
            &idx,
            &w,
            &params,
            &mut ChaCha8Rng::seed_from_u64(seed),
        );
        let b = build_tree(
            &dup_matrix,
            &dup_labels,
            &dup_idx,
            &ones,
            &params,
            &mut ChaCha8Rng::seed_from_u64(seed),
        );
        check(
            a == b,
            format!("case {case}: weighted tree {a:?} != duplicated tree {b:?}"),
        )?;
    }
    Ok("200 datasets, trees identical".into())
}

// ---------------------------------------------------------------- 4

struct Instance {
    values: Vec<Vec<i64>>,
    labels: Vec<bool>,
    weights: Vec<i64>,
}

fn random_instance<R: Rng>(rng: &mut R, n_cols: usize) -> Instance {
    loop {
        let n = rng.gen_range(2..=10);
        let labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        if labels.iter().all(|&y| y) || labels.iter().all(|&y| !y) {
            continue;
        }
        return Instance {
            values: (0..n)
                .map(|_| (0..n_cols).map(|_| rng.gen_range(0..6)).collect())
                .collect(),
            labels,
            weights: (0..n).map(|_| rng.gen_range(1..=5)).collect(),
        };
    }
}

fn gini_q(pos: Q, neg: Q) -> Q {
    let w = pos + neg;
    let (p, n) = (pos / w, neg / w);
    q(1) - p * p - n * n
}

/// Best (feature, doubled threshold, gain) by trying every cut of every
/// feature; thresholds are kept doubled so they stay integral.
fn split_oracle(inst: &Instance) -> Option<(usize, i64, Q)> {
    let n_cols = inst.values[0].len();
    let mass = |pick: &dyn Fn(usize) -> bool| {
        let (mut p, mut n) = (q(0), q(0));
        for i in 0..inst.labels.len() {
            if pick(i) {
                if inst.labels[i] {
                    p += q(inst.weights[i]);
                } else {
                    n += q(inst.weights[i]);
                }
            }
        }
        (p, n)
    };
    let (pos, neg) = mass(&|_| true);
    let total = pos + neg;
    let parent = gini_q(pos, neg);
    let mut best: Option<(usize, i64, Q)> = None;
    for f in 0..n_cols {
        let distinct: BTreeSet<i64> = inst.values.iter().map(|r| r[f]).collect();
        let distinct: Vec<i64> = distinct.into_iter().collect();
        for pair in distinct.windows(2) {
            let t2 = pair[0] + pair[1];
            let (lp, ln) = mass(&|i| 2 * inst.values[i][f] <= t2);
            let (rp, rn) = (pos - lp, neg - ln);
            let gain =
                parent - (lp + ln) / total * gini_q(lp, ln) - (rp + rn) / total * gini_q(rp, rn);
            if gain > q(0) && best.as_ref().is_none_or(|b| gain > b.2) {
                best = Some((f, t2, gain));
            }
        }
    }
    best
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn info_gain_oracle(values: &[i64], labels: &[bool]) -> f64 {
    let h = |rows: &[usize]| -> f64 {
        let n = rows.len() as f64;
        if rows.is_empty() {
            return 0.0;
        }
        let p = rows.iter().filter(|&&i| labels[i]).count() as f64 / n;
        [p, 1.0 - p]
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -x * x.log2())
            .sum()
    };
    let all: Vec<usize> = (0..values.len()).collect();
    let base = h(&all);
    let n = values.len() as f64;
    let mut best = 0.0f64;
    let cuts: BTreeSet<i64> = values.iter().copied().collect();
    for &c in &cuts {
        let left: Vec<usize> = all.iter().copied().filter(|&i| values[i] <= c).collect();
        let right: Vec<usize> = all.iter().copied().filter(|&i| values[i] > c).collect();
        if right.is_empty() {
            continue;
        }
        let cond = (left.len() as f64 * h(&left) + right.len() as f64 * h(&right)) / n;
        best = best.max(base - cond);
    }
    best
}

fn auc_oracle(scores: &[i64], labels: &[bool], weights: &[i64]) -> Q {
    let (mut num, mut pos, mut neg) = (q(0), q(0), q(0));
    for i in 0..scores.len() {
        if labels[i] {
            pos += q(weights[i]);
        } else {
            neg += q(weights[i]);
        }
    }
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] && !labels[j] {
                let w = q(weights[i] * weights[j]);
                if scores[i] > scores[j] {
                    num += w;
                } else if scores[i] == scores[j] {
                    num += w / q(2);
                }
            }
        }
    }
    num / (pos * neg)
}

/// Minimum |FNR - FPR| over the 0.005 grid and every score midpoint, with
/// scores and weights exact; the smallest minimising threshold wins.
fn calibrate_oracle(scores_milli: &[i64], labels: &[bool], weights: &[i64]) -> (Q, Q) {
    // thresholds as exact rationals of the form k/2000
    let mut cands: BTreeSet<Q> = (1..200).map(|i| Q::new(i, 200)).collect();
    let distinct: BTreeSet<i64> = scores_milli.iter().copied().collect();
    let distinct: Vec<i64> = distinct.into_iter().collect();
    for p in distinct.windows(2) {
        cands.insert(Q::new(i128::from(p[0] + p[1]), 2000));
    }
    let mut pos = q(0);
    let mut neg = q(0);
    for i in 0..labels.len() {
        if labels[i] {
            pos += q(weights[i]);
        } else {
            neg += q(weights[i]);
        }
    }
    let mut best: Option<(Q, Q)> = None;
    for t in cands {
        let (mut fn_, mut fp) = (q(0), q(0));
        for i in 0..labels.len() {
            let positive = Q::new(i128::from(scores_milli[i]), 1000) >= t;
            if labels[i] && !positive {
                fn_ += q(weights[i]);
            }
            if !labels[i] && positive {
                fp += q(weights[i]);
            }
        }
        let gap = fn_ / pos - fp / neg;
        let gap = if gap < q(0) { -gap } else { gap };
        if best.as_ref().is_none_or(|b| gap < b.1) {
            best = Some((t, gap));
        }
    }
    best.expect("grid is never empty")
}

fn brute_force_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..100 {
        // best_split
        let n_cols = rng.gen_range(1..=3);
        let inst = random_instance(&mut rng, n_cols);
        let rows: Vec<Vec<f64>> = inst
            .values
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect();
        let matrix = FeatureMatrix::from_rows(n_cols, &rows).map_err(|e| e.to_string())?;
        let idx: Vec<usize> = (0..rows.len()).collect();
        let w: Vec<f64> = inst.weights.iter().map(|&k| k as f64).collect();
        let features: Vec<usize> = (0..n_cols).collect();
        let got = best_split(&matrix, &inst.labels, &idx, &w, &features);
        match (got, split_oracle(&inst)) {
            (None, None) => {}
            (Some(s), Some((f, t2, gain))) => {
                check(
                    s.feature == f && s.threshold == t2 as f64 / 2.0,
                    format!(
                        "case {case}: split ({}, {}) vs oracle ({f}, {})",
                        s.feature,
                        s.threshold,
                        t2 as f64 / 2.0
                    ),
                )?;
                check(
                    (s.gain - to_f64(gain)).abs() <= 1e-9,
                    format!("case {case}: gain {} vs {}", s.gain, to_f64(gain)),
                )?;
            }
            (a, b) => return Err(format!("case {case}: split {a:?} vs oracle {b:?}")),
        }

        // info_gain
        let inst = random_instance(&mut rng, 1);
        let col: Vec<i64> = inst.values.iter().map(|r| r[0]).collect();
        let colf: Vec<f64> = col.iter().map(|&v| v as f64).collect();
        let got = info_gain_values(&colf, &inst.labels).map_err(|e| e.to_string())?;
        let want = info_gain_oracle(&col, &inst.labels);
        check(
            (got - want).abs() <= 1e-9,
            format!("case {case}: info gain {got} vs {want}"),
        )?;

        // roc_auc
        let inst = random_instance(&mut rng, 1);
        let scores: Vec<i64> = inst.values.iter().map(|r| r[0]).collect();
        let sf: Vec<f64> = scores.iter().map(|&v| v as f64 / 5.0).collect();
        let wf: Vec<f64> = inst.weights.iter().map(|&k| k as f64).collect();
        let got = roc_auc(&sf, &inst.labels, &wf).map_err(|e| e.to_string())?;
        let want = to_f64(auc_oracle(&scores, &inst.labels, &inst.weights));
        check(
            (got - want).abs() <= 1e-9,
            format!("case {case}: auc {got} vs {want}"),
        )?;

        // calibrate_threshold
        let inst = random_instance(&mut rng, 1);
        let milli: Vec<i64> = (0..inst.labels.len())
            .map(|_| rng.gen_range(0..=1000))
            .collect();
        let sf: Vec<f64> = milli.iter().map(|&m| m as f64 / 1000.0).collect();
        let wf: Vec<f64> = inst.weights.iter().map(|&k| k as f64).collect();
        let got = calibrate_threshold(&sf, &inst.labels, &wf).map_err(|e| e.to_string())?;
        let (t, gap) = calibrate_oracle(&milli, &inst.labels, &inst.weights);
        check(
            (got.threshold - to_f64(t)).abs() <= 1e-9 && (got.gap - to_f64(gap)).abs() <= 1e-9,
            format!(
                "case {case}: threshold {} gap {} vs oracle {} {}",
                got.threshold,
                got.gap,
                to_f64(t),
                to_f64(gap)
            ),
        )?;
    }
    Ok("100 instances each for best_split, info_gain, roc_auc, calibrate_threshold".into())
}

// ---------------------------------------------------------------- 5

fn separable_end_to_end() -> Outcome {
    let config = TrainConfig {
        n_trees: 200,
        seed: 5,
        ..TrainConfig::default()
    };
    let data = synth_generate(2000, 0.108, 1.0, 5, AgeVariant::Full).map_err(|e| e.to_string())?;
    let r = cross_validate(&data, &config, 10, 5).map_err(|e| e.to_string())?;
    check(
        r.weighted.recall_dys >= 0.98,
        format!("recall(dys) {}", r.weighted.recall_dys),
    )?;
    check(r.roc_auc >= 0.99, format!("separable AUC {}", r.roc_auc))?;

    let noise = synth_generate(2000, 0.108, 0.0, 5, AgeVariant::Full).map_err(|e| e.to_string())?;
    let n = cross_validate(&noise, &config, 10, 5).map_err(|e| e.to_string())?;
    check(
        (0.45..=0.55).contains(&n.roc_auc),
        format!("indistinguishable classes gave AUC {}", n.roc_auc),
    )?;
    Ok(format!(
        "separable recall(dys) {:.4} AUC {:.4}; no-signal AUC {:.4}",
        r.weighted.recall_dys, r.roc_auc, n.roc_auc
    ))
}

// ---------------------------------------------------------------- 6

fn monotonicity_and_determinism() -> Outcome {
    let data = synth_generate(400, 0.2, 0.3, 6, AgeVariant::Mid9_11).map_err(|e| e.to_string())?;
    let config = TrainConfig {
        n_trees: 40,
        seed: 6,
        ..TrainConfig::default()
    };

    let pooled = cross_validate_scores(&data, &config, 5, 6).map_err(|e| e.to_string())?;
    let weights = vec![1.0; pooled.scores.len()];
    let mut grid: Vec<f64> = (0..=200).map(|i| f64::from(i) / 200.0).collect();
    grid.extend(pooled.scores.iter().copied());
    grid.sort_by(f64::total_cmp);
    let mut prev: Option<(Vec<bool>, f64, f64)> = None;
    for &t in &grid {
        let flagged: Vec<bool> = pooled.scores.iter().map(|&s| s >= t).collect();
        let c =
            confusion_at(&pooled.scores, &pooled.labels, &weights, t).map_err(|e| e.to_string())?;
        if let Some((p, rec_dys, rec_non)) = &prev {
            check(
                flagged.iter().zip(p).all(|(&now, &before)| !now || before),
                format!("positive set grew when raising the threshold to {t}"),
            )?;
            check(
                c.recall_pos() <= *rec_dys,
                format!("recall(dys) rose at {t}"),
            )?;
            check(
                c.recall_neg() >= *rec_non,
                format!("recall(nodys) fell at {t}"),
            )?;
        }
        prev = Some((flagged, c.recall_pos(), c.recall_neg()));
    }

    let a = train_with(&data, &config, Execution::Parallel).map_err(|e| e.to_string())?;
    let b = train_with(&data, &config, Execution::Parallel).map_err(|e| e.to_string())?;
    let s = train_with(&data, &config, Execution::Serial).map_err(|e| e.to_string())?;
    check(
        a.to_bytes() == b.to_bytes(),
        "two parallel runs gave different model bytes",
    )?;
    check(
        a.to_bytes() == s.to_bytes(),
        "parallel and serial model bytes differ",
    )?;

    let r1 = cross_validate(&data, &config, 5, 6).map_err(|e| e.to_string())?;
    let r2 = cross_validate(&data, &config, 5, 6).map_err(|e| e.to_string())?;
    let serial = cross_validate_scores_with(&data, &config, 5, 6, Execution::Serial)
        .and_then(|p| evaluate_pooled(&p, ThresholdChoice::default()))
        .map_err(|e| e.to_string())?;
    let j = |r: &eval::EvaluationReport| serde_json::to_string(r).expect("report serializes");
    check(j(&r1) == j(&r2), "report JSON differs between runs")?;
    check(
        j(&r1) == j(&serial),
        "report JSON differs between parallel and serial",
    )?;
    Ok(format!(
        "{} thresholds monotone; model and report bytes stable",
        grid.len()
    ))
}

// ---------------------------------------------------------------- 7

fn depth_plateau() -> Outcome {
    let data = synth_generate(2000, 0.108, 0.15, 7, AgeVariant::Full).map_err(|e| e.to_string())?;
    let base = TrainConfig {
        n_trees: 200,
        seed: 7,
        ..TrainConfig::default()
    };
    let cells = sweep(&data, &base, &[20, 100], &[8], 10, 7).map_err(|e| e.to_string())?;
    let (d20, d100) = (cells[0].roc_auc, cells[1].roc_auc);
    check(
        d20 >= d100 - 0.01,
        format!("ROC depth 20 {d20:.4} < depth 100 {d100:.4} - 0.01"),
    )?;
    Ok(format!("ROC depth 20 {d20:.4}, depth 100 {d100:.4}"))
}

// ---------------------------------------------------------------- 8

const ARCHIVED_ENV: &str = "LEXISCREEN_ARCHIVED_DATA";

fn archived_study(path: std::ffi::OsString) -> Outcome {
    let data = read_dataset_csv(&path, AgeVariant::Full).map_err(|e| e.to_string())?;
    let config = TrainConfig::default();
    let pooled =
        cross_validate_scores(&data, &config, 10, config.seed).map_err(|e| e.to_string())?;
    let r = evaluate_pooled(&pooled, ThresholdChoice::Fixed(0.24)).map_err(|e| e.to_string())?;
    let pct = |x: f64| 100.0 * x;
    let within = |got: f64, want: f64, tol: f64, what: &str| {
        check(
            (got - want).abs() <= tol,
            format!("{what} {got:.3} not within {tol} of {want}"),
        )
    };
    within(pct(r.balanced_accuracy), 79.4, 2.0, "balanced accuracy")?;
    within(pct(r.weighted.recall_dys), 80.4, 3.0, "recall(dys)")?;
    within(pct(r.weighted.precision_dys), 79.7, 3.0, "precision(dys)")?;
    within(r.roc_auc, 0.871, 0.015, "ROC")?;
    within(
        pct((r.weighted.recall_dys + r.weighted.recall_nodys) / 2.0),
        pct(r.balanced_accuracy),
        0.1,
        "balanced-accuracy identity",
    )?;
    within(pct(r.trivial_accuracy), 89.2, 0.1, "trivial accuracy")?;

    let cell = sweep(&data, &config, &[20], &[14], 10, config.seed).map_err(|e| e.to_string())?;
    within(cell[0].roc_auc, 0.875, 0.01, "sweep depth 20 / mtry 14 ROC")?;

    let qi = question_importance(&data).map_err(|e| e.to_string())?;
    let mut question_means: Vec<f64> = qi
        .iter()
        .filter(|g| matches!(g.group, ImportanceGroup::Question(_)))
        .map(|g| g.mean_gain)
        .collect();
    question_means.sort_by(f64::total_cmp);
    let median = question_means[question_means.len() / 2];
    for g in &qi {
        if let ImportanceGroup::Question(q) = g.group {
            if q <= 9 {
                check(
                    g.mean_gain > median,
                    format!("Q{q} is not above the median question"),
                )?;
            }
        }
    }
    let ti = type_importance(&data).map_err(|e| e.to_string())?;
    let demog = ti
        .iter()
        .find(|g| g.group == ImportanceGroup::Demographics)
        .ok_or("no demographic group")?;
    check(
        ti.iter().all(|g| g.mean_gain >= demog.mean_gain),
        "demographics are not the lowest type aggregate",
    )?;
    Ok(format!(
        "accuracy {:.1} recall {:.1} precision {:.1} ROC {:.3}",
        pct(r.balanced_accuracy),
        pct(r.weighted.recall_dys),
        pct(r.weighted.precision_dys),
        r.roc_auc
    ))
}

// ----------------------------------------------------------------

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let over = elapsed > budget;
    let ok = outcome.is_ok() && !over;
    let detail = match &outcome {
        Ok(s) => s.clone(),
        Err(e) => e.clone(),
    };
    let timing = if over {
        format!("{elapsed:.1?}, over the {budget:?} budget")
    } else {
        format!("{elapsed:.1?}")
    };
    println!(
        "criterion {id}: {} {name} ({timing}): {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn main() {
    // answer `--list` probes from test runners without running anything
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut ok = true;
    ok &= run(1, "feature layout", Duration::from_secs(1), feature_layout);
    ok &= run(
        2,
        "measure identities",
        Duration::from_secs(10),
        measure_identities,
    );
    ok &= run(
        3,
        "weighted vs duplicated trees",
        Duration::from_secs(30),
        weighted_vs_duplication,
    );
    ok &= run(
        4,
        "brute-force oracles",
        Duration::from_secs(60),
        brute_force_oracles,
    );
    ok &= run(
        5,
        "separable synthetic end-to-end",
        Duration::from_secs(300),
        separable_end_to_end,
    );
    ok &= run(
        6,
        "monotonicity and determinism",
        Duration::from_secs(120),
        monotonicity_and_determinism,
    );
    ok &= run(7, "depth plateau", Duration::from_secs(600), depth_plateau);
    match std::env::var_os(ARCHIVED_ENV) {
        Some(path) => ok &= run(8, "archived study", Duration::from_secs(3600), || archived_study(path)),
        None => println!("criterion 8: SKIPPED archived study (set {ARCHIVED_ENV} to a full-layout CSV to run it)"),
    }
    if !ok {
        std::process::exit(1);
    }
}
