//! Acceptance gate: one PASS/FAIL line per criterion on stderr, non-zero
//! exit if any fails. Runs without the test harness so the report is
//! always visible.

mod common;
#[path = "../../core/tests/support/partition_oracle.rs"]
mod partition_oracle;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use grec::io::parse_csv;
use grec::server::{router, AppState};
use grec_core::decoration::DecorationModel;
use grec_core::geom::BBox;
use grec_core::grec::{
    build_distance_matrix, deconstruct, extract_common_relationship, Channel, DistanceMatrix,
    Gravity, GrecTemplate, NodeKind, RelationCategory as R,
};
use grec_core::render::{
    check_round_trip, corpus_specs, generate_synthetic_chart, grouped_bar_stress, heatmap_stress,
    mutation_specs, Archetype, ChartSpec, SvgVariant,
};
use grec_core::reuse::{check_compatibility, generate_sample_data, infer_schema, ReuseSession};
use grec_core::{deconstruct_svg, Config, NormalizedScene, SceneElement, Style};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scene(rects: &[(f64, f64, f64, f64, &str)]) -> NormalizedScene {
    let elements = rects
        .iter()
        .enumerate()
        .map(|(i, &(x, y, w, h, fill))| {
            SceneElement::rect(
                i,
                BBox::new(x, y, w, h),
                Style {
                    fill: fill.to_string(),
                    ..Style::default()
                },
            )
        })
        .collect();
    NormalizedScene {
        elements,
        view_box: BBox::new(0.0, 0.0, 800.0, 600.0),
        ..NormalizedScene::default()
    }
}

fn boxes(rects: &[(f64, f64, f64, f64, &str)]) -> Vec<BBox> {
    rects
        .iter()
        .map(|&(x, y, w, h, _)| BBox::new(x, y, w, h))
        .collect()
}

fn run(rects: &[(f64, f64, f64, f64, &str)]) -> GrecTemplate {
    deconstruct(&scene(rects), DecorationModel::empty(), &Config::default())
        .expect("non-empty scene")
}

fn shape(t: &GrecTemplate) -> Vec<(NodeKind, Option<R>)> {
    t.summary()
        .levels
        .into_iter()
        .map(|l| (l.kind, l.category))
        .collect()
}

/// Checks that cell (i, j), numbered from 1, carries `label` among its
/// categories.
fn cell(m: &DistanceMatrix, i: usize, j: usize, label: &str) -> Result<(), String> {
    let got = m.get(i - 1, j - 1).label();
    ensure(got.split(',').any(|l| l == label), || {
        format!("cell ({i},{j}) is {got}, want {label}")
    })
}

fn group_boxes(t: &GrecTemplate) -> Vec<BBox> {
    t.root.children.iter().map(|c| c.bbox).collect()
}

const G: &str = "#999999";
const A: &str = "#1f77b4";
const B: &str = "#ff7f0e";
const C: &str = "#2ca02c";

/// Two rows of five abutting segments; the first segments of both rows end
/// at the same x so their union is clear of other rects.
fn diverging_rows() -> Result<(), String> {
    let rows = [
        [40.0, 30.0, 50.0, 20.0, 35.0],
        [30.0, 45.0, 25.0, 40.0, 30.0],
    ];
    let mut rects = Vec::new();
    for (r, w) in rows.iter().enumerate() {
        let mut x = 100.0 - w[0];
        for (k, &wk) in w.iter().enumerate() {
            rects.push((x, 20.0 + r as f64 * 30.0, wk, 20.0, [A, B, G, B, A][k]));
            x += wk;
        }
    }
    let cfg = Config::default();
    let m = build_distance_matrix(&boxes(&rects), &cfg);
    cell(&m, 1, 2, "HS")?;
    cell(&m, 1, 6, "VG")?;
    cell(&m, 1, 3, "X")?;
    for i in 0..10 {
        ensure(
            (0..10).any(|j| j != i && m.get(i, j).contains(R::HStack)),
            || format!("row {} lacks HS", i + 1),
        )?;
    }
    ensure(
        extract_common_relationship(&m, &cfg) == Some(R::HStack),
        || "common is not HS".into(),
    )?;
    let t = run(&rects);
    let gm = build_distance_matrix(&group_boxes(&t), &cfg);
    ensure(gm.labels()[0][1] == "VG", || {
        format!("group cell {}", gm.labels()[0][1])
    })?;
    let want = [
        (NodeKind::Collection, Some(R::VGrid)),
        (NodeKind::Collection, Some(R::HStack)),
        (NodeKind::Leaf, None),
    ];
    ensure(shape(&t) == want, || format!("hierarchy {:?}", shape(&t)))
}

/// Two full-width rows of segments stacked on each other.
fn marimekko_rows() -> Result<(), String> {
    let rows = [
        ([60.0, 90.0, 50.0, 100.0], 40.0),
        ([120.0, 30.0, 80.0, 70.0], 60.0),
    ];
    let mut rects = Vec::new();
    let mut y = 20.0;
    for (w, h) in rows {
        let mut x = 50.0;
        for (k, &wk) in w.iter().enumerate() {
            rects.push((x, y, wk, h, [A, B, C, G][k]));
            x += wk;
        }
        y += h;
    }
    let cfg = Config::default();
    let m = build_distance_matrix(&boxes(&rects), &cfg);
    cell(&m, 1, 2, "HS")?;
    cell(&m, 1, 2, "HG")?;
    ensure(
        extract_common_relationship(&m, &cfg) == Some(R::HStack),
        || "stack does not win".into(),
    )?;
    let t = run(&rects);
    let gm = build_distance_matrix(&group_boxes(&t), &cfg);
    cell(&gm, 1, 2, "VS")?;
    let want = [
        (NodeKind::Collection, Some(R::VStack)),
        (NodeKind::Collection, Some(R::HStack)),
        (NodeKind::Leaf, None),
    ];
    ensure(shape(&t) == want, || format!("hierarchy {:?}", shape(&t)))
}

/// Two bullet glyphs: three nested bands, a bar and a marker each.
fn bullet_glyphs() -> Result<(), String> {
    let mut rects = Vec::new();
    for (r, (bar, mark)) in [(150.0, 170.0), (110.0, 200.0)].into_iter().enumerate() {
        let y = 20.0 + r as f64 * 40.0;
        rects.push((50.0, y, 300.0, 24.0, "#dddddd"));
        rects.push((50.0, y, 200.0, 24.0, "#bbbbbb"));
        rects.push((50.0, y, 100.0, 24.0, "#999999"));
        rects.push((50.0, y + 8.0, bar, 8.0, "#000000"));
        rects.push((50.0 + mark, y + 4.0, 3.0, 16.0, "#d62728"));
    }
    let cfg = Config::default();
    let m = build_distance_matrix(&boxes(&rects), &cfg);
    cell(&m, 1, 2, "-1")?;
    cell(&m, 6, 7, "-1")?;
    cell(&m, 1, 6, "X")?;
    ensure(extract_common_relationship(&m, &cfg).is_none(), || {
        "unexpected common relationship".into()
    })?;
    let t = run(&rects);
    let gm = build_distance_matrix(&group_boxes(&t), &cfg);
    ensure(gm.labels()[0][1] == "VG", || {
        format!("group cell {}", gm.labels()[0][1])
    })?;
    let want = [
        (NodeKind::Collection, Some(R::VGrid)),
        (NodeKind::Glyph, None),
        (NodeKind::Leaf, None),
    ];
    ensure(shape(&t) == want, || format!("hierarchy {:?}", shape(&t)))?;
    let ids: Vec<Vec<usize>> = t.root.children.iter().map(|g| g.leaf_ids()).collect();
    ensure(ids == [vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]], || {
        format!("glyphs {ids:?}")
    })
}

/// Scattered squares. 1 and 2 face each other at gap 3 and 1 and 4 at gap
/// 4 while the level's packing gap is 1, and both unions are obstructed.
fn scattered_squares() -> Result<(), String> {
    let rects = [
        (20.0, 20.0, 10.0, 10.0, A),
        (33.0, 26.0, 10.0, 10.0, A),
        (22.0, 31.0, 8.0, 8.0, A),
        (24.0, 6.0, 10.0, 10.0, A),
    ];
    let cfg = Config::default();
    let m = build_distance_matrix(&boxes(&rects), &cfg);
    ensure(m.packing_gap == Some(1.0), || {
        format!("packing gap {:?}", m.packing_gap)
    })?;
    cell(&m, 1, 2, "X")?;
    cell(&m, 1, 4, "X")?;
    ensure(extract_common_relationship(&m, &cfg).is_none(), || {
        "unexpected common relationship".into()
    })?;
    let t = run(&rects);
    ensure(
        shape(&t) == [(NodeKind::Collection, None), (NodeKind::Leaf, None)],
        || format!("hierarchy {:?}", shape(&t)),
    )?;
    ensure(t.root.children.iter().all(|c| c.position_encoded), || {
        "leaves not position encoded".into()
    })
}

fn decomposition_scenes() -> Outcome {
    let start = Instant::now();
    for (name, f) in [
        ("diverging", diverging_rows as fn() -> Result<(), String>),
        ("marimekko", marimekko_rows),
        ("bullet", bullet_glyphs),
        ("d", scattered_squares),
    ] {
        f().map_err(|e| format!("{name}: {e}"))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("4 scenes in {t:?}"))
}

fn round_trip() -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let specs = corpus_specs(&[1, 2]);
    let mut failed = Vec::new();
    for s in &specs {
        if let Err(e) = check_round_trip(&generate_synthetic_chart(s), false, &cfg) {
            failed.push(format!("{}: {e}", s.id()));
        }
    }
    let t = start.elapsed();
    let passed = specs.len() - failed.len();
    let acc = passed as f64 / specs.len() as f64;
    ensure(specs.len() >= 72, || format!("only {} charts", specs.len()))?;
    ensure(acc >= 0.95, || {
        format!(
            "{passed}/{} ({:.1}%): {}",
            specs.len(),
            acc * 100.0,
            failed.join("; ")
        )
    })?;
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!(
        "{passed}/{} charts ({:.1}%) in {t:?}",
        specs.len(),
        acc * 100.0
    ))
}

fn corrections() -> Outcome {
    let cfg = Config::default();
    let mut restored = 0;
    let mut notes = Vec::new();
    let specs = mutation_specs(1);
    for s in &specs {
        let chart = generate_synthetic_chart(s);
        let needed = check_round_trip(&chart, false, &cfg).is_err();
        match check_round_trip(&chart, true, &cfg) {
            Ok(()) if needed => restored += 1,
            Ok(()) => notes.push(format!(
                "{}: detected correctly without corrections",
                s.id()
            )),
            Err(e) => notes.push(format!("{}: {e}", s.id())),
        }
    }
    ensure(restored == specs.len(), || notes.join("; "))?;
    Ok(format!("{restored}/{} error classes restored", specs.len()))
}

fn channels(rects: &[(f64, f64, f64, f64, &str)]) -> Vec<Channel> {
    run(rects).summary().channels
}

fn encoding_rules() -> Outcome {
    use Channel::*;
    let bars = |fills: [&'static str; 4]| {
        [60.0, 120.0, 90.0, 30.0]
            .iter()
            .zip(fills)
            .enumerate()
            .map(|(i, (&h, f))| (50.0 + i as f64 * 30.0, 200.0 - h, 20.0, h, f))
            .collect::<Vec<_>>()
    };
    // fill: only when at least two colours are present
    ensure(channels(&bars([A; 4])) == [Height], || {
        "single colour encoded fill".into()
    })?;
    ensure(channels(&bars([A, B, A, B])) == [Height, Fill], || {
        "two colours not encoded".into()
    })?;
    // area: packing
    let packed = [
        (50.0, 50.0, 60.0, 40.0, A),
        (111.0, 50.0, 30.0, 40.0, B),
        (50.0, 91.0, 40.0, 20.0, C),
        (91.0, 91.0, 50.0, 20.0, A),
    ];
    let t = run(&packed);
    ensure(t.summary().levels[0].category == Some(R::Packing), || {
        format!("packing scene {:?}", shape(&t))
    })?;
    ensure(t.summary().channels == [Fill, Area], || {
        format!("packing channels {:?}", t.summary().channels)
    })?;
    // width: a grid of left-anchored horizontal bars
    let hbars: Vec<_> = [80.0, 40.0, 120.0]
        .iter()
        .enumerate()
        .map(|(i, &w)| (50.0, 20.0 + i as f64 * 30.0, w, 20.0, A))
        .collect();
    let t = run(&hbars);
    ensure(t.summary().levels[0].gravity == Gravity::Left, || {
        "bars not left anchored".into()
    })?;
    ensure(t.summary().channels == [Width], || {
        format!("horizontal bars {:?}", t.summary().channels)
    })?;
    // x/y: only without gravity
    let dots: Vec<_> = [40.0, 90.0, 60.0, 120.0]
        .iter()
        .enumerate()
        .map(|(i, &y)| (50.0 + i as f64 * 30.0, y, 20.0, 20.0, A))
        .collect();
    ensure(channels(&dots) == [X, Y], || {
        format!("scatter {:?}", channels(&dots))
    })?;
    let row: Vec<_> = [40.0, 50.0, 45.0, 55.0]
        .iter()
        .enumerate()
        .map(|(i, &y)| (50.0 + i as f64 * 30.0, y, 20.0, 20.0, A))
        .collect();
    ensure(channels(&row) == [Y], || {
        format!("floating row {:?}", channels(&row))
    })?;
    let anchored: Vec<_> = (0..4)
        .map(|i| (50.0 + i as f64 * 30.0, 100.0, 20.0, 20.0, A))
        .collect();
    ensure(channels(&anchored).is_empty(), || {
        format!("anchored marks {:?}", channels(&anchored))
    })?;
    let ranges: Vec<_> = [(40.0, 60.0), (70.0, 20.0), (30.0, 90.0)]
        .iter()
        .enumerate()
        .map(|(i, &(y, h))| (50.0 + i as f64 * 30.0, y, 20.0, h, A))
        .collect();
    ensure(channels(&ranges) == [TopSide, BottomSide], || {
        format!("floating bars {:?}", channels(&ranges))
    })?;
    Ok("fill, area, width/height, x/y rows hold".into())
}

fn template_of(archetype: Archetype, seed: u64) -> GrecTemplate {
    let chart = generate_synthetic_chart(&ChartSpec {
        archetype,
        variant: SvgVariant::A,
        seed,
        mutation: None,
    });
    deconstruct_svg(&chart.svg, &[], &Config::default()).expect("corpus chart deconstructs")
}

fn schema_math() -> Outcome {
    let div = infer_schema(&template_of(Archetype::DivergingStacked, 1)).c_group;
    ensure(div == 2, || format!("diverging cGroup {div}"))?;
    let tree = infer_schema(&template_of(Archetype::TreemapBar, 1)).c_group;
    ensure(tree == 4, || format!("treemap cGroup {tree}"))?;
    let specs = corpus_specs(&[1, 2]);
    for s in &specs {
        let chart = generate_synthetic_chart(s);
        let t = deconstruct_svg(&chart.svg, &[], &Config::default())
            .map_err(|e| format!("{}: {e}", s.id()))?;
        let schema = infer_schema(&t);
        ensure(
            schema.min_categorical == schema.c_group.max(schema.c_encode),
            || format!("{}: {schema:?}", s.id()),
        )?;
        let report = check_compatibility(&schema, &generate_sample_data(&schema, &t, 11));
        ensure(report.ok, || {
            format!("{}: sample data {:?}", s.id(), report.warnings)
        })?;
    }
    Ok(format!(
        "diverging 2, treemap 4, {} charts satisfy min/sample checks",
        specs.len()
    ))
}

fn performance() -> Outcome {
    let cfg = Config::default();
    let svg = grouped_bar_stress(250, 4, 1);
    let start = Instant::now();
    let t = deconstruct_svg(&svg, &[], &cfg).map_err(|e| e.to_string())?;
    let small = start.elapsed();
    ensure(t.root.leaf_ids().len() == 1000, || {
        format!("{} leaves", t.root.leaf_ids().len())
    })?;
    ensure(small < Duration::from_secs(1), || {
        format!("1000 rects took {small:?}")
    })?;
    let svg = heatmap_stress(80, 100, 1);
    let start = Instant::now();
    let t = deconstruct_svg(&svg, &[], &cfg).map_err(|e| e.to_string())?;
    let big = start.elapsed();
    ensure(t.root.leaf_ids().len() == 8000, || {
        format!("{} leaves", t.root.leaf_ids().len())
    })?;
    ensure(big < Duration::from_secs(10), || {
        format!("8000 rects took {big:?}")
    })?;
    Ok(format!("1000 rects {small:?}, 8000 rects {big:?}"))
}

fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |f: &str| dir.path().join(f);
    std::fs::write(p("chart.svg"), treemap_svg()).map_err(|e| e.to_string())?;
    std::fs::write(p("sales.csv"), SALES_CSV).map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_grec");
    let status = |args: &[&str]| {
        let o = std::process::Command::new(bin)
            .args(args)
            .current_dir(dir.path())
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.success(), || {
            format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr))
        })
    };
    status(&["deconstruct", "chart.svg", "-o", "t.json"])?;
    let t: GrecTemplate =
        serde_json::from_slice(&std::fs::read(p("t.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let example_packs = t.root.children[0].children[0].children.len();
    let table = parse_csv(SALES_CSV).map_err(|e| e.to_string())?;
    let orders = table
        .column("Order ID")
        .ok_or("no Order ID column")?
        .values
        .clone();
    let choices = walkthrough_choices(
        &ReuseSession::new(t, table, Config::default())
            .map_err(|e| e.to_string())?
            .plan,
    );
    std::fs::write(
        p("choices.json"),
        serde_json::to_string(&choices).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    status(&[
        "apply",
        "t.json",
        "sales.csv",
        "--choices",
        "choices.json",
        "-o",
        "out.svg",
    ])?;
    let cli = std::fs::read_to_string(p("out.svg")).map_err(|e| e.to_string())?;

    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let http = rt.block_on(http_replay(
        &router(AppState::new(Config::default())),
        &treemap_svg(),
        SALES_CSV,
        &choices,
    ));
    ensure(cli == http, || "CLI and HTTP exports differ".into())?;

    let cats = groups_at(&cli, 1);
    ensure(cats.len() == 3, || {
        format!("{} category groups", cats.len())
    })?;
    let bars = groups_at(&cli, 2).len();
    let packs = groups_at(&cli, 3).len();
    ensure(example_packs == 6, || {
        format!("example bar holds {example_packs} packs")
    })?;
    ensure(packs == bars * 4, || {
        format!("{packs} region packs over {bars} bars")
    })?;
    let rows: Vec<usize> = cli
        .match_indices("data-rows=\"")
        .filter_map(|(i, _)| cli[i + 11..].split('"').next()?.parse().ok())
        .collect();
    let unique: BTreeSet<&str> = rows.iter().map(|&r| orders[r].as_str()).collect();
    ensure(
        rows.len() == orders.len() && unique.len() == orders.len(),
        || {
            format!(
                "{} single-row rects for {} orders",
                rows.len(),
                orders.len()
            )
        },
    )?;
    Ok(format!(
        "3 categories, 4 of {example_packs} packs per bar, {} order rects, CLI == HTTP",
        rows.len()
    ))
}

fn brute_force() -> Outcome {
    let cfg = Config::default();
    let cases = partition_oracle::random_cases(100, 2024);
    let failures: Vec<String> = cases
        .iter()
        .enumerate()
        .filter_map(|(k, items)| {
            partition_oracle::check(items, &cfg)
                .err()
                .map(|e| format!("case {k}: {e}"))
        })
        .collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} random scenes with n <= 6 agree", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("decomposition scenes", decomposition_scenes),
        ("round-trip accuracy", round_trip),
        ("decoration corrections M1-M5", corrections),
        ("encoding rules", encoding_rules),
        ("schema math", schema_math),
        ("performance", performance),
        ("end-to-end replay", end_to_end),
        ("small-instance brute force", brute_force),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => eprintln!("PASS {name}: {detail}"),
            Err(e) => {
                failed += 1;
                eprintln!("FAIL {name}: {e}");
            }
        }
    }
    eprintln!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
