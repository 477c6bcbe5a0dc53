mod common;

use axum::body::Body;
use axum::http::{Method, StatusCode};
use common::*;
use grec::io::parse_csv;
use grec::server::{router, AppState, MAX_UPLOAD_BYTES};
use grec::service::apply_choices;
use grec_core::deconstruct_svg;
use grec_core::decoration::Correction;
use grec_core::pipeline::detect_svg;
use grec_core::render::{generate_synthetic_chart, mutation_specs, Mutation};
use grec_core::reuse::{infer_schema, Choice, ReuseSession};
use grec_core::Config;

fn app() -> axum::Router {
    router(AppState::new(Config::default()))
}

fn plan_choices() -> Vec<Choice> {
    let t = deconstruct_svg(&treemap_svg(), &[], &Config::default()).unwrap();
    let s = ReuseSession::new(t, parse_csv(SALES_CSV).unwrap(), Config::default()).unwrap();
    walkthrough_choices(&s.plan)
}

#[tokio::test]
async fn full_walkthrough_with_back() {
    let app = app();
    let id = open_session(&app, &treemap_svg()).await;
    let base = format!("/sessions/{id}");

    let r = get(&app, &format!("{base}/decorations")).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["stage"], "uploaded");
    assert!(r.json()["summary"]["xAxis"]["tiers"].is_array());

    let r = post(&app, &format!("{base}/deconstruct"), Body::empty()).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    let v = r.json();
    assert_eq!(v["stage"]["stage"], "deconstructed");
    assert_eq!(v["schema"]["cGroup"], 4);

    let r = get(&app, &format!("{base}/sample-data?seed=3")).await;
    assert_eq!(r.status, StatusCode::OK);
    let sample = parse_csv(&r.text()).unwrap();
    assert!(sample.row_count > 0);

    let r = post(&app, &format!("{base}/dataset"), SALES_CSV).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    let v = r.json();
    assert_eq!(v["report"]["ok"], true);
    assert_eq!(v["stage"], "dataLoaded");
    assert_eq!(v["cursor"], 0);

    let choices = plan_choices();
    for (k, c) in choices.iter().enumerate().take(2) {
        let r = post_json(&app, &format!("{base}/steps/{k}"), c).await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.text());
        assert!(r.json()["partialSvg"].as_str().unwrap().starts_with("<svg"));
    }
    let r = post(&app, &format!("{base}/back"), Body::empty()).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["cursor"], 1);
    for (k, c) in choices.iter().enumerate().skip(1) {
        let r = post_json(&app, &format!("{base}/steps/{k}"), c).await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    }
    let r = get(&app, &format!("{base}/plan")).await;
    assert_eq!(r.json()["stage"], "done");

    let r = get(&app, &format!("{base}/export")).await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    assert!(v["template"]["root"].is_object());
    assert_eq!(v["config"]["packingGapCap"], 5.0);
    let expected = apply_choices(
        serde_json::from_value(v["template"].clone()).unwrap(),
        parse_csv(SALES_CSV).unwrap(),
        &choices,
        Config::default(),
    )
    .unwrap();
    assert_eq!(v["svg"].as_str().unwrap(), expected);
}

#[tokio::test]
async fn status_codes() {
    let app = app();
    assert_eq!(get(&app, "/sessions/nope/plan").await.status, StatusCode::NOT_FOUND);
    assert_eq!(
        post(&app, "/sessions", "<svg").await.status,
        StatusCode::UNPROCESSABLE_ENTITY
    );

    let id = open_session(&app, &treemap_svg()).await;
    let base = format!("/sessions/{id}");
    assert_eq!(get(&app, &format!("{base}/plan")).await.status, StatusCode::CONFLICT);
    assert_eq!(get(&app, &format!("{base}/sample-data")).await.status, StatusCode::CONFLICT);
    assert_eq!(
        post(&app, &format!("{base}/dataset"), SALES_CSV).await.status,
        StatusCode::CONFLICT
    );
    let bad = send(&app, Method::PATCH, &format!("{base}/decorations"), "{\"kind\": 3}").await;
    assert_eq!(bad.status, StatusCode::UNPROCESSABLE_ENTITY);

    assert_eq!(post(&app, &format!("{base}/deconstruct"), Body::empty()).await.status, StatusCode::OK);
    assert_eq!(
        post(&app, &format!("{base}/deconstruct"), Body::empty()).await.status,
        StatusCode::CONFLICT
    );
    let patch = send(&app, Method::PATCH, &format!("{base}/decorations"), "[]").await;
    assert_eq!(patch.status, StatusCode::CONFLICT);
    assert_eq!(
        post(&app, &format!("{base}/dataset"), "a,b\n1").await.status,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    assert_eq!(post(&app, &format!("{base}/dataset"), SALES_CSV).await.status, StatusCode::OK);
    assert_eq!(post(&app, &format!("{base}/back"), Body::empty()).await.status, StatusCode::CONFLICT);

    let step = |k: usize| format!("{base}/steps/{k}");
    let cat = Choice::field("Category");
    assert_eq!(post_json(&app, &step(2), &cat).await.status, StatusCode::CONFLICT);
    assert_eq!(post(&app, &step(0), "not json").await.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(
        post_json(&app, &step(0), &Choice::field("Profit")).await.status,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    assert_eq!(post_json(&app, &step(0), &cat).await.status, StatusCode::OK);
    // answering an earlier step again needs a Back first
    assert_eq!(post_json(&app, &step(0), &cat).await.status, StatusCode::CONFLICT);
    assert_eq!(get(&app, &format!("{base}/export")).await.status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn patch_add_tier_then_label() {
    let chart = generate_synthetic_chart(
        mutation_specs(1)
            .iter()
            .find(|s| s.mutation == Some(Mutation::M3))
            .unwrap(),
    );
    let (scene, _) = detect_svg(&chart.svg, &Config::default()).unwrap();
    let fixes: Vec<Correction> = chart.corrections.iter().map(|r| r.resolve(&scene).unwrap()).collect();
    assert_eq!(fixes.len(), 2);

    let app = app();
    let id = open_session(&app, &chart.svg).await;
    let uri = format!("/sessions/{id}/decorations");
    let before = get(&app, &uri).await.json();
    assert_eq!(before["summary"]["xAxis"]["tiers"].as_array().unwrap().len(), 1);

    let r = send(&app, Method::PATCH, &uri, serde_json::to_vec(&fixes[0]).unwrap()).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    assert_eq!(r.json()["stage"], "decorationsConfirmed");
    assert_eq!(r.json()["summary"]["xAxis"]["tiers"].as_array().unwrap().len(), 2);

    let r = send(&app, Method::PATCH, &uri, serde_json::to_vec(&fixes[1]).unwrap()).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    let got: grec_core::decoration::DecorationSummary = serde_json::from_value(r.json()["summary"].clone()).unwrap();
    assert_eq!(got, chart.expected_decoration);
    assert_eq!(get(&app, &uri).await.json()["summary"], r.json()["summary"]);
}

#[tokio::test]
async fn sessions_do_not_share_state() {
    let app = app();
    let a = open_session(&app, &treemap_svg()).await;
    let b = open_session(
        &app,
        &chart_svg(grec_core::render::Archetype::Bar, grec_core::render::SvgVariant::B, 2),
    )
    .await;
    for id in [&a, &b] {
        let r = post(&app, &format!("/sessions/{id}/deconstruct"), Body::empty()).await;
        assert_eq!(r.status, StatusCode::OK);
    }
    let bar_schema = infer_schema(
        &deconstruct_svg(
            &chart_svg(grec_core::render::Archetype::Bar, grec_core::render::SvgVariant::B, 2),
            &[],
            &Config::default(),
        )
        .unwrap(),
    );
    let sample = get(&app, &format!("/sessions/{b}/sample-data")).await.text();
    post(&app, &format!("/sessions/{a}/dataset"), SALES_CSV).await;
    post(&app, &format!("/sessions/{b}/dataset"), sample).await;

    let first_a = post_json(&app, &format!("/sessions/{a}/steps/0"), &Choice::field("Category")).await;
    assert_eq!(first_a.status, StatusCode::OK);
    let plan_b = get(&app, &format!("/sessions/{b}/plan")).await.json();
    assert_eq!(plan_b["cursor"], 0);
    assert_eq!(plan_b["steps"].as_array().unwrap().len(), bar_schema.c_group + bar_schema.q_encode);
    let plan_a = get(&app, &format!("/sessions/{a}/plan")).await.json();
    assert_eq!(plan_a["cursor"], 1);
    assert_eq!(plan_a["choices"][0]["field"], "Category");
}

#[tokio::test]
async fn oversized_upload_is_rejected() {
    let app = app();
    let body = vec![b' '; MAX_UPLOAD_BYTES + 1];
    let r = post(&app, "/sessions", body).await;
    assert_eq!(r.status, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn replay_matches_cli_apply_path() {
    let choices = plan_choices();
    let svg = http_replay(&app(), &treemap_svg(), SALES_CSV, &choices).await;
    let t = deconstruct_svg(&treemap_svg(), &[], &Config::default()).unwrap();
    let expected = apply_choices(t, parse_csv(SALES_CSV).unwrap(), &choices, Config::default()).unwrap();
    assert_eq!(svg, expected);
}
