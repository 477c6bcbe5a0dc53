#![allow(dead_code)]

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use grec_core::grec::Channel;
use grec_core::render::{generate_synthetic_chart, Archetype, ChartSpec, SvgVariant};
use grec_core::reuse::{Choice, ReuseStep, StepKind};
use http_body_util::BodyExt;
use tower::ServiceExt;

pub const SALES_CSV: &str = include_str!("../../../../fixtures/sales.csv");

pub fn chart_svg(archetype: Archetype, variant: SvgVariant, seed: u64) -> String {
    generate_synthetic_chart(&ChartSpec {
        archetype,
        variant,
        seed,
        mutation: None,
    })
    .svg
}

pub fn treemap_svg() -> String {
    chart_svg(Archetype::TreemapBar, SvgVariant::A, 1)
}

/// The scripted walkthrough: categories, then sub-categories, regions and
/// orders; colour by region, sizes by sales.
pub fn walkthrough_choices(plan: &[ReuseStep]) -> Vec<Choice> {
    let groups = ["Category", "Subcategory", "Region", "Order ID"];
    let mut g = groups.iter();
    plan.iter()
        .map(|s| match s.kind {
            StepKind::MapGroupLevel | StepKind::MapMark => {
                Choice::field(g.next().expect("four grouping steps"))
            }
            StepKind::MapEncoding => {
                let ch = s.options[0];
                Choice::channel(
                    ch,
                    if ch == Channel::Fill {
                        "Region"
                    } else {
                        "Sales"
                    },
                )
            }
        })
        .collect()
}

/// Labels of the rendered collections at `depth`.
pub fn groups_at(svg: &str, depth: usize) -> Vec<String> {
    let tag = format!("<g class=\"collection\" data-depth=\"{depth}\" data-label=\"");
    svg.match_indices(&tag)
        .map(|(i, _)| svg[i + tag.len()..].split('"').next().unwrap().to_string())
        .collect()
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.text()))
    }

    pub fn text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }
}

pub async fn send(app: &Router, method: Method, uri: &str, body: impl Into<Body>) -> Reply {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .body(body.into())
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, body }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Method::GET, uri, Body::empty()).await
}

pub async fn post(app: &Router, uri: &str, body: impl Into<Body>) -> Reply {
    send(app, Method::POST, uri, body).await
}

pub async fn post_json(app: &Router, uri: &str, v: &impl serde::Serialize) -> Reply {
    post(app, uri, serde_json::to_vec(v).unwrap()).await
}

/// Uploads `svg` and returns the session id.
pub async fn open_session(app: &Router, svg: &str) -> String {
    let r = post(app, "/sessions", svg.to_string()).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text());
    r.json()["id"].as_str().unwrap().to_string()
}

/// Runs the whole HTTP flow with `choices` and returns the exported SVG.
pub async fn http_replay(app: &Router, svg: &str, csv: &str, choices: &[Choice]) -> String {
    let id = open_session(app, svg).await;
    let r = post(app, &format!("/sessions/{id}/deconstruct"), Body::empty()).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    let r = post(app, &format!("/sessions/{id}/dataset"), csv.to_string()).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    for (k, c) in choices.iter().enumerate() {
        let r = post_json(app, &format!("/sessions/{id}/steps/{k}"), c).await;
        assert_eq!(r.status, StatusCode::OK, "step {k}: {}", r.text());
    }
    let r = get(app, &format!("/sessions/{id}/export?format=svg")).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    r.text()
}
