//! Pipeline session state machine shared by the HTTP server.

use grec_core::decoration::{Correction, DecorationModel, DecorationSummary};
use grec_core::error::{PipelineError, ReuseError};
use grec_core::grec::GrecTemplate;
use grec_core::pipeline::{apply_corrections, deconstruct_scene, detect_svg};
use grec_core::reuse::{
    check_compatibility, generate_sample_data, infer_schema, Choice, CompatibilityReport, DataSchema, DataTable,
    ReuseSession, ReuseStep,
};
use grec_core::{Config, NormalizedScene};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "stage", content = "step")]
pub enum Stage {
    Uploaded,
    DecorationsConfirmed,
    Deconstructed,
    DataLoaded,
    Mapping(usize),
    Done,
}

#[derive(Debug)]
pub enum ServiceError {
    /// The request does not fit the session's current stage.
    Conflict(String),
    /// The request payload is well formed but unusable.
    Invalid(String),
}

impl From<PipelineError> for ServiceError {
    fn from(e: PipelineError) -> Self {
        ServiceError::Invalid(format!("{}: {e}", e.kind()))
    }
}

impl From<ReuseError> for ServiceError {
    fn from(e: ReuseError) -> Self {
        match e {
            ReuseError::StepOutOfRange { .. } => ServiceError::Conflict(e.to_string()),
            _ => ServiceError::Invalid(e.to_string()),
        }
    }
}

pub struct Session {
    config: Config,
    scene: NormalizedScene,
    decoration: DecorationModel,
    confirmed: bool,
    template: Option<GrecTemplate>,
    schema: Option<DataSchema>,
    reuse: Option<ReuseSession>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecorationView<'a> {
    #[serde(flatten)]
    pub stage: Stage,
    pub summary: DecorationSummary,
    pub model: &'a DecorationModel,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanView<'a> {
    #[serde(flatten)]
    pub stage: Stage,
    pub cursor: usize,
    pub steps: &'a [ReuseStep],
    pub choices: Vec<Option<&'a Choice>>,
    pub warnings: &'a [String],
    pub partial_svg: &'a str,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DatasetView<'a> {
    #[serde(flatten)]
    pub plan: PlanView<'a>,
    pub report: CompatibilityReport,
    pub schema: DataSchema,
    pub table_warnings: &'a [String],
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Export<'a> {
    pub svg: String,
    pub template: &'a GrecTemplate,
    pub config: &'a Config,
}

impl Session {
    pub fn upload(svg: &str, config: Config) -> Result<Session, ServiceError> {
        let (scene, decoration) = detect_svg(svg, &config)?;
        Ok(Session { config, scene, decoration, confirmed: false, template: None, schema: None, reuse: None })
    }

    pub fn stage(&self) -> Stage {
        match (&self.template, &self.reuse) {
            (None, _) if self.confirmed => Stage::DecorationsConfirmed,
            (None, _) => Stage::Uploaded,
            (Some(_), None) => Stage::Deconstructed,
            (Some(_), Some(r)) if r.is_done() => Stage::Done,
            (Some(_), Some(r)) if r.cursor == 0 => Stage::DataLoaded,
            (Some(_), Some(r)) => Stage::Mapping(r.cursor),
        }
    }

    pub fn decorations(&self) -> DecorationView<'_> {
        DecorationView { stage: self.stage(), summary: self.decoration.summary(), model: &self.decoration }
    }

    pub fn correct(&mut self, corrections: &[Correction]) -> Result<DecorationView<'_>, ServiceError> {
        if self.template.is_some() {
            return Err(ServiceError::Conflict("decorations are fixed once the chart is deconstructed".into()));
        }
        self.decoration = apply_corrections(&self.scene, self.decoration.clone(), corrections, &self.config)?;
        self.confirmed = true;
        Ok(self.decorations())
    }

    pub fn deconstruct(&mut self) -> Result<&GrecTemplate, ServiceError> {
        if self.template.is_some() {
            return Err(ServiceError::Conflict("already deconstructed".into()));
        }
        let t = deconstruct_scene(&self.scene, self.decoration.clone(), &self.config)?;
        self.schema = Some(infer_schema(&t));
        self.confirmed = true;
        Ok(self.template.insert(t))
    }

    fn template(&self) -> Result<(&GrecTemplate, &DataSchema), ServiceError> {
        match (&self.template, &self.schema) {
            (Some(t), Some(s)) => Ok((t, s)),
            _ => Err(ServiceError::Conflict("deconstruct the chart first".into())),
        }
    }

    pub fn schema(&self) -> Result<DataSchema, ServiceError> {
        Ok(*self.template()?.1)
    }

    pub fn sample_data(&self, seed: u64) -> Result<DataTable, ServiceError> {
        let (t, s) = self.template()?;
        Ok(generate_sample_data(s, t, seed))
    }

    /// Loads a dataset, replacing any earlier one and its answers.
    pub fn load_dataset(&mut self, table: DataTable) -> Result<DatasetView<'_>, ServiceError> {
        let (t, schema) = self.template()?;
        let schema = *schema;
        let report = check_compatibility(&schema, &table);
        self.reuse = Some(ReuseSession::new(t.clone(), table, self.config.clone()).map_err(ServiceError::from)?);
        let plan = self.plan()?;
        let table_warnings = &self.reuse.as_ref().map(|r| r.table.warnings.as_slice()).unwrap_or_default();
        Ok(DatasetView { plan, report, schema, table_warnings })
    }

    fn reuse(&self) -> Result<&ReuseSession, ServiceError> {
        self.reuse.as_ref().ok_or_else(|| ServiceError::Conflict("load a dataset first".into()))
    }

    pub fn plan(&self) -> Result<PlanView<'_>, ServiceError> {
        let r = self.reuse()?;
        Ok(PlanView {
            stage: self.stage(),
            cursor: r.cursor,
            steps: &r.plan,
            choices: (0..r.plan.len()).map(|i| r.choices.get(&i)).collect(),
            warnings: &r.warnings,
            partial_svg: &r.partial_render,
        })
    }

    pub fn step(&mut self, index: usize, choice: Choice) -> Result<PlanView<'_>, ServiceError> {
        self.reuse()?;
        let r = self.reuse.as_mut().expect("checked above");
        // earlier answers are revised by going back first
        if index != r.cursor {
            return Err(ServiceError::Conflict(format!("step {index} is not the current step {}", r.cursor)));
        }
        r.apply_step(index, choice)?;
        self.plan()
    }

    pub fn back(&mut self) -> Result<PlanView<'_>, ServiceError> {
        self.reuse()?;
        let r = self.reuse.as_mut().expect("checked above");
        if r.cursor == 0 {
            return Err(ServiceError::Conflict("already at the first step".into()));
        }
        r.back()?;
        self.plan()
    }

    pub fn export(&self) -> Result<Export<'_>, ServiceError> {
        let r = self.reuse()?;
        if !r.is_done() {
            return Err(ServiceError::Conflict(format!("step {} is unanswered", r.cursor)));
        }
        let svg = r.render_final()?;
        Ok(Export { svg, template: &r.template, config: &self.config })
    }
}

/// Applies `choices` in plan order and renders the final chart.
pub fn apply_choices(
    template: GrecTemplate,
    table: DataTable,
    choices: &[Choice],
    config: Config,
) -> Result<String, ReuseError> {
    let mut s = ReuseSession::new(template, table, config)?;
    for (i, c) in choices.iter().enumerate() {
        s.apply_step(i, c.clone())?;
    }
    s.render_final()
}
