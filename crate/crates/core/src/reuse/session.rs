//! Stepwise application of mapping choices.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::plan::{generate_plan, suggest_encoding, Choice, ReuseStep, StepKind};
use super::schema::infer_schema;
use super::table::DataTable;
use crate::config::Config;
use crate::error::ReuseError;
use crate::fieldtype::FieldType;
use crate::grec::GrecTemplate;
use crate::render::{render_chart, RenderMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReuseSession {
    pub template: GrecTemplate,
    pub table: DataTable,
    pub plan: Vec<ReuseStep>,
    pub choices: BTreeMap<usize, Choice>,
    pub cursor: usize,
    pub partial_render: String,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub config: Config,
}

impl ReuseSession {
    pub fn new(
        template: GrecTemplate,
        table: DataTable,
        config: Config,
    ) -> Result<Self, ReuseError> {
        let schema = infer_schema(&template);
        let plan = generate_plan(&template, &schema);
        let mut s = ReuseSession {
            template,
            table,
            plan,
            choices: BTreeMap::new(),
            cursor: 0,
            partial_render: String::new(),
            warnings: Vec::new(),
            config,
        };
        s.refresh()?;
        Ok(s)
    }

    fn refresh(&mut self) -> Result<(), ReuseError> {
        for i in 0..self.plan.len() {
            let sug = suggest_encoding(
                &self.template,
                &self.plan,
                &self.plan[i],
                &self.table,
                &self.choices,
            );
            self.plan[i].suggestion = sug;
        }
        self.partial_render = render_chart(
            &self.template,
            &self.table,
            &self.plan,
            &self.choices,
            RenderMode::Partial {
                current: self.cursor,
            },
            &self.config,
        )?;
        Ok(())
    }

    pub fn is_done(&self) -> bool {
        self.cursor >= self.plan.len()
    }

    /// Records `choice` for `index` (the current step or an earlier one).
    /// A changed answer to an earlier step discards every later answer.
    pub fn apply_step(&mut self, index: usize, choice: Choice) -> Result<(), ReuseError> {
        if index > self.cursor || index >= self.plan.len() {
            return Err(ReuseError::StepOutOfRange {
                index,
                len: self.plan.len(),
                cursor: self.cursor,
            });
        }
        let step = &self.plan[index];
        let col = self
            .table
            .column(&choice.field)
            .ok_or_else(|| ReuseError::UnknownField(choice.field.clone()))?;
        let mut choice = choice;
        if step.kind == StepKind::MapEncoding {
            match choice.channel {
                Some(c) if !step.options.contains(&c) => {
                    return Err(ReuseError::InvalidChannel(c.name().to_string()))
                }
                None => choice.channel = step.options.first().copied(),
                _ => {}
            }
            if step.field_type == FieldType::Quantitative
                && col.field_type != FieldType::Quantitative
            {
                return Err(ReuseError::IncompatibleFieldType {
                    field: choice.field.clone(),
                    expected: step.field_type.name(),
                    found: col.field_type.name(),
                });
            }
        } else if !col.field_type.is_discrete() {
            self.warnings.push(format!(
                "step {index}: {} field {:?} used for grouping",
                col.field_type.name(),
                choice.field
            ));
        }
        if self.choices.get(&index).is_some_and(|c| *c != choice) {
            self.choices.retain(|&k, _| k < index);
        }
        self.choices.insert(index, choice);
        self.cursor = index + 1;
        self.refresh()
    }

    /// Moves the cursor one step back; answers stay until overwritten.
    pub fn back(&mut self) -> Result<(), ReuseError> {
        self.cursor = self.cursor.saturating_sub(1);
        self.refresh()
    }

    pub fn render_final(&self) -> Result<String, ReuseError> {
        Ok(render_chart(
            &self.template,
            &self.table,
            &self.plan,
            &self.choices,
            RenderMode::Final,
            &self.config,
        )?)
    }
}
