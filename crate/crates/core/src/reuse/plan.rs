//! Ordered reuse steps and field suggestions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::schema::DataSchema;
use super::table::{Column, DataTable};
use crate::fieldtype::FieldType;
use crate::grec::{Channel, EncodingTarget, GrecTemplate, GroupNode, NodeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepKind {
    MapGroupLevel,
    MapMark,
    MapEncoding,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Choice {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<Channel>,
    pub field: String,
}

impl Choice {
    pub fn field(field: &str) -> Self {
        Choice {
            channel: None,
            field: String::from(field),
        }
    }

    pub fn channel(channel: Channel, field: &str) -> Self {
        Choice {
            channel: Some(channel),
            field: String::from(field),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReuseStep {
    pub index: usize,
    pub kind: StepKind,
    /// Depth of the collection whose children the field splits, or of the
    /// nodes an encoding targets.
    pub target_level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoding: Option<usize>,
    pub field_type: FieldType,
    pub prompt: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<Channel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggestion: Option<Choice>,
}

/// Collection depths with the step that binds them. The innermost one is a
/// mark step when its children are plain rectangles.
pub fn group_levels(t: &GrecTemplate) -> Vec<(usize, StepKind)> {
    t.collection_levels()
        .into_iter()
        .map(|d| {
            let child_is_leaf = t
                .root
                .nodes_at(d + 1)
                .first()
                .is_some_and(|n| n.kind == NodeKind::Leaf);
            (
                d,
                if child_is_leaf {
                    StepKind::MapMark
                } else {
                    StepKind::MapGroupLevel
                },
            )
        })
        .collect()
}

fn uniform_fill(n: &GroupNode) -> Option<&str> {
    let leaves = n.leaves();
    let f = leaves.first()?.fill.as_deref()?;
    leaves
        .iter()
        .all(|l| l.fill.as_deref() == Some(f))
        .then_some(f)
}

/// Deepest collection level whose children each carry one colour that
/// differs between siblings: the level a categorical fill follows.
pub fn fill_level(t: &GrecTemplate) -> Option<usize> {
    let mut found = None;
    for d in t.collection_levels() {
        let ok = t.root.nodes_at(d).iter().all(|parent| {
            let fills: Option<Vec<&str>> = parent.children.iter().map(uniform_fill).collect();
            fills.is_some_and(|f| {
                let set: BTreeSet<&str> = f.iter().copied().collect();
                set.len() == f.len() && f.len() > 1
            })
        });
        if ok {
            found = Some(d);
        }
    }
    found
}

fn encoding_depth(t: &GrecTemplate, target: EncodingTarget) -> usize {
    match target {
        EncodingTarget::Level(d) => d,
        EncodingTarget::Mark => t.leaf_depth(),
        EncodingTarget::GlyphMember(_) => t.leaf_depth(),
    }
}

pub fn generate_plan(t: &GrecTemplate, _schema: &DataSchema) -> Vec<ReuseStep> {
    let mut steps = Vec::new();
    for (depth, kind) in group_levels(t) {
        let prompt = match kind {
            StepKind::MapMark => String::from("Which field identifies each rectangle?"),
            _ if depth == 0 => String::from("What should the highest-level groups represent?"),
            _ => format!("What should the groups at level {} represent?", depth + 1),
        };
        steps.push(ReuseStep {
            index: 0,
            kind,
            target_level: depth,
            encoding: None,
            field_type: FieldType::Categorical,
            prompt,
            options: Vec::new(),
            suggestion: None,
        });
    }
    let mut order: Vec<usize> = (0..t.encodings.len()).collect();
    order.sort_by_key(|&i| match t.encodings[i].target {
        EncodingTarget::Level(d) => (0, d),
        _ => (1, 0),
    });
    let position_encoded = t.root.leaves().iter().all(|l| l.position_encoded);
    for i in order {
        let e = &t.encodings[i];
        let options = if !e.options.is_empty() {
            e.options.clone()
        } else if position_encoded
            && matches!(e.channel, Channel::X | Channel::Y)
            && e.target == EncodingTarget::Mark
        {
            alloc::vec![Channel::X, Channel::Y]
        } else {
            alloc::vec![e.channel]
        };
        let what = match e.target {
            EncodingTarget::Mark => String::from("each rectangle"),
            EncodingTarget::Level(d) => format!("each group at level {d}"),
            EncodingTarget::GlyphMember(k) => format!("glyph part {}", k + 1),
        };
        steps.push(ReuseStep {
            index: 0,
            kind: StepKind::MapEncoding,
            target_level: encoding_depth(t, e.target),
            encoding: Some(i),
            field_type: e.field_type,
            prompt: format!(
                "Which field does the {} of {what} encode?",
                e.channel.name()
            ),
            options,
            suggestion: None,
        });
    }
    for (i, s) in steps.iter_mut().enumerate() {
        s.index = i;
    }
    steps
}

fn type_matches(want: FieldType, have: FieldType) -> bool {
    want.is_discrete() == have.is_discrete()
}

/// The chosen field of an earlier step, else its suggestion.
fn answer<'a>(s: &'a ReuseStep, choices: &'a BTreeMap<usize, Choice>) -> Option<&'a str> {
    choices
        .get(&s.index)
        .or(s.suggestion.as_ref())
        .map(|c| c.field.as_str())
}

/// Group fields go coarse to fine: a field nested in the previous level's
/// field wins, then the fewest distinct values. A column unique per row is
/// kept for the mark step.
fn suggest_group(
    plan: &[ReuseStep],
    step: &ReuseStep,
    table: &DataTable,
    choices: &BTreeMap<usize, Choice>,
) -> Option<Choice> {
    let earlier: Vec<&ReuseStep> = plan[..step.index]
        .iter()
        .filter(|s| s.kind != StepKind::MapEncoding)
        .collect();
    let used: BTreeSet<&str> = earlier.iter().filter_map(|s| answer(s, choices)).collect();
    let all: Vec<usize> = (0..table.row_count).collect();
    let mut candidates: Vec<(&str, usize)> = table
        .columns
        .iter()
        .filter(|c| c.field_type.is_discrete() && !used.contains(c.name.as_str()))
        .map(|c| (c.name.as_str(), table.distinct(&c.name, &all).len()))
        .collect();
    if step.kind == StepKind::MapMark {
        return candidates
            .iter()
            .max_by_key(|c| c.1)
            .map(|c| Choice::field(c.0));
    }
    let has_mark = plan.iter().any(|s| s.kind == StepKind::MapMark);
    if has_mark && candidates.len() > 1 {
        candidates.retain(|c| c.1 < table.row_count);
    }
    let parent = earlier.last().and_then(|s| answer(s, choices));
    candidates
        .iter()
        .min_by_key(|c| {
            let nested = parent.is_some_and(|p| table.refines(c.0, p));
            (!nested, c.1 < 2, c.1)
        })
        .map(|c| Choice::field(c.0))
}

/// First field of the step's type not already consumed by an earlier step
/// with the same need. A categorical fill follows its colour level's field.
pub fn suggest_encoding(
    t: &GrecTemplate,
    plan: &[ReuseStep],
    step: &ReuseStep,
    table: &DataTable,
    choices: &BTreeMap<usize, Choice>,
) -> Option<Choice> {
    let channel = step.options.first().copied();
    if step.kind != StepKind::MapEncoding {
        return suggest_group(plan, step, table, choices);
    }
    let enc = &t.encodings[step.encoding?];
    if enc.channel == Channel::Fill && enc.field_type.is_discrete() {
        if let Some(d) = fill_level(t) {
            let bound = plan
                .iter()
                .find(|s| s.kind != StepKind::MapEncoding && s.target_level == d);
            if let Some(f) = bound.and_then(|s| answer(s, choices)) {
                return Some(Choice {
                    channel,
                    field: String::from(f),
                });
            }
        }
    }
    let used: BTreeSet<&str> = plan[..step.index]
        .iter()
        .filter(|s| s.kind == StepKind::MapEncoding && type_matches(s.field_type, enc.field_type))
        .filter(|s| s.encoding.is_some_and(|i| !t.encodings[i].derived))
        .filter_map(|s| answer(s, choices))
        .collect();
    let group_used: BTreeSet<&str> = plan
        .iter()
        .filter(|s| s.kind != StepKind::MapEncoding)
        .filter_map(|s| answer(s, choices))
        .collect();
    let fits: Vec<&Column> = table
        .columns
        .iter()
        .filter(|c| type_matches(enc.field_type, c.field_type) && !used.contains(c.name.as_str()))
        .collect();
    // a colour may repeat a grouping field when nothing else is left
    fits.iter()
        .find(|c| !enc.field_type.is_discrete() || !group_used.contains(c.name.as_str()))
        .or(fits.first())
        .map(|c| Choice {
            channel,
            field: c.name.clone(),
        })
}
