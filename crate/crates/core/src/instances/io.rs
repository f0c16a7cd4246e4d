//! JSON instance files.
//!
//! ```json
//! { "capacity": "10", "agents": 2,
//!   "items": [ { "id": 0, "owner": 0, "value": "5/2", "size": "1" },
//!              { "id": 1, "owner": 1, "value": "3" } ] }
//! ```
//!
//! A missing `size` means the size equals the value.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::instances::InstancesError;
use crate::model::{AgentId, Instance, Item, ItemId};
use crate::rational::Rational;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileItem {
    id: ItemId,
    owner: AgentId,
    value: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    size: Option<Rational>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileInstance {
    capacity: Rational,
    agents: usize,
    items: Vec<FileItem>,
}

pub fn parse_instance(text: &str) -> Result<Instance, InstancesError> {
    let raw: FileInstance = serde_json::from_str(text).map_err(|e| InstancesError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let items = raw
        .items
        .into_iter()
        .map(|it| {
            let size = it.size.unwrap_or_else(|| it.value.clone());
            Item::new(it.id, it.owner, it.value, size)
        })
        .collect();
    Ok(Instance::new(items, raw.capacity, raw.agents)?)
}

pub fn render_instance(instance: &Instance) -> String {
    let file = FileInstance {
        capacity: instance.capacity().clone(),
        agents: instance.agent_count(),
        items: instance
            .items()
            .iter()
            .map(|it| FileItem {
                id: it.id,
                owner: it.owner,
                value: it.value.clone(),
                size: (it.size != it.value).then(|| it.size.clone()),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("instance serializes");
    text.push('\n');
    text
}

pub fn read_instance(path: &Path) -> Result<Instance, InstancesError> {
    let text = fs::read_to_string(path).map_err(|source| InstancesError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

pub fn write_instance(instance: &Instance, path: &Path) -> Result<(), InstancesError> {
    fs::write(path, render_instance(instance)).map_err(|source| InstancesError::Io {
        path: path.display().to_string(),
        source,
    })
}
