use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{Instance, Plan};
use crate::{Error, Result};

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    load_json(path.as_ref(), "instance")
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    save_json(&inst.to_data(), path.as_ref(), "instance")
}

pub fn load_plan(path: impl AsRef<Path>) -> Result<Plan> {
    load_json(path.as_ref(), "plan")
}

pub fn save_plan(plan: &Plan, path: impl AsRef<Path>) -> Result<()> {
    save_json(plan, path.as_ref(), "plan")
}

fn load_json<T: DeserializeOwned>(path: &Path, what: &'static str) -> Result<T> {
    let reader = BufReader::new(File::open(path)?);
    serde_json::from_reader(reader).map_err(|source| Error::Parse { what, source })
}

fn save_json<T: Serialize>(value: &T, path: &Path, what: &'static str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, value).map_err(|source| Error::Parse { what, source })?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, GeneratorParams};

    #[test]
    fn instance_round_trip() {
        let inst = generate_instance(&GeneratorParams::tiny(6), 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&inst, &path).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(back, inst);

        let again = dir.path().join("again.json");
        save_instance(&back, &again).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn missing_field_is_named() {
        let inst = generate_instance(&GeneratorParams::tiny(3), 1).unwrap();
        let mut value = serde_json::to_value(inst.to_data()).unwrap();
        value.as_object_mut().unwrap().remove("flexibility");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, value.to_string()).unwrap();
        let err = load_instance(&path).unwrap_err();
        assert!(err.to_string().contains("flexibility"), "{err}");
    }

    #[test]
    fn negative_travel_time_is_rejected() {
        let inst = generate_instance(&GeneratorParams::tiny(3), 1).unwrap();
        let mut data = inst.to_data();
        data.time_matrix[0][1] = -1;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("neg.json");
        std::fs::write(&path, serde_json::to_string(&data).unwrap()).unwrap();
        let err = load_instance(&path).unwrap_err();
        assert!(err.to_string().contains("negative"), "{err}");
    }
}
