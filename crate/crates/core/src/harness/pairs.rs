use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::scene::{load_scene, SceneFile};
use crate::error::{Error, Result};
use crate::features::{build_graph, ShapeContextConfig};
use crate::graph::{Matching, TrainingInstance};
use crate::loss::LossKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    /// Split of the `index`-th pair of a baseline.
    pub fn of_index(index: usize) -> Self {
        match index % 3 {
            0 => Split::Train,
            1 => Split::Validation,
            _ => Split::Test,
        }
    }
}

/// One labelled scene pair. Correspondences are `(id in scene_a, id in
/// scene_b)` landmark pairs; every point of `scene_a` must appear exactly
/// once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub scene_a: String,
    pub scene_b: String,
    pub correspondences: Vec<(u64, u64)>,
    pub baseline: usize,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairManifest {
    pub loss: LossKind,
    /// Build Delaunay edges; off for sparse query sets where edges are
    /// meaningless.
    pub triangulate: bool,
    pub entries: Vec<PairEntry>,
}

impl PairManifest {
    pub fn baselines(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.entries.iter().map(|e| e.baseline).collect();
        b.sort_unstable();
        b.dedup();
        b
    }

    pub fn extend(&mut self, other: PairManifest) {
        self.entries.extend(other.entries);
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// All pairs `(t, t + baseline)` of an ordered scene sequence, with ground
/// truth from shared landmark ids and the split chosen by pair index mod 3.
pub fn make_pairs(
    names: &[String],
    scenes: &[SceneFile],
    baseline: usize,
    loss: LossKind,
    triangulate: bool,
) -> Result<PairManifest> {
    if names.len() != scenes.len() {
        return Err(Error::dims("scene names", scenes.len(), names.len()));
    }
    if baseline >= scenes.len() {
        return Err(Error::InvalidArgument(format!("baseline {baseline} needs more than {} scenes", scenes.len())));
    }
    let mut entries = Vec::new();
    for (index, t) in (0..scenes.len() - baseline).enumerate() {
        let (a, b) = (&scenes[t], &scenes[t + baseline]);
        let (Some(la), Some(lb)) = (&a.labels, &b.labels) else {
            return Err(Error::InvalidArgument(format!(
                "scenes {} and {} need landmark ids to derive ground truth",
                names[t],
                names[t + baseline]
            )));
        };
        let ids_b: HashSet<u64> = lb.iter().copied().collect();
        let correspondences = la.iter().filter(|id| ids_b.contains(id)).map(|&id| (id, id)).collect();
        entries.push(PairEntry {
            scene_a: names[t].clone(),
            scene_b: names[t + baseline].clone(),
            correspondences,
            baseline,
            split: Split::of_index(index),
        });
    }
    if entries.is_empty() {
        return Err(Error::InvalidArgument("no pairs produced".into()));
    }
    Ok(PairManifest { loss, triangulate, entries })
}

/// A manifest entry turned into graphs and a ground-truth matching.
#[derive(Debug, Clone)]
pub struct PairInstance {
    pub entry: PairEntry,
    pub instance: TrainingInstance,
}

/// Builds the graph pair of one entry. Query nodes are the points of
/// `scene_a` in file order; target nodes those of `scene_b`.
pub fn build_instance(
    entry: &PairEntry,
    scene_a: &SceneFile,
    scene_b: &SceneFile,
    shape: &ShapeContextConfig,
    triangulate: bool,
) -> Result<TrainingInstance> {
    let (n, m) = (scene_a.len(), scene_b.len());
    if n > m {
        return Err(Error::InvalidArgument(format!(
            "query scene {} has more points ({n}) than target {} ({m})",
            entry.scene_a, entry.scene_b
        )));
    }
    let mut map = vec![usize::MAX; n];
    for &(ia, ib) in &entry.correspondences {
        let row = scene_a
            .index_of(ia)
            .ok_or_else(|| Error::InvalidArgument(format!("landmark {ia} not in {}", entry.scene_a)))?;
        let col = scene_b
            .index_of(ib)
            .ok_or_else(|| Error::InvalidArgument(format!("landmark {ib} not in {}", entry.scene_b)))?;
        if map[row] != usize::MAX {
            return Err(Error::InvalidArgument(format!("landmark {ia} corresponds twice")));
        }
        map[row] = col;
    }
    if let Some(row) = map.iter().position(|&c| c == usize::MAX) {
        return Err(Error::InvalidArgument(format!(
            "point {row} of {} has no correspondence in {}",
            entry.scene_a, entry.scene_b
        )));
    }
    let y_true = Matching::new(map, m)?;
    let g = build_graph(&scene_a.points, shape, triangulate)?;
    let g_prime = build_graph(&scene_b.points, shape, triangulate)?;
    TrainingInstance::new(g, g_prime, y_true, scene_b.width)
}

/// Scenes by name.
pub type SceneStore = BTreeMap<String, SceneFile>;

/// Loads every scene a manifest references, resolving names relative to
/// `base_dir`.
pub fn load_scenes_for(manifest: &PairManifest, base_dir: &Path) -> Result<SceneStore> {
    let mut store = SceneStore::new();
    for e in &manifest.entries {
        for name in [&e.scene_a, &e.scene_b] {
            if !store.contains_key(name) {
                let path: PathBuf = base_dir.join(name);
                store.insert(name.clone(), load_scene(&path)?);
            }
        }
    }
    Ok(store)
}

pub fn build_instances(
    manifest: &PairManifest,
    store: &SceneStore,
    shape: &ShapeContextConfig,
) -> Result<Vec<PairInstance>> {
    manifest
        .entries
        .iter()
        .map(|entry| {
            let get = |name: &String| {
                store.get(name).ok_or_else(|| Error::InvalidArgument(format!("scene {name} not loaded")))
            };
            let instance =
                build_instance(entry, get(&entry.scene_a)?, get(&entry.scene_b)?, shape, manifest.triangulate)?;
            Ok(PairInstance { entry: entry.clone(), instance })
        })
        .collect()
}
