//! Content-addressed cache of the expensive tables: the Schwartz profile and
//! the sampled spatial profiles of family members. A manifest records every
//! entry; corrupted files are detected through the payload checksum and
//! rebuilt. With caching disabled, fresh values are compared against any
//! present cache entries as a self-consistency check.

use br_core::family::FamilyMember;
use br_core::interp::CubicTable;
use br_core::params::Params;
use br_core::profiles::{BumpSpec, SchwartzProfile};
use br_core::tables::{fnv1a, load_table, save_table, TableMeta, CONVENTION_ID};
use br_core::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    /// key -> file name
    pub entries: BTreeMap<String, String>,
}

pub struct CacheEnv {
    dir: PathBuf,
    pub enabled: bool,
    pub psi: Arc<SchwartzProfile>,
    manifest: std::sync::Mutex<Manifest>,
}

fn psi_key(tail_tol: f64) -> String {
    let h = fnv1a(format!("psi|{CONVENTION_ID}|{tail_tol:e}|bump=(0.25,2,0.5,1,s=1)").as_bytes());
    format!("psi-{h:016x}")
}

fn member_key(params: &Params) -> String {
    let h = fnv1a(
        format!(
            "member|{CONVENTION_ID}|d={}|eps={:016x}|gamma={:016x}",
            params.d,
            params.epsilon.to_bits(),
            params.gamma.to_bits()
        )
        .as_bytes(),
    );
    format!("member-{h:016x}")
}

impl CacheEnv {
    /// Open (or create) the cache directory and obtain psi, from cache when
    /// possible.
    pub fn open(dir: &Path, enabled: bool) -> Result<CacheEnv> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::InvalidParam(format!("cache dir {dir:?}: {e}")))?;
        let manifest_path = dir.join("manifest.json");
        let manifest: Manifest = std::fs::read_to_string(&manifest_path)
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok())
            .unwrap_or_default();

        let tail_tol = 1e-10;
        let key = psi_key(tail_tol);
        let file = dir.join(format!("{key}.tbl"));
        let mut cached_psi: Option<SchwartzProfile> = None;
        if file.exists() {
            match load_table(&file) {
                Ok((meta, table)) if meta.kind == "psi" => {
                    cached_psi = Some(SchwartzProfile::from_parts(
                        BumpSpec::psi_hat(),
                        table,
                        meta.tail_radius,
                        meta.tail_bound,
                    ));
                }
                Ok(_) => eprintln!("cache: {file:?} has unexpected kind; rebuilding"),
                Err(e) => eprintln!("cache: {e}; rebuilding psi table"),
            }
        }
        let psi = match (&cached_psi, enabled) {
            (Some(_), true) => cached_psi.unwrap(),
            _ => {
                let built = SchwartzProfile::build(BumpSpec::psi_hat(), tail_tol)?;
                if let Some(old) = &cached_psi {
                    compare_tables("psi", old.table(), built.table());
                }
                if enabled {
                    let meta = TableMeta {
                        kind: "psi".into(),
                        spec_hash: fnv1a(key.as_bytes()),
                        tail_radius: built.s_max,
                        tail_bound: built.tail_bound,
                    };
                    save_table(&file, &meta, built.table())?;
                }
                built
            }
        };

        let env = CacheEnv {
            dir: dir.to_path_buf(),
            enabled,
            psi: Arc::new(psi),
            manifest: std::sync::Mutex::new(manifest),
        };
        if enabled {
            env.record(&key, &format!("{key}.tbl"))?;
        }
        Ok(env)
    }

    fn record(&self, key: &str, file: &str) -> Result<()> {
        let mut m = self.manifest.lock().unwrap();
        m.version = 1;
        m.entries.insert(key.to_string(), file.to_string());
        let text = serde_json::to_string_pretty(&*m).expect("manifest");
        std::fs::write(self.dir.join("manifest.json"), text)
            .map_err(|e| Error::InvalidParam(format!("manifest write: {e}")))
    }

    /// Whether the manifest already lists this member's table.
    pub fn member_cached(&self, params: &Params) -> bool {
        let key = member_key(params);
        self.manifest.lock().unwrap().entries.contains_key(&key)
            && self.dir.join(format!("{key}.tbl")).exists()
    }

    /// Construct a member, priming its spatial table from the cache when
    /// available, and persisting it after construction otherwise.
    pub fn member(&self, params: Params) -> Result<Arc<FamilyMember>> {
        let member = FamilyMember::new(params, self.psi.clone())?;
        let key = member_key(&params);
        let file = self.dir.join(format!("{key}.tbl"));
        let mut cached: Option<(TableMeta, CubicTable)> = None;
        if file.exists() {
            match load_table(&file) {
                Ok((meta, table)) if meta.kind == "member-spatial" => {
                    cached = Some((meta, table));
                }
                Ok(_) => eprintln!("cache: {file:?} unexpected kind; rebuilding"),
                Err(e) => eprintln!("cache: {e}; rebuilding member table"),
            }
        }
        match (cached, self.enabled) {
            (Some((meta, table)), true) => {
                member.prime_spatial(table, meta.tail_bound);
            }
            (cached, _) => {
                let prof = member.spatial_profile();
                if let Some((_, old)) = &cached {
                    if let Some((xs, ys)) = prof.sample_nodes() {
                        compare_tables("member", old, &CubicTable::new(xs, ys));
                    }
                }
                if self.enabled {
                    if let Some((xs, ys)) = prof.sample_nodes() {
                        let table = CubicTable::new(xs, ys);
                        let meta = TableMeta {
                            kind: "member-spatial".into(),
                            spec_hash: fnv1a(key.as_bytes()),
                            tail_radius: prof.window.1,
                            tail_bound: prof.tail_bound.unwrap_or(0.0),
                        };
                        save_table(&file, &meta, &table)?;
                        self.record(&key, &format!("{key}.tbl"))?;
                    }
                }
            }
        }
        Ok(Arc::new(member))
    }
}

/// Self-consistency of a fresh recompute against a cached table (1e-12).
fn compare_tables(kind: &str, old: &CubicTable, new: &CubicTable) {
    let (ox, oy) = old.nodes();
    let (nx, ny) = new.nodes();
    if ox.len() != nx.len() {
        eprintln!(
            "cache consistency: {kind} grid size changed ({} -> {})",
            ox.len(),
            nx.len()
        );
        return;
    }
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..oy.len() {
        worst = worst.max((oy[i] - ny[i]).norm());
        scale = scale.max(ny[i].norm());
    }
    if worst > 1e-12 * scale.max(1e-300) {
        eprintln!("cache consistency: {kind} recompute deviates by {worst:.3e} (scale {scale:.3e})");
    }
}
