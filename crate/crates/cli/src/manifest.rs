//! Run manifests: a small JSON record of what was run and a checksum of what
//! it produced, so results can be tied back to exact invocations.

use serde_json::json;
use sha2::{Digest, Sha256};
use std::io;
use std::path::Path;

pub fn write(path: &Path, subcommand: &str, params: &serde_json::Value, output: &str) -> io::Result<()> {
    let digest = Sha256::digest(output.as_bytes());
    let checksum: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let doc = json!({
        "subcommand": subcommand,
        "params": params,
        "version": env!("CARGO_PKG_VERSION"),
        "output_sha256": checksum,
        "output_bytes": output.len(),
    });
    std::fs::write(path, format!("{:#}\n", doc))
}
