//! Host plumbing: thread pinning, run metadata, output helpers.

use std::io;
use std::path::Path;
use std::process::Command;

use serde::Serialize;

use crate::config::BenchConfig;

/// Pins the calling thread to one hardware thread. Returns false when the
/// platform does not support it; callers degrade to unpinned.
#[cfg(target_os = "linux")]
pub fn pin_current_thread(index: usize) -> bool {
    let cores = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let core = index % cores;
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_ZERO(&mut set);
        libc::CPU_SET(core, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
pub fn pin_current_thread(_index: usize) -> bool {
    false
}

pub fn hostname() -> String {
    #[cfg(target_os = "linux")]
    {
        let mut buf = [0u8; 256];
        let ok = unsafe { libc::gethostname(buf.as_mut_ptr() as *mut libc::c_char, buf.len()) };
        if ok == 0 {
            let end = buf.iter().position(|&b| b == 0).unwrap_or(buf.len());
            if let Ok(name) = std::str::from_utf8(&buf[..end]) {
                return name.to_string();
            }
        }
    }
    std::env::var("HOSTNAME").unwrap_or_else(|_| "unknown".into())
}

pub fn git_revision() -> Option<String> {
    let out = Command::new("git")
        .args(["rev-parse", "--short", "HEAD"])
        .output()
        .ok()?;
    if !out.status.success() {
        return None;
    }
    Some(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    config: &'a BenchConfig,
    benchmark: &'a str,
    git_revision: Option<String>,
    host: String,
    unix_time_secs: u64,
}

/// Writes the JSON sidecar describing a run.
pub fn write_metadata<P: AsRef<Path>>(
    path: P,
    benchmark: &str,
    config: &BenchConfig,
) -> io::Result<()> {
    let meta = RunMetadata {
        config,
        benchmark,
        git_revision: git_revision(),
        host: hostname(),
        unix_time_secs: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    std::fs::write(path, serde_json::to_string_pretty(&meta)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metadata_is_valid_json() {
        let dir = std::env::temp_dir().join("mq-bench-meta-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("meta.json");
        write_metadata(&path, "throughput", &BenchConfig::new(2)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["benchmark"], "throughput");
        assert_eq!(value["config"]["threads"], 2);
    }
}
