//! Running a solver as a child process with a hard deadline.

use std::io::{self, Read, Write};
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, ExitStatus, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

const POLL: Duration = Duration::from_millis(2);

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot start solver `{}`: {source}", path.display())]
    Spawn {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("i/o error talking to the solver: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug)]
pub struct RawOutput {
    pub stdout: String,
    pub stderr: String,
    pub status: Option<ExitStatus>,
    pub timed_out: bool,
}

fn kill_group(child: &mut Child) {
    let pid = child.id() as libc::pid_t;
    // SAFETY: killpg only sends a signal; the group was created for this child.
    unsafe {
        libc::killpg(pid, libc::SIGKILL);
    }
    let _ = child.kill();
}

fn collect<R: Read + Send + 'static>(mut r: R) -> thread::JoinHandle<Vec<u8>> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = r.read_to_end(&mut buf);
        buf
    })
}

/// Runs `exe args...` with `input` on stdin. The child gets its own process
/// group, which is killed when `timeout` expires. The child is always reaped.
pub fn run_with_timeout(
    exe: &Path,
    args: &[String],
    input: &str,
    timeout: Duration,
) -> Result<RawOutput, RunError> {
    let mut child = Command::new(exe)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0)
        .spawn()
        .map_err(|source| RunError::Spawn {
            path: exe.to_path_buf(),
            source,
        })?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let data = input.as_bytes().to_vec();
    let writer = thread::spawn(move || {
        let r = stdin.write_all(&data);
        drop(stdin);
        r
    });
    let out = collect(child.stdout.take().expect("piped stdout"));
    let err = collect(child.stderr.take().expect("piped stderr"));

    let deadline = Instant::now() + timeout;
    let mut timed_out = false;
    let status = loop {
        match child.try_wait() {
            Ok(Some(s)) => break Some(s),
            Ok(None) if Instant::now() >= deadline => {
                timed_out = true;
                kill_group(&mut child);
                break child.wait().ok();
            }
            Ok(None) => thread::sleep(POLL),
            Err(e) => {
                kill_group(&mut child);
                let _ = child.wait();
                return Err(RunError::Io(e));
            }
        }
    };
    // a grandchild holding the pipes open is gone with the group
    if !timed_out {
        unsafe {
            libc::killpg(child.id() as libc::pid_t, libc::SIGKILL);
        }
    }
    let write_result = writer.join().unwrap_or(Ok(()));
    let stdout = String::from_utf8_lossy(&out.join().unwrap_or_default()).into_owned();
    let stderr = String::from_utf8_lossy(&err.join().unwrap_or_default()).into_owned();
    if let Err(e) = write_result {
        // a solver may exit before reading everything, e.g. on a parse error
        if e.kind() != io::ErrorKind::BrokenPipe && !timed_out {
            return Err(RunError::Io(e));
        }
    }
    Ok(RawOutput {
        stdout,
        stderr,
        status,
        timed_out,
    })
}
