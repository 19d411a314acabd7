"""Subprocess execution with whole-process-group timeout enforcement.

Every child runs in its own session.  On timeout, on cancellation, and
after normal exit, the entire process group is sent SIGKILL so shells and
compiler drivers cannot leave grandchildren behind.
"""

from __future__ import annotations

import os
import signal
import subprocess
import threading
import time
from dataclasses import dataclass

_active: set[int] = set()
_lock = threading.Lock()


@dataclass(frozen=True)
class ProcessOutcome:
    returncode: int | None
    stdout: bytes
    stderr: bytes
    timed_out: bool
    wall_time: float

    @property
    def signal(self) -> int | None:
        if self.returncode is not None and self.returncode < 0:
            return -self.returncode
        return None


def _kill_group(pgid: int) -> None:
    try:
        os.killpg(pgid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass


def kill_all_active() -> None:
    """Terminate every process group this module has started and not reaped."""
    with _lock:
        groups = list(_active)
    for pgid in groups:
        _kill_group(pgid)


def run(argv, timeout: float, cwd=None, stdin=subprocess.DEVNULL, env=None) -> ProcessOutcome:
    """Run ``argv`` and capture its output; never raises on timeout.

    Raises ``FileNotFoundError`` / ``PermissionError`` when the executable
    cannot be spawned.
    """
    start = time.monotonic()
    proc = subprocess.Popen(
        list(argv),
        stdin=stdin,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        cwd=cwd,
        env=env,
        start_new_session=True,
    )
    pgid = proc.pid
    with _lock:
        _active.add(pgid)
    # Drain pipes on threads and wait on the leader itself: a grandchild
    # that keeps stdout open must not turn a finished run into a timeout.
    chunks = {"out": [], "err": []}
    readers = [threading.Thread(target=_drain, args=(pipe, chunks[key]), daemon=True)
               for pipe, key in ((proc.stdout, "out"), (proc.stderr, "err"))]
    for t in readers:
        t.start()
    timed_out = False
    try:
        try:
            proc.wait(timeout=timeout)
        except subprocess.TimeoutExpired:
            timed_out = True
            _kill_group(pgid)
            proc.wait()
        except BaseException:
            _kill_group(pgid)
            proc.wait()
            raise
    finally:
        # stragglers that outlived the leader
        _kill_group(pgid)
        with _lock:
            _active.discard(pgid)
        for t in readers:
            t.join()
        proc.stdout.close()
        proc.stderr.close()
    wall = time.monotonic() - start
    if timed_out:
        wall = max(wall, float(timeout))
    return ProcessOutcome(proc.returncode, b"".join(chunks["out"]), b"".join(chunks["err"]),
                          timed_out, wall)


def _drain(pipe, sink: list) -> None:
    for block in iter(lambda: pipe.read(65536), b""):
        sink.append(block)


def group_alive(pgid: int) -> bool:
    try:
        os.killpg(pgid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True
