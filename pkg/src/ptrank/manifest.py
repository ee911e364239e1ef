"""Run manifests: what ran, with which config, over which bytes.

Every successful command writes ``manifest.json`` next to its outputs,
atomically (write to a temp file, then rename). Input and output files
are recorded with SHA-256 digests, so two runs can be compared by
digest without re-reading the artifacts. The manifest itself carries
wall-clock timing and is therefore the one output that is not
byte-reproducible across runs.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError

MANIFEST_NAME = "manifest.json"


def file_digest(path: str | Path) -> tuple[str, int]:
    """(hex SHA-256, size in bytes) of a file, streamed."""
    digest = hashlib.sha256()
    size = 0
    try:
        with open(path, "rb") as handle:
            while chunk := handle.read(1 << 16):
                digest.update(chunk)
                size += len(chunk)
    except OSError as exc:
        raise DataError(f"cannot digest {path}: {exc.strerror}", path=str(path)) from exc
    return digest.hexdigest(), size


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    """One command's provenance record."""

    command: str
    seed: int
    config_sha256: str
    inputs: list[dict] = field(default_factory=list)
    outputs: list[dict] = field(default_factory=list)
    started_at: str = ""
    finished_at: str = ""
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "config_sha256": self.config_sha256,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timing": {
                "started_at": self.started_at,
                "finished_at": self.finished_at,
                "seconds": self.seconds,
            },
        }


class ManifestWriter:
    """Collects digests during a command run and writes the manifest once."""

    def __init__(self, command: str, seed: int, config_text: str):
        self.manifest = RunManifest(command=command, seed=seed, config_sha256=text_digest(config_text))
        self._t0 = time.monotonic()
        self.manifest.started_at = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")

    def add_input(self, role: str, path: str | Path) -> None:
        digest, size = file_digest(path)
        self.manifest.inputs.append({"role": role, "path": str(path), "sha256": digest, "bytes": size})

    def add_output(self, role: str, path: str | Path) -> None:
        digest, size = file_digest(path)
        self.manifest.outputs.append({"role": role, "path": str(path), "sha256": digest, "bytes": size})

    def write(self, directory: str | Path) -> Path:
        """Finalize timing and atomically write ``manifest.json``."""
        self.manifest.finished_at = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        self.manifest.seconds = round(time.monotonic() - self._t0, 3)
        directory = Path(directory)
        target = directory / MANIFEST_NAME
        payload = json.dumps(self.manifest.to_dict(), indent=2, ensure_ascii=False) + "\n"
        tmp = directory / f".{MANIFEST_NAME}.tmp"
        try:
            tmp.write_text(payload, encoding="utf-8")
            os.replace(tmp, target)
        except OSError as exc:
            raise DataError(f"cannot write manifest: {exc.strerror}", path=str(target)) from exc
        return target


def load_manifest(path: str | Path) -> RunManifest:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
        timing = obj.get("timing", {})
        return RunManifest(
            command=obj["command"],
            seed=obj["seed"],
            config_sha256=obj["config_sha256"],
            inputs=obj.get("inputs", []),
            outputs=obj.get("outputs", []),
            started_at=timing.get("started_at", ""),
            finished_at=timing.get("finished_at", ""),
            seconds=timing.get("seconds", 0.0),
        )
    except OSError as exc:
        raise DataError(f"cannot read manifest: {exc.strerror}", path=str(path)) from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataError(f"malformed manifest: {exc}", path=str(path)) from None
