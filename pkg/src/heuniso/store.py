"""Content-addressed JSON result store.

Layout under the store root::

    index.json            hash -> {command, timestamp, status}
    records/<hash>.json   one record per job
    .lock                 advisory lock serializing writers

The job hash covers the canonical job configuration and the toolkit
version; the payload carries its own digest so corruption is caught on read.
"""
from __future__ import annotations

import contextlib
import fcntl
import hashlib
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import CorruptRecord, StoreError

STORE_ENV = "HEUNISO_STORE"


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def job_hash(config: dict, version: str = __version__) -> str:
    return hashlib.sha256(canonical({"config": config, "version": version}).encode()).hexdigest()


def payload_digest(payload) -> str:
    return hashlib.sha256(canonical(payload).encode()).hexdigest()


def default_root() -> Path:
    env = os.environ.get(STORE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "heuniso"


@dataclass
class ResultRecord:
    hash: str
    command: str
    config: dict
    payload: object
    status: str
    timestamp: float
    version: str = __version__
    cached: bool = False

    def to_json(self) -> dict:
        return {
            "hash": self.hash,
            "command": self.command,
            "version": self.version,
            "timestamp": self.timestamp,
            "status": self.status,
            "config": self.config,
            "payload": self.payload,
            "payload_sha256": payload_digest(self.payload),
        }


class Store:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_root()

    @property
    def records(self) -> Path:
        return self.root / "records"

    @property
    def index_path(self) -> Path:
        return self.root / "index.json"

    def _ensure(self):
        try:
            self.records.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise StoreError(f"cannot create store at {self.root}: {e}") from None

    @contextlib.contextmanager
    def _locked(self):
        self._ensure()
        try:
            fh = open(self.root / ".lock", "a+")
        except OSError as e:
            raise StoreError(f"cannot open store lock: {e}") from None
        try:
            fcntl.flock(fh, fcntl.LOCK_EX)
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)
            fh.close()

    def path_for(self, h: str) -> Path:
        return self.records / f"{h}.json"

    def index(self) -> dict:
        if not self.index_path.exists():
            return {}
        try:
            return json.loads(self.index_path.read_text())
        except (OSError, ValueError) as e:
            raise StoreError(f"unreadable store index: {e}") from None

    def get(self, h: str) -> ResultRecord | None:
        p = self.path_for(h)
        if not p.exists():
            return None
        try:
            obj = json.loads(p.read_text())
        except (OSError, ValueError) as e:
            raise CorruptRecord(f"record {h} is unreadable: {e}") from None
        if obj.get("hash") != h or payload_digest(obj.get("payload")) != obj.get("payload_sha256"):
            raise CorruptRecord(f"record {h} fails its content check")
        if job_hash(obj.get("config"), obj.get("version", "")) != h:
            raise CorruptRecord(f"record {h} does not match its configuration")
        return ResultRecord(h, obj["command"], obj["config"], obj["payload"], obj["status"],
                            obj["timestamp"], obj.get("version", ""), cached=True)

    def put(self, rec: ResultRecord) -> Path:
        with self._locked():
            p = self.path_for(rec.hash)
            tmp = p.with_suffix(".tmp")
            try:
                tmp.write_text(json.dumps(rec.to_json(), sort_keys=True, indent=1))
                os.replace(tmp, p)
                idx = self.index()
                idx[rec.hash] = {"command": rec.command, "timestamp": rec.timestamp, "status": rec.status}
                itmp = self.index_path.with_suffix(".tmp")
                itmp.write_text(json.dumps(idx, sort_keys=True, indent=1))
                os.replace(itmp, self.index_path)
            except OSError as e:
                raise StoreError(f"cannot write record {rec.hash}: {e}") from None
        return p

    def new_record(self, command: str, config: dict, payload, status: str = "ok") -> ResultRecord:
        full = {"command": command, **config}
        return ResultRecord(job_hash(full), command, full, payload, status, time.time())

    def lookup(self, command: str, config: dict) -> ResultRecord | None:
        return self.get(job_hash({"command": command, **config}))
