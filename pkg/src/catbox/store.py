"""File-per-campaign persistence with atomic writes.

Each campaign lives in one JSON document under the store root, named by a
128-bit random hex identifier. Writes go to a temporary file in the same
directory, are fsynced, and then atomically replace the target, so a reader
(or a restarted service) only ever sees a complete document.
"""

from __future__ import annotations

import json
import os
import re
import secrets
import tempfile
import threading
from pathlib import Path
from typing import Any

from .engine import Campaign, campaign_from_json, campaign_to_json

_ID_RE = re.compile(r"^[0-9a-f]{32}$")


class UnknownCampaignError(KeyError):
    pass


def atomic_write_json(path: Path, doc: dict[str, Any]) -> None:
    data = json.dumps(doc, indent=2) + "\n"
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class CampaignStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def path(self, campaign_id: str) -> Path:
        if not _ID_RE.match(campaign_id):
            raise UnknownCampaignError(campaign_id)
        return self.root / f"{campaign_id}.json"

    def lock(self, campaign_id: str) -> threading.Lock:
        """Per-campaign exclusive write lock (in-process)."""
        with self._locks_guard:
            if campaign_id not in self._locks:
                self._locks[campaign_id] = threading.Lock()
            return self._locks[campaign_id]

    def exists(self, campaign_id: str) -> bool:
        try:
            return self.path(campaign_id).exists()
        except UnknownCampaignError:
            return False

    def create(self, campaign: Campaign) -> str:
        campaign_id = secrets.token_hex(16)
        campaign.campaign_id = campaign_id
        self.save(campaign)
        return campaign_id

    def save(self, campaign: Campaign) -> None:
        if campaign.campaign_id is None:
            raise ValueError("campaign has no id; use create()")
        atomic_write_json(self.path(campaign.campaign_id), campaign_to_json(campaign))

    def load_doc(self, campaign_id: str) -> dict[str, Any]:
        p = self.path(campaign_id)
        if not p.exists():
            raise UnknownCampaignError(campaign_id)
        return json.loads(p.read_text())

    def load(self, campaign_id: str) -> Campaign:
        return campaign_from_json(self.load_doc(campaign_id))

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json") if _ID_RE.match(p.stem))
