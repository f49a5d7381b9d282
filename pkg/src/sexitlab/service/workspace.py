"""File-backed workspace: named profiles, job records, result artifacts.

Artifacts are plain files under the workspace root with a JSON job index;
the index is only touched under a single writer lock.
"""
from __future__ import annotations

import json
import os
import re
import threading

from .. import profiles

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]{0,63}$")


class WorkspaceError(ValueError):
    pass


class Workspace:
    def __init__(self, root: str):
        self.root = os.path.abspath(root)
        self.profiles_dir = os.path.join(self.root, "profiles")
        self.results_dir = os.path.join(self.root, "results")
        self.jobs_index = os.path.join(self.root, "jobs.json")
        for d in (self.root, self.profiles_dir, self.results_dir):
            os.makedirs(d, exist_ok=True)
        self._lock = threading.Lock()

    @staticmethod
    def check_name(name: str) -> None:
        if not _NAME_RE.match(name):
            raise WorkspaceError(f"invalid profile name {name!r}")

    def _profile_path(self, name: str) -> str:
        self.check_name(name)
        return os.path.join(self.profiles_dir, f"{name}.json")

    def list_profiles(self) -> list[str]:
        return sorted(p[:-5] for p in os.listdir(self.profiles_dir)
                      if p.endswith(".json"))

    def has_profile(self, name: str) -> bool:
        return os.path.exists(self._profile_path(name))

    def get_profile(self, name: str) -> profiles.DegreeProfile | None:
        path = self._profile_path(name)
        if not os.path.exists(path):
            return None
        return profiles.load_profile(path)

    def put_profile(self, name: str, profile: profiles.DegreeProfile,
                    overwrite: bool = False) -> None:
        path = self._profile_path(name)
        with self._lock:
            if os.path.exists(path) and not overwrite:
                raise FileExistsError(name)
            profiles.save_profile(profile, path)

    def delete_profile(self, name: str) -> bool:
        path = self._profile_path(name)
        with self._lock:
            if not os.path.exists(path):
                return False
            os.remove(path)
            return True

    def result_dir(self, job_id: str) -> str:
        return os.path.join(self.results_dir, job_id)

    def record_jobs(self, records: list[dict]) -> None:
        with self._lock:
            tmp = self.jobs_index + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(records, fh, indent=2, sort_keys=True)
            os.replace(tmp, self.jobs_index)

    def load_jobs(self) -> list[dict]:
        if not os.path.exists(self.jobs_index):
            return []
        with open(self.jobs_index, encoding="utf-8") as fh:
            return json.load(fh)
