"""In-process job queue over a bounded thread pool.

Jobs never share mutable state; cancellation is best-effort between work
items (trajectories / frame batches) via the engines' progress callbacks.
Results are written to the workspace only when a job completes, so a
cancelled job leaves no partial artifacts.
"""
from __future__ import annotations

import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import analytic, ber, profiles, sexit
from ..parallel import Cancelled
from .schemas import (AnalyticParams, BerParams, SexitIndependentParams,
                      SexitParams, ThresholdParams)
from .workspace import Workspace

QUEUED = "queued"
RUNNING = "running"
DONE = "done"
FAILED = "failed"
CANCELLED = "cancelled"

PARAM_MODELS = {
    "sexit": SexitParams,
    "sexit_independent": SexitIndependentParams,
    "ber": BerParams,
    "analytic": AnalyticParams,
    "threshold": ThresholdParams,
}


@dataclass
class Job:
    id: str
    kind: str
    params: object
    status: str = QUEUED
    progress: float = 0.0
    error: str | None = None
    result_ref: str | None = None
    cancel_event: threading.Event = field(default_factory=threading.Event)

    def public(self) -> dict:
        return {"id": self.id, "kind": self.kind, "status": self.status,
                "progress": self.progress, "error": self.error,
                "result_ref": self.result_ref}


class UnknownProfile(ValueError):
    pass


class JobManager:
    def __init__(self, workspace: Workspace, pool_size: int | None = None):
        self.workspace = workspace
        size = pool_size or os.cpu_count() or 2
        self._pool = ThreadPoolExecutor(max_workers=size)
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def resolve_profile(self, params) -> profiles.DegreeProfile:
        if params.profile is not None:
            return params.profile.to_profile()
        if params.profile_name:
            prof = self.workspace.get_profile(params.profile_name)
            if prof is None:
                raise UnknownProfile(params.profile_name)
            return prof
        raise profiles.ProfileError("provide either profile or profile_name")

    def submit(self, kind: str, params) -> Job:
        job = Job(id=uuid.uuid4().hex, kind=kind, params=params)
        with self._lock:
            self._jobs[job.id] = job
        self._persist()
        self._pool.submit(self._run, job)
        return job

    def get(self, job_id: str) -> Job | None:
        return self._jobs.get(job_id)

    def all_jobs(self) -> list[Job]:
        with self._lock:
            return sorted(self._jobs.values(), key=lambda j: j.id)

    def cancel(self, job_id: str) -> Job | None:
        job = self._jobs.get(job_id)
        if job is None:
            return None
        job.cancel_event.set()
        return job

    def _persist(self) -> None:
        self.workspace.record_jobs([j.public() for j in self.all_jobs()])

    def _progress_cb(self, job: Job):
        def cb(done: int, total: int) -> bool:
            job.progress = done / max(total, 1)
            if job.cancel_event.is_set():
                return False
            return True
        return cb

    def _run(self, job: Job) -> None:
        job.status = RUNNING
        self._persist()
        try:
            if job.cancel_event.is_set():
                raise Cancelled("cancelled before start")
            runner = getattr(self, f"_run_{job.kind}")
            job.result_ref = runner(job)
            job.progress = 1.0
            job.status = DONE
        except Cancelled:
            job.status = CANCELLED
            job.error = "cancelled"
        except Exception as exc:  # report, never crash the pool
            job.status = FAILED
            job.error = f"{type(exc).__name__}: {exc}"
        self._persist()

    def _result_dir(self, job: Job) -> str:
        path = self.workspace.result_dir(job.id)
        os.makedirs(path, exist_ok=True)
        return path

    def _run_sexit(self, job: Job) -> str:
        p: SexitParams = job.params
        prof = self.resolve_profile(p)
        rate = profiles.design_rate(prof)
        config = sexit.SExitConfig(
            channel=p.channel.to_spec(default_rate=rate), n=p.n, profile=prof,
            m=p.m, max_iter=p.max_iter, n_grid=p.n_grid, h_mode=p.h_mode,
            seed=p.seed, workers=p.workers)
        result = sexit.run_sexit(config, progress=self._progress_cb(job))
        outdir = self._result_dir(job)
        sexit.write_result(result, outdir, include_trajectories=p.include_trajectories)
        return "bundle.json"

    def _run_sexit_independent(self, job: Job) -> str:
        p: SexitIndependentParams = job.params
        prof = self.resolve_profile(p)
        rate = profiles.design_rate(prof)
        config = sexit.SExitConfig(
            channel=p.channel.to_spec(default_rate=rate), n=p.n, profile=prof,
            m=1, max_iter=p.max_iter, n_grid=p.n_grid, seed=p.seed,
            workers=p.workers)
        grid = np.linspace(0.0, 1.0, p.ia_points)
        result = sexit.run_independent(config, ia_grid=grid,
                                       samples_per_point=p.samples_per_point,
                                       progress=self._progress_cb(job))
        outdir = self._result_dir(job)
        sexit.write_result(result, outdir)
        return "bundle.json"

    def _run_ber(self, job: Job) -> str:
        p: BerParams = job.params
        prof = self.resolve_profile(p)
        # small batches keep the progress/cancel loop under ~2 s even for
        # dense short profiles whose per-frame graph draws are expensive
        table = ber.run_ber(prof, p.n, p.channel_kind, p.points,
                            min_bit_errors=p.min_bit_errors,
                            max_frames=p.max_frames, h_refresh=p.h_refresh,
                            max_iter=p.max_iter, seed=p.seed, workers=p.workers,
                            rate=p.rate, batch=24,
                            progress=self._progress_cb(job))
        outdir = self._result_dir(job)
        with open(os.path.join(outdir, "ber.csv"), "w", encoding="utf-8") as fh:
            fh.write(ber.to_csv(table))
        with open(os.path.join(outdir, "table.json"), "w", encoding="utf-8") as fh:
            fh.write(ber.table_json(table))
        return "ber.csv"

    def _run_analytic(self, job: Job) -> str:
        p: AnalyticParams = job.params
        prof = self.resolve_profile(p)
        rate = profiles.design_rate(prof)
        channel = p.channel.to_spec(default_rate=rate)
        vnd, cnd = analytic.sample_curves(prof, channel, p.n_points)
        outdir = self._result_dir(job)
        data = {"i_a": vnd.i_a.tolist(), "i_e_vnd": vnd.i_e.tolist(),
                "i_e_cnd": cnd.i_e.tolist(), "design_rate": rate}
        with open(os.path.join(outdir, "curves.json"), "w", encoding="utf-8") as fh:
            json.dump(data, fh, sort_keys=True)
        with open(os.path.join(outdir, "curves.csv"), "w", encoding="utf-8") as fh:
            fh.write(analytic.curves_csv(prof, channel, p.n_points))
        return "curves.json"

    def _run_threshold(self, job: Job) -> str:
        p: ThresholdParams = job.params
        prof = self.resolve_profile(p)
        value = analytic.threshold_search(prof, p.channel_kind, rate=p.rate)
        outdir = self._result_dir(job)
        data = {"channel_kind": p.channel_kind, "threshold": value}
        with open(os.path.join(outdir, "threshold.json"), "w", encoding="utf-8") as fh:
            json.dump(data, fh, sort_keys=True)
        return "threshold.json"

    def shutdown(self) -> None:
        for job in self.all_jobs():
            job.cancel_event.set()
        self._pool.shutdown(wait=False, cancel_futures=True)
