"""HTTP+JSON endpoints over the workbench core."""
from __future__ import annotations

import os
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Response
from fastapi.responses import FileResponse, PlainTextResponse
from pydantic import ValidationError

from .. import __version__, analytic, ber, profiles
from ..channels import BIAWGN, ChannelError
from .jobs import PARAM_MODELS, JobManager, UnknownProfile
from .schemas import (BerGainRequest, BerGainResponse, ExitRequest,
                      ExitResponse, JobOut, JobRequest, ProfileListOut,
                      ProfileModel, ProfileOut)
from .workspace import Workspace, WorkspaceError


def _bad_request(detail) -> HTTPException:
    return HTTPException(status_code=400, detail=detail)


def create_app(workspace: Workspace, pool_size: int | None = None) -> FastAPI:
    manager = JobManager(workspace, pool_size=pool_size)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        manager.shutdown()

    app = FastAPI(title="sexitlab service", version=__version__, lifespan=lifespan)
    app.state.workspace = workspace
    app.state.manager = manager

    def profile_out(name: str) -> ProfileOut:
        prof = workspace.get_profile(name)
        if prof is None:
            raise HTTPException(status_code=404, detail=f"no profile {name!r}")
        return ProfileOut(name=name, profile=profiles.profile_to_dict(prof),
                          design_rate=profiles.design_rate(prof))

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/profiles", response_model=ProfileListOut)
    def list_profiles():
        return ProfileListOut(profiles=[profile_out(n) for n in workspace.list_profiles()])

    @app.get("/profiles/{name}", response_model=ProfileOut)
    def get_profile(name: str):
        return profile_out(name)

    @app.post("/profiles/{name}", response_model=ProfileOut, status_code=201)
    def put_profile(name: str, body: ProfileModel):
        try:
            prof = body.to_profile()
        except profiles.ProfileError as exc:
            raise _bad_request(str(exc).split("; "))
        try:
            workspace.put_profile(name, prof)
        except FileExistsError:
            raise HTTPException(status_code=409, detail=f"profile {name!r} exists")
        except WorkspaceError as exc:
            raise _bad_request(str(exc))
        return profile_out(name)

    @app.delete("/profiles/{name}", status_code=204)
    def delete_profile(name: str):
        try:
            if not workspace.delete_profile(name):
                raise HTTPException(status_code=404, detail=f"no profile {name!r}")
        except WorkspaceError as exc:
            raise _bad_request(str(exc))
        return Response(status_code=204)

    @app.post("/analytic/exit", response_model=ExitResponse)
    def analytic_exit(body: ExitRequest):
        try:
            prof = manager.resolve_profile(body)
            rate = profiles.design_rate(prof)
            channel = body.channel.to_spec(default_rate=rate)
            vnd, cnd = analytic.sample_curves(prof, channel, body.n_points)
        except UnknownProfile as exc:
            raise HTTPException(status_code=404, detail=f"no profile {exc}")
        except (profiles.ProfileError, ChannelError, ValueError) as exc:
            raise _bad_request(str(exc))
        return ExitResponse(i_a=vnd.i_a.tolist(), i_e_vnd=vnd.i_e.tolist(),
                            i_e_cnd=cnd.i_e.tolist(), design_rate=rate)

    def _finished_ber_table(job_id: str) -> ber.BerTable:
        job = manager.get(job_id)
        if job is None or job.kind != "ber" or job.status != "done":
            raise HTTPException(status_code=404,
                                detail=f"no finished ber job {job_id!r}")
        path = os.path.join(workspace.result_dir(job_id), "ber.csv")
        with open(path, encoding="utf-8") as fh:
            kind = job.params.channel_kind
            table = ber.from_csv(fh.read(), kind=kind)
        return ber.BerTable(kind=table.kind, rows=table.rows,
                            config={"kind": kind, "n": job.params.n})

    @app.post("/analytic/ber_gain", response_model=BerGainResponse)
    def ber_gain(body: BerGainRequest):
        table_a = _finished_ber_table(body.job_a)
        table_b = _finished_ber_table(body.job_b)
        try:
            gain = ber.gain_at_ber(table_a, table_b, body.target)
        except ValueError as exc:
            raise _bad_request(str(exc))
        unit = "dB" if table_a.kind == BIAWGN else "delta_epsilon"
        return BerGainResponse(gain=gain, unit=unit)

    @app.post("/jobs", response_model=JobOut, status_code=201)
    def submit_job(body: JobRequest):
        model = PARAM_MODELS[body.kind]
        try:
            params = model.model_validate(body.params)
        except ValidationError as exc:
            raise _bad_request([f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}"
                                for e in exc.errors()])
        try:
            manager.resolve_profile(params)  # fail fast on bad references
        except UnknownProfile as exc:
            raise HTTPException(status_code=404, detail=f"no profile {exc}")
        except profiles.ProfileError as exc:
            raise _bad_request(str(exc))
        job = manager.submit(body.kind, params)
        return JobOut(**job.public())

    @app.get("/jobs", response_model=list[JobOut])
    def list_jobs():
        return [JobOut(**j.public()) for j in manager.all_jobs()]

    @app.get("/jobs/{job_id}", response_model=JobOut)
    def get_job(job_id: str):
        job = manager.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job id")
        return JobOut(**job.public())

    @app.delete("/jobs/{job_id}", response_model=JobOut)
    def cancel_job(job_id: str):
        job = manager.cancel(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job id")
        return JobOut(**job.public())

    @app.get("/results/{job_id}")
    def get_result(job_id: str):
        job = manager.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job id")
        if job.status != "done" or not job.result_ref:
            raise HTTPException(status_code=404,
                                detail=f"job is {job.status}; no result available")
        path = os.path.join(workspace.result_dir(job_id), job.result_ref)
        if job.result_ref.endswith(".csv"):
            with open(path, encoding="utf-8") as fh:
                return PlainTextResponse(fh.read(), media_type="text/csv")
        return FileResponse(path, media_type="application/json")

    @app.get("/results/{job_id}/files/{name}")
    def get_result_file(job_id: str, name: str):
        job = manager.get(job_id)
        if job is None or job.status != "done":
            raise HTTPException(status_code=404, detail="no such result")
        if "/" in name or ".." in name:
            raise _bad_request("bad file name")
        path = os.path.join(workspace.result_dir(job_id), name)
        if not os.path.exists(path):
            raise HTTPException(status_code=404, detail=f"no file {name!r}")
        media = ("image/x-portable-graymap" if name.endswith(".pgm")
                 else "text/csv" if name.endswith(".csv") else "application/json")
        return FileResponse(path, media_type=media)

    return app
