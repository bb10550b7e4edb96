"""FastAPI application exposing the simulator as a session service."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import handlers, models as m
from .handlers import ServiceError


def create_app() -> FastAPI:
    app = FastAPI(title="swarmpath", version=handlers.version().version)

    @app.exception_handler(ServiceError)
    async def service_error(_: Request, exc: ServiceError) -> JSONResponse:
        body = m.ErrorBody(error=exc.error, detail=exc.detail)
        return JSONResponse(status_code=exc.status, content=body.model_dump())

    @app.get("/version", response_model=m.VersionResponse)
    def version() -> m.VersionResponse:
        return handlers.version()

    @app.post("/envs", response_model=m.EnvDescription)
    def create_env(req: m.CreateEnvRequest) -> m.EnvDescription:
        return handlers.create_env(req)

    @app.get("/envs/{env_id}", response_model=m.EnvDescription)
    def describe_env(env_id: str) -> m.EnvDescription:
        return handlers.describe_env(env_id)

    @app.post("/envs/{env_id}/reset", response_model=m.ResetResponse)
    def reset_env(env_id: str, req: m.ResetRequest) -> m.ResetResponse:
        return handlers.reset_env(env_id, req)

    @app.post("/envs/{env_id}/step", response_model=m.StepResponse)
    def step_env(env_id: str, req: m.StepRequest) -> m.StepResponse:
        return handlers.step_env(env_id, req)

    @app.delete("/envs/{env_id}", response_model=m.CloseResponse)
    def close_env(env_id: str) -> m.CloseResponse:
        return handlers.close_env(env_id)

    @app.post("/episodes/run", response_model=m.RunEpisodeResponse)
    def run_episode(req: m.RunEpisodeRequest) -> m.RunEpisodeResponse:
        return handlers.run_episode_handler(req)

    @app.post("/maps/generate", response_model=m.GenMapResponse)
    def gen_map(req: m.GenMapRequest) -> m.GenMapResponse:
        return handlers.gen_map_handler(req)

    @app.post("/bench", response_model=m.BenchResponse)
    def bench(req: m.BenchRequest) -> m.BenchResponse:
        return handlers.bench_handler(req)

    @app.post("/protocols/run", response_model=m.ProtocolResponse)
    def run_protocol(req: m.ProtocolRequest) -> m.ProtocolResponse:
        return handlers.protocol_handler(req)

    return app


app = create_app()
