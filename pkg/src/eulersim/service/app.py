"""FastAPI wiring: one POST endpoint per pipeline stage."""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ..reachability import InfeasibleTargetError
from . import handlers, schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="eulersim",
        description=(
            "Synthesis and verification of bounded-strength control schedules "
            "realizing target Hamiltonians via Eulerian cycles"
        ),
    )

    @app.exception_handler(handlers.ConfigError)
    async def _config_error(request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc), "kind": "config"})

    @app.exception_handler(InfeasibleTargetError)
    async def _infeasible(request, exc):
        return JSONResponse(
            status_code=409,
            content={
                "detail": str(exc),
                "kind": "infeasible",
                "residual": exc.residual,
            },
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/presets", response_model=schemas.PresetsResponse)
    def get_presets():
        return handlers.presets()

    @app.get("/groups/{name}", response_model=schemas.GroupExport)
    def get_group(name: str, n: int | None = None):
        return handlers.group_export(name, n)

    @app.post("/synth", response_model=schemas.SynthResponse)
    def post_synth(req: schemas.SynthRequest):
        return handlers.synth(req)

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def post_verify(req: schemas.VerifyRequest):
        return handlers.verify(req)

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def post_simulate(req: schemas.SimulateRequest):
        return handlers.simulate(req)

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def post_sweep(req: schemas.SweepRequest):
        return handlers.sweep(req)

    return app


app = create_app()
