"""FastAPI application exposing the runners over HTTP.

The endpoints accept exactly the request models the CLI builds, run
synchronously, and return the same report models the CLI prints.  A run
that completes but fails its own validity checks (a solver that did not
converge, a training abort) still returns 200 with ``ok: false``; HTTP
errors are reserved for requests that cannot be executed at all.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, runner
from ..problems import PROBLEM_IDS
from .schemas import (
    BenchReport,
    BenchRequest,
    FipRequest,
    RunReport,
    SolveFdmRequest,
    TrainPinnRequest,
)

_PROBLEM_DESCRIPTIONS = {
    "poisson1d": "1D Poisson problem with Dirichlet ends and a closed-form solution",
    "poisson2d": "2D Poisson problem on the unit square (manufactured or verbatim source)",
    "fip": "variable-coefficient ODE used by the forward-inverse experiments",
}


def create_app() -> FastAPI:
    app = FastAPI(title="pinnfd", version=__version__)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/problems")
    def problems() -> list[dict]:
        return [
            {"id": pid, "description": _PROBLEM_DESCRIPTIONS[pid]}
            for pid in PROBLEM_IDS
        ]

    @app.post("/runs/solve-fdm", response_model=RunReport)
    def solve_fdm(req: SolveFdmRequest) -> RunReport:
        return runner.run_solve_fdm(req)

    @app.post("/runs/train-pinn", response_model=RunReport)
    def train_pinn(req: TrainPinnRequest) -> RunReport:
        return runner.run_train_pinn(req)

    @app.post("/runs/fip", response_model=RunReport)
    def fip(req: FipRequest) -> RunReport:
        return runner.run_fip(req)

    @app.post("/runs/bench", response_model=BenchReport)
    def bench(req: BenchRequest) -> BenchReport:
        return runner.run_bench(req)

    return app


app = create_app()
