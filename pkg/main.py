from __future__ import annotations

import os
from datetime import datetime, timezone
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi import Query, Path

from models.api import (
    MinimizeRequest,
    MpassRequest,
    PairPayload,
    QuadCheckRequest,
    RefineRequest,
    SolveResponse,
    VerifyRequest,
)
from models.health import Health
from models.reports import FunctionalsReport, QuadCheckReport, VerifyReport
from services import runner
from services.constrained_minimizer import minimize
from services.functionals import evaluate_all
from services.mountain_pass import mp_solve, quadcheck
from services.newton_refiner import refine
from services.radial_grid import make_grid
from services.verify import verify_all
from utils.errors import SolverFailureError, VortexForgeError
from utils.log import configure_logging

port = int(os.environ.get("FASTAPIPORT", 8000))

configure_logging()

app = FastAPI(
    title="vortexforge",
    description="Ring-profiled vortex soliton pairs of the quadratic l-vortex system: solve, refine and verify",
    version="0.1.0",
)


def _fail(exc: Exception) -> HTTPException:
    if isinstance(exc, SolverFailureError):
        return HTTPException(status_code=409, detail=str(exc))
    return HTTPException(status_code=422, detail=str(exc))


# -----------------------------------------------------------------------------
# Health endpoints
# -----------------------------------------------------------------------------

def make_health(echo: Optional[str], path_echo: Optional[str] = None) -> Health:
    return Health(
        status=200,
        status_message="OK",
        service=app.title,
        version=app.version,
        timestamp=datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
        threads=runner.threads,
        echo=echo,
        path_echo=path_echo,
    )

@app.get("/health", response_model=Health)
def get_health_no_path(echo: str | None = Query(None, description="Optional echo string")):
    return make_health(echo=echo, path_echo=None)

@app.get("/health/{path_echo}", response_model=Health)
def get_health_with_path(
    path_echo: str = Path(..., description="Required echo in the URL path"),
    echo: str | None = Query(None, description="Optional echo string"),
):
    return make_health(echo=echo, path_echo=path_echo)

# -----------------------------------------------------------------------------
# Diagnostics on a posted pair
# -----------------------------------------------------------------------------
@app.post("/grid/quadcheck", response_model=QuadCheckReport)
def post_quadcheck(request: QuadCheckRequest):
    try:
        return quadcheck(request.R, request.n, b=request.b, tolerance=request.tolerance)
    except (VortexForgeError, ValueError) as exc:
        raise _fail(exc)

@app.post("/functionals", response_model=FunctionalsReport)
def post_functionals(pair: PairPayload):
    try:
        return evaluate_all(pair.to_pair())
    except (VortexForgeError, ValueError) as exc:
        raise _fail(exc)

@app.post("/verify", response_model=VerifyReport)
def post_verify(request: VerifyRequest):
    try:
        return verify_all(request.pair.to_pair(), targets=request.targets)
    except (VortexForgeError, ValueError) as exc:
        raise _fail(exc)

# -----------------------------------------------------------------------------
# Solvers
# -----------------------------------------------------------------------------
@app.post("/solve/minimize", response_model=SolveResponse)
def post_minimize(request: MinimizeRequest):
    try:
        grid = make_grid(request.R, request.n)
        pair, report = minimize(grid, request.l, request.targets, request.options)
    except (VortexForgeError, ValueError) as exc:
        raise _fail(exc)
    return SolveResponse(report=report, pair=PairPayload.from_pair(pair))

@app.post("/solve/mpass", response_model=SolveResponse)
def post_mpass(request: MpassRequest):
    try:
        grid = make_grid(request.params.R, request.n)
        pair, report = mp_solve(request.params, grid, request.options)
    except (VortexForgeError, ValueError) as exc:
        raise _fail(exc)
    return SolveResponse(report=report, pair=PairPayload.from_pair(pair))

@app.post("/solve/refine", response_model=SolveResponse)
def post_refine(request: RefineRequest):
    try:
        pair, report = refine(request.pair.to_pair(), opts=request.options)
    except (VortexForgeError, ValueError) as exc:
        raise _fail(exc)
    return SolveResponse(report=report, pair=PairPayload.from_pair(pair))

# -----------------------------------------------------------------------------
# Root
# -----------------------------------------------------------------------------
@app.get("/")
def root():
    return {"message": "Welcome to the vortexforge solver API. See /docs for OpenAPI UI."}

# -----------------------------------------------------------------------------
# Entrypoint for `python main.py`
# -----------------------------------------------------------------------------
if __name__ == "__main__":
    import uvicorn

    uvicorn.run("main:app", host="0.0.0.0", port=port, reload=True)
