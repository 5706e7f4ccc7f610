"""HTTP service exposing the solver.

Solver failures surface as a small JSON envelope {category, message};
the category also selects the status code, so clients can branch on
either. Request-shape problems reuse the "config" category.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__, floquet
from ..errors import ConfigError, SolverError
from ..milne import SolverSettings
from ..oracle import FdGrid, empirical_order, fd_spectrum
from ..potential import Potential
from ..spectrum import Level, find_levels, wavefunction
from .models import (
    BandOut,
    BandsReport,
    BandsRequest,
    LevelOut,
    LevelsReport,
    LevelsRequest,
    ProblemSpec,
    SweepReport,
    SweepRequest,
    SweepRow,
    VerifyReport,
    VerifyRequest,
    VerifyRow,
    WavefunctionReport,
    WavefunctionRequest,
)

_STATUS_BY_CATEGORY = {"config": 400, "resolution": 409, "numerical": 500}

# Below this many oracle points the finite-difference error itself can
# exceed the comparison tolerance.
_COARSE_ORACLE_POINTS = 2000


def _settings(req: ProblemSpec) -> SolverSettings:
    return SolverSettings(
        rel_tol=req.rel_tol,
        abs_tol=req.abs_tol,
        tail_phase_tol=req.tail_phase_tol,
    )


def _report_bands(
    v1: float, v2: float, mass: float, settings: SolverSettings
) -> list[floquet.Band]:
    """Ground band of each distinct well depth, sorted by lower edge."""
    bands = []
    for depth in sorted({v1, v2}):
        band = floquet.ground_band(depth, mass, settings)
        if band is not None:
            bands.append(band)
    bands.sort(key=lambda b: b.lower.energy)
    return bands


def _band_out(index: int, band: floquet.Band) -> BandOut:
    return BandOut(
        band_index=index,
        well_depth=band.lower.well_depth,
        lower={"energy": band.lower.energy, "branch": band.lower.branch,
               "well_depth": band.lower.well_depth},
        upper={"energy": band.upper.energy, "branch": band.upper.branch,
               "well_depth": band.upper.well_depth},
    )


def _level_out(level: Level, bands: list[floquet.Band]) -> LevelOut:
    where = floquet.classify(level.energy, bands)
    return LevelOut(
        index_j=level.index_j,
        energy=level.energy,
        alpha=level.alpha,
        beta=level.beta,
        band_index=where.band_index,
        location=where.kind,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="wellbands", version=__version__)

    @app.exception_handler(SolverError)
    async def _solver_error(request: Request, exc: SolverError) -> JSONResponse:
        return JSONResponse(
            status_code=_STATUS_BY_CATEGORY.get(exc.category, 500),
            content={"category": exc.category, "message": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        parts = []
        for err in exc.errors():
            where = ".".join(str(p) for p in err.get("loc", ()) if p != "body")
            parts.append(f"{where}: {err.get('msg', 'invalid')}")
        return JSONResponse(
            status_code=422,
            content={"category": "config", "message": "; ".join(parts)},
        )

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/levels", response_model=LevelsReport)
    async def levels(req: LevelsRequest) -> LevelsReport:
        pot = Potential(req.v1, req.v2, req.n_cells, req.mass)
        settings = _settings(req)
        found = find_levels(pot, settings, scan_points=req.scan_points)
        bands = _report_bands(req.v1, req.v2, req.mass, settings)
        return LevelsReport(
            v1=req.v1,
            v2=req.v2,
            n_cells=req.n_cells,
            mass=req.mass,
            levels=[_level_out(lv, bands) for lv in found],
            bands=[_band_out(i, b) for i, b in enumerate(bands)],
        )

    @app.post("/bands", response_model=BandsReport)
    async def bands(req: BandsRequest) -> BandsReport:
        settings = _settings(req)
        found = _report_bands(req.v1, req.v2, req.mass, settings)
        return BandsReport(
            v1=req.v1,
            v2=req.v2,
            mass=req.mass,
            bands=[_band_out(i, b) for i, b in enumerate(found)],
        )

    @app.post("/sweep", response_model=SweepReport)
    async def sweep(req: SweepRequest) -> SweepReport:
        if not req.n_values:
            raise ConfigError("n_values must not be empty")
        settings = _settings(req)
        bands = _report_bands(req.v1, req.v2, req.mass, settings)
        rows = []
        for n in req.n_values:
            pot = Potential(req.v1, req.v2, n, req.mass)
            for lv in find_levels(pot, settings, scan_points=req.scan_points):
                where = floquet.classify(lv.energy, bands)
                rows.append(
                    SweepRow(
                        n_cells=n,
                        index_j=lv.index_j,
                        energy=lv.energy,
                        band_index=where.band_index,
                        location=where.kind,
                    )
                )
        return SweepReport(
            v1=req.v1,
            v2=req.v2,
            mass=req.mass,
            n_values=req.n_values,
            rows=rows,
            bands=[_band_out(i, b) for i, b in enumerate(bands)],
        )

    @app.post("/wavefunction", response_model=WavefunctionReport)
    async def wavefunction_endpoint(req: WavefunctionRequest) -> WavefunctionReport:
        pot = Potential(req.v1, req.v2, req.n_cells, req.mass)
        settings = _settings(req)
        if req.n_samples < 2:
            raise ConfigError(f"n_samples must be >= 2, got {req.n_samples}")
        found = find_levels(pot, settings, scan_points=req.scan_points)
        if not 0 <= req.index_j < len(found):
            raise ConfigError(
                f"index_j {req.index_j} out of range; found {len(found)} levels"
            )
        level = found[req.index_j]
        x_min = -6.0 if req.x_min is None else req.x_min
        x_max = pot.support_end + 6.0 if req.x_max is None else req.x_max
        if not x_min < x_max:
            raise ConfigError(f"need x_min < x_max, got ({x_min}, {x_max})")
        step = (x_max - x_min) / (req.n_samples - 1)
        xs = [x_min + i * step for i in range(req.n_samples)]
        samples = wavefunction(level, pot, settings, grid=xs)
        return WavefunctionReport(
            index_j=level.index_j,
            energy=level.energy,
            xs=[x for x, _ in samples],
            values=[f for _, f in samples],
        )

    @app.post("/verify", response_model=VerifyReport)
    async def verify(req: VerifyRequest) -> VerifyReport:
        pot = Potential(req.v1, req.v2, req.n_cells, req.mass)
        settings = _settings(req)
        found = find_levels(pot, settings, scan_points=req.scan_points)
        grid = FdGrid(
            -req.oracle_padding,
            pot.support_end + req.oracle_padding,
            req.oracle_points,
        )
        fd_levels = fd_spectrum(pot, grid)

        warnings = []
        if req.oracle_points < _COARSE_ORACLE_POINTS:
            warnings.append(
                f"oracle grid is coarse ({req.oracle_points} points); "
                "differences may reflect discretisation error"
            )
        if len(found) != len(fd_levels):
            warnings.append(
                f"level count mismatch: phase integration found {len(found)}, "
                f"finite differences found {len(fd_levels)}"
            )

        rows = [
            VerifyRow(
                index_j=lv.index_j,
                energy_phase=lv.energy,
                energy_fd=fd,
                abs_diff=abs(lv.energy - fd),
            )
            for lv, fd in zip(found, fd_levels)
        ]
        max_diff = max((r.abs_diff for r in rows), default=None)

        order = None
        if fd_levels:
            order = empirical_order(pot, grid, k=0)
            if not 1.8 <= order <= 2.2:
                warnings.append(
                    f"oracle refinement order {order:.2f} is outside [1.8, 2.2]; "
                    "the grid may be too coarse for a clean h^2 regime"
                )

        passed = (
            len(found) == len(fd_levels)
            and max_diff is not None
            and max_diff <= req.tolerance
        ) or (not found and not fd_levels)
        return VerifyReport(
            count_phase=len(found),
            count_fd=len(fd_levels),
            rows=rows,
            max_abs_diff=max_diff,
            tolerance=req.tolerance,
            order=order,
            warnings=warnings,
            passed=passed,
        )

    return app


app = create_app()
