"""HTTP face of the laboratory: constructions, verifications, reports.

Thin orchestration only; every computation lives in the core modules.  All
endpoints are POST, take a pydantic request model, and return an Envelope
whose ``failed`` flag says whether any verified property fell outside its
tolerance.  Domain errors surface as HTTP 400 with the error class name.
"""

from __future__ import annotations

import json
import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import density as density_mod
from .. import fock, products, radial, rotating
from ..errors import DomainError, GaborLabError
from ..pointset import PointSet
from .schemas import (
    AtomizeRequest,
    BargmannRequest,
    CirclePackRequest,
    DensityRequest,
    Envelope,
    GramRequest,
    GrowthRequest,
    IntegralRequest,
    JensenRequest,
    LatticeRequest,
    PlotAnnulusRequest,
    RadialVerifyRequest,
    RotatingVerifyRequest,
    TauBoundRequest,
    Theorem4aRequest,
)

GROWTH_TARGET = 1.5 * math.pi


def _envelope(config, report: dict, failed: bool = False, artifacts: dict | None = None) -> Envelope:
    return Envelope(
        config=config.model_dump(),
        report=report,
        failed=failed,
        artifacts=artifacts or {},
    )


def create_app() -> FastAPI:
    app = FastAPI(title="gaborlab", docs_url=None, redoc_url=None)

    @app.exception_handler(GaborLabError)
    async def _domain_error(_: Request, exc: GaborLabError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/construct/theorem4a", response_model=Envelope)
    def construct_theorem4a(req: Theorem4aRequest) -> Envelope:
        params = (
            radial.RadialParams(req.beta, tuple(req.radii))
            if req.radii
            else radial.RadialParams(req.beta)
        )
        measure = radial.build_measure(params)
        points = radial.atomize(measure, req.window, req.seed, label=req.label)
        report = {
            "a_squared": params.a_squared,
            "delta": params.delta,
            "n_points": len(points),
            "window": list(req.window),
        }
        artifacts = {"points.csv": points.to_csv(), "measure.json": measure.to_json()}
        return _envelope(req, report, False, artifacts)

    @app.post("/construct/circlepack", response_model=Envelope)
    def construct_circlepack(req: CirclePackRequest) -> Envelope:
        if any(not r > 0.0 for r in req.radii):
            raise DomainError("circle radii must be positive")
        log_radii = [math.log(r) for r in req.radii]
        points = density_mod.circle_pack_set(log_radii, req.counts, label=req.label)
        report = {"n_points": len(points), "n_circles": len(req.radii)}
        return _envelope(req, report, False, {"points.csv": points.to_csv()})

    @app.post("/construct/lattice", response_model=Envelope)
    def construct_lattice(req: LatticeRequest) -> Envelope:
        points = density_mod.lattice_set(req.spacing, req.radius, label=req.label)
        report = {"n_points": len(points)}
        return _envelope(req, report, False, {"points.csv": points.to_csv()})

    @app.post("/construct/atomize", response_model=Envelope)
    def construct_atomize(req: AtomizeRequest) -> Envelope:
        measure = radial.RadialMeasure.from_json(json.dumps(req.measure))
        points = radial.atomize(measure, req.window, req.seed, label=req.label)
        report = {"n_points": len(points), "window": list(req.window)}
        return _envelope(req, report, False, {"points.csv": points.to_csv()})

    @app.post("/density", response_model=Envelope)
    def density_endpoint(req: DensityRequest) -> Envelope:
        points = PointSet.from_csv(req.points_csv)
        r_lo, r_hi = req.window
        if not (0.0 < r_lo < r_hi):
            raise GaborLabError(f"window must satisfy 0 < lo < hi, got {req.window}")
        rep = density_mod.density_report(
            points,
            (math.log(r_lo), math.log(r_hi)),
            radii_per_decade=req.radii_per_decade,
        )
        report = {
            "upper": rep.upper,
            "lower": rep.lower,
            "window_log_r": list(rep.window_log_r),
            "eval_radii_count": rep.eval_radii_count,
            "convergence_spread": rep.convergence_spread,
        }
        return _envelope(req, report, False)

    @app.post("/verify/rotating", response_model=Envelope)
    def verify_rotating(req: RotatingVerifyRequest) -> Envelope:
        params = rotating.RotatingParams(K=req.K, digits=req.digits)
        summary = rotating.verification_summary(
            params,
            n_identity=req.samples,
            n_radii=req.radii,
            n_probes=req.probes_per_branch,
            seed=req.seed,
            tol_identity=req.tol_identity,
            tol_mean=req.tol_mean,
            tol_density=req.tol_density,
        )
        failed = bool(summary.pop("failed"))
        return _envelope(req, summary, failed)

    @app.post("/verify/radial", response_model=Envelope)
    def verify_radial(req: RadialVerifyRequest) -> Envelope:
        params = (
            radial.RadialParams(req.beta, tuple(req.radii))
            if req.radii
            else radial.RadialParams(req.beta)
        )
        rep = radial.verify_properties(params, density_tol=req.density_tol)
        report = {
            "a_squared": params.a_squared,
            "remainder_over_log": list(rep.remainder_over_log),
            "remainder_spread": rep.remainder_spread,
            "passes_i": rep.passes_i,
            "fitted_log_coefficient": rep.fitted_log_coefficient,
            "max_excess": rep.max_excess,
            "passes_ii": rep.passes_ii,
            "liminf_estimate": rep.liminf_estimate,
            "passes_iii": rep.passes_iii,
            "limsup_estimate": rep.limsup_estimate,
            "passes_iv": rep.passes_iv,
        }
        return _envelope(req, report, failed=not rep.all_pass)

    @app.post("/verify/tau-bound", response_model=Envelope)
    def verify_tau_bound(req: TauBoundRequest) -> Envelope:
        if req.upper > 1.0:
            check = density_mod.jensen_tradeoff_check(req.upper, req.lower)
            report = {
                "holds": check.holds,
                "gamma_used": check.gamma_used,
                "slack": check.slack,
                "tau_at_upper": density_mod.tau(req.upper),
            }
            failed = not check.holds
        else:
            report = {
                "holds": True,
                "gamma_used": req.upper,
                "slack": 0.0,
                "tau_at_upper": density_mod.tau(req.upper) if req.upper > 0 else 0.0,
            }
            failed = False
        return _envelope(req, report, failed)

    @app.post("/jensen", response_model=Envelope)
    def jensen_endpoint(req: JensenRequest) -> Envelope:
        zeros = PointSet.from_csv(req.points_csv)
        rep = products.jensen_verify(
            zeros, math.log(req.r_probe), rel_tol=req.rel_tol
        )
        report = {
            "lhs": rep.lhs,
            "rhs": rep.rhs,
            "gap": rep.gap,
            "r_used": rep.r_used,
            "quad_error": rep.quad_error,
        }
        failed = abs(rep.gap) > req.gap_tol or rep.quad_error > req.gap_tol
        return _envelope(req, report, failed)

    @app.post("/integral", response_model=Envelope)
    def integral_endpoint(req: IntegralRequest) -> Envelope:
        report: dict = {"target": "3*pi/2", "target_value": GROWTH_TARGET}
        failed = False
        if req.form in ("primary", "both"):
            v = products.growth_constant("primary", rel_tol=req.rel_tol)
            report["value"] = v
            report["abs_err"] = abs(v - GROWTH_TARGET)
            failed = failed or report["abs_err"] > req.tol
        if req.form in ("by_parts", "both"):
            v2 = products.growth_constant("by_parts", rel_tol=req.rel_tol)
            report["by_parts_value"] = v2
            report["by_parts_abs_err"] = abs(v2 - GROWTH_TARGET)
            failed = failed or report["by_parts_abs_err"] > req.tol
            if req.form == "both":
                report["forms_gap"] = abs(report["value"] - v2)
                failed = failed or report["forms_gap"] > req.tol
            else:
                report["value"] = v2
                report["abs_err"] = report["by_parts_abs_err"]
        return _envelope(req, report, failed)

    @app.post("/growth", response_model=Envelope)
    def growth_endpoint(req: GrowthRequest) -> Envelope:
        spec = products.ProductSpec.extremal(req.C, req.n_terms)
        grid = req.R_grid or [float(x) for x in np.geomspace(3.0, 30.0, 8)]
        rep = products.fock_membership_certificate(spec, grid)
        report = {
            "R_grid": list(rep.R_grid),
            "slope": list(rep.slope),
            "tail_bound": list(rep.tail_bound),
            "asymptote": rep.asymptote,
            "slack": rep.slack,
            "in_fock_certified": rep.in_fock_certified,
            "envelope_constant": GROWTH_TARGET * req.C,
        }
        return _envelope(
            req, report, failed=not rep.in_fock_certified,
            artifacts={"growth.csv": rep.to_csv()},
        )

    @app.post("/gram", response_model=Envelope)
    def gram_endpoint(req: GramRequest) -> Envelope:
        nodes = [complex(re, im) for re, im in req.nodes]
        gram = fock.build_gram(nodes)
        report: dict = {"n_nodes": len(nodes)}
        if req.index is not None:
            report["minimality_residual"] = fock.minimality_residual(nodes, req.index)
            report["index"] = req.index
        if req.degree_max is not None:
            residuals = fock.completeness_residual(
                nodes, req.degree_max, weights=req.weights
            )
            report["completeness_residuals"] = {
                str(n): r for n, r in enumerate(residuals)
            }
        return _envelope(req, report, False, {"gram.csv": gram.to_csv()})

    @app.post("/bargmann", response_model=Envelope)
    def bargmann_endpoint(req: BargmannRequest) -> Envelope:
        lam = complex(*req.lam)
        if req.z_points is None:
            side = np.linspace(-2.0, 2.0, 5)
            zs = [complex(x, y) for x in side for y in side if abs(complex(x, y)) <= 2.0]
        else:
            zs = [complex(x, y) for x, y in req.z_points]
        window = fock.gaussian_window(req.t_min, req.t_max, req.n)
        shifted = fock.tf_shift(window, lam.real, lam.imag)
        values = fock.bargmann_grid(shifted, zs)
        targets = np.array([fock.shift_kernel_target(lam, z) for z in zs])
        err = float(np.max(np.abs(values - targets))) if zs else 0.0
        report = {
            "lambda": [lam.real, lam.imag],
            "n_points": len(zs),
            "max_abs_err": err,
            "tol": req.tol,
        }
        return _envelope(req, report, failed=err > req.tol)

    @app.post("/plot-annulus", response_model=Envelope)
    def plot_annulus(req: PlotAnnulusRequest) -> Envelope:
        n_r, n_phi = (int(x) for x in req.grid.split("x"))
        params = rotating.RotatingParams(K=req.K, digits=req.digits)
        lines = ["log_r,phi,region_kind,g"]
        kind_counts: dict[str, int] = {}
        for lr, ph, kind, gval in rotating.annulus_rows(params, n_r, n_phi):
            lines.append(f"{lr:.17g},{ph:.17g},{kind},{gval:.17g}")
            kind_counts[kind] = kind_counts.get(kind, 0) + 1
        report = {"rows": n_r * n_phi, "region_counts": kind_counts}
        return _envelope(
            req, report, False, {"annulus.csv": "\n".join(lines) + "\n"}
        )

    return app
