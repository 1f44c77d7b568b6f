"""Request and response models for the HTTP service.

Every response is an Envelope: schema tag, the fully resolved request
config, a flat numeric report, a failed flag (any verified property outside
tolerance), and named artifacts (CSV/JSON file bodies) for the caller to
persist.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = "gdl-1"


class Envelope(BaseModel):
    """Uniform response wrapper; serialized with the top-level key "schema"."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: str = Field(SCHEMA_VERSION, serialization_alias="schema")
    config: dict
    report: dict
    failed: bool = False
    artifacts: dict[str, str] = Field(default_factory=dict)


class Theorem4aRequest(BaseModel):
    beta: float = Field(0.5, ge=0.0, lt=1.0)
    radii: list[float] | None = None
    window: tuple[float, float] = (1.0, 200.0)
    seed: int = Field(0, ge=0)
    label: str = "theorem4a"


class CirclePackRequest(BaseModel):
    radii: list[float]
    counts: list[int]
    label: str = "circlepack"


class LatticeRequest(BaseModel):
    spacing: float = Field(1.0, gt=0.0)
    radius: float = Field(20.0, gt=0.0)
    label: str = "lattice"


class AtomizeRequest(BaseModel):
    measure: dict
    window: tuple[float, float]
    seed: int = Field(0, ge=0)
    label: str = "atomized"


class DensityRequest(BaseModel):
    points_csv: str
    window: tuple[float, float]
    radii_per_decade: int = Field(200, ge=10)


class RotatingVerifyRequest(BaseModel):
    K: int = Field(1, ge=1)
    digits: int = Field(60, ge=30)
    samples: int = Field(2000, ge=1)
    radii: int = Field(20, ge=1)
    probes_per_branch: int = Field(25, ge=1)
    seed: int = Field(0, ge=0)
    tol_identity: float = Field(1e-14, gt=0.0)
    tol_mean: float = Field(1e-10, gt=0.0)
    tol_density: float = Field(1e-6, gt=0.0)


class RadialVerifyRequest(BaseModel):
    beta: float = Field(0.5, ge=0.0, lt=1.0)
    radii: list[float] | None = None
    density_tol: float = Field(0.01, gt=0.0)


class TauBoundRequest(BaseModel):
    upper: float = Field(..., gt=0.0)
    lower: float = Field(..., ge=0.0)


class JensenRequest(BaseModel):
    points_csv: str
    r_probe: float = Field(..., gt=0.0)
    rel_tol: float = Field(1e-9, gt=0.0)
    gap_tol: float = Field(1e-6, gt=0.0)


class IntegralRequest(BaseModel):
    form: str = Field("both", pattern="^(primary|by_parts|both)$")
    rel_tol: float = Field(1e-10, gt=0.0)
    tol: float = Field(1e-8, gt=0.0)


class GrowthRequest(BaseModel):
    C: float = Field(0.3, gt=0.0)
    n_terms: int = Field(150000, ge=1)
    R_grid: list[float] | None = None


class GramRequest(BaseModel):
    nodes: list[tuple[float, float]]
    index: int | None = None
    degree_max: int | None = Field(None, ge=0)
    weights: list[float] | None = None


class BargmannRequest(BaseModel):
    lam: tuple[float, float] = (0.5, 0.0)
    z_points: list[tuple[float, float]] | None = None
    tol: float = Field(1e-6, gt=0.0)
    t_min: float = -6.0
    t_max: float = 6.0
    n: int = Field(4096, ge=16)


class PlotAnnulusRequest(BaseModel):
    K: int = Field(1, ge=1)
    grid: str = Field("512x512", pattern=r"^\d+x\d+$")
    digits: int = Field(60, ge=30)
