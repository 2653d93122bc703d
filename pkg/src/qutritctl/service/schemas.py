"""Request/response models for the HTTP service.

Every model forbids unknown fields so malformed configs fail fast.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ---------------------------------------------------------------- design ----

class DesignRequest(StrictModel):
    gate: Literal["h", "h-inv", "x", "x-inv", "x02"]
    duration: float = Field(35.0, gt=0, description="gate time in ns")
    dt: float = Field(0.05, gt=0, description="sample spacing in ns")
    edge: float = Field(5.0, gt=0, description="Gaussian edge length (H gates)")
    edge_sigma_ratio: float = Field(2.5, gt=0, description="edge length / Gaussian sigma")


class ScheduleModel(StrictModel):
    version: int
    units: dict
    dt: float
    duration: float
    omega1: list
    omega2: list
    detuning: list


class DesignResponse(StrictModel):
    gate: str
    constants: dict
    verification_fidelity: float
    schedule: ScheduleModel


# -------------------------------------------------------------- simulate ----

class ErrorKnobsModel(StrictModel):
    eta1: float = 0.0
    eta2: float = 0.0
    zeta1: float = 0.0
    zeta2: float = 0.0


class SimConfigModel(StrictModel):
    dt: float = 0.02
    method: Literal["piecewise_expm", "rk4"] = "piecewise_expm"


class TrajectoryRequest(StrictModel):
    schedule: ScheduleModel
    initial_state: int = Field(0, ge=0, le=2)
    knobs: ErrorKnobsModel = ErrorKnobsModel()
    sim: SimConfigModel = SimConfigModel()


class TrajectoryResponse(StrictModel):
    times: list[float]
    populations: list[list[float]]  # rows (P0, P1, P2)


class EvolveRequest(StrictModel):
    schedule: ScheduleModel
    knobs: ErrorKnobsModel = ErrorKnobsModel()
    sim: SimConfigModel = SimConfigModel()
    target: Optional[Literal["H", "H_inv", "X", "X_inv", "X02"]] = None


class EvolveResponse(StrictModel):
    unitary: list  # [[ [re, im], ...], ...]
    fidelity_vs_target: Optional[float] = None


# -------------------------------------------------------------- clifford ----

class CliffordTableResponse(StrictModel):
    size: int
    average_counts: dict
    plain_alphabet_counts: dict
    minimal_set_identity_fidelity: float


# -------------------------------------------------------------------- rb ----

class NoiseModelSpec(StrictModel):
    kind: Literal["ideal", "depolarizing", "pulse", "transmon"] = "ideal"
    p: float = 1.0
    knobs: ErrorKnobsModel = ErrorKnobsModel()
    anharmonicity_mhz: float = -200.0  # transmon kind only


class RBRequest(StrictModel):
    lengths: list[int] = [1, 5, 10, 20, 35, 50, 75, 100]
    n_sequences: int = Field(30, ge=1)
    shots: int = Field(200, ge=0, description="0 means exact survival, no sampling")
    seed: int = 0
    noise: NoiseModelSpec = NoiseModelSpec()
    interleaved: Optional[str] = None
    interleaved_p: Optional[float] = None


class RBPoint(StrictModel):
    m: int
    mean: float
    std: float


class RBResponse(StrictModel):
    points: list[RBPoint]
    fit: dict
    r: float


# ------------------------------------------------------------ algorithms ----

class RamseyRequest(StrictModel):
    d: int = Field(3, ge=2)
    points: int = Field(200, ge=2)
    phi_min: float = 0.0
    phi_max: float = 6.283185307179586


class RamseyResponse(StrictModel):
    phi: list[float]
    populations: list[list[float]]  # column k = P_k


class KitaevRequest(StrictModel):
    d: int = Field(3, ge=2)
    digits: int = Field(4, ge=1)
    phase_over_2pi: float = Field(..., ge=0, lt=1)


class KitaevResponse(StrictModel):
    digits: list[int]
    estimated_phase_over_2pi: float


class ParityRequest(StrictModel):
    d: int = Field(5, ge=3)
    m: int = Field(2, ge=1)
    permutation: list[int]


class ParityResponse(StrictModel):
    outcome: int
    parity: Literal["even", "odd"]


# ------------------------------------------------------------ calibration ---

class CalibrateRequest(StrictModel):
    bounds: dict[str, tuple[float, float]]
    population: int = Field(10, ge=4)
    seed: int = 0
    phase1_sequences: int = Field(2, ge=1)
    phase2_sequences: int = Field(2, ge=1)
    max_iter_phase1: int = Field(6, ge=1)
    max_iter_phase2: int = Field(3, ge=1)
    anharmonicity_mhz: float = -200.0
    duration: float = 35.0
    dt: float = Field(0.1, gt=0)
    lengths: list[int] = [2, 10, 25, 50]


class CalibrateResponse(StrictModel):
    best: dict[str, float]
    best_fitness: float
    improved: bool
    iterations: dict[str, int]
    phase2_validation_variation: float
    history: list[dict]


# ----------------------------------------------------------------- device ---

class DeviceParamsModel(StrictModel):
    f01: float = 4.993
    f12: float = 4.800
    f02: float = 4.896
    T1_01: float = 60.7
    T1_12: float = 28.4
    T1_02: float = 523.1
    T2_01: float = 4.6
    T2_12: float = 4.4
    T2_02: float = 4.2


class IncoherentErrorRequest(StrictModel):
    device: DeviceParamsModel = DeviceParamsModel()
    tau_ns: float = Field(..., gt=0)


class IncoherentErrorResponse(StrictModel):
    epsilon: float


class T1FitRequest(StrictModel):
    times: list[float]
    trace_init1: list[list[float]]
    trace_init2: list[list[float]]


class T1FitResponse(StrictModel):
    T1_01: float
    T1_12: float
    T1_02: float


class T2FitRequest(StrictModel):
    times: list[float]
    trace: list[float]
    device: DeviceParamsModel = DeviceParamsModel()
    transition: Literal["01", "12", "02"] = "01"


class T2FitResponse(StrictModel):
    T2: float
    n: float


class ReadoutRequest(StrictModel):
    voltages: list[float]
    reference: list[list[float]]


class ReadoutResponse(StrictModel):
    populations: list[float]
    condition: float
    ill_conditioned: bool
    projected: bool


class HealthResponse(StrictModel):
    status: str
    version: str
