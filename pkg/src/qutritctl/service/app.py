"""FastAPI service exposing the toolkit.

Numerical failures (solver/fit non-convergence) map to 422; invalid domain
values to 400.  The Clifford table is built once per process and shared.
"""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import algorithms, calib, clifford, device, gates, rb, sim, xgate
from ..errors import FitError, SolverError
from ..hgate import chirped_h_schedule, sandwich_phases, solve_h_conditions
from ..pulses import PulseSchedule
from ..qmath import average_gate_fidelity
from . import schemas as S

app = FastAPI(title="qutritctl", version="0.1.0")


def _mat_to_json(U: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in U]


def _schedule_model(sched: PulseSchedule) -> S.ScheduleModel:
    return S.ScheduleModel(**sched.to_dict())


def _schedule_from_model(m: S.ScheduleModel) -> PulseSchedule:
    return PulseSchedule.from_dict(m.model_dump())


@app.get("/health", response_model=S.HealthResponse)
def health():
    from .. import __version__
    return S.HealthResponse(status="ok", version=__version__)


@app.post("/design", response_model=S.DesignResponse)
def design(req: S.DesignRequest):
    try:
        if req.gate in ("h", "h-inv"):
            sign = +1 if req.gate == "h" else -1
            sol = solve_h_conditions().with_sign(sign)
            sched = chirped_h_schedule(req.duration, req.dt, req.edge, sign=sign,
                                       edge_sigma_ratio=req.edge_sigma_ratio)
            omega_mhz = sol.omega1_T / req.duration / (2 * np.pi) * 1e3
            delta_mhz = abs(sol.delta_T) / req.duration / (2 * np.pi) * 1e3
            constants = {"A": abs(sol.A), "delta": abs(sol.delta),
                         "omega1_T": sol.omega1_T, "delta_T": abs(sol.delta_T),
                         "omega_over_2pi_MHz": omega_mhz,
                         "delta_over_2pi_MHz": delta_mhz, "sign": sign}
            U = sim.evolve(sched)
            D1, D2 = sandwich_phases(sol)
            target = gates.H if sign > 0 else gates.H_INV
            fid = average_gate_fidelity(D1 @ U @ D2, target)
        else:
            kind = {"x": "X", "x-inv": "X_inverse", "x02": "X02"}[req.gate]
            design_ = xgate.design_for(kind, req.duration)
            sched = xgate.rabi_from_invariant(design_, req.dt)
            constants = {"lambda": design_.lam, "theta": design_.theta_target,
                         "duration": design_.duration}
            U = sim.evolve(sched)
            target = {"X": gates.X, "X_inverse": gates.X_INV, "X02": gates.X02}[kind]
            corr = xgate.residual_phase_correction(kind)
            fid = average_gate_fidelity(corr @ U, target)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except SolverError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return S.DesignResponse(gate=req.gate, constants=constants,
                            verification_fidelity=float(fid),
                            schedule=_schedule_model(sched))


@app.post("/simulate/evolve", response_model=S.EvolveResponse)
def simulate_evolve(req: S.EvolveRequest):
    try:
        sched = _schedule_from_model(req.schedule)
        knobs = sim.ErrorKnobs(**req.knobs.model_dump())
        cfg = sim.SimConfig(dt=req.sim.dt, method=req.sim.method)
        U = sim.evolve(sched, knobs, cfg)
        fid = None
        if req.target is not None:
            # compare with the gate's canonical phase corrections applied
            target = {"H": gates.H, "H_inv": gates.H_INV, "X": gates.X,
                      "X_inv": gates.X_INV, "X02": gates.X02}[req.target]
            if req.target in ("H", "H_inv"):
                sol = solve_h_conditions().with_sign(+1 if req.target == "H" else -1)
                D1, D2 = sandwich_phases(sol)
                realized = D1 @ U @ D2
            else:
                kind = {"X": "X", "X_inv": "X_inverse", "X02": "X02"}[req.target]
                realized = xgate.residual_phase_correction(kind) @ U
            fid = float(average_gate_fidelity(realized, target))
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return S.EvolveResponse(unitary=_mat_to_json(U), fidelity_vs_target=fid)


@app.post("/simulate/trajectory", response_model=S.TrajectoryResponse)
def simulate_trajectory(req: S.TrajectoryRequest):
    try:
        sched = _schedule_from_model(req.schedule)
        knobs = sim.ErrorKnobs(**req.knobs.model_dump())
        cfg = sim.SimConfig(dt=req.sim.dt, method=req.sim.method)
        times, pops = sim.population_trajectory(sched, req.initial_state, cfg, knobs)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return S.TrajectoryResponse(times=[float(t) for t in times],
                                populations=[[float(p) for p in row] for row in pops])


@app.get("/clifford/table", response_model=S.CliffordTableResponse)
def clifford_info():
    table = clifford.clifford_table()
    ident = clifford.verify_minimal_set_identity()
    return S.CliffordTableResponse(
        size=len(table),
        average_counts=table.average_counts(),
        plain_alphabet_counts=clifford.plain_alphabet_averages(),
        minimal_set_identity_fidelity=ident["fidelity"],
    )


@app.get("/clifford/export")
def clifford_export():
    import json
    return json.loads(clifford.clifford_table().to_json())


@app.post("/rb/run", response_model=S.RBResponse)
def rb_run(req: S.RBRequest):
    try:
        noise = rb.NoiseModel(kind="ideal")
        if req.noise.kind == "depolarizing":
            noise = rb.NoiseModel(kind="depolarizing", p=req.noise.p)
        elif req.noise.kind == "pulse":
            knobs = sim.ErrorKnobs(**req.noise.knobs.model_dump())
            unitaries = clifford.pulse_gate_set(simulate=lambda s: sim.evolve(s, knobs))
            noise = rb.NoiseModel(kind="pulse", gate_unitaries=unitaries)
        elif req.noise.kind == "transmon":
            model = sim.TransmonModel(
                anharmonicity=2 * np.pi * req.noise.anharmonicity_mhz / 1e3)
            blocks = calib.CalibratedGateSet(calib.CalibParams(), model).gate_blocks()
            noise = rb.NoiseModel(kind="transmon", gate_unitaries=blocks)
        interleaved_noise = None
        if req.interleaved is not None and req.interleaved_p is not None:
            interleaved_noise = rb.NoiseModel(kind="depolarizing", p=req.interleaved_p)
        cfg = rb.RBConfig(lengths=tuple(req.lengths), n_sequences=req.n_sequences,
                          shots=req.shots, seed=req.seed, noise=noise,
                          interleaved=req.interleaved,
                          interleaved_noise=interleaved_noise)
        points = rb.run_rb(cfg)
        fit = rb.fit_decay(points)
        if req.interleaved is not None:
            ref_p = req.noise.p if req.noise.kind == "depolarizing" else 1.0
            r = rb.irb_error(fit.p, ref_p)
        else:
            r = rb.clifford_error(fit.p)
    except (ValueError, FitError) as exc:
        code = 422 if isinstance(exc, FitError) else 400
        raise HTTPException(status_code=code, detail=str(exc))
    return S.RBResponse(points=[S.RBPoint(m=m, mean=mu, std=sd) for m, mu, sd in points],
                        fit={"A": fit.A, "p": fit.p, "B": fit.B, "residual": fit.residual},
                        r=float(r))


@app.post("/ramsey", response_model=S.RamseyResponse)
def ramsey(req: S.RamseyRequest):
    phis = np.linspace(req.phi_min, req.phi_max, req.points)
    pops = [[algorithms.ramsey_population(req.d, k, float(phi)) for k in range(req.d)]
            for phi in phis]
    return S.RamseyResponse(phi=[float(p) for p in phis], populations=pops)


@app.post("/kitaev", response_model=S.KitaevResponse)
def kitaev(req: S.KitaevRequest):
    phi = 2 * np.pi * req.phase_over_2pi
    oracle = algorithms.ramsey_oracle(req.d, phi)
    digits = algorithms.kitaev_estimate(req.d, req.digits, oracle)
    est = algorithms.digits_to_phase(req.d, digits) / (2 * np.pi)
    return S.KitaevResponse(digits=digits, estimated_phase_over_2pi=float(est))


@app.post("/parity", response_model=S.ParityResponse)
def parity(req: S.ParityRequest):
    try:
        g = algorithms.DihedralElement.from_one_line(req.permutation)
        outcome = algorithms.parity_check(req.d, req.m, g)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except SolverError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return S.ParityResponse(outcome=outcome, parity="odd" if g.reflected else "even")


@app.post("/calibrate", response_model=S.CalibrateResponse)
def calibrate(req: S.CalibrateRequest):
    try:
        model = sim.TransmonModel(anharmonicity=2 * np.pi * req.anharmonicity_mhz / 1e3)
        cfg = calib.OptimizerConfig(
            population=req.population, seed=req.seed,
            phase1_sequences=req.phase1_sequences, phase2_sequences=req.phase2_sequences,
            max_iter_phase1=req.max_iter_phase1, max_iter_phase2=req.max_iter_phase2,
        )
        bounds = {k: tuple(v) for k, v in req.bounds.items()}
        unknown = set(bounds) - set(calib.PARAM_NAMES)
        if unknown:
            raise ValueError(f"unknown calibration parameters: {sorted(unknown)}")
        result = calib.calibrate_gates(bounds, model, cfg, duration=req.duration,
                                       dt=req.dt, lengths=tuple(req.lengths))
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except (FitError, SolverError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return S.CalibrateResponse(
        best=result["best"], best_fitness=result["best_fitness"],
        improved=result["improved"], iterations=result["iterations"],
        phase2_validation_variation=result["phase2_validation_variation"],
        history=result["history"],
    )


@app.post("/error/incoherent", response_model=S.IncoherentErrorResponse)
def incoherent(req: S.IncoherentErrorRequest):
    dev = device.DeviceParams(**req.device.model_dump())
    try:
        eps = rb.incoherent_error_estimate(dev, req.tau_ns)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return S.IncoherentErrorResponse(epsilon=float(eps))


@app.post("/fit/t1", response_model=S.T1FitResponse)
def fit_t1_endpoint(req: S.T1FitRequest):
    try:
        t1, t12, t02 = device.fit_t1(req.times, req.trace_init1, req.trace_init2)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except FitError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return S.T1FitResponse(T1_01=t1, T1_12=t12, T1_02=t02)


@app.post("/fit/t2", response_model=S.T2FitResponse)
def fit_t2_endpoint(req: S.T2FitRequest):
    try:
        dev = device.DeviceParams(**req.device.model_dump())
        T2, n = device.fit_t2(req.times, req.trace, dev, req.transition)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except FitError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return S.T2FitResponse(T2=T2, n=n)


@app.post("/readout/invert", response_model=S.ReadoutResponse)
def readout_invert(req: S.ReadoutRequest):
    try:
        calib_ = device.ReadoutCalib(np.asarray(req.reference, dtype=float))
        res = device.populations_from_voltages(np.asarray(req.voltages, dtype=float), calib_)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return S.ReadoutResponse(populations=[float(p) for p in res.populations],
                             condition=res.condition,
                             ill_conditioned=res.ill_conditioned,
                             projected=res.projected)
