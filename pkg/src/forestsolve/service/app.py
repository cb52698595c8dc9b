"""FastAPI service wrapping the solver package.

Every endpoint takes the network inline (the interchange JSON schema), so
the service is stateless; the CLI is a thin client over these routes.
Validation failures map to HTTP 422 with the raising error class named.
"""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import markov as mk
from .. import oracle as orc
from .. import theorems as th
from ..enumeration import (
    enumerate_separating_forests,
    enumerate_spanning_trees,
)
from ..errors import ForestSolveError, TooLarge
from ..network import (
    FixedVoltages,
    InjectedCurrents,
    Network,
    build_network,
)
from ..sampler import ForestSampler, TreeSampler, make_rng
from .models import (
    AbsorbRequest,
    AbsorbResponse,
    CurrentEntry,
    EnumerateRequest,
    EnumerateResponse,
    EnumeratedObject,
    EstimateRequest,
    EstimateResponse,
    ExactRequest,
    ExactResponse,
    FlowEntry,
    FlowRequest,
    FlowResponse,
    HittingRequest,
    HittingResponse,
    NetworkModel,
    SampleRequest,
    SampleResponse,
    SampledObject,
    SolveRequest,
    SolveResponse,
)

app = FastAPI(title="forest-solve", version="0.1.0")


@app.exception_handler(ForestSolveError)
async def _solver_error(_request: Request, exc: ForestSolveError) -> JSONResponse:
    detail = str(exc)
    if isinstance(exc, TooLarge):
        detail += " (consider the estimate route)"
    return JSONResponse(
        status_code=422,
        content={"error": type(exc).__name__, "detail": detail},
    )


def _network(model: NetworkModel) -> Network:
    return build_network(
        model.nodes, [(b.u, b.v, b.g) for b in model.branches]
    )


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ForestSolveError(message)


def _injection(net: Network, inject: dict[str, float]) -> InjectedCurrents:
    J = InjectedCurrents.from_map(net, inject)
    J.validate(net)
    return J


def _current_entries(net: Network, matrix: np.ndarray,
                     se: np.ndarray | None = None) -> list[CurrentEntry]:
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for b in net.branches:
        if b.is_self_loop:
            continue
        key = (min(b.u, b.v), max(b.u, b.v))
        if key not in seen:
            seen.add(key)
            pairs.append(key)
    return [
        CurrentEntry(
            u=net.nodes[u], v=net.nodes[v], i=float(matrix[u, v]),
            std_error=None if se is None else float(se[u, v]),
        )
        for u, v in pairs
    ]


def _rel_err(values: dict[str, float], oracle: dict[str, float]) -> float:
    scale = max(max((abs(x) for x in oracle.values()), default=0.0), 1e-30)
    return max(
        abs(values[k] - oracle[k]) for k in oracle
    ) / scale


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/solve", response_model=SolveResponse, response_model_exclude_none=True)
def solve(req: SolveRequest) -> SolveResponse:
    net = _network(req.network)
    _require(bool(req.fixed) != bool(req.inject),
             "exactly one of 'fixed' or 'inject' is required")
    if req.fixed:
        v = orc.solve_dirichlet(net, FixedVoltages(req.fixed))
    else:
        ground = req.ground if req.ground is not None else net.nodes[0]
        v = orc.solve_injected(net, _injection(net, req.inject), ground)
    currents = orc.branch_currents(net, v)
    return SolveResponse(
        voltages=v.as_dict(),
        currents=_current_entries(net, currents.matrix),
    )


def _oracle_voltages_fixed(net: Network, fixed: dict[str, float]) -> dict[str, float]:
    return orc.solve_dirichlet(net, FixedVoltages(fixed)).as_dict()


def _oracle_injected(net: Network, fixed: dict[str, float]) -> dict[str, float]:
    v = orc.solve_dirichlet(net, FixedVoltages(fixed))
    mat = orc.branch_currents(net, v).matrix
    return {name: float(mat[net.index(name)].sum()) for name in fixed}


@app.post("/exact", response_model=ExactResponse, response_model_exclude_none=True)
def exact(req: ExactRequest) -> ExactResponse:
    net = _network(req.network)
    resp = ExactResponse(theorem=req.theorem)

    if req.theorem in ("vv", "vj"):
        _require(bool(req.fixed), f"theorem {req.theorem} needs --fixed voltages")
        fixed = req.fixed
        if req.theorem == "vv":
            voltages = dict(fixed)
            for name in net.nodes:
                if name not in fixed:
                    voltages[name] = th.vv_exact(net, fixed.keys(), fixed, name)
            resp.voltages = voltages
            if req.check:
                resp.oracle = {"voltages": _oracle_voltages_fixed(net, fixed)}
                resp.max_rel_err = _rel_err(voltages, resp.oracle["voltages"])
        else:
            injected = {
                name: th.vj_exact(net, fixed.keys(), fixed, name)
                for name in fixed
            }
            resp.injected = injected
            if req.check:
                resp.oracle = {"injected": _oracle_injected(net, fixed)}
                resp.max_rel_err = _rel_err(injected, resp.oracle["injected"])
        return resp

    _require(bool(req.inject), f"theorem {req.theorem} needs --inject currents")
    J = _injection(net, req.inject)
    ground = req.ground if req.ground is not None else net.nodes[0]
    if req.theorem == "ji":
        mat = th.ji_exact(net, J).matrix
        resp.currents = _current_entries(net, mat)
        if req.check:
            v = orc.solve_injected(net, J, ground)
            omat = orc.branch_currents(net, v).matrix
            resp.oracle = {
                "currents": [e.model_dump(exclude_none=True)
                             for e in _current_entries(net, omat)]
            }
            scale = max(float(np.max(np.abs(omat))), 1e-30)
            resp.max_rel_err = float(np.max(np.abs(mat - omat))) / scale
    else:  # iv
        I = th.consistent_current_matrix(net, J)
        v = th.iv_exact(net, I, ground)
        resp.voltages = v.as_dict()
        if req.check:
            ov = orc.solve_injected(net, J, ground).as_dict()
            resp.oracle = {"voltages": ov}
            resp.max_rel_err = _rel_err(resp.voltages, ov)
    return resp


@app.post("/estimate", response_model=EstimateResponse, response_model_exclude_none=True)
def estimate(req: EstimateRequest) -> EstimateResponse:
    net = _network(req.network)
    resp = EstimateResponse(theorem=req.theorem, samples=req.count, seed=req.seed)

    if req.theorem in ("vv", "vj"):
        _require(bool(req.fixed), f"theorem {req.theorem} needs --fixed voltages")
        fixed = req.fixed
        values: dict[str, float] = {}
        errs: dict[str, float] = {}
        if req.theorem == "vv":
            for name in net.nodes:
                if name in fixed:
                    values[name] = fixed[name]
                    errs[name] = 0.0
                else:
                    rep = th.vv_estimate(net, fixed.keys(), fixed, name,
                                         req.count, req.seed, req.workers)
                    values[name] = float(rep.value)
                    errs[name] = float(rep.std_error)
            resp.voltages = values
            if req.check:
                resp.oracle = {"voltages": _oracle_voltages_fixed(net, fixed)}
                resp.max_rel_err = _rel_err(values, resp.oracle["voltages"])
        else:
            for name in fixed:
                rep = th.vj_estimate(net, fixed.keys(), fixed, name,
                                     req.count, req.seed, req.workers)
                values[name] = float(rep.value)
                errs[name] = float(rep.std_error)
            resp.injected = values
            if req.check:
                resp.oracle = {"injected": _oracle_injected(net, fixed)}
                resp.max_rel_err = _rel_err(values, resp.oracle["injected"])
        resp.std_error = errs
        return resp

    _require(bool(req.inject), f"theorem {req.theorem} needs --inject currents")
    J = _injection(net, req.inject)
    ground = req.ground if req.ground is not None else net.nodes[0]
    if req.theorem == "ji":
        rep = th.ji_estimate(net, J, req.count, req.seed, req.workers)
        resp.currents = _current_entries(net, rep.value, rep.std_error)
        if req.check:
            v = orc.solve_injected(net, J, ground)
            omat = orc.branch_currents(net, v).matrix
            scale = max(float(np.max(np.abs(omat))), 1e-30)
            resp.max_rel_err = float(np.max(np.abs(rep.value - omat))) / scale
    else:  # iv
        I = th.consistent_current_matrix(net, J)
        rep = th.iv_estimate(net, I, ground, req.count, req.seed, req.workers)
        resp.voltages = dict(zip(net.nodes, map(float, rep.value)))
        resp.std_error = dict(zip(net.nodes, map(float, rep.std_error)))
        if req.check:
            ov = orc.solve_injected(net, J, ground).as_dict()
            resp.oracle = {"voltages": ov}
            resp.max_rel_err = _rel_err(resp.voltages, ov)
    return resp


@app.post("/enumerate", response_model=EnumerateResponse, response_model_exclude_none=True)
def enumerate_objects(req: EnumerateRequest) -> EnumerateResponse:
    net = _network(req.network)
    objects: list[EnumeratedObject] = []
    total = 0.0
    if req.roots:
        for f, w in enumerate_separating_forests(net, req.roots, cap=req.cap):
            objects.append(EnumeratedObject(
                branches=sorted(f.branch_ids), weight=w, block_of=f.block_of,
            ))
            total += w
    else:
        for t, w in enumerate_spanning_trees(net, cap=req.cap):
            objects.append(EnumeratedObject(branches=sorted(t.branch_ids), weight=w))
            total += w
    return EnumerateResponse(objects=objects, weight_sum=total)


@app.post("/sample", response_model=SampleResponse)
def sample(req: SampleRequest) -> SampleResponse:
    net = _network(req.network)
    rng = make_rng(req.seed)
    if req.roots:
        sampler = ForestSampler(net, req.roots, rng)
    else:
        sampler = TreeSampler(net, rng)
    return SampleResponse(samples=[
        SampledObject(branches=list(sampler.sample_ids()))
        for _ in range(req.count)
    ])


@app.post("/markov/hitting", response_model=HittingResponse, response_model_exclude_none=True)
def markov_hitting(req: HittingRequest) -> HittingResponse:
    net = _network(req.network)
    chain = mk.to_markov_chain(net)
    tau = mk.expected_hitting_time(chain, req.start, req.roots)
    resp = HittingResponse(tau=tau)
    if req.check:
        otau, _ = orc.fundamental_hitting(chain, req.start, req.roots)
        resp.oracle = {"tau": otau}
        resp.max_rel_err = abs(tau - otau) / max(abs(otau), 1e-30)
    return resp


@app.post("/markov/absorb", response_model=AbsorbResponse, response_model_exclude_none=True)
def markov_absorb(req: AbsorbRequest) -> AbsorbResponse:
    net = _network(req.network)
    chain = mk.to_markov_chain(net)
    if req.estimate:
        probs: dict[str, float] = {}
        errs: dict[str, float] = {}
        for target in req.roots:
            rep = mk.absorption_estimate(chain, req.start, req.roots, target,
                                         req.estimate, req.seed)
            probs[target] = float(rep.value)
            errs[target] = float(rep.std_error)
        resp = AbsorbResponse(probabilities=probs, std_error=errs,
                              samples=req.estimate)
    else:
        probs = {
            target: mk.absorption_probability(chain, req.start, req.roots, target)
            for target in req.roots
        }
        resp = AbsorbResponse(probabilities=probs)
    if req.check:
        _, oprobs = orc.fundamental_hitting(chain, req.start, req.roots)
        resp.oracle = {"probabilities": oprobs}
        resp.max_rel_err = _rel_err(resp.probabilities, oprobs)
    return resp


@app.post("/markov/flow", response_model=FlowResponse, response_model_exclude_none=True)
def markov_flow(req: FlowRequest) -> FlowResponse:
    net = _network(req.network)
    chain = mk.to_markov_chain(net)
    p0 = [req.p0.get(name, 0.0) for name in net.nodes]
    flow = mk.equilibrium_flow(chain, p0)
    entries = [
        FlowEntry(u=u, v=v, flow=flow.value(u, v))
        for i, u in enumerate(net.nodes)
        for v in net.nodes[i + 1:]
        if abs(flow.value(u, v)) > 0 or _has_branch(net, u, v)
    ]
    resp = FlowResponse(flows=entries)
    if req.check:
        ref = mk.equilibrium_flow_electrical(chain, p0)
        scale = max(float(np.max(np.abs(ref.u))), 1e-30)
        resp.oracle = {
            "flows": [
                {"u": e.u, "v": e.v, "flow": ref.value(e.u, e.v)}
                for e in entries
            ]
        }
        resp.max_rel_err = float(np.max(np.abs(flow.u - ref.u))) / scale
    return resp


def _has_branch(net: Network, u: str, v: str) -> bool:
    ui, vi = net.index(u), net.index(v)
    return any(
        {b.u, b.v} == {ui, vi} for b in net.branches if not b.is_self_loop
    )
