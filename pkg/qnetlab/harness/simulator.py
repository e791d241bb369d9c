"""
Slot-by-slot simulation of one replication
"""
import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..model.chains import FiniteMarkovChain
from ..model.streams import ReplicationStreams, replication_streams
from ..model.topology import step
from ..policies.diagnostics import MemoryCertificate
from .config import Experiment

logger = logging.getLogger(__name__)

BLOCK = 65536


@dataclass
class ReplicationResult:
    """
    Raw output of one replication

    states[t] is X_t for t = 0..T; vertex_ids[t], s_a[t] and s_d[t] belong to slot t.
    """
    index: int
    states: np.ndarray
    vertex_ids: np.ndarray
    s_a: np.ndarray
    s_d: np.ndarray
    certificate: Optional[MemoryCertificate] = None
    seconds: float = 0.0


def _chain_path(chain: FiniteMarkovChain, start: int, u: np.ndarray, first: bool) -> np.ndarray:
    """States for a block of slots; the chain advances before every slot except slot 0"""
    out = np.empty(u.shape[0], dtype=np.int32)
    if chain.n_states == 1:
        out[:] = 0
        return out
    cum = chain.cumulative
    s = start
    for i in range(u.shape[0]):
        if not (first and i == 0):
            s = int(np.searchsorted(cum[s], u[i], side="right"))
        out[i] = s
    return out


def simulate(exp: Experiment, streams: ReplicationStreams) -> ReplicationResult:
    """
    Run one replication: per slot advance the chains, draw arrivals, select
    the departure vector and apply the queue evolution

    Raises:
        InfeasibleDepartureError: a policy returned a vector exceeding the state
    """
    started = time.perf_counter()
    horizon, m = exp.horizon, exp.m
    regions = exp.region_list
    policy = exp.policy.build(exp.topology, regions, streams.policy)
    certificate = MemoryCertificate() if exp.diagnostics and exp.policy.uses_memory else None

    states = np.empty((horizon + 1, m), dtype=np.int64)
    vertex_ids = np.empty(horizon, dtype=np.int32)
    s_a_path = np.empty(horizon, dtype=np.int32)
    s_d_path = np.empty(horizon, dtype=np.int32)

    x = np.array(exp.initial_backlog, dtype=np.int64)
    states[0] = x
    s_a = exp.arrivals.chain.initial
    s_d = exp.constraints.chain.initial

    for lo in range(0, horizon, BLOCK):
        hi = min(lo + BLOCK, horizon)
        n = hi - lo
        u_chain = streams.arrival.random(n)
        u_batch = streams.arrival.random((n, m))
        u_constraint = streams.constraint.random(n)

        sa_block = _chain_path(exp.arrivals.chain, s_a, u_chain, lo == 0)
        sd_block = _chain_path(exp.constraints.chain, s_d, u_constraint, lo == 0)
        s_a, s_d = int(sa_block[-1]), int(sd_block[-1])
        arrivals = exp.arrivals.draw_block(sa_block, u_batch)

        s_a_path[lo:hi] = sa_block
        s_d_path[lo:hi] = sd_block
        for i in range(n):
            t = lo + i
            state = int(sd_block[i])
            remembered = certificate.before(policy, state) if certificate else None
            sel = policy.select(x, state)
            if certificate:
                certificate.observe(policy, x, state, sel, remembered, t)
            x = step(x, arrivals[i], sel.vector, exp.topology, t)
            vertex_ids[t] = sel.vertex_id
            states[t + 1] = x

    seconds = time.perf_counter() - started
    logger.debug("replication %d: %d slots in %.2fs", streams.index, horizon, seconds)
    return ReplicationResult(streams.index, states, vertex_ids, s_a_path, s_d_path, certificate, seconds)


def simulate_index(exp: Experiment, index: int) -> ReplicationResult:
    """Replication `index` of the experiment, with its own streams (process-pool entry point)"""
    return simulate(exp, replication_streams(exp.seed, exp.replications)[index])
