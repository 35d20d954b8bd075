"""RIS beamforming front end.

A reflecting surface with N phase-controlled units sits between an M-antenna
transmitter and a single-antenna receiver. Under maximum ratio transmission
the received power depends on the phase configuration only through the l2
norm of the combined channel, so tuning the surface reduces to the package's
central problem: maximize ||A exp(j*Omega)||_2 with A assembled from the
cascaded channel, plus one auxiliary column when a direct link is present.
The auxiliary phase is removed afterwards by de-rotation, which the lattice
is closed under, so nothing is lost by the detour through N+1 variables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .core import DiscretePhaseSet, PhaseVector, as_complex_matrix, as_complex_vector, norm_lp
from .errors import InvalidArgumentError
from .solver import PipelineResult, SolveConfig, default_pipeline
from . import serialize


@dataclass(frozen=True)
class RisInstance:
    """One MISO channel realization.

    h_d is the direct transmitter-receiver link; None means it is blocked
    (the NLoS case). power is the transmit power P, sigma2 the noise variance.
    """

    h_ris_bs: np.ndarray       # N x M
    h_ue_ris: np.ndarray       # length N
    h_d: np.ndarray | None = None   # length M
    power: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self):
        h = as_complex_matrix(self.h_ris_bs)
        u = as_complex_vector(self.h_ue_ris)
        object.__setattr__(self, "h_ris_bs", h)
        object.__setattr__(self, "h_ue_ris", u)
        if u.size != h.shape[0]:
            raise InvalidArgumentError("h_ue_ris length must match the RIS unit count")
        if self.h_d is not None:
            d = as_complex_vector(self.h_d)
            if d.size != h.shape[1]:
                raise InvalidArgumentError("h_d length must match the antenna count")
            object.__setattr__(self, "h_d", d)
        if not (self.power > 0 and self.sigma2 > 0):
            raise InvalidArgumentError("transmit power and noise variance must be positive")

    @property
    def n_units(self) -> int:
        return self.h_ue_ris.size

    @property
    def n_antennas(self) -> int:
        return self.h_ris_bs.shape[1]


@dataclass(frozen=True)
class BeamformingProblem:
    """The norm-maximization instance built from a channel realization.

    `matrix` has one column per RIS unit, plus a trailing auxiliary column
    (the conjugated direct link) when `augmented` is set.
    """

    matrix: np.ndarray
    augmented: bool

    @property
    def n_units(self) -> int:
        return self.matrix.shape[1] - (1 if self.augmented else 0)


class SnrValue(NamedTuple):
    linear: float
    db: float


def build_phi(inst: RisInstance) -> np.ndarray:
    """Cascaded channel: row i is conj(h_ue_ris[i]) times row i of H."""
    return np.conj(inst.h_ue_ris)[:, None] * inst.h_ris_bs


def build_problem(inst: RisInstance) -> BeamformingProblem:
    """Assemble the solver matrix: Phi^T, with conj(h_d) appended per column
    when the direct link exists."""
    phi_t = build_phi(inst).T
    if inst.h_d is None:
        return BeamformingProblem(np.ascontiguousarray(phi_t), False)
    a = np.hstack([phi_t, np.conj(inst.h_d)[:, None]])
    return BeamformingProblem(a, True)


def derotate(pv: PhaseVector, dps: DiscretePhaseSet) -> PhaseVector:
    """Fold the auxiliary phase into the unit phases: Omega_i - Omega_last.

    Works in index space, so lattice membership is preserved exactly.
    """
    if pv.indices is None:
        raise InvalidArgumentError("de-rotation expects a lattice configuration")
    idx = (pv.indices[:-1] - pv.indices[-1]) % dps.levels
    return PhaseVector.from_indices(idx, dps)


def solve_ris(prob: BeamformingProblem, dps: DiscretePhaseSet,
              cfg: SolveConfig | None = None) -> tuple[PhaseVector, float]:
    """Optimize the surface configuration through the default pipeline.

    Augmented problems are solved over N+1 phases and de-rotated so the
    auxiliary phase is 0; the norm objective is invariant under that global
    rotation, so the reported objective is unchanged.
    """
    p = cfg.p if cfg is not None else 2.0
    result: PipelineResult = default_pipeline(prob.matrix, dps, p, cfg=cfg)
    pv = result.trace.phases
    if prob.augmented:
        pv = derotate(pv, dps)
    return pv, result.final_cost


def snr(prob: BeamformingProblem, pv: PhaseVector, inst: RisInstance) -> SnrValue:
    """Receiver SNR for a configuration: P * ||A x||_2^2 / sigma2.

    x appends a unit auxiliary entry in the augmented case, matching a
    de-rotated configuration.
    """
    x = pv.phasors()
    if prob.augmented:
        if len(pv) != prob.n_units:
            raise InvalidArgumentError("configuration length must match the unit count")
        x = np.concatenate([x, [1.0 + 0.0j]])
    elif len(pv) != prob.matrix.shape[1]:
        raise InvalidArgumentError("configuration length must match the unit count")
    channel_gain = norm_lp(prob.matrix @ x, 2) ** 2
    linear = float(inst.power * channel_gain / inst.sigma2)
    return SnrValue(linear, float(10.0 * np.log10(linear)))


def instance_to_dict(inst: RisInstance) -> dict:
    return {
        "H_ris_bs": serialize.matrix_to_json(inst.h_ris_bs),
        "h_ue_ris": serialize.vector_to_json(inst.h_ue_ris),
        "h_d": None if inst.h_d is None else serialize.vector_to_json(inst.h_d),
        "P": float(inst.power),
        "sigma2": float(inst.sigma2),
    }


def instance_from_dict(doc: dict) -> RisInstance:
    if not isinstance(doc, dict):
        raise InvalidArgumentError("RIS instance document must be a JSON object")
    missing = {"H_ris_bs", "h_ue_ris"} - doc.keys()
    if missing:
        raise InvalidArgumentError(f"RIS instance is missing fields: {sorted(missing)}")
    h_d = doc.get("h_d")
    return RisInstance(
        h_ris_bs=serialize.json_to_matrix(doc["H_ris_bs"]),
        h_ue_ris=serialize.json_to_vector(doc["h_ue_ris"]),
        h_d=None if h_d is None else serialize.json_to_vector(h_d),
        power=float(doc.get("P", 1.0)),
        sigma2=float(doc.get("sigma2", 1.0)),
    )


def load_instance(path) -> RisInstance:
    return instance_from_dict(json.loads(Path(path).read_text()))


def save_instance(path, inst: RisInstance) -> None:
    serialize.dump_json(path, instance_to_dict(inst))
