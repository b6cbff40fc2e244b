"""Antenna-side subspace selection: GS-MRT, plain MRT, and DFT beam selection."""

import numpy as np
from dataclasses import dataclass

from .channel import ChannelMatrix
from .errors import ConfigError, DegenerateChannelError

GS_PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class AasPrecoder:
    """M x N first-stage precoder with its selection method and signal gain."""

    matrix: np.ndarray
    method: str
    objective_value: float

    @property
    def N(self):
        return self.matrix.shape[1]


@dataclass(frozen=True)
class EffectiveChannel:
    """K x N product of the channel and the first-stage precoder."""

    matrix: np.ndarray

    @property
    def K(self):
        return self.matrix.shape[0]

    @property
    def N(self):
        return self.matrix.shape[1]


def _objective(H, P):
    return float(np.linalg.norm(H @ P, "fro") ** 2)


def gs_mrt(H: ChannelMatrix, N: int) -> AasPrecoder:
    """Gram-Schmidt orthonormalization of the first N conjugated channel rows.

    Modified Gram-Schmidt run twice for numerical stability; semi-unitary.
    """
    Hm = H.entries
    if N > min(H.M, H.K):
        raise ConfigError(f"gs_mrt requires N <= min(M, K), got N={N}")
    V = Hm[:N].conj().T.astype(complex).copy()  # M x N, column i = h_i^*
    scale = np.linalg.norm(V) + 1e-300
    Q = np.zeros_like(V)
    for i in range(N):
        v = V[:, i].copy()
        for _ in range(2):  # re-orthogonalization pass
            for j in range(i):
                v -= (Q[:, j].conj() @ v) * Q[:, j]
        nrm = np.linalg.norm(v)
        if nrm < GS_PIVOT_TOL * scale:
            raise DegenerateChannelError(f"Gram-Schmidt pivot {i} is numerically zero")
        Q[:, i] = v / nrm
    return AasPrecoder(Q, "gs_mrt", _objective(Hm, Q))


def mrt(H: ChannelMatrix, N: int) -> AasPrecoder:
    """Normalized maximum-ratio columns h_i^*/||h_i||; not semi-unitary in general."""
    Hm = H.entries
    if N > min(H.M, H.K):
        raise ConfigError(f"mrt requires N <= min(M, K), got N={N}")
    cols = Hm[:N].conj().T.astype(complex).copy()
    norms = np.linalg.norm(cols, axis=0)
    if np.any(norms == 0):
        raise DegenerateChannelError("mrt undefined for a zero channel row")
    return AasPrecoder(cols / norms, "mrt", _objective(Hm, cols / norms))


def dft_select(H: ChannelMatrix, N: int) -> AasPrecoder:
    """Keep the N unitary-DFT columns with the strongest beamspace response.

    Ties are broken towards the lowest column index.
    """
    Hm = H.entries
    M = H.M
    if N > M:
        raise ConfigError(f"dft_select requires N <= M, got N={N}")
    F = np.fft.fft(np.eye(M)) / np.sqrt(M)
    beam_norms = np.linalg.norm(Hm @ F, axis=0)
    idx = np.argsort(-beam_norms, kind="stable")[:N]
    P = F[:, np.sort(idx)]
    return AasPrecoder(P, "dft", _objective(Hm, P))


AAS_METHODS = {"gs_mrt": gs_mrt, "mrt": mrt, "dft": dft_select}


def effective_channel(H: ChannelMatrix, A: AasPrecoder) -> EffectiveChannel:
    if H.M != A.matrix.shape[0]:
        raise ConfigError("channel and AAS precoder dimensions disagree")
    return EffectiveChannel(H.entries @ A.matrix)
