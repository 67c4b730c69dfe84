"""Dense Cholesky factorization with a diagonal jitter ladder."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument, NotPositiveDefinite

__all__ = ["JITTER_LADDER", "cholesky_spd"]

#: Relative jitters tried in order; each is scaled by the largest diagonal entry.
JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8, 1e-6)


def cholesky_spd(G, ladder=JITTER_LADDER) -> tuple[np.ndarray, float]:
    """Lower-triangular ``L`` with ``L @ L.T = G + jitter * I``.

    Returns ``(L, jitter)`` where ``jitter`` is the absolute amount added to
    the diagonal (zero when ``G`` factors as given).

    Raises
    ------
    NotPositiveDefinite
        If the factorization fails even at the largest jitter.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise InvalidArgument("expected a square matrix")
    if G.shape[0] > 10_000:
        raise InvalidArgument("matrix dimension exceeds 10^4")
    scale = max(float(np.max(np.abs(np.diag(G)))), np.finfo(float).tiny) if G.size else 1.0
    if not np.allclose(G, G.T, rtol=0, atol=1e-13 * scale):
        raise InvalidArgument("matrix is not symmetric")
    eye = np.eye(G.shape[0])
    for rel in ladder:
        jitter = rel * scale
        try:
            L = np.linalg.cholesky(G + jitter * eye if jitter else G)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(L)):
            return L, jitter
    raise NotPositiveDefinite(
        f"matrix is not positive definite even with jitter {ladder[-1]:g} x max-diagonal"
    )
