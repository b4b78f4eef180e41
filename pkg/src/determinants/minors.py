from itertools import combinations

import numpy as np

from .determinants import MinorExpansionLimitError

MAX_MINOR_DIMENSION = 12


def minor_expansion_det(
    M: np.ndarray,
    S: np.ndarray | None = None,
    U: np.ndarray | None = None,
    V: np.ndarray | None = None,
) -> complex:
    """
    主小行列式の和による det(I + M)。

    S, U, V を与えると縁付き行列 det[[S, U], [V, I + M]] を
    Σ_𝐦 det[[S, U[:, 𝐦]], [V[𝐦, :], M[𝐦, 𝐦]]] として計算する。p = 0 の項は 1（縁付きなら det S）。
    """
    M = np.asarray(M, dtype=complex)
    P = M.shape[0]
    if P > MAX_MINOR_DIMENSION:
        raise MinorExpansionLimitError(
            f"小行列式展開の次元 {P} が上限 {MAX_MINOR_DIMENSION} を超えています"
        )
    bordered = S is not None
    if bordered:
        S = np.atleast_2d(np.asarray(S, dtype=complex))
        U = np.asarray(U, dtype=complex).reshape(S.shape[0], P)
        V = np.asarray(V, dtype=complex).reshape(P, S.shape[1])
    total = 0j
    for p in range(P + 1):
        for subset in combinations(range(P), p):
            idx = list(subset)
            minor = M[np.ix_(idx, idx)]
            if bordered:
                minor = np.block([[S, U[:, idx]], [V[idx, :], minor]]) if idx else S
            total += np.linalg.det(minor) if minor.size else 1.0
    return complex(total)
