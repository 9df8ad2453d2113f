"""Matrix exponential by scaling and squaring with diagonal Padé approximants.

Follows Higham, "The scaling and squaring method for the matrix exponential
revisited", SIAM J. Matrix Anal. Appl. 26 (2005).  Unlike propagation through
an eigendecomposition this stays accurate for defective matrices, which is
exactly what happens at exceptional points.
"""
import numpy as np

# Padé coefficients b_0..b_m for m = 3, 5, 7, 9, 13
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

# largest 1-norm for which the degree-m approximant is accurate to unit roundoff
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1,
          7: 9.504178996162932e-1, 9: 2.097847961257068, 13: 5.371920351148152}


def _pade_uv(A, m, powers):
    b = _PADE[m]
    ident = np.eye(A.shape[0], dtype=A.dtype)
    if m < 13:
        u = b[1] * ident
        v = b[0] * ident
        for i in range(1, m // 2 + 1):
            u = u + b[2 * i + 1] * powers[i]
            v = v + b[2 * i] * powers[i]
        return A @ u, v
    A2, A4, A6 = powers[1], powers[2], powers[3]
    u = A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
    u = u + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident
    v = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
    v = v + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    return A @ u, v


def expm(A):
    """Return ``exp(A)`` for a square (complex or real) matrix ``A``."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("expm input has non-finite entries")
    if not np.iscomplexobj(A):
        A = A.astype(float)
    if A.shape[0] == 0:
        return A.copy()

    norm = np.linalg.norm(A, 1)
    A2 = A @ A
    powers = [None, A2]
    for m in (3, 5, 7, 9):
        if m >= 5:
            powers.append(powers[-1] @ A2)
        if norm <= _THETA[m]:
            u, v = _pade_uv(A, m, powers)
            return np.linalg.solve(v - u, v + u)

    s = max(0, int(np.ceil(np.log2(norm / _THETA[13])))) if norm > 0 else 0
    if s:
        scale = 2.0 ** -s
        A = A * scale
        powers = [None, A2 * scale**2]
    A4 = powers[1] @ powers[1]
    powers = [None, powers[1], A4, A4 @ powers[1]]
    u, v = _pade_uv(A, 13, powers)
    X = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        X = X @ X
    return X
