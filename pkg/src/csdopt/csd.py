"""Recursive cosine-sine decomposition of unitaries into controlled rotations.

The decomposition of a 2^n x 2^n unitary splits it as

    U = blockdiag(L1, L2) . [[C, -S], [S, C]] . blockdiag(R1, R2)

and recurses on the four half-size blocks.  The middle factor is a bank of
2^(n-1) individually controlled RY gates on the split qubit, one per
control pattern.  Two branches exist:

* real (orthogonal) inputs: 2x2 leaves become a single RY; the +-1
  determinant signs of scalar blocks are deferred upwards and emitted as
  controlled Z gates (a Z bank per recursion node plus a final Z cascade)
  so that a dense orthogonal costs about half its complex counterpart.
* complex inputs: scalar phases are deferred upwards the same way, turning
  into controlled RZ banks plus one final diagonal, emitted as a cascade of
  controlled PHASE gates and a single global-phase scalar.

Zero-angle gates are dropped at emission.  The gate sequence for a fixed
input is deterministic: LAPACK's CSD is deterministic and every remaining
gauge choice is pinned by explicit conventions below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg.lapack as _lapack

from .circuit import Circuit, record_to_gate, reduce_records
from .errors import (NotUnitary, NumericalBreakdown, RealBranchComplexInput,
                     ShapeError)
from .linalg import UNITARY_TOL, assert_unitary, unitarity_deviation

ZERO_ANGLE_TOL = 1e-12

_SIGN_FLIP2 = np.array([1.0, -1.0])
_SIGN_FLIP2.setflags(write=False)

_EYES: dict[int, np.ndarray] = {}


def _eye(m: int) -> np.ndarray:
    e = _EYES.get(m)
    if e is None:
        e = np.eye(m)
        _EYES[m] = e
    return e


def _lapack_csd_real(M: np.ndarray, h: int):
    out = _lapack.dorcsd(M[:h, :h], M[:h, h:], M[h:, :h], M[h:, h:])
    if out[-1] != 0:
        # the iterative phase of ?bbcsd occasionally stalls on highly
        # structured inputs; fall back to a direct SVD construction
        return _svd_csd(M, h)
    return out[5], out[6], out[4], out[7], out[8]  # u1, u2, theta, v1t, v2t


def _lapack_csd_complex(M: np.ndarray, h: int):
    out = _lapack.zuncsd(M[:h, :h], M[:h, h:], M[h:, :h], M[h:, h:])
    if out[-1] != 0:
        return _svd_csd(M, h)
    return out[5], out[6], out[4], out[7], out[8]


def _svd_csd(M: np.ndarray, h: int):
    """Cosine-sine step built from the SVD of the top-left quarter block.

    Deterministic fallback used when LAPACK's dedicated routine does not
    converge.  Same contract as the LAPACK path (theta ascending in
    [0, pi/2], reassembly exact); the residual gauge differs, which is
    fine because every consumer relies only on the reassembly identity.
    """
    x11 = M[:h, :h]
    x12 = M[:h, h:]
    x21 = M[h:, :h]
    x22 = M[h:, h:]
    u1, c, v1h = np.linalg.svd(x11)
    c = np.clip(c, 0.0, 1.0)
    y = x21 @ v1h.conj().T
    s = np.linalg.norm(y, axis=0)
    theta = np.arctan2(s, c)
    u2 = np.zeros_like(y)
    good = s > 1e-9
    u2[:, good] = y[:, good] / s[good]
    n_missing = int(h - good.sum())
    if n_missing:
        # degenerate sectors (theta ~ 0): align the remaining columns of
        # u2 with x22's action outside the span of the defined columns
        resid = x22 - u2[:, good] @ (u2[:, good].conj().T @ x22)
        a, _, _ = np.linalg.svd(resid)
        u2[:, ~good] = a[:, :n_missing]
    v2h = np.zeros_like(v1h)
    u2h_x22 = u2.conj().T @ x22
    u1h_x12 = u1.conj().T @ x12
    for i in range(h):
        if c[i] >= s[i]:
            v2h[i, :] = u2h_x22[i, :] / c[i]
        else:
            v2h[i, :] = -u1h_x12[i, :] / s[i]
    cd = np.diag(np.cos(theta))
    sd = np.diag(np.sin(theta))
    err = max(
        np.abs(u1 @ cd @ v1h - x11).max(),
        np.abs(-u1 @ sd @ v2h - x12).max(),
        np.abs(u2 @ sd @ v1h - x21).max(),
        np.abs(u2 @ cd @ v2h - x22).max(),
    )
    if err > 1e-9:
        raise NumericalBreakdown(
            f"cosine-sine step failed: LAPACK did not converge and the SVD "
            f"construction left a residual of {err:.2e}")
    return u1, u2, theta, v1h, v2h


# ---------------------------------------------------------------------------
# public single-step decomposition


@dataclass(frozen=True)
class CsdBlocks:
    """One cosine-sine step: U = blockdiag(left) . rotation . blockdiag(right)."""

    left_top: np.ndarray
    left_bottom: np.ndarray
    angles: np.ndarray          # theta_j in [0, pi/2]
    right_top: np.ndarray
    right_bottom: np.ndarray

    def reassemble(self) -> np.ndarray:
        h = len(self.angles)
        c = np.diag(np.cos(self.angles))
        s = np.diag(np.sin(self.angles))
        z = np.zeros((h, h))
        left = np.block([[self.left_top, z], [z, self.left_bottom]])
        mid = np.block([[c, -s], [s, c]])
        right = np.block([[self.right_top, z], [z, self.right_bottom]])
        return left @ mid @ right


def csd_step(U: np.ndarray, tol: float = UNITARY_TOL) -> CsdBlocks:
    """One cosine-sine decomposition of a unitary of dimension >= 4."""
    M = assert_unitary(U, tol)
    m = M.shape[0]
    if m < 4 or m & (m - 1):
        raise ShapeError(f"csd_step needs dimension 2^k >= 4, got {m}")
    h = m // 2
    if not np.iscomplexobj(M):
        u1, u2, theta, v1t, v2t = _lapack_csd_real(np.asarray(M, float), h)
    elif np.abs(M.imag).max() == 0.0:
        u1, u2, theta, v1t, v2t = _lapack_csd_real(M.real.copy(), h)
    else:
        u1, u2, theta, v1t, v2t = _lapack_csd_complex(np.asarray(M, complex), h)
    return CsdBlocks(u1, u2, theta, v1t, v2t)


@dataclass(frozen=True)
class LeafDecomposition:
    """ZYZ + phase angles of a 2x2 unitary.

    Complex branch: U = exp(i*phi) Rz(alpha) Ry(theta) Rz(beta).
    Real branch: U = [Z if has_z] Ry(theta); alpha, beta, phi are zero.
    """

    alpha: float
    theta: float
    beta: float
    phi: float
    has_z: bool = False


def leaf_decomposition(U: np.ndarray, branch: str = "complex") -> LeafDecomposition:
    M = assert_unitary(U)
    if M.shape[0] != 2:
        raise ShapeError("leaf decomposition needs a 2x2 matrix")
    if branch == "real":
        if np.iscomplexobj(M) and np.abs(M.imag).max() != 0.0:
            raise RealBranchComplexInput("real branch given complex entries")
        W = np.asarray(M, float)
        det = W[0, 0] * W[1, 1] - W[0, 1] * W[1, 0]
        has_z = det < 0
        if has_z:
            W = W.copy()
            W[:, 1] = -W[:, 1]
        theta = 2.0 * np.arctan2(W[1, 0], W[0, 0])
        return LeafDecomposition(0.0, float(theta), 0.0, 0.0, bool(has_z))
    lam1, lam2, theta2, rho = _leaf_phases(np.asarray(M, complex))
    alpha = lam2 - lam1
    beta = rho
    phi = 0.5 * (lam1 + lam2) + 0.5 * rho
    return LeafDecomposition(float(alpha), float(theta2), float(beta), float(phi))


def _leaf_phases(M: np.ndarray):
    """2x2 complex U = diag(e^{i lam1}, e^{i lam2}) R(theta) diag(1, e^{i rho}).

    Deterministic gauge: the right factor's first phase is zero; in the
    degenerate cases (theta = 0 or pi/2) the remaining freedom goes into
    the left phases and rho is set to zero.
    """
    c = abs(M[0, 0])
    s = abs(M[1, 0])
    theta = np.arctan2(s, c)
    if s <= 1e-300:                      # theta = 0, off-diagonal zero
        lam1 = np.angle(M[0, 0])
        lam2 = np.angle(M[1, 1])
        rho = 0.0
    elif c <= 1e-300:                    # theta = pi/2, diagonal zero
        lam1 = np.angle(-M[0, 1])
        lam2 = np.angle(M[1, 0])
        rho = 0.0
    else:
        lam1 = np.angle(M[0, 0])
        lam2 = np.angle(M[1, 0])
        if c >= s:
            rho = np.angle(M[1, 1]) - lam2
        else:
            rho = np.angle(-M[0, 1]) - lam1
    return lam1, lam2, 2.0 * theta, rho


# ---------------------------------------------------------------------------
# slot schedule
#
# A fully recursed decomposition emits banks of controlled rotations in a
# fixed in-order layout: [right subtree][aux bank][RY bank][left subtree].
# Sibling sub-blocks commute (they act on disjoint control sectors), so
# their banks are interleaved into one full-pattern bank per structural
# slot.  The slot layout depends only on n and is cached; a decomposition
# just fills angle arrays.  Slot 2k is the aux bank (Z or RZ), slot 2k+1
# the RY bank.


class _Schedule:
    def __init__(self, n: int):
        self.n = n
        targets: list[int] = []

        def rec(k, depth):
            if k == 1:
                targets.extend((depth + 1, depth + 1))
                return
            rec(k - 1, depth + 1)
            targets.extend((depth + 1, depth + 1))
            rec(k - 1, depth + 1)

        rec(n, 0)
        self.targets = targets
        self.n_slots = len(targets)


_SCHEDULES: dict[int, _Schedule] = {}


def _schedule(n: int) -> _Schedule:
    s = _SCHEDULES.get(n)
    if s is None:
        s = _Schedule(n)
        _SCHEDULES[n] = s
    return s


class CsdEngine:
    """Reusable decomposition engine with a block memo.

    Sub-blocks of small dimension recur heavily for structured inputs
    (permutation matrices, padded walk operators), so their fully recursed
    angle data is cached by matrix content.  The cache is transparent:
    results are identical with or without it.
    """

    def __init__(self, branch: str, memo_max_dim: int = 8,
                 memo_max_entries: int = 30000):
        if branch not in ("real", "complex"):
            raise ValueError("branch must be 'real' or 'complex'")
        self.branch = branch
        self.memo_max_dim = memo_max_dim
        self.memo_max_entries = memo_max_entries
        self._memo: dict = {}

    # -- public ------------------------------------------------------------

    def records(self, U: np.ndarray, tol: float = UNITARY_TOL):
        """Decompose; returns (gate records, global phase)."""
        M = np.asarray(U)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {M.shape}")
        m = M.shape[0]
        if m < 2 or m & (m - 1):
            raise ShapeError(f"dimension {m} is not a power of two >= 2")
        dev = unitarity_deviation(M)
        if dev > tol:
            raise NotUnitary(dev, tol)
        if self.branch == "real":
            if np.iscomplexobj(M):
                if np.abs(M.imag).max() != 0.0:
                    raise RealBranchComplexInput(
                        "real branch given entries with nonzero imaginary part")
                M = M.real
            return self._records_real(np.array(M, float))
        return self._records_complex(np.array(M, complex))

    # -- shared helpers ------------------------------------------------------

    def _alloc(self, n: int):
        sched = _schedule(n)
        half = 1 << (n - 1)
        ry = [np.zeros(half) for _ in range(sched.n_slots // 2)]
        if self.branch == "real":
            aux = [np.zeros(half, dtype=bool) for _ in range(sched.n_slots // 2)]
        else:
            aux = [np.zeros(half) for _ in range(sched.n_slots // 2)]
        return sched, ry, aux

    # -- real branch ---------------------------------------------------------

    def _records_real(self, M):
        n = M.shape[0].bit_length() - 1
        sched, ry, aux = self._alloc(n)
        signs = self._dec_real(M, n, 0, 0, ry, aux)
        recs = _flatten(sched, ry, aux, n, "Z")
        recs += _sign_cascade(signs, n)
        # the cascade encodes sign ratios; the absolute sign of the first
        # basis state is what remains, as a global factor of -1
        gphase = np.pi if signs is not None and signs[0] < 0 else 0.0
        return recs, gphase

    def _dec_real(self, M, k, base, v, ry, aux):
        """Fill banks of the subtree at slot ``base`` and path value ``v``.

        Returns the deferred column signs of ``M`` (length 2^k, or None for
        all +1): the gates written reproduce M . diag(signs)^-1, i.e.
        M = diag(signs) . (product of written gates).
        """
        m = M.shape[0]
        if m == 2:
            a = M[0, 0]
            b = M[0, 1]
            ry[base >> 1][v] = 2.0 * math.atan2(-b, a)
            if a * M[1, 1] - b * M[1, 0] > 0:
                return None
            return _SIGN_FLIP2
        key = None
        if m <= self.memo_max_dim:
            key = (m, M.tobytes())
            hit = self._memo.get(key)
            if hit is not None:
                sub_ry, sub_aux, signs = hit
                half = 1 << (k - 1)
                lo = v * half
                s0 = base >> 1
                for i, arr in enumerate(sub_ry):
                    ry[s0 + i][lo:lo + half] = arr
                for i, arr in enumerate(sub_aux):
                    aux[s0 + i][lo:lo + half] = arr
                return signs
        elif np.abs(M - _eye(m)).max() < 1e-14:
            return None
        half = 1 << (k - 1)
        lo = v * half
        h = m >> 1
        u1, u2, theta, v1t, v2t = _lapack_csd_real(M, h)
        sub = (1 << k) - 2
        s1 = self._dec_real(v1t, k - 1, base, 2 * v, ry, aux)
        s2 = self._dec_real(v2t, k - 1, base, 2 * v + 1, ry, aux)
        own = (base + sub) >> 1
        ry[own][lo:lo + half] = theta
        ry[own][lo:lo + half] *= 2.0
        sigma = s1
        if s1 is not None or s2 is not None:
            if s1 is None:
                aux[own][lo:lo + half] = s2 < 0
            elif s2 is None:
                aux[own][lo:lo + half] = s1 < 0
            else:
                aux[own][lo:lo + half] = s1 * s2 < 0
        lbase = base + sub + 2
        if sigma is None:
            e1 = self._dec_real(u1, k - 1, lbase, 2 * v, ry, aux)
            e2 = self._dec_real(u2, k - 1, lbase, 2 * v + 1, ry, aux)
        else:
            e1 = self._dec_real(u1 * sigma, k - 1, lbase, 2 * v, ry, aux)
            e2 = self._dec_real(u2 * sigma, k - 1, lbase, 2 * v + 1, ry, aux)
        if e1 is None and e2 is None:
            signs = None
        else:
            signs = np.ones(m)
            if e1 is not None:
                signs[:h] = e1
            if e2 is not None:
                signs[h:] = e2
        if key is not None and len(self._memo) < self.memo_max_entries:
            s0 = base >> 1
            npairs = (1 << k) - 1
            self._memo[key] = (
                [ry[s0 + i][lo:lo + half].copy() for i in range(npairs)],
                [aux[s0 + i][lo:lo + half].copy() for i in range(npairs)],
                signs)
        return signs

    # -- complex branch --------------------------------------------------------

    def _records_complex(self, M):
        n = M.shape[0].bit_length() - 1
        sched, ry, aux = self._alloc(n)
        delta = self._dec_complex(M, n, 0, 0, ry, aux)
        recs = _flatten(sched, ry, aux, n, "RZ")
        if delta is None:
            return recs, 0.0
        casc, gphase = _phase_cascade(delta, n)
        return recs + casc, gphase

    def _dec_complex(self, M, k, base, v, ry, aux):
        """Like _dec_real, deferring a diagonal of phases instead of signs.

        Returns phases delta (length 2^k, or None for all zero) such that
        M = diag(exp(i delta)) . (product of written gates).
        """
        m = M.shape[0]
        if m == 2:
            lam1, lam2, theta2, rho = _leaf_phases(M)
            s_idx = base >> 1
            aux[s_idx][v] = rho
            ry[s_idx][v] = theta2
            mu = 0.5 * rho
            if lam1 + mu == 0.0 and lam2 + mu == 0.0:
                return None
            return np.array([lam1 + mu, lam2 + mu])
        key = None
        if m <= self.memo_max_dim:
            key = (m, M.tobytes())
            hit = self._memo.get(key)
            if hit is not None:
                sub_ry, sub_aux, delta = hit
                half = 1 << (k - 1)
                lo = v * half
                s0 = base >> 1
                for i, arr in enumerate(sub_ry):
                    ry[s0 + i][lo:lo + half] = arr
                for i, arr in enumerate(sub_aux):
                    aux[s0 + i][lo:lo + half] = arr
                return delta
        elif np.abs(M - _eye(m)).max() < 1e-14:
            return None
        half = 1 << (k - 1)
        lo = v * half
        h = m >> 1
        u1, u2, theta, v1t, v2t = _lapack_csd_complex(M, h)
        sub = (1 << k) - 2
        d1 = self._dec_complex(v1t, k - 1, base, 2 * v, ry, aux)
        d2 = self._dec_complex(v2t, k - 1, base, 2 * v + 1, ry, aux)
        own = (base + sub) >> 1
        ry[own][lo:lo + half] = theta
        ry[own][lo:lo + half] *= 2.0
        if d1 is None and d2 is None:
            mu = None
        else:
            if d1 is None:
                d1 = np.zeros(h)
            if d2 is None:
                d2 = np.zeros(h)
            aux[own][lo:lo + half] = d2 - d1
            mu = 0.5 * (d1 + d2)
        lbase = base + sub + 2
        if mu is None or not np.any(mu):
            e1 = self._dec_complex(u1, k - 1, lbase, 2 * v, ry, aux)
            e2 = self._dec_complex(u2, k - 1, lbase, 2 * v + 1, ry, aux)
        else:
            ph = np.exp(1j * mu)
            e1 = self._dec_complex(u1 * ph, k - 1, lbase, 2 * v, ry, aux)
            e2 = self._dec_complex(u2 * ph, k - 1, lbase, 2 * v + 1, ry, aux)
        if e1 is None and e2 is None:
            delta = None
        else:
            delta = np.zeros(m)
            if e1 is not None:
                delta[:h] = e1
            if e2 is not None:
                delta[h:] = e2
        if key is not None and len(self._memo) < self.memo_max_entries:
            s0 = base >> 1
            npairs = (1 << k) - 1
            self._memo[key] = (
                [ry[s0 + i][lo:lo + half].copy() for i in range(npairs)],
                [aux[s0 + i][lo:lo + half].copy() for i in range(npairs)],
                delta)
        return delta


def _bank_values(nz: np.ndarray, n: int, t: int) -> list:
    """Map bank pattern indices to control-value bitmasks (target bit skipped)."""
    shift = n - t
    return (((nz >> shift) << (shift + 1)) | (nz & ((1 << shift) - 1))).tolist()


def _flatten(sched: _Schedule, ry, aux, n: int, aux_kind: str):
    """Banks -> zero-dropped gate records in emission order."""
    recs = []
    full_mask = (1 << n) - 1
    for s in range(sched.n_slots // 2):
        t = sched.targets[2 * s]
        care = full_mask ^ (1 << (n - t))
        a = aux[s]
        if aux_kind == "Z":
            nz = np.nonzero(a)[0]
            if nz.size:
                recs.extend(("Z", t, care, val, None)
                            for val in _bank_values(nz, n, t))
        else:
            nz = np.nonzero(np.abs(a) >= ZERO_ANGLE_TOL)[0]
            if nz.size:
                recs.extend(("RZ", t, care, val, ang) for val, ang in
                            zip(_bank_values(nz, n, t), a[nz].tolist()))
        r = ry[s]
        nz = np.nonzero(np.abs(r) >= ZERO_ANGLE_TOL)[0]
        if nz.size:
            recs.extend(("RY", t, care, val, ang) for val, ang in
                        zip(_bank_values(nz, n, t), r[nz].tolist()))
    return recs


def _sign_cascade(signs, n: int):
    """Deferred +-1 column signs -> controlled Z gates, last wire first."""
    if signs is None:
        return []
    recs = []
    s = signs
    for t in range(n, 0, -1):
        s = s.reshape(-1, 2)
        flip = np.nonzero(s[:, 0] * s[:, 1] < 0)[0]
        care = ((1 << (t - 1)) - 1) << (n - t + 1)
        shift = n - t + 1
        recs.extend(("Z", t, care, int(j) << shift, None) for j in flip)
        s = s[:, 0]
    return recs


def _phase_cascade(delta, n: int):
    """Deferred diagonal phases -> controlled PHASE gates + global scalar."""
    recs = []
    d = delta
    for t in range(n, 0, -1):
        d = d.reshape(-1, 2)
        ang = d[:, 1] - d[:, 0]
        care = ((1 << (t - 1)) - 1) << (n - t + 1)
        shift = n - t + 1
        nz = np.nonzero(np.abs(ang) >= ZERO_ANGLE_TOL)[0]
        recs.extend(("PHASE", t, care, int(j) << shift, float(ang[j]))
                    for j in nz)
        d = d[:, 0]
    return recs, float(d[0])


# ---------------------------------------------------------------------------
# public entry points


_DEFAULT_ENGINES = {"real": CsdEngine("real"), "complex": CsdEngine("complex")}


def resolve_branch(U: np.ndarray, branch: str = "auto") -> str:
    if branch == "auto":
        M = np.asarray(U)
        return "complex" if np.iscomplexobj(M) and np.abs(M.imag).max() != 0.0 \
            else "real"
    if branch not in ("real", "complex"):
        raise ValueError(f"unknown branch {branch!r}")
    return branch


def decompose(U: np.ndarray, branch: str = "auto", tol: float = UNITARY_TOL,
              engine: CsdEngine | None = None) -> Circuit:
    """Compile a unitary into a circuit of controlled rotations (unreduced).

    The evaluation of the result reproduces U exactly (up to roundoff),
    including the global phase, which is carried on the circuit rather than
    emitted as a gate.  Apply :func:`csdopt.circuit.reduce_circuit` to merge
    mergeable gates.
    """
    br = resolve_branch(U, branch)
    eng = engine or _DEFAULT_ENGINES[br]
    recs, gphase = eng.records(U, tol)
    n = np.asarray(U).shape[0].bit_length() - 1
    gates = tuple(record_to_gate(r, n) for r in recs)
    return Circuit(n, gates, gphase)


def csd_gate_count(U: np.ndarray, branch: str = "auto", tol: float = UNITARY_TOL,
                   engine: CsdEngine | None = None) -> int:
    """Reduced gate count of the decomposition (reduction always applied)."""
    br = resolve_branch(U, branch)
    eng = engine or _DEFAULT_ENGINES[br]
    recs, _ = eng.records(U, tol)
    return len(reduce_records(recs))
