"""Ribbon and pivotal structure on the weight-module category.

Braiding from the truncated R-matrix, twist from its closed formula,
evaluation/coevaluation in the pivotal normalization K**(1-N), quantum and
partial traces, open Hopf operators and the modified dimension.

Conventions, fixed once and validated against closed-form values:

* braiding(V, W) = flip . R with R = q**(HxH/2) sum_n c_n E**n x F**n,
  truncated at nilpotency; q**(HxH/2) acts by q**(lam*mu/2).
* the right partial trace closes a strand with ev~ (weight q**((1-N)lam)),
  the left one with coev~ (weight q**((N-1)lam)).
* open_hopf(V, W) is the right partial closure of the double braiding on
  W x V, which reproduces the known scalars on typicals.
"""

from __future__ import annotations

import threading

import numpy as np

from .qarith import Poly, RootData, as_weight, matrix_poly, q_power, qbrace, qbracket
from .repcat import (Morphism, WeightModule, dual, end_algebra, simple_module,
                     tensor, typical_module)

__all__ = ["RibbonOps", "modified_dim"]


def modified_dim(root: RootData, alpha) -> complex:
    """d(alpha) = {alpha}/{N alpha}; poles exactly on the quarter lattice."""
    w = as_weight(alpha)
    if w.in_quarter_lattice():
        raise ValueError("modified dimension pole")
    denom = qbrace(root, root.N * w.value)
    if abs(denom) < 1e-12:
        raise ValueError("modified dimension pole")
    return qbrace(root, w.value) / denom


def _flip_matrix(d1: int, d2: int) -> np.ndarray:
    p = np.zeros((d1 * d2, d1 * d2))
    for i in range(d1):
        for j in range(d2):
            p[j * d1 + i, i * d2 + j] = 1.0
    return p


class RibbonOps:
    """Braiding/twist/trace operations, cached by module label."""

    def __init__(self, root: RootData):
        self.root = root
        self._braid_cache: dict = {}
        self._twist_cache: dict = {}
        self._lock = threading.RLock()

    # -- braiding -----------------------------------------------------------

    def r_matrix(self, m1: WeightModule, m2: WeightModule) -> np.ndarray:
        root = self.root
        q = root.q
        acc = np.zeros((m1.dim * m2.dim, m1.dim * m2.dim), dtype=complex)
        en = np.eye(m1.dim, dtype=complex)
        fn = np.eye(m2.dim, dtype=complex)
        coeff = 1.0 + 0j
        n = 0
        while True:
            acc += coeff * np.kron(en, fn)
            n += 1
            en = en @ m1.actE
            fn = fn @ m2.actF
            if np.abs(en).max() < 1e-250 or np.abs(fn).max() < 1e-250:
                break
            if n > 4 * root.N:
                raise AssertionError("E/F not nilpotent")
            coeff *= (q - 1 / q) / qbracket(root, n) * q ** (n - 1)
        lam1 = np.array([w.value for w in m1.weights])
        lam2 = np.array([w.value for w in m2.weights])
        diag = np.exp(2j * np.pi / root.N * np.outer(lam1, lam2)).reshape(-1)
        return diag[:, None] * acc

    def braiding(self, m1: WeightModule, m2: WeightModule) -> Morphism:
        """c_{V,W} = flip . R : V x W -> W x V."""
        key = ("c", m1.label, m2.label)
        with self._lock:
            if key not in self._braid_cache:
                mat = _flip_matrix(m1.dim, m2.dim) @ self.r_matrix(m1, m2)
                mat.setflags(write=False)
                self._braid_cache[key] = mat
        return Morphism(tensor(m1, m2), tensor(m2, m1), self._braid_cache[key])

    def braiding_inv(self, m1: WeightModule, m2: WeightModule) -> Morphism:
        """c_{V,W}**-1 : W x V -> V x W."""
        key = ("cinv", m1.label, m2.label)
        with self._lock:
            if key not in self._braid_cache:
                mat = np.linalg.inv(self.braiding(m1, m2).matrix)
                mat.setflags(write=False)
                self._braid_cache[key] = mat
        return Morphism(tensor(m2, m1), tensor(m1, m2), self._braid_cache[key])

    def double_braiding(self, m1: WeightModule, m2: WeightModule) -> np.ndarray:
        """c_{W,V} . c_{V,W} on V x W (V = m1, W = m2)."""
        return self.braiding(m2, m1).matrix @ self.braiding(m1, m2).matrix

    # -- twist --------------------------------------------------------------

    def twist_inv(self, m: WeightModule) -> Morphism:
        """theta**-1 = K**(N-1) sum_n c_n S(F)**n q**(-H^2/2) E**n."""
        root = self.root
        q = root.q
        sf = -(m.actK @ m.actF)
        lam = np.array([w.value for w in m.weights])
        dq = np.exp(-2j * np.pi / root.N * lam * lam)
        acc = np.zeros((m.dim, m.dim), dtype=complex)
        sfn = np.eye(m.dim, dtype=complex)
        en = np.eye(m.dim, dtype=complex)
        coeff = 1.0 + 0j
        for n in range(root.N):
            if n > 0:
                sfn = sfn @ sf
                en = en @ m.actE
                coeff *= (q - 1 / q) / qbracket(root, n) * q ** (n - 1)
            acc += coeff * (sfn @ (dq[:, None] * en))
        mat = m.k_power(root.N - 1) @ acc
        return Morphism(m, m, mat)

    def twist(self, m: WeightModule) -> Morphism:
        key = m.label
        with self._lock:
            if key not in self._twist_cache:
                inv = self.twist_inv(m).matrix
                mat = np.linalg.inv(inv)
                mat.setflags(write=False)
                self._twist_cache[key] = mat
        return Morphism(m, m, self._twist_cache[key])

    def twist_scalar(self, m: WeightModule) -> complex:
        return self.twist(m).scalar()

    # -- pivotal structure ----------------------------------------------------

    def coev(self, m: WeightModule) -> np.ndarray:
        """1 -> V x V*, column vector sum_i v_i x v_i*."""
        return np.eye(m.dim, dtype=complex).reshape(-1, 1)

    def ev(self, m: WeightModule) -> np.ndarray:
        """V* x V -> 1, row vector f x v -> f(v)."""
        return np.eye(m.dim, dtype=complex).reshape(1, -1)

    def coev_tilde(self, m: WeightModule) -> np.ndarray:
        """1 -> V* x V, sum_i v_i* x K**(N-1) v_i."""
        return m.k_power(self.root.N - 1).T.reshape(-1, 1)

    def ev_tilde(self, m: WeightModule) -> np.ndarray:
        """V x V* -> 1, v x f -> f(K**(1-N) v); entry (j, i) is K**(1-N)[i, j]."""
        return m.k_power(1 - self.root.N).T.reshape(1, -1)

    # -- traces -------------------------------------------------------------

    def qtrace(self, f: Morphism) -> complex:
        """qtr(f) = Tr(K**(1-N) f)."""
        m = f.source
        return complex(np.trace(m.k_power(1 - self.root.N) @ f.matrix))

    def qdim(self, m: WeightModule) -> complex:
        return complex(np.trace(m.k_power(1 - self.root.N)))

    def partial_qtrace_right(self, f: np.ndarray, m1: WeightModule, m2: WeightModule) -> np.ndarray:
        """Close the right factor of f in End(V x W) with ev~/coev: End(V)."""
        t = np.asarray(f, dtype=complex).reshape(m1.dim, m2.dim, m1.dim, m2.dim)
        wts = np.array([q_power(self.root, (1 - self.root.N) * w.value) for w in m2.weights])
        return np.einsum("ajbj,j->ab", t, wts)

    def partial_qtrace_left(self, f: np.ndarray, m1: WeightModule, m2: WeightModule) -> np.ndarray:
        """Close the left factor of f in End(V x W) with ev/coev~: End(W)."""
        t = np.asarray(f, dtype=complex).reshape(m1.dim, m2.dim, m1.dim, m2.dim)
        wts = np.array([q_power(self.root, (self.root.N - 1) * w.value) for w in m1.weights])
        return np.einsum("iaib,i->ab", t, wts)

    # -- open Hopf ----------------------------------------------------------

    def open_hopf(self, v: WeightModule, w: WeightModule) -> Morphism:
        """Phi_{V,W} in End(W): V-meridian closed around an open W-strand.

        Computed as the right partial quantum trace of the double braiding
        c_{V,W} . c_{W,V} on W x V.
        """
        f = self.braiding(v, w).matrix @ self.braiding(w, v).matrix
        return Morphism(w, w, self.partial_qtrace_right(f, w, v))

    def open_hopf_poly(self, p: Poly, w: WeightModule) -> Morphism:
        """Phi_{P(S_1),W} = P(Phi_{S_1,W})."""
        s1 = simple_module(self.root, 1)
        return Morphism(w, w, matrix_poly(p, self.open_hopf(s1, w).matrix))

    # -- ambidexterity ------------------------------------------------------

    def ambidextrous_check(self, m: WeightModule) -> dict:
        """Deviation data for t_L = t_R on End(m x m) and braiding centrality."""
        mm = tensor(m, m)
        basis = end_algebra(mm)
        c = self.braiding(m, m).matrix
        trace_dev = 0.0
        braid_dev = 0.0
        for f in basis:
            tl = self.partial_qtrace_left(f.matrix, m, m)
            tr = self.partial_qtrace_right(f.matrix, m, m)
            trace_dev = max(trace_dev, float(np.abs(tl - tr).max()))
            braid_dev = max(braid_dev, float(np.abs(c @ f.matrix - f.matrix @ c).max()))
        return {"end_dim": len(basis), "trace_deviation": trace_dev,
                "braiding_commutant_deviation": braid_dev}
