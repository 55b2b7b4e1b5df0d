"""Weight modules over the unrolled quantum sl2 at an odd root of unity.

Constructs the typical modules V(alpha), the simples S(n), the projective
indecomposables P(n) and the invertible one-dimensional modules Eps(l),
together with duals, tensor products, characters, endomorphism algebras and
direct-sum decomposition into indecomposables.

Every module carries explicit action matrices for E, F, K, H in a weight
basis (H diagonal, K = q**H entrywise) plus the exact weight of each basis
vector, so gradings and characters are computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .qarith import ExactWeight, Poly, RootData, as_weight, interpolate, matrix_poly, q_power, qbracket

__all__ = [
    "WeightModule",
    "Morphism",
    "Character",
    "typical_module",
    "simple_module",
    "projective_module",
    "invertible_module",
    "dual",
    "tensor",
    "character",
    "hom_space",
    "end_algebra",
    "decompose",
    "decompose_by_character",
    "relation_residual",
    "half_lattice",
    "nilpotent_endo",
]

DECOMPOSE_SEED = 0xC9A1
EIG_CLUSTER_TOL = 1e-7


# ---------------------------------------------------------------------------
# labels


@dataclass(frozen=True)
class Label:
    kind: str                      # "V" | "S" | "P" | "Eps" | "Dual" | "Tensor"
    param: object = None           # ExactWeight for V, int for S/P/Eps
    parts: tuple = ()

    def __str__(self):
        if self.kind in ("V", "S", "P", "Eps"):
            return f"{self.kind}({self.param})"
        if self.kind == "Dual":
            return f"Dual({self.parts[0]})"
        if self.kind == "Tensor":
            return f"Tensor({self.parts[0]},{self.parts[1]})"
        if self.kind == "TensorPE":
            return f"P({self.param[0]})xEps({self.param[1]})"
        if self.kind == "TensorSE":
            return f"S({self.param[0]})xEps({self.param[1]})"
        return self.kind


# ---------------------------------------------------------------------------
# modules


class WeightModule:
    """Finite-dimensional weight module with explicit action matrices.

    Action matrices are frozen; ``weights[i]`` is the exact H-eigenvalue of
    basis vector i.
    """

    def __init__(self, root: RootData, weights: Sequence[ExactWeight],
                 actE: np.ndarray, actF: np.ndarray, label: Label):
        self.root = root
        self.weights = tuple(weights)
        self.dim = len(self.weights)
        self.actE = np.asarray(actE, dtype=complex)
        self.actF = np.asarray(actF, dtype=complex)
        self.actH = np.diag([w.value for w in self.weights]).astype(complex)
        self.actK = np.diag([q_power(root, w.value) for w in self.weights])
        self.label = label
        for m in (self.actE, self.actF, self.actH, self.actK):
            m.setflags(write=False)

    def k_power(self, exponent: int) -> np.ndarray:
        """Diagonal of q**(exponent*H); stable for negative exponents."""
        return np.diag([q_power(self.root, exponent * w.value) for w in self.weights])

    def act(self, gen: str) -> np.ndarray:
        return {"E": self.actE, "F": self.actF, "K": self.actK, "H": self.actH}[gen]

    def __repr__(self):
        return f"<WeightModule {self.label} dim={self.dim}>"


@dataclass
class Morphism:
    """Complex matrix between weight modules, with source/target metadata."""

    source: WeightModule
    target: WeightModule
    matrix: np.ndarray

    def intertwiner_defect(self) -> float:
        """Max norm of f X_source - X_target f over X in {E, F, K, H}."""
        worst = 0.0
        for gen in ("E", "F", "K", "H"):
            d = self.matrix @ self.source.act(gen) - self.target.act(gen) @ self.matrix
            worst = max(worst, float(np.abs(d).max(initial=0.0)))
        return worst

    def is_intertwiner(self, tol: float = 1e-9) -> bool:
        return self.intertwiner_defect() < tol

    def scalar(self, tol: float = 1e-8) -> complex:
        """Scalar lambda with matrix == lambda*Id, or raise."""
        if self.source is not self.target and self.source.label != self.target.label:
            raise ValueError("scalar extraction needs an endomorphism")
        lam = complex(np.trace(self.matrix)) / self.matrix.shape[0]
        dev = np.abs(self.matrix - lam * np.eye(self.matrix.shape[0])).max()
        if dev > tol * max(1.0, abs(lam)):
            raise ValueError("non-scalar endomorphism")
        return lam


Character = dict  # ExactWeight -> positive int multiplicity


def character(m: WeightModule) -> Character:
    chi: Character = {}
    for w in m.weights:
        chi[w] = chi.get(w, 0) + 1
    return chi


def char_mul(a: Character, b: Character) -> Character:
    out: Character = {}
    for wa, ma in a.items():
        for wb, mb in b.items():
            w = wa + wb
            out[w] = out.get(w, 0) + ma * mb
    return out


def char_sub(a: Character, b: Character) -> Character | None:
    """a - b with all multiplicities nonnegative, else None."""
    out = dict(a)
    for w, m in b.items():
        if out.get(w, 0) < m:
            return None
        out[w] -= m
        if out[w] == 0:
            del out[w]
    return out


def half_lattice(N: int) -> list[int]:
    """The even integers N-1-2j for j = 0..N-1, i.e. -(N-1)..(N-1) step 2.

    This is the index set over which tensor products of typical modules
    decompose; it is forced by the character identity
    sum_k X**k = (X**N - X**-N)/(X - X**-1).
    """
    return [N - 1 - 2 * j for j in range(N)]


# ---------------------------------------------------------------------------
# constructors


def typical_module(root: RootData, alpha) -> WeightModule:
    """The N-dimensional module V(alpha) for alpha outside (1/4)Z or in (N/4)Z."""
    alpha = as_weight(alpha)
    N = root.N
    if not alpha.is_admissible(N):
        raise ValueError(f"alpha not in admissible set: {alpha}")
    weights = [alpha + (N - 1 - 2 * j) for j in range(N)]
    E = np.zeros((N, N), dtype=complex)
    F = np.zeros((N, N), dtype=complex)
    for j in range(N - 1):
        F[j + 1, j] = 1.0
    for j in range(1, N):
        E[j - 1, j] = qbracket(root, j) * qbracket(root, alpha.value - j)
    return WeightModule(root, weights, E, F, Label("V", alpha))


def simple_module(root: RootData, n: int) -> WeightModule:
    """The (n+1)-dimensional simple S(n), 0 <= n <= N-1."""
    N = root.N
    if not 0 <= n <= N - 1:
        raise ValueError(f"n out of range 0..{N - 1}: {n}")
    weights = [as_weight(n - 2 * j) for j in range(n + 1)]
    E = np.zeros((n + 1, n + 1), dtype=complex)
    F = np.zeros((n + 1, n + 1), dtype=complex)
    for j in range(n):
        F[j + 1, j] = 1.0
    for j in range(1, n + 1):
        E[j - 1, j] = qbracket(root, j) * qbracket(root, n + 1 - j)
    return WeightModule(root, weights, E, F, Label("S", n))


def projective_module(root: RootData, n: int) -> WeightModule:
    """The 2N-dimensional projective indecomposable P(n), 0 <= n <= N-2.

    Basis x_0..x_{N-1}, y_0..y_{N-1}.  On the y-chain, E carries an x-term
    x_{N-2-n+j} for every 0 <= j <= n+1 (not only at j = 0 and j = n+1);
    the constant coefficient is forced by the [E, F] relation.
    """
    N = root.N
    if not 0 <= n <= N - 2:
        raise ValueError(f"n out of range 0..{N - 2}: {n}")
    wx = [as_weight(2 * N - 2 - n - 2 * j) for j in range(N)]
    wy = [as_weight(n - 2 * j) for j in range(N)]
    dim = 2 * N
    E = np.zeros((dim, dim), dtype=complex)
    F = np.zeros((dim, dim), dtype=complex)
    x, y = (lambda j: j), (lambda j: N + j)
    for j in range(N - 1):
        F[x(j + 1), x(j)] = 1.0
        F[y(j + 1), y(j)] = 1.0
    for j in range(1, N):
        E[x(j - 1), x(j)] = -qbracket(root, j) * qbracket(root, j + 1 + n)
        E[y(j - 1), y(j)] = qbracket(root, j) * qbracket(root, n + 1 - j)
    for j in range(N):
        if 0 <= N - 2 - n + j <= N - 1:
            E[x(N - 2 - n + j), y(j)] = 1.0
    return WeightModule(root, wx + wy, E, F, Label("P", n))


def invertible_module(root: RootData, l: int) -> WeightModule:
    """The one-dimensional module Eps(l) of weight l*N/4; K acts by (-1)**l."""
    w = ExactWeight.rational(Fraction(l * root.N, 4))
    z = np.zeros((1, 1), dtype=complex)
    return WeightModule(root, [w], z, z, Label("Eps", l))


def dual(m: WeightModule) -> WeightModule:
    """Dual module on the dual basis, acting through the antipode.

    S(E) = -E K**(-1), S(F) = -K F, S(H) = -H; the matrix of X on the dual
    basis is the transpose of S(X), and all weights are negated.
    """
    kinv = m.k_power(-1)
    E = (-(m.actE @ kinv)).T
    F = (-(m.actK @ m.actF)).T
    return WeightModule(m.root, [-w for w in m.weights], E, F,
                        Label("Dual", parts=(m.label,)))


def tensor(m1: WeightModule, m2: WeightModule) -> WeightModule:
    """Tensor product through the coproduct; weights add.

    Delta(E) = E x K + 1 x E and Delta(F) = F x 1 + K**-1 x F.  This is the
    unique pairing compatible with the antipode S(E) = -E K**-1, S(F) = -K F
    (the m(S x id)Delta = eta eps axiom fails for the other mixing).
    """
    id1 = np.eye(m1.dim)
    id2 = np.eye(m2.dim)
    E = np.kron(m1.actE, m2.actK) + np.kron(id1, m2.actE)
    F = np.kron(m1.actF, id2) + np.kron(m1.k_power(-1), m2.actF)
    weights = [w1 + w2 for w1 in m1.weights for w2 in m2.weights]
    return WeightModule(m1.root, weights, E, F,
                        Label("Tensor", parts=(m1.label, m2.label)))


def relation_residual(m: WeightModule) -> float:
    """Max residual of the defining relations plus K = q**H and nilpotency."""
    root, E, F, K, H = m.root, m.actE, m.actF, m.actK, m.actH
    q = root.q
    eye = np.eye(m.dim)
    kinv = m.k_power(-1)
    checks = [
        K @ E - q ** 2 * E @ K,
        K @ F - q ** -2 * F @ K,
        H @ E - E @ H - 2 * E,
        H @ F - F @ H + 2 * F,
        H @ K - K @ H,
        E @ F - F @ E - (K - kinv) / (q - 1 / q),
        K @ kinv - eye,
        np.linalg.matrix_power(E, root.N),
        np.linalg.matrix_power(F, root.N),
    ]
    return max(float(np.abs(c).max(initial=0.0)) for c in checks)


# ---------------------------------------------------------------------------
# hom spaces and decomposition


def _weight_blocks(m: WeightModule) -> dict[ExactWeight, list[int]]:
    blocks: dict[ExactWeight, list[int]] = {}
    for i, w in enumerate(m.weights):
        blocks.setdefault(w, []).append(i)
    return blocks


def hom_space(src: WeightModule, dst: WeightModule, tol: float = 1e-9) -> list[Morphism]:
    """Orthonormal basis of intertwiners src -> dst.

    An intertwiner preserves exact weights, so the unknowns are the entries
    of the weight-matched blocks; [f, E] = [f, F] = 0 is then solved by SVD.
    Commuting with H and K is automatic for weight-block maps.
    """
    bs, bd = _weight_blocks(src), _weight_blocks(dst)
    slots: list[tuple[int, int]] = []  # (dst index, src index)
    for w, cols in bs.items():
        for i in bd.get(w, []):
            for j in cols:
                slots.append((i, j))
    if not slots:
        return []
    slot_index = {s: k for k, s in enumerate(slots)}
    n_unk = len(slots)
    rows = []
    for gen in ("E", "F"):
        a_s, a_d = src.act(gen), dst.act(gen)
        # (f a_s - a_d f)[r, c]: slot (i, j) contributes a_s[j, c] when i == r
        # and -a_d[r, i] when j == c
        pairs = {(r, c) for (r, j) in slots for c in range(src.dim) if a_s[j, c] != 0}
        pairs |= {(r, c) for (i, c) in slots for r in range(dst.dim) if a_d[r, i] != 0}
        for r, c in pairs:
            row = np.zeros(n_unk, dtype=complex)
            for j in range(src.dim):
                k = slot_index.get((r, j))
                if k is not None and a_s[j, c] != 0:
                    row[k] += a_s[j, c]
            for i in range(dst.dim):
                k = slot_index.get((i, c))
                if k is not None and a_d[r, i] != 0:
                    row[k] -= a_d[r, i]
            if np.any(row):
                rows.append(row)
    if rows:
        a = np.vstack(rows)
        _, sv, vh = np.linalg.svd(a, full_matrices=True)
        scale = sv[0] if sv.size and sv[0] > 0 else 1.0
        rank = int(np.sum(sv > tol * scale))
        basis_vecs = vh.conj()[rank:]
    else:
        basis_vecs = np.eye(n_unk, dtype=complex)
    out = []
    for vec in basis_vecs:
        f = np.zeros((dst.dim, src.dim), dtype=complex)
        for k, (i, j) in enumerate(slots):
            f[i, j] = vec[k]
        out.append(Morphism(src, dst, f))
    return out


def end_algebra(m: WeightModule, tol: float = 1e-9) -> list[Morphism]:
    """Basis of the endomorphism algebra of m."""
    return hom_space(m, m, tol=tol)


def nilpotent_endo(m: WeightModule) -> np.ndarray | None:
    """For a rank-2 endomorphism algebra {Id, h}, the nilpotent direction.

    Any basis element is a*Id + b*h, so subtracting (trace/dim)*Id isolates
    b*h; the element with the largest such part is returned.
    """
    basis = end_algebra(m)
    if len(basis) != 2:
        return None
    best, best_norm = None, 0.0
    for f in basis:
        lam = complex(np.trace(f.matrix)) / m.dim
        n = f.matrix - lam * np.eye(m.dim)
        sz = float(np.abs(n).max())
        if sz > best_norm:
            best, best_norm = n, sz
    return best if best_norm > 1e-9 else None


def _hermite_cluster_projectors(t: np.ndarray, tol: float = EIG_CLUSTER_TOL) -> list[np.ndarray]:
    """Spectral projectors of t onto eigenvalue clusters, as polynomials in t.

    Hermite interpolation with p_j(lam_k) = delta_jk and p_j'(lam_k) = 0
    handles nilpotent parts of order 2, which is all that occurs in these
    endomorphism algebras.
    """
    eigs = np.linalg.eigvals(t)
    clusters: list[list[complex]] = []
    for lam in sorted(eigs, key=lambda z: (z.real, z.imag)):
        for cl in clusters:
            if abs(lam - cl[0]) < tol:
                cl.append(lam)
                break
        else:
            clusters.append([lam])
    centers = [sum(cl) / len(cl) for cl in clusters]
    projs = []
    for j in range(len(centers)):
        nodes = [(centers[k], 1.0 if k == j else 0.0, 0.0) for k in range(len(centers))]
        projs.append(matrix_poly(interpolate(nodes), t))
    return projs


def _restrict(m: WeightModule, proj: np.ndarray, label: Label) -> WeightModule:
    """Submodule carried by the image of a commuting projector.

    The image basis is assembled weight block by weight block so the
    restricted H stays diagonal and exact weights are preserved.
    """
    cols, wts = [], []
    for w, idx in _weight_blocks(m).items():
        block = proj[np.ix_(idx, idx)]
        u, sv, _ = np.linalg.svd(block)
        r = int(np.round(np.real(np.trace(block))))
        for k in range(r):
            col = np.zeros(m.dim, dtype=complex)
            col[idx] = u[:, k]
            cols.append(col)
            wts.append(w)
    if not cols:
        raise ValueError("empty summand")
    b = np.array(cols).T
    E = b.conj().T @ m.actE @ b
    F = b.conj().T @ m.actF @ b
    return WeightModule(m.root, wts, E, F, label)


def _match_label(m: WeightModule) -> Label | None:
    """Identify an indecomposable summand from its dimension and character."""
    root, N = m.root, m.root.N
    chi = character(m)

    def char_of(label: Label) -> Character:
        return character(_library_module(root, label))

    if m.dim == 1:
        w = m.weights[0]
        if w.is_exact and w.offset == 0:
            return Label("S", 0)
        if w.is_exact and (4 * w.offset / N).denominator == 1:
            return Label("Eps", int(4 * w.offset / N))
        return None
    # candidate highest weights: kernel of E first, all weights as fallback
    ker_e = [w for i, w in enumerate(m.weights)
             if np.abs(m.actE[:, i]).max(initial=0.0) < 1e-8]
    for hw in list(dict.fromkeys(ker_e)) + list(dict.fromkeys(m.weights)):
        if m.dim == N:
            alpha = hw - (N - 1)
            if alpha.is_admissible(N) and chi == char_of(Label("V", alpha)):
                return Label("V", alpha)
        if m.dim == 2 * N and hw.is_exact:
            # P(n) x Eps(l): highest weight 2N-2-n + l*N/4
            for n in range(N - 1):
                l4 = 4 * (hw.offset - (2 * N - 2 - n)) / N
                if l4.denominator == 1:
                    lab = Label("P", n) if l4 == 0 else Label("TensorPE", (n, int(l4)))
                    if chi == char_of(lab):
                        return lab
        if m.dim <= N and hw.is_exact:
            n = m.dim - 1
            l4 = 4 * (hw.offset - n) / N
            if l4.denominator == 1:
                lab = Label("S", n) if l4 == 0 else Label("TensorSE", (n, int(l4)))
                if chi == char_of(lab):
                    return lab
    return None


def _library_module(root: RootData, label: Label) -> WeightModule:
    if label.kind == "V":
        return typical_module(root, label.param)
    if label.kind == "S":
        return simple_module(root, label.param)
    if label.kind == "P":
        return projective_module(root, label.param)
    if label.kind == "Eps":
        return invertible_module(root, label.param)
    if label.kind == "TensorPE":
        n, l = label.param
        return tensor(projective_module(root, n), invertible_module(root, l))
    if label.kind == "TensorSE":
        n, l = label.param
        return tensor(simple_module(root, n), invertible_module(root, l))
    raise ValueError(f"not a library label: {label}")


def decompose(m: WeightModule, seed: int = DECOMPOSE_SEED, _depth: int = 0) -> list[Label]:
    """Split m into indecomposable summands and return their labels.

    Works by eigenprojection of a pseudo-random element of the endomorphism
    algebra (fixed seed for reproducibility), refined recursively, each
    summand identified through its character and highest weights.  The
    partition is verified: summand characters add up to character(m) exactly.
    """
    labels = _decompose_inner(m, seed, _depth)
    total: Character = {}
    for lab in labels:
        for w, mult in character(_library_module(m.root, lab)).items():
            total[w] = total.get(w, 0) + mult
    if total != character(m):
        raise ValueError("decomposition does not partition the character")
    return labels


def _decompose_inner(m: WeightModule, seed: int, depth: int) -> list[Label]:
    direct = _match_label(m)
    if direct is not None:
        return [direct]
    if depth > 8:
        raise ValueError(f"unrecognized summand: dim={m.dim}")
    basis = end_algebra(m)
    if len(basis) == 1:
        raise ValueError(f"unrecognized summand: dim={m.dim}")
    rng = np.random.default_rng(seed + depth)
    for _ in range(3):
        t = sum(float(c) * f.matrix for c, f in zip(rng.standard_normal(len(basis)), basis))
        projs = _hermite_cluster_projectors(t)
        if len(projs) > 1:
            labels: list[Label] = []
            for proj in projs:
                sub = _restrict(m, proj, Label("Summand"))
                labels.extend(_decompose_inner(sub, seed, depth + 1))
            return labels
    raise ValueError(f"unrecognized summand: dim={m.dim}")


def decompose_by_character(m: WeightModule) -> list[Label]:
    """Greedy character subtraction, valid when every summand is projective.

    A projective module is determined by its character, so peeling candidates
    off the top weight reproduces the decomposition with exact integer
    multiplicities.  Raises if the character cannot be exhausted.
    """
    root, N = m.root, m.root.N
    chi = character(m)
    labels: list[Label] = []
    while chi:
        sym_groups = {w.symbols for w in chi}
        if len(sym_groups) > 1:
            raise ValueError("mixed symbolic weights; character subtraction inapplicable")
        hw = max(chi, key=lambda w: (w.offset, ))
        matched = False
        for cand in _projective_candidates(root, hw):
            rem = char_sub(chi, character(_library_module(root, cand)))
            if rem is not None:
                chi = rem
                labels.append(cand)
                matched = True
                break
        if not matched:
            raise ValueError(f"unrecognized summand at highest weight {hw}")
    return labels


def _projective_candidates(root: RootData, hw: ExactWeight) -> list[Label]:
    N = root.N
    out: list[Label] = []
    alpha = hw - (N - 1)
    if alpha.is_admissible(N):
        out.append(Label("V", alpha))
    if hw.is_exact:
        for n in range(N - 1):
            l4 = 4 * (hw.offset - (2 * N - 2 - n)) / N
            if l4.denominator == 1:
                out.append(Label("P", n) if l4 == 0 else Label("TensorPE", (n, int(l4))))
    return out
