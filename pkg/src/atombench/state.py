"""Sparse block-structured density matrix for a register of ququarts.

Loss states are populated only by loss channels (never coherently), so per
site only six entries of the 4x4 single-site block structure can be nonzero:
the full 2x2 computational coherence block plus the two loss-state diagonal
entries.  An n-site state therefore stores 6^n complex numbers instead of
16^n, as a (6,)*n tensor with per-site symbol order

    0: rho_00   1: rho_01   2: rho_10   3: rho_11   4: rho_l0l0   5: rho_l1l1
"""

from __future__ import annotations

import numpy as np

from .channels import KrausSet, SITE_DIM
from .errors import CapacityError, PatternLeakError, ValidationError

N_SYMBOLS = 6
# (row, col) of each stored symbol in the 4x4 single-site block.
SYMBOL_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (3, 3))
_ROWS = np.array([p[0] for p in SYMBOL_PAIRS])
_COLS = np.array([p[1] for p in SYMBOL_PAIRS])
# Symbols on the density-matrix diagonal, in site-basis order |0>,|1>,|l0>,|l1>.
DIAG_SYMBOLS = (0, 3, 4, 5)
# Hermitian conjugation permutes rho_01 <-> rho_10 per site.
_HERM_PERM = np.array([0, 2, 1, 3, 4, 5])
_TRACE_VEC = np.array([1.0, 0.0, 0.0, 1.0, 1.0, 1.0])

_PAIR_SET = set(SYMBOL_PAIRS)
_OUT_PAIRS = [
    (r, c) for r in range(SITE_DIM) for c in range(SITE_DIM) if (r, c) not in _PAIR_SET
]
_OROWS = np.array([p[0] for p in _OUT_PAIRS])
_OCOLS = np.array([p[1] for p in _OUT_PAIRS])

# Two-site pattern: both sites patterned.  Row/col indices into the 16-dim
# pair space, ordered to match the (6, 6) symbol tensor layout.
_R2 = (SITE_DIM * _ROWS[:, None] + _ROWS[None, :]).ravel()
_C2 = (SITE_DIM * _COLS[:, None] + _COLS[None, :]).ravel()
_PAIR2_SET = set(zip(_R2.tolist(), _C2.tolist()))
_OUT2 = [
    (r, c)
    for r in range(SITE_DIM**2)
    for c in range(SITE_DIM**2)
    if (r, c) not in _PAIR2_SET
]
_OROWS2 = np.array([p[0] for p in _OUT2])
_OCOLS2 = np.array([p[1] for p in _OUT2])

TRACE_ATOL = 1e-10
HERM_ATOL = 1e-12
LEAK_ATOL = 1e-12
UNITARY_ATOL = 1e-12

DEFAULT_MEMORY_CAP = 8 << 30  # bytes; 8 GiB admits up to 11 sites


def _superop_1site(ops) -> np.ndarray:
    """6x6 action of a single-site Kraus set on the symbol space."""
    m = np.zeros((N_SYMBOLS, N_SYMBOLS), dtype=complex)
    for a in ops:
        m += a[np.ix_(_ROWS, _ROWS)] * a.conj()[np.ix_(_COLS, _COLS)]
    return m


def _leakage_1site(ops) -> float:
    """Largest amplitude leaking from the pattern under a single-site channel."""
    leak = np.zeros((len(_OUT_PAIRS), N_SYMBOLS), dtype=complex)
    for a in ops:
        leak += a[np.ix_(_OROWS, _ROWS)] * a.conj()[np.ix_(_OCOLS, _COLS)]
    return float(np.max(np.abs(leak)))


def _superop_2site(ops) -> np.ndarray:
    """36x36 action of a two-site Kraus set on the pair symbol space."""
    m = np.zeros((N_SYMBOLS**2, N_SYMBOLS**2), dtype=complex)
    for a in ops:
        m += a[np.ix_(_R2, _R2)] * a.conj()[np.ix_(_C2, _C2)]
    return m


def _leakage_2site(ops) -> float:
    leak = np.zeros((len(_OUT2), N_SYMBOLS**2), dtype=complex)
    for a in ops:
        leak += a[np.ix_(_OROWS2, _R2)] * a.conj()[np.ix_(_OCOLS2, _C2)]
    return float(np.max(np.abs(leak)))


class QuquartState:
    """Mutable n-ququart density matrix in the 6^n sparse block form."""

    def __init__(self, n_sites: int, memory_cap: int = DEFAULT_MEMORY_CAP):
        if n_sites < 1:
            raise CapacityError(f"need at least one site, got {n_sites}")
        nbytes = 16 * N_SYMBOLS**n_sites
        if nbytes > memory_cap:
            raise CapacityError(
                f"{n_sites} sites need {nbytes} bytes (6^n complex entries), "
                f"cap is {memory_cap}"
            )
        self.n_sites = n_sites
        self.blocks = np.zeros((N_SYMBOLS,) * n_sites, dtype=complex)
        self.blocks[(0,) * n_sites] = 1.0  # |0...0><0...0|

    # -- bookkeeping -------------------------------------------------------

    def trace(self) -> float:
        t = self.blocks
        for _ in range(self.n_sites):
            t = np.tensordot(_TRACE_VEC, t, axes=([0], [0]))
        return float(t.real)

    def hermiticity_defect(self) -> float:
        h = self.blocks
        for ax in range(self.n_sites):
            h = np.take(h, _HERM_PERM, axis=ax)
        return float(np.max(np.abs(h.conj() - self.blocks)))

    def _check_invariants(self):
        tr = self.trace()
        if abs(tr - 1.0) > TRACE_ATOL:
            raise PatternLeakError(f"trace drifted to {tr}")
        defect = self.hermiticity_defect()
        if defect > HERM_ATOL:
            raise PatternLeakError(f"hermiticity defect {defect}")

    def _check_sites(self, sites):
        if len(set(sites)) != len(sites):
            raise ValidationError(f"site collision: {sites}")
        for s in sites:
            if not 0 <= s < self.n_sites:
                raise ValidationError(f"site {s} out of range for {self.n_sites} sites")

    # -- evolution ---------------------------------------------------------

    def apply_channel(self, sites, channel: KrausSet):
        """In-place rho -> sum_i A_i rho A_i^dag on one or two sites."""
        sites = tuple(sites)
        self._check_sites(sites)
        if channel.n_sites != len(sites):
            raise ValidationError(
                f"{channel.label}: {channel.n_sites}-site channel on sites {sites}"
            )
        ops = channel.operators
        if len(sites) == 1:
            leak = _leakage_1site(ops)
            if leak > LEAK_ATOL:
                raise PatternLeakError(f"{channel.label}: pattern leakage {leak}")
            m = _superop_1site(ops)
            out = np.tensordot(m, self.blocks, axes=([1], [sites[0]]))
            self.blocks = np.moveaxis(out, 0, sites[0])
        else:
            leak = _leakage_2site(ops)
            if leak > LEAK_ATOL:
                raise PatternLeakError(f"{channel.label}: pattern leakage {leak}")
            m = _superop_2site(ops).reshape(
                N_SYMBOLS, N_SYMBOLS, N_SYMBOLS, N_SYMBOLS
            )
            out = np.tensordot(m, self.blocks, axes=([2, 3], list(sites)))
            self.blocks = np.moveaxis(out, [0, 1], list(sites))
        self._check_invariants()
        return self

    def apply_site_unitary(self, site: int, u: np.ndarray):
        """In-place u rho u^dag on one site; u must fix the loss subspace."""
        _validate_site_unitary(u)
        return self.apply_channel((site,), KrausSet((u,), label="unitary"))

    def apply_global_unitary(self, u: np.ndarray):
        """In-place (u tensor ... tensor u) conjugation, one site at a time."""
        _validate_site_unitary(u)
        m = _superop_1site((np.asarray(u, dtype=complex),))
        for s in range(self.n_sites):
            # invariant checks run once at the end, not per site
            out = np.tensordot(m, self.blocks, axes=([1], [s]))
            self.blocks = np.moveaxis(out, 0, s)
        self._check_invariants()
        return self

    # -- readout -----------------------------------------------------------

    def diagonal(self) -> np.ndarray:
        """Diagonal of rho as a (4,)*n real tensor in site-basis order."""
        d = self.blocks
        for ax in range(self.n_sites):
            d = np.take(d, DIAG_SYMBOLS, axis=ax)
        return np.ascontiguousarray(d.real)

    def ququart_distribution(self) -> dict[str, float]:
        """Exact readout populations keyed by space-separated site labels."""
        from .channels import SITE_LABELS

        d = self.diagonal()
        out = {}
        for idx in np.ndindex(d.shape):
            p = float(d[idx])
            if p != 0.0:
                out[" ".join(SITE_LABELS[i] for i in idx)] = p
        return out

    # -- dense views (small n; tests and small-register fidelity) ----------

    def dense_element(self, row, col) -> complex:
        """Element of the full 4^n x 4^n matrix; exact 0 outside the pattern."""
        sym = []
        for r, c in zip(row, col):
            if (r, c) not in _PAIR_SET:
                return 0j
            sym.append(SYMBOL_PAIRS.index((r, c)))
        return complex(self.blocks[tuple(sym)])

    def to_dense(self, max_sites: int = 6) -> np.ndarray:
        """Full 4^n x 4^n density matrix (guarded; test/metrics use only)."""
        n = self.n_sites
        if n > max_sites:
            raise CapacityError(f"dense reconstruction capped at {max_sites} sites")
        # per-site embedding of the 6 symbols into the 16 (row, col) pairs
        e = np.zeros((SITE_DIM * SITE_DIM, N_SYMBOLS))
        for s, (r, c) in enumerate(SYMBOL_PAIRS):
            e[SITE_DIM * r + c, s] = 1.0
        t = self.blocks
        for _ in range(n):
            # contract the leading symbol axis, appending the pair axis last,
            # so after n steps axes are (pair_1, ..., pair_n)
            t = np.tensordot(t, e, axes=([0], [1]))
        t = t.reshape((SITE_DIM, SITE_DIM) * n)
        order = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
        return t.transpose(order).reshape(SITE_DIM**n, SITE_DIM**n)

    def reduced_qubit_density(self, max_sites: int = 6) -> np.ndarray:
        """2^n x 2^n qubit density matrix after the readout reduction.

        Loss populations fold onto the computational diagonal (l0 -> 0,
        l1 -> 1); computational coherences are kept, loss-state coherence
        does not exist in the block pattern.
        """
        n = self.n_sites
        if n > max_sites:
            raise CapacityError(f"qubit reduction capped at {max_sites} sites")
        t_map = np.zeros((4, N_SYMBOLS))
        for s, q in enumerate((0, 1, 2, 3, 0, 3)):  # symbol -> qubit (row, col) pair
            t_map[q, s] = 1.0
        t = self.blocks
        for _ in range(n):
            t = np.tensordot(t, t_map, axes=([0], [1]))
        t = t.reshape((2, 2) * n)
        order = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
        return t.transpose(order).reshape(2**n, 2**n)

    # -- construction helpers ----------------------------------------------

    def set_pure(self, psi: np.ndarray):
        """Load a pure computational state (2^n amplitudes) into the blocks."""
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (2**self.n_sites,):
            raise ValidationError(
                f"need 2^{self.n_sites} amplitudes, got shape {psi.shape}"
            )
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1.0) > 1e-12:
            raise ValidationError(f"state not normalized (|psi| = {nrm})")
        n = self.n_sites
        outer = np.outer(psi, psi.conj()).reshape((2, 2) * n)
        # interleave to (r1, c1, r2, c2, ...) then merge each (2, 2) pair into
        # the symbol axis values 0..3
        order = []
        for i in range(n):
            order += [i, n + i]
        comp = outer.transpose(order).reshape((4,) * n)
        self.blocks = np.zeros((N_SYMBOLS,) * n, dtype=complex)
        self.blocks[(slice(0, 4),) * n] = comp
        self._check_invariants()
        return self


def _validate_site_unitary(u: np.ndarray):
    u = np.asarray(u)
    if u.shape != (SITE_DIM, SITE_DIM):
        raise ValidationError(f"site unitary must be 4x4, got {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(SITE_DIM), atol=UNITARY_ATOL):
        raise ValidationError("matrix is not unitary")
    if (
        np.max(np.abs(u[2:, :2])) > UNITARY_ATOL
        or np.max(np.abs(u[:2, 2:])) > UNITARY_ATOL
        or not np.allclose(u[2:, 2:], np.eye(2), atol=UNITARY_ATOL)
    ):
        raise ValidationError("site unitary must act as identity on the loss subspace")


def init_state(n_sites: int, memory_cap: int = DEFAULT_MEMORY_CAP) -> QuquartState:
    """Fresh |0...0><0...0| register."""
    return QuquartState(n_sites, memory_cap=memory_cap)
