"""Exact diagonalization of a driven 1D Fermi-Hubbard ring.

H = -t0 sum_{j,sigma} (e^{-i Phi} c+_{j,s} c_{j+1,s} + h.c.) + U sum_j n_up n_dn,
periodic, in a fixed (N_up, N_down) sector.  The Peierls phase Phi(t) couples
the ring to the driving field.  Internally hbar = 1 and energies are measured
in units of the hopping t0 (t0 = 1 by default); the physical hopping energy
and lattice constant only enter when converting pump parameters.

Hopping within one spin sector is stored as a dense matrix over that sector's
configurations, so H|psi> reduces to two small matrix products on the state
reshaped as an (n_up_configs x n_down_configs) array.  Fermionic signs use
Jordan-Wigner parity counting, including the boundary bond of the ring.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import DegenerateStateError, NumericError, UntrackableTargetError

log = logging.getLogger(__name__)

K_FLOOR = 1e-12


@dataclass(frozen=True)
class HubbardSpec:
    """One lattice species: ring size, filling, couplings (energies in t0)."""

    L: int
    n_up: int
    n_down: int
    U: float
    t0: float = 1.0
    a: float = 1.0

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("need at least two sites")
        for n in (self.n_up, self.n_down):
            if not 1 <= n <= self.L:
                raise ValueError(f"particle count {n} outside [1, {self.L}]")
        if not self.t0 > 0 or not self.a > 0:
            raise ValueError("t0 and a must be positive")

    def to_dict(self):
        return {k: getattr(self, k) for k in ("L", "n_up", "n_down", "U", "t0", "a")}

    @classmethod
    def from_dict(cls, d):
        return cls(L=int(d["L"]), n_up=int(d["n_up"]), n_down=int(d["n_down"]),
                   U=float(d["U"]), t0=float(d["t0"]), a=float(d["a"]))


def _sector_configs(L, n):
    """All L-site bitmasks with n particles, ascending (lexicographic) order."""
    masks = []
    for occ in combinations(range(L), n):
        m = 0
        for site in occ:
            m |= 1 << site
        masks.append(m)
    masks.sort()
    return masks


def _hop_matrix(L, configs):
    """Dense matrix of sum_j c+_j c_{j+1} (j+1 mod L) within one spin sector."""
    index = {m: i for i, m in enumerate(configs)}
    n = len(configs)
    A = np.zeros((n, n))
    for i, m in enumerate(configs):
        for j in range(L):
            jp = (j + 1) % L
            if not (m >> jp) & 1 or (m >> j) & 1:
                continue
            # annihilate at jp, create at j, with JW parity signs
            sign = 1 - 2 * (bin(m & ((1 << jp) - 1)).count("1") & 1)
            m1 = m ^ (1 << jp)
            sign *= 1 - 2 * (bin(m1 & ((1 << j) - 1)).count("1") & 1)
            m2 = m1 | (1 << j)
            A[index[m2], i] += sign
    return A


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Fixed-number Fock basis with precomputed sector hop and occupancy data."""

    L: int
    n_up: int
    n_down: int
    up_configs: list
    down_configs: list
    hop_up: np.ndarray = field(repr=False)
    hop_down: np.ndarray = field(repr=False)
    double_occ: np.ndarray = field(repr=False)   # (n_up_cfg, n_dn_cfg) counts

    @property
    def dim(self):
        return len(self.up_configs) * len(self.down_configs)

    @property
    def shape(self):
        return (len(self.up_configs), len(self.down_configs))


def build_basis(L, n_up, n_down):
    """Enumerate the (n_up, n_down) sector of an L-site ring."""
    spec_check = HubbardSpec(L=L, n_up=n_up, n_down=n_down, U=0.0)
    del spec_check
    up = _sector_configs(L, n_up)
    dn = _sector_configs(L, n_down)
    docc = np.empty((len(up), len(dn)))
    for i, u in enumerate(up):
        for j, d in enumerate(dn):
            docc[i, j] = bin(u & d).count("1")
    return FockBasis(L=L, n_up=n_up, n_down=n_down, up_configs=up,
                     down_configs=dn, hop_up=_hop_matrix(L, up),
                     hop_down=_hop_matrix(L, dn), double_occ=docc)


def _hop_apply(basis, psi_mat):
    """(sum_{j,sigma} c+_j c_{j+1}) |psi> on the reshaped state."""
    return basis.hop_up @ psi_mat + psi_mat @ basis.hop_down.T


def _hop_apply_dag(basis, psi_mat):
    return basis.hop_up.T @ psi_mat + psi_mat @ basis.hop_down


def apply_hamiltonian(spec, basis, phi, psi):
    """H(Phi) |psi> in the fixed-number sector."""
    psi = np.asarray(psi)
    if psi.shape != (basis.dim,):
        raise ValueError(f"state dim {psi.shape} does not match basis dim {basis.dim}")
    m = psi.reshape(basis.shape)
    hop = _hop_apply(basis, m)
    hop_dag = _hop_apply_dag(basis, m)
    out = (-spec.t0) * (np.exp(-1j * phi) * hop + np.exp(1j * phi) * hop_dag)
    out = out + spec.U * basis.double_occ * m
    return out.reshape(basis.dim)


def ground_state(spec, basis, tol=0.0):
    """Lowest eigenpair of H(Phi=0); deterministic start vector and sign."""
    dim = basis.dim

    def mv(x):
        m = x.reshape(basis.shape)
        out = (-spec.t0) * (_hop_apply(basis, m) + _hop_apply_dag(basis, m))
        out = out + spec.U * basis.double_occ * m
        return out.reshape(dim)

    if dim <= 600:
        H = np.zeros((dim, dim))
        eye = np.eye(dim)
        for i in range(dim):
            H[:, i] = mv(eye[:, i])
        w, v = np.linalg.eigh(H)
        psi, energy = v[:, 0], float(w[0])
    else:
        op = LinearOperator((dim, dim), matvec=mv, dtype=float)
        v0 = np.full(dim, 1.0 / math.sqrt(dim))
        try:
            w, v = eigsh(op, k=1, which="SA", v0=v0, maxiter=5000)
        except Exception as exc:
            raise NumericError(f"ground-state eigensolver failed: {exc}") from exc
        psi, energy = v[:, 0], float(w[0])
    psi = psi.astype(complex) / np.linalg.norm(psi)
    i = int(np.argmax(np.abs(psi)))
    if psi[i].real < 0:
        psi = -psi
    return psi, energy


@dataclass(frozen=True)
class NeighborExpectation:
    """Polar form K e^{i theta} of the summed nearest-neighbor expectation."""

    K: float
    theta: float
    degenerate: bool = False


def neighbor_expectation(basis, psi):
    """Polar decomposition of <sum_{j,sigma} c+_j c_{j+1}>."""
    m = np.asarray(psi).reshape(basis.shape)
    z = complex(np.vdot(m, _hop_apply(basis, m)))
    K = abs(z)
    if K < K_FLOOR:
        return NeighborExpectation(K=K, theta=0.0, degenerate=True)
    return NeighborExpectation(K=K, theta=float(np.angle(z)))


def current_response(spec, basis, psi, phi):
    """Current expectation <R> = -2 a t0 K sin(Phi - theta), via the operator form."""
    m = np.asarray(psi).reshape(basis.shape)
    z = complex(np.vdot(m, _hop_apply(basis, m)))
    return 2.0 * spec.a * spec.t0 * float(np.imag(np.exp(-1j * phi) * z))


def tracking_phase(neighbor, R_T, a, t0, species=None, step=None):
    """Peierls phase that makes the current equal R_T (principal arcsin branch)."""
    if neighbor.degenerate:
        raise DegenerateStateError(
            f"neighbor expectation magnitude {neighbor.K:.3e} below floor {K_FLOOR:.0e}",
            species=species, step=step)
    X = R_T / (2.0 * a * t0 * neighbor.K)
    if abs(X) > 1.0:
        raise UntrackableTargetError(
            f"target response needs |X| = {abs(X):.3f} > 1", species=species, step=step)
    return float(np.arcsin(-X) + neighbor.theta)


def lanczos_expm_apply(matvec, psi, dt, tol=1e-10, m_max=30):
    """psi -> exp(-i dt H) psi via an adaptive Lanczos (Krylov) subspace."""
    beta0 = np.linalg.norm(psi)
    if beta0 == 0.0:
        return psi.copy()
    V = [psi / beta0]
    alphas, betas = [], []
    w = matvec(V[0])
    a0 = float(np.real(np.vdot(V[0], w)))
    alphas.append(a0)
    w = w - a0 * V[0]
    for m in range(1, m_max + 1):
        b = np.linalg.norm(w)
        # converged subspace (or happy breakdown): exponentiate what we have
        if b < 1e-14:
            break
        betas.append(float(b))
        V.append(w / b)
        w = matvec(V[-1]) - b * V[-2]
        a = float(np.real(np.vdot(V[-1], w)))
        alphas.append(a)
        w = w - a * V[-1]
        # error heuristic: weight of the newest basis vector in the result
        ew, evec = eigh_tridiagonal(np.array(alphas), np.array(betas))
        coeff = evec @ (np.exp(-1j * dt * ew) * evec[0, :])
        if abs(coeff[-1]) < tol:
            break
    else:
        raise NumericError(
            f"Lanczos propagation did not converge within {m_max} iterations")
    ew, evec = eigh_tridiagonal(np.array(alphas), np.array(betas))
    coeff = evec @ (np.exp(-1j * dt * ew) * evec[0, :])
    out = np.zeros_like(V[0])
    for c, v in zip(coeff, V):
        out += c * v
    return beta0 * out


def propagate_driven_step(spec, basis, psi, phi, dt, tol=1e-10):
    """Advance one step under H(Phi) with the phase frozen over the step."""
    return lanczos_expm_apply(lambda x: apply_hamiltonian(spec, basis, phi, x),
                              np.asarray(psi, dtype=complex), dt, tol=tol)


def propagate_tracking_step(spec, basis, psi, R_T, dt, tol=1e-10,
                            species=None, step=None):
    """Advance one step under the tracking Hamiltonian; returns (psi', Phi_T).

    The hopping amplitude is P e^{-i theta} with
    P = -t0 (sqrt(1 - X^2) + i X), built from the current (K, theta); the
    emitted phase Phi_T = arcsin(-X) + theta reproduces the same dynamics
    through the plainly driven Hamiltonian.
    """
    psi = np.asarray(psi, dtype=complex)
    nb = neighbor_expectation(basis, psi)
    phi_T = tracking_phase(nb, R_T, spec.a, spec.t0, species=species, step=step)
    X = R_T / (2.0 * spec.a * spec.t0 * nb.K)
    P = -spec.t0 * (math.sqrt(max(0.0, 1.0 - X * X)) + 1j * X)
    cf = P * np.exp(-1j * nb.theta)

    def mv(x):
        m = x.reshape(basis.shape)
        out = cf * _hop_apply(basis, m) + np.conj(cf) * _hop_apply_dag(basis, m)
        out = out + spec.U * basis.double_occ * m
        return out.reshape(basis.dim)

    return lanczos_expm_apply(mv, psi, dt, tol=tol), phi_T


class HubbardEnsemble:
    """A family of independently propagating Hubbard species under one phase."""

    family = "hubbard"

    def __init__(self, specs, dt, labels=None, tol=1e-10):
        self.specs = list(specs)
        self.dt = float(dt)
        self.tol = tol
        self.labels = (list(labels) if labels is not None
                       else [f"species-{i}" for i in range(len(self.specs))])
        self.bases = {}
        for s in self.specs:
            key = (s.L, s.n_up, s.n_down)
            if key not in self.bases:
                self.bases[key] = build_basis(*key)
        self.states = [ground_state(s, self.basis_of(s))[0] for s in self.specs]
        self.step_count = 0

    def basis_of(self, spec):
        return self.bases[(spec.L, spec.n_up, spec.n_down)]

    def __len__(self):
        return len(self.specs)

    def spec_dicts(self):
        return [s.to_dict() for s in self.specs]

    def get_states(self):
        return [psi.copy() for psi in self.states]

    def set_states(self, states):
        if len(states) != len(self.specs):
            raise ValueError("state count does not match species count")
        self.states = [np.asarray(psi, dtype=complex).copy() for psi in states]

    def effective_fields(self, samples):
        """Phase samples are applied as-is (frozen over each step)."""
        return np.asarray(samples, dtype=float).copy()

    def responses(self, phi):
        return np.array([current_response(s, self.basis_of(s), psi, phi)
                         for s, psi in zip(self.specs, self.states)])

    def _advance_all(self, phi, skip=None):
        for i, s in enumerate(self.specs):
            if i == skip:
                continue
            self.states[i] = propagate_driven_step(s, self.basis_of(s),
                                                   self.states[i], phi,
                                                   self.dt, tol=self.tol)
        self.step_count += len(self.specs) - (1 if skip is not None else 0)

    def run_driven_segment(self, samples, applied):
        samples = np.asarray(samples, dtype=float)
        n_t = samples.size
        resp = np.empty((len(self.specs), n_t))
        for k in range(n_t):
            for i, s in enumerate(self.specs):
                resp[i, k] = current_response(s, self.basis_of(s),
                                              self.states[i], samples[k])
            self._advance_all(samples[k])
        return resp

    def run_tracked_segment(self, tracked, n_t):
        spec = self.specs[tracked]
        basis = self.basis_of(spec)
        label = self.labels[tracked]
        samples = np.empty(n_t)
        resp = np.empty((len(self.specs), n_t))
        prev_phi = None
        for k in range(n_t):
            new_state, phi_k = propagate_tracking_step(
                spec, basis, self.states[tracked], 0.0, self.dt,
                tol=self.tol, species=label, step=k)
            samples[k] = phi_k
            if prev_phi is not None and abs(phi_k - prev_phi) > np.pi:
                log.info("tracking phase branch jump at step %d for %s "
                         "(%.3f -> %.3f)", k, label, prev_phi, phi_k)
            prev_phi = phi_k
            for i, s in enumerate(self.specs):
                resp[i, k] = current_response(s, self.basis_of(s),
                                              self.states[i], phi_k)
            self._advance_all(phi_k, skip=tracked)
            self.states[tracked] = new_state
            self.step_count += 1
        return samples, samples.copy(), resp
