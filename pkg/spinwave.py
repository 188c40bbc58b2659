"""
Confined spin-wave modes of the nanostripe along z.

The linearized circular-precession model reduces to the 1D problem

    -d_ex * psi'' + v(z) * psi = b * psi,    v(z) = b0 + B_z(0, z)

on [-w_z/2, w_z/2]. The production solver is a transfer-matrix shooting method on
the piecewise-constant (per grid cell) potential; a cell-centered finite-difference
discretization is kept as an oracle. Symmetric potentials are solved in parity-split
halves, which resolves edge-mode pairs whose splitting is below double precision.

Eigenvalues are in tesla. 3D lines add the exchange cost d_ex*(n_x*pi/t_x)^2 and are
converted to resonance fields at fixed frequency.
"""
from dataclasses import dataclass
from enum import Enum
import math
import time
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import linalg

from config import settings
from errors import DomainError, NumericError, ResolutionError
from logging_config import get_logger, log_computation, log_numeric_event
from magnetostatics import stray_bz
from units import MaterialParams, StripeGeometry, field_from_frequency

logger = get_logger(__name__)

MIN_GRID = 801


class BoundaryCondition(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


# ============================================================================
# Potential
# ============================================================================

@dataclass(frozen=True)
class PotentialSource:
    """What a potential was built from, so it can be rebuilt on another grid"""
    geom: StripeGeometry
    mat: MaterialParams
    b0: float


@dataclass(frozen=True, eq=False)
class PotentialProfile:
    """Cell-centered samples of v(z) (T) on a grid of n cells spanning `width` (m)"""
    z_grid: np.ndarray
    v: np.ndarray
    d_ex: float
    width: float
    bc: BoundaryCondition = BoundaryCondition.DIRICHLET
    b0: float = 0.0
    source: Optional[PotentialSource] = None

    @property
    def n(self) -> int:
        return len(self.v)

    @property
    def h(self) -> float:
        return self.width / self.n

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.v, self.v[::-1]))

    def resampled(self, n_grid: int) -> "PotentialProfile":
        """Same potential on another grid; used by Richardson extrapolation"""
        if self.source is not None:
            return build_potential(self.source.geom, self.source.mat, self.source.b0, n_grid, self.bc)
        if np.ptp(self.v) == 0.0:
            return constant_potential(float(self.v[0]), self.d_ex, self.width, n_grid, self.bc)
        raise DomainError("Potential has no source to rebuild it on another grid")


def stripe_nodes(n: int, width: float) -> np.ndarray:
    h = width / n
    left = -0.5 * width + (np.arange(n // 2) + 0.5) * h
    center = [0.0] if n % 2 else []
    return np.concatenate([left, center, -left[::-1]])


def _mirror(left_and_center: np.ndarray, n: int, sign: float = 1.0) -> np.ndarray:
    left = left_and_center[: n // 2]
    center = left_and_center[n // 2: n // 2 + 1] if n % 2 else left_and_center[:0]
    return np.concatenate([left, center, sign * left[::-1]])


def build_potential(geom: StripeGeometry, mat: MaterialParams, b0: float = 0.0,
                    n_grid: int = None, bc: BoundaryCondition = BoundaryCondition.DIRICHLET) -> PotentialProfile:
    """
    v(z_i) = b0 + B_z(0, z_i) at the n_grid cell centers; exactly mirror-symmetric.

    Raises:
        DomainError: n_grid below 801
    """
    n = n_grid or settings.default_n_grid
    if n < MIN_GRID:
        raise DomainError(f"n_grid must be >= {MIN_GRID}, got {n}")
    z = stripe_nodes(n, geom.w_z)
    half = (n + 1) // 2
    stray = stray_bz(geom, mat, 0.0, z[:half])
    v = b0 + _mirror(np.asarray(stray), n)
    return PotentialProfile(
        z_grid=z, v=v, d_ex=mat.d_ex, width=geom.w_z, bc=BoundaryCondition(bc), b0=b0,
        source=PotentialSource(geom=geom, mat=mat, b0=b0),
    )


def constant_potential(v0: float, d_ex: float, width: float, n_grid: int,
                       bc: BoundaryCondition = BoundaryCondition.DIRICHLET) -> PotentialProfile:
    """Flat box potential, closed-form spectrum v0 + d_ex*((n+1)*pi/width)^2 for Dirichlet walls"""
    if n_grid < 3:
        raise DomainError(f"n_grid must be >= 3, got {n_grid}")
    if not (d_ex > 0 and width > 0):
        raise DomainError("d_ex and width must be positive")
    return PotentialProfile(
        z_grid=stripe_nodes(n_grid, width), v=np.full(n_grid, float(v0)),
        d_ex=d_ex, width=width, bc=BoundaryCondition(bc), b0=float(v0),
    )


# ============================================================================
# Results
# ============================================================================

@dataclass(frozen=True, eq=False)
class ModeSolution:
    """One 1D mode: n_z nodes, eigenvalue b_n (T), psi with sum(psi^2)*h = 1 (1/sqrt(m))"""
    n_z: int
    b_n: float
    psi: np.ndarray
    edge_weight: float
    parity: int = 0  # +1 even, -1 odd, 0 for asymmetric potentials
    node_count: int = 0


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """Ordered modes of one potential plus completeness bookkeeping"""
    modes: tuple
    requested: int
    method: str
    z_grid: np.ndarray
    h: float
    b0: float = 0.0
    complete: bool = True

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, index):
        return self.modes[index]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([m.b_n for m in self.modes])

    def overlap_matrix(self) -> np.ndarray:
        psi = np.array([m.psi for m in self.modes])
        return self.h * psi @ psi.T


@dataclass(frozen=True)
class SpinWaveLine:
    """3D spin-wave mode (n_z, n_x) at k_y = 0 and its resonance field at the drive frequency"""
    n_z: int
    n_x: int
    b_total: float
    b_res: float
    edge_weight: float = 0.0
    parity: int = 0


class FieldGap(NamedTuple):
    upper: float
    lower: float
    separation: float


# ============================================================================
# Shared helpers
# ============================================================================

@dataclass(frozen=True)
class _Chain:
    """1D sub-problem: potential per segment, segment lengths, end conditions"""
    v: np.ndarray
    lengths: np.ndarray
    left: BoundaryCondition
    right: BoundaryCondition
    parity: int


def _chains(pot: PotentialProfile) -> list:
    """Half-cell chains; parity-split halves for symmetric potentials"""
    v2 = np.repeat(pot.v, 2)
    lengths = np.full(2 * pot.n, 0.5 * pot.h)
    if pot.is_symmetric:
        n = pot.n
        return [
            _Chain(v2[:n], lengths[:n], pot.bc, BoundaryCondition.NEUMANN, +1),
            _Chain(v2[:n], lengths[:n], pot.bc, BoundaryCondition.DIRICHLET, -1),
        ]
    return [_Chain(v2, lengths, pot.bc, pot.bc, 0)]


def _full_index(parity: int, k: int) -> int:
    if parity == 0:
        return k
    return 2 * k if parity > 0 else 2 * k + 1


def _chain_quota(parity: int, n_max: int) -> int:
    if parity == 0:
        return n_max
    return (n_max + 1) // 2 if parity > 0 else n_max // 2


def _count_sign_changes(psi: np.ndarray) -> int:
    threshold = 1e-9 * np.max(np.abs(psi))
    signs = np.sign(psi[np.abs(psi) > threshold])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _edge_weight(z: np.ndarray, psi: np.ndarray, h: float, width: float) -> float:
    near_edge = (0.5 * width - np.abs(z)) <= settings.edge_window_m
    return float(min(1.0, h * np.sum(psi[near_edge] ** 2)))


def _fix_sign(psi: np.ndarray) -> np.ndarray:
    first = np.flatnonzero(np.abs(psi) > 1e-3 * np.max(np.abs(psi)))[0]
    return psi if psi[first] > 0 else -psi


def _make_modes(pot: PotentialProfile, entries: list) -> list:
    """entries: (n_z, b, psi, parity) -> normalized, ordered ModeSolution list"""
    modes = []
    for n_z, b, psi, parity in sorted(entries, key=lambda e: e[0]):
        psi = psi / math.sqrt(pot.h * float(np.dot(psi, psi)))
        psi = _fix_sign(psi)
        modes.append(ModeSolution(
            n_z=n_z, b_n=float(b), psi=psi,
            edge_weight=_edge_weight(pot.z_grid, psi, pot.h, pot.width),
            parity=parity, node_count=_count_sign_changes(psi),
        ))
    return modes


def _contiguous(entries: list, n_max: int) -> list:
    by_index = {e[0]: e for e in entries}
    out = []
    for n_z in range(n_max):
        if n_z not in by_index:
            break
        out.append(by_index[n_z])
    return out


def _scan_upper(pot: PotentialProfile, n_max: int) -> float:
    return float(np.max(pot.v)) + pot.d_ex * ((n_max + 1.5) * math.pi / pot.width) ** 2


# ============================================================================
# Transfer matrix
# ============================================================================

def _cell_coefficients(b, vj: float, length: float, d: float):
    """Entries of the (psi, psi') propagator over one constant-potential segment"""
    e = (b - vj) / d
    k = np.sqrt(np.abs(e))
    x = k * length
    osc = e > 0
    c = np.where(osc, np.cos(x), np.cosh(x))
    with np.errstate(divide="ignore", invalid="ignore"):
        s_over_k = np.where(osc, np.sin(x), np.sinh(x)) / k
    s_over_k = np.where(k > 0, s_over_k, length)
    k_s = np.where(osc, -k * np.sin(x), k * np.sinh(x))
    return c, s_over_k, k_s


def _start_state(bc: BoundaryCondition, shape) -> tuple:
    if bc is BoundaryCondition.DIRICHLET:
        return np.zeros(shape), np.ones(shape)
    return np.ones(shape), np.zeros(shape)


def _prufer_end_angle(chain: _Chain, b: np.ndarray, d: float, ell: float) -> np.ndarray:
    """Continuous Pruefer angle atan2(psi, ell*psi') at the right end, vectorized over b"""
    p, q = _start_state(chain.left, b.shape)
    raw = np.arctan2(p, q)
    theta = raw.copy()
    for vj, length in zip(chain.v, chain.lengths):
        c, s_over_k, k_s = _cell_coefficients(b, vj, length, d)
        p, q = c * p + (s_over_k / ell) * q, ell * k_s * p + c * q
        new_raw = np.arctan2(p, q)
        theta += np.mod(new_raw - raw + np.pi, 2.0 * np.pi) - np.pi
        raw = new_raw
        norm = np.maximum(np.abs(p), np.abs(q))
        p = p / norm
        q = q / norm
    return theta


def _angle_count(chain: _Chain, theta: np.ndarray) -> np.ndarray:
    """Number of sub-problem eigenvalues below each scanned b"""
    if chain.right is BoundaryCondition.DIRICHLET:
        counts = np.floor(theta / np.pi)
    else:
        counts = np.floor(theta / np.pi + 0.5)
    return np.maximum(counts, 0).astype(int)


def _angle_target(chain: _Chain, k: np.ndarray) -> np.ndarray:
    if chain.right is BoundaryCondition.DIRICHLET:
        return (k + 1.0) * np.pi
    return (k + 0.5) * np.pi


def _refine(chain: _Chain, lo: np.ndarray, hi: np.ndarray, k: np.ndarray, d: float, ell: float) -> np.ndarray:
    """Bracketed Illinois iteration on theta(b) - target, all modes of a chain at once"""
    tol = settings.bisection_tol_T
    target = _angle_target(chain, k)
    f_lo = _prufer_end_angle(chain, lo, d, ell) - target
    f_hi = _prufer_end_angle(chain, hi, d, ell) - target
    last = np.zeros(lo.shape, dtype=int)
    for iteration in range(400):
        if np.all(hi - lo <= tol):
            return 0.5 * (lo + hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        bad = ~np.isfinite(x) | (x <= lo) | (x >= hi) | (iteration % 4 == 3)
        x = np.where(bad, 0.5 * (lo + hi), x)
        fx = _prufer_end_angle(chain, x, d, ell) - target
        active = hi - lo > tol
        move_lo = active & (fx <= 0)
        move_hi = active & (fx > 0)
        f_hi = np.where(move_lo & (last == 1), 0.5 * f_hi, f_hi)
        f_lo = np.where(move_hi & (last == -1), 0.5 * f_lo, f_lo)
        lo = np.where(move_lo, x, lo)
        f_lo = np.where(move_lo, fx, f_lo)
        hi = np.where(move_hi, x, hi)
        f_hi = np.where(move_hi, fx, f_hi)
        last = np.where(move_lo, 1, np.where(move_hi, -1, last))
        # zero residual: collapse the bracket
        exact = active & (fx == 0)
        lo = np.where(exact, x, lo)
        hi = np.where(exact, x, hi)
    raise NumericError("Transfer-matrix eigenvalue refinement did not converge")


def _propagate_states(chain: _Chain, b: float, d: float, ell: float, backward: bool):
    """(p, q, log_scale) at every segment boundary, from the left or from the right end"""
    n = len(chain.v)
    p_out = np.empty(n + 1)
    q_out = np.empty(n + 1)
    log_out = np.empty(n + 1)
    start = chain.right if backward else chain.left
    p, q = (0.0, 1.0) if start is BoundaryCondition.DIRICHLET else (1.0, 0.0)
    log_scale = 0.0
    order = range(n - 1, -1, -1) if backward else range(n)
    index = n if backward else 0
    p_out[index], q_out[index], log_out[index] = p, q, log_scale
    for j in order:
        length = -chain.lengths[j] if backward else chain.lengths[j]
        e = (b - chain.v[j]) / d
        k = math.sqrt(abs(e))
        x = k * length
        if e > 0:
            c, s_over_k, k_s = math.cos(x), math.sin(x) / k, -k * math.sin(x)
        elif k > 0:
            c, s_over_k, k_s = math.cosh(x), math.sinh(x) / k, k * math.sinh(x)
        else:
            c, s_over_k, k_s = 1.0, length, 0.0
        p, q = c * p + (s_over_k / ell) * q, ell * k_s * p + c * q
        norm = max(abs(p), abs(q))
        p, q = p / norm, q / norm
        log_scale += math.log(norm)
        index = j if backward else j + 1
        p_out[index], q_out[index], log_out[index] = p, q, log_scale
    return p_out, q_out, log_out


def _chain_profile(chain: _Chain, b: float, d: float, ell: float) -> np.ndarray:
    """
    psi at the cell centers covered by the chain (odd segment boundaries).

    Forward from the left end and backward from the right end, joined at the deepest
    point of the potential so neither side integrates into a growing solution.
    """
    n = len(chain.v)
    pf, qf, lf = _propagate_states(chain, b, d, ell, backward=False)
    pb, qb, lb = _propagate_states(chain, b, d, ell, backward=True)
    m = int(min(max(np.argmin(chain.v), 1), n - 1))
    denom = pb[m] ** 2 + qb[m] ** 2
    ratio = (pf[m] * pb[m] + qf[m] * qb[m]) / denom
    if ratio == 0.0:
        raise NumericError(f"Degenerate profile match at b={b:.12e} T")
    log_amp = np.where(np.arange(n + 1) <= m, lf, lb + lf[m] - lb[m] + math.log(abs(ratio)))
    values = np.where(np.arange(n + 1) <= m, pf, math.copysign(1.0, ratio) * pb)
    log_amp = log_amp - np.max(log_amp)
    psi_boundaries = values * np.exp(log_amp)
    return psi_boundaries[1::2]


def _assemble_profile(pot: PotentialProfile, chain: _Chain, half_profile: np.ndarray) -> np.ndarray:
    if chain.parity == 0:
        return half_profile
    return _mirror(half_profile, pot.n, float(chain.parity))


def _orthonormalize(psi: np.ndarray, h: float) -> np.ndarray:
    """Loewdin orthonormalization in the sampled inner product sum(psi_m*psi_n)*h"""
    psi = psi / np.sqrt(h * np.sum(psi ** 2, axis=1))[:, None]
    overlap = h * psi @ psi.T
    w, u = linalg.eigh(overlap)
    if np.min(w) < 0.5:
        raise NumericError(f"Mode profiles are nearly linearly dependent (min overlap eigenvalue {np.min(w):.3e})")
    return (u @ np.diag(w ** -0.5) @ u.T) @ psi


def tm_eigensolve(pot: PotentialProfile, n_max: int) -> ModeSpectrum:
    """
    Lowest n_max modes by transfer-matrix shooting.

    Eigenvalues are bracketed on a scan of (max v - min v)/scan_steps spacing that
    extends above max v far enough to hold n_max box-like states; the Pruefer angle
    at the far end counts eigenvalues below each scan point, so a missed root shows
    up as a count jump of two. Brackets are refined to bisection_tol_T.

    Returns:
        ModeSpectrum with complete=False when fewer than n_max modes were found

    Raises:
        DomainError: n_max < 1
        ResolutionError: grid or scan too coarse to separate the eigenvalues
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    start = time.perf_counter()
    d = pot.d_ex
    v_min = float(np.min(pot.v))
    v_max = float(np.max(pot.v))
    hi = _scan_upper(pot, n_max)
    ell = math.sqrt(d / (hi - v_min))

    k_top = math.sqrt((hi - v_min) / d)
    if k_top * 0.5 * pot.h >= 0.5 * math.pi:
        raise ResolutionError(
            f"Grid spacing {pot.h:.3e} m too coarse for modes up to {hi:.4e} T"
        )

    span = v_max - v_min
    steps = settings.scan_steps
    if span > 0:
        steps = min(max(steps, int(math.ceil(steps * (hi - v_min) / span))), 50 * settings.scan_steps)
    b_scan = np.linspace(v_min, hi, steps + 1)

    entries = []
    for chain in _chains(pot):
        quota = _chain_quota(chain.parity, n_max)
        if quota == 0:
            continue
        counts = _angle_count(chain, _prufer_end_angle(chain, b_scan, d, ell))
        jumps = np.diff(counts)
        if counts[0] > 0 or np.any(jumps > 1) or np.any(jumps < 0):
            bad = int(np.argmax(jumps > 1)) if np.any(jumps > 1) else 0
            raise ResolutionError(
                f"Eigenvalue scan missed a root near b={b_scan[bad]:.6e} T "
                f"(count {counts[bad]} -> {counts[min(bad + 1, steps)]})"
            )
        found = min(quota, int(counts[-1]))
        if found == 0:
            continue
        k = np.arange(found)
        upper_idx = np.searchsorted(counts, k + 1, side="left")
        lo = b_scan[upper_idx - 1]
        hi_b = b_scan[upper_idx]
        eigenvalues = _refine(chain, lo, hi_b, k, d, ell)
        for kk, b in zip(k, eigenvalues):
            half_profile = _chain_profile(chain, float(b), d, ell)
            psi = _assemble_profile(pot, chain, half_profile)
            entries.append((_full_index(chain.parity, int(kk)), float(b), psi, chain.parity))

    entries = _contiguous(entries, n_max)
    if entries:
        psi = _orthonormalize(np.array([e[2] for e in entries]), pot.h)
        entries = [(e[0], e[1], psi[i], e[3]) for i, e in enumerate(entries)]
    modes = _make_modes(pot, entries)
    complete = len(modes) == n_max
    if not complete:
        log_numeric_event(logger, "INCOMPLETE_SPECTRUM", f"requested {n_max} modes, found {len(modes)}")

    log_computation(logger, "tm_eigensolve", (time.perf_counter() - start) * 1000.0,
                    n_grid=pot.n, modes=len(modes), bc=pot.bc.value)
    return ModeSpectrum(modes=tuple(modes), requested=n_max, method="transfer-matrix",
                        z_grid=pot.z_grid, h=pot.h, b0=pot.b0, complete=complete)


# ============================================================================
# Finite differences
# ============================================================================

def _fd_levels(pot: PotentialProfile, n_max: int):
    """Tridiagonal eigenpairs, parity-split when the potential is symmetric"""
    d = pot.d_ex
    t = d / pot.h ** 2
    n = pot.n
    wall = t if pot.bc is BoundaryCondition.DIRICHLET else -t
    entries = []

    if not pot.is_symmetric:
        diag = pot.v + 2.0 * t
        diag[0] += wall
        diag[-1] += wall
        count = min(n_max, n)
        w, vec = linalg.eigh_tridiagonal(diag, np.full(n - 1, -t), select="i", select_range=(0, count - 1))
        for i in range(count):
            entries.append((i, w[i], vec[:, i], 0))
        return entries

    half = n // 2
    for parity in (+1, -1):
        quota = _chain_quota(parity, n_max)
        if quota == 0:
            continue
        if n % 2 == 0:
            diag = pot.v[:half] + 2.0 * t
            off = np.full(half - 1, -t)
            diag[-1] += -t if parity > 0 else t
        elif parity > 0:
            diag = pot.v[:half + 1] + 2.0 * t
            off = np.full(half, -t)
            # center node carries psi_c/sqrt(2) to keep the reflected stencil symmetric
            off[-1] = -math.sqrt(2.0) * t
        else:
            diag = pot.v[:half] + 2.0 * t
            off = np.full(half - 1, -t)
        diag[0] += wall
        count = min(quota, len(diag))
        w, vec = linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
        for i in range(count):
            half_vec = vec[:, i].copy()
            if n % 2 == 1:
                if parity > 0:
                    half_vec[-1] *= math.sqrt(2.0)
                else:
                    half_vec = np.append(half_vec, 0.0)
            entries.append((_full_index(parity, i), w[i], _mirror(half_vec, n, float(parity)), parity))
    return entries


def fd_eigensolve(pot: PotentialProfile, n_max: int, extrapolate: bool = False) -> ModeSpectrum:
    """
    Lowest n_max modes of the 3-point cell-centered finite-difference operator.

    With extrapolate=True the eigenvalues are Richardson-extrapolated from the grid
    and its 2x refinement, (4*b(2N) - b(N))/3; profiles stay on the original grid.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    start = time.perf_counter()
    entries = _contiguous(_fd_levels(pot, n_max), n_max)

    method = "finite-difference"
    if extrapolate and entries:
        fine = _contiguous(_fd_levels(pot.resampled(2 * pot.n), n_max), n_max)
        fine_b = {e[0]: e[1] for e in fine}
        entries = [
            (e[0], (4.0 * fine_b[e[0]] - e[1]) / 3.0, e[2], e[3])
            for e in entries if e[0] in fine_b
        ]
        method = "finite-difference+richardson"

    modes = _make_modes(pot, entries)
    complete = len(modes) == n_max
    if not complete:
        log_numeric_event(logger, "INCOMPLETE_SPECTRUM", f"requested {n_max} modes, found {len(modes)}")
    log_computation(logger, "fd_eigensolve", (time.perf_counter() - start) * 1000.0,
                    n_grid=pot.n, modes=len(modes), extrapolate=extrapolate)
    return ModeSpectrum(modes=tuple(modes), requested=n_max, method=method,
                        z_grid=pot.z_grid, h=pot.h, b0=pot.b0, complete=complete)


def sturm_count(pot: PotentialProfile, b: float) -> int:
    """Number of finite-difference eigenvalues below b (Sturm sequence of T - b*I)"""
    t = pot.d_ex / pot.h ** 2
    wall = t if pot.bc is BoundaryCondition.DIRICHLET else -t
    diag = pot.v + 2.0 * t
    diag[0] += wall
    diag[-1] += wall
    tiny = np.finfo(float).tiny
    count = 0
    pivot = 1.0
    for i, dii in enumerate(diag):
        pivot = (dii - b) - (t * t / pivot if i > 0 else 0.0)
        if pivot == 0.0:
            pivot = -tiny
        if pivot < 0:
            count += 1
    return count


# ============================================================================
# 3D lines
# ============================================================================

def assemble_lines(modes: Iterable[ModeSolution], geom: StripeGeometry, mat: MaterialParams,
                   nu: float, n_x_max: int) -> list:
    """
    Resonance fields b_res = h*nu/(g_fm*mu_B) - b_n - d_ex*(n_x*pi/t_x)^2, k_y = 0.

    Lines with b_res <= 0 are dropped. Modes must be solved at b0 = 0.
    """
    if n_x_max < 1:
        raise DomainError(f"n_x_max must be >= 1, got {n_x_max}")
    if isinstance(modes, ModeSpectrum) and modes.b0 != 0.0:
        raise DomainError(f"Modes must be computed at b0 = 0, got b0 = {modes.b0:.6e} T")
    b_photon = field_from_frequency(nu, mat.g_fm)
    lines = []
    for mode in modes:
        for n_x in range(1, n_x_max + 1):
            b_total = mode.b_n + mat.d_ex * (n_x * math.pi / geom.t_x) ** 2
            b_res = b_photon - b_total
            if b_res <= 0:
                continue
            lines.append(SpinWaveLine(
                n_z=mode.n_z, n_x=n_x, b_total=b_total, b_res=b_res,
                edge_weight=mode.edge_weight, parity=mode.parity,
            ))
    return lines


def highest_gap(lines: Sequence[SpinWaveLine], merge_tol: float = 1e-4) -> FieldGap:
    """
    Two highest distinct resonance fields and their separation.

    Lines closer than merge_tol (T) are one field-sweep line (parity partners of an
    edge-mode pair coincide to far below any linewidth).
    """
    fields = sorted((line.b_res for line in lines), reverse=True)
    distinct = []
    for b in fields:
        if not distinct or distinct[-1] - b > merge_tol:
            distinct.append(b)
    if len(distinct) < 2:
        raise DomainError(f"highest_gap needs at least 2 distinct lines, got {len(distinct)}")
    return FieldGap(upper=distinct[0], lower=distinct[1], separation=distinct[0] - distinct[1])
