"""
Qubit register validation beside the nanostripe.

Qubits sit on the z = 0 line at x > t_x/2. Each qubit's resonance is pushed up by
the local stray field; the field gradient detunes neighbours (effective Ising regime)
and the qubit cluster must stay clear of every spin-wave resonance.
"""
from dataclasses import dataclass, field
from enum import Enum
import math
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from errors import DomainError
from logging_config import get_logger, log_numeric_event
from magnetostatics import stray_bz, stray_bz_gradient_x
from spinwave import SpinWaveLine
from units import (
    CONSTANTS,
    MaterialParams,
    QubitSpec,
    StripeGeometry,
    field_from_frequency,
    gauss_to_tesla,
    m_to_nm,
    tesla_to_gauss,
)

logger = get_logger(__name__)


class LineKind(str, Enum):
    SPIN_WAVE = "spin-wave"
    QUBIT = "qubit"


@dataclass(frozen=True)
class ResonanceLine:
    """One field-sweep line: center b_res (T), FWHM width_G (G), arbitrary amplitude"""
    b_res: float
    kind: LineKind
    width_G: float
    amplitude: float = 1.0
    label: str = ""
    x: Optional[float] = None  # qubit position (m), None for spin waves and the isolated reference

    def __post_init__(self):
        if not self.b_res > 0:
            raise DomainError(f"b_res must be positive, got {self.b_res!r}")
        if not self.width_G > 0:
            raise DomainError(f"width_G must be positive, got {self.width_G!r}")


@dataclass(frozen=True)
class RegisterDesign:
    """Stripe, material, qubit species, drive frequency (Hz) and qubit x positions (m)"""
    geom: StripeGeometry
    mat: MaterialParams
    qubit: QubitSpec
    nu: float
    positions: tuple
    l_inter: float

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(float(x) for x in self.positions))
        if not self.nu > 0:
            raise DomainError(f"nu must be positive, got {self.nu!r}")
        if not self.l_inter > 0:
            raise DomainError(f"l_inter must be positive, got {self.l_inter!r}")
        if not self.positions:
            raise DomainError("A register needs at least one qubit position")
        if any(x <= self.geom.half_t for x in self.positions):
            raise DomainError("All qubit positions must lie outside the stripe (x > t_x/2)")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise DomainError("Qubit positions must be strictly increasing")

    @classmethod
    def from_array(cls, geom: StripeGeometry, mat: MaterialParams, qubit: QubitSpec, nu: float,
                   x_start: float, pitch: float, count: int, l_inter: float = None) -> "RegisterDesign":
        """Evenly spaced chain; l_inter defaults to the pitch"""
        if count < 1 or not pitch > 0:
            raise DomainError("Qubit array needs count >= 1 and a positive pitch")
        positions = tuple(x_start + i * pitch for i in range(count))
        return cls(geom=geom, mat=mat, qubit=qubit, nu=nu, positions=positions,
                   l_inter=pitch if l_inter is None else l_inter)

    @property
    def b_qubit_free(self) -> float:
        """Resonance field of an isolated qubit at the drive frequency"""
        return field_from_frequency(self.nu, self.qubit.g_q)


@dataclass(frozen=True)
class QubitClearance:
    label: str
    b_res: float
    clearance_G: float
    required_G: float
    nearest_b_sw: float

    @property
    def passed(self) -> bool:
        return self.clearance_G > self.required_G


@dataclass(frozen=True)
class OverlapReport:
    margin_G: float
    clearances: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clearances)

    @property
    def worst(self) -> QubitClearance:
        return min(self.clearances, key=lambda c: c.clearance_G - c.required_G)


class SpectrumSamples(NamedTuple):
    b_grid: np.ndarray
    total: np.ndarray
    spin_wave: np.ndarray
    qubit: np.ndarray


# ============================================================================
# Lines
# ============================================================================

def qubit_line(design: RegisterDesign, x: float, label: str = "") -> ResonanceLine:
    """Qubit resonance at x: h*nu/(g_q*mu_B) - B_z(x, 0)"""
    if not x > design.geom.half_t:
        raise DomainError(f"Qubit position must satisfy x > t_x/2, got x={x:.6e} m")
    b_res = design.b_qubit_free - stray_bz(design.geom, design.mat, x, 0.0)
    return ResonanceLine(b_res=b_res, kind=LineKind.QUBIT, width_G=design.qubit.linewidth_G,
                         label=label, x=x)


def qubit_lines(design: RegisterDesign) -> list:
    return [qubit_line(design, x, label=f"q{i}") for i, x in enumerate(design.positions)]


def reference_lines(design: RegisterDesign, positions: Iterable[float] = (500e-9,),
                    include_isolated: bool = True) -> list:
    """Isolated-qubit line "A" plus single qubits at the given positions ("B", "C", ...)"""
    lines = []
    if include_isolated:
        lines.append(ResonanceLine(b_res=design.b_qubit_free, kind=LineKind.QUBIT,
                                   width_G=design.qubit.linewidth_G, label="A"))
    for i, x in enumerate(positions):
        lines.append(qubit_line(design, x, label=chr(ord("B") + i)))
    return lines


def spinwave_resonance_lines(lines: Iterable[SpinWaveLine], mat: MaterialParams, amplitude: float = 1.0) -> list:
    """Spin-wave lines with the ferromagnet linewidth de_fmr expressed in gauss"""
    width_G = tesla_to_gauss(mat.fmr_width_T)
    return [
        ResonanceLine(b_res=line.b_res, kind=LineKind.SPIN_WAVE, width_G=width_G,
                      amplitude=amplitude, label=f"sw({line.n_z},{line.n_x})")
        for line in lines
    ]


def _as_resonance_lines(lines, mat: MaterialParams) -> list:
    lines = list(lines)
    if lines and isinstance(lines[0], SpinWaveLine):
        return spinwave_resonance_lines(lines, mat)
    return lines


# ============================================================================
# Checks
# ============================================================================

def ising_ratio(design: RegisterDesign, x: float, prefactor: float = 1.0) -> float:
    """
    Gradient detuning of neighbours over their dipolar coupling:
    |g_q*mu_B*dB_z/dx*l_inter| / (prefactor * mu_0*mu_B^2*g_q^2/(4*pi*l_inter^3)).
    """
    if not x > design.geom.half_t:
        raise DomainError(f"Qubit position must satisfy x > t_x/2, got x={x:.6e} m")
    if not prefactor > 0:
        raise DomainError(f"prefactor must be positive, got {prefactor!r}")
    g = design.qubit.g_q
    l_inter = design.l_inter
    gradient = stray_bz_gradient_x(design.geom, design.mat, x, 0.0)
    zeeman_split = abs(g * CONSTANTS.mu_B * gradient * l_inter)
    dipolar = prefactor * CONSTANTS.mu_0 * CONSTANTS.mu_B ** 2 * g ** 2 / (4.0 * math.pi * l_inter ** 3)
    return zeeman_split / dipolar


def overlap_check(qubit_lines: Sequence[ResonanceLine], spinwave_lines: Sequence[ResonanceLine],
                  margin_G: float = 10.0) -> OverlapReport:
    """
    Clearance of each qubit line from its nearest spin-wave line.

    A qubit passes when clearance > margin_G + (width_q + width_sw)/2, using the
    width of the nearest spin-wave line.
    """
    if not qubit_lines or not spinwave_lines:
        raise DomainError("overlap_check needs at least one qubit line and one spin-wave line")
    if margin_G < 0:
        raise DomainError(f"margin_G must be >= 0, got {margin_G!r}")
    sw_fields = np.array([s.b_res for s in spinwave_lines])
    sw_widths = np.array([s.width_G for s in spinwave_lines])
    clearances = []
    for q in qubit_lines:
        distance_G = tesla_to_gauss(np.abs(sw_fields - q.b_res))
        nearest = int(np.argmin(distance_G))
        required = margin_G + 0.5 * (q.width_G + sw_widths[nearest])
        clearances.append(QubitClearance(
            label=q.label, b_res=q.b_res, clearance_G=float(distance_G[nearest]),
            required_G=float(required), nearest_b_sw=float(sw_fields[nearest]),
        ))
    report = OverlapReport(margin_G=margin_G, clearances=tuple(clearances))
    if not report.passed:
        worst = report.worst
        log_numeric_event(logger, "SPECTRAL_OVERLAP",
                          f"{worst.label} clears spin waves by {worst.clearance_G:.1f} G, needs {worst.required_G:.1f} G")
    return report


def addressable_count(interval_G: float, linewidth_G: float, packing: float = 2.0) -> int:
    """Qubits that fit in a field window at one qubit per `packing` linewidths"""
    if not interval_G > 0 or not linewidth_G > 0 or not packing > 0:
        raise DomainError("interval_G, linewidth_G and packing must be positive")
    # absorbs representation error in exact quotients such as 0.3/0.1
    return int(math.floor(interval_G / (packing * linewidth_G) * (1.0 + 1e-12)))


def free_window(qubit_lines: Sequence[ResonanceLine], spinwave_lines: Sequence[ResonanceLine]):
    """Spin-wave lines directly below and above the qubit cluster, (lower, upper, width_G)"""
    q_fields = [q.b_res for q in qubit_lines]
    below = [s.b_res for s in spinwave_lines if s.b_res < min(q_fields)]
    above = [s.b_res for s in spinwave_lines if s.b_res > max(q_fields)]
    if not below or not above:
        raise DomainError("Qubit cluster is not bracketed by spin-wave lines")
    lower, upper = max(below), min(above)
    return lower, upper, tesla_to_gauss(upper - lower)


# ============================================================================
# Spectrum
# ============================================================================

def _lorentzian_sum(b_grid: np.ndarray, lines: Sequence[ResonanceLine]) -> np.ndarray:
    out = np.zeros_like(b_grid)
    for line in lines:
        half = 0.5 * gauss_to_tesla(line.width_G)
        out += line.amplitude * half ** 2 / ((b_grid - line.b_res) ** 2 + half ** 2)
    return out


def full_spectrum(design: RegisterDesign, spinwave_lines, b_grid, extra_lines: Sequence[ResonanceLine] = ()) -> SpectrumSamples:
    """
    Field-sweep absorption: unit-peak Lorentzians at every qubit line of the design,
    every spin-wave line and any extra (reference) lines.
    """
    b_grid = np.asarray(b_grid, dtype=float)
    if b_grid.ndim != 1 or b_grid.size < 2 or np.any(np.diff(b_grid) <= 0):
        raise DomainError("b_grid must be a strictly increasing 1D array")
    sw = _as_resonance_lines(spinwave_lines, design.mat)
    qubits = qubit_lines(design) + list(extra_lines)
    sw_part = _lorentzian_sum(b_grid, sw)
    q_part = _lorentzian_sum(b_grid, qubits)
    logger.debug(f"Spectrum on {b_grid.size} points: {len(sw)} spin-wave and {len(qubits)} qubit lines "
                 f"from {m_to_nm(design.positions[0]):.0f} nm")
    return SpectrumSamples(b_grid=b_grid, total=sw_part + q_part, spin_wave=sw_part, qubit=q_part)
