"""
Qubit relaxation and dephasing from thermal magnons of the stripe.

Phenomenological golden-rule model:

    Gamma1 = gamma0 * coth(h*nu / (2*k_B*T)) * sum_lines |g_c/g_ref|^2 * L(delta)
    Gamma2 = Gamma1/2 + alpha_phi * Gamma1

g_c is the transverse stray field a unit mode excitation produces at the qubit,
L is a unit-area Lorentzian of FWHM de_fmr in the qubit/mode energy detuning, and
gamma0 is fixed by one measured T1 anchor on a reference material. Other
magnetizations reuse that calibration with gamma0 scaled by M_sat^2.
"""
from dataclasses import dataclass
import math
import time
from typing import Iterable, Sequence

import numpy as np

from errors import CalibrationError, DomainError, NumericError, SingularityError
from logging_config import get_logger, log_computation, log_numeric_event
from register import RegisterDesign, qubit_line
from spinwave import ModeSolution, ModeSpectrum, SpinWaveLine, stripe_nodes
from units import CONSTANTS, MaterialParams, StripeGeometry

logger = get_logger(__name__)

REFERENCE_X = 230e-9
DEFAULT_ALPHA_PHI = 1.0 / 32.0
DETUNING_WINDOW_T = 0.5


@dataclass(frozen=True)
class DecoherenceModel:
    """Calibrated rate scale gamma0 (1/s), pure-dephasing fraction, Lorentzian FWHM (J), coupling reference"""
    gamma0: float
    de_fmr: float
    g_ref: float
    alpha_phi: float = DEFAULT_ALPHA_PHI
    window_T: float = DETUNING_WINDOW_T

    def __post_init__(self):
        if not self.gamma0 >= 0:
            raise DomainError(f"gamma0 must be >= 0, got {self.gamma0!r}")
        if not self.alpha_phi >= 0:
            raise DomainError(f"alpha_phi must be >= 0, got {self.alpha_phi!r}")
        if not self.de_fmr >= 0:
            raise DomainError(f"de_fmr must be >= 0, got {self.de_fmr!r}")
        if self.g_ref == 0 or not math.isfinite(self.g_ref):
            raise DomainError("g_ref must be finite and non-zero")

    def with_gamma0(self, gamma0: float) -> "DecoherenceModel":
        return DecoherenceModel(gamma0=gamma0, de_fmr=self.de_fmr, g_ref=self.g_ref,
                                alpha_phi=self.alpha_phi, window_T=self.window_T)


@dataclass(frozen=True)
class ModeContribution:
    n_z: int
    n_x: int
    b_res: float
    detuning: float  # J
    rate: float  # 1/s at the evaluated temperature


@dataclass(frozen=True)
class DecoherenceResult:
    x: float
    temp: float
    gamma1: float
    gamma2: float
    per_mode: tuple

    @property
    def t1(self) -> float:
        return math.inf if self.gamma1 == 0 else 1.0 / self.gamma1

    @property
    def t2(self) -> float:
        return math.inf if self.gamma2 == 0 else 1.0 / self.gamma2


@dataclass(frozen=True)
class SweepPoint:
    x: float
    temp: float
    t1: float
    t2: float


# ============================================================================
# Building blocks
# ============================================================================

def mode_coupling(geom: StripeGeometry, mat: MaterialParams, mode: ModeSolution, x: float,
                  z_grid: np.ndarray = None, h: float = None) -> float:
    """
    Transverse stray field at (x, 0) from the face charges +-psi(z) of one mode.

    (b_sat/2pi) * sum_i psi_i * [(x-a)/((x-a)^2+z_i^2) - (x+a)/((x+a)^2+z_i^2)] * h,
    midpoint rule on the cell-centered mode grid.
    """
    if not x > geom.half_t:
        raise DomainError(f"mode_coupling needs x > t_x/2, got x={x:.6e} m")
    if z_grid is None:
        z_grid = stripe_nodes(len(mode.psi), geom.w_z)
    if h is None:
        h = geom.w_z / len(mode.psi)
    a = geom.half_t
    z = np.asarray(z_grid)
    kernel = (x - a) / ((x - a) ** 2 + z ** 2) - (x + a) / ((x + a) ** 2 + z ** 2)
    value = mat.b_sat / (2.0 * math.pi) * h * float(np.dot(mode.psi, kernel))
    if not math.isfinite(value):
        raise NumericError(f"Mode coupling is not finite for n_z={mode.n_z} at x={x:.6e} m")
    return value


def thermal_factor(nu: float, temp: float) -> float:
    """coth(h*nu / (2*k_B*T))"""
    if not temp > 0:
        raise DomainError(f"Temperature must be positive, got {temp!r}")
    return 1.0 / math.tanh(CONSTANTS.h * nu / (2.0 * CONSTANTS.k_B * temp))


def lorentzian(detuning: float, fwhm: float) -> float:
    """Unit-area Lorentzian in energy (1/J)"""
    if fwhm == 0:
        if detuning == 0:
            raise SingularityError("Zero detuning with zero linewidth")
        return 0.0
    half = 0.5 * fwhm
    return half / math.pi / (detuning ** 2 + half ** 2)


def _operating_field(design: RegisterDesign, x: float) -> float:
    """Static field that puts the qubit at x in resonance with the drive"""
    return qubit_line(design, x).b_res


def _mode_sum(model: DecoherenceModel, design: RegisterDesign, spinwave_lines: Sequence[SpinWaveLine],
              modes: ModeSpectrum, x: float) -> list:
    """Temperature-free per-line terms |g_c/g_ref|^2 * L(delta)"""
    b0 = _operating_field(design, x)
    by_nz = {m.n_z: m for m in modes}
    couplings = {}
    energy_unit = design.mat.g_fm * CONSTANTS.mu_B
    terms = []
    for line in spinwave_lines:
        if abs(line.b_res - b0) > model.window_T:
            continue
        mode = by_nz.get(line.n_z)
        if mode is None:
            raise DomainError(f"No mode profile for n_z={line.n_z}")
        if line.n_z not in couplings:
            couplings[line.n_z] = mode_coupling(design.geom, design.mat, mode, x, modes.z_grid, modes.h)
        detuning = energy_unit * (b0 - line.b_res)
        weight = (couplings[line.n_z] / model.g_ref) ** 2 * lorentzian(detuning, model.de_fmr)
        terms.append((line, detuning, weight))
    return terms


def rates(model: DecoherenceModel, design: RegisterDesign, spinwave_lines: Sequence[SpinWaveLine],
          modes: ModeSpectrum, x: float, temp: float) -> DecoherenceResult:
    """Gamma1, Gamma2 and the per-line breakdown for a qubit at x and temperature temp"""
    coth = thermal_factor(design.nu, temp)
    terms = _mode_sum(model, design, spinwave_lines, modes, x)
    per_mode = tuple(
        ModeContribution(n_z=line.n_z, n_x=line.n_x, b_res=line.b_res, detuning=detuning,
                         rate=model.gamma0 * coth * weight)
        for line, detuning, weight in terms
    )
    gamma1 = sum(c.rate for c in per_mode)
    gamma2 = (0.5 + model.alpha_phi) * gamma1
    return DecoherenceResult(x=x, temp=temp, gamma1=gamma1, gamma2=gamma2, per_mode=per_mode)


def t1_rate(model: DecoherenceModel, design: RegisterDesign, spinwave_lines: Sequence[SpinWaveLine],
            modes: ModeSpectrum, x: float, temp: float) -> float:
    return rates(model, design, spinwave_lines, modes, x, temp).gamma1


def t2_rate(model: DecoherenceModel, design: RegisterDesign, spinwave_lines: Sequence[SpinWaveLine],
            modes: ModeSpectrum, x: float, temp: float) -> float:
    return rates(model, design, spinwave_lines, modes, x, temp).gamma2


# ============================================================================
# Calibration and sweeps
# ============================================================================

def calibrate(design: RegisterDesign, spinwave_lines: Sequence[SpinWaveLine], modes: ModeSpectrum,
              anchor: tuple = (REFERENCE_X, 2.0, 3.4), alpha_phi: float = DEFAULT_ALPHA_PHI,
              de_fmr: float = None) -> DecoherenceModel:
    """
    Fix gamma0 so that T1(anchor x, anchor T) equals the anchor T1.

    The coupling reference is the lowest mode at x = 230 nm of the calibration design.

    Raises:
        CalibrationError: non-positive anchor T1, vanishing reference coupling or mode sum
    """
    x_anchor, temp_anchor, t1_anchor = anchor
    if not t1_anchor > 0:
        raise CalibrationError(f"Anchor T1 must be positive, got {t1_anchor!r}")
    if not modes:
        raise CalibrationError("Calibration needs at least one mode")
    g_ref = mode_coupling(design.geom, design.mat, modes[0], REFERENCE_X, modes.z_grid, modes.h)
    if g_ref == 0:
        raise CalibrationError("Reference coupling of the lowest mode vanishes")

    unit = DecoherenceModel(gamma0=1.0, de_fmr=design.mat.de_fmr if de_fmr is None else de_fmr,
                            g_ref=g_ref, alpha_phi=alpha_phi)
    unit_rate = t1_rate(unit, design, spinwave_lines, modes, x_anchor, temp_anchor)
    if not unit_rate > 0:
        log_numeric_event(logger, "CALIBRATION", "mode sum vanishes at the anchor", "error")
        raise CalibrationError("Mode sum vanishes at the anchor; no spin-wave line within the detuning window")

    model = unit.with_gamma0(1.0 / (t1_anchor * unit_rate))
    logger.info(f"Calibrated gamma0={model.gamma0:.6e} 1/s at x={x_anchor * 1e9:.1f} nm, "
                f"T={temp_anchor:g} K, T1={t1_anchor:g} s")
    return model


def scale_to_material(model: DecoherenceModel, reference: MaterialParams, target: MaterialParams) -> DecoherenceModel:
    """
    Carry a calibration over to another magnetization.

    gamma0 scales with M_sat^2, so rates of the target are (b_sat_target/b_sat_reference)^2
    times the reference rates on the reference mode structure.
    """
    scale = (target.b_sat / reference.b_sat) ** 2
    if scale != 1.0:
        logger.info(f"Scaled gamma0 from {reference.name} to {target.name} by {scale:.4g}")
    return model.with_gamma0(model.gamma0 * scale)


def sweep_x(model: DecoherenceModel, design: RegisterDesign, spinwave_lines: Sequence[SpinWaveLine],
            modes: ModeSpectrum, x_list: Iterable[float], temps: Sequence[float] = (3.0, 30.0, 300.0)) -> list:
    """T1, T2 over qubit positions for each temperature, ordered by temperature then x"""
    start = time.perf_counter()
    x_list = list(x_list)
    coths = {temp: thermal_factor(design.nu, temp) for temp in temps}
    sums = {x: sum(w for _, _, w in _mode_sum(model, design, spinwave_lines, modes, x)) for x in x_list}
    points = []
    for temp in temps:
        for x in x_list:
            gamma1 = model.gamma0 * coths[temp] * sums[x]
            points.append(_point(model, x, temp, gamma1))
    log_computation(logger, "sweep_x", (time.perf_counter() - start) * 1000.0,
                    points=len(points), temps=len(temps))
    return points


def sweep_temp(model: DecoherenceModel, design: RegisterDesign, spinwave_lines: Sequence[SpinWaveLine],
               modes: ModeSpectrum, t_list: Iterable[float], x: float = REFERENCE_X) -> list:
    """T1, T2 over temperatures at a fixed qubit position"""
    mode_sum = sum(w for _, _, w in _mode_sum(model, design, spinwave_lines, modes, x))
    return [
        _point(model, x, temp, model.gamma0 * thermal_factor(design.nu, temp) * mode_sum)
        for temp in t_list
    ]


def _point(model: DecoherenceModel, x: float, temp: float, gamma1: float) -> SweepPoint:
    gamma2 = (0.5 + model.alpha_phi) * gamma1
    return SweepPoint(
        x=x, temp=temp,
        t1=math.inf if gamma1 == 0 else 1.0 / gamma1,
        t2=math.inf if gamma2 == 0 else 1.0 / gamma2,
    )
