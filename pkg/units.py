"""
Physical constants, unit conversions and material presets.

Internal unit system is SI (tesla, meters, joules, seconds). Gauss, nanometers
and micro-electronvolts only appear at the I/O boundary through the helpers
below. Coordinates are stripe-centered: the stripe occupies
x in [-t_x/2, t_x/2], z in [-w_z/2, w_z/2], y in [-l_y/2, l_y/2] and is
saturated along +z.
"""
from dataclasses import dataclass, replace
import math
import numbers

from errors import DomainError


@dataclass(frozen=True)
class PhysConstants:
    """CODATA 2018 values in SI units"""
    h: float = 6.62607015e-34  # J*s
    mu_B: float = 9.2740100783e-24  # J/T
    mu_0: float = 4e-7 * math.pi  # T*m/A
    k_B: float = 1.380649e-23  # J/K

    def __post_init__(self):
        assert self.h > 0, "h must be positive"
        assert self.mu_B > 0, "mu_B must be positive"
        assert self.mu_0 > 0, "mu_0 must be positive"
        assert self.k_B > 0, "k_B must be positive"


CONSTANTS = PhysConstants()

GAUSS_PER_TESLA = 1e4
ELECTRONVOLT = 1.602176634e-19  # J
Z_STAR_OFFSET = 450e-9  # plotting origin shift for z* = z + 450 nm


def _require_positive(name: str, value: float):
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


# ============================================================================
# Domain types
# ============================================================================

@dataclass(frozen=True)
class MaterialParams:
    """Ferromagnet parameters: b_sat = mu_0*M_sat (T), a_exch (J/m), g_fm, de_fmr FWHM (J)"""
    name: str
    b_sat: float
    a_exch: float
    g_fm: float
    de_fmr: float
    approximate: bool = False

    def __post_init__(self):
        _require_positive("b_sat", self.b_sat)
        _require_positive("a_exch", self.a_exch)
        _require_positive("g_fm", self.g_fm)
        _require_positive("de_fmr", self.de_fmr)

    @property
    def m_sat(self) -> float:
        """Saturation magnetization in A/m"""
        return self.b_sat / CONSTANTS.mu_0

    @property
    def d_ex(self) -> float:
        """Exchange coefficient 2*A/M_sat in T*m^2"""
        return 2.0 * self.a_exch / self.m_sat

    @property
    def fmr_width_T(self) -> float:
        """Resonance FWHM converted to a field width at g_fm"""
        return self.de_fmr / (self.g_fm * CONSTANTS.mu_B)

    def with_overrides(self, **overrides) -> "MaterialParams":
        """Copy with selected fields replaced; None values are ignored"""
        changes = {key: value for key, value in overrides.items() if value is not None}
        if not changes:
            return self
        unknown = set(changes) - {"name", "b_sat", "a_exch", "g_fm", "de_fmr", "approximate"}
        if unknown:
            raise DomainError(f"Unknown material field(s): {sorted(unknown)}")
        return replace(self, **changes)


@dataclass(frozen=True)
class QubitSpec:
    """Qubit species: g-factor and inhomogeneous linewidth in gauss"""
    name: str = "pseudo_spin"
    g_q: float = 2.0
    linewidth_G: float = 1.0

    def __post_init__(self):
        _require_positive("g_q", self.g_q)
        _require_positive("linewidth_G", self.linewidth_G)


@dataclass(frozen=True)
class StripeGeometry:
    """Nanostripe dimensions in meters: t_x (width), w_z (depth, along M), l_y (length)"""
    t_x: float
    w_z: float
    l_y: float

    # Below this aspect ratio the infinite-stripe field is not a valid model
    MIN_LENGTH_RATIO = 10.0

    def __post_init__(self):
        _require_positive("t_x", self.t_x)
        _require_positive("w_z", self.w_z)
        _require_positive("l_y", self.l_y)
        if self.w_z < self.t_x:
            raise DomainError(f"w_z ({self.w_z:.3e} m) must be >= t_x ({self.t_x:.3e} m)")
        if self.l_y < self.MIN_LENGTH_RATIO * self.w_z:
            raise DomainError(
                f"l_y ({self.l_y:.3e} m) must be at least {self.MIN_LENGTH_RATIO:g} x w_z "
                f"for the infinite-stripe model"
            )

    @classmethod
    def from_nm(cls, t_x_nm: float, w_z_nm: float, l_y_nm: float) -> "StripeGeometry":
        return cls(t_x=nm_to_m(t_x_nm), w_z=nm_to_m(w_z_nm), l_y=nm_to_m(l_y_nm))

    @property
    def half_t(self) -> float:
        return 0.5 * self.t_x

    @property
    def half_w(self) -> float:
        return 0.5 * self.w_z


# ============================================================================
# Presets
# ============================================================================

PERMALLOY = MaterialParams(
    name="permalloy",
    b_sat=1.13,
    a_exch=1.3e-11,
    g_fm=2.0,
    de_fmr=3.0e-6 * ELECTRONVOLT,
)

# Three times the permalloy magnetization; remaining fields borrowed from permalloy
DYSPROSIUM = MaterialParams(
    name="dysprosium",
    b_sat=3.0 * 1.13,
    a_exch=PERMALLOY.a_exch,
    g_fm=PERMALLOY.g_fm,
    de_fmr=PERMALLOY.de_fmr,
    approximate=True,
)

MATERIAL_PRESETS = {m.name: m for m in (PERMALLOY, DYSPROSIUM)}

PSEUDO_SPIN = QubitSpec(name="pseudo_spin", g_q=2.0)
SI_VACANCY = QubitSpec(name="si_vacancy", g_q=2.0032)

QUBIT_PRESETS = {q.name: q for q in (PSEUDO_SPIN, SI_VACANCY)}

# Exchange stiffness for the field-sweep spectrum at 34 GHz: the two highest distinct
# lines sit near 1.345 T and 1.227 T and every qubit out to 600 nm stays between them
SPECTRUM_FIT_A_EXCH = 5.0e-11  # J/m


def get_material(name: str, **overrides) -> MaterialParams:
    """Look up a preset by (case-insensitive) name and apply overrides"""
    try:
        base = MATERIAL_PRESETS[name.lower()]
    except KeyError:
        raise DomainError(f"Unknown material preset {name!r}; choose from {sorted(MATERIAL_PRESETS)}") from None
    return base.with_overrides(**overrides)


def get_qubit(name: str, g_q: float = None, linewidth_G: float = None) -> QubitSpec:
    """Qubit preset by name with optional g-factor and linewidth overrides"""
    try:
        base = QUBIT_PRESETS[name.lower()]
    except KeyError:
        raise DomainError(f"Unknown qubit preset {name!r}; choose from {sorted(QUBIT_PRESETS)}") from None
    changes = {key: value for key, value in (("g_q", g_q), ("linewidth_G", linewidth_G)) if value is not None}
    return replace(base, **changes) if changes else base


# ============================================================================
# Conversions
# ============================================================================

def field_from_frequency(nu: float, g: float) -> float:
    """Resonance field h*nu/(g*mu_B) in tesla"""
    _require_positive("nu", nu)
    _require_positive("g", g)
    return CONSTANTS.h * nu / (g * CONSTANTS.mu_B)


def frequency_from_field(b: float, g: float) -> float:
    """Larmor frequency g*mu_B*b/h in Hz"""
    _require_positive("b", b)
    _require_positive("g", g)
    return g * CONSTANTS.mu_B * b / CONSTANTS.h


def gauss_to_tesla(x):
    return x * 1e-4


def tesla_to_gauss(x):
    return x * GAUSS_PER_TESLA


def nm_to_m(x):
    return x * 1e-9


def m_to_nm(x):
    return x * 1e9


def ueV_to_joule(x):
    return x * 1e-6 * ELECTRONVOLT


def joule_to_ueV(x):
    return x / (1e-6 * ELECTRONVOLT)


def z_star(z):
    """Plotting coordinate z* = z + 450 nm (meters in, meters out)"""
    return z + Z_STAR_OFFSET
