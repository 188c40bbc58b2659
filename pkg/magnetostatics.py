"""
Dipolar field of a uniformly magnetized nanostripe.

Infinite-stripe (2D) closed forms are the production path: the stripe is saturated
along +z, so only the faces z = +w_z/2 (charge +M) and z = -w_z/2 (charge -M) carry
magnetic surface charge. Fields are mu_0*H in tesla, signed, SI positions.
A finite-length 3D surface-charge quadrature is kept as a validation oracle.
"""
from dataclasses import dataclass
import time
import warnings

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, optimize

from config import settings
from errors import DomainError, NumericError, RootNotFoundError, SingularityError
from logging_config import get_logger, log_computation, log_numeric_event
from units import MaterialParams, StripeGeometry

logger = get_logger(__name__)


@dataclass(frozen=True)
class FieldSample:
    """Field components (T) at one point of the y = 0 plane"""
    x: float
    z: float
    b_x: float
    b_z: float


@dataclass(frozen=True)
class HomogeneityResult:
    """C(x) = integral over z of (B_z(x, z) - B_z(x, 0)), in T*m"""
    x: float
    c_value: float
    abs_error: float = 0.0


def _check_off_faces(geom: StripeGeometry, x, z):
    """Raise if any point sits on a charged face (within the guard band)"""
    guard = settings.guard_band_m
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z))):
        raise DomainError("Field positions must be finite")
    on_width = np.abs(x) <= geom.half_t + guard
    on_plane = np.abs(np.abs(z) - geom.half_w) < guard
    bad = on_width & on_plane
    if np.any(bad):
        idx = np.argwhere(np.broadcast_to(bad, np.broadcast(x, z).shape))[0]
        xb = np.broadcast_to(x, bad.shape)[tuple(idx)]
        zb = np.broadcast_to(z, bad.shape)[tuple(idx)]
        raise SingularityError(
            f"Point (x={xb:.6e} m, z={zb:.6e} m) lies on a charged face of the stripe"
        )


def _scalar_or_array(value, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(value)
    return value


def _arctan_strip(x, d, a):
    """arctan((x+a)/d) - arctan((x-a)/d), continued by 0 on the face plane outside the strip"""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.arctan((x + a) / d) - np.arctan((x - a) / d)
    return np.where(d == 0.0, 0.0, out)


def _log_strip(x, d, a):
    """ln(((x+a)^2 + d^2) / ((x-a)^2 + d^2))"""
    return np.log(((x + a) ** 2 + d ** 2) / ((x - a) ** 2 + d ** 2))


def _darctan_strip_dx(x, d, a):
    return d / ((x + a) ** 2 + d ** 2) - d / ((x - a) ** 2 + d ** 2)


# ============================================================================
# 2D closed forms
# ============================================================================

def stray_bz(geom: StripeGeometry, mat: MaterialParams, x, z):
    """z component of the stripe field at (x, z), inside or outside the stripe"""
    _check_off_faces(geom, x, z)
    xa = np.asarray(x, dtype=float)
    za = np.asarray(z, dtype=float)
    a = geom.half_t
    bz = -(mat.b_sat / (2.0 * np.pi)) * (
        _arctan_strip(xa, geom.half_w - za, a) + _arctan_strip(xa, geom.half_w + za, a)
    )
    return _scalar_or_array(bz, x, z)


def stray_bx(geom: StripeGeometry, mat: MaterialParams, x, z):
    """x component of the stripe field at (x, z); odd in x and in z"""
    _check_off_faces(geom, x, z)
    xa = np.asarray(x, dtype=float)
    za = np.asarray(z, dtype=float)
    a = geom.half_t
    bx = (mat.b_sat / (4.0 * np.pi)) * (
        _log_strip(xa, geom.half_w - za, a) - _log_strip(xa, geom.half_w + za, a)
    )
    return _scalar_or_array(bx, x, z)


def stray_bz_gradient_x(geom: StripeGeometry, mat: MaterialParams, x, z):
    """Analytic dB_z/dx in T/m (positive outside the stripe at z = 0: |B_z| decays)"""
    _check_off_faces(geom, x, z)
    xa = np.asarray(x, dtype=float)
    za = np.asarray(z, dtype=float)
    a = geom.half_t
    grad = -(mat.b_sat / (2.0 * np.pi)) * (
        _darctan_strip_dx(xa, geom.half_w - za, a) + _darctan_strip_dx(xa, geom.half_w + za, a)
    )
    return _scalar_or_array(grad, x, z)


def field_sample(geom: StripeGeometry, mat: MaterialParams, x: float, z: float) -> FieldSample:
    return FieldSample(x=x, z=z, b_x=stray_bx(geom, mat, x, z), b_z=stray_bz(geom, mat, x, z))


def field_map(geom: StripeGeometry, mat: MaterialParams, xs, zs):
    """
    Evaluate B_z and B_x on the tensor grid xs by zs.

    Returns:
        (bz, bx) arrays of shape (len(zs), len(xs))
    """
    xs = np.asarray(xs, dtype=float)
    zs = np.asarray(zs, dtype=float)
    if xs.size == 0 or zs.size == 0:
        raise DomainError("Field map grid is empty")
    X, Z = np.meshgrid(xs, zs)
    return stray_bz(geom, mat, X, Z), stray_bx(geom, mat, X, Z)


# ============================================================================
# Homogeneity and x_optim
# ============================================================================

def homogeneity_c(geom: StripeGeometry, mat: MaterialParams, x: float, z_half: float = 100e-9) -> HomogeneityResult:
    """
    Adaptive quadrature of C(x) = int_{-z_half}^{z_half} (B_z(x,z) - B_z(x,0)) dz.

    Raises:
        DomainError: x inside the stripe or z_half not positive
        NumericError: quadrature did not reach the tolerance
    """
    if not x > geom.half_t:
        raise DomainError(f"homogeneity_c needs x > t_x/2, got x={x:.6e} m")
    if not 0.0 < z_half:
        raise DomainError(f"z_half must be positive, got {z_half!r}")

    b_mid = stray_bz(geom, mat, x, 0.0)

    def integrand(z: float) -> float:
        return stray_bz(geom, mat, x, z) - b_mid

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            # integrand is even in z
            half, abserr = integrate.quad(
                integrand, 0.0, z_half, epsabs=settings.quad_epsabs, epsrel=1e-10, limit=200
            )
        except integrate.IntegrationWarning as e:
            logger.error(f"C(x) quadrature failed at x={x:.6e} m: {e}")
            raise NumericError(f"C(x) quadrature did not converge at x={x:.6e} m: {e}") from e

    return HomogeneityResult(x=x, c_value=2.0 * half, abs_error=2.0 * abserr)


def find_x_optim(geom: StripeGeometry, mat: MaterialParams, z_half: float = 100e-9,
                 bracket: tuple = None, xtol: float = 1e-10) -> float:
    """
    Root of C(x) by bisection, default bracket (t_x/2 + 1 nm, 5 w_z), tolerance 0.1 nm.

    Raises:
        RootNotFoundError: C has the same sign at both bracket ends
    """
    start = time.perf_counter()
    lo, hi = bracket if bracket is not None else (geom.half_t + 1e-9, 5.0 * geom.w_z)

    def c_of(x: float) -> float:
        return homogeneity_c(geom, mat, x, z_half).c_value

    c_lo, c_hi = c_of(lo), c_of(hi)
    if np.sign(c_lo) == np.sign(c_hi):
        log_numeric_event(logger, "NO_BRACKET", f"C({lo:.3e})={c_lo:.3e}, C({hi:.3e})={c_hi:.3e}", "error")
        raise RootNotFoundError(
            f"C(x) does not change sign on [{lo:.3e}, {hi:.3e}] m"
        )

    root = optimize.bisect(c_of, lo, hi, xtol=xtol)
    log_computation(logger, "find_x_optim", (time.perf_counter() - start) * 1000.0,
                    x_optim_nm=f"{root * 1e9:.3f}", material=mat.name)
    return float(root)


# ============================================================================
# 3D oracle (finite stripe)
# ============================================================================

def _oracle_face_integrals(geom: StripeGeometry, x: float, y: float, z: float, n_quad: int, component: str):
    """
    Sum over both charged faces of int dA sigma*(r - r')_c/|r - r'|^3 / (4 pi), sigma = +-1.

    x' uses Gauss-Legendre nodes; along y' the substitution y' - y = rho*sinh(u)
    turns the 1/R^3 peak into a smooth sech^2 profile before Gauss-Legendre.
    """
    if n_quad < 64:
        raise DomainError(f"n_quad must be >= 64, got {n_quad}")
    nodes, weights = leggauss(n_quad)
    a = geom.half_t
    xp = a * nodes
    wx = a * weights

    total = 0.0
    for z0, sigma in ((geom.half_w, 1.0), (-geom.half_w, -1.0)):
        dx = x - xp
        dz = z - z0
        rho = np.sqrt(dx ** 2 + dz ** 2)
        if np.any(rho < settings.guard_band_m):
            raise SingularityError(f"Oracle point (x={x:.3e}, z={z:.3e}) lies on a charged face")
        u_lo = np.arcsinh((-0.5 * geom.l_y - y) / rho)
        u_hi = np.arcsinh((0.5 * geom.l_y - y) / rho)
        # per x' node: int du (numerator)/(rho^2 cosh^2 u)
        half = 0.5 * (u_hi - u_lo)
        mid = 0.5 * (u_hi + u_lo)
        u = mid[:, None] + half[:, None] * nodes[None, :]
        sech2 = 1.0 / np.cosh(u) ** 2
        inner = half * (sech2 @ weights) / rho ** 2
        numerator = dz if component == "z" else dx
        total += sigma * np.sum(wx * numerator * inner)
    return total / (4.0 * np.pi)


def oracle_bz_3d(geom: StripeGeometry, mat: MaterialParams, x: float, y: float, z: float, n_quad: int = 128) -> float:
    """B_z of the finite stripe by surface-charge quadrature"""
    return mat.b_sat * _oracle_face_integrals(geom, x, y, z, n_quad, "z")


def oracle_bx_3d(geom: StripeGeometry, mat: MaterialParams, x: float, y: float, z: float, n_quad: int = 128) -> float:
    """B_x of the finite stripe by surface-charge quadrature"""
    return mat.b_sat * _oracle_face_integrals(geom, x, y, z, n_quad, "x")
