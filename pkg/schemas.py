"""
Pydantic schemas for nanostripe run configurations and reports
Run configs are a single strict JSON document; lengths in nm, fields in T and G
"""
import json
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import settings
from errors import ConfigError
from register import RegisterDesign
from spinwave import BoundaryCondition
from units import (
    SPECTRUM_FIT_A_EXCH,
    MaterialParams,
    QubitSpec,
    StripeGeometry,
    get_material,
    get_qubit,
    nm_to_m,
    ueV_to_joule,
)


class StrictModel(BaseModel):
    """Unknown keys are rejected everywhere in a run config."""
    model_config = ConfigDict(extra="forbid")


# ============================================================================
# Run configuration
# ============================================================================

class GeometryConfig(StrictModel):
    """Stripe dimensions in nm."""
    t_x_nm: float = Field(100.0, gt=0)
    w_z_nm: float = Field(800.0, gt=0)
    l_y_nm: float = Field(100_000.0, gt=0)

    @model_validator(mode="after")
    def check_aspect(self):
        if self.w_z_nm < self.t_x_nm:
            raise ValueError("w_z_nm must be >= t_x_nm")
        if self.l_y_nm < StripeGeometry.MIN_LENGTH_RATIO * self.w_z_nm:
            raise ValueError("l_y_nm must be at least 10 x w_z_nm for the infinite-stripe model")
        return self


class MaterialConfig(StrictModel):
    """Preset plus optional overrides; exchange stiffness defaults to the spectrum fit."""
    preset: str = Field(default_factory=lambda: settings.default_preset.lower(),
                        pattern="^(permalloy|dysprosium)$", validate_default=True)
    b_sat_T: Optional[float] = Field(None, gt=0)
    a_exch_J_per_m: Optional[float] = Field(SPECTRUM_FIT_A_EXCH, gt=0)
    g_fm: Optional[float] = Field(None, gt=0)
    de_fmr_ueV: Optional[float] = Field(None, gt=0)


class QubitConfig(StrictModel):
    """Qubit species preset; g_q overrides the preset g-factor."""
    preset: str = Field("pseudo_spin", pattern="^(pseudo_spin|si_vacancy)$")
    g_q: Optional[float] = Field(None, gt=0)
    linewidth_G: float = Field(1.0, gt=0)


class QubitArrayConfig(StrictModel):
    """Evenly spaced chain, or explicit positions when positions_nm is given."""
    x_start_nm: float = Field(199.0, gt=0)
    pitch_nm: float = Field(5.0, gt=0)
    count: int = Field(16, ge=1)
    positions_nm: Optional[List[float]] = None
    l_inter_nm: Optional[float] = Field(None, gt=0)

    @field_validator("positions_nm")
    @classmethod
    def check_positions(cls, v):
        if v is not None:
            if not v:
                raise ValueError("positions_nm must not be empty")
            if any(b <= a for a, b in zip(v, v[1:])):
                raise ValueError("positions_nm must be strictly increasing")
        return v


class FieldMapConfig(StrictModel):
    """(x, z) grid for fieldmap.csv and the 1D x scans; default grid avoids the charged faces."""
    x_min_nm: float = -995.0
    x_max_nm: float = 995.0
    nx: int = Field(200, ge=2)
    z_min_nm: float = -595.0
    z_max_nm: float = 595.0
    nz: int = Field(120, ge=2)
    profile_x_min_nm: float = Field(51.0, gt=0)
    profile_x_max_nm: float = Field(1000.0, gt=0)
    profile_step_nm: float = Field(1.0, gt=0)
    z_half_nm: float = Field(100.0, gt=0)

    @model_validator(mode="after")
    def check_ranges(self):
        if self.x_max_nm <= self.x_min_nm or self.z_max_nm <= self.z_min_nm:
            raise ValueError("field map ranges must have max > min")
        if self.profile_x_max_nm <= self.profile_x_min_nm:
            raise ValueError("profile_x_max_nm must exceed profile_x_min_nm")
        return self


class ModesConfig(StrictModel):
    n_grid: int = Field(default_factory=lambda: settings.default_n_grid, ge=801, validate_default=True)
    n_max: int = Field(10, ge=1)
    n_x_max: int = Field(2, ge=1)
    bc: BoundaryCondition = BoundaryCondition.DIRICHLET
    cross_check: bool = True


class SpectrumConfig(StrictModel):
    b_min_T: float = Field(0.70, gt=0)
    b_max_T: float = Field(1.50, gt=0)
    step_G: float = Field(0.1, gt=0)
    reference_positions_nm: List[float] = Field(default_factory=lambda: [500.0])
    include_isolated_reference: bool = True
    merge_tol_G: float = Field(1.0, ge=0)

    @model_validator(mode="after")
    def check_window(self):
        if self.b_max_T <= self.b_min_T:
            raise ValueError("b_max_T must exceed b_min_T")
        return self


class DesignCheckConfig(StrictModel):
    margin_G: float = Field(10.0, ge=0)
    packing: float = Field(2.0, gt=0)
    ising_prefactor: float = Field(1.0, gt=0)
    min_ising_ratio: float = Field(10.0, ge=0)


class DecoherenceConfig(StrictModel):
    """Anchor, sweeps and the material the rate scale is calibrated on."""
    reference_preset: str = Field("permalloy", pattern="^(permalloy|dysprosium)$")
    anchor_x_nm: float = Field(230.0, gt=0)
    anchor_temp_K: float = Field(2.0, gt=0)
    anchor_t1_s: float = Field(3.4, gt=0)
    alpha_phi: float = Field(1.0 / 32.0, ge=0)
    temperatures_K: List[float] = Field(default_factory=lambda: [3.0, 30.0, 300.0])
    x_min_nm: float = Field(160.0, gt=0)
    x_max_nm: float = Field(600.0, gt=0)
    x_step_nm: float = Field(10.0, gt=0)
    t_sweep_K: List[float] = Field(default_factory=lambda: [2.0, 3.0, 5.0, 10.0, 20.0, 30.0, 50.0, 100.0, 200.0, 300.0])
    t_sweep_x_nm: float = Field(230.0, gt=0)

    @field_validator("temperatures_K", "t_sweep_K")
    @classmethod
    def check_temperatures(cls, v):
        if not v or any(t <= 0 for t in v):
            raise ValueError("temperature lists must be non-empty and positive")
        return v

    @model_validator(mode="after")
    def check_sweep(self):
        if self.x_max_nm < self.x_min_nm:
            raise ValueError("x_max_nm must be >= x_min_nm")
        return self


class RunConfig(StrictModel):
    """Complete input of one CLI run; defaults describe the Q-band permalloy register."""
    geometry: GeometryConfig = Field(default_factory=GeometryConfig)
    material: MaterialConfig = Field(default_factory=MaterialConfig)
    qubit: QubitConfig = Field(default_factory=QubitConfig)
    qubits: QubitArrayConfig = Field(default_factory=QubitArrayConfig)
    frequency_GHz: float = Field(34.0, gt=0)
    fieldmap: FieldMapConfig = Field(default_factory=FieldMapConfig)
    modes: ModesConfig = Field(default_factory=ModesConfig)
    spectrum: SpectrumConfig = Field(default_factory=SpectrumConfig)
    design_check: DesignCheckConfig = Field(default_factory=DesignCheckConfig)
    decoherence: DecoherenceConfig = Field(default_factory=DecoherenceConfig)
    output_dir: Optional[str] = None

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        """Load and validate a JSON run config; any problem becomes a ConfigError"""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
        return cls.from_json(text, source=str(path))

    @classmethod
    def from_json(cls, text: str, source: str = "<string>") -> "RunConfig":
        try:
            return cls.model_validate_json(text)
        except ValidationError as e:
            raise ConfigError(f"Invalid config {source}: {e.error_count()} error(s)\n{e}", errors=e.errors()) from e

    def with_overrides(self, preset: str = None, bc: str = None, output_dir: str = None) -> "RunConfig":
        """Apply CLI flags and re-validate"""
        data = json.loads(self.model_dump_json())
        if preset is not None:
            data["material"]["preset"] = preset
        if bc is not None:
            data["modes"]["bc"] = bc
        if output_dir is not None:
            data["output_dir"] = output_dir
        return RunConfig.from_json(json.dumps(data), source="command line")

    @property
    def nu(self) -> float:
        return self.frequency_GHz * 1e9

    def to_geometry(self) -> StripeGeometry:
        g = self.geometry
        return StripeGeometry.from_nm(g.t_x_nm, g.w_z_nm, g.l_y_nm)

    def material_params(self) -> MaterialParams:
        m = self.material
        return get_material(
            m.preset,
            b_sat=m.b_sat_T,
            a_exch=m.a_exch_J_per_m,
            g_fm=m.g_fm,
            de_fmr=None if m.de_fmr_ueV is None else ueV_to_joule(m.de_fmr_ueV),
        )

    def reference_material_params(self) -> MaterialParams:
        """Calibration material: the reference preset with the configured stiffness, g and linewidth"""
        m = self.material
        return get_material(
            self.decoherence.reference_preset,
            a_exch=m.a_exch_J_per_m,
            g_fm=m.g_fm,
            de_fmr=None if m.de_fmr_ueV is None else ueV_to_joule(m.de_fmr_ueV),
        )

    def qubit_spec(self) -> QubitSpec:
        return get_qubit(self.qubit.preset, g_q=self.qubit.g_q, linewidth_G=self.qubit.linewidth_G)

    def to_design(self) -> RegisterDesign:
        q = self.qubits
        geom = self.to_geometry()
        mat = self.material_params()
        if q.positions_nm is not None:
            positions = [nm_to_m(x) for x in q.positions_nm]
            if q.l_inter_nm is not None:
                l_inter = nm_to_m(q.l_inter_nm)
            elif len(positions) > 1:
                l_inter = min(b - a for a, b in zip(positions, positions[1:]))
            else:
                l_inter = nm_to_m(q.pitch_nm)
            return RegisterDesign(geom=geom, mat=mat, qubit=self.qubit_spec(), nu=self.nu,
                                  positions=tuple(positions), l_inter=l_inter)
        return RegisterDesign.from_array(
            geom, mat, self.qubit_spec(), self.nu,
            x_start=nm_to_m(q.x_start_nm), pitch=nm_to_m(q.pitch_nm), count=q.count,
            l_inter=None if q.l_inter_nm is None else nm_to_m(q.l_inter_nm),
        )


# ============================================================================
# Reports
# ============================================================================

class QubitReport(BaseModel):
    """Per-qubit design check."""
    label: str
    x_nm: float
    Bres_T: float
    Bres_G: float
    clearance_G: float
    required_G: float
    ising_ratio: float
    ising_ratio_scaled: float
    passed: bool


class WindowReport(BaseModel):
    lower_T: float
    upper_T: float
    width_G: float


class DesignReport(BaseModel):
    """Global design check written to report.json."""
    passed: bool
    overlap_passed: bool
    ising_passed: bool
    margin_G: float
    material: str
    a_exch_J_per_m: float
    frequency_GHz: float
    n_qubits: int
    qubits: List[QubitReport]
    top_gap: WindowReport
    cluster_window: Optional[WindowReport] = None
    addressable_in_top_gap: int
    addressable_in_cluster_window: Optional[int] = None
    packing: float
    ising_prefactor: float


class LineRecord(BaseModel):
    """One line of lines.json."""
    kind: str
    label: str
    b_res_T: float
    b_res_G: float
    width_G: float
    n_z: Optional[int] = None
    n_x: Optional[int] = None
    x_nm: Optional[float] = None
    edge_weight: Optional[float] = None


class CalibrationRecord(BaseModel):
    """Decoherence calibration written to calibration.json."""
    material: str
    a_exch_J_per_m: float
    reference_material: str
    rate_scale: float
    gamma0_reference_per_s: float
    gamma0_per_s: float
    alpha_phi: float
    g_ref: float
    de_fmr_ueV: float
    anchor_x_nm: float
    anchor_temp_K: float
    anchor_t1_s: float
    t2_at_anchor_s: float
