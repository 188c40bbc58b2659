"""
Configuration management for nanostripe using Pydantic Settings
Loads process-level settings from environment variables with sensible defaults.
Per-run physics inputs live in schemas.RunConfig (JSON file), not here.
"""
from pydantic_settings import BaseSettings, SettingsConfigDict
import os


class Settings(BaseSettings):
    """Process configuration with environment variable support"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="NANOSTRIPE_",
        case_sensitive=False,
        extra="ignore"
    )

    # Environment
    env: str = "development"  # development, production, testing
    debug: bool = False

    # Output
    output_dir: str = "results"
    csv_significant_digits: int = 9

    # Defaults applied when a run config does not say otherwise
    default_preset: str = "permalloy"
    default_n_grid: int = 3201

    # Numerics
    scan_steps: int = 5000
    bisection_tol_T: float = 1e-12
    quad_epsabs: float = 1e-15  # T*m
    guard_band_m: float = 1e-12
    edge_window_m: float = 50e-9

    @property
    def is_production(self) -> bool:
        """Check if running in production"""
        return self.env.lower() == "production"

    @property
    def is_development(self) -> bool:
        """Check if running in development"""
        return self.env.lower() == "development"

    def validate_run_environment(self) -> tuple[list[str], list[str]]:
        """Validate settings before a run. Returns (errors, warnings)"""
        errors = []
        warnings = []

        if self.csv_significant_digits < 1 or self.csv_significant_digits > 17:
            errors.append("CSV_SIGNIFICANT_DIGITS must be between 1 and 17")

        if self.scan_steps < 100:
            errors.append("SCAN_STEPS below 100 cannot bracket closely spaced modes")

        if self.default_n_grid < 801:
            errors.append("DEFAULT_N_GRID must be at least 801")

        parent = os.path.dirname(os.path.abspath(self.output_dir)) or "."
        if os.path.exists(parent) and not os.access(parent, os.W_OK):
            errors.append(f"Output directory parent {parent} is not writable")

        if self.bisection_tol_T > 1e-10:
            warnings.append("BISECTION_TOL_T above 1e-10 T breaks the rigid-shift guarantee")

        if self.is_production and self.debug:
            warnings.append("DEBUG is True in production - verbose numeric logs will be large")

        return errors, warnings


# Global settings instance
settings = Settings()


if settings.default_preset.lower() not in ("permalloy", "dysprosium"):
    import warnings
    warnings.warn(
        f"WARNING: NANOSTRIPE_DEFAULT_PRESET={settings.default_preset!r} is not a known preset; "
        "runs without an explicit --preset will fail.",
        UserWarning
    )
