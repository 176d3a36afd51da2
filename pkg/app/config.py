from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    APP_NAME: str = "q-Oscillator Spectra API"

    # CORS settings (comma-separated list of origins)
    CORS_ORIGINS: str = "http://localhost:3000,http://localhost:5173,http://127.0.0.1:3000,http://127.0.0.1:5173"

    # Numerical tolerances (defaults for Tolerance.from_settings)
    DEFAULT_REL_TOL: float = 1e-10
    DEFAULT_TAIL_EPS: float = 1e-16
    DEFAULT_MAX_TERMS: int = 500

    # Spectral windows
    MAX_WINDOW_RADIUS: int = 200

    # Fourier transform construction
    SERIES_SPOT_CHECKS: int = 9
    SERIES_TERMS: int = 120
    UNITARITY_TOL: float = 1e-6
    TRANSFORM_THREADS: int = 1

    LOG_LEVEL: str = "WARNING"

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8")


settings = Settings()
