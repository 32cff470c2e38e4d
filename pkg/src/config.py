"""
Configuration management for the Transverse Solver.
Handles loading/saving user settings from config.json.
"""

import json
import os
from dataclasses import dataclass, asdict, fields
from pathlib import Path
from typing import Optional

from .constants import (
    DEFAULT_OUTPUT_DIR,
    DEFAULT_THREADS,
    DEFAULT_JOBS,
    DEFAULT_SEED,
    DEFAULT_NEWTON_TOL,
    DEFAULT_PATH_TOL,
    DEFAULT_MAX_NEWTON_ITER,
    DEFAULT_MAX_HALVINGS,
    DEFAULT_INITIAL_T_STEP,
    DEFAULT_MIN_T_STEP,
    DEFAULT_KRYLOV_RTOL,
    DEFAULT_KRYLOV_RESTART,
    DEFAULT_KRYLOV_FORCING,
    DEFAULT_KRYLOV_MAXITER,
    DEFAULT_ADMISSIBILITY_FLOOR,
    DEFAULT_PERTURBATION_TAU,
    DEFAULT_IDENTITY_SAMPLES,
    DEFAULT_DERIVATIVE_SAMPLES,
    THREADS_ENV_VAR,
)

# Config file path (in project root)
CONFIG_FILE = Path(__file__).parent.parent / "config.json"


@dataclass
class Config:
    """User configuration settings."""

    output_dir: str = DEFAULT_OUTPUT_DIR
    threads: int = DEFAULT_THREADS
    jobs: int = DEFAULT_JOBS
    seed: int = DEFAULT_SEED
    newton_tol: float = DEFAULT_NEWTON_TOL
    path_tol: float = DEFAULT_PATH_TOL
    max_newton_iter: int = DEFAULT_MAX_NEWTON_ITER
    max_halvings: int = DEFAULT_MAX_HALVINGS
    initial_t_step: float = DEFAULT_INITIAL_T_STEP
    min_t_step: float = DEFAULT_MIN_T_STEP
    krylov_rtol: float = DEFAULT_KRYLOV_RTOL
    krylov_restart: int = DEFAULT_KRYLOV_RESTART
    krylov_maxiter: int = DEFAULT_KRYLOV_MAXITER
    krylov_forcing: float = DEFAULT_KRYLOV_FORCING
    admissibility_floor: float = DEFAULT_ADMISSIBILITY_FLOOR
    perturbation_tau: float = DEFAULT_PERTURBATION_TAU
    identity_samples: int = DEFAULT_IDENTITY_SAMPLES
    derivative_samples: int = DEFAULT_DERIVATIVE_SAMPLES

    def to_dict(self) -> dict:
        """Convert config to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        """Create config from dictionary, ignoring unknown keys."""
        config = cls()
        for item in fields(cls):
            if item.name in data:
                setattr(config, item.name, type(getattr(config, item.name))(data[item.name]))
        return config

    def to_solve_options(self):
        """Freeze the numerical part of the settings for one solve."""
        from .solver.problem import SolveOptions

        return SolveOptions(
            newton_tol=self.newton_tol,
            path_tol=self.path_tol,
            max_newton_iter=self.max_newton_iter,
            max_halvings=self.max_halvings,
            initial_t_step=self.initial_t_step,
            min_t_step=self.min_t_step,
            krylov_rtol=self.krylov_rtol,
            krylov_restart=self.krylov_restart,
            krylov_maxiter=self.krylov_maxiter,
            krylov_forcing=self.krylov_forcing,
            admissibility_floor=self.admissibility_floor,
            perturbation_tau=self.perturbation_tau,
            seed=self.seed,
        )


def _apply_env(config: Config) -> Config:
    threads = os.environ.get(THREADS_ENV_VAR)
    if threads:
        try:
            config.threads = max(1, int(threads))
        except ValueError:
            pass
    return config


def load_config() -> Config:
    """Load configuration from file, or create default if not exists."""
    if CONFIG_FILE.exists():
        try:
            with open(CONFIG_FILE, "r", encoding="utf-8") as f:
                data = json.load(f)
                return _apply_env(Config.from_dict(data))
        except (json.JSONDecodeError, IOError, TypeError, ValueError):
            # Return default config if file is corrupted
            return _apply_env(Config())
    return _apply_env(Config())


def save_config(config: Config, path: Optional[Path] = None) -> bool:
    """Save configuration to file (config.json unless another path is given)."""
    try:
        with open(path or CONFIG_FILE, "w", encoding="utf-8") as f:
            json.dump(config.to_dict(), f, indent=2)
        return True
    except IOError:
        return False


def get_config() -> Config:
    """Get the current configuration (singleton-like access)."""
    return load_config()
