#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Configuration settings for the product fractional weights toolkit
"""

import os
from typing import Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings"""

    model_config = SettingsConfigDict(
        env_prefix="PFW_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Application
    app_name: str = "product-fractional-weights"
    app_version: str = "1.0.0"

    # Exponent arithmetic
    boundary_tolerance: float = Field(default=1e-10)
    identity_tolerance: float = Field(default=1e-12)
    near_boundary_margin: float = Field(default=1e-6)

    # Quadrature
    quadrature_cells: int = Field(default=256)
    quadrature_rel_tol: float = Field(default=1e-4)
    quadrature_max_doublings: int = Field(default=3)
    lattice_quadrature_cells: int = Field(default=32)
    gauss_order: int = Field(default=8)

    # Rectangle lattice and dyadic shells
    lattice_k_min: int = Field(default=-12)
    lattice_k_max: int = Field(default=12)
    lattice_shifts: int = Field(default=8)
    shell_cutoff: int = Field(default=40)
    shell_tail_tolerance: float = Field(default=1e-6)
    divergence_slope: float = Field(default=0.02)

    # Dyadic maximal operators
    dyadic_k_min: int = Field(default=-20)
    dyadic_k_max: int = Field(default=20)

    # Experiments
    seed: int = Field(default=0xA1B2)
    sandwich_samples: int = Field(default=10000)
    rd_residual_limit: float = Field(default=0.05)
    rd_halvings: int = Field(default=6)
    testing_grid: int = Field(default=128)
    testing_box_factor: float = Field(default=8.0)

    # Parallel lattice scans (1 = serial)
    max_workers: int = Field(default=1)

    # Logging
    log_level: str = Field(default="INFO")
    log_file: Optional[str] = Field(default=None)
    log_json: bool = Field(default=False)

    @property
    def log_path(self) -> Optional[str]:
        """Get absolute log file path"""
        if self.log_file:
            return os.path.abspath(self.log_file)
        return None

    def create_directories(self):
        """Create necessary directories"""
        if self.log_file and os.path.dirname(self.log_file):
            os.makedirs(os.path.dirname(self.log_file), exist_ok=True)


# Global settings instance
settings = Settings()

def get_settings() -> Settings:
    """Get application settings"""
    return settings
