"""Paddle-cantilever capacitive test system: forward model and analysis tools.

A square paddle on a constant-stress cantilever sits between two DC
electrodes and forms a capacitor with each. The package models the tilted
plate capacitance and electrostatic force, the beam/film force balance with
its equilibria and pull-in, a virtual lock-in capacitance bridge with
spacer calibration, and the inverse extraction of residual film stress from
voltage-capacitance sweeps.
"""

__version__ = "0.1.0"

from .electrostatics import (CapacitanceReading, Electrode, ForcePerV2,
                             capacitance_curve, capacitance_value,
                             electrostatic_force_per_v2, force_per_v2_value,
                             paddle_capacitance, paddle_capacitance_quadrature,
                             parallel_plate_capacitance, yp_from_capacitance)
from .errors import (DegenerateData, InsufficientData, InvalidParameter,
                     NoStableEquilibrium, OutOfRange, PaddleLabError,
                     TouchViolation)
from .extraction import (CVDataset, CVRow, External, FilmFitResult, Simulated,
                         deflection_series, fit_film_parameters, load_cv_csv,
                         simulate_cv)
from .instrument import (BridgeConfig, CalibrationFit, MeasurementSample,
                         NoiseModel, balance_bridge, bridge_output, calibrate,
                         calibration_table, measure_capacitance,
                         resolvable_displacement)
from .mechanics import (EquilibriumSolution, ForceBreakdown, PullInResult,
                        StressProfile, SweepRecord, SweepResult, bending_stress,
                        compliance, film_force, film_stiffness, pull_in_voltage,
                        solve_equilibrium, strain_coupling, stress_profile,
                        sweep_voltage, total_force, total_force_curve,
                        zero_voltage_equilibrium)
from .model import (DeflectionState, FilmSpec, PaddleGeometry, PaddleModel,
                    PhysicalConstants, SubstrateMaterial, ValidatedModel,
                    build_model, deflection_state, load_model_json,
                    model_from_dict, model_to_dict, touch_limits, validate_model,
                    yb_from_yp, yp_from_yb)

__all__ = [
    "__version__",
    # errors
    "PaddleLabError", "InvalidParameter", "TouchViolation", "OutOfRange",
    "NoStableEquilibrium", "InsufficientData", "DegenerateData",
    # model
    "PhysicalConstants", "PaddleGeometry", "SubstrateMaterial", "FilmSpec",
    "PaddleModel", "ValidatedModel", "DeflectionState", "build_model",
    "validate_model", "model_to_dict", "model_from_dict", "load_model_json",
    "touch_limits", "deflection_state", "yb_from_yp", "yp_from_yb",
    # electrostatics
    "Electrode", "CapacitanceReading", "ForcePerV2", "parallel_plate_capacitance",
    "paddle_capacitance", "capacitance_value", "capacitance_curve",
    "electrostatic_force_per_v2", "force_per_v2_value",
    "paddle_capacitance_quadrature", "yp_from_capacitance",
    # mechanics
    "StressProfile", "ForceBreakdown", "EquilibriumSolution", "SweepRecord",
    "SweepResult", "PullInResult", "bending_stress", "stress_profile",
    "compliance", "strain_coupling", "film_force", "film_stiffness",
    "total_force", "total_force_curve", "zero_voltage_equilibrium",
    "solve_equilibrium", "pull_in_voltage", "sweep_voltage",
    # instrument
    "BridgeConfig", "NoiseModel", "MeasurementSample", "CalibrationFit",
    "bridge_output", "balance_bridge", "measure_capacitance",
    "resolvable_displacement", "calibration_table", "calibrate",
    # extraction
    "CVRow", "CVDataset", "Simulated", "External", "FilmFitResult",
    "simulate_cv", "deflection_series", "load_cv_csv", "fit_film_parameters",
]
