"""Physical parameters, sign conventions, and paddle kinematics.

Single source of truth for every symbol used by the other modules. All
quantities are SI base units. Sign convention: deflection y is positive
toward the top (capacitor) electrode; tensile film stress deflects the
paddle upward; the bottom (deflection) electrode pulls downward.

The paddle is a rigid plate of length l_p (along the beam axis) and width
w_p hinged to the tip of a triangular beam of length l_b. Under a tip
deflection y_b the plate tilts with slope 2*y_b/l_b, so the plate center
moves by y_p = y_b*(1 + l_p/l_b) and the far edge by y_b*(1 + 2*l_p/l_b).
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .errors import InvalidParameter, TouchViolation

# Keys accepted in a JSON model file; omitted keys take the defaults below.
MODEL_JSON_KEYS = (
    "eps0", "l_b", "l_p", "w_p", "t_b", "b_root", "d_c", "d_e",
    "E_biaxial", "K", "E_F", "t_F", "A_F", "sigma0",
)


@dataclass(frozen=True)
class PhysicalConstants:
    eps0: float = 8.85e-12  # vacuum permittivity, F/m


@dataclass(frozen=True)
class PaddleGeometry:
    """Beam + paddle + electrode-gap geometry, meters.

    w_p defaults to l_p (square paddle), b_root to l_p (triangular beam
    whose root spans the paddle width), and d_e to d_c (symmetric gaps).
    """

    l_b: float = 3e-3       # beam length
    l_p: float = 5e-3       # paddle length along the beam axis
    w_p: float | None = None    # paddle width, default l_p
    t_b: float = 40e-6      # beam thickness
    b_root: float | None = None  # beam width at the root, default l_p
    d_c: float = 100e-6     # flat-paddle gap to the top (capacitor) electrode
    d_e: float | None = None    # flat-paddle gap to the bottom electrode, default d_c

    def __post_init__(self):
        if self.w_p is None:
            object.__setattr__(self, "w_p", self.l_p)
        if self.b_root is None:
            object.__setattr__(self, "b_root", self.l_p)
        if self.d_e is None:
            object.__setattr__(self, "d_e", self.d_c)

    @property
    def center_ratio(self) -> float:
        """y_p / y_b for the rigid tilting plate."""
        return 1.0 + self.l_p / self.l_b

    @property
    def edge_ratio(self) -> float:
        """y_edge / y_b for the rigid tilting plate."""
        return 1.0 + 2.0 * self.l_p / self.l_b


@dataclass(frozen=True)
class SubstrateMaterial:
    E_biaxial: float = 180e9  # substrate biaxial modulus, Pa
    K: float = 0.3            # dimensionless beam geometric factor


@dataclass(frozen=True)
class FilmSpec:
    """Deposited film: modulus, thickness, strained area, residual stress.

    A_F defaults to half the beam's root width times its length (the full
    triangular beam face); the default is resolved when the film is
    attached to a PaddleModel, since it needs the geometry.
    """

    E_F: float = 70e9        # film modulus, Pa
    t_F: float = 200e-9      # film thickness, m
    A_F: float | None = None  # strained film area, m^2
    sigma0: float = 0.0      # residual (initial) film stress, Pa

    @property
    def eps_F0(self) -> float:
        """Initial film strain sigma0 / E_F."""
        return self.sigma0 / self.E_F

    @property
    def V_F(self) -> float:
        """Film volume t_F * A_F, m^3."""
        if self.A_F is None:
            raise InvalidParameter("A_F", "unresolved; attach the film to a model first")
        return self.t_F * self.A_F


@dataclass(frozen=True)
class PaddleModel:
    constants: PhysicalConstants = PhysicalConstants()
    geom: PaddleGeometry = PaddleGeometry()
    substrate: SubstrateMaterial = SubstrateMaterial()
    film: FilmSpec = FilmSpec()

    def __post_init__(self):
        if self.film.A_F is None:
            film = dataclasses.replace(
                self.film, A_F=0.5 * self.geom.b_root * self.geom.l_b)
            object.__setattr__(self, "film", film)


@dataclass(frozen=True)
class ValidatedModel:
    """A PaddleModel that passed validation, with derived quantities cached.

    Immutable after construction; safe to share across workers.
    """

    constants: PhysicalConstants
    geom: PaddleGeometry
    substrate: SubstrateMaterial
    film: FilmSpec
    eps_F0: float
    V_F: float
    y_p_min: float
    y_p_max: float

    @property
    def model(self) -> PaddleModel:
        return PaddleModel(self.constants, self.geom, self.substrate, self.film)


def _require_positive(name: str, value: float) -> None:
    if not value > 0.0:
        raise InvalidParameter(name, f"must be > 0, got {value!r}")


def validate_model(model: PaddleModel) -> ValidatedModel:
    """Check all parameter invariants and cache the derived quantities."""
    g = model.geom
    _require_positive("eps0", model.constants.eps0)
    for name in ("l_b", "l_p", "w_p", "t_b", "b_root", "d_c", "d_e"):
        _require_positive(name, getattr(g, name))
    if not g.t_b < g.d_c:
        raise InvalidParameter("t_b", f"plate must be thin relative to the gap (t_b={g.t_b} >= d_c={g.d_c})")
    _require_positive("E_biaxial", model.substrate.E_biaxial)
    _require_positive("K", model.substrate.K)
    _require_positive("E_F", model.film.E_F)
    if model.film.t_F < 0.0:
        raise InvalidParameter("t_F", f"must be >= 0, got {model.film.t_F!r}")
    _require_positive("A_F", model.film.A_F)

    y_p_min, y_p_max = touch_limits(g)
    return ValidatedModel(
        constants=model.constants,
        geom=g,
        substrate=model.substrate,
        film=model.film,
        eps_F0=model.film.eps_F0,
        V_F=model.film.V_F,
        y_p_min=y_p_min,
        y_p_max=y_p_max,
    )


def build_model(**overrides) -> ValidatedModel:
    """Build and validate a model from flat keyword overrides of the defaults.

    Accepts exactly the JSON-file keys (eps0, l_b, ..., sigma0).
    """
    unknown = set(overrides) - set(MODEL_JSON_KEYS)
    if unknown:
        raise InvalidParameter(sorted(unknown)[0], "unknown model parameter")
    geom_keys = ("l_b", "l_p", "w_p", "t_b", "b_root", "d_c", "d_e")
    sub_keys = ("E_biaxial", "K")
    film_keys = ("E_F", "t_F", "A_F", "sigma0")
    constants = PhysicalConstants(**{k: v for k, v in overrides.items() if k == "eps0"})
    geom = PaddleGeometry(**{k: v for k, v in overrides.items() if k in geom_keys})
    substrate = SubstrateMaterial(**{k: v for k, v in overrides.items() if k in sub_keys})
    film = FilmSpec(**{k: v for k, v in overrides.items() if k in film_keys})
    return validate_model(PaddleModel(constants, geom, substrate, film))


def model_to_dict(model: PaddleModel | ValidatedModel) -> dict:
    """Flat JSON-ready dict with exactly the documented keys."""
    return {
        "eps0": model.constants.eps0,
        "l_b": model.geom.l_b,
        "l_p": model.geom.l_p,
        "w_p": model.geom.w_p,
        "t_b": model.geom.t_b,
        "b_root": model.geom.b_root,
        "d_c": model.geom.d_c,
        "d_e": model.geom.d_e,
        "E_biaxial": model.substrate.E_biaxial,
        "K": model.substrate.K,
        "E_F": model.film.E_F,
        "t_F": model.film.t_F,
        "A_F": model.film.A_F,
        "sigma0": model.film.sigma0,
    }


def model_from_dict(data: dict) -> ValidatedModel:
    for key, value in data.items():
        if key not in MODEL_JSON_KEYS:
            raise InvalidParameter(key, "unknown model key")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise InvalidParameter(key, f"must be a number, got {value!r}")
    return build_model(**data)


def load_model_json(path) -> ValidatedModel:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParameter("config", f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidParameter("config", "model file must contain a JSON object")
    return model_from_dict(data)


# --- kinematics ---

def yb_from_yp(y_p: float, geom: PaddleGeometry) -> float:
    """Beam-tip deflection for a given paddle-center deflection."""
    return y_p / geom.center_ratio


def yp_from_yb(y_b: float, geom: PaddleGeometry) -> float:
    """Paddle-center deflection for a given beam-tip deflection."""
    return y_b * geom.center_ratio


def slope_from_yb(y_b: float, geom: PaddleGeometry) -> float:
    """Small-angle tilt of the paddle plane, rad."""
    return 2.0 * y_b / geom.l_b


def touch_limits(geom: PaddleGeometry) -> tuple[float, float]:
    """(y_p_min, y_p_max) at which the paddle's far edge meets an electrode."""
    lever = geom.center_ratio / geom.edge_ratio
    return -geom.d_e * lever, geom.d_c * lever


@dataclass(frozen=True)
class DeflectionState:
    """One paddle pose: center deflection plus the derived tilt quantities."""

    y_p: float      # paddle-center deflection, m (+ toward top electrode)
    y_b: float      # beam-tip deflection, m
    slope: float    # paddle tilt, rad
    y_edge: float   # far-edge deflection, m
    geom: PaddleGeometry

    def gap_top(self, x: float) -> float:
        """Local gap to the top electrode at distance x from the paddle root."""
        return self.geom.d_c - self.y_b - self.slope * x

    def gap_bottom(self, x: float) -> float:
        """Local gap to the bottom electrode at distance x from the paddle root."""
        return self.geom.d_e + self.y_b + self.slope * x


def deflection_state(y_p: float, geom: PaddleGeometry) -> DeflectionState:
    """Build the tilt state for y_p, rejecting poses at or past electrode touch."""
    y_b = yb_from_yp(y_p, geom)
    y_edge = y_b * geom.edge_ratio
    if not (-geom.d_e < y_edge < geom.d_c):
        raise TouchViolation(
            f"y_p={y_p!r} puts the paddle edge at {y_edge!r}, outside (-{geom.d_e!r}, {geom.d_c!r})")
    return DeflectionState(y_p=y_p, y_b=y_b, slope=slope_from_yb(y_b, geom),
                           y_edge=y_edge, geom=geom)
