"""Casimir-Lifshitz forces between dispersive, magnetodielectric and uniaxial half-spaces."""

__version__ = "0.1.0"

from .dispersion import (  # noqa: E402
    Composite,
    Drude,
    FrequencyScale,
    IdealConductor,
    IdealPermeable,
    Lorentz,
    ModelDomainError,
    Srr,
    Vacuum,
    eval_composite,
    eval_drude,
    eval_lorentz,
    eval_srr,
)
from .kramers_kronig import Tabulated, kk_to_imaginary_axis, load_table  # noqa: E402
from .reflection import (  # noqa: E402
    Isotropic,
    ReflectionMatrix,
    TransverseMode,
    Uniaxial,
    fresnel_isotropic,
    fresnel_uniaxial,
    reflection_for,
)
from .quadrature import (  # noqa: E402
    CavityConfig,
    ForceResult,
    QuadratureSettings,
    Sign,
    energy_per_area,
    force_per_area,
    spectral_profile,
)
