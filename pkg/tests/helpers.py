"""Random material builders shared by the test modules."""

import numpy as np

from lifshitz import Composite, Drude, Isotropic, Lorentz, Srr, Uniaxial, Vacuum


def random_model(rng, magnetic=False):
    kind = rng.integers(0, 4 if not magnetic else 3)
    damping = float(rng.uniform(0.0, 0.05))
    if magnetic:
        if kind == 0:
            return Vacuum()
        if kind == 1:
            return Lorentz(float(rng.uniform(0.01, 0.3)), float(rng.uniform(0.05, 0.5)), damping)
        return Srr(float(rng.uniform(0.05, 0.5)), float(rng.uniform(0.05, 0.5)), damping)
    if kind == 0:
        return Drude(float(rng.uniform(0.3, 1.5)), float(rng.uniform(1e-3, 0.05)))
    if kind == 1:
        return Lorentz(float(rng.uniform(0.05, 1.0)), float(rng.uniform(0.05, 1.0)), damping)
    if kind == 2:
        return Composite(float(rng.uniform(0, 1)), Drude(float(rng.uniform(0.3, 1.5)),
                                                         float(rng.uniform(1e-3, 0.05))),
                         Lorentz(float(rng.uniform(0.01, 0.5)), float(rng.uniform(0.05, 0.5)),
                                 damping))
    return Vacuum()


def random_medium(rng):
    if rng.uniform() < 0.7:
        return Isotropic(random_model(rng), random_model(rng, magnetic=True))
    return Uniaxial(random_model(rng), random_model(rng), random_model(rng, magnetic=True),
                    random_model(rng, magnetic=True))


def is_vacuum(medium):
    slots = ("eps", "mu") if isinstance(medium, Isotropic) else (
        "eps_par", "eps_perp", "mu_par", "mu_perp")
    return all(isinstance(getattr(medium, s), Vacuum) for s in slots)


def random_material(rng):
    """A random medium that is not plain vacuum."""
    while True:
        m = random_medium(rng)
        if not is_vacuum(m):
            return m
