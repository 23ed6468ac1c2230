"""Signal energies on Riemannian manifolds.

Computes 1- and 2-energies of discretized signals (curves and surfaces
embedded in ambient manifolds), checks the associated upper and lower
energy bounds, evaluates the Fisher metric of 1-D Gaussians against its
closed forms, and minimizes the relative ratio variance objective to
produce graph quasi-embeddings.
"""

from . import (  # noqa: F401
    cli,
    configspace,
    energy,
    gaussian,
    geometry,
    graphembed,
    mesh,
    verify,
)

__version__ = "0.1.0"
