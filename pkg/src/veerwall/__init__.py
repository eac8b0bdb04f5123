"""Flow graphs, walls and branched surfaces of veering triangulations."""

__version__ = "0.1.0"

from .errors import VeerwallError  # noqa: E402
from .triangulation import VeeringTriangulation  # noqa: E402

__all__ = ["VeerwallError", "VeeringTriangulation", "__version__"]
