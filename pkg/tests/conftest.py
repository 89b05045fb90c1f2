import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mmtri import FisherSimplexSpace, ModelSpace, PointCloudSpace


@pytest.fixture(scope="session")
def unit_sphere():
    return ModelSpace("sphere", 2, curvature=1.0)


@pytest.fixture(scope="session")
def circle():
    return ModelSpace("sphere", 1, curvature=1.0)


@pytest.fixture(scope="session")
def plane10():
    return ModelSpace("euclidean", 2, extent=10.0)


@pytest.fixture(scope="session")
def hyperbolic3():
    return ModelSpace("hyperbolic", 2, curvature=-1.0, extent=3.0)


@pytest.fixture(scope="session")
def fisher3():
    return FisherSimplexSpace(3)


@pytest.fixture()
def quarter_circle_cloud():
    """Four points on the unit circle at exact quarter spacing (arc metric)."""
    D = np.array(
        [
            [0.0, np.pi / 2, np.pi, np.pi / 2],
            [np.pi / 2, 0.0, np.pi / 2, np.pi],
            [np.pi, np.pi / 2, 0.0, np.pi / 2],
            [np.pi / 2, np.pi, np.pi / 2, 0.0],
        ]
    )
    return PointCloudSpace(D)
