import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from photon_walks import LatticeSpec, build_single_hamiltonian, propagator  # noqa: E402

C_DEVICE = 5.0  # mm^-1
Z_DEVICE = 0.782  # mm: 0.7 mm coupling region + 82 um effective spreading-region length
CENTRE = 10


@pytest.fixture(scope="session")
def device():
    return LatticeSpec.uniform(21, C_DEVICE, length_mm=Z_DEVICE, label_offset=-10)


@pytest.fixture(scope="session")
def device_u(device):
    return propagator(build_single_hamiltonian(device), device.length_mm)
