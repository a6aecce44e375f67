# tests/conftest.py - Shared rings and census fixtures
import pytest

from src.config import CensusConfig
from src.core.chainring import ChainRing, RingSpec
from src.core.mat2 import MatrixRing2
from src.core.quaternion import QuaternionRing
from src.intelligence.census import CarrierTarget, CensusRunner


@pytest.fixture(scope="session")
def f3():
    return ChainRing(RingSpec.trunc_poly(3, 1, 1))


@pytest.fixture(scope="session")
def z4():
    return ChainRing(RingSpec.zpn(2, 2))


@pytest.fixture(scope="session")
def z9():
    return ChainRing(RingSpec.zpn(3, 2))


@pytest.fixture(scope="session")
def z25():
    return ChainRing(RingSpec.zpn(5, 2))


@pytest.fixture(scope="session")
def z27():
    return ChainRing(RingSpec.zpn(3, 3))


@pytest.fixture(scope="session")
def z81():
    return ChainRing(RingSpec.zpn(3, 4))


@pytest.fixture(scope="session")
def z729():
    return ChainRing(RingSpec.zpn(3, 6))


@pytest.fixture(scope="session")
def gf9_y3():
    return ChainRing(RingSpec.trunc_poly(3, 2, 3, "t^2+1"))


@pytest.fixture(scope="session")
def f2_y2():
    return ChainRing(RingSpec.trunc_poly(2, 1, 2))


@pytest.fixture(scope="session")
def gr4():
    return ChainRing(RingSpec.galois(2, 2, 2, "t^2+t+1"))


@pytest.fixture(scope="session")
def gf9():
    return ChainRing(RingSpec.trunc_poly(3, 2, 1, "t^2+1"))


@pytest.fixture(scope="session")
def gf9_y2():
    return ChainRing(RingSpec.trunc_poly(3, 2, 2, "t^2+1"))


@pytest.fixture(scope="session")
def gr9():
    return ChainRing(RingSpec.galois(3, 2, 2, "t^2+1"))


@pytest.fixture(scope="session")
def small_rings(f3, z4, z9, z27, gf9):
    return [f3, z4, z9, z27, gf9]


@pytest.fixture(scope="session")
def all_rings(small_rings, z25, gf9_y2, gr9):
    return small_rings + [z25, gf9_y2, gr9]


@pytest.fixture(scope="session")
def m_z9(z9):
    return MatrixRing2(z9)


@pytest.fixture(scope="session")
def h_z9(z9):
    return QuaternionRing(z9)


@pytest.fixture(scope="session")
def config():
    return CensusConfig()


@pytest.fixture(scope="session")
def closure_f3(f3, config):
    return CensusRunner(f3, config).brute_products_census(CarrierTarget.M2)


@pytest.fixture(scope="session")
def closure_z9(z9, config):
    return CensusRunner(z9, config).brute_products_census(CarrierTarget.M2)


@pytest.fixture(scope="session")
def partition_z9(z9, config):
    return CensusRunner(z9, config).brute_orbit_partition()
