import pytest

from stadium_map import CollocationConfig, DiskMap, DomainGeometry, solve


@pytest.fixture(scope="session")
def stadium_256():
    return solve(DomainGeometry.stadium(1.0), CollocationConfig(256))


@pytest.fixture(scope="session")
def stadium_map_256(stadium_256):
    return DiskMap(stadium_256)


@pytest.fixture(scope="session")
def stadium_64():
    return solve(DomainGeometry.stadium(1.0), CollocationConfig(64))
