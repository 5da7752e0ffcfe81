"""测试公共夹具"""
from typing import Dict, Iterable, Optional, Sequence

import pytest

from app.city.builder import build_city
from app.config.settings import CitySettings, SyntheticCitySettings
from app.io.synthetic import synth_city
from app.models.agent import (
    FACILITY_CRITERIA,
    TRANSIT_CRITERIA,
    Criterion,
    HouseholdAgent,
    Importance,
    PreferenceProfile,
)
from app.models.city import Facility, FacilityKind, Zone


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 大规模验收测试")


def _make_zone(zone_id: int, x: float, y: float = 0.0, rent: float = 1.0, residential_area: float = 1000.0,
               air: int = 1, noise: int = 1, traffic: int = 0, employment: float = 10.0,
               coverage: Optional[Dict[str, float]] = None, area: float = 1.0) -> Zone:
    return Zone(
        id=zone_id,
        centroid=(float(x), float(y)),
        area=area,
        residential_area=residential_area,
        rent_per_m2=rent,
        air_class=air,
        noise_class=noise,
        traffic_code=traffic,
        employment=employment,
        transit_coverage=coverage or {"highway": 0.0, "bus": 0.0, "subway": 0.0},
    )


def _make_profile(flagged: Iterable[Criterion] = (), very: Iterable[Criterion] = ()) -> PreferenceProfile:
    very = set(very)
    flagged = set(flagged) | very | {Criterion.RENT}
    levels = {}
    for c in Criterion:
        if c in very:
            levels[c] = Importance.VERY_IMPORTANT
        elif c in flagged:
            levels[c] = Importance.IMPORTANT
        else:
            levels[c] = Importance.NOT_IMPORTANT
    fac = [c.value for c in FACILITY_CRITERIA if c in flagged]
    tra = [c.value for c in TRANSIT_CRITERIA if c in flagged]
    return PreferenceProfile(
        levels=levels,
        facility_weights={c.value: (1.0 / len(fac) if c.value in fac else 0.0) for c in FACILITY_CRITERIA},
        transit_weights={c.value: (1.0 / len(tra) if c.value in tra else 0.0) for c in TRANSIT_CRITERIA},
    )


def _make_agent(agent_id: int = 1, size: int = 2, income: float = 100.0, former_zone: int = 1,
                required_area: float = 10.0, workplaces: Sequence[int] = (), has_child: bool = False,
                rent_band=(0.0, 0.35), profile: Optional[PreferenceProfile] = None, month: int = 1,
                cars: int = 0) -> HouseholdAgent:
    ages = [35] * size if not has_child else [35] * (size - 1) + [8]
    return HouseholdAgent(
        id=agent_id,
        size=size,
        ages=ages,
        income=income,
        cars=cars,
        employees=len(workplaces),
        students=sum(1 for a in ages if 6 <= a <= 18),
        has_child=has_child,
        required_area=required_area,
        former_zone=former_zone,
        workplaces=list(workplaces),
        relocation_month=month,
        rent_band=tuple(rent_band),
        profile=profile or _make_profile(),
    )


@pytest.fixture
def make_zone():
    return _make_zone


@pytest.fixture
def make_profile():
    return _make_profile


@pytest.fixture
def make_agent():
    return _make_agent


@pytest.fixture
def line_city():
    """x轴上间隔1km的5个住宅小区, 租金1..5"""
    zones = [_make_zone(i, x=i - 1, rent=float(i)) for i in range(1, 6)]
    facilities = [Facility(1, FacilityKind.SHOPPING, (0.0, 0.0), 500.0)]
    return build_city(zones, facilities, None, CitySettings(adjacency_threshold_km=1.0))


@pytest.fixture(scope="session")
def small_synthetic():
    """6x6 合成城市及其人口统计"""
    return synth_city(SyntheticCitySettings(rows=6, cols=6), seed=7)


@pytest.fixture(scope="session")
def grid_100_scenario():
    """10x10 合成城市 (100个小区) 及其人口统计"""
    return synth_city(SyntheticCitySettings(rows=10, cols=10, non_residential_share=0.0), seed=11)


@pytest.fixture(scope="session")
def grid_100(grid_100_scenario):
    city, _ = grid_100_scenario
    return city
