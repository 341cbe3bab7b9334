import pytest

from contactgeo.models import build_model


@pytest.fixture(scope="session")
def flat_model():
    return build_model("flat_cosymplectic")


@pytest.fixture(scope="session")
def s5_model():
    return build_model("s5_se")


@pytest.fixture(scope="session")
def anc_model():
    return build_model("s5_anc")


@pytest.fixture(scope="session")
def s5_points(s5_model):
    return s5_model.sampler(8, seed=42)


def pts_on_chart(model, points, cid=None):
    cid = cid or next(iter(model.charts))
    out = [p for p in points if p.chart_id == cid]
    return cid, out
