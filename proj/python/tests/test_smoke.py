import math

import pytest

import qmec

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_square_sites():
    idx = qmec.PointsIndex(SQUARE, gamma=True, rpart=True)
    for query in (idx.query, idx.gamma_query, idx.rpart_query):
        r = query((0.5, 0.5))
        assert r.bounded
        assert r.circle.radius == pytest.approx(math.sqrt(0.5), abs=1e-12)
    far = idx.query((10, 10))
    assert not far.bounded
    assert far.direction is not None
    assert idx.num_voronoi == 1


def test_square_polygon_and_convex():
    want = 0.1 * (2 + math.sqrt(2))
    assert qmec.PolygonIndex(SQUARE).query((0.1, 0.1)).radius == pytest.approx(want, abs=1e-12)
    assert qmec.ConvexIndex(SQUARE).query((0.1, 0.1)).radius == pytest.approx(want, abs=1e-12)
    assert qmec.oracle_polygon(SQUARE, (0.1, 0.1)).radius == pytest.approx(want, abs=1e-12)


def test_errors_carry_codes():
    with pytest.raises(qmec.QmecError) as e:
        qmec.PolygonIndex(SQUARE).query((2, 2))
    assert e.value.code == "QueryOutsidePolygon"
    with pytest.raises(qmec.QmecError) as e:
        qmec.Index.build("polygon", [(0, 0), (1, 1), (1, 0), (0, 1)])
    assert e.value.code == "ValidationError"


def test_random_sites_match_oracle():
    import random

    rng = random.Random(3)
    sites = [(rng.random(), rng.random()) for _ in range(60)]
    idx = qmec.PointsIndex(sites, gamma=True, rpart=True, seed=5)
    for _ in range(100):
        q = (rng.random(), rng.random())
        want = qmec.oracle_points(sites, q)
        for got in (idx.query(q), idx.gamma_query(q), idx.rpart_query(q)):
            assert got.bounded == want.bounded
            if want.bounded:
                assert got.circle.radius == pytest.approx(want.circle.radius, rel=1e-9)


def test_plica():
    circles = [(0, 0, 1), (3, 0, 1)]
    p = qmec.PlicaIndex(circles)
    assert p.query((0.2, 0)) == 0
    assert p.query((3.5, 0)) == 1
    assert p.query((1.5, 0)) is None
    assert qmec.oracle_plica(circles, (1.5, 0)) is None


def test_index_round_trip(tmp_path):
    import random

    rng = random.Random(8)
    sites = [(rng.random(), rng.random()) for _ in range(80)]
    idx = qmec.Index.build("points", sites, gamma=True, rpart=True)
    path = str(tmp_path / "pts.qmec")
    idx.save(path)
    back = qmec.Index.load(path)
    again = qmec.Index.from_bytes(idx.to_bytes())
    for _ in range(50):
        q = (rng.random(), rng.random())
        for v in ("base", "gamma", "rpart"):
            assert idx.query_json(q, v) == back.query_json(q, v) == again.query_json(q, v)
    assert qmec.stats(back)["sites"] == 80


def test_svg_and_input(tmp_path):
    f = tmp_path / "sq.json"
    f.write_text('{"kind":"polygon","points":[[0,0],[1,0],[1,1],[0,1]],"queries":[[0.1,0.1]]}')
    doc = qmec.load_input(str(f))
    assert doc["kind"] == "polygon"
    idx = qmec.Index.build(doc["kind"], doc["points"])
    svg = qmec.render_svg(idx, query=doc["queries"][0])
    assert svg.count('class="axis"') == 4
    assert svg.count('<circle class="highlight"') == 1
