"""Largest empty circle containing a query point, for point sets and simple polygons."""

import json as _json

from ._core import (
    Circle,
    ConvexIndex,
    Index,
    PlicaIndex,
    PointsIndex,
    PolygonIndex,
    QmecError,
    QueryResult,
    load_input,
    oracle_plica,
    oracle_points,
    oracle_polygon,
    render_svg,
)


def stats(index):
    """Build statistics of an Index as a dict."""
    return _json.loads(index.stats_json())


__all__ = [
    "Circle",
    "ConvexIndex",
    "Index",
    "PlicaIndex",
    "PointsIndex",
    "PolygonIndex",
    "QmecError",
    "QueryResult",
    "load_input",
    "oracle_plica",
    "oracle_points",
    "oracle_polygon",
    "render_svg",
    "stats",
]
