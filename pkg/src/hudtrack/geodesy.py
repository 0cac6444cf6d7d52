"""Coordinate processing: UTM projection, Haversine, raw scaled degrees.

Three comparable ways to turn WGS84 track points into meters:

  * ``UTM``: Transverse Mercator forward projection on the WGS84
    ellipsoid (series expansion, sub-centimeter inside a zone), then
    plane Euclidean distance.
  * ``HAVERSINE``: great-circle distance on a sphere of mean radius R.
  * ``RAW_DEGREES``: Euclidean distance in degree space scaled by a
    single meters-per-degree constant K (the naive method whose bias
    the comparison reports quantify).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import OutOfZone, TimeOrderError, TooShort

if TYPE_CHECKING:  # pragma: no cover
    from .trajectory import FlightTrack

__all__ = ["GeoPoint", "ProjectedPoint", "DistanceMethod", "MethodParams",
           "EARTH_RADIUS_M", "METERS_PER_DEGREE",
           "utm_zone_for", "central_meridian_deg", "utm_forward",
           "haversine_m", "raw_deg_m", "destination_point",
           "distance_m", "path_length", "segment_speeds", "project_track"]

# WGS84 ellipsoid
_A = 6_378_137.0
_F = 1.0 / 298.257223563
_B = _A * (1.0 - _F)
_E2 = _F * (2.0 - _F)

_K0 = 0.9996
_FALSE_EASTING = 500_000.0
_FALSE_NORTHING_SOUTH = 10_000_000.0

EARTH_RADIUS_M = 6_371_008.8      # IUGG mean radius
METERS_PER_DEGREE = 111_320.0     # raw-degree scale constant


class DistanceMethod(enum.Enum):
    UTM = "utm"
    HAVERSINE = "haversine"
    RAW_DEGREES = "raw_degrees"


@dataclass(frozen=True)
class MethodParams:
    """Pinned constants, echoed into every report for reproducibility."""

    earth_radius_m: float = EARTH_RADIUS_M
    meters_per_degree: float = METERS_PER_DEGREE
    utm_zone_override: int | None = None


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class ProjectedPoint:
    easting: float
    northing: float
    zone: int
    hemisphere: str  # "N" | "S"


def utm_zone_for(lon: float) -> int:
    """6-degree zone number for a longitude, clamped to [1, 60]."""
    zone = int(math.floor((lon + 180.0) / 6.0)) + 1
    return min(max(zone, 1), 60)


def central_meridian_deg(zone: int) -> float:
    return -183.0 + 6.0 * zone


def _meridian_arc(phi: float) -> float:
    """Ellipsoidal distance from the equator to latitude ``phi`` (radians)."""
    n = (_A - _B) / (_A + _B)
    n2, n3, n4, n5 = n * n, n ** 3, n ** 4, n ** 5
    alpha = (_A + _B) / 2.0 * (1.0 + n2 / 4.0 + n4 / 64.0)
    beta = -3.0 * n / 2.0 + 9.0 * n3 / 16.0 - 3.0 * n5 / 32.0
    gamma = 15.0 * n2 / 16.0 - 15.0 * n4 / 32.0
    delta = -35.0 * n3 / 48.0 + 105.0 * n5 / 256.0
    epsilon = 315.0 * n4 / 512.0
    return alpha * (phi + beta * math.sin(2 * phi) + gamma * math.sin(4 * phi)
                    + delta * math.sin(6 * phi) + epsilon * math.sin(8 * phi))


def utm_forward(p: GeoPoint, zone: int) -> ProjectedPoint:
    """WGS84 lat/lon to UTM easting/northing (series expansion).

    Accurate to well under 5 mm anywhere inside the zone; rejects points
    more than 9 degrees from the central meridian.
    """
    if not 1 <= zone <= 60:
        raise ValueError(f"zone {zone} outside [1, 60]")
    lam0 = math.radians(central_meridian_deg(zone))
    dlon = p.lon - central_meridian_deg(zone)
    if abs(dlon) > 9.0:
        raise OutOfZone(f"longitude {p.lon} is {abs(dlon):.1f} deg from the "
                        f"central meridian of zone {zone}")
    phi = math.radians(p.lat)
    lam = math.radians(p.lon)

    ep2 = (_A * _A - _B * _B) / (_B * _B)
    cos_phi = math.cos(phi)
    nu2 = ep2 * cos_phi * cos_phi
    n_rad = _A * _A / (_B * math.sqrt(1.0 + nu2))
    t = math.tan(phi)
    t2 = t * t
    l = lam - lam0

    l3 = 1.0 - t2 + nu2
    l4 = 5.0 - t2 + 9.0 * nu2 + 4.0 * nu2 * nu2
    l5 = 5.0 - 18.0 * t2 + t2 * t2 + 14.0 * nu2 - 58.0 * t2 * nu2
    l6 = 61.0 - 58.0 * t2 + t2 * t2 + 270.0 * nu2 - 330.0 * t2 * nu2
    l7 = 61.0 - 479.0 * t2 + 179.0 * t2 * t2 - t2 * t2 * t2
    l8 = 1385.0 - 3111.0 * t2 + 543.0 * t2 * t2 - t2 * t2 * t2

    x = (n_rad * cos_phi * l
         + n_rad / 6.0 * cos_phi ** 3 * l3 * l ** 3
         + n_rad / 120.0 * cos_phi ** 5 * l5 * l ** 5
         + n_rad / 5040.0 * cos_phi ** 7 * l7 * l ** 7)
    y = (_meridian_arc(phi)
         + t / 2.0 * n_rad * cos_phi ** 2 * l ** 2
         + t / 24.0 * n_rad * cos_phi ** 4 * l4 * l ** 4
         + t / 720.0 * n_rad * cos_phi ** 6 * l6 * l ** 6
         + t / 40320.0 * n_rad * cos_phi ** 8 * l8 * l ** 8)

    easting = _K0 * x + _FALSE_EASTING
    northing = _K0 * y
    hemisphere = "N" if p.lat >= 0 else "S"
    if hemisphere == "S":
        northing += _FALSE_NORTHING_SOUTH
    return ProjectedPoint(easting, northing, zone, hemisphere)


def haversine_m(a: GeoPoint, b: GeoPoint, radius_m: float = EARTH_RADIUS_M) -> float:
    """Great-circle distance on a sphere of ``radius_m``."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = phi2 - phi1
    dlam = math.radians(b.lon - a.lon)
    s = (math.sin(dphi / 2.0) ** 2
         + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2)
    return 2.0 * radius_m * math.asin(min(1.0, math.sqrt(s)))


def raw_deg_m(a: GeoPoint, b: GeoPoint, k: float = METERS_PER_DEGREE) -> float:
    """Euclidean distance in raw degree space, scaled by K meters/degree."""
    return k * math.hypot(b.lat - a.lat, b.lon - a.lon)


def destination_point(start: GeoPoint, bearing_deg: float, distance_m: float,
                      radius_m: float = EARTH_RADIUS_M) -> GeoPoint:
    """Great-circle destination; the exact inverse of ``haversine_m``."""
    phi1 = math.radians(start.lat)
    lam1 = math.radians(start.lon)
    theta = math.radians(bearing_deg)
    delta = distance_m / radius_m
    phi2 = math.asin(math.sin(phi1) * math.cos(delta)
                     + math.cos(phi1) * math.sin(delta) * math.cos(theta))
    lam2 = lam1 + math.atan2(math.sin(theta) * math.sin(delta) * math.cos(phi1),
                             math.cos(delta) - math.sin(phi1) * math.sin(phi2))
    lon = math.degrees(lam2)
    if lon > 180.0:
        lon -= 360.0
    elif lon < -180.0:
        lon += 360.0
    return GeoPoint(math.degrees(phi2), lon)


# --- track-level operations -------------------------------------------------

def _track_points(track: "FlightTrack") -> list[GeoPoint]:
    return [GeoPoint(r.lat, r.lon) for r in track.records]


def project_track(track: "FlightTrack",
                  params: MethodParams = MethodParams()) -> list[ProjectedPoint]:
    """Project every record into one UTM zone (auto from median longitude)."""
    pts = _track_points(track)
    if params.utm_zone_override is not None:
        zone = params.utm_zone_override
    else:
        lons = sorted(p.lon for p in pts)
        zone = utm_zone_for(lons[len(lons) // 2])
    return [utm_forward(p, zone) for p in pts]


def distance_m(a: GeoPoint, b: GeoPoint, method: DistanceMethod,
               params: MethodParams = MethodParams(),
               zone: int | None = None) -> float:
    if method is DistanceMethod.HAVERSINE:
        return haversine_m(a, b, params.earth_radius_m)
    if method is DistanceMethod.RAW_DEGREES:
        return raw_deg_m(a, b, params.meters_per_degree)
    z = zone if zone is not None else (
        params.utm_zone_override if params.utm_zone_override is not None
        else utm_zone_for((a.lon + b.lon) / 2.0))
    pa, pb = utm_forward(a, z), utm_forward(b, z)
    return math.hypot(pb.easting - pa.easting, pb.northing - pa.northing)


def _pairwise_distances(track: "FlightTrack", method: DistanceMethod,
                        params: MethodParams) -> list[float]:
    pts = _track_points(track)
    if method is DistanceMethod.UTM:
        proj = project_track(track, params)
        return [math.hypot(proj[i + 1].easting - proj[i].easting,
                           proj[i + 1].northing - proj[i].northing)
                for i in range(len(proj) - 1)]
    if method is DistanceMethod.HAVERSINE:
        return [haversine_m(pts[i], pts[i + 1], params.earth_radius_m)
                for i in range(len(pts) - 1)]
    return [raw_deg_m(pts[i], pts[i + 1], params.meters_per_degree)
            for i in range(len(pts) - 1)]


def path_length(track: "FlightTrack", method: DistanceMethod,
                params: MethodParams = MethodParams()) -> float:
    """Sum of consecutive point distances, meters."""
    if len(track.records) < 2:
        raise TooShort("path length needs at least 2 points")
    return float(sum(_pairwise_distances(track, method, params)))


def segment_speeds(track: "FlightTrack", method: DistanceMethod,
                   params: MethodParams = MethodParams()
                   ) -> list[tuple[float, float]]:
    """Per-segment speeds as (t_end_s, km/h)."""
    records = track.records
    if len(records) < 2:
        raise TooShort("segment speeds need at least 2 points")
    times = [r.t for r in records]
    for t0, t1 in zip(times, times[1:]):
        if t1 <= t0:
            raise TimeOrderError(f"timestamps not strictly increasing at t={t1}")
    dists = _pairwise_distances(track, method, params)
    return [(times[i + 1], 3.6 * d / (times[i + 1] - times[i]))
            for i, d in enumerate(dists)]
