#!/usr/bin/env python3
"""Generate frozen UTM forward-projection oracle vectors.

Independent high-precision Transverse Mercator implementation built on
the exact conformal-latitude formulation with sixth-order Krueger alpha
coefficients, evaluated at 50 decimal digits via mpmath.  Inside a zone
this is accurate to nanometers, far beyond the 5 mm bound the library
implementation is held to, and it shares no code with the library.

Requires mpmath (pre-installed alongside sympy in most environments).
Output is pasted into tests/test_geodesy.py as UTM_ORACLE_VECTORS.
"""

import mpmath as mp

mp.mp.dps = 50

A_AXIS = mp.mpf(6378137)
FLATTENING = 1 / mp.mpf("298.257223563")
K0 = mp.mpf("0.9996")
FALSE_E = mp.mpf(500000)
FALSE_N_SOUTH = mp.mpf(10000000)


def krueger_alphas(n):
    n2, n3, n4, n5, n6 = n**2, n**3, n**4, n**5, n**6
    return [
        n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180
        - 127 * n5 / 288 + 7891 * n6 / 37800,
        13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630
        - 1983433 * n6 / 1935360,
        61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880
        + 167603 * n6 / 181440,
        49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
        34729 * n5 / 80640 - 3418889 * n6 / 1995840,
        212378941 * n6 / 319334400,
    ]


def utm_forward_oracle(lat_deg, lon_deg, zone):
    lat = mp.radians(mp.mpf(str(lat_deg)))
    lon0 = mp.radians(mp.mpf(-183 + 6 * zone))
    lon = mp.radians(mp.mpf(str(lon_deg)))

    f = FLATTENING
    n = f / (2 - f)
    e = mp.sqrt(f * (2 - f))
    big_a = A_AXIS / (1 + n) * (1 + n**2 / 4 + n**4 / 64 + n**6 / 256)

    t = mp.sinh(mp.asinh(mp.tan(lat)) - e * mp.atanh(e * mp.sin(lat)))
    lam = lon - lon0
    xi_p = mp.atan2(t, mp.cos(lam))
    eta_p = mp.asinh(mp.sin(lam) / mp.sqrt(t * t + mp.cos(lam) ** 2))

    xi = xi_p
    eta = eta_p
    for j, alpha in enumerate(krueger_alphas(n), start=1):
        xi += alpha * mp.sin(2 * j * xi_p) * mp.cosh(2 * j * eta_p)
        eta += alpha * mp.cos(2 * j * xi_p) * mp.sinh(2 * j * eta_p)

    easting = FALSE_E + K0 * big_a * eta
    northing = K0 * big_a * xi
    if lat_deg < 0:
        northing += FALSE_N_SOUTH
    return easting, northing


POINTS = [
    (0.0, 15.0, 33),
    (0.0, 15.5, 33),
    (47.0, 15.0, 33),
    (47.0, 16.0, 33),
    (47.0, 12.5, 33),
    (47.123456, 15.654321, 33),
    (40.0, -74.5, 18),
    (-33.9, 18.4, 34),
    (60.0, 14.0, 33),
    (10.0, 13.2, 33),
    (47.05, 15.45, 33),
    (38.5, -3.2, 30),
]


def main():
    print("UTM_ORACLE_VECTORS = [")
    print("    # (lat, lon, zone, easting_m, northing_m)")
    for lat, lon, zone in POINTS:
        e, n = utm_forward_oracle(lat, lon, zone)
        print(f"    ({lat!r}, {lon!r}, {zone}, "
              f"{mp.nstr(e, 15)}, {mp.nstr(n, 15)}),")
    print("]")


if __name__ == "__main__":
    main()
