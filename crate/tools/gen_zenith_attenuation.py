#!/usr/bin/env python3
"""Regenerate crates/core/data/zenith_attenuation.csv.

Zenith gaseous attenuation (oxygen + water vapour) from the ITU-R P.676
line-by-line method integrated through the ITU-R P.835 mean annual global
reference atmosphere (sea level: 1013.25 hPa, 288.15 K, 7.5 g/m^3), as
implemented by the `itur` package (pip install itur).
"""
import sys
import warnings

import itur.models.itu676 as p676

warnings.filterwarnings("ignore")


def main(path):
    with open(path, "w") as out:
        out.write("frequency_ghz,zenith_db\n")
        for f in range(1, 101):
            a = p676.gaseous_attenuation_slant_path(
                f, 90.0, 7.5, 1013.25, 288.15, mode="exact"
            )
            out.write(f"{f},{a.value:.6f}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/zenith_attenuation.csv")
