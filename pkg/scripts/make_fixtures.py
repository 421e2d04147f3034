"""Regenerate the JSON fixtures shipped in fixtures/.

Run from the repository root:  python3 scripts/make_fixtures.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from xtcancel.bundle import characteristic_impedance, save_bundle
from xtcancel.fixtures import (fifty_ohm_network, pair_bundle, scalar_bundle,
                               six_wire_bundle, twelve_wire_bundle)
from xtcancel.termination import realize_network, save_network

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def write_link(name, payload):
    with open(os.path.join(OUT, name), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def main():
    os.makedirs(OUT, exist_ok=True)

    scalar = scalar_bundle(50.0, 2.0e8, name="scalar-50ohm")
    pair = pair_bundle(name="pair")
    six = six_wire_bundle(name="six")
    twelve = twelve_wire_bundle(name="twelve")
    for fname, bundle in (("scalar.json", scalar), ("pair.json", pair),
                          ("six.json", six), ("twelve.json", twelve)):
        save_bundle(bundle, os.path.join(OUT, fname))

    for fname, bundle in (("pair-network.json", pair), ("twelve-network.json", twelve)):
        basis, _ = characteristic_impedance(bundle)
        save_network(realize_network(basis.zc, vref=0.5), os.path.join(OUT, fname))

    save_network(fifty_ohm_network(12, vref=0.5), os.path.join(OUT, "twelve-50ohm.json"))

    write_link("link-scalar.json", {
        "segments": [{"bundle": "scalar.json", "length_m": 0.1016}],
        "drivers": {"rs_ohms": 0.0, "v_low": 0.0, "v_high": 1.0, "rise_s": 10e-12},
        "termination": "50ohm-scalar.json",
        "stimulus": {"data_rate": 16e9, "prbs_order": 7, "mode": "worst"},
    })
    save_network(fifty_ohm_network(1, vref=0.5), os.path.join(OUT, "50ohm-scalar.json"))

    write_link("link-pair.json", {
        "segments": [{"bundle": "pair.json", "length_m": 0.1016}],
        "drivers": {"rs_ohms": 0.0, "v_low": 0.0, "v_high": 1.0, "rise_s": 10e-12},
        "termination": "pair-network.json",
        "stimulus": {"data_rate": 16e9, "prbs_order": 7, "mode": "worst"},
    })

    write_link("link-twelve.json", {
        "segments": [{"bundle": "twelve.json", "length_m": 0.1016}],
        "drivers": {"rs_ohms": 1.67, "v_low": 0.0, "v_high": 1.0, "rise_s": 10e-12},
        "termination": "twelve-network.json",
        "stimulus": {"data_rate": 16e9, "prbs_order": 7, "mode": "random"},
    })

    print("fixtures written to", os.path.abspath(OUT))


if __name__ == "__main__":
    main()
