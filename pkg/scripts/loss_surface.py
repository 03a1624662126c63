#!/usr/bin/env python3
"""Regenerate the loss-surface dataset.

Emits the fluctuation performance ratio at the working point (balanced
output mixer) over a grid of probe-arm transmission x input splitting
angle, using the CLI's sweep preset so the file format and manifest are
identical to `uil sweep`.  Prints a few corner values as a sanity check.
"""

import argparse
import csv
import math

from uil.cli import main as uil_main


def run(output: str) -> None:
    code = uil_main(["sweep", "--output", output])
    if code != 0:
        raise SystemExit(code)
    with open(output, newline="") as handle:
        rows = list(csv.DictReader(handle))
    levels = sorted({float(r["transmission"]) for r in rows})
    full_transmission = [r for r in rows if float(r["transmission"]) == levels[-1]]
    lossiest = [r for r in rows if float(r["transmission"]) == levels[0]]
    print(f"wrote {len(rows)} rows to {output}")
    print(f"  no loss, near-transparent splitter: rho_dI = {full_transmission[0]['rho_fluctuation']}")
    print(f"  no loss, steepest splitting:        rho_dI = {full_transmission[-1]['rho_fluctuation']}")
    print(f"  5% transmission, near-transparent:  rho_dI = {lossiest[0]['rho_fluctuation']}")
    balanced = min(full_transmission, key=lambda r: abs(float(r["theta1"]) - math.pi / 4))
    print(
        f"  closest row to balanced splitting (theta1 = {float(balanced['theta1']):.4f}): "
        f"rho_dI = {balanced['rho_fluctuation']}"
    )


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="loss_surface.csv")
    run(parser.parse_args().output)
