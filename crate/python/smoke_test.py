#!/usr/bin/env python3
"""Smoke test for the sda_py extension module.

Builds the cdylib if needed, loads it straight from the cargo target
directory, and exercises the main operations end to end.
"""
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    lib = ROOT / "target" / "debug" / "libsda_py.so"
    if not lib.exists():
        subprocess.run(
            ["cargo", "build", "-p", "sda-py"], cwd=ROOT, check=True
        )
    tmp = Path(tempfile.mkdtemp(prefix="sda_py_"))
    shutil.copy(lib, tmp / "sda_py.so")
    sys.path.insert(0, str(tmp))
    import sda_py

    return sda_py


def main():
    sda = load_module()

    # keygen / encrypt / decrypt
    pub, priv = sda.keygen(12, 1)
    c5 = sda.encrypt(pub, 5, 2)
    assert sda.decrypt(pub, priv, c5) == 5

    # homomorphic addition and the single multiplication
    c3 = sda.encrypt(pub, 3, 3)
    assert sda.decrypt(pub, priv, sda.hom_add(pub, c5, c3, 4)) == 8
    assert sda.decrypt(pub, priv, sda.hom_mul(pub, c5, c3, 5)) == 15

    # aggregation pipeline over a seeded topology
    topo = sda.build_topology(40, 4, 7)
    readings = [i % 4 for i in range(40)]
    truth, dec = sda.run_pipeline("variance", topo, pub, priv, readings, 8)
    assert truth[0] * dec[1] == dec[0] * truth[1], (truth, dec)

    # watermarking: embed, verify, attack, re-check
    pgm = sda.wm_attack(
        bytes(f"P2\n64 64\n255\n{' '.join(['128'] * 4096)}\n", "ascii"),
        "noise",
        20.0,
        9,
    )
    marked = sda.wm_embed(pgm, key=42, mode="auth")
    assert sda.wm_check(marked, key=42, mode="auth") == 100.0
    attacked = sda.wm_attack(marked, "zero", 16.0, 0)
    assert sda.wm_check(attacked, key=42, mode="auth") < 100.0

    print("smoke test ok")


if __name__ == "__main__":
    main()
