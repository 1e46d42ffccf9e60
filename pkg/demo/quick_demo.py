#!/usr/bin/env python3
"""
Quick varmetrics Demo

Runs one call of each command through the command registry and prints the
results. The Monte Carlo step uses a small sample so the demo finishes in
seconds; pass --desk to use the configured profile sizes instead.
"""

import asyncio
import os
import sys
import tempfile

from dotenv import load_dotenv

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from varmetrics import command_registry
from varmetrics.config import settings
from varmetrics.output import render_text


async def _step(label: str, command: str, args: dict) -> None:
    print(f"\n{label} {command} {args}")
    try:
        result = await command_registry.call_command(command, args)
        for line in render_text(result, 6).splitlines()[:12]:
            print(f"   {line}")
    except Exception as e:
        print(f"   ❌ Error: {e}")


async def run_demo(desk: bool) -> None:
    print("🌟 varmetrics - Quick Demo")
    print("=" * 50)

    print("📊 Current Configuration:")
    print(f"   • Precision: {settings.precision}")
    print(f"   • Quadrature tolerance: {settings.quad_tol:g}")
    print(f"   • Seed: {settings.seed}")
    print(f"   • Profile: {settings.profile} {settings.profile_sizes()}")

    sim = {"dist": "normal(0,1)", "estimator": "des", "p": 0.9}
    if not desk:
        sim.update(n=1000, reps=200)

    with tempfile.TemporaryDirectory() as tmp:
        losses = os.path.join(tmp, "losses.csv")
        await _step("1️⃣", "measure", {"dist": "normal(0,1)", "measure": "dq", "p": 0.95})
        await _step("2️⃣", "measure", {"dist": "discrete(-1:1/2,1:1/2)", "measure": "dex", "p": 0.9})
        await _step("3️⃣", "asymvar", {"dist": "pareto(4)", "estimator": "des", "p": 0.9})
        await _step("4️⃣", "simulate", sim)
        await _step("5️⃣", "calibrate", {"dist": "t(4)", "p": 0.95})
        await _step("6️⃣", "synth-losses", {"dist": "t(4)", "n": 600, "seed": 7, "out": losses})
        await _step("7️⃣", "rolling", {"losses": losses})
        await _step("8️⃣", "selftest", {"suite": "identities"})

    print("\n✅ Demo Complete!")
    print("\n💡 Next Steps:")
    print("   • varmetrics selftest table1")
    print("   • varmetrics --help for the distribution grammar")


def main() -> None:
    load_dotenv()

    print("Loading varmetrics...")
    asyncio.run(run_demo("--desk" in sys.argv[1:]))


if __name__ == "__main__":
    main()
