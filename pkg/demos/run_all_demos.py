#!/usr/bin/env python3
"""
rxkit Demo Runner

Runs every demonstration script in sequence, pausing between them.
"""

import subprocess
import sys
from pathlib import Path

DEMOS = [
    ("demo_extractor_sizing.py", "Source model, photon ceiling, Toeplitz and Trevisan sizing"),
    ("demo_negative_control.py", "Drifting raw samples fail the battery; extracted bits pass"),
]


def run_demo(demo_name, description):
    """Run a single demo script with error handling."""
    print(f"\n{'=' * 80}")
    print(f"🎬 RUNNING: {demo_name}")
    print(f"📝 Description: {description}")
    print(f"{'=' * 80}")

    try:
        result = subprocess.run([sys.executable, f"demos/{demo_name}"], cwd=Path(__file__).parent.parent)
        if result.returncode == 0:
            print(f"\n✅ {demo_name} completed successfully!")
        else:
            print(f"\n❌ {demo_name} failed with return code {result.returncode}")
    except Exception as e:
        print(f"\n❌ Error running {demo_name}: {e}")

    print(f"\n{'=' * 80}")
    print("Press Enter to continue to next demo, or 'q' to quit...")
    return input().strip().lower() != "q"


def main():
    print("rxkit DEMO SUITE")
    print("=" * 80)
    print(f"\n📋 DEMO SEQUENCE ({len(DEMOS)} demos total)")
    print("-" * 50)
    for i, (demo_name, description) in enumerate(DEMOS, 1):
        print(f"{i}. {demo_name}")
        print(f"   {description}")

    for i, (demo_name, description) in enumerate(DEMOS, 1):
        print(f"\n🎬 DEMO {i}/{len(DEMOS)}")
        if not run_demo(demo_name, description):
            print("Demo suite stopped by user.")
            return

    print("\n" + "=" * 80)
    print("🎉 ALL DEMOS COMPLETED")
    print("=" * 80)


if __name__ == "__main__":
    main()
