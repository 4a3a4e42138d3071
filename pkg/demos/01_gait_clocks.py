"""Gait timing walkthrough: per-foot phase clocks, sinusoidal timing
references, and commanded contact states for the four gait presets."""

import numpy as np

from quadkit.locomotion import GAITS, desired_contact, foot_phases, timing_reference

FEET = ("FR", "FL", "RR", "RL")

# Each gait is three cycle-fraction offsets between foot pairs. Sweeping the
# cycle counter t through [0, 1) yields every foot's phase clock.
for name, gait in GAITS.items():
    print(f"\n=== {name} (theta = {gait.theta1}, {gait.theta2}, {gait.theta3}) ===")
    print("  t     " + "  ".join(f"{f}:phase" for f in FEET) + "   contact")
    for t in np.linspace(0.0, 0.9, 10):
        phases = foot_phases(float(t), gait)
        contact = desired_contact(gait, float(t))
        marks = "".join("#" if c else "." for c in contact)
        cols = "  ".join(f"{p:8.2f}" for p in phases)
        print(f"  {t:4.2f} {cols}   {marks}")

# The policy-facing timing references are sin(2*pi*phase). At t = 0.25 a
# pronking robot has every clock at the stance peak.
print("\ntiming references at t = 0.25, pronking:",
      [round(v, 3) for v in timing_reference(0.25, GAITS["pronking"])])

# Trotting keeps diagonal feet in phase; pacing pairs same-side feet.
t = 0.37
trot = foot_phases(t, GAITS["trotting"])
pace = foot_phases(t, GAITS["pacing"])
print(f"trot at t={t}: FR == RL -> {trot[0] == trot[3]}, FL == RR -> {trot[1] == trot[2]}")
print(f"pace at t={t}: FR == FL -> {pace[0] == pace[1]}, RR == RL -> {pace[2] == pace[3]}")
