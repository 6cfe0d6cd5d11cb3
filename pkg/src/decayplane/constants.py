"""Physical constants and run defaults.

Masses are standard particle-data values in GeV. Pass a modified
``Masses`` instance wherever kinematics are built to override them.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Masses:
    jpsi: float = 3.0969
    lam: float = 1.115683
    proton: float = 0.938272
    pion: float = 0.139570


MASSES = Masses()

# Lambda -> p pi- decay asymmetry parameter.
A_LAMBDA = 0.642

# BESIII-scale statistics: J/psi sample, B(J/psi -> Lambda Lambdabar), detector efficiency.
N_JPSI = 1.3e9
BR_LAMBDA_PAIR = 1.6e-3
EFFICIENCY = 0.40
N_EVENTS_DESK = 832000  # round(N_JPSI * BR_LAMBDA_PAIR * EFFICIENCY)

N_BINS = 40
