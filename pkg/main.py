#!/usr/bin/env python3
"""
Transverse Solver - Continuity-Method CLI
=========================================

Solves f(lambda(A_u)) = psi + b for concave symmetric operators
(Monge-Ampere, Hessian, Hessian quotient and T-transform families)
on a flat periodic chart with spectral derivatives.

Features:
- 🧪 Randomised verification of the algebraic identities
- 📐 C-subsolution certificates with (delta, R) estimates
- 🚀 Newton-Krylov continuity method with step halving
- 🌊 Explicit parabolic flow
- 🏭 Manufactured-solution campaigns run concurrently

Usage:
    python main.py identities --seed 0        # Identity suite
    python main.py subsolution configs/quotient.conf
    python main.py solve configs/ma-flat.conf -v   # Continuity method
    python main.py flow configs/flow.conf
    python main.py manufacture --all -j 2     # Built-in cases
    python main.py settings --set threads=4   # View/modify settings
"""

from src.cli.app import run

if __name__ == "__main__":
    run()
