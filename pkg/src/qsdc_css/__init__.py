"""Simulator for the CSS-error-corrected three-stage QSDC protocol.

Core layers:

- binlin / codes: GF(2) algebra, classical linear codes, CSS pairs, bounds
- qsim / steane: state-vector simulation and the [[7,1,3]] logical layer
- channel / protocol: noise, loss, eavesdroppers, the three-stage session
- reconcile: coset-key reconciliation and privacy amplification
- experiments / service / cli: batch scenarios, HTTP API, command line
"""

__version__ = "0.1.0"
