"""Simulated HHL linear solving for power-system workloads.

Subpackages: :mod:`~hhlflow.circuit` (IR and transpilation),
:mod:`~hhlflow.svsim` (statevector engine), :mod:`~hhlflow.fusion`,
:mod:`~hhlflow.hhl`, :mod:`~hhlflow.prep`, :mod:`~hhlflow.powerflow` and the
:mod:`~hhlflow.cli` experiment runner.
"""
__version__ = "0.1.0"
