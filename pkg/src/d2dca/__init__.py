"""Lightweight continuous authentication for edge-to-gateway links.

Simulated edge and gateway state machines, a CSI-synthesizing channel, an
adversary harness and a scenario runner.
"""

__version__ = "0.1.0"
