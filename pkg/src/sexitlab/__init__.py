"""Finite-length LDPC degree-profile workbench.

Core pipeline: degree profiles -> quantized node specs -> random Tanner
graphs (girth > 4) -> belief-propagation decoding with mutual-information
probes -> scattered EXIT charts and ensemble BER tables, plus the analytic
EXIT-chart machinery used to steer profile edits.
"""

__version__ = "0.1.0"
