"""Random-order online monotone submodular maximisation.

Value oracles and the multilinear extension live in :mod:`.oracles`, offline
solvers in :mod:`.offline` and :mod:`.packing`, the online algorithms in
:mod:`.online`, closed-form bounds in :mod:`.bounds` and the Monte Carlo
harness in :mod:`.harness`.  :mod:`.cli` wraps everything for the shell.
"""

__version__ = "0.1.0"
