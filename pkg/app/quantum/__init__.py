"""Qubit backends: Pauli algebra plus the Schrödinger, Heisenberg and product-form pictures.

Every backend consumes the same ``Circuit`` of ``GateOp`` values from
``schrodinger_backend`` and the same ``PauliSum`` observables from
``pauli_algebra``, so their results can be compared one to one.
"""
