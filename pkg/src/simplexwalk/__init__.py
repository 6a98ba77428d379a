"""Random walks in the standard simplex: simulation and numerical certification.

Subpackages by concern: ``geometry`` (charts, affine maps, regions),
``distributions`` (jump laws, Dirichlet), ``chain`` (the walk engine),
``stationarity`` (integral-equation verification), ``assumptions``
(certification of the drift/ergodicity hypotheses), ``urn`` (the
history-dependent urn walk and its coupling), ``stats`` (goodness-of-fit),
``cli`` (reproducible experiment front end).
"""

from __future__ import annotations

__version__ = "0.1.0"
