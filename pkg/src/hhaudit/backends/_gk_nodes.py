"""Nodes and weights of the 15-point Kronrod extension of 7-point Gauss.

Values carry the full double precision of the classic QUADPACK tables.
All nodes are strictly interior to (-1, 1), so integrands are never
evaluated at interval endpoints.
"""

import numpy as np

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])

_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])

_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Flat 15-node form, ascending; Gauss weights are zero at Kronrod-only nodes.
NODES = np.concatenate([-_XGK[:7], _XGK[7:][::-1], _XGK[6::-1]])
WEIGHTS_K = np.concatenate([_WGK[:7], _WGK[7:][::-1], _WGK[6::-1]])
WEIGHTS_G = np.zeros(15)
WEIGHTS_G[1:14:2] = np.concatenate([_WG[:3], _WG[3:][::-1], _WG[2::-1]])
