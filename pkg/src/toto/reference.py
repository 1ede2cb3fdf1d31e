"""Published extremal times for the four benchmark cases (4 decimals).

``None`` marks an extremal that does not exist for that case.
"""

import math

U1 = 0.0002
CASES = ((math.sqrt(3.0), 1.0), (math.sqrt(3.0), 6.5), (8.0, 1.0), (8.0, 4.0))

ROWS = ("T1+", "T3+", "T5+", "T3-", "T5-", "T2+", "T4+", "T6+", "T8+", "T2-", "T4-", "T6-", "T8-")

TABLE = {
    "T1+": (1.6784, 1.4513, 8.0159, 7.9707),
    "T3+": (None, None, 7.3863, 4.6189),
    "T5+": (None, None, 9.5568, None),
    "T3-": (None, None, 9.7758, 4.9845),
    "T5-": (None, None, 9.5735, None),
    "T2+": (None, 1.8320, None, 8.0452),
    "T4+": (None, 2.5858, None, 4.9982),
    "T6+": (None, None, None, 5.7987),
    "T8+": (None, None, None, 7.0651),
    "T2-": (None, 1.3888, None, 4.8098),
    "T4-": (None, 2.5387, None, 4.5458),
    "T6-": (None, None, None, 5.6884),
    "T8-": (None, None, None, 7.0496),
}

OPTIMAL = ("T1+", "T2-", "T3+", "T4-")
OPTIMAL_WORDS = ("XY", "YXY", "XYXY", "YXYXY")
