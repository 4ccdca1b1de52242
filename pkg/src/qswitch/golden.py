"""Reference routing table for the three-channel switch network.

Keys are control bits ``(s_1^(1), s_1^(2), s_2^(2))``, i.e. switches in
``(k, i)`` order; values are the applied product, leftmost factor last.
"""

ROUTING_TABLE_N3 = {
    (0, 0, 0): "U2U1U0",
    (1, 1, 0): "U2U1U0",
    (1, 0, 0): "U2U0U1",
    (0, 1, 0): "U2U0U1",
    (1, 0, 1): "U0U2U1",
    (0, 0, 1): "U1U2U0",
    (0, 1, 1): "U1U0U2",
    (1, 1, 1): "U0U1U2",
}
