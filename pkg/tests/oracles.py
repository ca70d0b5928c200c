"""Reference values computed once with mpmath at 40 digits and frozen here.

C(3) and S(3) come from prime-zeta and Dirichlet L-series identities
(Moebius inversion of log L(ks, chi^k)), not from a product over primes.
"""

PSI_1_3 = "-3.132033780020806322996419074287268854155"
T_1_2 = "-1.280643835321264792848100793303163084454"
T_1_3 = "-3.186741670434233470390288206801657938839"
GAMMA_2_3 = "1.354117939426400416945288028154513785519"
L1_CHI3 = "0.6045997880780726168646927525473852440947"  # pi/sqrt(27)
ALPHA_5 = "0.339837278240523535464278781158977485329"
C_3 = "0.7071813747951674302088659938984504109244"
S_3 = "0.3516478132638087560157790619958841543114"
E0_3 = "0.9393312447434008881959528423681320546921"
GAMMA_3 = "0.945497280871680703239749994158189073"


def phi_table(n):
    """Euler phi of 0..n by a sieve."""
    import numpy as np

    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi
