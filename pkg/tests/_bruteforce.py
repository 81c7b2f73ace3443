"""Independent pure-Python oracle used to cross-check the simulator.

Everything here works on plain lists of complex numbers with explicit
bit-tuple index arithmetic, deliberately sharing no code with the package
(only the big-endian qubit-order convention, which is the contract under
test). Slow and obvious on purpose.
"""

import math

_R = 1.0 / math.sqrt(2.0)

BELLS = {
    "Phi+": [_R, 0.0, 0.0, _R],
    "Phi-": [_R, 0.0, 0.0, -_R],
    "Psi+": [0.0, _R, _R, 0.0],
    "Psi-": [0.0, _R, -_R, 0.0],
}


def index_of(bits):
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    return idx


def bits_of(idx, n):
    return [(idx >> (n - 1 - k)) & 1 for k in range(n)]


def cluster_amps(alpha, beta, gamma, eta):
    amps = [0j] * 16
    amps[0b0000] = complex(alpha)
    amps[0b1010] = complex(beta)
    amps[0b0101] = complex(gamma)
    amps[0b1111] = -complex(eta)
    return amps


def kron(a, b):
    return [x * y for x in a for y in b]


def norm_sq(amps):
    return sum(abs(x) ** 2 for x in amps)


def apply_1q(amps, n, q, u):
    """u is a row-major 2x2 list of lists."""
    out = [0j] * len(amps)
    for idx, amp in enumerate(amps):
        if amp == 0:
            continue
        bits = bits_of(idx, n)
        for new_bit in (0, 1):
            w = u[new_bit][bits[q]]
            if w == 0:
                continue
            nb = list(bits)
            nb[q] = new_bit
            out[index_of(nb)] += w * amp
    return out


def apply_cnot(amps, n, control, target):
    out = [0j] * len(amps)
    for idx, amp in enumerate(amps):
        bits = bits_of(idx, n)
        if bits[control]:
            bits[target] ^= 1
        out[index_of(bits)] += amp
    return out


def project_single(amps, n, q, bra):
    """<bra| applied to qubit q; bra is a 2-list. Unnormalized remainder."""
    rest = [k for k in range(n) if k != q]
    out = []
    for ridx in range(1 << len(rest)):
        rbits = bits_of(ridx, len(rest))
        total = 0j
        for v in (0, 1):
            bits = [0] * n
            for k, pos in enumerate(rest):
                bits[pos] = rbits[k]
            bits[q] = v
            total += complex(bra[v]).conjugate() * amps[index_of(bits)]
        out.append(total)
    return out


def project_pair(amps, n, q0, q1, bra):
    """<bra| applied to (q0, q1); bra is a 4-list over v0*2+v1."""
    rest = [k for k in range(n) if k not in (q0, q1)]
    out = []
    for ridx in range(1 << len(rest)):
        rbits = bits_of(ridx, len(rest))
        total = 0j
        for v0 in (0, 1):
            for v1 in (0, 1):
                bits = [0] * n
                for k, pos in enumerate(rest):
                    bits[pos] = rbits[k]
                bits[q0], bits[q1] = v0, v1
                total += complex(bra[v0 * 2 + v1]).conjugate() * amps[index_of(bits)]
        out.append(total)
    return out


def reduced_density(amps, n, keep):
    """Reduced density matrix on keep (ascending order) as nested lists."""
    keep = sorted(keep)
    traced = [q for q in range(n) if q not in keep]
    dim = 1 << len(keep)
    rho = [[0j] * dim for _ in range(dim)]
    for i in range(dim):
        ibits = bits_of(i, len(keep))
        for j in range(dim):
            jbits = bits_of(j, len(keep))
            acc = 0j
            for t in range(1 << len(traced)):
                tbits = bits_of(t, len(traced))
                bi = [0] * n
                bj = [0] * n
                for k, q in enumerate(keep):
                    bi[q] = ibits[k]
                    bj[q] = jbits[k]
                for k, q in enumerate(traced):
                    bi[q] = tbits[k]
                    bj[q] = tbits[k]
                acc += amps[index_of(bi)] * amps[index_of(bj)].conjugate()
            rho[i][j] = acc
    return rho


def teleport_system(inp, cluster):
    """inp: 2-list; cluster: (alpha, beta, gamma, eta). Order A,1,2,3,4."""
    return kron(list(inp), cluster_amps(*cluster))


def teleport_branch(inp, cluster, alice, bob):
    """Chika's unnormalized qubit after <alice| on (A,1), <bob| on (2,3)."""
    full = teleport_system(inp, cluster)
    after_a = project_pair(full, 5, 0, 1, BELLS[alice])
    return project_pair(after_a, 3, 0, 1, BELLS[bob])


def qis_system(inp, cluster):
    """inp: 4-list over |00..11>; order a,b,1,2,3,4,5,6 with a Phi+ on (5,6)."""
    return kron(kron(list(inp), cluster_amps(*cluster)), BELLS["Phi+"])


def qis_branch(inp, cluster, alice1, alice2, bob):
    """Chika's unnormalized pair after <alice1| on (a,1), <alice2| on (b,6),
    <bob| on (2,3)."""
    full = qis_system(inp, cluster)
    rem = project_pair(full, 8, 0, 2, BELLS[alice1])
    rem = project_pair(rem, 6, 0, 5, BELLS[alice2])
    return project_pair(rem, 4, 0, 1, BELLS[bob])
