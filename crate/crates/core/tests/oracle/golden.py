"""Independent oracle for the frozen golden values used by the Rust tests.

Everything here is computed by brute-force definitions with numpy/mpmath,
without sharing any code path with the Rust crate. Run with `python3 golden.py`
and paste the printed values into the corresponding tests.
"""
import numpy as np
import mpmath as mp

mp.mp.dps = 50


def gauss(L):
    vals = [mp.fsum(mp.e ** (-mp.pi * (t + n * L) ** 2 / L) for n in range(-6, 7)) for t in range(L)]
    nrm = mp.sqrt(mp.fsum(v * v for v in vals))
    return [v / nrm for v in vals]


def tf_atom(phi, x, xi):
    L = len(phi)
    t = np.arange(L)
    return np.exp(2j * np.pi * xi * t / L) * np.roll(phi, x)


def locop(phi, cells, scale=None):
    L = len(phi)
    scale = 1.0 / L if scale is None else scale
    M = np.zeros((L, L), dtype=complex)
    for (x, xi), v in cells:
        g = tf_atom(phi, x, xi)
        M += scale * v * np.outer(g, g.conj())
    return M


def box(x0, x1, y0, y1, L):
    return [((x % L, y % L), 1.0) for x in range(x0, x1) for y in range(y0, y1)]


def regular_boxes(L, bx, by):
    return [box(i, i + bx, j, j + by, L) for i in range(0, L, bx) for j in range(0, L, by)]


def eig_desc(M):
    w, v = np.linalg.eigh(M)
    return w[::-1], v[:, ::-1]


def wedge(L, bands):
    return [box(x, x + step, lo, hi, L) for lo, hi, step in sorted(bands) for x in range(0, L, step)]


def eps_frame(ops, eps):
    L = ops[0].shape[0]
    S = np.zeros((L, L), dtype=complex)
    atoms = 0
    for M in ops:
        w, v = eig_desc(M)
        for k in range(L):
            if w[k] > eps and w[k] > 1e-12 * w[0]:
                S += w[k] ** 2 * np.outer(v[:, k], v[:, k].conj())
                atoms += 1
    s = np.linalg.eigvalsh(S)
    return atoms, s[0], s[-1]


def main():
    g16 = gauss(16)
    print("gauss16[0] =", mp.nstr(g16[0], 20))
    phi16 = np.array([float(v) for v in g16])

    H = locop(phi16, box(4, 12, 4, 12, 16))
    lam, _ = eig_desc(H)
    print("box8 trace =", np.trace(H).real)
    print("box8 eig[0:8] =", [repr(v) for v in lam[:8]])
    print("box8 rank(>0.5) =", int((lam > 0.5).sum()))

    regions = regular_boxes(16, 4, 4)
    ops = [locop(phi16, r) for r in regions]
    spectra = [eig_desc(M) for M in ops]
    counts = [int((w > 0.2).sum()) for w, _ in spectra]
    print("regular4 eps0.2 counts =", sorted(set(counts)))
    S = np.zeros((16, 16), dtype=complex)
    for w, v in spectra:
        for k in range(16):
            if w[k] > 0.2:
                S += w[k] ** 2 * np.outer(v[:, k], v[:, k].conj())
    s = np.linalg.eigvalsh(S)
    print("regular4 eps0.2 atoms =", sum(counts), "A =", repr(s[0]), "B =", repr(s[-1]))

    G = sum(M @ M for M in ops)
    g = np.linalg.eigvalsh(G)
    print("regular4 plain c,C =", repr(g[0]), repr(g[-1]))
    G2 = sum(M @ M @ M @ M for M in ops)
    g2 = np.linalg.eigvalsh(G2)
    print("regular4 squared c,C =", repr(g2[0]), repr(g2[-1]))

    # lattice a=b=2
    L, a, b = 16, 2, 2
    lat = [(j, k) for j in range(0, L, a) for k in range(0, L, b)]
    Sg = locop(phi16, [(p, 1.0) for p in lat], scale=1.0)
    sg = np.linalg.eigvalsh(Sg)
    print("gabor a=b=2 Agab,Bgab =", repr(sg[0]), repr(sg[-1]))
    w, V = np.linalg.eigh(Sg)
    phit = V @ np.diag(w ** -0.5) @ V.conj().T @ phi16
    phit = phit / np.linalg.norm(phit)
    St = locop(phit, [(p, 1.0) for p in lat], scale=1.0)
    st = np.linalg.eigvalsh(St)
    A = 1.0 / st[-1]
    print("tight A =", repr(A), "cond =", st[-1] / st[0])
    print("phit[0:4] =", [repr(v) for v in phit[:4].real])
    block = [((2 * j, 2 * k), 1.0) for j in range(4) for k in range(4)]
    GM = locop(phit, block, scale=A)
    print("GM block4 eig[0:6] =", [repr(v) for v in eig_desc(GM)[0][:6]])

    # bundled example configs, weighted eps = 0.1
    print("regular16 eps0.1 atoms,A,B =", [repr(v) for v in eps_frame(ops, 0.1)])
    blocks = [[((2 * j + x0, 2 * k + y0), 1.0) for j in range(4) for k in range(4)]
              for x0 in (0, 8) for y0 in (0, 8)]
    gms = [locop(phit, blk, scale=A) for blk in blocks]
    print("gabor16 eps0.1 atoms,A,B =", [repr(v) for v in eps_frame(gms, 0.1)])
    phi32 = np.array([float(v) for v in gauss(32)])
    bands = [(0, 4, 16), (4, 12, 8), (12, 20, 4), (20, 28, 8), (28, 32, 16)]
    wops = [locop(phi32, r) for r in wedge(32, bands)]
    print("wedge32 eps0.1 atoms,A,B =", [repr(v) for v in eps_frame(wops, 0.1)])


main()
