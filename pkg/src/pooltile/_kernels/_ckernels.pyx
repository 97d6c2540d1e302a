# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled statevector and closure kernels (same API as ``_pykernels``).

States are handled as interleaved (re, im) doubles.  A Pauli string with
masks (x, z) maps amplitude ``c ^ x`` onto ``c`` with factor
``i^(y) (-1)^{|(c ^ x) & z|}``, so rotations touch each pair {c, c ^ x}
exactly once.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

cnp.import_array()

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_parityll(unsigned long long) nogil
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_clzll(unsigned long long) nogil

# i^k as (re, im)
cdef double[4] IRE
cdef double[4] IIM
IRE[:] = [1.0, 0.0, -1.0, 0.0]
IIM[:] = [0.0, 1.0, 0.0, -1.0]


cdef inline double _sgn(u64 c, u64 z) noexcept nogil:
    return -1.0 if __builtin_parityll(c & z) else 1.0


cdef inline u64 _high_bit(u64 x) noexcept nogil:
    return (<u64>1) << (63 - __builtin_clzll(x))


cdef void _pauli(const double* v, double* out, Py_ssize_t dim, u64 x, u64 z, int phase_exp) noexcept nogil:
    cdef int k = (phase_exp + __builtin_popcountll(x & z)) & 3
    cdef double pr = IRE[k], pi = IIM[k], s, ar, ai
    cdef Py_ssize_t c
    cdef u64 src
    for c in range(dim):
        src = (<u64>c) ^ x
        s = _sgn(src, z)
        ar = s * v[2 * src]
        ai = s * v[2 * src + 1]
        out[2 * c] = pr * ar - pi * ai
        out[2 * c + 1] = pr * ai + pi * ar


cdef void _rotate(double* v, Py_ssize_t dim, u64 x, u64 z, double theta) noexcept nogil:
    """v <- cos(t) v - i sin(t) P v, in place."""
    cdef int k = __builtin_popcountll(x & z) & 3
    # q = -i sin(t) i^k
    cdef double st = sin(theta), co = cos(theta)
    cdef double qr = st * IIM[k], qi = -st * IRE[k]
    cdef double sc, sd, cr, ci, dr, di, fr, fi
    cdef Py_ssize_t c, d
    cdef u64 hb
    if x == 0:
        for c in range(dim):
            sc = _sgn(c, z)
            fr = co + sc * qr
            fi = sc * qi
            cr = v[2 * c]
            ci = v[2 * c + 1]
            v[2 * c] = fr * cr - fi * ci
            v[2 * c + 1] = fr * ci + fi * cr
        return
    hb = _high_bit(x)
    for c in range(dim):
        if (<u64>c) & hb:
            continue
        d = <Py_ssize_t>((<u64>c) ^ x)
        # (P v)[c] = i^k s(d) v[d],  (P v)[d] = i^k s(c) v[c]
        sc = _sgn(c, z)
        sd = _sgn(d, z)
        cr = v[2 * c]
        ci = v[2 * c + 1]
        dr = v[2 * d]
        di = v[2 * d + 1]
        v[2 * c] = co * cr + sd * (qr * dr - qi * di)
        v[2 * c + 1] = co * ci + sd * (qr * di + qi * dr)
        v[2 * d] = co * dr + sc * (qr * cr - qi * ci)
        v[2 * d + 1] = co * di + sc * (qr * ci + qi * cr)


cdef void _pauli_sum(const double* v, double* out, Py_ssize_t dim, const u64[::1] xs,
                     const u64[::1] zs, const double[::1] coeffs) noexcept nogil:
    cdef Py_ssize_t c, t
    cdef u64 src, x, z
    cdef int k
    cdef double pr, pi, ar, ai
    for c in range(2 * dim):
        out[c] = 0.0
    for t in range(xs.shape[0]):
        x = xs[t]
        z = zs[t]
        k = __builtin_popcountll(x & z) & 3
        pr = coeffs[t] * IRE[k]
        pi = coeffs[t] * IIM[k]
        for c in range(dim):
            src = (<u64>c) ^ x
            if __builtin_parityll(src & z):
                ar = -v[2 * src]
                ai = -v[2 * src + 1]
            else:
                ar = v[2 * src]
                ai = v[2 * src + 1]
            out[2 * c] += pr * ar - pi * ai
            out[2 * c + 1] += pr * ai + pi * ar


cdef inline void _vdot(const double* a, const double* b, Py_ssize_t dim, double* re, double* im) noexcept nogil:
    cdef Py_ssize_t c
    cdef double sr = 0.0, si = 0.0
    for c in range(dim):
        sr += a[2 * c] * b[2 * c] + a[2 * c + 1] * b[2 * c + 1]
        si += a[2 * c] * b[2 * c + 1] - a[2 * c + 1] * b[2 * c]
    re[0] = sr
    im[0] = si


cdef double _grad_and_unrotate(double* psi, double* lam, Py_ssize_t dim, u64 x, u64 z, double theta) noexcept nogil:
    """Return 2 Im <lam|P psi>, then apply exp(+i theta P) to both psi and lam."""
    cdef int k = __builtin_popcountll(x & z) & 3
    cdef double pr = IRE[k], pi = IIM[k]
    cdef double st = sin(theta), co = cos(theta)
    # q = +i sin(t) i^k
    cdef double qr = -st * pi, qi = st * pr
    cdef double acc = 0.0
    cdef double sc, sd, ar, ai, br, bi, tr, ti
    cdef double pcr, pci, pdr, pdi, lcr, lci, ldr, ldi
    cdef Py_ssize_t c, d
    cdef u64 hb
    if x == 0:
        for c in range(dim):
            sc = _sgn(c, z)
            pcr = psi[2 * c]
            pci = psi[2 * c + 1]
            lcr = lam[2 * c]
            lci = lam[2 * c + 1]
            # (P psi)[c] = i^k s(c) psi[c]
            ar = sc * (pr * pcr - pi * pci)
            ai = sc * (pr * pci + pi * pcr)
            acc += lcr * ai - lci * ar
            tr = co + sc * qr
            ti = sc * qi
            psi[2 * c] = tr * pcr - ti * pci
            psi[2 * c + 1] = tr * pci + ti * pcr
            lam[2 * c] = tr * lcr - ti * lci
            lam[2 * c + 1] = tr * lci + ti * lcr
        return 2.0 * acc
    hb = _high_bit(x)
    for c in range(dim):
        if (<u64>c) & hb:
            continue
        d = <Py_ssize_t>((<u64>c) ^ x)
        sc = _sgn(c, z)
        sd = _sgn(d, z)
        pcr = psi[2 * c]
        pci = psi[2 * c + 1]
        pdr = psi[2 * d]
        pdi = psi[2 * d + 1]
        lcr = lam[2 * c]
        lci = lam[2 * c + 1]
        ldr = lam[2 * d]
        ldi = lam[2 * d + 1]
        # (P psi)[c] = i^k s(d) psi[d] ; (P psi)[d] = i^k s(c) psi[c]
        ar = sd * (pr * pdr - pi * pdi)
        ai = sd * (pr * pdi + pi * pdr)
        br = sc * (pr * pcr - pi * pci)
        bi = sc * (pr * pci + pi * pcr)
        acc += lcr * ai - lci * ar + ldr * bi - ldi * br
        psi[2 * c] = co * pcr + sd * (qr * pdr - qi * pdi)
        psi[2 * c + 1] = co * pci + sd * (qr * pdi + qi * pdr)
        psi[2 * d] = co * pdr + sc * (qr * pcr - qi * pci)
        psi[2 * d + 1] = co * pdi + sc * (qr * pci + qi * pcr)
        lam[2 * c] = co * lcr + sd * (qr * ldr - qi * ldi)
        lam[2 * c + 1] = co * lci + sd * (qr * ldi + qi * ldr)
        lam[2 * d] = co * ldr + sc * (qr * lcr - qi * lci)
        lam[2 * d + 1] = co * ldi + sc * (qr * lci + qi * lcr)
    return 2.0 * acc


def _masks(seq):
    return np.ascontiguousarray(np.asarray(seq, dtype=np.uint64).reshape(-1))


def _state(psi, copy=False):
    arr = np.array(psi, dtype=np.complex128, copy=True) if copy else np.ascontiguousarray(psi, dtype=np.complex128)
    return arr, arr.view(np.float64)


def apply_pauli(psi, x, z, phase_exp=0):
    arr, v = _state(psi)
    cdef double[::1] vv = v
    out = np.empty_like(arr)
    cdef double[::1] ov = out.view(np.float64)
    _pauli(&vv[0], &ov[0], arr.shape[0], <u64>x, <u64>z, <int>(phase_exp % 4))
    return out


def apply_rotation(psi, x, z, double theta):
    arr, v = _state(psi, copy=True)
    cdef double[::1] vv = v
    _rotate(&vv[0], arr.shape[0], <u64>x, <u64>z, theta)
    return arr


def apply_pauli_sum(psi, xs, zs, coeffs):
    arr, v = _state(psi)
    cdef double[::1] vv = v
    out = np.empty_like(arr)
    cdef double[::1] ov = out.view(np.float64)
    _pauli_sum(&vv[0], &ov[0], arr.shape[0], _masks(xs), _masks(zs),
               np.ascontiguousarray(coeffs, dtype=np.float64))
    return out


def expectation(psi, xs, zs, coeffs):
    arr, v = _state(psi)
    cdef double[::1] vv = v
    cdef double[::1] hv = np.empty(v.shape[0], dtype=np.float64)
    cdef double re, im
    _pauli_sum(&vv[0], &hv[0], arr.shape[0], _masks(xs), _masks(zs),
               np.ascontiguousarray(coeffs, dtype=np.float64))
    _vdot(&vv[0], &hv[0], arr.shape[0], &re, &im)
    return complex(re, im)


def pool_gradients(psi, hpsi, xs, zs):
    arr, v = _state(psi)
    _, hv_arr = _state(hpsi)
    cdef double[::1] vv = v
    cdef double[::1] hv = hv_arr
    cdef u64[::1] mx = _masks(xs)
    cdef u64[::1] mz = _masks(zs)
    cdef Py_ssize_t k, c, dim = arr.shape[0]
    cdef u64 src, x, z
    cdef int ph
    cdef double sr, si, ar, ai, im
    out_arr = np.empty(mx.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for k in range(mx.shape[0]):
            x = mx[k]
            z = mz[k]
            ph = __builtin_popcountll(x & z) & 3
            # S = sum_c conj(h[c]) s(src) psi[src]
            sr = 0.0
            si = 0.0
            for c in range(dim):
                src = (<u64>c) ^ x
                ar = vv[2 * src]
                ai = vv[2 * src + 1]
                if __builtin_parityll(src & z):
                    ar = -ar
                    ai = -ai
                sr += hv[2 * c] * ar + hv[2 * c + 1] * ai
                si += hv[2 * c] * ai - hv[2 * c + 1] * ar
            # Im(i^ph S)
            im = IRE[ph] * si + IIM[ph] * sr
            out[k] = 2.0 * im
    return out_arr


def ansatz_state(ref, xs, zs, thetas):
    arr, v = _state(ref, copy=True)
    cdef double[::1] vv = v
    cdef u64[::1] mx = _masks(xs)
    cdef u64[::1] mz = _masks(zs)
    cdef double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef Py_ssize_t k, dim = arr.shape[0]
    with nogil:
        for k in range(mx.shape[0]):
            _rotate(&vv[0], dim, mx[k], mz[k], th[k])
    return arr


def energy_and_gradient(ref, gxs, gzs, thetas, hxs, hzs, hcoeffs):
    arr, v = _state(ref, copy=True)
    cdef double[::1] psi = v
    cdef Py_ssize_t dim = arr.shape[0]
    cdef double[::1] lam = np.empty(2 * dim, dtype=np.float64)
    cdef u64[::1] mx = _masks(gxs)
    cdef u64[::1] mz = _masks(gzs)
    cdef double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef u64[::1] hx = _masks(hxs)
    cdef u64[::1] hz = _masks(hzs)
    cdef double[::1] hc = np.ascontiguousarray(hcoeffs, dtype=np.float64)
    cdef Py_ssize_t m = mx.shape[0], k
    grad_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double energy, im
    with nogil:
        for k in range(m):
            _rotate(&psi[0], dim, mx[k], mz[k], th[k])
        _pauli_sum(&psi[0], &lam[0], dim, hx, hz, hc)
        _vdot(&psi[0], &lam[0], dim, &energy, &im)
        for k in range(m - 1, -1, -1):
            grad[k] = _grad_and_unrotate(&psi[0], &lam[0], dim, mx[k], mz[k], th[k])
    return float(energy), grad_arr


cdef inline u64 _key(u64 x, u64 z, int n) noexcept nogil:
    return (x << n) | z


def closure(xs, zs, int n_qubits, Py_ssize_t limit):
    if n_qubits > 32:
        raise ValueError("compiled closure supports at most 32 qubits")
    cdef u64[::1] gx = _masks(xs)
    cdef u64[::1] gz = _masks(zs)
    cdef vector[u64] mx
    cdef vector[u64] mz
    cdef unordered_set[u64] seen
    cdef Py_ssize_t i, j
    cdef u64 ax, az, px, pz, key
    cdef bint overflow = False
    for i in range(gx.shape[0]):
        if gx[i] == 0 and gz[i] == 0:
            continue
        key = _key(gx[i], gz[i], n_qubits)
        if seen.count(key):
            continue
        seen.insert(key)
        mx.push_back(gx[i])
        mz.push_back(gz[i])
    with nogil:
        i = 0
        while i < <Py_ssize_t>mx.size() and not overflow:
            ax = mx[i]
            az = mz[i]
            for j in range(i):
                if __builtin_parityll((ax & mz[j]) ^ (az & mx[j])):
                    px = ax ^ mx[j]
                    pz = az ^ mz[j]
                    key = _key(px, pz, n_qubits)
                    if seen.count(key) == 0:
                        seen.insert(key)
                        mx.push_back(px)
                        mz.push_back(pz)
                        if <Py_ssize_t>mx.size() > limit:
                            overflow = True
                            break
            i += 1
    if overflow:
        raise OverflowError(f"closure exceeded {limit} elements")
    out_x = np.empty(mx.size(), dtype=np.uint64)
    out_z = np.empty(mz.size(), dtype=np.uint64)
    cdef u64[::1] ox = out_x
    cdef u64[::1] oz = out_z
    for i in range(<Py_ssize_t>mx.size()):
        ox[i] = mx[i]
        oz[i] = mz[i]
    return out_x, out_z
