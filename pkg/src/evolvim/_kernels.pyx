# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; a draw-for-draw mirror of ``_pykernels``."""
from libc.stdint cimport int32_t, int64_t, uint8_t
from libcpp.vector cimport vector
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t

import numpy as np

cdef enum:
    GEOMETRIC = 0


cdef bitgen_t* _bitgen(object bg) except NULL:
    capsule = bg.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid bit generator")
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline double u01(bitgen_t* rng) noexcept nogil:
    return rng.next_double(rng.state)


def reach_count(const int64_t[::1] out_ptr, const int32_t[::1] out_idx, int64_t n,
                const uint8_t[::1] live, const int32_t[::1] seeds):
    cdef vector[uint8_t] seen = vector[uint8_t](n, 0)
    cdef vector[int32_t] queue
    cdef Py_ssize_t head = 0, i
    cdef int64_t e
    cdef int32_t u, w
    with nogil:
        for i in range(seeds.shape[0]):
            if not seen[seeds[i]]:
                seen[seeds[i]] = 1
                queue.push_back(seeds[i])
        while head < <Py_ssize_t>queue.size():
            u = queue[head]
            head += 1
            for e in range(out_ptr[u], out_ptr[u + 1]):
                w = out_idx[e]
                if live[e] and not seen[w]:
                    seen[w] = 1
                    queue.push_back(w)
    return <int64_t>queue.size()


def mc_spread(const int64_t[::1] out_ptr, const int32_t[::1] out_idx, int64_t n,
              const int32_t[::1] seeds, double p, object bitgen, int64_t rounds):
    cdef bitgen_t* rng = _bitgen(bitgen)
    cdef vector[int64_t] stamp = vector[int64_t](n, 0)
    cdef vector[int32_t] queue
    cdef Py_ssize_t head, i
    cdef int64_t r, e, count, total = 0, total_sq = 0
    cdef int32_t u, w, s
    with bitgen.lock, nogil:
        for r in range(1, rounds + 1):
            queue.clear()
            for i in range(seeds.shape[0]):
                s = seeds[i]
                if stamp[s] != r:
                    stamp[s] = r
                    queue.push_back(s)
            head = 0
            while head < <Py_ssize_t>queue.size():
                u = queue[head]
                head += 1
                for e in range(out_ptr[u], out_ptr[u + 1]):
                    w = out_idx[e]
                    if stamp[w] != r and u01(rng) < p:
                        stamp[w] = r
                        queue.push_back(w)
            count = <int64_t>queue.size()
            total += count
            total_sq += count * count
    return total, total_sq


def greedy_gains(const int64_t[::1] out_ptr, const int32_t[::1] out_idx, int64_t n,
                 const int32_t[::1] selected, const int32_t[::1] candidates,
                 double p, object bitgen, int64_t rounds):
    cdef bitgen_t* rng = _bitgen(bitgen)
    cdef Py_ssize_t m = out_idx.shape[0], nc = candidates.shape[0]
    gains_arr = np.zeros(nc, dtype=np.int64)
    cdef int64_t[::1] gains = gains_arr
    cdef vector[int64_t] estamp = vector[int64_t](m, 0)
    cdef vector[uint8_t] elive = vector[uint8_t](m, 0)
    cdef vector[int64_t] cstamp = vector[int64_t](n, 0)
    cdef vector[int64_t] vstamp = vector[int64_t](n, 0)
    cdef vector[int32_t] queue
    cdef Py_ssize_t head, i
    cdef int64_t r, e, visit = 0
    cdef int32_t u, w, c, s
    with bitgen.lock, nogil:
        for r in range(1, rounds + 1):
            queue.clear()
            for i in range(selected.shape[0]):
                s = selected[i]
                if cstamp[s] != r:
                    cstamp[s] = r
                    queue.push_back(s)
            head = 0
            while head < <Py_ssize_t>queue.size():
                u = queue[head]
                head += 1
                for e in range(out_ptr[u], out_ptr[u + 1]):
                    w = out_idx[e]
                    if cstamp[w] != r:
                        if estamp[e] != r:
                            estamp[e] = r
                            elive[e] = u01(rng) < p
                        if elive[e]:
                            cstamp[w] = r
                            queue.push_back(w)
            for i in range(nc):
                c = candidates[i]
                if cstamp[c] == r:
                    continue
                visit += 1
                vstamp[c] = visit
                queue.clear()
                queue.push_back(c)
                head = 0
                while head < <Py_ssize_t>queue.size():
                    u = queue[head]
                    head += 1
                    for e in range(out_ptr[u], out_ptr[u + 1]):
                        w = out_idx[e]
                        if vstamp[w] != visit and cstamp[w] != r:
                            if estamp[e] != r:
                                estamp[e] = r
                                elive[e] = u01(rng) < p
                            if elive[e]:
                                vstamp[w] = visit
                                queue.push_back(w)
                gains[i] += <int64_t>queue.size()
    return gains_arr


cdef struct Base:
    const int64_t* out_ptr
    const int32_t* out_idx
    const int64_t* in_ptr
    const int32_t* in_idx
    int64_t n0


cdef cppclass Overlay:
    vector[int32_t] esrc, edst, onext, inext
    vector[int32_t] ohead, otail, ihead, itail

    void init(int64_t total) noexcept nogil:
        this.ohead.assign(total, -1)
        this.otail.assign(total, -1)
        this.ihead.assign(total, -1)
        this.itail.assign(total, -1)
        this.esrc.clear()
        this.edst.clear()
        this.onext.clear()
        this.inext.clear()

    void add(int32_t u, int32_t v) noexcept nogil:
        cdef int32_t e = <int32_t>this.esrc.size()
        this.esrc.push_back(u)
        this.edst.push_back(v)
        this.onext.push_back(-1)
        this.inext.push_back(-1)
        if this.otail[u] < 0:
            this.ohead[u] = e
        else:
            this.onext[this.otail[u]] = e
        this.otail[u] = e
        if this.itail[v] < 0:
            this.ihead[v] = e
        else:
            this.inext[this.itail[v]] = e
        this.itail[v] = e


cdef inline void collect(Base* b, Overlay* ov, int32_t c, bint incoming,
                         vector[int32_t]& out, vector[int64_t]& stamp, int64_t mark) noexcept nogil:
    """Neighbors of ``c`` (base first, then added edges) not stamped with ``mark``."""
    cdef int64_t e
    cdef int32_t x, k
    out.clear()
    if c < b.n0:
        if incoming:
            for e in range(b.in_ptr[c], b.in_ptr[c + 1]):
                x = b.in_idx[e]
                if stamp[x] != mark:
                    out.push_back(x)
        else:
            for e in range(b.out_ptr[c], b.out_ptr[c + 1]):
                x = b.out_idx[e]
                if stamp[x] != mark:
                    out.push_back(x)
    if incoming:
        k = ov.ihead[c]
        while k >= 0:
            x = ov.esrc[k]
            if stamp[x] != mark:
                out.push_back(x)
            k = ov.inext[k]
    else:
        k = ov.ohead[c]
        while k >= 0:
            x = ov.edst[k]
            if stamp[x] != mark:
                out.push_back(x)
            k = ov.onext[k]


cdef inline int64_t burn_count(bitgen_t* rng, double q, int mode, int cap) noexcept nogil:
    cdef int64_t k = 0
    cdef int i
    if mode == GEOMETRIC:
        while u01(rng) < q:
            k += 1
    else:
        q = q / cap
        for i in range(cap):
            if u01(rng) < q:
                k += 1
    return k


cdef inline Py_ssize_t pick(bitgen_t* rng, vector[int32_t]& pool, int64_t x) noexcept nogil:
    cdef Py_ssize_t L = <Py_ssize_t>pool.size()
    cdef Py_ssize_t m = x if x < L else L
    cdef Py_ssize_t i, j
    cdef int32_t tmp
    for i in range(m):
        j = i + <Py_ssize_t>(u01(rng) * (L - i))
        tmp = pool[i]
        pool[i] = pool[j]
        pool[j] = tmp
    return m


cdef void evolve_overlay(Base* b, Overlay* ov, int64_t arrivals, double alpha, double gamma,
                         int mode, int cap, bint recurse_backward, bitgen_t* rng,
                         vector[int64_t]& stamp) noexcept nogil:
    cdef double fwd, bwd
    cdef int64_t t, mark, x, y
    cdef int32_t v, w, c
    cdef Py_ssize_t head, i, mf, mb
    cdef vector[int32_t] queue, fpool, bpool
    if mode == GEOMETRIC:
        fwd = alpha
        bwd = gamma * alpha
    else:
        fwd = alpha / (1 - alpha)
        bwd = gamma * alpha / (1 - gamma * alpha)
    for t in range(arrivals):
        v = <int32_t>(b.n0 + t)
        mark = t + 1
        w = <int32_t>(u01(rng) * v)
        ov.add(v, w)
        stamp[v] = mark
        stamp[w] = mark
        queue.clear()
        queue.push_back(w)
        head = 0
        while head < <Py_ssize_t>queue.size():
            c = queue[head]
            head += 1
            x = burn_count(rng, fwd, mode, cap)
            y = burn_count(rng, bwd, mode, cap)
            collect(b, ov, c, True, fpool, stamp, mark)
            mf = pick(rng, fpool, x)
            for i in range(mf):
                stamp[fpool[i]] = mark
            collect(b, ov, c, False, bpool, stamp, mark)
            mb = pick(rng, bpool, y)
            for i in range(mb):
                stamp[bpool[i]] = mark
            for i in range(mf):
                ov.add(v, fpool[i])
                queue.push_back(fpool[i])
            for i in range(mb):
                ov.add(bpool[i], v)
                if recurse_backward:
                    queue.push_back(bpool[i])


def evolve_edges(const int64_t[::1] out_ptr, const int32_t[::1] out_idx,
                 const int64_t[::1] in_ptr, const int32_t[::1] in_idx,
                 int64_t n0, int64_t arrivals, double alpha, double gamma, int mode, int cap,
                 bint recurse_backward, object bitgen):
    cdef bitgen_t* rng = _bitgen(bitgen)
    cdef Base b
    cdef Overlay ov
    cdef vector[int64_t] stamp = vector[int64_t](n0 + arrivals, 0)
    cdef Py_ssize_t i, m
    b.out_ptr = &out_ptr[0]
    b.out_idx = &out_idx[0] if out_idx.shape[0] else NULL
    b.in_ptr = &in_ptr[0]
    b.in_idx = &in_idx[0] if in_idx.shape[0] else NULL
    b.n0 = n0
    with bitgen.lock, nogil:
        ov.init(n0 + arrivals)
        evolve_overlay(&b, &ov, arrivals, alpha, gamma, mode, cap, recurse_backward, rng, stamp)
    m = <Py_ssize_t>ov.esrc.size()
    new_src = np.empty(m, dtype=np.int32)
    new_dst = np.empty(m, dtype=np.int32)
    cdef int32_t[::1] s = new_src
    cdef int32_t[::1] d = new_dst
    for i in range(m):
        s[i] = ov.esrc[i]
        d[i] = ov.edst[i]
    return new_src, new_dst


cdef void rr_walk(Base* b, Overlay* ov, int32_t target, double p, bint incoming, bitgen_t* rng,
                  vector[int64_t]& stamp, int64_t mark, vector[int32_t]& members,
                  vector[int32_t]& nbrs) noexcept nogil:
    cdef Py_ssize_t head = <Py_ssize_t>members.size(), i
    cdef int32_t x, s
    stamp[target] = mark
    members.push_back(target)
    while head < <Py_ssize_t>members.size():
        x = members[head]
        head += 1
        collect(b, ov, x, incoming, nbrs, stamp, mark)
        for i in range(<Py_ssize_t>nbrs.size()):
            s = nbrs[i]
            if stamp[s] != mark and u01(rng) < p:
                stamp[s] = mark
                members.push_back(s)


def rr_sets_static(const int64_t[::1] in_ptr, const int32_t[::1] in_idx, int64_t n, double p,
                   object bitgen, int64_t count):
    cdef bitgen_t* rng = _bitgen(bitgen)
    cdef vector[int64_t] stamp = vector[int64_t](n, 0)
    cdef vector[int32_t] members
    cdef vector[int64_t] offsets
    cdef Py_ssize_t head, i
    cdef int64_t r, e
    cdef int32_t target, x, s
    offsets.push_back(0)
    with bitgen.lock, nogil:
        for r in range(1, count + 1):
            target = <int32_t>(u01(rng) * n)
            stamp[target] = r
            head = <Py_ssize_t>members.size()
            members.push_back(target)
            while head < <Py_ssize_t>members.size():
                x = members[head]
                head += 1
                for e in range(in_ptr[x], in_ptr[x + 1]):
                    s = in_idx[e]
                    if stamp[s] != r and u01(rng) < p:
                        stamp[s] = r
                        members.push_back(s)
            offsets.push_back(<int64_t>members.size())
    return _to_arrays(offsets, members)


cdef _to_arrays(vector[int64_t]& offsets, vector[int32_t]& members):
    off = np.empty(offsets.size(), dtype=np.int64)
    mem = np.empty(members.size(), dtype=np.int32)
    cdef int64_t[::1] o = off
    cdef int32_t[::1] mm = mem
    cdef Py_ssize_t i
    for i in range(<Py_ssize_t>offsets.size()):
        o[i] = offsets[i]
    for i in range(<Py_ssize_t>members.size()):
        mm[i] = members[i]
    return off, mem


def rr_sets_evolved(const int64_t[::1] out_ptr, const int32_t[::1] out_idx,
                    const int64_t[::1] in_ptr, const int32_t[::1] in_idx,
                    int64_t n0, int64_t arrivals, double alpha, double gamma, int mode, int cap,
                    bint recurse_backward, double p, object bitgen, int64_t instances,
                    int64_t per_instance, bint reverse):
    cdef bitgen_t* rng = _bitgen(bitgen)
    cdef Base b
    cdef Overlay ov
    cdef int64_t nr = n0 + arrivals
    cdef vector[int64_t] estamp = vector[int64_t](nr, 0)
    cdef vector[int64_t] rstamp = vector[int64_t](nr, 0)
    cdef vector[int32_t] members, nbrs
    cdef vector[int64_t] offsets
    cdef int64_t inst, j, mark = 0
    cdef int32_t target
    b.out_ptr = &out_ptr[0]
    b.out_idx = &out_idx[0] if out_idx.shape[0] else NULL
    b.in_ptr = &in_ptr[0]
    b.in_idx = &in_idx[0] if in_idx.shape[0] else NULL
    b.n0 = n0
    offsets.push_back(0)
    with bitgen.lock, nogil:
        for inst in range(instances):
            ov.init(nr)
            # evolution marks are 1..arrivals; reset so instances stay independent
            estamp.assign(nr, 0)
            evolve_overlay(&b, &ov, arrivals, alpha, gamma, mode, cap, recurse_backward, rng, estamp)
            for j in range(per_instance):
                mark += 1
                target = <int32_t>(u01(rng) * nr)
                rr_walk(&b, &ov, target, p, not reverse, rng, rstamp, mark, members, nbrs)
                offsets.push_back(<int64_t>members.size())
    return _to_arrays(offsets, members)


def rr_set_from(const int64_t[::1] in_ptr, const int32_t[::1] in_idx, int64_t n,
                int32_t target, double p, object bitgen):
    cdef bitgen_t* rng = _bitgen(bitgen)
    cdef vector[uint8_t] seen = vector[uint8_t](n, 0)
    cdef vector[int32_t] members
    cdef Py_ssize_t head = 0
    cdef int64_t e
    cdef int32_t x, s
    with bitgen.lock, nogil:
        seen[target] = 1
        members.push_back(target)
        while head < <Py_ssize_t>members.size():
            x = members[head]
            head += 1
            for e in range(in_ptr[x], in_ptr[x + 1]):
                s = in_idx[e]
                if not seen[s] and u01(rng) < p:
                    seen[s] = 1
                    members.push_back(s)
    out = np.empty(members.size(), dtype=np.int32)
    cdef int32_t[::1] o = out
    for head in range(<Py_ssize_t>members.size()):
        o[head] = members[head]
    return out
