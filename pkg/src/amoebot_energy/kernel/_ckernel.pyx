# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled round kernel; a port of ``_pykernel.run_round`` with identical float semantics."""

from libc.stdint cimport int8_t, int64_t, uint8_t

cdef double EPS = 1e-9
cdef int IDLE = 0
cdef int ACTIVE = 1
cdef int ROOT = 2


cdef inline bint _join(Py_ssize_t i, int64_t[:, :] nbr, int8_t[:] role, int8_t[:] parent, uint8_t[:] prune,
                       int8_t[:] rr_cursor, int8_t[:] orient, uint8_t[:] crashed, bint respect_prune):
    cdef int step, local, d
    cdef int64_t j
    for step in range(6):
        local = (rr_cursor[i] + step) % 6
        d = (local + orient[i]) % 6
        j = nbr[i, d]
        if j < 0 or crashed[j] or role[j] == IDLE:
            continue
        if respect_prune and prune[j]:
            continue
        parent[i] = d
        role[i] = ACTIVE
        rr_cursor[i] = (local + 1) % 6
        return True
    return False


def run_round(int64_t[:] order, int64_t[:, :] nbr, double[:] e_bat, int8_t[:] role, int8_t[:] parent,
              uint8_t[:] stress, uint8_t[:] inhibit, uint8_t[:] prune, int8_t[:] rr_cursor,
              int8_t[:] share_cursor, int8_t[:] orient, int64_t[:] demand_index, int64_t[:] actions,
              int64_t[:] prunes, uint8_t[:] crashed, double[:] totals, int64_t[:] counts,
              double kappa, double alpha, double delta, bint communication, bint repair):
    cdef Py_ssize_t k, n = order.shape[0]
    cdef int64_t i, j
    cdef int d, pd, step, local, chosen
    cdef bint par_crashed, child_stressed, low, any_needy
    cdef bint needy[6]
    cdef double new, amount, before, x
    for k in range(n):
        i = order[k]
        if crashed[i]:
            continue
        if repair:
            pd = parent[i]
            par_crashed = pd >= 0 and nbr[i, pd] >= 0 and crashed[nbr[i, pd]]
            if prune[i] or par_crashed:
                for d in range(6):
                    j = nbr[i, d]
                    if j >= 0 and not crashed[j] and parent[j] == (d + 3) % 6:
                        prune[j] = 1
                parent[i] = -1
                prune[i] = 0
                stress[i] = 0
                inhibit[i] = 0
                if role[i] != ROOT:
                    role[i] = IDLE
                prunes[i] += 1
                continue
            if role[i] == IDLE:
                _join(i, nbr, role, parent, prune, rr_cursor, orient, crashed, True)
                if role[i] == IDLE:
                    continue
        elif role[i] == IDLE:
            _join(i, nbr, role, parent, prune, rr_cursor, orient, crashed, False)
            continue

        if communication:
            child_stressed = False
            for d in range(6):
                j = nbr[i, d]
                if j >= 0 and not crashed[j] and parent[j] == (d + 3) % 6 and stress[j]:
                    child_stressed = True
                    break
            low = delta - e_bat[i] >= EPS
            if role[i] == ACTIVE:
                stress[i] = 1 if (low or child_stressed) else 0
                j = nbr[i, parent[i]] if parent[i] >= 0 else -1
                if j < 0 or crashed[j]:
                    return i
                inhibit[i] = inhibit[j]
            else:
                inhibit[i] = 1 if (low or child_stressed) else 0

        if role[i] == ROOT:
            x = e_bat[i] + alpha
            new = kappa if kappa < x else x
            totals[0] += new - e_bat[i]
            e_bat[i] = new
        if alpha - e_bat[i] < EPS:
            any_needy = False
            for d in range(6):
                needy[d] = False
                j = nbr[i, d]
                if j >= 0 and not crashed[j] and parent[j] == (d + 3) % 6 and kappa - e_bat[j] >= EPS:
                    needy[d] = True
                    any_needy = True
            if any_needy:
                chosen = -1
                for step in range(6):
                    local = (share_cursor[i] + step) % 6
                    d = (local + orient[i]) % 6
                    if needy[d]:
                        share_cursor[i] = (local + 1) % 6
                        chosen = d
                        break
                j = nbr[i, chosen]
                x = kappa - e_bat[j]
                amount = x if x < alpha else alpha
                x = e_bat[i] - amount
                e_bat[i] = x if x > 0.0 else 0.0
                x = e_bat[j] + alpha
                e_bat[j] = kappa if kappa < x else x
                totals[2] += amount
                counts[0] += 1

        if not inhibit[i] and delta - e_bat[i] < EPS:
            before = e_bat[i]
            x = before - delta
            e_bat[i] = x if x > 0.0 else 0.0
            demand_index[i] += 1
            totals[1] += before - e_bat[i]
            actions[i] += 1
            counts[1] += 1
    return -1
