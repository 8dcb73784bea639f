"""Pure-Python round kernel over flat per-particle arrays.

Mirrors the integrated activation of the object engine for a demand-only
behavior with a uniform demand and round-robin child selection. The Cython
module ``_ckernel`` is a line-for-line port of this file; both must apply
every floating-point operation in the same order so results are bit-identical.

Roles are encoded 0 idle, 1 active, 2 root; ``parent`` is -1 for none.
``totals`` holds harvested, spent, transferred; ``counts`` holds transfers,
actions.
"""

EPS = 1e-9

IDLE = 0
ACTIVE = 1
ROOT = 2


def _join(i, nbr, role, parent, prune, rr_cursor, orient, crashed, respect_prune):
    for step in range(6):
        local = (rr_cursor[i] + step) % 6
        d = (local + orient[i]) % 6
        j = nbr[i][d]
        if j < 0 or crashed[j] or role[j] == IDLE:
            continue
        if respect_prune and prune[j]:
            continue
        parent[i] = d
        role[i] = ACTIVE
        rr_cursor[i] = (local + 1) % 6
        return True
    return False


def run_round(order, nbr, e_bat, role, parent, stress, inhibit, prune, rr_cursor, share_cursor,
              orient, demand_index, actions, prunes, crashed, totals, counts,
              kappa, alpha, delta, communication, repair):
    """Activate the particles listed in ``order`` once each. Returns -1 or the index of a faulting particle."""
    for k in range(len(order)):
        i = order[k]
        if crashed[i]:
            continue
        if repair:
            pd = parent[i]
            par_crashed = pd >= 0 and nbr[i][pd] >= 0 and crashed[nbr[i][pd]]
            if prune[i] or par_crashed:
                for d in range(6):
                    j = nbr[i][d]
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

        # communicate
        if communication:
            child_stressed = False
            for d in range(6):
                j = nbr[i][d]
                if j >= 0 and not crashed[j] and parent[j] == (d + 3) % 6 and stress[j]:
                    child_stressed = True
                    break
            low = delta - e_bat[i] >= EPS
            if role[i] == ACTIVE:
                stress[i] = 1 if (low or child_stressed) else 0
                j = nbr[i][parent[i]] if parent[i] >= 0 else -1
                if j < 0 or crashed[j]:
                    return i
                inhibit[i] = inhibit[j]
            else:
                inhibit[i] = 1 if (low or child_stressed) else 0

        # share
        if role[i] == ROOT:
            new = min(e_bat[i] + alpha, kappa)
            totals[0] += new - e_bat[i]
            e_bat[i] = new
        if alpha - e_bat[i] < EPS:
            needy = [False] * 6
            any_needy = False
            for d in range(6):
                j = nbr[i][d]
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
                j = nbr[i][chosen]
                amount = min(alpha, kappa - e_bat[j])
                e_bat[i] = max(0.0, e_bat[i] - amount)
                e_bat[j] = min(e_bat[j] + alpha, kappa)
                totals[2] += amount
                counts[0] += 1

        # use
        if not inhibit[i] and delta - e_bat[i] < EPS:
            before = e_bat[i]
            e_bat[i] = max(0.0, before - delta)
            demand_index[i] += 1
            totals[1] += before - e_bat[i]
            actions[i] += 1
            counts[1] += 1
    return -1
