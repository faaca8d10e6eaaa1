# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled token-game exploration kernel.

Operation-for-operation twin of `_tokengame_py.explore`; both engines must
return identical results (the test suite cross-checks them). See the pure
module for the state encoding and the successor ordering contract.
"""

from collections import deque

import array as _array

from cpython cimport array

from .errors import VerificationError

cdef enum:
    START = 0
    END = 1
    TASK = 2
    XOR = 3
    AND = 4
    OR = 5


def explore(
    bytes kinds,
    list in_flows,
    list out_flows,
    tuple flow_target,
    int start,
    int n_flows,
    dict incl_slot,
    dict incl_join,
    int n_slots,
    long state_cap,
):
    """Exhaustive reachability search from the initial marking.

    Returns (states_explored, exploded, overflowed, fired, max_tokens,
    deadlock_states, improper_states).
    """
    cdef int N = len(kinds)
    cdef int F = n_flows
    cdef int size = F + 1 + 4 * n_slots

    # Flatten adjacency into CSR arrays.
    cdef array.array in_off_a = _array.array("i", [0] * (N + 1))
    cdef array.array out_off_a = _array.array("i", [0] * (N + 1))
    flat_in, flat_out = [], []
    cdef int i, j
    for i in range(N):
        flat_in.extend(in_flows[i])
        in_off_a[i + 1] = len(flat_in)
        flat_out.extend(out_flows[i])
        out_off_a[i + 1] = len(flat_out)
    cdef array.array in_dat_a = _array.array("i", flat_in or [0])
    cdef array.array out_dat_a = _array.array("i", flat_out or [0])
    cdef array.array target_a = _array.array("i", list(flow_target) or [0])
    cdef int[:] in_off = in_off_a
    cdef int[:] out_off = out_off_a
    cdef int[:] in_dat = in_dat_a
    cdef int[:] out_dat = out_dat_a
    cdef int[:] target = target_a

    # Inclusive gateway bookkeeping: slot per split, per-slot join inputs.
    cdef array.array slot_of_a = _array.array("i", [-1] * N)
    cdef array.array join_slot_a = _array.array("i", [-1] * N)
    cdef int[:] slot_of = slot_of_a
    cdef int[:] join_slot = join_slot_a
    for split_node, split_slot in incl_slot.items():
        slot_of[<int> split_node] = <int> split_slot
    cdef array.array jin_off_a = _array.array("i", [0] * (n_slots + 1))
    flat_jin = []
    jin_lists = [()] * n_slots
    for join_node, info in incl_join.items():
        join_slot[<int> join_node] = <int> info[0]
        jin_lists[<int> info[0]] = info[1]
    for i in range(n_slots):
        flat_jin.extend(jin_lists[i])
        jin_off_a[i + 1] = len(flat_jin)
    cdef array.array jin_dat_a = _array.array("i", flat_jin or [0])
    cdef int[:] jin_off = jin_off_a
    cdef int[:] jin_dat = jin_dat_a

    cdef const unsigned char[:] kv = kinds

    init_arr = bytearray(size)
    for i in range(out_off[start], out_off[start + 1]):
        init_arr[out_dat[i]] = 1
    init = bytes(init_arr)

    visited = {init}
    queue = deque([init])
    fired = bytearray(N)
    cdef unsigned char[:] fired_v = fired
    deadlocks = set()
    impropers = set()
    cdef int max_tokens = 1 if out_off[start + 1] > out_off[start] else 0
    cdef bint exploded = False
    cdef bint overflowed = False

    cdef bytearray buf = bytearray(size)
    cdef unsigned char[:] bv = buf
    cdef array.array cand_a = _array.array("i", [0] * N)
    cdef int[:] cand = cand_a
    cdef array.array flag_a = _array.array("b", [0] * N)
    cdef signed char[:] flag = flag_a

    cdef const unsigned char[:] sv
    cdef int n_cand, node, kind, f, fin, fout, k, mask, base, slot, m
    cdef int a, b, c
    cdef bint enabled, improper, any_token
    cdef long visited_count = 1

    while queue and not exploded and not overflowed:
        state = queue.popleft()
        sv = state
        successors = []

        # Candidate nodes: targets of flows holding tokens, ascending.
        for i in range(N):
            flag[i] = 0
        for f in range(F):
            if sv[f]:
                flag[target[f]] = 1
        n_cand = 0
        for i in range(N):
            if flag[i]:
                cand[n_cand] = i
                n_cand += 1

        for j in range(n_cand):
            node = cand[j]
            kind = kv[node]
            if kind == TASK or kind == START:
                for a in range(in_off[node], in_off[node + 1]):
                    fin = in_dat[a]
                    if sv[fin]:
                        bv[:] = sv
                        bv[fin] -= 1
                        for b in range(out_off[node], out_off[node + 1]):
                            fout = out_dat[b]
                            if bv[fout] == 255:
                                overflowed = True
                                break
                            bv[fout] += 1
                        if overflowed:
                            break
                        successors.append((node, bytes(buf), False))
                if overflowed:
                    break
            elif kind == END:
                for a in range(in_off[node], in_off[node + 1]):
                    fin = in_dat[a]
                    if sv[fin]:
                        bv[:] = sv
                        bv[fin] -= 1
                        bv[F] += 1
                        improper = bv[F] > 1
                        if not improper:
                            for c in range(size):
                                if c != F and bv[c]:
                                    improper = True
                                    break
                        successors.append((node, bytes(buf), improper))
            elif kind == XOR:
                for a in range(in_off[node], in_off[node + 1]):
                    fin = in_dat[a]
                    if sv[fin]:
                        for b in range(out_off[node], out_off[node + 1]):
                            fout = out_dat[b]
                            bv[:] = sv
                            bv[fin] -= 1
                            if bv[fout] == 255:
                                overflowed = True
                                break
                            bv[fout] += 1
                            successors.append((node, bytes(buf), False))
                        if overflowed:
                            break
                if overflowed:
                    break
            elif kind == AND:
                enabled = in_off[node + 1] > in_off[node]
                for a in range(in_off[node], in_off[node + 1]):
                    if not sv[in_dat[a]]:
                        enabled = False
                        break
                if enabled:
                    bv[:] = sv
                    for a in range(in_off[node], in_off[node + 1]):
                        bv[in_dat[a]] -= 1
                    for b in range(out_off[node], out_off[node + 1]):
                        fout = out_dat[b]
                        if bv[fout] == 255:
                            overflowed = True
                            break
                        bv[fout] += 1
                    if overflowed:
                        break
                    successors.append((node, bytes(buf), False))
            else:  # OR
                slot = join_slot[node]
                if slot >= 0:
                    base = F + 1 + 4 * slot
                    mask = (
                        sv[base]
                        | (sv[base + 1] << 8)
                        | (sv[base + 2] << 16)
                        | (sv[base + 3] << 24)
                    )
                    if mask == 0:
                        continue
                    enabled = True
                    for i in range(jin_off[slot], jin_off[slot + 1]):
                        fin = jin_dat[i]
                        if (sv[fin] != 0) != ((mask >> (i - jin_off[slot])) & 1 != 0):
                            enabled = False
                            break
                    if not enabled:
                        continue
                    bv[:] = sv
                    for i in range(jin_off[slot], jin_off[slot + 1]):
                        if (mask >> (i - jin_off[slot])) & 1:
                            bv[jin_dat[i]] -= 1
                    bv[base] = bv[base + 1] = bv[base + 2] = bv[base + 3] = 0
                    for b in range(out_off[node], out_off[node + 1]):
                        fout = out_dat[b]
                        if bv[fout] == 255:
                            overflowed = True
                            break
                        bv[fout] += 1
                    if overflowed:
                        break
                    successors.append((node, bytes(buf), False))
                else:
                    k = out_off[node + 1] - out_off[node]
                    if k > 20:
                        raise VerificationError(
                            f"inclusive split fanout {k} exceeds the supported bound of 20"
                        )
                    slot = slot_of[node]
                    for a in range(in_off[node], in_off[node + 1]):
                        fin = in_dat[a]
                        if not sv[fin]:
                            continue
                        for mask in range(1, 1 << k):
                            bv[:] = sv
                            bv[fin] -= 1
                            for b in range(k):
                                if (mask >> b) & 1:
                                    fout = out_dat[out_off[node] + b]
                                    if bv[fout] == 255:
                                        overflowed = True
                                        break
                                    bv[fout] += 1
                            if overflowed:
                                break
                            if slot >= 0:
                                base = F + 1 + 4 * slot
                                if bv[base] or bv[base + 1] or bv[base + 2] or bv[base + 3]:
                                    raise VerificationError(
                                        "inclusive split activated again while a "
                                        "previous activation is still in flight"
                                    )
                                bv[base] = mask & 0xFF
                                bv[base + 1] = (mask >> 8) & 0xFF
                                bv[base + 2] = (mask >> 16) & 0xFF
                                bv[base + 3] = (mask >> 24) & 0xFF
                            successors.append((node, bytes(buf), False))
                        if overflowed:
                            break
                    if overflowed:
                        break

        if overflowed:
            break

        if not successors:
            # Final: completed at least once with nothing else marked.
            any_token = False
            if sv[F] == 0:
                any_token = True
            else:
                for c in range(size):
                    if c != F and sv[c]:
                        any_token = True
                        break
            if any_token:
                deadlocks.add(state)
            continue

        for item in successors:
            node = <int> item[0]
            new_state = item[1]
            fired_v[node] = 1
            if item[2]:
                impropers.add(new_state)
            sv = new_state
            for f in range(F):
                if sv[f] > max_tokens:
                    max_tokens = sv[f]
            if new_state not in visited:
                if visited_count >= state_cap:
                    exploded = True
                    break
                visited.add(new_state)
                visited_count += 1
                queue.append(new_state)

    return (
        len(visited),
        exploded,
        overflowed,
        fired,
        max_tokens,
        sorted(deadlocks),
        sorted(impropers),
    )
