"""Pure-Python token-game exploration engine.

Reference implementation of the exhaustive marking search; the compiled
module `_tokengame` mirrors it operation for operation and both must return
identical results. States are packed bytes:

    [0:F)             token count per flow (one byte each)
    [F]               completion count (end-event firings)
    [F+1+4s : F+5+4s) little-endian u32 branch mask for inclusive split slot s

Node kind codes: 0 start, 1 end, 2 task, 3 exclusive, 4 parallel,
5 inclusive. Successor order is fixed (nodes ascending, incoming flows
ascending, outgoing flows ascending, subset masks ascending) and the search
is breadth-first, so results are deterministic.
"""

from __future__ import annotations

from collections import deque

from .errors import VerificationError

START, END, TASK, XOR, AND, OR = range(6)


class _Overflow(Exception):
    """A flow would hold more than 255 tokens; the net is unbounded."""


def explore(
    kinds: bytes,
    in_flows: list[tuple[int, ...]],
    out_flows: list[tuple[int, ...]],
    flow_target: tuple[int, ...],
    start: int,
    n_flows: int,
    incl_slot: dict[int, int],
    incl_join: dict[int, tuple[int, tuple[int, ...]]],
    n_slots: int,
    state_cap: int,
):
    """Exhaustive reachability search from the initial marking.

    Returns (states_explored, exploded, overflowed, fired, max_tokens,
    deadlock_states, improper_states).
    """
    F = n_flows
    size = F + 1 + 4 * n_slots
    init_arr = bytearray(size)
    for f in out_flows[start]:
        init_arr[f] = 1
    init = bytes(init_arr)

    visited = {init}
    queue = deque([init])
    fired = bytearray(len(kinds))
    deadlocks: set[bytes] = set()
    impropers: set[bytes] = set()
    max_tokens = 1 if out_flows[start] else 0
    exploded = False
    overflowed = False

    while queue and not exploded:
        state = queue.popleft()
        try:
            successors = _successors(
                state, kinds, in_flows, out_flows, flow_target,
                incl_slot, incl_join, F,
            )
        except _Overflow:
            overflowed = True
            break

        if not successors:
            if not _is_final(state, F):
                deadlocks.add(state)
            continue

        for node, new_state, improper in successors:
            fired[node] = 1
            if improper:
                impropers.add(new_state)
            m = max(new_state[:F]) if F else 0
            if m > max_tokens:
                max_tokens = m
            if new_state not in visited:
                if len(visited) >= state_cap:
                    exploded = True
                    break
                visited.add(new_state)
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


def _successors(state, kinds, in_flows, out_flows, flow_target, incl_slot, incl_join, F):
    successors: list[tuple[int, bytes, bool]] = []
    candidates = sorted({flow_target[f] for f in range(F) if state[f]})
    for node in candidates:
        kind = kinds[node]
        if kind == TASK or kind == START:
            for fin in in_flows[node]:
                if state[fin]:
                    buf = bytearray(state)
                    buf[fin] -= 1
                    _produce(buf, out_flows[node])
                    successors.append((node, bytes(buf), False))
        elif kind == END:
            for fin in in_flows[node]:
                if state[fin]:
                    buf = bytearray(state)
                    buf[fin] -= 1
                    buf[F] += 1
                    improper = buf[F] > 1 or any(buf[:F]) or any(buf[F + 1:])
                    successors.append((node, bytes(buf), improper))
        elif kind == XOR:
            for fin in in_flows[node]:
                if state[fin]:
                    for fout in out_flows[node]:
                        buf = bytearray(state)
                        buf[fin] -= 1
                        _produce(buf, (fout,))
                        successors.append((node, bytes(buf), False))
        elif kind == AND:
            ins = in_flows[node]
            if ins and all(state[f] for f in ins):
                buf = bytearray(state)
                for fin in ins:
                    buf[fin] -= 1
                _produce(buf, out_flows[node])
                successors.append((node, bytes(buf), False))
        else:  # OR
            join = incl_join.get(node)
            if join is not None:
                fired_state = _fire_inclusive_join(state, node, join, out_flows, F)
                if fired_state is not None:
                    successors.append((node, fired_state, False))
            else:
                _fire_inclusive_split(
                    state, node, in_flows, out_flows, incl_slot, F, successors
                )
    return successors


def _produce(buf: bytearray, flows) -> None:
    for f in flows:
        if buf[f] == 255:
            raise _Overflow
        buf[f] += 1


def _is_final(state: bytes, F: int) -> bool:
    return state[F] >= 1 and not any(state[:F]) and not any(state[F + 1:])


def _fire_inclusive_split(state, node, in_flows, out_flows, incl_slot, F, successors):
    outs = out_flows[node]
    if len(outs) > 20:
        raise VerificationError(
            f"inclusive split fanout {len(outs)} exceeds the supported bound of 20"
        )
    slot = incl_slot.get(node)
    for fin in in_flows[node]:
        if not state[fin]:
            continue
        for mask in range(1, 1 << len(outs)):
            buf = bytearray(state)
            buf[fin] -= 1
            for i, fout in enumerate(outs):
                if (mask >> i) & 1:
                    _produce(buf, (fout,))
            if slot is not None:
                base = F + 1 + 4 * slot
                if buf[base] or buf[base + 1] or buf[base + 2] or buf[base + 3]:
                    raise VerificationError(
                        "inclusive split activated again while a previous "
                        "activation is still in flight"
                    )
                buf[base] = mask & 0xFF
                buf[base + 1] = (mask >> 8) & 0xFF
                buf[base + 2] = (mask >> 16) & 0xFF
                buf[base + 3] = (mask >> 24) & 0xFF
            successors.append((node, bytes(buf), False))


def _fire_inclusive_join(state, node, join_info, out_flows, F):
    slot, join_ins = join_info
    base = F + 1 + 4 * slot
    mask = (
        state[base]
        | (state[base + 1] << 8)
        | (state[base + 2] << 16)
        | (state[base + 3] << 24)
    )
    if mask == 0:
        return None
    for i, fin in enumerate(join_ins):
        if bool(state[fin]) != bool((mask >> i) & 1):
            return None
    buf = bytearray(state)
    for i, fin in enumerate(join_ins):
        if (mask >> i) & 1:
            buf[fin] -= 1
    buf[base] = buf[base + 1] = buf[base + 2] = buf[base + 3] = 0
    _produce(buf, out_flows[node])
    return bytes(buf)
