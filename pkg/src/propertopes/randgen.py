"""Seeded random fixtures: decorated graphs, layouts, and slice elements.

Everything here is deterministic under a fixed ``random.Random`` seed; these
builders feed the property suites and the acceptance checks.
"""

from __future__ import annotations

import random
from typing import Any, Sequence

from .core import PropElement, PropImpl, Profile
from .graphs import Component, DecoratedGraph, MNGraph, decorate, validate_decoration, validate_mn_graph
from .perms import Perm


def random_decorated_graph(
    prop: PropImpl,
    rng: random.Random,
    max_depth: int = 3,
    max_width: int = 3,
    colors: Sequence[Any] | None = None,
    max_tries: int = 60,
) -> DecoratedGraph:
    """A random valid connected decorated graph over ``prop``.

    Wires carry random colors; vertex decorations are sampled per profile
    pair.  Leg labels are shuffled so that nontrivial boundary permutations
    are exercised.  Retries until the result is connected and decorable.
    """
    palette = list(colors if colors is not None else (prop.colors or ()))
    if not palette:
        raise ValueError("random graphs need an enumerable color palette")
    for _ in range(max_tries):
        got = _try_random_graph(prop, rng, max_depth, max_width, palette)
        if got is not None:
            return got
    raise RuntimeError("could not generate a random decorated graph; component sampling kept failing")


def _try_random_graph(prop, rng, max_depth, max_width, palette) -> DecoratedGraph | None:
    depth = rng.randint(1, max_depth)
    n_inputs = rng.randint(1, max_width)
    # wires: list of (producer, color); producer = ("in", leg) | (vertex, port)
    pool: list[tuple[Any, Any]] = [(("in", i), rng.choice(palette)) for i in range(n_inputs)]
    vertices: list[tuple[int, int]] = []
    decorations: list[PropElement] = []
    edges: list[tuple[int, int, int, int]] = []
    inputs: dict[int, tuple[int, int]] = {}

    def consume(wire, v, port):
        producer, _ = wire
        if producer[0] == "in":
            inputs[producer[1]] = (v, port)
        else:
            edges.append((producer[0], producer[1], v, port))

    for _level in range(depth):
        n_new = rng.randint(1, max_width)
        next_pool: list[tuple[Any, Any]] = []
        rng.shuffle(pool)
        for _ in range(n_new):
            if not pool:
                break
            k = rng.randint(1, min(2, len(pool)))
            consumed = [pool.pop() for _ in range(k)]
            in_colors = tuple(c for _, c in consumed)
            n_out = rng.randint(1, 2)
            out_colors = tuple(rng.choice(palette) for _ in range(n_out))
            dec = prop.sample_element(out_colors, in_colors, rng)
            if dec is None:
                return None
            v = len(vertices)
            vertices.append((len(in_colors), len(out_colors)))
            decorations.append(dec)
            for port, wire in enumerate(consumed):
                consume(wire, v, port)
            next_pool.extend(((v, p), out_colors[p]) for p in range(n_out))
        pool = next_pool + pool
    if not vertices:
        return None

    # all remaining wires become outputs; inputs that were never consumed are illegal
    if len(inputs) != n_inputs:
        return None
    out_wires = [w for w in pool]
    if not out_wires:
        return None
    # forbid input-to-output wires (need a vertex on every path)
    if any(p[0] == "in" for p, _ in out_wires):
        return None

    input_order = list(range(n_inputs))
    rng.shuffle(input_order)
    output_order = list(range(len(out_wires)))
    rng.shuffle(output_order)
    comp = Component(
        tuple(vertices),
        tuple(sorted(edges)),
        tuple(inputs[i] for i in input_order),
        tuple(out_wires[j][0] for j in output_order),
    )
    graph = MNGraph((comp,))
    if not validate_mn_graph(graph).ok:
        return None
    try:
        dg = decorate(graph, [decorations])
    except Exception:
        return None
    if not validate_decoration(prop, dg).ok:
        return None
    return dg


def random_base_elements(prop: PropImpl, rng: random.Random, n: int, max_arity: int = 3) -> list:
    out = []
    for _ in range(n * 3):
        if len(out) >= n:
            break
        out_p = tuple(rng.choice(list(prop.colors)) for _ in range(rng.randint(1, max_arity)))
        in_p = tuple(rng.choice(list(prop.colors)) for _ in range(rng.randint(1, max_arity)))
        x = prop.sample_element(out_p, in_p, rng)
        if x is not None:
            out.append(x)
    return out


def random_propertope(prop: PropImpl, dim: int, rng: random.Random, palette_size: int = 4):
    """A random propertope of the given dimension over an enumerable-color base."""
    from .facecat import Propertope, iterated, propertope_color
    from .slices import SliceSampler

    if dim == 0:
        return propertope_color(prop, rng.choice(list(prop.colors)))
    if dim == 1:
        (x,) = random_base_elements(prop, rng, 1)
        return Propertope(prop.name, 1, x)
    sampler = SliceSampler(iterated(prop, 1), max_width=2)
    for level in range(3, dim + 1):
        lower = sampler
        sampler = SliceSampler(
            iterated(prop, level - 1),
            base_colors=(),
            base_sampler=lambda r, s=lower: s.element(r),
        )
    value = sampler.element(rng)
    if rng.random() < 0.4:
        value = iterated(prop, dim - 1).hcomp(value, sampler.element(rng))
    return Propertope(prop.name, dim, value)


def random_layouts(dg: DecoratedGraph, ci: int, rng: random.Random, count: int = 3):
    """Alternative valid (leveling, entry_orders) pairs for one component."""
    from .graphs import _vertex_depths, level_decompose

    c = dg.graph.components[ci]
    base = _vertex_depths(c)
    layouts = []
    for _ in range(count):
        slack = [0] * (max(base) + 1)
        for i in range(1, len(slack)):
            slack[i] = slack[i - 1] + rng.randint(0, 1)
        leveling = [base[v] + slack[base[v]] for v in range(c.n_vertices)]
        # random entry orders per layer
        dec = level_decompose(dg, ci, leveling)
        orders = []
        for layer in dec.layers:
            order = list(range(len(layer)))
            rng.shuffle(order)
            orders.append(order)
        layouts.append((leveling, orders))
    return layouts
