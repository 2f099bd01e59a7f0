"""Shared helpers: randomized but reproducible composition generators."""

from __future__ import annotations

import random
from typing import List, Optional, Tuple

import pytest

from llflow.actions import (
    Composition,
    Selection,
    as_composition,
    join_action,
    tensor_action,
    with_action,
)
from llflow.formulas import (
    Formula,
    Plus,
    ProcessSpec,
    Sequent,
    Tensor,
    atom,
    dual,
    plus,
    tensor,
)

ATOM_POOL = ["A", "B", "C", "D", "E", "F", "G", "H"]


def random_output(rng: random.Random, depth: int = 2, plus_bias: float = 0.25) -> Formula:
    """A small output-polarity formula; optional branches kept rare so that
    exhaustive simulation stays tractable."""
    if depth == 0 or rng.random() < 0.45:
        return atom(rng.choice(ATOM_POOL))
    op = plus if rng.random() < plus_bias else tensor
    return op(
        random_output(rng, depth - 1, plus_bias),
        random_output(rng, depth - 1, plus_bias),
    )


def random_spec(rng: random.Random, name: str, n_inputs: Optional[int] = None) -> ProcessSpec:
    if n_inputs is None:
        n_inputs = rng.randint(0, 3)
    inputs = [dual(random_output(rng, 1, 0.15)) for _ in range(n_inputs)]
    return ProcessSpec(name, Sequent(inputs), random_output(rng, 2))


def random_path(rng: random.Random, f: Formula) -> Tuple[str, ...]:
    """A random (possibly empty) left/right descent into an output tree."""
    path: List[str] = []
    cur = f
    while isinstance(cur, (Tensor, Plus)) and rng.random() < 0.7:
        step = rng.choice(["left", "right"])
        path.append(step)
        cur = cur.l if step == "left" else cur.r
    return tuple(path)


def subterm(f: Formula, path) -> Formula:
    cur = f
    for step in path:
        cur = cur.l if step == "left" else cur.r
    return cur


def random_chain(
    rng: random.Random, length: int, tag: str, collect: Optional[List[Composition]] = None
) -> Composition:
    """Compose `length` fresh processes into one workflow.

    Joins are built to succeed: the new consumer always gets an input dual
    to the producer subterm the priority selects.  Tensor and conditional
    steps are mixed in for coverage.  Every intermediate composition is
    appended to `collect` when given.
    """
    current = as_composition(random_spec(rng, f"{tag}_p0", rng.randint(0, 2)))
    for i in range(1, length):
        name = f"{tag}_p{i}"
        roll = rng.random()
        if roll < 0.2:
            current = tensor_action(current, random_spec(rng, name))
        elif roll < 0.4 and len(current.spec.inputs) > 0:
            other = random_spec(rng, name, rng.randint(1, 2))
            sel_p = Selection("input", index=rng.randrange(len(current.spec.inputs)))
            sel_q = Selection("input", index=rng.randrange(len(other.inputs)))
            current = with_action(current, sel_p, other, sel_q)
        else:
            path = random_path(rng, current.spec.output)
            piece = subterm(current.spec.output, path)
            extra = [dual(atom(rng.choice(ATOM_POOL))) for _ in range(rng.randint(0, 1))]
            consumer = ProcessSpec(
                name, Sequent([dual(piece)] + extra), random_output(rng, 1)
            )
            sel_in_index = consumer.inputs.formulas.index(dual(piece))
            current = join_action(
                current,
                consumer,
                sel_out=Selection("output", path=path),
                sel_in=Selection("input", index=sel_in_index),
            )
        if collect is not None:
            collect.append(current)
    return current


@pytest.fixture
def rng():
    return random.Random(20260810)
