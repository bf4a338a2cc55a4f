import random

import pytest

from ncupper.algebra import AlgebraSpec, GeneratorSpec, Letter, Word


@pytest.fixture
def herm_algebra():
    """Two hermitian-unitary generators, one tensor factor."""
    return AlgebraSpec((GeneratorSpec("b1", "hermitian-unitary", 0),
                        GeneratorSpec("b2", "hermitian-unitary", 0)))


@pytest.fixture
def unitary_algebra():
    """Two unitary generators, one tensor factor."""
    return AlgebraSpec((GeneratorSpec("u1", "unitary", 0),
                        GeneratorSpec("u2", "unitary", 0)))


@pytest.fixture
def bipartite_algebra():
    """The CHSH-style algebra: two hermitian-unitary generators per factor."""
    return AlgebraSpec((GeneratorSpec("b1", "hermitian-unitary", 0),
                        GeneratorSpec("b2", "hermitian-unitary", 0),
                        GeneratorSpec("c1", "hermitian-unitary", 1),
                        GeneratorSpec("c2", "hermitian-unitary", 1)))


def random_word(rng: random.Random, algebra: AlgebraSpec, max_len: int) -> Word:
    letters = []
    for _ in range(rng.randrange(max_len + 1)):
        g = rng.choice(algebra.generators)
        star = rng.random() < 0.5 and g.kind != "hermitian-unitary"
        letters.append(Letter(g.id, star))
    return Word(tuple(letters))
