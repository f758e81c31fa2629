import numpy as np

BLOCK_SIZE = 4096


def block_generator(master_seed: int, block: int) -> np.random.Generator:
    """Counter-based generator owned by replicate block ``block``.

    The stream depends only on ``(master_seed, block)``, so results do not depend on which
    worker runs the block.
    """
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(block,)))
    )


def block_sizes(replicates: int) -> list[int]:
    """Sizes of the fixed replicate blocks covering ``replicates``."""
    full, rest = divmod(replicates, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])
