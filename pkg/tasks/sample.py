import logging

import pandas as pd

from tasks import write_table
from triangles.montecarlo import sample_triangles

COLUMNS = ["a", "b", "c", "alpha", "beta", "gamma"]


def sample_frame(config):
    batch = sample_triangles(config.model, config.n, seed=config.seed,
                             chunk_size=config.chunk_size, threads=config.threads)
    return pd.DataFrame({name: getattr(batch, name) for name in COLUMNS}, columns=COLUMNS)


def cmd_sample(config):
    logging.info(f"Sampling {config.n} triangles from {config.model.label} with seed {config.seed}")
    try:
        write_table(sample_frame(config), config)
    except Exception as e:
        logging.error(f"Error in sample: {str(e)}")
        raise
    return 0
