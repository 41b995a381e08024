from .random import rng_for_date
