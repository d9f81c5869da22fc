import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, TypeVar

from tqdm import tqdm

from config import Settings
from utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

T = TypeVar("T")


def run_trials(
    trial: Callable[[int], T],
    n_trials: int,
    workers: Optional[int] = None,
    progress: bool = False,
    desc: str = "trials",
) -> list[T]:
    """Evaluate ``trial(i)`` for i = 0 .. n_trials - 1; results come back in trial order.

    Each trial owns its random stream (see ``trial_rng``), so the output does
    not depend on the number of workers or on completion order.
    """
    if n_trials < 0:
        raise InvalidInputError(f"n_trials must be >= 0, got {n_trials}")
    if workers is None:
        workers = Settings().resolved_workers()
    workers = max(1, min(workers, n_trials or 1))
    logger.debug("running %d %s on %d workers", n_trials, desc, workers)

    if workers == 1:
        iterator = map(trial, range(n_trials))
        return list(tqdm(iterator, total=n_trials, desc=desc, disable=not progress))

    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="trial") as pool:
        iterator = pool.map(trial, range(n_trials))
        return list(tqdm(iterator, total=n_trials, desc=desc, disable=not progress))
