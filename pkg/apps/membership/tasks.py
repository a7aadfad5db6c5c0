"""
Celery tasks for Monte-Carlo verification runs.
"""
import logging

from celery import shared_task

from apps.schemes.exceptions import SchemeError

from .membership import simulate_scores

logger = logging.getLogger(__name__)


@shared_task(name='simulate_run')
def simulate_run(config, run_index):
    """
    Execute one verification run.

    Args:
        config: validated run config (JSON-serializable)
        run_index: index mixed into the run seed

    Returns:
        dict: {'run_index', 'positive', 'negative'}
    """
    try:
        positive, negative, _ = simulate_scores(config, run_index)
    except SchemeError as e:
        logger.error(f"Run {run_index} failed: {e}")
        raise

    logger.debug(f"Run {run_index} finished")
    return {'run_index': run_index, 'positive': positive.tolist(), 'negative': negative.tolist()}
