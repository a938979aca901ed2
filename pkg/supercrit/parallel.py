import asyncio
from concurrent.futures import ThreadPoolExecutor

from supercrit.config import DEFAULT_THREADS
from supercrit.logging_config import loggers

logger = loggers['lab']


async def gather_in_executor(func, items, threads=DEFAULT_THREADS):
    """Run func over items on a thread pool; results keep input order"""
    loop = asyncio.get_event_loop()
    with ThreadPoolExecutor(max_workers=max(int(threads), 1)) as executor:
        futures = [loop.run_in_executor(executor, func, item) for item in items]
        return await asyncio.gather(*futures)


def map_in_threads(func, items, threads=DEFAULT_THREADS):
    """Blocking wrapper around gather_in_executor"""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"Fanning out {len(items)} tasks over {threads} threads")
    return asyncio.run(gather_in_executor(func, items, threads))
