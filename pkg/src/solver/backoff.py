"""
Step-halving decorator shared by the Newton line search and the continuation step.
The decorated function receives the current step and raises to request a smaller one.
"""

import functools
from typing import Any, Callable, TypeVar

T = TypeVar("T")


class HalvingExhausted(Exception):
    """Raised when the step has been halved as often as allowed."""

    def __init__(self, message: str, last_step: float, halvings: int):
        super().__init__(message)
        self.last_step = last_step
        self.halvings = halvings


def with_halving(
    initial_step: float = 1.0,
    max_halvings: int = 30,
    min_step: float = 0.0,
    exceptions: tuple = (Exception,),
    on_retry: Callable[[int, Exception], None] | None = None,
):
    """
    Decorator that retries a function with a halved step.

    Args:
        initial_step: First step handed to the function
        max_halvings: Maximum number of halvings before giving up
        min_step: Give up once the step would fall below this floor
        exceptions: Tuple of exceptions that trigger a halving
        on_retry: Optional callback function(halving, exception) called on each halving

    The wrapped function is called as ``func(step, *args, **kwargs)`` and the
    wrapper returns ``(result, step, halvings)``.
    """
    def decorator(func: Callable[..., T]) -> Callable[..., tuple]:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> tuple:
            step = initial_step
            last_exception = None

            for halving in range(max_halvings + 1):
                try:
                    return func(step, *args, **kwargs), step, halving
                except exceptions as e:
                    last_exception = e

                    if halving == max_halvings or step / 2 < min_step:
                        break

                    if on_retry:
                        on_retry(halving + 1, e)
                    step /= 2

            raise HalvingExhausted(
                f"step rejected down to {step:.3g} after {halving} halvings. Last error: {last_exception}",
                last_step=step,
                halvings=halving,
            ) from last_exception

        return wrapper
    return decorator
