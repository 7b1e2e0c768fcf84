from .suite import run_suite

__all__ = ["run_suite"]
