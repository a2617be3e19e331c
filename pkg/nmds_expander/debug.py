import sys

from .preferences import get_preferences


def debug_print(*args, **kwargs):
    if get_preferences().debug:
        print(*args, file=sys.stderr, **kwargs)