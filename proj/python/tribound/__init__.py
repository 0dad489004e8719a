"""Decision-boundary backdoor scanning for hard-label classifiers."""

try:
    from ._tribound import *  # noqa: F401,F403
    from ._tribound import __doc__  # noqa: F401
except ImportError:  # in-tree build: the extension sits next to the package
    from _tribound import *  # type: ignore  # noqa: F401,F403

__version__ = "0.1.0"
