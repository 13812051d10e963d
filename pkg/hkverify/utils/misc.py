# misc.py
#
# This file is part of hkverify: certified simulation and consensus verification
# for bounded-confidence opinion dynamics.
#
#    Copyright (c) 2024 and later, the hkverify developers
#    All rights reserved.
#
#    This source code is licensed under the BSD-style license found in the
#    LICENSE file in the root directory of this source tree.
############################################################################

import functools
import platform

from io import StringIO
from typing import Any, Callable, Iterable, Optional, Union

import mpmath
import numpy as np
import scipy as sp

from hkverify.settings import IN_IPYTHON

if IN_IPYTHON:
    from tqdm.notebook import tqdm
else:
    from tqdm import tqdm

TRUE_WORDS = ("true", "yes", "on")
FALSE_WORDS = ("false", "no", "off")


def progress(
    iterable: Iterable[Any],
    desc: str,
    total: Optional[int] = None,
    disable: Optional[bool] = None,
) -> Iterable[Any]:
    """Wrap `iterable` in a tqdm bar, honoring `settings.PROGRESSBAR_DISABLED`."""
    import hkverify.settings as settings

    if disable is None:
        disable = settings.PROGRESSBAR_DISABLED
    return tqdm(iterable, desc=desc, total=total, disable=disable, leave=False)


class InfoBar:
    """Static bar naming a parallel campaign while worker processes run it; tqdm
    cannot count across a process pool.

    Parameters
    ----------
    desc:
        text shown on the bar
    num_cpus:
        worker processes; a single process shows nothing
    """

    def __init__(self, desc: str, num_cpus: int) -> None:
        self.desc = desc
        self.num_cpus = num_cpus
        self.tqdm_bar: tqdm = None

    def __enter__(self) -> None:
        import hkverify.settings as settings

        self.tqdm_bar = tqdm(
            total=0,
            disable=(self.num_cpus == 1 or settings.PROGRESSBAR_DISABLED),
            leave=False,
            desc=self.desc,
            bar_format="{desc}",
        )

    def __exit__(self, *args) -> None:
        self.tqdm_bar.close()


def needs_matplotlib(available: bool) -> Callable[[Callable], Callable]:
    """Decorator for plotting functions: without matplotlib they raise ImportError
    naming the `graphics` extra instead of failing on first use."""

    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def decorated_func(*args, **kwargs):
            if not available:
                raise ImportError(
                    "{} draws with matplotlib; install it through `pip install"
                    " hkverify[graphics]`".format(func.__name__)
                )
            return func(*args, **kwargs)

        return decorated_func

    return decorator


def parse_setting(text: str) -> Union[bool, int, str]:
    """Value of one INI entry: integers and yes/no words are converted, everything
    else stays text. Opinions, diameters and widths are parsed exactly later on, so
    `5e-4` must not turn into a float here."""
    text = text.strip()
    lowered = text.lower()
    if lowered in TRUE_WORDS:
        return True
    if lowered in FALSE_WORDS:
        return False
    try:
        return int(text)
    except ValueError:
        return text


def about(print_info: bool = True) -> Optional[str]:
    """Version report of hkverify and of the numerical packages its enclosures and
    campaigns rely on.

    Parameters
    ----------
    print_info:
        print the report (True) or return it (False)
    """
    from hkverify import __version__

    import hkverify.settings as settings

    fs = StringIO()
    fs.write("hkverify: certified bounded-confidence opinion dynamics\n")
    fs.write("hkverify version: {}\n".format(__version__))
    fs.write("numpy version:    {}\n".format(np.__version__))
    fs.write("scipy version:    {}\n".format(sp.__version__))
    fs.write("mpmath version:   {}\n".format(mpmath.__version__))
    fs.write("mpmath backend:   {}\n".format(mpmath.libmp.BACKEND))
    fs.write(
        "arithmetic:       {} ({} bits)\n".format(
            settings.ARITH_MODE, settings.PRECISION_BITS
        )
    )
    fs.write(
        "platform:         {} ({})\n".format(platform.system(), platform.machine())
    )
    if print_info:
        print(fs.getvalue())
        return None
    return fs.getvalue()
