# cpu_switch.py
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

import logging

from typing import Optional

import hkverify.settings as settings

from hkverify.utils.typedefs import MapMethod

LOGGER = logging.getLogger(__name__)


def get_map_method(num_cpus: Optional[int] = None) -> MapMethod:
    """
    Selects the `.map` method used for independent work units (grid points,
    Monte-Carlo trials). For num_cpus>1 a pathos or multiprocessing pool is started
    and kept in `settings.POOL`.

    Parameters
    ----------
    num_cpus:
        number of worker processes; defaults to `settings.NUM_CPUS`

    Returns
    -------
    function
        `.map` method to be used by caller
    """
    num_cpus = settings.NUM_CPUS if num_cpus is None else num_cpus
    if num_cpus < 1:
        raise ValueError("num_cpus must be positive, got {}".format(num_cpus))
    if num_cpus == 1:
        return map

    LOGGER.info("starting %s pool with %d processes", settings.MULTIPROC, num_cpus)
    if settings.MULTIPROC == "pathos":
        try:
            import dill
            import pathos
        except ImportError:
            raise ImportError(
                "hkverify multiprocessing mode set to 'pathos'. Need but cannot find"
                " 'pathos'/'dill'!"
            )
        else:
            dill.settings["recurse"] = True
            settings.POOL = pathos.pools.ProcessPool(nodes=num_cpus)
            return settings.POOL.map
    if settings.MULTIPROC == "multiprocessing":
        import multiprocessing

        settings.POOL = multiprocessing.Pool(processes=num_cpus)
        return settings.POOL.map
    raise ValueError(
        "Unknown multiprocessing type: settings.MULTIPROC = {}".format(
            settings.MULTIPROC
        )
    )


def close_pool() -> None:
    """Shut down a pool started by `get_map_method`."""
    pool = settings.POOL
    if pool is None:
        return
    if hasattr(pool, "clear"):
        pool.close()
        pool.join()
        pool.clear()
    else:
        pool.close()
        pool.join()
    settings.POOL = None
