# __main__.py
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

from hkverify.cli import main

if __name__ == "__main__":
    main()
