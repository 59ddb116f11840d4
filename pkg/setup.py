"""Build script for the optional compiled dynamics kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so the build tolerates a missing Cython toolchain. Set
FCMKIT_SKIP_EXT=1 to force a pure-Python install.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("FCMKIT_SKIP_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "fcmkit.kernels._ckernel",
                    ["src/fcmkit/kernels/_ckernel.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    optional=True,
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
