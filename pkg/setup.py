"""Build script: compiles the optional Cython decode kernel.

The package works without the extension (a numpy fallback is selected at
import time); the build therefore tolerates a missing compiler.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("UAVNOMA_SKIP_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "uavnoma._decode_cy",
                    ["src/uavnoma/_decode_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
