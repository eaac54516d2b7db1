"""Build script for the optional compiled kernel.

The package works without the extension (a NumPy fallback is selected at
import time); building it makes the trajectory-ensemble kernels much faster.
Set INFOFLOW_SKIP_EXT=1 to install pure-Python only.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("INFOFLOW_SKIP_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "infoflow.backends._compiled",
                    ["src/infoflow/backends/_compiled.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3", "-fopenmp"],
                    extra_link_args=["-fopenmp"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
