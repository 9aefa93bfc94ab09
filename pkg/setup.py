"""Build script: compiles the optional fast kernels extension.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compilation only costs speed. Set
MICROTRAP_NO_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import setup


def extensions():
    if os.environ.get("MICROTRAP_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "microtrap._kernels",
        ["src/microtrap/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        # -ffp-contract=off keeps the compiled arithmetic bit-compatible
        # with the numpy fallback (no FMA re-association).
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
