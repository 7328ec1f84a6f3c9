"""Build script for the optional compiled gate kernels.

The package works without the extension (a NumPy fallback is selected at
import time), so the build is marked optional and any compiler failure
degrades to a pure-Python install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "mbqclab.kernels._core",
                ["src/mbqclab/kernels/_core.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
