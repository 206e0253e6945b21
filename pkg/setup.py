"""Builds the optional compiled branch-and-bound kernel.

Without Cython or a C compiler the package installs pure-Python and the
fallback kernel is used.
"""
from setuptools import setup

DIRECTIVES = {
    "language_level": "3",
    "boundscheck": False,
    "wraparound": False,
    "cdivision": True,
    "embedsignature": True,
}

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "coarsegroups._kernels._bnb_c",
                ["src/coarsegroups/_kernels/_bnb_c.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives=DIRECTIVES,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
